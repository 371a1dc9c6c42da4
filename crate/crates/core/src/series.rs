//! Power series over a finite field truncated by total degree.
//!
//! A [`SeriesRing`] is `F_q[[u_1..u_a]][[X_1..X_n, T]]` modulo all monomials
//! of total degree `>= D`. The `u` variables generate the maximal ideal of
//! the coefficient ring; either group may be empty.

use crate::error::{Error, Result};
use crate::gf::{Fq, GaloisField};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesRing {
    field: GaloisField,
    coefficient_vars: Vec<String>,
    x_vars: Vec<String>,
    t_var: String,
    truncation: u32,
}

impl SeriesRing {
    pub fn new(
        field: GaloisField,
        coefficient_vars: Vec<String>,
        x_vars: Vec<String>,
        t_var: &str,
        truncation: u32,
    ) -> Result<Arc<Self>> {
        if truncation < 1 {
            return Err(Error::InvalidDescriptor("truncation order must be at least 1".into()));
        }
        let ring = SeriesRing { field, coefficient_vars, x_vars, t_var: t_var.into(), truncation };
        let mut seen = std::collections::BTreeSet::new();
        for v in ring.var_names().into_iter().chain(std::iter::once(ring.field.generator_name().to_string())) {
            if !seen.insert(v.clone()) {
                return Err(Error::DuplicateVariable(v));
            }
        }
        Ok(Arc::new(ring))
    }

    /// The same ring with another truncation order.
    pub fn with_truncation(&self, truncation: u32) -> Result<Arc<Self>> {
        SeriesRing::new(self.field.clone(), self.coefficient_vars.clone(), self.x_vars.clone(), &self.t_var, truncation)
    }

    pub fn field(&self) -> &GaloisField {
        &self.field
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn coefficient_vars(&self) -> &[String] {
        &self.coefficient_vars
    }

    pub fn x_vars(&self) -> &[String] {
        &self.x_vars
    }

    pub fn t_var(&self) -> &str {
        &self.t_var
    }

    /// Coefficient variables, then `X`, then `T`.
    pub fn var_names(&self) -> Vec<String> {
        self.coefficient_vars
            .iter()
            .chain(self.x_vars.iter())
            .cloned()
            .chain(std::iter::once(self.t_var.clone()))
            .collect()
    }

    pub fn nvars(&self) -> usize {
        self.coefficient_vars.len() + self.x_vars.len() + 1
    }

    pub fn t_index(&self) -> usize {
        self.nvars() - 1
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.var_names().iter().position(|v| v == name)
    }

    /// Descriptor in the CLI grammar.
    pub fn descriptor(&self) -> String {
        let mut s = format!("GF({})", self.field.order());
        if !self.coefficient_vars.is_empty() {
            s.push_str(&format!("[[{}]]", self.coefficient_vars.join(",")));
        }
        let mut last: Vec<String> = self.x_vars.clone();
        last.push(self.t_var.clone());
        s.push_str(&format!("[[{}]] D={}", last.join(","), self.truncation));
        s
    }
}

impl fmt::Display for SeriesRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

pub type Monomial = Vec<u32>;

/// An element of a [`SeriesRing`]: no stored term of total degree `>= D`,
/// no zero coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    ring: Arc<SeriesRing>,
    terms: BTreeMap<Monomial, Fq>,
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self, self.ring)
    }
}

fn degree(m: &[u32]) -> u32 {
    m.iter().sum()
}

impl TruncatedSeries {
    pub fn zero(ring: &Arc<SeriesRing>) -> Self {
        TruncatedSeries { ring: ring.clone(), terms: BTreeMap::new() }
    }

    pub fn constant(ring: &Arc<SeriesRing>, c: Fq) -> Self {
        Self::from_terms(ring, [(vec![0; ring.nvars()], c)])
    }

    pub fn one(ring: &Arc<SeriesRing>) -> Self {
        Self::constant(ring, 1)
    }

    pub fn from_int(ring: &Arc<SeriesRing>, n: i64) -> Self {
        Self::constant(ring, ring.field.from_int(n))
    }

    pub fn variable(ring: &Arc<SeriesRing>, name: &str) -> Result<Self> {
        let i = ring.var_index(name).ok_or_else(|| Error::Invalid(format!("unknown series variable `{name}`")))?;
        Ok(Self::monomial(ring, i, 1))
    }

    /// `v_i^e`.
    pub fn monomial(ring: &Arc<SeriesRing>, i: usize, e: u32) -> Self {
        let mut m = vec![0; ring.nvars()];
        m[i] = e;
        Self::from_terms(ring, [(m, 1)])
    }

    /// Sums the given terms and drops everything of degree `>= D`.
    pub fn from_terms(ring: &Arc<SeriesRing>, terms: impl IntoIterator<Item = (Monomial, Fq)>) -> Self {
        let f = &ring.field;
        let mut map: BTreeMap<Monomial, Fq> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.len(), ring.nvars(), "monomial arity");
            if degree(&m) >= ring.truncation || c == 0 {
                continue;
            }
            let e = map.entry(m).or_insert(0);
            *e = f.add(*e, c);
        }
        map.retain(|_, c| *c != 0);
        TruncatedSeries { ring: ring.clone(), terms: map }
    }

    pub fn ring(&self) -> &Arc<SeriesRing> {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Fq)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &[u32]) -> Fq {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn constant_term(&self) -> Fq {
        self.coefficient(&vec![0; self.ring.nvars()])
    }

    /// Whether the constant term vanishes.
    pub fn in_maximal_ideal(&self) -> bool {
        self.constant_term() == 0
    }

    pub fn is_unit(&self) -> bool {
        !self.in_maximal_ideal()
    }

    /// Lowest total degree of a stored term (`None` for zero).
    pub fn valuation(&self) -> Option<u32> {
        self.terms.keys().map(|m| degree(m)).min()
    }

    /// Highest power of `T` present.
    pub fn t_degree(&self) -> u32 {
        let t = self.ring.t_index();
        self.terms.keys().map(|m| m[t]).max().unwrap_or(0)
    }

    fn check(&self, o: &Self) -> Result<()> {
        if *self.ring != *o.ring {
            return Err(Error::RingMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(Self::from_terms(&self.ring, self.terms.iter().chain(o.terms.iter()).map(|(m, c)| (m.clone(), *c))))
    }

    pub fn neg(&self) -> Self {
        let f = &self.ring.field;
        TruncatedSeries { ring: self.ring.clone(), terms: self.terms.iter().map(|(m, c)| (m.clone(), f.neg(*c))).collect() }
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.try_add(&o.neg())
    }

    pub fn scale(&self, c: Fq) -> Self {
        let f = &self.ring.field;
        Self::from_terms(&self.ring, self.terms.iter().map(|(m, x)| (m.clone(), f.mul(*x, c))))
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let f = &self.ring.field;
        let d = self.ring.truncation;
        let mut out: BTreeMap<Monomial, Fq> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            let da = degree(ma);
            for (mb, cb) in &o.terms {
                if da + degree(mb) >= d {
                    continue;
                }
                let m: Monomial = ma.iter().zip(mb).map(|(x, y)| x + y).collect();
                let e = out.entry(m).or_insert(0);
                *e = f.add(*e, f.mul(*ca, *cb));
            }
        }
        out.retain(|_, c| *c != 0);
        Ok(TruncatedSeries { ring: self.ring.clone(), terms: out })
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut acc = Self::one(&self.ring);
        let mut b = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.try_mul(&b).expect("same ring");
            }
            n >>= 1;
            if n > 0 {
                b = b.try_mul(&b).expect("same ring");
            }
        }
        acc
    }

    /// `x^p`, computed termwise.
    pub fn frobenius(&self) -> Self {
        let f = &self.ring.field;
        let p = f.characteristic();
        Self::from_terms(&self.ring, self.terms.iter().map(|(m, c)| (m.iter().map(|e| e * p).collect(), f.frobenius(*c))))
    }

    /// Inverse of a unit, modulo degree `D`.
    pub fn inv(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::DivisionByZero);
        }
        let layout = crate::weierstrass::Layout::new(vec![1; self.ring.nvars()], self.ring.truncation);
        let ops = crate::weierstrass::FieldOps::new(&self.ring.field);
        let dense = crate::weierstrass::Dense::from_series(&layout, self);
        Ok(dense.inverse(&ops).to_series(&self.ring))
    }

    /// Drops every term of total degree `>= d`.
    pub fn truncate(&self, d: u32) -> Self {
        TruncatedSeries {
            ring: self.ring.clone(),
            terms: self.terms.iter().filter(|(m, _)| degree(m) < d).map(|(m, c)| (m.clone(), *c)).collect(),
        }
    }

    /// The same terms read in another ring with identical variables (terms
    /// beyond the new truncation are dropped).
    pub fn in_ring(&self, ring: &Arc<SeriesRing>) -> Result<Self> {
        if ring.var_names() != self.ring.var_names() || ring.field != self.ring.field {
            return Err(Error::RingMismatch);
        }
        Ok(Self::from_terms(ring, self.terms.iter().map(|(m, c)| (m.clone(), *c))))
    }

    /// Substitutes `v_i -> s_i` for every variable.
    pub fn compose(&self, images: &[TruncatedSeries]) -> Result<Self> {
        let mut acc = Self::zero(&self.ring);
        let mut cache: Vec<Vec<TruncatedSeries>> = images.iter().map(|s| vec![Self::one(&s.ring), s.clone()]).collect();
        for (m, c) in &self.terms {
            let mut t = Self::constant(&self.ring, *c);
            for (i, &e) in m.iter().enumerate() {
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap().try_mul(&images[i])?;
                    cache[i].push(next);
                }
                t = t.try_mul(&cache[i][e as usize])?;
            }
            acc = acc.try_add(&t)?;
        }
        Ok(acc)
    }

    pub fn format(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let f = &self.ring.field;
        let names = self.ring.var_names();
        let mut terms: Vec<(&Monomial, &Fq)> = self.terms.iter().collect();
        terms.sort_by(|a, b| degree(a.0).cmp(&degree(b.0)).then(b.0.cmp(a.0)));
        let parts: Vec<String> = terms
            .into_iter()
            .map(|(m, &c)| {
                let mono: Vec<String> = m
                    .iter()
                    .zip(&names)
                    .filter(|(e, _)| **e > 0)
                    .map(|(e, n)| if *e == 1 { n.clone() } else { format!("{n}^{e}") })
                    .collect();
                let mono = mono.join("*");
                let cs = f.format(c);
                if mono.is_empty() {
                    cs
                } else if c == 1 {
                    mono
                } else if f.is_compound(c) {
                    format!("({cs})*{mono}")
                } else {
                    format!("{cs}*{mono}")
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}
