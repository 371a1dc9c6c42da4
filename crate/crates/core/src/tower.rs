//! Characteristic-`p` fields presented by a finite p-basis.
//!
//! A [`FieldTower`] is a base field (a finite field, or a rational function
//! field over a finite field) with a stack of Laurent-series layers on top.
//! Its p-basis is the rational variables followed by the Laurent variables,
//! in order. Elements of layer `j` are finite Laurent polynomials in `t_j`
//! over layer `j - 1`, optionally tagged with a precision `N` meaning the
//! element is only known modulo `O(t_j^N)`.

use crate::error::{Error, Result};
use crate::gf::{Fq, GaloisField};
use crate::mpoly::{MPoly, RatFn};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

/// Base-field request passed to [`FieldTower::new`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseDescriptor {
    /// `F_q`; `modulus` defaults to the first irreducible polynomial.
    FiniteField { order: u64, modulus: Option<Vec<u32>> },
    /// `F_q(b_1, ..., b_s)`.
    RationalFunctions { order: u64, variables: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseField {
    Finite(GaloisField),
    Rational { field: GaloisField, variables: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldTower {
    base: BaseField,
    laurent_vars: Vec<String>,
    default_precision: i64,
}

impl FieldTower {
    pub fn new(
        p: u64,
        base: BaseDescriptor,
        laurent_vars: Vec<String>,
        default_precision: i64,
    ) -> Result<Arc<FieldTower>> {
        if !crate::gf::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if default_precision < 1 {
            return Err(Error::InvalidDescriptor("default precision must be positive".into()));
        }
        let check_order = |order: u64| -> Result<()> {
            match crate::gf::prime_power(order) {
                Some((q, _)) if q == p => Ok(()),
                _ => Err(Error::NotPrimePower(order)),
            }
        };
        let base = match base {
            BaseDescriptor::FiniteField { order, modulus } => {
                check_order(order)?;
                let field = match modulus {
                    Some(m) => {
                        let f = GaloisField::new(p, m, "w")?;
                        if f.order() as u64 != order {
                            return Err(Error::InvalidDescriptor(format!(
                                "modulus has degree {} but GF({order}) was requested",
                                f.degree()
                            )));
                        }
                        f
                    }
                    None => GaloisField::with_order(order)?,
                };
                BaseField::Finite(field)
            }
            BaseDescriptor::RationalFunctions { order, variables } => {
                check_order(order)?;
                if variables.is_empty() {
                    return Err(Error::InvalidDescriptor(
                        "a rational function field needs at least one variable".into(),
                    ));
                }
                BaseField::Rational { field: GaloisField::with_order(order)?, variables }
            }
        };
        let tower = FieldTower { base, laurent_vars, default_precision };
        let mut seen = std::collections::BTreeSet::new();
        for name in tower.p_basis().iter().chain(std::iter::once(&tower.field().generator_name().to_string())) {
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateVariable(name.clone()));
            }
        }
        Ok(Arc::new(tower))
    }

    pub fn characteristic(&self) -> u32 {
        self.field().characteristic()
    }

    /// The finite constant field.
    pub fn field(&self) -> &GaloisField {
        match &self.base {
            BaseField::Finite(f) => f,
            BaseField::Rational { field, .. } => field,
        }
    }

    pub fn base(&self) -> &BaseField {
        &self.base
    }

    pub fn laurent_vars(&self) -> &[String] {
        &self.laurent_vars
    }

    /// Number of Laurent layers.
    pub fn height(&self) -> usize {
        self.laurent_vars.len()
    }

    pub fn default_precision(&self) -> i64 {
        self.default_precision
    }

    pub fn with_default_precision(&self, n: i64) -> Result<Arc<FieldTower>> {
        if n < 1 {
            return Err(Error::InvalidDescriptor("default precision must be positive".into()));
        }
        Ok(Arc::new(FieldTower { default_precision: n, ..self.clone() }))
    }

    pub fn rational_vars(&self) -> &[String] {
        match &self.base {
            BaseField::Finite(_) => &[],
            BaseField::Rational { variables, .. } => variables,
        }
    }

    fn nvars(&self) -> usize {
        self.rational_vars().len()
    }

    pub fn is_finite_base(&self) -> bool {
        matches!(self.base, BaseField::Finite(_))
    }

    /// p-rank of the top field: `s + m`.
    pub fn p_rank(&self) -> usize {
        self.p_rank_at(self.height())
    }

    pub fn p_rank_at(&self, level: usize) -> usize {
        self.nvars() + level
    }

    /// Ordered p-basis of the top field.
    pub fn p_basis(&self) -> Vec<String> {
        self.rational_vars().iter().chain(self.laurent_vars.iter()).cloned().collect()
    }

    pub fn p_basis_index(&self, name: &str) -> Option<usize> {
        self.p_basis().iter().position(|v| v == name)
    }

    /// The sub-tower made of the base and the first `level` Laurent layers.
    pub fn prefix(&self, level: usize) -> Arc<FieldTower> {
        Arc::new(FieldTower {
            base: self.base.clone(),
            laurent_vars: self.laurent_vars[..level].to_vec(),
            default_precision: self.default_precision,
        })
    }

    /// One more Laurent layer named `name`.
    pub fn extend(&self, name: &str) -> Result<Arc<FieldTower>> {
        let mut vars = self.laurent_vars.clone();
        vars.push(name.to_string());
        let p = self.characteristic() as u64;
        let base = match &self.base {
            BaseField::Finite(f) => {
                BaseDescriptor::FiniteField { order: f.order() as u64, modulus: Some(f.modulus().to_vec()) }
            }
            BaseField::Rational { field, variables } => {
                BaseDescriptor::RationalFunctions { order: field.order() as u64, variables: variables.clone() }
            }
        };
        FieldTower::new(p, base, vars, self.default_precision)
    }

    /// Whether `upper` is this tower with exactly one extra Laurent layer.
    pub fn is_extended_by(&self, upper: &FieldTower) -> bool {
        upper.base == self.base
            && upper.height() == self.height() + 1
            && upper.laurent_vars[..self.height()] == self.laurent_vars[..]
    }

    /// Same tower with p-basis element `index` renamed.
    pub fn rename_basis(&self, index: usize, name: &str) -> Result<Arc<FieldTower>> {
        let mut t = self.clone();
        let s = self.nvars();
        if index < s {
            if let BaseField::Rational { variables, .. } = &mut t.base {
                variables[index] = name.to_string();
            }
        } else if index < s + self.height() {
            t.laurent_vars[index - s] = name.to_string();
        } else {
            return Err(Error::NotInPBasis(format!("#{index}")));
        }
        let mut seen = std::collections::BTreeSet::new();
        for v in t.p_basis() {
            if !seen.insert(v.clone()) {
                return Err(Error::DuplicateVariable(v));
            }
        }
        Ok(Arc::new(t))
    }

    /// Human-readable descriptor in the CLI grammar.
    pub fn descriptor(&self) -> String {
        let mut s = match &self.base {
            BaseField::Finite(f) => format!("GF({})", f.order()),
            BaseField::Rational { field, variables } => {
                format!("Frac GF({})[{}]", field.order(), variables.join(","))
            }
        };
        for t in &self.laurent_vars {
            s.push_str(&format!("(({t}))"));
        }
        s
    }
}

impl fmt::Display for FieldTower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

// ---------------------------------------------------------------------------
// Raw values and layer arithmetic.

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Value {
    Const(Fq),
    Rat(RatFn),
    Laurent(Laurent),
}

/// Terms sorted by strictly increasing exponent; no exact-zero coefficients;
/// every exponent below `prec` when present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Laurent {
    pub(crate) terms: Vec<(i64, Value)>,
    pub(crate) prec: Option<i64>,
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Value {
    pub(crate) fn laurent(&self) -> &Laurent {
        match self {
            Value::Laurent(l) => l,
            _ => panic!("expected a Laurent layer value"),
        }
    }

    /// Exactly zero (an `O(t^N)` value is not).
    pub(crate) fn is_exact_zero(&self) -> bool {
        match self {
            Value::Const(c) => *c == 0,
            Value::Rat(r) => r.is_zero(),
            Value::Laurent(l) => l.terms.is_empty() && l.prec.is_none(),
        }
    }

    /// No nonzero information stored (exact zero or a bare `O(t^N)`).
    pub(crate) fn has_no_terms(&self) -> bool {
        match self {
            Value::Laurent(l) => l.terms.is_empty(),
            _ => self.is_exact_zero(),
        }
    }

    pub(crate) fn vanishes_to_precision(&self) -> bool {
        match self {
            Value::Laurent(l) => l.terms.iter().all(|(_, c)| c.vanishes_to_precision()),
            _ => self.is_exact_zero(),
        }
    }

    pub(crate) fn is_exact(&self) -> bool {
        match self {
            Value::Laurent(l) => l.prec.is_none() && l.terms.iter().all(|(_, c)| c.is_exact()),
            _ => true,
        }
    }
}

impl Laurent {
    fn build(terms: BTreeMap<i64, Value>, prec: Option<i64>) -> Laurent {
        Laurent {
            terms: terms
                .into_iter()
                .filter(|(e, c)| !c.is_exact_zero() && prec.is_none_or(|n| *e < n))
                .collect(),
            prec,
        }
    }

    fn valuation_bound(&self) -> Option<i64> {
        self.terms.first().map(|(e, _)| *e).or(self.prec)
    }
}

impl FieldTower {
    pub(crate) fn zero_v(&self, level: usize) -> Value {
        if level > 0 {
            Value::Laurent(Laurent { terms: Vec::new(), prec: None })
        } else if self.is_finite_base() {
            Value::Const(0)
        } else {
            Value::Rat(RatFn::zero(self.nvars()))
        }
    }

    pub(crate) fn const_v(&self, level: usize, c: Fq) -> Value {
        let base = if self.is_finite_base() {
            Value::Const(c)
        } else {
            Value::Rat(RatFn::constant(self.nvars(), c))
        };
        self.embed_v(base, 0, level)
    }

    pub(crate) fn embed_v(&self, v: Value, from: usize, to: usize) -> Value {
        let mut v = v;
        for _ in from..to {
            v = if v.is_exact_zero() {
                Value::Laurent(Laurent { terms: Vec::new(), prec: None })
            } else {
                Value::Laurent(Laurent { terms: vec![(0, v)], prec: None })
            };
        }
        v
    }

    /// p-basis element `index` as a value at `level`.
    pub(crate) fn basis_v(&self, index: usize, level: usize) -> Value {
        let s = self.nvars();
        if index < s {
            let v = Value::Rat(RatFn::from_poly(MPoly::variable(s, index)));
            self.embed_v(v, 0, level)
        } else {
            let layer = index - s + 1;
            assert!(layer <= level, "variable lives above the requested level");
            let one = self.const_v(layer - 1, 1);
            let t = Value::Laurent(Laurent { terms: vec![(1, one)], prec: None });
            self.embed_v(t, layer, level)
        }
    }

    pub(crate) fn add_v(&self, level: usize, a: &Value, b: &Value) -> Value {
        let f = self.field();
        match (a, b) {
            (Value::Const(x), Value::Const(y)) => Value::Const(f.add(*x, *y)),
            (Value::Rat(x), Value::Rat(y)) => Value::Rat(x.add(y, f)),
            (Value::Laurent(x), Value::Laurent(y)) => {
                let prec = min_prec(x.prec, y.prec);
                let mut acc: BTreeMap<i64, Value> = x.terms.iter().cloned().collect();
                for (e, c) in &y.terms {
                    let sum = match acc.get(e) {
                        Some(prev) => self.add_v(level - 1, prev, c),
                        None => c.clone(),
                    };
                    acc.insert(*e, sum);
                }
                Value::Laurent(Laurent::build(acc, prec))
            }
            _ => panic!("mismatched layer values"),
        }
    }

    pub(crate) fn neg_v(&self, level: usize, a: &Value) -> Value {
        let f = self.field();
        match a {
            Value::Const(x) => Value::Const(f.neg(*x)),
            Value::Rat(x) => Value::Rat(x.neg(f)),
            Value::Laurent(x) => Value::Laurent(Laurent {
                terms: x.terms.iter().map(|(e, c)| (*e, self.neg_v(level - 1, c))).collect(),
                prec: x.prec,
            }),
        }
    }

    pub(crate) fn sub_v(&self, level: usize, a: &Value, b: &Value) -> Value {
        self.add_v(level, a, &self.neg_v(level, b))
    }

    pub(crate) fn mul_v(&self, level: usize, a: &Value, b: &Value) -> Value {
        let f = self.field();
        match (a, b) {
            (Value::Const(x), Value::Const(y)) => Value::Const(f.mul(*x, *y)),
            (Value::Rat(x), Value::Rat(y)) => Value::Rat(x.mul(y, f)),
            (Value::Laurent(x), Value::Laurent(y)) => {
                if a.is_exact_zero() || b.is_exact_zero() {
                    return self.zero_v(level);
                }
                let prec = min_prec(
                    x.prec.map(|n| n + y.valuation_bound().unwrap()),
                    y.prec.map(|n| n + x.valuation_bound().unwrap()),
                );
                let mut acc: BTreeMap<i64, Value> = BTreeMap::new();
                for (ea, ca) in &x.terms {
                    for (eb, cb) in &y.terms {
                        let e = ea + eb;
                        if prec.is_some_and(|n| e >= n) {
                            continue;
                        }
                        let prod = self.mul_v(level - 1, ca, cb);
                        let sum = match acc.remove(&e) {
                            Some(prev) => self.add_v(level - 1, &prev, &prod),
                            None => prod,
                        };
                        acc.insert(e, sum);
                    }
                }
                Value::Laurent(Laurent::build(acc, prec))
            }
            _ => panic!("mismatched layer values"),
        }
    }

    pub(crate) fn scale_int_v(&self, level: usize, a: &Value, n: i64) -> Value {
        let c = self.field().from_int(n);
        self.mul_v(level, a, &self.const_v(level, c))
    }

    /// Inverse with relative precision `prec` on every Laurent layer.
    pub(crate) fn inv_v(&self, level: usize, a: &Value, prec: i64) -> Result<Value> {
        let f = self.field();
        match a {
            Value::Const(x) => Ok(Value::Const(f.inv(*x)?)),
            Value::Rat(x) => Ok(Value::Rat(x.inv(f)?)),
            Value::Laurent(x) => {
                let (v, lead) = match x.terms.first() {
                    Some((v, c)) => (*v, c),
                    None => {
                        return if x.prec.is_some() {
                            Err(Error::InsufficientPrecision("cannot invert O(t^N)".into()))
                        } else {
                            Err(Error::DivisionByZero)
                        };
                    }
                };
                if lead.has_no_terms() {
                    return Err(Error::InsufficientPrecision(
                        "leading coefficient is only known to be O(..)".into(),
                    ));
                }
                let lead_inv = self.inv_v(level - 1, lead, prec)?;
                if x.terms.len() == 1 && x.prec.is_none() {
                    return Ok(Value::Laurent(Laurent { terms: vec![(-v, lead_inv)], prec: None }));
                }
                let rel = match x.prec {
                    Some(n) => prec.min(n - v),
                    None => prec,
                };
                if rel <= 0 {
                    return Err(Error::InsufficientPrecision(format!(
                        "relative precision {rel} leaves no known coefficient"
                    )));
                }
                let coeff = |n: i64| -> Option<&Value> {
                    x.terms.iter().find(|(e, _)| *e == v + n).map(|(_, c)| c)
                };
                let mut z: Vec<Value> = vec![lead_inv.clone()];
                for n in 1..rel {
                    let mut acc = self.zero_v(level - 1);
                    for i in 1..=n {
                        if let Some(c) = coeff(i) {
                            let t = self.mul_v(level - 1, c, &z[(n - i) as usize]);
                            acc = self.add_v(level - 1, &acc, &t);
                        }
                    }
                    let zn = self.neg_v(level - 1, &self.mul_v(level - 1, &lead_inv, &acc));
                    z.push(zn);
                }
                let terms: BTreeMap<i64, Value> =
                    z.into_iter().enumerate().map(|(n, c)| (n as i64 - v, c)).collect();
                Ok(Value::Laurent(Laurent::build(terms, Some(rel - v))))
            }
        }
    }

    pub(crate) fn frobenius_v(&self, level: usize, a: &Value) -> Value {
        let f = self.field();
        let p = f.characteristic() as i64;
        match a {
            Value::Const(x) => Value::Const(f.frobenius(*x)),
            Value::Rat(x) => Value::Rat(x.frobenius(f)),
            Value::Laurent(x) => Value::Laurent(Laurent {
                terms: x.terms.iter().map(|(e, c)| (e * p, self.frobenius_v(level - 1, c))).collect(),
                prec: x.prec.map(|n| n * p),
            }),
        }
    }

    /// Replaces p-basis element `index` by its p-th power inside `a`.
    pub(crate) fn frobenius_in_v(&self, level: usize, a: &Value, index: usize) -> Value {
        let f = self.field();
        let p = f.characteristic() as i64;
        let s = self.nvars();
        match a {
            Value::Const(_) => a.clone(),
            Value::Rat(x) => {
                if index < s {
                    Value::Rat(x.frobenius_in(index, f))
                } else {
                    a.clone()
                }
            }
            Value::Laurent(x) => {
                if index == s + level - 1 {
                    Value::Laurent(Laurent {
                        terms: x.terms.iter().map(|(e, c)| (e * p, c.clone())).collect(),
                        prec: x.prec.map(|n| n * p),
                    })
                } else if index < s + level - 1 {
                    let terms = x
                        .terms
                        .iter()
                        .map(|(e, c)| (*e, self.frobenius_in_v(level - 1, c, index)))
                        .collect();
                    Value::Laurent(Laurent::build(terms, x.prec))
                } else {
                    a.clone()
                }
            }
        }
    }

    pub(crate) fn deriv_v(&self, level: usize, a: &Value, index: usize) -> Value {
        let f = self.field();
        let s = self.nvars();
        match a {
            Value::Const(_) => Value::Const(0),
            Value::Rat(x) => {
                if index < s {
                    Value::Rat(x.derivative(index, f))
                } else {
                    Value::Rat(RatFn::zero(s))
                }
            }
            Value::Laurent(x) => {
                let layer_index = s + level - 1;
                if index == layer_index {
                    let terms = x
                        .terms
                        .iter()
                        .filter(|(e, _)| f.from_int(*e) != 0)
                        .map(|(e, c)| (e - 1, self.scale_int_v(level - 1, c, *e)))
                        .collect();
                    Value::Laurent(Laurent::build(terms, x.prec.map(|n| n - 1)))
                } else if index < layer_index {
                    let terms =
                        x.terms.iter().map(|(e, c)| (*e, self.deriv_v(level - 1, c, index))).collect();
                    Value::Laurent(Laurent::build(terms, x.prec))
                } else {
                    self.zero_v(level)
                }
            }
        }
    }

    /// The `theta = 0` part `x_0^p` of `x = sum_theta x_theta^p b^theta`.
    pub(crate) fn zero_theta_v(&self, level: usize, a: &Value) -> Value {
        let f = self.field();
        let p = f.characteristic();
        match a {
            Value::Const(_) => a.clone(),
            Value::Rat(x) => {
                let (num, dpow) = cleared_numerator(x, f);
                let kept = MPoly::from_raw(
                    num.nvars(),
                    num.terms().filter(|(e, _)| e.iter().all(|k| k % p == 0)).map(|(e, c)| (e.clone(), *c)).collect(),
                );
                Value::Rat(RatFn::new(kept, dpow, f).expect("nonzero denominator"))
            }
            Value::Laurent(x) => {
                let terms = x
                    .terms
                    .iter()
                    .filter(|(e, _)| e.rem_euclid(p as i64) == 0)
                    .map(|(e, c)| (*e, self.zero_theta_v(level - 1, c)))
                    .collect();
                Value::Laurent(Laurent::build(terms, x.prec))
            }
        }
    }

    /// `x = sum_theta (x_theta)^p b^theta`, keyed by `theta` (one digit per
    /// p-basis element of `level`).
    pub(crate) fn decompose_v(&self, level: usize, a: &Value) -> BTreeMap<Vec<u8>, Value> {
        let f = self.field();
        let p = f.characteristic();
        let mut out = BTreeMap::new();
        match a {
            Value::Const(x) => {
                if *x != 0 {
                    out.insert(Vec::new(), Value::Const(f.pth_root(*x)));
                }
            }
            Value::Rat(x) => {
                let (num, dpow) = cleared_numerator(x, f);
                let _ = dpow;
                let mut parts: BTreeMap<Vec<u8>, BTreeMap<Vec<u32>, Fq>> = BTreeMap::new();
                for (e, &c) in num.terms() {
                    let theta: Vec<u8> = e.iter().map(|k| (k % p) as u8).collect();
                    let quot: Vec<u32> = e.iter().map(|k| k / p).collect();
                    parts.entry(theta).or_default().insert(quot, f.pth_root(c));
                }
                for (theta, terms) in parts {
                    let n = MPoly::from_raw(x.nvars(), terms);
                    out.insert(theta, Value::Rat(RatFn::new(n, x.den().clone(), f).unwrap()));
                }
            }
            Value::Laurent(x) => {
                let mut parts: BTreeMap<Vec<u8>, BTreeMap<i64, Value>> = BTreeMap::new();
                for (e, c) in &x.terms {
                    let i = e.rem_euclid(p as i64);
                    let q = e.div_euclid(p as i64);
                    for (mut theta, comp) in self.decompose_v(level - 1, c) {
                        theta.push(i as u8);
                        parts.entry(theta).or_default().insert(q, comp);
                    }
                }
                for (theta, terms) in parts {
                    let i = *theta.last().unwrap() as i64;
                    let prec = x.prec.map(|n| (n - i).div_euclid(p as i64) + i64::from((n - i).rem_euclid(p as i64) != 0));
                    out.insert(theta, Value::Laurent(Laurent::build(terms, prec)));
                }
            }
        }
        out
    }

    /// `[c_0, ..., c_(p-1)]` with `a = sum_j c_j(b -> b^p) * b^j` for the
    /// p-basis element `b` of index `index`.
    pub(crate) fn split_residue_v(&self, level: usize, a: &Value, index: usize) -> Vec<Value> {
        let f = self.field();
        let p = f.characteristic();
        let s = self.nvars();
        let mut out: Vec<Value> = (0..p).map(|_| self.zero_v(level)).collect();
        match a {
            Value::Const(_) => out[0] = a.clone(),
            Value::Rat(x) => {
                if index >= s {
                    out[0] = a.clone();
                    return out;
                }
                let (num, dpow) = cleared_numerator(x, f);
                let pull = |e: &Vec<u32>| -> Vec<u32> {
                    let mut e = e.clone();
                    e[index] /= p;
                    e
                };
                let den = MPoly::from_raw(s, dpow.terms().map(|(e, c)| (pull(e), *c)).collect());
                let mut parts: Vec<BTreeMap<Vec<u32>, Fq>> = vec![BTreeMap::new(); p as usize];
                for (e, &c) in num.terms() {
                    let r = e[index] % p;
                    let mut q = e.clone();
                    q[index] = (e[index] - r) / p;
                    parts[r as usize].insert(q, c);
                }
                for (r, terms) in parts.into_iter().enumerate() {
                    if !terms.is_empty() {
                        let n = MPoly::from_raw(s, terms);
                        out[r] = Value::Rat(RatFn::new(n, den.clone(), f).expect("nonzero denominator"));
                    }
                }
            }
            Value::Laurent(x) => {
                let layer_index = s + level - 1;
                if index > layer_index {
                    out[0] = a.clone();
                    return out;
                }
                let mut parts: Vec<BTreeMap<i64, Value>> = vec![BTreeMap::new(); p as usize];
                let mut precs = vec![x.prec; p as usize];
                if index == layer_index {
                    for (e, c) in &x.terms {
                        let r = e.rem_euclid(p as i64);
                        parts[r as usize].insert(e.div_euclid(p as i64), c.clone());
                    }
                    for (r, prec) in precs.iter_mut().enumerate() {
                        *prec = x.prec.map(|n| {
                            let m = n - r as i64;
                            m.div_euclid(p as i64) + i64::from(m.rem_euclid(p as i64) != 0)
                        });
                    }
                } else {
                    for (e, c) in &x.terms {
                        for (r, v) in self.split_residue_v(level - 1, c, index).into_iter().enumerate() {
                            parts[r].insert(*e, v);
                        }
                    }
                }
                for (r, (terms, prec)) in parts.into_iter().zip(precs).enumerate() {
                    out[r] = Value::Laurent(Laurent::build(terms, prec));
                }
            }
        }
        out
    }

    /// `b^theta` at `level`.
    pub(crate) fn basis_monomial_v(&self, level: usize, theta: &[u8]) -> Value {
        let mut acc = self.const_v(level, 1);
        for (idx, &k) in theta.iter().enumerate() {
            for _ in 0..k {
                acc = self.mul_v(level, &acc, &self.basis_v(idx, level));
            }
        }
        acc
    }

    pub(crate) fn format_v(&self, level: usize, a: &Value) -> String {
        let f = self.field();
        match a {
            Value::Const(x) => f.format(*x),
            Value::Rat(x) => x.format(self.rational_vars(), f),
            Value::Laurent(x) => {
                let var = &self.laurent_vars[level - 1];
                let mut parts = Vec::new();
                for (e, c) in &x.terms {
                    let mono = match e {
                        0 => String::new(),
                        1 => var.clone(),
                        _ => format!("{var}^{e}"),
                    };
                    let cs = self.format_v(level - 1, c);
                    let is_one = *c == self.const_v(level - 1, 1);
                    parts.push(if mono.is_empty() {
                        cs
                    } else if is_one {
                        mono
                    } else if needs_parens(&cs) {
                        format!("({cs})*{mono}")
                    } else {
                        format!("{cs}*{mono}")
                    });
                }
                if let Some(n) = x.prec {
                    parts.push(format!("O({var}^{n})"));
                }
                if parts.is_empty() {
                    "0".into()
                } else {
                    parts.join(" + ")
                }
            }
        }
    }
}

/// Whether a printed coefficient must be parenthesized before `*monomial`.
pub(crate) fn needs_parens(s: &str) -> bool {
    s.contains(' ') || s.contains('/')
}

/// `(N * D^(p-1), D^p)` for `x = N / D`, so that `x = first / second` with a
/// denominator that is a p-th power.
fn cleared_numerator(x: &RatFn, f: &GaloisField) -> (MPoly, MPoly) {
    let p = f.characteristic();
    if x.den().is_one() {
        return (x.num().clone(), x.den().clone());
    }
    let num = x.num().mul(&x.den().pow(p - 1, f), f);
    (num, x.den().frobenius(f))
}

// ---------------------------------------------------------------------------
// Public element type.

/// An exact (or precision-tagged) element of one layer of a [`FieldTower`].
///
/// Arithmetic operators panic when the operands come from different towers;
/// the `try_*` methods report [`Error::TowerMismatch`] instead. Operands from
/// different layers of the same tower are embedded into the higher layer.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldElement {
    tower: Arc<FieldTower>,
    level: usize,
    value: Value,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [{}]", self, self.tower)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tower.format_v(self.level, &self.value))
    }
}

fn same_tower(a: &Arc<FieldTower>, b: &Arc<FieldTower>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// The `x_theta` components of `x = sum_theta (x_theta)^p b^theta`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PComponentDecomposition {
    pub tower: Arc<FieldTower>,
    pub level: usize,
    /// `theta` has one digit in `0..p` per p-basis element of `level`.
    pub components: BTreeMap<Vec<u8>, FieldElement>,
    /// Precision of the decomposed element on its own layer.
    pub precision: Option<i64>,
}

impl PComponentDecomposition {
    /// `sum_theta (x_theta)^p b^theta`, plus the recorded `O(t^N)`.
    pub fn reassemble(&self) -> FieldElement {
        let t = &self.tower;
        let mut acc = t.zero_v(self.level);
        for (theta, c) in &self.components {
            let term = t.mul_v(self.level, &t.frobenius_v(self.level, &c.value), &t.basis_monomial_v(self.level, theta));
            acc = t.add_v(self.level, &acc, &term);
        }
        if let (Some(n), Value::Laurent(l)) = (self.precision, &mut acc) {
            let terms = l.terms.drain(..).collect();
            *l = Laurent::build(terms, min_prec(l.prec, Some(n)));
        }
        FieldElement { tower: t.clone(), level: self.level, value: acc }
    }

    pub fn zero_component(&self) -> Option<&FieldElement> {
        self.components.get(&vec![0u8; self.tower.p_rank_at(self.level)])
    }

    /// Whether every `theta != 0` component vanishes.
    pub fn is_pure_zero_theta(&self) -> bool {
        self.components.keys().all(|t| t.iter().all(|&d| d == 0))
    }
}

impl FieldElement {
    pub(crate) fn from_value(tower: &Arc<FieldTower>, level: usize, value: Value) -> Self {
        FieldElement { tower: tower.clone(), level, value }
    }

    pub fn zero(tower: &Arc<FieldTower>) -> Self {
        Self::from_value(tower, tower.height(), tower.zero_v(tower.height()))
    }

    pub fn one(tower: &Arc<FieldTower>) -> Self {
        Self::from_int(tower, 1)
    }

    /// An integer, read in the prime field, at the top layer.
    pub fn from_int(tower: &Arc<FieldTower>, n: i64) -> Self {
        let c = tower.field().from_int(n);
        Self::from_value(tower, tower.height(), tower.const_v(tower.height(), c))
    }

    /// A constant-field element at the top layer.
    pub fn constant(tower: &Arc<FieldTower>, c: Fq) -> Self {
        Self::from_value(tower, tower.height(), tower.const_v(tower.height(), c))
    }

    /// The generator `w` of the constant field.
    pub fn generator(tower: &Arc<FieldTower>) -> Self {
        Self::constant(tower, tower.field().generator())
    }

    /// A named p-basis element, at the top layer.
    pub fn variable(tower: &Arc<FieldTower>, name: &str) -> Result<Self> {
        let idx = tower.p_basis_index(name).ok_or_else(|| Error::NotInPBasis(name.into()))?;
        Ok(Self::basis(tower, idx))
    }

    pub fn basis(tower: &Arc<FieldTower>, index: usize) -> Self {
        Self::from_value(tower, tower.height(), tower.basis_v(index, tower.height()))
    }

    /// A rational function of the base variables, at the top layer.
    pub fn from_ratfn(tower: &Arc<FieldTower>, r: RatFn) -> Result<Self> {
        if tower.is_finite_base() || r.nvars() != tower.rational_vars().len() {
            return Err(Error::Invalid("rational function does not match the base field".into()));
        }
        let v = tower.embed_v(Value::Rat(r), 0, tower.height());
        Ok(Self::from_value(tower, tower.height(), v))
    }

    /// `sum_e c_e t^e (+ O(t^prec))` at layer `level`, coefficients at `level - 1`.
    pub fn laurent(
        tower: &Arc<FieldTower>,
        level: usize,
        terms: impl IntoIterator<Item = (i64, FieldElement)>,
        prec: Option<i64>,
    ) -> Result<Self> {
        if level == 0 || level > tower.height() {
            return Err(Error::Invalid(format!("no Laurent layer {level}")));
        }
        let mut acc: BTreeMap<i64, Value> = BTreeMap::new();
        for (e, c) in terms {
            if !same_tower(&c.tower, tower) {
                return Err(Error::TowerMismatch);
            }
            let c = c.at_level(level - 1)?;
            let v = match acc.remove(&e) {
                Some(prev) => tower.add_v(level - 1, &prev, &c.value),
                None => c.value,
            };
            acc.insert(e, v);
        }
        Ok(Self::from_value(tower, level, Value::Laurent(Laurent::build(acc, prec))))
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_exact_zero()
    }

    /// No known nonzero coefficient (zero or a bare `O(t^N)`).
    pub fn has_no_terms(&self) -> bool {
        self.value.has_no_terms()
    }

    /// Zero at every layer up to the precision tags.
    pub fn vanishes_to_precision(&self) -> bool {
        self.value.vanishes_to_precision()
    }

    /// No precision tag at any layer.
    pub fn is_exact(&self) -> bool {
        self.value.is_exact()
    }

    /// Precision tag of the element's own layer.
    pub fn precision(&self) -> Option<i64> {
        match &self.value {
            Value::Laurent(l) => l.prec,
            _ => None,
        }
    }

    /// Lowest stored exponent on the element's own layer.
    pub fn valuation(&self) -> Option<i64> {
        match &self.value {
            Value::Laurent(l) => l.terms.first().map(|(e, _)| *e),
            _ => None,
        }
    }

    /// Stored `(exponent, coefficient)` pairs of a Laurent-layer element.
    pub fn terms(&self) -> Vec<(i64, FieldElement)> {
        match &self.value {
            Value::Laurent(l) => l
                .terms
                .iter()
                .map(|(e, c)| (*e, Self::from_value(&self.tower, self.level - 1, c.clone())))
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Coefficient of `t^e` on the element's own layer.
    pub fn coefficient(&self, e: i64) -> FieldElement {
        assert!(self.level > 0, "base-field elements have no Laurent coefficients");
        let l = self.value.laurent();
        let v = l.terms.iter().find(|(x, _)| *x == e).map(|(_, c)| c.clone());
        Self::from_value(&self.tower, self.level - 1, v.unwrap_or_else(|| self.tower.zero_v(self.level - 1)))
    }

    /// Constant-field value, if the element is a constant.
    pub fn as_constant(&self) -> Option<Fq> {
        let mut v = &self.value;
        loop {
            match v {
                Value::Const(c) => return Some(*c),
                Value::Rat(r) => return r.as_constant(),
                Value::Laurent(l) => {
                    if l.prec.is_some() {
                        return None;
                    }
                    match l.terms.as_slice() {
                        [] => return Some(0),
                        [(0, c)] => v = c,
                        _ => return None,
                    }
                }
            }
        }
    }

    /// The rational-function value of a base-layer element.
    pub fn as_ratfn(&self) -> Option<&RatFn> {
        match &self.value {
            Value::Rat(r) => Some(r),
            _ => None,
        }
    }

    /// Embeds into layer `level >= self.level()`.
    pub fn at_level(&self, level: usize) -> Result<Self> {
        if level < self.level || level > self.tower.height() {
            return Err(Error::Invalid(format!("cannot move a layer-{} element to layer {level}", self.level)));
        }
        Ok(Self::from_value(&self.tower, level, self.tower.embed_v(self.value.clone(), self.level, level)))
    }

    /// Moves into the same position of another tower with identical layout
    /// (used when a p-basis element is renamed).
    pub fn transport(&self, tower: &Arc<FieldTower>) -> Result<Self> {
        let (a, b) = (&self.tower, tower);
        if a.height() != b.height() || a.field() != b.field() || a.rational_vars().len() != b.rational_vars().len() {
            return Err(Error::TowerMismatch);
        }
        Ok(Self::from_value(tower, self.level, self.value.clone()))
    }

    /// Includes an element of `k` into `upper = k((t))` (or leaves it in
    /// `k` when `upper` is the same tower), at the top layer.
    pub fn into_extension(&self, upper: &Arc<FieldTower>) -> Result<Self> {
        if !same_tower(&self.tower, upper) && !self.tower.is_extended_by(upper) {
            return Err(Error::LayerMismatch);
        }
        Self::from_value(upper, self.level, self.value.clone()).at_level(upper.height())
    }

    /// Forgets the precision tag of the element's own layer.
    pub fn without_precision(&self) -> Self {
        match &self.value {
            Value::Laurent(l) => Self::from_value(
                &self.tower,
                self.level,
                Value::Laurent(Laurent { terms: l.terms.clone(), prec: None }),
            ),
            _ => self.clone(),
        }
    }

    /// The element with the term of exponent `e` on its own layer removed.
    pub fn without_term(&self, e: i64) -> Self {
        match &self.value {
            Value::Laurent(l) => Self::from_value(
                &self.tower,
                self.level,
                Value::Laurent(Laurent {
                    terms: l.terms.iter().filter(|(x, _)| *x != e).cloned().collect(),
                    prec: l.prec,
                }),
            ),
            _ => self.clone(),
        }
    }

    fn align(&self, other: &Self) -> Result<(usize, Value, Value)> {
        if !same_tower(&self.tower, &other.tower) {
            return Err(Error::TowerMismatch);
        }
        let level = self.level.max(other.level);
        Ok((
            level,
            self.tower.embed_v(self.value.clone(), self.level, level),
            self.tower.embed_v(other.value.clone(), other.level, level),
        ))
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        let (l, a, b) = self.align(other)?;
        Ok(Self::from_value(&self.tower, l, self.tower.add_v(l, &a, &b)))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        let (l, a, b) = self.align(other)?;
        Ok(Self::from_value(&self.tower, l, self.tower.sub_v(l, &a, &b)))
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        let (l, a, b) = self.align(other)?;
        Ok(Self::from_value(&self.tower, l, self.tower.mul_v(l, &a, &b)))
    }

    /// `self / other`, inverting `other` at the tower's default precision.
    pub fn try_div(&self, other: &Self) -> Result<Self> {
        self.try_mul(&other.inv(None)?)
    }

    /// Multiplicative inverse. On Laurent layers the result satisfies
    /// `x * inv(x) = 1 + O(t^N)` with `N` the requested relative precision
    /// (default: the tower's); exact monomials invert exactly.
    pub fn inv(&self, precision: Option<i64>) -> Result<Self> {
        let n = precision.unwrap_or(self.tower.default_precision);
        if n <= 0 {
            return Err(Error::InsufficientPrecision(format!("requested precision {n}")));
        }
        Ok(Self::from_value(&self.tower, self.level, self.tower.inv_v(self.level, &self.value, n)?))
    }

    pub fn pow(&self, n: i64) -> Result<Self> {
        let base = if n < 0 { self.inv(None)? } else { self.clone() };
        let mut result = Self::from_value(&self.tower, self.level, self.tower.const_v(self.level, 1));
        let mut b = base;
        let mut k = n.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                result = &result * &b;
            }
            k >>= 1;
            if k > 0 {
                b = &b * &b;
            }
        }
        Ok(result)
    }

    /// `x^p`.
    pub fn frobenius(&self) -> Self {
        Self::from_value(&self.tower, self.level, self.tower.frobenius_v(self.level, &self.value))
    }

    /// Substitutes `b -> b^p` for the p-basis element `index`.
    pub fn frobenius_in(&self, index: usize) -> Self {
        Self::from_value(&self.tower, self.level, self.tower.frobenius_in_v(self.level, &self.value, index))
    }

    /// The `y` with `y^p = x`, or [`Error::NotAPthPower`] when some
    /// `theta != 0` component of `x` is nonzero.
    pub fn p_th_root(&self) -> Result<Self> {
        if let Some(n) = self.precision() {
            if self.valuation().is_none_or(|v| n <= v) {
                return Err(Error::InsufficientPrecision(
                    "no coefficient is known below the precision tag".into(),
                ));
            }
        }
        let d = self.p_component_decompose();
        if !d.is_pure_zero_theta() {
            return Err(Error::NotAPthPower);
        }
        Ok(d.zero_component().cloned().unwrap_or_else(|| {
            let mut z = Self::from_value(&self.tower, self.level, self.tower.zero_v(self.level));
            if let (Value::Laurent(l), Some(n)) = (&mut z.value, self.precision()) {
                let p = self.tower.characteristic() as i64;
                l.prec = Some(n.div_euclid(p) + i64::from(n.rem_euclid(p) != 0));
            }
            z
        }))
    }

    pub fn p_component_decompose(&self) -> PComponentDecomposition {
        let components = self
            .tower
            .decompose_v(self.level, &self.value)
            .into_iter()
            .map(|(t, v)| (t, Self::from_value(&self.tower, self.level, v)))
            .collect();
        PComponentDecomposition {
            tower: self.tower.clone(),
            level: self.level,
            components,
            precision: self.precision(),
        }
    }

    /// `[c_0, ..., c_(p-1)]` with `self = sum_j c_j(b -> b^p) * b^j`, `b`
    /// the p-basis element `index`.
    pub fn split_by_basis_residue(&self, index: usize) -> Result<Vec<Self>> {
        if index >= self.tower.p_rank() {
            return Err(Error::NotInPBasis(format!("#{index}")));
        }
        Ok(self
            .tower
            .split_residue_v(self.level, &self.value, index)
            .into_iter()
            .map(|v| Self::from_value(&self.tower, self.level, v))
            .collect())
    }

    /// The `theta = 0` part `x_0^p`.
    pub fn zero_theta_part(&self) -> Self {
        Self::from_value(&self.tower, self.level, self.tower.zero_theta_v(self.level, &self.value))
    }

    /// Derivation with respect to p-basis element `index`: `d(b_index) = 1`,
    /// other basis elements and all p-th powers are constants.
    pub fn partial_derivative(&self, index: usize) -> Result<Self> {
        if index >= self.tower.p_rank() {
            return Err(Error::NotInPBasis(format!("#{index}")));
        }
        Ok(Self::from_value(&self.tower, self.level, self.tower.deriv_v(self.level, &self.value, index)))
    }

    pub fn partial_derivative_by_name(&self, name: &str) -> Result<Self> {
        let idx = self.tower.p_basis_index(name).ok_or_else(|| Error::NotInPBasis(name.into()))?;
        self.partial_derivative(idx)
    }

    /// Drops every term of exponent `>= n` on the own layer and tags `O(t^n)`.
    pub fn truncate(&self, n: i64) -> Self {
        match &self.value {
            Value::Laurent(l) => {
                let prec = min_prec(l.prec, Some(n));
                let terms = l.terms.iter().cloned().collect();
                Self::from_value(&self.tower, self.level, Value::Laurent(Laurent::build(terms, prec)))
            }
            _ => self.clone(),
        }
    }

    /// `O(t^n)` on layer `level`, embedded at the top.
    pub fn big_o(tower: &Arc<FieldTower>, level: usize, n: i64) -> Result<Self> {
        if level == 0 || level > tower.height() {
            return Err(Error::Invalid(format!("no Laurent layer {level}")));
        }
        let v = Value::Laurent(Laurent { terms: Vec::new(), prec: Some(n) });
        Self::from_value(tower, level, v).at_level(tower.height())
    }

    /// Evaluates a base-field element at constant-field values of the
    /// rational variables; `None` on a pole. Laurent elements are evaluated
    /// through their `t^0` coefficient and require nonnegative valuation.
    pub fn specialize(&self, point: &[Fq]) -> Option<Fq> {
        let f = self.tower.field();
        let mut v = &self.value;
        loop {
            match v {
                Value::Const(c) => return Some(*c),
                Value::Rat(r) => {
                    let d = r.den().evaluate(point, f);
                    if d == 0 {
                        return None;
                    }
                    return Some(f.mul(r.num().evaluate(point, f), f.inv(d).ok()?));
                }
                Value::Laurent(l) => {
                    if l.terms.first().is_some_and(|(e, _)| *e < 0) || l.prec.is_some_and(|n| n <= 0) {
                        return None;
                    }
                    match l.terms.first() {
                        Some((0, c)) => v = c,
                        _ => return Some(0),
                    }
                }
            }
        }
    }
}

/// `Tr_{F_q/F_q'}(x)` for an element of a finite base field.
pub fn field_trace_finite(x: &FieldElement, sub_order: u64) -> Result<FieldElement> {
    let c = x
        .as_constant()
        .filter(|_| x.tower.is_finite_base())
        .ok_or_else(|| Error::Invalid("field trace needs a finite-field element".into()))?;
    let t = x.tower.field().trace_to(c, sub_order)?;
    FieldElement::constant(&x.tower, t).at_level(x.level.max(x.tower.height()))
}

macro_rules! binop {
    ($tr:ident, $m:ident, $try:ident) => {
        impl $tr<&FieldElement> for &FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: &FieldElement) -> FieldElement {
                self.$try(rhs).expect("elements belong to different towers")
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $m(self, rhs: FieldElement) -> FieldElement {
                (&self).$try(&rhs).expect("elements belong to different towers")
            }
        }
    };
}

binop!(Add, add, try_add);
binop!(Sub, sub, try_sub);
binop!(Mul, mul, try_mul);

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement::from_value(&self.tower, self.level, self.tower.neg_v(self.level, &self.value))
    }
}

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(q: u64, vars: &[&str], prec: i64) -> Arc<FieldTower> {
        let p = crate::gf::prime_power(q).unwrap().0;
        FieldTower::new(
            p,
            BaseDescriptor::FiniteField { order: q, modulus: None },
            vars.iter().map(|s| s.to_string()).collect(),
            prec,
        )
        .unwrap()
    }

    fn frac(p: u64, vars: &[&str], laurent: &[&str]) -> Arc<FieldTower> {
        FieldTower::new(
            p,
            BaseDescriptor::RationalFunctions { order: p, variables: vars.iter().map(|s| s.to_string()).collect() },
            laurent.iter().map(|s| s.to_string()).collect(),
            16,
        )
        .unwrap()
    }

    #[test]
    fn make_tower_p_rank() {
        let t = FieldTower::new(
            2,
            BaseDescriptor::FiniteField { order: 4, modulus: Some(vec![1, 1, 1]) },
            vec![],
            16,
        )
        .unwrap();
        assert_eq!(t.p_rank(), 0);
        let t = gf(4, &["t1", "t2"], 16);
        assert_eq!(t.p_rank(), 2);
        assert_eq!(t.p_basis(), vec!["t1", "t2"]);
        let t = frac(3, &["b1", "b2"], &["t"]);
        assert_eq!(t.p_rank(), 3);
        assert_eq!(t.p_basis(), vec!["b1", "b2", "t"]);
    }

    #[test]
    fn make_tower_errors() {
        let fin = |order, modulus| BaseDescriptor::FiniteField { order, modulus };
        assert_eq!(FieldTower::new(4, fin(4, None), vec![], 8), Err(Error::NotPrime(4)));
        assert_eq!(FieldTower::new(2, fin(4, Some(vec![1, 0, 1])), vec![], 8), Err(Error::ReducibleModulus));
        assert_eq!(
            FieldTower::new(2, fin(4, None), vec!["t".into(), "t".into()], 8),
            Err(Error::DuplicateVariable("t".into()))
        );
        assert_eq!(FieldTower::new(2, fin(6, None), vec![], 8), Err(Error::NotPrimePower(6)));
    }

    #[test]
    fn precision_shift_under_monomial() {
        let t = gf(2, &["t"], 16);
        let x = FieldElement::variable(&t, "t").unwrap().truncate(5);
        let y = &x * &FieldElement::variable(&t, "t").unwrap().inv(None).unwrap();
        assert_eq!(y, FieldElement::one(&t).truncate(4));
        assert_eq!(y.to_string(), "1 + O(t^4)");
    }

    #[test]
    fn frobenius_char_two() {
        let t = gf(2, &["t"], 16);
        let one = FieldElement::one(&t);
        let x = &one + &FieldElement::variable(&t, "t").unwrap();
        assert_eq!((&x * &x).to_string(), "1 + t^2");
        assert_eq!(x.frobenius(), &x * &x);
    }

    #[test]
    fn geometric_series_inverse() {
        let t = gf(5, &["t"], 6);
        let one = FieldElement::one(&t);
        let x = &one - &FieldElement::variable(&t, "t").unwrap();
        let inv = x.inv(None).unwrap();
        assert_eq!(inv.to_string(), "1 + t + t^2 + t^3 + t^4 + t^5 + O(t^6)");
        assert_eq!(&x * &inv, one.truncate(6));
        assert_eq!(FieldElement::one(&t).inv(None).unwrap(), one);
        assert!(matches!(x.inv(Some(0)), Err(Error::InsufficientPrecision(_))));
        assert_eq!(FieldElement::zero(&t).inv(None), Err(Error::DivisionByZero));
    }

    #[test]
    fn rational_inverse_is_exact() {
        let t = frac(2, &["b"], &[]);
        let b = FieldElement::variable(&t, "b").unwrap();
        let x = &(&b * &b) + &b;
        let inv = x.inv(None).unwrap();
        assert!(inv.is_exact());
        assert_eq!(inv.to_string(), "1/(b^2 + b)");
        assert_eq!(&inv * &x, FieldElement::one(&t));
    }

    #[test]
    fn pth_root_f4() {
        let t = gf(4, &[], 8);
        let w = FieldElement::generator(&t);
        // enumerate squares of all elements of F_4 to find the root of w
        let root = (0..4)
            .map(|c| FieldElement::constant(&t, c))
            .find(|y| (y * y) == w)
            .unwrap();
        assert_eq!(w.p_th_root().unwrap(), root);
        assert_eq!(root, &w * &w);
    }

    #[test]
    fn pth_root_of_basis_element_fails() {
        let t = frac(2, &["b"], &[]);
        let b = FieldElement::variable(&t, "b").unwrap();
        assert_eq!(b.p_th_root(), Err(Error::NotAPthPower));
        assert_eq!((&b * &b).p_th_root().unwrap(), b);
    }

    #[test]
    fn decompose_prime_field() {
        let t = gf(3, &[], 8);
        let x = FieldElement::from_int(&t, 2);
        let d = x.p_component_decompose();
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.zero_component(), Some(&x));
    }

    #[test]
    fn decompose_b_cubed_plus_b() {
        let t = frac(2, &["b"], &[]);
        let b = FieldElement::variable(&t, "b").unwrap();
        let x = &b.pow(3).unwrap() + &b;
        let d = x.p_component_decompose();
        let one = FieldElement::one(&t);
        // (b+1)^2 * b = b^3 + b
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.components.get(&vec![1u8]), Some(&(&b + &one)));
        assert_eq!(d.reassemble(), x);
    }

    #[test]
    fn decompose_a_over_t() {
        let t = gf(4, &["t"], 8);
        let w = FieldElement::generator(&t);
        let tv = FieldElement::variable(&t, "t").unwrap();
        let x = &w * &tv.inv(None).unwrap();
        let d = x.p_component_decompose();
        let sqrt_w = w.p_th_root().unwrap();
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.components.get(&vec![1u8]), Some(&(&sqrt_w * &tv.inv(None).unwrap())));
    }

    #[test]
    fn decompose_with_precision() {
        let t = gf(3, &["t"], 8);
        let tv = FieldElement::variable(&t, "t").unwrap();
        let x = (&tv + &tv.pow(4).unwrap()).truncate(7);
        let d = x.p_component_decompose();
        // t + t^4 = t^(3*0+1) + t^(3*1+1); component for residue 1 known to ceil(6/3) = 2
        assert_eq!(d.components.get(&vec![1u8]).unwrap().precision(), Some(2));
        assert_eq!(d.reassemble(), x);
    }

    #[test]
    fn partial_derivatives() {
        let t = gf(3, &["t"], 8);
        let tv = FieldElement::variable(&t, "t").unwrap();
        let x = &tv.pow(2).unwrap() + &tv.pow(5).unwrap();
        assert_eq!(x.partial_derivative(0).unwrap().to_string(), "2*t + 2*t^4");
        assert!(tv.pow(3).unwrap().partial_derivative(0).unwrap().is_zero());
        let t2 = frac(5, &["b1", "b2"], &[]);
        let b1 = FieldElement::variable(&t2, "b1").unwrap();
        let b2 = FieldElement::variable(&t2, "b2").unwrap();
        assert_eq!((&b1 * &b2).partial_derivative_by_name("b1").unwrap(), b2);
        assert!(b1.partial_derivative_by_name("c").is_err());
    }

    #[test]
    fn field_trace_examples() {
        let t = gf(4, &[], 8);
        let w = FieldElement::generator(&t);
        assert_eq!(field_trace_finite(&FieldElement::one(&t), 2).unwrap(), FieldElement::zero(&t));
        assert_eq!(field_trace_finite(&w, 2).unwrap(), FieldElement::one(&t));
        assert_eq!(field_trace_finite(&w, 4).unwrap(), w);
        assert!(field_trace_finite(&w, 8).is_err());
    }

    #[test]
    fn tower_mismatch() {
        let a = gf(2, &["t"], 8);
        let b = gf(2, &["s"], 8);
        let x = FieldElement::one(&a);
        let y = FieldElement::one(&b);
        assert_eq!(x.try_add(&y), Err(Error::TowerMismatch));
    }

    #[test]
    fn nested_precision_survives() {
        let t = gf(2, &["t1", "t2"], 4);
        let t1 = FieldElement::variable(&t, "t1").unwrap();
        let t2 = FieldElement::variable(&t, "t2").unwrap();
        let one = FieldElement::one(&t);
        let c = (&one + &t1).inv(None).unwrap();
        let x = &c * &t2;
        assert_eq!(x.to_string(), "(1 + t1 + t1^2 + t1^3 + O(t1^4))*t2");
    }
}
