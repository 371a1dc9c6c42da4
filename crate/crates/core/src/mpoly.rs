//! Sparse multivariate polynomials over a finite field and the canonical
//! rational functions built from them.
//!
//! Monomials are exponent vectors compared lexicographically (first variable
//! most significant); the leading term is the lexicographically largest one.
//! Rational functions are kept with coprime numerator and denominator and a
//! monic denominator, so equality is structural.

use crate::error::{Error, Result};
use crate::gf::{Fq, GaloisField};
use std::collections::BTreeMap;

pub type Exponents = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, Fq>,
}

impl MPoly {
    pub fn zero(nvars: usize) -> Self {
        MPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Fq) -> Self {
        let mut p = Self::zero(nvars);
        if c != 0 {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, 1)
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: Fq) -> Self {
        debug_assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        if c != 0 {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn variable(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, 1)
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Fq)>, f: &GaloisField) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c, f);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &Fq)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&vec![0; self.nvars]) == Some(&1)
    }

    /// The constant value, if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Fq> {
        match self.terms.len() {
            0 => Some(0),
            1 => self.terms.get(&vec![0; self.nvars]).copied(),
            _ => None,
        }
    }

    pub fn leading(&self) -> Option<(&Exponents, &Fq)> {
        self.terms.iter().next_back()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn add_term(&mut self, e: Exponents, c: Fq, f: &GaloisField) {
        if c == 0 {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = f.add(*o.get(), c);
                if s == 0 {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self, f: &GaloisField) -> Self {
        let mut out = self.clone();
        for (e, &c) in &other.terms {
            out.add_term(e.clone(), c, f);
        }
        out
    }

    pub fn neg(&self, f: &GaloisField) -> Self {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, &c)| (e.clone(), f.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &Self, f: &GaloisField) -> Self {
        self.add(&other.neg(f), f)
    }

    pub fn scale(&self, c: Fq, f: &GaloisField) -> Self {
        if c == 0 {
            return Self::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, &x)| (e.clone(), f.mul(x, c))).collect(),
        }
    }

    pub fn mul_term(&self, e: &[u32], c: Fq, f: &GaloisField) -> Self {
        if c == 0 {
            return Self::zero(self.nvars);
        }
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(x, &d)| (x.iter().zip(e).map(|(a, b)| a + b).collect(), f.mul(c, d)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self, f: &GaloisField) -> Self {
        let mut out = Self::zero(self.nvars);
        for (ea, &ca) in &self.terms {
            for (eb, &cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, f.mul(ca, cb), f);
            }
        }
        out
    }

    pub fn pow(&self, n: u32, f: &GaloisField) -> Self {
        let mut result = Self::one(self.nvars);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.mul(&base, f);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base, f);
            }
        }
        result
    }

    /// `self^p`, computed termwise.
    pub fn frobenius(&self, f: &GaloisField) -> Self {
        let p = f.characteristic();
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| (e.iter().map(|x| x * p).collect(), f.frobenius(c)))
                .collect(),
        }
    }

    /// Replaces variable `var` by its `p`-th power.
    pub fn frobenius_in(&self, var: usize, f: &GaloisField) -> Self {
        let p = f.characteristic();
        MPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, &c)| {
                    let mut e = e.clone();
                    e[var] *= p;
                    (e, c)
                })
                .collect(),
        }
    }

    /// Formal partial derivative.
    pub fn derivative(&self, var: usize, f: &GaloisField) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, &c) in &self.terms {
            if e[var] == 0 {
                continue;
            }
            let k = f.from_int(e[var] as i64);
            if k == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[var] -= 1;
            out.add_term(e2, f.mul(c, k), f);
        }
        out
    }

    /// Makes the leading coefficient 1; returns the factor divided out.
    pub fn make_monic(&self, f: &GaloisField) -> (Self, Fq) {
        match self.leading() {
            None => (self.clone(), 1),
            Some((_, &c)) => (self.scale(f.inv(c).unwrap(), f), c),
        }
    }

    /// Exact division; `None` when `divisor` does not divide `self`.
    pub fn div_exact(&self, divisor: &Self, f: &GaloisField) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        let (le, &lc) = divisor.leading().unwrap();
        let inv_lc = f.inv(lc).unwrap();
        let mut rem = self.clone();
        let mut quot = Self::zero(self.nvars);
        while let Some((re, &rc)) = rem.leading() {
            if re.iter().zip(le).any(|(a, b)| a < b) {
                return None;
            }
            let e: Exponents = re.iter().zip(le).map(|(a, b)| a - b).collect();
            let c = f.mul(rc, inv_lc);
            rem = rem.sub(&divisor.mul_term(&e, c, f), f);
            quot.add_term(e, c, f);
        }
        Some(quot)
    }

    /// Coefficients with respect to `var`, index = degree in `var`.
    fn to_univariate(&self, var: usize) -> Vec<MPoly> {
        let mut out = vec![Self::zero(self.nvars); self.degree_in(var) as usize + 1];
        for (e, &c) in &self.terms {
            let d = e[var] as usize;
            let mut e2 = e.clone();
            e2[var] = 0;
            out[d].terms.insert(e2, c);
        }
        out
    }

    fn from_univariate(coeffs: &[MPoly], var: usize, nvars: usize) -> Self {
        let mut out = Self::zero(nvars);
        for (d, c) in coeffs.iter().enumerate() {
            for (e, &x) in &c.terms {
                let mut e2 = e.clone();
                e2[var] = d as u32;
                out.terms.insert(e2, x);
            }
        }
        out
    }

    fn first_variable(&self) -> Option<usize> {
        (0..self.nvars).find(|&v| self.terms.keys().any(|e| e[v] > 0))
    }

    fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    /// Monic greatest common divisor (recursive primitive remainder sequence).
    pub fn gcd(&self, other: &Self, f: &GaloisField) -> Self {
        if self.is_zero() {
            return other.make_monic(f).0;
        }
        if other.is_zero() {
            return self.make_monic(f).0;
        }
        if self.as_constant().is_some() || other.as_constant().is_some() {
            return Self::one(self.nvars);
        }
        let var = match (self.first_variable(), other.first_variable()) {
            (Some(a), Some(b)) => a.min(b),
            _ => return Self::one(self.nvars),
        };
        if !self.involves(var) {
            return self.gcd(&other.content(var, f), f);
        }
        if !other.involves(var) {
            return self.content(var, f).gcd(other, f);
        }
        let ca = self.content(var, f);
        let cb = other.content(var, f);
        let c = ca.gcd(&cb, f);
        let mut a = self.div_exact(&ca, f).expect("content divides");
        let mut b = other.div_exact(&cb, f).expect("content divides");
        if a.degree_in(var) < b.degree_in(var) {
            std::mem::swap(&mut a, &mut b);
        }
        let g = loop {
            let r = a.pseudo_rem(&b, var, f);
            if r.is_zero() {
                break b;
            }
            if !r.involves(var) {
                break Self::one(self.nvars);
            }
            a = b;
            b = r.primitive_part(var, f);
        };
        let g = g.primitive_part(var, f);
        c.mul(&g, f).make_monic(f).0
    }

    /// Gcd of the coefficients with respect to `var`.
    pub fn content(&self, var: usize, f: &GaloisField) -> Self {
        let coeffs = self.to_univariate(var);
        let mut g = Self::zero(self.nvars);
        for c in coeffs.iter().filter(|c| !c.is_zero()) {
            g = g.gcd(c, f);
            if g.as_constant().is_some() && !g.is_zero() {
                return Self::one(self.nvars);
            }
        }
        g
    }

    pub fn primitive_part(&self, var: usize, f: &GaloisField) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let c = self.content(var, f);
        self.div_exact(&c, f).expect("content divides")
    }

    /// `lc(b)^(deg a - deg b + 1) * a mod b` with respect to `var`.
    fn pseudo_rem(&self, b: &Self, var: usize, f: &GaloisField) -> Self {
        let bu = b.to_univariate(var);
        let db = bu.len() - 1;
        let lc = bu[db].clone();
        let mut r = self.to_univariate(var);
        while r.len() > db && !r.is_empty() {
            let dr = r.len() - 1;
            let lr = r[dr].clone();
            for c in r.iter_mut() {
                *c = c.mul(&lc, f);
            }
            for (i, bc) in bu.iter().enumerate() {
                let t = bc.mul(&lr, f);
                r[dr - db + i] = r[dr - db + i].sub(&t, f);
            }
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        Self::from_univariate(&r, var, self.nvars)
    }

    /// Substitutes prime-field or field values for all variables.
    pub fn evaluate(&self, point: &[Fq], f: &GaloisField) -> Fq {
        let mut acc = 0;
        for (e, &c) in &self.terms {
            let mut t = c;
            for (x, &k) in point.iter().zip(e) {
                t = f.mul(t, f.pow(*x, k as i64).unwrap());
            }
            acc = f.add(acc, t);
        }
        acc
    }

    pub fn map_coefficients(&self, g: impl Fn(Fq) -> Fq) -> Self {
        MPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, &c)| (e.clone(), g(c))).filter(|(_, c)| *c != 0).collect(),
        }
    }

    pub(crate) fn from_raw(nvars: usize, terms: BTreeMap<Exponents, Fq>) -> Self {
        MPoly { nvars, terms: terms.into_iter().filter(|(_, c)| *c != 0).collect() }
    }

    /// Renders with the given variable names, highest term first.
    pub fn format(&self, names: &[String], f: &GaloisField) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts: Vec<String> = Vec::new();
        for (e, &c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{}", names[i], k) })
                .collect();
            let mono = mono.join("*");
            let coef = f.format(c);
            parts.push(match (mono.is_empty(), c) {
                (true, _) => coef,
                (false, 1) => mono,
                (false, _) if f.is_compound(c) => format!("({coef})*{mono}"),
                (false, _) => format!("{coef}*{mono}"),
            });
        }
        parts.join(" + ")
    }
}

/// Canonical fraction of multivariate polynomials.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFn {
    num: MPoly,
    den: MPoly,
}

impl RatFn {
    pub fn zero(nvars: usize) -> Self {
        RatFn { num: MPoly::zero(nvars), den: MPoly::one(nvars) }
    }

    pub fn from_poly(p: MPoly) -> Self {
        let n = p.nvars();
        RatFn { num: p, den: MPoly::one(n) }
    }

    pub fn constant(nvars: usize, c: Fq) -> Self {
        Self::from_poly(MPoly::constant(nvars, c))
    }

    /// Builds and normalizes `num / den`.
    pub fn new(num: MPoly, den: MPoly, f: &GaloisField) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(num, den, f))
    }

    fn normalized(num: MPoly, den: MPoly, f: &GaloisField) -> Self {
        if num.is_zero() {
            return Self::zero(num.nvars());
        }
        let (num, den) = if den.as_constant().is_some() {
            (num, den)
        } else {
            let g = num.gcd(&den, f);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_exact(&g, f).unwrap(), den.div_exact(&g, f).unwrap())
            }
        };
        let (den, lc) = den.make_monic(f);
        let num = num.scale(f.inv(lc).unwrap(), f);
        RatFn { num, den }
    }

    pub fn num(&self) -> &MPoly {
        &self.num
    }

    pub fn den(&self) -> &MPoly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, o: &Self, f: &GaloisField) -> Self {
        if self.den == o.den {
            return Self::normalized(self.num.add(&o.num, f), self.den.clone(), f);
        }
        let num = self.num.mul(&o.den, f).add(&o.num.mul(&self.den, f), f);
        Self::normalized(num, self.den.mul(&o.den, f), f)
    }

    pub fn neg(&self, f: &GaloisField) -> Self {
        RatFn { num: self.num.neg(f), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Self, f: &GaloisField) -> Self {
        self.add(&o.neg(f), f)
    }

    pub fn mul(&self, o: &Self, f: &GaloisField) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.nvars());
        }
        Self::normalized(self.num.mul(&o.num, f), self.den.mul(&o.den, f), f)
    }

    pub fn inv(&self, f: &GaloisField) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone(), f))
    }

    pub fn frobenius(&self, f: &GaloisField) -> Self {
        // Frobenius preserves coprimality and monicity.
        RatFn { num: self.num.frobenius(f), den: self.den.frobenius(f) }
    }

    /// Substitutes `x_var -> x_var^p`.
    pub fn frobenius_in(&self, var: usize, f: &GaloisField) -> Self {
        Self::normalized(self.num.frobenius_in(var, f), self.den.frobenius_in(var, f), f)
    }

    pub fn derivative(&self, var: usize, f: &GaloisField) -> Self {
        let dn = self.num.derivative(var, f);
        let dd = self.den.derivative(var, f);
        if dd.is_zero() {
            return Self::normalized(dn, self.den.clone(), f);
        }
        let num = dn.mul(&self.den, f).sub(&self.num.mul(&dd, f), f);
        Self::normalized(num, self.den.mul(&self.den, f), f)
    }

    pub fn as_constant(&self) -> Option<Fq> {
        if self.den.is_one() {
            self.num.as_constant()
        } else {
            None
        }
    }

    pub fn format(&self, names: &[String], f: &GaloisField) -> String {
        let n = self.num.format(names, f);
        if self.den.is_one() {
            return n;
        }
        let n = if self.num.len() > 1 { format!("({n})") } else { n };
        let d = self.den.format(names, f);
        let d = if self.den.len() > 1 || d.contains('*') { format!("({d})") } else { d };
        format!("{n}/{d}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> GaloisField {
        GaloisField::prime(2).unwrap()
    }

    fn b(n: usize, i: usize) -> MPoly {
        MPoly::variable(n, i)
    }

    #[test]
    fn gcd_univariate() {
        let f = f2();
        let x = b(1, 0);
        let one = MPoly::one(1);
        // (x+1)^2 and x^2 + x = x(x+1)
        let a = x.add(&one, &f).pow(2, &f);
        let c = x.mul(&x.add(&one, &f), &f);
        assert_eq!(a.gcd(&c, &f), x.add(&one, &f));
    }

    #[test]
    fn gcd_bivariate_f3() {
        let f = GaloisField::prime(3).unwrap();
        let (x, y) = (b(2, 0), b(2, 1));
        let one = MPoly::one(2);
        let common = x.mul(&y, &f).add(&one, &f);
        let a = common.mul(&x.add(&y, &f), &f);
        let c = common.mul(&x.sub(&y, &f).pow(2, &f), &f);
        assert_eq!(a.gcd(&c, &f), common);
        let g = x.pow(2, &f).mul(&y, &f).gcd(&x.mul(&y.pow(3, &f), &f), &f);
        assert_eq!(g, x.mul(&y, &f));
    }

    #[test]
    fn ratfn_normalization() {
        let f = f2();
        let x = b(1, 0);
        let one = MPoly::one(1);
        let r = RatFn::new(x.mul(&x.add(&one, &f), &f), x.add(&one, &f).pow(2, &f), &f).unwrap();
        assert_eq!(r.num(), &x);
        assert_eq!(r.den(), &x.add(&one, &f));
        assert_eq!(RatFn::new(x.clone(), MPoly::zero(1), &f), Err(Error::DivisionByZero));
    }

    #[test]
    fn ratfn_field_ops() {
        let f = GaloisField::prime(5).unwrap();
        let (x, y) = (b(2, 0), b(2, 1));
        let one = MPoly::one(2);
        let r = RatFn::new(x.add(&one, &f), y.clone(), &f).unwrap();
        let s = RatFn::new(y.clone(), x.sub(&one, &f), &f).unwrap();
        let prod = r.mul(&s, &f);
        let back = prod.mul(&s.inv(&f).unwrap(), &f);
        assert_eq!(back, r);
        let sum = r.add(&s, &f).sub(&s, &f);
        assert_eq!(sum, r);
    }

    #[test]
    fn derivative_kills_pth_powers() {
        let f = GaloisField::prime(3).unwrap();
        let x = b(1, 0);
        let r = RatFn::new(x.pow(3, &f), x.add(&MPoly::one(1), &f).pow(3, &f), &f).unwrap();
        assert!(r.derivative(0, &f).is_zero());
    }
}
