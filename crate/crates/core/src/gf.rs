//! Finite fields `F_q`, `q = p^e`, as the prime field adjoined one root of a
//! stored irreducible modulus.
//!
//! Elements are encoded as `u32` integers whose base-`p` digits are the
//! coefficients of the polynomial representative (digit `i` is the
//! coefficient of `w^i`, `w` the adjoined root). Multiplication goes through
//! discrete log tables built once at construction.

use crate::error::{Error, Result};
use std::fmt;

/// Element of a [`GaloisField`], in the base-`p` digit encoding.
pub type Fq = u32;

/// Largest field order accepted; keeps the log tables small.
pub const MAX_ORDER: u64 = 1 << 16;

#[derive(Clone)]
pub struct GaloisField {
    p: u32,
    degree: u32,
    q: u32,
    /// Monic modulus, coefficients low to high, length `degree + 1`.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    generator: String,
}

impl PartialEq for GaloisField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus && self.generator == other.generator
    }
}

impl Eq for GaloisField {}

impl fmt::Debug for GaloisField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}) mod {:?}", self.q, self.modulus)
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^e`, if it is a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut rest = q;
    let mut e = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

// Dense polynomials over the prime field, low to high, used only while
// building the field.
fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn prime_poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let inv_lead = prime_inv(m[dm], p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = (r[r.len() - 1] as u64 * inv_lead as u64 % p as u64) as u32;
        for (i, &mi) in m.iter().enumerate() {
            let t = (c as u64 * mi as u64) % p as u64;
            r[shift + i] = ((r[shift + i] as u64 + p as u64 - t) % p as u64) as u32;
        }
        trim(&mut r);
    }
    r
}

fn prime_inv(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64 % p as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

/// Whether the monic `modulus` (low to high) is irreducible over `F_p`, by
/// trial division by every monic polynomial of degree at most half its own.
pub fn is_irreducible_over_prime(modulus: &[u32], p: u32) -> bool {
    let n = modulus.len() - 1;
    if n == 0 {
        return false;
    }
    for d in 1..=n / 2 {
        let count = (p as u64).pow(d as u32);
        for idx in 0..count {
            let mut g = vec![0u32; d + 1];
            let mut rest = idx;
            for c in g.iter_mut().take(d) {
                *c = (rest % p as u64) as u32;
                rest /= p as u64;
            }
            g[d] = 1;
            if prime_poly_rem(modulus, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// First monic irreducible polynomial of degree `e` over `F_p`, enumerating
/// the lower coefficients as a base-`p` counter starting from the constant.
pub fn default_modulus(p: u32, e: u32) -> Vec<u32> {
    if e == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(e);
    for idx in 0..count {
        let mut m = vec![0u32; e as usize + 1];
        let mut rest = idx;
        for c in m.iter_mut().take(e as usize) {
            *c = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        m[e as usize] = 1;
        if is_irreducible_over_prime(&m, p) {
            return m;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl GaloisField {
    /// The field `F_q` with the default modulus and generator name `w`.
    pub fn with_order(q: u64) -> Result<Self> {
        let (p, e) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Self::new(p, default_modulus(p as u32, e), "w")
    }

    /// The prime field `F_p`.
    pub fn prime(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Self::new(p, vec![0, 1], "w")
    }

    /// `F_p[w]/(modulus)`; `modulus` is monic, coefficients low to high.
    pub fn new(p: u64, modulus: Vec<u32>, generator: &str) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        let p32 = p as u32;
        let mut modulus: Vec<u32> = modulus.into_iter().map(|c| c % p32).collect();
        trim(&mut modulus);
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidDescriptor("modulus must be monic of degree >= 1".into()));
        }
        if !is_irreducible_over_prime(&modulus, p32) {
            return Err(Error::ReducibleModulus);
        }
        let degree = (modulus.len() - 1) as u32;
        let q64 = p.checked_pow(degree).filter(|&q| q <= MAX_ORDER).ok_or_else(|| {
            Error::InvalidDescriptor(format!("field order {p}^{degree} is too large"))
        })?;
        let q = q64 as u32;
        let mut field = GaloisField {
            p: p32,
            degree,
            q,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            generator: generator.to_string(),
        };
        field.build_tables();
        Ok(field)
    }

    fn build_tables(&mut self) {
        let order = self.q - 1;
        for g in 1..self.q {
            let mut exp = Vec::with_capacity(order as usize);
            let mut x = 1u32;
            let mut primitive = true;
            for i in 0..order {
                if i > 0 && x == 1 {
                    primitive = false;
                    break;
                }
                exp.push(x);
                x = self.slow_mul(x, g);
            }
            if primitive && x == 1 {
                let mut log = vec![0u32; self.q as usize];
                for (i, &v) in exp.iter().enumerate() {
                    log[v as usize] = i as u32;
                }
                self.exp = exp;
                self.log = log;
                return;
            }
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }

    fn slow_mul(&self, a: Fq, b: Fq) -> Fq {
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u32; da.len() + db.len()];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = ((prod[i + j] as u64 + x as u64 * y as u64) % self.p as u64) as u32;
            }
        }
        self.from_digits(&prime_poly_rem(&prod, &self.modulus, self.p))
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn generator_name(&self) -> &str {
        &self.generator
    }

    pub fn is_prime_field(&self) -> bool {
        self.degree == 1
    }

    /// The adjoined root `w` of the modulus.
    pub fn generator(&self) -> Fq {
        if self.degree == 1 {
            self.from_int(-(self.modulus[0] as i64))
        } else {
            self.p
        }
    }

    pub fn digits(&self, a: Fq) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.degree as usize);
        let mut rest = a;
        for _ in 0..self.degree {
            out.push(rest % self.p);
            rest /= self.p;
        }
        out
    }

    pub fn from_digits(&self, digits: &[u32]) -> Fq {
        digits
            .iter()
            .take(self.degree as usize)
            .rev()
            .fold(0u32, |acc, &d| acc * self.p + d % self.p)
    }

    pub fn from_int(&self, n: i64) -> Fq {
        n.rem_euclid(self.p as i64) as u32
    }

    /// The prime-field value of `a`, if `a` lies in the prime field.
    pub fn to_prime(&self, a: Fq) -> Option<u32> {
        (a < self.p).then_some(a)
    }

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.p == 2 {
            return a ^ b;
        }
        if self.degree == 1 {
            let s = a + b;
            return if s >= self.p { s - self.p } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.degree {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn neg(&self, a: Fq) -> Fq {
        if self.p == 2 {
            return a;
        }
        let mut a = a;
        let mut out = 0u32;
        let mut place = 1u32;
        for _ in 0..self.degree {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a == 0 || b == 0 {
            return 0;
        }
        let order = self.q - 1;
        let s = self.log[a as usize] + self.log[b as usize];
        self.exp[(if s >= order { s - order } else { s }) as usize]
    }

    pub fn inv(&self, a: Fq) -> Result<Fq> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let order = self.q - 1;
        let l = self.log[a as usize];
        Ok(self.exp[((order - l) % order) as usize])
    }

    pub fn pow(&self, a: Fq, n: i64) -> Result<Fq> {
        if a == 0 {
            return if n > 0 {
                Ok(0)
            } else if n == 0 {
                Ok(1)
            } else {
                Err(Error::DivisionByZero)
            };
        }
        let order = (self.q - 1) as i64;
        let l = (self.log[a as usize] as i64 * n).rem_euclid(order);
        Ok(self.exp[l as usize])
    }

    /// `a^p`.
    pub fn frobenius(&self, a: Fq) -> Fq {
        self.pow(a, self.p as i64).unwrap()
    }

    /// The unique `b` with `b^p = a` (the field is perfect).
    pub fn pth_root(&self, a: Fq) -> Fq {
        if self.degree == 1 {
            return a;
        }
        self.pow(a, (self.p as i64).pow(self.degree - 1)).unwrap()
    }

    /// Artin-Schreier map `a - a^p`.
    pub fn wp(&self, a: Fq) -> Fq {
        self.sub(a, self.frobenius(a))
    }

    /// Iterator over all elements.
    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        0..self.q
    }

    /// Trace from this field down to its subfield of order `sub_order`,
    /// `sum_j a^(sub_order^j)` over the Galois orbit. The result lies in the
    /// subfield and is returned in this field's encoding.
    pub fn trace_to(&self, a: Fq, sub_order: u64) -> Result<Fq> {
        let sub_degree = match prime_power(sub_order) {
            Some((p, e)) if p == self.p as u64 && self.degree.is_multiple_of(e) => e,
            _ => {
                return Err(Error::NotASubfield { field: self.q as u64, sub: sub_order })
            }
        };
        let mut acc = 0;
        let mut x = a;
        for _ in 0..self.degree / sub_degree {
            acc = self.add(acc, x);
            for _ in 0..sub_degree {
                x = self.frobenius(x);
            }
        }
        Ok(acc)
    }

    /// Absolute trace `Tr_{F_q/F_p}` as a prime-field value.
    pub fn absolute_trace(&self, a: Fq) -> u32 {
        self.trace_to(a, self.p as u64).expect("prime field is a subfield")
    }

    /// Renders `a` as an expression in the generator name.
    pub fn format(&self, a: Fq) -> String {
        if self.degree == 1 || a < self.p {
            return a.to_string();
        }
        let digits = self.digits(a);
        let mut parts = Vec::new();
        for (i, &d) in digits.iter().enumerate().rev() {
            if d == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => self.generator.clone(),
                _ => format!("{}^{}", self.generator, i),
            };
            parts.push(match (d, mono.is_empty()) {
                (_, true) => d.to_string(),
                (1, false) => mono,
                (_, false) => format!("{d}*{mono}"),
            });
        }
        parts.join(" + ")
    }

    /// Whether `format(a)` contains more than one summand.
    pub fn is_compound(&self, a: Fq) -> bool {
        self.digits(a).iter().filter(|&&d| d != 0).count() > 1
    }

    // Dense polynomials over this field, coefficients low to high.

    pub fn poly_trim(&self, v: &mut Vec<Fq>) {
        trim(v);
    }

    pub fn poly_mul(&self, a: &[Fq], b: &[Fq]) -> Vec<Fq> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        trim(&mut out);
        out
    }

    /// Remainder of `a` modulo the nonzero polynomial `m`.
    pub fn poly_rem(&self, a: &[Fq], m: &[Fq]) -> Vec<Fq> {
        let mut m = m.to_vec();
        trim(&mut m);
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        let inv_lead = self.inv(m[dm]).expect("nonzero divisor");
        while r.len() > dm {
            let shift = r.len() - 1 - dm;
            let c = self.mul(*r.last().unwrap(), inv_lead);
            for (i, &mi) in m.iter().enumerate() {
                r[shift + i] = self.sub(r[shift + i], self.mul(c, mi));
            }
            trim(&mut r);
        }
        r
    }

    /// Whether the polynomial `f` (low to high, degree >= 1) is irreducible
    /// over this field, by trial division by monic polynomials of degree at
    /// most `deg f / 2`.
    pub fn poly_is_irreducible(&self, f: &[Fq]) -> bool {
        let mut f = f.to_vec();
        trim(&mut f);
        if f.len() < 2 {
            return false;
        }
        let n = f.len() - 1;
        for d in 1..=n / 2 {
            let count = (self.q as u64).pow(d as u32);
            for idx in 0..count {
                let mut g = vec![0u32; d + 1];
                let mut rest = idx;
                for c in g.iter_mut().take(d) {
                    *c = (rest % self.q as u64) as u32;
                    rest /= self.q as u64;
                }
                g[d] = 1;
                if self.poly_rem(&f, &g).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_moduli() {
        assert_eq!(default_modulus(2, 2), vec![1, 1, 1]);
        assert_eq!(default_modulus(2, 3), vec![1, 1, 0, 1]);
        assert_eq!(default_modulus(3, 2), vec![1, 0, 1]);
        assert_eq!(default_modulus(5, 2), vec![2, 0, 1]);
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert_eq!(GaloisField::new(2, vec![1, 0, 1], "w"), Err(Error::ReducibleModulus));
        assert_eq!(GaloisField::new(4, vec![1, 1, 1], "w"), Err(Error::NotPrime(4)));
    }

    #[test]
    fn f4_arithmetic() {
        let f = GaloisField::with_order(4).unwrap();
        let w = f.generator();
        // w^2 = w + 1
        assert_eq!(f.mul(w, w), f.add(w, 1));
        assert_eq!(f.pth_root(w), f.mul(w, w));
        assert_eq!(f.absolute_trace(1), 0);
        assert_eq!(f.absolute_trace(w), 1);
        assert_eq!(f.trace_to(w, 4).unwrap(), w);
        assert!(f.trace_to(w, 8).is_err());
    }

    #[test]
    fn field_axioms_exhaustive_f9() {
        let f = GaloisField::with_order(9).unwrap();
        for a in f.elements() {
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            assert_eq!(f.frobenius(f.pth_root(a)), a);
            for b in f.elements() {
                assert_eq!(f.frobenius(f.add(a, b)), f.add(f.frobenius(a), f.frobenius(b)));
                assert_eq!(f.mul(a, b), f.slow_mul(a, b));
            }
        }
    }

    #[test]
    fn trace_is_prime_field_valued() {
        for q in [4u64, 8, 9, 25, 27] {
            let f = GaloisField::with_order(q).unwrap();
            for a in f.elements() {
                assert!(f.to_prime(f.trace_to(a, f.characteristic() as u64).unwrap()).is_some());
            }
        }
    }

    #[test]
    fn formatting() {
        let f = GaloisField::with_order(9).unwrap();
        assert_eq!(f.format(f.generator()), "w");
        assert_eq!(f.format(f.add(f.mul(2, f.generator()), 1)), "2*w + 1");
    }
}
