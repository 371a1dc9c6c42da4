//! Weierstrass division, preparation and regularization over
//! `A[[X, T]]` truncated by total degree, plus the Artin-Schreier and
//! Hensel solvers over complete truncated rings.
//!
//! Division is exact: `q` and `r` are the truncations of the unique
//! quotient and remainder of the given (polynomial) inputs in the complete
//! ring. Internally everything runs modulo a weighted truncation where
//! `A`'s maximal ideal and `X` carry weight `k + 1` and `T` weight `1`.
//! Under that weight the successive approximation gains at least one unit
//! per step, and every monomial of total degree `< D` has weight
//! `< (k + 1) D`.

use crate::error::{Error, Result};
use crate::gf::{Fq, GaloisField};
use crate::series::{SeriesRing, TruncatedSeries};
use std::fmt;
use std::sync::Arc;

pub(crate) struct FieldOps {
    p: u32,
    prime: bool,
    gf: GaloisField,
}

impl FieldOps {
    pub(crate) fn new(gf: &GaloisField) -> Self {
        FieldOps { p: gf.characteristic(), prime: gf.is_prime_field(), gf: gf.clone() }
    }

    #[inline]
    fn mul_add(&self, acc: Fq, a: Fq, b: Fq) -> Fq {
        if self.prime {
            ((acc as u64 + a as u64 * b as u64) % self.p as u64) as Fq
        } else {
            self.gf.add(acc, self.gf.mul(a, b))
        }
    }

    #[inline]
    fn mul(&self, a: Fq, b: Fq) -> Fq {
        self.mul_add(0, a, b)
    }

    #[inline]
    fn add(&self, a: Fq, b: Fq) -> Fq {
        self.gf.add(a, b)
    }

    #[inline]
    fn neg(&self, a: Fq) -> Fq {
        self.gf.neg(a)
    }
}

/// Dense index space for all monomials of weight `< bound`. Codes are
/// mixed-radix with the last variable least significant.
pub(crate) struct Layout {
    weights: Vec<u32>,
    bound: u32,
    maxe: Vec<u32>,
    strides: Vec<usize>,
    size: usize,
    /// Valid codes, sorted by weight.
    order: Vec<(usize, u32)>,
}

impl Layout {
    pub(crate) fn new(weights: Vec<u32>, bound: u32) -> Arc<Self> {
        let n = weights.len();
        let maxe: Vec<u32> = weights.iter().map(|w| bound.saturating_sub(1) / w).collect();
        let mut strides = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * (maxe[i + 1] as usize + 1);
        }
        let size = if n == 0 { 1 } else { strides[0] * (maxe[0] as usize + 1) };
        let mut order = Vec::new();
        for code in 0..size {
            let mut w = 0;
            for i in 0..n {
                w += ((code / strides[i]) % (maxe[i] as usize + 1)) as u32 * weights[i];
            }
            if w < bound {
                order.push((code, w));
            }
        }
        order.sort_by_key(|&(c, w)| (w, c));
        Arc::new(Layout { weights, bound, maxe, strides, size, order })
    }

    fn exponent(&self, code: usize, i: usize) -> u32 {
        ((code / self.strides[i]) % (self.maxe[i] as usize + 1)) as u32
    }

    fn encode(&self, m: &[u32]) -> Option<usize> {
        let w: u32 = m.iter().zip(&self.weights).map(|(e, w)| e * w).sum();
        if w >= self.bound {
            return None;
        }
        Some(m.iter().zip(&self.strides).map(|(e, s)| *e as usize * s).sum())
    }
}

#[derive(Clone)]
pub(crate) struct Dense {
    layout: Arc<Layout>,
    data: Vec<Fq>,
}

impl Dense {
    fn zeros(layout: &Arc<Layout>) -> Self {
        Dense { layout: layout.clone(), data: vec![0; layout.size] }
    }

    pub(crate) fn from_series(layout: &Arc<Layout>, x: &TruncatedSeries) -> Self {
        let mut d = Self::zeros(layout);
        for (m, c) in x.terms() {
            if let Some(code) = layout.encode(m) {
                d.data[code] = *c;
            }
        }
        d
    }

    pub(crate) fn to_series(&self, ring: &Arc<SeriesRing>) -> TruncatedSeries {
        let n = self.layout.weights.len();
        TruncatedSeries::from_terms(
            ring,
            self.layout
                .order
                .iter()
                .filter(|(c, _)| self.data[*c] != 0)
                .map(|&(c, _)| ((0..n).map(|i| self.layout.exponent(c, i)).collect(), self.data[c])),
        )
    }

    fn nonzero(&self) -> Vec<(usize, u32)> {
        self.layout.order.iter().copied().filter(|(c, _)| self.data[*c] != 0).collect()
    }

    fn is_zero(&self) -> bool {
        self.data.iter().all(|c| *c == 0)
    }

    fn add_assign(&mut self, o: &Dense, ops: &FieldOps) {
        for (a, b) in self.data.iter_mut().zip(&o.data) {
            if *b != 0 {
                *a = ops.add(*a, *b);
            }
        }
    }

    fn neg(&self, ops: &FieldOps) -> Dense {
        Dense { layout: self.layout.clone(), data: self.data.iter().map(|c| ops.neg(*c)).collect() }
    }

    fn mul(&self, o: &Dense, ops: &FieldOps) -> Dense {
        let mut out = Self::zeros(&self.layout);
        let bound = self.layout.bound;
        let b = o.nonzero();
        for (ca, wa) in self.nonzero() {
            let x = self.data[ca];
            for &(cb, wb) in &b {
                if wa + wb >= bound {
                    break;
                }
                let slot = &mut out.data[ca + cb];
                *slot = ops.mul_add(*slot, x, o.data[cb]);
            }
        }
        out
    }

    /// Inverse of a unit, solved one weight level at a time.
    pub(crate) fn inverse(&self, ops: &FieldOps) -> Dense {
        let e0 = self.data[0];
        let inv0 = ops.gf.inv(e0).expect("unit");
        let minus_inv0 = ops.neg(inv0);
        let tail: Vec<(usize, u32)> = self.nonzero().into_iter().filter(|(c, _)| *c != 0).collect();
        let bound = self.layout.bound;
        let mut z = Self::zeros(&self.layout);
        let mut acc = Self::zeros(&self.layout);
        for &(c, w) in &self.layout.order {
            z.data[c] = if c == 0 { inv0 } else { ops.mul(minus_inv0, acc.data[c]) };
            let zc = z.data[c];
            if zc == 0 {
                continue;
            }
            for &(cb, wb) in &tail {
                if w + wb >= bound {
                    break;
                }
                let slot = &mut acc.data[c + cb];
                *slot = ops.mul_add(*slot, zc, self.data[cb]);
            }
        }
        z
    }

    /// Part of `T`-degree `< k` (`T` is the last variable).
    fn alpha(&self, k: u32) -> Dense {
        let t = self.layout.weights.len() - 1;
        let mut out = Self::zeros(&self.layout);
        for &(c, _) in &self.layout.order {
            if self.layout.exponent(c, t) < k {
                out.data[c] = self.data[c];
            }
        }
        out
    }

    /// `(x - alpha(x)) / T^k`.
    fn beta(&self, k: u32) -> Dense {
        let t = self.layout.weights.len() - 1;
        let shift = k as usize * self.layout.strides[t];
        let mut out = Self::zeros(&self.layout);
        for &(c, _) in &self.layout.order {
            if self.layout.exponent(c, t) >= k {
                out.data[c - shift] = self.data[c];
            }
        }
        out
    }
}

/// Iteration order used by [`weierstrass_divide_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DivisionSchedule {
    /// Solves for the quotient one weight level at a time.
    WeightByWeight,
    /// Classical successive approximation: peel `T^k`-multiples off the
    /// running remainder until it vanishes.
    SuccessiveApproximation,
}

/// `T`-order of `f` modulo `(m_A, X)`, or `None` when that reduction has no
/// term below degree `D`.
pub fn regularity_order(f: &TruncatedSeries) -> Option<u32> {
    let t = f.ring().t_index();
    f.terms().filter(|(m, _)| m[..t].iter().all(|e| *e == 0)).map(|(m, _)| m[t]).min()
}

/// Quotient and remainder of `g` by the `k`-regular `f`.
pub fn weierstrass_divide(g: &TruncatedSeries, f: &TruncatedSeries, k: u32) -> Result<(TruncatedSeries, TruncatedSeries)> {
    weierstrass_divide_with(g, f, k, DivisionSchedule::WeightByWeight)
}

pub fn weierstrass_divide_with(
    g: &TruncatedSeries,
    f: &TruncatedSeries,
    k: u32,
    schedule: DivisionSchedule,
) -> Result<(TruncatedSeries, TruncatedSeries)> {
    if **g.ring() != **f.ring() {
        return Err(Error::RingMismatch);
    }
    if regularity_order(f) != Some(k) {
        return Err(Error::NotRegular);
    }
    let ring = f.ring();
    let ops = FieldOps::new(ring.field());
    let n = ring.nvars();
    let heavy = k + 1;
    let mut weights = vec![heavy; n];
    weights[n - 1] = 1;
    let exact = heavy * ring.truncation();
    let layout = Layout::new(weights, exact + k);

    let fd = Dense::from_series(&layout, f);
    let gd = Dense::from_series(&layout, g);
    let e_inv = fd.beta(k).inverse(&ops);
    let m = e_inv.mul(&fd.alpha(k), &ops);

    let (q, r) = match schedule {
        DivisionSchedule::WeightByWeight => {
            // w = beta(g) - beta(w m), where m has weight >= k + 1.
            let bg = gd.beta(k);
            let mt = m.nonzero();
            let t_shift = k as usize * layout.strides[n - 1];
            let mut w = Dense::zeros(&layout);
            let mut h = Dense::zeros(&layout);
            for &(c, wc) in &layout.order {
                if wc >= exact {
                    break;
                }
                let x = ops.add(bg.data[c], ops.neg(h.data[c + t_shift]));
                w.data[c] = x;
                if x == 0 {
                    continue;
                }
                for &(cb, wb) in &mt {
                    if wc + wb >= layout.bound {
                        break;
                    }
                    let slot = &mut h.data[c + cb];
                    *slot = ops.mul_add(*slot, x, m.data[cb]);
                }
            }
            let q = w.mul(&e_inv, &ops);
            let mut rest = gd.clone();
            rest.add_assign(&q.mul(&fd, &ops).neg(&ops), &ops);
            (q, rest.alpha(k))
        }
        DivisionSchedule::SuccessiveApproximation => {
            let mut cur = gd;
            let mut qsum = Dense::zeros(&layout);
            let mut r = Dense::zeros(&layout);
            let mut steps = 0;
            while !cur.is_zero() {
                steps += 1;
                assert!(steps <= layout.bound + 1, "successive approximation failed to contract");
                r.add_assign(&cur.alpha(k), &ops);
                let b = cur.beta(k);
                cur = b.mul(&m, &ops).neg(&ops);
                qsum.add_assign(&b, &ops);
            }
            (qsum.mul(&e_inv, &ops), r)
        }
    };
    Ok((q.to_series(ring), r.to_series(ring)))
}

/// `f = u * P` with `u` a unit and `P` distinguished of degree `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreparedFactorization {
    pub unit: TruncatedSeries,
    pub distinguished: TruncatedSeries,
    pub order: u32,
    pub truncation: u32,
}

impl fmt::Display for PreparedFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u = {}, P = {}, k = {}", self.unit, self.distinguished, self.order)
    }
}

pub fn weierstrass_prepare(f: &TruncatedSeries) -> Result<PreparedFactorization> {
    let k = regularity_order(f).ok_or(Error::NotRegular)?;
    let ring = f.ring();
    let tk = TruncatedSeries::monomial(ring, ring.t_index(), k);
    let (q, r) = weierstrass_divide(&tk, f, k)?;
    let unit = q.inv()?;
    let distinguished = tk.try_sub(&r)?;
    if unit.try_mul(&distinguished)? != *f {
        return Err(Error::Invalid("preparation failed to multiply back".into()));
    }
    Ok(PreparedFactorization { unit, distinguished, order: k, truncation: ring.truncation() })
}

/// Result of [`regularize`]. An exponent `0` leaves that `X_i` unchanged;
/// otherwise `X_i -> X_i + T^{N_i}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regularization {
    pub exponents: Vec<u32>,
    pub order: u32,
    pub transformed: TruncatedSeries,
}

/// Applies `X_i -> X_i + T^{N_i}` (skipping `N_i = 0`).
pub fn substitute(f: &TruncatedSeries, exponents: &[u32]) -> Result<TruncatedSeries> {
    let ring = f.ring();
    let a = ring.coefficient_vars().len();
    let n = ring.nvars();
    let t = TruncatedSeries::monomial(ring, n - 1, 1);
    let images: Vec<TruncatedSeries> = (0..n)
        .map(|i| {
            let v = TruncatedSeries::monomial(ring, i, 1);
            if i >= a && i < n - 1 && exponents[i - a] > 0 {
                v.try_add(&t.pow(exponents[i - a] as u64)).expect("same ring")
            } else {
                v
            }
        })
        .collect();
    f.compose(&images)
}

/// Searches `N = (1, B, B^2, ...)` for `B = 2, 3, ..., D` after trying the
/// identity.
pub fn regularize(f: &TruncatedSeries) -> Result<Regularization> {
    let ring = f.ring();
    let a = ring.coefficient_vars().len();
    if f.terms().all(|(m, _)| m[..a].iter().any(|e| *e > 0)) {
        return Err(Error::ZeroModMaximalIdeal);
    }
    let nx = ring.x_vars().len();
    if let Some(k) = regularity_order(f) {
        return Ok(Regularization { exponents: vec![0; nx], order: k, transformed: f.clone() });
    }
    if nx == 0 {
        return Err(Error::TruncationTooSmall);
    }
    for base in 2..=ring.truncation().max(2) {
        let exponents: Vec<u32> = (0..nx as u32).map(|i| base.saturating_pow(i)).collect();
        let c = substitute(f, &exponents)?;
        if let Some(k) = regularity_order(&c) {
            return Ok(Regularization { exponents, order: k, transformed: c });
        }
    }
    Err(Error::TruncationTooSmall)
}

/// `x - x^p`.
pub fn wp_series(x: &TruncatedSeries) -> TruncatedSeries {
    x.try_sub(&x.frobenius()).expect("same ring")
}

/// The solution `b = a + a^p + a^{p^2} + ...` in the maximal ideal of
/// `b - b^p = a`, modulo degree `order`.
pub fn artin_schreier_solve(a: &TruncatedSeries, order: u32) -> Result<TruncatedSeries> {
    if !a.in_maximal_ideal() {
        return Err(Error::NotInMaximalIdeal);
    }
    if order > a.ring().truncation() {
        return Err(Error::Invalid(format!("order {order} exceeds the truncation {}", a.ring().truncation())));
    }
    let mut b = TruncatedSeries::zero(a.ring());
    let mut x = a.truncate(order);
    while !x.is_zero() {
        b = b.try_add(&x)?;
        x = x.frobenius().truncate(order);
    }
    Ok(b)
}

/// Evaluates the polynomial with coefficients `g` (low to high) at `x`.
pub fn evaluate_polynomial(g: &[TruncatedSeries], x: &TruncatedSeries) -> Result<TruncatedSeries> {
    let mut acc = TruncatedSeries::zero(x.ring());
    for c in g.iter().rev() {
        acc = acc.try_mul(x)?.try_add(c)?;
    }
    Ok(acc)
}

pub fn derivative_polynomial(g: &[TruncatedSeries]) -> Vec<TruncatedSeries> {
    g.iter().enumerate().skip(1).map(|(i, c)| c.scale(c.ring().field().from_int(i as i64))).collect()
}

/// Newton iteration for a simple root of `g` lifting `x0`, until
/// `g(x) = 0` modulo degree `order`.
pub fn hensel_lift(g: &[TruncatedSeries], x0: &TruncatedSeries, order: u32) -> Result<TruncatedSeries> {
    let ring = x0.ring();
    if g.iter().any(|c| **c.ring() != **ring) {
        return Err(Error::RingMismatch);
    }
    if order > ring.truncation() {
        return Err(Error::Invalid(format!("order {order} exceeds the truncation {}", ring.truncation())));
    }
    let dg = derivative_polynomial(g);
    let mut x = x0.clone();
    let mut value = evaluate_polynomial(g, &x)?;
    if !value.in_maximal_ideal() {
        return Err(Error::NotInMaximalIdeal);
    }
    if !evaluate_polynomial(&dg, &x)?.is_unit() {
        return Err(Error::NotSimpleRoot);
    }
    while !value.truncate(order).is_zero() {
        let v0 = value.valuation().expect("nonzero");
        let slope = evaluate_polynomial(&dg, &x)?;
        x = x.try_sub(&value.try_mul(&slope.inv()?)?)?;
        value = evaluate_polynomial(g, &x)?;
        if let Some(v1) = value.valuation() {
            assert!(v1 >= 2 * v0, "Newton step did not double the valuation: {v0} -> {v1}");
        }
    }
    Ok(x.truncate(order))
}

/// Outcome of a p-th-root search for one unit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceSample {
    pub unit: TruncatedSeries,
    pub root: Option<TruncatedSeries>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    pub level: u32,
    pub samples: Vec<CongruenceSample>,
}

impl CongruenceReport {
    pub fn passed(&self) -> usize {
        self.samples.iter().filter(|s| s.root.is_some()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.samples.len()
    }
}

/// The `v` with `v^p = u` modulo degree `D`, if one exists. In
/// characteristic `p` this needs every monomial of `u` to be a `p`-th power.
pub fn pth_root_series(u: &TruncatedSeries) -> Option<TruncatedSeries> {
    let ring = u.ring();
    let f = ring.field();
    let p = f.characteristic();
    let mut terms = Vec::new();
    for (m, c) in u.terms() {
        if m.iter().any(|e| e % p != 0) {
            return None;
        }
        terms.push((m.iter().map(|e| e / p).collect(), f.pth_root(*c)));
    }
    let v = TruncatedSeries::from_terms(ring, terms);
    (v.frobenius() == *u).then_some(v)
}

/// For each sample in `1 + m^level`, looks for a `p`-th root modulo degree `D`.
pub fn unit_group_congruence_check(level: u32, samples: &[TruncatedSeries]) -> Result<CongruenceReport> {
    let mut out = Vec::new();
    for u in samples {
        let one = TruncatedSeries::one(u.ring());
        let tail = u.try_sub(&one)?;
        if tail.valuation().is_some_and(|v| v < level) {
            return Err(Error::Invalid(format!("{u} is not in 1 + m^{level}")));
        }
        out.push(CongruenceSample { unit: u.clone(), root: pth_root_series(u) });
    }
    Ok(CongruenceReport { level, samples: out })
}
