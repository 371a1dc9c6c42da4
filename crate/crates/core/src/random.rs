//! Random sampling of field elements, forms and series, for property suites.

use crate::error::Result;
use crate::forms::DifferentialForm;
use crate::gf::{Fq, GaloisField};
use crate::mpoly::{MPoly, RatFn};
use crate::series::{SeriesRing, TruncatedSeries};
use crate::tower::{FieldElement, FieldTower, Value};
use rand::Rng;
use std::sync::Arc;

/// Shape of sampled elements.
#[derive(Clone, Debug)]
pub struct Sampler {
    /// Largest total degree of numerators and denominators over a
    /// rational base.
    pub rational_degree: u32,
    /// Number of monomials tried per numerator.
    pub rational_terms: usize,
    /// Exponent range of each Laurent layer.
    pub laurent_range: (i64, i64),
    /// Probability that a Laurent exponent in range carries a term.
    pub density: f64,
}

impl Default for Sampler {
    fn default() -> Self {
        Sampler { rational_degree: 2, rational_terms: 3, laurent_range: (-4, 2), density: 0.5 }
    }
}

pub fn random_fq<R: Rng + ?Sized>(f: &GaloisField, rng: &mut R) -> Fq {
    rng.gen_range(0..f.order())
}

pub fn random_nonzero_fq<R: Rng + ?Sized>(f: &GaloisField, rng: &mut R) -> Fq {
    rng.gen_range(1..f.order())
}

pub fn random_poly<R: Rng + ?Sized>(f: &GaloisField, nvars: usize, degree: u32, terms: usize, rng: &mut R) -> MPoly {
    let mut out = Vec::new();
    for _ in 0..terms {
        let mut exps = vec![0u32; nvars];
        let mut budget = rng.gen_range(0..=degree);
        for e in exps.iter_mut() {
            let x = rng.gen_range(0..=budget);
            *e = x;
            budget -= x;
        }
        out.push((exps, random_fq(f, rng)));
    }
    MPoly::from_terms(nvars, out, f)
}

impl Sampler {
    pub fn ratfn<R: Rng + ?Sized>(&self, f: &GaloisField, nvars: usize, rng: &mut R) -> RatFn {
        let num = random_poly(f, nvars, self.rational_degree, self.rational_terms, rng);
        loop {
            let den = random_poly(f, nvars, self.rational_degree, self.rational_terms, rng);
            if den.is_zero() {
                continue;
            }
            return RatFn::new(num, den, f).expect("nonzero denominator");
        }
    }

    /// A random element of layer `level`, read at the top layer.
    pub fn element<R: Rng + ?Sized>(&self, tower: &Arc<FieldTower>, level: usize, rng: &mut R) -> Result<FieldElement> {
        self.element_on_layer(tower, level, rng)?.at_level(tower.height())
    }

    fn element_on_layer<R: Rng + ?Sized>(&self, tower: &Arc<FieldTower>, level: usize, rng: &mut R) -> Result<FieldElement> {
        if level == 0 {
            let v = if tower.is_finite_base() {
                tower.const_v(0, random_fq(tower.field(), rng))
            } else {
                Value::Rat(self.ratfn(tower.field(), tower.rational_vars().len(), rng))
            };
            return Ok(FieldElement::from_value(tower, 0, v));
        }
        let (lo, hi) = self.laurent_range;
        let mut terms = Vec::new();
        for e in lo..=hi {
            if rng.gen_bool(self.density) {
                terms.push((e, self.element_on_layer(tower, level - 1, rng)?));
            }
        }
        FieldElement::laurent(tower, level, terms, None)
    }

    pub fn top_element<R: Rng + ?Sized>(&self, tower: &Arc<FieldTower>, rng: &mut R) -> Result<FieldElement> {
        self.element(tower, tower.height(), rng)
    }

    /// A random form of the given degree in the dlog basis of `tower`.
    pub fn form<R: Rng + ?Sized>(&self, tower: &Arc<FieldTower>, degree: usize, rng: &mut R) -> Result<DifferentialForm> {
        let r = tower.p_rank();
        let mut acc = DifferentialForm::zero(tower, degree);
        for subset in subsets(r, degree) {
            let c = self.top_element(tower, rng)?;
            acc = acc.try_add(&DifferentialForm::term(&c, &subset)?)?;
        }
        Ok(acc)
    }
}

/// All increasing `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// A random series: each monomial of degree in `min_degree..D` is kept
/// with probability `density`.
pub fn random_series<R: Rng + ?Sized>(ring: &Arc<SeriesRing>, min_degree: u32, density: f64, rng: &mut R) -> TruncatedSeries {
    let n = ring.nvars();
    let mut terms = Vec::new();
    let mut m = vec![0u32; n];
    fn walk<R: Rng + ?Sized>(
        i: usize,
        left: u32,
        m: &mut Vec<u32>,
        ring: &SeriesRing,
        min_degree: u32,
        density: f64,
        rng: &mut R,
        out: &mut Vec<(Vec<u32>, Fq)>,
    ) {
        if i == m.len() {
            let d: u32 = m.iter().sum();
            if d >= min_degree && rng.gen_bool(density) {
                out.push((m.clone(), random_nonzero_fq(ring.field(), rng)));
            }
            return;
        }
        for e in 0..=left {
            m[i] = e;
            walk(i + 1, left - e, m, ring, min_degree, density, rng, out);
        }
        m[i] = 0;
    }
    walk(0, ring.truncation() - 1, &mut m, ring, min_degree, density, rng, &mut terms);
    TruncatedSeries::from_terms(ring, terms)
}

/// A random `k`-regular series: unit times `T^k` modulo `(m_A, X)`, plus
/// random terms divisible by some `u` or `X`.
pub fn random_regular<R: Rng + ?Sized>(ring: &Arc<SeriesRing>, k: u32, density: f64, rng: &mut R) -> TruncatedSeries {
    let t = ring.t_index();
    let raw = random_series(ring, 1, density, rng);
    let mut terms: Vec<(Vec<u32>, Fq)> = raw
        .terms()
        .filter(|(m, _)| m[..t].iter().any(|e| *e > 0) || m[t] > k)
        .map(|(m, c)| (m.clone(), *c))
        .collect();
    let mut lead = vec![0; ring.nvars()];
    lead[t] = k;
    terms.push((lead, random_nonzero_fq(ring.field(), rng)));
    TruncatedSeries::from_terms(ring, terms)
}
