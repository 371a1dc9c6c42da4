//! Traces of differential forms along the two generating kinds of finite
//! extension: étale monogenic `k[x]/(f)` and radicial `k(a)`, `a^p = b`.

use crate::error::{Error, Result};
use crate::forms::{sort_with_sign, DifferentialForm};
use crate::hp::{hp_class, HpRepresentative};
use crate::tower::{needs_parens, FieldElement, FieldTower};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

// Dense univariate polynomials over a tower field, low to high.

fn trim(v: &mut Vec<FieldElement>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

fn poly_sub(a: &[FieldElement], b: &[FieldElement], zero: &FieldElement) -> Vec<FieldElement> {
    let n = a.len().max(b.len());
    let mut out: Vec<FieldElement> =
        (0..n).map(|i| &a.get(i).unwrap_or(zero).clone() - b.get(i).unwrap_or(zero)).collect();
    trim(&mut out);
    out
}

fn poly_mul(a: &[FieldElement], b: &[FieldElement], zero: &FieldElement) -> Vec<FieldElement> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![zero.clone(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim(&mut out);
    out
}

fn poly_divrem(a: &[FieldElement], b: &[FieldElement], zero: &FieldElement) -> Result<(Vec<FieldElement>, Vec<FieldElement>)> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = b[db].inv(None)?;
    let mut q = vec![zero.clone(); r.len().saturating_sub(db)];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let c = &r[r.len() - 1] * &lead_inv;
        for (i, bi) in b.iter().enumerate() {
            r[shift + i] = &r[shift + i] - &(&c * bi);
        }
        // the leading coefficient cancels exactly only over exact fields
        r.pop();
        trim(&mut r);
        q[shift] = c;
    }
    trim(&mut q);
    Ok((q, r))
}

/// `(g, s)` with `s * a = g mod b`, `g = gcd(a, b)`.
fn poly_inverse_part(a: &[FieldElement], b: &[FieldElement], zero: &FieldElement) -> Result<(Vec<FieldElement>, Vec<FieldElement>)> {
    let one = FieldElement::one(zero.tower());
    let (mut r0, mut r1) = (b.to_vec(), a.to_vec());
    let (mut s0, mut s1) = (Vec::new(), vec![one]);
    trim(&mut r1);
    while !r1.is_empty() {
        let (q, r) = poly_divrem(&r0, &r1, zero)?;
        let s = poly_sub(&s0, &poly_mul(&q, &s1, zero), zero);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    Ok((r0, s0))
}

/// `k' = k[x]/(f)` for a monic separable irreducible `f`.
#[derive(Debug, PartialEq, Eq)]
pub struct EtaleExtension {
    base: Arc<FieldTower>,
    name: String,
    modulus: Vec<FieldElement>,
    power_sums: Vec<FieldElement>,
    /// Coordinates of `dx` on `dlog(b_v)`, as polynomials in `x`.
    dx: Vec<Vec<FieldElement>>,
}

impl EtaleExtension {
    /// `modulus` lists the coefficients of `f`, constant term first.
    pub fn new(base: &Arc<FieldTower>, name: &str, modulus: Vec<FieldElement>) -> Result<Arc<Self>> {
        if base.p_basis().iter().any(|v| v == name) || base.field().generator_name() == name {
            return Err(Error::DuplicateVariable(name.into()));
        }
        let zero = FieldElement::zero(base);
        let mut f = Vec::with_capacity(modulus.len());
        for c in modulus {
            if **c.tower() != **base {
                return Err(Error::TowerMismatch);
            }
            f.push(c.at_level(base.height())?);
        }
        trim(&mut f);
        if f.len() < 2 {
            return Err(Error::Invalid("the minimal polynomial must have degree at least 1".into()));
        }
        let lead_inv = f.last().unwrap().inv(None)?;
        let f: Vec<FieldElement> = f.iter().map(|c| c * &lead_inv).collect();
        let n = f.len() - 1;
        let mut fp: Vec<FieldElement> =
            (1..=n).map(|i| &f[i] * &FieldElement::from_int(base, i as i64)).collect();
        trim(&mut fp);
        if fp.is_empty() {
            return Err(Error::NotSeparable);
        }
        certify_irreducible(base, &f)?;
        let (g, s) = poly_inverse_part(&fp, &f, &zero)?;
        if g.len() != 1 {
            return Err(Error::NotSeparable);
        }
        let g_inv = g[0].inv(None)?;
        let fp_inv: Vec<FieldElement> = s.iter().map(|c| c * &g_inv).collect();

        let mut power_sums = vec![FieldElement::from_int(base, n as i64)];
        for k in 1..(2 * n).max(2) {
            let mut acc = if k <= n { &f[n - k] * &FieldElement::from_int(base, k as i64) } else { zero.clone() };
            for i in 1..=n.min(k) {
                if i < k {
                    acc = &acc + &(&f[n - i] * &power_sums[k - i]);
                }
            }
            power_sums.push(-acc);
        }

        let mut ext = EtaleExtension { base: base.clone(), name: name.into(), modulus: f.clone(), power_sums, dx: Vec::new() };
        for v in 0..base.p_rank() {
            let bv = FieldElement::basis(base, v);
            let mut num: Vec<FieldElement> =
                f.iter().map(|c| -(&bv * &c.partial_derivative(v).expect("p-basis index"))).collect();
            trim(&mut num);
            let prod = poly_mul(&num, &fp_inv, &zero);
            ext.dx.push(ext.reduce(prod));
        }
        Ok(Arc::new(ext))
    }

    pub fn base(&self) -> &Arc<FieldTower> {
        &self.base
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    /// Monic modulus, constant term first.
    pub fn modulus(&self) -> &[FieldElement] {
        &self.modulus
    }

    fn zero_base(&self) -> FieldElement {
        FieldElement::zero(&self.base)
    }

    fn reduce(&self, mut a: Vec<FieldElement>) -> Vec<FieldElement> {
        let n = self.degree();
        trim(&mut a);
        while a.len() > n {
            let c = a.pop().unwrap();
            let shift = a.len() - n;
            for i in 0..n {
                a[shift + i] = &a[shift + i] - &(&c * &self.modulus[i]);
            }
            trim(&mut a);
        }
        a
    }

    pub fn element(self: &Arc<Self>, coeffs: Vec<FieldElement>) -> Result<EtaleElement> {
        let mut c = Vec::with_capacity(coeffs.len());
        for x in coeffs {
            if **x.tower() != *self.base {
                return Err(Error::TowerMismatch);
            }
            c.push(x.at_level(self.base.height())?);
        }
        Ok(EtaleElement { ext: self.clone(), coeffs: self.reduce(c) })
    }

    /// The image of `c in k`.
    pub fn lift(self: &Arc<Self>, c: &FieldElement) -> Result<EtaleElement> {
        self.element(vec![c.clone()])
    }

    /// The class of `x`.
    pub fn generator(self: &Arc<Self>) -> EtaleElement {
        let one = FieldElement::one(&self.base);
        self.element(vec![self.zero_base(), one]).expect("own tower")
    }

    /// `Tr_{k'/k}(x^i)`.
    pub fn power_sum(&self, i: usize) -> &FieldElement {
        &self.power_sums[i]
    }
}

/// Irreducibility over a finite base by trial division; over other bases by
/// specializing to an irreducible polynomial of the same degree over `F_q`.
fn certify_irreducible(base: &Arc<FieldTower>, f: &[FieldElement]) -> Result<()> {
    let field = base.field();
    let s = base.rational_vars().len();
    let q = field.order() as u64;
    let points = q.checked_pow(s as u32).filter(|&n| n <= 1 << 12).unwrap_or(1 << 12);
    for idx in 0..points {
        let mut point = Vec::with_capacity(s);
        let mut rest = idx;
        for _ in 0..s {
            point.push((rest % q) as u32);
            rest /= q;
        }
        let spec: Option<Vec<u32>> = f.iter().map(|c| c.specialize(&point)).collect();
        if let Some(spec) = spec {
            if field.poly_is_irreducible(&spec) {
                return Ok(());
            }
            if base.is_finite_base() && base.height() == 0 {
                break;
            }
        }
    }
    Err(Error::NotIrreducible)
}

/// An element `sum c_i x^i` of an étale extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaleElement {
    ext: Arc<EtaleExtension>,
    coeffs: Vec<FieldElement>,
}

impl EtaleElement {
    pub fn extension(&self) -> &Arc<EtaleExtension> {
        &self.ext
    }

    /// Coefficients on `1, x, ..., x^(n-1)` (trailing zeros omitted).
    pub fn coefficients(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn same(&self, o: &Self) -> Result<()> {
        if *self.ext != *o.ext {
            return Err(Error::TowerMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        self.same(o)?;
        let z = self.ext.zero_base();
        let n = self.coeffs.len().max(o.coeffs.len());
        let c = (0..n).map(|i| &self.coeffs.get(i).unwrap_or(&z).clone() + o.coeffs.get(i).unwrap_or(&z)).collect();
        Ok(EtaleElement { ext: self.ext.clone(), coeffs: self.ext.reduce(c) })
    }

    pub fn neg(&self) -> Self {
        EtaleElement { ext: self.ext.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self> {
        self.try_add(&o.neg())
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        self.same(o)?;
        let prod = poly_mul(&self.coeffs, &o.coeffs, &self.ext.zero_base());
        Ok(EtaleElement { ext: self.ext.clone(), coeffs: self.ext.reduce(prod) })
    }

    /// Multiplication by an element of the base.
    pub fn scale(&self, c: &FieldElement) -> Result<Self> {
        let coeffs = self.coeffs.iter().map(|x| x.try_mul(c)).collect::<Result<Vec<_>>>()?;
        Ok(EtaleElement { ext: self.ext.clone(), coeffs: self.ext.reduce(coeffs) })
    }

    pub fn pow(&self, mut n: u64) -> Self {
        let mut acc = self.ext.lift(&FieldElement::one(&self.ext.base)).expect("own tower");
        let mut b = self.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.try_mul(&b).expect("same extension");
            }
            n >>= 1;
            if n > 0 {
                b = b.try_mul(&b).expect("same extension");
            }
        }
        acc
    }

    pub fn frobenius(&self) -> Self {
        self.pow(self.ext.base.characteristic() as u64)
    }

    /// `Tr_{k'/k}`, from the power sums of the roots of `f`.
    pub fn trace(&self) -> FieldElement {
        self.coeffs
            .iter()
            .enumerate()
            .fold(self.ext.zero_base(), |acc, (i, c)| &acc + &(c * self.ext.power_sum(i)))
    }

    /// Coordinate on `dlog(b_v)` of `d(self)`.
    pub fn derivation(&self, v: usize) -> Self {
        let ext = &self.ext;
        let bv = FieldElement::basis(&ext.base, v);
        let direct: Vec<FieldElement> =
            self.coeffs.iter().map(|c| &bv * &c.partial_derivative(v).expect("p-basis index")).collect();
        let mut deriv: Vec<FieldElement> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * &FieldElement::from_int(&ext.base, i as i64))
            .collect();
        trim(&mut deriv);
        let chain = poly_mul(&deriv, &ext.dx[v], &ext.zero_base());
        let a = EtaleElement { ext: ext.clone(), coeffs: ext.reduce(direct) };
        let b = EtaleElement { ext: ext.clone(), coeffs: ext.reduce(chain) };
        a.try_add(&b).expect("same extension")
    }
}

impl fmt::Display for EtaleElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let one = FieldElement::one(&self.ext.base);
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => self.ext.name.clone(),
                _ => format!("{}^{}", self.ext.name, i),
            };
            let cs = c.to_string();
            parts.push(if mono.is_empty() {
                cs
            } else if *c == one {
                mono
            } else if needs_parens(&cs) {
                format!("({cs})*{mono}")
            } else {
                format!("{cs}*{mono}")
            });
        }
        f.write_str(&parts.join(" + "))
    }
}

/// A differential form over an étale extension, in the dlog basis of the
/// base p-basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaleForm {
    ext: Arc<EtaleExtension>,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, EtaleElement>,
}

impl EtaleForm {
    pub fn zero(ext: &Arc<EtaleExtension>, degree: usize) -> Self {
        EtaleForm { ext: ext.clone(), degree, coeffs: BTreeMap::new() }
    }

    pub fn term(c: &EtaleElement, indices: &[usize]) -> Result<Self> {
        let ext = c.extension();
        if let Some(&bad) = indices.iter().find(|&&i| i >= ext.base.p_rank()) {
            return Err(Error::NotInPBasis(format!("#{bad}")));
        }
        let mut idx = indices.to_vec();
        let mut out = Self::zero(ext, idx.len());
        if let Some(sign) = sort_with_sign(&mut idx) {
            out.insert(idx, &if sign < 0 { c.neg() } else { c.clone() });
        }
        Ok(out)
    }

    pub fn function(c: &EtaleElement) -> Self {
        Self::term(c, &[]).expect("empty index set")
    }

    fn insert(&mut self, subset: Vec<usize>, c: &EtaleElement) {
        let sum = match self.coeffs.remove(&subset) {
            Some(prev) => prev.try_add(c).expect("same extension"),
            None => c.clone(),
        };
        if !sum.is_zero() {
            self.coeffs.insert(subset, sum);
        }
    }

    pub fn extension(&self) -> &Arc<EtaleExtension> {
        &self.ext
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&Vec<usize>, &EtaleElement)> {
        self.coeffs.iter()
    }

    pub fn try_add(&self, o: &Self) -> Result<Self> {
        if *self.ext != *o.ext {
            return Err(Error::TowerMismatch);
        }
        if self.degree != o.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: o.degree });
        }
        let mut out = self.clone();
        for (s, c) in &o.coeffs {
            out.insert(s.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &EtaleElement) -> Result<Self> {
        let mut out = Self::zero(&self.ext, self.degree);
        for (s, x) in &self.coeffs {
            out.insert(s.clone(), &x.try_mul(c)?);
        }
        Ok(out)
    }

    pub fn wedge(&self, o: &Self) -> Result<Self> {
        if *self.ext != *o.ext {
            return Err(Error::TowerMismatch);
        }
        let mut out = Self::zero(&self.ext, self.degree + o.degree);
        for (s, a) in &self.coeffs {
            for (t, b) in &o.coeffs {
                let mut idx: Vec<usize> = s.iter().chain(t.iter()).copied().collect();
                if let Some(sign) = sort_with_sign(&mut idx) {
                    let c = a.try_mul(b)?;
                    out.insert(idx, &if sign < 0 { c.neg() } else { c });
                }
            }
        }
        Ok(out)
    }

    pub fn d(&self) -> Self {
        let mut out = Self::zero(&self.ext, self.degree + 1);
        for (s, c) in &self.coeffs {
            for v in 0..self.ext.base.p_rank() {
                let dv = c.derivation(v);
                if dv.is_zero() {
                    continue;
                }
                let mut idx = vec![v];
                idx.extend_from_slice(s);
                if let Some(sign) = sort_with_sign(&mut idx) {
                    out.insert(idx, &if sign < 0 { dv.neg() } else { dv });
                }
            }
        }
        out
    }

    /// Coefficientwise image of a form over the base.
    pub fn lift(ext: &Arc<EtaleExtension>, omega: &DifferentialForm) -> Result<Self> {
        if **omega.tower() != *ext.base {
            return Err(Error::TowerMismatch);
        }
        let mut out = Self::zero(ext, omega.degree());
        for (s, c) in omega.coefficients() {
            out.insert(s.clone(), &ext.lift(c)?);
        }
        Ok(out)
    }

    /// Coefficientwise field trace.
    pub fn trace(&self) -> DifferentialForm {
        let mut out = DifferentialForm::zero(&self.ext.base, self.degree);
        for (s, c) in &self.coeffs {
            let t = DifferentialForm::term(&c.trace(), s).expect("subset of the p-basis");
            out = out.try_add(&t).expect("same tower");
        }
        out
    }
}

impl fmt::Display for EtaleForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let names = self.ext.base.p_basis();
        let one = self.ext.lift(&FieldElement::one(&self.ext.base)).expect("own tower");
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(s, c)| {
                let basis: Vec<String> = s.iter().map(|&i| format!("dlog({})", names[i])).collect();
                let basis = basis.join(" ^ ");
                let cs = c.to_string();
                if s.is_empty() {
                    cs
                } else if *c == one {
                    basis
                } else if needs_parens(&cs) {
                    format!("({cs})*{basis}")
                } else {
                    format!("{cs}*{basis}")
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// `k' = k(a)` with `a^p = b` for a p-basis element `b` of `k`. The upper
/// field is the same tower with `b` renamed to `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicialExtension {
    base: Arc<FieldTower>,
    upper: Arc<FieldTower>,
    index: usize,
}

impl RadicialExtension {
    pub fn new(base: &Arc<FieldTower>, b: &str, a: &str) -> Result<Self> {
        let index = base.p_basis_index(b).ok_or_else(|| Error::NotInPBasis(b.into()))?;
        if base.field().generator_name() == a {
            return Err(Error::DuplicateVariable(a.into()));
        }
        let upper = base.rename_basis(index, a)?;
        Ok(RadicialExtension { base: base.clone(), upper, index })
    }

    pub fn base(&self) -> &Arc<FieldTower> {
        &self.base
    }

    pub fn upper(&self) -> &Arc<FieldTower> {
        &self.upper
    }

    /// Position of `b` in the base p-basis and of `a` in the upper one.
    pub fn index(&self) -> usize {
        self.index
    }

    /// `b -> a^p`.
    pub fn lift_element(&self, x: &FieldElement) -> Result<FieldElement> {
        if **x.tower() != *self.base {
            return Err(Error::TowerMismatch);
        }
        x.frobenius_in(self.index).transport(&self.upper)
    }

    /// `c = sum_j c_j a^j` with `c_j in k`, returned as `[c_0, ..., c_(p-1)]`.
    pub fn expand(&self, c: &FieldElement) -> Result<Vec<FieldElement>> {
        if **c.tower() != *self.upper {
            return Err(Error::TowerMismatch);
        }
        let parts = c.split_by_basis_residue(self.index)?;
        let parts = parts.iter().map(|x| x.transport(&self.base)).collect::<Result<Vec<_>>>()?;
        if c.is_exact() {
            let a = FieldElement::basis(&self.upper, self.index);
            let mut acc = FieldElement::zero(&self.upper);
            for (j, cj) in parts.iter().enumerate() {
                acc = &acc + &(&self.lift_element(cj)? * &a.pow(j as i64)?);
            }
            if acc != c.at_level(self.upper.height())? {
                return Err(Error::MalformedExpansion(format!("{c}")));
            }
        }
        Ok(parts)
    }

    /// `dlog(b) = p dlog(a) = 0`; other basis forms are kept.
    pub fn lift_form(&self, omega: &DifferentialForm) -> Result<DifferentialForm> {
        if **omega.tower() != *self.base {
            return Err(Error::TowerMismatch);
        }
        let mut out = DifferentialForm::zero(&self.upper, omega.degree());
        for (s, c) in omega.coefficients() {
            if !s.contains(&self.index) {
                out = out.try_add(&DifferentialForm::term(&self.lift_element(c)?, s)?)?;
            }
        }
        Ok(out)
    }

    /// `c dlog(a) ^ rest -> c_0 dlog(b) ^ rest`; forms without `dlog(a)` go to 0.
    pub fn trace_form(&self, omega: &DifferentialForm) -> Result<DifferentialForm> {
        if **omega.tower() != *self.upper {
            return Err(Error::TowerMismatch);
        }
        let mut out = DifferentialForm::zero(&self.base, omega.degree());
        for (s, c) in omega.coefficients() {
            if s.contains(&self.index) {
                let c0 = self.expand(c)?.swap_remove(0);
                out = out.try_add(&DifferentialForm::term(&c0, s)?)?;
            }
        }
        Ok(out)
    }
}

/// One of the two generating extension kinds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExtensionDescriptor {
    Etale(Arc<EtaleExtension>),
    Radicial(RadicialExtension),
}

/// A form over the upper field of an [`ExtensionDescriptor`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpperForm {
    Etale(EtaleForm),
    Radicial(DifferentialForm),
}

impl fmt::Display for UpperForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpperForm::Etale(w) => w.fmt(f),
            UpperForm::Radicial(w) => w.fmt(f),
        }
    }
}

impl ExtensionDescriptor {
    pub fn base(&self) -> &Arc<FieldTower> {
        match self {
            ExtensionDescriptor::Etale(e) => e.base(),
            ExtensionDescriptor::Radicial(r) => r.base(),
        }
    }

    /// `[k' : k]`.
    pub fn degree(&self) -> usize {
        match self {
            ExtensionDescriptor::Etale(e) => e.degree(),
            ExtensionDescriptor::Radicial(r) => r.base.characteristic() as usize,
        }
    }

    /// p-rank of the upper field (always that of the base).
    pub fn upper_p_rank(&self) -> usize {
        match self {
            ExtensionDescriptor::Etale(e) => e.base().p_rank(),
            ExtensionDescriptor::Radicial(r) => r.upper.p_rank(),
        }
    }

    pub fn lift_form(&self, omega: &DifferentialForm) -> Result<UpperForm> {
        Ok(match self {
            ExtensionDescriptor::Etale(e) => UpperForm::Etale(EtaleForm::lift(e, omega)?),
            ExtensionDescriptor::Radicial(r) => UpperForm::Radicial(r.lift_form(omega)?),
        })
    }

    pub fn trace_form(&self, omega: &UpperForm) -> Result<DifferentialForm> {
        match (self, omega) {
            (ExtensionDescriptor::Etale(e), UpperForm::Etale(w)) => {
                if **w.extension() != **e {
                    return Err(Error::TowerMismatch);
                }
                Ok(w.trace())
            }
            (ExtensionDescriptor::Radicial(r), UpperForm::Radicial(w)) => r.trace_form(w),
            _ => Err(Error::TowerMismatch),
        }
    }

    /// Class of the traced top form.
    pub fn trace_hp(&self, omega: &UpperForm) -> Result<HpRepresentative> {
        Ok(hp_class(&self.trace_form(omega)?)?.representative)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::BaseDescriptor;

    fn gf(q: u64) -> Arc<FieldTower> {
        let p = crate::gf::prime_power(q).unwrap().0;
        FieldTower::new(p, BaseDescriptor::FiniteField { order: q, modulus: None }, vec![], 8).unwrap()
    }

    fn frac2() -> Arc<FieldTower> {
        FieldTower::new(2, BaseDescriptor::RationalFunctions { order: 2, variables: vec!["b".into()] }, vec![], 8)
            .unwrap()
    }

    fn ints(t: &Arc<FieldTower>, c: &[i64]) -> Vec<FieldElement> {
        c.iter().map(|&n| FieldElement::from_int(t, n)).collect()
    }

    #[test]
    fn f4_over_f2_trace() {
        let k = gf(2);
        let ext = EtaleExtension::new(&k, "x", ints(&k, &[1, 1, 1])).unwrap();
        let x = ext.generator();
        assert_eq!(x.trace(), FieldElement::one(&k));
        let d = ExtensionDescriptor::Etale(ext.clone());
        let w = UpperForm::Etale(EtaleForm::function(&x));
        assert_eq!(d.trace_form(&w).unwrap(), DifferentialForm::function(&FieldElement::one(&k)));
    }

    #[test]
    fn etale_rejects_bad_polynomials() {
        let k = gf(2);
        assert_eq!(EtaleExtension::new(&k, "x", ints(&k, &[1, 0, 1])).unwrap_err(), Error::NotSeparable);
        assert_eq!(EtaleExtension::new(&k, "x", ints(&k, &[0, 1, 1])).unwrap_err(), Error::NotIrreducible);
        assert_eq!(EtaleExtension::new(&k, "w", ints(&k, &[1, 1, 1])).unwrap_err(), Error::DuplicateVariable("w".into()));
    }

    #[test]
    fn radicial_basics() {
        let k = frac2();
        let r = RadicialExtension::new(&k, "b", "a").unwrap();
        let d = ExtensionDescriptor::Radicial(r.clone());
        assert_eq!(d.upper_p_rank(), k.p_rank());
        let dlog_a = DifferentialForm::basis(r.upper(), &[0]).unwrap();
        assert_eq!(r.trace_form(&dlog_a).unwrap(), DifferentialForm::basis(&k, &[0]).unwrap());
        let dlog_b = DifferentialForm::basis(&k, &[0]).unwrap();
        assert!(r.lift_form(&dlog_b).unwrap().is_zero());
        let a = FieldElement::basis(r.upper(), 0);
        assert!(r.trace_form(&dlog_a.scale(&a).unwrap()).unwrap().is_zero());
        let b = FieldElement::basis(&k, 0);
        assert_eq!(r.lift_element(&b).unwrap(), &a * &a);
        assert_eq!(RadicialExtension::new(&k, "c", "a").unwrap_err(), Error::NotInPBasis("c".into()));
    }

    #[test]
    fn radicial_expansion_with_denominator() {
        let k = frac2();
        let r = RadicialExtension::new(&k, "b", "a").unwrap();
        let a = FieldElement::basis(r.upper(), 0);
        let one = FieldElement::one(r.upper());
        let c = (&a + &one).inv(None).unwrap();
        // 1/(a+1) = (a+1)/(b+1): c_0 = 1/(b+1), c_1 = 1/(b+1)
        let parts = r.expand(&c).unwrap();
        let b = FieldElement::basis(&k, 0);
        let expected = (&b + &FieldElement::one(&k)).inv(None).unwrap();
        assert_eq!(parts, vec![expected.clone(), expected]);
    }
}
