//! Absolute differential forms in the dlog basis of a tower's p-basis.

use crate::error::{Error, Result};
use crate::tower::{needs_parens, FieldElement, FieldTower};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// `sum_S c_S dlog(b_S)` where `S` runs over sorted index sets of the
/// p-basis and `dlog(b_S)` is the wedge of the `dlog(b_i)`, `i in S`, in
/// increasing order. Coefficients are stored at the top layer of the tower.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferentialForm {
    tower: Arc<FieldTower>,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, FieldElement>,
}

/// Sorts `idx` in place and returns the permutation sign, or `None` when an
/// index repeats.
pub fn sort_with_sign(idx: &mut [usize]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

impl DifferentialForm {
    pub fn zero(tower: &Arc<FieldTower>, degree: usize) -> Self {
        DifferentialForm { tower: tower.clone(), degree, coeffs: BTreeMap::new() }
    }

    /// A degree-0 form.
    pub fn function(x: &FieldElement) -> Self {
        let mut f = Self::zero(x.tower(), 0);
        f.insert(Vec::new(), x);
        f
    }

    /// `c * dlog(b_{i_1}) ^ ... ^ dlog(b_{i_k})` for indices in any order.
    pub fn term(c: &FieldElement, indices: &[usize]) -> Result<Self> {
        let tower = c.tower();
        if let Some(&bad) = indices.iter().find(|&&i| i >= tower.p_rank()) {
            return Err(Error::NotInPBasis(format!("#{bad}")));
        }
        let mut idx = indices.to_vec();
        let mut f = Self::zero(tower, idx.len());
        if let Some(sign) = sort_with_sign(&mut idx) {
            let c = if sign < 0 { -c } else { c.clone() };
            f.insert(idx, &c);
        }
        Ok(f)
    }

    /// `dlog(b_i)` for p-basis element `index`.
    pub fn basis(tower: &Arc<FieldTower>, indices: &[usize]) -> Result<Self> {
        Self::term(&FieldElement::one(tower), indices)
    }

    /// `c * dlog(b_1) ^ ... ^ dlog(b_r)`.
    pub fn top(c: &FieldElement) -> Self {
        let r = c.tower().p_rank();
        Self::term(c, &(0..r).collect::<Vec<_>>()).expect("full index set")
    }

    fn insert(&mut self, subset: Vec<usize>, c: &FieldElement) {
        let c = c.at_level(self.tower.height()).expect("coefficient from this tower");
        let sum = match self.coeffs.remove(&subset) {
            Some(prev) => &prev + &c,
            None => c,
        };
        if !sum.is_zero() {
            self.coeffs.insert(subset, sum);
        }
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&Vec<usize>, &FieldElement)> {
        self.coeffs.iter()
    }

    pub fn coefficient(&self, subset: &[usize]) -> FieldElement {
        self.coeffs.get(subset).cloned().unwrap_or_else(|| FieldElement::zero(&self.tower))
    }

    /// Coefficient of `dlog(b_1) ^ ... ^ dlog(b_r)`.
    pub fn top_coefficient(&self) -> Result<FieldElement> {
        let r = self.tower.p_rank();
        if self.degree != r {
            return Err(Error::DegreeMismatch { expected: r, found: self.degree });
        }
        Ok(self.coefficient(&(0..r).collect::<Vec<_>>()))
    }

    fn check(&self, other: &Self) -> Result<()> {
        if *self.tower != *other.tower {
            return Err(Error::TowerMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::DegreeMismatch { expected: self.degree, found: other.degree });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (s, c) in &other.coeffs {
            out.insert(s.clone(), c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> Self {
        DifferentialForm {
            tower: self.tower.clone(),
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(s, c)| (s.clone(), -c)).collect(),
        }
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&other.neg())
    }

    /// `x * self`.
    pub fn scale(&self, x: &FieldElement) -> Result<Self> {
        let mut out = Self::zero(&self.tower, self.degree);
        for (s, c) in &self.coeffs {
            out.insert(s.clone(), &c.try_mul(x)?);
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if *self.tower != *other.tower {
            return Err(Error::TowerMismatch);
        }
        let mut out = Self::zero(&self.tower, self.degree + other.degree);
        for (s, a) in &self.coeffs {
            for (t, b) in &other.coeffs {
                let mut idx: Vec<usize> = s.iter().chain(t.iter()).copied().collect();
                if let Some(sign) = sort_with_sign(&mut idx) {
                    let c = a * b;
                    out.insert(idx, &if sign < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// `dx` of a function, in dlog coordinates: `sum_v v * dx/dv * dlog(v)`.
    pub fn d_function(x: &FieldElement) -> Self {
        let tower = x.tower();
        let mut out = Self::zero(tower, 1);
        for v in 0..tower.p_rank() {
            let dv = x.partial_derivative(v).expect("index in p-basis");
            if !dv.is_zero() {
                out.insert(vec![v], &(&FieldElement::basis(tower, v) * &dv));
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> Self {
        let mut out = Self::zero(&self.tower, self.degree + 1);
        for (s, c) in &self.coeffs {
            let dc = Self::d_function(c);
            let rest = Self::basis(&self.tower, s).expect("subset of the p-basis");
            for (v, coef) in dc.wedge(&rest).expect("same tower").coeffs {
                out.insert(v, &coef);
            }
        }
        out
    }

    /// `dlog(x) = dx / x`.
    pub fn dlog(x: &FieldElement) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let inv = x.inv(None)?;
        Self::d_function(x).scale(&inv)
    }

    /// `sum x * dlog(y_1) ^ ... ^ dlog(y_i)` in p-basis coordinates.
    pub fn express_in_basis(
        tower: &Arc<FieldTower>,
        terms: &[(FieldElement, Vec<FieldElement>)],
    ) -> Result<Self> {
        let mut acc: Option<Self> = None;
        for (x, ys) in terms {
            let mut f = Self::function(x);
            if *f.tower != **tower {
                return Err(Error::TowerMismatch);
            }
            for y in ys {
                f = f.wedge(&Self::dlog(y)?)?;
            }
            acc = Some(match acc {
                Some(a) => a.try_add(&f)?,
                None => f,
            });
        }
        Ok(acc.unwrap_or_else(|| Self::zero(tower, 0)))
    }

    /// Class in `Omega^r / d Omega^(r-1)`: the `theta = 0` part of the top
    /// coefficient.
    pub fn reduce_mod_exact(&self) -> Result<QuotientFormTop> {
        let lambda = self.top_coefficient()?;
        check_precision(&lambda)?;
        Ok(QuotientFormTop { lambda: lambda.zero_theta_part() })
    }

    /// Class of `lambda^p dlog(b)` for `self = lambda dlog(b)`.
    pub fn cartier_inverse_top(&self) -> Result<QuotientFormTop> {
        let lambda = self.top_coefficient()?;
        Ok(QuotientFormTop { lambda: lambda.frobenius() })
    }

    pub fn format(&self) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        let names = self.tower.p_basis();
        let mut parts = Vec::new();
        for (s, c) in &self.coeffs {
            let basis: Vec<String> = s.iter().map(|&i| format!("dlog({})", names[i])).collect();
            let basis = basis.join(" ^ ");
            let cs = c.to_string();
            parts.push(if s.is_empty() {
                if needs_parens(&cs) && self.coeffs.len() > 1 {
                    format!("({cs})")
                } else {
                    cs
                }
            } else if c == &FieldElement::one(&self.tower) {
                basis
            } else if needs_parens(&cs) {
                format!("({cs})*{basis}")
            } else {
                format!("{cs}*{basis}")
            });
        }
        parts.join(" + ")
    }
}

impl fmt::Display for DifferentialForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.format())
    }
}

/// Every Laurent layer of `x` must be known to precision at least 1.
pub(crate) fn check_precision(x: &FieldElement) -> Result<()> {
    if let Some(n) = x.precision() {
        if n < 1 {
            return Err(Error::InsufficientPrecision(format!("coefficient only known modulo O(t^{n})")));
        }
    }
    for (_, c) in x.terms() {
        if c.level() > 0 {
            check_precision(&c)?;
        }
    }
    Ok(())
}

/// A class `lambda dlog(b_1) ^ ... ^ dlog(b_r)` modulo exact forms, stored by
/// its reduced coefficient (pure `theta = 0`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientFormTop {
    lambda: FieldElement,
}

impl QuotientFormTop {
    /// Reduces an arbitrary coefficient.
    pub fn new(lambda: &FieldElement) -> Result<Self> {
        DifferentialForm::top(lambda).reduce_mod_exact()
    }

    pub fn coefficient(&self) -> &FieldElement {
        &self.lambda
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        self.lambda.tower()
    }

    pub fn is_zero(&self) -> bool {
        self.lambda.is_zero()
    }

    pub fn to_form(&self) -> DifferentialForm {
        DifferentialForm::top(&self.lambda)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        Ok(QuotientFormTop { lambda: self.lambda.try_add(&other.lambda)? })
    }
}

impl fmt::Display for QuotientFormTop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_form().format())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::BaseDescriptor;

    fn frac(p: u64, vars: &[&str], laurent: &[&str], prec: i64) -> Arc<FieldTower> {
        FieldTower::new(
            p,
            BaseDescriptor::RationalFunctions { order: p, variables: vars.iter().map(|s| s.to_string()).collect() },
            laurent.iter().map(|s| s.to_string()).collect(),
            prec,
        )
        .unwrap()
    }

    fn gf(q: u64, laurent: &[&str], prec: i64) -> Arc<FieldTower> {
        let p = crate::gf::prime_power(q).unwrap().0;
        FieldTower::new(
            p,
            BaseDescriptor::FiniteField { order: q, modulus: None },
            laurent.iter().map(|s| s.to_string()).collect(),
            prec,
        )
        .unwrap()
    }

    fn var(t: &Arc<FieldTower>, name: &str) -> FieldElement {
        FieldElement::variable(t, name).unwrap()
    }

    #[test]
    fn wedge_signs() {
        let t = frac(3, &["b1", "b2"], &[], 8);
        let d1 = DifferentialForm::basis(&t, &[0]).unwrap();
        let d2 = DifferentialForm::basis(&t, &[1]).unwrap();
        let c = var(&t, "b1");
        let w = d1.scale(&c).unwrap().wedge(&d2).unwrap();
        assert_eq!(w, DifferentialForm::term(&c, &[0, 1]).unwrap());
        let neg = d2.wedge(&d1).unwrap();
        assert_eq!(neg, DifferentialForm::basis(&t, &[0, 1]).unwrap().neg());
        assert!(d1.wedge(&d1).unwrap().is_zero());
    }

    #[test]
    fn dlog_of_basis_and_powers() {
        let t = frac(2, &["b"], &[], 8);
        let b = var(&t, "b");
        assert_eq!(DifferentialForm::dlog(&b).unwrap(), DifferentialForm::basis(&t, &[0]).unwrap());
        assert!(DifferentialForm::dlog(&(&b * &b)).unwrap().is_zero());
        assert_eq!(DifferentialForm::dlog(&FieldElement::zero(&t)), Err(Error::DivisionByZero));
    }

    #[test]
    fn dlog_b_squared_plus_b() {
        let t = frac(2, &["b"], &[], 8);
        let b = var(&t, "b");
        let one = FieldElement::one(&t);
        let x = &(&b * &b) + &b;
        let got = DifferentialForm::dlog(&x).unwrap();
        // b * (1/b + 1/(b+1)) = 1 + b/(b+1)
        let expected = &one + &(&b * &(&b + &one).inv(None).unwrap());
        assert_eq!(got.coefficient(&[0]), expected);
    }

    #[test]
    fn express_examples() {
        let t = frac(3, &["b1", "b2"], &[], 8);
        let (b1, b2) = (var(&t, "b1"), var(&t, "b2"));
        let one = FieldElement::one(&t);
        let f = DifferentialForm::express_in_basis(&t, &[(one.clone(), vec![b1.clone(), b2.clone()])]).unwrap();
        assert_eq!(f, DifferentialForm::basis(&t, &[0, 1]).unwrap());
        let x = &b1 + &one;
        let y = &(&b1 * &b1) * &b2;
        let f = DifferentialForm::express_in_basis(&t, &[(x.clone(), vec![y])]).unwrap();
        let expected = DifferentialForm::term(&(&x * &FieldElement::from_int(&t, 2)), &[0])
            .unwrap()
            .try_add(&DifferentialForm::term(&x, &[1]).unwrap())
            .unwrap();
        assert_eq!(f, expected);
    }

    #[test]
    fn express_dlog_one_plus_t() {
        let t = gf(2, &["t"], 4);
        let one = FieldElement::one(&t);
        let tv = var(&t, "t");
        let f = DifferentialForm::express_in_basis(&t, &[(one.clone(), vec![&one + &tv])]).unwrap();
        let c = f.coefficient(&[0]);
        assert_eq!(c.to_string(), "t + t^2 + t^3 + t^4 + O(t^5)");
        assert_eq!(c.truncate(4).to_string(), "t + t^2 + t^3 + O(t^4)");
    }

    #[test]
    fn reduce_examples() {
        let t = frac(2, &["b"], &[], 8);
        let b = var(&t, "b");
        let x = &b.pow(3).unwrap() + &b;
        assert!(DifferentialForm::top(&x).reduce_mod_exact().unwrap().is_zero());
        let sq = (&b + &FieldElement::one(&t)).frobenius();
        let q = DifferentialForm::top(&sq).reduce_mod_exact().unwrap();
        assert_eq!(q.coefficient(), &sq);
        let c = DifferentialForm::top(&b).cartier_inverse_top().unwrap();
        assert_eq!(c.coefficient(), &(&b * &b));
        let one = DifferentialForm::basis(&t, &[0]).unwrap();
        assert_eq!(one.cartier_inverse_top().unwrap().coefficient(), &FieldElement::one(&t));
        assert_eq!(
            DifferentialForm::function(&b).reduce_mod_exact(),
            Err(Error::DegreeMismatch { expected: 1, found: 0 })
        );
    }

    #[test]
    fn d_of_theta_basis_forms() {
        // d(b^theta dlog b_{S \ i}) = (-1)^(i+1) theta(i) b^theta dlog(b), 1-based i
        let t = frac(3, &["b1", "b2"], &["t"], 8);
        let theta = [2u32, 1, 2];
        let mono = (0..3).fold(FieldElement::one(&t), |acc, i| &acc * &FieldElement::basis(&t, i).pow(theta[i] as i64).unwrap());
        for i in 0..3 {
            let rest: Vec<usize> = (0..3).filter(|&j| j != i).collect();
            let omega = DifferentialForm::term(&mono, &rest).unwrap();
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let expected = &mono * &FieldElement::from_int(&t, sign * theta[i] as i64);
            assert_eq!(omega.d().top_coefficient().unwrap(), expected);
        }
    }

    #[test]
    fn display() {
        let t = gf(4, &["t1", "t2"], 8);
        let w = FieldElement::generator(&t);
        let f = DifferentialForm::term(&(&w + &FieldElement::one(&t)), &[0, 1]).unwrap();
        assert_eq!(f.to_string(), "(w + 1)*dlog(t1) ^ dlog(t2)");
        assert_eq!(DifferentialForm::basis(&t, &[1]).unwrap().to_string(), "dlog(t2)");
    }
}
