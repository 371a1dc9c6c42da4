//! The groups `H_p^1(k) = k / wp(k)` and `H_p^(r+1)(k) = Omega^r / (wp + d)`,
//! with the layer-by-layer decision procedure over Laurent towers.

use crate::error::{Error, Result};
use crate::forms::{check_precision, DifferentialForm, QuotientFormTop};
use crate::tower::{FieldElement, FieldTower};
use std::fmt;
use std::sync::Arc;

/// `x - x^p`.
pub fn artin_schreier(x: &FieldElement) -> FieldElement {
    x - &x.frobenius()
}

/// Class of `(lambda - lambda^p) dlog(b)` modulo exact forms.
pub fn wp_map(lambda: &FieldElement) -> Result<QuotientFormTop> {
    QuotientFormTop::new(&artin_schreier(lambda))
}

/// Outcome of the decision procedure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    /// The class, identified with `F_p` through the trace of the base field.
    Decided(u32),
    /// The base is a rational function field; only a reduced representative
    /// is available.
    Unavailable,
    /// The class is known to be nonzero but does not come from the base
    /// (only possible for `H_p^1` over a Laurent layer).
    NonzeroUndecided,
}

impl Decision {
    pub fn value(&self) -> Option<u32> {
        match self {
            Decision::Decided(v) => Some(*v),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HpDegree {
    /// `H_p^1`, classes of functions.
    Zero,
    /// `H_p^(r+1)`, classes of top forms.
    Top,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReductionRule {
    DropPositiveTail,
    DropNonzeroTheta,
    FoldPPower,
    KeepResidual,
    DescendLayer,
    TraceToPrimeField,
}

impl ReductionRule {
    pub fn name(&self) -> &'static str {
        match self {
            ReductionRule::DropPositiveTail => "drop-positive-tail",
            ReductionRule::DropNonzeroTheta => "drop-nonzero-theta",
            ReductionRule::FoldPPower => "fold-p-power",
            ReductionRule::KeepResidual => "keep-residual",
            ReductionRule::DescendLayer => "descend-layer",
            ReductionRule::TraceToPrimeField => "trace-to-prime-field",
        }
    }
}

/// One step of a reduction: on the working element of layer `level`,
/// subtract `removed` and add `added`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: ReductionRule,
    pub level: usize,
    pub removed: Option<FieldElement>,
    pub added: Option<FieldElement>,
}

impl fmt::Display for ReductionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.rule.name())?;
        match (&self.removed, &self.added) {
            (Some(r), Some(a)) => write!(f, ": {r} -> {a}"),
            (Some(r), None) => write!(f, ": {r}"),
            (None, Some(a)) => write!(f, ": {a}"),
            (None, None) => Ok(()),
        }
    }
}

/// A reduced class representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HpRepresentative {
    pub degree: HpDegree,
    /// Reduced coefficient, at the top layer of its tower.
    pub coefficient: FieldElement,
    pub decision: Decision,
}

impl HpRepresentative {
    pub fn tower(&self) -> &Arc<FieldTower> {
        self.coefficient.tower()
    }

    pub fn decided_value(&self) -> Option<u32> {
        self.decision.value()
    }

    /// The representative as a top form (`Top`) or a function (`Zero`).
    pub fn to_form(&self) -> DifferentialForm {
        match self.degree {
            HpDegree::Top => DifferentialForm::top(&self.coefficient),
            HpDegree::Zero => DifferentialForm::function(&self.coefficient),
        }
    }
}

impl fmt::Display for HpRepresentative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_form().format())
    }
}

/// A representative together with the steps that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub representative: HpRepresentative,
    pub log: Vec<ReductionStep>,
}

/// Class of a top form in `H_p^(r+1)`.
pub fn hp_class(omega: &DifferentialForm) -> Result<Reduction> {
    let lambda = omega.top_coefficient()?;
    reduce(&lambda, HpDegree::Top)
}

/// Class of `a` in `H_p^1 = k / wp(k)`.
pub fn hp1_class(a: &FieldElement) -> Result<Reduction> {
    reduce(a, HpDegree::Zero)
}

/// The class of `c ^ dlog(t)` over the next Laurent layer `upper`.
pub fn wedge_dlog_t(c: &HpRepresentative, upper: &Arc<FieldTower>) -> Result<HpRepresentative> {
    let lower = c.tower();
    if !lower.is_extended_by(upper) {
        return Err(Error::LayerMismatch);
    }
    if c.degree == HpDegree::Zero && lower.p_rank() != 0 {
        return Err(Error::DegreeMismatch { expected: lower.p_rank(), found: 0 });
    }
    Ok(HpRepresentative {
        degree: HpDegree::Top,
        coefficient: c.coefficient.into_extension(upper)?,
        decision: c.decision,
    })
}

fn monomial(tower: &Arc<FieldTower>, level: usize, e: i64, c: &FieldElement) -> FieldElement {
    FieldElement::laurent(tower, level, [(e, c.clone())], None).expect("coefficient one layer down")
}

fn reduce(x: &FieldElement, degree: HpDegree) -> Result<Reduction> {
    let tower = x.tower().clone();
    let p = tower.characteristic() as i64;
    let mut cur = x.at_level(tower.height())?;
    check_precision(&cur)?;
    let mut log = Vec::new();
    let mut residual = FieldElement::zero(&tower);
    let mut step = |rule, level, removed: Option<FieldElement>, added: Option<FieldElement>| {
        log.push(ReductionStep { rule, level, removed, added });
    };
    let discard_rule = match degree {
        HpDegree::Top => ReductionRule::DropNonzeroTheta,
        HpDegree::Zero => ReductionRule::KeepResidual,
    };

    while cur.level() > 0 {
        let level = cur.level();
        let tail: Vec<_> = cur.terms().into_iter().filter(|(e, _)| *e > 0).collect();
        if !tail.is_empty() || cur.precision().is_some() {
            let kept = FieldElement::laurent(
                &tower,
                level,
                cur.terms().into_iter().filter(|(e, _)| *e <= 0),
                None,
            )?;
            let removed = FieldElement::laurent(&tower, level, tail, cur.precision())?;
            step(ReductionRule::DropPositiveTail, level, Some(removed), None);
            cur = kept;
        }
        while let Some((e, a)) = cur.terms().into_iter().next().filter(|(e, _)| *e < 0) {
            let n = -e;
            cur = cur.without_term(e);
            if n % p != 0 {
                let term = monomial(&tower, level, e, &a);
                if degree == HpDegree::Zero {
                    residual = &residual + &term;
                }
                step(discard_rule, level, Some(term), None);
                continue;
            }
            let a0p = a.zero_theta_part();
            let rest = &a - &a0p;
            if !rest.has_no_terms() {
                let term = monomial(&tower, level, e, &rest);
                if degree == HpDegree::Zero {
                    residual = &residual + &term;
                }
                step(discard_rule, level, Some(term), None);
            }
            if !a0p.has_no_terms() {
                let a0 = a
                    .p_component_decompose()
                    .zero_component()
                    .cloned()
                    .ok_or_else(|| Error::Invalid("missing theta = 0 component".into()))?;
                let s = n / p;
                assert!(s < n, "fold must strictly lower the pole order");
                let added = monomial(&tower, level, -s, &a0);
                cur = &cur + &added;
                step(ReductionRule::FoldPPower, level, Some(monomial(&tower, level, e, &a0p)), Some(added));
            }
        }
        let c = cur.coefficient(0);
        check_precision(&c)?;
        step(ReductionRule::DescendLayer, level, None, None);
        cur = c;
    }

    let (coefficient, decision) = if tower.is_finite_base() {
        let c = cur.as_constant().expect("finite base element");
        let v = tower.field().trace_to(c, tower.characteristic() as u64)?;
        let v_el = FieldElement::constant(&tower, v);
        step(ReductionRule::TraceToPrimeField, 0, Some(cur.clone()), Some(v_el.clone()));
        let residual_zero = residual.has_no_terms();
        let coefficient = &cur.at_level(tower.height())? + &residual;
        (coefficient, if residual_zero { Decision::Decided(v) } else { Decision::NonzeroUndecided })
    } else {
        let reduced = match degree {
            HpDegree::Top => {
                let r = cur.zero_theta_part();
                if r != cur {
                    step(ReductionRule::DropNonzeroTheta, 0, Some(&cur - &r), None);
                }
                r
            }
            HpDegree::Zero => cur.clone(),
        };
        let residual_zero = residual.has_no_terms();
        let coefficient = &reduced.at_level(tower.height())? + &residual;
        (coefficient, if residual_zero { Decision::Unavailable } else { Decision::NonzeroUndecided })
    };
    Ok(Reduction { representative: HpRepresentative { degree, coefficient, decision }, log })
}

/// Re-executes a reduction log on its input, returning the representative
/// coefficient and the decided value it reaches.
pub fn replay(input: &FieldElement, log: &[ReductionStep]) -> Result<(FieldElement, Option<u32>)> {
    let tower = input.tower().clone();
    let mut cur = input.at_level(tower.height())?;
    let mut residual = FieldElement::zero(&tower);
    let mut value = None;
    for s in log {
        if s.level != cur.level() {
            return Err(Error::Invalid(format!("step on layer {} while working on layer {}", s.level, cur.level())));
        }
        if let Some(r) = &s.removed {
            if s.rule != ReductionRule::TraceToPrimeField {
                cur = cur.try_sub(r)?;
            }
        }
        if let Some(a) = &s.added {
            if s.rule != ReductionRule::TraceToPrimeField {
                cur = cur.try_add(a)?;
            }
        }
        match s.rule {
            ReductionRule::DropPositiveTail => cur = cur.without_precision(),
            ReductionRule::KeepResidual => {
                residual = residual.try_add(s.removed.as_ref().expect("residual term"))?;
            }
            ReductionRule::DescendLayer => {
                if cur.terms().iter().any(|(e, c)| *e != 0 && !c.has_no_terms()) {
                    return Err(Error::Invalid("descending with unreduced terms left".into()));
                }
                cur = cur.coefficient(0);
            }
            ReductionRule::TraceToPrimeField => {
                let c = cur.as_constant().ok_or_else(|| Error::Invalid("trace of a non-constant".into()))?;
                value = Some(tower.field().trace_to(c, tower.characteristic() as u64)?);
            }
            ReductionRule::DropNonzeroTheta | ReductionRule::FoldPPower => {}
        }
    }
    let rep = cur.at_level(tower.height())?.try_add(&residual)?;
    Ok((rep, value.filter(|_| residual.has_no_terms())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tower::BaseDescriptor;

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

    fn frac2() -> Arc<FieldTower> {
        FieldTower::new(2, BaseDescriptor::RationalFunctions { order: 2, variables: vec!["b".into()] }, vec![], 8)
            .unwrap()
    }

    #[test]
    fn simple_pole_prime_to_p() {
        let t = gf(4, &["t"], 8);
        let tv = FieldElement::variable(&t, "t").unwrap();
        let r = hp_class(&DifferentialForm::top(&tv.inv(None).unwrap())).unwrap();
        assert_eq!(r.representative.decision, Decision::Decided(0));
    }

    #[test]
    fn fold_then_trace() {
        let t = gf(4, &["t"], 8);
        let w = FieldElement::generator(&t);
        let tv = FieldElement::variable(&t, "t").unwrap();
        let lambda = &w + &tv.pow(-2).unwrap();
        let r = hp_class(&DifferentialForm::top(&lambda)).unwrap();
        assert_eq!(r.representative.decision, Decision::Decided(1));
        assert_eq!(r.representative.to_string(), "w*dlog(t)");
        let rules: Vec<_> = r.log.iter().map(|s| s.rule.name()).collect();
        assert_eq!(rules, ["fold-p-power", "drop-nonzero-theta", "descend-layer", "trace-to-prime-field"]);
        let (rep, v) = replay(&lambda, &r.log).unwrap();
        assert_eq!(rep, r.representative.coefficient);
        assert_eq!(v, Some(1));
    }

    #[test]
    fn hp1_over_f4() {
        let t = gf(4, &[], 8);
        let w = FieldElement::generator(&t);
        assert_eq!(hp1_class(&w).unwrap().representative.decision, Decision::Decided(1));
        assert_eq!(hp1_class(&FieldElement::one(&t)).unwrap().representative.decision, Decision::Decided(0));
        assert_eq!(artin_schreier(&w), FieldElement::one(&t));
    }

    #[test]
    fn hp1_keeps_prime_to_p_poles() {
        let t = gf(2, &["t"], 8);
        let tv = FieldElement::variable(&t, "t").unwrap();
        let x = &tv.pow(-3).unwrap() + &tv.pow(-4).unwrap();
        let r = hp1_class(&x).unwrap();
        assert_eq!(r.representative.decision, Decision::NonzeroUndecided);
        // t^-4 folds to t^-2, then t^-1; t^-3 and t^-1 stay
        assert_eq!(r.representative.coefficient, &tv.pow(-3).unwrap() + &tv.pow(-1).unwrap());
        let (rep, v) = replay(&x, &r.log).unwrap();
        assert_eq!(rep, r.representative.coefficient);
        assert_eq!(v, None);
    }

    #[test]
    fn rational_base_is_unavailable() {
        let t = frac2();
        let b = FieldElement::variable(&t, "b").unwrap();
        let r = hp_class(&DifferentialForm::top(&(&b + &(&b * &b)))).unwrap();
        assert_eq!(r.representative.decision, Decision::Unavailable);
        assert_eq!(r.representative.coefficient, &b * &b);
        assert_eq!(wp_map(&b).unwrap().coefficient(), &(&b * &b));
    }

    #[test]
    fn wedge_dlog_t_roundtrip_two_layers() {
        let base = gf(4, &[], 8);
        let t1 = base.extend("t1").unwrap();
        let t2 = t1.extend("t2").unwrap();
        let w = FieldElement::generator(&base);
        let c = hp1_class(&w).unwrap().representative;
        let up = wedge_dlog_t(&wedge_dlog_t(&c, &t1).unwrap(), &t2).unwrap();
        assert_eq!(hp_class(&up.to_form()).unwrap().representative.decision, Decision::Decided(1));
        assert_eq!(wedge_dlog_t(&c, &t2), Err(Error::LayerMismatch));
    }

    #[test]
    fn insufficient_precision() {
        let t = gf(4, &["t"], 8);
        let tv = FieldElement::variable(&t, "t").unwrap();
        let x = tv.pow(-1).unwrap().truncate(0);
        assert!(matches!(hp_class(&DifferentialForm::top(&x)), Err(Error::InsufficientPrecision(_))));
    }
}
