//! Randomized property suites, shared by the `check` command and the tests.
//!
//! Every suite returns a [`SuiteReport`] with one line per named check.
//! Oracles are computed independently of the code under test where one
//! exists (brute-force image sets, explicit primitives, constant terms).

use crate::error::{Error, Result};
use crate::forms::{DifferentialForm, QuotientFormTop};
use crate::gf::GaloisField;
use crate::hp::{artin_schreier, hp1_class, hp_class, wedge_dlog_t, Decision, HpRepresentative};
use crate::random::{random_regular, random_series, subsets, Sampler};
use crate::series::{SeriesRing, TruncatedSeries};
use crate::tower::{field_trace_finite, BaseDescriptor, FieldElement, FieldTower};
use crate::trace::{EtaleExtension, EtaleForm, ExtensionDescriptor, RadicialExtension};
use crate::weierstrass::{
    artin_schreier_solve, evaluate_polynomial, hensel_lift, regularity_order, unit_group_congruence_check,
    weierstrass_divide, weierstrass_divide_with, weierstrass_prepare, wp_series, DivisionSchedule,
};
use rand::Rng;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;
use std::time::{Duration, Instant};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.trials > 0
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: String,
    pub checks: Vec<CheckResult>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed())
    }

    pub fn trials(&self) -> usize {
        self.checks.iter().map(|c| c.trials).sum()
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().map(|c| c.failures).sum()
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed() { "ok" } else { "FAILED" };
            write!(f, "{}: {} {}/{} passed", status, c.name, c.trials - c.failures, c.trials)?;
            if let Some(d) = &c.first_failure {
                write!(f, " (first failure: {d})")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Outcome of one trial: `None` passes, `Some(detail)` fails.
type Trial = Result<Option<String>>;

fn ensure(cond: bool, detail: impl FnOnce() -> String) -> Trial {
    Ok(if cond { None } else { Some(detail()) })
}

struct Recorder {
    checks: Vec<CheckResult>,
    start: Instant,
}

impl Recorder {
    fn new() -> Self {
        Recorder { checks: Vec::new(), start: Instant::now() }
    }

    fn run(&mut self, name: &str, trial: impl FnOnce() -> Trial) {
        let outcome = match trial() {
            Ok(None) => None,
            Ok(Some(d)) => Some(d),
            Err(e) => Some(format!("error: {e}")),
        };
        let pos = match self.checks.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.checks.push(CheckResult { name: name.into(), trials: 0, failures: 0, first_failure: None });
                self.checks.len() - 1
            }
        };
        let c = &mut self.checks[pos];
        c.trials += 1;
        if let Some(d) = outcome {
            c.failures += 1;
            c.first_failure.get_or_insert(d);
        }
    }

    fn finish(self, suite: &str) -> SuiteReport {
        SuiteReport { suite: suite.into(), checks: self.checks, elapsed: self.start.elapsed() }
    }
}

/// Names accepted by [`run_named`].
pub const SUITE_NAMES: &[&str] = &[
    "lemma-2-2-4",
    "exact-top-forms",
    "hp-roundtrip",
    "hp1-exhaustive",
    "trace-axioms",
    "t-power",
    "weierstrass",
    "solvers",
];

/// Dispatches a suite by name. `tower` is required by the suites that run
/// over a given field.
pub fn run_named<R: Rng + ?Sized>(
    name: &str,
    tower: Option<&Arc<FieldTower>>,
    trials: usize,
    rng: &mut R,
) -> Result<SuiteReport> {
    let need = || tower.ok_or_else(|| Error::Invalid(format!("suite `{name}` needs a tower")));
    match name {
        "lemma-2-2-4" | "exact-top-forms" => exact_top_forms(need()?, trials, rng),
        "hp-roundtrip" => hp_roundtrip(need()?, trials, rng),
        "hp1-exhaustive" => hp1_exhaustive(need()?),
        "trace-axioms" => trace_axioms(trials, rng),
        "t-power" => t_power_identity(need()?, trials, rng),
        "weierstrass" => weierstrass_suite(trials, rng),
        "solvers" => solver_suite(trials, rng),
        _ => Err(Error::Invalid(format!("unknown suite `{name}`; expected one of {}", SUITE_NAMES.join(", ")))),
    }
}

fn top_indices(tower: &FieldTower) -> Vec<usize> {
    (0..tower.p_rank()).collect()
}

/// `sum_{theta != 0} (-1)^j (c_theta^p b^theta / theta_j) dlog b_{S - j}`,
/// `j` the first nonzero digit of `theta`: a primitive of the `theta != 0`
/// part of `lambda dlog b_S`.
pub fn exact_primitive(lambda: &FieldElement) -> Result<DifferentialForm> {
    let tower = lambda.tower().clone();
    let r = tower.p_rank();
    let field = tower.field().clone();
    let dec = lambda.p_component_decompose();
    let mut eta = DifferentialForm::zero(&tower, r.saturating_sub(1));
    for (theta, c) in &dec.components {
        let Some(j) = theta.iter().position(|&d| d != 0) else { continue };
        let mut g = c.frobenius();
        for (i, &d) in theta.iter().enumerate() {
            g = g.try_mul(&FieldElement::basis(&tower, i).pow(d as i64)?)?;
        }
        let inv = field.inv(field.from_int(theta[j] as i64))?;
        let mut coef = g.try_mul(&FieldElement::constant(&tower, inv))?;
        if j % 2 == 1 {
            coef = -&coef;
        }
        let rest: Vec<usize> = (0..r).filter(|&i| i != j).collect();
        eta = eta.try_add(&DifferentialForm::term(&coef, &rest)?)?;
    }
    Ok(eta)
}

/// Reduction of top forms modulo exact forms, over a tower of positive
/// p-rank.
pub fn exact_top_forms<R: Rng + ?Sized>(tower: &Arc<FieldTower>, trials: usize, rng: &mut R) -> Result<SuiteReport> {
    let r = tower.p_rank();
    if r == 0 {
        return Err(Error::Invalid("exact-top-forms needs a tower of positive p-rank".into()));
    }
    let sampler = Sampler::default();
    let mut rec = Recorder::new();
    for _ in 0..trials {
        rec.run("exact-forms-reduce-to-zero", || {
            let eta = sampler.form(tower, r - 1, rng)?;
            let class = eta.d().reduce_mod_exact()?;
            ensure(class.is_zero(), || format!("d({eta}) reduces to {class}"))
        });
        rec.run("representative-is-theta-zero-part", || {
            let lambda = sampler.top_element(tower, rng)?;
            let rep = DifferentialForm::top(&lambda).reduce_mod_exact()?;
            let dec = lambda.p_component_decompose();
            let oracle = match dec.zero_component() {
                Some(c0) => c0.frobenius().at_level(tower.height())?,
                None => FieldElement::zero(tower),
            };
            if *rep.coefficient() != oracle {
                return ensure(false, || format!("lambda = {lambda}: {} != {oracle}", rep.coefficient()));
            }
            // The discarded part has an explicit primitive.
            let eta = exact_primitive(&lambda)?;
            let diff = lambda.try_sub(&oracle)?;
            let top = eta.d().top_coefficient()?;
            ensure(top == diff, || format!("lambda = {lambda}: d(primitive) = {top}, expected {diff}"))
        });
    }
    Ok(rec.finish("exact-top-forms"))
}

/// `Tr_{F_q/F_p}` of the coefficient of `t_1^0 ... t_h^0`: the class of
/// `lambda dlog(t_1) ^ ... ^ dlog(t_h)` over a finite base, computed
/// without the reduction machinery.
pub fn constant_term_trace(lambda: &FieldElement) -> Result<u32> {
    let mut x = lambda.clone();
    while x.level() > 0 {
        x = x.coefficient(0);
    }
    let c = x.as_constant().ok_or_else(|| Error::Invalid("base is not a finite field".into()))?;
    Ok(lambda.tower().field().absolute_trace(c))
}

fn decided(rep: &HpRepresentative) -> Result<u32> {
    rep.decided_value().ok_or_else(|| Error::Invalid(format!("class of {rep} is not decided")))
}

/// Classes over a Laurent tower with finite base: compatibility with
/// `^ dlog(t)`, additivity, vanishing on wp-images, and the values reached.
pub fn hp_roundtrip<R: Rng + ?Sized>(tower: &Arc<FieldTower>, trials: usize, rng: &mut R) -> Result<SuiteReport> {
    let h = tower.height();
    if h == 0 || !tower.is_finite_base() {
        return Err(Error::Invalid("hp-roundtrip needs a Laurent tower over a finite field".into()));
    }
    let p = tower.characteristic();
    let lower = tower.prefix(h - 1);
    let sampler = Sampler { laurent_range: (-6, 3), ..Sampler::default() };
    let top = top_indices(tower);
    let mut rec = Recorder::new();
    let mut seen = BTreeSet::new();
    for _ in 0..trials {
        rec.run("wedge-dlog-t-roundtrip", || {
            let lambda = sampler.top_element(&lower, rng)?;
            let rep = if lower.p_rank() == 0 {
                hp1_class(&lambda)?.representative
            } else {
                hp_class(&DifferentialForm::top(&lambda))?.representative
            };
            let oracle = constant_term_trace(&lambda)?;
            let up = wedge_dlog_t(&rep, tower)?;
            let via_rep = decided(&hp_class(&up.to_form())?.representative)?;
            let direct = DifferentialForm::term(&lambda.into_extension(tower)?, &top)?;
            let via_form = decided(&hp_class(&direct)?.representative)?;
            ensure(decided(&rep)? == oracle && via_rep == oracle && via_form == oracle, || {
                format!("c = {lambda}: lower {}, wedge {via_rep}, direct {via_form}, oracle {oracle}", rep.decision.value().unwrap_or(u32::MAX))
            })
        });
        rec.run("additive", || {
            let a = sampler.top_element(tower, rng)?;
            let b = sampler.top_element(tower, rng)?;
            let va = decided(&hp_class(&DifferentialForm::top(&a))?.representative)?;
            let vb = decided(&hp_class(&DifferentialForm::top(&b))?.representative)?;
            let vab = decided(&hp_class(&DifferentialForm::top(&a.try_add(&b)?))?.representative)?;
            seen.insert(va);
            seen.insert(vb);
            ensure(vab == (va + vb) % p && va == constant_term_trace(&a)?, || format!("{a} | {b}: {va} + {vb} != {vab}"))
        });
        rec.run("wp-images-vanish", || {
            let mu = sampler.top_element(tower, rng)?;
            let w = artin_schreier(&mu);
            let d = hp_class(&DifferentialForm::top(&w))?.representative.decision;
            ensure(d == Decision::Decided(0), || format!("wp({mu}) has class {d:?}"))
        });
    }
    // Each value of F_p is reached by a constant of that trace, moved by a
    // random wp-image.
    let field = tower.field().clone();
    for v in 0..p {
        rec.run("all-classes-reached", || {
            let c = field
                .elements()
                .find(|&c| field.absolute_trace(c) == v)
                .ok_or_else(|| Error::Invalid(format!("no constant of trace {v}")))?;
            let mu = sampler.top_element(tower, rng)?;
            let lambda = FieldElement::constant(tower, c).try_add(&artin_schreier(&mu))?;
            let got = decided(&hp_class(&DifferentialForm::top(&lambda))?.representative)?;
            seen.insert(got);
            ensure(got == v, || format!("{lambda}: class {got}, expected {v}"))
        });
    }
    rec.run("all-classes-reached", || ensure(seen.len() == p as usize, || format!("values reached: {seen:?}")));
    Ok(rec.finish("hp-roundtrip"))
}

/// `hp1_class(a) = 0` iff `a` lies in the brute-force image of `x - x^p`.
pub fn hp1_exhaustive(tower: &Arc<FieldTower>) -> Result<SuiteReport> {
    if !tower.is_finite_base() || tower.height() != 0 {
        return Err(Error::Invalid("hp1-exhaustive needs a finite field GF(q)".into()));
    }
    let f = tower.field().clone();
    let image: BTreeSet<u32> = f.elements().map(|x| f.sub(x, f.pow(x, f.characteristic() as i64).unwrap())).collect();
    let mut rec = Recorder::new();
    for a in f.elements() {
        rec.run("zero-iff-wp-image", || {
            let d = hp1_class(&FieldElement::constant(tower, a))?.representative.decision;
            let in_image = image.contains(&a);
            ensure((d == Decision::Decided(0)) == in_image && matches!(d, Decision::Decided(_)), || {
                format!("a = {}: class {d:?}, in image {in_image}", f.format(a))
            })
        });
    }
    rec.run("image-has-index-p", || {
        ensure(image.len() * f.characteristic() as usize == f.order() as usize, || format!("|image| = {}", image.len()))
    });
    Ok(rec.finish("hp1-exhaustive"))
}

/// `d(t^p (1 + f)) = t^p df` for the last Laurent variable `t`.
pub fn t_power_identity<R: Rng + ?Sized>(tower: &Arc<FieldTower>, trials: usize, rng: &mut R) -> Result<SuiteReport> {
    let h = tower.height();
    if h == 0 {
        return Err(Error::Invalid("t-power needs a Laurent layer".into()));
    }
    let t = FieldElement::basis(tower, tower.p_rank() - 1);
    let tp = t.pow(tower.characteristic() as i64)?;
    let one = FieldElement::one(tower);
    let sampler = Sampler::default();
    let mut rec = Recorder::new();
    for _ in 0..trials {
        rec.run("d-of-t-power-times-unit", || {
            let f = sampler.top_element(tower, rng)?;
            let lhs = DifferentialForm::d_function(&tp.try_mul(&one.try_add(&f)?)?);
            let rhs = DifferentialForm::d_function(&f).scale(&tp)?;
            ensure(lhs == rhs, || format!("f = {f}: {lhs} != {rhs}"))
        });
    }
    Ok(rec.finish("t-power"))
}

fn gf_tower(q: u64) -> Result<Arc<FieldTower>> {
    let (p, _) = crate::gf::prime_power(q).ok_or(Error::NotPrimePower(q))?;
    FieldTower::new(p, BaseDescriptor::FiniteField { order: q, modulus: None }, vec![], 8)
}

fn frac_tower(q: u64, vars: &[&str]) -> Result<Arc<FieldTower>> {
    let (p, _) = crate::gf::prime_power(q).ok_or(Error::NotPrimePower(q))?;
    FieldTower::new(
        p,
        BaseDescriptor::RationalFunctions { order: q, variables: vars.iter().map(|s| s.to_string()).collect() },
        vec![],
        8,
    )
}

/// Polynomial with the given coefficients, low to high; each coefficient
/// is a constant-field value or the first rational variable.
fn poly(tower: &Arc<FieldTower>, coeffs: &[Coef]) -> Result<Vec<FieldElement>> {
    coeffs
        .iter()
        .map(|c| match c {
            Coef::Int(n) => Ok(FieldElement::from_int(tower, *n)),
            Coef::Gen => Ok(FieldElement::generator(tower)),
            Coef::Var => Ok(FieldElement::basis(tower, 0)),
        })
        .collect()
}

#[derive(Clone, Copy)]
enum Coef {
    Int(i64),
    Gen,
    Var,
}

/// The extensions exercised by [`trace_axioms`].
pub fn standard_etale_extensions() -> Result<Vec<Arc<EtaleExtension>>> {
    use Coef::*;
    let f2 = gf_tower(2)?;
    let f4 = gf_tower(4)?;
    let k = frac_tower(2, &["b"])?;
    Ok(vec![
        EtaleExtension::new(&f2, "x", poly(&f2, &[Int(1), Int(1), Int(1)])?)?,
        EtaleExtension::new(&f2, "x", poly(&f2, &[Int(1), Int(1), Int(0), Int(1)])?)?,
        EtaleExtension::new(&f4, "x", poly(&f4, &[Gen, Int(1), Int(1)])?)?,
        EtaleExtension::new(&f4, "x", poly(&f4, &[Int(1), Int(1), Int(0), Int(1)])?)?,
        EtaleExtension::new(&k, "x", poly(&k, &[Var, Int(1), Int(1)])?)?,
        EtaleExtension::new(&k, "x", poly(&k, &[Int(1), Var, Int(0), Int(1)])?)?,
    ])
}

fn etale_element<R: Rng + ?Sized>(ext: &Arc<EtaleExtension>, s: &Sampler, rng: &mut R) -> Result<crate::trace::EtaleElement> {
    let coeffs = (0..ext.degree()).map(|_| s.top_element(ext.base(), rng)).collect::<Result<Vec<_>>>()?;
    ext.element(coeffs)
}

fn etale_form<R: Rng + ?Sized>(ext: &Arc<EtaleExtension>, degree: usize, s: &Sampler, rng: &mut R) -> Result<EtaleForm> {
    let mut acc = EtaleForm::zero(ext, degree);
    for subset in subsets(ext.base().p_rank(), degree) {
        acc = acc.try_add(&EtaleForm::term(&etale_element(ext, s, rng)?, &subset)?)?;
    }
    Ok(acc)
}

fn etale_cartier_inverse(w: &EtaleForm) -> Result<EtaleForm> {
    let mut acc = EtaleForm::zero(w.extension(), w.degree());
    for (s, c) in w.coefficients() {
        acc = acc.try_add(&EtaleForm::term(&c.frobenius(), s)?)?;
    }
    Ok(acc)
}

fn class_of(w: &DifferentialForm) -> Result<QuotientFormTop> {
    w.reduce_mod_exact()
}

/// Trace axioms over the radicial extension `F_2(a) / F_2(b)`, `a^2 = b`,
/// and the étale extensions of [`standard_etale_extensions`].
pub fn trace_axioms<R: Rng + ?Sized>(trials: usize, rng: &mut R) -> Result<SuiteReport> {
    let sampler = Sampler::default();
    let mut rec = Recorder::new();

    let k = frac_tower(2, &["b"])?;
    let rad = RadicialExtension::new(&k, "b", "a")?;
    let up = rad.upper().clone();
    let ext = ExtensionDescriptor::Radicial(rad.clone());
    rec.run("p-rank-preserved", || ensure(ext.upper_p_rank() == k.p_rank(), || "radicial".into()));
    rec.run("trace-dlog-a-is-dlog-b", || {
        let t = rad.trace_form(&DifferentialForm::basis(&up, &[0])?)?;
        ensure(t == DifferentialForm::basis(&k, &[0])?, || format!("Tr(dlog a) = {t}"))
    });
    for _ in 0..trials {
        rec.run("radicial-commutes-with-d", || {
            let w = sampler.form(&up, 0, rng)?;
            let lhs = rad.trace_form(&w.d())?;
            let rhs = rad.trace_form(&w)?.d();
            ensure(lhs == rhs, || format!("w = {w}: {lhs} != {rhs}"))
        });
        rec.run("radicial-projection-formula", || {
            let i = rng.gen_range(0..=1);
            let w = sampler.form(&up, i, rng)?;
            let v = sampler.form(&k, 1 - i, rng)?;
            let lhs = rad.trace_form(&w.wedge(&rad.lift_form(&v)?)?)?;
            let rhs = rad.trace_form(&w)?.wedge(&v)?;
            ensure(lhs == rhs, || format!("w = {w}, v = {v}: {lhs} != {rhs}"))
        });
        rec.run("radicial-commutes-with-cartier-inverse", || {
            let w = sampler.form(&up, 1, rng)?;
            let lhs = class_of(&rad.trace_form(&w.cartier_inverse_top()?.to_form())?)?;
            let rhs = rad.trace_form(&w)?.cartier_inverse_top()?;
            ensure(lhs == rhs, || format!("w = {w}: {lhs} != {rhs}"))
        });
        rec.run("radicial-kills-exact-forms", || {
            let eta = sampler.form(&up, 0, rng)?;
            let c = class_of(&rad.trace_form(&eta.d())?)?;
            ensure(c.is_zero(), || format!("Tr(d {eta}) = {c}"))
        });
        rec.run("radicial-maps-wp-images-to-wp-images", || {
            let lambda = sampler.top_element(&up, rng)?;
            let w = DifferentialForm::top(&artin_schreier(&lambda));
            let lhs = class_of(&rad.trace_form(&w)?)?;
            let c0 = rad.trace_form(&DifferentialForm::top(&lambda))?.top_coefficient()?;
            let rhs = crate::hp::wp_map(&c0)?;
            ensure(lhs == rhs, || format!("lambda = {lambda}: {lhs} != {rhs}"))
        });
        rec.run("radicial-surjective-on-classes", || {
            let lambda = sampler.top_element(&k, rng)?;
            let target = hp_class(&DifferentialForm::top(&lambda))?.representative;
            let pre = DifferentialForm::top(&rad.lift_element(&lambda)?);
            let got = ext.trace_hp(&crate::trace::UpperForm::Radicial(pre))?;
            ensure(got == target, || format!("lambda = {lambda}: {got} != {target}"))
        });
    }

    for e in standard_etale_extensions()? {
        let base = e.base().clone();
        let r = base.p_rank();
        let n = e.degree();
        let p = base.characteristic();
        let label = format!("etale(deg {n} over {base})");
        let desc = ExtensionDescriptor::Etale(e.clone());
        rec.run("p-rank-preserved", || ensure(desc.upper_p_rank() == r, || label.clone()));
        for _ in 0..trials {
            rec.run("etale-commutes-with-d", || {
                let i = rng.gen_range(0..=r);
                let w = etale_form(&e, i, &sampler, rng)?;
                let lhs = w.d().trace();
                let rhs = w.trace().d();
                ensure(lhs == rhs, || format!("{label}, w = {w}: {lhs} != {rhs}"))
            });
            rec.run("etale-projection-formula", || {
                let i = rng.gen_range(0..=r);
                let j = rng.gen_range(0..=r - i);
                let w = etale_form(&e, i, &sampler, rng)?;
                let v = sampler.form(&base, j, rng)?;
                let lhs = w.wedge(&EtaleForm::lift(&e, &v)?)?.trace();
                let rhs = w.trace().wedge(&v)?;
                ensure(lhs == rhs, || format!("{label}, w = {w}, v = {v}: {lhs} != {rhs}"))
            });
            rec.run("etale-commutes-with-cartier-inverse", || {
                let w = etale_form(&e, r, &sampler, rng)?;
                let lhs = class_of(&etale_cartier_inverse(&w)?.trace())?;
                let rhs = w.trace().cartier_inverse_top()?;
                ensure(lhs == rhs, || format!("{label}, w = {w}: {lhs} != {rhs}"))
            });
            if r > 0 {
                rec.run("etale-kills-exact-forms", || {
                    let eta = etale_form(&e, r - 1, &sampler, rng)?;
                    let c = class_of(&eta.d().trace())?;
                    ensure(c.is_zero(), || format!("{label}: Tr(d {eta}) = {c}"))
                });
            }
            rec.run("etale-maps-wp-images-to-wp-images", || {
                let c = etale_element(&e, &sampler, rng)?;
                let w = EtaleForm::term(&c.try_sub(&c.frobenius())?, &top_indices(&base))?;
                let lhs = class_of(&w.trace())?;
                let rhs = crate::hp::wp_map(&c.trace())?;
                let decided_zero = !base.is_finite_base() || hp_class(&w.trace())?.representative.decision == Decision::Decided(0);
                ensure(lhs == rhs && decided_zero, || format!("{label}, c = {c}: {lhs} != {rhs}"))
            });
            rec.run("etale-trace-of-lift-is-degree", || {
                let lambda = sampler.top_element(&base, rng)?;
                let w = DifferentialForm::top(&lambda);
                let got = desc.trace_hp(&desc.lift_form(&w)?)?;
                let scaled = DifferentialForm::top(&lambda.try_mul(&FieldElement::from_int(&base, n as i64))?);
                let want = hp_class(&scaled)?.representative;
                let values_ok = match (got.decided_value(), hp_class(&w)?.representative.decided_value()) {
                    (Some(a), Some(b)) => a == (b * n as u32) % p,
                    (None, None) => true,
                    _ => false,
                };
                ensure(got == want && values_ok, || format!("{label}, lambda = {lambda}: {got} != {want}"))
            });
            rec.run("etale-trace-hp-well-defined", || {
                // Adding an exact form and a wp-image does not change the traced class.
                let w = etale_form(&e, r, &sampler, rng)?;
                let c = etale_element(&e, &sampler, rng)?;
                let mut shifted = w.try_add(&EtaleForm::term(&c.try_sub(&c.frobenius())?, &top_indices(&base))?)?;
                if r > 0 {
                    shifted = shifted.try_add(&etale_form(&e, r - 1, &sampler, rng)?.d())?;
                }
                let a = hp_class(&w.trace())?.representative;
                let b = hp_class(&shifted.trace())?.representative;
                let same = match (a.decided_value(), b.decided_value()) {
                    (Some(x), Some(y)) => x == y,
                    _ => class_of(&w.trace())?.try_add(&crate::hp::wp_map(&c.trace())?)? == class_of(&shifted.trace())?,
                };
                ensure(same, || format!("{label}: {a} vs {b}"))
            });
        }
    }

    transitivity_radicial_etale(&mut rec, trials, &sampler, rng)?;
    transitivity_etale_etale(&mut rec, trials, rng)?;
    Ok(rec.finish("trace-axioms"))
}

/// `F_2(a)[x]/(f)` over `F_2(b)` through both sides of the square, with
/// `f = x^2 + x + b`.
fn transitivity_radicial_etale<R: Rng + ?Sized>(
    rec: &mut Recorder,
    trials: usize,
    sampler: &Sampler,
    rng: &mut R,
) -> Result<()> {
    use Coef::*;
    let k = frac_tower(2, &["b"])?;
    let rad = RadicialExtension::new(&k, "b", "a")?;
    let up = rad.upper().clone();
    let f = poly(&k, &[Var, Int(1), Int(1)])?;
    let lower_ext = EtaleExtension::new(&k, "x", f.clone())?;
    let f_up = f.iter().map(|c| rad.lift_element(c)).collect::<Result<Vec<_>>>()?;
    let upper_ext = EtaleExtension::new(&up, "x", f_up)?;
    for _ in 0..trials {
        rec.run("transitivity-radicial-etale", || {
            let degree = rng.gen_range(0..=1);
            let w = etale_form(&upper_ext, degree, sampler, rng)?;
            let first = rad.trace_form(&w.trace())?;
            // Radicial trace coefficientwise in x, then the étale trace.
            let mut mid = EtaleForm::zero(&lower_ext, degree);
            for (s, c) in w.coefficients() {
                if !s.contains(&rad.index()) {
                    continue;
                }
                let c0 = c.coefficients().iter().map(|ci| Ok(rad.expand(ci)?.swap_remove(0))).collect::<Result<Vec<_>>>()?;
                mid = mid.try_add(&EtaleForm::term(&lower_ext.element(c0)?, s)?)?;
            }
            let second = mid.trace();
            ensure(first == second, || format!("w = {w}: {first} != {second}"))
        });
    }
    Ok(())
}

/// `F_4[y]/(y^2 + y + w)` over `F_2` through `F_4`, against
/// `F_2[z]/(z^4 + z + 1)` with `y -> z`, `w -> z^2 + z`.
fn transitivity_etale_etale<R: Rng + ?Sized>(rec: &mut Recorder, trials: usize, rng: &mut R) -> Result<()> {
    use Coef::*;
    let f2 = gf_tower(2)?;
    let f4 = gf_tower(4)?;
    let ey = EtaleExtension::new(&f4, "y", poly(&f4, &[Gen, Int(1), Int(1)])?)?;
    let ez = EtaleExtension::new(&f2, "z", poly(&f2, &[Int(1), Int(1), Int(0), Int(0), Int(1)])?)?;
    let z = ez.generator();
    let w_image = z.pow(2).try_add(&z)?;
    let field4: GaloisField = f4.field().clone();
    let embed4 = |c: &FieldElement| -> Result<crate::trace::EtaleElement> {
        let d = field4.digits(c.as_constant().expect("constant"));
        let mut acc = ez.lift(&FieldElement::from_int(&f2, d[0] as i64))?;
        if d.len() > 1 && d[1] == 1 {
            acc = acc.try_add(&w_image)?;
        }
        Ok(acc)
    };
    for _ in 0..trials {
        rec.run("transitivity-etale-etale", || {
            let c0 = FieldElement::constant(&f4, rng.gen_range(0..4));
            let c1 = FieldElement::constant(&f4, rng.gen_range(0..4));
            let c = ey.element(vec![c0.clone(), c1.clone()])?;
            let two_step = field_trace_finite(&c.trace(), 2)?;
            let image = embed4(&c0)?.try_add(&embed4(&c1)?.try_mul(&z)?)?;
            let direct = image.trace();
            ensure(two_step.as_constant() == direct.as_constant(), || format!("c = {c}: {two_step} != {direct}"))
        });
    }
    Ok(())
}

fn series_ring(q: u64, u: &[&str], x: &[&str], t: &str, d: u32) -> Result<Arc<SeriesRing>> {
    SeriesRing::new(
        GaloisField::with_order(q)?,
        u.iter().map(|s| s.to_string()).collect(),
        x.iter().map(|s| s.to_string()).collect(),
        t,
        d,
    )
}

/// Division, uniqueness across schedules, preparation and truncation
/// consistency over `GF(5)[[u]][[X, T]]` with `D = 12` (and 16).
pub fn weierstrass_suite<R: Rng + ?Sized>(trials: usize, rng: &mut R) -> Result<SuiteReport> {
    let r12 = series_ring(5, &["u"], &["X"], "T", 12)?;
    let r16 = r12.with_truncation(16)?;
    let t = r12.t_index();
    let mut rec = Recorder::new();
    for _ in 0..trials {
        let k = rng.gen_range(1..=3);
        let f = random_regular(&r12, k, 0.15, rng);
        let g = random_series(&r12, 0, 0.15, rng);
        let mut qr = None;
        rec.run("division-multiplies-back", || {
            let (q, r) = weierstrass_divide(&g, &f, k)?;
            let back = q.try_mul(&f)?.try_add(&r)?;
            let ok = back == g && (r.is_zero() || r.t_degree() < k) && regularity_order(&f) == Some(k);
            qr = Some((q, r));
            ensure(ok, || format!("f = {f}, g = {g}"))
        });
        let Some((q, r)) = qr else { continue };
        rec.run("schedules-agree", || {
            let other = weierstrass_divide_with(&g, &f, k, DivisionSchedule::SuccessiveApproximation)?;
            ensure(other == (q.clone(), r.clone()), || format!("f = {f}, g = {g}"))
        });
        rec.run("preparation-multiplies-back", || {
            let prep = weierstrass_prepare(&f)?;
            let distinguished = prep.distinguished.terms().all(|(m, _)| m[t] == k || (m[t] < k && m[..t].iter().any(|e| *e > 0)));
            let ok = prep.unit.try_mul(&prep.distinguished)? == f && prep.unit.is_unit() && distinguished && prep.order == k;
            ensure(ok, || format!("f = {f}: {prep}"))
        });
        rec.run("raising-truncation-is-consistent", || {
            let (q16, r16_) = weierstrass_divide(&g.in_ring(&r16)?, &f.in_ring(&r16)?, k)?;
            ensure(q16.in_ring(&r12)? == q && r16_.in_ring(&r12)? == r, || format!("f = {f}, g = {g}"))
        });
    }
    Ok(rec.finish("weierstrass"))
}

/// The quadratic `X^2 - (1 + 2t) X + t^2` over `GF(5)[[t]]`.
pub fn hensel_quadratic(order: u32) -> Result<(Vec<TruncatedSeries>, TruncatedSeries, TruncatedSeries)> {
    let r = series_ring(5, &[], &[], "t", order)?;
    let t = TruncatedSeries::variable(&r, "t")?;
    let one = TruncatedSeries::one(&r);
    let s = one.try_add(&t.scale(2))?;
    let g = vec![t.pow(2), s.neg(), one];
    Ok((g, s, t.pow(2)))
}

/// Samples `u = 1 + t^level * (random series)` in `F_q[[t]]`.
pub fn unit_samples<R: Rng + ?Sized>(q: u64, level: u32, d: u32, count: usize, rng: &mut R) -> Result<Vec<TruncatedSeries>> {
    let r = series_ring(q, &[], &[], "t", d)?;
    let one = TruncatedSeries::one(&r);
    (0..count).map(|_| one.try_add(&random_series(&r, level, 0.5, rng))).collect()
}

/// Artin-Schreier inversion, Hensel lifting of the quadratic, and the
/// p-th-root congruence in `1 + t^2 F_4[[t]]`.
pub fn solver_suite<R: Rng + ?Sized>(trials: usize, rng: &mut R) -> Result<SuiteReport> {
    let mut rec = Recorder::new();
    for q in [2u64, 3] {
        let r = series_ring(q, &[], &[], "t", 16)?;
        for _ in 0..trials {
            rec.run("artin-schreier-solve", || {
                let a = random_series(&r, 1, 0.5, rng);
                let b = artin_schreier_solve(&a, 16)?;
                ensure(wp_series(&b) == a && b.in_maximal_ideal(), || format!("a = {a}, b = {b}"))
            });
        }
    }
    rec.run("hensel-vieta", || {
        let (g, sum, product) = hensel_quadratic(12)?;
        let ring = sum.ring().clone();
        let x = hensel_lift(&g, &TruncatedSeries::one(&ring), 12)?;
        let y = hensel_lift(&g, &TruncatedSeries::zero(&ring), 12)?;
        let roots = evaluate_polynomial(&g, &x)?.is_zero() && evaluate_polynomial(&g, &y)?.is_zero();
        let vieta = x.try_add(&y)? == sum && x.try_mul(&y)? == product;
        ensure(roots && vieta, || format!("x = {x}, y = {y}"))
    });
    let samples = unit_samples(4, 2, 12, trials, rng)?;
    let report = unit_group_congruence_check(2, &samples)?;
    for s in &report.samples {
        rec.run("unit-group-congruence", || ensure(s.root.is_some(), || format!("no square root of {}", s.unit)));
    }
    Ok(rec.finish("solvers"))
}
