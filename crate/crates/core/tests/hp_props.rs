use cartier_core::hp::replay;
use cartier_core::random::Sampler;
use cartier_core::suites::{constant_term_trace, hp_roundtrip, t_power_identity};
use cartier_core::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn tower(p: u64, base: BaseDescriptor, laurent: &[&str]) -> Arc<FieldTower> {
    FieldTower::new(p, base, laurent.iter().map(|s| s.to_string()).collect(), 8).unwrap()
}

fn finite(q: u64) -> BaseDescriptor {
    BaseDescriptor::FiniteField { order: q, modulus: None }
}

fn frac(q: u64, vars: &[&str]) -> BaseDescriptor {
    BaseDescriptor::RationalFunctions { order: q, variables: vars.iter().map(|s| s.to_string()).collect() }
}

/// Laurent towers over finite fields.
fn decided_towers() -> Vec<Arc<FieldTower>> {
    vec![
        tower(2, finite(4), &["t"]),
        tower(3, finite(9), &["t"]),
        tower(5, finite(5), &["t"]),
        tower(2, finite(2), &["t1", "t2"]),
        tower(2, finite(4), &["t1", "t2", "t3"]),
    ]
}

fn rational_towers() -> Vec<Arc<FieldTower>> {
    vec![tower(3, frac(3, &["b1", "b2"]), &[]), tower(2, frac(2, &["b"]), &["t"])]
}

fn sampler() -> Sampler {
    Sampler { laurent_range: (-9, 3), density: 0.35, ..Sampler::default() }
}

fn class(lambda: &FieldElement) -> Reduction {
    hp_class(&DifferentialForm::top(lambda)).unwrap()
}

fn value(lambda: &FieldElement) -> u32 {
    class(lambda).representative.decided_value().expect("finite base")
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn decided_value_matches_constant_term_trace(seed in any::<u64>(), which in 0usize..5) {
        let t = &decided_towers()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambda = sampler().top_element(t, &mut rng).unwrap();
        prop_assert_eq!(value(&lambda), constant_term_trace(&lambda).unwrap());
    }

    #[test]
    fn class_is_additive(seed in any::<u64>(), which in 0usize..5) {
        let t = &decided_towers()[which];
        let p = t.characteristic();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sampler();
        let a = s.top_element(t, &mut rng).unwrap();
        let b = s.top_element(t, &mut rng).unwrap();
        prop_assert_eq!(value(&(&a + &b)), (value(&a) + value(&b)) % p);
    }

    /// Adding `wp(mu) dlog b + d(eta)` does not change the class.
    #[test]
    fn class_vanishes_on_wp_and_exact_forms(seed in any::<u64>(), which in 0usize..5) {
        let t = &decided_towers()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sampler();
        let lambda = s.top_element(t, &mut rng).unwrap();
        let mu = s.top_element(t, &mut rng).unwrap();
        let eta = s.form(t, t.p_rank() - 1, &mut rng).unwrap();
        let shifted = DifferentialForm::top(&(&lambda + &(&mu - &mu.frobenius())))
            .try_add(&eta.d())
            .unwrap();
        let got = hp_class(&shifted).unwrap().representative.decided_value();
        prop_assert_eq!(got, Some(value(&lambda)));
    }

    /// Positive-exponent terms and an `O(t^N)` tag on the top layer are
    /// invisible to the class.
    #[test]
    fn class_ignores_the_positive_tail(seed in any::<u64>(), which in 0usize..5, extra in 1i64..6) {
        let t = &decided_towers()[which];
        let h = t.height();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sampler();
        let lambda = s.top_element(t, &mut rng).unwrap();
        let top = lambda.terms().iter().map(|(e, _)| *e).max().unwrap_or(0).max(0);
        let n = top + extra;
        let mut terms = lambda.terms();
        let noise = s.top_element(t, &mut rng).unwrap();
        for (_, c) in noise.terms() {
            terms.push((rng.gen_range(1..n.max(2)), c));
        }
        let mut merged: std::collections::BTreeMap<i64, FieldElement> = std::collections::BTreeMap::new();
        for (e, c) in terms {
            let sum = match merged.remove(&e) {
                Some(prev) => &prev + &c,
                None => c,
            };
            merged.insert(e, sum);
        }
        let noisy = FieldElement::laurent(t, h, merged, Some(n)).unwrap();
        prop_assert_eq!(value(&noisy), value(&lambda));
    }

    #[test]
    fn log_replays_to_the_representative(seed in any::<u64>(), which in 0usize..7, top in any::<bool>()) {
        let mut all = decided_towers();
        all.extend(rational_towers());
        let t = &all[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambda = sampler().top_element(t, &mut rng).unwrap();
        let red = if top && t.p_rank() > 0 { class(&lambda) } else { hp1_class(&lambda).unwrap() };
        let (coefficient, v) = replay(&lambda, &red.log).unwrap();
        prop_assert_eq!(&coefficient, &red.representative.coefficient);
        prop_assert_eq!(v, red.representative.decided_value());
    }

    #[test]
    fn rational_base_top_class_is_theta_zero_part(seed in any::<u64>()) {
        let t = &rational_towers()[0];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lambda = sampler().top_element(t, &mut rng).unwrap();
        let rep = class(&lambda).representative;
        prop_assert_eq!(rep.decision, Decision::Unavailable);
        prop_assert_eq!(rep.coefficient, lambda.zero_theta_part().at_level(t.height()).unwrap());
    }

    /// Compatibility with `^ dlog(t)` up to height three.
    #[test]
    fn roundtrip_through_wedge_dlog_t(seed in any::<u64>(), which in 0usize..5) {
        let t = &decided_towers()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let report = hp_roundtrip(t, 3, &mut rng).unwrap();
        prop_assert!(report.passed(), "{}", report);
    }

    #[test]
    fn t_power_times_unit(seed in any::<u64>(), which in 0usize..3) {
        let towers = [tower(3, finite(3), &["t"]), tower(2, frac(2, &["b"]), &["t"]), tower(5, finite(25), &["t"])];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let report = t_power_identity(&towers[which], 3, &mut rng).unwrap();
        prop_assert!(report.passed(), "{}", report);
    }
}

/// Every value of `F_p` is the class of a constant.
#[test]
fn constants_reach_every_class() {
    for t in decided_towers() {
        let field = t.field().clone();
        let p = t.characteristic();
        let mut seen = vec![false; p as usize];
        for c in field.elements() {
            let v = value(&FieldElement::constant(&t, c));
            assert_eq!(v, field.absolute_trace(c));
            seen[v as usize] = true;
        }
        assert!(seen.iter().all(|s| *s), "{t}");
    }
}
