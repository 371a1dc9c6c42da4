use cartier_core::random::Sampler;
use cartier_core::suites::{standard_etale_extensions, trace_axioms};
use cartier_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn random_element(ext: &Arc<EtaleExtension>, rng: &mut ChaCha8Rng) -> EtaleElement {
    let s = Sampler::default();
    let coeffs = (0..ext.degree()).map(|_| s.top_element(ext.base(), rng).unwrap()).collect();
    ext.element(coeffs).unwrap()
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn etale_trace_is_linear_and_commutes_with_frobenius(seed in any::<u64>(), which in 0usize..6) {
        let ext = standard_etale_extensions().unwrap()[which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_element(&ext, &mut rng);
        let y = random_element(&ext, &mut rng);
        let c = Sampler::default().top_element(ext.base(), &mut rng).unwrap();
        prop_assert_eq!(x.try_add(&y).unwrap().trace(), &x.trace() + &y.trace());
        prop_assert_eq!(ext.lift(&c).unwrap().try_mul(&x).unwrap().trace(), &c * &x.trace());
        prop_assert_eq!(x.frobenius().trace(), x.trace().frobenius());
    }

    #[test]
    fn etale_trace_of_a_lift_is_multiplication_by_the_degree(seed in any::<u64>(), which in 0usize..6) {
        let ext = standard_etale_extensions().unwrap()[which].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = Sampler::default().top_element(ext.base(), &mut rng).unwrap();
        let n = FieldElement::constant(ext.base(), ext.base().field().from_int(ext.degree() as i64));
        prop_assert_eq!(ext.lift(&c).unwrap().trace(), &n * &c);
    }

    #[test]
    fn trace_suite_under_random_seeds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let report = trace_axioms(2, &mut rng).unwrap();
        prop_assert!(report.passed(), "{}", report);
    }
}
