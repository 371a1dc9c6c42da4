use cartier_core::random::Sampler;
use cartier_core::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

fn tower(p: u64, base: BaseDescriptor, laurent: &[&str], prec: i64) -> Arc<FieldTower> {
    FieldTower::new(p, base, laurent.iter().map(|s| s.to_string()).collect(), prec).unwrap()
}

fn finite(q: u64) -> BaseDescriptor {
    BaseDescriptor::FiniteField { order: q, modulus: None }
}

fn frac(q: u64, vars: &[&str]) -> BaseDescriptor {
    BaseDescriptor::RationalFunctions { order: q, variables: vars.iter().map(|s| s.to_string()).collect() }
}

fn towers() -> Vec<Arc<FieldTower>> {
    vec![
        tower(2, finite(4), &["t"], 8),
        tower(3, frac(3, &["b"]), &["t"], 8),
        tower(2, frac(2, &["b1", "b2"]), &[], 8),
        tower(3, finite(9), &["t1", "t2"], 8),
        tower(5, finite(5), &["t"], 8),
    ]
}

fn sampler() -> Sampler {
    Sampler { laurent_range: (-3, 3), density: 0.4, ..Sampler::default() }
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn ring_axioms(seed in any::<u64>(), which in 0usize..5) {
        let t = &towers()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sampler();
        let x = s.top_element(t, &mut rng).unwrap();
        let y = s.top_element(t, &mut rng).unwrap();
        let z = s.top_element(t, &mut rng).unwrap();
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&x + &y, &y + &x);
        prop_assert!((&x - &x).is_zero());
        prop_assert_eq!(&x * &FieldElement::one(t), x.clone());
    }

    #[test]
    fn frobenius_is_a_ring_homomorphism(seed in any::<u64>(), which in 0usize..5) {
        let t = &towers()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sampler();
        let x = s.top_element(t, &mut rng).unwrap();
        let y = s.top_element(t, &mut rng).unwrap();
        prop_assert_eq!((&x + &y).frobenius(), &x.frobenius() + &y.frobenius());
        prop_assert_eq!((&x * &y).frobenius(), &x.frobenius() * &y.frobenius());
        let p = t.characteristic() as i64;
        prop_assert_eq!(x.frobenius(), x.pow(p).unwrap());
    }

    #[test]
    fn decomposition_round_trip(seed in any::<u64>(), which in 0usize..5) {
        let t = &towers()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sampler().top_element(t, &mut rng).unwrap();
        let d = x.p_component_decompose();
        prop_assert_eq!(d.reassemble().at_level(t.height()).unwrap(), x.clone());
        if let Some(c0) = d.zero_component() {
            prop_assert_eq!(c0.frobenius().at_level(t.height()).unwrap(), x.zero_theta_part().at_level(t.height()).unwrap());
        }
    }

    /// Components chosen at random are recovered from `sum c_theta^p b^theta`.
    #[test]
    fn decomposition_is_unique(seed in any::<u64>(), which in 0usize..5) {
        let t = &towers()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sampler();
        let r = t.p_rank();
        let p = t.characteristic() as usize;
        let mut chosen = BTreeMap::new();
        let mut x = FieldElement::zero(t);
        for code in 0..p.pow(r as u32) {
            let theta: Vec<u8> = (0..r).map(|i| ((code / p.pow(i as u32)) % p) as u8).collect();
            let c = s.top_element(t, &mut rng).unwrap();
            let mut term = c.frobenius();
            for (i, &d) in theta.iter().enumerate() {
                term = &term * &FieldElement::basis(t, i).pow(d as i64).unwrap();
            }
            x = &x + &term;
            if !c.is_zero() {
                chosen.insert(theta, c);
            }
        }
        let got: BTreeMap<Vec<u8>, FieldElement> = x
            .p_component_decompose()
            .components
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k, c.at_level(t.height()).unwrap()))
            .collect();
        prop_assert_eq!(got, chosen);
    }

    #[test]
    fn pth_root_inverts_frobenius(seed in any::<u64>(), which in 0usize..5) {
        let t = &towers()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sampler().top_element(t, &mut rng).unwrap();
        prop_assert_eq!(x.frobenius().p_th_root().unwrap().at_level(t.height()).unwrap(), x);
    }

    /// Higher default precision never changes coefficients below the lower
    /// one.
    #[test]
    fn precision_contract(seed in any::<u64>(), low in 2i64..8, extra in 1i64..6, q in prop::sample::select(vec![3u64, 4])) {
        let p = if q == 4 { 2 } else { 3 };
        let lo = tower(p, finite(q), &["t"], low);
        let hi = lo.with_default_precision(low + extra).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = Sampler { laurent_range: (0, 3), density: 0.6, ..Sampler::default() };
        let x = s.top_element(&lo, &mut rng).unwrap();
        let y = s.top_element(&lo, &mut rng).unwrap();
        let one = FieldElement::one(&lo);
        let t = FieldElement::basis(&lo, 0);
        let run = |x: &FieldElement, y: &FieldElement, one: &FieldElement, t: &FieldElement| -> FieldElement {
            let u = one + &(t * x);
            let v = (one + &(t * y)).inv(None).unwrap();
            let w = &(&u * &v) + &(&x.frobenius() * &v);
            &w * &u.inv(None).unwrap()
        };
        let a = run(&x, &y, &one, &t);
        let tr = |e: &FieldElement| e.transport(&hi).unwrap();
        let b = run(&tr(&x), &tr(&y), &tr(&one), &tr(&t));
        match a.precision() {
            Some(n) => {
                prop_assert!(b.precision().unwrap() >= n);
                prop_assert_eq!(b.truncate(n), tr(&a));
            }
            None => prop_assert_eq!(b, tr(&a)),
        }
    }

    #[test]
    fn inverse_within_precision(seed in any::<u64>(), which in 0usize..5) {
        let t = &towers()[which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sampler().top_element(t, &mut rng).unwrap();
        prop_assume!(!x.is_zero());
        let prod = &x * &x.inv(None).unwrap();
        let defect = &prod - &FieldElement::one(t);
        prop_assert!(defect.vanishes_to_precision(), "x * x^-1 - 1 = {}", defect);
    }
}

/// `a` is in the image of `x - x^p` iff its absolute trace vanishes.
#[test]
fn wp_image_is_trace_kernel() {
    for q in [4u64, 8, 9, 25] {
        let f = GaloisField::with_order(q).unwrap();
        let image: std::collections::BTreeSet<Fq> = f.elements().map(|x| f.wp(x)).collect();
        for a in f.elements() {
            assert_eq!(image.contains(&a), f.absolute_trace(a) == 0, "q = {q}, a = {}", f.format(a));
        }
    }
}
