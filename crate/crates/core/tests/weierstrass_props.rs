use cartier_core::random::{random_regular, random_series};
use cartier_core::weierstrass::{evaluate_polynomial, pth_root_series, substitute, wp_series};
use cartier_core::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;
use std::time::Instant;

fn ring(q: u64, u: &[&str], x: &[&str], t: &str, d: u32) -> Arc<SeriesRing> {
    SeriesRing::new(
        GaloisField::with_order(q).unwrap(),
        u.iter().map(|s| s.to_string()).collect(),
        x.iter().map(|s| s.to_string()).collect(),
        t,
        d,
    )
    .unwrap()
}

/// Multiply-back oracle: `g - q f - r` vanishes and `r` has `T`-degree `< k`.
fn check_division(g: &TruncatedSeries, f: &TruncatedSeries, k: u32, q: &TruncatedSeries, r: &TruncatedSeries) {
    let back = q.try_mul(f).unwrap().try_add(r).unwrap();
    assert_eq!(&back, g, "g != q f + r for f = {f}");
    assert!(r.is_zero() || r.t_degree() < k);
}

#[test]
fn random_divisions_and_preparations() {
    let start = Instant::now();
    let r12 = ring(5, &["u"], &["X"], "T", 12);
    let r16 = r12.with_truncation(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let k = rng.gen_range(1..=3);
        let f = random_regular(&r12, k, 0.15, &mut rng);
        let g = random_series(&r12, 0, 0.15, &mut rng);
        assert_eq!(regularity_order(&f), Some(k));

        let (q, r) = weierstrass_divide_with(&g, &f, k, DivisionSchedule::WeightByWeight).unwrap();
        check_division(&g, &f, k, &q, &r);
        let other = weierstrass_divide_with(&g, &f, k, DivisionSchedule::SuccessiveApproximation).unwrap();
        assert_eq!(other, (q.clone(), r.clone()));

        let prep = weierstrass_prepare(&f).unwrap();
        assert_eq!(prep.order, k);
        assert!(prep.unit.is_unit());
        assert_eq!(prep.unit.try_mul(&prep.distinguished).unwrap(), f);
        let t = r12.t_index();
        for (m, _) in prep.distinguished.terms() {
            assert!(m[t] <= k);
            if m[t] < k {
                assert!(m[..t].iter().any(|e| *e > 0), "P is not distinguished");
            }
        }

        // The same polynomials, divided with more precision.
        let f16 = f.in_ring(&r16).unwrap();
        let g16 = g.in_ring(&r16).unwrap();
        let (q16, r16_) = weierstrass_divide(&g16, &f16, k).unwrap();
        check_division(&g16, &f16, k, &q16, &r16_);
        assert_eq!(q16.in_ring(&r12).unwrap(), q);
        assert_eq!(r16_.in_ring(&r12).unwrap(), r);
    }
    eprintln!("weierstrass suite: {:?}", start.elapsed());
}

#[test]
fn artin_schreier_random() {
    for (q, seed) in [(2u64, 1u64), (3, 2)] {
        let r = ring(q, &[], &[], "t", 16);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..100 {
            let a = random_series(&r, 1, 0.5, &mut rng);
            let b = artin_schreier_solve(&a, 16).unwrap();
            assert!(b.in_maximal_ideal());
            assert_eq!(wp_series(&b), a);
        }
    }
}

#[test]
fn hensel_vieta() {
    let r = ring(5, &[], &[], "t", 12);
    let t = TruncatedSeries::variable(&r, "t").unwrap();
    let one = TruncatedSeries::one(&r);
    let s = one.try_add(&t.scale(2)).unwrap();
    let g = vec![t.pow(2), s.neg(), one.clone()];
    let x = hensel_lift(&g, &one, 12).unwrap();
    let y = hensel_lift(&g, &TruncatedSeries::zero(&r), 12).unwrap();
    assert!(evaluate_polynomial(&g, &x).unwrap().is_zero());
    assert!(evaluate_polynomial(&g, &y).unwrap().is_zero());
    assert_eq!(x.truncate(1), one);
    assert_eq!(x.try_mul(&y).unwrap(), t.pow(2));
    assert_eq!(x.try_add(&y).unwrap(), s);
}

#[test]
fn regularize_products_of_variables() {
    let r = ring(3, &[], &["X1", "X2"], "T", 10);
    let x1 = TruncatedSeries::variable(&r, "X1").unwrap();
    let x2 = TruncatedSeries::variable(&r, "X2").unwrap();
    let f = x1.try_mul(&x2).unwrap();
    let reg = regularize(&f).unwrap();
    assert_eq!(reg.transformed, substitute(&f, &reg.exponents).unwrap());
    assert_eq!(regularity_order(&reg.transformed), Some(reg.order));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn division_of_random_pairs(seed in any::<u64>(), k in 1u32..=3) {
        let r = ring(3, &["u"], &["X"], "T", 8);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_regular(&r, k, 0.3, &mut rng);
        let g = random_series(&r, 0, 0.3, &mut rng);
        let (q, rem) = weierstrass_divide(&g, &f, k).unwrap();
        check_division(&g, &f, k, &q, &rem);
        let other = weierstrass_divide_with(&g, &f, k, DivisionSchedule::SuccessiveApproximation).unwrap();
        prop_assert_eq!(other, (q, rem));
    }

    #[test]
    fn division_is_linear(seed in any::<u64>()) {
        let r = ring(4, &[], &["X"], "T", 7);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_regular(&r, 2, 0.3, &mut rng);
        let g1 = random_series(&r, 0, 0.3, &mut rng);
        let g2 = random_series(&r, 0, 0.3, &mut rng);
        let (q1, r1) = weierstrass_divide(&g1, &f, 2).unwrap();
        let (q2, r2) = weierstrass_divide(&g2, &f, 2).unwrap();
        let (q, rem) = weierstrass_divide(&g1.try_add(&g2).unwrap(), &f, 2).unwrap();
        prop_assert_eq!(q, q1.try_add(&q2).unwrap());
        prop_assert_eq!(rem, r1.try_add(&r2).unwrap());
    }

    #[test]
    fn artin_schreier_solution_is_unique_in_m(seed in any::<u64>()) {
        let r = ring(3, &[], &[], "t", 12);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = random_series(&r, 1, 0.5, &mut rng);
        prop_assert_eq!(artin_schreier_solve(&wp_series(&b), 12).unwrap(), b);
    }

    #[test]
    fn squares_have_square_roots(seed in any::<u64>()) {
        let r = ring(4, &[], &[], "t", 12);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = TruncatedSeries::one(&r).try_add(&random_series(&r, 1, 0.5, &mut rng)).unwrap();
        let u = v.frobenius();
        prop_assert_eq!(pth_root_series(&u), Some(v.truncate(6)));
    }
}
