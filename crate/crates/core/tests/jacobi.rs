mod common;

use bconc::jacobi::*;
use common::*;
use proptest::prelude::*;
use std::f64::consts::PI;

#[test]
fn classify_examples() {
    assert_eq!(classify(1.0, 0.0).unwrap().regime(), Regime::Ball);
    assert_eq!(classify(0.0, -1.0).unwrap().regime(), Regime::Unbounded);
    assert_eq!(classify(-1.0, 1.0).unwrap().regime(), Regime::Horospherical);
    assert!(classify(1.0, f64::INFINITY).is_err());
    assert!(classify(1.0, 0.5).unwrap().is_convex_ball());
    assert!(!classify(1.0, -0.5).unwrap().is_convex_ball());
}

#[test]
fn profile_examples() {
    assert!((s_profile(0.0, 1.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
    assert!((s_profile(-1.0, 1.0, 2.0).unwrap() - (-2.0f64).exp()).abs() < 1e-15);
    assert!((s_profile(1.0, 0.0, PI / 3.0).unwrap() - 0.5).abs() < 1e-15);
    assert!(s_profile(1.0, 0.0, -0.1).is_err());
}

#[test]
fn radius_examples_against_bisection() {
    assert_eq!(c_radius(&classify(0.0, 2.0).unwrap()), 0.5);
    for (k, l, expect) in [(1.0, 0.0, PI / 2.0), (-1.0, 2.0, 0.5 * 3f64.ln())] {
        let c = c_radius(&classify(k, l).unwrap());
        assert!((c - expect).abs() < 1e-14);
        let root = bisect(|t| s_profile(k, l, t).unwrap(), 0.0, 3.0);
        assert!((c - root).abs() < 1e-12);
    }
    assert!(c_radius(&classify(-1.0, 1.0).unwrap()).is_infinite());
    assert!(c_radius(&classify(0.0, -1.0).unwrap()).is_infinite());
}

#[test]
fn growth_examples() {
    let cc = classify(0.0, 1.0).unwrap();
    assert!((s_growth(2.0, &cc, 0.5).unwrap() - 0.375).abs() < 1e-12);
    assert!((s_growth(2.0, &cc, 5.0).unwrap() - 0.5).abs() < 1e-12);
    assert!((s_growth(2.0, &cc, 1.0).unwrap() - 0.5).abs() < 1e-12);
    let horo = classify(-1.0, 1.0).unwrap();
    for n in [2.0, 3.5, 10.0] {
        assert!((s_growth(n, &horo, f64::INFINITY).unwrap() - 1.0 / (n - 1.0)).abs() < 1e-12);
    }
    let open = classify(0.0, -1.0).unwrap();
    assert!(s_growth(3.0, &open, f64::INFINITY).is_err());
    assert!(s_growth(3.0, &open, 2.0).is_ok());
    assert!(s_growth(1.0, &cc, 2.0).is_err());
}

#[test]
fn ball_function_examples() {
    let cc = classify(0.0, 0.5).unwrap();
    assert!((v_ball(2.0, &cc, 1.0).unwrap() - 0.25).abs() < 1e-13);
    assert!((v_inverse(2.0, &cc, 0.25).unwrap() - 1.0).abs() < 1e-12);
    let cos = classify(1.0, 0.0).unwrap();
    // ∫_{π/4}^{π/2} cos² = π/8 - 1/4 and ∫₀^{π/2} cos² = π/4.
    let expect = 0.5 - 1.0 / PI;
    let oracle = simpson(|t| t.cos().powi(2), PI / 4.0, PI / 2.0, 1000) / simpson(|t| t.cos().powi(2), 0.0, PI / 2.0, 1000);
    assert!((expect - oracle).abs() < 1e-12);
    assert!((v_ball(3.0, &cos, PI / 4.0).unwrap() - expect).abs() < 1e-13);
    assert_eq!(v_ball(3.0, &cos, 0.0).unwrap(), 1.0);
    assert!(v_ball(3.0, &cos, 2.0).is_err());
    assert!(v_ball(3.0, &classify(-1.0, 1.0).unwrap(), 0.1).is_err());
}

#[test]
fn hemisphere_inverse_matches_bisection_oracle() {
    let n = 50.0;
    let cc = classify(1.0 / n, 0.0).unwrap();
    let c = PI / 2.0 * n.sqrt();
    let dens = |t: f64| (t / n.sqrt()).cos().powf(n - 1.0);
    let total = simpson(dens, 0.0, c, 20_000);
    let oracle = bisect(|r| simpson(dens, r, c, 20_000) / total - 0.5, 0.0, c);
    let got = v_inverse(n, &cc, 0.5).unwrap();
    assert!((got - oracle).abs() < 1e-8, "{got} vs {oracle}");
}

#[test]
fn gaussian_tail_examples() {
    let ic = InfiniteCurvature::new(0.0, 2.0).unwrap();
    assert_eq!(gaussian_tail(&ic, 1.0).unwrap(), (-2.0f64).exp());
    let ic = InfiniteCurvature::new(1.0, 0.0).unwrap();
    assert_eq!(gaussian_tail(&ic, 0.0).unwrap(), 1.0);
    let median = bisect(|r| gaussian_tail_oracle(1.0, 0.0, r) - 0.5, 0.0, 3.0);
    assert!((gaussian_tail_inverse(&ic, 0.5).unwrap() - median).abs() < 1e-10);
    assert!((median - 0.674490).abs() < 1e-6);
}

#[test]
fn twisted_effective_pair() {
    let tp = TwistParams::new(3.0, 0.0, 1.0, 0.5).unwrap();
    let eff = tp.effective().unwrap();
    assert_eq!(eff.kappa(), 0.0);
    assert!((eff.lambda() - (-1.0f64).exp()).abs() < 1e-16);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn profile_matches_runge_kutta(k in -4.0f64..4.0, l in -4.0f64..4.0) {
        let cc = classify(k, l).unwrap();
        let end = cc.radius().min(10.0);
        let ts: Vec<f64> = (0..=40).map(|i| end * i as f64 / 40.0).collect();
        let ode = jacobi_rk4(k, l, &ts, 1e-3);
        for (t, y) in ts.iter().zip(ode) {
            let s = s_profile(k, l, *t).unwrap();
            prop_assert!((s - y).abs() <= 1e-8 * y.abs().max(1.0), "t = {}: {} vs {}", t, s, y);
        }
    }

    #[test]
    fn ball_profile_positive_before_radius(k in -4.0f64..4.0, l in -4.0f64..4.0) {
        let cc = classify(k, l).unwrap();
        prop_assume!(cc.is_ball());
        let c = cc.radius();
        for i in 0..50 {
            let t = c * i as f64 / 50.0;
            prop_assert!(s_profile(k, l, t).unwrap() > 0.0);
        }
        prop_assert!(s_profile(k, l, c).unwrap().abs() < 1e-9);
    }

    #[test]
    fn growth_is_monotone_and_clamped(k in -2.0f64..2.0, l in -2.0f64..2.0, n in 1.5f64..8.0) {
        let cc = classify(k, l).unwrap();
        let end = cc.radius().min(5.0);
        let mut prev = 0.0;
        for i in 0..=20 {
            let g = s_growth(n, &cc, end * i as f64 / 20.0).unwrap();
            prop_assert!(g >= prev - 1e-15);
            prev = g;
        }
        if cc.is_ball() {
            let at_c = s_growth(n, &cc, cc.radius()).unwrap();
            prop_assert!((s_growth(n, &cc, 2.0 * cc.radius() + 1.0).unwrap() - at_c).abs() < 1e-14);
        }
    }

    #[test]
    fn ball_function_round_trips(k in -2.0f64..2.0, l in -2.0f64..3.0, n in 1.5f64..20.0, x in 0.0f64..1.0) {
        let cc = classify(k, l).unwrap();
        prop_assume!(cc.is_ball());
        let b = BallFunction::new(n, &cc).unwrap();
        let r = b.inverse(x).unwrap();
        prop_assert!((b.value(r).unwrap() - x).abs() < 1e-8);
        let r0 = x * b.radius();
        let back = b.inverse(b.value(r0).unwrap()).unwrap();
        prop_assert!((back - r0).abs() < 1e-8 * b.radius().max(1.0));
        prop_assert!(b.value(r0).unwrap() >= b.value((r0 + 0.01 * b.radius()).min(b.radius())).unwrap());
    }

    #[test]
    fn gaussian_tail_matches_erfc_and_is_monotone(k in 0.05f64..5.0, l in -3.0f64..3.0, r in 0.0f64..4.0) {
        let ic = InfiniteCurvature::new(k, l).unwrap();
        let s = gaussian_tail(&ic, r).unwrap();
        prop_assert!((s - gaussian_tail_oracle(k, l, r)).abs() < 1e-10);
        prop_assert!(gaussian_tail(&ic, r + 0.1).unwrap() < s);
        let stiffer = InfiniteCurvature::new(k * 1.5, l).unwrap();
        prop_assert!(gaussian_tail(&stiffer, r).unwrap() <= s + 1e-15);
    }

    #[test]
    fn dilation_scales_inverse(k in -2.0f64..2.0, l in 0.1f64..3.0, c in 0.2f64..5.0, eta in 0.05f64..0.95) {
        let cc = classify(k, l).unwrap();
        prop_assume!(cc.is_ball());
        let base = v_inverse(4.0, &cc, eta).unwrap();
        let scaled = v_inverse(4.0, &cc.scaled(c).unwrap(), eta).unwrap();
        prop_assert!((scaled - c * base).abs() < 1e-9 * c * base.max(1.0));
    }
}
