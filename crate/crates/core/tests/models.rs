mod common;

use bconc::jacobi::{classify, v_inverse, InfiniteCurvature, TwistParams};
use bconc::models::*;
use bconc::screen::{DensityLaw, Screen};
use bconc::Error;
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const LN_2: f64 = std::f64::consts::LN_2;

fn catalog() -> Vec<ModelSpace> {
    vec![
        ModelSpace::Ball { n: 2, kappa: 0.0, lambda: 0.5 },
        ModelSpace::Ball { n: 5, kappa: 1.0, lambda: 0.0 },
        ModelSpace::Ball { n: 3, kappa: 1.0, lambda: -0.7 },
        ModelSpace::Ball { n: 4, kappa: -1.0, lambda: 2.0 },
        ModelSpace::Warped { n: 3, kappa: -1.0, lambda: 1.0 },
        ModelSpace::Warped { n: 6, kappa: -0.25, lambda: 0.5 },
        ModelSpace::HalfGaussian { k: 1.0, lambda: 0.0 },
        ModelSpace::HalfGaussian { k: 2.0, lambda: -1.5 },
        ModelSpace::Exponential { lambda: 1.0 },
        ModelSpace::Exponential { lambda: 0.2 },
        ModelSpace::WeightedWarped71 { n: 3, big_n: 3.0, kappa: -1.0 },
        ModelSpace::WeightedWarped71 { n: 2, big_n: 7.5, kappa: -4.0 },
        ModelSpace::WeightedWarped72 { n: 3, kappa: -1.0, delta: 0.0 },
        ModelSpace::WeightedWarped72 { n: 5, kappa: -2.0, delta: -0.3 },
    ]
}

fn pdf(m: &ModelSpace) -> impl Fn(f64) -> f64 {
    let Screen::Closed(c) = m.boundary_screen().unwrap() else { panic!("models are closed screens") };
    move |t| c.pdf(t)
}

#[test]
fn boundary_densities() {
    let e = pdf(&ModelSpace::Exponential { lambda: 1.0 });
    for t in [0.0, 0.3, 2.0, 7.0] {
        assert!((e(t) - (-t).exp()).abs() < 1e-14);
    }
    let b = pdf(&ModelSpace::Ball { n: 2, kappa: 0.0, lambda: 0.5 });
    for t in [0.0, 0.5, 1.0, 1.9] {
        assert!((b(t) - (1.0 - t / 2.0)).abs() < 1e-12);
    }
    assert_eq!(b(2.5), 0.0);
    let w = pdf(&ModelSpace::Warped { n: 4, kappa: -1.0, lambda: 1.0 });
    for t in [0.0, 0.5, 3.0] {
        assert!((w(t) - 3.0 * (-3.0 * t).exp()).abs() < 1e-12);
    }
}

#[test]
fn weighted_examples_are_normalised() {
    let m = ModelSpace::WeightedWarped72 { n: 3, kappa: -1.0, delta: 0.0 };
    assert!((m.total_mass().unwrap() - 1.0).abs() < 1e-8);
    for m in catalog() {
        assert!((m.total_mass().unwrap() - 1.0).abs() < 1e-9, "{m:?}");
    }
}

#[test]
fn twisted_weight_density_matches_displayed_weight() {
    // The displayed θ is e^{C_n} e^{-a(t+1)²/2} with a = (n-1)λe^{-2δ}; the
    // oracle normalises it with Simpson's rule.
    let (n, lambda, delta): (f64, f64, f64) = (3.0, 1.0, 0.2);
    let a = (n - 1.0) * lambda * (-2.0 * delta).exp();
    let theta = |t: f64| (-a * (t + 1.0) * (t + 1.0) / 2.0).exp();
    let z = simpson(theta, 0.0, 30.0, 200_000);
    let got = pdf(&ModelSpace::WeightedWarped72 { n: 3, kappa: -1.0, delta });
    for t in [0.0, 0.4, 1.3] {
        assert!((got(t) - theta(t) / z).abs() < 1e-10);
    }
}

#[test]
fn closed_form_examples() {
    let w = ModelSpace::Warped { n: 3, kappa: -1.0, lambda: 1.0 };
    assert!((w.closed_form_obs_inradius(0.5).unwrap() - 0.5 * LN_2).abs() < 1e-15);
    let b = ModelSpace::Ball { n: 2, kappa: 0.0, lambda: 0.5 };
    assert!((b.closed_form_obs_inradius(0.25).unwrap() - 1.0).abs() < 1e-12);
    for m in catalog() {
        assert!(m.closed_form_obs_inradius(1.0).unwrap().abs() < 1e-12, "{m:?}");
        assert!(m.closed_form_obs_inradius(0.0).is_err());
        assert!(m.closed_form_obs_inradius(1.01).is_err());
    }
}

#[test]
fn euclidean_balls_match_their_root_formula() {
    for n in [2u32, 3, 7] {
        let lambda = 0.8;
        let m = ModelSpace::Ball { n, kappa: 0.0, lambda: lambda / n as f64 };
        for eta in [0.1f64, 0.5, 0.9] {
            let want = n as f64 / lambda * (1.0 - eta.powf(1.0 / n as f64));
            assert!((m.closed_form_obs_inradius(eta).unwrap() - want).abs() < 1e-11);
        }
    }
}

#[test]
fn invalid_models_are_rejected() {
    let bad = [
        ModelSpace::Ball { n: 3, kappa: -1.0, lambda: 0.5 },
        ModelSpace::Ball { n: 1, kappa: 0.0, lambda: 1.0 },
        ModelSpace::Warped { n: 3, kappa: -1.0, lambda: 0.9 },
        ModelSpace::Warped { n: 3, kappa: 1.0, lambda: 1.0 },
        ModelSpace::HalfGaussian { k: 0.0, lambda: 1.0 },
        ModelSpace::Exponential { lambda: 0.0 },
        ModelSpace::WeightedWarped71 { n: 3, big_n: 2.5, kappa: -1.0 },
        ModelSpace::WeightedWarped72 { n: 3, kappa: 0.0, delta: 0.0 },
    ];
    for m in bad {
        assert!(matches!(m.boundary_screen(), Err(Error::Domain(_))), "{m:?}");
    }
}

#[test]
fn pipeline_matches_closed_forms() {
    for m in catalog() {
        let screen = m.boundary_screen().unwrap();
        for i in 1..=19 {
            let eta = 0.05 * i as f64;
            let pipe = screen.obs_inradius(eta).unwrap();
            assert!(pipe.is_exact());
            let closed = m.closed_form_obs_inradius(eta).unwrap();
            assert!((pipe.upper - closed).abs() < 1e-8, "{m:?} η = {eta}: {} vs {closed}", pipe.upper);
        }
    }
}

#[test]
fn weighted_warped_closed_form() {
    for (n, big_n, kappa) in [(2, 2.0, -1.0), (3, 4.5, -0.5), (10, 30.0, -2.0)] {
        let m = ModelSpace::WeightedWarped71 { n, big_n, kappa };
        let screen = m.boundary_screen().unwrap();
        for eta in [0.01f64, 0.3, 0.77] {
            let want = (1.0 / eta).ln() / ((big_n - 1.0) * (-kappa).sqrt());
            assert!((screen.obs_inradius(eta).unwrap().upper - want).abs() < 1e-8);
        }
    }
}

#[test]
fn comparison_examples() {
    for (n, kappa, lambda) in [(3u32, 1.0, 0.0), (2, 0.0, 0.5), (5, -1.0, 3.0)] {
        let kind = ComparisonKind::FiniteN { n: n as f64, curvature: classify(kappa, lambda).unwrap() };
        let model = ModelSpace::Ball { n, kappa, lambda };
        for eta in [0.1, 0.6] {
            let bound = comparison_bound(&kind, eta).unwrap();
            assert_eq!(bound, model.closed_form_obs_inradius(eta).unwrap());
        }
    }
    let inf = ComparisonKind::Infinite(InfiniteCurvature::new(0.0, 2.0).unwrap());
    assert!((comparison_bound(&inf, (-2.0f64).exp()).unwrap() - 1.0).abs() < 1e-14);

    let twisted = ComparisonKind::Twisted(TwistParams::new(3.0, 0.0, 1.0, 0.5).unwrap());
    let eff = classify(0.0, (-1.0f64).exp()).unwrap();
    for eta in [0.2, 0.5, 0.9] {
        let want = v_inverse(3.0, &eff, eta).unwrap();
        assert!((comparison_bound(&twisted, eta).unwrap() - want).abs() < 1e-13);
    }
    assert_eq!(comparison_bound(&twisted, 1.0).unwrap(), 0.0);

    let horo = ComparisonKind::Twisted(TwistParams::new(4.0, -1.0, 1.0, 0.25).unwrap());
    let want = LN_2 / (3.0 * (-0.5f64).exp());
    assert!((comparison_bound(&horo, 0.5).unwrap() - want).abs() < 1e-14);
}

#[test]
fn uncovered_regimes_have_no_comparison() {
    let kinds = [
        ComparisonKind::FiniteN { n: 3.0, curvature: classify(-1.0, 0.5).unwrap() },
        ComparisonKind::Twisted(TwistParams::new(3.0, 1.0, -0.5, 0.0).unwrap()),
        ComparisonKind::Infinite(InfiniteCurvature::new(-1.0, 5.0).unwrap()),
        ComparisonKind::Infinite(InfiniteCurvature::new(0.0, 0.0).unwrap()),
    ];
    for kind in kinds {
        assert!(matches!(comparison_bound(&kind, 0.5), Err(Error::NoComparison(_))), "{kind:?}");
        assert!(matches!(AdmissibleGenerator::new(&kind), Err(Error::NoComparison(_))));
    }
}

#[test]
fn volume_audit_examples() {
    let cc = classify(1.0, 0.3).unwrap();
    let kind = ComparisonKind::FiniteN { n: 4.0, curvature: cc };
    let law = DensityLaw::JacobiPower { n: 4.0, kappa: 1.0, lambda: 0.3 };
    let c = cc.radius();
    for (r, big_r) in [(0.1, 0.2), (0.3, c), (c / 2.0, c / 2.0)] {
        let audit = volume_ratio_audit(&law, &kind, r, big_r).unwrap();
        assert!(audit.satisfied);
        assert!((audit.lhs - audit.rhs).abs() < 1e-9 * audit.rhs);
    }

    let m = ModelSpace::WeightedWarped72 { n: 3, kappa: -1.0, delta: 0.1 };
    let a = 2.0 * (-0.2f64).exp();
    let inf = ComparisonKind::Infinite(InfiniteCurvature::new(a, a).unwrap());
    for (r, big_r) in [(0.05, 0.5), (0.5, 3.0)] {
        assert!(volume_ratio_audit(&m.density_law().unwrap(), &inf, r, big_r).unwrap().satisfied);
    }

    let g = DensityLaw::HalfGaussian { k: 1.0, lambda: 1.0 };
    let unit = ComparisonKind::Infinite(InfiniteCurvature::new(1.0, 1.0).unwrap());
    let audit = volume_ratio_audit(&g, &unit, 0.4, 2.2).unwrap();
    assert!((audit.lhs - audit.rhs).abs() < 1e-9 * audit.rhs);

    assert!(matches!(volume_ratio_audit(&g, &unit, 0.0, 1.0), Err(Error::Domain(_))));
    assert!(volume_ratio_audit(&g, &unit, 2.0, 1.0).is_err());
}

#[test]
fn descriptors_round_trip() {
    let m = ModelSpace::from_json(r#"{"tag": "weighted_warped_71", "n": 3, "N": 5.5, "kappa": -1}"#).unwrap();
    assert_eq!(m, ModelSpace::WeightedWarped71 { n: 3, big_n: 5.5, kappa: -1.0 });
    for m in catalog() {
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(ModelSpace::from_json(&text).unwrap(), m);
    }
    assert!(ModelSpace::from_json(r#"{"tag": "ball", "n": 3}"#).is_err());
    assert!(ModelSpace::from_json(r#"{"tag": "half_gaussian", "k": -1, "lambda": 0}"#).is_err());
}

fn comparison_kind() -> impl Strategy<Value = ComparisonKind> {
    prop_oneof![
        (2.0f64..8.0, 0.1f64..2.0, -1.0f64..1.5).prop_map(|(n, k, l)| {
            ComparisonKind::FiniteN { n, curvature: classify(k, l).unwrap() }
        }),
        (2.0f64..8.0, 0.0f64..1.0, 0.2f64..2.0).prop_map(|(n, a, l)| {
            ComparisonKind::FiniteN { n, curvature: classify(-a * a, a + l).unwrap() }
        }),
        (2.0f64..8.0, 0.1f64..1.5).prop_map(|(n, a)| {
            ComparisonKind::FiniteN { n, curvature: classify(-a * a, a).unwrap() }
        }),
        (2.0f64..6.0, -0.5f64..1.0, 0.0f64..1.5, -0.3f64..0.5).prop_map(|(n, k, l, d)| {
            let l = if k < 0.0 { (-k).sqrt() + l } else { l };
            ComparisonKind::Twisted(TwistParams::new(n, k, l, d).unwrap())
        }),
        (0.1f64..3.0, -2.0f64..2.0).prop_map(|(k, l)| {
            ComparisonKind::Infinite(InfiniteCurvature::new(k, l).unwrap())
        }),
        (0.2f64..3.0).prop_map(|l| ComparisonKind::Infinite(InfiniteCurvature::new(0.0, l).unwrap())),
    ]
}

fn model_ln_density(kind: &ComparisonKind, t: f64) -> f64 {
    match kind {
        ComparisonKind::FiniteN { n, curvature } => (n - 1.0) * curvature.profile(t).ln(),
        ComparisonKind::Twisted(tp) => (tp.n - 1.0) * tp.effective().unwrap().profile(t).ln(),
        ComparisonKind::Infinite(ic) => -(0.5 * ic.k * t * t + ic.lambda * t),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampled_densities_satisfy_the_ratio_bound(kind in comparison_kind(), seed in any::<u64>()) {
        let gen = AdmissibleGenerator::new(&kind).unwrap();
        let law = gen.sample(&mut ChaCha8Rng::seed_from_u64(seed));
        let Screen::Closed(c) = Screen::closed(law).unwrap() else { unreachable!() };
        let reach = gen.reach();
        let grid: Vec<f64> = (0..60).map(|i| reach * i as f64 / 60.0).collect();
        for (i, &t1) in grid.iter().enumerate() {
            let p1 = c.pdf(t1);
            prop_assume!(p1 > 0.0 || i > 0);
            if p1 == 0.0 {
                break;
            }
            for &t2 in &grid[i + 1..] {
                let lhs = c.pdf(t2) / p1;
                let rhs = (model_ln_density(&kind, t2) - model_ln_density(&kind, t1)).exp();
                prop_assert!(lhs <= rhs * (1.0 + 1e-9), "t1 = {t1}, t2 = {t2}: {lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn comparison_sandwich(kind in comparison_kind(), seed in any::<u64>()) {
        let gen = AdmissibleGenerator::new(&kind).unwrap();
        let screen = Screen::closed(gen.sample(&mut ChaCha8Rng::seed_from_u64(seed))).unwrap();
        for eta in [0.05, 0.2, 0.5, 0.8, 0.99] {
            let obs = screen.obs_inradius(eta).unwrap();
            let bound = comparison_bound(&kind, eta).unwrap();
            prop_assert!(obs.upper <= bound + 1e-9 * bound.max(1.0), "η = {eta}: {} > {bound}", obs.upper);
        }
    }

    #[test]
    fn sampled_densities_pass_the_volume_audit(kind in comparison_kind(), seed in any::<u64>(), a in 0.02f64..1.0, b in 0.02f64..1.0) {
        let gen = AdmissibleGenerator::new(&kind).unwrap();
        let law = gen.sample(&mut ChaCha8Rng::seed_from_u64(seed));
        let (r, big_r) = if a < b { (a, b) } else { (b, a) };
        let audit = volume_ratio_audit(&law, &kind, r * gen.reach(), big_r * gen.reach()).unwrap();
        prop_assert!(audit.satisfied, "{audit:?}");
    }
}
