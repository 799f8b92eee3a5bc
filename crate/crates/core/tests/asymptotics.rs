mod common;

use bconc::asymptotics::*;
use bconc::jacobi::{classify, v_inverse};
use bconc::screen::ks_distance;
use bconc::Error;
use common::*;
use proptest::prelude::*;
use std::f64::consts::LN_2;

fn doubling(from: u32, to: u32) -> Vec<u32> {
    std::iter::successors(Some(from), |n| Some(n * 2)).take_while(|&n| n <= to).collect()
}

/// Quantile of the half-normal law with variance `1/κ` at upper tail `η`.
fn half_normal_upper_quantile(kappa: f64, eta: f64) -> f64 {
    bisect(|r| erfc(r * (kappa / 2.0).sqrt()) - eta, 0.0, 40.0)
}

/// `v^{-1}(η)` for `B^n_{κ/n,0}` by Simpson quadrature of `cos^{n-1}`.
fn hemisphere_oracle(kappa: f64, n: u32, eta: f64) -> f64 {
    let a = (kappa / n as f64).sqrt();
    let c = std::f64::consts::FRAC_PI_2 / a;
    let s = |t: f64| (a * t).cos().max(0.0).powi(n as i32 - 1);
    let total = simpson(s, 0.0, c, 20_000);
    bisect(|r| simpson(s, r, c, 20_000) / total - eta, 0.0, c)
}

#[test]
fn hemisphere_examples() {
    let report = hemisphere_sweep(1.0, 0.5, &[8, 64]).unwrap();
    let limit = report.rows[0].limit;
    assert!((limit - 0.674490).abs() < 1e-6, "{limit}");
    assert!((limit - half_normal_upper_quantile(1.0, 0.5)).abs() < 1e-9);
    for row in &report.rows {
        let oracle = hemisphere_oracle(1.0, row.n, 0.5);
        assert!((row.value - oracle).abs() < 1e-7, "n = {}: {} vs {oracle}", row.n, row.value);
        assert!((row.value - row.check.unwrap()).abs() < 1e-8);
        assert_eq!(row.gap, (row.value - row.limit).abs());
    }
    assert!(matches!(hemisphere_sweep(1.0, 0.5, &[1]), Err(Error::Domain(_))));
    assert!(hemisphere_sweep(0.0, 0.5, &[4]).is_err());
    for eta in [0.25, 0.5, 0.75] {
        let r = hemisphere_sweep(1.0, eta, &[100, 400]).unwrap();
        assert!(r.rows[1].gap < r.rows[0].gap, "η = {eta}");
    }
}

#[test]
fn hemisphere_small_eta_crosses_the_limit() {
    let r = hemisphere_sweep(1.0, 0.1, &[4, 8]).unwrap();
    assert!(r.rows[0].value < r.rows[0].limit);
    assert!(r.rows[1].value > r.rows[1].limit);
}

#[test]
fn hemisphere_gap_shrinks_along_doubling() {
    let ns = doubling(8, 512);
    for eta in [0.25, 0.5, 0.75] {
        let r = hemisphere_sweep(1.0, eta, &ns).unwrap();
        assert_eq!(r.verdict, Verdict::ConvergesToLimit, "η = {eta}");
        assert!(r.rows.last().unwrap().gap < 5e-3);
    }
}

#[test]
fn euclid_examples() {
    let r = euclid_ball_sweep(1.0, (-1.0f64).exp(), &[2, 4096]).unwrap();
    assert!((r.rows[0].limit - 1.0).abs() < 1e-15);
    let one = euclid_ball_sweep(2.0, 0.3, &[1]).unwrap();
    assert!((one.rows[0].value - 0.7 / 2.0).abs() < 1e-15);
    let big = euclid_ball_sweep(1.0, 0.5, &[1000]).unwrap();
    let diff = big.rows[0].value - LN_2;
    // The finite-n value sits below its limit: (n/λ)(1 - e^{-x/n}) < x/λ.
    assert!(diff < 0.0 && diff.abs() < 3e-4, "{diff}");
    let expected = -(LN_2 * LN_2) / 2000.0;
    assert!((diff - expected).abs() < 1e-6);
}

#[test]
fn euclid_matches_v_inverse_and_expansion() {
    for lambda in [0.5, 1.0, 3.0] {
        for eta in [0.1, 0.5, 0.9] {
            let ns: Vec<u32> = (1..=512).collect();
            let r = euclid_ball_sweep(lambda, eta, &ns).unwrap();
            let log = (1.0 / eta).ln();
            for row in &r.rows {
                let oracle = (row.n as f64 / lambda) * (1.0 - eta.powf(1.0 / row.n as f64));
                assert!((row.value - oracle).abs() < 1e-12 * (1.0 + oracle));
                if let Some(check) = row.check {
                    assert!((row.value - check).abs() < 1e-9, "n = {}", row.n);
                }
                if row.n >= 32 {
                    assert!(row.gap <= log * log / (2.0 * row.n as f64 * lambda) * 1.1);
                }
            }
            assert_eq!(r.verdict, Verdict::ConvergesToLimit);
        }
    }
}

#[test]
fn warped_examples() {
    let r = warped_sweep(-1.0, 0.5, &[2, 3, 10, 100]).unwrap();
    assert!((r.rows[0].value - 2.0 * LN_2).abs() < 1e-14);
    assert!((r.rows[0].limit - LN_2).abs() < 1e-15);
    for w in r.rows.windows(2) {
        assert!(w[1].value < w[0].value);
    }
    for row in &r.rows {
        assert!(row.value > row.limit);
        assert!((row.value - row.check.unwrap()).abs() < 1e-8);
    }
    assert!(warped_sweep(1.0, 0.5, &[4]).is_err());
}

#[test]
fn distribution_laws_converge() {
    let ns: Vec<u32> = doubling(5, 320);
    let laws = [
        LimitLaw::EuclidBall { lambda: 1.0 },
        LimitLaw::Hemisphere { kappa: 1.0 },
        LimitLaw::Warped { kappa: -1.0 },
    ];
    for law in laws {
        let ks: Vec<f64> = ns.iter().map(|&n| distribution_law(law, n).unwrap().1).collect();
        for w in ks.windows(2) {
            assert!(w[1] < w[0], "{law:?}: {ks:?}");
        }
        assert!(distribution_law(law, 256).unwrap().1 < 0.01);
        let (screen, _) = distribution_law(law, 40).unwrap();
        assert_eq!(ks_distance(&screen, &screen), 0.0);
    }
}

#[test]
fn euclid_law_ks_matches_dense_grid() {
    for n in [5u32, 20, 80] {
        let nf = n as f64;
        let dense = (0..=200_000)
            .map(|i| i as f64 * nf / 200_000.0)
            .map(|t| ((1.0 - t / nf).powf(nf) - (-t).exp()).abs())
            .fold(0.0, f64::max);
        let ks = distribution_law(LimitLaw::EuclidBall { lambda: 1.0 }, n).unwrap().1;
        assert!((ks - dense).abs() < 1e-6, "n = {n}: {ks} vs {dense}");
    }
}

#[test]
fn warped_law_ks_matches_exponential_pair() {
    // Rates (n - 1)/n and 1: sup |e^{-at} - e^{-t}| is attained at t = log(a)/(a - 1).
    for n in [4u32, 32] {
        let a = (n as f64 - 1.0) / n as f64;
        let t = a.ln() / (a - 1.0);
        let exact = (-a * t).exp() - (-t).exp();
        let ks = distribution_law(LimitLaw::Warped { kappa: -1.0 }, n).unwrap().1;
        assert!((ks - exact).abs() < 1e-6, "{ks} vs {exact}");
    }
}

#[test]
fn classification_examples() {
    let ns = doubling(4, 4096);
    let sqrt = Family::EuclidBall { lambda: Schedule::Power { coef: 1.0, exp: -0.5 } };
    let r = classify_concentration(&sqrt, 0.5, &ns).unwrap();
    assert_eq!(r.verdict, Verdict::ConcentratesToZero);
    assert_eq!(r.analytic, Some(Verdict::ConcentratesToZero));
    assert!(r.quartile_ratio < 0.5);

    let inv = Family::EuclidBall { lambda: Schedule::Power { coef: 1.0, exp: -1.0 } };
    let r = classify_concentration(&inv, 0.5, &ns).unwrap();
    assert_eq!(r.verdict, Verdict::BoundedAway);
    for row in &r.rows {
        let fixed = v_inverse(row.n as f64, &classify(0.0, 1.0 / row.n as f64).unwrap(), 0.5).unwrap();
        assert!((row.value - fixed).abs() < 1e-9);
        assert!((row.value - LN_2).abs() < 0.2);
    }

    let outside = Family::GeneralBall { kappa: Schedule::constant(1.0), lambda: Schedule::constant(-0.5) };
    let r = classify_concentration(&outside, 0.5, &doubling(4, 256)).unwrap();
    assert_eq!(r.verdict, Verdict::BoundedAway);

    let convex = Family::GeneralBall { kappa: Schedule::constant(1.0), lambda: Schedule::constant(0.5) };
    assert_eq!(classify_concentration(&convex, 0.5, &ns).unwrap().verdict, Verdict::ConcentratesToZero);

    let hemi = Family::Hemisphere { kappa: Schedule::Power { coef: 1.0, exp: -0.5 } };
    assert_eq!(classify_concentration(&hemi, 0.5, &ns).unwrap().verdict, Verdict::ConcentratesToZero);
    let hemi = Family::Hemisphere { kappa: Schedule::Power { coef: 1.0, exp: -1.0 } };
    assert_eq!(classify_concentration(&hemi, 0.5, &ns).unwrap().verdict, Verdict::BoundedAway);

    let warped = Family::WarpedHoro { kappa: Schedule::Power { coef: -1.0, exp: -2.0 } };
    let r = classify_concentration(&warped, 0.5, &ns).unwrap();
    assert_eq!(r.verdict, Verdict::BoundedAway);
    let warped = Family::WarpedHoro { kappa: Schedule::constant(-1.0) };
    assert_eq!(classify_concentration(&warped, 0.5, &ns).unwrap().verdict, Verdict::ConcentratesToZero);
}

#[test]
fn weighted_families() {
    let ns = doubling(4, 1024);
    let ww71 = Family::WeightedWarped71 { big_n: Schedule::Power { coef: 2.0, exp: 1.0 }, kappa: Schedule::Power { coef: -1.0, exp: -2.0 } };
    let r = classify_concentration(&ww71, 0.5, &ns).unwrap();
    assert_eq!(r.verdict, Verdict::BoundedAway);
    for row in &r.rows {
        let nf = row.n as f64;
        assert!((row.value - LN_2 / ((2.0 * nf - 1.0) / nf)).abs() < 1e-12);
    }
    let ww71 = Family::WeightedWarped71 { big_n: Schedule::Power { coef: 1.0, exp: 2.0 }, kappa: Schedule::Power { coef: -1.0, exp: -2.0 } };
    assert_eq!(classify_concentration(&ww71, 0.5, &ns).unwrap().verdict, Verdict::ConcentratesToZero);

    let ww72 = Family::WeightedWarped72 { kappa: Schedule::constant(-1.0), delta: Schedule::constant(0.5) };
    assert_eq!(classify_concentration(&ww72, 0.5, &ns).unwrap().verdict, Verdict::ConcentratesToZero);
    let ww72 = Family::WeightedWarped72 { kappa: Schedule::constant(-1.0), delta: Schedule::Power { coef: 1.0, exp: 1.0 } };
    assert_eq!(ww72.analytic_criterion(), Some(false));
}

#[test]
fn numeric_trend_without_analytic_criterion() {
    let table = |f: &dyn Fn(u32) -> f64, ns: &[u32]| Schedule::Table { values: ns.iter().map(|&n| (n, f(n))).collect() };
    let ns = doubling(4, 1024);
    let growing = Family::EuclidBall { lambda: table(&|n| (n as f64).sqrt(), &ns) };
    let r = classify_concentration(&growing, 0.5, &ns).unwrap();
    assert_eq!(r.analytic, None);
    assert_eq!(r.verdict, Verdict::ConcentratesToZero);

    let zigzag = Family::EuclidBall { lambda: table(&|n| if n.trailing_zeros() % 2 == 0 { 1.0 / n as f64 } else { 1.0 }, &ns) };
    assert_eq!(classify_concentration(&zigzag, 0.5, &ns).unwrap().verdict, Verdict::Inconclusive);
}

#[test]
fn regime_violations_name_the_dimension() {
    let mut values = std::collections::BTreeMap::new();
    values.insert(4, 1.0);
    values.insert(8, -1.0);
    let bad = Family::Hemisphere { kappa: Schedule::Table { values } };
    let err = classify_concentration(&bad, 0.5, &[4, 8]).unwrap_err();
    assert!(matches!(&err, Error::Domain(m) if m.contains("n = 8")), "{err}");
    let missing = Family::EuclidBall { lambda: Schedule::Table { values: [(4, 1.0)].into_iter().collect() } };
    let err = classify_concentration(&missing, 0.5, &[4, 16]).unwrap_err();
    assert!(err.to_string().contains("n = 16"), "{err}");
    let unbounded = Family::GeneralBall { kappa: Schedule::constant(-1.0), lambda: Schedule::constant(0.5) };
    let err = classify_concentration(&unbounded, 0.5, &[4]).unwrap_err();
    assert!(err.to_string().contains("n = 4"), "{err}");
}

#[test]
fn report_serialisation() {
    let r = euclid_ball_sweep(1.0, 0.5, &[2, 4]).unwrap();
    let csv = r.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,value,limit,gap"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
    assert_eq!(first[0], 2.0);
    assert_eq!(first[1], r.rows[0].value);
    let back: SweepReport = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(back, r);
    let cfg = SweepConfig::from_json(r#"{"sweep": "euclid_ball", "lambda": 1, "eta": 0.5, "n": [2, 4]}"#).unwrap();
    assert_eq!(cfg.run().unwrap(), r);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convex_ball_below_hemisphere(kappa in 0.05f64..4.0, lambda in 0.0f64..3.0, n in 2u32..=64, eta in 0.05f64..0.95) {
        let convex = v_inverse(n as f64, &classify(kappa, lambda).unwrap(), eta).unwrap();
        let hemi = v_inverse(n as f64, &classify(kappa, 0.0).unwrap(), eta).unwrap();
        prop_assert!(convex <= hemi * (1.0 + 1e-9));
    }

    #[test]
    fn ball_below_horospherical(kappa in -4.0f64..-0.01, extra in 0.0f64..3.0, n in 2u32..=64, eta in 0.05f64..0.95) {
        let lambda = (-kappa).sqrt() + extra + 1e-6;
        let ball = v_inverse(n as f64, &classify(kappa, lambda).unwrap(), eta).unwrap();
        let horo = (1.0 / eta).ln() / ((n as f64 - 1.0) * (-kappa).sqrt());
        prop_assert!(ball <= horo * (1.0 + 1e-9));
    }

    #[test]
    fn sweeps_nonincreasing_in_eta(kappa in 0.1f64..3.0, lambda in 0.1f64..3.0, n in 2u32..200, e1 in 0.1f64..0.9, de in 0.0f64..0.09) {
        let e2 = e1 + de;
        let pairs = [
            (hemisphere_sweep(kappa, e1, &[n]).unwrap(), hemisphere_sweep(kappa, e2, &[n]).unwrap()),
            (euclid_ball_sweep(lambda, e1, &[n]).unwrap(), euclid_ball_sweep(lambda, e2, &[n]).unwrap()),
            (warped_sweep(-kappa, e1, &[n]).unwrap(), warped_sweep(-kappa, e2, &[n]).unwrap()),
        ];
        for (a, b) in pairs {
            prop_assert!(b.rows[0].value <= a.rows[0].value * (1.0 + 1e-12));
        }
    }

    #[test]
    fn hemisphere_trend_monotone(eta_idx in 1usize..10) {
        let eta = eta_idx as f64 / 10.0;
        // At η = 0.1 the finite-n value crosses the limit between n = 4 and n = 8.
        let first = if eta_idx == 1 { 32 } else { 4 };
        let r = hemisphere_sweep(1.0, eta, &doubling(first, 256)).unwrap();
        for row in &r.rows {
            prop_assert!(row.value.is_finite() && row.value > 0.0);
        }
        prop_assert_eq!(r.verdict, Verdict::ConvergesToLimit);
    }
}
