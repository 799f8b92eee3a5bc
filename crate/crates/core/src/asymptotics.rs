//! Dimension sweeps of the model spaces.
//!
//! Three canonical sequences have explicit limits as the dimension grows:
//! hemispheres `B^n_{κ/n,0}` tend to the half-Gaussian `G_{κ,0}`, Euclidean
//! balls `B^n_{0,λ/n}` and warped spaces `M^n_{κ/n²,λ/n}` tend to the
//! exponential `E_λ`. Sweeps tabulate the observable inscribed radius
//! against the limit. General parameter schedules are classified as
//! boundary concentration families or not, from the analytic criterion
//! when the schedule is a power law and from the numeric trend otherwise.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{domain, input, Error, Result};
use crate::jacobi::{classify, v_inverse};
use crate::models::ModelSpace;
use crate::screen::{ks_distance, DensityLaw, Screen};

/// A parameter as a function of the dimension `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Schedule {
    /// `coef · n^exp`.
    Power { coef: f64, exp: f64 },
    /// Explicit values keyed by `n`.
    Table {
        #[serde(deserialize_with = "table_keys")]
        values: BTreeMap<u32, f64>,
    },
}

fn table_keys<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<BTreeMap<u32, f64>, D::Error> {
    let raw = BTreeMap::<String, f64>::deserialize(d)?;
    raw.into_iter()
        .map(|(k, v)| k.parse().map(|n| (n, v)).map_err(|_| serde::de::Error::custom(format!("table key {k:?} is not a dimension"))))
        .collect()
}

impl Schedule {
    pub fn constant(value: f64) -> Self {
        Schedule::Power { coef: value, exp: 0.0 }
    }

    pub fn at(&self, n: u32) -> Result<f64> {
        match self {
            Schedule::Power { coef, exp } => Ok(coef * (n as f64).powf(*exp)),
            Schedule::Table { values } => values
                .get(&n)
                .copied()
                .ok_or_else(|| input(format!("the schedule has no value for n = {n}"))),
        }
    }

    /// `Some((coef, exp))` for power laws, with constant tables read as `exp = 0`.
    fn power(&self) -> Option<(f64, f64)> {
        match self {
            Schedule::Power { coef, exp } => Some((*coef, *exp)),
            Schedule::Table { values } => {
                let first = *values.values().next()?;
                values.values().all(|&v| v == first).then_some((first, 0.0))
            }
        }
    }
}

/// A sequence of model spaces indexed by the dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `B^n_{κ_n, 0}` with `κ_n > 0`.
    Hemisphere {
        #[serde(alias = "schedule")]
        kappa: Schedule,
    },
    /// `B^n_{0, λ_n}` with `λ_n > 0`.
    EuclidBall {
        #[serde(alias = "schedule")]
        lambda: Schedule,
    },
    /// `M^n_{κ_n, √|κ_n|}` with `κ_n < 0`.
    WarpedHoro {
        #[serde(alias = "schedule")]
        kappa: Schedule,
    },
    /// `B^n_{κ_n, λ_n}` in the ball regime.
    GeneralBall { kappa: Schedule, lambda: Schedule },
    /// The weighted warped half-spaces of effective dimension `N_n ≥ n`.
    #[serde(rename = "weighted_warped_71")]
    WeightedWarped71 {
        #[serde(rename = "N")]
        big_n: Schedule,
        kappa: Schedule,
    },
    /// The doubly warped half-spaces with twist bound `δ_n`.
    #[serde(rename = "weighted_warped_72")]
    WeightedWarped72 { kappa: Schedule, delta: Schedule },
}

impl Family {
    /// The `n`-th member, checked against the family's regime.
    pub fn model(&self, n: u32) -> Result<ModelSpace> {
        let at = |s: &Schedule| s.at(n);
        let m = match self {
            Family::Hemisphere { kappa } => {
                let k = at(kappa)?;
                if !(k > 0.0) {
                    return Err(domain(format!("hemisphere needs κ_n > 0, got {k} at n = {n}")));
                }
                ModelSpace::Ball { n, kappa: k, lambda: 0.0 }
            }
            Family::EuclidBall { lambda } => ModelSpace::Ball { n, kappa: 0.0, lambda: at(lambda)? },
            Family::WarpedHoro { kappa } => {
                let k = at(kappa)?;
                ModelSpace::Warped { n, kappa: k, lambda: (-k).sqrt() }
            }
            Family::GeneralBall { kappa, lambda } => ModelSpace::Ball { n, kappa: at(kappa)?, lambda: at(lambda)? },
            Family::WeightedWarped71 { big_n, kappa } => ModelSpace::WeightedWarped71 { n, big_n: at(big_n)?, kappa: at(kappa)? },
            Family::WeightedWarped72 { kappa, delta } => ModelSpace::WeightedWarped72 { n, kappa: at(kappa)?, delta: at(delta)? },
        };
        m.validate().map_err(|e| match e {
            Error::Domain(msg) => Error::Domain(format!("at n = {n}: {msg}")),
            other => other,
        })?;
        Ok(m)
    }

    /// Whether the family concentrates, when decidable from the schedule
    /// alone. Each family concentrates exactly when a scale quantity
    /// diverges (`nκ_n`, `nλ_n`, `n√|κ_n|`, `(N_n - 1)√|κ_n|` or
    /// `(n - 1)√|κ_n| e^{-2δ_n}`); for power laws its growth exponent decides.
    /// Fixed balls concentrate exactly under the convex-ball condition.
    pub fn analytic_criterion(&self) -> Option<bool> {
        let exponent = match self {
            Family::Hemisphere { kappa } => 1.0 + kappa.power()?.1,
            Family::EuclidBall { lambda } => 1.0 + lambda.power()?.1,
            Family::WarpedHoro { kappa } => 1.0 + kappa.power()?.1 / 2.0,
            Family::GeneralBall { kappa, lambda } => {
                let ((k, pk), (l, pl)) = (kappa.power()?, lambda.power()?);
                if pk != 0.0 || pl != 0.0 {
                    return None;
                }
                return Some(classify(k, l).ok()?.is_convex_ball());
            }
            Family::WeightedWarped71 { big_n, kappa } => {
                let ((c, p), (_, pk)) = (big_n.power()?, kappa.power()?);
                let growth = if p > 0.0 { p } else if c > 1.0 { 0.0 } else { return None };
                growth + pk / 2.0
            }
            Family::WeightedWarped72 { kappa, delta } => {
                let ((_, pk), (cd, pd)) = (kappa.power()?, delta.power()?);
                if pd > 0.0 && cd != 0.0 {
                    // e^{-2δ_n} dominates every power of n.
                    return Some(cd < 0.0);
                }
                1.0 + pk / 2.0
            }
        };
        Some(exponent > 0.0)
    }
}

/// Outcome of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    ConvergesToLimit,
    ConcentratesToZero,
    BoundedAway,
    Inconclusive,
}

/// One dimension of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: u32,
    pub value: f64,
    pub limit: f64,
    /// `|value - limit|`.
    pub gap: f64,
    /// The same value by an independent route, when one exists.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub check: Option<f64>,
}

/// A table of values against their limit, with a verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub eta: f64,
    pub rows: Vec<SweepRow>,
    pub verdict: Verdict,
    /// The verdict implied by the schedule alone, if decidable.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub analytic: Option<Verdict>,
    /// Mean of the last quarter of the values over the mean of the first quarter.
    pub quartile_ratio: f64,
}

impl SweepReport {
    fn new(eta: f64, rows: Vec<SweepRow>, verdict: Verdict, analytic: Option<Verdict>) -> Self {
        let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
        SweepReport { eta, quartile_ratio: quartile_ratio(&values), rows, verdict, analytic }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialise")
    }

    /// Columns `n,value,limit,gap`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,value,limit,gap\n");
        for r in &self.rows {
            writeln!(out, "{},{:?},{:?},{:?}", r.n, r.value, r.limit, r.gap).expect("writing to a string");
        }
        out
    }
}

/// Mean of the last quarter over the mean of the first quarter of `values`.
pub fn quartile_ratio(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let q = (values.len() / 4).max(1);
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    mean(&values[values.len() - q..]) / mean(&values[..q])
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("η must lie in (0, 1), got {eta}")))
    }
}

fn check_dims(n_values: &[u32], first: u32) -> Result<()> {
    if n_values.is_empty() {
        return Err(input("a sweep needs at least one dimension"));
    }
    if let Some(n) = n_values.iter().find(|&&n| n < first) {
        return Err(domain(format!("dimensions start at {first}, got {n}")));
    }
    Ok(())
}

fn limit_report(eta: f64, rows: Vec<SweepRow>) -> SweepReport {
    let gaps: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    let decreasing = gaps.windows(2).all(|w| w[1] <= w[0]);
    let verdict = if decreasing && gaps.len() > 1 { Verdict::ConvergesToLimit } else { Verdict::Inconclusive };
    SweepReport::new(eta, rows, verdict, None)
}

/// `ObsInRad(B^n_{κ/n,0}; -η)` against `PartInRad(G_{κ,0}; 1 - η)`.
pub fn hemisphere_sweep(kappa: f64, eta: f64, n_values: &[u32]) -> Result<SweepReport> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(domain(format!("hemisphere sweep needs κ > 0, got {kappa}")));
    }
    check_eta(eta)?;
    check_dims(n_values, 2)?;
    let limit = ModelSpace::HalfGaussian { k: kappa, lambda: 0.0 }.boundary_screen()?.part_inradius(1.0 - eta)?;
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let value = v_inverse(n as f64, &classify(kappa / n as f64, 0.0)?, eta)?;
        let model = ModelSpace::Ball { n, kappa: kappa / n as f64, lambda: 0.0 };
        let check = model.boundary_screen()?.obs_inradius(eta)?.upper;
        rows.push(SweepRow { n, value, limit, gap: (value - limit).abs(), check: Some(check) });
    }
    Ok(limit_report(eta, rows))
}

/// `ObsInRad(B^n_{0,λ/n}; -η) = (n/λ)(1 - η^{1/n})` against `(1/λ) log(1/η)`.
pub fn euclid_ball_sweep(lambda: f64, eta: f64, n_values: &[u32]) -> Result<SweepReport> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(domain(format!("Euclidean ball sweep needs λ > 0, got {lambda}")));
    }
    check_eta(eta)?;
    check_dims(n_values, 1)?;
    let log = (1.0 / eta).ln();
    let limit = log / lambda;
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let nf = n as f64;
        let value = -(nf / lambda) * (-log / nf).exp_m1();
        let check = if n >= 2 { Some(v_inverse(nf, &classify(0.0, lambda / nf)?, eta)?) } else { None };
        rows.push(SweepRow { n, value, limit, gap: (value - limit).abs(), check });
    }
    Ok(limit_report(eta, rows))
}

/// `ObsInRad(M^n_{κ/n²,λ/n}; -η) = n log(1/η)/((n-1)λ)` against `(1/λ) log(1/η)`, `λ = √|κ|`.
pub fn warped_sweep(kappa: f64, eta: f64, n_values: &[u32]) -> Result<SweepReport> {
    if !(kappa < 0.0 && kappa.is_finite()) {
        return Err(domain(format!("warped sweep needs κ < 0, got {kappa}")));
    }
    check_eta(eta)?;
    check_dims(n_values, 2)?;
    let lambda = (-kappa).sqrt();
    let log = (1.0 / eta).ln();
    let limit = log / lambda;
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let nf = n as f64;
        let value = nf * log / ((nf - 1.0) * lambda);
        let model = ModelSpace::Warped { n, kappa: kappa / (nf * nf), lambda: lambda / nf };
        let check = model.boundary_screen()?.obs_inradius(eta)?.upper;
        rows.push(SweepRow { n, value, limit, gap: (value - limit).abs(), check: Some(check) });
    }
    Ok(limit_report(eta, rows))
}

/// The canonical sequences with a limiting boundary-distance law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum LimitLaw {
    /// `B^n_{κ/n,0}`, tending to `G_{κ,0}`.
    Hemisphere { kappa: f64 },
    /// `B^n_{0,λ/n}`, tending to `E_λ`.
    EuclidBall { lambda: f64 },
    /// `M^n_{κ/n²,√|κ|/n}`, tending to `E_{√|κ|}`.
    Warped { kappa: f64 },
}

impl LimitLaw {
    /// The `n`-th model of the sequence.
    pub fn model(&self, n: u32) -> ModelSpace {
        let nf = n as f64;
        match *self {
            LimitLaw::Hemisphere { kappa } => ModelSpace::Ball { n, kappa: kappa / nf, lambda: 0.0 },
            LimitLaw::EuclidBall { lambda } => ModelSpace::Ball { n, kappa: 0.0, lambda: lambda / nf },
            LimitLaw::Warped { kappa } => ModelSpace::Warped { n, kappa: kappa / (nf * nf), lambda: (-kappa).sqrt() / nf },
        }
    }

    /// The limiting law.
    pub fn limit(&self) -> DensityLaw {
        match *self {
            LimitLaw::Hemisphere { kappa } => DensityLaw::HalfGaussian { k: kappa, lambda: 0.0 },
            LimitLaw::EuclidBall { lambda } => DensityLaw::Exponential { rate: lambda },
            LimitLaw::Warped { kappa } => DensityLaw::Exponential { rate: (-kappa).sqrt() },
        }
    }
}

/// The boundary-distance screen of the `n`-th member and its
/// Kolmogorov–Smirnov distance to the limit.
pub fn distribution_law(law: LimitLaw, n: u32) -> Result<(Screen, f64)> {
    if n < 2 {
        return Err(domain(format!("dimensions start at 2, got {n}")));
    }
    let screen = law.model(n).boundary_screen()?;
    let limit = Screen::closed(law.limit())?;
    let ks = ks_distance(&screen, &limit);
    Ok((screen, ks))
}

/// Tabulates `ObsInRad(X_n; -η)` along a family and decides whether it
/// tends to 0.
///
/// The analytic criterion decides whenever the schedule determines it and
/// is never overridden. Otherwise a monotone decrease whose last quarter
/// averages under half the first quarter counts as concentration, a
/// nondecreasing sequence as bounded away, and anything else is
/// inconclusive.
pub fn classify_concentration(family: &Family, eta: f64, n_values: &[u32]) -> Result<SweepReport> {
    check_eta(eta)?;
    check_dims(n_values, 2)?;
    let mut rows = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let value = family.model(n)?.closed_form_obs_inradius(eta)?;
        rows.push(SweepRow { n, value, limit: 0.0, gap: value, check: None });
    }
    let analytic = family.analytic_criterion().map(|c| if c { Verdict::ConcentratesToZero } else { Verdict::BoundedAway });
    let values: Vec<f64> = rows.iter().map(|r| r.value).collect();
    let nonincreasing = values.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let nondecreasing = values.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
    let numeric = if nonincreasing && !nondecreasing && quartile_ratio(&values) < 0.5 {
        Verdict::ConcentratesToZero
    } else if nondecreasing {
        Verdict::BoundedAway
    } else {
        Verdict::Inconclusive
    };
    Ok(SweepReport::new(eta, rows, analytic.unwrap_or(numeric), analytic))
}

/// A sweep described in JSON.
///
/// `{"sweep": "hemisphere" | "euclid_ball" | "warped", "kappa" | "lambda": …, "eta": …, "n": […]}`
/// runs a limit sweep; `{"family": …, <schedules>, "eta": …, "n": […]}` classifies a family.
#[derive(Debug, Clone, PartialEq)]
pub enum SweepConfig {
    Limit { sweep: LimitSweep, eta: f64, n: Vec<u32> },
    Classify { family: Family, eta: f64, n: Vec<u32> },
}

/// The canonical limit sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "sweep", rename_all = "snake_case")]
pub enum LimitSweep {
    Hemisphere { kappa: f64 },
    EuclidBall { lambda: f64 },
    Warped { kappa: f64 },
}

#[derive(Deserialize)]
struct Common {
    #[serde(default = "default_eta")]
    eta: f64,
    n: Vec<u32>,
}

fn default_eta() -> f64 {
    0.5
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| input(format!("sweep JSON: {e}")))?;
        let parse_err = |e: serde_json::Error| input(format!("sweep JSON: {e}"));
        let common: Common = serde_json::from_value(value.clone()).map_err(parse_err)?;
        if value.get("sweep").is_some() {
            let sweep = serde_json::from_value(value).map_err(parse_err)?;
            Ok(SweepConfig::Limit { sweep, eta: common.eta, n: common.n })
        } else if value.get("family").is_some() {
            let family = serde_json::from_value(value).map_err(parse_err)?;
            Ok(SweepConfig::Classify { family, eta: common.eta, n: common.n })
        } else {
            Err(input("sweep JSON needs a \"sweep\" or a \"family\" key"))
        }
    }

    pub fn run(&self) -> Result<SweepReport> {
        match self {
            SweepConfig::Limit { sweep, eta, n } => match *sweep {
                LimitSweep::Hemisphere { kappa } => hemisphere_sweep(kappa, *eta, n),
                LimitSweep::EuclidBall { lambda } => euclid_ball_sweep(lambda, *eta, n),
                LimitSweep::Warped { kappa } => warped_sweep(kappa, *eta, n),
            },
            SweepConfig::Classify { family, eta, n } => classify_concentration(family, *eta, n),
        }
    }
}
