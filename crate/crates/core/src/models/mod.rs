//! Model spaces and the comparison bounds they realise.
//!
//! Each model is a rotationally symmetric space whose distance to the
//! boundary has an explicit law. The comparison functions turn curvature
//! lower bounds into upper bounds on the observable inscribed radius, and
//! the volume audit checks the ratio comparison for a given radial density.

mod admissible;

pub use admissible::AdmissibleGenerator;

use serde::{Deserialize, Serialize};

use crate::error::{domain, finite, input, Error, Result};
use crate::jacobi::{
    classify, gaussian_tail_inverse, s_growth, v_inverse, CurvatureClass, InfiniteCurvature,
    TwistParams,
};
use crate::numeric::{integrate, integrate_to_infinity, QuadOptions};
use crate::screen::{DensityLaw, Screen};

const QUAD: QuadOptions = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-14, max_intervals: 4000 };

/// The model spaces with explicit boundary-distance laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum ModelSpace {
    /// The ball `B^n_{κ,λ}` of dimension `n` with its Riemannian volume.
    Ball { n: u32, kappa: f64, lambda: f64 },
    /// The horospherical warped half-space with `κ < 0` and `λ = √(-κ)`.
    Warped { n: u32, kappa: f64, lambda: f64 },
    /// The half-line with weight `e^{-Kt²/2 - Λt}` and `K > 0`.
    HalfGaussian { k: f64, lambda: f64 },
    /// The half-line with weight `Λ e^{-Λt}`.
    Exponential { lambda: f64 },
    /// Warped half-space of dimension `n` weighted to effective dimension `N`.
    #[serde(rename = "weighted_warped_71")]
    WeightedWarped71 {
        n: u32,
        #[serde(rename = "N")]
        big_n: f64,
        kappa: f64,
    },
    /// Doubly warped half-space with twist bound `δ`.
    #[serde(rename = "weighted_warped_72")]
    WeightedWarped72 { n: u32, kappa: f64, delta: f64 },
}

/// `vol(S^{n-1}) = 2π^{n/2} / Γ(n/2)`, as a logarithm.
pub fn ln_sphere_volume(n: u32) -> f64 {
    // Γ at half integers by the recurrence Γ(x + 1) = x Γ(x).
    let half = n as f64 / 2.0;
    let (mut x, mut ln_gamma) = if n % 2 == 0 { (1.0, 0.0) } else { (0.5, 0.5 * std::f64::consts::PI.ln()) };
    while x < half {
        ln_gamma += x.ln();
        x += 1.0;
    }
    std::f64::consts::LN_2 + half * std::f64::consts::PI.ln() - ln_gamma
}

fn check_dim(n: u32) -> Result<()> {
    if n >= 2 {
        Ok(())
    } else {
        Err(domain(format!("model dimension must be at least 2, got {n}")))
    }
}

fn negative_kappa(kappa: f64) -> Result<f64> {
    finite("kappa", kappa)?;
    if kappa < 0.0 {
        Ok((-kappa).sqrt())
    } else {
        Err(domain(format!("warped models need κ < 0, got {kappa}")))
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(domain(format!("η must lie in (0, 1], got {eta}")))
    }
}

impl ModelSpace {
    /// Checks the parameter invariants of the model.
    pub fn validate(&self) -> Result<()> {
        match *self {
            ModelSpace::Ball { n, kappa, lambda } => {
                check_dim(n)?;
                if !classify(kappa, lambda)?.is_ball() {
                    return Err(domain(format!("(κ, λ) = ({kappa}, {lambda}) does not bound a ball")));
                }
            }
            ModelSpace::Warped { n, kappa, lambda } => {
                check_dim(n)?;
                negative_kappa(kappa)?;
                if !classify(kappa, lambda)?.is_horospherical() {
                    return Err(domain(format!("warped model needs λ = √(-κ), got λ = {lambda}")));
                }
            }
            ModelSpace::HalfGaussian { k, lambda } => {
                InfiniteCurvature::new(k, lambda)?;
                if !(k > 0.0) {
                    return Err(domain(format!("half-Gaussian model needs K > 0, got {k}")));
                }
            }
            ModelSpace::Exponential { lambda } => {
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return Err(domain(format!("exponential model needs Λ > 0, got {lambda}")));
                }
            }
            ModelSpace::WeightedWarped71 { n, big_n, kappa } => {
                check_dim(n)?;
                negative_kappa(kappa)?;
                if !(big_n >= n as f64 && big_n.is_finite()) {
                    return Err(domain(format!("need n <= N < ∞, got n = {n}, N = {big_n}")));
                }
            }
            ModelSpace::WeightedWarped72 { n, kappa, delta } => {
                check_dim(n)?;
                negative_kappa(kappa)?;
                finite("delta", delta)?;
            }
        }
        Ok(())
    }

    /// The radial density of the boundary-distance law, up to normalisation.
    pub fn density_law(&self) -> Result<DensityLaw> {
        self.validate()?;
        Ok(match *self {
            ModelSpace::Ball { n, kappa, lambda } | ModelSpace::Warped { n, kappa, lambda } => {
                DensityLaw::JacobiPower { n: n as f64, kappa, lambda }
            }
            ModelSpace::HalfGaussian { k, lambda } => DensityLaw::HalfGaussian { k, lambda },
            ModelSpace::Exponential { lambda } => DensityLaw::Exponential { rate: lambda },
            ModelSpace::WeightedWarped71 { big_n, kappa, .. } => {
                DensityLaw::JacobiPower { n: big_n, kappa, lambda: (-kappa).sqrt() }
            }
            ModelSpace::WeightedWarped72 { .. } => {
                // e^{-a(t+1)²/2} ∝ e^{-at²/2 - at}.
                let a = self.ww72_rate();
                DensityLaw::HalfGaussian { k: a, lambda: a }
            }
        })
    }

    fn ww72_rate(&self) -> f64 {
        match *self {
            ModelSpace::WeightedWarped72 { n, kappa, delta } => {
                (n as f64 - 1.0) * (-kappa).sqrt() * (-2.0 * delta).exp()
            }
            _ => unreachable!("only called for the twisted example"),
        }
    }

    /// The law of the distance to the boundary under the normalised measure.
    pub fn boundary_screen(&self) -> Result<Screen> {
        Screen::closed(self.density_law()?)
    }

    /// Inscribed radius of the model (`+∞` for the unbounded ones).
    pub fn inradius(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            ModelSpace::Ball { kappa, lambda, .. } => classify(kappa, lambda)?.radius(),
            _ => f64::INFINITY,
        })
    }

    /// `ObsInRad(X; -η)` from the model's closed form.
    pub fn closed_form_obs_inradius(&self, eta: f64) -> Result<f64> {
        self.validate()?;
        check_eta(eta)?;
        let log = (1.0 / eta).ln();
        match *self {
            ModelSpace::Ball { n, kappa, lambda } => v_inverse(n as f64, &classify(kappa, lambda)?, eta),
            ModelSpace::Warped { n, lambda, .. } => Ok(log / ((n as f64 - 1.0) * lambda)),
            ModelSpace::HalfGaussian { k, lambda } => {
                gaussian_tail_inverse(&InfiniteCurvature::new(k, lambda)?, eta)
            }
            ModelSpace::Exponential { lambda } => Ok(log / lambda),
            ModelSpace::WeightedWarped71 { big_n, kappa, .. } => {
                Ok(log / ((big_n - 1.0) * (-kappa).sqrt()))
            }
            ModelSpace::WeightedWarped72 { .. } => {
                let a = self.ww72_rate();
                gaussian_tail_inverse(&InfiniteCurvature::new(a, a)?, eta)
            }
        }
    }

    /// Total mass of the model measure, recomputed by quadrature.
    ///
    /// For the two weighted examples this integrates the displayed weight
    /// `e^{-f}` against the unweighted volume element over the full sphere
    /// of directions, so any slip in their normalising constants shows up.
    /// For the other models it integrates the normalised screen density.
    pub fn total_mass(&self) -> Result<f64> {
        self.validate()?;
        match *self {
            ModelSpace::WeightedWarped71 { n, big_n, kappa } => {
                let lambda = (-kappa).sqrt();
                let ln_vol = ln_sphere_volume(n);
                let nf = n as f64;
                // f(t) = (N - n)λt - log((N - 1)λ / vol S^{n-1}); volume element e^{-(n-1)λt}.
                let ln_c = ((big_n - 1.0) * lambda).ln() - ln_vol;
                let integrand = |t: f64| {
                    let f = (big_n - nf) * lambda * t - ln_c;
                    (-f - (nf - 1.0) * lambda * t + ln_vol).exp()
                };
                Ok(integrate_to_infinity(integrand, 0.0, QUAD).value)
            }
            ModelSpace::WeightedWarped72 { n, kappa, delta } => {
                let lambda = (-kappa).sqrt();
                let m = n as f64 - 1.0;
                let e2 = (-2.0 * delta).exp();
                let a = m * lambda * e2;
                // vol(S) = e^{-C_n} / ∫₁^∞ e^{-a u²/2} du with C_n = (n-1)(λe^{-2δ} - 2δ)/2.
                let c_n = m * (lambda * e2 - 2.0 * delta) / 2.0;
                let j = integrate_to_infinity(|u| (-0.5 * a * u * u).exp(), 1.0, QUAD).value;
                let ln_vol = -c_n - j.ln();
                // f(t) = -(n-1)/2 log(t+1) + (n-1)δ and H(t)^{n-1} with
                // H(t)² = (t+1)^{-1} exp(-λe^{-2δ}((t+1)² - 1)).
                let integrand = |t: f64| {
                    let f = -0.5 * m * (t + 1.0).ln() + m * delta;
                    let ln_h = -0.5 * (t + 1.0).ln() - 0.5 * lambda * e2 * ((t + 1.0).powi(2) - 1.0);
                    (ln_vol - f + m * ln_h).exp()
                };
                Ok(integrate_to_infinity(integrand, 0.0, QUAD).value)
            }
            _ => {
                let screen = self.boundary_screen()?;
                let Screen::Closed(c) = &screen else { unreachable!("models build closed screens") };
                let end = screen.support_end();
                let pdf = |t: f64| c.pdf(t);
                Ok(if end.is_finite() {
                    integrate(pdf, 0.0, end, QUAD).value
                } else {
                    integrate_to_infinity(pdf, 0.0, QUAD).value
                })
            }
        }
    }

    /// Parses a model descriptor such as `{"tag": "exponential", "lambda": 1}`.
    pub fn from_json(text: &str) -> Result<ModelSpace> {
        let m: ModelSpace = serde_json::from_str(text).map_err(|e| input(format!("model JSON: {e}")))?;
        m.validate()?;
        Ok(m)
    }
}

/// Which comparison theorem to apply.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComparisonKind {
    /// Curvature-dimension bound `Ric_f^N ≥ (N-1)κ` with mean curvature `H_f ≥ (N-1)λ`.
    FiniteN { n: f64, curvature: CurvatureClass },
    /// Twisted products with dimension `n`, curvature `(κ, λ)` and twist bound `δ`.
    Twisted(TwistParams),
    /// `Ric_f^∞ ≥ K` with `H_f ≥ Λ`.
    Infinite(InfiniteCurvature),
}

/// The comparison upper bound on `ObsInRad(X; -η)` for every space in the class.
///
/// Regimes not covered by a theorem return [`Error::NoComparison`].
pub fn comparison_bound(kind: &ComparisonKind, eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let log = (1.0 / eta).ln();
    match kind {
        ComparisonKind::FiniteN { n, curvature } => {
            if !(*n > 1.0 && n.is_finite()) {
                return Err(domain(format!("N must be finite and > 1, got {n}")));
            }
            if curvature.is_ball() {
                v_inverse(*n, curvature, eta)
            } else if curvature.is_horospherical() {
                Ok(log / ((n - 1.0) * curvature.lambda()))
            } else {
                Err(Error::NoComparison(format!(
                    "finite-N comparison needs a ball or horospherical pair, got κ = {}, λ = {}",
                    curvature.kappa(),
                    curvature.lambda()
                )))
            }
        }
        ComparisonKind::Twisted(tp) => {
            let base = tp.base()?;
            if base.is_convex_ball() {
                v_inverse(tp.n, &tp.effective()?, eta)
            } else if base.is_horospherical() {
                Ok(log / ((tp.n - 1.0) * tp.lambda * (-2.0 * tp.delta).exp()))
            } else {
                Err(Error::NoComparison(format!(
                    "twisted comparison needs a mean convex ball or horospherical pair, got κ = {}, λ = {}",
                    tp.kappa, tp.lambda
                )))
            }
        }
        ComparisonKind::Infinite(ic) => {
            if ic.k > 0.0 {
                gaussian_tail_inverse(ic, eta)
            } else if ic.k == 0.0 && ic.lambda > 0.0 {
                Ok(log / ic.lambda)
            } else {
                Err(Error::NoComparison(format!(
                    "infinite-dimensional comparison needs K > 0 or (K = 0, Λ > 0), got K = {}, Λ = {}",
                    ic.k, ic.lambda
                )))
            }
        }
    }
}

/// Outcome of a volume ratio comparison `m(B_R)/m(B_r) ≤ model ratio`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VolumeAudit {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Compares the volume growth of the boundary neighbourhoods of `density`
/// with the model growth for `kind`, between radii `0 < r ≤ big_r`.
pub fn volume_ratio_audit(density: &DensityLaw, kind: &ComparisonKind, r: f64, big_r: f64) -> Result<VolumeAudit> {
    if !(r > 0.0 && big_r >= r && big_r.is_finite()) {
        return Err(domain(format!("need 0 < r <= R < ∞, got r = {r}, R = {big_r}")));
    }
    let screen = Screen::closed(density.clone())?;
    let inner = screen.cdf(r);
    if !(inner > 0.0) {
        return Err(domain(format!("the density has no mass within distance {r} of the boundary")));
    }
    let lhs = screen.cdf(big_r) / inner;
    let rhs = match kind {
        ComparisonKind::FiniteN { n, curvature } => s_growth(*n, curvature, big_r)? / s_growth(*n, curvature, r)?,
        ComparisonKind::Twisted(tp) => {
            let eff = tp.effective()?;
            s_growth(tp.n, &eff, big_r)? / s_growth(tp.n, &eff, r)?
        }
        ComparisonKind::Infinite(ic) => {
            let w = |t: f64| (-(0.5 * ic.k * t * t + ic.lambda * t)).exp();
            integrate(w, 0.0, big_r, QUAD).value / integrate(w, 0.0, r, QUAD).value
        }
    };
    Ok(VolumeAudit { lhs, rhs, satisfied: lhs <= rhs + 1e-9 * rhs.max(1.0) })
}
