//! Jacobi profiles, comparison radii, ball functions and Gaussian tails.
//!
//! The profile `s_{κ,λ}` solves `ψ'' + κψ = 0` with `ψ(0) = 1` and
//! `ψ'(0) = -λ`. It models the volume element along a unit speed geodesic
//! leaving the boundary of a space whose Ricci curvature is bounded below by
//! `κ` and whose boundary mean curvature is bounded below by `λ`. Its first
//! zero `C_{κ,λ}` is the largest possible inscribed radius.

use serde::{Deserialize, Serialize};

use crate::error::{domain, finite, Error, Result};
use crate::numeric::{brent, expand_upper, integrate, integrate_to_infinity, QuadOptions};

/// Relative tolerance for recognising the horospherical case `λ = √(-κ)`.
pub const HOROSPHERICAL_TOL: f64 = 1e-12;

const QUAD: QuadOptions = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-14, max_intervals: 4000 };

/// Which comparison model a curvature pair `(κ, λ)` produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// The profile has a first zero `C_{κ,λ} < ∞`: the model is a ball.
    Ball,
    /// `κ < 0` and `λ = √(-κ)`: the profile is `e^{-λt}` and never vanishes.
    Horospherical,
    /// The profile stays positive and grows without bound.
    Unbounded,
}

#[derive(Deserialize)]
struct CurvatureRaw {
    kappa: f64,
    lambda: f64,
}

/// A classified pair of lower bounds `(κ, λ)` on Ricci and boundary mean curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurvatureRaw")]
pub struct CurvatureClass {
    kappa: f64,
    lambda: f64,
    #[serde(skip_serializing)]
    regime: Regime,
}

impl TryFrom<CurvatureRaw> for CurvatureClass {
    type Error = Error;

    fn try_from(raw: CurvatureRaw) -> Result<Self> {
        classify(raw.kappa, raw.lambda)
    }
}

/// Classifies `(κ, λ)` into its comparison regime.
///
/// The horospherical test `|λ - √(-κ)| ≤ 10⁻¹² max(1, |λ|)` takes priority,
/// so pairs just above the horospherical line are not reported as balls.
pub fn classify(kappa: f64, lambda: f64) -> Result<CurvatureClass> {
    finite("kappa", kappa)?;
    finite("lambda", lambda)?;
    let regime = if kappa < 0.0 {
        let a = (-kappa).sqrt();
        if (lambda - a).abs() <= HOROSPHERICAL_TOL * lambda.abs().max(1.0) {
            Regime::Horospherical
        } else if lambda > a {
            Regime::Ball
        } else {
            Regime::Unbounded
        }
    } else if kappa > 0.0 || lambda > 0.0 {
        Regime::Ball
    } else {
        Regime::Unbounded
    };
    Ok(CurvatureClass { kappa, lambda, regime })
}

impl CurvatureClass {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn regime(&self) -> Regime {
        self.regime
    }

    pub fn is_ball(&self) -> bool {
        self.regime == Regime::Ball
    }

    /// A ball whose boundary is mean convex (`λ ≥ 0`).
    pub fn is_convex_ball(&self) -> bool {
        self.regime == Regime::Ball && self.lambda >= 0.0
    }

    pub fn is_horospherical(&self) -> bool {
        self.regime == Regime::Horospherical
    }

    /// `C̄_{κ,λ}`: the first zero of the profile, or `+∞` outside the ball regime.
    pub fn radius(&self) -> f64 {
        if self.regime != Regime::Ball {
            return f64::INFINITY;
        }
        let (k, l) = (self.kappa, self.lambda);
        if k > 0.0 {
            let r = k.sqrt();
            (std::f64::consts::FRAC_PI_2 - (l / r).atan()) / r
        } else if k == 0.0 {
            1.0 / l
        } else {
            let a = (-k).sqrt();
            ((l + a) / (l - a)).ln() / (2.0 * a)
        }
    }

    /// The clamped profile `s̄_{κ,λ}(t)`, zero from the first zero onwards.
    ///
    /// In the horospherical regime this is exactly `e^{-√(-κ) t}`, which
    /// avoids amplifying the rounding in `λ - √(-κ)` at large `t`.
    pub fn profile(&self, t: f64) -> f64 {
        match self.regime {
            Regime::Horospherical => (-(-self.kappa).sqrt() * t).exp(),
            Regime::Ball if t >= self.radius() => 0.0,
            _ => raw_profile(self.kappa, self.lambda, t).max(0.0),
        }
    }

    /// The pair describing the same model dilated by `c > 0`: `(κ/c², λ/c)`.
    pub fn scaled(&self, c: f64) -> Result<CurvatureClass> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(domain(format!("scale factor must be positive, got {c}")));
        }
        let mut out = classify(self.kappa / (c * c), self.lambda / c)?;
        if self.regime == Regime::Horospherical {
            out.regime = Regime::Horospherical;
        }
        Ok(out)
    }
}

fn raw_profile(kappa: f64, lambda: f64, t: f64) -> f64 {
    if kappa > 0.0 {
        let r = kappa.sqrt();
        (1.0 + lambda * lambda / kappa).sqrt() * (r * t + (lambda / r).atan()).cos()
    } else if kappa == 0.0 {
        1.0 - lambda * t
    } else {
        let a = (-kappa).sqrt();
        let q = lambda / a;
        0.5 * ((1.0 - q) * (a * t).exp() + (1.0 + q) * (-a * t).exp())
    }
}

/// The unclamped profile `s_{κ,λ}(t)` for `t ≥ 0`.
pub fn s_profile(kappa: f64, lambda: f64, t: f64) -> Result<f64> {
    finite("kappa", kappa)?;
    finite("lambda", lambda)?;
    if !(t >= 0.0) {
        return Err(domain(format!("t must be nonnegative, got {t}")));
    }
    Ok(raw_profile(kappa, lambda, t))
}

/// `C̄_{κ,λ}` for a classified pair.
pub fn c_radius(cc: &CurvatureClass) -> f64 {
    cc.radius()
}

fn check_dimension(n: f64) -> Result<()> {
    if n > 1.0 && n.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("dimension parameter must be finite and > 1, got {n}")))
    }
}

/// `s_{N,κ,λ}(r) = ∫₀^{min(r, C̄)} s̄^{N-1}`, the model volume of the `r`-neighbourhood
/// of the boundary. `r = ∞` is allowed when the integral converges.
pub fn s_growth(n: f64, cc: &CurvatureClass, r: f64) -> Result<f64> {
    check_dimension(n)?;
    if !(r >= 0.0) {
        return Err(domain(format!("r must be nonnegative, got {r}")));
    }
    let p = n - 1.0;
    let f = |t: f64| cc.profile(t).powf(p);
    let upper = r.min(cc.radius());
    if upper.is_finite() {
        return Ok(integrate(f, 0.0, upper, QUAD).value);
    }
    match cc.regime() {
        Regime::Horospherical => Ok(integrate_to_infinity(f, 0.0, QUAD).value),
        _ => Err(domain("s_growth diverges at r = ∞ outside the ball and horospherical regimes")),
    }
}

/// The normalised ball function `v_{N,κ,λ}` with its normaliser cached.
///
/// `v(r) = ∫_r^C s^{N-1} / ∫₀^C s^{N-1}` is the model fraction of mass at
/// distance at least `r` from the boundary.
#[derive(Debug, Clone)]
pub struct BallFunction {
    n: f64,
    cc: CurvatureClass,
    radius: f64,
    norm: f64,
}

impl BallFunction {
    pub fn new(n: f64, cc: &CurvatureClass) -> Result<Self> {
        check_dimension(n)?;
        if !cc.is_ball() {
            return Err(domain(format!(
                "ball function needs a ball regime, got κ = {}, λ = {}",
                cc.kappa, cc.lambda
            )));
        }
        let radius = cc.radius();
        let p = n - 1.0;
        let norm = integrate(|t| cc.profile(t).powf(p), 0.0, radius, QUAD).value;
        Ok(BallFunction { n, cc: *cc, radius, norm })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `v(r)` for `r ∈ [0, C]`.
    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0 && r <= self.radius * (1.0 + 1e-12)) {
            return Err(domain(format!("r must lie in [0, {}], got {r}", self.radius)));
        }
        if r >= self.radius {
            return Ok(0.0);
        }
        let p = self.n - 1.0;
        let tail = integrate(|t| self.cc.profile(t).powf(p), r, self.radius, QUAD).value;
        Ok((tail / self.norm).clamp(0.0, 1.0))
    }

    pub fn inverse(&self, eta: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(domain(format!("eta must lie in [0, 1], got {eta}")));
        }
        if eta == 1.0 {
            return Ok(0.0);
        }
        if eta == 0.0 {
            return Ok(self.radius);
        }
        let xtol = 1e-15 * self.radius;
        brent(|r| self.value(r).unwrap_or(f64::NAN) - eta, 0.0, self.radius, xtol)
    }
}

/// `v_{N,κ,λ}(r)` for a ball regime.
pub fn v_ball(n: f64, cc: &CurvatureClass, r: f64) -> Result<f64> {
    BallFunction::new(n, cc)?.value(r)
}

/// `v⁻¹_{N,κ,λ}(η)`, the model radius at which the outer mass fraction equals `η`.
pub fn v_inverse(n: f64, cc: &CurvatureClass, eta: f64) -> Result<f64> {
    BallFunction::new(n, cc)?.inverse(eta)
}

/// Lower bounds `(K, Λ)` for the infinite-dimensional comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfiniteCurvature {
    pub k: f64,
    pub lambda: f64,
}

impl InfiniteCurvature {
    pub fn new(k: f64, lambda: f64) -> Result<Self> {
        finite("K", k)?;
        finite("Lambda", lambda)?;
        Ok(InfiniteCurvature { k, lambda })
    }

    /// `K > 0`, or `K = 0` and `Λ > 0`: the weight `e^{-Kt²/2 - Λt}` is integrable.
    pub fn is_admissible(&self) -> bool {
        self.k > 0.0 || (self.k == 0.0 && self.lambda > 0.0)
    }

    fn require_admissible(&self) -> Result<()> {
        if self.is_admissible() {
            Ok(())
        } else {
            Err(domain(format!(
                "Gaussian tail needs K > 0 or (K = 0, Λ > 0), got K = {}, Λ = {}",
                self.k, self.lambda
            )))
        }
    }

    fn peak(&self) -> f64 {
        if self.k > 0.0 && self.lambda < 0.0 {
            -self.lambda / self.k
        } else {
            0.0
        }
    }

    /// The weight divided by its maximum over `[0, ∞)`.
    fn weight(&self, t: f64) -> f64 {
        let tp = self.peak();
        let shift = 0.5 * self.k * tp * tp + self.lambda * tp;
        (-(0.5 * self.k * t * t + self.lambda * t) + shift).exp()
    }

    fn tail_integral(&self, r: f64) -> f64 {
        let tp = self.peak();
        let w = |t| self.weight(t);
        if r < tp {
            integrate(w, r, tp, QUAD).value + integrate_to_infinity(w, tp, QUAD).value
        } else {
            integrate_to_infinity(w, r, QUAD).value
        }
    }

    fn length_scale(&self) -> f64 {
        if self.k > 0.0 {
            (1.0 / self.k).sqrt().max(self.peak())
        } else {
            1.0 / self.lambda
        }
    }
}

/// `S_{K,Λ}(r) = ∫_r^∞ e^{-Kt²/2-Λt} dt / ∫₀^∞ e^{-Kt²/2-Λt} dt`.
pub fn gaussian_tail(ic: &InfiniteCurvature, r: f64) -> Result<f64> {
    ic.require_admissible()?;
    if !(r >= 0.0) {
        return Err(domain(format!("r must be nonnegative, got {r}")));
    }
    if ic.k == 0.0 {
        return Ok((-ic.lambda * r).exp());
    }
    if r.is_infinite() {
        return Ok(0.0);
    }
    Ok((ic.tail_integral(r) / ic.tail_integral(0.0)).clamp(0.0, 1.0))
}

/// `S⁻¹_{K,Λ}(η)` for `η ∈ (0, 1]`.
pub fn gaussian_tail_inverse(ic: &InfiniteCurvature, eta: f64) -> Result<f64> {
    ic.require_admissible()?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(domain(format!("eta must lie in (0, 1], got {eta}")));
    }
    if eta == 1.0 {
        return Ok(0.0);
    }
    if ic.k == 0.0 {
        return Ok((1.0 / eta).ln() / ic.lambda);
    }
    let norm = ic.tail_integral(0.0);
    let g = |r: f64| ic.tail_integral(r) / norm - eta;
    let hi = expand_upper(g, ic.length_scale())?;
    brent(g, 0.0, hi, 1e-15 * hi)
}

/// Twisted-product data: dimension `n`, curvature bounds `(κ, λ)` and the
/// bound `f ≤ (n - 1)δ` on the weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistParams {
    pub n: f64,
    pub kappa: f64,
    pub lambda: f64,
    pub delta: f64,
}

impl TwistParams {
    pub fn new(n: f64, kappa: f64, lambda: f64, delta: f64) -> Result<Self> {
        check_dimension(n)?;
        finite("kappa", kappa)?;
        finite("lambda", lambda)?;
        finite("delta", delta)?;
        Ok(TwistParams { n, kappa, lambda, delta })
    }

    /// The curvature pair as stated, before the twist correction.
    pub fn base(&self) -> Result<CurvatureClass> {
        classify(self.kappa, self.lambda)
    }

    /// The effective pair `(κ e^{-4δ}, λ e^{-2δ})` entering the twisted comparison.
    pub fn effective(&self) -> Result<CurvatureClass> {
        let base = self.base()?;
        let e2 = (-2.0 * self.delta).exp();
        let mut out = classify(self.kappa * e2 * e2, self.lambda * e2)?;
        if base.is_horospherical() {
            out.regime = Regime::Horospherical;
        }
        Ok(out)
    }
}
