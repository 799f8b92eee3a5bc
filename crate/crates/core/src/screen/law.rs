//! Closed-form radial densities used to build screens.
//!
//! A [`DensityLaw`] is an unnormalised density on `[0, ∞)`. Its normaliser
//! is computed once by quadrature and the distribution function is obtained
//! by integrating the density, except for the uniform and exponential laws
//! whose distribution functions are elementary.

use serde::{Deserialize, Serialize};

use crate::error::{domain, input, Result};
use crate::jacobi::{classify, CurvatureClass, InfiniteCurvature, Regime};
use crate::numeric::{integrate, integrate_to_infinity, QuadOptions};

const QUAD: QuadOptions = QuadOptions { abs_tol: 1e-300, rel_tol: 1e-14, max_intervals: 4000 };

/// A nonnegative, piecewise linear extra drift `ε(t)`.
///
/// The density it tilts is multiplied by `exp(-∫₀ᵗ ε)`. `ε` interpolates
/// linearly between knots and stays constant after the last knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tilt {
    pub knots: Vec<f64>,
    pub rates: Vec<f64>,
}

impl Tilt {
    /// The zero tilt.
    pub fn none() -> Self {
        Tilt { knots: vec![0.0], rates: vec![0.0] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.knots.is_empty() || self.knots.len() != self.rates.len() {
            return Err(input("tilt needs matching, nonempty knots and rates"));
        }
        if self.knots[0] != 0.0 {
            return Err(input("tilt knots must start at 0"));
        }
        if self.knots.windows(2).any(|w| !(w[1] > w[0])) || self.knots.iter().any(|k| !k.is_finite()) {
            return Err(input("tilt knots must be finite and strictly increasing"));
        }
        if self.rates.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
            return Err(input("tilt rates must be finite and nonnegative"));
        }
        Ok(())
    }

    /// `ε(t)`.
    pub fn rate(&self, t: f64) -> f64 {
        let k = &self.knots;
        let last = k.len() - 1;
        if t >= k[last] {
            return self.rates[last];
        }
        let i = k.partition_point(|&x| x <= t).saturating_sub(1);
        let s = (t - k[i]) / (k[i + 1] - k[i]);
        self.rates[i] + s * (self.rates[i + 1] - self.rates[i])
    }

    /// `E(t) = ∫₀ᵗ ε`.
    pub fn integral(&self, t: f64) -> f64 {
        let k = &self.knots;
        let e = &self.rates;
        let mut acc = 0.0;
        for i in 0..k.len() {
            if i + 1 == k.len() || t < k[i + 1] {
                let s = t - k[i];
                if i + 1 == k.len() {
                    return acc + e[i] * s;
                }
                let slope = (e[i + 1] - e[i]) / (k[i + 1] - k[i]);
                return acc + e[i] * s + 0.5 * slope * s * s;
            }
            acc += 0.5 * (k[i + 1] - k[i]) * (e[i] + e[i + 1]);
        }
        acc
    }

    /// True when `ε` is nondecreasing, which keeps the tilted potential convex.
    pub fn is_nondecreasing(&self) -> bool {
        self.rates.windows(2).all(|w| w[1] >= w[0])
    }
}

/// Closed-form radial density laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum DensityLaw {
    /// Constant density on `[lo, hi]`.
    Uniform { lo: f64, hi: f64 },
    /// `rate · e^{-rate·t}` on `[0, ∞)`.
    Exponential { rate: f64 },
    /// `∝ e^{-kt²/2 - λt}` on `[0, ∞)`; needs `k > 0`, or `k = 0` and `λ > 0`.
    HalfGaussian { k: f64, lambda: f64 },
    /// `∝ s̄_{κ,λ}^{n-1}` on `[0, C̄_{κ,λ})`; needs a ball or horospherical pair.
    JacobiPower { n: f64, kappa: f64, lambda: f64 },
    /// `base(t) · exp(-∫₀ᵗ ε)`, optionally truncated to `[0, cutoff]`.
    Tilted {
        base: Box<DensityLaw>,
        tilt: Tilt,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<f64>,
    },
}

/// A validated law with its normaliser and integration breakpoints.
#[derive(Debug, Clone)]
pub(crate) struct PreparedLaw {
    kernel: Kernel,
    lo: f64,
    hi: f64,
    breaks: Vec<f64>,
    norm: f64,
}

#[derive(Debug, Clone)]
enum Kernel {
    Uniform,
    Exponential { rate: f64 },
    Gauss { k: f64, lambda: f64, shift: f64 },
    Jacobi { power: f64, cc: CurvatureClass },
    Tilted { base: Box<Kernel>, tilt: Tilt, cutoff: f64 },
}

impl Kernel {
    fn build(law: &DensityLaw) -> Result<(Kernel, f64, f64, Vec<f64>)> {
        match law {
            DensityLaw::Uniform { lo, hi } => {
                if !(*lo >= 0.0 && hi > lo && hi.is_finite()) {
                    return Err(domain(format!("uniform law needs 0 <= lo < hi < ∞, got [{lo}, {hi}]")));
                }
                Ok((Kernel::Uniform, *lo, *hi, vec![]))
            }
            DensityLaw::Exponential { rate } => {
                if !(*rate > 0.0 && rate.is_finite()) {
                    return Err(domain(format!("exponential rate must be positive, got {rate}")));
                }
                Ok((Kernel::Exponential { rate: *rate }, 0.0, f64::INFINITY, vec![]))
            }
            DensityLaw::HalfGaussian { k, lambda } => {
                let ic = InfiniteCurvature::new(*k, *lambda)?;
                if !ic.is_admissible() {
                    return Err(domain(format!(
                        "half-Gaussian law needs K > 0 or (K = 0, Λ > 0), got K = {k}, Λ = {lambda}"
                    )));
                }
                let peak = if *k > 0.0 && *lambda < 0.0 { -lambda / k } else { 0.0 };
                let shift = 0.5 * k * peak * peak + lambda * peak;
                let breaks = if peak > 0.0 { vec![peak] } else { vec![] };
                Ok((Kernel::Gauss { k: *k, lambda: *lambda, shift }, 0.0, f64::INFINITY, breaks))
            }
            DensityLaw::JacobiPower { n, kappa, lambda } => {
                if !(*n > 1.0 && n.is_finite()) {
                    return Err(domain(format!("dimension parameter must be > 1, got {n}")));
                }
                let cc = classify(*kappa, *lambda)?;
                if cc.regime() == Regime::Unbounded {
                    return Err(domain(format!(
                        "profile power is not integrable for κ = {kappa}, λ = {lambda}"
                    )));
                }
                Ok((Kernel::Jacobi { power: n - 1.0, cc }, 0.0, cc.radius(), vec![]))
            }
            DensityLaw::Tilted { base, tilt, cutoff } => {
                tilt.validate()?;
                let (bk, lo, bhi, mut breaks) = Kernel::build(base)?;
                let hi = match cutoff {
                    Some(c) if !(*c > lo && c.is_finite()) => {
                        return Err(domain(format!("cutoff must be finite and above {lo}, got {c}")));
                    }
                    Some(c) => c.min(bhi),
                    None => bhi,
                };
                breaks.extend(tilt.knots.iter().copied());
                Ok((Kernel::Tilted { base: Box::new(bk), tilt: tilt.clone(), cutoff: hi }, lo, hi, breaks))
            }
        }
    }

    fn density(&self, t: f64) -> f64 {
        match self {
            Kernel::Uniform => 1.0,
            Kernel::Exponential { rate } => (-rate * t).exp(),
            Kernel::Gauss { k, lambda, shift } => (-(0.5 * k * t * t + lambda * t) + shift).exp(),
            Kernel::Jacobi { power, cc } => cc.profile(t).powf(*power),
            Kernel::Tilted { base, tilt, cutoff } => {
                if t > *cutoff {
                    0.0
                } else {
                    base.density(t) * (-tilt.integral(t)).exp()
                }
            }
        }
    }
}

impl DensityLaw {
    pub(crate) fn prepare(&self) -> Result<PreparedLaw> {
        let (kernel, lo, hi, mut breaks) = Kernel::build(self)?;
        breaks.retain(|b| *b > lo && *b < hi);
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut p = PreparedLaw { kernel, lo, hi, breaks, norm: 1.0 };
        p.norm = match p.kernel {
            Kernel::Uniform => hi - lo,
            Kernel::Exponential { rate } => 1.0 / rate,
            _ => p.raw_integral(lo, hi),
        };
        if !(p.norm > 0.0 && p.norm.is_finite()) {
            return Err(domain(format!("density law has normaliser {}", p.norm)));
        }
        Ok(p)
    }

    /// Whether the law has positive density on the whole interior of its support,
    /// which starts at 0.
    pub fn full_support(&self) -> bool {
        match self {
            DensityLaw::Uniform { lo, .. } => *lo == 0.0,
            DensityLaw::Tilted { base, .. } => base.full_support(),
            _ => true,
        }
    }
}

impl PreparedLaw {
    pub(crate) fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Normalised density.
    pub(crate) fn pdf(&self, t: f64) -> f64 {
        if t < self.lo || t > self.hi {
            0.0
        } else {
            self.kernel.density(t) / self.norm
        }
    }

    fn raw_integral(&self, a: f64, b: f64) -> f64 {
        let a = a.max(self.lo);
        let b = b.min(self.hi);
        if !(b > a) {
            return 0.0;
        }
        let f = |t: f64| self.kernel.density(t);
        let mut acc = 0.0;
        let mut left = a;
        for &br in self.breaks.iter().filter(|&&br| br > a && br < b) {
            acc += integrate(f, left, br, QUAD).value;
            left = br;
        }
        if b.is_finite() {
            acc + integrate(f, left, b, QUAD).value
        } else {
            acc + integrate_to_infinity(f, left, QUAD).value
        }
    }

    /// `P[T ≤ t]`.
    pub(crate) fn cdf(&self, t: f64) -> f64 {
        if t <= self.lo {
            return 0.0;
        }
        if t >= self.hi {
            return 1.0;
        }
        match self.kernel {
            Kernel::Uniform => (t - self.lo) / (self.hi - self.lo),
            Kernel::Exponential { rate } => -(-rate * t).exp_m1(),
            _ => (self.raw_integral(self.lo, t) / self.norm).clamp(0.0, 1.0),
        }
    }

    /// `P[T ≥ t]`.
    pub(crate) fn survival(&self, t: f64) -> f64 {
        if t <= self.lo {
            return 1.0;
        }
        if t >= self.hi {
            return 0.0;
        }
        match self.kernel {
            Kernel::Uniform => (self.hi - t) / (self.hi - self.lo),
            Kernel::Exponential { rate } => (-rate * t).exp(),
            _ => (self.raw_integral(t, self.hi) / self.norm).clamp(0.0, 1.0),
        }
    }

    /// `P[a < T ≤ b]` for `a ≤ b`.
    pub(crate) fn mass_between(&self, a: f64, b: f64) -> f64 {
        match self.kernel {
            Kernel::Uniform | Kernel::Exponential { .. } => self.cdf(b) - self.cdf(a),
            _ => self.raw_integral(a, b) / self.norm,
        }
    }

    /// A scale on which the law varies, used to start bracket searches.
    pub(crate) fn length_scale(&self) -> f64 {
        if self.hi.is_finite() {
            return self.hi - self.lo;
        }
        match &self.kernel {
            Kernel::Exponential { rate } => 1.0 / rate,
            Kernel::Gauss { k, lambda, .. } => {
                if *k > 0.0 {
                    (1.0 / k).sqrt() + (-lambda / k).max(0.0)
                } else {
                    1.0 / lambda
                }
            }
            Kernel::Jacobi { power, cc } => 1.0 / (power * cc.lambda()),
            _ => 1.0,
        }
    }
}
