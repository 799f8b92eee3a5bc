//! Random radial densities that satisfy a given comparison hypothesis.
//!
//! A density is admissible for a comparison class when its ratio to the
//! model density is nonincreasing along the normal geodesics. The generator
//! realises this by multiplying the model density by `exp(-∫₀ᵗ ε)` for a
//! random nonnegative piecewise linear `ε` and optionally truncating the
//! support, which models a cut locus closer to the boundary than the model's.

use rand::Rng;

use crate::error::{Error, Result};
use crate::models::ComparisonKind;
use crate::screen::{DensityLaw, Screen, Tilt};

/// Samples admissible densities for one comparison class.
#[derive(Debug, Clone)]
pub struct AdmissibleGenerator {
    base: DensityLaw,
    reach: f64,
    /// Keep `ε` nondecreasing so the log-density stays concave.
    pub convex: bool,
    /// Probability of truncating the support.
    pub cutoff_probability: f64,
    /// Probability of leaving the model density untilted.
    pub identity_probability: f64,
}

impl AdmissibleGenerator {
    /// A generator whose samples satisfy the hypothesis of `kind`.
    ///
    /// Classes outside every comparison regime are rejected with
    /// [`Error::NoComparison`].
    pub fn new(kind: &ComparisonKind) -> Result<Self> {
        let base = match kind {
            ComparisonKind::FiniteN { n, curvature } => {
                if !(curvature.is_ball() || curvature.is_horospherical()) {
                    return Err(Error::NoComparison("finite-N class has no model density".into()));
                }
                DensityLaw::JacobiPower { n: *n, kappa: curvature.kappa(), lambda: curvature.lambda() }
            }
            ComparisonKind::Twisted(tp) => {
                let base = tp.base()?;
                if !(base.is_convex_ball() || base.is_horospherical()) {
                    return Err(Error::NoComparison("twisted class has no model density".into()));
                }
                let eff = tp.effective()?;
                DensityLaw::JacobiPower { n: tp.n, kappa: eff.kappa(), lambda: eff.lambda() }
            }
            ComparisonKind::Infinite(ic) => {
                if !ic.is_admissible() {
                    return Err(Error::NoComparison("infinite class has no model density".into()));
                }
                DensityLaw::HalfGaussian { k: ic.k, lambda: ic.lambda }
            }
        };
        let screen = Screen::closed(base.clone())?;
        let reach = screen.part_inradius(1.0 - 1e-6)?;
        Ok(AdmissibleGenerator {
            base,
            reach,
            convex: false,
            cutoff_probability: 0.3,
            identity_probability: 0.1,
        })
    }

    /// The untilted model density.
    pub fn base(&self) -> &DensityLaw {
        &self.base
    }

    /// A length past which the model density carries mass below `10⁻⁶`.
    pub fn reach(&self) -> f64 {
        self.reach
    }

    /// Draws one admissible density.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DensityLaw {
        let reach = self.reach;
        let tilt = if rng.gen::<f64>() < self.identity_probability {
            Tilt::none()
        } else {
            let count = rng.gen_range(2..=6);
            let mut knots: Vec<f64> = (1..count).map(|_| rng.gen::<f64>() * reach).collect();
            knots.push(0.0);
            knots.sort_by(f64::total_cmp);
            knots.dedup();
            let amplitude = rng.gen_range(0.0..3.0) / reach;
            let mut rates: Vec<f64> = knots.iter().map(|_| rng.gen::<f64>() * amplitude).collect();
            if self.convex {
                rates.sort_by(f64::total_cmp);
            }
            Tilt { knots, rates }
        };
        let cutoff = (rng.gen::<f64>() < self.cutoff_probability).then(|| rng.gen_range(0.2..1.0) * reach);
        DensityLaw::Tilted { base: Box::new(self.base.clone()), tilt, cutoff }
    }
}
