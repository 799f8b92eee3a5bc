//! Exact mass bookkeeping for a piecewise linear density on a grid.

/// Cumulative mass of the piecewise linear interpolant of `θ` on a grid.
#[derive(Debug, Clone)]
pub(crate) struct PiecewiseMass<'a> {
    t: &'a [f64],
    theta: &'a [f64],
    /// `cum[i] = ∫_{t_0}^{t_i} θ`.
    cum: Vec<f64>,
}

impl<'a> PiecewiseMass<'a> {
    pub(crate) fn new(t: &'a [f64], theta: &'a [f64]) -> Self {
        let mut cum = Vec::with_capacity(t.len());
        cum.push(0.0);
        for i in 0..t.len() - 1 {
            let cell = 0.5 * (t[i + 1] - t[i]) * (theta[i] + theta[i + 1]);
            cum.push(cum[i] + cell);
        }
        PiecewiseMass { t, theta, cum }
    }

    pub(crate) fn total(&self) -> f64 {
        *self.cum.last().expect("grid is nonempty")
    }

    pub(crate) fn at_node(&self, i: usize) -> f64 {
        self.cum[i]
    }

    fn cell(&self, x: f64) -> usize {
        let last = self.t.len() - 1;
        (self.t.partition_point(|&k| k <= x).max(1) - 1).min(last - 1)
    }

    /// The interpolated density at `x`.
    pub(crate) fn density(&self, x: f64) -> f64 {
        let i = self.cell(x);
        let s = ((x - self.t[i]) / (self.t[i + 1] - self.t[i])).clamp(0.0, 1.0);
        self.theta[i] + s * (self.theta[i + 1] - self.theta[i])
    }

    /// `∫_{t_0}^{x} θ`.
    pub(crate) fn up_to(&self, x: f64) -> f64 {
        let (t0, tn) = (self.t[0], *self.t.last().expect("grid is nonempty"));
        if x <= t0 {
            return 0.0;
        }
        if x >= tn {
            return self.total();
        }
        let i = self.cell(x);
        let h = self.t[i + 1] - self.t[i];
        let d = x - self.t[i];
        let slope = (self.theta[i + 1] - self.theta[i]) / h;
        self.cum[i] + d * self.theta[i] + 0.5 * slope * d * d
    }

    pub(crate) fn between(&self, a: f64, b: f64) -> f64 {
        (self.up_to(b) - self.up_to(a)).max(0.0)
    }

    /// The smallest `x` with `∫_{t_0}^{x} θ ≥ m`.
    pub(crate) fn position_of(&self, m: f64) -> f64 {
        if m <= 0.0 {
            return self.t[0];
        }
        if m >= self.total() {
            return *self.t.last().expect("grid is nonempty");
        }
        let i = (self.cum.partition_point(|&c| c < m).max(1) - 1).min(self.t.len() - 2);
        let rest = m - self.cum[i];
        let h = self.t[i + 1] - self.t[i];
        let q = self.theta[i];
        let c = 0.5 * (self.theta[i + 1] - self.theta[i]) / h;
        // Stable root of c d² + q d - rest = 0.
        let disc = (q * q + 4.0 * c * rest).max(0.0);
        let denom = q + disc.sqrt();
        let d = if denom > 0.0 { 2.0 * rest / denom } else { 0.0 };
        (self.t[i] + d.clamp(0.0, h)).min(self.t[i + 1])
    }
}
