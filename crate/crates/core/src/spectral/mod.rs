//! Weighted Dirichlet eigenvalues of radial reductions.
//!
//! A [`RadialProblem`] is the weighted interval `([0, L], θ(t) dt)` obtained
//! by separating variables in a rotationally symmetric weighted manifold.
//! The left end `t = 0` is the boundary, the right end is either a second
//! boundary component (Dirichlet) or the centre of symmetry (Neumann). The
//! operator `φ ↦ -(θφ')'/θ` is discretised by finite volumes so that the
//! generalised eigenproblem `A u = ν W u` symmetrises to a tridiagonal
//! matrix, whose lowest eigenvalues are found by Sturm bisection.

mod audit;
mod iso;
mod mass;

pub use audit::{
    audit_inequalities, buser_ledoux_constant, heat_supremum, universal_constant, AuditEntry,
    AuditReport,
};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::numeric::SymTridiagonal;
use crate::screen::{DensityLaw, Screen};

use mass::PiecewiseMass;

/// Minimal number of grid points in a radial problem.
pub const MIN_GRID_POINTS: usize = 16;

/// Endpoint condition of a radial problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Dirichlet,
    Neumann,
}

/// Curvature hypotheses asserted by the caller for the space behind a problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CurvatureFlags {
    pub nonneg_ricci_f: bool,
    pub nonneg_mean_curv: bool,
}

impl CurvatureFlags {
    pub fn both(&self) -> bool {
        self.nonneg_ricci_f && self.nonneg_mean_curv
    }
}

#[derive(Serialize, Deserialize)]
struct ProblemSpec {
    grid: Vec<f64>,
    theta: Vec<f64>,
    left_bc: Boundary,
    right_bc: Boundary,
    #[serde(default)]
    curvature_flags: Option<CurvatureFlags>,
}

/// A weighted interval `[0, L]` with endpoint conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProblemSpec", into = "ProblemSpec")]
pub struct RadialProblem {
    grid: Vec<f64>,
    theta: Vec<f64>,
    left_bc: Boundary,
    right_bc: Boundary,
    flags: Option<CurvatureFlags>,
}

impl TryFrom<ProblemSpec> for RadialProblem {
    type Error = Error;

    fn try_from(s: ProblemSpec) -> Result<Self> {
        let mut p = RadialProblem::new(s.grid, s.theta, s.left_bc, s.right_bc)?;
        p.flags = s.curvature_flags;
        Ok(p)
    }
}

impl From<RadialProblem> for ProblemSpec {
    fn from(p: RadialProblem) -> Self {
        ProblemSpec {
            grid: p.grid,
            theta: p.theta,
            left_bc: p.left_bc,
            right_bc: p.right_bc,
            curvature_flags: p.flags,
        }
    }
}

/// The lowest eigenvalues of a radial problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// `ν_1 < ν_2 ≤ … ≤ ν_k`.
    pub eigenvalues: Vec<f64>,
    /// Number of grid points.
    pub grid_size: usize,
    /// Richardson estimate of the absolute discretisation error, from a
    /// solve on every other grid point.
    pub estimated_discretization_error: f64,
}

impl RadialProblem {
    /// Checks and wraps grid values of `θ`.
    ///
    /// The grid must start at 0, increase strictly and have at least
    /// [`MIN_GRID_POINTS`] points. `θ` must be positive at interior points
    /// and nonnegative at the ends, and at least one end must be Dirichlet.
    pub fn new(grid: Vec<f64>, theta: Vec<f64>, left_bc: Boundary, right_bc: Boundary) -> Result<Self> {
        if grid.len() < MIN_GRID_POINTS {
            return Err(input(format!(
                "a radial problem needs at least {MIN_GRID_POINTS} grid points, got {}",
                grid.len()
            )));
        }
        if theta.len() != grid.len() {
            return Err(input(format!("{} grid points but {} density values", grid.len(), theta.len())));
        }
        if grid[0] != 0.0 {
            return Err(input(format!("the grid must start at 0, got {}", grid[0])));
        }
        if !grid.iter().all(|t| t.is_finite()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(input("the grid must be finite and strictly increasing"));
        }
        let last = theta.len() - 1;
        for (i, &v) in theta.iter().enumerate() {
            let ok = if i == 0 || i == last { v >= 0.0 } else { v > 0.0 };
            if !ok || !v.is_finite() {
                return Err(Error::Domain(format!("density must be positive inside the interval, got θ({}) = {v}", grid[i])));
            }
        }
        if left_bc == Boundary::Neumann && right_bc == Boundary::Neumann {
            return Err(input("at least one end must carry a Dirichlet condition"));
        }
        Ok(RadialProblem { grid, theta, left_bc, right_bc, flags: None })
    }

    /// Samples `θ` on `m + 1` evenly spaced points of `[0, length]`.
    pub fn from_fn<F: Fn(f64) -> f64>(length: f64, m: usize, theta: F, left_bc: Boundary, right_bc: Boundary) -> Result<Self> {
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Domain(format!("length must be positive and finite, got {length}")));
        }
        let grid: Vec<f64> = (0..=m).map(|i| length * i as f64 / m as f64).collect();
        let values = grid.iter().map(|&t| theta(t)).collect();
        RadialProblem::new(grid, values, left_bc, right_bc)
    }

    /// The radial problem of a closed-form law, Dirichlet at 0.
    ///
    /// Laws with unbounded support are truncated where the tail mass drops
    /// below `10⁻⁸`. At the end of a bounded support the density is taken
    /// as its left limit.
    pub fn from_law(law: &DensityLaw, m: usize, right_bc: Boundary) -> Result<Self> {
        let screen = Screen::closed(law.clone())?;
        let Screen::Closed(c) = &screen else { unreachable!("closed constructor") };
        let end = screen.support_end();
        let length = if end.is_finite() { end } else { screen.part_inradius(1.0 - 1e-8)? };
        let inside = length * (1.0 - 1e-12);
        RadialProblem::from_fn(length, m, |t| c.pdf(t.min(inside)), Boundary::Dirichlet, right_bc)
    }

    pub fn with_flags(mut self, flags: CurvatureFlags) -> Self {
        self.flags = Some(flags);
        self
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn left_bc(&self) -> Boundary {
        self.left_bc
    }

    pub fn right_bc(&self) -> Boundary {
        self.right_bc
    }

    pub fn flags(&self) -> Option<CurvatureFlags> {
        self.flags
    }

    pub fn length(&self) -> f64 {
        *self.grid.last().expect("validated grid")
    }

    /// Number of grid cells.
    pub fn cells(&self) -> usize {
        self.grid.len() - 1
    }

    /// Distance from `t` to the Dirichlet ends.
    pub fn boundary_distance(&self, t: f64) -> f64 {
        let l = self.length();
        match (self.left_bc, self.right_bc) {
            (Boundary::Dirichlet, Boundary::Dirichlet) => t.min(l - t),
            (Boundary::Dirichlet, Boundary::Neumann) => t,
            _ => l - t,
        }
    }

    /// Inscribed radius: `L` with one Neumann end, `L/2` otherwise.
    pub fn inradius(&self) -> f64 {
        if self.left_bc == Boundary::Dirichlet && self.right_bc == Boundary::Dirichlet {
            self.length() / 2.0
        } else {
            self.length()
        }
    }

    /// A copy with lengths multiplied by `c`.
    pub fn scale(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("scale factor must be positive and finite, got {c}")));
        }
        let mut out = self.clone();
        out.grid.iter_mut().for_each(|t| *t *= c);
        out.grid[0] = 0.0;
        Ok(out)
    }

    pub(crate) fn mass(&self) -> PiecewiseMass<'_> {
        PiecewiseMass::new(&self.grid, &self.theta)
    }

    /// The law of the distance to the Dirichlet ends under the normalised
    /// piecewise linear density.
    pub fn screen(&self) -> Result<Screen> {
        let mass = self.mass();
        let total = mass.total();
        let l = self.length();
        if !(total > 0.0) {
            return Err(Error::Domain("the density has zero total mass".into()));
        }
        let points: Vec<(f64, f64)> = match (self.left_bc, self.right_bc) {
            (Boundary::Dirichlet, Boundary::Dirichlet) => {
                let mut r: Vec<f64> = self.grid.iter().map(|&t| t.min(l - t)).collect();
                r.sort_by(f64::total_cmp);
                r.dedup_by(|a, b| *a - *b <= 1e-12 * l);
                r.into_iter().map(|r| (r, (mass.up_to(r) + total - mass.up_to(l - r)) / total)).collect()
            }
            (Boundary::Dirichlet, Boundary::Neumann) => {
                self.grid.iter().enumerate().map(|(i, &t)| (t, mass.at_node(i) / total)).collect()
            }
            _ => self
                .grid
                .iter()
                .enumerate()
                .rev()
                .map(|(i, &t)| (l - t, (total - mass.at_node(i)) / total))
                .collect(),
        };
        // Tail values can saturate in floating point; keep the points where F
        // still increases.
        let (mut t, mut cdf) = (vec![0.0], vec![0.0]);
        for (r, f) in points.into_iter().skip(1) {
            let f = f.min(1.0);
            if f > *cdf.last().expect("nonempty") {
                t.push(r);
                cdf.push(f);
            }
        }
        *cdf.last_mut().expect("nonempty") = 1.0;
        Screen::grid_with_support(t, cdf, true)
    }

    /// The symmetrised finite volume operator `W^{-1/2} A W^{-1/2}` on a grid.
    fn operator(grid: &[f64], theta: &[f64], left: Boundary, right: Boundary) -> SymTridiagonal {
        let m = grid.len() - 1;
        let face: Vec<f64> = (0..m).map(|i| 0.5 * (theta[i] + theta[i + 1])).collect();
        let h: Vec<f64> = grid.windows(2).map(|w| w[1] - w[0]).collect();
        let lo = if left == Boundary::Dirichlet { 1 } else { 0 };
        let hi = if right == Boundary::Dirichlet { m - 1 } else { m };
        let mut a = Vec::with_capacity(hi + 1 - lo);
        let mut w = Vec::with_capacity(hi + 1 - lo);
        for i in lo..=hi {
            let (mut aii, mut wi) = (0.0, 0.0);
            if i > 0 {
                aii += face[i - 1] / h[i - 1];
                wi += 0.5 * h[i - 1] * face[i - 1];
            }
            if i < m {
                aii += face[i] / h[i];
                wi += 0.5 * h[i] * face[i];
            }
            a.push(aii);
            w.push(wi);
        }
        let diag = a.iter().zip(&w).map(|(a, w)| a / w).collect();
        let off = (lo..hi)
            .map(|i| {
                let j = i - lo;
                -(face[i] / h[i]) / (w[j] * w[j + 1]).sqrt()
            })
            .collect();
        SymTridiagonal::new(diag, off)
    }

    /// The `k` lowest eigenvalues of `φ ↦ -(θφ')'/θ` with the endpoint conditions.
    ///
    /// Requires `k ≤ m/4` for `m` grid cells.
    pub fn spectrum(&self, k: usize) -> Result<SpectrumResult> {
        let m = self.cells();
        if k == 0 || 4 * k > m {
            return Err(Error::Resolution(format!("{k} eigenvalues need at least {} grid cells, got {m}", 4 * k.max(1))));
        }
        let fine = Self::operator(&self.grid, &self.theta, self.left_bc, self.right_bc).smallest_eigenvalues(k);
        let mut keep: Vec<usize> = (0..=m).step_by(2).collect();
        if m % 2 == 1 {
            keep.push(m);
        }
        let cg: Vec<f64> = keep.iter().map(|&i| self.grid[i]).collect();
        let ct: Vec<f64> = keep.iter().map(|&i| self.theta[i]).collect();
        let coarse = Self::operator(&cg, &ct, self.left_bc, self.right_bc).smallest_eigenvalues(k);
        let err = fine.iter().zip(&coarse).map(|(f, c)| (f - c).abs() / 3.0).fold(0.0, f64::max);
        Ok(SpectrumResult { eigenvalues: fine, grid_size: self.grid.len(), estimated_discretization_error: err })
    }

    /// The Rayleigh quotient `∫ θ φ'² / ∫ θ φ²` of grid values `phi`, in the
    /// quadratic forms of the discretisation.
    ///
    /// `phi` must vanish at the Dirichlet ends.
    pub fn rayleigh(&self, phi: &[f64]) -> Result<f64> {
        if phi.len() != self.grid.len() {
            return Err(input(format!("{} trial values for {} grid points", phi.len(), self.grid.len())));
        }
        let scale = phi.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let m = self.cells();
        for (end, bc) in [(0, self.left_bc), (m, self.right_bc)] {
            if bc == Boundary::Dirichlet && phi[end].abs() > 1e-12 * scale {
                return Err(input(format!("trial function must vanish at the Dirichlet end t = {}", self.grid[end])));
            }
        }
        let value = |i: usize| {
            let dirichlet = (i == 0 && self.left_bc == Boundary::Dirichlet) || (i == m && self.right_bc == Boundary::Dirichlet);
            if dirichlet { 0.0 } else { phi[i] }
        };
        let (mut num, mut den) = (0.0, 0.0);
        for i in 0..m {
            let h = self.grid[i + 1] - self.grid[i];
            let face = 0.5 * (self.theta[i] + self.theta[i + 1]);
            let (a, b) = (value(i), value(i + 1));
            num += face * (b - a) * (b - a) / h;
            den += 0.5 * h * face * (a * a + b * b);
        }
        if !(den > 0.0) {
            return Err(Error::Domain("trial function has zero weighted norm".into()));
        }
        Ok(num / den)
    }

    /// The Dirichlet isoperimetric constant, see [`iso`].
    pub fn isoperimetric_constant(&self) -> f64 {
        iso::isoperimetric_constant(self)
    }

    /// `BSep(η_1, …, η_k)` for the normalised density, measuring distances
    /// to the Dirichlet ends.
    pub fn separation(&self, etas: &[f64]) -> Result<f64> {
        iso::separation(self, etas)
    }

    /// CSV with columns `t,theta` after a `# {json}` line holding the endpoint
    /// conditions and curvature flags.
    pub fn to_csv(&self) -> String {
        let header = serde_json::json!({
            "left_bc": self.left_bc,
            "right_bc": self.right_bc,
            "curvature_flags": self.flags,
        });
        let mut out = format!("# {header}\nt,theta\n");
        for (t, v) in self.grid.iter().zip(&self.theta) {
            writeln!(out, "{t:?},{v:?}").expect("writing to a string");
        }
        out
    }

    /// Parses the format written by [`RadialProblem::to_csv`]. Without a
    /// header line the problem is Dirichlet at 0 and Neumann at `L`.
    pub fn from_csv(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            left_bc: Boundary,
            right_bc: Boundary,
            #[serde(default)]
            curvature_flags: Option<CurvatureFlags>,
        }
        let mut header = Header { left_bc: Boundary::Dirichlet, right_bc: Boundary::Neumann, curvature_flags: None };
        let mut body = String::new();
        for line in text.lines() {
            match line.trim_start().strip_prefix('#') {
                Some(json) if !json.trim().is_empty() => {
                    header = serde_json::from_str(json.trim()).map_err(|e| input(format!("problem header: {e}")))?;
                }
                Some(_) => {}
                None => {
                    body.push_str(line);
                    body.push('\n');
                }
            }
        }
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
        let (mut grid, mut theta) = (Vec::new(), Vec::new());
        for row in reader.deserialize::<(f64, f64)>() {
            let (t, v) = row.map_err(|e| input(format!("problem CSV: {e}")))?;
            grid.push(t);
            theta.push(v);
        }
        let mut p = RadialProblem::new(grid, theta, header.left_bc, header.right_bc)?;
        p.flags = header.curvature_flags;
        Ok(p)
    }
}
