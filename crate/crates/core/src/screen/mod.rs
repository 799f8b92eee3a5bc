//! Screens: distributions on `[0, ∞)` standing in for the law of the
//! distance to the boundary.
//!
//! Every invariant of boundary concentration that this crate computes for
//! a space is read off from one of its screens. A screen is stored as a
//! closed-form density law, as a piecewise linear distribution function on
//! a grid, or as a finite list of atoms.

mod law;

pub use law::{DensityLaw, Tilt};

use serde::{Deserialize, Serialize};

use crate::error::{domain, input, Error, Result};
use crate::numeric::{brent, expand_upper, golden_min};
use law::PreparedLaw;

/// Tolerance used when comparing accumulated probability masses.
pub const MASS_TOL: f64 = 1e-12;

#[derive(Serialize, Deserialize)]
struct ClosedSpec {
    law: DensityLaw,
    #[serde(default = "one")]
    scale: f64,
}

fn one() -> f64 {
    1.0
}

/// A closed-form screen: the law of `scale · T` where `T` has the given density.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ClosedSpec", into = "ClosedSpec")]
pub struct ClosedScreen {
    law: DensityLaw,
    scale: f64,
    prepared: PreparedLaw,
}

impl TryFrom<ClosedSpec> for ClosedScreen {
    type Error = Error;

    fn try_from(spec: ClosedSpec) -> Result<Self> {
        if !(spec.scale > 0.0 && spec.scale.is_finite()) {
            return Err(domain(format!("scale must be positive, got {}", spec.scale)));
        }
        let prepared = spec.law.prepare()?;
        Ok(ClosedScreen { law: spec.law, scale: spec.scale, prepared })
    }
}

impl From<ClosedScreen> for ClosedSpec {
    fn from(c: ClosedScreen) -> Self {
        ClosedSpec { law: c.law, scale: c.scale }
    }
}

impl ClosedScreen {
    pub fn law(&self) -> &DensityLaw {
        &self.law
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Normalised density of the scaled law.
    pub fn pdf(&self, t: f64) -> f64 {
        self.prepared.pdf(t / self.scale) / self.scale
    }

    /// Solves for `r` with `P[T ≤ r] = p_cdf`, where `p_surv = 1 - p_cdf` is
    /// passed separately to keep full precision in both tails.
    fn invert(&self, p_cdf: f64, p_surv: f64) -> Result<f64> {
        let p = &self.prepared;
        let (lo, hi) = p.support();
        let g = |r: f64| {
            if p_cdf < 0.5 {
                p.cdf(r) - p_cdf
            } else {
                p_surv - p.survival(r)
            }
        };
        let hi = if hi.is_finite() {
            hi
        } else {
            let len = p.length_scale();
            lo + expand_upper(|x| -g(lo + x), len)?
        };
        let r = brent(g, lo, hi, 4.0 * f64::EPSILON * hi)?;
        Ok(r * self.scale)
    }
}

#[derive(Serialize, Deserialize)]
struct GridSpec {
    t: Vec<f64>,
    #[serde(rename = "F")]
    cdf: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    full_support: Option<bool>,
}

/// A distribution function interpolated linearly between knots.
///
/// `F = 0` before the first knot (so `F(t₀) > 0` is an atom at `t₀`) and
/// `F = 1` from the last knot on.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct GridScreen {
    t: Vec<f64>,
    cdf: Vec<f64>,
    full_support: bool,
}

impl TryFrom<GridSpec> for GridScreen {
    type Error = Error;

    fn try_from(spec: GridSpec) -> Result<Self> {
        let GridSpec { t, mut cdf, full_support } = spec;
        if t.is_empty() || t.len() != cdf.len() {
            return Err(input("grid screen needs matching, nonempty t and F columns"));
        }
        if !(t[0] >= 0.0) || t.iter().any(|x| !x.is_finite()) {
            return Err(input("grid knots must be finite and nonnegative"));
        }
        if let Some(i) = t.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(input(format!("grid knots must increase strictly (index {})", i + 1)));
        }
        if cdf.iter().any(|f| !(0.0..=1.0).contains(f)) {
            return Err(input("grid F values must lie in [0, 1]"));
        }
        if let Some(i) = cdf.windows(2).position(|w| w[1] < w[0]) {
            return Err(input(format!("grid F must be nondecreasing (index {})", i + 1)));
        }
        let last = cdf.len() - 1;
        if (cdf[last] - 1.0).abs() > MASS_TOL {
            return Err(input(format!("grid F must end at 1, got {}", cdf[last])));
        }
        cdf[last] = 1.0;
        let strictly = t[0] == 0.0 && cdf[0] == 0.0 && cdf.windows(2).all(|w| w[1] > w[0]);
        let full_support = match full_support {
            Some(true) if !strictly => {
                return Err(input("full_support requires F(0) = 0 and strictly increasing F"));
            }
            Some(flag) => flag,
            None => strictly,
        };
        Ok(GridScreen { t, cdf, full_support })
    }
}

impl From<GridScreen> for GridSpec {
    fn from(g: GridScreen) -> Self {
        GridSpec { t: g.t, cdf: g.cdf, full_support: Some(g.full_support) }
    }
}

impl GridScreen {
    pub fn knots(&self) -> &[f64] {
        &self.t
    }

    pub fn values(&self) -> &[f64] {
        &self.cdf
    }

    fn cdf_at(&self, x: f64) -> f64 {
        let t = &self.t;
        if x < t[0] {
            return 0.0;
        }
        let last = t.len() - 1;
        if x >= t[last] {
            return 1.0;
        }
        let i = t.partition_point(|&k| k <= x) - 1;
        let s = (x - t[i]) / (t[i + 1] - t[i]);
        self.cdf[i] + s * (self.cdf[i + 1] - self.cdf[i])
    }
}

#[derive(Serialize, Deserialize)]
struct AtomSpec {
    t: Vec<f64>,
    p: Vec<f64>,
}

/// A finitely supported screen: atoms at distinct positions with positive weights.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "AtomSpec", into = "AtomSpec")]
pub struct AtomScreen {
    t: Vec<f64>,
    p: Vec<f64>,
    /// `tail[j] = Σ_{i ≥ j} p_i`.
    tail: Vec<f64>,
}

impl TryFrom<AtomSpec> for AtomScreen {
    type Error = Error;

    fn try_from(spec: AtomSpec) -> Result<Self> {
        if spec.t.is_empty() || spec.t.len() != spec.p.len() {
            return Err(input("atom screen needs matching, nonempty t and p columns"));
        }
        let mut pairs = Vec::with_capacity(spec.t.len());
        for (&x, &w) in spec.t.iter().zip(&spec.p) {
            if !(x >= 0.0) || !x.is_finite() {
                return Err(input(format!("atom position must be finite and nonnegative, got {x}")));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(input(format!("atom weight must be finite and nonnegative, got {w}")));
            }
            if w > 0.0 {
                pairs.push((x, w));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut t: Vec<f64> = Vec::with_capacity(pairs.len());
        let mut p: Vec<f64> = Vec::with_capacity(pairs.len());
        for (x, w) in pairs {
            match t.last() {
                Some(&last) if last == x => *p.last_mut().expect("same length") += w,
                _ => {
                    t.push(x);
                    p.push(w);
                }
            }
        }
        let total: f64 = p.iter().sum();
        if t.is_empty() || (total - 1.0).abs() > 1e-9 {
            return Err(input(format!("atom weights must sum to 1, got {total}")));
        }
        p.iter_mut().for_each(|w| *w /= total);
        let mut tail = vec![0.0; p.len()];
        let mut acc = 0.0;
        for j in (0..p.len()).rev() {
            acc += p[j];
            tail[j] = acc;
        }
        Ok(AtomScreen { t, p, tail })
    }
}

impl From<AtomScreen> for AtomSpec {
    fn from(a: AtomScreen) -> Self {
        AtomSpec { t: a.t, p: a.p }
    }
}

impl AtomScreen {
    pub fn positions(&self) -> &[f64] {
        &self.t
    }

    pub fn weights(&self) -> &[f64] {
        &self.p
    }
}

/// A distribution on `[0, ∞)` in one of three representations.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Screen {
    Closed(ClosedScreen),
    Grid(GridScreen),
    Atoms(AtomScreen),
}

/// Observable inscribed radius of a screen.
///
/// For full-support screens the value is exact and `lower == upper`.
/// Otherwise only the bracket `[PartInRad(1 - η), BSep(η)]` is certified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObsInRad {
    pub lower: f64,
    pub upper: f64,
}

impl ObsInRad {
    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }

    /// The exact value, when the bracket has collapsed.
    pub fn value(&self) -> Option<f64> {
        self.is_exact().then_some(self.upper)
    }
}

impl Screen {
    /// A closed-form screen for `law`.
    pub fn closed(law: DensityLaw) -> Result<Screen> {
        Ok(Screen::Closed(ClosedScreen::try_from(ClosedSpec { law, scale: 1.0 })?))
    }

    /// A grid screen whose support flag is inferred from the data.
    pub fn grid(t: Vec<f64>, cdf: Vec<f64>) -> Result<Screen> {
        Ok(Screen::Grid(GridScreen::try_from(GridSpec { t, cdf, full_support: None })?))
    }

    /// A grid screen with an explicit support flag.
    pub fn grid_with_support(t: Vec<f64>, cdf: Vec<f64>, full_support: bool) -> Result<Screen> {
        let spec = GridSpec { t, cdf, full_support: Some(full_support) };
        Ok(Screen::Grid(GridScreen::try_from(spec)?))
    }

    /// An atomic screen. Zero weights are dropped and coincident atoms merged.
    pub fn atoms(t: Vec<f64>, p: Vec<f64>) -> Result<Screen> {
        Ok(Screen::Atoms(AtomScreen::try_from(AtomSpec { t, p })?))
    }

    /// Parses a screen from its JSON form.
    pub fn from_json(text: &str) -> Result<Screen> {
        serde_json::from_str(text).map_err(|e| input(format!("screen JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("screens always serialise")
    }

    /// `F(t) = P[T ≤ t]`.
    pub fn cdf(&self, t: f64) -> f64 {
        match self {
            Screen::Closed(c) => c.prepared.cdf(t / c.scale),
            Screen::Grid(g) => g.cdf_at(t),
            Screen::Atoms(a) => {
                let k = a.t.partition_point(|&x| x <= t);
                if k == a.t.len() {
                    1.0
                } else {
                    1.0 - a.tail[k]
                }
            }
        }
    }

    /// `F(t⁻) = P[T < t]`.
    pub fn cdf_left(&self, t: f64) -> f64 {
        match self {
            Screen::Closed(c) => c.prepared.cdf(t / c.scale),
            Screen::Grid(g) => {
                if t <= g.t[0] {
                    0.0
                } else {
                    g.cdf_at(t)
                }
            }
            Screen::Atoms(a) => {
                let k = a.t.partition_point(|&x| x < t);
                if k == a.t.len() {
                    1.0
                } else {
                    1.0 - a.tail[k]
                }
            }
        }
    }

    /// `P[T ≥ r]`.
    pub fn tail(&self, r: f64) -> f64 {
        match self {
            Screen::Closed(c) => c.prepared.survival(r / c.scale),
            Screen::Atoms(a) => {
                let k = a.t.partition_point(|&x| x < r);
                if k == a.t.len() {
                    0.0
                } else {
                    a.tail[k]
                }
            }
            Screen::Grid(_) => 1.0 - self.cdf_left(r),
        }
    }

    /// `P[T > r]`.
    fn exceed(&self, r: f64) -> f64 {
        match self {
            Screen::Closed(c) => c.prepared.survival(r / c.scale),
            _ => 1.0 - self.cdf(r),
        }
    }

    /// Distribution function on an ascending list of points.
    pub fn cdf_many(&self, ts: &[f64]) -> Vec<f64> {
        match self {
            Screen::Closed(c) => {
                let p = &c.prepared;
                let mut out = Vec::with_capacity(ts.len());
                let mut prev: Option<(f64, f64)> = None;
                for &t in ts {
                    let x = t / c.scale;
                    let f = match prev {
                        Some((px, pf)) if x >= px && px > p.support().0 => {
                            (pf + p.mass_between(px, x)).clamp(0.0, 1.0)
                        }
                        _ => p.cdf(x),
                    };
                    out.push(f);
                    prev = Some((x, f));
                }
                out
            }
            _ => ts.iter().map(|&t| self.cdf(t)).collect(),
        }
    }

    /// Upper end of the support (`+∞` for unbounded closed laws).
    pub fn support_end(&self) -> f64 {
        match self {
            Screen::Closed(c) => c.prepared.support().1 * c.scale,
            Screen::Grid(g) => {
                let i = g.cdf.iter().position(|&f| f >= 1.0).expect("last value is 1");
                g.t[i]
            }
            Screen::Atoms(a) => *a.t.last().expect("nonempty"),
        }
    }

    /// Whether the screen has positive density on all of `(0, support_end)`.
    pub fn is_full_support(&self) -> bool {
        match self {
            Screen::Closed(c) => c.law.full_support(),
            Screen::Grid(g) => g.full_support,
            Screen::Atoms(_) => false,
        }
    }

    /// Points where the distribution function may jump.
    pub fn jump_points(&self) -> Vec<f64> {
        match self {
            Screen::Closed(_) => vec![],
            Screen::Grid(g) if g.cdf[0] > 0.0 => vec![g.t[0]],
            Screen::Grid(_) => vec![],
            Screen::Atoms(a) => a.t.clone(),
        }
    }

    /// Partial inscribed radius `inf{r : F(r) ≥ ξ}`.
    ///
    /// Zero for `ξ ≤ 0`, the support end for `ξ = 1` and an error for `ξ > 1`.
    pub fn part_inradius(&self, xi: f64) -> Result<f64> {
        if xi.is_nan() || xi > 1.0 {
            return Err(domain(format!("partial inradius needs ξ ≤ 1, got {xi}")));
        }
        if xi <= 0.0 {
            return Ok(0.0);
        }
        match self {
            Screen::Closed(c) => {
                if xi == 1.0 {
                    return Ok(self.support_end());
                }
                c.invert(xi, 1.0 - xi)
            }
            Screen::Grid(g) => {
                let i = g.cdf.partition_point(|&f| f < xi);
                if i == 0 {
                    return Ok(g.t[0]);
                }
                let (f0, f1) = (g.cdf[i - 1], g.cdf[i]);
                Ok(g.t[i - 1] + (xi - f0) / (f1 - f0) * (g.t[i] - g.t[i - 1]))
            }
            Screen::Atoms(a) => {
                let mut acc = 0.0;
                for (x, w) in a.t.iter().zip(&a.p) {
                    acc += w;
                    if acc >= xi - MASS_TOL {
                        return Ok(*x);
                    }
                }
                Ok(*a.t.last().expect("nonempty"))
            }
        }
    }

    /// Boundary separation distance `sup{r : P[T ≥ r] ≥ η}`.
    ///
    /// Zero when `η > 1` (no set has that much mass); an error for `η ≤ 0`.
    pub fn bsep_single(&self, eta: f64) -> Result<f64> {
        if !(eta > 0.0) {
            return Err(domain(format!("separation needs η > 0, got {eta}")));
        }
        if eta > 1.0 + MASS_TOL {
            return Ok(0.0);
        }
        match self {
            Screen::Closed(c) => {
                if eta >= 1.0 {
                    return Ok(c.prepared.support().0 * c.scale);
                }
                c.invert(1.0 - eta, eta)
            }
            Screen::Grid(g) => {
                let q = 1.0 - eta;
                if g.cdf[0] > q {
                    return Ok(g.t[0]);
                }
                let j = g.cdf.partition_point(|&f| f <= q) - 1;
                let (f0, f1) = (g.cdf[j], g.cdf[j + 1]);
                Ok(g.t[j] + (q - f0) / (f1 - f0) * (g.t[j + 1] - g.t[j]))
            }
            Screen::Atoms(a) => {
                let j = a.tail.iter().rposition(|&m| m >= eta - MASS_TOL).unwrap_or(0);
                Ok(a.t[j])
            }
        }
    }

    /// Observable inscribed radius `ObsInRad(X; -η)` as certified by the screen.
    pub fn obs_inradius(&self, eta: f64) -> Result<ObsInRad> {
        if !(eta > 0.0) {
            return Err(domain(format!("observable inradius needs η > 0, got {eta}")));
        }
        if eta >= 1.0 {
            return Ok(ObsInRad { lower: 0.0, upper: 0.0 });
        }
        let upper = self.bsep_single(eta)?;
        if self.is_full_support() {
            return Ok(ObsInRad { lower: upper, upper });
        }
        let lower = self.part_inradius(1.0 - eta)?.min(upper);
        Ok(ObsInRad { lower, upper })
    }

    /// Ky Fan distance to the point mass at 0: `inf{ε ≥ 0 : P[T > ε] ≤ ε}`.
    pub fn ky_fan_zero(&self) -> f64 {
        if let Screen::Atoms(a) = self {
            let m = a.t.len();
            // On [x_j, x_{j+1}) the exceedance probability is the tail after j.
            let mut left = 0.0f64;
            for j in 0..=m {
                let mass = if j == 0 { 1.0 } else if j < m { a.tail[j] } else { 0.0 };
                let right = if j < m { a.t[j] } else { f64::INFINITY };
                let cand = left.max(mass);
                if cand < right {
                    return cand;
                }
                left = right;
            }
            return left;
        }
        if self.exceed(0.0) <= 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > 1e-16 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.exceed(mid) <= mid {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    /// The law of `c·T`.
    pub fn scale(&self, c: f64) -> Result<Screen> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(domain(format!("scale factor must be positive and finite, got {c}")));
        }
        Ok(match self {
            Screen::Closed(s) => {
                Screen::Closed(ClosedScreen { scale: s.scale * c, ..s.clone() })
            }
            Screen::Grid(g) => Screen::Grid(GridScreen {
                t: g.t.iter().map(|x| x * c).collect(),
                ..g.clone()
            }),
            Screen::Atoms(a) => Screen::Atoms(AtomScreen {
                t: a.t.iter().map(|x| x * c).collect(),
                ..a.clone()
            }),
        })
    }

    /// A right end beyond which the distribution function is within `1e-12` of 1.
    fn extent(&self) -> f64 {
        let end = self.support_end();
        if end.is_finite() {
            end
        } else {
            self.part_inradius(1.0 - 1e-12).unwrap_or(end)
        }
    }

    /// `(t, F(t))` pairs suitable for plotting or CSV export.
    ///
    /// Grid screens report their knots, atomic screens both sides of every
    /// jump and closed screens `n` evenly spaced points.
    pub fn csv_points(&self, n: usize) -> Vec<(f64, f64)> {
        match self {
            Screen::Grid(g) => g.t.iter().copied().zip(g.cdf.iter().copied()).collect(),
            Screen::Atoms(a) => {
                let mut out = vec![(0.0, 0.0)];
                for &x in &a.t {
                    out.push((x, self.cdf_left(x)));
                    out.push((x, self.cdf(x)));
                }
                out
            }
            Screen::Closed(_) => {
                let n = n.max(2);
                let hi = self.extent();
                let ts: Vec<f64> = (0..n).map(|i| hi * i as f64 / (n - 1) as f64).collect();
                let fs = self.cdf_many(&ts);
                ts.into_iter().zip(fs).collect()
            }
        }
    }
}

/// Kolmogorov–Smirnov distance `sup_t |F₁(t) - F₂(t)|`, accurate to about `10⁻⁶`.
pub fn ks_distance(a: &Screen, b: &Screen) -> f64 {
    let mut best = 0.0f64;
    let mut jumps = a.jump_points();
    jumps.extend(b.jump_points());
    for &t in &jumps {
        best = best.max((a.cdf(t) - b.cdf(t)).abs());
        best = best.max((a.cdf_left(t) - b.cdf_left(t)).abs());
    }
    let hi = a.extent().max(b.extent());
    const SAMPLES: usize = 4096;
    let mut ts: Vec<f64> = (0..=SAMPLES).map(|i| hi * i as f64 / SAMPLES as f64).collect();
    for s in [a, b] {
        if let Screen::Grid(g) = s {
            ts.extend(g.t.iter().copied().filter(|&x| x <= hi));
        }
    }
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let fa = a.cdf_many(&ts);
    let fb = b.cdf_many(&ts);
    let diff: Vec<f64> = fa.iter().zip(&fb).map(|(x, y)| (x - y).abs()).collect();
    let grid_best = diff.iter().copied().fold(0.0, f64::max);
    best = best.max(grid_best);
    let mut peaks: Vec<usize> = (1..ts.len() - 1)
        .filter(|&i| diff[i] >= diff[i - 1] && diff[i] >= diff[i + 1] && diff[i] >= 0.5 * grid_best)
        .collect();
    peaks.sort_by(|&i, &j| diff[j].total_cmp(&diff[i]));
    for &i in peaks.iter().take(16) {
        let (_, v) = golden_min(|t| -(a.cdf(t) - b.cdf(t)).abs(), ts[i - 1], ts[i + 1], 1e-12 * hi.max(1.0));
        best = best.max(-v);
    }
    best
}

/// Free-function form of [`Screen::part_inradius`].
pub fn part_inradius(s: &Screen, xi: f64) -> Result<f64> {
    s.part_inradius(xi)
}

/// Free-function form of [`Screen::bsep_single`].
pub fn bsep_single(s: &Screen, eta: f64) -> Result<f64> {
    s.bsep_single(eta)
}

/// Free-function form of [`Screen::obs_inradius`].
pub fn obs_inradius(s: &Screen, eta: f64) -> Result<ObsInRad> {
    s.obs_inradius(eta)
}

/// Free-function form of [`Screen::ky_fan_zero`].
pub fn ky_fan_zero(s: &Screen) -> f64 {
    s.ky_fan_zero()
}

/// Free-function form of [`Screen::scale`].
pub fn scale(s: &Screen, c: f64) -> Result<Screen> {
    s.scale(c)
}
