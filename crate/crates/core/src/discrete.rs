//! Finite metric measure spaces with boundary, realised as weighted graphs.
//!
//! The metric is the shortest path metric of a connected graph with
//! positive edge lengths and the boundary is a nonempty vertex subset. The
//! distance to the boundary, its screen and the boundary separation
//! distances of families of vertex sets are computed exactly (by
//! enumeration on small graphs) or bounded from below by an explicit family.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, input, Error, Result};
use crate::screen::{Screen, MASS_TOL};

/// Largest graph accepted by [`SeparationMode::Exact`].
pub const EXACT_MAX_VERTICES: usize = 20;

#[derive(Serialize, Deserialize)]
struct GraphSpec {
    vertices: usize,
    edges: Vec<(usize, usize, f64)>,
    boundary: Vec<usize>,
    #[serde(default)]
    measure: Option<Vec<f64>>,
}

/// A connected weighted graph with a boundary vertex set and a probability
/// measure on the vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GraphSpec", into = "GraphSpec")]
pub struct BoundaryGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    boundary: Vec<usize>,
    measure: Vec<f64>,
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl TryFrom<GraphSpec> for BoundaryGraph {
    type Error = Error;

    fn try_from(s: GraphSpec) -> Result<Self> {
        let measure = s.measure.unwrap_or_else(|| vec![1.0 / s.vertices.max(1) as f64; s.vertices]);
        BoundaryGraph::new(s.vertices, s.edges, s.boundary, measure)
    }
}

impl From<BoundaryGraph> for GraphSpec {
    fn from(g: BoundaryGraph) -> Self {
        GraphSpec { vertices: g.n, edges: g.edges, boundary: g.boundary, measure: Some(g.measure) }
    }
}

#[derive(Clone, Copy, PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl BoundaryGraph {
    /// Validates and builds a graph.
    ///
    /// Edge lengths must be positive, the boundary nonempty, the measure
    /// nonnegative with total 1 (within `10⁻¹²`) and the graph connected.
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>, boundary: Vec<usize>, measure: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(input("a graph needs at least one vertex"));
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v, len) in &edges {
            if u >= n || v >= n {
                return Err(input(format!("edge ({u}, {v}) refers to a vertex outside 0..{n}")));
            }
            if !(len > 0.0 && len.is_finite()) {
                return Err(input(format!("edge ({u}, {v}) has nonpositive length {len}")));
            }
            adjacency[u].push((v, len));
            adjacency[v].push((u, len));
        }
        let mut boundary = boundary;
        boundary.sort_unstable();
        boundary.dedup();
        if boundary.is_empty() {
            return Err(input("the boundary must contain at least one vertex"));
        }
        if let Some(b) = boundary.iter().find(|&&b| b >= n) {
            return Err(input(format!("boundary vertex {b} is outside 0..{n}")));
        }
        if measure.len() != n {
            return Err(input(format!("{} measure weights for {n} vertices", measure.len())));
        }
        if let Some(i) = measure.iter().position(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(input(format!("vertex {i} has invalid weight {}", measure[i])));
        }
        let total: f64 = measure.iter().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(input(format!("vertex weights must sum to 1, got {total}")));
        }
        let g = BoundaryGraph { n, edges, boundary, measure, adjacency };
        let reached = g.distances_from(&[0]).iter().filter(|d| d.is_finite()).count();
        if reached != n {
            return Err(input(format!("the graph is disconnected ({reached} of {n} vertices reachable from 0)")));
        }
        Ok(g)
    }

    /// Parses `{"vertices": n, "edges": [[u, v, len], …], "boundary": […], "measure": […]}`.
    /// A missing measure means the uniform one.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| input(format!("graph JSON: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graphs always serialise")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    /// Multi-source Dijkstra from `sources`.
    fn distances_from(&self, sources: &[usize]) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.n];
        let mut heap = BinaryHeap::new();
        for &s in sources {
            dist[s] = 0.0;
            heap.push(Entry(0.0, s));
        }
        while let Some(Entry(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, len) in &self.adjacency[u] {
                let nd = d + len;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(Entry(nd, v));
                }
            }
        }
        dist
    }

    /// `ρ(v) = d(v, ∂X)` for every vertex.
    pub fn rho_boundary(&self) -> Vec<f64> {
        self.distances_from(&self.boundary)
    }

    /// All pairwise shortest path distances.
    pub fn distance_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|v| self.distances_from(&[v])).collect()
    }

    /// CSV with columns `vertex,rho`.
    pub fn rho_csv(&self) -> String {
        let mut out = String::from("vertex,rho\n");
        for (v, r) in self.rho_boundary().iter().enumerate() {
            out.push_str(&format!("{v},{r:?}\n"));
        }
        out
    }

    /// The law of `ρ` under the vertex measure.
    pub fn screen(&self) -> Screen {
        Screen::atoms(self.rho_boundary(), self.measure.clone()).expect("a validated graph has a valid screen")
    }

    /// The law of an admissible `φ`: nonnegative, zero on the boundary and
    /// 1-Lipschitz along every edge.
    pub fn lipschitz_screen(&self, phi: &[f64]) -> Result<Screen> {
        if phi.len() != self.n {
            return Err(input(format!("{} values for {} vertices", phi.len(), self.n)));
        }
        if let Some(v) = phi.iter().position(|x| !(*x >= 0.0 && x.is_finite())) {
            return Err(domain(format!("φ must be finite and nonnegative, vertex {v} has {}", phi[v])));
        }
        if let Some(&b) = self.boundary.iter().find(|&&b| phi[b] != 0.0) {
            return Err(domain(format!("φ must vanish on the boundary, vertex {b} has {}", phi[b])));
        }
        for &(u, v, len) in &self.edges {
            if (phi[u] - phi[v]).abs() > len * (1.0 + 1e-12) {
                return Err(domain(format!(
                    "φ is not 1-Lipschitz on edge ({u}, {v}): |{} - {}| > {len}",
                    phi[u], phi[v]
                )));
            }
        }
        Screen::atoms(phi.to_vec(), self.measure.clone())
    }

    /// `D({Ω_α})`: the least mutual distance and distance to the boundary.
    pub fn family_separation(&self, family: &[Vec<usize>]) -> f64 {
        let rho = self.rho_boundary();
        let mut d = f64::INFINITY;
        for set in family {
            for &v in set {
                d = d.min(rho[v]);
            }
        }
        for (a, sa) in family.iter().enumerate() {
            for sb in &family[a + 1..] {
                for &u in sa {
                    let du = self.distances_from(&[u]);
                    for &v in sb {
                        d = d.min(du[v]);
                    }
                }
            }
        }
        d
    }

    fn mass_of(&self, set: &[usize]) -> f64 {
        set.iter().map(|&v| self.measure[v]).sum()
    }
}

/// `ρ` for every vertex, see [`BoundaryGraph::rho_boundary`].
pub fn rho_boundary(g: &BoundaryGraph) -> Vec<f64> {
    g.rho_boundary()
}

/// Atom screen of `ρ` under the vertex measure.
pub fn graph_screen(g: &BoundaryGraph) -> Screen {
    g.screen()
}

/// Pushforward of the vertex measure under an admissible `φ`.
pub fn lipschitz_screen(g: &BoundaryGraph, phi: &[f64]) -> Result<Screen> {
    g.lipschitz_screen(phi)
}

/// How [`bsep_k`] treats two or more sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeparationMode {
    /// Exhaustive search, limited to [`EXACT_MAX_VERTICES`] vertices.
    Exact,
    /// A lower bound certified by an explicit family.
    Greedy,
}

/// A separation value together with a family attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    pub value: f64,
    /// Vertex sets `Ω_α` in the order of the masses; `None` when no family
    /// with positive separation exists and the value is 0.
    pub witness: Option<Vec<Vec<usize>>>,
}

/// `BSep(X; η_1, …, η_k)`.
///
/// One set is always handled exactly through the superlevel sets of `ρ`.
/// Several sets are searched exhaustively in [`SeparationMode::Exact`] and
/// bounded from below by an explicit family in [`SeparationMode::Greedy`].
/// The value is 0 when no family of the required masses is separated.
pub fn bsep_k(g: &BoundaryGraph, etas: &[f64], mode: SeparationMode) -> Result<Separation> {
    if etas.is_empty() {
        return Err(domain("separation needs at least one mass"));
    }
    if let Some(bad) = etas.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
        return Err(domain(format!("masses must be positive, got {bad}")));
    }
    if mode == SeparationMode::Exact && g.n > EXACT_MAX_VERTICES {
        return Err(domain(format!(
            "exact separation is limited to {EXACT_MAX_VERTICES} vertices, the graph has {}",
            g.n
        )));
    }
    let none = Separation { value: 0.0, witness: None };
    if etas.iter().sum::<f64>() > 1.0 + MASS_TOL {
        return Ok(none);
    }
    let rho = g.rho_boundary();
    if etas.len() == 1 {
        let value = g.screen().bsep_single(etas[0])?;
        let set: Vec<usize> = (0..g.n).filter(|&v| rho[v] >= value).collect();
        return Ok(if value > 0.0 { Separation { value, witness: Some(vec![set]) } } else { none });
    }
    let dist = g.distance_matrix();
    let mut candidates: Vec<f64> = rho.iter().copied().chain(dist.iter().flatten().copied()).filter(|&d| d > 0.0).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let found = match mode {
        SeparationMode::Exact => exact_search(g, &rho, &dist, etas, &candidates),
        SeparationMode::Greedy => candidates.iter().rev().find_map(|&d| greedy_family(g, &rho, &dist, etas, d)),
    };
    Ok(match found {
        Some(family) => Separation { value: g.family_separation(&family), witness: Some(family) },
        None => none,
    })
}

/// Largest candidate `D` admitting a family, by bisection over the sorted
/// candidates (feasibility is monotone in `D`).
fn exact_search(g: &BoundaryGraph, rho: &[f64], dist: &[Vec<f64>], etas: &[f64], candidates: &[f64]) -> Option<Vec<Vec<usize>>> {
    let n = g.n;
    let size = 1usize << n;
    let mut mass = vec![0.0; size];
    for s in 1..size {
        let low = s.trailing_zeros() as usize;
        mass[s] = mass[s & (s - 1)] + g.measure[low];
    }
    let mut near_of = vec![0u32; size];
    let attempt = |d: f64, near_of: &mut Vec<u32>| -> Option<Vec<u32>> {
        let region = (0..n).filter(|&v| rho[v] >= d).fold(0u32, |m, v| m | (1 << v));
        let near: Vec<u32> = (0..n)
            .map(|u| (0..n).filter(|&v| dist[u][v] < d).fold(0u32, |m, v| m | (1 << v)))
            .collect();
        for s in 1..size {
            let low = s.trailing_zeros() as usize;
            near_of[s] = near_of[s & (s - 1)] | near[low];
        }
        let mut chosen = Vec::with_capacity(etas.len());
        place(region, etas, &mass, near_of, &mut chosen).then_some(chosen)
    };
    let (mut lo, mut hi) = (0usize, candidates.len());
    let mut best = None;
    // Invariant: candidates[..lo] are feasible, candidates[hi..] are not.
    while lo < hi {
        let mid = (lo + hi) / 2;
        match attempt(candidates[mid], &mut near_of) {
            Some(family) => {
                best = Some(family);
                lo = mid + 1;
            }
            None => hi = mid,
        }
    }
    best.map(|fam| fam.into_iter().map(|m| (0..n).filter(|&v| m >> v & 1 == 1).collect()).collect())
}

/// Chooses `Ω_1 ⊂ region` of mass `η_1`, removes its `D`-neighbourhood and
/// recurses; the last set takes everything left.
fn place(region: u32, etas: &[f64], mass: &[f64], near_of: &[u32], chosen: &mut Vec<u32>) -> bool {
    let need: f64 = etas.iter().sum();
    if mass[region as usize] < need - MASS_TOL {
        return false;
    }
    let (first, rest) = etas.split_first().expect("nonempty");
    if rest.is_empty() {
        chosen.push(region);
        return true;
    }
    let mut sub = region;
    while sub != 0 {
        if mass[sub as usize] >= first - MASS_TOL {
            let left = region & !near_of[sub as usize];
            chosen.push(sub);
            if place(left, rest, mass, near_of, chosen) {
                return true;
            }
            chosen.pop();
        }
        sub = (sub - 1) & region;
    }
    false
}

/// Tries to build a family with separation at least `d`.
///
/// Sets are grown one at a time, largest mass first. Each set is seeded at
/// an admissible vertex, trying seeds in decreasing `ρ`, and grown by the
/// nearest admissible vertices until it has the required mass.
fn greedy_family(g: &BoundaryGraph, rho: &[f64], dist: &[Vec<f64>], etas: &[f64], d: f64) -> Option<Vec<Vec<usize>>> {
    let n = g.n;
    let mut order: Vec<usize> = (0..etas.len()).collect();
    order.sort_by(|&a, &b| etas[b].total_cmp(&etas[a]));
    let mut by_rho: Vec<usize> = (0..n).filter(|&v| rho[v] >= d).collect();
    by_rho.sort_by(|&a, &b| rho[b].total_cmp(&rho[a]));

    for &first_seed in &by_rho {
        let mut owner: Vec<Option<usize>> = vec![None; n];
        let mut family = vec![Vec::new(); etas.len()];
        let mut ok = true;
        for (rank, &alpha) in order.iter().enumerate() {
            let admissible = |v: usize, owner: &[Option<usize>]| {
                rho[v] >= d
                    && owner[v].is_none()
                    && (0..n).all(|u| owner[u].map_or(true, |o| o == alpha || dist[u][v] >= d))
            };
            let seed = if rank == 0 {
                Some(first_seed)
            } else {
                by_rho.iter().copied().find(|&v| admissible(v, &owner))
            };
            let Some(seed) = seed else {
                ok = false;
                break;
            };
            owner[seed] = Some(alpha);
            family[alpha].push(seed);
            while g.mass_of(&family[alpha]) < etas[alpha] - MASS_TOL {
                let next = (0..n)
                    .filter(|&v| admissible(v, &owner))
                    .min_by(|&a, &b| {
                        let da = family[alpha].iter().map(|&u| dist[u][a]).fold(f64::INFINITY, f64::min);
                        let db = family[alpha].iter().map(|&u| dist[u][b]).fold(f64::INFINITY, f64::min);
                        da.total_cmp(&db).then(rho[b].total_cmp(&rho[a]))
                    });
                match next {
                    Some(v) => {
                        owner[v] = Some(alpha);
                        family[alpha].push(v);
                    }
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            family.iter_mut().for_each(|s| s.sort_unstable());
            return Some(family);
        }
    }
    None
}

/// Direction of a sequence of values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Constant,
    Increasing,
    Decreasing,
    Mixed,
}

impl Trend {
    /// Classifies `values`, treating relative changes below `10⁻¹²` as ties.
    pub fn of(values: &[f64]) -> Trend {
        let (mut up, mut down) = (false, false);
        for w in values.windows(2) {
            let tol = 1e-12 * w[0].abs().max(w[1].abs()).max(1e-300);
            if w[1] > w[0] + tol {
                up = true;
            } else if w[1] < w[0] - tol {
                down = true;
            }
        }
        match (up, down) {
            (false, false) => Trend::Constant,
            (true, false) => Trend::Increasing,
            (false, true) => Trend::Decreasing,
            (true, true) => Trend::Mixed,
        }
    }
}

/// Metrics of one graph in an equivalence check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceRow {
    pub vertices: usize,
    pub obs_lower: f64,
    pub obs_upper: f64,
    /// Largest `d(Ω, ∂X)` over sets of mass at least `η`.
    pub superlevel_distance: f64,
    /// `μ(B_r(∂X))`, the mass of `{ρ ≤ r}`.
    pub boundary_mass: f64,
}

/// Trend report for a finite sequence of graphs.
///
/// Boundary concentration is an asymptotic property: a sequence concentrates
/// when the observable inscribed radius and the separation distance tend to
/// 0, equivalently when the mass near the boundary tends to 1. A finite
/// sequence only shows whether these move together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub r: f64,
    pub eta: f64,
    pub rows: Vec<EquivalenceRow>,
    pub obs_trend: Trend,
    pub separation_trend: Trend,
    pub boundary_mass_trend: Trend,
    pub note: String,
}

/// Computes the three equivalent concentration metrics along `seq`.
pub fn concentration_equivalence_check(seq: &[BoundaryGraph], r: f64, eta: f64) -> Result<EquivalenceReport> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(domain(format!("radius must be positive, got {r}")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(domain(format!("η must lie in (0, 1), got {eta}")));
    }
    let mut rows = Vec::with_capacity(seq.len());
    for g in seq {
        let screen = g.screen();
        let obs = screen.obs_inradius(eta)?;
        let rho = g.rho_boundary();
        let boundary_mass = (0..g.n).filter(|&v| rho[v] <= r).map(|v| g.measure[v]).sum::<f64>().min(1.0);
        rows.push(EquivalenceRow {
            vertices: g.n,
            obs_lower: obs.lower,
            obs_upper: obs.upper,
            superlevel_distance: screen.bsep_single(eta)?,
            boundary_mass,
        });
    }
    let trend = |f: fn(&EquivalenceRow) -> f64| Trend::of(&rows.iter().map(f).collect::<Vec<_>>());
    Ok(EquivalenceReport {
        r,
        eta,
        obs_trend: trend(|row| row.obs_upper),
        separation_trend: trend(|row| row.superlevel_distance),
        boundary_mass_trend: trend(|row| row.boundary_mass),
        note: "trends of a finite sequence; concentration itself is a limit and is not decided here".into(),
        rows,
    })
}
