//! Isoperimetric constant and separation distances of radial problems.
//!
//! Both quantities are optimisations over subsets of the interval. With a
//! positive density the optimal competitors are intervals, so the search
//! runs over interval endpoints.

use crate::error::{domain, Result};
use crate::numeric::golden_min;

use super::{Boundary, RadialProblem};

/// Largest number of grid points used by the exhaustive endpoint scan.
const SCAN_POINTS: usize = 512;

/// `inf m⁺(Ω)/m(Ω)` over intervals `Ω` inside the open interval, plus the
/// intervals touching a Neumann end, whose perimeter is the interior face.
///
/// The scan runs over pairs of grid points on a subsampled grid and the
/// best pair is refined by golden-section search on the piecewise linear
/// density.
pub(super) fn isoperimetric_constant(p: &RadialProblem) -> f64 {
    let mass = p.mass();
    let t = p.grid();
    let theta = p.theta();
    let m = p.cells();
    let stride = m.div_ceil(SCAN_POINTS).max(1);
    let mut idx: Vec<usize> = (0..=m).step_by(stride).collect();
    if *idx.last().expect("nonempty") != m {
        idx.push(m);
    }
    let left_free = p.left_bc() == Boundary::Neumann;
    let right_free = p.right_bc() == Boundary::Neumann;
    let node_perimeter = |i: usize| {
        if (i == 0 && left_free) || (i == m && right_free) {
            0.0
        } else {
            theta[i]
        }
    };

    let mut best = (f64::INFINITY, 0, idx.len() - 1);
    for a in 0..idx.len() {
        let (i, pa) = (idx[a], node_perimeter(idx[a]));
        for (b, &j) in idx.iter().enumerate().skip(a + 1) {
            let mass_ab = mass.at_node(j) - mass.at_node(i);
            if mass_ab > 0.0 {
                let ratio = (pa + node_perimeter(j)) / mass_ab;
                if ratio < best.0 {
                    best = (ratio, a, b);
                }
            }
        }
    }

    let (mut value, a, b) = best;
    let (mut x, mut y) = (t[idx[a]], t[idx[b]]);
    let l = p.length();
    let perimeter = |s: f64| {
        if (s <= 0.0 && left_free) || (s >= l && right_free) {
            0.0
        } else {
            mass.density(s)
        }
    };
    let ratio = |x: f64, y: f64| {
        let mass_xy = mass.between(x, y);
        if mass_xy > 0.0 {
            (perimeter(x) + perimeter(y)) / mass_xy
        } else {
            f64::INFINITY
        }
    };
    let x_fixed = idx[a] == 0 && left_free;
    let y_fixed = idx[b] == m && right_free;
    let x_range = (t[idx[a.saturating_sub(1)]], t[idx[(a + 1).min(idx.len() - 1)]]);
    let y_range = (t[idx[b - 1]], t[idx[(b + 1).min(idx.len() - 1)]]);
    for _ in 0..4 {
        if !x_fixed {
            let hi = x_range.1.min(y);
            let (cand, v) = golden_min(|s| ratio(s, y), x_range.0, hi, 1e-12 * l);
            if v < value {
                (x, value) = (cand, v);
            }
        }
        if !y_fixed {
            let lo = y_range.0.max(x);
            let (cand, v) = golden_min(|s| ratio(x, s), lo, y_range.1, 1e-12 * l);
            if v < value {
                (y, value) = (cand, v);
            }
        }
    }
    value
}

/// Sup of `D` such that sets of normalised masses `η_α` fit with mutual
/// distances and distances to the Dirichlet ends at least `D`.
///
/// For a fixed left-to-right order the tightest packing uses consecutive
/// intervals of minimal length, so feasibility of `D` is decided greedily
/// and `D` is found by bisection. Every order of the masses is tried.
pub(super) fn separation(p: &RadialProblem, etas: &[f64]) -> Result<f64> {
    if etas.is_empty() || etas.len() > 8 {
        return Err(domain(format!("separation needs between 1 and 8 masses, got {}", etas.len())));
    }
    if let Some(bad) = etas.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
        return Err(domain(format!("masses must be positive, got {bad}")));
    }
    if etas.iter().sum::<f64>() > 1.0 {
        return Ok(0.0);
    }
    let mass = p.mass();
    let total = mass.total();
    let l = p.length();
    let left_wall = p.left_bc() == Boundary::Dirichlet;
    let right_wall = p.right_bc() == Boundary::Dirichlet;

    let feasible = |d: f64, order: &[f64]| {
        let mut pos = if left_wall { d } else { 0.0 };
        let end = if right_wall { l - d } else { l };
        if pos > end {
            return false;
        }
        let available = mass.up_to(end);
        for &eta in order {
            let target = mass.up_to(pos) + eta * total;
            if target > available * (1.0 + 4.0 * f64::EPSILON) {
                return false;
            }
            pos = mass.position_of(target) + d;
        }
        true
    };

    let mut best = 0.0f64;
    for order in permutations(etas) {
        if !feasible(best, &order) {
            continue;
        }
        let (mut lo, mut hi) = (best, l);
        while hi - lo > 1e-15 * l {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if feasible(mid, &order) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        best = best.max(lo);
    }
    Ok(best)
}

/// All distinct orderings of `items`.
fn permutations(items: &[f64]) -> Vec<Vec<f64>> {
    let mut sorted = items.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut out = vec![sorted.clone()];
    // Next lexicographic permutation, which skips repeated orderings.
    loop {
        let n = sorted.len();
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| sorted[i] < sorted[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| sorted[j] > sorted[i]).expect("a larger element exists");
        sorted.swap(i, j);
        sorted[i + 1..].reverse();
        out.push(sorted.clone());
    }
}
