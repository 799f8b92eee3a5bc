//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the library's numerical kernels: quadrature is
//! composite Simpson, root finding is plain bisection, the ODE is solved by
//! classical Runge–Kutta and erfc comes from a series and a continued fraction.

#![allow(dead_code)]

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section maximiser.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1) > f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// RK4 solution of `ψ'' + κψ = 0`, `ψ(0) = 1`, `ψ'(0) = -λ`, sampled at `ts` (ascending).
pub fn jacobi_rk4(kappa: f64, lambda: f64, ts: &[f64], h: f64) -> Vec<f64> {
    let (mut t, mut y, mut v) = (0.0f64, 1.0f64, -lambda);
    let mut out = Vec::with_capacity(ts.len());
    for &target in ts {
        while t < target {
            let dt = h.min(target - t);
            let k1 = (v, -kappa * y);
            let k2 = (v + 0.5 * dt * k1.1, -kappa * (y + 0.5 * dt * k1.0));
            let k3 = (v + 0.5 * dt * k2.1, -kappa * (y + 0.5 * dt * k2.0));
            let k4 = (v + dt * k3.1, -kappa * (y + dt * k3.0));
            y += dt / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
            v += dt / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
            t += dt;
        }
        out.push(y);
    }
    out
}

/// Complementary error function.
pub fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x < 2.5 {
        // Maclaurin series of erf.
        let mut term = x;
        let mut sum = x;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= -x * x / n;
            let add = term / (2.0 * n + 1.0);
            sum += add;
            if add.abs() <= 1e-18 * sum.abs() {
                break;
            }
        }
        return 1.0 - 2.0 / std::f64::consts::PI.sqrt() * sum;
    }
    // erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))).
    let mut tail = x;
    for k in (1..300).rev() {
        tail = x + (k as f64 / 2.0) / tail;
    }
    (-x * x).exp() / std::f64::consts::PI.sqrt() / tail
}

/// `S_{K,Λ}(r)` for `K > 0` in terms of erfc.
pub fn gaussian_tail_oracle(k: f64, lambda: f64, r: f64) -> f64 {
    let s = (2.0 * k).sqrt();
    erfc((k * r + lambda) / s) / erfc(lambda / s)
}

/// Lowest eigenvalue of `u'' - b u' + ν u = 0` on `[0, L]` with `u(0) = 0`
/// and `u'(L) = 0`, by RK4 shooting and bisection on `ν ∈ [lo, hi]`.
pub fn shooting_dn(b: f64, length: f64, lo: f64, hi: f64) -> f64 {
    let slope_at_end = |nu: f64| {
        let steps = 20_000;
        let h = length / steps as f64;
        let (mut u, mut v) = (0.0f64, 1.0f64);
        let rhs = |u: f64, v: f64| (v, b * v - nu * u);
        for _ in 0..steps {
            let (k1u, k1v) = rhs(u, v);
            let (k2u, k2v) = rhs(u + 0.5 * h * k1u, v + 0.5 * h * k1v);
            let (k3u, k3v) = rhs(u + 0.5 * h * k2u, v + 0.5 * h * k2v);
            let (k4u, k4v) = rhs(u + h * k3u, v + h * k3v);
            u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        v
    };
    bisect(slope_at_end, lo, hi)
}

/// Minimum over unions of at most two disjoint node intervals of
/// `perimeter / mass` for the trapezoidal density, as `(single, union)`.
/// Perimeter is counted at every endpoint except a Neumann end.
pub fn interval_family_minimum(t: &[f64], theta: &[f64], left_free: bool, right_free: bool) -> (f64, f64) {
    let n = t.len();
    let mut cum = vec![0.0];
    for i in 0..n - 1 {
        cum.push(cum[i] + 0.5 * (t[i + 1] - t[i]) * (theta[i] + theta[i + 1]));
    }
    let per = |i: usize| if (i == 0 && left_free) || (i == n - 1 && right_free) { 0.0 } else { theta[i] };
    let mut single = f64::INFINITY;
    let mut pairs = f64::INFINITY;
    for a in 0..n {
        for b in a + 1..n {
            let (p1, m1) = (per(a) + per(b), cum[b] - cum[a]);
            single = single.min(p1 / m1);
            for c in b + 1..n {
                for d in c + 1..n {
                    let p = p1 + per(c) + per(d);
                    pairs = pairs.min(p / (m1 + cum[d] - cum[c]));
                }
            }
        }
    }
    (single, pairs)
}

/// All-pairs shortest paths by Floyd–Warshall.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v, w) in edges {
        d[u][v] = d[u][v].min(w);
        d[v][u] = d[v][u].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// `BSep(η)` for one set by enumerating every vertex subset.
pub fn bsep_one_by_enumeration(rho: &[f64], measure: &[f64], eta: f64) -> f64 {
    let n = rho.len();
    let mut best = 0.0f64;
    for s in 1u32..(1 << n) {
        let members = (0..n).filter(|&v| s >> v & 1 == 1);
        let mass: f64 = members.clone().map(|v| measure[v]).sum();
        if mass >= eta - 1e-12 {
            best = best.max(members.map(|v| rho[v]).fold(f64::INFINITY, f64::min));
        }
    }
    best
}

/// `BSep(η_1, η_2)` by assigning every vertex to the first set, the second
/// set or neither.
pub fn bsep_two_by_enumeration(d: &[Vec<f64>], rho: &[f64], measure: &[f64], eta: (f64, f64)) -> f64 {
    let n = rho.len();
    let mut best = 0.0f64;
    let mut label = vec![0u8; n];
    let total = 3usize.pow(n as u32);
    for code in 0..total {
        let mut c = code;
        for l in label.iter_mut() {
            *l = (c % 3) as u8;
            c /= 3;
        }
        let mass = |k: u8| (0..n).filter(|&v| label[v] == k).map(|v| measure[v]).sum::<f64>();
        if mass(1) < eta.0 - 1e-12 || mass(2) < eta.1 - 1e-12 {
            continue;
        }
        let mut sep = f64::INFINITY;
        for u in 0..n {
            if label[u] == 0 {
                continue;
            }
            sep = sep.min(rho[u]);
            for v in 0..n {
                if label[v] != 0 && label[v] != label[u] {
                    sep = sep.min(d[u][v]);
                }
            }
        }
        best = best.max(sep);
    }
    best
}
