//! The eigenvalue inequalities of weighted manifolds with boundary, checked
//! on a radial problem.
//!
//! Every entry is stored in the form `lhs ≤ rhs` and passes when
//! `lhs ≤ rhs + 10⁻⁶ max(|lhs|, |rhs|)`. Inequalities whose hypotheses are
//! nonnegative weighted Ricci curvature and mean curvature only run when the
//! problem carries both curvature flags.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::numeric::brent;

use super::RadialProblem;

/// Relative tolerance of every audit entry.
pub const AUDIT_TOL: f64 = 1e-6;

/// `(t*, sup_{t>0} (1 - e^{-t})/√t)`, located at the root of `e^{-t}(2t + 1) = 1`.
pub fn heat_supremum() -> (f64, f64) {
    let t = brent(|t| (-t).exp() * (2.0 * t + 1.0) - 1.0, 0.5, 3.0, 1e-15)
        .expect("the stationarity condition changes sign on [0.5, 3]");
    (t, (1.0 - (-t).exp()) / t.sqrt())
}

/// The constant `a` in the lower bound `I_f ≥ a √ν_1` under nonnegative curvature.
pub fn buser_ledoux_constant() -> f64 {
    let prefactor = 2.0 * PI.sqrt() / ((1.0 + 2f64.cbrt()).sqrt() * (1.0 + 4f64.powf(2.0 / 3.0)));
    prefactor * heat_supremum().1
}

/// The constant `C` in `ν_k ≤ C k² ν_1`, obtained by combining the upper
/// bound `I_f ≤ 8√2 k ν_1/√ν_k` with the lower bound `I_f ≥ a √ν_1`.
pub fn universal_constant() -> f64 {
    let ratio = 8.0 * 2f64.sqrt() / buser_ledoux_constant();
    ratio * ratio
}

/// One audited inequality `lhs ≤ rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs - lhs`.
    pub margin: f64,
    pub passed: bool,
}

impl AuditEntry {
    fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs());
        AuditEntry { name: name.into(), lhs, rhs, margin: rhs - lhs, passed: lhs <= rhs + AUDIT_TOL * scale }
    }
}

/// Outcome of [`audit_inequalities`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub eigenvalues: Vec<f64>,
    pub isoperimetric: f64,
    pub inradius: f64,
    pub entries: Vec<AuditEntry>,
    /// Inequalities left out because the curvature flags are not both set.
    pub skipped: Vec<String>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn violations(&self) -> Vec<&AuditEntry> {
        self.entries.iter().filter(|e| !e.passed).collect()
    }

    pub fn entry(&self, name: &str) -> Option<&AuditEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialise")
    }

    /// One row per entry with columns `name,lhs,rhs,margin,passed`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for e in &self.entries {
            w.serialize(e).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("flushing to memory")).expect("CSV is UTF-8")
    }
}

/// Evaluates the eigenvalue inequalities on `p` for `k ≤ k_max` and each
/// mass `η` in `etas`.
///
/// Always audited: `I ≤ 2√ν_1`, `I ≤ 8√2 k ν_1/√ν_k`,
/// `ObsInRad(-η) ≤ 2/√(ν_1 η)` and, for `k ≤ 3` sets of equal mass `η`,
/// `BSep(η, …, η) ≤ 2/√(ν_k η)`. With both curvature flags also
/// `a √ν_1 ≤ I`, `π² (2 InRad)^{-2} ≤ ν_1` and `ν_k ≤ C k² ν_1`.
pub fn audit_inequalities(p: &RadialProblem, k_max: usize, etas: &[f64]) -> Result<AuditReport> {
    if k_max == 0 {
        return Err(domain("k_max must be at least 1"));
    }
    if let Some(bad) = etas.iter().find(|&&e| !(e > 0.0 && e <= 1.0)) {
        return Err(domain(format!("masses must lie in (0, 1], got {bad}")));
    }
    let nu = p.spectrum(k_max)?.eigenvalues;
    let iso = p.isoperimetric_constant();
    let inrad = p.inradius();
    let screen = p.screen()?;
    let mut entries = Vec::new();
    let mut skipped = Vec::new();

    entries.push(AuditEntry::new("cheeger", iso, 2.0 * nu[0].sqrt()));
    for k in 1..=k_max {
        let rhs = 8.0 * 2f64.sqrt() * k as f64 * nu[0] / nu[k - 1].sqrt();
        entries.push(AuditEntry::new(format!("higher_order_cheeger[k={k}]"), iso, rhs));
    }

    if p.flags().is_some_and(|f| f.both()) {
        entries.push(AuditEntry::new("buser_ledoux", buser_ledoux_constant() * nu[0].sqrt(), iso));
        entries.push(AuditEntry::new("li_yau", PI * PI / (4.0 * inrad * inrad), nu[0]));
        let c = universal_constant();
        for k in 2..=k_max {
            let kf = k as f64;
            entries.push(AuditEntry::new(format!("eigenvalue_growth[k={k}]"), nu[k - 1], c * kf * kf * nu[0]));
        }
    } else {
        skipped.push("buser_ledoux".to_string());
        skipped.push("li_yau".to_string());
        skipped.extend((2..=k_max).map(|k| format!("eigenvalue_growth[k={k}]")));
    }

    for &eta in etas {
        let obs = screen.obs_inradius(eta)?.upper;
        entries.push(AuditEntry::new(format!("observable_radius[eta={eta}]"), obs, 2.0 / (nu[0] * eta).sqrt()));
        for k in 1..=k_max.min(3) {
            if k as f64 * eta > 1.0 {
                continue;
            }
            let bsep = p.separation(&vec![eta; k])?;
            let rhs = 2.0 / (nu[k - 1] * eta).sqrt();
            entries.push(AuditEntry::new(format!("separation[k={k},eta={eta}]"), bsep, rhs));
        }
    }

    Ok(AuditReport { eigenvalues: nu, isoperimetric: iso, inradius: inrad, entries, skipped })
}
