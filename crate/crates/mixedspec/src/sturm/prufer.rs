//! Prüfer phase integration for oscillation-safe eigenvalue bracketing.
//!
//! For `z ≥ 1` the scaled phase `φ` with `u = r sin(φ)/z`, `u′ = r cos(φ)`
//! obeys `φ′ = z − (q/z) sin²φ`; for `0 ≤ z < 1` the unscaled phase `θ`
//! with `u = r sinθ`, `u′ = r cosθ` obeys `θ′ = cos²θ + (z² − q) sin²θ`.
//! Both formulations place right-endpoint Dirichlet/Neumann conditions at
//! the same half-integer multiples of π, and the endpoint phase crosses
//! those targets strictly monotonically in `z`, which makes the bisection
//! predicate below branch-independent.

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::sturm::integrate::StepRule;

/// Left boundary condition as a phase start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LeftPhase {
    /// Dirichlet: `u(0) = 0` → phase 0.
    Dirichlet,
    /// Neumann: `u′(0) = 0` → phase π/2.
    Neumann,
}

impl LeftPhase {
    #[inline]
    fn start(self) -> f64 {
        match self {
            LeftPhase::Dirichlet => 0.0,
            LeftPhase::Neumann => std::f64::consts::FRAC_PI_2,
        }
    }
}

#[inline]
fn rk4_phase(f: &impl Fn(f64, f64) -> f64, x: f64, y: f64, h: f64) -> f64 {
    let k1 = f(x, y);
    let k2 = f(x + 0.5 * h, y + 0.5 * h * k1);
    let k3 = f(x + 0.5 * h, y + 0.5 * h * k2);
    let k4 = f(x + h, y + h * k3);
    y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Endpoint phase `φ(1; z)` for `z ≥ 0`.
pub fn endpoint_phase(q: &Potential, left: LeftPhase, z: f64, rule: StepRule) -> Result<f64> {
    let mut phi = left.start();
    let gh = q.spacing();
    let n_cells = q.grid_n - 1;
    let scaled = z >= 1.0;
    let z2 = z * z;
    let f_scaled = |x: f64, p: f64| {
        let s = p.sin();
        z - (q.eval(x) / z) * s * s
    };
    let f_unscaled = |x: f64, p: f64| {
        let c = p.cos();
        let s = p.sin();
        c * c + (z2 - q.eval(x)) * s * s
    };
    for cell in 0..n_cells {
        let x0 = cell as f64 * gh;
        let m = rule.substeps(gh, z).max(1);
        let h = gh / m as f64;
        for k in 0..m {
            let x = x0 + k as f64 * h;
            phi = if scaled {
                rk4_phase(&f_scaled, x, phi, h)
            } else {
                rk4_phase(&f_unscaled, x, phi, h)
            };
        }
    }
    if !phi.is_finite() {
        return Err(Error::Integration(format!(
            "non-finite phase at z={z} (grid too coarse for this potential)"
        )));
    }
    Ok(phi)
}

/// Smallest admissible spectral parameter for bracketing (phase formulation
/// needs z ≥ 0; exact 0 is allowed by the unscaled phase).
pub const Z_FLOOR: f64 = 0.0;

/// Locate the unique `z > 0` with `φ(1; z) = target` by bisection on the
/// monotone predicate `φ(1; z) ≥ target`.
///
/// Bisection runs in two stages: a cheap low-refinement stage narrows the
/// bracket to ~1e−9, then the full-refinement stage polishes to width
/// `1e−12` (no Newton steps — derivative noise near clustered roots is
/// not worth the speedup).
pub fn bisect_phase_target(
    q: &Potential,
    left: LeftPhase,
    target: f64,
    guess: f64,
    rule: StepRule,
) -> Result<f64> {
    let coarse = StepRule::new((rule.refine / 4).max(2));
    let width0 = 0.55 + q.sup_norm() / (2.0 * guess.max(1.0));
    let mut lo = (guess - width0).max(Z_FLOOR);
    let mut hi = guess + width0;
    let pred = |z: f64, r: StepRule| -> Result<bool> {
        Ok(endpoint_phase(q, left, z, r)? >= target)
    };
    // Expand the bracket until the predicate straddles it.
    let mut grow = width0;
    while pred(lo, coarse)? {
        if lo <= Z_FLOOR {
            return Err(Error::Positivity(format!(
                "phase already exceeds target {target:.6} at z=0 — eigenvalue is not positive"
            )));
        }
        grow *= 1.7;
        lo = (lo - grow).max(Z_FLOOR);
    }
    let mut grow = width0;
    while !pred(hi, coarse)? {
        grow *= 1.7;
        hi += grow;
        if hi > guess + 1e4 {
            return Err(Error::Bracket(format!(
                "no phase crossing of target {target:.6} found below z={hi:.3}"
            )));
        }
    }
    // Stage 1: coarse refinement down to 1e−9.
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if pred(mid, coarse)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    // Stage 2: full refinement for the last decades. The coarse and fine
    // integrators may disagree by more than the remaining width (the coarse
    // phase error is bounded by ~‖q‖/(30000·z) for the refine-2 rule), so
    // the bracket is re-opened by that bound before polishing.
    let slack = 4e-6 * (1.0 + q.sup_norm()) / guess.max(1.0) + 1e-10;
    lo = (lo - slack).max(Z_FLOOR);
    hi += slack;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if pred(mid, rule)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
