//! Hermite–Biehler structure function of the boundary data.
//!
//! `E(z) = z·u_z(1) + i·u′_z(1)` with u the 0-anchored solution.  Its
//! symmetric/antisymmetric parts on the real axis,
//! `A(z) = z·u_z(1)` and `B(z) = u′_z(1)`, vanish exactly on the
//! Dirichlet–Dirichlet and Dirichlet–Neumann spectra respectively, the
//! two zero sets interlace, and E satisfies |E(z̄)| < |E(z)| in the upper
//! half-plane (for q = 0, E = i·e^{−iz}).
//!
//! Sampling A at the free Dirichlet points πn (and B at π(n−½)) gives
//! alternating-sign residuals whose normalized form
//! `(−1)^n · n · A(πn)` converges to the constant −∫q/(2π) with an
//! l²-summable remainder; the report returns the fitted constants and
//! the partial sums of the squared remainders.

use crate::error::Result;
use crate::potential::Potential;
use crate::sturm::eigen::{eigenvalues, BoundaryPair, SpectralSequence};
use crate::sturm::integrate::{integrate_columns_complex, integrate_columns_real, StepRule};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Evaluate E(z) = z·u_z(1) + i·u′_z(1).
pub fn eval_e(q: &Potential, z: Complex64, rule: StepRule) -> Result<Complex64> {
    let cols = integrate_columns_complex(q, 0.0, 1.0, z, rule)?;
    Ok(z * cols.u + Complex64::i() * cols.du)
}

/// Evaluate A(x) = x·u_x(1) on the real axis.
pub fn eval_a(q: &Potential, x: f64, rule: StepRule) -> Result<f64> {
    let cols = integrate_columns_real(q, 0.0, 1.0, x * x, rule)?;
    Ok(x * cols.u)
}

/// Evaluate B(x) = u′_x(1) on the real axis.
pub fn eval_b(q: &Potential, x: f64, rule: StepRule) -> Result<f64> {
    let cols = integrate_columns_real(q, 0.0, 1.0, x * x, rule)?;
    Ok(cols.du)
}

/// Structure report: zero sets, interlacing, residual asymptotics, and
/// an upper-half-plane margin witness.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HbReport {
    /// Positive zeros of A (the Dirichlet–Dirichlet spectrum).
    pub dd: SpectralSequence,
    /// Zeros of B (the Dirichlet–Neumann spectrum).
    pub dn: SpectralSequence,
    /// Whether 0 < η_1 < λ_1 < η_2 < … holds over the window.
    pub interlaced: bool,
    /// Fitted constant of (−1)^n·n·A(πn) (≈ −∫q/(2π)).
    pub a_residual_constant: f64,
    /// Fitted constant of (−1)^{n+1}·(n−½)·B(π(n−½)) (≈ +∫q/(2π)).
    pub b_residual_constant: f64,
    /// Partial sums of squared A-residuals after constant removal.
    pub a_residual_l2: Vec<f64>,
    /// Partial sums of squared B-residuals after constant removal.
    pub b_residual_l2: Vec<f64>,
    /// min(|E(z)| − |E(z̄)|) over sample points with Im z > 0 (positive
    /// when the Hermite–Biehler inequality holds there).
    pub hb_margin: f64,
}

fn fit_constant_and_l2(residuals: &[f64]) -> (f64, Vec<f64>) {
    let n = residuals.len();
    let mut top: Vec<f64> = residuals[n / 2..].to_vec();
    top.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let c = if top.is_empty() {
        0.0
    } else if top.len() % 2 == 1 {
        top[top.len() / 2]
    } else {
        0.5 * (top[top.len() / 2 - 1] + top[top.len() / 2])
    };
    let mut acc = 0.0;
    let sums = residuals
        .iter()
        .map(|r| {
            let d = r - c;
            acc += d * d;
            acc
        })
        .collect();
    (c, sums)
}

/// Build the structure report over the first `count` eigenvalue pairs.
pub fn hermite_biehler_report(q: &Potential, count: usize, rule: StepRule) -> Result<HbReport> {
    let dd = eigenvalues(q, BoundaryPair::DD, count, rule)?;
    let dn = eigenvalues(q, BoundaryPair::DN, count, rule)?;
    let interlaced = SpectralSequence::check_interlaced_dd_dn(&dd, &dn).is_ok();

    let mut a_res = Vec::with_capacity(count);
    let mut b_res = Vec::with_capacity(count);
    for n in 1..=count {
        let xn = PI * n as f64;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        a_res.push(sign * n as f64 * eval_a(q, xn, rule)?);
        let xh = PI * (n as f64 - 0.5);
        b_res.push(-sign * (n as f64 - 0.5) * eval_b(q, xh, rule)?);
    }
    let (a_c, a_l2) = fit_constant_and_l2(&a_res);
    let (b_c, b_l2) = fit_constant_and_l2(&b_res);

    let mut margin = f64::INFINITY;
    for &(re, im) in &[(0.7, 0.5), (3.3, 1.0), (-2.0, 0.25), (9.1, 2.0)] {
        let z = Complex64::new(re, im);
        let e_up = eval_e(q, z, rule)?;
        let e_dn = eval_e(q, z.conj(), rule)?.conj();
        margin = margin.min(e_up.norm() - e_dn.norm());
    }

    Ok(HbReport {
        dd,
        dn,
        interlaced,
        a_residual_constant: a_c,
        b_residual_constant: b_c,
        a_residual_l2: a_l2,
        b_residual_l2: b_l2,
        hb_margin: margin,
    })
}
