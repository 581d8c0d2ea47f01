//! Krein shifts of spectral measures, the exponential Herglotz identity,
//! and mass recovery from two spectra.
//!
//! The transform of a symmetric spectral measure is odd on the real
//! line, negative exactly on a union of intervals (pole, next zero) on
//! the positive axis and their reflected companions.  The shift
//! function k = 1 on those intervals satisfies `Hμ(z) = exp(Hk(z))`
//! where `Hk(z) = Σ_j Ln((b_j − z)/(a_j − z))` is summed in symmetric
//! ±pairs; for measures with the free tail each window term is paired
//! with its free companion interval (πj, πj + π/2) (reflected on the
//! negative axis) and the infinite remainder is absorbed exactly into
//! Ln(−cot z).  No additive constant appears in this pairing: the free
//! case reduces to the cotangent product formula identically.
//!
//! For operator measures the interval endpoints are the two boundary
//! spectra (poles: Dirichlet–Dirichlet plus the atom at 0; zeros:
//! Dirichlet–Neumann), so the masses — the residues of exp(Hk) — are
//! computable from the two spectra alone, which is the content of
//! [`masses_from_two_spectra`].

use crate::error::{Error, Result};
use crate::herglotz::eval::{herglotz_eval, neg_cot};
use crate::herglotz::measure::{Side, SpectralMeasure, TailModel};
use crate::potential::Potential;
use crate::sturm::eigen::{eigenvalues, BoundaryPair, SpectralSequence};
use crate::sturm::integrate::StepRule;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A Krein shift: the indicator of a union of disjoint intervals, split
/// into the positive-axis list and its negative-axis companions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KreinShift {
    /// Intervals (a_j, b_j) on the positive axis (a_0 may be 0), ordered
    /// increasing, j = 0, 1, ….
    pub pos: Vec<(f64, f64)>,
    /// Intervals on the negative axis, k = 1, 2, … moving leftward;
    /// stored as ordered pairs (a, b) with a < b (so (−λ_k, −η_k)).
    pub neg: Vec<(f64, f64)>,
    /// FreePi: beyond the window the intervals continue as the free
    /// pattern (πj, πj + π/2) and its reflection.  Zero: nothing beyond.
    pub tail_model: TailModel,
}

impl KreinShift {
    pub fn new(pos: Vec<(f64, f64)>, neg: Vec<(f64, f64)>, tail_model: TailModel) -> Result<Self> {
        let mut last = f64::NEG_INFINITY;
        for &(a, b) in &pos {
            if !(a < b) || a < last {
                return Err(Error::Precondition(format!(
                    "positive-axis intervals must be disjoint and increasing; got ({a}, {b})"
                )));
            }
            last = b;
        }
        let mut last = f64::INFINITY;
        for &(a, b) in &neg {
            if !(a < b) || b > last || b > 0.0 {
                return Err(Error::Precondition(format!(
                    "negative-axis intervals must be disjoint, ≤ 0, and move leftward; got ({a}, {b})"
                )));
            }
            last = a;
        }
        Ok(KreinShift {
            pos,
            neg,
            tail_model,
        })
    }

    /// The free shift over a window of `count` interval pairs.
    pub fn free(count: usize) -> Self {
        KreinShift {
            pos: (0..count)
                .map(|j| (PI * j as f64, PI * j as f64 + PI / 2.0))
                .collect(),
            neg: (1..=count)
                .map(|k| (-PI * k as f64, -PI * k as f64 + PI / 2.0))
                .collect(),
            tail_model: TailModel::FreePi,
        }
    }

    /// Indicator value k(t) ∈ {0, 1} over the stored window.
    pub fn eval(&self, t: f64) -> f64 {
        let inside = |list: &[(f64, f64)]| list.iter().any(|&(a, b)| a < t && t < b);
        if inside(&self.pos) || inside(&self.neg) {
            1.0
        } else {
            0.0
        }
    }

    /// Total length of the stored window intervals.
    pub fn total_length(&self) -> f64 {
        self.pos
            .iter()
            .chain(&self.neg)
            .map(|&(a, b)| b - a)
            .sum()
    }
}

/// Principal log with the branch fixed from above on the negative real
/// axis (the +i0 limit): Im ∈ (−π, π].
fn ln_upper(w: Complex64) -> Complex64 {
    let w = if w.im == 0.0 {
        Complex64::new(w.re, 0.0) // normalize −0.0 to +0.0
    } else {
        w
    };
    w.ln()
}

/// Herglotz transform of a Krein shift:
/// `Hk(z) = Σ_j Ln((b_j − z)/(a_j − z))`, free-compensated when the
/// tail is FreePi.  Real z is treated as the +i0 boundary value.
pub fn herglotz_of_krein(k: &KreinShift, z: Complex64) -> Result<Complex64> {
    let interval_term = |a: f64, b: f64| -> Result<Complex64> {
        let num = b - z;
        let den = a - z;
        if den.norm() < 1e-13 * (1.0 + a.abs()) || num.norm() < 1e-13 * (1.0 + b.abs()) {
            return Err(Error::NearSingular(format!(
                "z = {z} is at an interval endpoint of ({a}, {b})"
            )));
        }
        Ok(ln_upper(num / den))
    };
    match k.tail_model {
        TailModel::FreePi => {
            let mut acc = ln_upper(neg_cot(z)?);
            for (j, &(a, b)) in k.pos.iter().enumerate() {
                let fa = PI * j as f64;
                let fb = fa + PI / 2.0;
                acc += interval_term(a, b)? - interval_term(fa, fb)?;
            }
            for (k_idx, &(a, b)) in k.neg.iter().enumerate() {
                let kk = (k_idx + 1) as f64;
                let fa = -PI * kk;
                let fb = fa + PI / 2.0;
                acc += interval_term(a, b)? - interval_term(fa, fb)?;
            }
            Ok(acc)
        }
        _ => {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(a, b) in k.pos.iter().chain(&k.neg) {
                acc += interval_term(a, b)?;
            }
            Ok(acc)
        }
    }
}

/// Locate the zero of Hμ in the open gap (lo, hi) between consecutive
/// atoms by bisection (the transform increases from −∞ to +∞ there).
fn zero_in_gap(mu: &SpectralMeasure, lo: f64, hi: f64) -> Result<f64> {
    let eval = |x: f64| -> Result<f64> {
        Ok(herglotz_eval(mu, Complex64::new(x, 0.0))?.re)
    };
    let inset = 1e-9 * (hi - lo);
    let (mut a, mut b) = (lo + inset, hi - inset);
    let (fa, fb) = (eval(a)?, eval(b)?);
    if !(fa < 0.0 && fb > 0.0) {
        return Err(Error::Bracket(format!(
            "transform does not change sign over the gap ({lo}, {hi}): {fa} … {fb}"
        )));
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if b - a < 1e-14 * (1.0 + m.abs()) {
            break;
        }
        if eval(m)? < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Krein shift of a symmetric spectral measure: one interval (atom,
/// zero above it) per gap on the positive axis, reflected as (−atom,
/// −zero below it) on the negative axis.
pub fn krein_shift_of_measure(mu: &SpectralMeasure) -> Result<KreinShift> {
    let n = mu.lams.len();
    if n < 2 {
        return Err(Error::Precondition(
            "need at least two positive atoms to form gaps".into(),
        ));
    }
    // Gap j = (t_j, t_{j+1}) with t_0 = 0; zeros ζ_j, j = 0 .. n−1.
    let mut zeros = Vec::with_capacity(n);
    for j in 0..n {
        let lo = if j == 0 { 0.0 } else { mu.lams[j - 1] };
        let hi = mu.lams[j];
        zeros.push(zero_in_gap(mu, lo, hi)?);
    }
    let mut pos = Vec::with_capacity(n);
    for j in 0..n {
        let t = if j == 0 { 0.0 } else { mu.lams[j - 1] };
        pos.push((t, zeros[j]));
    }
    let neg = (1..=n)
        .map(|k| (-mu.lams[k - 1], -zeros[k - 1]))
        .collect();
    KreinShift::new(pos, neg, mu.tail_model)
}

/// Krein shift of the right spectral measure of q, directly from the
/// two boundary spectra: positive intervals (λ_{j}, η_{j+1}) with
/// λ_0 = 0, negative intervals (−λ_k, −η_k).
pub fn krein_shift_of_operator(q: &Potential, count: usize, rule: StepRule) -> Result<KreinShift> {
    let dd = eigenvalues(q, BoundaryPair::DD, count, rule)?;
    let dn = eigenvalues(q, BoundaryPair::DN, count, rule)?;
    krein_shift_from_spectra(&dd, &dn)
}

/// Same construction from precomputed spectra.
pub fn krein_shift_from_spectra(
    dd: &SpectralSequence,
    dn: &SpectralSequence,
) -> Result<KreinShift> {
    SpectralSequence::check_interlaced_dd_dn(dd, dn)?;
    let n = dd.lams.len().min(dn.lams.len());
    let mut pos = Vec::with_capacity(n);
    for j in 0..n {
        let a = if j == 0 { 0.0 } else { dd.lams[j - 1] };
        pos.push((a, dn.lams[j]));
    }
    let neg = (1..=n).map(|k| (-dd.lams[k - 1], -dn.lams[k - 1])).collect();
    KreinShift::new(pos, neg, TailModel::FreePi)
}

/// Evaluation report of `Hμ(z) = exp(Hk(z) + c)` over a grid of
/// upper-half-plane points.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExponentialIdentityReport {
    /// Grid points (re, im).
    pub grid: Vec<(f64, f64)>,
    /// Relative error |exp(Hk) − Hμ|/|Hμ| at each grid point with c = 0.
    pub rel_errors: Vec<f64>,
    /// Largest relative error over the grid.
    pub max_rel_error: f64,
    /// Measured constant log|Hμ(i)| − Re Hk(i) (0 for this pairing).
    pub c_measured: f64,
}

/// Default 40-point verification grid: ten abscissas spread over three
/// free half-periods crossed with four heights.
pub fn default_identity_grid() -> Vec<Complex64> {
    let mut g = Vec::with_capacity(40);
    for i in 0..10 {
        let x = 0.4 + 0.9 * i as f64;
        for &y in &[0.5, 1.0, 2.0, 4.0] {
            g.push(Complex64::new(x, y));
        }
    }
    g
}

/// Check the exponential identity between a spectral measure and a
/// Krein shift over the grid (defaults to [`default_identity_grid`]).
pub fn verify_exponential_identity(
    mu: &SpectralMeasure,
    shift: &KreinShift,
    grid: Option<&[Complex64]>,
) -> Result<ExponentialIdentityReport> {
    let grid: Vec<Complex64> = match grid {
        Some(g) => g.to_vec(),
        None => default_identity_grid(),
    };
    let mut rel = Vec::with_capacity(grid.len());
    for &z in &grid {
        if z.im <= 0.0 {
            return Err(Error::Precondition(format!(
                "identity grid must lie in the upper half-plane; got {z}"
            )));
        }
        let lhs = herglotz_eval(mu, z)?;
        let rhs = herglotz_of_krein(shift, z)?.exp();
        rel.push((lhs - rhs).norm() / lhs.norm().max(1e-300));
    }
    let zi = Complex64::new(0.0, 1.0);
    let c = herglotz_eval(mu, zi)?.norm().ln() - herglotz_of_krein(shift, zi)?.re;
    let max_rel = rel.iter().cloned().fold(0.0_f64, f64::max);
    Ok(ExponentialIdentityReport {
        grid: grid.iter().map(|z| (z.re, z.im)).collect(),
        rel_errors: rel,
        max_rel_error: max_rel,
        c_measured: c,
    })
}

/// Recover the right-measure masses from the two boundary spectra.
///
/// The mass at λ_n is the residue of exp(Hk) there; with the
/// free-paired window sum this evaluates to
///
/// ```text
/// α_n = π · (η_{n+1} − λ_n)/(π/2)
///         · exp( Σ_{j≠n} [ J_j(λ_n) − J_j°(πn) ] )
/// ```
///
/// where J_j (resp. J_j°) is the real log-ratio of the j-th operator
/// (resp. free) interval and the sum runs over both axes of the window;
/// the atom at 0 uses its own interval (0, η_1) against (0, π/2).
/// Truncation error decays like 1/window, uniformly over the lower
/// third of the window; callers wanting masses to relative accuracy ε
/// should supply spectra a few times longer than the range they read.
pub fn masses_from_two_spectra(
    dd: &SpectralSequence,
    dn: &SpectralSequence,
) -> Result<SpectralMeasure> {
    SpectralSequence::check_interlaced_dd_dn(dd, dn)?;
    let n_win = dd.lams.len().min(dn.lams.len());
    if n_win < 2 {
        return Err(Error::Precondition(
            "need at least two eigenvalues of each kind".into(),
        ));
    }
    let lam = |j: usize| -> f64 {
        if j == 0 {
            0.0
        } else {
            dd.lams[j - 1]
        }
    };
    let eta = |j: usize| -> f64 { dn.lams[j - 1] };
    // J(a, b; x) = log|(b − x)/(a − x)|
    let jlog = |a: f64, b: f64, x: f64| ((b - x) / (a - x)).abs().ln();

    // Masses α_n for n = 0 .. n_win−1 (α_n needs η_{n+1}).
    let out = n_win;
    let mut masses = Vec::with_capacity(out);
    for n in 0..out {
        let x_op = lam(n);
        let x_fr = PI * n as f64;
        let own = (eta(n + 1) - x_op) / (PI / 2.0);
        let mut expo = 0.0;
        // Positive-axis intervals j = 0 .. n_win−1, skipping the own one.
        for j in 0..n_win {
            if j == n {
                continue;
            }
            let fa = PI * j as f64;
            expo += jlog(lam(j), eta(j + 1), x_op) - jlog(fa, fa + PI / 2.0, x_fr);
        }
        // Negative-axis intervals k = 1 .. n_win.
        for k in 1..=n_win {
            let fa = -PI * k as f64;
            expo += jlog(-lam(k), -eta(k), x_op) - jlog(fa, fa + PI / 2.0, x_fr);
        }
        let a = PI * own * expo.exp();
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::Positivity(format!(
                "recovered mass at index {n} is not positive: {a}"
            )));
        }
        masses.push(a);
    }
    let mass0 = masses.remove(0);
    SpectralMeasure::new(
        dd.lams[..out - 1].to_vec(),
        masses,
        mass0,
        TailModel::FreePi,
        Side::Right,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sturm::masses::norming_masses;
    use approx::assert_abs_diff_eq;

    #[test]
    fn free_operator_shift_matches_free_pattern() {
        let q = Potential::zero();
        let shift = krein_shift_of_operator(&q, 6, StepRule::default()).unwrap();
        let free = KreinShift::free(6);
        for (a, b) in shift.pos.iter().zip(&free.pos) {
            assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-9);
            assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-9);
        }
        for (a, b) in shift.neg.iter().zip(&free.neg) {
            assert_abs_diff_eq!(a.0, b.0, epsilon = 1e-9);
            assert_abs_diff_eq!(a.1, b.1, epsilon = 1e-9);
        }
    }

    #[test]
    fn free_exponential_identity_is_exact() {
        let mu = SpectralMeasure::free(8);
        let shift = KreinShift::free(8);
        let rep = verify_exponential_identity(&mu, &shift, None).unwrap();
        assert!(rep.max_rel_error < 1e-12, "rel {}", rep.max_rel_error);
        assert!(rep.c_measured.abs() < 1e-12, "c {}", rep.c_measured);
    }

    #[test]
    fn toy_single_interval_product() {
        // k = 1 on (1, 2) only: exp(Hk(z)) = (2−z)/(1−z).
        let k = KreinShift::new(vec![(1.0, 2.0)], vec![], TailModel::Zero).unwrap();
        for &z in &[
            Complex64::new(0.3, 0.8),
            Complex64::new(3.0, 0.2),
            Complex64::new(1.5, 0.0), // inside: +i0 branch, ratio negative
        ] {
            let h = herglotz_of_krein(&k, z).unwrap();
            let expect = (2.0 - z) / (1.0 - z);
            let got = h.exp();
            assert!((got - expect).norm() < 1e-12, "{got} vs {expect}");
        }
        // +i0 branch inside the interval carries Im Hk = π.
        let inside = herglotz_of_krein(&k, Complex64::new(1.5, 0.0)).unwrap();
        assert_abs_diff_eq!(inside.im, PI, epsilon = 1e-12);
    }

    #[test]
    fn shift_of_free_measure_has_half_period_zeros() {
        let mu = SpectralMeasure::free(12);
        let shift = krein_shift_of_measure(&mu).unwrap();
        for (j, &(a, b)) in shift.pos.iter().enumerate() {
            assert_abs_diff_eq!(a, PI * j as f64, epsilon = 1e-12);
            assert_abs_diff_eq!(b, PI * j as f64 + PI / 2.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn free_two_spectra_masses_are_pi() {
        let dd = SpectralSequence::free_dd(60);
        let dn = SpectralSequence::free_dn(60);
        let mu = masses_from_two_spectra(&dd, &dn).unwrap();
        assert_abs_diff_eq!(mu.mass0, PI, epsilon = 1e-6);
        for &a in &mu.masses {
            assert_abs_diff_eq!(a, PI, epsilon = 1e-6);
        }
    }

    #[test]
    fn two_spectra_masses_match_direct_for_constant_potential() {
        let q = Potential::from_fn(|_| 1.0, 257).unwrap();
        let rule = StepRule::default();
        let dd = eigenvalues(&q, BoundaryPair::DD, 80, rule).unwrap();
        let dn = eigenvalues(&q, BoundaryPair::DN, 80, rule).unwrap();
        let recovered = masses_from_two_spectra(&dd, &dn).unwrap();
        let lams_head = SpectralSequence::new(dd.lams[..10].to_vec(), true).unwrap();
        let direct = norming_masses(&q, &lams_head, Side::Right, rule).unwrap();
        let rel0 = (recovered.mass0 - direct.mass0).abs() / direct.mass0;
        assert!(rel0 < 2e-3, "atom at 0: rel {rel0}");
        for i in 0..10 {
            let rel = (recovered.masses[i] - direct.masses[i]).abs() / direct.masses[i];
            assert!(rel < 2e-3, "n = {}: rel {rel}", i + 1);
        }
    }

    #[test]
    fn operator_identity_near_exact_constant() {
        let q = Potential::from_fn(|_| 1.0, 257).unwrap();
        let rule = StepRule::default();
        let dd = eigenvalues(&q, BoundaryPair::DD, 60, rule).unwrap();
        let dn = eigenvalues(&q, BoundaryPair::DN, 60, rule).unwrap();
        let mu = masses_from_two_spectra(&dd, &dn).unwrap();
        let shift = krein_shift_from_spectra(&dd, &dn).unwrap();
        let rep = verify_exponential_identity(&mu, &shift, None).unwrap();
        assert!(rep.max_rel_error < 1e-2, "rel {}", rep.max_rel_error);
        assert!(rep.c_measured.abs() < 1e-2, "c {}", rep.c_measured);
    }

    #[test]
    fn interlacing_violation_is_rejected() {
        let dd = SpectralSequence::free_dd(5);
        let mut etas: Vec<f64> = (1..=5).map(|n| PI * (n as f64 - 0.5)).collect();
        etas[2] = dd.lams[2] + 0.1; // push η_3 above λ_3
        let dn = SpectralSequence::new(etas, false).unwrap();
        assert!(masses_from_two_spectra(&dd, &dn).is_err());
    }
}
