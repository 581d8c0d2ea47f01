//! Eigenvalue computation for the four Dirichlet/Neumann boundary pairs.

use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::sturm::integrate::StepRule;
use crate::sturm::prufer::{bisect_phase_target, LeftPhase};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Boundary condition pair (left, right); D = value zero, N = derivative
/// zero at the endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryPair {
    DD,
    DN,
    ND,
    NN,
}

impl BoundaryPair {
    /// Phase start at the left endpoint.
    pub fn left(self) -> LeftPhase {
        match self {
            BoundaryPair::DD | BoundaryPair::DN => LeftPhase::Dirichlet,
            BoundaryPair::ND | BoundaryPair::NN => LeftPhase::Neumann,
        }
    }

    /// Endpoint phase target for the n-th positive eigenvalue (n ≥ 1).
    pub fn target(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            BoundaryPair::DD => n * PI,
            BoundaryPair::DN => (n - 0.5) * PI,
            BoundaryPair::ND => n * PI,
            BoundaryPair::NN => (n + 0.5) * PI,
        }
    }

    /// Free-operator position of the n-th positive eigenvalue (bracket
    /// guess).
    pub fn free_guess(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            BoundaryPair::DD | BoundaryPair::NN => n * PI,
            BoundaryPair::DN | BoundaryPair::ND => (n - 0.5) * PI,
        }
    }

    /// Whether the sequence adjoins the point 0 (DD convention).
    pub fn adjoins_zero(self) -> bool {
        matches!(self, BoundaryPair::DD)
    }
}

/// Square-root-transformed spectrum: the positive branch `λ_1 < λ_2 < …`
/// of z-values with `z²` an eigenvalue, plus an implied symmetric negative
/// branch, plus an optional adjoined point at 0 (DD sequences).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralSequence {
    /// Strictly increasing positive branch.
    pub lams: Vec<f64>,
    /// True when the point 0 is adjoined (DD sequences).
    pub has_zero: bool,
}

impl SpectralSequence {
    /// Build from a positive branch; enforces strict increase and
    /// positivity.
    pub fn new(lams: Vec<f64>, has_zero: bool) -> Result<Self> {
        if lams.is_empty() {
            return Err(Error::Precondition("empty spectral sequence".into()));
        }
        if lams[0] <= 0.0 {
            return Err(Error::Positivity(format!(
                "first element of positive branch must be > 0, got {}",
                lams[0]
            )));
        }
        for w in lams.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Precondition(format!(
                    "sequence not strictly increasing at {} ≥ {}",
                    w[0], w[1]
                )));
            }
        }
        Ok(SpectralSequence { lams, has_zero })
    }

    /// The free Dirichlet–Dirichlet sequence πn (with 0 adjoined).
    pub fn free_dd(count: usize) -> Self {
        SpectralSequence {
            lams: (1..=count).map(|n| n as f64 * PI).collect(),
            has_zero: true,
        }
    }

    /// The free Dirichlet–Neumann sequence π(n−½).
    pub fn free_dn(count: usize) -> Self {
        SpectralSequence {
            lams: (1..=count).map(|n| (n as f64 - 0.5) * PI).collect(),
            has_zero: false,
        }
    }

    /// Number of positive-branch entries.
    pub fn len(&self) -> usize {
        self.lams.len()
    }

    /// True when the positive branch is empty (never for constructed
    /// sequences).
    pub fn is_empty(&self) -> bool {
        self.lams.is_empty()
    }

    /// Check strict interlacing `0 < η_1 < λ_1 < η_2 < λ_2 < …` of a
    /// DN sequence (`dn`, self) against a DD sequence (`dd`).
    pub fn check_interlaced_dd_dn(dd: &SpectralSequence, dn: &SpectralSequence) -> Result<()> {
        let n = dd.len().min(dn.len());
        if n == 0 {
            return Err(Error::Precondition("empty sequences".into()));
        }
        if dn.lams[0] <= 0.0 {
            return Err(Error::Interlacing("η_1 must be positive".into()));
        }
        for i in 0..n {
            if !(dn.lams[i] < dd.lams[i]) {
                return Err(Error::Interlacing(format!(
                    "η_{} = {} does not precede λ_{} = {}",
                    i + 1,
                    dn.lams[i],
                    i + 1,
                    dd.lams[i]
                )));
            }
            if i + 1 < n && !(dd.lams[i] < dn.lams[i + 1]) {
                return Err(Error::Interlacing(format!(
                    "λ_{} = {} does not precede η_{} = {}",
                    i + 1,
                    dd.lams[i],
                    i + 2,
                    dn.lams[i + 1]
                )));
            }
        }
        Ok(())
    }

    /// Residuals `n(λ_n − free_n)` against the free positions, the fitted
    /// asymptotic constant (median of the top half), and the monotone l²
    /// partial sums of the constant-corrected residuals.
    pub fn asymptotic_residuals(&self, free: impl Fn(usize) -> f64) -> AsymptoticReport {
        let res: Vec<f64> = self
            .lams
            .iter()
            .enumerate()
            .map(|(i, l)| (i + 1) as f64 * (l - free(i + 1)))
            .collect();
        let mut top: Vec<f64> = res[res.len() / 2..].to_vec();
        top.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let constant = if top.is_empty() {
            0.0
        } else {
            top[top.len() / 2]
        };
        let mut partial = 0.0;
        let partial_sums: Vec<f64> = res
            .iter()
            .map(|r| {
                let d = r - constant;
                partial += d * d;
                partial
            })
            .collect();
        AsymptoticReport {
            residuals: res,
            constant,
            l2_partial_sums: partial_sums,
        }
    }
}

/// Report of residual asymptotics for a computed sequence.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsymptoticReport {
    /// `n(λ_n − free_n)`.
    pub residuals: Vec<f64>,
    /// Fitted constant (median of the top half of the residuals).
    pub constant: f64,
    /// Monotone partial sums of `(n(λ_n − free_n) − constant)²`.
    pub l2_partial_sums: Vec<f64>,
}

/// Compute the first `count` positive eigen-parameters of
/// `−u″ + qu = z²u` under the boundary pair `bc`.
pub fn eigenvalues(
    q: &Potential,
    bc: BoundaryPair,
    count: usize,
    rule: StepRule,
) -> Result<SpectralSequence> {
    if count == 0 {
        return Err(Error::Precondition("count must be ≥ 1".into()));
    }
    let left = bc.left();
    let lams: Result<Vec<f64>> = (1..=count)
        .into_par_iter()
        .map(|n| bisect_phase_target(q, left, bc.target(n), bc.free_guess(n), rule))
        .collect();
    let lams = lams?;
    SpectralSequence::new(lams, bc.adjoins_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialForm;

    #[test]
    fn free_dd_eigenvalues() {
        let q = Potential::zero();
        let s = eigenvalues(&q, BoundaryPair::DD, 5, StepRule::default()).unwrap();
        for (i, l) in s.lams.iter().enumerate() {
            assert!((l - (i + 1) as f64 * PI).abs() < 1e-10, "n={} λ={}", i + 1, l);
        }
        assert!(s.has_zero);
    }

    #[test]
    fn constant_dn_closed_form() {
        let c = 3.0;
        let q = Potential::from_form(&PotentialForm::Constant { c }, 64).unwrap();
        let s = eigenvalues(&q, BoundaryPair::DN, 6, StepRule::default()).unwrap();
        for (i, l) in s.lams.iter().enumerate() {
            let f = ((i + 1) as f64 - 0.5) * PI;
            let expect = (f * f + c).sqrt();
            assert!((l - expect).abs() < 1e-9, "n={} λ={} vs {}", i + 1, l, expect);
        }
    }

    #[test]
    fn dd_dn_interlace() {
        let q = Potential::from_form(
            &PotentialForm::Cosine {
                amp: 4.0,
                periods: 1,
            },
            129,
        )
        .unwrap();
        let dd = eigenvalues(&q, BoundaryPair::DD, 8, StepRule::default()).unwrap();
        let dn = eigenvalues(&q, BoundaryPair::DN, 8, StepRule::default()).unwrap();
        SpectralSequence::check_interlaced_dd_dn(&dd, &dn).unwrap();
    }

    #[test]
    fn reflection_preserves_dd_spectrum() {
        let q = Potential::from_fn(|x| x, 65).unwrap();
        let r = q.reflect();
        let a = eigenvalues(&q, BoundaryPair::DD, 6, StepRule::default()).unwrap();
        let b = eigenvalues(&r, BoundaryPair::DD, 6, StepRule::default()).unwrap();
        for (x, y) in a.lams.iter().zip(&b.lams) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }

    #[test]
    fn shift_covariance() {
        let base = Potential::from_form(
            &PotentialForm::Cosine {
                amp: 2.0,
                periods: 2,
            },
            129,
        )
        .unwrap();
        let shifted = base.shift(1.5);
        let a = eigenvalues(&base, BoundaryPair::DD, 5, StepRule::default()).unwrap();
        let b = eigenvalues(&shifted, BoundaryPair::DD, 5, StepRule::default()).unwrap();
        for (x, y) in a.lams.iter().zip(&b.lams) {
            assert!((y * y - (x * x + 1.5)).abs() < 1e-8, "{x} {y}");
        }
    }

    #[test]
    fn nn_free_eigenvalues() {
        let q = Potential::zero();
        let s = eigenvalues(&q, BoundaryPair::NN, 4, StepRule::default()).unwrap();
        for (i, l) in s.lams.iter().enumerate() {
            assert!((l - (i + 1) as f64 * PI).abs() < 1e-9);
        }
    }

    #[test]
    fn nd_free_eigenvalues() {
        let q = Potential::zero();
        let s = eigenvalues(&q, BoundaryPair::ND, 4, StepRule::default()).unwrap();
        for (i, l) in s.lams.iter().enumerate() {
            assert!((l - ((i + 1) as f64 - 0.5) * PI).abs() < 1e-9);
        }
    }
}
