//! Discrete measures on the real line and the symmetric spectral measures
//! of Schrödinger operators.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Declared behavior of a measure beyond its stored window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailModel {
    /// Nothing is known beyond the window.
    None,
    /// Masses π at every point of πZ beyond the window (free-operator
    /// tail); enables free-reference splitting.
    FreePi,
    /// The measure is exactly zero beyond the window (finite measures,
    /// differences with matched tails).
    Zero,
}

/// A discrete real measure: support points with (possibly signed) masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    /// Strictly increasing support points.
    pub support: Vec<f64>,
    /// Masses, one per support point (signed allowed).
    pub masses: Vec<f64>,
    /// Behavior beyond the stored window.
    pub tail_model: TailModel,
}

impl DiscreteMeasure {
    pub fn new(support: Vec<f64>, masses: Vec<f64>, tail_model: TailModel) -> Result<Self> {
        if support.len() != masses.len() {
            return Err(Error::Precondition(format!(
                "support ({}) and masses ({}) length mismatch",
                support.len(),
                masses.len()
            )));
        }
        for w in support.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Precondition(format!(
                    "support not strictly increasing at {} ≥ {}",
                    w[0], w[1]
                )));
            }
        }
        if support.iter().chain(masses.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Precondition(
                "support and masses must be finite".into(),
            ));
        }
        Ok(DiscreteMeasure {
            support,
            masses,
            tail_model,
        })
    }

    /// Poisson-finiteness partial sums `Σ |m_j|/(1+λ_j²)` (monotone in the
    /// truncation).
    pub fn poisson_partial_sums(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.support
            .iter()
            .zip(&self.masses)
            .map(|(l, m)| {
                acc += m.abs() / (1.0 + l * l);
                acc
            })
            .collect()
    }

    /// Total |mass| over the window.
    pub fn abs_mass(&self) -> f64 {
        self.masses.iter().map(|m| m.abs()).sum()
    }
}

/// Which endpoint's norming data a spectral measure encodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// μ₋: masses β_n from left-endpoint data (norming constants of the
    /// 0-anchored eigenfunctions).
    Left,
    /// μ₊: masses α_n from right-endpoint data.
    Right,
}

/// Symmetric positive spectral measure
/// `μ = α₀δ₀ + Σ_{n≥1} α_n(δ_{λ_n} + δ_{−λ_n})`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    /// Positive branch of the support (strictly increasing, positive).
    pub lams: Vec<f64>,
    /// Masses at ±λ_n (shared by symmetry).
    pub masses: Vec<f64>,
    /// Mass of the atom at 0.
    pub mass0: f64,
    /// Behavior beyond the stored window.
    pub tail_model: TailModel,
    /// Which endpoint's norming data the masses represent.
    pub side: Side,
}

impl SpectralMeasure {
    pub fn new(
        lams: Vec<f64>,
        masses: Vec<f64>,
        mass0: f64,
        tail_model: TailModel,
        side: Side,
    ) -> Result<Self> {
        if lams.len() != masses.len() {
            return Err(Error::Precondition(format!(
                "support ({}) and masses ({}) length mismatch",
                lams.len(),
                masses.len()
            )));
        }
        if lams.is_empty() {
            return Err(Error::Precondition("empty spectral measure".into()));
        }
        if lams[0] <= 0.0 {
            return Err(Error::Positivity(
                "positive branch must start above 0".into(),
            ));
        }
        for w in lams.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Precondition(format!(
                    "support not strictly increasing at {} ≥ {}",
                    w[0], w[1]
                )));
            }
        }
        if masses.iter().any(|m| *m <= 0.0) || mass0 <= 0.0 {
            return Err(Error::Positivity(
                "spectral-measure masses must be strictly positive".into(),
            ));
        }
        Ok(SpectralMeasure {
            lams,
            masses,
            mass0,
            tail_model,
            side,
        })
    }

    /// The free measure (mass π at 0 and at every ±πn up to `count`).
    pub fn free(count: usize) -> Self {
        SpectralMeasure {
            lams: (1..=count).map(|n| n as f64 * PI).collect(),
            masses: vec![PI; count],
            mass0: PI,
            tail_model: TailModel::FreePi,
            side: Side::Right,
        }
    }

    /// Number of positive-branch atoms.
    pub fn len(&self) -> usize {
        self.lams.len()
    }

    /// True when no positive-branch atoms are stored (never for
    /// constructed measures).
    pub fn is_empty(&self) -> bool {
        self.lams.is_empty()
    }

    /// Monotone l² partial sums of `n(α_n/π − 1)` — the mass-asymptotics
    /// residual in normalized units.
    pub fn mass_residual_partial_sums(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.masses
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let r = (i + 1) as f64 * (a / PI - 1.0);
                acc += r * r;
                acc
            })
            .collect()
    }

    /// View as a plain signed measure over the full symmetric support
    /// (−λ_N … −λ_1, 0, λ_1 … λ_N).
    pub fn to_discrete(&self) -> DiscreteMeasure {
        let n = self.lams.len();
        let mut support = Vec::with_capacity(2 * n + 1);
        let mut masses = Vec::with_capacity(2 * n + 1);
        for i in (0..n).rev() {
            support.push(-self.lams[i]);
            masses.push(self.masses[i]);
        }
        support.push(0.0);
        masses.push(self.mass0);
        for i in 0..n {
            support.push(self.lams[i]);
            masses.push(self.masses[i]);
        }
        DiscreteMeasure {
            support,
            masses,
            tail_model: self.tail_model,
        }
    }

    /// Signed difference μ − ν on the common symmetric support (supports
    /// must match within `tol`); the result has `tail_model = Zero` when
    /// both inputs share a tail model (the tails cancel).
    pub fn difference(&self, other: &SpectralMeasure, tol: f64) -> Result<DiscreteMeasure> {
        if self.lams.len() != other.lams.len() {
            return Err(Error::Precondition(format!(
                "windows differ: {} vs {} atoms",
                self.lams.len(),
                other.lams.len()
            )));
        }
        for (a, b) in self.lams.iter().zip(&other.lams) {
            if (a - b).abs() > tol {
                return Err(Error::Precondition(format!(
                    "supports differ at {a} vs {b} beyond tol {tol}"
                )));
            }
        }
        if self.tail_model != other.tail_model {
            return Err(Error::Precondition(
                "tail models differ; difference tail undefined".into(),
            ));
        }
        let n = self.lams.len();
        let mut support = Vec::with_capacity(2 * n + 1);
        let mut masses = Vec::with_capacity(2 * n + 1);
        for i in (0..n).rev() {
            support.push(-self.lams[i]);
            masses.push(self.masses[i] - other.masses[i]);
        }
        support.push(0.0);
        masses.push(self.mass0 - other.mass0);
        for i in 0..n {
            support.push(self.lams[i]);
            masses.push(self.masses[i] - other.masses[i]);
        }
        Ok(DiscreteMeasure {
            support,
            masses,
            tail_model: TailModel::Zero,
        })
    }

    /// Signed difference μ − ν on the union of supports: every atom of
    /// `self` enters with its mass, every atom of `other` with negated
    /// mass, and atoms closer than `merge_tol` are combined into a single
    /// net atom at their |mass|-weighted center.  This is the honest
    /// difference when the two supports genuinely differ (two distinct
    /// operators), where the index-paired [`difference`](Self::difference)
    /// would silently discard the support displacement.  Tail models must
    /// match; they cancel, so the result carries `tail_model = Zero`.
    pub fn union_difference(
        &self,
        other: &SpectralMeasure,
        merge_tol: f64,
    ) -> Result<DiscreteMeasure> {
        if self.tail_model != other.tail_model {
            return Err(Error::Precondition(
                "tail models differ; difference tail undefined".into(),
            ));
        }
        if self.side != other.side {
            return Err(Error::Precondition(
                "cannot difference a left measure against a right measure".into(),
            ));
        }
        if !(merge_tol >= 0.0) {
            return Err(Error::Precondition(format!(
                "merge tolerance {merge_tol} must be nonnegative"
            )));
        }
        let mut atoms: Vec<(f64, f64)> =
            Vec::with_capacity(2 * (self.lams.len() + other.lams.len()) + 2);
        for (sign, mu) in [(1.0, self), (-1.0, other)] {
            for (l, m) in mu.lams.iter().zip(&mu.masses) {
                atoms.push((-l, sign * m));
                atoms.push((*l, sign * m));
            }
            atoms.push((0.0, sign * mu.mass0));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut support = Vec::new();
        let mut masses = Vec::new();
        let mut i = 0;
        while i < atoms.len() {
            let start = atoms[i].0;
            let mut j = i;
            let (mut net, mut wsum, mut wt) = (0.0, 0.0, 0.0);
            while j < atoms.len() && atoms[j].0 - start <= merge_tol {
                net += atoms[j].1;
                wsum += atoms[j].1.abs() * atoms[j].0;
                wt += atoms[j].1.abs();
                j += 1;
            }
            let center = if wt > 0.0 {
                wsum / wt
            } else {
                0.5 * (start + atoms[j - 1].0)
            };
            support.push(center);
            masses.push(net);
            i = j;
        }
        DiscreteMeasure::new(support, masses, TailModel::Zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_measure_shape() {
        let m = SpectralMeasure::free(5);
        assert_eq!(m.len(), 5);
        assert_eq!(m.mass0, PI);
        let d = m.to_discrete();
        assert_eq!(d.support.len(), 11);
        assert!((d.support[0] + 5.0 * PI).abs() < 1e-15);
        assert!((d.support[10] - 5.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn positivity_enforced() {
        assert!(SpectralMeasure::new(
            vec![1.0, 2.0],
            vec![1.0, -0.5],
            1.0,
            TailModel::FreePi,
            Side::Right
        )
        .is_err());
    }

    #[test]
    fn poisson_sums_monotone() {
        let d = DiscreteMeasure::new(
            vec![-2.0, 0.0, 2.0],
            vec![1.0, -1.0, 1.0],
            TailModel::Zero,
        )
        .unwrap();
        let s = d.poisson_partial_sums();
        assert!(s.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn difference_cancels_tail() {
        let a = SpectralMeasure::free(3);
        let mut b = SpectralMeasure::free(3);
        b.masses[1] = PI + 0.25;
        let d = a.difference(&b, 1e-12).unwrap();
        assert_eq!(d.tail_model, TailModel::Zero);
        assert!((d.masses[1] + 0.25).abs() < 1e-15); // atom at -λ_2
        assert!((d.masses[5] + 0.25).abs() < 1e-15); // atom at +λ_2
        assert!(d.masses[3].abs() < 1e-15); // atom at 0
    }

    #[test]
    fn union_difference_on_shared_support_matches_paired() {
        let a = SpectralMeasure::free(3);
        let mut b = SpectralMeasure::free(3);
        b.masses[1] = PI + 0.25;
        let paired = a.difference(&b, 1e-12).unwrap();
        let union = a.union_difference(&b, 1e-9).unwrap();
        assert_eq!(union.support.len(), paired.support.len());
        for i in 0..paired.support.len() {
            assert!((union.support[i] - paired.support[i]).abs() < 1e-12);
            assert!((union.masses[i] - paired.masses[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn union_difference_keeps_displaced_atoms_separate() {
        let a = SpectralMeasure::new(
            vec![1.0, 2.0],
            vec![0.5, 0.5],
            1.0,
            TailModel::Zero,
            Side::Left,
        )
        .unwrap();
        let b = SpectralMeasure::new(
            vec![1.1, 2.0],
            vec![0.5, 0.7],
            1.0,
            TailModel::Zero,
            Side::Left,
        )
        .unwrap();
        let d = a.union_difference(&b, 1e-9).unwrap();
        // ±1.0 and ±1.1 survive as four distinct signed atoms; ±2.0 and 0
        // merge into nets.
        assert_eq!(d.support.len(), 7);
        assert!((d.support[0] + 2.0).abs() < 1e-12);
        assert!((d.masses[0] + 0.2).abs() < 1e-14);
        assert!((d.support[1] + 1.1).abs() < 1e-12);
        assert!((d.masses[1] + 0.5).abs() < 1e-14);
        assert!((d.support[2] + 1.0).abs() < 1e-12);
        assert!((d.masses[2] - 0.5).abs() < 1e-14);
        assert!(d.masses[3].abs() < 1e-14); // net at 0
        let at2 = d.support.iter().position(|t| (t - 2.0).abs() < 1e-12).unwrap();
        assert!((d.masses[at2] + 0.2).abs() < 1e-14);
    }

    #[test]
    fn union_difference_refuses_mixed_sides() {
        let a = SpectralMeasure::new(vec![1.0], vec![0.5], 1.0, TailModel::Zero, Side::Left)
            .unwrap();
        let b = SpectralMeasure::new(vec![1.0], vec![0.5], 1.0, TailModel::Zero, Side::Right)
            .unwrap();
        assert!(a.union_difference(&b, 1e-9).is_err());
    }
}
