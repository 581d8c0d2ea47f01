//! Norming masses of the symmetric spectral measures μ₊ (right) and μ₋
//! (left).
//!
//! For the right measure the mass at ±λ_n is the residue of the Weyl
//! function at the pole λ_n in π-normalized form:
//! `α_n = π u′_{λ_n}(1) / Ḟ(λ_n)` where `F(z) = z u_z(1)` is the
//! Dirichlet characteristic function and
//! `Ḟ(λ) = u_λ(1) + λ ∂_z u_z(1)|_λ`.  The z-derivative `p = ∂u/∂z`
//! solves the same equation with forcing `2z u` and zero initial data,
//! so one augmented pass per eigenvalue suffices.  The atom at zero has
//! `α₀ = π u′_0(1) / u_0(1)`.  For q = 0 every mass equals π.

use crate::error::{Error, Result};
use crate::herglotz::measure::{Side, SpectralMeasure, TailModel};
use crate::potential::Potential;
use crate::sturm::eigen::SpectralSequence;
use crate::sturm::integrate::{integrate_augmented, integrate_columns_real, StepRule};
use rayon::prelude::*;

/// Mass at ±λ for a single positive Dirichlet eigenvalue.
fn mass_at(q: &Potential, lam: f64, rule: StepRule) -> Result<f64> {
    let end = integrate_augmented(q, lam, rule)?;
    let fdot = end.u + lam * end.p;
    if fdot.abs() < 1e-12 * (1.0 + end.du.abs()) {
        return Err(Error::NearSingular(format!(
            "characteristic derivative vanishes at λ = {lam}"
        )));
    }
    Ok(std::f64::consts::PI * end.du / fdot)
}

/// Mass of the atom at zero: `α₀ = π u′_0(1)/u_0(1)` (u solves the z = 0
/// equation with Dirichlet start).
pub(crate) fn mass_zero(q: &Potential, rule: StepRule) -> Result<f64> {
    let cols = integrate_columns_real(q, 0.0, 1.0, 0.0, rule)?;
    if cols.u.abs() < 1e-12 * (1.0 + cols.du.abs()) {
        return Err(Error::NearSingular(
            "zero is a Dirichlet eigenvalue; atom at 0 undefined".into(),
        ));
    }
    let a0 = std::f64::consts::PI * cols.du / cols.u;
    if a0 <= 0.0 {
        return Err(Error::Positivity(format!(
            "nonpositive mass {a0} at 0 (operator not nonnegative?)"
        )));
    }
    Ok(a0)
}

/// Norming masses of μ₊ (side `Right`) over the given positive Dirichlet
/// eigenvalues, plus the atom at 0.  For μ₋ (side `Left`) pass the
/// reflected potential's data or use [`norming_masses`] with
/// `Side::Left`, which reflects internally.
pub fn norming_masses(
    q: &Potential,
    lams: &SpectralSequence,
    side: Side,
    rule: StepRule,
) -> Result<SpectralMeasure> {
    let qq = match side {
        Side::Right => q.clone(),
        Side::Left => q.reflect(),
    };
    let mass0 = mass_zero(&qq, rule)?;
    let masses: Result<Vec<f64>> = lams
        .lams
        .par_iter()
        .map(|&lam| {
            let a = mass_at(&qq, lam, rule)?;
            if a <= 0.0 {
                return Err(Error::Positivity(format!(
                    "nonpositive mass {a} at λ = {lam}"
                )));
            }
            Ok(a)
        })
        .collect();
    SpectralMeasure::new(lams.lams.clone(), masses?, mass0, TailModel::FreePi, side)
}
