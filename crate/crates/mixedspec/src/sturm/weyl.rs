//! Weyl functions of the operator on the unit interval in the spectral
//! variable z (eigenvalues at z² = λ²).
//!
//! `m₊(z) = −u′_z(1)/(z u_z(1))` with u the 0-anchored solution
//! (u(0) = 0, u′(0) = 1); `m₋` is the same functional of the reflected
//! potential.  For q = 0 both equal `−cot z / 1 = −cos z/(z·sin z/z)
//! = −cot z`.  Both map the upper half-plane to itself.

use crate::error::{Error, Result};
use crate::herglotz::measure::Side;
use crate::potential::Potential;
use crate::sturm::integrate::{integrate_columns_complex, StepRule};
use num_complex::Complex64;

/// Weyl function for the requested endpoint at spectral parameter z.
///
/// Returns `NearSingular` when z is too close to a real pole (a Dirichlet
/// eigenvalue) for the quotient to carry significant digits.
pub fn weyl_m(q: &Potential, z: Complex64, side: Side, rule: StepRule) -> Result<Complex64> {
    let qq = match side {
        Side::Right => q.clone(),
        Side::Left => q.reflect(),
    };
    if z.norm() == 0.0 {
        return Err(Error::Precondition("weyl_m undefined at z = 0".into()));
    }
    let cols = integrate_columns_complex(&qq, 0.0, 1.0, z, rule)?;
    let denom = z * cols.u;
    // u and u′ have comparable scale exp(|Im z|); flag when the
    // denominator loses more than ~9 digits against it.
    if denom.norm() < 1e-9 * (cols.du.norm() + z.norm() * cols.u.norm()) {
        return Err(Error::NearSingular(format!(
            "z = {z} is within roundoff of a Dirichlet eigenvalue"
        )));
    }
    Ok(-cols.du / denom)
}
