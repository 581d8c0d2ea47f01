//! Transfer matrices of −y″ + q y = z² y over subintervals of [0, 1].
//!
//! The matrix over [a, b] collects the endpoint data of the two
//! canonical solutions anchored at a:
//!
//! ```text
//! M(a,b) = [ u(b)   v(b)  ]      u(a) = 0, u′(a) = 1,
//!          [ u′(b)  v′(b) ]      v(a) = 1, v′(a) = 0.
//! ```
//!
//! Constancy of the Wronskian gives `det M ≡ −1` for every potential,
//! interval, and (real) energy; for q = 0 the entries are
//! `[[sin(zL)/z, cos(zL)], [z·(−sin(zL))… ]` — see `free`.  A degenerate
//! interval (b = a) yields the antidiagonal swap [[0,1],[1,0]].

use crate::error::Result;
use crate::potential::Potential;
use crate::sturm::integrate::{integrate_columns_real, StepRule};
use serde::{Deserialize, Serialize};

/// Endpoint data of the canonical solution pair over one subinterval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub u: f64,
    pub v: f64,
    pub du: f64,
    pub dv: f64,
}

impl TransferMatrix {
    /// Determinant `u·v′ − v·u′` (≡ −1 in exact arithmetic).
    pub fn det(&self) -> f64 {
        self.u * self.dv - self.v * self.du
    }

    /// Closed form for q = 0 over an interval of length `len` at energy
    /// z² (valid for z² of either sign; z² = 0 gives [[len, 1], [1, 0]]).
    pub fn free(len: f64, z2: f64) -> Self {
        if z2 > 0.0 {
            let z = z2.sqrt();
            TransferMatrix {
                u: (z * len).sin() / z,
                v: (z * len).cos(),
                du: (z * len).cos(),
                dv: -z * (z * len).sin(),
            }
        } else if z2 < 0.0 {
            let k = (-z2).sqrt();
            TransferMatrix {
                u: (k * len).sinh() / k,
                v: (k * len).cosh(),
                du: (k * len).cosh(),
                dv: k * (k * len).sinh(),
            }
        } else {
            TransferMatrix {
                u: len,
                v: 1.0,
                du: 1.0,
                dv: 0.0,
            }
        }
    }

    /// Propagate initial data (y(a), y′(a)) to (y(b), y′(b)).
    pub fn propagate(&self, y: f64, dy: f64) -> (f64, f64) {
        // The propagator is M with its columns swapped: the first column
        // must be the image of (1, 0), which is v.
        (self.v * y + self.u * dy, self.dv * y + self.du * dy)
    }

    /// Matrix over [a, c] from matrices over [a, b] (self) and [b, c]
    /// (`next`).
    pub fn then(&self, next: &TransferMatrix) -> TransferMatrix {
        let (u, du) = next.propagate(self.u, self.du);
        let (v, dv) = next.propagate(self.v, self.dv);
        TransferMatrix { u, v, du, dv }
    }
}

/// Integrate the canonical solution pair of q over [a, b] at energy z².
pub fn transfer_matrix(
    q: &Potential,
    a: f64,
    b: f64,
    z2: f64,
    rule: StepRule,
) -> Result<TransferMatrix> {
    let cols = integrate_columns_real(q, a, b, z2, rule)?;
    Ok(TransferMatrix {
        u: cols.u,
        v: cols.v,
        du: cols.du,
        dv: cols.dv,
    })
}
