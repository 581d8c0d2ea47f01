//! Fixed-step 4th-order integration of the Schrödinger equation
//! `−u″ + q u = z² u` with grid-cell-aligned steps.
//!
//! Steps always subdivide potential-grid cells exactly, so the integrator
//! sees a smooth (linear) `q` inside every step and retains its full order.
//! The step target is `min(grid spacing, 1/(8(1+|z|)))/refine`, which keeps
//! a fixed number of steps per oscillation in the high-energy regime.

use crate::error::{Error, Result};
use crate::potential::Potential;
use num_complex::Complex64;

/// Integration accuracy knob: the base step target is divided by `refine`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRule {
    pub refine: u32,
}

impl Default for StepRule {
    fn default() -> Self {
        StepRule { refine: 8 }
    }
}

impl StepRule {
    pub fn new(refine: u32) -> Self {
        StepRule {
            refine: refine.max(1),
        }
    }

    /// Number of sub-steps for one grid cell of width `cell`, given |z|.
    #[inline]
    pub fn substeps(&self, cell: f64, zabs: f64) -> usize {
        let target = (1.0 / (8.0 * (1.0 + zabs))).min(cell) / self.refine as f64;
        (cell / target).ceil() as usize
    }
}

#[inline]
fn rk4_step_real<const N: usize>(
    f: &impl Fn(f64, &[f64; N]) -> [f64; N],
    x: f64,
    y: &mut [f64; N],
    h: f64,
) {
    let k1 = f(x, y);
    let mut t = *y;
    for i in 0..N {
        t[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = f(x + 0.5 * h, &t);
    for i in 0..N {
        t[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = f(x + 0.5 * h, &t);
    for i in 0..N {
        t[i] = y[i] + h * k3[i];
    }
    let k4 = f(x + h, &t);
    for i in 0..N {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

#[inline]
fn rk4_step_cplx<const N: usize>(
    f: &impl Fn(f64, &[Complex64; N]) -> [Complex64; N],
    x: f64,
    y: &mut [Complex64; N],
    h: f64,
) {
    let k1 = f(x, y);
    let mut t = *y;
    for i in 0..N {
        t[i] = y[i] + 0.5 * h * k1[i];
    }
    let k2 = f(x + 0.5 * h, &t);
    for i in 0..N {
        t[i] = y[i] + 0.5 * h * k2[i];
    }
    let k3 = f(x + 0.5 * h, &t);
    for i in 0..N {
        t[i] = y[i] + h * k3[i];
    }
    let k4 = f(x + h, &t);
    for i in 0..N {
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

/// Walk the sub-interval `[a, b]` of `[0, 1]` in grid-cell-aligned steps,
/// calling `advance(x, h)` for each step of width `h` starting at `x`.
fn walk_cells(
    q: &Potential,
    a: f64,
    b: f64,
    zabs: f64,
    rule: StepRule,
    mut advance: impl FnMut(f64, f64),
) {
    debug_assert!(a <= b);
    if b - a <= 0.0 {
        return;
    }
    let gh = q.spacing();
    let n_cells = q.grid_n - 1;
    // First and last (possibly partial) cells are handled with the same
    // sub-step budget as a full cell.
    let first_cell = ((a / gh).floor() as usize).min(n_cells - 1);
    let last_cell = (((b / gh).ceil() as usize).max(first_cell + 1)).min(n_cells);
    for cell in first_cell..last_cell {
        let x0 = (cell as f64 * gh).max(a);
        let x1 = ((cell + 1) as f64 * gh).min(b);
        if x1 <= x0 {
            continue;
        }
        let m = rule.substeps(gh, zabs).max(1);
        let h = (x1 - x0) / m as f64;
        for k in 0..m {
            advance(x0 + k as f64 * h, h);
        }
    }
}

/// State of both transfer-matrix columns at the right end of integration:
/// `u` with `u(a)=0, u′(a)=1` and `v` with `v(a)=1, v′(a)=0`.
#[derive(Debug, Clone, Copy)]
pub struct RealColumns {
    pub u: f64,
    pub du: f64,
    pub v: f64,
    pub dv: f64,
}

/// Integrate both real columns over `[a, b]` for real spectral parameter
/// `z` (uses `z²` internally; negative `z2` is allowed).
pub fn integrate_columns_real(
    q: &Potential,
    a: f64,
    b: f64,
    z2: f64,
    rule: StepRule,
) -> Result<RealColumns> {
    let zabs = z2.abs().sqrt();
    let mut y = [0.0f64, 1.0, 1.0, 0.0]; // u, u', v, v'
    let f = |x: f64, s: &[f64; 4]| -> [f64; 4] {
        let qq = q.eval(x) - z2;
        [s[1], qq * s[0], s[3], qq * s[2]]
    };
    walk_cells(q, a, b, zabs, rule, |x, h| rk4_step_real(&f, x, &mut y, h));
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration(format!(
            "non-finite value integrating columns at z²={z2}"
        )));
    }
    Ok(RealColumns {
        u: y[0],
        du: y[1],
        v: y[2],
        dv: y[3],
    })
}

/// Endpoint values of the Dirichlet solution `u` (with `u(0)=0, u′(0)=1`)
/// and of its derivative in the spectral parameter, `p = ∂u/∂z`, at real
/// `z = lam`. `p` solves `−p″ + q p = z² p + 2 z u`, `p(0)=p′(0)=0`.
#[derive(Debug, Clone, Copy)]
pub struct AugmentedEnd {
    pub u: f64,
    pub du: f64,
    pub p: f64,
    pub dp: f64,
}

/// Integrate the Dirichlet solution together with its z-derivative over
/// `[0, 1]`.
pub fn integrate_augmented(q: &Potential, lam: f64, rule: StepRule) -> Result<AugmentedEnd> {
    let z2 = lam * lam;
    let mut y = [0.0f64, 1.0, 0.0, 0.0]; // u, u', p, p'
    let f = |x: f64, s: &[f64; 4]| -> [f64; 4] {
        let qq = q.eval(x) - z2;
        [s[1], qq * s[0], s[3], qq * s[2] - 2.0 * lam * s[0]]
    };
    walk_cells(q, 0.0, 1.0, lam.abs(), rule, |x, h| {
        rk4_step_real(&f, x, &mut y, h)
    });
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration(format!(
            "non-finite value in variational integration at z={lam}"
        )));
    }
    Ok(AugmentedEnd {
        u: y[0],
        du: y[1],
        p: y[2],
        dp: y[3],
    })
}

/// Both transfer-matrix columns for complex spectral parameter `z`.
#[derive(Debug, Clone, Copy)]
pub struct ComplexColumns {
    pub u: Complex64,
    pub du: Complex64,
    pub v: Complex64,
    pub dv: Complex64,
}

/// Integrate both columns over `[a, b]` at complex `z`.
///
/// Plain fixed-step integration; solutions grow like `e^{|Im z|·(b−a)}`, so
/// very large imaginary parts overflow and are reported as integration
/// failures.
pub fn integrate_columns_complex(
    q: &Potential,
    a: f64,
    b: f64,
    z: Complex64,
    rule: StepRule,
) -> Result<ComplexColumns> {
    let z2 = z * z;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut y = [zero, one, one, zero];
    let f = |x: f64, s: &[Complex64; 4]| -> [Complex64; 4] {
        let qq = Complex64::new(q.eval(x), 0.0) - z2;
        [s[1], qq * s[0], s[3], qq * s[2]]
    };
    walk_cells(q, a, b, z.norm(), rule, |x, h| {
        rk4_step_cplx(&f, x, &mut y, h)
    });
    if y.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::Integration(format!(
            "non-finite value integrating columns at z={z} (growth e^{{|Im z|}} overflows)"
        )));
    }
    Ok(ComplexColumns {
        u: y[0],
        du: y[1],
        v: y[2],
        dv: y[3],
    })
}
