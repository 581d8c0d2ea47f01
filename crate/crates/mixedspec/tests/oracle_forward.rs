//! Independent oracles for the forward solver.
//!
//! Eigenvalues are cross-checked against a finite-difference
//! discretization whose spectrum is located by Sturm-sequence bisection
//! and sharpened by double Richardson extrapolation (h² → h⁶); norming
//! masses are cross-checked against the quadrature identity
//! α_n = π·u′(1)²/(2λ_n²·‖u‖²) evaluated on finite-difference
//! eigenvectors; constant potentials are checked against closed forms.
//! None of these paths share code with the shooting solver.

use mixedspec::{eigenvalues, norming_masses, BoundaryPair, Potential, Side, StepRule};
use std::f64::consts::PI;

/// Number of eigenvalues of the Dirichlet FD matrix strictly below
/// `sigma`, by the classic LDLᵀ inertia count for a symmetric
/// tridiagonal matrix with constant off-diagonal `off`.
fn count_below(diag: &[f64], off: f64, sigma: f64) -> usize {
    let b2 = off * off;
    let mut count = 0usize;
    let mut d = f64::INFINITY;
    for &a in diag {
        d = (a - sigma) - b2 / d;
        if d == 0.0 {
            d = -1e-300;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// k-th (1-based) eigenvalue of −u″ + qu with Dirichlet ends,
/// discretized on `n_sub` subintervals; returns the approximation of
/// λ_k² with O(h²) error.
fn fd_theta(qf: &dyn Fn(f64) -> f64, n_sub: usize, k: usize) -> f64 {
    let h = 1.0 / n_sub as f64;
    let diag: Vec<f64> = (1..n_sub)
        .map(|i| 2.0 / (h * h) + qf(i as f64 * h))
        .collect();
    let off = -1.0 / (h * h);
    let mut lo = diag.iter().cloned().fold(f64::INFINITY, f64::min) + 2.0 * off;
    let mut hi = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - 2.0 * off;
    for _ in 0..90 {
        let mid = 0.5 * (lo + hi);
        if count_below(&diag, off, mid) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Double Richardson extrapolation of the FD eigenvalue over grids
/// h, h/2, h/4 (errors expand in h² for smooth q), then √ to return λ_k.
fn fd_lambda(qf: &dyn Fn(f64) -> f64, k: usize) -> f64 {
    let t1 = fd_theta(qf, 1020, k);
    let t2 = fd_theta(qf, 2040, k);
    let t4 = fd_theta(qf, 4080, k);
    let r1 = (4.0 * t2 - t1) / 3.0;
    let r2 = (4.0 * t4 - t2) / 3.0;
    ((16.0 * r2 - r1) / 15.0).sqrt()
}

/// Solve (T − θ)v = rhs for the Dirichlet FD tridiagonal by the Thomas
/// algorithm, with a pivot guard for the nearly singular shift.
fn thomas(diag: &[f64], off: f64, theta: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let guard = 1e-10 * diag[0].abs().max(1.0);
    let mut m = diag[0] - theta;
    if m.abs() < guard {
        m = guard;
    }
    c[0] = off / m;
    d[0] = rhs[0] / m;
    for i in 1..n {
        let mut piv = (diag[i] - theta) - off * c[i - 1];
        if piv.abs() < guard {
            piv = guard;
        }
        c[i] = off / piv;
        d[i] = (rhs[i] - off * d[i - 1]) / piv;
    }
    let mut v = vec![0.0; n];
    v[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        v[i] = d[i] - c[i] * v[i + 1];
    }
    v
}

/// FD eigenvector for the eigenvalue near θ by inverse iteration
/// (deterministic start, two solves are ample for an isolated simple
/// eigenvalue).
fn fd_eigenvector(diag: &[f64], off: f64, theta: f64) -> Vec<f64> {
    let n = diag.len();
    let mut v: Vec<f64> = (0..n)
        .map(|i| ((i.wrapping_mul(2654435761)) % 1000) as f64 / 1000.0 - 0.5)
        .collect();
    for _ in 0..3 {
        v = thomas(diag, off, theta, &v);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
    }
    v
}

/// Quadrature mass oracle: α_k = π·u′(1)²/(2λ_k²·∫u²) with the
/// eigenvector from the FD matrix on `n_sub` subintervals.  The ratio is
/// normalization-invariant; u′(1) uses the one-sided O(h²) difference
/// (u(1) = 0 and u″(1) = (q(1) − λ²)·u(1) = 0 kill the h¹ and h² Taylor
/// terms).
fn fd_mass(qf: &dyn Fn(f64) -> f64, n_sub: usize, k: usize, lam: f64) -> f64 {
    let h = 1.0 / n_sub as f64;
    let diag: Vec<f64> = (1..n_sub)
        .map(|i| 2.0 / (h * h) + qf(i as f64 * h))
        .collect();
    let off = -1.0 / (h * h);
    let theta = fd_theta(qf, n_sub, k);
    let v = fd_eigenvector(&diag, off, theta);
    let norm2: f64 = v.iter().map(|x| x * x).sum::<f64>() * h;
    let du1 = -v[v.len() - 1] / h;
    PI * du1 * du1 / (2.0 * lam * lam * norm2)
}

fn oracle_cases() -> Vec<(&'static str, Box<dyn Fn(f64) -> f64>, Potential)> {
    vec![
        (
            "cos(2πx)",
            Box::new(|x: f64| (2.0 * PI * x).cos()),
            Potential::from_fn(|x| (2.0 * PI * x).cos(), 16385).unwrap(),
        ),
        (
            "x(1−x)",
            Box::new(|x: f64| x * (1.0 - x)),
            Potential::from_fn(|x| x * (1.0 - x), 16385).unwrap(),
        ),
        (
            "1+2x",
            Box::new(|x: f64| 1.0 + 2.0 * x),
            Potential::from_fn(|x| 1.0 + 2.0 * x, 16385).unwrap(),
        ),
    ]
}

#[test]
fn fd_oracle_reproduces_free_spectrum() {
    for k in 1..=8usize {
        let lam = fd_lambda(&|_| 0.0, k);
        assert!(
            (lam - PI * k as f64).abs() <= 1e-8,
            "free oracle λ_{k} = {lam} vs {}",
            PI * k as f64
        );
    }
}

#[test]
fn shooting_eigenvalues_match_fd_oracle() {
    for (name, qf, q) in oracle_cases() {
        let lams = eigenvalues(&q, BoundaryPair::DD, 8, StepRule { refine: 12 }).unwrap();
        for k in 1..=8usize {
            let oracle = fd_lambda(qf.as_ref(), k);
            let lib = lams.lams[k - 1];
            assert!(
                (lib - oracle).abs() <= 1e-7 * (1.0 + oracle),
                "{name}: λ_{k} shooting {lib} vs FD oracle {oracle}"
            );
        }
    }
}

#[test]
fn norming_masses_match_quadrature_oracle() {
    for (name, qf, q) in oracle_cases() {
        let lams = eigenvalues(&q, BoundaryPair::DD, 8, StepRule { refine: 12 }).unwrap();
        let mu = norming_masses(&q, &lams, Side::Right, StepRule { refine: 12 }).unwrap();
        for k in 1..=8usize {
            let lam = fd_lambda(qf.as_ref(), k);
            let oracle = fd_mass(qf.as_ref(), 4080, k, lam);
            let lib = mu.masses[k - 1];
            let rel = (lib - oracle).abs() / oracle;
            assert!(
                rel <= 1e-3,
                "{name}: α_{k} library {lib} vs quadrature oracle {oracle} (rel {rel:.2e})"
            );
        }
    }
}

#[test]
fn constant_potential_closed_forms() {
    for &c in &[1.0, 5.0] {
        let q = Potential::from_fn(|_| c, 65).unwrap();
        let rule = StepRule { refine: 12 };
        let dd = eigenvalues(&q, BoundaryPair::DD, 10, rule).unwrap();
        let dn = eigenvalues(&q, BoundaryPair::DN, 10, rule).unwrap();
        for n in 1..=10usize {
            let exact = ((PI * n as f64).powi(2) + c).sqrt();
            assert!(
                (dd.lams[n - 1] - exact).abs() <= 1e-8,
                "c={c}: DD λ_{n} {} vs {exact}",
                dd.lams[n - 1]
            );
            let exact_dn = ((PI * (n as f64 - 0.5)).powi(2) + c).sqrt();
            assert!(
                (dn.lams[n - 1] - exact_dn).abs() <= 1e-8,
                "c={c}: DN η_{n} {} vs {exact_dn}",
                dn.lams[n - 1]
            );
        }
        // Masses: α_n = π·(πn)²/((πn)² + c), atom α_0 = π·√c·coth(√c).
        let mu = norming_masses(&q, &dd, Side::Right, rule).unwrap();
        for n in 1..=10usize {
            let pn2 = (PI * n as f64).powi(2);
            let exact = PI * pn2 / (pn2 + c);
            assert!(
                (mu.masses[n - 1] - exact).abs() <= 1e-8,
                "c={c}: α_{n} {} vs {exact}",
                mu.masses[n - 1]
            );
        }
        let sc = c.sqrt();
        let exact0 = PI * sc * (sc.cosh() / sc.sinh());
        assert!(
            (mu.mass0 - exact0).abs() <= 1e-8,
            "c={c}: α_0 {} vs {exact0}",
            mu.mass0
        );
    }
}
