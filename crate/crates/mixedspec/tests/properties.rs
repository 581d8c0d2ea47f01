//! Randomized structural invariants: transfer-matrix determinant,
//! Herglotz positivity of the Weyl functions, the constant-shift law,
//! and ordering/complement identities of the completeness densities.

use mixedspec::{
    density_complement_check, dprime_interior_density, eigenvalues, exterior_density,
    interior_density, transfer_matrix, weyl_m, BoundaryPair, IndexSet, Potential, Side, StepRule,
};
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn fourier_q(a1: f64, a2: f64, b1: f64) -> Potential {
    Potential::from_fn(
        |x| {
            a1 * (2.0 * PI * x).cos() + a2 * (4.0 * PI * x).cos() + b1 * (2.0 * PI * x).sin()
        },
        2049,
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    /// The two solution columns started as (0,1) and (1,0) keep Wronskian
    /// −1 along the whole interval, for any potential, energy, and endpoint.
    #[test]
    fn transfer_determinant_is_minus_one(
        a1 in -2.0..2.0f64,
        a2 in -1.0..1.0f64,
        b1 in -1.0..1.0f64,
        z2 in -10.0..400.0f64,
        b in 0.05..1.0f64,
    ) {
        let q = fourier_q(a1, a2, b1);
        let t = transfer_matrix(&q, 0.0, b, z2, StepRule::default()).unwrap();
        let det = t.u * t.dv - t.v * t.du;
        prop_assert!((det + 1.0).abs() <= 1e-10, "det = {det}");
    }

    /// Both Weyl functions map the upper half-plane to itself.
    #[test]
    fn weyl_functions_are_herglotz(
        a1 in -2.0..2.0f64,
        a2 in -1.0..1.0f64,
        x in 0.3..25.0f64,
        y in 0.2..4.0f64,
        right in proptest::bool::ANY,
    ) {
        let q = fourier_q(a1, a2, 0.0);
        let side = if right { Side::Right } else { Side::Left };
        let m = weyl_m(&q, Complex64::new(x, y), side, StepRule::default()).unwrap();
        prop_assert!(m.im > 0.0, "Im m({x} + {y}i) = {} on {side:?}", m.im);
    }

    /// Adding a constant shifts every squared eigenvalue by exactly that
    /// constant (same eigenfunctions).
    #[test]
    fn constant_shift_law(c in 0.5..5.0f64, a1 in -1.5..1.5f64) {
        let q = fourier_q(a1, 0.0, 0.0);
        let qc = q.shift(c);
        let rule = StepRule { refine: 10 };
        let e = eigenvalues(&q, BoundaryPair::DD, 5, rule).unwrap();
        let ec = eigenvalues(&qc, BoundaryPair::DD, 5, rule).unwrap();
        for n in 0..5 {
            let diff = ec.lams[n] * ec.lams[n] - e.lams[n] * e.lams[n];
            prop_assert!((diff - c).abs() <= 1e-6, "shift law: {diff} vs {c} at n={n}");
        }
    }

    /// Densities of periodic index patterns: ordering
    /// 0 ≤ D′_* ≤ D_* ≤ D* ≤ 1, exact value |R|/p for the pattern, and
    /// the complement identity D*(Σ) + D_*(Z∖Σ) = 1.
    #[test]
    fn pattern_density_orderings(period in 2u32..6, mask in 1u32..31) {
        let residues: Vec<u32> = (0..period).filter(|r| mask & (1 << r) != 0).collect();
        prop_assume!(!residues.is_empty());
        let s = IndexSet::from_pattern(period, &residues, 4096).unwrap();
        let dint = interior_density(&s).value;
        let dext = exterior_density(&s).value;
        let dpr = dprime_interior_density(&s).value;
        let expected = residues.len() as f64 / period as f64;
        prop_assert!((dint - expected).abs() <= 1e-9, "D_* {dint} vs {expected}");
        prop_assert!((dext - expected).abs() <= 1e-9, "D* {dext} vs {expected}");
        prop_assert!(dpr >= -1e-12 && dpr <= dint + 1e-9, "D'_* {dpr} vs D_* {dint}");
        prop_assert!((0.0..=1.0 + 1e-12).contains(&dext));
        let comp = density_complement_check(&s);
        prop_assert!(comp.defect <= 1e-9, "complement defect {}", comp.defect);
    }
}
