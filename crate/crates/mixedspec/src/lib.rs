//! Numerical laboratory for direct and inverse spectral problems of
//! one-dimensional Schrödinger operators −u″ + q·u = z²·u on the unit
//! interval.
//!
//! The crate covers the forward problem (eigenvalues, norming masses,
//! Weyl functions, transfer matrices, structure functions), spectral
//! measures and their Herglotz transforms, Krein shifts and two-spectra
//! mass recovery, kernel-equation reconstruction of the potential,
//! spectral-gap detection, completeness densities of exponential
//! systems, an uncertainty functional over admissible subsequences, and
//! construction/verification of indeterminate measure pairs.

pub mod bmdensity;
pub mod error;
pub mod evenchar;
pub mod glinverse;
pub mod herglotz;
pub mod pairs;
pub mod potential;
pub mod sturm;

pub use bmdensity::{
    admissible_subsequence_search, borg_uncertainty_verdict, completeness_radius,
    density_complement_check, dprime_interior_density, exterior_density, interior_density,
    shortness, uncertainty_size, DensityEstimate, EpsRule, IndexSet, IntervalSystem,
    IntervalTailModel, UncertaintyModel,
};
pub use error::{Error, Result};
pub use evenchar::{
    balance_check, canonical_product, characteristic_sequence, even_masses, leven_verify,
    polynomial_density_criterion, CharacteristicData, LevenReport, PolyDensityReport,
    PolyDensityVerdict,
};
pub use glinverse::{
    gl_kernel, gl_solve, reconstruct_from_measure, reconstruct_from_two_spectra, GlKernelField,
    KernelRow, ReconstructionReport,
};
pub use herglotz::{DiscreteMeasure, Side, SpectralMeasure, TailModel};
pub use pairs::{
    condition_free_demo, indeterminate_pair, pw_complement_function, symmetric_pair,
    uniqueness_probe, verify_pair, ConditionFreeDemo, IndeterminatePair, PWComplementFunction,
    PairVerification, PwConstraints, ReconCheck, SymmetricPairReport, UniquenessProbe,
};
pub use potential::{Potential, PotentialForm};
pub use sturm::{
    eigenvalues, norming_masses, transfer_matrix, weyl_m, BoundaryPair, SpectralSequence,
    StepRule, TransferMatrix,
};
