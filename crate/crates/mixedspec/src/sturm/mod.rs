//! Forward spectral machinery: ODE integration, Prüfer phase,
//! eigenvalue solving, norming masses, Weyl functions, transfer
//! matrices, and the Hermite–Biehler structure function.

pub mod eigen;
pub mod hb;
pub mod integrate;
pub mod masses;
pub mod prufer;
pub mod transfer;
pub mod weyl;

pub use eigen::{eigenvalues, AsymptoticReport, BoundaryPair, SpectralSequence};
pub use hb::{eval_a, eval_b, eval_e, hermite_biehler_report, HbReport};
pub use integrate::StepRule;
pub use masses::norming_masses;
pub use transfer::{transfer_matrix, TransferMatrix};
pub use weyl::weyl_m;
