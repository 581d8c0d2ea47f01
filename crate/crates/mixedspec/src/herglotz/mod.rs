//! Discrete measures, Herglotz-function evaluation, Krein shifts,
//! two-spectra mass recovery, Fourier transforms of measures, and gap
//! detection.

pub mod eval;
pub mod gap;
pub mod krein;
pub mod measure;

pub use eval::{herglotz_discrete, herglotz_eval, lemma_log_integral, neg_cot, LogIntegralReport};
pub use gap::{coalesce_clusters, fourier_transform, gap_from_decay, GapReport};
pub use krein::{
    herglotz_of_krein, krein_shift_from_spectra, krein_shift_of_measure, krein_shift_of_operator,
    masses_from_two_spectra, verify_exponential_identity, ExponentialIdentityReport, KreinShift,
};
pub use measure::{DiscreteMeasure, Side, SpectralMeasure, TailModel};
