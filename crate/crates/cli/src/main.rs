//! Batch driver for the spectral laboratory.
//!
//! One job = one subcommand + one JSON spec file.  Every run writes a
//! `result.json` (schema-versioned, stamped with the SHA-256 of the
//! spec bytes and the seed) plus headered CSV plot data into the output
//! directory.  Runs are deterministic: identical spec + seed produce
//! byte-identical JSON.
//!
//! Exit codes: 0 success, 2 spec/schema violation, 3 numeric failure
//! (diagnostic JSON on stderr and in `error.json`).

mod jobs;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mixedspec",
    version,
    about = "Spectral laboratory batch driver: forward solves, inverse reconstructions, gap/density analysis, indeterminate pairs"
)]
struct Cli {
    #[command(subcommand)]
    job: Job,
}

/// Common arguments shared by every subcommand.
#[derive(Args, Clone)]
pub struct CommonArgs {
    /// Job spec JSON file.
    #[arg(long)]
    pub spec: PathBuf,
    /// Output directory for artifacts (created if missing).
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Seed for any randomized construction in the job.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for parallel sweeps (0 = library default).
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Subcommand)]
enum Job {
    /// Eigenvalues for one boundary pair.
    Solve(CommonArgs),
    /// Dirichlet–Dirichlet and Dirichlet–Neumann spectra together.
    Spectra(CommonArgs),
    /// Spectral measure (eigenvalues + norming masses) of a potential.
    Measure(CommonArgs),
    /// Krein shift of a measure and the exponential-identity check.
    Krein(CommonArgs),
    /// Masses recovered from two spectra, compared with direct masses.
    TwoSpectra(CommonArgs),
    /// Potential reconstruction from a spectral measure.
    Reconstruct(CommonArgs),
    /// Spectral-gap detection for the difference of two left measures.
    Gap(CommonArgs),
    /// Completeness densities of an integer index set.
    Density(CommonArgs),
    /// Uncertainty size of an ε-tube model by admissible-subsequence search.
    Uncertainty(CommonArgs),
    /// Construct an indeterminate measure pair from splitting functions.
    PairMake(CommonArgs),
    /// Verify a constructed pair bundle.
    PairVerify(CommonArgs),
    /// Uniqueness probe: infeasibility margin of an ε-tube around a measure.
    ProbeUnique(CommonArgs),
    /// Demo: two-spectra roundtrip reconstruction with uncertainty verdict.
    DemoBorg(CommonArgs),
    /// Demo: isospectral symmetric pair with different potentials.
    DemoSymmetric(CommonArgs),
    /// Demo: Weyl coincidence on a density-(2−eps) set with a free endpoint window.
    DemoConditionFree(CommonArgs),
}

impl Job {
    fn split(&self) -> (&'static str, &CommonArgs) {
        match self {
            Job::Solve(a) => ("solve", a),
            Job::Spectra(a) => ("spectra", a),
            Job::Measure(a) => ("measure", a),
            Job::Krein(a) => ("krein", a),
            Job::TwoSpectra(a) => ("two-spectra", a),
            Job::Reconstruct(a) => ("reconstruct", a),
            Job::Gap(a) => ("gap", a),
            Job::Density(a) => ("density", a),
            Job::Uncertainty(a) => ("uncertainty", a),
            Job::PairMake(a) => ("pair-make", a),
            Job::PairVerify(a) => ("pair-verify", a),
            Job::ProbeUnique(a) => ("probe-unique", a),
            Job::DemoBorg(a) => ("demo-borg", a),
            Job::DemoSymmetric(a) => ("demo-symmetric", a),
            Job::DemoConditionFree(a) => ("demo-condition-free", a),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (name, args) = cli.job.split();
    if args.threads > 0 {
        // A second global-pool initialization in the same process is
        // harmless; the pool keeps its first configuration.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(args.threads)
            .build_global();
    }
    match jobs::run(name, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(jobs::JobError::Schema(msg)) => {
            eprintln!(
                "{}",
                serde_json::json!({ "error": "schema", "detail": msg })
            );
            ExitCode::from(2)
        }
        Err(jobs::JobError::Numeric(msg)) => {
            let diag = serde_json::json!({ "error": "numeric", "detail": msg });
            eprintln!("{diag}");
            let _ = std::fs::create_dir_all(&args.out);
            let _ = std::fs::write(
                args.out.join("error.json"),
                format!("{diag:#}\n"),
            );
            ExitCode::from(3)
        }
    }
}
