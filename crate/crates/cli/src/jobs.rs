//! Job spec schemas (strict: unknown fields are schema violations) and
//! the pipeline behind each subcommand.  Every job writes `result.json`
//! plus at least one headered CSV into the output directory.

use mixedspec::herglotz::{
    fourier_transform, gap_from_decay, krein_shift_of_measure, masses_from_two_spectra,
    verify_exponential_identity,
};
use mixedspec::{
    admissible_subsequence_search, borg_uncertainty_verdict, completeness_radius,
    condition_free_demo, density_complement_check, dprime_interior_density, eigenvalues,
    even_masses, exterior_density, indeterminate_pair, interior_density, norming_masses,
    pw_complement_function, reconstruct_from_measure, reconstruct_from_two_spectra,
    symmetric_pair, uncertainty_size, uniqueness_probe, verify_pair, BoundaryPair, EpsRule,
    IndeterminatePair, IndexSet, IntervalSystem, IntervalTailModel, Potential, PotentialForm,
    PwConstraints, ReconCheck, Side, SpectralMeasure, SpectralSequence, StepRule,
    UncertaintyModel,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::path::PathBuf;

use crate::CommonArgs;

pub enum JobError {
    /// Malformed or inconsistent job spec (exit 2).
    Schema(String),
    /// The pipeline itself failed (exit 3).
    Numeric(String),
}

impl From<mixedspec::Error> for JobError {
    fn from(e: mixedspec::Error) -> Self {
        JobError::Numeric(e.to_string())
    }
}

type JResult<T> = Result<T, JobError>;

fn schema(msg: impl Into<String>) -> JobError {
    JobError::Schema(msg.into())
}

// ---------------------------------------------------------------------
// Spec plumbing and artifact sink
// ---------------------------------------------------------------------

fn load_spec<T: DeserializeOwned>(args: &CommonArgs) -> JResult<(T, String)> {
    let bytes = fs::read(&args.spec)
        .map_err(|e| schema(format!("cannot read spec {}: {e}", args.spec.display())))?;
    let sha = hex::encode_sha(&bytes);
    let spec: T = serde_json::from_slice(&bytes).map_err(|e| schema(format!("spec: {e}")))?;
    Ok((spec, sha))
}

mod hex {
    use super::{Digest, Sha256};
    pub fn encode_sha(bytes: &[u8]) -> String {
        let digest = Sha256::digest(bytes);
        let mut s = String::with_capacity(64);
        for b in digest {
            s.push_str(&format!("{b:02x}"));
        }
        s
    }
}

struct Sink {
    out: PathBuf,
    job: &'static str,
    sha: String,
    seed: u64,
}

impl Sink {
    fn new(job: &'static str, args: &CommonArgs, sha: String) -> JResult<Self> {
        fs::create_dir_all(&args.out)
            .map_err(|e| JobError::Numeric(format!("cannot create output dir: {e}")))?;
        Ok(Sink {
            out: args.out.clone(),
            job,
            sha,
            seed: args.seed,
        })
    }

    /// Write `result.json`: schema-versioned, stamped, deterministic
    /// (serde_json orders object keys; floats print shortest-roundtrip).
    fn result<T: Serialize>(&self, payload: &T) -> JResult<()> {
        let doc = serde_json::json!({
            "schema_version": 1,
            "job": self.job,
            "spec_sha256": self.sha,
            "seed": self.seed,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "result": payload,
        });
        let text = serde_json::to_string_pretty(&doc)
            .map_err(|e| JobError::Numeric(format!("serialize: {e}")))?;
        fs::write(self.out.join("result.json"), text + "\n")
            .map_err(|e| JobError::Numeric(format!("write result.json: {e}")))
    }

    fn csv(&self, name: &str, header: &str, rows: impl IntoIterator<Item = String>) -> JResult<()> {
        let mut text = String::from(header);
        text.push('\n');
        for r in rows {
            text.push_str(&r);
            text.push('\n');
        }
        fs::write(self.out.join(name), text)
            .map_err(|e| JobError::Numeric(format!("write {name}: {e}")))
    }
}

fn rule_of(refine: Option<u32>) -> StepRule {
    refine.map(|r| StepRule { refine: r }).unwrap_or_default()
}

// ---------------------------------------------------------------------
// Shared input descriptors
// ---------------------------------------------------------------------

/// A potential: an inline analytic form sampled on `grid_n` points, or a
/// JSON file produced by this tool / the library.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PotentialInput {
    #[serde(default)]
    form: Option<PotentialForm>,
    #[serde(default)]
    file: Option<PathBuf>,
    #[serde(default)]
    grid_n: Option<usize>,
}

impl PotentialInput {
    fn resolve(&self) -> JResult<Potential> {
        match (&self.form, &self.file) {
            (Some(f), None) => Ok(Potential::from_form(f, self.grid_n.unwrap_or(2049))?),
            (None, Some(p)) => {
                let s = fs::read_to_string(p)
                    .map_err(|e| schema(format!("cannot read potential {}: {e}", p.display())))?;
                Potential::from_json(&s).map_err(|e| schema(format!("potential file: {e}")))
            }
            _ => Err(schema("potential needs exactly one of `form` or `file`")),
        }
    }
}

/// A spectral measure: a JSON file, or computed from a potential.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureInput {
    #[serde(default)]
    file: Option<PathBuf>,
    #[serde(default)]
    potential: Option<PotentialInput>,
    #[serde(default)]
    side: Option<Side>,
    #[serde(default)]
    count: Option<usize>,
    #[serde(default)]
    refine: Option<u32>,
}

impl MeasureInput {
    fn resolve(&self) -> JResult<SpectralMeasure> {
        match (&self.file, &self.potential) {
            (Some(p), None) => {
                let s = fs::read_to_string(p)
                    .map_err(|e| schema(format!("cannot read measure {}: {e}", p.display())))?;
                serde_json::from_str(&s).map_err(|e| schema(format!("measure file: {e}")))
            }
            (None, Some(pi)) => {
                let q = pi.resolve()?;
                let rule = rule_of(self.refine);
                let lams = eigenvalues(&q, BoundaryPair::DD, self.count.unwrap_or(30), rule)?;
                Ok(norming_masses(
                    &q,
                    &lams,
                    self.side.unwrap_or(Side::Right),
                    rule,
                )?)
            }
            _ => Err(schema("measure needs exactly one of `file` or `potential`")),
        }
    }
}

// ---------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------

pub fn run(name: &'static str, args: &CommonArgs) -> JResult<()> {
    match name {
        "solve" => solve(args),
        "spectra" => spectra(args),
        "measure" => measure(args),
        "krein" => krein(args),
        "two-spectra" => two_spectra(args),
        "reconstruct" => reconstruct(args),
        "gap" => gap(args),
        "density" => density(args),
        "uncertainty" => uncertainty(args),
        "pair-make" => pair_make(args),
        "pair-verify" => pair_verify(args),
        "probe-unique" => probe_unique(args),
        "demo-borg" => demo_borg(args),
        "demo-symmetric" => demo_symmetric(args),
        "demo-condition-free" => demo_condition_free(args),
        other => Err(schema(format!("unknown job {other}"))),
    }
}

// ---------------------------------------------------------------------
// Forward jobs
// ---------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SolveSpec {
    potential: PotentialInput,
    bc: BoundaryPair,
    count: usize,
    #[serde(default)]
    refine: Option<u32>,
}

fn solve(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<SolveSpec>(args)?;
    let sink = Sink::new("solve", args, sha)?;
    let q = spec.potential.resolve()?;
    let seq = eigenvalues(&q, spec.bc, spec.count, rule_of(spec.refine))?;
    #[derive(Serialize)]
    struct Payload {
        bc: BoundaryPair,
        has_zero: bool,
        lams: Vec<f64>,
        count: usize,
        refine: u32,
    }
    sink.result(&Payload {
        bc: spec.bc,
        has_zero: seq.has_zero,
        lams: seq.lams.clone(),
        count: spec.count,
        refine: rule_of(spec.refine).refine,
    })?;
    sink.csv(
        "eigenvalues.csv",
        "n,lambda",
        seq.lams
            .iter()
            .enumerate()
            .map(|(i, l)| format!("{},{}", i + 1, l)),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectraSpec {
    potential: PotentialInput,
    count: usize,
    #[serde(default)]
    refine: Option<u32>,
}

fn spectra(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<SpectraSpec>(args)?;
    let sink = Sink::new("spectra", args, sha)?;
    let q = spec.potential.resolve()?;
    let rule = rule_of(spec.refine);
    let dd = eigenvalues(&q, BoundaryPair::DD, spec.count, rule)?;
    let dn = eigenvalues(&q, BoundaryPair::DN, spec.count, rule)?;
    #[derive(Serialize)]
    struct Payload {
        dd: Vec<f64>,
        dn: Vec<f64>,
        count: usize,
        refine: u32,
    }
    sink.result(&Payload {
        dd: dd.lams.clone(),
        dn: dn.lams.clone(),
        count: spec.count,
        refine: rule.refine,
    })?;
    sink.csv(
        "spectra.csv",
        "n,lambda_dd,lambda_dn",
        dd.lams
            .iter()
            .zip(&dn.lams)
            .enumerate()
            .map(|(i, (a, b))| format!("{},{},{}", i + 1, a, b)),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MeasureSpec {
    potential: PotentialInput,
    #[serde(default)]
    side: Option<Side>,
    #[serde(default)]
    count: Option<usize>,
    #[serde(default)]
    refine: Option<u32>,
}

fn measure(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<MeasureSpec>(args)?;
    let sink = Sink::new("measure", args, sha)?;
    let q = spec.potential.resolve()?;
    let rule = rule_of(spec.refine);
    let lams = eigenvalues(&q, BoundaryPair::DD, spec.count.unwrap_or(30), rule)?;
    let mu = norming_masses(&q, &lams, spec.side.unwrap_or(Side::Right), rule)?;
    sink.result(&mu)?;
    let rows = std::iter::once(format!("0,{}", mu.mass0)).chain(
        mu.lams
            .iter()
            .zip(&mu.masses)
            .map(|(l, m)| format!("{l},{m}")),
    );
    sink.csv("measure.csv", "lambda,mass", rows)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KreinSpec {
    measure: MeasureInput,
}

fn krein(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<KreinSpec>(args)?;
    let sink = Sink::new("krein", args, sha)?;
    let mu = spec.measure.resolve()?;
    let shift = krein_shift_of_measure(&mu)?;
    let identity = verify_exponential_identity(&mu, &shift, None)?;
    #[derive(Serialize)]
    struct Payload {
        shift: mixedspec::herglotz::KreinShift,
        identity: mixedspec::herglotz::ExponentialIdentityReport,
    }
    sink.result(&Payload {
        shift: shift.clone(),
        identity,
    })?;
    sink.csv(
        "shift_intervals.csv",
        "index,left,right",
        shift
            .pos
            .iter()
            .enumerate()
            .map(|(j, (a, b))| format!("{j},{a},{b}")),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoSpectraSpec {
    potential: PotentialInput,
    count: usize,
    #[serde(default)]
    refine: Option<u32>,
}

fn two_spectra(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<TwoSpectraSpec>(args)?;
    let sink = Sink::new("two-spectra", args, sha)?;
    let q = spec.potential.resolve()?;
    let rule = rule_of(spec.refine);
    let dd = eigenvalues(&q, BoundaryPair::DD, spec.count, rule)?;
    let dn = eigenvalues(&q, BoundaryPair::DN, spec.count, rule)?;
    let recovered = masses_from_two_spectra(&dd, &dn)?;
    let direct = norming_masses(&q, &dd, Side::Right, rule)?;
    let n = recovered.masses.len().min(direct.masses.len());
    let mut max_rel = (recovered.mass0 - direct.mass0).abs() / direct.mass0;
    for i in 0..n {
        let rel = (recovered.masses[i] - direct.masses[i]).abs() / direct.masses[i];
        max_rel = max_rel.max(rel);
    }
    #[derive(Serialize)]
    struct Payload {
        lams: Vec<f64>,
        recovered: Vec<f64>,
        direct: Vec<f64>,
        recovered_mass0: f64,
        direct_mass0: f64,
        max_rel_deviation: f64,
        compared: usize,
    }
    sink.result(&Payload {
        lams: recovered.lams.clone(),
        recovered: recovered.masses.clone(),
        direct: direct.masses.clone(),
        recovered_mass0: recovered.mass0,
        direct_mass0: direct.mass0,
        max_rel_deviation: max_rel,
        compared: n,
    })?;
    sink.csv(
        "two_spectra_masses.csv",
        "lambda,mass_recovered,mass_direct",
        (0..n).map(|i| {
            format!(
                "{},{},{}",
                recovered.lams[i], recovered.masses[i], direct.masses[i]
            )
        }),
    )
}

// ---------------------------------------------------------------------
// Inverse jobs
// ---------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReconstructSpec {
    measure: MeasureInput,
    #[serde(default)]
    grid: Option<usize>,
    #[serde(default)]
    modes: Option<usize>,
    #[serde(default)]
    refine: Option<u32>,
}

fn reconstruct(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<ReconstructSpec>(args)?;
    let sink = Sink::new("reconstruct", args, sha)?;
    let mu = spec.measure.resolve()?;
    let rep = reconstruct_from_measure(
        &mu,
        spec.grid.unwrap_or(256),
        spec.modes.unwrap_or(40),
        rule_of(spec.refine),
    )?;
    sink.result(&rep)?;
    let n = 257usize;
    sink.csv(
        "reconstructed.csv",
        "x,q",
        (0..n).map(|i| {
            let x = i as f64 / (n - 1) as f64;
            format!("{x},{}", rep.potential.eval(x))
        }),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GapSpec {
    q1: PotentialInput,
    q2: PotentialInput,
    #[serde(default)]
    count: Option<usize>,
    #[serde(default)]
    refine: Option<u32>,
    /// Upper end of the scanned band |s| ≤ band.
    #[serde(default)]
    band: Option<f64>,
    #[serde(default)]
    points: Option<usize>,
}

fn gap(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<GapSpec>(args)?;
    let sink = Sink::new("gap", args, sha)?;
    let q1 = spec.q1.resolve()?;
    let q2 = spec.q2.resolve()?;
    let rule = rule_of(spec.refine);
    let count = spec.count.unwrap_or(40);
    let l1 = eigenvalues(&q1, BoundaryPair::DD, count, rule)?;
    let l2 = eigenvalues(&q2, BoundaryPair::DD, count, rule)?;
    let mu1 = norming_masses(&q1, &l1, Side::Left, rule)?;
    let mu2 = norming_masses(&q2, &l2, Side::Left, rule)?;
    let diff = mu1.union_difference(&mu2, 1e-9)?;
    let band = spec.band.unwrap_or(0.7);
    let points = spec.points.unwrap_or(141).max(2);
    // Sample |ν̂| on the claimed gap band and on a wide reference band;
    // the measure's size in transform domain is the l2 norm of the
    // pair-coalesced net masses.
    let s_grid: Vec<f64> = (0..points)
        .map(|i| band * i as f64 / (points - 1) as f64)
        .collect();
    let ft = fourier_transform(&diff, &s_grid)?;
    let abs: Vec<f64> = ft.iter().map(|v| v.norm()).collect();
    let max_abs = abs.iter().cloned().fold(0.0, f64::max);
    let mean_spacing = (diff.support.last().unwrap() - diff.support.first().unwrap())
        / (diff.support.len() - 1).max(1) as f64;
    let nets = mixedspec::herglotz::coalesce_clusters(&diff, 0.5 * mean_spacing);
    let norm = nets.iter().map(|(_, m)| m * m).sum::<f64>().sqrt();
    let decay = gap_from_decay(&diff, None)?;
    #[derive(Serialize)]
    struct Payload {
        band: f64,
        max_abs_ft: f64,
        net_mass_l2_norm: f64,
        rel_max: f64,
        decay: mixedspec::herglotz::GapReport,
    }
    sink.result(&Payload {
        band,
        max_abs_ft: max_abs,
        net_mass_l2_norm: norm,
        rel_max: if norm > 0.0 { max_abs / norm } else { 0.0 },
        decay,
    })?;
    sink.csv(
        "fourier.csv",
        "s,ft_abs",
        s_grid
            .iter()
            .zip(&abs)
            .map(|(s, a)| format!("{s},{a}")),
    )
}

// ---------------------------------------------------------------------
// Density / uncertainty jobs
// ---------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PatternSpec {
    period: u32,
    residues: Vec<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DensitySpec {
    #[serde(default)]
    pattern: Option<PatternSpec>,
    #[serde(default)]
    lacunary: bool,
    #[serde(default)]
    indices: Option<Vec<i64>>,
    window: i64,
    #[serde(default)]
    translate: Option<i64>,
}

fn density(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<DensitySpec>(args)?;
    let sink = Sink::new("density", args, sha)?;
    let picks =
        spec.pattern.is_some() as u8 + spec.lacunary as u8 + spec.indices.is_some() as u8;
    if picks != 1 {
        return Err(schema(
            "density needs exactly one of `pattern`, `lacunary`, `indices`",
        ));
    }
    let mut set = if let Some(p) = &spec.pattern {
        IndexSet::from_pattern(p.period, &p.residues, spec.window)?
    } else if spec.lacunary {
        IndexSet::lacunary(spec.window)
    } else {
        IndexSet::new(
            spec.indices.clone().unwrap(),
            mixedspec::bmdensity::IndexTailModel::None,
        )?
    };
    if let Some(m) = spec.translate {
        set = set.translated(m);
    }
    let interior = interior_density(&set);
    let exterior = exterior_density(&set);
    let dprime = dprime_interior_density(&set);
    let complement = density_complement_check(&set);
    let radius = completeness_radius(&set);
    #[derive(Serialize)]
    struct Payload {
        interior: mixedspec::DensityEstimate,
        exterior: mixedspec::DensityEstimate,
        dprime: mixedspec::DensityEstimate,
        complement: mixedspec::bmdensity::ComplementReport,
        completeness_radius: f64,
        set_size: usize,
    }
    let sweep = interior.sweep.clone();
    sink.result(&Payload {
        interior,
        exterior,
        dprime,
        complement,
        completeness_radius: radius,
        set_size: set.indices.len(),
    })?;
    sink.csv(
        "density_sweep.csv",
        "scale,interior_estimate",
        sweep.iter().map(|(l, v)| format!("{l},{v}")),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UncertaintySpec {
    rule: EpsRule,
    window: u64,
}

fn uncertainty(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<UncertaintySpec>(args)?;
    let sink = Sink::new("uncertainty", args, sha)?;
    let model = UncertaintyModel::from_rule(spec.rule.clone(), spec.window)?;
    let u = uncertainty_size(&model)?;
    let (set, est) = admissible_subsequence_search(&model)?;
    #[derive(Serialize)]
    struct Payload {
        uncertainty: f64,
        admissible_density: mixedspec::DensityEstimate,
        admissible_size: usize,
        window: u64,
        rule: EpsRule,
    }
    sink.result(&Payload {
        uncertainty: u,
        admissible_density: est,
        admissible_size: set.indices.len(),
        window: spec.window,
        rule: spec.rule,
    })?;
    sink.csv(
        "eps.csv",
        "n,eps",
        model
            .eps
            .iter()
            .enumerate()
            .map(|(n, e)| format!("{n},{e}")),
    )
}

// ---------------------------------------------------------------------
// Pair jobs
// ---------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairMakeSpec {
    /// Number of positive atoms in the working window.
    #[serde(default)]
    window: Option<usize>,
    /// Half-width of the left agreement interval (units of π); the
    /// splitting function f annihilates the band |s| ≤ 2a.
    a: f64,
    /// Relative size of the blended companion perturbation.
    #[serde(default)]
    delta: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct PairBundle {
    pair: IndeterminatePair,
    lams: Vec<f64>,
    masses: Vec<f64>,
    masses_tilde: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    a: f64,
    b: f64,
    certificates: PairCertificates,
}

#[derive(Serialize, Deserialize)]
struct PairCertificates {
    f_residual: f64,
    f_norm: f64,
    g_residual: f64,
    g_norm: f64,
    tolerance: f64,
}

fn pair_make(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<PairMakeSpec>(args)?;
    let sink = Sink::new("pair-make", args, sha)?;
    let window = spec.window.unwrap_or(200);
    let lams = SpectralSequence::free_dd(window);
    let gam = even_masses(&lams)?;
    let f = pw_complement_function(&lams, spec.a, args.seed, PwConstraints::default())?;
    let g = f.blended(&lams, spec.delta.unwrap_or(2e-4), args.seed.wrapping_add(1))?;
    let pair = indeterminate_pair(&lams, &gam, &f, &g)?;
    let bundle = PairBundle {
        lams: lams.lams.clone(),
        masses: pair.mu.masses.clone(),
        masses_tilde: pair.mu_tilde.masses.clone(),
        f: f.values.clone(),
        g: g.values.clone(),
        a: pair.a,
        b: pair.b,
        certificates: PairCertificates {
            f_residual: f.residual,
            f_norm: f.norm,
            g_residual: g.residual,
            g_norm: g.norm,
            tolerance: mixedspec::pairs::CERTIFICATE_TOL,
        },
        pair,
    };
    sink.result(&bundle)?;
    // The bundle is also an input artifact for pair-verify.
    let text = serde_json::to_string_pretty(&bundle)
        .map_err(|e| JobError::Numeric(format!("serialize: {e}")))?;
    fs::write(sink.out.join("pair_bundle.json"), text + "\n")
        .map_err(|e| JobError::Numeric(format!("write pair_bundle.json: {e}")))?;
    sink.csv(
        "pair_masses.csv",
        "lambda,alpha,alpha_tilde,f,g",
        (0..bundle.lams.len()).map(|i| {
            format!(
                "{},{},{},{},{}",
                bundle.lams[i],
                bundle.masses[i],
                bundle.masses_tilde[i],
                bundle.f[i],
                bundle.g[i]
            )
        }),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReconSpecInput {
    grid: usize,
    modes: usize,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairVerifySpec {
    bundle: PathBuf,
    #[serde(default)]
    recon: Option<ReconSpecInput>,
}

fn pair_verify(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<PairVerifySpec>(args)?;
    let sink = Sink::new("pair-verify", args, sha)?;
    let text = fs::read_to_string(&spec.bundle)
        .map_err(|e| schema(format!("cannot read bundle {}: {e}", spec.bundle.display())))?;
    let bundle: PairBundle =
        serde_json::from_str(&text).map_err(|e| schema(format!("bundle: {e}")))?;
    let recon = spec.recon.map(|r| ReconCheck {
        grid: r.grid,
        modes: r.modes,
    });
    let verification = verify_pair(&bundle.pair, bundle.a, bundle.b, recon)?;
    sink.result(&verification)?;
    sink.csv(
        "pair_masses.csv",
        "lambda,alpha,alpha_tilde",
        (0..bundle.lams.len()).map(|i| {
            format!(
                "{},{},{}",
                bundle.lams[i], bundle.masses[i], bundle.masses_tilde[i]
            )
        }),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProbeSpec {
    measure: MeasureInput,
    rule: EpsRule,
    /// Claimed interior-density bound for the admissible splitting support.
    a: f64,
}

fn probe_unique(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<ProbeSpec>(args)?;
    let sink = Sink::new("probe-unique", args, sha)?;
    let mu = spec.measure.resolve()?;
    let seq = SpectralSequence {
        lams: mu.lams.clone(),
        has_zero: true,
    };
    let gam = even_masses(&seq)?;
    let model = UncertaintyModel::from_rule(spec.rule.clone(), mu.lams.len() as u64)?;
    let probe = uniqueness_probe(&mu, &gam, &model, spec.a)?;
    sink.result(&probe)?;
    sink.csv(
        "candidate.csv",
        "n,candidate",
        probe
            .candidate
            .iter()
            .enumerate()
            .map(|(n, c)| format!("{},{}", n + 1, c)),
    )
}

// ---------------------------------------------------------------------
// Demos
// ---------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DemoBorgSpec {
    potential: PotentialInput,
    #[serde(default)]
    count: Option<usize>,
    #[serde(default)]
    grid: Option<usize>,
    #[serde(default)]
    modes: Option<usize>,
    #[serde(default)]
    refine: Option<u32>,
}

fn demo_borg(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<DemoBorgSpec>(args)?;
    let sink = Sink::new("demo-borg", args, sha)?;
    let q = spec.potential.resolve()?;
    let rule = rule_of(spec.refine);
    let count = spec.count.unwrap_or(30);
    let dd = eigenvalues(&q, BoundaryPair::DD, count, rule)?;
    let dn = eigenvalues(&q, BoundaryPair::DN, count, rule)?;
    let rep = reconstruct_from_two_spectra(
        &dd,
        &dn,
        spec.grid.unwrap_or(256),
        spec.modes.unwrap_or(count),
        rule,
    )?;
    let l2_error = rep.potential.l2_distance(&q);
    // Uncertainty verdict with eigenvalues localized to exponentially
    // small intervals (numerically exact spectra).
    let sys = IntervalSystem::new(
        dd.lams
            .iter()
            .enumerate()
            .map(|(n, l)| (*l, l + (-(n as f64 + 1.0)).exp()))
            .collect(),
        IntervalTailModel::ExponentialLengths {
            c: 1.0,
            gap: std::f64::consts::PI,
        },
    )?;
    let verdict = borg_uncertainty_verdict(&sys)?;
    #[derive(Serialize)]
    struct Payload {
        l2_error: f64,
        reconstruction: mixedspec::ReconstructionReport,
        verdict: mixedspec::bmdensity::BorgReport,
    }
    sink.result(&Payload {
        l2_error,
        reconstruction: rep.clone(),
        verdict,
    })?;
    let n = 257usize;
    sink.csv(
        "roundtrip.csv",
        "x,q_input,q_reconstructed",
        (0..n).map(|i| {
            let x = i as f64 / (n - 1) as f64;
            format!("{x},{},{}", q.eval(x), rep.potential.eval(x))
        }),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DemoSymmetricSpec {
    core: PotentialInput,
    #[serde(default)]
    eps: Option<f64>,
    #[serde(default)]
    amp: Option<f64>,
}

fn demo_symmetric(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<DemoSymmetricSpec>(args)?;
    let sink = Sink::new("demo-symmetric", args, sha)?;
    let core = spec.core.resolve()?;
    let (q, qt, report) = symmetric_pair(&core, spec.eps.unwrap_or(0.1), spec.amp.unwrap_or(1.0))?;
    sink.result(&report)?;
    let n = 513usize;
    sink.csv(
        "pair_potentials.csv",
        "x,q,q_tilde",
        (0..n).map(|i| {
            let x = i as f64 / (n - 1) as f64;
            format!("{x},{},{}", q.eval(x), qt.eval(x))
        }),
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DemoConditionFreeSpec {
    core: PotentialInput,
    eps: f64,
}

fn demo_condition_free(args: &CommonArgs) -> JResult<()> {
    let (spec, sha) = load_spec::<DemoConditionFreeSpec>(args)?;
    let sink = Sink::new("demo-condition-free", args, sha)?;
    let core = spec.core.resolve()?;
    let report = condition_free_demo(&core, spec.eps)?;
    sink.result(&report)?;
    sink.csv(
        "coincidence_set.csv",
        "n,lambda",
        report
            .lambdas
            .iter()
            .enumerate()
            .map(|(i, l)| format!("{},{}", i + 1, l)),
    )
}
