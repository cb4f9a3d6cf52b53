//! Command-line surface for the thermocone library.
//!
//! Every subcommand validates its full configuration before computing,
//! computes the complete output in memory, and only then writes it, so a
//! failing run never leaves a partial file.  Identical flags and seeds
//! produce byte-identical output.
//!
//! Exit codes: 0 on success, 2 on a validation failure (the message names
//! the violated precondition), 3 on a numerical or I/O failure.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use thermocone::cones::{
    future_cone, incomparable_region, past_and_incomparable, project_to_simplex,
    tangent_vectors_thermal,
};
use thermocone::prob::{prob_classify, ProbClass, ProbConeQuery};
use thermocone::qubit::{
    gp_cones, to_future_boundary, to_past_region, to_population_coherence, BlochState,
    QubitThermalContext,
};
use thermocone::report::{ent_grid_csv, grid_csv, polyline_csv, sweep_csv, Envelope, CSV_SCHEMA_HEADER};
use thermocone::sampling::InducedMeasureSpec;
use thermocone::simplex::{beta_order, Beta, GibbsContext, ProbVector};
use thermocone::tol::MC_DEFAULT_SAMPLES;
use thermocone::volumes::{
    closed_form_d3, exact_future_volume, isovolumetric_grid, mc_volumes, volume_sweep,
};
use thermocone::ThermoconeError;
use thermocone::entanglement::iso_entanglement_grid;

/// Default sample count for the induced-measure grid.
const ENT_DEFAULT_SAMPLES: usize = 50_000;
/// Default barycentric grid resolution (points per simplex side).
const DEFAULT_RESOLUTION: usize = 60;
/// Number of boundary samples when `--targets` is not given.
const DEFAULT_TARGET_COUNT: usize = 33;

#[derive(Parser)]
#[command(
    name = "thermocone",
    version,
    about = "Thermal cones on the probability simplex: construction, classification, and volumes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Future-cone vertices, per-chamber past vertices, tangent vectors, and chamber metadata
    Cones(ConesArgs),
    /// Volume triple (future, past, incomparable) of one state
    Volume(VolumeArgs),
    /// Volume triples of every permutation of a state across a range of inverse temperatures
    Sweep(SweepArgs),
    /// Exact volume triples on a regular three-level grid at one inverse temperature
    Iso(IsoArgs),
    /// Probabilistic-cone classification of a grid of states at listed conversion probabilities
    Prob(ProbArgs),
    /// Entanglement-cone volume grid under the Schmidt-coefficient measure of random pure states
    Entangle(EntangleArgs),
    /// Qubit coherent thermal cones: thermal-operation boundaries or Gibbs-preserving disks
    Qubit(QubitArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format (csv is available where a tabular schema is defined)
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write to this file instead of stdout (the file appears only on success)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ConesArgs {
    /// State as comma-separated decimals, e.g. 0.4,0.36,0.24
    #[arg(long)]
    state: String,
    /// Energy levels as comma-separated decimals (default 0,1,...,d-1)
    #[arg(long)]
    energies: Option<String>,
    /// Inverse temperature: a non-negative number or "inf"
    #[arg(long, default_value = "0")]
    beta: String,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum VolumeMethodArg {
    /// Closed-form three-level volumes at beta = 0
    ClosedForm,
    /// Exact future volume by hull enumeration (past and incomparable included where exact)
    Exact,
    /// Monte-Carlo estimate with binomial standard errors
    Mc,
}

#[derive(Args)]
struct VolumeArgs {
    /// State as comma-separated decimals
    #[arg(long)]
    state: String,
    /// Energy levels as comma-separated decimals (default 0,1,...,d-1)
    #[arg(long)]
    energies: Option<String>,
    /// Inverse temperature: a non-negative number or "inf"
    #[arg(long, default_value = "0")]
    beta: String,
    /// Volume computation method
    #[arg(long, value_enum, default_value_t = VolumeMethodArg::Exact)]
    method: VolumeMethodArg,
    /// Monte-Carlo sample count (mc method only)
    #[arg(long, default_value_t = MC_DEFAULT_SAMPLES)]
    samples: usize,
    /// Random seed (mc method only)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// State as comma-separated decimals
    #[arg(long)]
    state: String,
    /// Energy levels as comma-separated decimals (default 0,1,...,d-1)
    #[arg(long)]
    energies: Option<String>,
    /// Inverse temperatures: "start:end:step" or a comma-separated list
    #[arg(long)]
    betas: String,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct IsoArgs {
    /// Inverse temperature: a non-negative number or "inf"
    #[arg(long, default_value = "0")]
    beta: String,
    /// Energy levels for the three-level grid (default 0,1,2)
    #[arg(long)]
    energies: Option<String>,
    /// Barycentric grid resolution (points per side)
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ProbArgs {
    /// Source state as comma-separated decimals
    #[arg(long)]
    state: String,
    /// Conversion probabilities in (0, 1], comma-separated
    #[arg(long, default_value = "1,0.875,0.75,0.625,0.5")]
    p: String,
    /// Barycentric grid resolution (points per side)
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Orientation {
    /// Native order: the future of p holds the states p converts into under LOCC
    Entanglement,
    /// Swapped labels: the future of p holds the states that convert into p
    Thermodynamic,
}

#[derive(Args)]
struct EntangleArgs {
    /// System dimension (number of Schmidt coefficients)
    #[arg(long)]
    n: usize,
    /// Environment dimension
    #[arg(long)]
    m: usize,
    /// Number of induced-measure samples shared by every grid state
    #[arg(long, default_value_t = ENT_DEFAULT_SAMPLES)]
    samples: usize,
    /// Random seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Barycentric grid resolution (points per side, sorted chamber)
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    /// Which conversion order labels the future and past columns
    #[arg(long, value_enum, default_value_t = Orientation::Entanglement)]
    orientation: Orientation,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum QubitMode {
    /// Thermal operations: future boundary curve and two-piece past region
    To,
    /// Gibbs-preserving operations: the two bounding disks
    Gp,
}

#[derive(Args)]
struct QubitArgs {
    /// Bloch vector as x,y,z
    #[arg(long)]
    bloch: String,
    /// Thermal z-coordinate zeta in [0, 1)
    #[arg(long)]
    zeta: f64,
    /// Cone family
    #[arg(long, value_enum, default_value_t = QubitMode::Gp)]
    mode: QubitMode,
    /// Coherence levels for the future-boundary samples (to mode; default: evenly spaced in [0, c])
    #[arg(long)]
    targets: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

/// Failures after argument parsing: validation exits 2, runtime exits 3.
enum AppError {
    Validation(String),
    Runtime(String),
}

impl From<ThermoconeError> for AppError {
    fn from(e: ThermoconeError) -> Self {
        match e {
            ThermoconeError::Numerical { .. } => AppError::Runtime(e.to_string()),
            other => AppError::Validation(other.to_string()),
        }
    }
}

fn validation(message: impl Into<String>) -> AppError {
    AppError::Validation(message.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Cones(a) => cmd_cones(a),
        Command::Volume(a) => cmd_volume(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Iso(a) => cmd_iso(a),
        Command::Prob(a) => cmd_prob(a),
        Command::Entangle(a) => cmd_entangle(a),
        Command::Qubit(a) => cmd_qubit(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(AppError::Runtime(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

// ---------------------------------------------------------------- parsing

fn parse_floats(flag: &str, s: &str) -> Result<Vec<f64>, AppError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| validation(format!("--{flag}: `{t}` is not a number")))
        })
        .collect()
}

fn parse_state(s: &str) -> Result<ProbVector, AppError> {
    Ok(ProbVector::new(parse_floats("state", s)?)?)
}

fn parse_beta(s: &str) -> Result<Beta, AppError> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") {
        return Ok(Beta::Infinite);
    }
    let v = t
        .parse::<f64>()
        .map_err(|_| validation(format!("--beta: `{s}` is neither a number nor \"inf\"")))?;
    Ok(Beta::finite(v)?)
}

/// Energies from the flag, or the equidistant ladder 0,1,...,d-1.
fn parse_energies(flag: &Option<String>, d: usize) -> Result<Vec<f64>, AppError> {
    match flag {
        Some(s) => parse_floats("energies", s),
        None => Ok((0..d).map(|i| i as f64).collect()),
    }
}

/// "start:end:step" (inclusive of both ends up to rounding) or a comma list.
fn parse_betas(s: &str) -> Result<Vec<f64>, AppError> {
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(validation("--betas: a range must be start:end:step"));
        }
        let nums = parse_floats("betas", &parts.join(","))?;
        let (start, end, step) = (nums[0], nums[1], nums[2]);
        if step <= 0.0 {
            return Err(validation("--betas: the range step must be positive"));
        }
        if end < start {
            return Err(validation("--betas: the range end must not precede its start"));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize;
        Ok((0..=count).map(|k| start + k as f64 * step).collect())
    } else {
        parse_floats("betas", s)
    }
}

// ----------------------------------------------------------------- output

fn write_atomic(path: &Path, text: &str) -> Result<(), AppError> {
    let tmp = PathBuf::from(format!("{}.tmp", path.display()));
    std::fs::write(&tmp, text)
        .map_err(|e| AppError::Runtime(format!("cannot write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| {
        AppError::Runtime(format!("cannot move output into place at {}: {e}", path.display()))
    })?;
    Ok(())
}

/// Renders the run as a JSON envelope or, when defined, a CSV table, and
/// writes it to the chosen sink.  `csv: None` means the command has no
/// tabular schema.
fn emit<R: Serialize>(
    out: &OutputArgs,
    config: serde_json::Value,
    results: R,
    seed: u64,
    csv: Option<String>,
) -> Result<(), AppError> {
    let text = match out.format {
        Format::Json => Envelope::new(config, results, seed).to_json()?,
        Format::Csv => csv.ok_or_else(|| {
            validation("csv output is not defined for this command; use --format json")
        })?,
    };
    match &out.output {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => write_atomic(path, &text),
    }
}

// --------------------------------------------------------------- commands

fn cmd_cones(a: ConesArgs) -> Result<(), AppError> {
    let p = parse_state(&a.state)?;
    let energies = parse_energies(&a.energies, p.dim())?;
    let beta = parse_beta(&a.beta)?;
    let ctx = GibbsContext::new(energies.clone(), beta)?;

    let order = beta_order(&p, &ctx)?;
    let fut = future_cone(&p, &ctx)?;
    let region = incomparable_region(&p, &ctx)?;
    // exact past vertices are enumerable only in low dimension; omit them
    // (with a note) rather than fail the whole inventory above the guard
    let past = match past_and_incomparable(&p, &ctx) {
        Ok((chambers, _)) => Some(
            chambers
                .iter()
                .map(|c| {
                    json!({
                        "chamber": c.chamber().map(|b| b.perm().to_vec()),
                        "vertices": c.vertices().iter().map(|v| v.entries().to_vec()).collect::<Vec<_>>(),
                    })
                })
                .collect::<Vec<_>>(),
        ),
        Err(ThermoconeError::DimensionGuard { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    let tangents = tangent_vectors_thermal(&p, &ctx)?
        .iter()
        .map(|t| {
            Ok(json!({
                "level": t.level(),
                "chamber": t.chamber().perm().to_vec(),
                "entries": t.entries().to_vec(),
                "projected": project_to_simplex(t)?.entries().to_vec(),
            }))
        })
        .collect::<Result<Vec<_>, AppError>>()?;

    let config = json!({
        "command": "cones",
        "state": p.entries(),
        "energies": energies,
        "beta": a.beta.trim(),
    });
    let results = json!({
        "beta_order": order.perm(),
        "gibbs": ctx.gamma(),
        "future_vertices": fut.vertices().iter().map(|v| v.entries().to_vec()).collect::<Vec<_>>(),
        "past_chambers": past,
        "tangents": tangents,
        "incomparable_piece_count": region.piece_count(),
    });
    emit(&a.out, config, results, 0, None)
}

fn cmd_volume(a: VolumeArgs) -> Result<(), AppError> {
    let p = parse_state(&a.state)?;
    let energies = parse_energies(&a.energies, p.dim())?;
    let beta = parse_beta(&a.beta)?;

    let report = match a.method {
        VolumeMethodArg::ClosedForm => {
            if p.dim() != 3 {
                return Err(validation(
                    "closed-form volumes require a three-level state",
                ));
            }
            if !matches!(beta, Beta::Finite(v) if v == 0.0) {
                return Err(validation("closed-form volumes require beta = 0"));
            }
            closed_form_d3(&p)?
        }
        VolumeMethodArg::Exact => {
            let ctx = GibbsContext::new(energies.clone(), beta)?;
            exact_future_volume(&p, &ctx)?
        }
        VolumeMethodArg::Mc => {
            let ctx = GibbsContext::new(energies.clone(), beta)?;
            mc_volumes(&p, &ctx, a.samples, a.seed)?
        }
    };

    let config = json!({
        "command": "volume",
        "state": p.entries(),
        "energies": energies,
        "beta": a.beta.trim(),
        "method": match a.method {
            VolumeMethodArg::ClosedForm => "closed-form",
            VolumeMethodArg::Exact => "exact",
            VolumeMethodArg::Mc => "mc",
        },
        "samples": if a.method == VolumeMethodArg::Mc { Some(a.samples) } else { None },
    });
    emit(&a.out, config, report, a.seed, None)
}

fn cmd_sweep(a: SweepArgs) -> Result<(), AppError> {
    let p = parse_state(&a.state)?;
    let energies = parse_energies(&a.energies, p.dim())?;
    let betas = parse_betas(&a.betas)?;
    let rows = volume_sweep(&p, &energies, &betas)?;
    let csv = sweep_csv(&rows);

    let config = json!({
        "command": "sweep",
        "state": p.entries(),
        "energies": energies,
        "betas": betas,
    });
    emit(&a.out, config, rows, 0, Some(csv))
}

fn cmd_iso(a: IsoArgs) -> Result<(), AppError> {
    let energies = parse_energies(&a.energies, 3)?;
    if energies.len() != 3 {
        return Err(validation(
            "the isovolumetric grid is three-level; provide exactly 3 energies",
        ));
    }
    let beta = parse_beta(&a.beta)?;
    let ctx = GibbsContext::new(energies.clone(), beta)?;
    let rows = isovolumetric_grid(&ctx, a.resolution)?;
    let csv = grid_csv(&rows, a.beta.trim());

    let config = json!({
        "command": "iso",
        "energies": energies,
        "beta": a.beta.trim(),
        "resolution": a.resolution,
    });
    emit(&a.out, config, rows, 0, Some(csv))
}

fn class_name(class: ProbClass) -> &'static str {
    match class {
        ProbClass::Future => "Future",
        ProbClass::Past => "Past",
        ProbClass::Interconvertible => "Interconvertible",
        ProbClass::Incomparable => "Incomparable",
    }
}

/// All length-`parts` compositions of `total`, lexicographically.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn recurse(remaining: usize, slots: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slots == 1 {
            current.push(remaining);
            out.push(current.clone());
            current.pop();
            return;
        }
        for k in 0..=remaining {
            current.push(k);
            recurse(remaining - k, slots - 1, current, out);
            current.pop();
        }
    }
    let mut out = Vec::new();
    recurse(total, parts, &mut Vec::new(), &mut out);
    out
}

fn cmd_prob(a: ProbArgs) -> Result<(), AppError> {
    let p = parse_state(&a.state)?;
    let d = p.dim();
    let probs = parse_floats("p", &a.p)?;
    if a.resolution < 1 {
        return Err(validation("--resolution must be at least 1"));
    }
    // validate every probability before classifying anything
    let queries = probs
        .iter()
        .map(|&prob| ProbConeQuery::new(p.clone(), prob))
        .collect::<Result<Vec<_>, _>>()?;

    let grid: Vec<ProbVector> = compositions(a.resolution, d)
        .into_iter()
        .map(|parts| {
            ProbVector::new(
                parts
                    .iter()
                    .map(|&k| k as f64 / a.resolution as f64)
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut panels = Vec::with_capacity(queries.len());
    let mut csv = String::new();
    csv.push_str(CSV_SCHEMA_HEADER);
    csv.push('\n');
    let cols: Vec<String> = (1..=d).map(|i| format!("p{i}")).collect();
    csv.push_str(&format!("{},prob,class\n", cols.join(",")));
    for (query, &prob) in queries.iter().zip(&probs) {
        let mut rows = Vec::with_capacity(grid.len());
        for q in &grid {
            let class = class_name(prob_classify(q, query)?);
            let state: Vec<String> = q.entries().iter().map(f64::to_string).collect();
            csv.push_str(&format!("{},{prob},{class}\n", state.join(",")));
            rows.push(json!({ "state": q.entries(), "class": class }));
        }
        panels.push(json!({ "prob": prob, "grid": rows }));
    }

    let config = json!({
        "command": "prob",
        "state": p.entries(),
        "p": probs,
        "resolution": a.resolution,
    });
    emit(&a.out, config, panels, 0, Some(csv))
}

fn cmd_entangle(a: EntangleArgs) -> Result<(), AppError> {
    let spec = InducedMeasureSpec::new(a.n, a.m, a.seed)?;
    let mut rows = iso_entanglement_grid(&spec, a.resolution, a.samples)?;
    if a.orientation == Orientation::Thermodynamic {
        for row in &mut rows {
            std::mem::swap(&mut row.report.v_future, &mut row.report.v_past);
        }
    }
    let csv = ent_grid_csv(&rows, &spec, a.samples as u64);

    let config = json!({
        "command": "entangle",
        "n": a.n,
        "m": a.m,
        "samples": a.samples,
        "resolution": a.resolution,
        "orientation": match a.orientation {
            Orientation::Entanglement => "entanglement",
            Orientation::Thermodynamic => "thermodynamic",
        },
    });
    emit(&a.out, config, rows, a.seed, Some(csv))
}

fn cmd_qubit(a: QubitArgs) -> Result<(), AppError> {
    let bloch = parse_floats("bloch", &a.bloch)?;
    if bloch.len() != 3 {
        return Err(validation("--bloch takes exactly three coordinates x,y,z"));
    }
    let state = BlochState::new(bloch[0], bloch[1], bloch[2])?;
    let ctx = QubitThermalContext::new(a.zeta)?;

    let config = json!({
        "command": "qubit",
        "bloch": bloch,
        "zeta": a.zeta,
        "mode": match a.mode {
            QubitMode::To => "to",
            QubitMode::Gp => "gp",
        },
    });

    match a.mode {
        QubitMode::Gp => {
            if a.targets.is_some() {
                return Err(validation("--targets applies only to --mode to"));
            }
            let cones = gp_cones(&state, &ctx)?;
            let mut csv = String::from("# curve=disk1\n");
            csv.push_str(&polyline_csv(&cones.circle1, "x", "z"));
            csv.push_str("# curve=disk2\n");
            csv.push_str(&polyline_csv(&cones.circle2, "x", "z"));
            emit(&a.out, config, cones, 0, Some(csv))
        }
        QubitMode::To => {
            let aligned = state.rotate_to_xz();
            let (_, c) = to_population_coherence(&aligned)?;
            let targets = match &a.targets {
                Some(s) => parse_floats("targets", s)?,
                None if c == 0.0 => vec![0.0],
                None => (0..DEFAULT_TARGET_COUNT)
                    .map(|k| c * k as f64 / (DEFAULT_TARGET_COUNT - 1) as f64)
                    .collect(),
            };
            let future = to_future_boundary(&aligned, &ctx, &targets)?;
            let past = to_past_region(&aligned, &ctx)?;

            let mut csv = String::from("# curve=future_boundary\n");
            csv.push_str(&polyline_csv(&future.points, "coherence", "population"));
            csv.push_str("# curve=past_piece1\n");
            csv.push_str(&polyline_csv(&past.piece1_boundary, "population", "coherence"));
            if past.piece2_window.is_some() {
                csv.push_str("# curve=past_piece2\n");
                csv.push_str(&polyline_csv(&past.piece2_boundary, "population", "coherence"));
            }
            let results = json!({ "future": future, "past": past });
            emit(&a.out, config, results, 0, Some(csv))
        }
    }
}
