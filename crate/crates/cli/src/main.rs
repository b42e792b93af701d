//! `owtf`: reproducible experiments in operator-windowed time-frequency
//! analysis on `Z_N x Z_N`.
//!
//! Every subcommand reads its parameters from flags or, via `owtf run
//! --config file.json`, from a JSON document with the same field names.
//! Reports embed the tool version, a config hash, and the grid's constants
//! ledger; identical configs produce byte-identical reports.

mod output;
mod suite;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use owtf_core::Complex64;
use serde::{Deserialize, Serialize};

use output::{emit, GridReport, GridRow, Meta, TableReport, ValueRow};
use owtf_core::grid::{MixedNormParams, PhaseGrid, PhasePoint, WeightKind};
use owtf_core::locops::op_conv;
use owtf_core::opwindow::{equivalence_report_with_tol, op_stft, OperatorMatrix};
use owtf_core::specs;
use owtf_core::weylcohen::{spreading, symplectic_ft, weyl_quantize, weyl_symbol, WeylSymbol};
use owtf_core::{io as owtf_io, Error};

#[derive(Parser)]
#[command(
    name = "owtf",
    version,
    about = "Operator-windowed time-frequency analysis on Z_N x Z_N",
    after_help = "Set OWTF_THREADS to cap internal parallelism (default 1; \
                  single-threaded runs are byte-reproducible)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Short-time Fourier transform heat map of a signal.
    Stft(StftArgs),
    /// Pointwise norms of the operator-windowed STFT.
    Opstft(OpstftArgs),
    /// Modulation norm of a signal.
    Modnorm(ModnormArgs),
    /// Sample the norm-equivalence sandwich for an operator window.
    Equivalence(EquivalenceArgs),
    /// Cohen's class distribution generated by an operator.
    Cohen(CohenArgs),
    /// Weyl symbol of an operator, or quantization of a symbol file.
    Weyl(WeylArgs),
    /// Spreading function of an operator.
    Spreading(SpreadingArgs),
    /// Build a localization operator and report its diagnostics.
    Locop(LocopArgs),
    /// Smoothed spectrogram of a signal under a phase-space mask.
    #[command(name = "smooth-spec")]
    SmoothSpec(SmoothSpecArgs),
    /// Run the exact-identity battery.
    #[command(name = "identity-suite")]
    IdentitySuite(IdentitySuiteArgs),
    /// Generate signals, operators, weights, or masks as OWTF1 files.
    Gen(GenArgs),
    /// Execute a subcommand from a JSON config document.
    Run(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct OutputArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    #[serde(default)]
    format: Format,
    /// Write the report to this path instead of stdout.
    #[arg(long)]
    #[serde(default)]
    out: Option<PathBuf>,
}

fn default_gauss() -> String {
    "gauss".to_string()
}

fn default_signal() -> String {
    "random:1".to_string()
}

fn default_op() -> String {
    "rankone:gauss".to_string()
}

fn default_one() -> String {
    "one".to_string()
}

fn default_two() -> String {
    "2".to_string()
}

fn default_samples() -> usize {
    64
}

fn default_seed() -> u64 {
    1
}

fn default_tol() -> f64 {
    owtf_core::opwindow::SANDWICH_TOL
}

fn default_disk() -> String {
    "disk:2".to_string()
}

fn default_gauss_mask() -> String {
    "gauss:1.5".to_string()
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct StftArgs {
    /// Grid side N.
    #[arg(long)]
    n: usize,
    #[arg(
        long,
        default_value = "random:1",
        help = "Signal spec (gauss, delta[:t], random:<seed>, chirp[:rate], \
                atom:<k>,<l>, twoatoms, file:<path>)"
    )]
    #[serde(default = "default_signal")]
    signal: String,
    /// Window spec (same grammar as --signal).
    #[arg(long, default_value = "gauss")]
    #[serde(default = "default_gauss")]
    window: String,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct OpstftArgs {
    /// Grid side N.
    #[arg(long)]
    n: usize,
    #[arg(
        long,
        default_value = "rankone:gauss",
        help = "Operator window spec (rankone:gauss, multiwindow:<k>, random:<seed>, \
                rank:<r>:<seed>, weyl:<file>, locop:<mask>, psdlocop:<mask>, identity, \
                file:<path>)"
    )]
    #[serde(default = "default_op")]
    op: String,
    /// Signal spec.
    #[arg(long, default_value = "random:1")]
    #[serde(default = "default_signal")]
    signal: String,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct ModnormArgs {
    /// Grid side N.
    #[arg(long)]
    n: usize,
    /// Signal spec.
    #[arg(long, default_value = "random:1")]
    #[serde(default = "default_signal")]
    signal: String,
    /// Inner exponent p (>= 1 or inf).
    #[arg(long, default_value = "2")]
    #[serde(default = "default_two")]
    p: String,
    /// Outer exponent q (>= 1 or inf).
    #[arg(long, default_value = "2")]
    #[serde(default = "default_two")]
    q: String,
    #[arg(
        long,
        default_value = "one",
        help = "Mixed-norm weight spec (one, poly:<s>, file:<path>)"
    )]
    #[serde(default = "default_one")]
    weight: String,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct EquivalenceArgs {
    /// Grid side N.
    #[arg(long)]
    n: usize,
    /// Operator window spec.
    #[arg(long, default_value = "rankone:gauss")]
    #[serde(default = "default_op")]
    op: String,
    /// Inner exponent p.
    #[arg(long, default_value = "2")]
    #[serde(default = "default_two")]
    p: String,
    /// Outer exponent q.
    #[arg(long, default_value = "2")]
    #[serde(default = "default_two")]
    q: String,
    #[arg(
        long,
        default_value = "one",
        help = "Window-class weight v (one, poly:<s>, file:<path>)"
    )]
    #[serde(default = "default_one")]
    weight: String,
    /// Mixed-norm weight m; defaults to the window-class weight.
    #[arg(long = "mod-weight")]
    #[serde(default)]
    mod_weight: Option<String>,
    /// Number of random signals to sample.
    #[arg(long, default_value_t = 64)]
    #[serde(default = "default_samples")]
    samples: usize,
    /// Ensemble seed.
    #[arg(long, default_value_t = 1)]
    #[serde(default = "default_seed")]
    seed: u64,
    /// Relative slack granted to the sandwich verdict.
    #[arg(long, default_value_t = owtf_core::opwindow::SANDWICH_TOL)]
    #[serde(default = "default_tol")]
    tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct CohenArgs {
    /// Grid side N.
    #[arg(long)]
    n: usize,
    /// Generating operator spec.
    #[arg(long, default_value = "rankone:gauss")]
    #[serde(default = "default_op")]
    op: String,
    /// Signal spec.
    #[arg(long, default_value = "random:1")]
    #[serde(default = "default_signal")]
    signal: String,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct WeylArgs {
    /// Grid side N (odd).
    #[arg(long)]
    n: usize,
    /// Operator spec whose Weyl symbol to compute.
    #[arg(long, conflicts_with = "symbol_file")]
    #[serde(default)]
    op: Option<String>,
    /// OWTF1 phase-field file to quantize instead.
    #[arg(long = "symbol-file")]
    #[serde(default)]
    symbol_file: Option<PathBuf>,
    /// Where to write the quantized operator (OWTF1), with --symbol-file.
    #[arg(long = "op-out")]
    #[serde(default)]
    op_out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct SpreadingArgs {
    /// Grid side N (odd).
    #[arg(long)]
    n: usize,
    /// Operator spec.
    #[arg(long, default_value = "rankone:gauss")]
    #[serde(default = "default_op")]
    op: String,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct LocopArgs {
    /// Grid side N.
    #[arg(long)]
    n: usize,
    #[arg(
        long,
        default_value = "disk:2",
        help = "Mask spec (ones, delta, disk:<radius>, gauss:<sigma>, file:<path>)"
    )]
    #[serde(default = "default_disk")]
    mask: String,
    /// Analysis window spec.
    #[arg(long = "window1", default_value = "gauss")]
    #[serde(default = "default_gauss")]
    window1: String,
    /// Synthesis window spec.
    #[arg(long = "window2", default_value = "gauss")]
    #[serde(default = "default_gauss")]
    window2: String,
    /// Write the operator (OWTF1) here.
    #[arg(long = "op-out")]
    #[serde(default)]
    op_out: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct SmoothSpecArgs {
    /// Grid side N.
    #[arg(long)]
    n: usize,
    /// Mask spec.
    #[arg(long, default_value = "gauss:1.5")]
    #[serde(default = "default_gauss_mask")]
    mask: String,
    /// Window spec.
    #[arg(long, default_value = "gauss")]
    #[serde(default = "default_gauss")]
    window: String,
    /// Signal spec.
    #[arg(long, default_value = "random:1")]
    #[serde(default = "default_signal")]
    signal: String,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct IdentitySuiteArgs {
    /// Grid side N (odd; the suite includes the Weyl-family identities).
    #[arg(long)]
    n: usize,
    /// Ensemble seed.
    #[arg(long, default_value_t = 1)]
    #[serde(default = "default_seed")]
    seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum GenKind {
    Signal,
    Operator,
    Weight,
    Mask,
}

#[derive(Args, Serialize, Deserialize, Clone)]
struct GenArgs {
    /// Grid side N.
    #[arg(long)]
    n: usize,
    /// What to generate.
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Spec in the grammar of the corresponding object.
    #[arg(long)]
    spec: String,
    /// Destination OWTF1 file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[arg(long, help = "JSON document holding {\"command\": ..., <params>}")]
    config: PathBuf,
}

/// The JSON mirror of the CLI surface, for `owtf run --config`.
#[derive(Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
enum ConfigCommand {
    Stft(StftArgs),
    Opstft(OpstftArgs),
    Modnorm(ModnormArgs),
    Equivalence(EquivalenceArgs),
    Cohen(CohenArgs),
    Weyl(WeylArgs),
    Spreading(SpreadingArgs),
    Locop(LocopArgs),
    SmoothSpec(SmoothSpecArgs),
    IdentitySuite(IdentitySuiteArgs),
    Gen(GenArgs),
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            let (name, code) = classify(&err);
            let record = serde_json::json!({
                "error": name,
                "code": code,
                "message": err.to_string(),
            });
            eprintln!("{record}");
            code
        }
    };
    std::process::exit(code);
}

fn classify(err: &Error) -> (&'static str, i32) {
    match err {
        Error::InvalidGrid(_)
        | Error::BadSpec { .. }
        | Error::InvalidExponent(_)
        | Error::NonPositiveWeight
        | Error::AsymmetricWeight(_) => ("invalid-config", 2),
        Error::GridMismatch(..) | Error::DimensionMismatch(_) => ("dimension-mismatch", 3),
        Error::DegenerateWindow | Error::EmptyWindows | Error::WindowCapacity { .. } => {
            ("degenerate-window", 4)
        }
        Error::EvenGrid(_) => ("even-grid", 5),
        Error::Io(_) => ("io", 6),
        Error::BadFormat(_) => ("bad-format", 7),
        Error::NotHermitian(_) | Error::NotPositive(..) => ("not-positive", 8),
    }
}

fn dispatch(command: Command) -> owtf_core::Result<i32> {
    match command {
        Command::Stft(args) => cmd_stft(args),
        Command::Opstft(args) => cmd_opstft(args),
        Command::Modnorm(args) => cmd_modnorm(args),
        Command::Equivalence(args) => cmd_equivalence(args),
        Command::Cohen(args) => cmd_cohen(args),
        Command::Weyl(args) => cmd_weyl(args),
        Command::Spreading(args) => cmd_spreading(args),
        Command::Locop(args) => cmd_locop(args),
        Command::SmoothSpec(args) => cmd_smooth_spec(args),
        Command::IdentitySuite(args) => cmd_identity_suite(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Run(args) => cmd_run(args),
    }
}

fn cmd_run(args: RunArgs) -> owtf_core::Result<i32> {
    let text = std::fs::read_to_string(&args.config)?;
    let config: ConfigCommand = serde_json::from_str(&text).map_err(|e| Error::BadSpec {
        spec: args.config.display().to_string(),
        reason: e.to_string(),
    })?;
    match config {
        ConfigCommand::Stft(args) => cmd_stft(args),
        ConfigCommand::Opstft(args) => cmd_opstft(args),
        ConfigCommand::Modnorm(args) => cmd_modnorm(args),
        ConfigCommand::Equivalence(args) => cmd_equivalence(args),
        ConfigCommand::Cohen(args) => cmd_cohen(args),
        ConfigCommand::Weyl(args) => cmd_weyl(args),
        ConfigCommand::Spreading(args) => cmd_spreading(args),
        ConfigCommand::Locop(args) => cmd_locop(args),
        ConfigCommand::SmoothSpec(args) => cmd_smooth_spec(args),
        ConfigCommand::IdentitySuite(args) => cmd_identity_suite(args),
        ConfigCommand::Gen(args) => cmd_gen(args),
    }
}

/// Canonical form of the parameters for the config hash: output destination
/// and rendering format do not change what is computed, so they are not part
/// of the experiment's identity.
fn hash_of<T: Serialize>(args: &T) -> String {
    let mut value = serde_json::to_value(args).expect("args serialize");
    if let Some(object) = value.as_object_mut() {
        object.remove("format");
        object.remove("out");
        object.remove("op_out");
    }
    serde_json::to_string(&value).expect("canonical form serializes")
}

fn complex_columns(value: Complex64) -> Vec<f64> {
    vec![value.re, value.im, value.norm()]
}

fn grid_rows(grid: PhaseGrid, mut f: impl FnMut(PhasePoint) -> Vec<f64>) -> Vec<GridRow> {
    grid.points()
        .map(|z| GridRow {
            time: z.time,
            freq: z.freq,
            values: f(z),
        })
        .collect()
}

fn render_grid(
    report: &GridReport,
    format: Format,
    out: Option<&PathBuf>,
) -> owtf_core::Result<()> {
    let content = match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    emit(out, &content)
}

fn render_table(
    report: &TableReport,
    format: Format,
    out: Option<&PathBuf>,
) -> owtf_core::Result<()> {
    let content = match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json(),
    };
    emit(out, &content)
}

fn cmd_stft(args: StftArgs) -> owtf_core::Result<i32> {
    let grid = PhaseGrid::new(args.n)?;
    let signal = specs::parse_signal(&args.signal, grid)?;
    let window = specs::parse_signal(&args.window, grid)?;
    let coeffs = owtf_core::stft(&signal, &window)?;
    let meta = Meta::new("stft", &hash_of(&args), args.n, None);
    let rows = grid_rows(grid, |z| complex_columns(coeffs.at(z)));
    let report = GridReport::new(meta, &["re", "im", "abs"], rows, Vec::new());
    render_grid(&report, args.output.format, args.output.out.as_ref())?;
    Ok(0)
}

fn cmd_opstft(args: OpstftArgs) -> owtf_core::Result<i32> {
    let grid = PhaseGrid::new(args.n)?;
    let op = specs::parse_operator(&args.op, grid)?;
    let signal = specs::parse_signal(&args.signal, grid)?;
    let norms = op_stft(&op, &signal)?.norm_field();
    let meta = Meta::new("opstft", &hash_of(&args), args.n, None);
    let rows = grid_rows(grid, |z| vec![norms.at(z).re]);
    let report = GridReport::new(meta, &["norm"], rows, Vec::new());
    render_grid(&report, args.output.format, args.output.out.as_ref())?;
    Ok(0)
}

fn cmd_modnorm(args: ModnormArgs) -> owtf_core::Result<i32> {
    let grid = PhaseGrid::new(args.n)?;
    let signal = specs::parse_signal(&args.signal, grid)?;
    let params = MixedNormParams::new(
        specs::parse_exponent(&args.p)?,
        specs::parse_exponent(&args.q)?,
        specs::parse_weight(&args.weight, grid, WeightKind::ModerateCandidate)?,
    );
    let value = owtf_core::mod_norm(&signal, &params)?;
    let meta = Meta::new("modnorm", &hash_of(&args), args.n, None);
    let rows = vec![
        ValueRow::info("mod-norm", value),
        ValueRow::info("l2-norm", signal.norm()),
    ];
    let report = TableReport::new(meta, rows);
    render_table(&report, args.output.format, args.output.out.as_ref())?;
    Ok(0)
}

/// Equivalence document: report metadata plus the sampled sandwich.
#[derive(Serialize)]
struct EquivalenceDocument {
    #[serde(flatten)]
    meta: Meta,
    report: owtf_core::EquivalenceReport,
}

fn cmd_equivalence(args: EquivalenceArgs) -> owtf_core::Result<i32> {
    let grid = PhaseGrid::new(args.n)?;
    let op = specs::parse_operator(&args.op, grid)?;
    let v = specs::parse_weight(&args.weight, grid, WeightKind::SubmultiplicativeCandidate)?;
    let m = match &args.mod_weight {
        Some(spec) => specs::parse_weight(spec, grid, WeightKind::ModerateCandidate)?,
        None => v.clone(),
    };
    let params = MixedNormParams::new(
        specs::parse_exponent(&args.p)?,
        specs::parse_exponent(&args.q)?,
        m,
    );
    let report = equivalence_report_with_tol(&op, &params, &v, args.seed, args.samples, args.tol)?;
    let verdict = report.verdict;
    let meta = Meta::new("equivalence", &hash_of(&args), args.n, Some(args.seed));
    let content = match args.output.format {
        Format::Csv => {
            let mut out = String::new();
            meta.csv_comments_into(&mut out);
            out.push_str(&report.to_csv());
            out
        }
        Format::Json => {
            let document = EquivalenceDocument { meta, report };
            let mut text = serde_json::to_string_pretty(&document).expect("serializes");
            text.push('\n');
            text
        }
    };
    emit(args.output.out.as_ref(), &content)?;
    Ok(if verdict { 0 } else { 1 })
}

fn cmd_cohen(args: CohenArgs) -> owtf_core::Result<i32> {
    let grid = PhaseGrid::new(args.n)?;
    let op = specs::parse_operator(&args.op, grid)?;
    let signal = specs::parse_signal(&args.signal, grid)?;
    let q = owtf_core::cohen(&op, &signal)?;
    let meta = Meta::new("cohen", &hash_of(&args), args.n, None);
    let checks = vec![ValueRow::info("max-imag", q.max_imag_abs())];
    let rows = grid_rows(grid, |z| complex_columns(q.at(z)));
    let report = GridReport::new(meta, &["re", "im", "abs"], rows, checks);
    render_grid(&report, args.output.format, args.output.out.as_ref())?;
    Ok(0)
}

fn cmd_weyl(args: WeylArgs) -> owtf_core::Result<i32> {
    let grid = PhaseGrid::new(args.n)?;
    grid.require_odd()?;
    match (&args.op, &args.symbol_file) {
        (Some(op_spec), None) => {
            let op = specs::parse_operator(op_spec, grid)?;
            let symbol = weyl_symbol(&op)?;
            let round = weyl_quantize(&symbol);
            let residual = round.max_abs_diff(&op)? / op.hs_norm().max(f64::MIN_POSITIVE);
            let meta = Meta::new("weyl", &hash_of(&args), args.n, None);
            let checks = vec![ValueRow::check("quantize-round-trip", residual, 1e-9)];
            let field = symbol.field();
            let rows = grid_rows(grid, |z| complex_columns(field.at(z)));
            let report = GridReport::new(meta, &["re", "im", "abs"], rows, checks);
            let passed = report.passed();
            render_grid(&report, args.output.format, args.output.out.as_ref())?;
            Ok(if passed { 0 } else { 1 })
        }
        (None, Some(path)) => {
            let field = owtf_io::load_field(path)?;
            field.grid().require_same(grid)?;
            let op = weyl_quantize(&WeylSymbol::new(field)?);
            let op_out = args.op_out.clone().ok_or_else(|| Error::BadSpec {
                spec: "--symbol-file".into(),
                reason: "writing the quantized operator needs --op-out".into(),
            })?;
            owtf_io::save_operator(&op_out, &op)?;
            let meta = Meta::new("weyl", &hash_of(&args), args.n, None);
            let rows = vec![
                ValueRow::info("hs-norm", op.hs_norm()),
                ValueRow::info("trace-re", op.trace().re),
                ValueRow::info("trace-im", op.trace().im),
            ];
            let report = TableReport::new(meta, rows);
            render_table(&report, args.output.format, args.output.out.as_ref())?;
            Ok(0)
        }
        _ => Err(Error::BadSpec {
            spec: "weyl".into(),
            reason: "give exactly one of --op or --symbol-file".into(),
        }),
    }
}

fn cmd_spreading(args: SpreadingArgs) -> owtf_core::Result<i32> {
    let grid = PhaseGrid::new(args.n)?;
    let op = specs::parse_operator(&args.op, grid)?;
    let f = spreading(&op)?;
    let cross = symplectic_ft(weyl_symbol(&op)?.field());
    let residual = f.max_abs_diff(&cross)? / f.max_abs().max(f64::MIN_POSITIVE);
    let meta = Meta::new("spreading", &hash_of(&args), args.n, None);
    let checks = vec![ValueRow::check("matches-symbol-transform", residual, 1e-9)];
    let rows = grid_rows(grid, |z| complex_columns(f.at(z)));
    let report = GridReport::new(meta, &["re", "im", "abs"], rows, checks);
    let passed = report.passed();
    render_grid(&report, args.output.format, args.output.out.as_ref())?;
    Ok(if passed { 0 } else { 1 })
}

fn cmd_locop(args: LocopArgs) -> owtf_core::Result<i32> {
    let grid = PhaseGrid::new(args.n)?;
    let mask = specs::parse_mask(&args.mask, grid)?;
    let analysis = specs::parse_signal(&args.window1, grid)?;
    let synthesis = specs::parse_signal(&args.window2, grid)?;
    let op = owtf_core::localization(&mask, &analysis, &synthesis)?;

    let rank_one = OperatorMatrix::rank_one(&synthesis, &analysis)?;
    let via_conv = op_conv(&mask, &rank_one)?;
    let residual = op.max_abs_diff(&via_conv)? / op.hs_norm().max(f64::MIN_POSITIVE);

    let mut rows = vec![
        ValueRow::check("matches-operator-convolution", residual, 1e-10),
        ValueRow::info("hs-norm", op.hs_norm()),
        ValueRow::info("trace-re", op.trace().re),
        ValueRow::info("trace-im", op.trace().im),
        ValueRow::info("hermitian-deviation", op.hermitian_deviation()),
        ValueRow::info(
            "mask-nonnegative",
            if mask.is_nonnegative() { 1.0 } else { 0.0 },
        ),
    ];
    // With a nonnegative mask and equal windows the operator should be PSD;
    // report the verified minimum eigenvalue rather than assuming it.
    if mask.is_nonnegative()
        && op.hermitian_deviation() <= 1e-10 * op.hs_norm().max(f64::MIN_POSITIVE)
    {
        let eigen = op.hermitian_eigen();
        if let Some(min) = eigen.values.last() {
            rows.push(ValueRow::info("min-eigenvalue", *min));
        }
    }
    // The convolution bound mask-mass * ||analysis||_{M1} * ||synthesis||
    // dominates the true nuclear norm of the adjoint; the SVD value below is
    // only an upper bound for that norm, so the two are reported side by
    // side without asserting an order between them.
    let ones = owtf_core::WeightGrid::ones(grid);
    rows.push(ValueRow::info(
        "nuclear-bound-svd",
        owtf_core::nuclear_bound(&op, &ones)?,
    ));
    let mask_mass: f64 = mask.field().values().iter().map(|v| v.norm()).sum();
    rows.push(ValueRow::info(
        "nuclear-bound-convolution",
        mask_mass * owtf_core::m1v_norm(&analysis, &ones)? * synthesis.norm(),
    ));
    if let Some(path) = &args.op_out {
        owtf_io::save_operator(path, &op)?;
    }
    let meta = Meta::new("locop", &hash_of(&args), args.n, None);
    let report = TableReport::new(meta, rows);
    let passed = report.passed;
    render_table(&report, args.output.format, args.output.out.as_ref())?;
    Ok(if passed { 0 } else { 1 })
}

fn cmd_smooth_spec(args: SmoothSpecArgs) -> owtf_core::Result<i32> {
    let grid = PhaseGrid::new(args.n)?;
    let mask = specs::parse_mask(&args.mask, grid)?;
    let window = specs::parse_signal(&args.window, grid)?;
    let signal = specs::parse_signal(&args.signal, grid)?;
    let smoothed = owtf_core::smoothed_spectrogram(&mask, &window, &signal)?;

    let localized = owtf_core::localization(&mask, &window, &window)?;
    let q = owtf_core::cohen(&localized, &signal)?;
    let residual = smoothed.max_abs_diff(&q)? / q.max_abs().max(f64::MIN_POSITIVE);

    let mass = smoothed.sum().re;
    let expect =
        mask.field().sum().re * grid.side() as f64 * signal.norm().powi(2) * window.norm().powi(2);
    let mass_residual = (mass - expect).abs() / expect.abs().max(f64::MIN_POSITIVE);

    let meta = Meta::new("smooth-spec", &hash_of(&args), args.n, None);
    let checks = vec![
        ValueRow::check("matches-cohen-distribution", residual, 1e-9),
        ValueRow::check("mass-identity", mass_residual, 1e-9),
    ];
    let rows = grid_rows(grid, |z| vec![smoothed.at(z).re]);
    let report = GridReport::new(meta, &["value"], rows, checks);
    let passed = report.passed();
    render_grid(&report, args.output.format, args.output.out.as_ref())?;
    Ok(if passed { 0 } else { 1 })
}

fn cmd_identity_suite(args: IdentitySuiteArgs) -> owtf_core::Result<i32> {
    let rows = suite::run_suite(args.n, args.seed)?;
    let meta = Meta::new("identity-suite", &hash_of(&args), args.n, Some(args.seed));
    let report = TableReport::new(meta, rows);
    let passed = report.passed;
    render_table(&report, args.output.format, args.output.out.as_ref())?;
    Ok(if passed { 0 } else { 1 })
}

fn cmd_gen(args: GenArgs) -> owtf_core::Result<i32> {
    let grid = PhaseGrid::new(args.n)?;
    match args.kind {
        GenKind::Signal => {
            owtf_io::save_signal(&args.out, &specs::parse_signal(&args.spec, grid)?)?
        }
        GenKind::Operator => {
            owtf_io::save_operator(&args.out, &specs::parse_operator(&args.spec, grid)?)?
        }
        GenKind::Weight => owtf_io::save_weight(
            &args.out,
            &specs::parse_weight(&args.spec, grid, WeightKind::ModerateCandidate)?,
        )?,
        GenKind::Mask => {
            owtf_io::save_field(&args.out, specs::parse_mask(&args.spec, grid)?.field())?
        }
    }
    let record = serde_json::json!({
        "written": args.out.display().to_string(),
        "kind": format!("{:?}", args.kind).to_lowercase(),
        "n": args.n,
        "spec": args.spec,
    });
    println!("{record}");
    Ok(0)
}
