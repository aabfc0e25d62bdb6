//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 on argument or input parse errors, 3 when the
//! requested register exceeds the qubit cap, 1 for anything else. Every
//! output file is written atomically.

pub mod io;
pub mod synth;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::circuit::build_qpipe;
use crate::complexity::{emit_scaling_table, scaling_table_csv};
use crate::error::{Error, Result};
use crate::phasemap::{map_phases, Axis, Image, MappingMode, PhaseMapping, ShiftFill};
use crate::qed::{mae, run_qed, GradientEncoding, QedConfig};
use crate::readout::{decode_table, DecodeSpec, Interpretation, ThresholdPolicy};
use crate::statevector::{marginal_distribution, RegisterLayout, DEFAULT_QUBIT_CAP};

use self::io::{read_image, to_csv, to_pgm, write_atomic};
use self::synth::{generate, Generator};

#[derive(Debug, Parser)]
#[command(name = "qpipe", version, about = "Phase-kickback image encoding and quantum edge detection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Maximum number of simulated qubits.
    #[arg(long, global = true, env = "QPIPE_QUBIT_CAP", default_value_t = DEFAULT_QUBIT_CAP)]
    pub qubit_cap: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode an image, simulate the circuit and decode every pixel.
    Encode(EncodeArgs),
    /// Quantum edge detection against the classical finite-difference baseline.
    Qed(QedArgs),
    /// Gate-count and depth scaling table for k×k images.
    Complexity(ComplexityArgs),
    /// MAE of a directional gradient across readout thresholds.
    ThresholdSweep(SweepArgs),
    /// Write a seeded synthetic image.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    Half,
    Signed,
}

impl From<ModeArg> for MappingMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Full => MappingMode::FullTurn,
            ModeArg::Half => MappingMode::HalfTurn,
            ModeArg::Signed => MappingMode::SignedCentered,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FillArg {
    Zero,
    Wrap,
}

impl From<FillArg> for ShiftFill {
    fn from(f: FillArg) -> Self {
        match f {
            FillArg::Zero => ShiftFill::Zero,
            FillArg::Wrap => ShiftFill::Wrap,
        }
    }
}

/// `fixed:<p>`, `dynamic` or `dynamic:eta=<v>,w=<v>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdArg(pub ThresholdPolicy);

impl FromStr for ThresholdArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(p) = s.strip_prefix("fixed:") {
            let p: f64 = p.parse().map_err(|_| format!("bad fixed threshold `{p}`"))?;
            return Ok(Self(ThresholdPolicy::fixed(p)));
        }
        let Some(rest) = s.strip_prefix("dynamic") else {
            return Err(format!("expected fixed:<p> or dynamic[:eta=<v>,w=<v>], got `{s}`"));
        };
        let ThresholdPolicy::Dynamic { mut eta, mut width } = ThresholdPolicy::dynamic() else {
            unreachable!()
        };
        if let Some(params) = rest.strip_prefix(':') {
            for kv in params.split(',') {
                let (k, v) = kv
                    .split_once('=')
                    .ok_or_else(|| format!("expected key=value, got `{kv}`"))?;
                let v: f64 = v.parse().map_err(|_| format!("bad number `{v}`"))?;
                match k.trim() {
                    "eta" => eta = v,
                    "w" => width = v,
                    other => return Err(format!("unknown dynamic parameter `{other}`")),
                }
            }
        } else if !rest.is_empty() {
            return Err(format!("unexpected `{rest}` after dynamic"));
        }
        let policy = ThresholdPolicy::Dynamic { eta, width };
        policy.resolve(1).map_err(|e| e.to_string())?;
        Ok(Self(policy))
    }
}

#[derive(Debug, Clone, Args)]
pub struct EncodingArgs {
    /// Number of estimation qubits.
    #[arg(long = "qubits-estimation", short = 'q', default_value_t = 8)]
    pub q: usize,

    /// Intensity to phase mapping [default: full for encode, half otherwise].
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,

    /// Readout threshold: fixed:<p>, dynamic, or dynamic:eta=<v>,w=<v>.
    #[arg(long, default_value = "dynamic")]
    pub threshold: ThresholdArg,

    /// Intensity normalization range [default: 2^bits for PGM input, else max+1].
    #[arg(long)]
    pub range: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct EncodeArgs {
    /// Input image (.pgm or .csv).
    pub input: PathBuf,

    /// Readout CSV [default: standard output].
    #[arg(long, short)]
    pub output: Option<PathBuf>,

    /// Also write the gate list to this file.
    #[arg(long)]
    pub dump_circuit: Option<PathBuf>,

    #[command(flatten)]
    pub encoding: EncodingArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Horizontal,
    Vertical,
    Sobel,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Pgm,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct QedArgs {
    /// Input image (.pgm or .csv).
    pub input: PathBuf,

    /// Directory for report.json and gradient images [default: report to standard output].
    #[arg(long)]
    pub output_dir: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "all")]
    pub direction: DirectionArg,

    #[arg(long, value_enum, default_value = "zero")]
    pub fill: FillArg,

    /// Gradient image format; json writes only the report.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: FormatArg,

    /// Count annihilated pixels as zero readings instead of excluding them.
    #[arg(long)]
    pub mae_include_annihilated_as_zero: bool,

    #[command(flatten)]
    pub encoding: EncodingArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ComplexityArgs {
    #[arg(long = "qubits-estimation", short = 'q', default_value_t = 8)]
    pub q: u64,

    #[arg(long, default_value_t = 2)]
    pub k_min: u64,

    #[arg(long, default_value_t = 256)]
    pub k_max: u64,

    /// CSV output [default: standard output].
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Input image (.pgm or .csv).
    pub input: PathBuf,

    /// CSV output [default: standard output].
    #[arg(long, short)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "horizontal")]
    pub axis: AxisArg,

    #[arg(long, value_enum, default_value = "zero")]
    pub fill: FillArg,

    /// Fixed thresholds to sweep; a dynamic row is always appended.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6"
    )]
    pub thresholds: Vec<f64>,

    #[command(flatten)]
    pub encoding: EncodingArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Horizontal,
    Vertical,
}

impl From<AxisArg> for Axis {
    fn from(a: AxisArg) -> Self {
        match a {
            AxisArg::Horizontal => Axis::Horizontal,
            AxisArg::Vertical => Axis::Vertical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Ramp,
    Step,
    PhantomSpeckle,
    Uniform,
    Levels,
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,

    #[arg(long, default_value_t = 8)]
    pub width: usize,

    #[arg(long, default_value_t = 8)]
    pub height: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Exclusive upper bound of generated intensities.
    #[arg(long, default_value_t = 256.0)]
    pub range: f64,

    /// Speckle strength for phantom-speckle.
    #[arg(long, default_value_t = 0.2)]
    pub sigma: f64,

    /// Bright level of the step generator.
    #[arg(long, default_value_t = 200.0)]
    pub high: f64,

    /// Band width in columns for the step generator.
    #[arg(long, default_value_t = 2)]
    pub period: usize,

    /// Highest level for the levels generator.
    #[arg(long, default_value_t = 16)]
    pub max_level: u32,

    /// Output file; .pgm writes ASCII PGM, anything else CSV.
    #[arg(long, short)]
    pub output: PathBuf,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(stdout) => {
            print!("{stdout}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::QubitCap { .. } => 3,
        Error::Parse(_) => 2,
        _ => 1,
    }
}

/// Runs a parsed command; returns whatever should go to standard output.
pub fn execute(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Encode(a) => cmd_encode(a, cli.qubit_cap),
        Command::Qed(a) => cmd_qed(a, cli.qubit_cap),
        Command::Complexity(a) => cmd_complexity(a),
        Command::ThresholdSweep(a) => cmd_threshold_sweep(a, cli.qubit_cap),
        Command::Gen(a) => cmd_gen(a),
    }
}

fn emit(path: Option<&Path>, contents: String) -> Result<String> {
    match path {
        Some(p) => {
            write_atomic(p, &contents)?;
            Ok(String::new())
        }
        None => Ok(contents),
    }
}

fn mapping_for(image: &Image, args: &EncodingArgs, default: MappingMode) -> Result<PhaseMapping> {
    let mode = args.mode.map(MappingMode::from).unwrap_or(default);
    PhaseMapping::new(mode, args.range.unwrap_or_else(|| image.default_intensity_range()))
}

fn check_cap(q: usize, n: usize, cap: usize) -> Result<RegisterLayout> {
    let layout = RegisterLayout::new(q, n)?;
    if layout.num_qubits() > cap {
        return Err(Error::QubitCap {
            requested: layout.num_qubits(),
            cap,
        });
    }
    Ok(layout)
}

pub fn cmd_encode(args: &EncodeArgs, qubit_cap: usize) -> Result<String> {
    let image = read_image(&args.input)?;
    let mapping = mapping_for(&image, &args.encoding, MappingMode::FullTurn)?;
    let phases = map_phases(&image, mapping)?;
    let layout = check_cap(args.encoding.q, phases.n(), qubit_cap)?;
    let circuit = build_qpipe(&layout, std::slice::from_ref(&phases))?;
    let state = circuit.simulate(qubit_cap)?;
    let marginals = marginal_distribution(&state, &layout)?;
    let interpretation = match mapping.mode {
        MappingMode::FullTurn => Interpretation::Unsigned,
        MappingMode::HalfTurn | MappingMode::SignedCentered => Interpretation::Signed,
    };
    let table = decode_table(
        &marginals,
        &args.encoding.threshold.0,
        &DecodeSpec::new(mapping, interpretation),
        image.len(),
    )?;
    if let Some(path) = &args.dump_circuit {
        write_atomic(path, &circuit.to_text())?;
    }
    emit(args.output.as_deref(), table.to_csv(image.width()))
}

pub fn cmd_qed(args: &QedArgs, qubit_cap: usize) -> Result<String> {
    let image = read_image(&args.input)?;
    let mapping = mapping_for(&image, &args.encoding, MappingMode::HalfTurn)?;
    let config = QedConfig {
        q: args.encoding.q,
        policy: args.encoding.threshold.0,
        mode: mapping.mode,
        intensity_range: Some(mapping.intensity_range),
        fill: args.fill.into(),
        qubit_cap,
        include_annihilated_as_zero: args.mae_include_annihilated_as_zero,
    };
    let (axes, sobel) = match args.direction {
        DirectionArg::Horizontal => (vec![Axis::Horizontal], false),
        DirectionArg::Vertical => (vec![Axis::Vertical], false),
        DirectionArg::Sobel | DirectionArg::All => (vec![Axis::Horizontal, Axis::Vertical], true),
    };
    check_cap(config.q, crate::phasemap::position_qubits_for(image.len()), qubit_cap)?;
    let run = run_qed(&image, &config, &axes, sobel)?;
    let json = run.to_json();

    let Some(dir) = &args.output_dir else {
        return Ok(json + "\n");
    };
    let mut files = vec![(dir.join("report.json"), json + "\n")];
    for r in &run.results {
        let label = serde_json::to_value(r.direction)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        let field = &r.quantum;
        match args.format {
            FormatArg::Csv => files.push((
                dir.join(format!("gradient_{label}.csv")),
                to_csv(field.width, &field.values),
            )),
            FormatArg::Pgm => {
                let magnitudes: Vec<f64> = field.values.iter().map(|v| v.abs()).collect();
                let top = magnitudes.iter().copied().fold(255.0, f64::max).ceil() as u32;
                files.push((
                    dir.join(format!("gradient_{label}.pgm")),
                    to_pgm(field.width, field.height, &magnitudes, top),
                ));
            }
            FormatArg::Json => {}
        }
    }
    for (path, contents) in files {
        write_atomic(&path, &contents)?;
    }
    Ok(String::new())
}

pub fn cmd_complexity(args: &ComplexityArgs) -> Result<String> {
    if args.k_min < 2 || args.k_max < args.k_min {
        return Err(Error::Parse(format!(
            "invalid side range {}..={}",
            args.k_min, args.k_max
        )));
    }
    let rows = emit_scaling_table(args.q, args.k_min..=args.k_max);
    emit(args.output.as_deref(), scaling_table_csv(&rows))
}

pub const SWEEP_CSV_HEADER: &str = "policy,threshold,mae,annihilated";

pub fn cmd_threshold_sweep(args: &SweepArgs, qubit_cap: usize) -> Result<String> {
    let image = read_image(&args.input)?;
    let mapping = mapping_for(&image, &args.encoding, MappingMode::HalfTurn)?;
    let config = QedConfig {
        q: args.encoding.q,
        policy: args.encoding.threshold.0,
        mode: mapping.mode,
        intensity_range: Some(mapping.intensity_range),
        fill: args.fill.into(),
        qubit_cap,
        include_annihilated_as_zero: true,
    };
    let axis: Axis = args.axis.into();
    check_cap(config.q, crate::phasemap::position_qubits_for(image.len()), qubit_cap)?;
    let rows = threshold_sweep(&image, axis, &config, &args.thresholds)?;
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},{:e},{},{}",
            row.label, row.threshold, row.mae, row.annihilated
        );
    }
    emit(args.output.as_deref(), out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub label: &'static str,
    pub threshold: f64,
    pub mae: f64,
    pub annihilated: usize,
}

/// Simulates once, then decodes with each fixed threshold and finally with
/// the default dynamic policy. MAE counts annihilated pixels as zero readings.
pub fn threshold_sweep(
    image: &Image,
    axis: Axis,
    config: &QedConfig,
    thresholds: &[f64],
) -> Result<Vec<SweepRow>> {
    let encoding = GradientEncoding::simulate(image, axis, config)?;
    let classical = crate::qed::classical_gradient(image, axis, config.fill);
    let n = encoding.marginals.layout().n();
    let policies = thresholds
        .iter()
        .map(|&p| ("fixed", ThresholdPolicy::fixed(p)))
        .chain(std::iter::once(("dynamic", ThresholdPolicy::dynamic())));
    policies
        .map(|(label, policy)| {
            let decoded = encoding.decode(&policy)?;
            Ok(SweepRow {
                label,
                threshold: policy.resolve(n)?,
                mae: mae(&classical, &decoded.field, &decoded.annihilated, true)?,
                annihilated: decoded.annihilated_count(),
            })
        })
        .collect()
}

pub fn cmd_gen(args: &GenArgs) -> Result<String> {
    if args.width == 0 || args.height == 0 {
        return Err(Error::Parse("width and height must be positive".into()));
    }
    if !(args.range.is_finite() && args.range > 0.0) {
        return Err(Error::Parse(format!("invalid range {}", args.range)));
    }
    let generator = match args.kind {
        GenKind::Ramp => Generator::Ramp,
        GenKind::Step => Generator::Step {
            high: args.high,
            period: args.period,
        },
        GenKind::PhantomSpeckle => Generator::PhantomSpeckle { sigma: args.sigma },
        GenKind::Uniform => Generator::Uniform,
        GenKind::Levels => Generator::Levels {
            max_level: args.max_level,
        },
    };
    let image = generate(generator, args.width, args.height, args.range, args.seed)?;
    let is_pgm = args
        .output
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let contents = if is_pgm {
        let maxval = match generator {
            Generator::Levels { max_level } => max_level,
            _ => (args.range.ceil() as u32).saturating_sub(1).max(1),
        };
        to_pgm(image.width(), image.height(), image.pixels(), maxval)
    } else {
        to_csv(image.width(), image.pixels())
    };
    write_atomic(&args.output, &contents)?;
    Ok(String::new())
}
