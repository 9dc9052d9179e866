//! Command-line driver: numerical range boundaries, joint range and shadow
//! sampling, Kraus channel operations, verification suites, and the built-in
//! figure datasets.
//!
//! Exit codes: 0 success / verification passed, 1 verification violation or
//! I/O failure, 2 input parse error, 3 dimension error, 4 hypothesis
//! violation (e.g. a non-unital channel handed to the inclusion verifier).

mod svg;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use jnrange::channels::{verify_inclusion, BuiltinChannel, KrausChannel};
use jnrange::jnr::{factorize, jnr_sample, verify_affine_injectivity, HermitianTuple};
use jnrange::linalg::ComplexMatrix;
use jnrange::numrange::boundary;
use jnrange::rng::SeededRng;
use jnrange::shadow::{
    ball_shadow_check, estimate_shadow, histogram, moments, unitary_invariance_check,
};
use jnrange::states::{pure_state_from_json, pure_state_to_json, random_unitary};

#[derive(Parser)]
#[command(
    name = "jnrange",
    version,
    about = "Numerical ranges, joint numerical ranges, quantum maps, and joint numerical shadows"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Boundary of the numerical range of a complex matrix
    Range(RangeArgs),
    /// Sample a joint numerical range and report its factorization
    Jnr(JnrArgs),
    /// Sample a joint numerical shadow (points, histogram, or moments)
    Shadow(ShadowArgs),
    /// Apply or inspect Kraus channels
    Channel {
        #[command(subcommand)]
        action: ChannelCmd,
    },
    /// Run a verification suite; exits 0 on pass, 1 on violation
    Verify {
        #[command(subcommand)]
        suite: VerifyCmd,
    },
    /// Regenerate a built-in figure dataset (CSV per iterate plus SVG)
    Demo(DemoArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(clap::Args)]
struct RangeArgs {
    /// Matrix JSON file ({"rows":N,"cols":N,"re":[[..]],"im":[[..]]})
    matrix: PathBuf,
    #[arg(long, default_value_t = 1024)]
    angles: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(clap::Args)]
struct JnrArgs {
    /// Built-in tuple: pauli, gellmann, or pauli_extended
    #[arg(long, conflicts_with = "matrices")]
    tuple: Option<String>,
    /// Hermitian matrix JSON files forming the tuple
    #[arg(long, value_delimiter = ',')]
    matrices: Vec<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the projection-factorization report instead of sampling
    #[arg(long)]
    factorize: bool,
}

#[derive(clap::Args)]
struct ShadowArgs {
    #[arg(long, conflicts_with = "matrices")]
    tuple: Option<String>,
    #[arg(long, value_delimiter = ',')]
    matrices: Vec<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 128)]
    bins: usize,
    /// Emit a moment table up to this total degree instead of raw samples
    #[arg(long)]
    degree: Option<u32>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv: sample points; json: histogram over --bins cells
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Subcommand)]
enum ChannelCmd {
    /// Apply a channel to a matrix; prints the image matrix JSON
    Apply {
        /// Builtin spec (decaying:0.5, phase_flip:0.25, double_flip:0.5,0.4,
        /// swap_conjugation) or a channel JSON file
        #[arg(long)]
        channel: String,
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the unital / trace-preserving predicates
    Analyze {
        #[arg(long)]
        channel: String,
    },
    /// Decompose the image of a pure state into weighted pure states
    Decompose {
        #[arg(long)]
        channel: String,
        /// Pure-state JSON file ({"kind":"state",...})
        #[arg(long)]
        state: PathBuf,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Range inclusion under a unital channel (support dominance)
    Inclusion {
        #[arg(long)]
        channel: String,
        /// Complex matrix file; verified through its Hermitian pair
        #[arg(long, conflicts_with_all = ["tuple", "matrices"])]
        matrix: Option<PathBuf>,
        #[arg(long, conflicts_with = "matrices")]
        tuple: Option<String>,
        #[arg(long, value_delimiter = ',')]
        matrices: Vec<PathBuf>,
        #[arg(long, default_value_t = 64)]
        directions: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Injectivity of the range map on rays for a full-rank tuple
    Injectivity {
        #[arg(long)]
        tuple: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Moment-level invariance of the shadow under unitary conjugation
    Invariance {
        #[arg(long)]
        tuple: String,
        /// Unitary matrix JSON; defaults to a Haar unitary drawn from --seed
        #[arg(long)]
        unitary: Option<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 3)]
        degree: u32,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Uniform-ball law of the extended Pauli shadow, both tuple variants
    Ball {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DemoName {
    Fig1a,
    Fig1b,
    Fig2,
}

#[derive(clap::Args)]
struct DemoArgs {
    name: DemoName,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, default_value_t = 360)]
    angles: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

enum CliError {
    Lib(jnrange::Error),
    Io(std::io::Error),
}

impl From<jnrange::Error> for CliError {
    fn from(e: jnrange::Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
        }
    }
}

fn exit_code(err: &CliError) -> i32 {
    use jnrange::Error::*;
    match err {
        CliError::Io(_) => 1,
        CliError::Lib(e) => match e {
            Parse(_)
            | InvalidParameter(_)
            | NotNormalized { .. }
            | NotHermitian { .. }
            | InvalidBasis(_)
            | NotDensity(_)
            | ZeroVector
            | AllTermsVanish
            | NotUnitary { .. }
            | NoConvergence { .. }
            | TrivialSpan => 2,
            DimensionMismatch(_) | TooManyAxes(_) => 3,
            NotUnital { .. } | RankDeficient { .. } => 4,
        },
    }
}

fn main() {
    let cli = Cli::parse();
    let workers = std::env::var("JNRANGE_WORKERS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&w| w >= 1)
        .unwrap_or(1);
    match run(cli.command, workers) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}

fn read_matrix(path: &Path) -> Result<ComplexMatrix, CliError> {
    let text = fs::read_to_string(path)?;
    Ok(ComplexMatrix::from_json_str(&text)?)
}

fn resolve_channel(spec: &str) -> Result<KrausChannel, CliError> {
    if let Ok(builtin) = BuiltinChannel::parse(spec) {
        return Ok(builtin.build()?);
    }
    let path = Path::new(spec);
    if path.exists() {
        let text = fs::read_to_string(path)?;
        return Ok(KrausChannel::from_json_str(&text)?);
    }
    Err(jnrange::Error::Parse(format!(
        "'{spec}' is neither a builtin channel spec nor an existing file"
    ))
    .into())
}

fn resolve_tuple(name: Option<&str>, files: &[PathBuf]) -> Result<HermitianTuple, CliError> {
    match (name, files.is_empty()) {
        (Some(n), _) => match n {
            "pauli" => Ok(HermitianTuple::pauli()),
            "gellmann" => Ok(HermitianTuple::gellmann()),
            "pauli_extended" => Ok(HermitianTuple::pauli_extended()),
            other => Err(jnrange::Error::Parse(format!(
                "unknown tuple '{other}' (expected pauli, gellmann, or pauli_extended)"
            ))
            .into()),
        },
        (None, false) => {
            let ops: Result<Vec<ComplexMatrix>, CliError> =
                files.iter().map(|p| read_matrix(p)).collect();
            Ok(HermitianTuple::new(ops?)?)
        }
        (None, true) => Err(jnrange::Error::Parse(
            "a tuple is required: pass --tuple NAME or --matrices FILES".into(),
        )
        .into()),
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content)?,
        None => std::io::stdout().write_all(content.as_bytes())?,
    }
    Ok(())
}

fn write_meta(out: Option<&Path>, meta: serde_json::Value) -> Result<(), CliError> {
    if let Some(path) = out {
        let meta_path = path.with_extension("meta.json");
        fs::write(meta_path, serde_json::to_string_pretty(&meta).unwrap())?;
    }
    Ok(())
}

fn run(command: Command, workers: usize) -> Result<i32, CliError> {
    match command {
        Command::Range(args) => cmd_range(args),
        Command::Jnr(args) => cmd_jnr(args, workers),
        Command::Shadow(args) => cmd_shadow(args, workers),
        Command::Channel { action } => cmd_channel(action),
        Command::Verify { suite } => cmd_verify(suite, workers),
        Command::Demo(args) => cmd_demo(args, workers),
    }
}

fn cmd_range(args: RangeArgs) -> Result<i32, CliError> {
    let matrix = read_matrix(&args.matrix)?;
    let b = boundary(&matrix, args.angles)?;
    match args.format {
        Format::Csv => {
            let mut buf = Vec::new();
            b.write_csv(&mut buf)?;
            write_output(args.out.as_deref(), &String::from_utf8(buf).unwrap())?;
        }
        Format::Json => {
            let doc = json!({
                "angles": b.angles(),
                "support": b.support_values(),
                "re": b.boundary_points().iter().map(|z| z.re).collect::<Vec<_>>(),
                "im": b.boundary_points().iter().map(|z| z.im).collect::<Vec<_>>(),
            });
            write_output(args.out.as_deref(), &serde_json::to_string(&doc).unwrap())?;
        }
        Format::Svg => {
            let bary = matrix.trace() / matrix.rows() as f64;
            let curve = svg::Curve {
                label: "boundary".into(),
                points: b.boundary_points().iter().map(|z| (z.re, z.im)).collect(),
            };
            let doc = svg::figure_svg("numerical range", &[curve], &[(bary.re, bary.im)]);
            write_output(args.out.as_deref(), &doc)?;
        }
    }
    Ok(0)
}

fn cmd_jnr(args: JnrArgs, workers: usize) -> Result<i32, CliError> {
    let tuple = resolve_tuple(args.tuple.as_deref(), &args.matrices)?;
    if args.factorize {
        let fact = factorize(&tuple)?;
        let doc = json!({
            "rank": fact.rank(),
            "condition_number": fact.condition_number(),
            "trace_offsets": fact.trace_offsets(),
        });
        println!("{}", serde_json::to_string_pretty(&doc).unwrap());
        return Ok(0);
    }
    let points = jnr_sample(&tuple, args.samples, args.seed, workers)?;
    let mut buf = Vec::new();
    jnrange::jnr::write_points_csv(&points, &mut buf)?;
    write_output(args.out.as_deref(), &String::from_utf8(buf).unwrap())?;
    write_meta(
        args.out.as_deref(),
        json!({"command": "jnr", "seed": args.seed, "samples": args.samples, "workers": workers}),
    )?;
    Ok(0)
}

fn cmd_shadow(args: ShadowArgs, workers: usize) -> Result<i32, CliError> {
    let tuple = resolve_tuple(args.tuple.as_deref(), &args.matrices)?;
    let est = estimate_shadow(&tuple, args.samples, args.seed, workers)?;
    let content = if let Some(degree) = args.degree {
        let table = moments(&est, degree);
        let mut buf = Vec::new();
        table.write_csv(&mut buf)?;
        String::from_utf8(buf).unwrap()
    } else {
        match args.format {
            Format::Json => histogram(&est, args.bins, None)?.to_json_string(),
            _ => {
                let mut buf = Vec::new();
                est.write_csv(&mut buf)?;
                String::from_utf8(buf).unwrap()
            }
        }
    };
    write_output(args.out.as_deref(), &content)?;
    write_meta(
        args.out.as_deref(),
        json!({"command": "shadow", "seed": args.seed, "samples": args.samples, "workers": workers}),
    )?;
    Ok(0)
}

fn cmd_channel(action: ChannelCmd) -> Result<i32, CliError> {
    match action {
        ChannelCmd::Apply {
            channel,
            matrix,
            out,
        } => {
            let ch = resolve_channel(&channel)?;
            let m = read_matrix(&matrix)?;
            let image = ch.apply(&m)?;
            write_output(out.as_deref(), &image.to_json_string())?;
            Ok(0)
        }
        ChannelCmd::Analyze { channel } => {
            let report = resolve_channel(&channel)?.analyze();
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(0)
        }
        ChannelCmd::Decompose { channel, state } => {
            let ch = resolve_channel(&channel)?;
            let psi = pure_state_from_json(&fs::read_to_string(&state)?)?;
            let dec = ch.decompose_pure(&psi)?;
            let states: Vec<serde_json::Value> = dec
                .states
                .iter()
                .map(|s| serde_json::from_str(&pure_state_to_json(s)).unwrap())
                .collect();
            let doc = json!({"weights": dec.weights, "states": states});
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(0)
        }
    }
}

fn cmd_verify(suite: VerifyCmd, workers: usize) -> Result<i32, CliError> {
    match suite {
        VerifyCmd::Inclusion {
            channel,
            matrix,
            tuple,
            matrices,
            directions,
            samples,
            seed,
        } => {
            let ch = resolve_channel(&channel)?;
            let target = match &matrix {
                Some(path) => {
                    let m = read_matrix(path)?;
                    let (h, k) = m.hermitian_parts()?;
                    HermitianTuple::new(vec![h, k])?
                }
                None => resolve_tuple(tuple.as_deref(), &matrices)?,
            };
            let report = verify_inclusion(&ch, &target, directions, samples, seed)?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(if report.passed() { 0 } else { 1 })
        }
        VerifyCmd::Injectivity {
            tuple,
            trials,
            seed,
        } => {
            let t = resolve_tuple(Some(&tuple), &[])?;
            let report = verify_affine_injectivity(&t, trials, seed)?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(if report.passed() { 0 } else { 1 })
        }
        VerifyCmd::Invariance {
            tuple,
            unitary,
            samples,
            degree,
            seed,
        } => {
            let t = resolve_tuple(Some(&tuple), &[])?;
            let u = match &unitary {
                Some(path) => read_matrix(path)?,
                None => random_unitary(t.dim(), &mut SeededRng::new(seed)),
            };
            let report = unitary_invariance_check(
                &t,
                &u,
                samples,
                degree,
                (seed, seed.wrapping_add(1)),
                workers,
            )?;
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
            Ok(if report.pass { 0 } else { 1 })
        }
        VerifyCmd::Ball { samples, seed } => {
            let plain = ball_shadow_check(samples, seed, false, workers)?;
            let swapped = ball_shadow_check(samples, seed.wrapping_add(1), true, workers)?;
            let pass = plain.pass && swapped.pass;
            let doc = json!({"plain": plain, "swap_conjugated": swapped});
            println!("{}", serde_json::to_string_pretty(&doc).unwrap());
            Ok(if pass { 0 } else { 1 })
        }
    }
}

fn cmd_demo(args: DemoArgs, workers: usize) -> Result<i32, CliError> {
    fs::create_dir_all(&args.out)?;
    let c = jnrange::linalg::Complex64::new;
    let (name, channel, seed_matrix) = match args.name {
        DemoName::Fig1a => (
            "fig1a",
            KrausChannel::decaying(0.5)?,
            ComplexMatrix::from_real(&[vec![0.0, 1.0], vec![0.0, 0.0]])?,
        ),
        DemoName::Fig1b => (
            "fig1b",
            KrausChannel::phase_flip(0.25)?,
            ComplexMatrix::from_real(&[vec![0.0, 1.0], vec![0.0, 0.0]])?,
        ),
        DemoName::Fig2 => (
            "fig2",
            KrausChannel::double_flip(0.5, 0.4)?,
            ComplexMatrix::from_rows(&[
                vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
                vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 2.0)],
            ])?,
        ),
    };

    let iterates = 3usize;
    let mut curves = Vec::new();
    let mut stars = Vec::new();
    let mut matrix = seed_matrix;
    for j in 1..=iterates {
        let b = boundary(&matrix, args.angles)?;
        let mut buf = Vec::new();
        b.write_csv(&mut buf)?;
        fs::write(args.out.join(format!("{name}_j{j}.csv")), buf)?;

        let bary = matrix.trace() / matrix.rows() as f64;
        stars.push((bary.re, bary.im));
        curves.push(svg::Curve {
            label: format!("iterate {j}"),
            points: b.boundary_points().iter().map(|z| (z.re, z.im)).collect(),
        });
        matrix = channel.apply(&matrix)?;
    }
    fs::write(
        args.out.join(format!("{name}.svg")),
        svg::figure_svg(name, &curves, &stars),
    )?;
    let meta = json!({
        "command": format!("demo {name}"),
        "seed": args.seed,
        "angles": args.angles,
        "workers": workers,
        "iterates": iterates,
    });
    fs::write(
        args.out.join(format!("{name}.meta.json")),
        serde_json::to_string_pretty(&meta).unwrap(),
    )?;
    Ok(0)
}
