use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use riesz_cex::bump::FamilyParams;
use riesz_cex::decomp::{cz_decompose, lift, majorant, CZDecomposition};
use riesz_cex::harness::{
    check_counterexample, fmt_g, parse_sweep, render_svg, run_counterexample, run_interpolation_check,
    run_path_validation, run_weak11, selftest, to_csv, CexConfig, CheckResult, CorpusSpec, InterpConfig,
    ValidationConfig,
};
use riesz_cex::io::{read_field, write_field, FieldData};
use riesz_cex::norms::{lp_norm, mixed_norm, Exponent, MixedNormSpec};
use riesz_cex::{Axis, Error};

#[derive(Parser)]
#[command(name = "riesz-cex", version, about = "Counterexample and Calderón–Zygmund toolkit for the double Riesz transform")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Counterexample growth table and path cross-validation.
    Cex {
        #[command(subcommand)]
        command: CexCommand,
    },
    /// Interpolation-machinery checks on a random corpus.
    Interp {
        #[command(subcommand)]
        command: InterpCommand,
    },
    /// Empirical weak-(1,1) constants of R12 on a random corpus.
    Weak11(Weak11Args),
    /// Quick versions of every invariant check.
    Selftest,
    /// Mixed Lebesgue norm of a field file.
    Norms(NormsArgs),
    /// Calderón–Zygmund decomposition of a field file.
    Czd(CzdArgs),
}

#[derive(Subcommand)]
enum CexCommand {
    Run(CexRunArgs),
    Validate(ValidateArgs),
}

#[derive(Subcommand)]
enum InterpCommand {
    Check(InterpArgs),
}

#[derive(Args)]
struct CexRunArgs {
    /// JSON file with any of j0, nmax, A, window_points, cover_points_per_unit, x_points, y_points.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    j0: Option<u32>,
    #[arg(long)]
    nmax: Option<u32>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    window_points: Option<usize>,
    /// CSV output path; the table goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, default_value_t = 3)]
    jmin: u32,
    #[arg(long, default_value_t = 7)]
    jmax: u32,
    #[arg(long, default_value_t = 4096)]
    nx: usize,
    #[arg(long, default_value_t = 1024)]
    ny: usize,
    #[arg(long, default_value_t = 0.02)]
    tol: f64,
    #[arg(long, default_value_t = 4.0)]
    a: f64,
}

#[derive(Args)]
struct InterpArgs {
    #[arg(long, default_value_t = 1.0)]
    p0: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 3.0)]
    p1: f64,
    #[arg(long, default_value_t = 20)]
    corpus: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Samples per axis of each corpus field.
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Truncation levels per field.
    #[arg(long, default_value_t = 16)]
    levels: usize,
}

#[derive(Args)]
struct Weak11Args {
    #[arg(long, default_value_t = 20)]
    corpus: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 256)]
    n: usize,
    /// Level sweep `lo:hi:log|lin:count`.
    #[arg(long, default_value = "0.001:10:log:40")]
    alphas: String,
}

#[derive(Args)]
struct NormsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "y")]
    inner_axis: String,
    #[arg(long, default_value = "inf")]
    inner: String,
    #[arg(long, default_value = "2")]
    outer: String,
}

#[derive(Args)]
struct CzdArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    alpha: f64,
    /// Decomposition JSON; for 2-D input the lifts are written next to it
    /// as `<stem>.good.json` and `<stem>.bad.json`.
    #[arg(long)]
    out: PathBuf,
}

/// Why a command did not succeed.
enum Failure {
    Check,
    Config(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Config(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.into())
    }
}

type Outcome = Result<(), Failure>;

fn report(checks: &[CheckResult]) -> Outcome {
    for c in checks {
        println!("{c}");
    }
    if checks.iter().all(|c| c.passed) {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn cex_run(args: CexRunArgs) -> Outcome {
    let mut cfg = match &args.config {
        Some(path) => serde_json::from_str::<CexConfig>(&fs::read_to_string(path)?).map_err(Error::from)?,
        None => CexConfig::default(),
    };
    let FamilyParams { j0, nmax, a } = cfg.family;
    cfg.family = FamilyParams {
        j0: args.j0.unwrap_or(j0),
        nmax: args.nmax.unwrap_or(nmax),
        a: args.a.unwrap_or(a),
    };
    if let Some(w) = args.window_points {
        cfg.window_points = w;
    }
    let run = run_counterexample(&cfg)?;
    let csv = to_csv(&run.rows);
    match &args.out {
        Some(path) => fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = &args.svg {
        fs::write(path, render_svg(&run.rows))?;
    }
    // keep stdout a clean CSV when it carries the table
    let checks = check_counterexample(&run);
    if args.out.is_some() {
        report(&checks)
    } else {
        for c in &checks {
            eprintln!("{c}");
        }
        if checks.iter().all(|c| c.passed) { Ok(()) } else { Err(Failure::Check) }
    }
}

fn cex_validate(args: ValidateArgs) -> Outcome {
    let cfg = ValidationConfig {
        jmin: args.jmin,
        jmax: args.jmax,
        nx: args.nx,
        ny: args.ny,
        tol: args.tol,
        a: args.a,
        ..Default::default()
    };
    let rows = run_path_validation(&cfg)?;
    let checks: Vec<CheckResult> = rows
        .iter()
        .map(|r| {
            CheckResult::new(
                format!("j={}", r.j),
                r.passed,
                format!("rel L2 err {} over {} points (tol {})", fmt_g(r.rel_err, 6), r.points, fmt_g(args.tol, 6)),
            )
        })
        .collect();
    report(&checks)
}

fn interp_check(args: InterpArgs) -> Outcome {
    let cfg = InterpConfig {
        corpus: CorpusSpec {
            fields: args.corpus,
            n: args.n,
            seed: args.seed,
        },
        p0: args.p0,
        p: args.p,
        p1: args.p1,
        levels: args.levels,
    };
    report(&run_interpolation_check(&cfg)?.checks())
}

fn weak11(args: Weak11Args) -> Outcome {
    let alphas = parse_sweep(&args.alphas)?;
    let spec = CorpusSpec {
        fields: args.corpus,
        n: args.n,
        seed: args.seed,
    };
    let rows = run_weak11(spec, &alphas)?;
    println!("field,f_norm,D_emp");
    for r in &rows {
        println!("{},{},{}", r.field, fmt_g(r.f_norm, 12), fmt_g(r.d_emp, 12));
    }
    let worst = rows.iter().map(|r| r.d_emp).fold(0.0, f64::max);
    eprintln!("max D_emp over {} fields: {}", rows.len(), fmt_g(worst, 12));
    Ok(())
}

fn norms(args: NormsArgs) -> Outcome {
    let inner: Exponent = args.inner.parse()?;
    let value = match read_field(&args.input)? {
        FieldData::One(f) => lp_norm(&f, inner)?,
        FieldData::Two(f) => {
            let spec = MixedNormSpec::new(args.inner_axis.parse::<Axis>()?, inner, args.outer.parse()?)?;
            mixed_norm(&f, &spec)?
        }
        _ => return Err(Error::Format("norms expects a spatial field, not a spectrum".into()).into()),
    };
    println!("{}", fmt_g(value, 12));
    Ok(())
}

#[derive(Serialize)]
struct IntervalOut {
    a: f64,
    b: f64,
    average: f64,
}

#[derive(Serialize)]
struct DecompositionOut<'a> {
    alpha: f64,
    root: [f64; 2],
    total_length: f64,
    intervals: Vec<IntervalOut>,
    #[serde(skip_serializing_if = "Option::is_none")]
    good: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bad: Option<&'a str>,
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("czd");
    out.with_file_name(format!("{stem}.{suffix}.json"))
}

fn czd(args: CzdArgs) -> Outcome {
    let (dec, field): (CZDecomposition, _) = match read_field(&args.input)? {
        FieldData::One(h) => {
            let h = h.map(|v| v.norm().into())?;
            (cz_decompose(&h, args.alpha)?, None)
        }
        FieldData::Two(f) => (cz_decompose(&majorant(&f), args.alpha)?, Some(f)),
        _ => return Err(Error::Format("czd expects a spatial field, not a spectrum".into()).into()),
    };
    let (good_path, bad_path) = (sibling(&args.out, "good"), sibling(&args.out, "bad"));
    if let Some(f) = &field {
        let l = lift(f, &dec)?;
        write_field(&good_path, &FieldData::Two(l.f1))?;
        write_field(&bad_path, &FieldData::Two(l.f2))?;
    }
    let names = field.as_ref().map(|_| {
        (
            good_path.file_name().and_then(|s| s.to_str()).unwrap_or_default(),
            bad_path.file_name().and_then(|s| s.to_str()).unwrap_or_default(),
        )
    });
    let out = DecompositionOut {
        alpha: dec.alpha,
        root: [dec.root.a(), dec.root.b()],
        total_length: dec.total_length(),
        intervals: dec
            .intervals
            .iter()
            .zip(&dec.averages)
            .map(|(q, &average)| IntervalOut {
                a: q.a(),
                b: q.b(),
                average,
            })
            .collect(),
        good: names.map(|n| n.0),
        bad: names.map(|n| n.1),
    };
    let mut text = serde_json::to_string_pretty(&out).map_err(Error::from)?;
    text.push('\n');
    fs::write(&args.out, text)?;
    println!("{} intervals, total length {}", dec.intervals.len(), fmt_g(dec.total_length(), 12));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Cex { command } => match command {
            CexCommand::Run(a) => cex_run(a),
            CexCommand::Validate(a) => cex_validate(a),
        },
        Command::Interp {
            command: InterpCommand::Check(a),
        } => interp_check(a),
        Command::Weak11(a) => weak11(a),
        Command::Selftest => report(&selftest()),
        Command::Norms(a) => norms(a),
        Command::Czd(a) => czd(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Config(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
