use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use tempcorr::channel::ChannelKind;
use tempcorr::lgi::AngleSet;
use tempcorr::measurement::BsmType;
use tempcorr::optimize::K4Search;
use tempcorr::parallel::Execution;
use tempcorr::reference::REFERENCE_K1;
use tempcorr::sweep::{
    format_real, k4_sweep_with, linear_grid, s4_sweep_with, write_csv_to, LgiSweep, SweepRecord,
    TsiSweep,
};
use tempcorr::tsi::PUBLISHED_BASES;
use tempcorr::verify::{run_all, VerifyOptions};

const USAGE_EXIT: u8 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "tempcorr",
    version,
    about = "Leggett-Garg and temporal-steering sweeps under memory noise"
)]
struct Cli {
    /// Evaluate grid points and restarts on one thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// K4 over a (p, mu) grid for one channel and measurement type.
    LgiSweep(LgiArgs),
    /// S4 over a (p, mu) grid for one channel.
    TsiSweep(TsiArgs),
    /// Search measurement angles (and k1) that maximize K4.
    Optimize(OptimizeArgs),
    /// Regression against the published curves plus the property suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct GridArgs {
    /// Memory coefficients, comma separated.
    #[arg(long, value_delimiter = ',')]
    mu: Option<Vec<f64>>,
    /// Number of p points.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    p_start: Option<f64>,
    #[arg(long)]
    p_stop: Option<f64>,
}

impl GridArgs {
    fn or(self, file: GridArgs) -> GridArgs {
        GridArgs {
            mu: self.mu.or(file.mu),
            grid: self.grid.or(file.grid),
            p_start: self.p_start.or(file.p_start),
            p_stop: self.p_stop.or(file.p_stop),
        }
    }

    fn resolve(&self) -> Result<(Vec<f64>, Vec<f64>), CliError> {
        let p = linear_grid(
            self.p_start.unwrap_or(0.0),
            self.p_stop.unwrap_or(1.0),
            self.grid.unwrap_or(11),
        )
        .map_err(usage)?;
        let mu = self.mu.clone().unwrap_or_else(|| vec![0.0, 0.5, 1.0]);
        if mu.is_empty() {
            return Err(CliError::Usage("--mu needs at least one value".into()));
        }
        Ok((p, mu))
    }
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct LgiArgs {
    /// JSON file with any of these options; flags take precedence.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// ad, pd or depol.
    #[arg(long)]
    channel: Option<ChannelKind>,
    /// I, II or III.
    #[arg(long = "type")]
    #[serde(rename = "type")]
    bsm_type: Option<BsmType>,
    /// theta1..theta4,phi1..phi4 in radians; published optimum when absent.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    angles: Option<Vec<f64>>,
    #[arg(long)]
    k1: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct TsiArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    channel: Option<ChannelKind>,
    /// Alice's two bases, e.g. 1,2.
    #[arg(long, value_delimiter = ',')]
    bases: Option<Vec<usize>>,
    #[arg(long)]
    k1: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct OptimizeArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[arg(long)]
    channel: Option<ChannelKind>,
    #[arg(long = "type")]
    #[serde(rename = "type")]
    bsm_type: Option<BsmType>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Hold k1 at this value instead of optimizing it.
    #[arg(long)]
    freeze_k1: Option<f64>,
    /// Write the result as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
struct VerifyArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    grid: GridArgs,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    restarts: Option<usize>,
    /// Random channel samples in the property suite.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failure(e)
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn load_config<T: for<'de> Deserialize<'de> + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| usage(format!("bad config {}: {e}", path.display())))
}

fn emit(records: &[SweepRecord], out: &OutputArgs) -> Result<(), CliError> {
    let format = out.format.unwrap_or_default();
    let write = |w: &mut dyn Write| -> io::Result<()> {
        match format {
            Format::Csv => write_csv_to(records, &mut *w).map(|_| ()),
            Format::Json => {
                serde_json::to_writer_pretty(&mut *w, records)?;
                writeln!(w)
            }
        }
    };
    match &out.output {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write(&mut w)
                .and_then(|_| w.flush())
                .with_context(|| format!("cannot write {}", path.display()))?;
            eprintln!("wrote {} records to {}", records.len(), path.display());
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock).context("writing to stdout")?;
        }
    }
    Ok(())
}

fn lgi_sweep(args: LgiArgs, exec: Execution) -> Result<ExitCode, CliError> {
    let file: LgiArgs = load_config(args.config.as_deref())?;
    let kind = args
        .channel
        .or(file.channel)
        .ok_or_else(|| usage("--channel is required"))?;
    let bsm_type = args
        .bsm_type
        .or(file.bsm_type)
        .ok_or_else(|| usage("--type is required"))?;
    let mut template = LgiSweep::published(kind, bsm_type);
    if let Some(a) = args.angles.or(file.angles) {
        template.angles = AngleSet::from_flat(&a).map_err(|e| usage(format!("--angles: {e}")))?;
    }
    template.k1 = args.k1.or(file.k1).unwrap_or(REFERENCE_K1);
    let (p, mu) = args.grid.or(file.grid).resolve()?;
    let records = k4_sweep_with(exec, &template, &p, &mu).map_err(usage)?;
    emit(
        &records,
        &OutputArgs {
            output: args.out.output.or(file.out.output),
            format: args.out.format.or(file.out.format),
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

fn tsi_sweep(args: TsiArgs, exec: Execution) -> Result<ExitCode, CliError> {
    let file: TsiArgs = load_config(args.config.as_deref())?;
    let kind = args
        .channel
        .or(file.channel)
        .ok_or_else(|| usage("--channel is required"))?;
    let mut template = TsiSweep::published(kind);
    if let Some(b) = args.bases.or(file.bases) {
        let [a, b] = b[..] else {
            return Err(usage("--bases takes exactly two indices"));
        };
        template.bases = (a, b);
    } else {
        template.bases = PUBLISHED_BASES;
    }
    template.k1 = args.k1.or(file.k1).unwrap_or(REFERENCE_K1);
    let (p, mu) = args.grid.or(file.grid).resolve()?;
    let records = s4_sweep_with(exec, &template, &p, &mu).map_err(usage)?;
    emit(
        &records,
        &OutputArgs {
            output: args.out.output.or(file.out.output),
            format: args.out.format.or(file.out.format),
        },
    )?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct OptimizeReport {
    channel: ChannelKind,
    bsm_type: BsmType,
    p: f64,
    mu: f64,
    seed: u64,
    restarts: usize,
    best_value: f64,
    theta: [f64; 4],
    phi: [f64; 4],
    k1: f64,
    k1_frozen: bool,
    restart_index: usize,
    evaluations: usize,
}

fn optimize(args: OptimizeArgs, exec: Execution) -> Result<ExitCode, CliError> {
    let file: OptimizeArgs = load_config(args.config.as_deref())?;
    let kind = args
        .channel
        .or(file.channel)
        .ok_or_else(|| usage("--channel is required"))?;
    let bsm_type = args
        .bsm_type
        .or(file.bsm_type)
        .ok_or_else(|| usage("--type is required"))?;
    let p = args.p.or(file.p).unwrap_or(0.0);
    let mu = args.mu.or(file.mu).unwrap_or(0.0);
    let restarts = args.restarts.or(file.restarts).unwrap_or(64);
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let mut search = K4Search::new(kind, p, mu, bsm_type, restarts, seed);
    search.frozen_k1 = args.freeze_k1.or(file.freeze_k1);
    let found = search.run_with(exec).map_err(usage)?;

    let report = OptimizeReport {
        channel: kind,
        bsm_type,
        p,
        mu,
        seed,
        restarts,
        best_value: found.result.best_value,
        theta: found.angles.theta,
        phi: found.angles.phi,
        k1: found.k1,
        k1_frozen: search.frozen_k1.is_some(),
        restart_index: found.result.restart_index,
        evaluations: found.result.evaluations,
    };
    let join = |v: &[f64]| {
        v.iter()
            .map(|x| format_real(*x))
            .collect::<Vec<_>>()
            .join(",")
    };
    println!("best K4   {}", format_real(report.best_value));
    println!("theta     {}", join(&report.theta));
    println!("phi       {}", join(&report.phi));
    println!(
        "k1        {}{}",
        format_real(report.k1),
        if report.k1_frozen { " (frozen)" } else { "" }
    );
    println!(
        "restart   {} of {}, {} evaluations",
        report.restart_index, restarts, report.evaluations
    );

    if let Some(path) = args.json.or(file.json) {
        write_json(&path, &report)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).context("serializing report")?;
    fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

fn verify(args: VerifyArgs, exec: Execution) -> Result<ExitCode, CliError> {
    let file: VerifyArgs = load_config(args.config.as_deref())?;
    let (p_grid, mu_list) = args.grid.or(file.grid).resolve()?;
    let defaults = VerifyOptions::default();
    let opts = VerifyOptions {
        p_grid,
        mu_list,
        seed: args.seed.or(file.seed).unwrap_or(defaults.seed),
        restarts: args.restarts.or(file.restarts).unwrap_or(defaults.restarts),
        channel_samples: args
            .samples
            .or(file.samples)
            .unwrap_or(defaults.channel_samples),
        exec,
    };
    if opts.restarts == 0 {
        return Err(usage("--restarts must be at least 1"));
    }
    let report = run_all(&opts).map_err(|e| anyhow!(e))?;

    println!(
        "{:<24} {:>12} {:>10}  worst (p, mu)  status",
        "curve", "max |dev|", "tolerance"
    );
    for r in &report.curves {
        println!(
            "{:<24} {:>12.3e} {:>10.1e}  ({}, {})  {}",
            r.key.to_string(),
            r.max_abs_deviation,
            r.tolerance,
            format_real(r.worst_point.0),
            format_real(r.worst_point.1),
            if r.passed() { "ok" } else { "FAIL" }
        );
    }
    println!();
    for c in &report.checks {
        println!("{c}");
    }
    if let Some(path) = args.json.or(file.json) {
        write_json(&path, &report)?;
    }

    let failures = report.failures();
    let curve_failures = report.curves.iter().filter(|r| !r.passed()).count();
    if report.passed() {
        println!(
            "\nall {} checks and {} curves pass",
            report.checks.len(),
            report.curves.len()
        );
        Ok(ExitCode::SUCCESS)
    } else {
        println!(
            "\n{} check(s) and {} curve(s) failed:",
            failures.len(),
            curve_failures
        );
        for f in failures {
            println!("  {f}");
        }
        Ok(ExitCode::FAILURE)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    let result = match cli.command {
        Command::LgiSweep(a) => lgi_sweep(a, exec),
        Command::TsiSweep(a) => tsi_sweep(a, exec),
        Command::Optimize(a) => optimize(a, exec),
        Command::Verify(a) => verify(a, exec),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}\n\nRun with --help for usage.");
            ExitCode::from(USAGE_EXIT)
        }
        Err(CliError::Failure(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
