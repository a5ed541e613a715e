//! `shembed`: single decisions, parameter sweeps and oracle verification
//! campaigns from the command line.

pub mod config;
pub mod error;
pub mod report;
pub mod sweep;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use shearlet_embed::verdict::{exists_alpha, max_smoothness_k};
use shearlet_embed::{decide, Answer, ExtReal, GroupSpec, ParamTuple, Rational, WeightSpec};

use config::Config;
use error::{CliError, Result};
use report::DecideReport;

/// Exit status for usage, configuration and runtime errors.
pub const EXIT_ERROR: i32 = 3;

/// Environment variable holding the worker count.
pub const WORKERS_ENV: &str = "SHEMBED_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "shembed", version, about = "Sobolev embeddings of shearlet coorbit spaces")]
pub struct Cli {
    /// Worker threads for sweeps and verification (default: SHEMBED_WORKERS, else all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide one embedding; exit 0 embeds, 1 does not embed, 2 undecided gap.
    Decide(DecideArgs),
    /// Decide every tuple of a cartesian lattice.
    Sweep(SweepArgs),
    /// Compare analytic membership with the numerical oracle.
    Verify(VerifyArgs),
    /// A weight exponent alpha giving an embedding for r = p <= q <= 2.
    ExistsAlpha(ExistsAlphaArgs),
    /// Largest smoothness k with an embedding into W^{k,p}, p <= 2.
    MaxK(MaxKArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Standard,
    Toeplitz,
}

#[derive(Args, Debug)]
struct GroupArgs {
    #[arg(long, value_enum)]
    group: Family,
    #[arg(long, allow_hyphen_values = true)]
    lambda1: Option<Rational>,
    #[arg(long, allow_hyphen_values = true)]
    lambda2: Option<Rational>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<Rational>,
}

impl GroupArgs {
    fn spec(&self) -> Result<GroupSpec> {
        let usage = |m: &str| CliError::Usage(m.to_string());
        match self.group {
            Family::Standard => {
                if self.delta.is_some() {
                    return Err(usage("--delta applies to Toeplitz groups only"));
                }
                match (self.lambda1, self.lambda2) {
                    (Some(l1), Some(l2)) => Ok(GroupSpec::standard(l1, l2)),
                    _ => Err(usage("standard groups need --lambda1 and --lambda2")),
                }
            }
            Family::Toeplitz => {
                if self.lambda1.is_some() || self.lambda2.is_some() {
                    return Err(usage("--lambda1/--lambda2 apply to standard groups only"));
                }
                self.delta
                    .map(GroupSpec::toeplitz)
                    .ok_or_else(|| usage("Toeplitz groups need --delta"))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TextOrJson {
    Text,
    Json,
}

#[derive(Args, Debug)]
struct DecideArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long)]
    p: ExtReal,
    #[arg(long)]
    q: ExtReal,
    #[arg(long)]
    r: ExtReal,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Rational,
    #[arg(long, allow_hyphen_values = true)]
    beta: Rational,
    #[arg(long, allow_negative_numbers = true)]
    k: i64,
    #[arg(long, value_enum, default_value = "text")]
    format: TextOrJson,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Config file (`key = value`, lists as `[a, b]`, ranges as `lo..hi:step`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    group: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long)]
    p: Option<String>,
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<String>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Refuse sweeps with more tuples than this.
    #[arg(long)]
    max_rows: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Minimal slack of every analytic condition on the grid (default 1/4).
    #[arg(long)]
    margin: Option<String>,
    /// Truncation levels `[N:E, ...]`, meaning |n| <= N and |m_i| <= 2^E.
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    convergence_ratio: Option<String>,
    #[arg(long)]
    divergence_factor: Option<String>,
    /// With --a, --b and --theta: verify a single query instead of the grid.
    #[arg(long)]
    group: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    lambda2: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    a: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    #[arg(long)]
    theta: Option<String>,
    /// text or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug)]
struct ExistsAlphaArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long)]
    p: ExtReal,
    #[arg(long)]
    q: ExtReal,
    #[arg(long, allow_hyphen_values = true)]
    beta: Rational,
    #[arg(long)]
    k: u32,
    #[arg(long, value_enum, default_value = "text")]
    format: TextOrJson,
}

#[derive(Args, Debug)]
struct MaxKArgs {
    #[command(flatten)]
    group: GroupArgs,
    #[arg(long)]
    p: ExtReal,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Rational,
    #[arg(long, allow_hyphen_values = true)]
    beta: Rational,
    #[arg(long, value_enum, default_value = "text")]
    format: TextOrJson,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct ExistsAlphaReport {
    pub group: GroupSpec,
    pub p: ExtReal,
    pub q: ExtReal,
    pub beta: Rational,
    pub k: u32,
    pub alpha: Option<Rational>,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MaxKReport {
    pub group: GroupSpec,
    pub p: ExtReal,
    pub alpha: Rational,
    pub beta: Rational,
    pub k: Option<u32>,
}

/// Exit status for a verdict.
pub fn exit_code(answer: Answer) -> i32 {
    match answer {
        Answer::Embeds => 0,
        Answer::DoesNotEmbed => 1,
        Answer::IndeterminateGap => 2,
    }
}

fn load_config(path: Option<&PathBuf>, overrides: &[(&str, &Option<String>)]) -> Result<Config> {
    let mut config = match path {
        Some(p) => Config::parse(&std::fs::read_to_string(p)?)?,
        None => Config::default(),
    };
    for (key, value) in overrides {
        if let Some(v) = value {
            config.set(key, v)?;
        }
    }
    Ok(config)
}

fn emit(text: &str, output: Option<&PathBuf>, out: &mut (dyn Write + Send)) -> Result<()> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_decide(args: &DecideArgs, out: &mut (dyn Write + Send)) -> Result<i32> {
    let group = args.group.spec()?;
    let k = u32::try_from(args.k)
        .map_err(|_| CliError::Usage(format!("k must be a nonnegative integer, got {}", args.k)))?;
    let weight = WeightSpec::new(args.alpha, args.beta)?;
    let params = ParamTuple::new(args.p, args.q, args.r, weight, k);
    let verdict = decide(&group, &params)?;
    let code = exit_code(verdict.answer);
    let report = DecideReport { group, params, verdict };
    let text = match args.format {
        TextOrJson::Text => report::decide_text(&report),
        TextOrJson::Json => report::to_json(&report)?,
    };
    out.write_all(text.as_bytes())?;
    Ok(code)
}

fn cmd_sweep(args: &SweepArgs, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<i32> {
    let config = load_config(
        args.config.as_ref(),
        &[
            ("group", &args.group),
            ("lambda1", &args.lambda1),
            ("lambda2", &args.lambda2),
            ("delta", &args.delta),
            ("p", &args.p),
            ("q", &args.q),
            ("r", &args.r),
            ("alpha", &args.alpha),
            ("beta", &args.beta),
            ("k", &args.k),
            ("format", &args.format),
            ("max_rows", &args.max_rows),
        ],
    )?;
    let format = config.scalar::<String>("format")?.unwrap_or_else(|| "csv".into());
    if format != "csv" && format != "json" {
        return Err(CliError::Usage(format!(
            "sweep format must be csv or json, got `{format}`"
        )));
    }
    let cfg = sweep::SweepConfig::from_config(&config)?;
    writeln!(err, "sweep: {} tuples", cfg.size())?;
    let tuples = cfg.tuples()?;
    let rows = sweep::run(&tuples)?;
    let text = if format == "csv" {
        sweep::to_csv(&rows)?
    } else {
        report::to_json(&sweep::SweepReport {
            tuples: rows.len(),
            rows,
        })?
    };
    emit(&text, args.output.as_ref(), out)?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs, out: &mut (dyn Write + Send)) -> Result<i32> {
    let config = load_config(
        args.config.as_ref(),
        &[
            ("margin", &args.margin),
            ("schedule", &args.schedule),
            ("convergence_ratio", &args.convergence_ratio),
            ("divergence_factor", &args.divergence_factor),
            ("group", &args.group),
            ("lambda1", &args.lambda1),
            ("lambda2", &args.lambda2),
            ("delta", &args.delta),
            ("a", &args.a),
            ("b", &args.b),
            ("theta", &args.theta),
            ("format", &args.format),
        ],
    )?;
    let format = config.scalar::<String>("format")?.unwrap_or_else(|| "text".into());
    if format != "text" && format != "json" {
        return Err(CliError::Usage(format!(
            "verify format must be text or json, got `{format}`"
        )));
    }
    let cfg = verify::VerifyConfig::from_config(&config)?;
    let report = verify::run(&cfg)?;
    let text = if format == "text" {
        verify::text(&report)
    } else {
        report::to_json(&report)?
    };
    emit(&text, args.output.as_ref(), out)?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_exists_alpha(args: &ExistsAlphaArgs, out: &mut (dyn Write + Send)) -> Result<i32> {
    let group = args.group.spec()?;
    let alpha = exists_alpha(&group, args.p, args.q, args.beta, args.k)?;
    let report = ExistsAlphaReport {
        group,
        p: args.p,
        q: args.q,
        beta: args.beta,
        k: args.k,
        alpha,
    };
    match args.format {
        TextOrJson::Text => match alpha {
            Some(a) => writeln!(out, "alpha = {a}")?,
            None => writeln!(out, "no alpha")?,
        },
        TextOrJson::Json => out.write_all(report::to_json(&report)?.as_bytes())?,
    }
    Ok(0)
}

fn cmd_max_k(args: &MaxKArgs, out: &mut (dyn Write + Send)) -> Result<i32> {
    let group = args.group.spec()?;
    let k = max_smoothness_k(&group, args.p, args.alpha, args.beta)?;
    let report = MaxKReport {
        group,
        p: args.p,
        alpha: args.alpha,
        beta: args.beta,
        k,
    };
    match args.format {
        TextOrJson::Text => match k {
            Some(k) => writeln!(out, "k = {k}")?,
            None => writeln!(out, "no embedding for any k")?,
        },
        TextOrJson::Json => out.write_all(report::to_json(&report)?.as_bytes())?,
    }
    Ok(0)
}

fn workers(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{WORKERS_ENV} must be a nonnegative integer, got `{v}`"))),
        Err(_) => Ok(0),
    }
}

fn dispatch(cli: &Cli, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> Result<i32> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers(cli.workers)?)
        .build()
        .map_err(|e| CliError::Usage(format!("worker pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Decide(a) => cmd_decide(a, out),
        Command::Sweep(a) => cmd_sweep(a, out, err),
        Command::Verify(a) => cmd_verify(a, out),
        Command::ExistsAlpha(a) => cmd_exists_alpha(a, out),
        Command::MaxK(a) => cmd_max_k(a, out),
    })
}

/// Parse `args` (including the program name) and run; returns the exit status.
pub fn run<I, T>(args: I, out: &mut (dyn Write + Send), err: &mut (dyn Write + Send)) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let sink: &mut (dyn Write + Send) = if help { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return if help { 0 } else { EXIT_ERROR };
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_ERROR
        }
    }
}
