//! `rectdim` command-line runner.

mod commands;
mod output;
mod params;
mod sweep;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::commands::Outcome;
use crate::output::{envelope, flatten, to_csv, to_json, Status};
use crate::params::{CliError, CliResult, Params};

#[derive(Debug, Parser)]
#[command(
    name = "rectdim",
    version,
    about = "Dimensions of limsup sets of shrinking rectangles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Flat key=value file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, env = "RECTDIM_THREADS", global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// s(t) for a product space and exponent profile.
    DimCore(DimCore),
    /// Weighted simultaneous approximation.
    DimSimultaneous(DimSimultaneous),
    /// Weighted linear forms.
    DimLinear(DimLinear),
    /// Shrinking targets on a product of Cantor sets.
    DimShrink(CantorTarget),
    /// Multiplicative approximation on two Cantor sets.
    DimMult(DimMult),
    /// Exponent orbit of approximating functions and its clusters.
    Orbit(Orbit),
    /// Critical exponent of the modelled level covers.
    CoverCritical(CoverCritical),
    /// Grid box counts on exactly built shrinking-target levels.
    OracleBoxcount(OracleBoxcount),
    /// Coverage of a ball by resonant neighbourhoods.
    VerifyUbiquity(VerifyUbiquity),
    /// Cantor-type mass tree and a Hölder test.
    VerifyMassdist(VerifyMassdist),
    /// Run one command over a grid of values of a parameter.
    Sweep(Sweep),
}

#[derive(Debug, Args, Serialize)]
struct DimCore {
    /// Per-direction δ, comma separated.
    #[arg(long)]
    deltas: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    t: Option<String>,
    /// default | strict-k1 | merge-equal-into-k2
    #[arg(long)]
    tie: Option<String>,
}

#[derive(Debug, Args, Serialize)]
struct DimSimultaneous {
    #[arg(long)]
    tau: Option<String>,
}

#[derive(Debug, Args, Serialize)]
struct DimLinear {
    #[arg(long)]
    n: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
}

#[derive(Debug, Args, Serialize)]
struct CantorTarget {
    /// Bases, comma separated.
    #[arg(long)]
    bases: Option<String>,
    /// Digit sets per axis separated by `;`, each `full` or a comma list.
    #[arg(long)]
    digits: Option<String>,
    #[arg(long)]
    t: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
struct DimMult {
    #[arg(long)]
    base_a: Option<String>,
    #[arg(long)]
    digits_a: Option<String>,
    #[arg(long)]
    base_b: Option<String>,
    #[arg(long)]
    digits_b: Option<String>,
    /// log a; use with --delta-a instead of a base and digits.
    #[arg(long)]
    log_a: Option<String>,
    #[arg(long)]
    delta_a: Option<String>,
    #[arg(long)]
    log_b: Option<String>,
    #[arg(long)]
    delta_b: Option<String>,
    #[arg(long)]
    t: Option<String>,
    /// Evaluate the single split (t − t2, t2) instead of the optimum.
    #[arg(long)]
    t2: Option<String>,
    #[arg(long)]
    t1: Option<String>,
    #[arg(long)]
    profile_points: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
struct Orbit {
    /// CSV file of `n,psi1,…,psid` rows.
    #[arg(long)]
    samples: Option<String>,
    /// Generated samples: phases `e1,…,ed` separated by `;`.
    #[arg(long)]
    psi_exponents: Option<String>,
    #[arg(long)]
    n_min: Option<String>,
    #[arg(long)]
    count: Option<String>,
    /// inverse | exp
    #[arg(long)]
    rho: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    deltas: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
}

#[derive(Debug, Args, Serialize)]
struct CoverCritical {
    #[arg(long)]
    deltas: Option<String>,
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    lo: Option<String>,
    #[arg(long)]
    hi: Option<String>,
    #[arg(long)]
    tol: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
struct OracleBoxcount {
    #[command(flatten)]
    #[serde(flatten)]
    target: CantorTarget,
    /// Anchor digit prefixes per axis separated by `;`.
    #[arg(long)]
    anchors: Option<String>,
    #[arg(long)]
    n_min: Option<String>,
    #[arg(long)]
    n_max: Option<String>,
    #[arg(long)]
    steps: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
struct VerifyUbiquity {
    /// simultaneous | linear | shrinking
    #[arg(long)]
    system: Option<String>,
    #[arg(long)]
    a: Option<String>,
    #[arg(long)]
    n: Option<String>,
    /// Level base M.
    #[arg(long)]
    m_base: Option<String>,
    #[arg(long)]
    constant: Option<String>,
    #[arg(long)]
    bases: Option<String>,
    #[arg(long)]
    digits: Option<String>,
    #[arg(long)]
    anchors: Option<String>,
    #[arg(long)]
    center: Option<String>,
    #[arg(long)]
    radius: Option<String>,
    /// Comma list or `auto`.
    #[arg(long)]
    levels: Option<String>,
    /// exact | monte-carlo
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    /// Exit 3 when a fraction falls below this.
    #[arg(long)]
    min_fraction: Option<String>,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
struct VerifyMassdist {
    #[command(flatten)]
    #[serde(flatten)]
    target: CantorTarget,
    #[arg(long)]
    anchors: Option<String>,
    #[arg(long)]
    depth: Option<String>,
    #[arg(long)]
    growth: Option<String>,
    /// Node budget.
    #[arg(long)]
    budget: Option<String>,
    #[arg(long)]
    big_cap: Option<String>,
    #[arg(long)]
    ball_cap: Option<String>,
    /// Hölder exponent; defaults to the target dimension.
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    /// Write the tree as JSON here.
    #[arg(long)]
    tree_out: Option<String>,
}

#[derive(Debug, Args, Serialize)]
struct Sweep {
    /// Command to run at each grid point.
    #[arg(long)]
    command: Option<String>,
    #[arg(long)]
    param: Option<String>,
    /// Explicit values, comma separated.
    #[arg(long)]
    grid: Option<String>,
    /// `lo:hi:count`, endpoints included.
    #[arg(long)]
    range: Option<String>,
    /// Parameters of the swept command, as key=value.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    #[serde(skip)]
    set: Vec<String>,
}

fn flag_params(args: &impl Serialize) -> CliResult<Params> {
    let mut p = Params::default();
    if let Value::Object(map) = serde_json::to_value(args)? {
        for (k, v) in map {
            if let Value::String(s) = v {
                p.set(&k, s);
            }
        }
    }
    Ok(p)
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::DimCore(_) => "dim-core",
            Command::DimSimultaneous(_) => "dim-simultaneous",
            Command::DimLinear(_) => "dim-linear",
            Command::DimShrink(_) => "dim-shrink",
            Command::DimMult(_) => "dim-mult",
            Command::Orbit(_) => "orbit",
            Command::CoverCritical(_) => "cover-critical",
            Command::OracleBoxcount(_) => "oracle-boxcount",
            Command::VerifyUbiquity(_) => "verify-ubiquity",
            Command::VerifyMassdist(_) => "verify-massdist",
            Command::Sweep(_) => "sweep",
        }
    }

    fn flags(&self) -> CliResult<Params> {
        match self {
            Command::DimCore(a) => flag_params(a),
            Command::DimSimultaneous(a) => flag_params(a),
            Command::DimLinear(a) => flag_params(a),
            Command::DimShrink(a) => flag_params(a),
            Command::DimMult(a) => flag_params(a),
            Command::Orbit(a) => flag_params(a),
            Command::CoverCritical(a) => flag_params(a),
            Command::OracleBoxcount(a) => flag_params(a),
            Command::VerifyUbiquity(a) => flag_params(a),
            Command::VerifyMassdist(a) => flag_params(a),
            Command::Sweep(a) => {
                let mut p = flag_params(a)?;
                for kv in &a.set {
                    let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Param {
                        key: "set".into(),
                        msg: format!("`{kv}` is not key=value"),
                    })?;
                    p.set(k.trim(), v.trim());
                }
                Ok(p)
            }
        }
    }
}

fn params(cli: &Cli) -> CliResult<Params> {
    let mut p = match &cli.config {
        Some(path) => Params::load(path)?,
        None => Params::default(),
    };
    p.merge(cli.command.flags()?);
    if let Some(seed) = &cli.seed {
        p.set("seed", seed.clone());
    }
    Ok(p)
}

fn execute(cli: &Cli, p: &Params) -> CliResult<Outcome> {
    match &cli.command {
        Command::Sweep(_) => sweep::sweep(p),
        other => commands::run(other.name(), p),
    }
}

fn emit(cli: &Cli, text: &str) -> CliResult<()> {
    match &cli.output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() {
    let start = Instant::now();
    let cli = Cli::parse();
    let threads = cli.threads.unwrap_or(1).max(1);
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
    {
        eprintln!("rectdim: thread pool: {e}");
    }

    let name = cli.command.name();
    let parsed = params(&cli);
    let p = parsed.as_ref().cloned().unwrap_or_default();
    let seed = p.parse_or("seed", 0u64).unwrap_or(0);
    let result = parsed.and_then(|p| execute(&cli, &p));

    let (status, outcome) = match result {
        Ok(out) => match &out.failure {
            Some(msg) => (
                Status {
                    code: "verification_failed",
                    exit: 3,
                    message: Some(msg.clone()),
                },
                out,
            ),
            None => (
                Status {
                    code: "ok",
                    exit: 0,
                    message: None,
                },
                out,
            ),
        },
        Err(e) => (
            Status {
                code: e.code(),
                exit: e.exit_code(),
                message: Some(e.to_string()),
            },
            Outcome {
                outputs: Value::Null,
                ..Outcome::default()
            },
        ),
    };
    if let Some(msg) = &status.message {
        eprintln!("rectdim {name}: {msg}");
    }
    let exit = status.exit;

    let written = match cli.format {
        Format::Csv if exit == 0 || outcome.table.is_some() || !outcome.outputs.is_null() => {
            let rows = match outcome.table {
                Some(rows) if !rows.is_empty() => rows,
                _ => {
                    let mut r = Vec::new();
                    flatten("", &outcome.outputs, &mut r);
                    vec![r]
                }
            };
            to_csv(&rows).and_then(|s| emit(&cli, &s))
        }
        Format::Csv => Ok(()),
        Format::Json => {
            let inputs = serde_json::to_value(p.entries()).unwrap_or(Value::Null);
            let doc = envelope(
                name,
                seed,
                inputs,
                status,
                outcome.outputs,
                start.elapsed().as_secs_f64(),
            );
            to_json(&doc).and_then(|s| emit(&cli, &s))
        }
    };
    if let Err(e) = written {
        eprintln!("rectdim: {e}");
        std::process::exit(1);
    }
    std::process::exit(exit);
}
