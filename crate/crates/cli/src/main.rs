use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use homcover::covering::{verify_cover, Cover, CoverJson};
use homcover::experiment::{
    check_certificate_str, generate_body, load_body, run_experiment, BodySource, CheckResult, ExperimentConfig,
    Format, GeneratorSpec, Query, Report,
};
use homcover::rational::{format_rational, parse_rational};
use homcover::{ConvexBody, Error, Rational, Sign};

#[derive(Parser)]
#[command(name = "homcover", version, about = "Exact covers of convex polytopes by smaller homothets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Bracket tolerance, e.g. 1/100.
    #[arg(long, value_parser = rational)]
    tol: Option<Rational>,
    /// Search rounds per cover search.
    #[arg(long)]
    budget: Option<usize>,
    /// Subdivision depth for cover verification.
    #[arg(long)]
    depth: Option<usize>,
    /// Seed for random generators.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json", value_parser = format)]
    format: Format,
    /// Write the main certificate of the result here.
    #[arg(long)]
    cert: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or inspect a body.
    Body {
        /// Generator spec such as `cube(3)`, or a body JSON file.
        body: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bracket the smallest ratio at which `n` copies cover the body.
    Lambda {
        body: String,
        #[arg(short, long)]
        n: usize,
        #[arg(long, default_value = "+", value_parser = sign, allow_hyphen_values = true)]
        sign: Sign,
        #[command(flatten)]
        common: Common,
    },
    /// Search for a small cover at a fixed ratio, or verify a given cover.
    Cover {
        body: String,
        #[arg(long, value_parser = rational)]
        lambda: Option<Rational>,
        #[arg(long, default_value = "+", value_parser = sign, allow_hyphen_values = true)]
        sign: Sign,
        /// Largest cover size tried.
        #[arg(long)]
        max_n: Option<usize>,
        /// Cover JSON file to verify against the body instead of searching.
        #[arg(long)]
        verify: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Covering-number bounds for a body at a ratio.
    Bounds {
        body: String,
        #[arg(long, value_parser = rational)]
        lambda: Rational,
        #[arg(long, default_value = "+", value_parser = sign, allow_hyphen_values = true)]
        sign: Sign,
        #[command(flatten)]
        common: Common,
    },
    /// Cover K, sandwich L against K and carry the cover over to L.
    Transfer {
        #[arg(long)]
        k: String,
        #[arg(long)]
        l: String,
        #[arg(short, long)]
        n: usize,
        #[arg(long, value_parser = rational)]
        lambda: Rational,
        #[arg(long, value_parser = rational)]
        epsilon: Rational,
        #[arg(long, default_value = "+", value_parser = sign, allow_hyphen_values = true)]
        sign: Sign,
        #[command(flatten)]
        common: Common,
    },
    /// Replay a certificate file. Exit status 0 valid, 1 invalid, 2 unreadable.
    Check { path: PathBuf },
    /// Run a batch experiment described by a JSON config.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_parser = format)]
        format: Option<Format>,
    },
}

fn rational(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn sign(s: &str) -> std::result::Result<Sign, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn format(s: &str) -> std::result::Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn read_body(spec: &str, seed: u64) -> Result<ConvexBody> {
    if Path::new(spec).is_file() {
        return Ok(load_body(&BodySource::File { file: spec.into() }, seed)?);
    }
    let parsed: GeneratorSpec = spec.parse()?;
    Ok(generate_body(&parsed, seed)?)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            match writeln!(stdout, "{}", text.trim_end()) {
                // a closed pipe (`| head`) is not a failure of ours
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => other.context("writing to stdout"),
            }
        }
    }
}

/// Runs one query through the batch runner so that every subcommand emits the
/// same report format.
fn single(query: Query, common: &Common) -> Result<ExitCode> {
    let mut cfg = ExperimentConfig { seed: common.seed, ..ExperimentConfig::default() };
    for body in query.bodies() {
        if Path::new(body).is_file() {
            cfg.bodies.push(homcover::experiment::NamedBody {
                name: body.to_string(),
                source: BodySource::File { file: body.into() },
            });
        }
    }
    cfg.queries.push(query);
    if let Some(tol) = &common.tol {
        cfg.tolerances.tol = tol.clone();
    }
    if let Some(b) = common.budget {
        cfg.budgets.search.budget = b;
    }
    if let Some(d) = common.depth {
        cfg.budgets.search.max_depth = d;
    }
    cfg.output.format = common.format;
    let report = run_experiment(&cfg);
    if let Some(path) = &common.cert {
        let cert = report.records.iter().flat_map(|r| r.certificates.last()).next();
        match cert {
            Some(c) => std::fs::write(path, serde_json::to_string_pretty(c)?)?,
            None => eprintln!("no certificate to write"),
        }
    }
    write_report(&report, common.format, common.out.as_deref())
}

fn write_report(report: &Report, format: Format, out: Option<&Path>) -> Result<ExitCode> {
    let text = match format {
        Format::Json => report.to_json()?,
        Format::Csv => report.to_csv()?,
    };
    emit(&text, out)?;
    for r in report.records.iter().filter(|r| r.error.is_some()) {
        eprintln!("query {} ({}) failed: {}", r.index, r.kind, r.error.as_deref().unwrap_or_default());
    }
    Ok(if report.has_errors() { ExitCode::FAILURE } else { ExitCode::SUCCESS })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Body { body, seed, out } => {
            let k = read_body(&body, seed)?;
            let info = serde_json::json!({
                "dim": k.dim(),
                "vertices": k.to_json().vertices.iter().map(|v| v.iter().map(format_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "facets": k.facets().len(),
                "volume": format_rational(&k.volume()),
            });
            emit(&serde_json::to_string_pretty(&info)?, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Lambda { body, n, sign, common } => {
            let query = Query::LambdaOf { body, n, sign, tol: common.tol.clone() };
            single(query, &common)
        }
        Command::Cover { body, lambda, sign, max_n, verify, common } => {
            if let Some(path) = verify {
                let k = read_body(&body, common.seed)?;
                let json: CoverJson = serde_json::from_str(&std::fs::read_to_string(&path)?)
                    .with_context(|| format!("parsing {}", path.display()))?;
                let cover = Cover::from_json(&json)?;
                let res = verify_cover(&k, &cover, common.depth.unwrap_or(30))?;
                emit(&serde_json::to_string_pretty(&res)?, common.out.as_deref())?;
                return Ok(if res.is_covered() { ExitCode::SUCCESS } else { ExitCode::FAILURE });
            }
            let Some(lambda) = lambda else {
                bail!("cover needs --lambda or --verify");
            };
            let query = Query::CoveringNumber { body, lambda, sign, max_n };
            single(query, &common)
        }
        Command::Bounds { body, lambda, sign, common } => {
            let query = Query::Bounds { body, lambda, sign };
            single(query, &common)
        }
        Command::Transfer { k, l, n, lambda, epsilon, sign, common } => {
            let query = Query::Transfer { k, l, n, lambda, epsilon, sign };
            single(query, &common)
        }
        Command::Check { path } => {
            let text = std::fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
            match check_certificate_str(&text) {
                Ok(CheckResult::Valid) => {
                    println!("valid");
                    Ok(ExitCode::SUCCESS)
                }
                Ok(CheckResult::Invalid(reason)) => {
                    println!("invalid: {reason}");
                    Ok(ExitCode::from(1))
                }
                Err(e) => {
                    println!("{e}");
                    Ok(ExitCode::from(2))
                }
            }
        }
        Command::Run { config, seed, out, format } => {
            let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let mut cfg = ExperimentConfig::from_json(&text)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let format = format.unwrap_or(cfg.output.format);
            let out = out.or_else(|| cfg.output.path.clone());
            let report = run_experiment(&cfg);
            write_report(&report, format, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
