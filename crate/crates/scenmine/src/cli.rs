//! The `scenmine` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use scenmine_core::ftcg::{LlmProvider, MiningConfig, DEFAULT_MAX_ITERATIONS};
use scenmine_core::{dsl, Registry};

use crate::batch::{self, BatchOptions};
use crate::config::FileConfig;
use crate::corpus;
use crate::evaluation;
use crate::io::{self, FileError};
use crate::provider::{Fixture, HttpProvider, ScriptedProvider, API_KEY_ENV};

const AFTER_HELP: &str = "\
Configuration: --config FILE reads a TOML file whose keys mirror the flags
(logs, queries, gt, out, predictions, provider, fixture, endpoint, model, k,
epsrf, workers, seed, request_timeout, retry_backoff, categories). Flags win
over the file.

Environment: SCENMINE_API_KEY is sent as a bearer token by the http provider.

Exit status: 0 success, 1 a query failed or a program is invalid,
2 usage or environment error.";

#[derive(Parser, Debug)]
#[command(name = "scenmine", version, about = "Mine driving logs for scenarios described in natural language", after_help = AFTER_HELP)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate programs for each (query, log) pair and run them.
    Mine(MineArgs),
    /// Score predictions against ground truth.
    Eval(EvalArgs),
    /// Generate a synthetic corpus with certified ground truth.
    Synth(SynthArgs),
    /// Print the function catalog shown to the model.
    Describe,
    /// Parse and check a program, optionally running it on a log.
    Validate(ValidateArgs),
}

#[derive(Args, Debug)]
struct MineArgs {
    /// Directory of log files.
    #[arg(long, value_name = "DIR")]
    logs: Option<PathBuf>,
    /// JSON list of queries: strings, or {"query_text", "log_ids"} objects.
    #[arg(long, value_name = "FILE")]
    queries: Option<PathBuf>,
    /// Output directory for predictions.json and transcripts/.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// `stub`, `http`, `stub:<fixture>` or `http:<endpoint>`.
    #[arg(long)]
    provider: Option<String>,
    /// Reply fixture for the stub provider.
    #[arg(long, value_name = "FILE")]
    fixture: Option<PathBuf>,
    /// URL for the http provider.
    #[arg(long, value_name = "URL")]
    endpoint: Option<String>,
    /// Model name sent to the http provider.
    #[arg(long)]
    model: Option<String>,
    /// Attempt budget per (query, log) pair.
    #[arg(short = 'K', long = "max-iterations", value_name = "K")]
    k: Option<usize>,
    /// Include the argument-role guidance paragraph (default).
    #[arg(long, overrides_with = "no_epsrf")]
    epsrf: bool,
    /// Leave the argument-role guidance paragraph out.
    #[arg(long, overrides_with = "epsrf")]
    no_epsrf: bool,
    /// Concurrent jobs.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Predictions file written by `mine`.
    #[arg(long, value_name = "FILE")]
    predictions: Option<PathBuf>,
    /// Directory of ground-truth files.
    #[arg(long, value_name = "DIR")]
    gt: Option<PathBuf>,
    /// Directory of log files.
    #[arg(long, value_name = "DIR")]
    logs: Option<PathBuf>,
    /// Output directory for report.json and report.txt.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SynthArgs {
    /// JSON list of scenario specs.
    #[arg(long, value_name = "FILE", conflicts_with = "count")]
    spec: Option<PathBuf>,
    /// Generate the built-in corpus with this many queries instead.
    #[arg(long)]
    count: Option<usize>,
    /// Base seed of the built-in corpus.
    #[arg(long)]
    seed: Option<u64>,
    /// Skip the negative log per query in the built-in corpus.
    #[arg(long)]
    no_negatives: bool,
    /// Output directory.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ValidateArgs {
    /// Program file.
    program: PathBuf,
    /// Run the program on this log and print the result.
    #[arg(long, value_name = "FILE")]
    log: Option<PathBuf>,
}

enum Failure {
    /// Exit 1.
    Domain(String),
    /// Exit 2.
    Usage(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Domain(m) | Failure::Usage(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("missing --{flag} (or `{flag}` in the config file)")))
}

fn existing_dir(path: PathBuf, flag: &str) -> Result<PathBuf, Failure> {
    if path.is_dir() {
        Ok(path)
    } else {
        Err(Failure::Usage(format!("--{flag}: {} is not a directory", path.display())))
    }
}

fn create_dir(path: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(path).map_err(|e| usage(FileError::io(path, e)))
}

/// Runs the CLI on `args` (including the program name) and returns the
/// exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match dispatch(cli, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            f.code()
        }
    }
}

fn dispatch(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let cfg = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(usage)?,
        None => FileConfig::default(),
    };
    let registry = cfg.registry().map_err(usage)?;
    match cli.command {
        Command::Mine(a) => mine(a, &cfg, &registry, stdout, stderr),
        Command::Eval(a) => eval(a, &cfg, &registry, stdout),
        Command::Synth(a) => synth(a, &cfg, &registry, stdout),
        Command::Describe => {
            write!(stdout, "{}", dsl::describe_functions(&registry)).map_err(usage)?;
            Ok(0)
        }
        Command::Validate(a) => validate(a, &registry, stdout, stderr),
    }
}

fn provider_from(a: &MineArgs, cfg: &FileConfig) -> Result<Box<dyn LlmProvider>, Failure> {
    let selector = a.provider.clone().or_else(|| cfg.provider.clone()).unwrap_or_else(|| "stub".into());
    let (kind, inline) = match selector.split_once(':') {
        Some((k, rest)) if k == "stub" || k == "http" => (k.to_string(), Some(rest.to_string())),
        _ => (selector.clone(), None),
    };
    match kind.as_str() {
        "stub" => {
            let path = inline
                .map(PathBuf::from)
                .or_else(|| a.fixture.clone())
                .or_else(|| cfg.fixture.clone());
            let path = required(path, "fixture")?;
            let fixture = Fixture::load(&path).map_err(usage)?;
            Ok(Box::new(ScriptedProvider::new(fixture)))
        }
        "http" => {
            let endpoint = required(inline.or_else(|| a.endpoint.clone()).or_else(|| cfg.endpoint.clone()), "endpoint")?;
            let model = required(a.model.clone().or_else(|| cfg.model.clone()), "model")?;
            let timeout = cfg.request_timeout.unwrap_or(120.0);
            if !(timeout > 0.0 && timeout.is_finite()) {
                return Err(Failure::Usage(format!("request_timeout must be positive, got {timeout}")));
            }
            let key = std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty());
            Ok(Box::new(HttpProvider::new(endpoint, model, key, Duration::from_secs_f64(timeout))))
        }
        other => Err(Failure::Usage(format!("unknown provider `{other}`; expected stub or http"))),
    }
}

fn mine(a: MineArgs, cfg: &FileConfig, registry: &Registry, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let logs_dir = existing_dir(required(a.logs.clone().or_else(|| cfg.logs.clone()), "logs")?, "logs")?;
    let queries_path = required(a.queries.clone().or_else(|| cfg.queries.clone()), "queries")?;
    let out = required(a.out.clone().or_else(|| cfg.out.clone()), "out")?;
    let max_iterations = a.k.or(cfg.k).unwrap_or(DEFAULT_MAX_ITERATIONS);
    if max_iterations == 0 {
        return Err(Failure::Usage("-K must be at least 1".into()));
    }
    let epsrf = if a.epsrf {
        true
    } else if a.no_epsrf {
        false
    } else {
        cfg.epsrf.unwrap_or(true)
    };
    let workers = a.workers.or(cfg.workers).unwrap_or(1);
    let mut mining = MiningConfig {
        max_iterations,
        epsrf_enabled: epsrf,
        ..MiningConfig::default()
    };
    if let Some(b) = cfg.retry_backoff {
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Failure::Usage(format!("retry_backoff must be >= 0, got {b}")));
        }
        mining.retry_backoff = Duration::from_secs_f64(b);
    }
    let provider = provider_from(&a, cfg)?;
    let logs = io::load_log_dir(&logs_dir, registry.categories()).map_err(usage)?;
    let queries = batch::load_queries(&queries_path).map_err(usage)?;
    let jobs = batch::expand_jobs(&queries, &logs).map_err(usage)?;
    create_dir(&out)?;
    let options = BatchOptions {
        workers,
        transcripts: Some(out.join("transcripts")),
    };
    let result = batch::run_batch(&jobs, &logs, registry, provider.as_ref(), &mining, &options).map_err(usage)?;
    let predictions_path = out.join("predictions.json");
    io::write_json(&predictions_path, &result.predictions).map_err(usage)?;
    let failed = result.failed();
    let _ = writeln!(
        stdout,
        "mined {} (query, log) pairs: {} succeeded, {failed} failed; predictions in {}",
        jobs.len(),
        jobs.len() - failed,
        predictions_path.display()
    );
    for o in result.outcomes.iter().filter(|o| !o.is_success()) {
        let last = o.iterations.last().and_then(|r| r.error.as_ref()).map(|e| e.to_string()).unwrap_or_default();
        let _ = writeln!(stderr, "failed after {} attempts: `{}` on {}: {last}", o.iterations.len(), o.query_text, o.log_id);
    }
    Ok(if failed > 0 { 1 } else { 0 })
}

fn eval(a: EvalArgs, cfg: &FileConfig, registry: &Registry, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let out = required(a.out.or_else(|| cfg.out.clone()), "out")?;
    let predictions_path = match a.predictions.or_else(|| cfg.predictions.clone()) {
        Some(p) => p,
        None => out.join("predictions.json"),
    };
    let gt_dir = existing_dir(required(a.gt.or_else(|| cfg.gt.clone()), "gt")?, "gt")?;
    let logs_dir = existing_dir(required(a.logs.or_else(|| cfg.logs.clone()), "logs")?, "logs")?;
    let predictions: io::Predictions = io::read_json(&predictions_path).map_err(usage)?;
    let gts = io::load_ground_truth_dir(&gt_dir).map_err(usage)?;
    if gts.is_empty() {
        return Err(Failure::Usage(format!("--gt: no ground-truth files in {}", gt_dir.display())));
    }
    let logs = io::load_log_dir(&logs_dir, registry.categories()).map_err(usage)?;
    let report = evaluation::evaluate(&predictions, &gts, &logs).map_err(|e| Failure::Domain(e.to_string()))?;
    let table = evaluation::summary_table(&report.report);
    create_dir(&out)?;
    io::write_json(&out.join("report.json"), &report).map_err(usage)?;
    io::write_atomic(&out.join("report.txt"), table.as_bytes()).map_err(usage)?;
    write!(stdout, "{table}").map_err(usage)?;
    Ok(0)
}

fn synth(a: SynthArgs, cfg: &FileConfig, registry: &Registry, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let out = required(a.out.or_else(|| cfg.out.clone()), "out")?;
    let requests = match (&a.spec, a.count) {
        (Some(path), _) => corpus::load_requests(path).map_err(usage)?,
        (None, count) => {
            let seed = a.seed.or(cfg.seed).unwrap_or(0);
            corpus::default_requests(count.unwrap_or(30), seed, !a.no_negatives)
        }
    };
    let generated = corpus::generate(&requests, registry).map_err(usage)?;
    corpus::write(&generated, &out).map_err(usage)?;
    let _ = writeln!(
        stdout,
        "wrote {} logs for {} specs to {}",
        generated.len(),
        requests.len(),
        out.display()
    );
    Ok(0)
}

fn validate(a: ValidateArgs, registry: &Registry, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let text = std::fs::read_to_string(&a.program).map_err(|e| usage(FileError::io(&a.program, e)))?;
    let program = match dsl::parse(&text) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "{}: {e}", a.program.display());
            return Ok(1);
        }
    };
    let errors = dsl::check(&program, registry);
    if !errors.is_empty() {
        for e in &errors {
            let _ = writeln!(stderr, "{}: {e}", a.program.display());
        }
        return Ok(1);
    }
    let Some(log_path) = a.log else {
        let _ = writeln!(stdout, "ok: {} statements", program.statements.len());
        return Ok(0);
    };
    let log = io::load_log(&log_path, registry.categories()).map_err(usage)?;
    match dsl::interpret(&program, &log, registry) {
        Ok(set) => {
            let mut json = serde_json::to_string_pretty(&set).expect("serializable");
            json.push('\n');
            write!(stdout, "{json}").map_err(usage)?;
            Ok(0)
        }
        Err(e) => {
            let _ = writeln!(stderr, "{}: {e}", a.program.display());
            Ok(1)
        }
    }
}
