//! Command-line front door for the distance-bounding laboratory.
//!
//! Subcommands: `simulate` (Monte Carlo sessions), `bounds` (tail-bound
//! calculator), `size` (round/threshold/noise sizing), `table1` (baseline
//! comparison table), `tradeoff` (threshold-ratio curves), `trace` (one full
//! session as JSON + JSONL).
//!
//! Exit codes: 0 success, 1 internal error, 2 argument error, 3 regime
//! error (a bound or strategy queried outside its domain of validity).

use qdb_lab::experiment::{monte_carlo, ExperimentSpec, LabError};
use qdb_lab::output::{log_to_json_lines, stats_to_csv, stats_to_json, trace_to_json};

use qdb_core::adversaries::{exact_round_success, run_attack_session, Attack, OracleError};
use qdb_core::bounds::{
    self, binomial_tail_exact, chernoff_lower, chernoff_upper, kl_bernoulli, max_noise, min_rounds,
    threshold_size, BoundsError, TailBoundQuery, TailSide,
};
use qdb_core::protocol::{SessionConfig, SessionError};
use qdb_core::timing::LogMode;

use std::env;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

const USAGE: &str = "\
qdb-lab: quantum distance-bounding laboratory

USAGE:
  qdb-lab <SUBCOMMAND> [FLAGS]

SUBCOMMANDS:
  simulate   Run seeded Monte Carlo sessions and report acceptance rates
             against the exact per-round oracle and the matching tail bound.
             Flags: --attack honest|df|mf|tf|tf-replay (default honest)
                    --n N --tau T --eta E --bound-b METERS --distance METERS
                    --trials K --seed S --lambda BITS
                    --format csv|json (default json) --out PATH
  bounds     Evaluate the divergence and tail bounds for explicit (n, tau, p).
             Flags: --n N --tau T --p P [--side upper|lower]
  size       Parameter sizing. One of three modes:
               rounds:    --u RATIO --p P --target-log2 L
               threshold: --n N --p-df P --p-mf P --eps-prime E
               noise:     --u RATIO
  table1     Emit the classical-baseline comparison table as CSV.
             Flags: [--out PATH]
  tradeoff   Emit rounds-required and noise-budget curves over a threshold
             ratio grid as CSV.
             Flags: [--u-grid 0.88,0.9,...] [--target-log2 L] [--out PATH]
  trace      Run one session and write transcript.json + messages.jsonl.
             Flags: --attack ... --n N --tau T --eta E --bound-b METERS
                    --distance METERS --seed S [--out-dir DIR]
  help       Show this message.

Relative output paths resolve under $QDB_OUT_DIR when it is set.
Exit codes: 0 success, 1 internal error, 2 argument error, 3 regime error.
";

enum CliError {
    Usage(String),
    Regime(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Regime(_) => 3,
            CliError::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Regime(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        match &e {
            LabError::Bounds(BoundsError::RegimeViolation(_)) => CliError::Regime(e.to_string()),
            LabError::Oracle(OracleError::NoisyAdversary { .. }) => CliError::Regime(e.to_string()),
            LabError::Session(SessionError::InvalidWiring(_)) => CliError::Usage(e.to_string()),
            LabError::Session(SessionError::Protocol(_)) => CliError::Usage(e.to_string()),
            LabError::Io(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<BoundsError> for CliError {
    fn from(e: BoundsError) -> Self {
        match e {
            BoundsError::RegimeViolation(_) => CliError::Regime(e.to_string()),
            BoundsError::InvalidParameter(_) => CliError::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let args: Vec<String> = env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            if matches!(e, CliError::Usage(_)) {
                eprintln!("\n{USAGE}");
            }
            ExitCode::from(e.code())
        }
    }
}

fn run(args: &[String]) -> Result<(), CliError> {
    let Some(subcommand) = args.first() else {
        return Err(CliError::Usage("missing subcommand".into()));
    };
    let rest = &args[1..];
    match subcommand.as_str() {
        "simulate" => cmd_simulate(rest),
        "bounds" => cmd_bounds(rest),
        "size" => cmd_size(rest),
        "table1" => cmd_table1(rest),
        "tradeoff" => cmd_tradeoff(rest),
        "trace" => cmd_trace(rest),
        "help" | "--help" | "-h" => {
            println!("{USAGE}");
            Ok(())
        }
        other => Err(CliError::Usage(format!("unknown subcommand `{other}`"))),
    }
}

/// Parsed `--key value` / `--key=value` flags, validated against an allowed
/// set.
struct Flags {
    entries: Vec<(String, String)>,
}

impl Flags {
    fn parse(args: &[String], allowed: &[&str]) -> Result<Self, CliError> {
        let mut entries = Vec::new();
        let mut it = args.iter();
        while let Some(arg) = it.next() {
            let Some(stripped) = arg.strip_prefix("--") else {
                return Err(CliError::Usage(format!("unexpected argument `{arg}`")));
            };
            let (key, value) = match stripped.split_once('=') {
                Some((k, v)) => (k.to_string(), v.to_string()),
                None => {
                    let value = it.next().ok_or_else(|| {
                        CliError::Usage(format!("missing value for --{stripped}"))
                    })?;
                    (stripped.to_string(), value.clone())
                }
            };
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::Usage(format!("unknown flag --{key}")));
            }
            if entries.iter().any(|(k, _)| *k == key) {
                return Err(CliError::Usage(format!("duplicate flag --{key}")));
            }
            entries.push((key, value));
        }
        Ok(Flags { entries })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn parse_value<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::Usage(format!("invalid value for --{key}: `{raw}`"))),
        }
    }

    fn require<T: std::str::FromStr>(&self, key: &str) -> Result<T, CliError> {
        self.parse_value(key)?
            .ok_or_else(|| CliError::Usage(format!("missing required flag --{key}")))
    }
}

/// Resolve an output path under `$QDB_OUT_DIR` when it is set and the path
/// is relative.
fn resolve_out(path: &str) -> PathBuf {
    let p = PathBuf::from(path);
    if p.is_absolute() {
        return p;
    }
    match env::var_os("QDB_OUT_DIR") {
        Some(dir) => PathBuf::from(dir).join(p),
        None => p,
    }
}

fn write_or_print(out: Option<&str>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let path = resolve_out(path);
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    fs::create_dir_all(parent)
                        .map_err(|e| CliError::Runtime(format!("creating {parent:?}: {e}")))?;
                }
            }
            fs::write(&path, content)
                .map_err(|e| CliError::Runtime(format!("writing {path:?}: {e}")))?;
            println!("wrote {}", path.display());
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn parse_attack(flags: &Flags) -> Result<Attack, CliError> {
    match flags.get("attack") {
        None => Ok(Attack::Honest),
        Some(name) => Attack::parse(name).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown attack `{name}` (expected honest|df|mf|tf|tf-replay)"
            ))
        }),
    }
}

fn session_config(
    flags: &Flags,
    attack: Attack,
    default_n: usize,
) -> Result<SessionConfig, CliError> {
    let bound_b = flags.parse_value::<f64>("bound-b")?.unwrap_or(300.0);
    let n = flags.parse_value::<usize>("n")?.unwrap_or(default_n);
    let distance = match flags.parse_value::<f64>("distance")? {
        Some(d) => d,
        None if attack.requires_far_prover() => 1.5 * bound_b,
        None => bound_b,
    };
    let config = SessionConfig {
        lambda: flags.parse_value::<usize>("lambda")?.unwrap_or(256),
        n,
        tau: flags.parse_value::<usize>("tau")?.unwrap_or(n),
        bound_b,
        eta: flags.parse_value::<f64>("eta")?.unwrap_or(0.0),
        prover_distance: distance,
        seed: flags.parse_value::<u64>("seed")?.unwrap_or(1),
    };
    config
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(config)
}

fn cmd_simulate(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(
        args,
        &[
            "attack", "n", "tau", "eta", "bound-b", "distance", "trials", "seed", "lambda",
            "format", "out",
        ],
    )?;
    let attack = parse_attack(&flags)?;
    let config = session_config(&flags, attack, 100)?;
    let spec = ExperimentSpec {
        config,
        attack,
        trials: flags.parse_value::<u64>("trials")?.unwrap_or(1000),
    };
    let stats = monte_carlo(&spec)?;
    let rendered = match flags.get("format").unwrap_or("json") {
        "json" => stats_to_json(&stats),
        "csv" => stats_to_csv(&stats),
        other => return Err(CliError::Usage(format!("unknown format `{other}`"))),
    };
    write_or_print(flags.get("out"), &rendered)
}

fn cmd_bounds(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &["n", "tau", "p", "side"])?;
    let n: usize = flags.require("n")?;
    let tau: usize = flags.require("tau")?;
    let p: f64 = flags.require("p")?;
    let query = TailBoundQuery::new(n, tau, p).map_err(CliError::from)?;
    let ratio = tau as f64 / n as f64;
    let kl = kl_bernoulli(ratio, p).map_err(CliError::from)?;

    let side = match flags.get("side") {
        Some("upper") => TailSide::Upper,
        Some("lower") => TailSide::Lower,
        Some(other) => return Err(CliError::Usage(format!("unknown side `{other}`"))),
        None => {
            if ratio > p {
                TailSide::Upper
            } else {
                TailSide::Lower
            }
        }
    };

    println!("kl_nats = {kl:.12}");
    let bound = match side {
        TailSide::Upper => chernoff_upper(&query).map_err(CliError::from)?,
        TailSide::Lower => chernoff_lower(&query).map_err(CliError::from)?,
    };
    let side_name = match side {
        TailSide::Upper => "upper",
        TailSide::Lower => "lower",
    };
    // Tails can sit far below 1; scientific notation keeps the full 12
    // significant digits, and the log2 line stays finite past underflow.
    println!("chernoff_{side_name}_prob = {:.11e}", bound.probability());
    println!(
        "chernoff_{side_name}_log2 = {}",
        bounds::fmt_log2(bound.log2())
    );
    if n <= 10_000 {
        let exact = binomial_tail_exact(n, tau, p, side).map_err(CliError::from)?;
        println!(
            "binomial_exact_{side_name}_prob = {:.11e}",
            exact.probability()
        );
        println!(
            "binomial_exact_{side_name}_log2 = {}",
            bounds::fmt_log2(exact.log2())
        );
    }
    Ok(())
}

fn cmd_size(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(
        args,
        &["u", "p", "target-log2", "n", "p-df", "p-mf", "eps-prime"],
    )?;
    if flags.get("target-log2").is_some() {
        let u: f64 = flags.require("u")?;
        let p: f64 = flags.require("p")?;
        let target: f64 = flags.require("target-log2")?;
        let sizing = min_rounds(u, p, target).map_err(CliError::from)?;
        println!("n_required = {}", sizing.n_required);
        println!("tau = {}", sizing.tau);
        println!("achieved_log2 = {}", bounds::fmt_log2(sizing.bound.log2()));
        Ok(())
    } else if flags.get("eps-prime").is_some() {
        let n: usize = flags.require("n")?;
        let p_df: f64 = flags.require("p-df")?;
        let p_mf: f64 = flags.require("p-mf")?;
        let eps: f64 = flags.require("eps-prime")?;
        let tau = threshold_size(n, p_df, p_mf, eps).map_err(CliError::from)?;
        println!("tau = {tau}");
        Ok(())
    } else if flags.get("u").is_some() {
        let u: f64 = flags.require("u")?;
        let eta = max_noise(u).map_err(CliError::from)?;
        println!("eta_max = {}", bounds::fmt_probability(eta));
        Ok(())
    } else {
        Err(CliError::Usage(
            "size needs --target-log2 (rounds), --eps-prime (threshold), or --u (noise)".into(),
        ))
    }
}

fn cmd_table1(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &["out"])?;
    let csv = bounds::table1_csv().map_err(CliError::from)?;
    write_or_print(flags.get("out"), &csv)
}

fn cmd_tradeoff(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(args, &["u-grid", "target-log2", "out"])?;
    let grid = match flags.get("u-grid") {
        None => bounds::default_u_grid(),
        Some(raw) => raw
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("invalid grid value `{tok}`")))
            })
            .collect::<Result<Vec<f64>, CliError>>()?,
    };
    let target = flags.parse_value::<f64>("target-log2")?.unwrap_or(-80.0);
    let rows = bounds::tradeoff_curves(&grid, target).map_err(CliError::from)?;
    write_or_print(flags.get("out"), &bounds::tradeoff_csv(&rows))
}

fn cmd_trace(args: &[String]) -> Result<(), CliError> {
    let flags = Flags::parse(
        args,
        &[
            "attack", "n", "tau", "eta", "bound-b", "distance", "seed", "lambda", "out-dir",
        ],
    )?;
    let attack = parse_attack(&flags)?;
    let config = session_config(&flags, attack, 16)?;
    // Adversaries are modeled noiselessly, same as `simulate`.
    exact_round_success(attack, config.eta).map_err(|e| CliError::from(LabError::from(e)))?;
    let outcome = run_attack_session(&config, attack, LogMode::Full)
        .map_err(|e| CliError::from(LabError::from(e)))?;

    let dir = match flags.get("out-dir") {
        Some(d) => resolve_out(d),
        None => resolve_out("."),
    };
    fs::create_dir_all(&dir).map_err(|e| CliError::Runtime(format!("creating {dir:?}: {e}")))?;
    let transcript_path = dir.join("transcript.json");
    let log_path = dir.join("messages.jsonl");
    fs::write(
        &transcript_path,
        trace_to_json(&config, attack, &outcome.transcript),
    )
    .map_err(|e| CliError::Runtime(e.to_string()))?;
    fs::write(&log_path, log_to_json_lines(&outcome.log))
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    println!("wrote {}", transcript_path.display());
    println!("wrote {}", log_path.display());
    Ok(())
}
