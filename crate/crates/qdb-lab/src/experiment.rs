//! Monte Carlo experiments over independent sessions.
//!
//! Trial `t` runs with seed `split(spec.seed, t)`, so results are
//! bit-reproducible and trials form an order-independent reduction:
//! parallel or sequential execution gives identical statistics.

use qdb_core::adversaries::{exact_round_success, run_attack_session, Attack, OracleError};
use qdb_core::bounds::{chernoff_lower, chernoff_upper, BoundsError, TailBoundQuery};
use qdb_core::protocol::{SessionConfig, SessionError};
use qdb_core::timing::LogMode;
use qdb_core::{Decision, SplitRng};
use serde::Serialize;
use std::fmt;

#[derive(Debug)]
pub enum LabError {
    Session(SessionError),
    Bounds(BoundsError),
    Oracle(OracleError),
    InvalidSpec(&'static str),
    Io(std::io::Error),
}

impl fmt::Display for LabError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabError::Session(e) => write!(f, "{e}"),
            LabError::Bounds(e) => write!(f, "{e}"),
            LabError::Oracle(e) => write!(f, "{e}"),
            LabError::InvalidSpec(msg) => write!(f, "invalid experiment spec: {msg}"),
            LabError::Io(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for LabError {}

impl From<SessionError> for LabError {
    fn from(e: SessionError) -> Self {
        LabError::Session(e)
    }
}

impl From<BoundsError> for LabError {
    fn from(e: BoundsError) -> Self {
        LabError::Bounds(e)
    }
}

impl From<OracleError> for LabError {
    fn from(e: OracleError) -> Self {
        LabError::Oracle(e)
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e)
    }
}

/// A Monte Carlo experiment: a session configuration, a strategy, and a
/// trial count.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExperimentSpec {
    pub config: SessionConfig,
    pub attack: Attack,
    pub trials: u64,
}

/// A rate with its Wilson 95% interval.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct RateEstimate {
    pub count: u64,
    pub total: u64,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

impl RateEstimate {
    pub fn from_counts(count: u64, total: u64) -> Self {
        let rate = if total == 0 {
            0.0
        } else {
            count as f64 / total as f64
        };
        // The interval must contain the point estimate; guard the boundary
        // cases where sqrt rounding pulls a limit past the rate.
        let (wilson_low, wilson_high) = wilson_interval(count, total);
        RateEstimate {
            count,
            total,
            rate,
            wilson_low: wilson_low.min(rate),
            wilson_high: wilson_high.max(rate),
        }
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(count: u64, total: u64) -> (f64, f64) {
    if total == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054_f64;
    let n = total as f64;
    let p = count as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let spread = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (
        ((center - spread) / denom).max(0.0),
        ((center + spread) / denom).min(1.0),
    )
}

/// Aggregated result of a Monte Carlo experiment, with the exact per-round
/// oracle and the matching session-level tail bound attached for context.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentStats {
    pub attack: Attack,
    pub trials: u64,
    pub seed: u64,
    pub config: SessionConfig,
    pub session_accept: RateEstimate,
    pub per_round_accept: RateEstimate,
    /// Exact per-round acceptance probability of the strategy.
    pub exact_round_oracle: f64,
    /// log2 of the false-accept upper bound at `(n, tau, oracle)`, when the
    /// query sits in the upper-tail regime (adversarial strategies).
    pub false_accept_bound_log2: Option<f64>,
    /// log2 of the completeness-failure upper bound at `(n, tau, oracle)`,
    /// when the query sits in the lower-tail regime (honest strategy).
    pub completeness_failure_bound_log2: Option<f64>,
}

/// Run `spec.trials` independent sessions and aggregate decisions and
/// per-round acceptances. The empirical per-round rate of every strategy
/// converges on `exact_round_oracle`; the analytical bounds contextualize
/// the session-level rate.
pub fn monte_carlo(spec: &ExperimentSpec) -> Result<ExperimentStats, LabError> {
    if spec.trials == 0 {
        return Err(LabError::InvalidSpec("trials must be >= 1"));
    }
    // Adversaries are modeled noiselessly; fail fast before simulating.
    let oracle = exact_round_success(spec.attack, spec.config.eta)?;

    let root = SplitRng::new(spec.config.seed);
    let mut sessions_accepted = 0u64;
    let mut rounds_accepted = 0u64;
    let mut rounds_total = 0u64;
    for t in 0..spec.trials {
        let mut trial_config = spec.config;
        trial_config.seed = root.split(t).next_u64();
        let outcome = run_attack_session(&trial_config, spec.attack, LogMode::CountsOnly)?;
        if outcome.transcript.decision == Decision::Accept {
            sessions_accepted += 1;
        }
        rounds_accepted += outcome.transcript.accepted_count as u64;
        rounds_total += outcome.transcript.rounds.len() as u64;
    }

    let (upper, lower) = session_bounds(&spec.config, oracle);
    Ok(ExperimentStats {
        attack: spec.attack,
        trials: spec.trials,
        seed: spec.config.seed,
        config: spec.config,
        session_accept: RateEstimate::from_counts(sessions_accepted, spec.trials),
        per_round_accept: RateEstimate::from_counts(rounds_accepted, rounds_total),
        exact_round_oracle: oracle,
        false_accept_bound_log2: upper,
        completeness_failure_bound_log2: lower,
    })
}

fn session_bounds(config: &SessionConfig, oracle: f64) -> (Option<f64>, Option<f64>) {
    let Ok(query) = TailBoundQuery::new(config.n, config.tau, oracle) else {
        return (None, None);
    };
    (
        chernoff_upper(&query).ok().map(|b| b.log2()),
        chernoff_lower(&query).ok().map(|b| b.log2()),
    )
}
