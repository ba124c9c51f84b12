//! Analytical engine: binary relative entropy, Chernoff-style tail bounds for
//! adaptively generated round indicators, exact binomial tail oracles, and the
//! parameter-sizing calculators (round counts, acceptance thresholds, noise
//! budgets) together with the comparison-table and trade-off-curve generators.
//!
//! All tail computations run in natural-log space so that values far below
//! `2^-1000` stay finite; user-facing output reports base-2 logarithms.

use crate::math;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

/// Per-round distance-fraud success bound for the qubit protocol.
pub const PER_ROUND_DF: f64 = 0.5;
/// Per-round success of the best known mafia-fraud strategy (pre-ask parity
/// extraction) against the qubit protocol.
pub const PER_ROUND_MF: f64 = 0.875;
/// Classical baseline per-round figure (both DF and MF) used for comparison.
pub const PER_ROUND_CLASSICAL_BASELINE: f64 = 0.75;

#[derive(Debug, Clone, PartialEq)]
pub enum BoundsError {
    /// A parameter is outside its domain (bad probability, zero rounds, ...).
    InvalidParameter(&'static str),
    /// The query is outside the regime where the bound is meaningful
    /// (e.g. upper tail with `tau <= n*p`). Never silently returns 1.
    RegimeViolation(&'static str),
}

impl fmt::Display for BoundsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundsError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            BoundsError::RegimeViolation(msg) => write!(f, "regime violation: {msg}"),
        }
    }
}

impl core::error::Error for BoundsError {}

/// Binary relative entropy `D(u || v)` in nats, with the conventions
/// `0 ln 0 = 0` at the endpoints of `u`.
pub fn kl_bernoulli(u: f64, v: f64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&u) {
        return Err(BoundsError::InvalidParameter("u must be in [0, 1]"));
    }
    if !v.is_finite() || v <= 0.0 || v >= 1.0 {
        return Err(BoundsError::InvalidParameter("v must be in (0, 1)"));
    }
    let mut d = 0.0;
    if u > 0.0 {
        d += u * math::ln(u / v);
    }
    if u < 1.0 {
        d += (1.0 - u) * math::ln((1.0 - u) / (1.0 - v));
    }
    Ok(d)
}

/// A probability held in natural-log space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBound {
    ln_value: f64,
}

impl TailBound {
    pub(crate) fn from_ln(ln_value: f64) -> Self {
        TailBound { ln_value }
    }

    /// The bound as a plain probability; may underflow to zero.
    pub fn probability(&self) -> f64 {
        math::exp(self.ln_value)
    }

    pub fn ln(&self) -> f64 {
        self.ln_value
    }

    /// Base-2 logarithm of the bound; finite even when the probability
    /// underflows.
    pub fn log2(&self) -> f64 {
        self.ln_value / math::LN_2
    }
}

/// A multi-round tail query: `n` rounds, threshold `tau`, per-round bound `p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBoundQuery {
    n: usize,
    tau: usize,
    p: f64,
}

impl TailBoundQuery {
    /// `tau` may be any value in `0..=n`; each tail imposes its own regime
    /// requirement relative to `n*p`.
    pub fn new(n: usize, tau: usize, p: f64) -> Result<Self, BoundsError> {
        if n == 0 {
            return Err(BoundsError::InvalidParameter("n must be >= 1"));
        }
        if tau > n {
            return Err(BoundsError::InvalidParameter("tau must be <= n"));
        }
        if !p.is_finite() || p <= 0.0 || p >= 1.0 {
            return Err(BoundsError::InvalidParameter("p must be in (0, 1)"));
        }
        Ok(TailBoundQuery { n, tau, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

/// Upper tail `Pr[S >= tau] <= exp(-n D(tau/n || p))`, valid when every
/// round's conditional success probability is at most `p` and `tau > n*p`.
pub fn chernoff_upper(q: &TailBoundQuery) -> Result<TailBound, BoundsError> {
    let (n, tau, p) = (q.n as f64, q.tau as f64, q.p);
    if tau <= n * p {
        return Err(BoundsError::RegimeViolation(
            "upper tail requires tau > n*p",
        ));
    }
    let d = kl_bernoulli(tau / n, p)?;
    Ok(TailBound::from_ln(-n * d))
}

/// Lower tail `Pr[S <= tau] <= exp(-n D(tau/n || p))`, valid when every
/// round's conditional success probability is at least `p` and `tau < n*p`.
/// This is the completeness-failure bound for honest sessions under noise.
pub fn chernoff_lower(q: &TailBoundQuery) -> Result<TailBound, BoundsError> {
    let (n, tau, p) = (q.n as f64, q.tau as f64, q.p);
    if tau >= n * p {
        return Err(BoundsError::RegimeViolation(
            "lower tail requires tau < n*p",
        ));
    }
    let d = kl_bernoulli(tau / n, p)?;
    Ok(TailBound::from_ln(-n * d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSide {
    Upper,
    Lower,
}

/// Exact binomial tail `sum_k C(n,k) p^k (1-p)^(n-k)` over `k >= tau`
/// (upper) or `k <= tau` (lower), evaluated in log space. Serves as the
/// brute-force oracle the Chernoff bounds are checked against.
pub fn binomial_tail_exact(
    n: usize,
    tau: usize,
    p: f64,
    side: TailSide,
) -> Result<TailBound, BoundsError> {
    if n == 0 || n > 10_000 {
        return Err(BoundsError::InvalidParameter(
            "exact summation supports 1 <= n <= 10^4",
        ));
    }
    if tau > n {
        return Err(BoundsError::InvalidParameter("tau must be <= n"));
    }
    if !p.is_finite() || p <= 0.0 || p >= 1.0 {
        return Err(BoundsError::InvalidParameter("p must be in (0, 1)"));
    }
    let ln_p = math::ln(p);
    let ln_q = math::ln(1.0 - p);
    let ln_fact_n = math::ln_gamma(n as f64 + 1.0);
    let range: Vec<usize> = match side {
        TailSide::Upper => (tau..=n).collect(),
        TailSide::Lower => (0..=tau).collect(),
    };
    let terms: Vec<f64> = range
        .into_iter()
        .map(|k| {
            let ln_choose =
                ln_fact_n - math::ln_gamma(k as f64 + 1.0) - math::ln_gamma((n - k) as f64 + 1.0);
            ln_choose + k as f64 * ln_p + (n - k) as f64 * ln_q
        })
        .collect();
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| math::exp(t - max)).sum();
    // Tail of a distribution, so never above 1.
    Ok(TailBound::from_ln((max + math::ln(sum)).min(0.0)))
}

/// Honest per-round acceptance probability under per-hop depolarizing noise:
/// the round survives iff both hops preserve the bit or both flip it, giving
/// `(1 - eta/2)^2 + (eta/2)^2 = 1 - eta + eta^2/2`.
pub fn honest_round_prob(eta: f64) -> Result<f64, BoundsError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(BoundsError::InvalidParameter("eta must be in [0, 1]"));
    }
    Ok(1.0 - eta + eta * eta / 2.0)
}

/// Output of [`min_rounds`]: the smallest round count meeting the target,
/// the matching integer threshold, and the bound actually achieved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizingResult {
    pub n_required: usize,
    pub tau: usize,
    pub bound: TailBound,
}

fn bound_ln_at(n: usize, d: f64) -> f64 {
    -(n as f64) * d
}

/// Smallest `n` such that `exp(-n D(u || p)) <= 2^target_log2`, for a
/// threshold ratio `u = tau/n`. The reported `tau` is `ceil(u * n)`.
///
/// The closed-form ceiling can land one off at boundaries, so the candidate
/// is adjusted by direct search until `n` meets the target and `n - 1` does
/// not.
pub fn min_rounds(u: f64, p: f64, target_log2: f64) -> Result<SizingResult, BoundsError> {
    if !p.is_finite() || p <= 0.0 || p >= 1.0 {
        return Err(BoundsError::InvalidParameter("p must be in (0, 1)"));
    }
    if !(u > p && u <= 1.0) {
        return Err(BoundsError::RegimeViolation("requires p < u <= 1"));
    }
    if !target_log2.is_finite() || target_log2 >= 0.0 {
        return Err(BoundsError::InvalidParameter("target_log2 must be < 0"));
    }
    let d = if u == 1.0 {
        math::ln(1.0 / p)
    } else {
        kl_bernoulli(u, p)?
    };
    let target_ln = target_log2 * math::LN_2;
    let estimate = target_ln / -d;
    // A ratio within float dust of p drives the divergence toward zero and
    // the required round count out of any usable range.
    if !(estimate.is_finite() && estimate < 1e15) {
        return Err(BoundsError::RegimeViolation(
            "required rounds exceed the supported range; move u away from p",
        ));
    }
    let mut n = math::ceil(estimate).max(1.0) as usize;
    while n > 1 && bound_ln_at(n - 1, d) <= target_ln {
        n -= 1;
    }
    while bound_ln_at(n, d) > target_ln {
        n += 1;
    }
    let tau = math::ceil(u * n as f64) as usize;
    Ok(SizingResult {
        n_required: n,
        tau: tau.min(n),
        bound: TailBound::from_ln(bound_ln_at(n, d)),
    })
}

/// Integer acceptance threshold `tau = ceil(n (max(p_df, p_mf) + eps_prime))`
/// guaranteeing the upper-tail regime against both cheating bounds.
pub fn threshold_size(
    n: usize,
    p_df: f64,
    p_mf: f64,
    eps_prime: f64,
) -> Result<usize, BoundsError> {
    if n == 0 {
        return Err(BoundsError::InvalidParameter("n must be >= 1"));
    }
    if !(0.0..1.0).contains(&p_df) || !(0.0..1.0).contains(&p_mf) {
        return Err(BoundsError::InvalidParameter(
            "per-round bounds must be in [0, 1)",
        ));
    }
    if !eps_prime.is_finite() || eps_prime <= 0.0 {
        return Err(BoundsError::InvalidParameter("eps_prime must be > 0"));
    }
    let p_max = p_df.max(p_mf);
    if p_max + eps_prime >= 1.0 {
        return Err(BoundsError::RegimeViolation(
            "requires max(p_df, p_mf) + eps_prime < 1",
        ));
    }
    Ok(math::ceil(n as f64 * (p_max + eps_prime)) as usize)
}

/// Maximum tolerable per-hop depolarizing noise for completeness at threshold
/// ratio `u`: `eta_max = 1 - sqrt(2u - 1)`, the solution of
/// `honest_round_prob(eta) = u` on `[0, 1]`.
pub fn max_noise(u: f64) -> Result<f64, BoundsError> {
    if !(u > 0.5 && u < 1.0) {
        return Err(BoundsError::RegimeViolation("requires 1/2 < u < 1"));
    }
    Ok(1.0 - math::sqrt(2.0 * u - 1.0))
}

/// Probabilities are printed with 12 digits after the point (12 significant
/// digits on `[0, 1)` values).
pub fn fmt_probability(p: f64) -> String {
    format!("{p:.12}")
}

/// Base-2 logarithms are printed with 4 decimals.
pub fn fmt_log2(x: f64) -> String {
    format!("{x:.4}")
}

/// One metric row of the comparison table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table1Row {
    pub metric: &'static str,
    pub classical_value: String,
    pub qubit_value: String,
}

/// Comparison of the qubit protocol against the classical challenge-response
/// baseline in the noiseless strict-threshold setting (`tau = n`), at a
/// session false-acceptance target of `2^-80`.
pub fn table1() -> Result<Vec<Table1Row>, BoundsError> {
    let target = -80.0;
    let hk_rounds = min_rounds(1.0, PER_ROUND_CLASSICAL_BASELINE, target)?.n_required;
    let qdb_df_rounds = min_rounds(1.0, PER_ROUND_DF, target)?.n_required;
    let qdb_mf_rounds = min_rounds(1.0, PER_ROUND_MF, target)?.n_required;
    Ok(alloc::vec![
        Table1Row {
            metric: "per_round_df",
            classical_value: fmt_probability(PER_ROUND_CLASSICAL_BASELINE),
            qubit_value: fmt_probability(PER_ROUND_DF),
        },
        Table1Row {
            metric: "per_round_mf",
            classical_value: fmt_probability(PER_ROUND_CLASSICAL_BASELINE),
            qubit_value: fmt_probability(PER_ROUND_MF),
        },
        Table1Row {
            metric: "rounds_df_pfa_2pow-80",
            classical_value: format!("{hk_rounds}"),
            qubit_value: format!("{qdb_df_rounds}"),
        },
        Table1Row {
            metric: "rounds_mf_pfa_2pow-80",
            classical_value: format!("{hk_rounds}"),
            qubit_value: format!("{qdb_mf_rounds}"),
        },
    ])
}

/// CSV rendering of [`table1`], schema `(metric, hk_value, qdb_value)`.
pub fn table1_csv() -> Result<String, BoundsError> {
    let mut out = String::from("metric,hk_value,qdb_value\n");
    for row in table1()? {
        out.push_str(&format!(
            "{},{},{}\n",
            row.metric, row.classical_value, row.qubit_value
        ));
    }
    Ok(out)
}

/// One grid point of the threshold-ratio trade-off curves. Columns are `None`
/// outside their valid domain.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffRow {
    pub u: f64,
    pub n_df: Option<usize>,
    pub n_mf: Option<usize>,
    pub eta_max: Option<f64>,
}

/// Default threshold-ratio grid: `0.880, 0.885, ..., 0.995` plus `1.0`.
pub fn default_u_grid() -> Vec<f64> {
    let mut grid: Vec<f64> = (0..24).map(|k| (880 + 5 * k) as f64 / 1000.0).collect();
    grid.push(1.0);
    grid
}

/// Rounds required against DF and MF and the completeness noise budget, per
/// threshold ratio, at session false-accept target `2^target_log2`.
pub fn tradeoff_curves(u_grid: &[f64], target_log2: f64) -> Result<Vec<TradeoffRow>, BoundsError> {
    if !target_log2.is_finite() || target_log2 >= 0.0 {
        return Err(BoundsError::InvalidParameter("target_log2 must be < 0"));
    }
    let mut rows = Vec::with_capacity(u_grid.len());
    for &u in u_grid {
        if !(u > 0.0 && u <= 1.0) {
            return Err(BoundsError::InvalidParameter(
                "grid ratios must be in (0, 1]",
            ));
        }
        let n_df = (u > PER_ROUND_DF)
            .then(|| min_rounds(u, PER_ROUND_DF, target_log2))
            .transpose()?
            .map(|s| s.n_required);
        let n_mf = (u > PER_ROUND_MF)
            .then(|| min_rounds(u, PER_ROUND_MF, target_log2))
            .transpose()?
            .map(|s| s.n_required);
        let eta_max = if u == 1.0 {
            // Limit of 1 - sqrt(2u - 1) as u -> 1.
            Some(0.0)
        } else if u > 0.5 {
            Some(max_noise(u)?)
        } else {
            None
        };
        rows.push(TradeoffRow {
            u,
            n_df,
            n_mf,
            eta_max,
        });
    }
    Ok(rows)
}

/// CSV rendering of [`tradeoff_curves`], schema `(u, n_df, n_mf, eta_max)`;
/// out-of-domain cells are empty.
pub fn tradeoff_csv(rows: &[TradeoffRow]) -> String {
    let mut out = String::from("u,n_df,n_mf,eta_max\n");
    for row in rows {
        let n_df = row.n_df.map(|n| format!("{n}")).unwrap_or_default();
        let n_mf = row.n_mf.map(|n| format!("{n}")).unwrap_or_default();
        let eta = row.eta_max.map(fmt_probability).unwrap_or_default();
        out.push_str(&format!("{:.3},{},{},{}\n", row.u, n_df, n_mf, eta));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        math::abs(a - b) <= tol
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_bernoulli(0.5, 0.5).unwrap(), 0.0);
        assert!(close(kl_bernoulli(1.0, 0.5).unwrap(), math::LN_2, 1e-15));
        // Frozen from direct evaluation of u ln(u/v) + (1-u) ln((1-u)/(1-v)).
        assert!(close(
            kl_bernoulli(0.75, 0.5).unwrap(),
            0.13081203594113697,
            1e-12
        ));
        assert!(kl_bernoulli(0.5, 0.0).is_err());
        assert!(kl_bernoulli(0.5, 1.0).is_err());
        assert!(kl_bernoulli(1.5, 0.5).is_err());
        assert!(kl_bernoulli(0.5, f64::NAN).is_err());
        assert!(kl_bernoulli(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn kl_dominates_pinsker() {
        for ui in 0..=100 {
            let u = ui as f64 / 100.0;
            for vi in 1..100 {
                let v = vi as f64 / 100.0;
                let d = kl_bernoulli(u, v).unwrap();
                assert!(d >= 2.0 * (u - v) * (u - v) - 1e-12, "u={u} v={v}");
                if u == v {
                    assert_eq!(d, 0.0);
                } else {
                    assert!(d > 0.0);
                }
            }
        }
    }

    #[test]
    fn chernoff_upper_examples() {
        let q = TailBoundQuery::new(80, 80, 0.5).unwrap();
        let b = chernoff_upper(&q).unwrap();
        assert!(close(b.log2(), -80.0, 1e-9));

        let q = TailBoundQuery::new(416, 416, 0.875).unwrap();
        let b = chernoff_upper(&q).unwrap();
        assert!(b.log2() <= -80.0);
        assert!(close(b.log2(), -80.14035242403666, 1e-6));

        let q = TailBoundQuery::new(415, 415, 0.875).unwrap();
        assert!(chernoff_upper(&q).unwrap().log2() > -80.0);

        // Vacuous regime is a hard error, not a silent 1.
        let q = TailBoundQuery::new(100, 50, 0.5).unwrap();
        assert!(matches!(
            chernoff_upper(&q),
            Err(BoundsError::RegimeViolation(_))
        ));
    }

    #[test]
    fn chernoff_lower_examples() {
        // tau = 0 reduces to (1-p)^n.
        let q = TailBoundQuery::new(50, 0, 0.82).unwrap();
        let b = chernoff_lower(&q).unwrap();
        assert!(close(b.ln(), 50.0 * math::ln(1.0 - 0.82), 1e-9));

        // Frozen from direct evaluation (1000 rounds, tau 800, p 0.905).
        let q = TailBoundQuery::new(1000, 800, 0.905).unwrap();
        let b = chernoff_lower(&q).unwrap();
        assert!(close(b.log2(), -72.46588253208107, 1e-6));

        let q = TailBoundQuery::new(1000, 950, 0.905).unwrap();
        assert!(matches!(
            chernoff_lower(&q),
            Err(BoundsError::RegimeViolation(_))
        ));
    }

    #[test]
    fn binomial_examples() {
        let b = binomial_tail_exact(2, 1, 0.5, TailSide::Upper).unwrap();
        assert!(close(b.probability(), 0.75, 1e-12));

        let b = binomial_tail_exact(10, 10, 0.3, TailSide::Upper).unwrap();
        assert!(close(b.ln(), 10.0 * math::ln(0.3), 1e-9));

        let b = binomial_tail_exact(80, 80, 0.5, TailSide::Upper).unwrap();
        let c = chernoff_upper(&TailBoundQuery::new(80, 80, 0.5).unwrap()).unwrap();
        assert!(close(b.log2(), c.log2(), 1e-9));

        assert!(binomial_tail_exact(20_000, 1, 0.5, TailSide::Upper).is_err());
    }

    #[test]
    fn chernoff_dominates_exact_binomial_tails() {
        // Brute-force oracle over every valid (n, tau) pair on a probability
        // grid; the analytical bound must sit at or above the exact tail.
        for p in [0.5, 0.75, 0.875, 0.905] {
            for n in 1..=64usize {
                for tau in 0..=n {
                    let q = TailBoundQuery::new(n, tau, p).unwrap();
                    if (tau as f64) > n as f64 * p {
                        let bound = chernoff_upper(&q).unwrap();
                        let exact = binomial_tail_exact(n, tau, p, TailSide::Upper).unwrap();
                        assert!(
                            bound.ln() >= exact.ln() - 1e-9,
                            "upper n={n} tau={tau} p={p}"
                        );
                    }
                    if (tau as f64) < n as f64 * p {
                        let bound = chernoff_lower(&q).unwrap();
                        let exact = binomial_tail_exact(n, tau, p, TailSide::Lower).unwrap();
                        assert!(
                            bound.ln() >= exact.ln() - 1e-9,
                            "lower n={n} tau={tau} p={p}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn log_space_survives_extreme_underflow() {
        let q = TailBoundQuery::new(20_000, 20_000, 0.5).unwrap();
        let b = chernoff_upper(&q).unwrap();
        assert_eq!(b.probability(), 0.0); // underflows as a plain float
        assert!(close(b.log2(), -20_000.0, 1e-6)); // stays finite in log space
        assert!(b.log2().is_finite());
    }

    #[test]
    fn honest_round_prob_examples() {
        assert_eq!(honest_round_prob(0.0).unwrap(), 1.0);
        assert_eq!(honest_round_prob(1.0).unwrap(), 0.5);
        assert!(close(honest_round_prob(0.2).unwrap(), 0.82, 1e-15));
        assert!(honest_round_prob(-0.1).is_err());
        assert!(honest_round_prob(1.5).is_err());
    }

    #[test]
    fn min_rounds_strict_threshold_matches_table() {
        assert_eq!(min_rounds(1.0, 0.5, -80.0).unwrap().n_required, 80);
        assert_eq!(min_rounds(1.0, 0.875, -80.0).unwrap().n_required, 416);
        assert_eq!(min_rounds(1.0, 0.75, -80.0).unwrap().n_required, 193);
    }

    #[test]
    fn min_rounds_general_ratio_and_minimality() {
        // 80 ln 2 / D(0.9 || 0.875) = 18244.11..., so 18245 is the smallest
        // round count actually meeting the target (18244 falls short).
        let s = min_rounds(0.9, 0.875, -80.0).unwrap();
        assert_eq!(s.n_required, 18245);
        assert_eq!(s.tau, 16421);
        let d = kl_bernoulli(0.9, 0.875).unwrap();
        assert!(bound_ln_at(s.n_required, d) <= -80.0 * math::LN_2);
        assert!(bound_ln_at(s.n_required - 1, d) > -80.0 * math::LN_2);

        // Minimality holds across a spread of queries.
        for (u, p, t) in [
            (1.0, 0.5, -80.0),
            (1.0, 0.875, -80.0),
            (0.95, 0.875, -80.0),
            (0.9, 0.5, -40.0),
            (0.6, 0.5, -20.0),
        ] {
            let s = min_rounds(u, p, t).unwrap();
            let d = if u == 1.0 {
                math::ln(1.0 / p)
            } else {
                kl_bernoulli(u, p).unwrap()
            };
            assert!(s.bound.log2() <= t);
            assert!(
                bound_ln_at(s.n_required, d) <= t * math::LN_2,
                "u={u} p={p}"
            );
            if s.n_required > 1 {
                assert!(
                    bound_ln_at(s.n_required - 1, d) > t * math::LN_2,
                    "not minimal for u={u} p={p}"
                );
            }
        }
    }

    #[test]
    fn min_rounds_monotone_in_ratio() {
        let mut last = usize::MAX;
        for ui in [880, 900, 925, 950, 975, 1000] {
            let u = ui as f64 / 1000.0;
            let n = min_rounds(u, 0.875, -80.0).unwrap().n_required;
            assert!(n <= last, "n not nonincreasing at u={u}");
            last = n;
        }
    }

    #[test]
    fn min_rounds_rejects_bad_regimes() {
        assert!(matches!(
            min_rounds(0.5, 0.5, -80.0),
            Err(BoundsError::RegimeViolation(_))
        ));
        assert!(matches!(
            min_rounds(0.4, 0.5, -80.0),
            Err(BoundsError::RegimeViolation(_))
        ));
        assert!(min_rounds(0.9, 0.5, 10.0).is_err());
        // A ratio within float dust of p would need ~10^28 rounds.
        assert!(matches!(
            min_rounds(0.875 + 1e-13, 0.875, -80.0),
            Err(BoundsError::RegimeViolation(_))
        ));
    }

    #[test]
    fn threshold_size_examples() {
        assert_eq!(threshold_size(1000, 0.5, 0.875, 0.05).unwrap(), 925);
        // n (p + eps) integral => exactly that integer.
        assert_eq!(threshold_size(100, 0.5, 0.5, 0.25).unwrap(), 75);
        // Resulting pair sits in the valid upper-tail regime.
        let n = 1000;
        let tau = threshold_size(n, 0.5, 0.875, 0.05).unwrap();
        assert!(tau as f64 > n as f64 * 0.875);
        assert!(tau <= n);
        assert!(chernoff_upper(&TailBoundQuery::new(n, tau, 0.875).unwrap()).is_ok());

        assert!(matches!(
            threshold_size(1000, 0.5, 0.875, 0.2),
            Err(BoundsError::RegimeViolation(_))
        ));
        assert!(threshold_size(1000, 0.5, 0.875, 0.0).is_err());
    }

    #[test]
    fn max_noise_examples() {
        assert!(close(max_noise(0.875).unwrap(), 0.1339745962155614, 1e-12));
        assert!(close(max_noise(0.9).unwrap(), 0.10557280900008414, 1e-12));
        // Completeness sanity at the boundary.
        assert!(honest_round_prob(0.1055).unwrap() > 0.9);
        assert!(honest_round_prob(0.1056).unwrap() < 0.9);
        // eta_max -> 0 as u -> 1.
        assert!(max_noise(0.999999).unwrap() < 1e-3);
        assert!(max_noise(0.5).is_err());
        assert!(max_noise(1.0).is_err());
    }

    #[test]
    fn honest_round_prob_exceeds_ratio_below_noise_budget() {
        for ui in [60, 75, 90, 99] {
            let u = ui as f64 / 100.0;
            let eta_max = max_noise(u).unwrap();
            for k in 1..10 {
                let eta = eta_max * k as f64 / 10.0;
                assert!(honest_round_prob(eta).unwrap() > u, "u={u} eta={eta}");
            }
        }
    }

    #[test]
    fn table1_values() {
        let rows = table1().unwrap();
        assert_eq!(rows[0].qubit_value, "0.500000000000");
        assert_eq!(rows[1].qubit_value, "0.875000000000");
        assert_eq!(rows[0].classical_value, "0.750000000000");
        assert_eq!(rows[2].classical_value, "193");
        assert_eq!(rows[2].qubit_value, "80");
        assert_eq!(rows[3].classical_value, "193");
        assert_eq!(rows[3].qubit_value, "416");
    }

    #[test]
    fn tradeoff_grid() {
        let grid = default_u_grid();
        assert_eq!(grid.len(), 25);
        assert_eq!(grid[0], 0.880);
        assert_eq!(grid[23], 0.995);
        assert_eq!(grid[24], 1.0);

        let rows = tradeoff_curves(&grid, -80.0).unwrap();
        let last = rows.last().unwrap();
        assert_eq!(last.n_df, Some(80));
        assert_eq!(last.n_mf, Some(416));
        assert_eq!(last.eta_max, Some(0.0));

        // n(u) strictly decreasing, eta_max matching the closed form.
        for w in rows.windows(2) {
            assert!(w[0].n_mf.unwrap() > w[1].n_mf.unwrap());
            assert!(w[0].n_df.unwrap() >= w[1].n_df.unwrap());
        }
        for row in &rows[..rows.len() - 1] {
            assert!(close(
                row.eta_max.unwrap(),
                1.0 - math::sqrt(2.0 * row.u - 1.0),
                1e-12
            ));
        }

        // Out-of-domain columns are empty.
        let rows = tradeoff_curves(&[0.6], -80.0).unwrap();
        assert_eq!(rows[0].n_mf, None);
        assert!(rows[0].n_df.is_some());
        let csv = tradeoff_csv(&rows);
        assert!(csv.contains("0.600,"));
    }
}
