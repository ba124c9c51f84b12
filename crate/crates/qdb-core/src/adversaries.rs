//! Prover-side behaviors: the honest prover, the distance-fraud prover, the
//! mafia-fraud relay pair, the terrorist-fraud pair, and the post-assistance
//! replay helper, together with exact per-round success oracles computed
//! directly on density matrices.
//!
//! Strategy summary:
//! - `honest`: measure the challenge in the round's challenge basis,
//!   re-encode the outcome in the response basis, reply immediately.
//! - `df`: a keyed prover beyond the bound pre-emits guessed responses in
//!   the known response bases, early enough to beat the deadline, without
//!   ever reading the challenges. Per round exactly 1/2.
//! - `mf`: keyless relays run a pre-ask phase against the honest prover
//!   with the probe state `cos(3pi/8)|0> + sin(3pi/8)|1>`, extract each
//!   round's basis parity with an optimal two-state measurement (correct
//!   with probability 3/4), then reflect or Hadamard the real challenge.
//!   Per round 3/4 * 1 + 1/4 * 1/2 = 7/8.
//! - `tf`: a keyed far prover leaks the session basis strings (never the
//!   key) to a near helper who then plays honestly. Per round 1.
//! - `tf-replay`: the helper from a terrorist-fraud session engages alone in
//!   a fresh session; its stale bases are useless, and its best
//!   challenge-independent reply succeeds with probability exactly 1/2.

use crate::protocol::{
    derive_secrets, keygen, ProverSide, RelayRoute, RoundSecrets, SessionConfig, SessionError,
    SessionOutcome, StationSpec,
};
use crate::quantum::{helstrom_success, Basis, Bit, HelstromMeasurement, QubitState};
use crate::rng::SplitRng;
use crate::timing::{LogMode, Party, Payload, Scheduler};
use alloc::boxed::Box;
use alloc::vec::Vec;
use core::cell::Cell;
use core::f64::consts::PI;
use core::fmt;

/// What a prover-side behavior learns once the slow phase fixes the nonces.
/// `secrets` is `None` for keyless parties; `fast_start` is the station's
/// projection of the verifier's fast-phase start when it can know it.
pub struct SetupView<'a> {
    pub n: usize,
    pub bound_b: f64,
    pub eta: f64,
    pub own_distance: f64,
    pub round_period: f64,
    pub fast_start: Option<f64>,
    pub secrets: Option<&'a RoundSecrets>,
}

/// Handle to an incoming challenge qubit. Reading the state is recorded so
/// the runner can verify that challenge-blind strategies never touch it.
pub struct IncomingQubit<'a> {
    state: &'a QubitState,
    arrival_time: f64,
    read: &'a Cell<bool>,
}

impl<'a> IncomingQubit<'a> {
    pub(crate) fn new(state: &'a QubitState, arrival_time: f64, read: &'a Cell<bool>) -> Self {
        IncomingQubit {
            state,
            arrival_time,
            read,
        }
    }

    /// Access the qubit (marks it as read).
    pub fn read(&self) -> &QubitState {
        self.read.set(true);
        self.state
    }

    pub fn arrival_time(&self) -> f64 {
        self.arrival_time
    }
}

/// Action surface handed to behaviors: emissions go through the causal
/// scheduler under the behavior's own identity and random stream.
pub struct ActionCtx<'a> {
    sched: &'a mut Scheduler,
    pub rng: &'a mut SplitRng,
    party: Party,
}

impl<'a> ActionCtx<'a> {
    pub(crate) fn new(sched: &'a mut Scheduler, rng: &'a mut SplitRng, party: Party) -> Self {
        ActionCtx { sched, rng, party }
    }

    pub fn now(&self) -> f64 {
        self.sched.now()
    }

    /// Emit a qubit right now on the physical channel.
    pub fn send_qubit(
        &mut self,
        to: Party,
        round: u32,
        state: QubitState,
    ) -> Result<(), SessionError> {
        let now = self.sched.now();
        self.sched
            .send(self.party, to, now, Some(round), Payload::Qubit(state))?;
        Ok(())
    }

    /// Schedule a qubit emission at `emit_time >= now` on the physical
    /// channel.
    pub fn send_qubit_at(
        &mut self,
        to: Party,
        round: u32,
        state: QubitState,
        emit_time: f64,
    ) -> Result<(), SessionError> {
        self.sched.send(
            self.party,
            to,
            emit_time,
            Some(round),
            Payload::Qubit(state),
        )?;
        Ok(())
    }

    /// Share parity guesses over the pre-fast out-of-band link.
    pub fn send_parity_guesses(
        &mut self,
        to: Party,
        guesses: Vec<Bit>,
    ) -> Result<(), SessionError> {
        self.sched
            .send_out_of_band(self.party, to, None, Payload::ParityGuesses(guesses))?;
        Ok(())
    }

    /// Leak the session basis strings (and nothing else) over the pre-fast
    /// out-of-band link.
    pub fn send_basis_leak(
        &mut self,
        to: Party,
        secrets: &RoundSecrets,
    ) -> Result<(), SessionError> {
        self.sched.send_out_of_band(
            self.party,
            to,
            None,
            Payload::BasisLeak {
                challenge_bases: secrets.challenge_bases().to_vec(),
                response_bases: secrets.response_bases().to_vec(),
            },
        )?;
        Ok(())
    }
}

/// A pluggable prover-side strategy with three entry points: `setup` after
/// the slow phase, `pre_fast` for pre-ask/leak/pre-emission actions, and
/// `on_challenge` for each incoming round-tagged qubit (returning `Some`
/// replies to the sender immediately).
pub trait ProverBehavior {
    fn setup(&mut self, view: &SetupView<'_>) {
        let _ = view;
    }

    fn pre_fast(&mut self, ctx: &mut ActionCtx<'_>) -> Result<(), SessionError> {
        let _ = ctx;
        Ok(())
    }

    fn on_challenge(
        &mut self,
        round: u32,
        qubit: &IncomingQubit<'_>,
        ctx: &mut ActionCtx<'_>,
    ) -> Result<Option<QubitState>, SessionError>;

    fn on_classical(
        &mut self,
        payload: &Payload,
        ctx: &mut ActionCtx<'_>,
    ) -> Result<(), SessionError> {
        let _ = (payload, ctx);
        Ok(())
    }

    /// Declared by strategies whose responses never depend on the incoming
    /// qubit; the runner then enforces that the handle stays unread.
    fn challenge_blind(&self) -> bool {
        false
    }
}

/// Measure the challenge in `challenge_basis`, re-encode the outcome in
/// `response_basis`. Consumes one draw. This is the honest per-round rule.
pub fn honest_response(
    challenge: &QubitState,
    challenge_basis: Basis,
    response_basis: Basis,
    rng: &mut SplitRng,
) -> QubitState {
    let outcome = challenge.sample_measurement(challenge_basis, rng);
    QubitState::bb84(outcome, response_basis)
}

/// A guessed response for a round whose challenge was never seen: a fresh
/// uniform bit encoded in the known response basis. Because the encoded bit
/// is independent of the challenge, the verifier's check passes with
/// probability exactly 1/2 whatever the response basis. One draw.
pub fn df_blind_response(response_basis: Basis, rng: &mut SplitRng) -> QubitState {
    QubitState::bb84(Bit::from_bool(rng.next_bool()), response_basis)
}

/// The pre-ask probe state `cos(3pi/8)|0> + sin(3pi/8)|1>`.
pub fn preask_probe_state() -> QubitState {
    crate::quantum::real_superposition(3.0 * PI / 8.0)
}

/// The honest prover's response mixture to the pre-ask probe for a given
/// round basis pair.
fn preask_response_mixture(challenge_basis: Basis, response_basis: Basis) -> QubitState {
    let probe = preask_probe_state();
    let dist = probe.measurement_distribution(challenge_basis);
    let m0 = QubitState::bb84(Bit::Zero, response_basis)
        .mat()
        .scale(dist.p_zero());
    let m1 = QubitState::bb84(Bit::One, response_basis)
        .mat()
        .scale(dist.p_one());
    QubitState::from_mat_unchecked(m0.add(m1))
}

/// The two equal-prior response mixtures conditioned on the basis parity
/// `k = a XOR b`: index 0 averages the equal-basis pairs, index 1 the
/// crossed pairs.
pub fn preask_parity_mixtures() -> (QubitState, QubitState) {
    let same = preask_response_mixture(Basis::Z, Basis::Z)
        .mat()
        .add(preask_response_mixture(Basis::X, Basis::X).mat())
        .scale(0.5);
    let crossed = preask_response_mixture(Basis::Z, Basis::X)
        .mat()
        .add(preask_response_mixture(Basis::X, Basis::Z).mat())
        .scale(0.5);
    (
        QubitState::from_mat_unchecked(same),
        QubitState::from_mat_unchecked(crossed),
    )
}

/// The optimal parity-extraction measurement for the pre-ask responses and
/// its exact success probability (3/4). Derived numerically from the
/// eigenbasis of the weighted mixture difference, not hard-coded.
pub fn preask_extraction() -> (HelstromMeasurement, f64) {
    let (rho_same, rho_crossed) = preask_parity_mixtures();
    let (p, measurement) = helstrom_success(&rho_same, &rho_crossed, 0.5).expect("valid mixtures");
    (measurement, p)
}

/// Transform the real challenge given a parity guess: reflect it unchanged
/// when the bases are believed equal, swap bases with a Hadamard otherwise.
pub fn mf_fast_response(challenge: &QubitState, parity_guess: Bit) -> QubitState {
    match parity_guess {
        Bit::Zero => *challenge,
        Bit::One => challenge.hadamard(),
    }
}

/// Honest prover: responds to every round-tagged qubit it receives with the
/// honest measure-and-re-encode rule.
pub struct HonestProver {
    secrets: Option<RoundSecrets>,
}

impl HonestProver {
    pub fn new() -> Self {
        HonestProver { secrets: None }
    }
}

impl Default for HonestProver {
    fn default() -> Self {
        Self::new()
    }
}

impl ProverBehavior for HonestProver {
    fn setup(&mut self, view: &SetupView<'_>) {
        self.secrets = view.secrets.cloned();
    }

    fn on_challenge(
        &mut self,
        round: u32,
        qubit: &IncomingQubit<'_>,
        ctx: &mut ActionCtx<'_>,
    ) -> Result<Option<QubitState>, SessionError> {
        let secrets = self
            .secrets
            .as_ref()
            .ok_or(SessionError::InvalidWiring("honest prover without secrets"))?;
        let i = round as usize;
        Ok(Some(honest_response(
            qubit.read(),
            secrets.challenge_basis(i),
            secrets.response_basis(i),
            ctx.rng,
        )))
    }
}

/// Distance-fraud prover: keyed, placed beyond the bound. During the
/// pre-fast window it schedules one guessed response per round, emitted so
/// that it arrives mid-window (timely), which forces the emission to happen
/// strictly before the challenge can reach it. It never reads a challenge.
pub struct DistanceFraudProver {
    planned: bool,
    secrets: Option<RoundSecrets>,
    n: usize,
    fast_start: f64,
    period: f64,
    own_delay: f64,
}

impl DistanceFraudProver {
    pub fn new() -> Self {
        DistanceFraudProver {
            planned: false,
            secrets: None,
            n: 0,
            fast_start: 0.0,
            period: 0.0,
            own_delay: 0.0,
        }
    }
}

impl Default for DistanceFraudProver {
    fn default() -> Self {
        Self::new()
    }
}

impl ProverBehavior for DistanceFraudProver {
    fn setup(&mut self, view: &SetupView<'_>) {
        self.secrets = view.secrets.cloned();
        self.n = view.n;
        self.fast_start = view.fast_start.unwrap_or(f64::NAN);
        self.period = view.round_period;
        self.own_delay = view.own_distance / crate::timing::SPEED_OF_LIGHT_M_PER_S;
        self.planned = true;
    }

    fn pre_fast(&mut self, ctx: &mut ActionCtx<'_>) -> Result<(), SessionError> {
        let secrets = self
            .secrets
            .as_ref()
            .ok_or(SessionError::InvalidWiring("fraud prover without secrets"))?;
        if !self.fast_start.is_finite() {
            return Err(SessionError::InvalidWiring(
                "fraud prover needs the fast-phase schedule",
            ));
        }
        for i in 1..=self.n {
            let state = df_blind_response(secrets.response_basis(i), ctx.rng);
            // Target arrival at the middle of round i's window.
            let challenge_time = self.fast_start + (i as f64 - 1.0) * self.period;
            let emit = challenge_time + 0.5 * self.period - self.own_delay;
            if emit < ctx.now() {
                // Too far away to answer this round at all; leave it blank.
                continue;
            }
            ctx.send_qubit_at(Party::Verifier, i as u32, state, emit)?;
        }
        Ok(())
    }

    fn on_challenge(
        &mut self,
        _round: u32,
        _qubit: &IncomingQubit<'_>,
        _ctx: &mut ActionCtx<'_>,
    ) -> Result<Option<QubitState>, SessionError> {
        // Responses were fixed before the challenges could arrive.
        Ok(None)
    }

    fn challenge_blind(&self) -> bool {
        true
    }
}

/// Far-side relay of the mafia-fraud pair: runs the pre-ask extraction
/// against the honest prover during the pre-fast window, then ships its
/// parity guesses to the near relay over the out-of-band link.
pub struct FarRelayExtractor {
    n: usize,
    measurement: HelstromMeasurement,
    guesses: Vec<Option<Bit>>,
    collected: usize,
    sent: bool,
}

impl FarRelayExtractor {
    pub fn new() -> Self {
        let (measurement, success) = preask_extraction();
        debug_assert!((success - 0.75).abs() <= 1e-9);
        FarRelayExtractor {
            n: 0,
            measurement,
            guesses: Vec::new(),
            collected: 0,
            sent: false,
        }
    }
}

impl Default for FarRelayExtractor {
    fn default() -> Self {
        Self::new()
    }
}

impl ProverBehavior for FarRelayExtractor {
    fn setup(&mut self, view: &SetupView<'_>) {
        self.n = view.n;
        self.guesses = alloc::vec![None; view.n];
    }

    fn pre_fast(&mut self, ctx: &mut ActionCtx<'_>) -> Result<(), SessionError> {
        for i in 1..=self.n {
            ctx.send_qubit(Party::Prover, i as u32, preask_probe_state())?;
        }
        Ok(())
    }

    fn on_challenge(
        &mut self,
        round: u32,
        qubit: &IncomingQubit<'_>,
        ctx: &mut ActionCtx<'_>,
    ) -> Result<Option<QubitState>, SessionError> {
        // These are the honest prover's pre-ask responses, not challenges.
        let idx = round as usize - 1;
        if idx < self.guesses.len() && self.guesses[idx].is_none() {
            let guess = self.measurement.sample(qubit.read(), ctx.rng);
            self.guesses[idx] = Some(guess);
            self.collected += 1;
            if self.collected == self.n && !self.sent {
                self.sent = true;
                let all: Vec<Bit> = self.guesses.iter().map(|g| g.unwrap()).collect();
                ctx.send_parity_guesses(Party::NearHelper, all)?;
            }
        }
        Ok(None)
    }
}

/// Near-side relay of the mafia-fraud pair: answers the verifier's real
/// challenges by reflecting them (parity guess 0) or swapping bases with a
/// Hadamard (parity guess 1).
pub struct NearRelayResponder {
    guesses: Option<Vec<Bit>>,
}

impl NearRelayResponder {
    pub fn new() -> Self {
        NearRelayResponder { guesses: None }
    }
}

impl Default for NearRelayResponder {
    fn default() -> Self {
        Self::new()
    }
}

impl ProverBehavior for NearRelayResponder {
    fn on_classical(
        &mut self,
        payload: &Payload,
        _ctx: &mut ActionCtx<'_>,
    ) -> Result<(), SessionError> {
        if let Payload::ParityGuesses(guesses) = payload {
            self.guesses = Some(guesses.clone());
        }
        Ok(())
    }

    fn on_challenge(
        &mut self,
        round: u32,
        qubit: &IncomingQubit<'_>,
        _ctx: &mut ActionCtx<'_>,
    ) -> Result<Option<QubitState>, SessionError> {
        let guesses = self
            .guesses
            .as_ref()
            .ok_or(SessionError::InvalidWiring("fast phase before pre-ask"))?;
        let guess = guesses[round as usize - 1];
        Ok(Some(mf_fast_response(qubit.read(), guess)))
    }
}

/// Terrorist-fraud prover: keyed and far; leaks the session basis strings
/// (only the bases, structurally never the key) to the near helper before
/// the fast phase, then stays silent.
pub struct LeakingProver {
    secrets: Option<RoundSecrets>,
}

impl LeakingProver {
    pub fn new() -> Self {
        LeakingProver { secrets: None }
    }
}

impl Default for LeakingProver {
    fn default() -> Self {
        Self::new()
    }
}

impl ProverBehavior for LeakingProver {
    fn setup(&mut self, view: &SetupView<'_>) {
        self.secrets = view.secrets.cloned();
    }

    fn pre_fast(&mut self, ctx: &mut ActionCtx<'_>) -> Result<(), SessionError> {
        let secrets = self.secrets.as_ref().ok_or(SessionError::InvalidWiring(
            "leaking prover without secrets",
        ))?;
        ctx.send_basis_leak(Party::NearHelper, secrets)
    }

    fn on_challenge(
        &mut self,
        _round: u32,
        _qubit: &IncomingQubit<'_>,
        _ctx: &mut ActionCtx<'_>,
    ) -> Result<Option<QubitState>, SessionError> {
        Ok(None)
    }
}

/// Terrorist-fraud helper: co-located with the verifier, plays the honest
/// rule using the leaked basis strings.
pub struct LeakedBasisHelper {
    secrets: Option<RoundSecrets>,
}

impl LeakedBasisHelper {
    pub fn new() -> Self {
        LeakedBasisHelper { secrets: None }
    }

    pub fn leaked_secrets(&self) -> Option<&RoundSecrets> {
        self.secrets.as_ref()
    }
}

impl Default for LeakedBasisHelper {
    fn default() -> Self {
        Self::new()
    }
}

impl ProverBehavior for LeakedBasisHelper {
    fn on_classical(
        &mut self,
        payload: &Payload,
        _ctx: &mut ActionCtx<'_>,
    ) -> Result<(), SessionError> {
        if let Payload::BasisLeak {
            challenge_bases,
            response_bases,
        } = payload
        {
            self.secrets = Some(RoundSecrets::from_bases(
                challenge_bases.clone(),
                response_bases.clone(),
            ));
        }
        Ok(())
    }

    fn on_challenge(
        &mut self,
        round: u32,
        qubit: &IncomingQubit<'_>,
        ctx: &mut ActionCtx<'_>,
    ) -> Result<Option<QubitState>, SessionError> {
        let secrets = self.secrets.as_ref().ok_or(SessionError::InvalidWiring(
            "helper never received the leak",
        ))?;
        let i = round as usize;
        Ok(Some(honest_response(
            qubit.read(),
            secrets.challenge_basis(i),
            secrets.response_basis(i),
            ctx.rng,
        )))
    }
}

/// The helper after a terrorist-fraud session, engaging alone in a fresh
/// session. Its stale basis strings say nothing about the fresh ones, so it
/// falls back to the best challenge-independent reply: a fresh uniform bit
/// in a fixed basis, which succeeds with probability exactly 1/2 per round.
/// (Replying with its measurement of the fresh challenge would correlate
/// the response with the challenge; the replay bound concerns strategies
/// fixed before the challenge is known, and this one is, matching the
/// pre-emission structure of distance fraud.)
pub struct ReplayHelper {
    stale: RoundSecrets,
}

impl ReplayHelper {
    pub fn new(stale: RoundSecrets) -> Self {
        ReplayHelper { stale }
    }

    pub fn stale_secrets(&self) -> &RoundSecrets {
        &self.stale
    }
}

impl ProverBehavior for ReplayHelper {
    fn on_challenge(
        &mut self,
        _round: u32,
        _qubit: &IncomingQubit<'_>,
        ctx: &mut ActionCtx<'_>,
    ) -> Result<Option<QubitState>, SessionError> {
        Ok(Some(df_blind_response(Basis::Z, ctx.rng)))
    }

    fn challenge_blind(&self) -> bool {
        true
    }
}

/// The selectable prover-side strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Attack {
    Honest,
    Df,
    Mf,
    Tf,
    TfReplay,
}

impl Attack {
    pub const ALL: [Attack; 5] = [
        Attack::Honest,
        Attack::Df,
        Attack::Mf,
        Attack::Tf,
        Attack::TfReplay,
    ];

    pub fn parse(s: &str) -> Option<Attack> {
        match s {
            "honest" => Some(Attack::Honest),
            "df" => Some(Attack::Df),
            "mf" => Some(Attack::Mf),
            "tf" => Some(Attack::Tf),
            "tf-replay" => Some(Attack::TfReplay),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Attack::Honest => "honest",
            Attack::Df => "df",
            Attack::Mf => "mf",
            Attack::Tf => "tf",
            Attack::TfReplay => "tf-replay",
        }
    }

    /// Fraud strategies only make sense with the prover beyond the bound.
    pub fn requires_far_prover(self) -> bool {
        !matches!(self, Attack::Honest)
    }
}

impl fmt::Display for Attack {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleError {
    /// Adversarial strategies are analyzed noiselessly; a nonzero eta is an
    /// unmodeled combination.
    NoisyAdversary {
        attack: Attack,
        eta: f64,
    },
    InvalidEta(f64),
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::NoisyAdversary { attack, eta } => {
                write!(
                    f,
                    "strategy {attack} is only modeled noiselessly (eta = {eta})"
                )
            }
            OracleError::InvalidEta(eta) => write!(f, "eta {eta} outside [0, 1]"),
        }
    }
}

impl core::error::Error for OracleError {}

/// Build the prover-side wiring for a strategy. Distances come from
/// `config.prover_distance`; near-side helpers sit at the verifier.
pub fn attack_prover_side(
    attack: Attack,
    config: &SessionConfig,
) -> Result<ProverSide, SessionError> {
    if attack.requires_far_prover() && config.prover_distance <= config.bound_b {
        return Err(SessionError::InvalidWiring(
            "fraud strategies require prover_distance > bound_b",
        ));
    }
    let d = config.prover_distance;
    Ok(match attack {
        Attack::Honest => ProverSide {
            peer: Party::Prover,
            stations: alloc::vec![StationSpec {
                party: Party::Prover,
                distance: d,
                keyed: true,
                replies_nonce: true,
                relay: None,
                behavior: Box::new(HonestProver::new()),
            }],
        },
        Attack::Df => ProverSide {
            peer: Party::Prover,
            stations: alloc::vec![StationSpec {
                party: Party::Prover,
                distance: d,
                keyed: true,
                replies_nonce: true,
                relay: None,
                behavior: Box::new(DistanceFraudProver::new()),
            }],
        },
        Attack::Mf => ProverSide {
            // The near relay impersonates the prover toward the verifier.
            peer: Party::NearHelper,
            stations: alloc::vec![
                StationSpec {
                    party: Party::Prover,
                    distance: d,
                    keyed: true,
                    replies_nonce: true,
                    relay: None,
                    behavior: Box::new(HonestProver::new()),
                },
                StationSpec {
                    party: Party::NearHelper,
                    distance: 0.0,
                    keyed: false,
                    replies_nonce: false,
                    relay: Some(RelayRoute {
                        upstream: Party::Verifier,
                        downstream: Party::FarHelper,
                        oob_upstream: false,
                        oob_downstream: true,
                    }),
                    behavior: Box::new(NearRelayResponder::new()),
                },
                StationSpec {
                    party: Party::FarHelper,
                    distance: d,
                    keyed: false,
                    replies_nonce: false,
                    relay: Some(RelayRoute {
                        upstream: Party::NearHelper,
                        downstream: Party::Prover,
                        oob_upstream: true,
                        oob_downstream: false,
                    }),
                    behavior: Box::new(FarRelayExtractor::new()),
                },
            ],
        },
        Attack::Tf => ProverSide {
            peer: Party::NearHelper,
            stations: alloc::vec![
                StationSpec {
                    party: Party::Prover,
                    distance: d,
                    keyed: true,
                    replies_nonce: true,
                    relay: None,
                    behavior: Box::new(LeakingProver::new()),
                },
                StationSpec {
                    party: Party::NearHelper,
                    distance: 0.0,
                    keyed: false,
                    replies_nonce: false,
                    relay: Some(RelayRoute {
                        upstream: Party::Verifier,
                        downstream: Party::Prover,
                        oob_upstream: false,
                        oob_downstream: true,
                    }),
                    behavior: Box::new(LeakedBasisHelper::new()),
                },
            ],
        },
        Attack::TfReplay => {
            // Wiring for the fresh session only; the stale secrets are
            // supplied by `run_attack_session`.
            return Err(SessionError::InvalidWiring(
                "tf-replay wiring needs the prior session; use run_attack_session",
            ));
        }
    })
}

/// Derive the secrets a terrorist-fraud helper retained from a prior
/// session: the key is reconstructed from the prior session's seed (both
/// parties held it) and the nonces come from its transcript.
fn stale_secrets_from(
    prior_config: &SessionConfig,
    prior: &SessionOutcome,
) -> Result<RoundSecrets, SessionError> {
    let root = SplitRng::new(prior_config.seed);
    let mut key_rng = root.split(0);
    let key = keygen(prior_config.lambda, &mut key_rng)?;
    Ok(derive_secrets(
        &key,
        &prior.transcript.verifier_nonce,
        &prior.transcript.prover_nonce,
        prior_config.n,
    )?)
}

/// Run one session under the given strategy. For `tf-replay` this runs a
/// full terrorist-fraud session first (seed split 0), hands the helper's
/// retained basis strings to a fresh session (seed split 1, fresh key and
/// nonces, no further prover contact), and returns the fresh session.
pub fn run_attack_session(
    config: &SessionConfig,
    attack: Attack,
    mode: LogMode,
) -> Result<SessionOutcome, SessionError> {
    match attack {
        Attack::TfReplay => {
            let root = SplitRng::new(config.seed);
            let mut prior_config = *config;
            prior_config.seed = root.split(0).next_u64();
            let prior = crate::protocol::run_session(
                &prior_config,
                attack_prover_side(Attack::Tf, &prior_config)?,
                LogMode::CountsOnly,
            )?;
            let stale = stale_secrets_from(&prior_config, &prior)?;

            let mut fresh_config = *config;
            fresh_config.seed = root.split(1).next_u64();
            let wiring = ProverSide {
                peer: Party::NearHelper,
                stations: alloc::vec![StationSpec {
                    party: Party::NearHelper,
                    distance: 0.0,
                    keyed: false,
                    replies_nonce: true,
                    relay: None,
                    behavior: Box::new(ReplayHelper::new(stale)),
                }],
            };
            crate::protocol::run_session(&fresh_config, wiring, mode)
        }
        _ => crate::protocol::run_session(config, attack_prover_side(attack, config)?, mode),
    }
}

/// Exact per-round acceptance probability of a strategy, computed in closed
/// form on density matrices, averaging over the uniform challenge bit and
/// (where the strategy depends on them) the uniform basis pair.
///
/// Adversarial strategies are modeled noiselessly; only `honest` accepts a
/// nonzero depolarizing parameter.
pub fn exact_round_success(attack: Attack, eta: f64) -> Result<f64, OracleError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(OracleError::InvalidEta(eta));
    }
    if eta > 0.0 && attack != Attack::Honest {
        return Err(OracleError::NoisyAdversary { attack, eta });
    }
    Ok(match attack {
        Attack::Honest => honest_oracle(eta),
        Attack::Df => blind_response_oracle(),
        Attack::Mf => preask_attack_oracle(),
        Attack::Tf => honest_oracle(0.0),
        Attack::TfReplay => blind_response_oracle(),
    })
}

/// Average over challenge bit and both bases of the full noisy round:
/// depolarize, honest measurement, re-encode, depolarize, verifier check.
fn honest_oracle(eta: f64) -> f64 {
    let mut total = 0.0;
    let mut cases = 0u32;
    for a in Basis::BOTH {
        for b in Basis::BOTH {
            for c in Bit::BOTH {
                let challenge = QubitState::bb84(c, a).depolarize(eta).expect("eta checked");
                let first_hop = challenge.measurement_distribution(a);
                let mut p_accept = 0.0;
                for c_prime in Bit::BOTH {
                    let response = QubitState::bb84(c_prime, b)
                        .depolarize(eta)
                        .expect("eta checked");
                    p_accept += first_hop.probability_of(c_prime)
                        * response.measurement_distribution(b).probability_of(c);
                }
                total += p_accept;
                cases += 1;
            }
        }
    }
    total / cases as f64
}

/// A response whose encoded bit is independent of the challenge: summing the
/// two basis projectors to identity gives exactly 1/2 whatever the response
/// basis the verifier measures in.
fn blind_response_oracle() -> f64 {
    let mut total = 0.0;
    let mut cases = 0u32;
    for b_response in Basis::BOTH {
        for b_verifier in Basis::BOTH {
            for r in Bit::BOTH {
                for c in Bit::BOTH {
                    let response = QubitState::bb84(r, b_response);
                    total += response
                        .measurement_distribution(b_verifier)
                        .probability_of(c);
                    cases += 1;
                }
            }
        }
    }
    total / cases as f64
}

/// Per basis pair: probability the extraction guesses the parity right,
/// then 1 on a correct guess and 1/2 on a wrong one.
fn preask_attack_oracle() -> f64 {
    let (measurement, _) = preask_extraction();
    let mut total = 0.0;
    for a in Basis::BOTH {
        for b in Basis::BOTH {
            let mixture = preask_response_mixture(a, b);
            let p_guess_crossed = measurement.probability_guess_one(&mixture);
            let p_correct = match Basis::parity(a, b) {
                Bit::One => p_guess_crossed,
                Bit::Zero => 1.0 - p_guess_crossed,
            };
            total += p_correct * 1.0 + (1.0 - p_correct) * 0.5;
        }
    }
    total / 4.0
}
