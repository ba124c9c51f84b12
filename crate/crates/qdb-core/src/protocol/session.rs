//! Reactive session driver: a verifier state machine plus one reactor per
//! prover-side station, all running on the causal scheduler.
//!
//! The fast phase uses back-to-back round windows: challenge `i` is emitted
//! at `fast_start + (i-1) * period` with `period = 2B/c`, and a response
//! counts for round `i` if it arrives (round-tagged) before the session is
//! decided; timeliness is judged purely from timestamps. The decision is
//! computed after the event queue drains.

use crate::adversaries::{ActionCtx, IncomingQubit, ProverBehavior, SetupView};
use crate::bits::BitString;
use crate::protocol::{
    decide, derive_secrets, keygen, Key, ProtocolError, RoundRecord, RoundSecrets, SessionConfig,
    SessionError, Transcript,
};
use crate::quantum::Bit;
use crate::rng::SplitRng;
use crate::timing::{
    deadline, propagation_delay, round_timely_calibrated, run_schedule, Input, LogMode, MessageLog,
    Party, Payload, Reactor, Scheduler, TimedMessage,
};
use alloc::boxed::Box;
use alloc::vec::Vec;
use core::cell::Cell;

/// Forwarding rule for stations that relay slow-phase nonces between the
/// verifier side and the prover side.
#[derive(Debug, Clone, Copy)]
pub struct RelayRoute {
    pub upstream: Party,
    pub downstream: Party,
    pub oob_upstream: bool,
    pub oob_downstream: bool,
}

/// One prover-side party: its location, entitlements, and behavior.
pub struct StationSpec {
    pub party: Party,
    pub distance: f64,
    /// Holds the long-term key and derives the per-round bases.
    pub keyed: bool,
    /// Answers the verifier nonce with a fresh nonce of its own.
    pub replies_nonce: bool,
    pub relay: Option<RelayRoute>,
    pub behavior: Box<dyn ProverBehavior>,
}

/// The full prover-side wiring of a session.
pub struct ProverSide {
    /// The party the verifier addresses its messages to.
    pub peer: Party,
    pub stations: Vec<StationSpec>,
}

impl ProverSide {
    fn validate(&self) -> Result<(), SessionError> {
        if self.stations.is_empty() {
            return Err(SessionError::InvalidWiring("no prover-side stations"));
        }
        if self.peer == Party::Verifier {
            return Err(SessionError::InvalidWiring("peer cannot be the verifier"));
        }
        if !self.stations.iter().any(|s| s.party == self.peer) {
            return Err(SessionError::InvalidWiring("peer has no station"));
        }
        let mut seen = [false; 4];
        for s in &self.stations {
            if s.party == Party::Verifier {
                return Err(SessionError::InvalidWiring(
                    "station cannot be the verifier",
                ));
            }
            if seen[s.party.index()] {
                return Err(SessionError::InvalidWiring("duplicate station party"));
            }
            seen[s.party.index()] = true;
            if s.keyed && s.relay.is_some() {
                return Err(SessionError::InvalidWiring("keyed station cannot relay"));
            }
        }
        if self.stations.iter().filter(|s| s.replies_nonce).count() != 1 {
            return Err(SessionError::InvalidWiring(
                "exactly one station must reply to the nonce",
            ));
        }
        Ok(())
    }
}

/// Result of one full session: the verifier's transcript plus the message
/// log (retained according to the requested [`LogMode`]).
#[derive(Debug, Clone)]
pub struct SessionOutcome {
    pub transcript: Transcript,
    pub log: MessageLog,
}

struct PendingRound {
    challenge: Bit,
    t_send: f64,
    t_recv: Option<f64>,
    outcome: Option<Bit>,
}

/// Verifier draw order per session: `n` nonce bits, then `n` challenge bits
/// at fast-phase scheduling, then one draw per measured response.
struct VerifierReactor<'a> {
    config: &'a SessionConfig,
    key: &'a Key,
    rng: SplitRng,
    peer: Party,
    period: f64,
    nonce: BitString,
    prover_nonce: Option<BitString>,
    secrets: Option<RoundSecrets>,
    challenge_bits: Vec<Bit>,
    fast_start: f64,
    pending: Vec<Option<PendingRound>>,
}

impl<'a> VerifierReactor<'a> {
    fn new(
        config: &'a SessionConfig,
        key: &'a Key,
        mut rng: SplitRng,
        peer: Party,
        period: f64,
    ) -> Self {
        let nonce = BitString::random(config.n, &mut rng);
        VerifierReactor {
            config,
            key,
            rng,
            peer,
            period,
            nonce,
            prover_nonce: None,
            secrets: None,
            challenge_bits: Vec::new(),
            fast_start: 0.0,
            pending: Vec::new(),
        }
    }

    fn start(&mut self, sched: &mut Scheduler) -> Result<(), SessionError> {
        sched.send(
            Party::Verifier,
            self.peer,
            0.0,
            None,
            Payload::Nonce(self.nonce.clone()),
        )?;
        Ok(())
    }

    fn on_prover_nonce(
        &mut self,
        sched: &mut Scheduler,
        now: f64,
        nonce: &BitString,
    ) -> Result<(), SessionError> {
        if self.prover_nonce.is_some() {
            return Ok(()); // duplicate; first one wins
        }
        self.prover_nonce = Some(nonce.clone());
        self.secrets = Some(derive_secrets(self.key, &self.nonce, nonce, self.config.n)?);
        self.challenge_bits = (0..self.config.n)
            .map(|_| Bit::from_bool(self.rng.next_bool()))
            .collect();
        self.pending = (0..self.config.n).map(|_| None).collect();
        // One settling period between the slow and fast phases; the
        // adversarial side channel closes when the fast phase begins.
        self.fast_start = now + self.period;
        sched.close_out_of_band_at(self.fast_start);
        sched.wake(Party::Verifier, self.fast_start, 1)?;
        Ok(())
    }

    fn open_round(
        &mut self,
        sched: &mut Scheduler,
        now: f64,
        round: u32,
    ) -> Result<(), SessionError> {
        let idx = (round - 1) as usize;
        let secrets = self.secrets.as_ref().expect("fast phase before secrets");
        let challenge = self.challenge_bits[idx];
        let state =
            crate::quantum::QubitState::bb84(challenge, secrets.challenge_basis(round as usize))
                .depolarize(self.config.eta)?;
        self.pending[idx] = Some(PendingRound {
            challenge,
            t_send: now,
            t_recv: None,
            outcome: None,
        });
        sched.send(
            Party::Verifier,
            self.peer,
            now,
            Some(round),
            Payload::Qubit(state),
        )?;
        if (round as usize) < self.config.n {
            let next = self.fast_start + round as f64 * self.period;
            sched.wake(Party::Verifier, next, round + 1)?;
        }
        Ok(())
    }

    fn on_response(&mut self, now: f64, msg: &TimedMessage) -> Result<(), SessionError> {
        let Payload::Qubit(state) = &msg.payload else {
            return Ok(());
        };
        let Some(round) = msg.round else {
            return Ok(());
        };
        let idx = round as usize - 1;
        if round == 0 || idx >= self.pending.len() {
            return Ok(());
        }
        let Some(pending) = self.pending.get_mut(idx).and_then(|p| p.as_mut()) else {
            return Ok(()); // response to a round that has not opened
        };
        if pending.t_recv.is_some() {
            return Ok(()); // first response wins; duplicates are logged only
        }
        pending.t_recv = Some(now);
        let secrets = self.secrets.as_ref().expect("response before secrets");
        let noisy = state.depolarize(self.config.eta)?;
        pending.outcome =
            Some(noisy.sample_measurement(secrets.response_basis(round as usize), &mut self.rng));
        Ok(())
    }

    fn finalize(self) -> Result<Transcript, SessionError> {
        let prover_nonce =
            self.prover_nonce
                .ok_or(SessionError::Protocol(ProtocolError::InvalidConfig(
                    "slow phase never completed",
                )))?;
        let mut rounds = Vec::with_capacity(self.config.n);
        for (idx, slot) in self.pending.into_iter().enumerate() {
            let p = slot.expect("round never opened");
            let timely = match p.t_recv {
                Some(t_recv) => round_timely_calibrated(p.t_send, t_recv, self.config.bound_b)?,
                None => false,
            };
            let value_ok = p.outcome == Some(p.challenge);
            rounds.push(RoundRecord {
                index: idx as u32 + 1,
                challenge_bit: p.challenge,
                t_send: p.t_send,
                t_recv: p.t_recv,
                verifier_outcome: p.outcome,
                timely,
                value_ok,
                accepted: timely && value_ok,
            });
        }
        let accepted_count = rounds.iter().filter(|r| r.accepted).count();
        let decision = decide(&rounds, self.config.tau);
        Ok(Transcript {
            verifier_nonce: self.nonce,
            prover_nonce,
            rounds,
            accepted_count,
            decision,
        })
    }
}

impl Reactor for VerifierReactor<'_> {
    type Error = SessionError;

    fn handle(
        &mut self,
        sched: &mut Scheduler,
        now: f64,
        input: Input<'_>,
    ) -> Result<(), SessionError> {
        match input {
            Input::Message(msg) => match &msg.payload {
                Payload::Nonce(nonce) => self.on_prover_nonce(sched, now, nonce),
                Payload::Qubit(_) => self.on_response(now, msg),
                _ => Ok(()), // verifier ignores adversary side traffic
            },
            Input::Wake(round) => self.open_round(sched, now, round),
        }
    }
}

struct StationReactor<'a> {
    party: Party,
    distance: f64,
    keyed: bool,
    replies_nonce: bool,
    relay: Option<RelayRoute>,
    behavior: Box<dyn ProverBehavior>,
    key: Option<&'a Key>,
    config: &'a SessionConfig,
    period: f64,
    rng: SplitRng,
    verifier_nonce: Option<BitString>,
    prover_nonce: Option<BitString>,
    secrets: Option<RoundSecrets>,
    setup_done: bool,
}

impl<'a> StationReactor<'a> {
    /// Setup fires once the station has seen both nonces; keyed stations
    /// derive the per-round bases first. `fast_start_estimate` is the
    /// station's projection of when the verifier will begin the fast phase
    /// (None when the station cannot know it).
    fn run_setup(
        &mut self,
        sched: &mut Scheduler,
        fast_start_estimate: Option<f64>,
    ) -> Result<(), SessionError> {
        if self.setup_done {
            return Ok(());
        }
        self.setup_done = true;
        if self.keyed {
            let key = self.key.expect("keyed station without key");
            let (Some(nv), Some(np)) = (&self.verifier_nonce, &self.prover_nonce) else {
                return Err(SessionError::InvalidWiring("setup before both nonces"));
            };
            self.secrets = Some(derive_secrets(key, nv, np, self.config.n)?);
        }
        let view = SetupView {
            n: self.config.n,
            bound_b: self.config.bound_b,
            eta: self.config.eta,
            own_distance: self.distance,
            round_period: self.period,
            fast_start: fast_start_estimate,
            secrets: self.secrets.as_ref(),
        };
        self.behavior.setup(&view);
        let mut ctx = ActionCtx::new(sched, &mut self.rng, self.party);
        self.behavior.pre_fast(&mut ctx)
    }

    fn on_nonce(
        &mut self,
        sched: &mut Scheduler,
        now: f64,
        msg: &TimedMessage,
        nonce: &BitString,
    ) -> Result<(), SessionError> {
        if let Some(route) = self.relay {
            if msg.sender == route.upstream {
                // Verifier-side nonce heading to the prover side.
                self.verifier_nonce = Some(nonce.clone());
                if route.oob_downstream {
                    sched.send_out_of_band(
                        self.party,
                        route.downstream,
                        None,
                        Payload::Nonce(nonce.clone()),
                    )?;
                } else {
                    sched.send(
                        self.party,
                        route.downstream,
                        now,
                        None,
                        Payload::Nonce(nonce.clone()),
                    )?;
                }
            } else if msg.sender == route.downstream {
                // Prover-side nonce heading back to the verifier.
                self.prover_nonce = Some(nonce.clone());
                if route.oob_upstream {
                    sched.send_out_of_band(
                        self.party,
                        route.upstream,
                        None,
                        Payload::Nonce(nonce.clone()),
                    )?;
                } else {
                    sched.send(
                        self.party,
                        route.upstream,
                        now,
                        None,
                        Payload::Nonce(nonce.clone()),
                    )?;
                }
                // Both nonces have passed through; the fast phase begins one
                // period after the reply reaches the verifier.
                let reply_delay = if route.oob_upstream {
                    0.0
                } else {
                    sched.delay_between(self.party, route.upstream)
                };
                self.run_setup(sched, Some(now + reply_delay + self.period))?;
            }
            return Ok(());
        }

        if self.replies_nonce && self.verifier_nonce.is_none() {
            self.verifier_nonce = Some(nonce.clone());
            let own = BitString::random(self.config.n, &mut self.rng);
            self.prover_nonce = Some(own.clone());
            if msg.out_of_band {
                sched.send_out_of_band(self.party, msg.sender, None, Payload::Nonce(own))?;
                self.run_setup(sched, Some(now + self.period))?;
            } else {
                sched.send(self.party, msg.sender, now, None, Payload::Nonce(own))?;
                let delay = propagation_delay(self.distance)?;
                self.run_setup(sched, Some(now + delay + self.period))?;
            }
        }
        Ok(())
    }

    fn on_qubit(
        &mut self,
        sched: &mut Scheduler,
        now: f64,
        msg: &TimedMessage,
    ) -> Result<(), SessionError> {
        let Payload::Qubit(state) = &msg.payload else {
            return Ok(());
        };
        let round = msg.round.unwrap_or(0);
        if round == 0 {
            return Ok(());
        }
        let read_flag = Cell::new(false);
        let incoming = IncomingQubit::new(state, now, &read_flag);
        let response = {
            let mut ctx = ActionCtx::new(sched, &mut self.rng, self.party);
            self.behavior.on_challenge(round, &incoming, &mut ctx)?
        };
        if self.behavior.challenge_blind() && read_flag.get() {
            return Err(SessionError::BlindBehaviorReadChallenge { round });
        }
        if let Some(state) = response {
            sched.send(
                self.party,
                msg.sender,
                now,
                Some(round),
                Payload::Qubit(state),
            )?;
        }
        Ok(())
    }
}

impl Reactor for StationReactor<'_> {
    type Error = SessionError;

    fn handle(
        &mut self,
        sched: &mut Scheduler,
        now: f64,
        input: Input<'_>,
    ) -> Result<(), SessionError> {
        match input {
            Input::Message(msg) => match &msg.payload {
                Payload::Nonce(nonce) => self.on_nonce(sched, now, msg, nonce),
                Payload::Qubit(_) => self.on_qubit(sched, now, msg),
                payload => {
                    let mut ctx = ActionCtx::new(sched, &mut self.rng, self.party);
                    self.behavior.on_classical(payload, &mut ctx)
                }
            },
            Input::Wake(_) => Ok(()),
        }
    }
}

/// RNG split labels: 0 key, 1 verifier, 2 + party index for stations.
const SPLIT_KEY: u64 = 0;
const SPLIT_VERIFIER: u64 = 1;
const SPLIT_STATION_BASE: u64 = 2;

/// Execute one full session (slow phase, fast phase, decision) against the
/// given prover-side wiring. Deterministic in `config.seed`.
pub fn run_session(
    config: &SessionConfig,
    prover_side: ProverSide,
    mode: LogMode,
) -> Result<SessionOutcome, SessionError> {
    config.validate()?;
    prover_side.validate()?;

    let root = SplitRng::new(config.seed);
    let mut key_rng = root.split(SPLIT_KEY);
    let key = keygen(config.lambda, &mut key_rng)?;
    let period = deadline(config.bound_b)?;

    let mut distances = [0.0f64; 4];
    for spec in &prover_side.stations {
        distances[spec.party.index()] = spec.distance;
    }
    let event_cap = 64 * config.n as u64 + 4096;
    let mut sched = Scheduler::new(distances, mode, event_cap)?;

    let peer = prover_side.peer;
    let mut verifier = VerifierReactor::new(config, &key, root.split(SPLIT_VERIFIER), peer, period);
    verifier.start(&mut sched)?;

    let mut stations: Vec<StationReactor> = prover_side
        .stations
        .into_iter()
        .map(|spec| StationReactor {
            rng: root.split(SPLIT_STATION_BASE + spec.party.index() as u64),
            key: spec.keyed.then_some(&key),
            config,
            period,
            party: spec.party,
            distance: spec.distance,
            keyed: spec.keyed,
            replies_nonce: spec.replies_nonce,
            relay: spec.relay,
            behavior: spec.behavior,
            verifier_nonce: None,
            prover_nonce: None,
            secrets: None,
            setup_done: false,
        })
        .collect();

    {
        let mut parties: Vec<(Party, &mut dyn Reactor<Error = SessionError>)> = Vec::new();
        parties.push((Party::Verifier, &mut verifier));
        for station in stations.iter_mut() {
            parties.push((station.party, station));
        }
        run_schedule(&mut sched, &mut parties)?;
    }

    let transcript = verifier.finalize()?;
    Ok(SessionOutcome {
        transcript,
        log: sched.into_log(),
    })
}
