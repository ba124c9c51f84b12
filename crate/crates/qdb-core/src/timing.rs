//! Speed-of-light message propagation and the causal event scheduler.
//!
//! Geometry is one-dimensional: every party sits at a fixed distance from the
//! verifier and signals travel at exactly `c`. The scheduler delivers
//! messages in nondecreasing arrival order (ties broken by insertion order)
//! and rejects any attempt to emit into the past, so a response that beats
//! the round-trip deadline from beyond the distance bound provably cannot
//! depend on that round's challenge.
//!
//! Adversary-to-adversary side channels are modelled as instantaneous
//! out-of-band links that carry classical data only and close permanently
//! once the fast phase begins.

use crate::bits::BitString;
use crate::quantum::{Basis, Bit, QubitState};
use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// Speed of light in vacuum, exactly.
pub const SPEED_OF_LIGHT_M_PER_S: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq)]
pub enum TimingError {
    NegativeDistance(f64),
    NonPositiveBound(f64),
    /// `t_recv` earlier than `t_send`.
    ReversedTimestamps {
        t_send: f64,
        t_recv: f64,
    },
    /// A behavior tried to emit a message or schedule a wake before the
    /// latest instant it has already observed.
    CausalEmission {
        now: f64,
        attempted: f64,
    },
    /// Out-of-band link used at or after the fast phase start.
    OutOfBandClosed {
        now: f64,
        closed_at: f64,
    },
    /// Quantum payloads must travel on the physical channel.
    QubitOutOfBand,
    NonFiniteTime(f64),
    /// Runaway reactive loop guard.
    EventCapExceeded(u64),
}

impl fmt::Display for TimingError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TimingError::NegativeDistance(d) => write!(f, "negative distance {d} m"),
            TimingError::NonPositiveBound(b) => write!(f, "distance bound {b} m must be > 0"),
            TimingError::ReversedTimestamps { t_send, t_recv } => {
                write!(f, "t_recv {t_recv} earlier than t_send {t_send}")
            }
            TimingError::CausalEmission { now, attempted } => {
                write!(f, "emission at {attempted} s before current time {now} s")
            }
            TimingError::OutOfBandClosed { now, closed_at } => {
                write!(
                    f,
                    "out-of-band link used at {now} s, closed at {closed_at} s"
                )
            }
            TimingError::QubitOutOfBand => write!(f, "qubit sent on out-of-band link"),
            TimingError::NonFiniteTime(t) => write!(f, "non-finite time {t}"),
            TimingError::EventCapExceeded(cap) => write!(f, "event cap {cap} exceeded"),
        }
    }
}

impl core::error::Error for TimingError {}

/// One-way propagation delay `distance / c`.
pub fn propagation_delay(distance_m: f64) -> Result<f64, TimingError> {
    if !distance_m.is_finite() || distance_m < 0.0 {
        return Err(TimingError::NegativeDistance(distance_m));
    }
    Ok(distance_m / SPEED_OF_LIGHT_M_PER_S)
}

/// Round-trip deadline `2B / c` for distance bound `B`.
pub fn deadline(bound_m: f64) -> Result<f64, TimingError> {
    if !bound_m.is_finite() || bound_m <= 0.0 {
        return Err(TimingError::NonPositiveBound(bound_m));
    }
    Ok(2.0 * bound_m / SPEED_OF_LIGHT_M_PER_S)
}

/// Inclusive deadline check: `t_recv - t_send <= 2B/c`.
pub fn round_timely(t_send: f64, t_recv: f64, bound_m: f64) -> Result<bool, TimingError> {
    if t_recv < t_send {
        return Err(TimingError::ReversedTimestamps { t_send, t_recv });
    }
    Ok(t_recv - t_send <= deadline(bound_m)?)
}

/// Clock-quantization guard for timestamps assembled from summed hop delays:
/// a few ulps of the receive timestamp. Device-calibration slack absorbs
/// f64 rounding at the exact `d = B` boundary while staying far below any
/// physical distance violation (micrometre-scale excess already exceeds it).
pub fn arrival_slack(t_recv: f64) -> f64 {
    8.0 * f64::EPSILON
        * if t_recv.abs() > 1.0 {
            t_recv.abs()
        } else {
            1.0
        }
}

/// Deadline check with the calibration slack of [`arrival_slack`]; used by
/// the verifier on scheduler-produced timestamps.
pub fn round_timely_calibrated(
    t_send: f64,
    t_recv: f64,
    bound_m: f64,
) -> Result<bool, TimingError> {
    if t_recv < t_send {
        return Err(TimingError::ReversedTimestamps { t_send, t_recv });
    }
    Ok(t_recv - t_send <= deadline(bound_m)? + arrival_slack(t_recv))
}

/// The at most four parties of a session. The verifier sits at distance 0;
/// helpers are adversarial stations near the verifier or near the prover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    Verifier,
    Prover,
    NearHelper,
    FarHelper,
}

impl Party {
    pub const ALL: [Party; 4] = [
        Party::Verifier,
        Party::Prover,
        Party::NearHelper,
        Party::FarHelper,
    ];

    #[inline]
    pub(crate) fn index(self) -> usize {
        match self {
            Party::Verifier => 0,
            Party::Prover => 1,
            Party::NearHelper => 2,
            Party::FarHelper => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Party::Verifier => "verifier",
            Party::Prover => "prover",
            Party::NearHelper => "near_helper",
            Party::FarHelper => "far_helper",
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Message payloads: classical bit strings or a single qubit.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    /// Slow-phase nonce.
    Nonce(BitString),
    /// A single-qubit transmission (challenge, response, or probe).
    Qubit(QubitState),
    /// Per-round basis-parity guesses shared between relay adversaries.
    ParityGuesses(Vec<Bit>),
    /// Session basis strings leaked by a dishonest prover to its helper.
    /// Carries only the per-round bases, never key material.
    BasisLeak {
        challenge_bases: Vec<Basis>,
        response_bases: Vec<Basis>,
    },
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Nonce(_) => "nonce",
            Payload::Qubit(_) => "qubit",
            Payload::ParityGuesses(_) => "parity_guesses",
            Payload::BasisLeak { .. } => "basis_leak",
        }
    }

    pub fn is_classical(&self) -> bool {
        !matches!(self, Payload::Qubit(_))
    }
}

/// A message in flight or in the log. `arrival_time` always equals
/// `emit_time` plus the light-speed delay between the endpoints (zero on the
/// out-of-band link).
#[derive(Debug, Clone, PartialEq)]
pub struct TimedMessage {
    pub sender: Party,
    pub receiver: Party,
    pub emit_time: f64,
    pub arrival_time: f64,
    /// Fast-phase round this message belongs to (1-based), if any.
    pub round: Option<u32>,
    pub out_of_band: bool,
    pub payload: Payload,
}

/// Whether delivered messages are retained for inspection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LogMode {
    /// Keep every delivered message (trace export, property checks).
    Full,
    /// Keep only the delivery count (large Monte Carlo runs).
    CountsOnly,
}

/// Record of every delivered message, in delivery order.
#[derive(Debug, Clone)]
pub struct MessageLog {
    mode: LogMode,
    messages: Vec<TimedMessage>,
    delivered: u64,
}

impl MessageLog {
    fn new(mode: LogMode) -> Self {
        MessageLog {
            mode,
            messages: Vec::new(),
            delivered: 0,
        }
    }

    fn record(&mut self, msg: TimedMessage) {
        self.delivered += 1;
        if self.mode == LogMode::Full {
            self.messages.push(msg);
        }
    }

    pub fn messages(&self) -> &[TimedMessage] {
        &self.messages
    }

    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    pub fn mode(&self) -> LogMode {
        self.mode
    }
}

#[derive(Debug)]
enum EventKind {
    Deliver(TimedMessage),
    Wake { party: Party, tag: u32 },
}

struct HeapEvent {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for HeapEvent {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time && self.seq == other.seq
    }
}

impl Eq for HeapEvent {}

impl PartialOrd for HeapEvent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEvent {
    // Reversed: BinaryHeap is a max-heap, we want earliest (time, seq) first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// A popped event, ready for dispatch.
#[derive(Debug)]
pub enum Event {
    Message(TimedMessage),
    Wake { party: Party, tag: u32 },
}

/// Input handed to a reactive party.
#[derive(Debug)]
pub enum Input<'a> {
    Message(&'a TimedMessage),
    Wake(u32),
}

/// A deterministic reactive party: a function of its own state, the messages
/// it has received, and its own random stream. Handlers may only emit at or
/// after the current instant.
pub trait Reactor {
    type Error: From<TimingError>;

    fn handle(
        &mut self,
        sched: &mut Scheduler,
        now: f64,
        input: Input<'_>,
    ) -> Result<(), Self::Error>;
}

/// Deterministic future-event queue with light-speed delivery and a message
/// log. `now` advances monotonically as events are popped; emissions earlier
/// than `now` are rejected, which is what makes every logged fast-phase
/// response causally independent of challenges that could not yet have
/// reached its emitter.
pub struct Scheduler {
    queue: BinaryHeap<HeapEvent>,
    distances: [f64; 4],
    now: f64,
    seq: u64,
    oob_closes_at: f64,
    log: MessageLog,
    processed: u64,
    event_cap: u64,
}

impl Scheduler {
    /// `distances[party]` is each party's distance from the verifier in
    /// meters; unused parties may carry any finite value.
    pub fn new(distances: [f64; 4], mode: LogMode, event_cap: u64) -> Result<Self, TimingError> {
        for d in distances {
            if !d.is_finite() || d < 0.0 {
                return Err(TimingError::NegativeDistance(d));
            }
        }
        Ok(Scheduler {
            queue: BinaryHeap::new(),
            distances,
            now: 0.0,
            seq: 0,
            oob_closes_at: f64::INFINITY,
            log: MessageLog::new(mode),
            processed: 0,
            event_cap,
        })
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn distance_of(&self, party: Party) -> f64 {
        self.distances[party.index()]
    }

    /// One-way delay between two parties on the 1-D line.
    pub fn delay_between(&self, a: Party, b: Party) -> f64 {
        let d = (self.distances[a.index()] - self.distances[b.index()]).abs();
        d / SPEED_OF_LIGHT_M_PER_S
    }

    /// Close the out-of-band adversary links from `t` onward (fast phase
    /// start). Once closed they stay closed.
    pub fn close_out_of_band_at(&mut self, t: f64) {
        self.oob_closes_at = self.oob_closes_at.min(t);
    }

    fn push(&mut self, time: f64, kind: EventKind) {
        self.seq += 1;
        self.queue.push(HeapEvent {
            time,
            seq: self.seq,
            kind,
        });
    }

    /// Emit a message on the physical channel at `emit_time >= now`; it
    /// arrives after the light-speed delay between the endpoints.
    pub fn send(
        &mut self,
        sender: Party,
        receiver: Party,
        emit_time: f64,
        round: Option<u32>,
        payload: Payload,
    ) -> Result<(), TimingError> {
        if !emit_time.is_finite() {
            return Err(TimingError::NonFiniteTime(emit_time));
        }
        if emit_time < self.now {
            return Err(TimingError::CausalEmission {
                now: self.now,
                attempted: emit_time,
            });
        }
        let arrival_time = emit_time + self.delay_between(sender, receiver);
        self.push(
            arrival_time,
            EventKind::Deliver(TimedMessage {
                sender,
                receiver,
                emit_time,
                arrival_time,
                round,
                out_of_band: false,
                payload,
            }),
        );
        Ok(())
    }

    /// Emit classical data on the instantaneous out-of-band link. Only
    /// usable strictly before the fast phase begins.
    pub fn send_out_of_band(
        &mut self,
        sender: Party,
        receiver: Party,
        round: Option<u32>,
        payload: Payload,
    ) -> Result<(), TimingError> {
        if !payload.is_classical() {
            return Err(TimingError::QubitOutOfBand);
        }
        if self.now >= self.oob_closes_at {
            return Err(TimingError::OutOfBandClosed {
                now: self.now,
                closed_at: self.oob_closes_at,
            });
        }
        let emit_time = self.now;
        self.push(
            emit_time,
            EventKind::Deliver(TimedMessage {
                sender,
                receiver,
                emit_time,
                arrival_time: emit_time,
                round,
                out_of_band: true,
                payload,
            }),
        );
        Ok(())
    }

    /// Schedule a timer for a party at `time >= now`.
    pub fn wake(&mut self, party: Party, time: f64, tag: u32) -> Result<(), TimingError> {
        if !time.is_finite() {
            return Err(TimingError::NonFiniteTime(time));
        }
        if time < self.now {
            return Err(TimingError::CausalEmission {
                now: self.now,
                attempted: time,
            });
        }
        self.push(time, EventKind::Wake { party, tag });
        Ok(())
    }

    /// Pop the next event and advance the clock.
    pub fn pop(&mut self) -> Result<Option<Event>, TimingError> {
        let Some(ev) = self.queue.pop() else {
            return Ok(None);
        };
        self.processed += 1;
        if self.processed > self.event_cap {
            return Err(TimingError::EventCapExceeded(self.event_cap));
        }
        debug_assert!(ev.time >= self.now, "event queue went backwards");
        self.now = ev.time;
        Ok(Some(match ev.kind {
            EventKind::Deliver(msg) => Event::Message(msg),
            EventKind::Wake { party, tag } => Event::Wake { party, tag },
        }))
    }

    /// Record a delivered message into the log.
    pub fn record_delivery(&mut self, msg: TimedMessage) {
        self.log.record(msg);
    }

    pub fn log(&self) -> &MessageLog {
        &self.log
    }

    pub fn into_log(self) -> MessageLog {
        self.log
    }
}

/// Drive the schedule to fixed point: deliver every pending message and
/// timer to its party's handler, which may emit further (causally valid)
/// events. Returns once the queue drains.
pub fn run_schedule<E: From<TimingError>>(
    sched: &mut Scheduler,
    parties: &mut [(Party, &mut dyn Reactor<Error = E>)],
) -> Result<(), E> {
    while let Some(event) = sched.pop()? {
        match event {
            Event::Message(msg) => {
                let target = msg.receiver;
                if let Some((_, reactor)) = parties.iter_mut().find(|(p, _)| *p == target) {
                    reactor.handle(sched, msg.arrival_time, Input::Message(&msg))?;
                }
                sched.record_delivery(msg);
            }
            Event::Wake { party, tag } => {
                let now = sched.now();
                if let Some((_, reactor)) = parties.iter_mut().find(|(p, _)| *p == party) {
                    reactor.handle(sched, now, Input::Wake(tag))?;
                }
            }
        }
    }
    Ok(())
}
