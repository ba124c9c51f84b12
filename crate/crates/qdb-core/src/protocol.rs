//! The distance-bounding protocol: slow phase (nonce exchange and PRF-derived
//! per-round bases), fast phase (timed single-qubit challenge-response
//! rounds), and the threshold decision rule. The prover side is pluggable via
//! [`crate::adversaries::ProverBehavior`].

mod session;

pub use session::{run_session, ProverSide, RelayRoute, SessionOutcome, StationSpec};

use crate::bits::BitString;
use crate::quantum::{Basis, Bit};
use crate::timing::TimingError;
use alloc::vec::Vec;
use core::fmt;
use sha2::{Digest, Sha256};

use crate::rng::SplitRng;

/// All parameters of one session.
///
/// `eta` is the per-hop depolarizing parameter applied on the verifier's
/// outgoing challenge hop and incoming response hop; adversary-internal
/// channels are noiseless. Distances are meters from the verifier.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SessionConfig {
    /// Key length in bits (>= 128).
    pub lambda: usize,
    /// Number of fast rounds.
    pub n: usize,
    /// Acceptance threshold: accept iff at least `tau` rounds pass.
    pub tau: usize,
    /// Distance bound in meters.
    pub bound_b: f64,
    /// Per-hop depolarizing parameter in `[0, 1]`.
    pub eta: f64,
    /// Prover-side distance from the verifier in meters.
    pub prover_distance: f64,
    /// Root seed; all session randomness derives from it.
    pub seed: u64,
}

impl SessionConfig {
    pub fn validate(&self) -> Result<(), ProtocolError> {
        if self.lambda < 128 {
            return Err(ProtocolError::KeyTooShort(self.lambda));
        }
        if self.n == 0 {
            return Err(ProtocolError::InvalidConfig("n must be >= 1"));
        }
        if self.n > u32::MAX as usize {
            return Err(ProtocolError::InvalidConfig("n too large"));
        }
        if self.tau > self.n {
            return Err(ProtocolError::InvalidConfig("tau must be <= n"));
        }
        if !(0.0..=1.0).contains(&self.eta) {
            return Err(ProtocolError::InvalidConfig("eta must be in [0, 1]"));
        }
        if !self.bound_b.is_finite() || self.bound_b <= 0.0 {
            return Err(ProtocolError::InvalidConfig("bound_b must be > 0"));
        }
        if !self.prover_distance.is_finite() || self.prover_distance < 0.0 {
            return Err(ProtocolError::InvalidConfig("prover_distance must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolError {
    KeyTooShort(usize),
    /// Nonce lengths must equal the round count.
    NonceLengthMismatch {
        expected: usize,
        got: usize,
    },
    InvalidConfig(&'static str),
}

impl fmt::Display for ProtocolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolError::KeyTooShort(bits) => {
                write!(f, "key length {bits} below the 128-bit minimum")
            }
            ProtocolError::NonceLengthMismatch { expected, got } => {
                write!(f, "nonce length {got}, expected {expected}")
            }
            ProtocolError::InvalidConfig(msg) => write!(f, "invalid config: {msg}"),
        }
    }
}

impl core::error::Error for ProtocolError {}

/// Errors surfaced by a full session run.
#[derive(Debug, Clone, PartialEq)]
pub enum SessionError {
    Protocol(ProtocolError),
    Timing(TimingError),
    Quantum(crate::quantum::QuantumError),
    /// A challenge-blind behavior dereferenced its incoming qubit.
    BlindBehaviorReadChallenge {
        round: u32,
    },
    /// Attack preconditions violated (e.g. fraud strategy within the bound).
    InvalidWiring(&'static str),
}

impl fmt::Display for SessionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SessionError::Protocol(e) => write!(f, "{e}"),
            SessionError::Timing(e) => write!(f, "{e}"),
            SessionError::Quantum(e) => write!(f, "{e}"),
            SessionError::BlindBehaviorReadChallenge { round } => {
                write!(f, "challenge-blind behavior read the round {round} qubit")
            }
            SessionError::InvalidWiring(msg) => write!(f, "invalid wiring: {msg}"),
        }
    }
}

impl core::error::Error for SessionError {}

impl From<ProtocolError> for SessionError {
    fn from(e: ProtocolError) -> Self {
        SessionError::Protocol(e)
    }
}

impl From<TimingError> for SessionError {
    fn from(e: TimingError) -> Self {
        SessionError::Timing(e)
    }
}

impl From<crate::quantum::QuantumError> for SessionError {
    fn from(e: crate::quantum::QuantumError) -> Self {
        SessionError::Quantum(e)
    }
}

/// A long-term symmetric key.
#[derive(Debug, Clone, PartialEq)]
pub struct Key {
    bits: BitString,
}

impl Key {
    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn len_bits(&self) -> usize {
        self.bits.len()
    }
}

/// Uniformly random `lambda`-bit key. Consumes `lambda` draws from `rng`.
pub fn keygen(lambda: usize, rng: &mut SplitRng) -> Result<Key, ProtocolError> {
    if lambda < 128 {
        return Err(ProtocolError::KeyTooShort(lambda));
    }
    Ok(Key {
        bits: BitString::random(lambda, rng),
    })
}

/// Per-round basis strings: `challenge_bases[i]` selects the challenge
/// basis of round `i+1`, `response_bases[i]` the response basis.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundSecrets {
    challenge_bases: Vec<Basis>,
    response_bases: Vec<Basis>,
}

impl RoundSecrets {
    pub fn from_bases(challenge_bases: Vec<Basis>, response_bases: Vec<Basis>) -> Self {
        debug_assert_eq!(challenge_bases.len(), response_bases.len());
        RoundSecrets {
            challenge_bases,
            response_bases,
        }
    }

    pub fn n(&self) -> usize {
        self.challenge_bases.len()
    }

    /// Challenge basis of 1-based round `i`.
    pub fn challenge_basis(&self, i: usize) -> Basis {
        self.challenge_bases[i - 1]
    }

    /// Response basis of 1-based round `i`.
    pub fn response_basis(&self, i: usize) -> Basis {
        self.response_bases[i - 1]
    }

    /// Basis parity of 1-based round `i` (`Zero` iff both bases agree).
    pub fn parity(&self, i: usize) -> Bit {
        Basis::parity(self.challenge_basis(i), self.response_basis(i))
    }

    pub fn challenge_bases(&self) -> &[Basis] {
        &self.challenge_bases
    }

    pub fn response_bases(&self) -> &[Basis] {
        &self.response_bases
    }
}

/// Keyed PRF expansion: SHA-256 over `(key, nonces, block counter)` in
/// counter mode, length-prefixed for domain separation. Swappable behind
/// this single function boundary.
fn prf_blocks(key: &Key, nv: &BitString, np: &BitString, out_bits: usize) -> Vec<Bit> {
    let key_bytes = key.bits().to_bytes();
    let nv_bytes = nv.to_bytes();
    let np_bytes = np.to_bytes();
    let mut bits = Vec::with_capacity(out_bits);
    let mut counter: u32 = 0;
    while bits.len() < out_bits {
        let mut hasher = Sha256::new();
        hasher.update(b"qdb/prf/v1");
        hasher.update((key.len_bits() as u64).to_be_bytes());
        hasher.update(&key_bytes);
        hasher.update((nv.len() as u64).to_be_bytes());
        hasher.update(&nv_bytes);
        hasher.update((np.len() as u64).to_be_bytes());
        hasher.update(&np_bytes);
        hasher.update(counter.to_be_bytes());
        let digest = hasher.finalize();
        for byte in digest {
            for k in 0..8 {
                if bits.len() == out_bits {
                    break;
                }
                bits.push(Bit::from_bool((byte >> (7 - k)) & 1 == 1));
            }
        }
        counter += 1;
    }
    bits
}

/// Derive the `2n` pseudorandom basis bits `a || b` from the key and both
/// nonces; bit 0 maps to the Z basis, bit 1 to X. Deterministic.
pub fn derive_secrets(
    key: &Key,
    verifier_nonce: &BitString,
    prover_nonce: &BitString,
    n: usize,
) -> Result<RoundSecrets, ProtocolError> {
    if verifier_nonce.len() != n {
        return Err(ProtocolError::NonceLengthMismatch {
            expected: n,
            got: verifier_nonce.len(),
        });
    }
    if prover_nonce.len() != n {
        return Err(ProtocolError::NonceLengthMismatch {
            expected: n,
            got: prover_nonce.len(),
        });
    }
    let stream = prf_blocks(key, verifier_nonce, prover_nonce, 2 * n);
    let challenge_bases = stream[..n].iter().map(|&b| Basis::from_bit(b)).collect();
    let response_bases = stream[n..].iter().map(|&b| Basis::from_bit(b)).collect();
    Ok(RoundSecrets::from_bases(challenge_bases, response_bases))
}

/// Outcome of a single fast round as seen by the verifier.
///
/// `t_recv` and `verifier_outcome` are absent when no response for the round
/// arrived before the session was decided. `accepted` always equals
/// `timely && value_ok`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RoundRecord {
    /// 1-based round index.
    pub index: u32,
    #[cfg_attr(feature = "serde", serde(serialize_with = "serialize_bit"))]
    pub challenge_bit: Bit,
    pub t_send: f64,
    pub t_recv: Option<f64>,
    #[cfg_attr(feature = "serde", serde(serialize_with = "serialize_opt_bit"))]
    pub verifier_outcome: Option<Bit>,
    pub timely: bool,
    pub value_ok: bool,
    pub accepted: bool,
}

#[cfg(feature = "serde")]
fn serialize_bit<S: serde::Serializer>(bit: &Bit, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u8(bit.as_u8())
}

#[cfg(feature = "serde")]
fn serialize_opt_bit<S: serde::Serializer>(bit: &Option<Bit>, s: S) -> Result<S::Ok, S::Error> {
    match bit {
        Some(b) => s.serialize_some(&b.as_u8()),
        None => s.serialize_none(),
    }
}

/// Accept iff the number of accepted rounds reaches the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Decision {
    Accept,
    Reject,
}

/// Threshold rule: accept iff at least `tau` rounds were accepted.
pub fn decide(rounds: &[RoundRecord], tau: usize) -> Decision {
    let accepted = rounds.iter().filter(|r| r.accepted).count();
    if accepted >= tau {
        Decision::Accept
    } else {
        Decision::Reject
    }
}

/// Everything the verifier saw in one session.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Transcript {
    /// Verifier nonce (hex when serialized).
    pub verifier_nonce: BitString,
    /// Prover-side nonce (hex when serialized).
    pub prover_nonce: BitString,
    pub rounds: Vec<RoundRecord>,
    /// Number of accepted rounds.
    pub accepted_count: usize,
    pub decision: Decision,
}

impl Transcript {
    /// Fraction of rounds accepted.
    pub fn per_round_accept_rate(&self) -> f64 {
        if self.rounds.is_empty() {
            return 0.0;
        }
        self.accepted_count as f64 / self.rounds.len() as f64
    }

    pub fn accepted(&self) -> bool {
        self.decision == Decision::Accept
    }
}
