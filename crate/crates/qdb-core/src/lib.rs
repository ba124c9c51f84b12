//! Laboratory core for single-qubit quantum distance-bounding.
//!
//! The crate models a challenge-response distance-bounding session whose fast
//! phase exchanges single qubits: exact 2x2 density-matrix quantum mechanics
//! ([`quantum`]), a causal event scheduler with speed-of-light propagation
//! ([`timing`]), the three-phase protocol itself ([`protocol`]), the honest
//! prover together with the distance-, mafia- and terrorist-fraud strategies
//! and their exact per-round success oracles ([`adversaries`]), and the
//! Chernoff/KL analytical engine used to size rounds, thresholds and noise
//! budgets ([`bounds`]).
//!
//! Everything is deterministic under an explicit seed: all randomness flows
//! through the splittable counter-based generator in [`rng`].
//!
//! ```
//! use qdb_core::adversaries::{exact_round_success, run_attack_session, Attack};
//! use qdb_core::protocol::SessionConfig;
//! use qdb_core::timing::LogMode;
//!
//! let config = SessionConfig {
//!     lambda: 256,
//!     n: 32,
//!     tau: 32,
//!     bound_b: 300.0,          // meters
//!     eta: 0.0,                // per-hop depolarizing noise
//!     prover_distance: 450.0,  // beyond the bound
//!     seed: 7,
//! };
//! // A prover beyond the bound can only guess: it wins each round with
//! // probability exactly 1/2, so a strict threshold is hopeless.
//! assert_eq!(exact_round_success(Attack::Df, 0.0).unwrap(), 0.5);
//! let outcome = run_attack_session(&config, Attack::Df, LogMode::CountsOnly).unwrap();
//! assert!(!outcome.transcript.accepted());
//! ```

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod adversaries;
pub mod bits;
pub mod bounds;
mod math;
pub mod protocol;
pub mod quantum;
pub mod rng;
pub mod timing;

pub use adversaries::Attack;
pub use bits::BitString;
pub use protocol::{Decision, RoundRecord, SessionConfig, Transcript};
pub use quantum::{Basis, Bit, QubitState};
pub use rng::SplitRng;
