//! Property tests for the density-matrix layer: every operation must
//! preserve the state invariants, distributions must normalize, the
//! depolarizing channel must be affine and commute with the Hadamard, and
//! optimal discrimination must never do worse than guessing the prior.

use num_complex::Complex64;
use proptest::prelude::*;
use qdb_core::quantum::{helstrom_success, trace_distance, Basis, Bit, QubitState, TOLERANCE};
use qdb_core::SplitRng;

/// Random valid states via Bloch vectors of norm <= 1:
/// `rho = (I + r . sigma) / 2`.
fn arb_state() -> impl Strategy<Value = QubitState> {
    (-1.0f64..=1.0, -1.0f64..=1.0, -1.0f64..=1.0).prop_filter_map(
        "inside the Bloch ball",
        |(x, y, z)| {
            if x * x + y * y + z * z > 1.0 {
                return None;
            }
            let m = [
                [
                    Complex64::new(0.5 * (1.0 + z), 0.0),
                    Complex64::new(0.5 * x, -0.5 * y),
                ],
                [
                    Complex64::new(0.5 * x, 0.5 * y),
                    Complex64::new(0.5 * (1.0 - z), 0.0),
                ],
            ];
            QubitState::from_matrix(m).ok()
        },
    )
}

fn arb_basis() -> impl Strategy<Value = Basis> {
    prop_oneof![Just(Basis::Z), Just(Basis::X)]
}

fn entrywise_close(a: &QubitState, b: &QubitState) -> bool {
    let (ma, mb) = (a.matrix(), b.matrix());
    (0..2).all(|i| (0..2).all(|j| (ma[i][j] - mb[i][j]).norm_sqr() <= TOLERANCE * TOLERANCE))
}

proptest! {
    #[test]
    fn operations_preserve_state_invariants(rho in arb_state(), eta in 0.0f64..=1.0) {
        prop_assert!(rho.depolarize(eta).unwrap().check_invariants().is_ok());
        prop_assert!(rho.hadamard().check_invariants().is_ok());
    }

    #[test]
    fn measurement_distributions_normalize(rho in arb_state(), basis in arb_basis()) {
        let d = rho.measurement_distribution(basis);
        prop_assert!((d.p_zero() + d.p_one() - 1.0).abs() <= TOLERANCE);
        prop_assert!(d.p_zero() >= -TOLERANCE && d.p_zero() <= 1.0 + TOLERANCE);
    }

    #[test]
    fn depolarize_is_affine_and_trace_preserving(rho in arb_state(), eta in 0.0f64..=1.0) {
        let out = rho.depolarize(eta).unwrap();
        let m_in = rho.matrix();
        let m_out = out.matrix();
        // Affine: every entry is (1-eta) * entry + eta * I/2 entry.
        for i in 0..2 {
            for j in 0..2 {
                let expect = m_in[i][j] * (1.0 - eta)
                    + if i == j {
                        Complex64::new(eta * 0.5, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                prop_assert!((m_out[i][j] - expect).norm_sqr() <= TOLERANCE * TOLERANCE);
            }
        }
        prop_assert!((m_out[0][0] + m_out[1][1] - Complex64::new(1.0, 0.0)).norm_sqr() <= TOLERANCE * TOLERANCE);
    }

    #[test]
    fn depolarize_commutes_with_hadamard(rho in arb_state(), eta in 0.0f64..=1.0) {
        let a = rho.hadamard().depolarize(eta).unwrap();
        let b = rho.depolarize(eta).unwrap().hadamard();
        prop_assert!(entrywise_close(&a, &b));
    }

    #[test]
    fn helstrom_at_least_the_prior(
        rho0 in arb_state(),
        rho1 in arb_state(),
        prior0 in 0.0f64..=1.0,
    ) {
        let (p, _) = helstrom_success(&rho0, &rho1, prior0).unwrap();
        prop_assert!(p >= prior0.max(1.0 - prior0) - TOLERANCE);
        prop_assert!(p <= 1.0 + TOLERANCE);
    }

    #[test]
    fn helstrom_equal_priors_is_half_plus_half_trace_distance(
        rho0 in arb_state(),
        rho1 in arb_state(),
    ) {
        let (p, _) = helstrom_success(&rho0, &rho1, 0.5).unwrap();
        let td = trace_distance(&rho0, &rho1);
        prop_assert!((p - 0.5 * (1.0 + td)).abs() <= TOLERANCE);
    }
}

#[test]
fn sampling_converges_to_the_distribution() {
    // Empirical frequency within 4 * sqrt(p(1-p)/N) for N = 10^5 on a
    // spread of states and bases.
    let cases = [
        (QubitState::bb84(Bit::Zero, Basis::X), Basis::Z),
        (
            QubitState::bb84(Bit::Zero, Basis::Z)
                .depolarize(0.3)
                .unwrap(),
            Basis::Z,
        ),
        (QubitState::maximally_mixed(), Basis::X),
    ];
    let n = 100_000u64;
    for (k, (state, basis)) in cases.iter().enumerate() {
        let p0 = state.measurement_distribution(*basis).p_zero();
        let mut rng = SplitRng::new(7000 + k as u64);
        let zeros: u64 = (0..n)
            .map(|_| u64::from(state.sample_measurement(*basis, &mut rng) == Bit::Zero))
            .sum();
        let freq = zeros as f64 / n as f64;
        let tol = 4.0 * (p0 * (1.0 - p0) / n as f64).sqrt();
        assert!(
            (freq - p0).abs() <= tol.max(1e-9),
            "case {k}: {freq} vs {p0}"
        );
    }
}
