//! Exact single-qubit quantum mechanics on 2x2 density matrices.
//!
//! States are always carried as density matrices rather than sampled pure
//! states, so every per-round acceptance probability can be computed exactly
//! alongside its Monte Carlo estimate. All matrix invariants (Hermitian, unit
//! trace, positive semidefinite) are enforced to [`TOLERANCE`], and the 2x2
//! Hermitian eigenproblem is solved in closed form.

use crate::math;
use crate::rng::SplitRng;
use core::fmt;
use num_complex::Complex64;

/// Numeric tolerance for all matrix invariants.
pub const TOLERANCE: f64 = 1e-12;

/// A classical bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Bit {
    Zero,
    One,
}

impl Bit {
    #[inline]
    pub fn from_bool(b: bool) -> Self {
        if b {
            Bit::One
        } else {
            Bit::Zero
        }
    }

    #[inline]
    pub fn as_u8(self) -> u8 {
        match self {
            Bit::Zero => 0,
            Bit::One => 1,
        }
    }

    #[inline]
    pub fn flipped(self) -> Self {
        match self {
            Bit::Zero => Bit::One,
            Bit::One => Bit::Zero,
        }
    }

    #[inline]
    pub fn xor(self, other: Bit) -> Bit {
        Bit::from_bool(self != other)
    }

    pub const BOTH: [Bit; 2] = [Bit::Zero, Bit::One];
}

impl fmt::Display for Bit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

/// Measurement/preparation basis: `Z` (computational) or `X` (diagonal).
///
/// The two bases are mutually unbiased: any eigenstate of one measures to a
/// fair coin in the other. Basis bit encoding is `0 -> Z`, `1 -> X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Z,
    X,
}

impl Basis {
    #[inline]
    pub fn from_bit(bit: Bit) -> Self {
        match bit {
            Bit::Zero => Basis::Z,
            Bit::One => Basis::X,
        }
    }

    #[inline]
    pub fn as_bit(self) -> Bit {
        match self {
            Basis::Z => Bit::Zero,
            Basis::X => Bit::One,
        }
    }

    /// Parity of two basis choices: `Zero` when equal, `One` when different.
    #[inline]
    pub fn parity(a: Basis, b: Basis) -> Bit {
        a.as_bit().xor(b.as_bit())
    }

    pub const BOTH: [Basis; 2] = [Basis::Z, Basis::X];
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Basis::Z => write!(f, "Z"),
            Basis::X => write!(f, "X"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QuantumError {
    /// Depolarizing parameter outside `[0, 1]`.
    EtaOutOfRange(f64),
    /// Prior probability outside `[0, 1]`.
    PriorOutOfRange(f64),
    /// Matrix fails a density-matrix invariant.
    InvalidDensityMatrix(&'static str),
}

impl fmt::Display for QuantumError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantumError::EtaOutOfRange(eta) => {
                write!(f, "depolarizing parameter {eta} outside [0, 1]")
            }
            QuantumError::PriorOutOfRange(p) => write!(f, "prior {p} outside [0, 1]"),
            QuantumError::InvalidDensityMatrix(what) => {
                write!(f, "invalid density matrix: {what}")
            }
        }
    }
}

impl core::error::Error for QuantumError {}

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);
const C_HALF: Complex64 = Complex64::new(0.5, 0.0);
const C_NEG_HALF: Complex64 = Complex64::new(-0.5, 0.0);

/// 2x2 complex matrix with just the operations the crate needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Mat2 {
    pub e: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub const ZERO: Mat2 = Mat2 {
        e: [[C_ZERO, C_ZERO], [C_ZERO, C_ZERO]],
    };

    pub const IDENTITY: Mat2 = Mat2 {
        e: [[C_ONE, C_ZERO], [C_ZERO, C_ONE]],
    };

    pub fn add(self, o: Mat2) -> Mat2 {
        let mut r = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                r.e[i][j] = self.e[i][j] + o.e[i][j];
            }
        }
        r
    }

    pub fn sub(self, o: Mat2) -> Mat2 {
        let mut r = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                r.e[i][j] = self.e[i][j] - o.e[i][j];
            }
        }
        r
    }

    pub fn mul(self, o: Mat2) -> Mat2 {
        let mut r = Mat2::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                r.e[i][j] = self.e[i][0] * o.e[0][j] + self.e[i][1] * o.e[1][j];
            }
        }
        r
    }

    pub fn scale(self, s: f64) -> Mat2 {
        let mut r = self;
        for i in 0..2 {
            for j in 0..2 {
                r.e[i][j] *= s;
            }
        }
        r
    }

    pub fn adjoint(self) -> Mat2 {
        Mat2 {
            e: [
                [self.e[0][0].conj(), self.e[1][0].conj()],
                [self.e[0][1].conj(), self.e[1][1].conj()],
            ],
        }
    }

    pub fn trace(self) -> Complex64 {
        self.e[0][0] + self.e[1][1]
    }

    /// `|v><v|` for a (not necessarily normalized) column vector.
    pub fn outer(v: [Complex64; 2]) -> Mat2 {
        Mat2 {
            e: [
                [v[0] * v[0].conj(), v[0] * v[1].conj()],
                [v[1] * v[0].conj(), v[1] * v[1].conj()],
            ],
        }
    }

    pub fn max_abs_diff(self, o: Mat2) -> f64 {
        let mut m = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.e[i][j] - o.e[i][j]).norm_sqr());
            }
        }
        math::sqrt(m)
    }

    /// Eigenvalues and orthonormal eigenvectors of a Hermitian matrix,
    /// returned as `(low, high)`. Closed form via trace and determinant.
    pub fn hermitian_eigen(self) -> ((f64, [Complex64; 2]), (f64, [Complex64; 2])) {
        let a = self.e[0][0].re;
        let d = self.e[1][1].re;
        let b = self.e[0][1];
        let mean = 0.5 * (a + d);
        let radius = math::sqrt(0.25 * (a - d) * (a - d) + b.norm_sqr());
        let lo = mean - radius;
        let hi = mean + radius;

        let (v_hi, v_lo) = if b.norm_sqr() > 1e-60 {
            let v = [b, Complex64::new(hi - a, 0.0)];
            let norm = math::sqrt(v[0].norm_sqr() + v[1].norm_sqr());
            let v_hi = [v[0] / norm, v[1] / norm];
            let v_lo = [-v_hi[1].conj(), v_hi[0].conj()];
            (v_hi, v_lo)
        } else if a >= d {
            ([C_ONE, C_ZERO], [C_ZERO, C_ONE])
        } else {
            ([C_ZERO, C_ONE], [C_ONE, C_ZERO])
        };

        ((lo, v_lo), (hi, v_hi))
    }
}

/// Normalized BB84 state vectors, indexed `[basis][bit]`.
const FRAC_1_SQRT_2: f64 = core::f64::consts::FRAC_1_SQRT_2;
const KET: [[[Complex64; 2]; 2]; 2] = [
    [
        [C_ONE, C_ZERO], // |0>
        [C_ZERO, C_ONE], // |1>
    ],
    [
        [
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        ], // |+>
        [
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(-FRAC_1_SQRT_2, 0.0),
        ], // |->
    ],
];

/// Rank-one projectors onto the four BB84 states, indexed `[basis][bit]`.
const PROJECTOR: [[Mat2; 2]; 2] = [
    [
        Mat2 {
            e: [[C_ONE, C_ZERO], [C_ZERO, C_ZERO]],
        },
        Mat2 {
            e: [[C_ZERO, C_ZERO], [C_ZERO, C_ONE]],
        },
    ],
    [
        Mat2 {
            e: [[C_HALF, C_HALF], [C_HALF, C_HALF]],
        },
        Mat2 {
            e: [[C_HALF, C_NEG_HALF], [C_NEG_HALF, C_HALF]],
        },
    ],
];

fn basis_index(basis: Basis) -> usize {
    basis.as_bit().as_u8() as usize
}

pub(crate) fn projector(basis: Basis, bit: Bit) -> Mat2 {
    PROJECTOR[basis_index(basis)][bit.as_u8() as usize]
}

/// Two-outcome distribution of a projective measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementDistribution {
    p0: f64,
    p1: f64,
}

impl MeasurementDistribution {
    fn new(p0: f64, p1: f64) -> Self {
        debug_assert!(
            (-TOLERANCE..=1.0 + TOLERANCE).contains(&p0)
                && (-TOLERANCE..=1.0 + TOLERANCE).contains(&p1)
                && math::abs(p0 + p1 - 1.0) <= TOLERANCE,
            "not a distribution: ({p0}, {p1})"
        );
        Self { p0, p1 }
    }

    #[inline]
    pub fn p_zero(&self) -> f64 {
        self.p0
    }

    #[inline]
    pub fn p_one(&self) -> f64 {
        self.p1
    }

    #[inline]
    pub fn probability_of(&self, bit: Bit) -> f64 {
        match bit {
            Bit::Zero => self.p0,
            Bit::One => self.p1,
        }
    }
}

/// A single-qubit state as a 2x2 density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitState {
    m: Mat2,
}

impl QubitState {
    /// The BB84 state `|bit>_basis` as a rank-one density matrix.
    #[inline]
    pub fn bb84(bit: Bit, basis: Basis) -> Self {
        QubitState {
            m: projector(basis, bit),
        }
    }

    /// The maximally mixed state `I/2`.
    pub fn maximally_mixed() -> Self {
        QubitState {
            m: Mat2::IDENTITY.scale(0.5),
        }
    }

    /// Build a state from raw matrix entries, validating all invariants.
    pub fn from_matrix(entries: [[Complex64; 2]; 2]) -> Result<Self, QuantumError> {
        let m = Mat2 { e: entries };
        let state = QubitState { m };
        state.check_invariants()?;
        Ok(state)
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.m.e
    }

    pub(crate) fn mat(&self) -> Mat2 {
        self.m
    }

    pub(crate) fn from_mat_unchecked(m: Mat2) -> Self {
        QubitState { m }
    }

    /// Hermitian within tolerance, unit trace, positive semidefinite.
    pub fn check_invariants(&self) -> Result<(), QuantumError> {
        if self.m.max_abs_diff(self.m.adjoint()) > TOLERANCE {
            return Err(QuantumError::InvalidDensityMatrix("not Hermitian"));
        }
        let tr = self.m.trace();
        if math::abs(tr.re - 1.0) > TOLERANCE || math::abs(tr.im) > TOLERANCE {
            return Err(QuantumError::InvalidDensityMatrix("trace != 1"));
        }
        let ((lo, _), _) = self.m.hermitian_eigen();
        if lo < -TOLERANCE {
            return Err(QuantumError::InvalidDensityMatrix(
                "negative eigenvalue (not PSD)",
            ));
        }
        Ok(())
    }

    /// `tr(rho^2)`; equals 1 for pure states.
    pub fn purity(&self) -> f64 {
        self.m.mul(self.m).trace().re
    }

    /// Born-rule outcome distribution for a projective measurement in `basis`.
    pub fn measurement_distribution(&self, basis: Basis) -> MeasurementDistribution {
        let p0 = projector(basis, Bit::Zero).mul(self.m).trace().re;
        let p1 = projector(basis, Bit::One).mul(self.m).trace().re;
        MeasurementDistribution::new(p0, p1)
    }

    /// Sample one measurement outcome. Consumes exactly one draw from `rng`.
    pub fn sample_measurement(&self, basis: Basis, rng: &mut SplitRng) -> Bit {
        let dist = self.measurement_distribution(basis);
        if rng.next_f64() < dist.p_zero() {
            Bit::Zero
        } else {
            Bit::One
        }
    }

    /// Depolarizing channel: `(1 - eta) * rho + eta * I/2`.
    pub fn depolarize(&self, eta: f64) -> Result<Self, QuantumError> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(QuantumError::EtaOutOfRange(eta));
        }
        Ok(QubitState {
            m: self.m.scale(1.0 - eta).add(Mat2::IDENTITY.scale(eta * 0.5)),
        })
    }

    /// Conjugation by the Hadamard gate; swaps the Z and X bases.
    pub fn hadamard(&self) -> Self {
        let h = Mat2 {
            e: [
                [
                    Complex64::new(FRAC_1_SQRT_2, 0.0),
                    Complex64::new(FRAC_1_SQRT_2, 0.0),
                ],
                [
                    Complex64::new(FRAC_1_SQRT_2, 0.0),
                    Complex64::new(-FRAC_1_SQRT_2, 0.0),
                ],
            ],
        };
        QubitState {
            m: h.mul(self.m).mul(h),
        }
    }
}

/// Pure-state ket `|bit>_basis` as a vector; used to build superpositions.
pub fn bb84_ket(bit: Bit, basis: Basis) -> [Complex64; 2] {
    KET[basis_index(basis)][bit.as_u8() as usize]
}

/// Pure state `cos(theta)|0> + sin(theta)|1>`.
pub fn real_superposition(theta: f64) -> QubitState {
    let v = [
        Complex64::new(math::cos(theta), 0.0),
        Complex64::new(math::sin(theta), 0.0),
    ];
    QubitState { m: Mat2::outer(v) }
}

/// Trace distance `|| a - b ||_1 / 2` between two states.
pub fn trace_distance(a: &QubitState, b: &QubitState) -> f64 {
    let ((lo, _), (hi, _)) = a.m.sub(b.m).hermitian_eigen();
    0.5 * (math::abs(lo) + math::abs(hi))
}

/// The optimal two-outcome measurement discriminating two known states.
///
/// Outcome `One` means "guess state 1"; the projector is the positive
/// eigenspace of `prior1 * rho1 - prior0 * rho0` (zero eigenvalues resolve to
/// "guess state 0").
#[derive(Debug, Clone, Copy)]
pub struct HelstromMeasurement {
    guess_one: Mat2,
}

impl HelstromMeasurement {
    /// Probability that the measurement outputs "guess 1" on `state`.
    pub fn probability_guess_one(&self, state: &QubitState) -> f64 {
        let p = self.guess_one.mul(state.m).trace().re;
        p.clamp(0.0, 1.0)
    }

    /// Sample the guess. Consumes exactly one draw from `rng`.
    pub fn sample(&self, state: &QubitState, rng: &mut SplitRng) -> Bit {
        Bit::from_bool(rng.bernoulli(self.probability_guess_one(state)))
    }
}

/// Maximum success probability (and the measurement achieving it) when
/// distinguishing `rho0` (prior `prior0`) from `rho1` (prior `1 - prior0`):
/// `prior0 + tr_+[(1 - prior0) rho1 - prior0 rho0]`.
pub fn helstrom_success(
    rho0: &QubitState,
    rho1: &QubitState,
    prior0: f64,
) -> Result<(f64, HelstromMeasurement), QuantumError> {
    if !(0.0..=1.0).contains(&prior0) {
        return Err(QuantumError::PriorOutOfRange(prior0));
    }
    let prior1 = 1.0 - prior0;
    let delta = rho1.m.scale(prior1).sub(rho0.m.scale(prior0));
    let ((lo, v_lo), (hi, v_hi)) = delta.hermitian_eigen();

    let mut positive_part = 0.0;
    let mut guess_one = Mat2::ZERO;
    if hi > 0.0 {
        positive_part += hi;
        guess_one = guess_one.add(Mat2::outer(v_hi));
    }
    if lo > 0.0 {
        positive_part += lo;
        guess_one = guess_one.add(Mat2::outer(v_lo));
    }
    Ok((prior0 + positive_part, HelstromMeasurement { guess_one }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64) {
        assert!((a - b).abs() <= TOLERANCE, "{a} != {b}");
    }

    fn assert_matrix(state: &QubitState, expect: [[f64; 2]; 2]) {
        let m = state.matrix();
        for i in 0..2 {
            for j in 0..2 {
                assert!(
                    (m[i][j].re - expect[i][j]).abs() <= TOLERANCE && m[i][j].im.abs() <= TOLERANCE,
                    "entry ({i},{j}) = {:?}, expected {}",
                    m[i][j],
                    expect[i][j]
                );
            }
        }
    }

    #[test]
    fn bb84_matrices() {
        assert_matrix(
            &QubitState::bb84(Bit::Zero, Basis::Z),
            [[1.0, 0.0], [0.0, 0.0]],
        );
        assert_matrix(
            &QubitState::bb84(Bit::Zero, Basis::X),
            [[0.5, 0.5], [0.5, 0.5]],
        );
        assert_matrix(
            &QubitState::bb84(Bit::One, Basis::X),
            [[0.5, -0.5], [-0.5, 0.5]],
        );
        for basis in Basis::BOTH {
            for bit in Bit::BOTH {
                let s = QubitState::bb84(bit, basis);
                s.check_invariants().unwrap();
                assert_close(s.purity(), 1.0);
            }
        }
    }

    #[test]
    fn mutually_unbiased_bases() {
        for r in Bit::BOTH {
            for s in Bit::BOTH {
                let overlap = projector(Basis::Z, r)
                    .mul(projector(Basis::X, s))
                    .trace()
                    .re;
                assert_close(overlap, 0.5);
            }
        }
    }

    #[test]
    fn measurement_distribution_examples() {
        let d = QubitState::bb84(Bit::Zero, Basis::Z).measurement_distribution(Basis::Z);
        assert_close(d.p_zero(), 1.0);
        assert_close(d.p_one(), 0.0);

        let d = QubitState::bb84(Bit::Zero, Basis::X).measurement_distribution(Basis::Z);
        assert_close(d.p_zero(), 0.5);
        assert_close(d.p_one(), 0.5);

        let noisy = QubitState::bb84(Bit::Zero, Basis::Z)
            .depolarize(0.2)
            .unwrap();
        let d = noisy.measurement_distribution(Basis::Z);
        assert_close(d.p_zero(), 0.9);
        assert_close(d.p_one(), 0.1);
    }

    #[test]
    fn sampling_is_deterministic_and_exact_on_eigenstates() {
        let state = QubitState::bb84(Bit::One, Basis::Z);
        for seed in [0u64, 1, 99] {
            let mut rng = SplitRng::new(seed);
            assert_eq!(state.sample_measurement(Basis::Z, &mut rng), Bit::One);
        }
        let s = QubitState::bb84(Bit::Zero, Basis::X);
        let mut a = SplitRng::new(5);
        let mut b = SplitRng::new(5);
        for _ in 0..32 {
            assert_eq!(
                s.sample_measurement(Basis::Z, &mut a),
                s.sample_measurement(Basis::Z, &mut b)
            );
        }
    }

    #[test]
    fn sampling_frequency_matches_distribution() {
        // Empirical mean over 10^6 draws within +-0.002 of 1/2.
        let state = QubitState::bb84(Bit::Zero, Basis::X);
        let mut rng = SplitRng::new(2024);
        let n = 1_000_000;
        let ones: u64 = (0..n)
            .map(|_| state.sample_measurement(Basis::Z, &mut rng).as_u8() as u64)
            .sum();
        let mean = ones as f64 / n as f64;
        assert!((mean - 0.5).abs() < 0.002, "mean {mean}");
    }

    #[test]
    fn depolarize_examples() {
        let rho = QubitState::bb84(Bit::One, Basis::X);
        assert_eq!(rho.depolarize(0.0).unwrap(), rho);

        assert_matrix(
            &QubitState::bb84(Bit::Zero, Basis::Z)
                .depolarize(1.0)
                .unwrap(),
            [[0.5, 0.0], [0.0, 0.5]],
        );
        assert_matrix(
            &QubitState::bb84(Bit::Zero, Basis::Z)
                .depolarize(0.5)
                .unwrap(),
            [[0.75, 0.0], [0.0, 0.25]],
        );
        assert!(rho.depolarize(-0.1).is_err());
        assert!(rho.depolarize(1.1).is_err());
    }

    #[test]
    fn hadamard_swaps_bases_and_is_involutive() {
        let diff = QubitState::bb84(Bit::Zero, Basis::Z)
            .hadamard()
            .mat()
            .max_abs_diff(QubitState::bb84(Bit::Zero, Basis::X).mat());
        assert!(diff <= TOLERANCE);
        let diff = QubitState::bb84(Bit::One, Basis::X)
            .hadamard()
            .mat()
            .max_abs_diff(QubitState::bb84(Bit::One, Basis::Z).mat());
        assert!(diff <= TOLERANCE);
        let rho = QubitState::bb84(Bit::One, Basis::Z)
            .depolarize(0.3)
            .unwrap();
        assert!(rho.hadamard().hadamard().mat().max_abs_diff(rho.mat()) <= TOLERANCE);
    }

    #[test]
    fn depolarize_commutes_with_hadamard() {
        let rho = QubitState::bb84(Bit::Zero, Basis::X)
            .depolarize(0.1)
            .unwrap();
        for eta in [0.0, 0.3, 0.7, 1.0] {
            let a = rho.hadamard().depolarize(eta).unwrap();
            let b = rho.depolarize(eta).unwrap().hadamard();
            assert!(a.mat().max_abs_diff(b.mat()) <= TOLERANCE);
        }
    }

    #[test]
    fn helstrom_examples() {
        let rho = QubitState::bb84(Bit::Zero, Basis::X);
        let (p, _) = helstrom_success(&rho, &rho, 0.5).unwrap();
        assert_close(p, 0.5);

        let (p, m) = helstrom_success(
            &QubitState::bb84(Bit::Zero, Basis::Z),
            &QubitState::bb84(Bit::One, Basis::Z),
            0.5,
        )
        .unwrap();
        assert_close(p, 1.0);
        assert_close(
            m.probability_guess_one(&QubitState::bb84(Bit::One, Basis::Z)),
            1.0,
        );
        assert_close(
            m.probability_guess_one(&QubitState::bb84(Bit::Zero, Basis::Z)),
            0.0,
        );

        assert!(helstrom_success(&rho, &rho, 1.5).is_err());
    }

    #[test]
    fn helstrom_never_beats_certainty_nor_loses_to_prior() {
        let states = [
            QubitState::bb84(Bit::Zero, Basis::Z),
            QubitState::bb84(Bit::One, Basis::X),
            QubitState::maximally_mixed(),
            real_superposition(0.3),
        ];
        for a in &states {
            for b in &states {
                for prior in [0.0, 0.25, 0.5, 0.9, 1.0] {
                    let (p, _) = helstrom_success(a, b, prior).unwrap();
                    assert!(p >= prior.max(1.0 - prior) - TOLERANCE);
                    assert!(p <= 1.0 + TOLERANCE);
                }
            }
        }
    }

    #[test]
    fn from_matrix_validates() {
        assert!(QubitState::from_matrix([
            [Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0)],
        ])
        .is_ok());
        // trace != 1
        assert!(QubitState::from_matrix([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ])
        .is_err());
        // not Hermitian
        assert!(QubitState::from_matrix([
            [Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)],
            [Complex64::new(-0.5, 0.0), Complex64::new(0.5, 0.0)],
        ])
        .is_err());
        // not PSD
        assert!(QubitState::from_matrix([
            [Complex64::new(1.5, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(-0.5, 0.0)],
        ])
        .is_err());
    }

    #[test]
    fn trace_distance_basics() {
        let z0 = QubitState::bb84(Bit::Zero, Basis::Z);
        let z1 = QubitState::bb84(Bit::One, Basis::Z);
        assert_close(trace_distance(&z0, &z0), 0.0);
        assert_close(trace_distance(&z0, &z1), 1.0);
    }
}
