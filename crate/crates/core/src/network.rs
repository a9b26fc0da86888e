//! Passive linear-optical networks: circuit elements, composition into a
//! unitary, action on two-photon forms, and Haar-random sampling.
//!
//! Elements act on the photons in list order: the first element is the first
//! the light traverses.  Writing the input/output creation-operator relation
//! as `a = u · c`, the composed unitary is `u = E_1 · E_2 · ... · E_k`, and a
//! form `N` transforms as `M = uᵀ N u`.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::states::BilinearForm;

/// Matrices wrapped by [`CircuitElement::RawUnitary`] and
/// [`LinearNetwork::from_unitary`] must be unitary within this residual.
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// One passive element of a circuit.  Mode indices are 1-based.
#[derive(Clone, Debug, PartialEq)]
pub enum CircuitElement {
    /// Two-mode rotation on (i, j):
    /// `[[e^{i phi} cos theta, -sin theta], [e^{i phi} sin theta, cos theta]]`.
    Beamsplitter { i: usize, j: usize, theta: f64, phi: f64 },
    /// Phase factor e^{i phi} on one mode.
    PhaseShifter { mode: usize, phi: f64 },
    /// Exchange of two modes (a polarization rotator or physical relabeling).
    Swap { i: usize, j: usize },
    /// An explicit unitary acting on all modes at once.
    RawUnitary(Array2<Complex64>),
}

impl CircuitElement {
    /// Check indices, angles and (for raw matrices) unitarity against a
    /// network on `n` modes.
    pub fn validate(&self, n: usize) -> Result<()> {
        let check_mode = |m: usize| -> Result<()> {
            if m == 0 || m > n {
                Err(Error::ModeOutOfRange { mode: m, modes: n })
            } else {
                Ok(())
            }
        };
        match self {
            CircuitElement::Beamsplitter { i, j, theta, phi } => {
                check_mode(*i)?;
                check_mode(*j)?;
                if i == j {
                    return Err(Error::DuplicateMode(*i));
                }
                if !theta.is_finite() || !phi.is_finite() {
                    return Err(Error::NonFinite("beamsplitter angle"));
                }
                Ok(())
            }
            CircuitElement::PhaseShifter { mode, phi } => {
                check_mode(*mode)?;
                if !phi.is_finite() {
                    return Err(Error::NonFinite("phase-shifter angle"));
                }
                Ok(())
            }
            CircuitElement::Swap { i, j } => {
                check_mode(*i)?;
                check_mode(*j)?;
                if i == j {
                    return Err(Error::DuplicateMode(*i));
                }
                Ok(())
            }
            CircuitElement::RawUnitary(m) => {
                if m.nrows() != n || m.ncols() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: m.nrows().max(m.ncols()),
                    });
                }
                if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(Error::NonFinite("raw unitary entry"));
                }
                let residual = linalg::unitarity_residual(m);
                if residual > UNITARITY_TOLERANCE {
                    return Err(Error::NotUnitary {
                        residual,
                        tolerance: UNITARITY_TOLERANCE,
                    });
                }
                Ok(())
            }
        }
    }

    /// Right-multiply `u <- u · E` where E is this element's matrix.  This is
    /// how elements accumulate in list order.
    fn apply_right(&self, u: &mut Array2<Complex64>) {
        let rows = u.nrows();
        match self {
            CircuitElement::Beamsplitter { i, j, theta, phi } => {
                let (p, q) = (i - 1, j - 1);
                let (sin, cos) = theta.sin_cos();
                let ph = Complex64::from_polar(1.0, *phi);
                let epp = ph * cos;
                let epq = Complex64::new(-sin, 0.0);
                let eqp = ph * sin;
                let eqq = Complex64::new(cos, 0.0);
                for r in 0..rows {
                    let up = u[(r, p)];
                    let uq = u[(r, q)];
                    u[(r, p)] = up * epp + uq * eqp;
                    u[(r, q)] = up * epq + uq * eqq;
                }
            }
            CircuitElement::PhaseShifter { mode, phi } => {
                let p = mode - 1;
                let ph = Complex64::from_polar(1.0, *phi);
                for r in 0..rows {
                    u[(r, p)] *= ph;
                }
            }
            CircuitElement::Swap { i, j } => {
                let (p, q) = (i - 1, j - 1);
                for r in 0..rows {
                    let tmp = u[(r, p)];
                    u[(r, p)] = u[(r, q)];
                    u[(r, q)] = tmp;
                }
            }
            CircuitElement::RawUnitary(m) => {
                // Explicit multiply-accumulate keeps the accumulation order
                // fixed (bit-reproducible) and leaves an identity prefix
                // bit-exact, which `u.dot(m)` does not guarantee.
                let cols = m.ncols();
                let mut product = Array2::zeros((rows, cols));
                for r in 0..rows {
                    for c in 0..cols {
                        let mut acc = Complex64::new(0.0, 0.0);
                        for k in 0..cols {
                            acc += u[(r, k)] * m[(k, c)];
                        }
                        product[(r, c)] = acc;
                    }
                }
                *u = product;
            }
        }
    }

    /// Element list that undoes this element (a beamsplitter's inverse needs
    /// an extra phase shifter, so the result is a list).
    pub fn inverse(&self) -> Vec<CircuitElement> {
        match self {
            CircuitElement::Beamsplitter { i, j, theta, phi } => vec![
                CircuitElement::PhaseShifter { mode: *i, phi: -phi },
                CircuitElement::Beamsplitter { i: *i, j: *j, theta: -theta, phi: 0.0 },
            ],
            CircuitElement::PhaseShifter { mode, phi } => {
                vec![CircuitElement::PhaseShifter { mode: *mode, phi: -phi }]
            }
            CircuitElement::Swap { i, j } => vec![CircuitElement::Swap { i: *i, j: *j }],
            CircuitElement::RawUnitary(m) => {
                let mut adj = Array2::<Complex64>::zeros((m.ncols(), m.nrows()));
                for r in 0..m.nrows() {
                    for c in 0..m.ncols() {
                        adj[(c, r)] = m[(r, c)].conj();
                    }
                }
                vec![CircuitElement::RawUnitary(adj)]
            }
        }
    }
}

/// The four photonic-input components of one output mode: entry k is the
/// overlap of the output mode with input mode k (k = 1..=4).
#[derive(Clone, Copy, Debug)]
pub struct AlphaVector {
    entries: [Complex64; 4],
}

impl AlphaVector {
    /// Wrap four components directly (mostly for tests and oracles).
    pub fn new(entries: [Complex64; 4]) -> Self {
        AlphaVector { entries }
    }

    /// All four components.
    pub fn entries(&self) -> [Complex64; 4] {
        self.entries
    }

    /// Component for 1-based input mode `k`.
    pub fn entry(&self, k: usize) -> Complex64 {
        assert!((1..=4).contains(&k), "alpha components are 1..=4");
        self.entries[k - 1]
    }

    /// Sum of |alpha_k|^2; at most 1 for a column of a unitary.
    pub fn norm_squared(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Plain (unconjugated) dot product with a length-4 vector.
    pub fn bilinear_dot(&self, other: &[Complex64; 4]) -> Complex64 {
        self.entries
            .iter()
            .zip(other.iter())
            .map(|(a, b)| a * b)
            .sum()
    }
}

/// A composed passive network: an n x n unitary plus the element list that
/// built it (empty for raw or random networks).
#[derive(Clone, Debug)]
pub struct LinearNetwork {
    n: usize,
    u: Array2<Complex64>,
    elements: Vec<CircuitElement>,
}

impl LinearNetwork {
    /// The do-nothing network on `n >= 1` modes.
    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewModes { needed: 1, got: 0 });
        }
        Ok(LinearNetwork {
            n,
            u: Array2::eye(n),
            elements: Vec::new(),
        })
    }

    /// Compose validated elements in list order into a network on `n` modes.
    pub fn compose(n: usize, elements: Vec<CircuitElement>) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewModes { needed: 1, got: 0 });
        }
        let mut u = Array2::<Complex64>::eye(n);
        for element in &elements {
            element.validate(n)?;
            element.apply_right(&mut u);
        }
        Ok(LinearNetwork { n, u, elements })
    }

    /// Wrap an explicit unitary (validated within [`UNITARITY_TOLERANCE`]).
    pub fn from_unitary(u: Array2<Complex64>) -> Result<Self> {
        let n = u.nrows();
        if n == 0 {
            return Err(Error::TooFewModes { needed: 1, got: 0 });
        }
        CircuitElement::RawUnitary(u.clone()).validate(n)?;
        Ok(LinearNetwork {
            n,
            u,
            elements: Vec::new(),
        })
    }

    /// Number of modes.
    pub fn modes(&self) -> usize {
        self.n
    }

    /// The composed unitary (0-based storage).
    pub fn unitary(&self) -> &Array2<Complex64> {
        &self.u
    }

    /// Elements used to build the network, in traversal order.
    pub fn elements(&self) -> &[CircuitElement] {
        &self.elements
    }

    /// The same network on `n_total >= n` modes; added modes pass through.
    pub fn embed(&self, n_total: usize) -> Result<Self> {
        if n_total < self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: n_total,
            });
        }
        let mut u = Array2::<Complex64>::eye(n_total);
        for r in 0..self.n {
            for c in 0..self.n {
                u[(r, c)] = self.u[(r, c)];
            }
        }
        Ok(LinearNetwork {
            n: n_total,
            u,
            elements: self.elements.clone(),
        })
    }

    /// Transform a two-photon form through the network: M = uᵀ N u.
    pub fn apply(&self, input: &BilinearForm) -> Result<BilinearForm> {
        if input.modes() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: input.modes(),
            });
        }
        let mut m = self.u.t().dot(input.matrix()).dot(&self.u);
        // Re-symmetrise to remove the few-ulp asymmetry of floating-point
        // matrix products, so entry(i, j) == entry(j, i) holds exactly.
        for r in 0..self.n {
            for c in r + 1..self.n {
                let avg = (m[(r, c)] + m[(c, r)]) / 2.0;
                m[(r, c)] = avg;
                m[(c, r)] = avg;
            }
        }
        Ok(BilinearForm::from_matrix_unchecked(m))
    }

    /// First four entries of output column `i`: how strongly output mode `i`
    /// couples to the four photonic input modes.
    pub fn alpha(&self, i: usize) -> Result<AlphaVector> {
        if self.n < 4 {
            return Err(Error::TooFewModes {
                needed: 4,
                got: self.n,
            });
        }
        if i == 0 || i > self.n {
            return Err(Error::ModeOutOfRange {
                mode: i,
                modes: self.n,
            });
        }
        let col = i - 1;
        Ok(AlphaVector {
            entries: [
                self.u[(0, col)],
                self.u[(1, col)],
                self.u[(2, col)],
                self.u[(3, col)],
            ],
        })
    }

    /// Haar-distributed random network on `n` modes, reproducible per seed:
    /// a matrix of standard complex Gaussians orthonormalized column by
    /// column with the triangular factor's diagonal kept real positive.
    pub fn random_haar(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::TooFewModes { needed: 1, got: 0 });
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        let mut u = Array2::<Complex64>::zeros((n, n));
        for r in 0..n {
            for c in 0..n {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                u[(r, c)] = Complex64::new(re * inv_sqrt2, im * inv_sqrt2);
            }
        }
        linalg::orthonormalize_columns(&mut u);
        Ok(LinearNetwork {
            n,
            u,
            elements: Vec::new(),
        })
    }

    /// Named reference circuits.
    ///
    /// * `"bs-pbs"`: one 50/50 beamsplitter per polarization, modes (1,3) and
    ///   (2,4), followed by polarization-resolving detectors.
    /// * `"bs-pbs-hwp"`: the same with photon B's polarizations exchanged
    ///   first (a half-wave plate), which swaps which Bell pair is identified.
    pub fn preset(name: &str) -> Result<Self> {
        let quarter = std::f64::consts::FRAC_PI_4;
        let bs = |i: usize, j: usize| CircuitElement::Beamsplitter {
            i,
            j,
            theta: quarter,
            phi: 0.0,
        };
        match name {
            "bs-pbs" => LinearNetwork::compose(4, vec![bs(1, 3), bs(2, 4)]),
            "bs-pbs-hwp" => {
                LinearNetwork::compose(4, vec![CircuitElement::Swap { i: 3, j: 4 }, bs(1, 3), bs(2, 4)])
            }
            other => Err(Error::UnknownPreset(other.to_string())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_form, BellIndex};
    use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI};

    const INV_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
    const INV_2_SQRT_2: f64 = 0.353_553_390_593_273_76;

    fn assert_close(z: Complex64, re: f64, im: f64, tol: f64) {
        assert!(
            (z.re - re).abs() < tol && (z.im - im).abs() < tol,
            "{z} != {re}+{im}i"
        );
    }

    #[test]
    fn single_beamsplitter_matrix() {
        let net = LinearNetwork::compose(
            2,
            vec![CircuitElement::Beamsplitter { i: 1, j: 2, theta: FRAC_PI_4, phi: 0.0 }],
        )
        .unwrap();
        let u = net.unitary();
        assert_close(u[(0, 0)], INV_SQRT_2, 0.0, 1e-15);
        assert_close(u[(0, 1)], -INV_SQRT_2, 0.0, 1e-15);
        assert_close(u[(1, 0)], INV_SQRT_2, 0.0, 1e-15);
        assert_close(u[(1, 1)], INV_SQRT_2, 0.0, 1e-15);
    }

    #[test]
    fn phase_shifter_matrix() {
        let net = LinearNetwork::compose(
            2,
            vec![CircuitElement::PhaseShifter { mode: 1, phi: PI }],
        )
        .unwrap();
        let u = net.unitary();
        assert_close(u[(0, 0)], -1.0, 0.0, 1e-15);
        assert_close(u[(1, 1)], 1.0, 0.0, 1e-15);
        assert_close(u[(0, 1)], 0.0, 0.0, 1e-15);
    }

    #[test]
    fn swap_is_an_involution() {
        let net = LinearNetwork::compose(
            3,
            vec![
                CircuitElement::Swap { i: 1, j: 3 },
                CircuitElement::Swap { i: 1, j: 3 },
            ],
        )
        .unwrap();
        assert!(linalg::unitarity_residual(net.unitary()) < 1e-15);
        for r in 0..3 {
            for c in 0..3 {
                let expect = if r == c { 1.0 } else { 0.0 };
                assert_close(net.unitary()[(r, c)], expect, 0.0, 1e-15);
            }
        }
    }

    #[test]
    fn each_element_composes_with_its_inverse_to_identity() {
        let haar = LinearNetwork::random_haar(4, 99).unwrap();
        let elements = vec![
            CircuitElement::Beamsplitter { i: 2, j: 4, theta: 0.7, phi: -1.3 },
            CircuitElement::PhaseShifter { mode: 3, phi: 2.1 },
            CircuitElement::Swap { i: 1, j: 2 },
            CircuitElement::RawUnitary(haar.unitary().clone()),
        ];
        for element in elements {
            let mut list = vec![element.clone()];
            list.extend(element.inverse());
            let net = LinearNetwork::compose(4, list).unwrap();
            let mut residual = 0.0f64;
            for r in 0..4 {
                for c in 0..4 {
                    let expect = if r == c { 1.0 } else { 0.0 };
                    residual = residual.max((net.unitary()[(r, c)] - expect).norm());
                }
            }
            assert!(residual < 1e-10, "inverse failed for {element:?}");
        }
    }

    #[test]
    fn composition_stays_unitary() {
        let net = LinearNetwork::compose(
            5,
            vec![
                CircuitElement::Beamsplitter { i: 1, j: 4, theta: 0.3, phi: 0.9 },
                CircuitElement::PhaseShifter { mode: 2, phi: -2.2 },
                CircuitElement::Beamsplitter { i: 2, j: 3, theta: FRAC_PI_3, phi: 0.1 },
                CircuitElement::Swap { i: 4, j: 5 },
                CircuitElement::Beamsplitter { i: 3, j: 5, theta: 1.2, phi: 2.8 },
            ],
        )
        .unwrap();
        assert!(linalg::unitarity_residual(net.unitary()) < 1e-12);
    }

    #[test]
    fn identity_leaves_forms_unchanged() {
        let net = LinearNetwork::identity(4).unwrap();
        let input = bell_form(BellIndex::Psi2, 4).unwrap();
        let out = net.apply(&input).unwrap();
        for i in 1..=4 {
            for j in 1..=4 {
                assert_eq!(out.entry(i, j), input.entry(i, j));
            }
        }
    }

    #[test]
    fn preset_transforms_opposite_polarization_states_to_coincidences() {
        let net = LinearNetwork::preset("bs-pbs").unwrap();
        let m3 = net.apply(&bell_form(BellIndex::Psi3, 4).unwrap()).unwrap();
        assert_close(m3.entry(1, 2), INV_2_SQRT_2, 0.0, 1e-14);
        assert_close(m3.entry(2, 1), INV_2_SQRT_2, 0.0, 1e-14);
        assert_close(m3.entry(3, 4), -INV_2_SQRT_2, 0.0, 1e-14);
        assert_close(m3.entry(4, 3), -INV_2_SQRT_2, 0.0, 1e-14);
        for i in 1..=4 {
            for j in 1..=4 {
                let expected = matches!((i, j), (1, 2) | (2, 1) | (3, 4) | (4, 3));
                if !expected {
                    assert!(m3.entry(i, j).norm() < 1e-14, "({i},{j}) unexpected");
                }
            }
        }

        let m4 = net.apply(&bell_form(BellIndex::Psi4, 4).unwrap()).unwrap();
        assert_close(m4.entry(1, 4), INV_2_SQRT_2, 0.0, 1e-14);
        assert_close(m4.entry(2, 3), -INV_2_SQRT_2, 0.0, 1e-14);
    }

    #[test]
    fn preset_transforms_equal_polarization_states_to_double_occupations() {
        let net = LinearNetwork::preset("bs-pbs").unwrap();
        let m1 = net.apply(&bell_form(BellIndex::Psi1, 4).unwrap()).unwrap();
        let signs = [1.0, 1.0, -1.0, -1.0];
        for (k, sign) in signs.iter().enumerate() {
            assert_close(m1.entry(k + 1, k + 1), sign * INV_2_SQRT_2, 0.0, 1e-14);
        }
        for i in 1..=4 {
            for j in 1..=4 {
                if i != j {
                    assert!(m1.entry(i, j).norm() < 1e-14);
                }
            }
        }

        let m2 = net.apply(&bell_form(BellIndex::Psi2, 4).unwrap()).unwrap();
        let signs2 = [1.0, -1.0, -1.0, 1.0];
        for (k, sign) in signs2.iter().enumerate() {
            assert_close(m2.entry(k + 1, k + 1), sign * INV_2_SQRT_2, 0.0, 1e-14);
        }
    }

    #[test]
    fn half_wave_plate_preset_swaps_the_identified_pair() {
        let net = LinearNetwork::preset("bs-pbs-hwp").unwrap();
        // With the wave plate ahead of the beamsplitters, Psi1 now exits on
        // the coincidence pattern that Psi3 had without it.
        let m1 = net.apply(&bell_form(BellIndex::Psi1, 4).unwrap()).unwrap();
        assert_close(m1.entry(1, 2), INV_2_SQRT_2, 0.0, 1e-14);
        assert_close(m1.entry(3, 4), -INV_2_SQRT_2, 0.0, 1e-14);
        let m3 = net.apply(&bell_form(BellIndex::Psi3, 4).unwrap()).unwrap();
        for i in 1..=4 {
            for j in 1..=4 {
                if i != j {
                    assert!(m3.entry(i, j).norm() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn alpha_of_first_preset_output() {
        let net = LinearNetwork::preset("bs-pbs").unwrap();
        let alpha = net.alpha(1).unwrap();
        assert_close(alpha.entry(1), INV_SQRT_2, 0.0, 1e-15);
        assert_close(alpha.entry(2), 0.0, 0.0, 1e-15);
        assert_close(alpha.entry(3), INV_SQRT_2, 0.0, 1e-15);
        assert_close(alpha.entry(4), 0.0, 0.0, 1e-15);
    }

    #[test]
    fn alpha_norms_sum_to_four() {
        for seed in [3u64, 17, 40] {
            for n in [4usize, 6, 9] {
                let net = LinearNetwork::random_haar(n, seed).unwrap();
                let total: f64 = (1..=n).map(|i| net.alpha(i).unwrap().norm_squared()).sum();
                assert!((total - 4.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn embedding_pads_with_pass_through_modes() {
        let net = LinearNetwork::preset("bs-pbs").unwrap().embed(6).unwrap();
        assert_eq!(net.modes(), 6);
        assert!(linalg::unitarity_residual(net.unitary()) < 1e-12);
        assert_close(net.unitary()[(4, 4)], 1.0, 0.0, 1e-15);
        assert_close(net.unitary()[(5, 5)], 1.0, 0.0, 1e-15);
        let alpha = net.alpha(1).unwrap();
        assert_close(alpha.entry(1), INV_SQRT_2, 0.0, 1e-15);
        assert!(net.embed(4).is_err());
    }

    #[test]
    fn haar_sampling_is_reproducible_and_unitary() {
        let a = LinearNetwork::random_haar(6, 42).unwrap();
        let b = LinearNetwork::random_haar(6, 42).unwrap();
        let c = LinearNetwork::random_haar(6, 43).unwrap();
        assert!(linalg::unitarity_residual(a.unitary()) < 1e-12);
        let mut same = true;
        let mut diff = 0.0f64;
        for r in 0..6 {
            for cix in 0..6 {
                same &= a.unitary()[(r, cix)] == b.unitary()[(r, cix)];
                diff = diff.max((a.unitary()[(r, cix)] - c.unitary()[(r, cix)]).norm());
            }
        }
        assert!(same, "same seed must give identical matrices");
        assert!(diff > 1e-3, "different seeds must differ");
    }

    #[test]
    fn validation_rejects_bad_elements() {
        assert!(LinearNetwork::compose(
            2,
            vec![CircuitElement::Beamsplitter { i: 1, j: 3, theta: 0.1, phi: 0.0 }]
        )
        .is_err());
        assert!(LinearNetwork::compose(
            2,
            vec![CircuitElement::Beamsplitter { i: 2, j: 2, theta: 0.1, phi: 0.0 }]
        )
        .is_err());
        assert!(LinearNetwork::compose(
            2,
            vec![CircuitElement::PhaseShifter { mode: 0, phi: 0.1 }]
        )
        .is_err());
        assert!(LinearNetwork::compose(
            2,
            vec![CircuitElement::Beamsplitter { i: 1, j: 2, theta: f64::NAN, phi: 0.0 }]
        )
        .is_err());

        let mut not_unitary = Array2::<Complex64>::eye(3);
        not_unitary[(0, 0)] = Complex64::new(2.0, 0.0);
        assert!(LinearNetwork::from_unitary(not_unitary).is_err());

        assert!(matches!(
            LinearNetwork::preset("pbs-bs"),
            Err(Error::UnknownPreset(_))
        ));
        assert!(LinearNetwork::identity(0).is_err());
    }

    #[test]
    fn apply_checks_dimensions() {
        let net = LinearNetwork::identity(5).unwrap();
        let form = bell_form(BellIndex::Psi1, 4).unwrap();
        assert!(net.apply(&form).is_err());
    }
}
