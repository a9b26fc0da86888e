//! Photon-counting outcomes and their probabilities.
//!
//! With both photons sent through the network, every detection event is
//! either a coincidence between two distinct output modes or a double click
//! in one mode.  For a normalized transformed form `M` the probabilities are
//! `4 |M_ij|^2` (i < j) and `2 |M_ii|^2` (double), which sum to one over all
//! outcomes.
//!
//! The module also exposes the per-mode structure used by the discrimination
//! analysis: the four-component overlap vector `alpha_i` of an output mode,
//! the coupled vector `s_i = W alpha_i` for each Bell state, the
//! single-photon remainder state after exactly one click in a mode, and the
//! closed-form pairwise overlaps of those remainder states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::network::{AlphaVector, LinearNetwork};
use crate::states::{bell_form, w_matrix, BellIndex, BilinearForm};

/// One photon-counting event: a pair of 1-based output modes, `i <= j`.
/// Equal modes mean both photons were detected in the same mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DetectionOutcome {
    i: usize,
    j: usize,
}

impl DetectionOutcome {
    /// Outcome for modes `i` and `j` in either order (equal allowed).
    pub fn new(i: usize, j: usize) -> Result<Self> {
        if i == 0 || j == 0 {
            return Err(Error::ModeOutOfRange {
                mode: 0,
                modes: usize::MAX,
            });
        }
        Ok(DetectionOutcome {
            i: i.min(j),
            j: i.max(j),
        })
    }

    /// Coincidence between two distinct modes.
    pub fn coincidence(i: usize, j: usize) -> Result<Self> {
        if i == j {
            return Err(Error::DuplicateMode(i));
        }
        DetectionOutcome::new(i, j)
    }

    /// Both photons in one mode.
    pub fn double(i: usize) -> Result<Self> {
        DetectionOutcome::new(i, i)
    }

    /// The two 1-based mode indices, smaller first.
    pub fn modes(&self) -> (usize, usize) {
        (self.i, self.j)
    }

    /// True when both photons landed in the same mode.
    pub fn is_double(&self) -> bool {
        self.i == self.j
    }
}

impl std::fmt::Display for DetectionOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// All `n (n + 1) / 2` outcomes on `n` modes, ordered lexicographically:
/// (1,1), (1,2), ..., (1,n), (2,2), ...
pub fn enumerate_outcomes(n: usize) -> Vec<DetectionOutcome> {
    let mut outcomes = Vec::with_capacity(n * (n + 1) / 2);
    for i in 1..=n {
        for j in i..=n {
            outcomes.push(DetectionOutcome { i, j });
        }
    }
    outcomes
}

/// Probability of `outcome` for a state with transformed form `m`
/// (assumed normalized): `4 |M_ij|^2` for a coincidence, `2 |M_ii|^2` for a
/// double click.
pub fn outcome_probability(m: &BilinearForm, outcome: &DetectionOutcome) -> Result<f64> {
    let n = m.modes();
    let (i, j) = outcome.modes();
    if j > n {
        return Err(Error::ModeOutOfRange { mode: j, modes: n });
    }
    let weight = if outcome.is_double() { 2.0 } else { 4.0 };
    Ok(weight * m.entry(i, j).norm_sqr())
}

/// Probability that a Bell state sends both photons into the single output
/// mode described by `alpha`: `|alpha^T W alpha|^2 / 4`.  Agrees with
/// `2 |M_ii|^2` but needs only the four-component overlap vector.
pub fn two_photon_probability(alpha: &AlphaVector, which: BellIndex) -> f64 {
    let s = s_vector(alpha, which);
    alpha.bilinear_dot(s.entries_ref()).norm_sqr() / 4.0
}

/// The coupled four-vector `s = W alpha` of an output mode: its entry k says
/// how strongly a photon detected in that mode forces the partner photon
/// into input mode k, for the given Bell state.
#[derive(Clone, Copy, Debug)]
pub struct SVector {
    entries: [Complex64; 4],
}

impl SVector {
    /// All four components.
    pub fn entries(&self) -> [Complex64; 4] {
        self.entries
    }

    fn entries_ref(&self) -> &[Complex64; 4] {
        &self.entries
    }

    /// Component for 1-based input mode `k`.
    pub fn entry(&self, k: usize) -> Complex64 {
        assert!((1..=4).contains(&k), "coupled-vector components are 1..=4");
        self.entries[k - 1]
    }

    /// Sum of squared magnitudes; equals |alpha|^2 because W is orthogonal.
    pub fn norm_squared(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Conjugate-linear inner product `sum_k conj(self_k) other_k`.
    pub fn hermitian_dot(&self, other: &SVector) -> Complex64 {
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// `s = W alpha` for one Bell state's coupling pattern.
pub fn s_vector(alpha: &AlphaVector, which: BellIndex) -> SVector {
    SVector {
        entries: w_matrix(which).mul_vec(&alpha.entries()),
    }
}

/// Single-photon remainder after exactly one click in `detected_mode`: the
/// partner photon's (unnormalized) amplitudes over output modes.
#[derive(Clone, Debug)]
pub struct ConditionalState {
    detected_mode: usize,
    amplitudes: Vec<Complex64>,
}

impl ConditionalState {
    /// The 1-based mode whose single click produced this state.
    pub fn detected_mode(&self) -> usize {
        self.detected_mode
    }

    /// Unnormalized amplitude over each output mode (zero at the detected
    /// mode by construction).
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Probability of the conditioning event: exactly one photon in the
    /// detected mode.  Equals the squared norm of the amplitudes.
    pub fn probability(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Conjugate-linear inner product with another remainder state from the
    /// same detected mode.
    pub fn overlap(&self, other: &ConditionalState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Unit-norm copy of the amplitudes.
    pub fn normalized(&self) -> Result<Vec<Complex64>> {
        let norm = self.probability().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.amplitudes.iter().map(|z| z / norm).collect())
    }
}

/// Remainder state after one click in mode `i` for a state with transformed
/// form `m`: amplitude `2 M_ij` on each other mode `j`.
pub fn conditional_state(m: &BilinearForm, i: usize) -> Result<ConditionalState> {
    let n = m.modes();
    if i == 0 || i > n {
        return Err(Error::ModeOutOfRange { mode: i, modes: n });
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); n];
    for j in 1..=n {
        if j != i {
            amplitudes[j - 1] = 2.0 * m.entry(i, j);
        }
    }
    Ok(ConditionalState {
        detected_mode: i,
        amplitudes,
    })
}

/// Probability that a Bell state puts exactly one photon into the mode
/// described by `alpha`: `(|alpha|^2 - |alpha . s|^2) / 2`.
pub fn single_photon_probability(alpha: &AlphaVector, which: BellIndex) -> f64 {
    let s = s_vector(alpha, which);
    let dot = alpha.bilinear_dot(s.entries_ref());
    ((alpha.norm_squared() - dot.norm_sqr()) / 2.0).max(0.0)
}

/// Inner product of the two remainder states a mode produces for Bell states
/// `eta` and `mu` (conjugate-linear in `eta`), in closed form:
/// `(<s_eta, s_mu> - conj(alpha . s_eta)(alpha . s_mu)) / 2`.
///
/// Diagonal entries reproduce [`single_photon_probability`].
pub fn conditional_overlap(alpha: &AlphaVector, eta: BellIndex, mu: BellIndex) -> Complex64 {
    let s_eta = s_vector(alpha, eta);
    let s_mu = s_vector(alpha, mu);
    let dot_eta = alpha.bilinear_dot(s_eta.entries_ref());
    let dot_mu = alpha.bilinear_dot(s_mu.entries_ref());
    (s_eta.hermitian_dot(&s_mu) - dot_eta.conj() * dot_mu) / 2.0
}

/// Probability of every outcome under each of the four Bell inputs: one row
/// per outcome (ordered as in [`enumerate_outcomes`]), with the four
/// per-state probabilities alongside.
pub fn bell_outcome_probabilities(
    network: &LinearNetwork,
) -> Result<Vec<(DetectionOutcome, [f64; 4])>> {
    let n = network.modes();
    if n < 4 {
        return Err(Error::TooFewModes { needed: 4, got: n });
    }
    let mut transformed = Vec::with_capacity(4);
    for which in BellIndex::ALL {
        transformed.push(network.apply(&bell_form(which, n)?)?);
    }
    let mut rows = Vec::new();
    for outcome in enumerate_outcomes(n) {
        let mut probs = [0.0f64; 4];
        for (slot, m) in transformed.iter().enumerate() {
            probs[slot] = outcome_probability(m, &outcome)?;
        }
        rows.push((outcome, probs));
    }
    Ok(rows)
}
