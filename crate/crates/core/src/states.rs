//! Two-photon polarization states as symmetric bilinear forms.
//!
//! Mode numbering is 1-based everywhere in the public API and follows the
//! dual-rail polarization layout: mode 1 = photon A horizontal, mode 2 =
//! photon A vertical, mode 3 = photon B horizontal, mode 4 = photon B
//! vertical.  A pure two-photon state is written
//!
//! ```text
//! |Psi> = sum_{ij} N_ij a_i† a_j† |0>
//! ```
//!
//! with a symmetric coefficient matrix `N`; its squared norm is
//! `2 * sum_{ij} |N_ij|^2`.

use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// One of the four maximally entangled two-photon Bell states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BellIndex {
    /// (a1† a3† + a2† a4†)/sqrt(2): equal polarizations, plus sign.
    Psi1,
    /// (a1† a3† - a2† a4†)/sqrt(2): equal polarizations, minus sign.
    Psi2,
    /// (a1† a4† + a2† a3†)/sqrt(2): opposite polarizations, plus sign.
    Psi3,
    /// (a1† a4† - a2† a3†)/sqrt(2): opposite polarizations, minus sign.
    Psi4,
}

impl BellIndex {
    /// All four states in index order.
    pub const ALL: [BellIndex; 4] = [
        BellIndex::Psi1,
        BellIndex::Psi2,
        BellIndex::Psi3,
        BellIndex::Psi4,
    ];

    /// The 1-based index used in reports and file formats.
    pub fn index(self) -> usize {
        match self {
            BellIndex::Psi1 => 1,
            BellIndex::Psi2 => 2,
            BellIndex::Psi3 => 3,
            BellIndex::Psi4 => 4,
        }
    }

    /// Inverse of [`BellIndex::index`]; accepts `1..=4`.
    pub fn from_index(mu: usize) -> Result<Self> {
        match mu {
            1 => Ok(BellIndex::Psi1),
            2 => Ok(BellIndex::Psi2),
            3 => Ok(BellIndex::Psi3),
            4 => Ok(BellIndex::Psi4),
            other => Err(Error::BellIndexOutOfRange(other)),
        }
    }

    /// Zero-based array position; the per-state arrays in reports are laid
    /// out in this order.
    pub fn slot(self) -> usize {
        self.index() - 1
    }
}

impl fmt::Display for BellIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Psi{}", self.index())
    }
}

/// The 4x4 coupling pattern of one Bell state: symmetric, entries in
/// {-1, 0, +1}, zero 2x2 diagonal blocks, and exactly orthogonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WMatrix {
    entries: [[i8; 4]; 4],
}

impl WMatrix {
    /// Entry at 1-based (row, col).
    pub fn entry(&self, row: usize, col: usize) -> i8 {
        assert!(
            (1..=4).contains(&row) && (1..=4).contains(&col),
            "WMatrix indices are 1..=4"
        );
        self.entries[row - 1][col - 1]
    }

    /// The full pattern with 0-based indexing.
    pub fn entries(&self) -> [[i8; 4]; 4] {
        self.entries
    }

    /// W · v for a length-4 complex vector.
    pub fn mul_vec(&self, v: &[Complex64; 4]) -> [Complex64; 4] {
        let mut out = [Complex64::new(0.0, 0.0); 4];
        for (r, row) in self.entries.iter().enumerate() {
            for (c, &e) in row.iter().enumerate() {
                if e != 0 {
                    out[r] += f64::from(e) * v[c];
                }
            }
        }
        out
    }
}

/// Coupling pattern of the given Bell state.
pub fn w_matrix(mu: BellIndex) -> WMatrix {
    let entries = match mu {
        BellIndex::Psi1 => [
            [0, 0, 1, 0], //
            [0, 0, 0, 1],
            [1, 0, 0, 0],
            [0, 1, 0, 0],
        ],
        BellIndex::Psi2 => [
            [0, 0, 1, 0], //
            [0, 0, 0, -1],
            [1, 0, 0, 0],
            [0, -1, 0, 0],
        ],
        BellIndex::Psi3 => [
            [0, 0, 0, 1], //
            [0, 0, 1, 0],
            [0, 1, 0, 0],
            [1, 0, 0, 0],
        ],
        BellIndex::Psi4 => [
            [0, 0, 0, 1], //
            [0, 0, -1, 0],
            [0, -1, 0, 0],
            [1, 0, 0, 0],
        ],
    };
    WMatrix { entries }
}

/// A pure two-photon state stored as its symmetric coefficient matrix.
#[derive(Clone, Debug)]
pub struct BilinearForm {
    entries: Array2<Complex64>,
}

impl BilinearForm {
    /// Number of modes the form is defined on.
    pub fn modes(&self) -> usize {
        self.entries.nrows()
    }

    /// Coefficient at 1-based (i, j).
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        let n = self.modes();
        assert!(
            (1..=n).contains(&i) && (1..=n).contains(&j),
            "form indices are 1..={n}"
        );
        self.entries[(i - 1, j - 1)]
    }

    /// Read-only view of the coefficient matrix (0-based storage).
    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.entries
    }

    /// Squared norm <Psi|Psi> = 2 sum |N_ij|^2.
    pub fn norm_squared(&self) -> f64 {
        2.0 * self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// The same state scaled to unit norm.
    pub fn normalized(&self) -> Result<BilinearForm> {
        let norm_sq = self.norm_squared();
        if norm_sq <= 0.0 {
            return Err(Error::ZeroNorm);
        }
        let scale = Complex64::new(1.0 / norm_sq.sqrt(), 0.0);
        Ok(BilinearForm {
            entries: self.entries.mapv(|z| z * scale),
        })
    }

    /// Wrap a coefficient matrix that is already symmetric.
    pub(crate) fn from_matrix_unchecked(entries: Array2<Complex64>) -> Self {
        BilinearForm { entries }
    }
}

/// Bell state `mu` as a bilinear form on `n >= 4` modes; the photons occupy
/// modes 1..=4 and any further modes start in vacuum.
pub fn bell_form(mu: BellIndex, n: usize) -> Result<BilinearForm> {
    if n < 4 {
        return Err(Error::TooFewModes { needed: 4, got: n });
    }
    let w = w_matrix(mu);
    let scale = 1.0 / (2.0 * 2.0f64.sqrt());
    let mut entries = Array2::<Complex64>::zeros((n, n));
    for r in 0..4 {
        for c in 0..4 {
            let e = w.entries[r][c];
            if e != 0 {
                entries[(r, c)] = Complex64::new(f64::from(e) * scale, 0.0);
            }
        }
    }
    Ok(BilinearForm { entries })
}

/// Build an arbitrary two-photon form from `(i, j, amplitude)` terms; each
/// term adds `amplitude * a_i† a_j†`.  Off-diagonal terms are symmetrised, so
/// the coefficient matrix gains `amplitude/2` at both (i, j) and (j, i).
pub fn general_two_photon_form(
    terms: &[(usize, usize, Complex64)],
    n: usize,
) -> Result<BilinearForm> {
    if n == 0 {
        return Err(Error::TooFewModes { needed: 1, got: 0 });
    }
    let mut entries = Array2::<Complex64>::zeros((n, n));
    for &(i, j, amplitude) in terms {
        if i == 0 || i > n {
            return Err(Error::ModeOutOfRange { mode: i, modes: n });
        }
        if j == 0 || j > n {
            return Err(Error::ModeOutOfRange { mode: j, modes: n });
        }
        if !amplitude.re.is_finite() || !amplitude.im.is_finite() {
            return Err(Error::NonFinite("two-photon amplitude"));
        }
        if i == j {
            entries[(i - 1, i - 1)] += amplitude;
        } else {
            let half = amplitude / 2.0;
            entries[(i - 1, j - 1)] += half;
            entries[(j - 1, i - 1)] += half;
        }
    }
    Ok(BilinearForm { entries })
}

/// Prior probabilities for the four Bell states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Priors {
    p: [f64; 4],
}

impl Priors {
    /// How close to 1 the sum must be at construction.
    pub const SUM_TOLERANCE: f64 = 1e-12;

    /// Uniform priors, 1/4 each.
    pub fn uniform() -> Self {
        Priors { p: [0.25; 4] }
    }

    /// Validated priors: finite, non-negative, summing to 1 within 1e-12.
    pub fn new(p: [f64; 4]) -> Result<Self> {
        for (k, &value) in p.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::InvalidPriors(format!("entry {} not finite", k + 1)));
            }
            if value < 0.0 {
                return Err(Error::InvalidPriors(format!(
                    "entry {} is negative ({value})",
                    k + 1
                )));
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(Error::InvalidPriors(format!(
                "sum {sum} differs from 1 by more than {}",
                Self::SUM_TOLERANCE
            )));
        }
        Ok(Priors { p })
    }

    /// Accept a sum within `slack` of 1 and rescale so it is exactly 1.
    pub fn renormalized(p: [f64; 4], slack: f64) -> Result<Self> {
        for (k, &value) in p.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::InvalidPriors(format!("entry {} not finite", k + 1)));
            }
            if value < 0.0 {
                return Err(Error::InvalidPriors(format!(
                    "entry {} is negative ({value})",
                    k + 1
                )));
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > slack || sum <= 0.0 {
            return Err(Error::InvalidPriors(format!(
                "sum {sum} differs from 1 by more than {slack}"
            )));
        }
        let mut scaled = p;
        for value in &mut scaled {
            *value /= sum;
        }
        Ok(Priors { p: scaled })
    }

    /// Prior of one state.
    pub fn get(&self, mu: BellIndex) -> f64 {
        self.p[mu.slot()]
    }

    /// All four priors in Psi1..Psi4 order.
    pub fn as_array(&self) -> [f64; 4] {
        self.p
    }

    /// Sum of the two largest priors: the ceiling for exact discrimination
    /// success in a passive network with vacuum ancillas.
    pub fn two_largest_sum(&self) -> f64 {
        let mut sorted = self.p;
        sorted.sort_by(|a, b| b.partial_cmp(a).expect("priors are finite"));
        sorted[0] + sorted[1]
    }
}

impl Default for Priors {
    fn default() -> Self {
        Priors::uniform()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const INV_2_SQRT_2: f64 = 0.353_553_390_593_273_76; // 1/(2 sqrt 2)

    #[test]
    fn bell_index_round_trips() {
        for mu in BellIndex::ALL {
            assert_eq!(BellIndex::from_index(mu.index()).unwrap(), mu);
        }
        assert!(BellIndex::from_index(0).is_err());
        assert!(BellIndex::from_index(5).is_err());
        assert_eq!(BellIndex::Psi3.to_string(), "Psi3");
    }

    #[test]
    fn coupling_patterns_match_the_bell_states() {
        // Nonzero entries, state by state.
        let w1 = w_matrix(BellIndex::Psi1);
        assert_eq!(w1.entry(1, 3), 1);
        assert_eq!(w1.entry(2, 4), 1);
        assert_eq!(w1.entry(3, 1), 1);
        assert_eq!(w1.entry(4, 2), 1);

        let w2 = w_matrix(BellIndex::Psi2);
        assert_eq!(w2.entry(1, 3), 1);
        assert_eq!(w2.entry(2, 4), -1);
        assert_eq!(w2.entry(3, 1), 1);
        assert_eq!(w2.entry(4, 2), -1);

        let w3 = w_matrix(BellIndex::Psi3);
        assert_eq!(w3.entry(1, 4), 1);
        assert_eq!(w3.entry(2, 3), 1);
        assert_eq!(w3.entry(3, 2), 1);
        assert_eq!(w3.entry(4, 1), 1);

        let w4 = w_matrix(BellIndex::Psi4);
        assert_eq!(w4.entry(1, 4), 1);
        assert_eq!(w4.entry(2, 3), -1);
        assert_eq!(w4.entry(3, 2), -1);
        assert_eq!(w4.entry(4, 1), 1);

        for mu in BellIndex::ALL {
            let e = w_matrix(mu).entries();
            let mut nonzero = 0;
            for r in 0..4 {
                for c in 0..4 {
                    // Symmetric with zero 2x2 diagonal blocks.
                    assert_eq!(e[r][c], e[c][r]);
                    if r / 2 == c / 2 {
                        assert_eq!(e[r][c], 0);
                    }
                    if e[r][c] != 0 {
                        nonzero += 1;
                    }
                }
            }
            assert_eq!(nonzero, 4);
        }
    }

    #[test]
    fn coupling_patterns_are_exactly_orthogonal() {
        for mu in BellIndex::ALL {
            let e = w_matrix(mu).entries();
            for i in 0..4 {
                for j in 0..4 {
                    let dot: i32 = (0..4)
                        .map(|k| i32::from(e[k][i]) * i32::from(e[k][j]))
                        .sum();
                    assert_eq!(dot, if i == j { 1 } else { 0 });
                }
            }
        }
    }

    #[test]
    fn bell_forms_are_unit_norm_with_expected_entries() {
        for mu in BellIndex::ALL {
            let form = bell_form(mu, 4).unwrap();
            assert!((form.norm_squared() - 1.0).abs() < 1e-14);
            let w = w_matrix(mu);
            for i in 1..=4 {
                for j in 1..=4 {
                    let expect = f64::from(w.entry(i, j)) * INV_2_SQRT_2;
                    assert!((form.entry(i, j).re - expect).abs() < 1e-15);
                    assert_eq!(form.entry(i, j).im, 0.0);
                }
            }
        }
        // Extra vacuum modes stay empty.
        let wide = bell_form(BellIndex::Psi2, 6).unwrap();
        assert_eq!(wide.modes(), 6);
        for i in 1..=6 {
            for j in 5..=6 {
                assert_eq!(wide.entry(i, j), Complex64::new(0.0, 0.0));
            }
        }
        assert!((wide.norm_squared() - 1.0).abs() < 1e-14);
        assert!(bell_form(BellIndex::Psi1, 3).is_err());
    }

    #[test]
    fn general_form_symmetrises_terms() {
        let one = Complex64::new(1.0, 0.0);
        let form = general_two_photon_form(&[(1, 2, one)], 2).unwrap();
        assert!((form.entry(1, 2).re - 0.5).abs() < 1e-15);
        assert!((form.entry(2, 1).re - 0.5).abs() < 1e-15);
        assert!((form.norm_squared() - 1.0).abs() < 1e-15);
        let same = form.normalized().unwrap();
        assert!((same.entry(1, 2).re - 0.5).abs() < 1e-15);

        // A double-occupation term lands on the diagonal unhalved.
        let diag = general_two_photon_form(&[(3, 3, one)], 3).unwrap();
        assert_eq!(diag.entry(3, 3), one);
        assert!((diag.norm_squared() - 2.0).abs() < 1e-15);

        assert!(general_two_photon_form(&[(0, 1, one)], 2).is_err());
        assert!(general_two_photon_form(&[(1, 3, one)], 2).is_err());
        let nan = Complex64::new(f64::NAN, 0.0);
        assert!(general_two_photon_form(&[(1, 2, nan)], 2).is_err());
    }

    #[test]
    fn norm_squared_of_single_pair() {
        let c = Complex64::new(0.3, -0.4);
        let form = general_two_photon_form(&[(1, 2, c * 2.0)], 2).unwrap();
        // N_12 = N_21 = c, so the squared norm is 4 |c|^2.
        assert!((form.norm_squared() - 4.0 * c.norm_sqr()).abs() < 1e-14);
    }

    #[test]
    fn zero_form_cannot_be_normalized() {
        let form = general_two_photon_form(&[], 4).unwrap();
        assert!(matches!(form.normalized(), Err(Error::ZeroNorm)));
    }

    #[test]
    fn priors_validate_and_renormalize() {
        let uniform = Priors::uniform();
        assert_eq!(uniform.as_array(), [0.25; 4]);
        assert!((uniform.two_largest_sum() - 0.5).abs() < 1e-15);

        let skew = Priors::new([0.4, 0.3, 0.2, 0.1]).unwrap();
        assert!((skew.get(BellIndex::Psi1) - 0.4).abs() < 1e-15);
        assert!((skew.two_largest_sum() - 0.7).abs() < 1e-15);

        assert!(Priors::new([0.4, 0.3, 0.2, 0.2]).is_err());
        assert!(Priors::new([-0.1, 0.5, 0.3, 0.3]).is_err());
        assert!(Priors::new([f64::NAN, 0.5, 0.25, 0.25]).is_err());

        let loose = [0.4 + 2e-10, 0.3, 0.2, 0.1];
        assert!(Priors::new(loose).is_err());
        let fixed = Priors::renormalized(loose, 1e-9).unwrap();
        let sum: f64 = fixed.as_array().iter().sum();
        assert!((sum - 1.0).abs() <= Priors::SUM_TOLERANCE);
        assert!(Priors::renormalized([0.5, 0.5, 0.5, 0.5], 1e-9).is_err());
    }
}
