//! Classification of detection outcomes and the structural limits on how
//! well a passive network can tell the four Bell states apart.
//!
//! An outcome is *unambiguous* when exactly one Bell state can produce it,
//! *ambiguous* when several can, and *dead* when none can.  The success
//! probability of an analyzer is the prior-weighted chance of landing on an
//! unambiguous outcome.  Alongside the bookkeeping, this module checks the
//! structural facts that cap that success:
//!
//! * a double click in one mode never identifies a state, because the four
//!   bunching amplitudes obey a quadratic identity;
//! * the four coupled vectors `s = W alpha` of any mode are linearly
//!   dependent, so at most two states are identifiable per mode;
//! * the prior-weighted success drawn from any single mode is at most
//!   `(q1 + q2) / 2 * |alpha|^2` with `q1`, `q2` the two largest priors,
//!   which summed over modes caps the total success at `q1 + q2` — one half
//!   under uniform priors.

use ndarray::Array2;
use num_complex::Complex64;

use crate::detection::{bell_outcome_probabilities, conditional_overlap, s_vector, DetectionOutcome};
use crate::error::{Error, Result};
use crate::linalg;
use crate::network::{AlphaVector, LinearNetwork};
use crate::states::{BellIndex, Priors};

/// Probabilities at or below this threshold count as "cannot occur" when
/// classifying outcomes.
pub const TAU_ZERO: f64 = 1e-10;

/// Coupled-vector determinants must vanish within this.
pub const TOL_DETERMINANT: f64 = 1e-10;
/// Coupled-vector norms must match `|alpha|` within this.
pub const TOL_S_NORM: f64 = 1e-12;
/// Dependence-vector entries above this count as participating.
pub const TOL_COEFFICIENT: f64 = 1e-8;
/// Modes with `|alpha|^2` below this are too dark for a meaningful
/// dependence-coefficient count.
pub const ALPHA_ACTIVITY_FLOOR: f64 = 0.1;
/// The per-network sum of `|alpha_i|^2` must equal 4 within this.
pub const TOL_COLUMN_SUM: f64 = 1e-10;
/// Each state's outcome probabilities must sum to 1 within this.
pub const TOL_COMPLETENESS: f64 = 1e-10;
/// Slack allowed on the per-mode success bound.
pub const TOL_PER_MODE_BOUND: f64 = 1e-10;
/// Slack allowed on the total success bound.
pub const TOL_TOTAL_BOUND: f64 = 1e-9;

/// What a detection outcome reveals about which Bell state was sent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OutcomeClass {
    /// Only this state can produce the outcome.
    Unambiguous(BellIndex),
    /// Two or more states can produce it (listed in index order).
    Ambiguous(Vec<BellIndex>),
    /// No state produces it.
    Dead,
}

/// One outcome with its per-state probabilities and classification.
#[derive(Clone, Debug)]
pub struct OutcomeRow {
    /// The detection event.
    pub outcome: DetectionOutcome,
    /// Probability of the event under each Bell input, in index order.
    pub probabilities: [f64; 4],
    /// Which states the event is compatible with.
    pub class: OutcomeClass,
}

/// Full discrimination analysis of one network under given priors.
#[derive(Clone, Debug)]
pub struct DiscriminationReport {
    modes: usize,
    priors: Priors,
    tau_zero: f64,
    rows: Vec<OutcomeRow>,
    success: f64,
    per_state_unambiguous: [f64; 4],
    per_mode_unambiguous: Vec<f64>,
    smallest_nonzero: Option<f64>,
    largest_treated_zero: Option<f64>,
}

impl DiscriminationReport {
    /// Number of network modes.
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// Priors the success figures are weighted with.
    pub fn priors(&self) -> &Priors {
        &self.priors
    }

    /// Threshold below which probabilities were treated as zero.
    pub fn tau_zero(&self) -> f64 {
        self.tau_zero
    }

    /// Every outcome with probabilities and classification, in
    /// lexicographic outcome order.
    pub fn rows(&self) -> &[OutcomeRow] {
        &self.rows
    }

    /// Prior-weighted probability of an unambiguous identification.
    pub fn success_probability(&self) -> f64 {
        self.success
    }

    /// Probability that each state, once sent, is unambiguously identified.
    pub fn per_state_unambiguous(&self) -> [f64; 4] {
        self.per_state_unambiguous
    }

    /// States identified with probability above the zero threshold.
    pub fn identified_states(&self) -> Vec<BellIndex> {
        BellIndex::ALL
            .into_iter()
            .filter(|which| self.per_state_unambiguous[which.slot()] > self.tau_zero)
            .collect()
    }

    /// Prior-weighted unambiguous probability credited to each mode; every
    /// outcome credits both its modes, so the values sum to twice the
    /// success probability.
    pub fn per_mode_unambiguous(&self) -> &[f64] {
        &self.per_mode_unambiguous
    }

    /// Smallest probability that survived the zero threshold, if any.
    pub fn smallest_nonzero(&self) -> Option<f64> {
        self.smallest_nonzero
    }

    /// Largest probability discarded by the zero threshold, if any.  A value
    /// close to the threshold means the classification is numerically
    /// fragile.
    pub fn largest_treated_zero(&self) -> Option<f64> {
        self.largest_treated_zero
    }
}

/// Classify every outcome of `network` and tally success probabilities,
/// treating probabilities at or below `tau_zero` as zero.
pub fn classify(
    network: &LinearNetwork,
    priors: &Priors,
    tau_zero: f64,
) -> Result<DiscriminationReport> {
    if !tau_zero.is_finite() || tau_zero <= 0.0 || tau_zero >= 1.0 {
        return Err(Error::InvalidTolerance(tau_zero));
    }
    let n = network.modes();
    let table = bell_outcome_probabilities(network)?;

    let mut rows = Vec::with_capacity(table.len());
    let mut success = 0.0f64;
    let mut per_state = [0.0f64; 4];
    let mut per_mode = vec![0.0f64; n];
    let mut smallest_nonzero: Option<f64> = None;
    let mut largest_treated_zero: Option<f64> = None;

    for (outcome, probabilities) in table {
        let mut support = Vec::new();
        for which in BellIndex::ALL {
            let p = probabilities[which.slot()];
            if p > tau_zero {
                support.push(which);
                smallest_nonzero = Some(smallest_nonzero.map_or(p, |s: f64| s.min(p)));
            } else {
                largest_treated_zero = Some(largest_treated_zero.map_or(p, |s: f64| s.max(p)));
            }
        }
        let class = match support.len() {
            0 => OutcomeClass::Dead,
            1 => OutcomeClass::Unambiguous(support[0]),
            _ => OutcomeClass::Ambiguous(support),
        };
        if let OutcomeClass::Unambiguous(which) = &class {
            let p = probabilities[which.slot()];
            let weighted = priors.get(*which) * p;
            success += weighted;
            per_state[which.slot()] += p;
            let (i, j) = outcome.modes();
            per_mode[i - 1] += weighted;
            per_mode[j - 1] += weighted;
        }
        rows.push(OutcomeRow {
            outcome,
            probabilities,
            class,
        });
    }

    Ok(DiscriminationReport {
        modes: n,
        priors: priors.clone(),
        tau_zero,
        rows,
        success,
        per_state_unambiguous: per_state,
        per_mode_unambiguous: per_mode,
        smallest_nonzero,
        largest_treated_zero,
    })
}

/// Cap on the prior-weighted success a single mode can contribute:
/// `(q1 + q2) / 2 * |alpha|^2` with `q1`, `q2` the two largest priors.
pub fn per_mode_bound(alpha: &AlphaVector, priors: &Priors) -> f64 {
    priors.two_largest_sum() / 2.0 * alpha.norm_squared()
}

/// Evidence that a double click in one mode cannot identify a state: the
/// four bunching amplitudes `d = alpha . s` obey
/// `d1^2 + d4^2 = d2^2 + d3^2`, so at most zero — or at least two — of the
/// bunching probabilities can be nonzero.
#[derive(Clone, Debug)]
pub struct TwoPhotonCheck {
    /// Bunching probability for each Bell state.
    pub probabilities: [f64; 4],
    /// `|d1^2 + d4^2 - d2^2 - d3^2|`, which should vanish.
    pub identity_residual: f64,
    /// Number of probabilities above the zero threshold.
    pub support: usize,
    /// False when exactly one probability is nonzero, which the identity
    /// forbids.
    pub passed: bool,
}

/// Run the double-click check for one output mode.
pub fn check_two_photon_never_unambiguous(alpha: &AlphaVector, tau_zero: f64) -> TwoPhotonCheck {
    let mut d = [Complex64::new(0.0, 0.0); 4];
    let mut probabilities = [0.0f64; 4];
    for which in BellIndex::ALL {
        let s = s_vector(alpha, which);
        let dot = alpha.bilinear_dot(&s.entries());
        d[which.slot()] = dot;
        probabilities[which.slot()] = dot.norm_sqr() / 4.0;
    }
    let identity_residual = (d[0] * d[0] + d[3] * d[3] - d[1] * d[1] - d[2] * d[2]).norm();
    let support = probabilities.iter().filter(|&&p| p > tau_zero).count();
    TwoPhotonCheck {
        probabilities,
        identity_residual,
        support,
        passed: support != 1,
    }
}

/// A linear dependence among the four coupled vectors of one mode.
#[derive(Clone, Debug)]
pub struct LinearDependence {
    /// `|det [s1 s2 s3 s4]|`, which should vanish.
    pub determinant_magnitude: f64,
    /// Unit-norm coefficients `lambda` with `sum_mu lambda_mu s_mu = 0`.
    pub coefficients: [Complex64; 4],
    /// Norm of the combination `sum_mu lambda_mu s_mu`.
    pub residual: f64,
    /// True when `|alpha|^2` is below [`ALPHA_ACTIVITY_FLOOR`], making the
    /// coefficient pattern uninformative.
    pub degenerate: bool,
}

/// Find the dependence among a mode's four coupled vectors.  Because each
/// coupled vector has norm `|alpha|`, any dependence must involve at least
/// two of them — which is why no click pattern can isolate more than two
/// states per mode.
pub fn check_linear_dependence(alpha: &AlphaVector) -> LinearDependence {
    let mut s_matrix = Array2::<Complex64>::zeros((4, 4));
    for which in BellIndex::ALL {
        let s = s_vector(alpha, which);
        for k in 0..4 {
            s_matrix[(k, which.slot())] = s.entries()[k];
        }
    }
    let determinant_magnitude = linalg::determinant(&s_matrix).norm();
    let lambda = linalg::smallest_right_singular_vector(&s_matrix);
    let mut coefficients = [Complex64::new(0.0, 0.0); 4];
    coefficients.copy_from_slice(&lambda);
    let mut combo = [Complex64::new(0.0, 0.0); 4];
    for (col, lam) in coefficients.iter().enumerate() {
        for (k, acc) in combo.iter_mut().enumerate() {
            *acc += lam * s_matrix[(k, col)];
        }
    }
    let residual = combo.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    LinearDependence {
        determinant_magnitude,
        coefficients,
        residual,
        degenerate: alpha.norm_squared() < ALPHA_ACTIVITY_FLOOR,
    }
}

/// Number of Bell states a single click in `mode` can unambiguously
/// identify: states whose single-click remainder lies outside the span of
/// the other three remainders.  Structurally at most two.
pub fn max_identifiable_states(network: &LinearNetwork, mode: usize) -> Result<usize> {
    let n = network.modes();
    if n < 4 {
        return Err(Error::TooFewModes { needed: 4, got: n });
    }
    if mode == 0 || mode > n {
        return Err(Error::ModeOutOfRange { mode, modes: n });
    }
    let alpha = network.alpha(mode)?;
    let mut gram = Array2::<Complex64>::zeros((4, 4));
    for eta in BellIndex::ALL {
        for mu in BellIndex::ALL {
            gram[(eta.slot(), mu.slot())] = conditional_overlap(&alpha, eta, mu);
        }
    }
    // Structural rank losses are exact, so genuine and spurious small
    // eigenvalues are separated by many orders of magnitude; a loose cutoff
    // keeps double-precision noise (~1e-16 relative) on the zero side.
    const RANK_CUTOFF: f64 = 1e-6;
    let full_rank = linalg::gram_rank(&gram, RANK_CUTOFF);
    let mut identifiable = 0;
    for removed in 0..4 {
        let keep: Vec<usize> = (0..4).filter(|&k| k != removed).collect();
        let mut minor = Array2::<Complex64>::zeros((3, 3));
        for (r, &kr) in keep.iter().enumerate() {
            for (c, &kc) in keep.iter().enumerate() {
                minor[(r, c)] = gram[(kr, kc)];
            }
        }
        if linalg::gram_rank(&minor, RANK_CUTOFF) < full_rank {
            identifiable += 1;
        }
    }
    Ok(identifiable)
}

/// Pass/fail tally for one structural check across many networks.
#[derive(Clone, Copy, Debug)]
pub struct CheckStat {
    /// Stable name used in reports.
    pub name: &'static str,
    /// Number of items examined (modes, states, or networks as relevant).
    pub checked: u64,
    /// Number of items that violated the check.
    pub failures: u64,
    /// Largest residual seen (signed excess for bound checks).
    pub worst: f64,
}

impl CheckStat {
    fn new(name: &'static str) -> Self {
        CheckStat {
            name,
            checked: 0,
            failures: 0,
            worst: f64::NEG_INFINITY,
        }
    }

    fn record(&mut self, residual: f64, ok: bool) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
        }
        if residual > self.worst {
            self.worst = residual;
        }
    }

    /// Fold another tally for the same check into this one.
    pub fn merge(&mut self, other: &CheckStat) {
        assert_eq!(self.name, other.name, "can only merge matching checks");
        self.checked += other.checked;
        self.failures += other.failures;
        if other.worst > self.worst {
            self.worst = other.worst;
        }
    }

    /// True when nothing failed.
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    /// Largest residual, or zero when nothing was checked.
    pub fn worst_residual(&self) -> f64 {
        if self.checked == 0 {
            0.0
        } else {
            self.worst
        }
    }
}

/// Tallies for the whole battery of structural checks.
#[derive(Clone, Debug)]
pub struct TheoremChecks {
    stats: Vec<CheckStat>,
}

const CHECK_NAMES: [&str; 8] = [
    "double-click-never-unambiguous",
    "coupled-vector-determinant",
    "coupled-vector-norm",
    "dependence-coefficients",
    "column-norm-sum",
    "completeness",
    "per-mode-bound",
    "total-bound",
];

impl TheoremChecks {
    /// Empty tallies for all checks.
    pub fn new() -> Self {
        TheoremChecks {
            stats: CHECK_NAMES.iter().map(|name| CheckStat::new(name)).collect(),
        }
    }

    fn stat_mut(&mut self, name: &str) -> &mut CheckStat {
        self.stats
            .iter_mut()
            .find(|s| s.name == name)
            .expect("unknown check name")
    }

    /// All tallies, in a fixed order.
    pub fn stats(&self) -> &[CheckStat] {
        &self.stats
    }

    /// Tally for one named check.
    pub fn stat(&self, name: &str) -> Option<&CheckStat> {
        self.stats.iter().find(|s| s.name == name)
    }

    /// True when every check passed everywhere.
    pub fn all_passed(&self) -> bool {
        self.stats.iter().all(CheckStat::passed)
    }

    /// Fold another battery run into this one.
    pub fn merge(&mut self, other: &TheoremChecks) {
        for (mine, theirs) in self.stats.iter_mut().zip(other.stats.iter()) {
            mine.merge(theirs);
        }
    }

    /// Run every structural check against one network.
    pub fn run_network(&mut self, network: &LinearNetwork, priors: &Priors) -> Result<()> {
        let n = network.modes();
        if n < 4 {
            return Err(Error::TooFewModes { needed: 4, got: n });
        }
        let report = classify(network, priors, TAU_ZERO)?;
        let alphas: Vec<AlphaVector> = (1..=n)
            .map(|i| network.alpha(i))
            .collect::<Result<_>>()?;

        // Double clicks can never single out a state.
        for alpha in &alphas {
            let check = check_two_photon_never_unambiguous(alpha, TAU_ZERO);
            self.stat_mut("double-click-never-unambiguous")
                .record(check.identity_residual, check.passed);
        }

        // The four coupled vectors of each mode are linearly dependent, all
        // of equal norm, and the dependence involves at least two of them.
        for alpha in &alphas {
            let norm_sq = alpha.norm_squared();
            for which in BellIndex::ALL {
                let s = s_vector(alpha, which);
                let residual = (s.norm_squared() - norm_sq).abs();
                self.stat_mut("coupled-vector-norm")
                    .record(residual, residual <= TOL_S_NORM);
            }
            let dependence = check_linear_dependence(alpha);
            self.stat_mut("coupled-vector-determinant").record(
                dependence.determinant_magnitude,
                dependence.determinant_magnitude <= TOL_DETERMINANT,
            );
            if !dependence.degenerate {
                let sizable = dependence
                    .coefficients
                    .iter()
                    .filter(|z| z.norm() > TOL_COEFFICIENT)
                    .count();
                let ok = sizable >= 2 && dependence.residual <= TOL_DETERMINANT;
                self.stat_mut("dependence-coefficients")
                    .record(dependence.residual, ok);
            }
        }

        // The photonic rows of a unitary carry total weight four.
        let column_sum: f64 = alphas.iter().map(AlphaVector::norm_squared).sum();
        let column_residual = (column_sum - 4.0).abs();
        self.stat_mut("column-norm-sum")
            .record(column_residual, column_residual <= TOL_COLUMN_SUM);

        // Each state's outcome probabilities form a distribution.
        for which in BellIndex::ALL {
            let total: f64 = report
                .rows()
                .iter()
                .map(|row| row.probabilities[which.slot()])
                .sum();
            let residual = (total - 1.0).abs();
            self.stat_mut("completeness")
                .record(residual, residual <= TOL_COMPLETENESS);
        }

        // Per-mode success from coincidences stays under the mode's cap.
        // Only genuine single-click events are credited here; double clicks
        // are covered by their own check.
        let mut per_mode_coincidence = vec![0.0f64; n];
        for row in report.rows() {
            if row.outcome.is_double() {
                continue;
            }
            if let OutcomeClass::Unambiguous(which) = &row.class {
                let weighted = priors.get(*which) * row.probabilities[which.slot()];
                let (i, j) = row.outcome.modes();
                per_mode_coincidence[i - 1] += weighted;
                per_mode_coincidence[j - 1] += weighted;
            }
        }
        for (alpha, &got) in alphas.iter().zip(per_mode_coincidence.iter()) {
            let excess = got - per_mode_bound(alpha, priors);
            self.stat_mut("per-mode-bound")
                .record(excess, excess <= TOL_PER_MODE_BOUND);
        }

        // And the grand total stays under the two largest priors combined.
        let excess = report.success_probability() - priors.two_largest_sum();
        self.stat_mut("total-bound")
            .record(excess, excess <= TOL_TOTAL_BOUND);

        Ok(())
    }
}

impl Default for TheoremChecks {
    fn default() -> Self {
        TheoremChecks::new()
    }
}

/// The tolerance a named battery check is judged against, for self-auditing
/// reports.
pub fn check_tolerance(name: &str) -> Option<f64> {
    match name {
        "double-click-never-unambiguous" => Some(TAU_ZERO),
        "coupled-vector-determinant" => Some(TOL_DETERMINANT),
        "coupled-vector-norm" => Some(TOL_S_NORM),
        "dependence-coefficients" => Some(TOL_COEFFICIENT),
        "column-norm-sum" => Some(TOL_COLUMN_SUM),
        "completeness" => Some(TOL_COMPLETENESS),
        "per-mode-bound" => Some(TOL_PER_MODE_BOUND),
        "total-bound" => Some(TOL_TOTAL_BOUND),
        _ => None,
    }
}

/// Run the full battery against `trials` Haar-random networks on `modes`
/// modes, seeded `seed`, `seed + 1`, ...
pub fn run_battery(trials: u64, modes: usize, seed: u64, priors: &Priors) -> Result<TheoremChecks> {
    let mut checks = TheoremChecks::new();
    for t in 0..trials {
        let network = LinearNetwork::random_haar(modes, seed.wrapping_add(t))?;
        checks.run_network(&network, priors)?;
    }
    Ok(checks)
}
