//! Report assembly and serialization.
//!
//! Reports are pretty-printed JSON with a fixed field order, so running the
//! same command twice produces byte-identical output.  Probability-like
//! quantities are rounded to 12 significant digits before serialization;
//! angles and other exact inputs are written untouched.  Every check verdict
//! carries the tolerance it was judged against, making reports self-auditing.

use serde::{Deserialize, Serialize};

use bsa_core::{
    check_tolerance, BoundProbe, DiscriminationReport, MeshParameters, OptimizationResult,
    OutcomeClass, OutcomeRow, Priors, TheoremChecks,
};

use crate::circuit::CircuitFile;

/// Slack allowed when comparing a measured success probability against its
/// theoretical cap.
pub const CAP_SLACK: f64 = 1e-9;

/// Margin below one at which a per-state probability still counts as
/// "strictly smaller than one".
pub const UNITY_MARGIN: f64 = 1e-9;

/// Round to 12 significant digits.  Keeps reports byte-reproducible across
/// runs and platforms without hiding real differences (12 digits is far
/// below every tolerance used by the checks).
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Round a per-state quadruple to 12 significant digits.
pub fn sig12_array(xs: [f64; 4]) -> [f64; 4] {
    [sig12(xs[0]), sig12(xs[1]), sig12(xs[2]), sig12(xs[3])]
}

/// Tool name and version stamped on every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolStamp {
    /// Binary name.
    pub name: String,
    /// Crate version.
    pub version: String,
}

impl ToolStamp {
    /// Stamp for this build.
    pub fn current() -> Self {
        ToolStamp {
            name: "bsa".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

/// One detection outcome with its probabilities and classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    /// Detector pair `(i, j)` with `i <= j`; `i == j` is a two-photon event.
    pub outcome: [usize; 2],
    /// `"coincidence"` or `"double"`.
    pub kind: String,
    /// Probability of this outcome under each Bell input, in index order.
    pub probabilities: [f64; 4],
    /// `"unambiguous"`, `"ambiguous"`, or `"dead"`.
    pub class: String,
    /// 1-based indices of the states compatible with the outcome.
    pub states: Vec<usize>,
}

impl OutcomeRecord {
    /// Convert one classified row into its report form.
    pub fn from_row(row: &OutcomeRow) -> Self {
        let (i, j) = row.outcome.modes();
        let (class, states) = match &row.class {
            OutcomeClass::Unambiguous(which) => ("unambiguous", vec![which.index()]),
            OutcomeClass::Ambiguous(support) => (
                "ambiguous",
                support.iter().map(|which| which.index()).collect(),
            ),
            OutcomeClass::Dead => ("dead", Vec::new()),
        };
        OutcomeRecord {
            outcome: [i, j],
            kind: if row.outcome.is_double() {
                "double".to_string()
            } else {
                "coincidence".to_string()
            },
            probabilities: sig12_array(row.probabilities),
            class: class.to_string(),
            states,
        }
    }
}

/// Unambiguous mass collected at one output mode, with its ceiling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerModeRecord {
    /// 1-based output mode.
    pub mode: usize,
    /// Prior-weighted unambiguous probability credited to this mode
    /// (coincidences credit both participating modes).
    pub unambiguous: f64,
    /// Single-mode ceiling `(q1 + q2) / 2 * |alpha|^2` from the two largest
    /// priors.
    pub bound: f64,
}

/// One structural-check verdict with the tolerance it was judged at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    /// Stable check name.
    pub name: String,
    /// Number of items examined.
    pub checked: u64,
    /// Number of violations.
    pub failures: u64,
    /// Largest residual seen (signed excess for bound checks).
    pub worst_residual: f64,
    /// Tolerance the residuals were compared against.
    pub tolerance: f64,
    /// True when no item failed.
    pub passed: bool,
}

impl CheckRecord {
    /// Flatten a full battery tally into report rows.
    pub fn from_checks(checks: &TheoremChecks) -> Vec<Self> {
        checks
            .stats()
            .iter()
            .map(|stat| CheckRecord {
                name: stat.name.to_string(),
                checked: stat.checked,
                failures: stat.failures,
                worst_residual: sig12(stat.worst_residual()),
                tolerance: check_tolerance(stat.name).unwrap_or(0.0),
                passed: stat.passed(),
            })
            .collect()
    }
}

/// Numerical bookkeeping for the zero threshold used during classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    /// Threshold below which a probability is treated as zero.
    pub tau_zero: f64,
    /// Smallest probability that was kept as nonzero, if any.
    pub smallest_nonzero: Option<f64>,
    /// Largest probability that was discarded as zero, if any.
    pub largest_treated_zero: Option<f64>,
}

/// Echo of the `analyze` invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeParameters {
    /// Circuit file path as given on the command line.
    pub circuit: String,
    /// Priors after exact renormalization.
    pub priors: [f64; 4],
    /// Zero threshold used for classification.
    pub tolerance: f64,
}

/// Full report produced by `analyze`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    /// Tool stamp.
    pub tool: ToolStamp,
    /// Subcommand name.
    pub command: String,
    /// Unix epoch seconds; present only when requested.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<u64>,
    /// Invocation echo.
    pub parameters: AnalyzeParameters,
    /// The analyzed circuit, as parsed.
    pub circuit: CircuitFile,
    /// Number of modes.
    pub modes: usize,
    /// Every detection outcome with probabilities and classification.
    pub outcomes: Vec<OutcomeRecord>,
    /// Prior-weighted probability of an unambiguous identification.
    pub success_probability: f64,
    /// Per-state conditional identification probability, in index order.
    pub per_state_unambiguous: [f64; 4],
    /// 1-based indices of states with nonzero identification probability.
    pub identified_states: Vec<usize>,
    /// Unambiguous mass and ceiling per output mode.
    pub per_mode: Vec<PerModeRecord>,
    /// Zero-threshold bookkeeping.
    pub audit: AuditRecord,
    /// Structural checks evaluated on this network.
    pub checks: Vec<CheckRecord>,
    /// True when every structural check passed.
    pub checks_passed: bool,
}

impl AnalysisReport {
    /// Assemble the report from a finished classification.
    pub fn build(
        parameters: AnalyzeParameters,
        circuit: CircuitFile,
        report: &DiscriminationReport,
        per_mode_bounds: &[f64],
        checks: &TheoremChecks,
        timestamp: Option<u64>,
    ) -> Self {
        let per_mode = report
            .per_mode_unambiguous()
            .iter()
            .zip(per_mode_bounds)
            .enumerate()
            .map(|(k, (&mass, &bound))| PerModeRecord {
                mode: k + 1,
                unambiguous: sig12(mass),
                bound: sig12(bound),
            })
            .collect();
        AnalysisReport {
            tool: ToolStamp::current(),
            command: "analyze".to_string(),
            timestamp,
            parameters,
            circuit,
            modes: report.modes(),
            outcomes: report.rows().iter().map(OutcomeRecord::from_row).collect(),
            success_probability: sig12(report.success_probability()),
            per_state_unambiguous: sig12_array(report.per_state_unambiguous()),
            identified_states: report
                .identified_states()
                .iter()
                .map(|which| which.index())
                .collect(),
            per_mode,
            audit: AuditRecord {
                tau_zero: report.tau_zero(),
                smallest_nonzero: report.smallest_nonzero().map(sig12),
                largest_treated_zero: report.largest_treated_zero().map(sig12),
            },
            checks: CheckRecord::from_checks(checks),
            checks_passed: checks.all_passed(),
        }
    }
}

/// Echo of the `verify` invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyParameters {
    /// Trials per mode count.
    pub trials: u64,
    /// Mode count or inclusive range, as given (e.g. `"4"` or `"4..8"`).
    pub modes: String,
    /// Base seed; trial `t` uses `seed + t`.
    pub seed: u64,
}

/// Success-bound statistics for one mode count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeProbeRecord {
    /// Number of modes probed.
    pub modes: usize,
    /// Number of random networks drawn.
    pub trials: u64,
    /// Largest exact success probability observed.
    pub max_success: f64,
    /// Seed of the network achieving the maximum.
    pub argmax_seed: u64,
    /// Mean exact success probability.
    pub mean_success: f64,
}

impl ModeProbeRecord {
    /// Convert one probe result into its report form.
    pub fn from_probe(probe: &BoundProbe) -> Self {
        ModeProbeRecord {
            modes: probe.modes,
            trials: probe.trials,
            max_success: sig12(probe.max_success),
            argmax_seed: probe.argmax_seed,
            mean_success: sig12(probe.mean_success),
        }
    }
}

/// Summary of the success-bound probe across all requested mode counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSection {
    /// Theoretical cap on uniform-prior success.
    pub cap: f64,
    /// Slack allowed on top of the cap.
    pub slack: f64,
    /// Per-mode-count statistics.
    pub by_modes: Vec<ModeProbeRecord>,
    /// Largest success across every trial.
    pub max_success: f64,
    /// Mode count achieving the maximum.
    pub argmax_modes: usize,
    /// Seed achieving the maximum.
    pub argmax_seed: u64,
    /// True when the maximum stayed within `cap + slack`.
    pub passed: bool,
}

/// Full report produced by `verify`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    /// Tool stamp.
    pub tool: ToolStamp,
    /// Subcommand name.
    pub command: String,
    /// Unix epoch seconds; present only when requested.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<u64>,
    /// Invocation echo.
    pub parameters: VerifyParameters,
    /// Success-bound statistics.
    pub bound: BoundSection,
    /// Structural-check tallies merged over every trial.
    pub checks: Vec<CheckRecord>,
    /// True when the bound held and every structural check passed.
    pub all_passed: bool,
}

/// Echo of the `optimize` invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeParameters {
    /// Number of modes searched.
    pub modes: usize,
    /// Number of restarts.
    pub restarts: u32,
    /// Base seed; restart `r` uses `seed + r`.
    pub seed: u64,
    /// Priors after exact renormalization.
    pub priors: [f64; 4],
    /// Required number of identified states (0 disables the constraint).
    pub min_identified: usize,
}

/// One interferometer rotation in report form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotationRecord {
    /// The 1-based mode pair.
    pub modes: [usize; 2],
    /// Mixing angle in radians (exact, not rounded).
    pub theta: f64,
    /// Phase angle in radians (exact, not rounded).
    pub phi: f64,
}

/// Best mesh found by the search, as raw angles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshRecord {
    /// Number of modes.
    pub modes: usize,
    /// Rotations in the fixed pair order.
    pub rotations: Vec<RotationRecord>,
    /// One output phase per mode, in radians.
    pub output_phases: Vec<f64>,
}

impl MeshRecord {
    /// Convert mesh parameters into their report form.
    pub fn from_mesh(params: &MeshParameters) -> Self {
        MeshRecord {
            modes: params.modes(),
            rotations: params
                .rotations()
                .iter()
                .map(|r| RotationRecord {
                    modes: [r.i, r.j],
                    theta: r.theta,
                    phi: r.phi,
                })
                .collect(),
            output_phases: params.output_phases().to_vec(),
        }
    }
}

/// Whether the best network qualifies as a multi-state analyzer witness.
///
/// A qualifying witness identifies at least the required number of states,
/// keeps total success within the theoretical cap, and identifies each of
/// those states with probability strictly smaller than one.  The flags are
/// reported separately so a near-miss is visible, not hidden.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    /// States the search was asked to identify.
    pub required_states: usize,
    /// States the best network actually identifies.
    pub identified_count: usize,
    /// `identified_count >= required_states`.
    pub meets_requirement: bool,
    /// Cap on prior-weighted success (sum of the two largest priors).
    pub success_cap: f64,
    /// True when measured success stays within the cap plus slack.
    pub success_within_cap: bool,
    /// True when every identified state has conditional identification
    /// probability below one by at least the unity margin.
    pub all_identified_below_unity: bool,
    /// Conjunction of the three properties above.
    pub qualifies: bool,
}

impl WitnessRecord {
    /// Judge the best network against the witness properties.
    pub fn build(result: &OptimizationResult, priors: &Priors) -> Self {
        let identified_count = result.identified_states.len();
        let meets_requirement = identified_count >= result.min_identified;
        let success_cap = priors.two_largest_sum();
        let success_within_cap = result.exact_success <= success_cap + CAP_SLACK;
        let all_identified_below_unity = result
            .identified_states
            .iter()
            .all(|which| result.per_state_unambiguous[which.slot()] < 1.0 - UNITY_MARGIN);
        WitnessRecord {
            required_states: result.min_identified,
            identified_count,
            meets_requirement,
            success_cap: sig12(success_cap),
            success_within_cap,
            all_identified_below_unity,
            qualifies: meets_requirement && success_within_cap && all_identified_below_unity,
        }
    }
}

/// One point of the best restart's convergence trace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    /// Objective evaluations spent so far.
    pub evaluations: u64,
    /// Penalized smoothed objective after this sweep.
    pub objective: f64,
}

/// Full report produced by `optimize`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    /// Tool stamp.
    pub tool: ToolStamp,
    /// Subcommand name.
    pub command: String,
    /// Unix epoch seconds; present only when requested.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timestamp: Option<u64>,
    /// Invocation echo.
    pub parameters: OptimizeParameters,
    /// Exact prior-weighted success of the best network.
    pub exact_success: f64,
    /// Smoothed objective of the best network at the final sharpness.
    pub smoothed_score: f64,
    /// 1-based indices of the states the best network identifies.
    pub identified_states: Vec<usize>,
    /// Per-state conditional identification probability, in index order.
    pub per_state_unambiguous: [f64; 4],
    /// True when the identified-state constraint was met.
    pub feasible: bool,
    /// Restart that produced the best network.
    pub best_restart: u32,
    /// Total restarts run.
    pub restarts_run: u32,
    /// Total objective evaluations across all restarts.
    pub evaluations: u64,
    /// Witness qualification of the best network.
    pub witness: WitnessRecord,
    /// Convergence trace of the winning restart.
    pub trace: Vec<TracePoint>,
    /// Best mesh as raw angles (exact).
    pub best_mesh: MeshRecord,
    /// Best network as a reusable circuit file.
    pub best_circuit: CircuitFile,
}

impl OptimizeReport {
    /// Assemble the report from a finished search.
    pub fn build(
        parameters: OptimizeParameters,
        result: &OptimizationResult,
        priors: &Priors,
        timestamp: Option<u64>,
    ) -> Self {
        OptimizeReport {
            tool: ToolStamp::current(),
            command: "optimize".to_string(),
            timestamp,
            parameters,
            exact_success: sig12(result.exact_success),
            smoothed_score: sig12(result.smoothed_score),
            identified_states: result
                .identified_states
                .iter()
                .map(|which| which.index())
                .collect(),
            per_state_unambiguous: sig12_array(result.per_state_unambiguous),
            feasible: result.feasible,
            best_restart: result.best_restart,
            restarts_run: result.restarts_run,
            evaluations: result.evaluations,
            witness: WitnessRecord::build(result, priors),
            trace: result
                .trace
                .iter()
                .map(|&(evaluations, objective)| TracePoint {
                    evaluations,
                    objective: sig12(objective),
                })
                .collect(),
            best_mesh: MeshRecord::from_mesh(&result.best_params),
            best_circuit: CircuitFile::from_network(&result.best_network),
        }
    }
}

/// Serialize any report as pretty JSON with a trailing newline.
pub fn render<T: Serialize>(report: &T) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serialization cannot fail");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_significant_digits() {
        assert_eq!(sig12(0.499_999_999_999_999_94), 0.5);
        assert_eq!(sig12(0.125_000_000_000_000_03), 0.125);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(-0.0), 0.0);
        assert_eq!(sig12(1.0), 1.0);
        let x = 0.123_456_789_012_345;
        assert_eq!(sig12(x), 0.123_456_789_012);
    }

    #[test]
    fn rounding_is_idempotent() {
        for &x in &[0.3, 1.0 / 3.0, 2.5e-13, 7.25, 1e9 + 0.125] {
            assert_eq!(sig12(sig12(x)), sig12(x));
        }
    }

    #[test]
    fn every_check_name_carries_a_tolerance() {
        let checks = TheoremChecks::new();
        for record in CheckRecord::from_checks(&checks) {
            assert!(
                record.tolerance > 0.0,
                "check {} lacks a tolerance",
                record.name
            );
        }
    }
}
