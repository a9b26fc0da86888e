//! Mesh parameterization of interferometers and a derivative-free search
//! for high-success analyzers.
//!
//! Any passive network can be written as a triangular mesh of two-mode
//! rotations followed by per-mode output phases, so searching over mesh
//! angles searches over all analyzers of a given size.  The exact success
//! probability is discontinuous in those angles (an outcome flips between
//! ambiguous and unambiguous when a probability crosses the zero threshold),
//! so the search climbs a smooth surrogate — outcome purity raised to a
//! sharpness power — and hardens the sharpness in stages.  Results are
//! always scored by the exact classification at the end.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::discrimination::{classify, TAU_ZERO};
use crate::error::{Error, Result};
use crate::network::{CircuitElement, LinearNetwork};
use crate::states::{bell_form, BellIndex, BilinearForm, Priors};

/// Surrogate-hardening schedule: each restart is polished at these
/// sharpness values in turn.
pub const SHARPNESS_SCHEDULE: [f64; 3] = [2.0, 8.0, 32.0];
/// First coordinate step of each search stage, in radians.
pub const INITIAL_STEP: f64 = 0.4;
/// The stage stops once the shrinking step falls below this.
pub const MIN_STEP: f64 = 1e-6;
/// Hard cap on coordinate sweeps per stage.
pub const MAX_SWEEPS_PER_STAGE: usize = 150;
/// Objective penalty for each identified state short of the requirement.
pub const MISSING_STATE_PENALTY: f64 = 1.0;

/// One two-mode rotation of the triangular mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshRotation {
    /// First 1-based mode of the pair.
    pub i: usize,
    /// Second 1-based mode of the pair (`i < j`).
    pub j: usize,
    /// Mixing angle in radians.
    pub theta: f64,
    /// Phase angle in radians.
    pub phi: f64,
}

/// Angles of a full interferometer: `n (n - 1) / 2` rotations in a fixed
/// pair order plus one output phase per mode.  Together these reach every
/// `n`-mode network (up to a global phase, which no probability sees).
#[derive(Clone, Debug, PartialEq)]
pub struct MeshParameters {
    modes: usize,
    rotations: Vec<MeshRotation>,
    output_phases: Vec<f64>,
}

impl MeshParameters {
    /// The fixed rotation-pair order: (1,2), (1,3), ..., (1,n), (2,3), ...
    pub fn pair_order(modes: usize) -> Vec<(usize, usize)> {
        let mut pairs = Vec::with_capacity(modes * modes.saturating_sub(1) / 2);
        for i in 1..=modes {
            for j in i + 1..=modes {
                pairs.push((i, j));
            }
        }
        pairs
    }

    /// Number of scalar parameters: two per rotation plus one phase per
    /// mode, `n^2` in total.
    pub fn parameter_count(modes: usize) -> usize {
        modes * modes
    }

    /// All-zero angles (the identity network).
    pub fn zeros(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::TooFewModes { needed: 1, got: 0 });
        }
        let rotations = Self::pair_order(modes)
            .into_iter()
            .map(|(i, j)| MeshRotation {
                i,
                j,
                theta: 0.0,
                phi: 0.0,
            })
            .collect();
        Ok(MeshParameters {
            modes,
            rotations,
            output_phases: vec![0.0; modes],
        })
    }

    /// Uniformly random angles in (-pi, pi], reproducible per seed.
    pub fn random(modes: usize, seed: u64) -> Result<Self> {
        let mut params = Self::zeros(modes)?;
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut angle = move || -> f64 {
            let x: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            x
        };
        for rotation in &mut params.rotations {
            rotation.theta = angle();
            rotation.phi = angle();
        }
        for phase in &mut params.output_phases {
            *phase = angle();
        }
        Ok(params)
    }

    /// Rebuild parameters from the flat layout produced by [`to_flat`]:
    /// rotation angles as (theta, phi) pairs in pair order, then the output
    /// phases.
    ///
    /// [`to_flat`]: MeshParameters::to_flat
    pub fn from_flat(modes: usize, flat: &[f64]) -> Result<Self> {
        let expected = Self::parameter_count(modes);
        if flat.len() != expected {
            return Err(Error::MalformedMesh(format!(
                "expected {expected} parameters for {modes} modes, got {}",
                flat.len()
            )));
        }
        if flat.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("mesh parameter"));
        }
        let mut params = Self::zeros(modes)?;
        params.assign_flat(flat);
        Ok(params)
    }

    /// Flatten to `[theta_1, phi_1, theta_2, phi_2, ..., phase_1, ...,
    /// phase_n]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(Self::parameter_count(self.modes));
        for rotation in &self.rotations {
            flat.push(rotation.theta);
            flat.push(rotation.phi);
        }
        flat.extend_from_slice(&self.output_phases);
        flat
    }

    fn assign_flat(&mut self, flat: &[f64]) {
        let split = 2 * self.rotations.len();
        for (k, rotation) in self.rotations.iter_mut().enumerate() {
            rotation.theta = flat[2 * k];
            rotation.phi = flat[2 * k + 1];
        }
        self.output_phases.copy_from_slice(&flat[split..]);
    }

    /// Number of modes the mesh acts on.
    pub fn modes(&self) -> usize {
        self.modes
    }

    /// The rotations in pair order.
    pub fn rotations(&self) -> &[MeshRotation] {
        &self.rotations
    }

    /// The output phase of each mode.
    pub fn output_phases(&self) -> &[f64] {
        &self.output_phases
    }
}

/// Compose the mesh into a network: rotations in pair order, then the
/// output phase shifters.
pub fn mesh_to_network(params: &MeshParameters) -> Result<LinearNetwork> {
    let expected = MeshParameters::pair_order(params.modes).len();
    if params.rotations.len() != expected || params.output_phases.len() != params.modes {
        return Err(Error::MalformedMesh(format!(
            "mesh on {} modes needs {} rotations and {} phases, found {} and {}",
            params.modes,
            expected,
            params.modes,
            params.rotations.len(),
            params.output_phases.len()
        )));
    }
    let mut elements = Vec::with_capacity(params.rotations.len() + params.modes);
    for rotation in &params.rotations {
        elements.push(CircuitElement::Beamsplitter {
            i: rotation.i,
            j: rotation.j,
            theta: rotation.theta,
            phi: rotation.phi,
        });
    }
    for (mode0, &phi) in params.output_phases.iter().enumerate() {
        elements.push(CircuitElement::PhaseShifter {
            mode: mode0 + 1,
            phi,
        });
    }
    LinearNetwork::compose(params.modes, elements)
}

/// Everything one evaluation of a candidate network yields.
struct Evaluation {
    /// Purity-power surrogate score in [0, 1].
    smoothed: f64,
    /// Prior-weighted success under exact classification at `TAU_ZERO`.
    exact_success: f64,
    /// Number of states with at least one unambiguous outcome.
    identified: usize,
}

/// Score one network against prebuilt Bell forms in a single outcome pass.
fn evaluate_network(
    network: &LinearNetwork,
    forms: &[BilinearForm; 4],
    prior_values: &[f64; 4],
    sharpness: f64,
) -> Result<Evaluation> {
    let n = network.modes();
    let mut transformed = Vec::with_capacity(4);
    for form in forms {
        transformed.push(network.apply(form)?);
    }
    let mut smoothed = 0.0f64;
    let mut exact_success = 0.0f64;
    let mut identified = [false; 4];
    for i in 1..=n {
        for j in i..=n {
            let weight = if i == j { 2.0 } else { 4.0 };
            let mut probs = [0.0f64; 4];
            for (slot, m) in transformed.iter().enumerate() {
                probs[slot] = weight * m.entry(i, j).norm_sqr();
            }
            let mut q = 0.0f64;
            let mut top = 0.0f64;
            let mut support = 0usize;
            let mut lone = 0usize;
            for slot in 0..4 {
                let weighted = prior_values[slot] * probs[slot];
                q += weighted;
                if weighted > top {
                    top = weighted;
                }
                if probs[slot] > TAU_ZERO {
                    support += 1;
                    lone = slot;
                }
            }
            if q > 0.0 {
                smoothed += q * (top / q).powf(sharpness);
            }
            if support == 1 {
                exact_success += prior_values[lone] * probs[lone];
                identified[lone] = true;
            }
        }
    }
    Ok(Evaluation {
        smoothed,
        exact_success,
        identified: identified.iter().filter(|&&b| b).count(),
    })
}

/// Purity-power surrogate for the success probability: over outcomes `o`,
/// `sum q(o) * purity(o)^sharpness` with `q(o)` the prior-weighted outcome
/// probability and `purity(o)` the largest single-state share of it.  Lies
/// in [0, 1], never increases with sharpness, and approaches the exact
/// success probability as sharpness grows on cleanly unambiguous networks.
pub fn smoothed_objective(
    params: &MeshParameters,
    priors: &Priors,
    sharpness: f64,
) -> Result<f64> {
    if !sharpness.is_finite() || sharpness < 1.0 {
        return Err(Error::InvalidArgument(format!(
            "sharpness must be a finite value >= 1, got {sharpness}"
        )));
    }
    let network = mesh_to_network(params)?;
    let forms = bell_forms(params.modes)?;
    let evaluation = evaluate_network(&network, &forms, &priors.as_array(), sharpness)?;
    Ok(evaluation.smoothed)
}

fn bell_forms(modes: usize) -> Result<[BilinearForm; 4]> {
    Ok([
        bell_form(BellIndex::Psi1, modes)?,
        bell_form(BellIndex::Psi2, modes)?,
        bell_form(BellIndex::Psi3, modes)?,
        bell_form(BellIndex::Psi4, modes)?,
    ])
}

/// Outcome of one full search.
#[derive(Clone, Debug)]
pub struct OptimizationResult {
    /// Mesh angles of the best network found.
    pub best_params: MeshParameters,
    /// The best network itself.
    pub best_network: LinearNetwork,
    /// Its success probability under exact classification.
    pub exact_success: f64,
    /// Its surrogate score at the final sharpness.
    pub smoothed_score: f64,
    /// States it identifies unambiguously.
    pub identified_states: Vec<BellIndex>,
    /// Per-state unambiguous identification probabilities.
    pub per_state_unambiguous: [f64; 4],
    /// Whether the identified-state requirement was met.
    pub feasible: bool,
    /// The requirement that was in force.
    pub min_identified: usize,
    /// Number of restarts executed.
    pub restarts_run: u32,
    /// Base seed of the run.
    pub seed: u64,
    /// Restart index that produced the best network.
    pub best_restart: u32,
    /// Total objective evaluations across all restarts.
    pub evaluations: u64,
    /// Improvement trace of the winning restart: (evaluations so far,
    /// penalized objective after each sweep).
    pub trace: Vec<(u64, f64)>,
}

struct RestartOutcome {
    params: MeshParameters,
    exact_success: f64,
    smoothed_score: f64,
    identified: usize,
    evaluations: u64,
    trace: Vec<(u64, f64)>,
}

/// Search `restarts` random starting meshes for the network with the best
/// exact success, requiring at least `min_identified` identified states.
///
/// Each restart runs a coordinate direct search (try a step up and down in
/// each angle, keep improvements, halve the step after a sweep without any)
/// through the sharpness schedule.  Falling short of `min_identified` costs
/// [`MISSING_STATE_PENALTY`] per missing state, during the search and in
/// the final cross-restart comparison alike, so any feasible result beats
/// every infeasible one.  The whole procedure is deterministic per seed.
pub fn optimize(
    modes: usize,
    restarts: u32,
    seed: u64,
    priors: &Priors,
    min_identified: usize,
) -> Result<OptimizationResult> {
    if modes < 4 {
        return Err(Error::TooFewModes {
            needed: 4,
            got: modes,
        });
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument(
            "need at least one restart".to_string(),
        ));
    }
    if min_identified > 4 {
        return Err(Error::InvalidArgument(format!(
            "cannot require more than 4 identified states, got {min_identified}"
        )));
    }

    let forms = bell_forms(modes)?;
    let prior_values = priors.as_array();
    let mut best: Option<(f64, u32, RestartOutcome)> = None;
    let mut total_evaluations = 0u64;

    for restart in 0..restarts {
        let outcome = run_restart(
            modes,
            seed.wrapping_add(u64::from(restart)),
            &forms,
            &prior_values,
            min_identified,
        )?;
        total_evaluations += outcome.evaluations;
        let missing = min_identified.saturating_sub(outcome.identified) as f64;
        let score = outcome.exact_success - MISSING_STATE_PENALTY * missing;
        let better = match &best {
            None => true,
            Some((best_score, _, _)) => score > *best_score,
        };
        if better {
            best = Some((score, restart, outcome));
        }
    }

    let (_, best_restart, chosen) = best.expect("at least one restart ran");
    let best_network = mesh_to_network(&chosen.params)?;
    let report = classify(&best_network, priors, TAU_ZERO)?;
    let identified_states = report.identified_states();
    Ok(OptimizationResult {
        feasible: identified_states.len() >= min_identified,
        best_params: chosen.params,
        best_network,
        exact_success: report.success_probability(),
        smoothed_score: chosen.smoothed_score,
        identified_states,
        per_state_unambiguous: report.per_state_unambiguous(),
        min_identified,
        restarts_run: restarts,
        seed,
        best_restart,
        evaluations: total_evaluations,
        trace: chosen.trace,
    })
}

fn run_restart(
    modes: usize,
    seed: u64,
    forms: &[BilinearForm; 4],
    prior_values: &[f64; 4],
    min_identified: usize,
) -> Result<RestartOutcome> {
    let mut params = MeshParameters::random(modes, seed)?;
    let mut flat = params.to_flat();
    let mut evaluations = 0u64;
    let mut trace = Vec::new();

    let score_flat = |flat: &[f64],
                          sharpness: f64,
                          params: &mut MeshParameters,
                          evaluations: &mut u64|
     -> Result<f64> {
        params.assign_flat(flat);
        let network = mesh_to_network(params)?;
        let evaluation = evaluate_network(&network, forms, prior_values, sharpness)?;
        *evaluations += 1;
        let missing = min_identified.saturating_sub(evaluation.identified) as f64;
        Ok(evaluation.smoothed - MISSING_STATE_PENALTY * missing)
    };

    for sharpness in SHARPNESS_SCHEDULE {
        let mut current = score_flat(&flat, sharpness, &mut params, &mut evaluations)?;
        let mut step = INITIAL_STEP;
        for _sweep in 0..MAX_SWEEPS_PER_STAGE {
            let mut improved = false;
            for k in 0..flat.len() {
                let original = flat[k];
                for candidate in [original + step, original - step] {
                    flat[k] = candidate;
                    let score = score_flat(&flat, sharpness, &mut params, &mut evaluations)?;
                    if score > current {
                        current = score;
                        improved = true;
                        break;
                    }
                    flat[k] = original;
                }
            }
            trace.push((evaluations, current));
            if !improved {
                step /= 2.0;
                if step < MIN_STEP {
                    break;
                }
            }
        }
    }

    params.assign_flat(&flat);
    let network = mesh_to_network(&params)?;
    let last_sharpness = SHARPNESS_SCHEDULE[SHARPNESS_SCHEDULE.len() - 1];
    let evaluation = evaluate_network(&network, forms, prior_values, last_sharpness)?;
    Ok(RestartOutcome {
        params,
        exact_success: evaluation.exact_success,
        smoothed_score: evaluation.smoothed,
        identified: evaluation.identified,
        evaluations,
        trace,
    })
}

/// Result of probing the success bound on random networks.
#[derive(Clone, Copy, Debug)]
pub struct BoundProbe {
    /// Number of networks sampled.
    pub trials: u64,
    /// Mode count of every sampled network.
    pub modes: usize,
    /// First Haar seed used; trial `t` uses `base_seed + t`.
    pub base_seed: u64,
    /// Largest exact success probability observed.
    pub max_success: f64,
    /// Seed of the network that achieved it.
    pub argmax_seed: u64,
    /// Mean success across the sample.
    pub mean_success: f64,
}

/// Measure the exact success probability of `trials` Haar-random networks
/// under uniform priors and report the maximum — the empirical probe of the
/// one-half ceiling.
pub fn verify_bound(trials: u64, modes: usize, seed: u64) -> Result<BoundProbe> {
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "need at least one trial".to_string(),
        ));
    }
    if modes < 4 {
        return Err(Error::TooFewModes {
            needed: 4,
            got: modes,
        });
    }
    let priors = Priors::uniform();
    let mut max_success = f64::NEG_INFINITY;
    let mut argmax_seed = seed;
    let mut sum = 0.0f64;
    for t in 0..trials {
        let trial_seed = seed.wrapping_add(t);
        let network = LinearNetwork::random_haar(modes, trial_seed)?;
        let report = classify(&network, &priors, TAU_ZERO)?;
        let success = report.success_probability();
        sum += success;
        if success > max_success {
            max_success = success;
            argmax_seed = trial_seed;
        }
    }
    Ok(BoundProbe {
        trials,
        modes,
        base_seed: seed,
        max_success,
        argmax_seed,
        mean_success: sum / trials as f64,
    })
}
