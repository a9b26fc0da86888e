//! Simulation and optimization toolkit for linear-optical Bell-state
//! analyzers.
//!
//! A two-photon state is held as a symmetric bilinear form over creation
//! operators; a passive interferometer conjugates that form; photon-counting
//! outcomes and their probabilities follow from the transformed form's
//! entries.  On top of the simulator sit discrimination analysis (which
//! outcomes identify which Bell state, and how the identification
//! probability is bounded) and a mesh optimizer that searches interferometer
//! parameters for high-success analyzers.
//!
//! Mode convention throughout: 1 = photon A horizontal, 2 = photon A
//! vertical, 3 = photon B horizontal, 4 = photon B vertical; modes above 4
//! start in the vacuum.  All public mode indices are 1-based.

pub mod detection;
pub mod discrimination;
pub mod error;
pub mod linalg;
pub mod network;
pub mod optimizer;
pub mod states;

pub use detection::{
    bell_outcome_probabilities, conditional_overlap, conditional_state, enumerate_outcomes,
    outcome_probability, s_vector, single_photon_probability, two_photon_probability,
    ConditionalState, DetectionOutcome, SVector,
};
pub use discrimination::{
    check_linear_dependence, check_tolerance, check_two_photon_never_unambiguous, classify,
    max_identifiable_states, per_mode_bound, run_battery, CheckStat, DiscriminationReport,
    LinearDependence, OutcomeClass, OutcomeRow, TheoremChecks, TwoPhotonCheck, TAU_ZERO,
};
pub use error::{Error, Result};
pub use network::{AlphaVector, CircuitElement, LinearNetwork, UNITARITY_TOLERANCE};
pub use optimizer::{
    mesh_to_network, optimize, smoothed_objective, verify_bound, BoundProbe, MeshParameters,
    MeshRotation, OptimizationResult,
};
pub use states::{bell_form, general_two_photon_form, w_matrix, BellIndex, BilinearForm, Priors, WMatrix};
