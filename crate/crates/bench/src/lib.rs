//! Shared fixtures for the benchmark suite.
//!
//! The benchmarks measure the hot paths of the toolkit: transforming a
//! two-photon state through a network, classifying every detection outcome,
//! running the structural-check battery, and one full optimizer restart.
//! The fixtures here pin the networks being measured so results are
//! comparable across runs.

use bsa_core::{bell_form, BellIndex, BilinearForm, LinearNetwork};

/// Seed used for every random fixture, so benchmark inputs never drift.
pub const FIXTURE_SEED: u64 = 42;

/// A Haar-random network on `modes` modes with the pinned seed.
pub fn fixture_network(modes: usize) -> LinearNetwork {
    LinearNetwork::random_haar(modes, FIXTURE_SEED).expect("fixture network")
}

/// The first Bell state embedded in `modes` modes.
pub fn fixture_input(modes: usize) -> BilinearForm {
    bell_form(BellIndex::Psi1, modes).expect("fixture input")
}
