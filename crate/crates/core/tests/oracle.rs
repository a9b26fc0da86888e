//! Independent brute-force check of the whole probability pipeline.
//!
//! The library computes outcome probabilities from the transformed bilinear
//! form.  The oracle here never forms that product: it expands the
//! two-photon state literally — substituting each input creation operator by
//! its expansion over output operators, accumulating coefficients term by
//! term with explicit loops — and reads the Fock amplitudes off the
//! expansion.  Agreement is required to 1e-12.

use ndarray::Array2;
use num_complex::Complex64;

use bsa_core::detection::{
    conditional_overlap, conditional_state, enumerate_outcomes, outcome_probability,
};
use bsa_core::network::LinearNetwork;
use bsa_core::states::{bell_form, BellIndex, BilinearForm};

/// Expand `sum_ij N_ij (sum_k u_ik c_k)(sum_l u_jl c_l)` coefficient by
/// coefficient, with no matrix products.
fn expand_coefficients(u: &Array2<Complex64>, n_matrix: &Array2<Complex64>) -> Array2<Complex64> {
    let n = u.nrows();
    let mut coeffs = Array2::<Complex64>::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let amplitude = n_matrix[(i, j)];
            if amplitude == Complex64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..n {
                for l in 0..n {
                    coeffs[(k, l)] += amplitude * u[(i, k)] * u[(j, l)];
                }
            }
        }
    }
    coeffs
}

/// Fock-basis probability of finding the photons in modes (k, l), k <= l,
/// read directly from the expanded coefficients: the two operator orders
/// add for distinct modes, and a doubly occupied mode picks up the sqrt(2)
/// of the two-photon Fock state.
fn oracle_probability(coeffs: &Array2<Complex64>, k: usize, l: usize) -> f64 {
    if k == l {
        let amplitude = 2.0f64.sqrt() * coeffs[(k, k)];
        amplitude.norm_sqr()
    } else {
        let amplitude = coeffs[(k, l)] + coeffs[(l, k)];
        amplitude.norm_sqr()
    }
}

/// Remainder amplitudes over partner modes after a single click in `mode`
/// (0-based), straight from the expanded coefficients.
fn oracle_remainder(coeffs: &Array2<Complex64>, mode: usize) -> Vec<Complex64> {
    let n = coeffs.nrows();
    (0..n)
        .map(|l| {
            if l == mode {
                Complex64::new(0.0, 0.0)
            } else {
                coeffs[(mode, l)] + coeffs[(l, mode)]
            }
        })
        .collect()
}

fn test_networks() -> Vec<(u64, LinearNetwork)> {
    (0..50u64)
        .map(|seed| {
            let modes = 4 + (seed % 4) as usize;
            (seed, LinearNetwork::random_haar(modes, seed).unwrap())
        })
        .collect()
}

#[test]
fn pipeline_probabilities_match_the_literal_expansion() {
    let mut pairs_checked = 0u32;
    for (seed, network) in test_networks() {
        let n = network.modes();
        for which in BellIndex::ALL {
            let input: BilinearForm = bell_form(which, n).unwrap();
            let transformed = network.apply(&input).unwrap();
            let coeffs = expand_coefficients(network.unitary(), input.matrix());

            let mut total = 0.0f64;
            for outcome in enumerate_outcomes(n) {
                let fast = outcome_probability(&transformed, &outcome).unwrap();
                let (i, j) = outcome.modes();
                let slow = oracle_probability(&coeffs, i - 1, j - 1);
                assert!(
                    (fast - slow).abs() < 1e-12,
                    "seed {seed} {which} outcome {outcome}: {fast} vs {slow}"
                );
                total += slow;
            }
            assert!(
                (total - 1.0).abs() < 1e-12,
                "seed {seed} {which}: oracle total {total}"
            );
            pairs_checked += 1;
        }
    }
    assert_eq!(pairs_checked, 200);
}

#[test]
fn closed_form_overlaps_match_the_literal_expansion() {
    for (seed, network) in test_networks() {
        let n = network.modes();
        let mut remainders: Vec<Vec<Vec<Complex64>>> = Vec::new();
        for which in BellIndex::ALL {
            let input = bell_form(which, n).unwrap();
            let coeffs = expand_coefficients(network.unitary(), input.matrix());
            remainders.push((0..n).map(|mode| oracle_remainder(&coeffs, mode)).collect());
        }
        for mode in 1..=n {
            let alpha = network.alpha(mode).unwrap();
            for eta in BellIndex::ALL {
                for mu in BellIndex::ALL {
                    let closed = conditional_overlap(&alpha, eta, mu);
                    let a = &remainders[eta.index() - 1][mode - 1];
                    let b = &remainders[mu.index() - 1][mode - 1];
                    let direct: Complex64 =
                        a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
                    assert!(
                        (closed - direct).norm() < 1e-12,
                        "seed {seed} mode {mode} ({eta},{mu}): {closed} vs {direct}"
                    );
                }
            }
        }
    }
}

#[test]
fn remainder_states_match_the_literal_expansion() {
    for (seed, network) in test_networks().into_iter().step_by(7) {
        let n = network.modes();
        for which in BellIndex::ALL {
            let input = bell_form(which, n).unwrap();
            let transformed = network.apply(&input).unwrap();
            let coeffs = expand_coefficients(network.unitary(), input.matrix());
            for mode in 1..=n {
                let fast = conditional_state(&transformed, mode).unwrap();
                let slow = oracle_remainder(&coeffs, mode - 1);
                for (l, (f, s)) in fast.amplitudes().iter().zip(slow.iter()).enumerate() {
                    assert!(
                        (f - s).norm() < 1e-12,
                        "seed {seed} {which} mode {mode} partner {}",
                        l + 1
                    );
                }
            }
        }
    }
}
