//! Randomized invariants over arbitrary (not just Haar-sampled) circuits.

use proptest::prelude::*;
use std::f64::consts::PI;

use bsa_core::detection::{outcome_probability, two_photon_probability, DetectionOutcome};
use bsa_core::discrimination::{
    classify, max_identifiable_states, per_mode_bound, OutcomeClass, TAU_ZERO,
};
use bsa_core::network::{CircuitElement, LinearNetwork};
use bsa_core::optimizer::{smoothed_objective, MeshParameters};
use bsa_core::states::{bell_form, BellIndex, Priors};
use bsa_core::linalg;

fn element_strategy(modes: usize) -> impl Strategy<Value = CircuitElement> {
    let pair = (1..=modes, 1..modes).prop_map(move |(i, step)| {
        let j = (i - 1 + step) % modes + 1;
        (i.min(j), i.max(j))
    });
    prop_oneof![
        (pair.clone(), -PI..PI, -PI..PI).prop_map(|((i, j), theta, phi)| {
            CircuitElement::Beamsplitter { i, j, theta, phi }
        }),
        (1..=modes, -PI..PI)
            .prop_map(|(mode, phi)| CircuitElement::PhaseShifter { mode, phi }),
        pair.prop_map(|(i, j)| CircuitElement::Swap { i, j }),
    ]
}

fn circuit_strategy() -> impl Strategy<Value = LinearNetwork> {
    (4usize..=7)
        .prop_flat_map(|modes| {
            prop::collection::vec(element_strategy(modes), 0..12)
                .prop_map(move |elements| LinearNetwork::compose(modes, elements).unwrap())
        })
        .boxed()
}

fn priors_strategy() -> impl Strategy<Value = Priors> {
    [0.05f64..1.0, 0.05..1.0, 0.05..1.0, 0.05..1.0].prop_map(|weights| {
        let total: f64 = weights.iter().sum();
        Priors::new([
            weights[0] / total,
            weights[1] / total,
            weights[2] / total,
            weights[3] / total,
        ])
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composed_circuits_are_unitary(network in circuit_strategy()) {
        prop_assert!(linalg::unitarity_residual(network.unitary()) < 1e-9);
    }

    #[test]
    fn outcome_probabilities_form_distributions(network in circuit_strategy()) {
        let n = network.modes();
        for which in BellIndex::ALL {
            let m = network.apply(&bell_form(which, n).unwrap()).unwrap();
            let mut total = 0.0f64;
            for i in 1..=n {
                for j in i..=n {
                    let p = outcome_probability(&m, &DetectionOutcome::new(i, j).unwrap()).unwrap();
                    prop_assert!((0.0..=1.0 + 1e-12).contains(&p));
                    total += p;
                }
            }
            prop_assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn success_respects_both_bounds(network in circuit_strategy(), priors in priors_strategy()) {
        let report = classify(&network, &priors, TAU_ZERO).unwrap();
        prop_assert!(report.success_probability() <= priors.two_largest_sum() + 1e-9);
        // Re-derive the coincidence-only per-mode tally and compare to the cap.
        let n = network.modes();
        let mut per_mode = vec![0.0f64; n];
        for row in report.rows() {
            if row.outcome.is_double() {
                continue;
            }
            if let OutcomeClass::Unambiguous(which) = &row.class {
                let weighted = priors.get(*which) * row.probabilities[which.slot()];
                let (i, j) = row.outcome.modes();
                per_mode[i - 1] += weighted;
                per_mode[j - 1] += weighted;
            }
        }
        for (i, &got) in per_mode.iter().enumerate() {
            let cap = per_mode_bound(&network.alpha(i + 1).unwrap(), &priors);
            prop_assert!(got <= cap + 1e-10, "mode {}: {} > {}", i + 1, got, cap);
        }
    }

    #[test]
    fn output_phases_cannot_change_the_classification(
        network in circuit_strategy(),
        phases in prop::collection::vec(-PI..PI, 7),
    ) {
        let n = network.modes();
        let priors = Priors::uniform();
        let before = classify(&network, &priors, TAU_ZERO).unwrap();

        let mut elements = network.elements().to_vec();
        for (mode0, &phi) in phases.iter().take(n).enumerate() {
            elements.push(CircuitElement::PhaseShifter { mode: mode0 + 1, phi });
        }
        let shifted = LinearNetwork::compose(n, elements).unwrap();
        let after = classify(&shifted, &priors, TAU_ZERO).unwrap();

        prop_assert!((before.success_probability() - after.success_probability()).abs() < 1e-12);
        for (a, b) in before.rows().iter().zip(after.rows().iter()) {
            prop_assert_eq!(a.outcome, b.outcome);
            prop_assert_eq!(&a.class, &b.class);
            for slot in 0..4 {
                prop_assert!((a.probabilities[slot] - b.probabilities[slot]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn relabeling_outputs_permutes_the_table(
        network in circuit_strategy(),
        swap_seed in 0usize..100,
    ) {
        let n = network.modes();
        let a = swap_seed % n + 1;
        let b = (swap_seed / n) % n + 1;
        prop_assume!(a != b);
        let priors = Priors::uniform();
        let before = classify(&network, &priors, TAU_ZERO).unwrap();

        let mut elements = network.elements().to_vec();
        elements.push(CircuitElement::Swap { i: a, j: b });
        let relabeled = LinearNetwork::compose(n, elements).unwrap();
        let after = classify(&relabeled, &priors, TAU_ZERO).unwrap();

        prop_assert!((before.success_probability() - after.success_probability()).abs() < 1e-12);
        let map = |m: usize| -> usize {
            if m == a { b } else if m == b { a } else { m }
        };
        for row in before.rows() {
            let (i, j) = row.outcome.modes();
            let (pi, pj) = (map(i), map(j));
            let target = after
                .rows()
                .iter()
                .find(|r| r.outcome.modes() == (pi.min(pj), pi.max(pj)))
                .unwrap();
            prop_assert_eq!(&row.class, &target.class);
            for slot in 0..4 {
                prop_assert!((row.probabilities[slot] - target.probabilities[slot]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bunching_probability_agrees_between_routes(network in circuit_strategy()) {
        let n = network.modes();
        for which in BellIndex::ALL {
            let m = network.apply(&bell_form(which, n).unwrap()).unwrap();
            for i in 1..=n {
                let via_form =
                    outcome_probability(&m, &DetectionOutcome::double(i).unwrap()).unwrap();
                let via_alpha = two_photon_probability(&network.alpha(i).unwrap(), which);
                prop_assert!((via_form - via_alpha).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn no_single_mode_identifies_more_than_two(network in circuit_strategy()) {
        for i in 1..=network.modes() {
            prop_assert!(max_identifiable_states(&network, i).unwrap() <= 2);
        }
    }

    #[test]
    fn surrogate_hardens_monotonically(seed in 0u64..1000, priors in priors_strategy()) {
        let params = MeshParameters::random(4, seed).unwrap();
        let mut last = f64::INFINITY;
        for sharpness in [1.0f64, 2.0, 4.0, 8.0, 16.0, 32.0] {
            let value = smoothed_objective(&params, &priors, sharpness).unwrap();
            prop_assert!((0.0..=1.0).contains(&value));
            prop_assert!(value <= last + 1e-12);
            last = value;
        }
    }
}
