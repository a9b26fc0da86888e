//! On-disk circuit description.
//!
//! A circuit file is JSON: a mode count plus an ordered list of element
//! records, applied first-to-last.  Mode indices are 1-based, matching the
//! labeling used in analysis reports.  Complex matrix entries serialize as
//! two-element `[re, im]` arrays and angles as plain radians, so files are
//! diff-able and round-trip exactly.

use std::fs;
use std::path::Path;

use bsa_core::{CircuitElement, Error, LinearNetwork};
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// One optical element as stored in a circuit file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ElementRecord {
    /// Two-mode rotation by `theta` with phase `phi` on the first mode.
    Beamsplitter { modes: [usize; 2], theta: f64, phi: f64 },
    /// Phase factor `e^{i phi}` on a single mode.
    Phase { mode: usize, phi: f64 },
    /// Exchange of two mode labels.
    Swap { modes: [usize; 2] },
    /// Explicit full-size unitary, row-major, entries as `[re, im]`.
    Unitary { matrix: Vec<Vec<[f64; 2]>> },
}

impl ElementRecord {
    /// Convert the stored record into a simulator element.  Index and
    /// unitarity validation happens later, when the circuit is composed.
    pub fn to_element(&self) -> Result<CircuitElement, Error> {
        match self {
            ElementRecord::Beamsplitter { modes, theta, phi } => Ok(CircuitElement::Beamsplitter {
                i: modes[0],
                j: modes[1],
                theta: *theta,
                phi: *phi,
            }),
            ElementRecord::Phase { mode, phi } => Ok(CircuitElement::PhaseShifter {
                mode: *mode,
                phi: *phi,
            }),
            ElementRecord::Swap { modes } => Ok(CircuitElement::Swap {
                i: modes[0],
                j: modes[1],
            }),
            ElementRecord::Unitary { matrix } => {
                let n = matrix.len();
                let mut u = Array2::zeros((n, n));
                for (r, row) in matrix.iter().enumerate() {
                    if row.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            got: row.len(),
                        });
                    }
                    for (c, entry) in row.iter().enumerate() {
                        u[(r, c)] = Complex64::new(entry[0], entry[1]);
                    }
                }
                Ok(CircuitElement::RawUnitary(u))
            }
        }
    }

    /// Render a simulator element as a storable record.
    pub fn from_element(element: &CircuitElement) -> Self {
        match element {
            CircuitElement::Beamsplitter { i, j, theta, phi } => ElementRecord::Beamsplitter {
                modes: [*i, *j],
                theta: *theta,
                phi: *phi,
            },
            CircuitElement::PhaseShifter { mode, phi } => ElementRecord::Phase {
                mode: *mode,
                phi: *phi,
            },
            CircuitElement::Swap { i, j } => ElementRecord::Swap { modes: [*i, *j] },
            CircuitElement::RawUnitary(u) => {
                let matrix = u
                    .rows()
                    .into_iter()
                    .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                    .collect();
                ElementRecord::Unitary { matrix }
            }
        }
    }
}

/// A complete circuit file: mode count plus ordered elements.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    /// Number of optical modes.
    pub modes: usize,
    /// Elements in application order (the first listed acts first).
    pub elements: Vec<ElementRecord>,
}

impl CircuitFile {
    /// Describe an existing network, e.g. for writing presets or search
    /// results back to disk.
    pub fn from_network(network: &LinearNetwork) -> Self {
        CircuitFile {
            modes: network.modes(),
            elements: network
                .elements()
                .iter()
                .map(ElementRecord::from_element)
                .collect(),
        }
    }

    /// Compose the described network, validating every element.
    pub fn to_network(&self) -> Result<LinearNetwork, Error> {
        let elements = self
            .elements
            .iter()
            .map(ElementRecord::to_element)
            .collect::<Result<Vec<_>, _>>()?;
        LinearNetwork::compose(self.modes, elements)
    }

    /// Parse a circuit file from JSON text.
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Read and parse a circuit file from disk.
    pub fn load(path: &Path) -> Result<Self, crate::CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            crate::CliError::Parse(format!("cannot read {}: {e}", path.display()))
        })?;
        Self::from_json(&text).map_err(|e| {
            crate::CliError::Parse(format!("{}: {e}", path.display()))
        })
    }

    /// Serialize as pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("circuit serialization cannot fail");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn records_round_trip_through_json() {
        let file = CircuitFile {
            modes: 4,
            elements: vec![
                ElementRecord::Beamsplitter {
                    modes: [1, 3],
                    theta: std::f64::consts::FRAC_PI_4,
                    phi: 0.25,
                },
                ElementRecord::Phase { mode: 2, phi: -1.5 },
                ElementRecord::Swap { modes: [3, 4] },
            ],
        };
        let text = file.to_json();
        let back = CircuitFile::from_json(&text).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn unknown_type_tags_are_rejected() {
        let text = r#"{"modes": 4, "elements": [{"type": "mirror", "modes": [1, 2]}]}"#;
        assert!(CircuitFile::from_json(text).is_err());
    }

    #[test]
    fn unknown_top_level_fields_are_rejected() {
        let text = r#"{"modes": 4, "elements": [], "extra": 1}"#;
        assert!(CircuitFile::from_json(text).is_err());
    }

    #[test]
    fn explicit_unitary_round_trips_to_the_same_network() {
        let network = LinearNetwork::random_haar(4, 9).unwrap();
        let file = CircuitFile {
            modes: 4,
            elements: vec![ElementRecord::from_element(&CircuitElement::RawUnitary(
                network.unitary().clone(),
            ))],
        };
        let reparsed = CircuitFile::from_json(&file.to_json()).unwrap();
        let rebuilt = reparsed.to_network().unwrap();
        let diff = network
            .unitary()
            .iter()
            .zip(rebuilt.unitary().iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0_f64, f64::max);
        assert_eq!(diff, 0.0, "serialized matrices must be bit-exact: {diff:e}");
    }

    #[test]
    fn ragged_matrices_are_reported_as_dimension_errors() {
        let record = ElementRecord::Unitary {
            matrix: vec![vec![[1.0, 0.0], [0.0, 0.0]], vec![[0.0, 0.0]]],
        };
        assert!(record.to_element().is_err());
    }
}
