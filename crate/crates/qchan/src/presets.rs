//! Named example states, each stored as the ket expression it parses from.

use crate::ket::parse_ket_expression;
use crate::state::PureState;

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub expression: &'static str,
    pub summary: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "ghz",
        expression: "1/sqrt(2)(|0000> + |1111>)",
        summary: "uniform superposition of |0000> and |1111>; completely entangled, all channel ranks two",
    },
    Preset {
        name: "w",
        expression: "1/2(|0001> + |0010> + |0100> + |1000>)",
        summary: "single-excitation superposition; completely entangled, all channel ranks two",
    },
    Preset {
        name: "bellpairs",
        expression: "1/2(|0000> + |0011> + |1100> + |1111>)",
        summary: "product of two maximally entangled pairs (AB times CD); channel ranks (1, 4, 4)",
    },
    Preset {
        name: "cluster",
        expression: "1/2(|0000> + |0011> + |1100> - |1111>)",
        summary: "four-term state with one sign flip; completely entangled, channel ranks (2, 4, 4)",
    },
    Preset {
        name: "eq19",
        expression: "1/2(|0000> + |0101> + |1010> + |1111>)",
        summary: "checkerboard pair state entangled across AC and BD; channel ranks (4, 1, 4)",
    },
    Preset {
        name: "eq23",
        expression: "1/4(|0000>+|0001>+|0010>+|0011>+|0100>-|0101>+|0110>-|0111>\
                     +|1000>+|1001>-|1010>-|1011>+|1100>-|1101>-|1110>+|1111>)",
        summary: "sixteen-term signed variant of eq19; channel ranks (4, 1, 4)",
    },
    Preset {
        name: "sep",
        expression: "1/2(|0001> + |0011> + |0101> + |0111>)",
        summary: "fully separable product state |0>(|0>+|1>)(|0>+|1>)|1>/2",
    },
    Preset {
        name: "nonbell",
        expression: "1/2(|0000> + |0101> + |1011> + |1110>)",
        summary: "four-term non-Bell state, usable as a projective measurement",
    },
];

/// Look a preset up by name.
pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

/// Parse a preset's expression. Panics only if the table itself is broken,
/// which the test suite rules out.
pub fn state(name: &str) -> Option<PureState> {
    find(name).map(|p| parse_ket_expression(p.expression).expect("preset expressions parse"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn every_preset_parses_to_four_qubits() {
        for preset in PRESETS {
            let parsed = state(preset.name).unwrap();
            assert_eq!(parsed.num_qubits(), 4, "{}", preset.name);
        }
    }

    #[test]
    fn preset_amplitudes_match_hardcoded_vectors() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let cases: &[(&str, [Complex64; 16])] = &[
            ("ghz", {
                let mut v = [c(0.0); 16];
                v[0] = c(s);
                v[15] = c(s);
                v
            }),
            ("w", {
                let mut v = [c(0.0); 16];
                for idx in [1, 2, 4, 8] {
                    v[idx] = c(0.5);
                }
                v
            }),
            ("bellpairs", {
                let mut v = [c(0.0); 16];
                for idx in [0, 3, 12, 15] {
                    v[idx] = c(0.5);
                }
                v
            }),
            ("cluster", {
                let mut v = [c(0.0); 16];
                for idx in [0, 3, 12] {
                    v[idx] = c(0.5);
                }
                v[15] = c(-0.5);
                v
            }),
            ("eq19", {
                let mut v = [c(0.0); 16];
                for idx in [0, 5, 10, 15] {
                    v[idx] = c(0.5);
                }
                v
            }),
            ("eq23", {
                let signs = [
                    1.0, 1.0, 1.0, 1.0, 1.0, -1.0, 1.0, -1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0,
                    -1.0, 1.0,
                ];
                let mut v = [c(0.0); 16];
                for (idx, &sgn) in signs.iter().enumerate() {
                    v[idx] = c(0.25 * sgn);
                }
                v
            }),
            ("sep", {
                let mut v = [c(0.0); 16];
                for idx in [1, 3, 5, 7] {
                    v[idx] = c(0.5);
                }
                v
            }),
            ("nonbell", {
                let mut v = [c(0.0); 16];
                for idx in [0b0000, 0b0101, 0b1011, 0b1110] {
                    v[idx] = c(0.5);
                }
                v
            }),
        ];
        assert_eq!(cases.len(), PRESETS.len());
        for (name, expected) in cases {
            let parsed = state(name).unwrap();
            for (idx, (got, want)) in parsed.amplitudes().iter().zip(expected.iter()).enumerate() {
                assert!(
                    (got - want).norm() < 1e-12,
                    "{name} amplitude {idx}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn unknown_preset_is_none() {
        assert!(find("nope").is_none());
        assert!(state("nope").is_none());
    }
}
