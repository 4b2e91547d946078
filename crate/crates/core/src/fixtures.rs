//! Reference evaluation data: attribute weights and the per-network
//! membership bounds before optimization.
//!
//! The raw weights sum to 0.98641, not 1. They are kept as given in
//! [`REFERENCE_WEIGHTS_RAW`]; [`reference_weights`] divides by the sum.

use crate::ahp::{normalize_weights, WeightVector};
use crate::ansf::{CriterionBounds, CRITERIA_COUNT};

/// Weights in canonical criterion order, unnormalized.
pub const REFERENCE_WEIGHTS_RAW: [f64; CRITERIA_COUNT] = [
    0.0181, 0.4772, 0.0242, 0.1198, 0.0685, 0.0181, 0.00181, 0.0385, 0.2202,
];

pub const WIMAX_1_BOUNDS: [(f64, f64); CRITERIA_COUNT] = [
    (0.5, 0.9),
    (0.05, 0.1),
    (0.1, 0.45),
    (0.4, 0.6),
    (0.7, 0.9),
    (0.8, 0.9),
    (0.7, 0.8),
    (0.01, 0.9),
    (0.5, 0.6),
];

pub const WIMAX_2_BOUNDS: [(f64, f64); CRITERIA_COUNT] = [
    (0.5, 0.9),
    (0.2, 0.9),
    (0.2, 0.95),
    (0.5, 0.9),
    (0.7, 0.9),
    (0.8, 0.9),
    (0.6, 0.75),
    (0.01, 0.5),
    (0.6, 0.85),
];

/// Memberships reported after optimization, for comparison only.
pub const WIMAX_1_OPTIMIZED: [f64; CRITERIA_COUNT] = [
    0.8125, 0.0994, 0.2027, 0.5949, 0.9000, 0.8985, 0.7998, 0.8972, 0.5982,
];
pub const WIMAX_2_OPTIMIZED: [f64; CRITERIA_COUNT] = [
    0.8945, 0.9000, 0.8039, 0.7839, 0.9000, 0.8938, 0.7484, 0.5000, 0.8300,
];

/// Measured (RSSI dBm, rate Mbps, coverage km, latency ms) per WiMAX network.
pub const WIMAX_1_MEASUREMENTS: [f64; 4] = [-67.3, 48.8, 47.9, 56.5];
pub const WIMAX_2_MEASUREMENTS: [f64; 4] = [-67.01, 48.6, 47.6, 55.8];

/// Raw weights rescaled to sum to one.
pub fn reference_weights() -> WeightVector {
    normalize_weights(&REFERENCE_WEIGHTS_RAW).expect("reference weights are positive")
}

pub fn wimax_1_bounds() -> CriterionBounds {
    CriterionBounds::from_pairs(WIMAX_1_BOUNDS).expect("valid bounds")
}

pub fn wimax_2_bounds() -> CriterionBounds {
    CriterionBounds::from_pairs(WIMAX_2_BOUNDS).expect("valid bounds")
}

/// Bundled scenario files.
pub const REFERENCE_SCENARIO_JSON: &str = include_str!("../fixtures/paper_sec4.json");
pub const CONSISTENT_AHP_3X3_JSON: &str = include_str!("../fixtures/consistent_ahp_3x3.json");
pub const DEGENERATE_BOX_JSON: &str = include_str!("../fixtures/degenerate_box.json");
