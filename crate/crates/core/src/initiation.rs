//! Handoff initiation between UMTS and WiMAX.
//!
//! Four inputs (RSSI, data rate, coverage, latency) with three Gaussian sets
//! each feed an 81-rule Mamdani system whose output, the handoff factor on
//! `[0, 1]`, is compared against a threshold.

use crate::fis::{
    FisError, FuzzyRule, InferenceConfig, Layout, LinguisticVariable, Mamdani, RuleBase, Universe,
};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

pub const DEFAULT_THRESHOLD: f64 = 0.65;

pub const RSSI_RANGE: (f64, f64) = (-78.0, -66.0);
pub const DATA_RATE_RANGE: (f64, f64) = (0.0, 60.0);
pub const COVERAGE_RANGE: (f64, f64) = (0.0, 50.0);
pub const LATENCY_RANGE: (f64, f64) = (0.0, 200.0);

pub const RSSI_LABELS: [&str; 3] = ["Weak", "Medium", "Strong"];
pub const DATA_RATE_LABELS: [&str; 3] = ["Low", "Medium", "High"];
pub const COVERAGE_LABELS: [&str; 3] = ["Bad", "Medium", "Good"];
/// Worst first: high latency is index 0.
pub const LATENCY_LABELS: [&str; 3] = ["High", "Medium", "Low"];
pub const FACTOR_LABELS: [&str; 5] = ["Lower", "Low", "Medium", "High", "Higher"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InitiationError {
    #[error("threshold must lie in (0, 1), got {0}")]
    InvalidThreshold(f64),
    #[error(transparent)]
    Fis(#[from] FisError),
}

/// Measurements fed to the initiation system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InitiationInputs {
    /// dBm
    pub rssi: f64,
    /// Mbps
    pub data_rate: f64,
    /// km
    pub coverage: f64,
    /// ms
    pub latency: f64,
}

impl InitiationInputs {
    pub fn new(rssi: f64, data_rate: f64, coverage: f64, latency: f64) -> Self {
        Self {
            rssi,
            data_rate,
            coverage,
            latency,
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.rssi, self.data_rate, self.coverage, self.latency]
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HandoffDirection {
    UmtsToWimax,
    WimaxToUmts,
}

impl HandoffDirection {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::UmtsToWimax => "umts_to_wimax",
            Self::WimaxToUmts => "wimax_to_umts",
        }
    }
}

impl fmt::Display for HandoffDirection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for HandoffDirection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "umts_to_wimax" => Ok(Self::UmtsToWimax),
            "wimax_to_umts" => Ok(Self::WimaxToUmts),
            other => Err(format!("unknown direction '{other}'")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HandoffDecision {
    pub factor: f64,
    pub initiate: bool,
    pub threshold: f64,
}

/// Consequent for an antecedent in the UMTS-to-WiMAX base: the sum of the
/// four worst-to-best set indices, spread over the five output sets.
pub fn scored_consequent(antecedent: &[usize]) -> usize {
    let score: usize = antecedent.iter().sum();
    (5 * score / 9).min(FACTOR_LABELS.len() - 1)
}

fn rule_base(direction: HandoffDirection) -> Result<RuleBase, FisError> {
    let top = FACTOR_LABELS.len() - 1;
    let mut rules = Vec::with_capacity(81);
    for rssi in 0..3 {
        for rate in 0..3 {
            for cov in 0..3 {
                for lat in 0..3 {
                    let antecedent = vec![rssi, rate, cov, lat];
                    let k = scored_consequent(&antecedent);
                    let consequent = match direction {
                        HandoffDirection::UmtsToWimax => k,
                        HandoffDirection::WimaxToUmts => top - k,
                    };
                    rules.push(FuzzyRule::new(antecedent, consequent));
                }
            }
        }
    }
    RuleBase::new(rules, &[3, 3, 3, 3], FACTOR_LABELS.len())
}

fn variable(
    name: &str,
    (lo, hi): (f64, f64),
    labels: &[&str],
    layout: Layout,
) -> Result<LinguisticVariable, FisError> {
    LinguisticVariable::evenly_spaced_gaussians(name, Universe::new(lo, hi)?, labels, layout)
}

/// Builds the inference system for one handoff direction.
pub fn build_initiation_fis(direction: HandoffDirection) -> Result<Mamdani, FisError> {
    let inputs = vec![
        variable("RSSI", RSSI_RANGE, &RSSI_LABELS, Layout::Ascending)?,
        variable(
            "Data Rate",
            DATA_RATE_RANGE,
            &DATA_RATE_LABELS,
            Layout::Ascending,
        )?,
        variable(
            "Network Coverage",
            COVERAGE_RANGE,
            &COVERAGE_LABELS,
            Layout::Ascending,
        )?,
        variable(
            "Network Latency",
            LATENCY_RANGE,
            &LATENCY_LABELS,
            Layout::Descending,
        )?,
    ];
    let output = variable(
        "Handoff Factor",
        (0.0, 1.0),
        &FACTOR_LABELS,
        Layout::Ascending,
    )?;
    Mamdani::new(
        inputs,
        output,
        rule_base(direction)?,
        InferenceConfig::default(),
    )
}

fn shared_fis(direction: HandoffDirection) -> &'static Mamdani {
    static UMTS_TO_WIMAX: OnceLock<Mamdani> = OnceLock::new();
    static WIMAX_TO_UMTS: OnceLock<Mamdani> = OnceLock::new();
    let cell = match direction {
        HandoffDirection::UmtsToWimax => &UMTS_TO_WIMAX,
        HandoffDirection::WimaxToUmts => &WIMAX_TO_UMTS,
    };
    cell.get_or_init(|| build_initiation_fis(direction).expect("built-in initiation FIS is valid"))
}

/// Handoff factor for `inputs` in `direction`.
pub fn handoff_factor(
    inputs: &InitiationInputs,
    direction: HandoffDirection,
) -> Result<f64, InitiationError> {
    let factor = shared_fis(direction).evaluate(&inputs.as_array())?;
    Ok(factor.clamp(0.0, 1.0))
}

pub fn evaluate_initiation(
    inputs: &InitiationInputs,
    direction: HandoffDirection,
    threshold: f64,
) -> Result<HandoffDecision, InitiationError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(InitiationError::InvalidThreshold(threshold));
    }
    let factor = handoff_factor(inputs, direction)?;
    Ok(HandoffDecision {
        factor,
        initiate: factor > threshold,
        threshold,
    })
}
