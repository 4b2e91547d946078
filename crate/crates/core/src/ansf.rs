//! Access network selection function (ANSF).
//!
//! A network's score is the weighted sum of its per-criterion memberships.
//! Memberships already fold in each criterion's polarity, so higher is
//! always better and every weight is positive.

use crate::ahp::WeightVector;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::fmt;
use thiserror::Error;

pub const CRITERIA_COUNT: usize = 9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnsfError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no candidate networks")]
    EmptyCandidates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    /// Higher raw value is better.
    Benefit,
    /// Lower raw value is better.
    Cost,
}

/// Selection criteria, in canonical vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    SignalStrength,
    DataRate,
    CoverageArea,
    NetworkLatency,
    Reliability,
    Security,
    BatteryPower,
    MobileVelocity,
    ServiceCost,
}

impl Criterion {
    pub const ALL: [Criterion; CRITERIA_COUNT] = [
        Criterion::SignalStrength,
        Criterion::DataRate,
        Criterion::CoverageArea,
        Criterion::NetworkLatency,
        Criterion::Reliability,
        Criterion::Security,
        Criterion::BatteryPower,
        Criterion::MobileVelocity,
        Criterion::ServiceCost,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn polarity(self) -> Polarity {
        match self {
            Self::ServiceCost | Self::BatteryPower | Self::NetworkLatency => Polarity::Cost,
            _ => Polarity::Benefit,
        }
    }

    /// One-letter symbol (S, D, A, L, R, E, P, V, C).
    pub fn symbol(self) -> char {
        match self {
            Self::SignalStrength => 'S',
            Self::DataRate => 'D',
            Self::CoverageArea => 'A',
            Self::NetworkLatency => 'L',
            Self::Reliability => 'R',
            Self::Security => 'E',
            Self::BatteryPower => 'P',
            Self::MobileVelocity => 'V',
            Self::ServiceCost => 'C',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::SignalStrength => "signal_strength",
            Self::DataRate => "data_rate",
            Self::CoverageArea => "coverage_area",
            Self::NetworkLatency => "network_latency",
            Self::Reliability => "reliability",
            Self::Security => "security",
            Self::BatteryPower => "battery_power",
            Self::MobileVelocity => "mobile_velocity",
            Self::ServiceCost => "service_cost",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Physical maximum used to normalize a raw attribute.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttributeSpec {
    pub criterion: Criterion,
    pub max_value: f64,
}

impl AttributeSpec {
    pub fn new(criterion: Criterion, max_value: f64) -> Result<Self, AnsfError> {
        if !(max_value.is_finite() && max_value > 0.0) {
            return Err(AnsfError::Domain(format!(
                "{criterion}: max_value must be positive, got {max_value}"
            )));
        }
        Ok(Self {
            criterion,
            max_value,
        })
    }
}

/// Linear membership of a raw value: `min(raw / max, 1)` for benefit
/// criteria, one minus that for cost criteria.
pub fn normalize_attribute(raw: f64, spec: &AttributeSpec) -> Result<f64, AnsfError> {
    if !(raw.is_finite() && raw >= 0.0) {
        return Err(AnsfError::Domain(format!(
            "{}: raw value {raw} < 0",
            spec.criterion
        )));
    }
    let ratio = (raw / spec.max_value).min(1.0);
    Ok(match spec.criterion.polarity() {
        Polarity::Benefit => ratio,
        Polarity::Cost => 1.0 - ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Technology {
    #[serde(rename = "GPRS")]
    Gprs,
    #[serde(rename = "UMTS")]
    Umts,
    #[serde(rename = "WiMAX")]
    Wimax,
}

impl Technology {
    pub fn is_cellular(self) -> bool {
        matches!(self, Self::Gprs | Self::Umts)
    }
}

impl fmt::Display for Technology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gprs => "GPRS",
            Self::Umts => "UMTS",
            Self::Wimax => "WiMAX",
        })
    }
}

/// Membership interval `[lb, ub]` inside `[0, 1]`. Serialized as `[lb, ub]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Bound {
    pub lb: f64,
    pub ub: f64,
}

impl Bound {
    pub fn new(lb: f64, ub: f64) -> Self {
        Self { lb, ub }
    }

    pub fn point(v: f64) -> Self {
        Self { lb: v, ub: v }
    }

    pub fn is_valid(&self) -> bool {
        self.lb.is_finite()
            && self.ub.is_finite()
            && 0.0 <= self.lb
            && self.lb <= self.ub
            && self.ub <= 1.0
    }

    pub fn contains(&self, x: f64) -> bool {
        (self.lb..=self.ub).contains(&x)
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lb, self.ub)
    }

    pub fn width(&self) -> f64 {
        self.ub - self.lb
    }
}

impl From<[f64; 2]> for Bound {
    fn from([lb, ub]: [f64; 2]) -> Self {
        Self { lb, ub }
    }
}

impl From<Bound> for [f64; 2] {
    fn from(b: Bound) -> Self {
        [b.lb, b.ub]
    }
}

/// Per-criterion membership bounds of one network.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionBounds([Bound; CRITERIA_COUNT]);

impl CriterionBounds {
    pub fn new(bounds: [Bound; CRITERIA_COUNT]) -> Result<Self, AnsfError> {
        if let Some((j, b)) = bounds.iter().enumerate().find(|(_, b)| !b.is_valid()) {
            return Err(AnsfError::Domain(format!(
                "{}: need 0 <= lb <= ub <= 1, got ({}, {})",
                Criterion::ALL[j],
                b.lb,
                b.ub
            )));
        }
        Ok(Self(bounds))
    }

    pub fn from_pairs(pairs: [(f64, f64); CRITERIA_COUNT]) -> Result<Self, AnsfError> {
        Self::new(pairs.map(|(lb, ub)| Bound::new(lb, ub)))
    }

    pub fn get(&self, c: Criterion) -> Bound {
        self.0[c.index()]
    }

    pub fn as_slice(&self) -> &[Bound] {
        &self.0
    }

    pub fn lower(&self) -> Vec<f64> {
        self.0.iter().map(|b| b.lb).collect()
    }

    pub fn upper(&self) -> Vec<f64> {
        self.0.iter().map(|b| b.ub).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkProfile {
    pub id: String,
    pub technology: Technology,
    /// `None` for networks listed without membership data.
    pub bounds: Option<CriterionBounds>,
}

impl NetworkProfile {
    pub fn new(
        id: impl Into<String>,
        technology: Technology,
        bounds: Option<CriterionBounds>,
    ) -> Self {
        Self {
            id: id.into(),
            technology,
            bounds,
        }
    }
}

/// One membership per criterion, each in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MembershipVector(Vec<f64>);

impl MembershipVector {
    pub fn new(values: Vec<f64>) -> Result<Self, AnsfError> {
        if let Some((j, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(AnsfError::Domain(format!(
                "membership {j} = {v} outside [0, 1]"
            )));
        }
        Ok(Self(values))
    }

    /// Checks the vector against a network's bounds.
    pub fn within(&self, bounds: &CriterionBounds) -> bool {
        self.0.len() == CRITERIA_COUNT
            && self
                .0
                .iter()
                .zip(bounds.as_slice())
                .all(|(v, b)| b.contains(*v))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl TryFrom<Vec<f64>> for MembershipVector {
    type Error = AnsfError;

    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<MembershipVector> for Vec<f64> {
    fn from(m: MembershipVector) -> Self {
        m.0
    }
}

/// `Σ_j W_j μ_j` over raw slices.
pub fn weighted_sum(weights: &[f64], memberships: &[f64]) -> Result<f64, AnsfError> {
    if weights.len() != memberships.len() {
        return Err(AnsfError::Dimension {
            expected: weights.len(),
            got: memberships.len(),
        });
    }
    Ok(weights.iter().zip(memberships).map(|(w, m)| w * m).sum())
}

pub fn ansf_value(
    weights: &WeightVector,
    memberships: &MembershipVector,
) -> Result<f64, AnsfError> {
    weighted_sum(weights.as_slice(), memberships.as_slice())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedNetwork {
    pub network: String,
    pub score: f64,
}

/// Sorts best first; equal scores fall back to id order.
pub fn rank_scores(mut scores: Vec<RankedNetwork>) -> Vec<RankedNetwork> {
    scores.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.network.cmp(&b.network))
    });
    scores
}

/// Scores every profile with `evaluator` and ranks them.
pub fn select_network<E, Err>(
    profiles: &[NetworkProfile],
    weights: &WeightVector,
    mut evaluator: E,
) -> Result<Vec<RankedNetwork>, Err>
where
    E: FnMut(&NetworkProfile) -> Result<MembershipVector, Err>,
    Err: From<AnsfError>,
{
    if profiles.is_empty() {
        return Err(AnsfError::EmptyCandidates.into());
    }
    let mut scores = Vec::with_capacity(profiles.len());
    for p in profiles {
        let mu = evaluator(p)?;
        scores.push(RankedNetwork {
            network: p.id.clone(),
            score: ansf_value(weights, &mu)?,
        });
    }
    Ok(rank_scores(scores))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum SelectionOutcome {
    Handoff { target: String, score: f64 },
    Stay,
}

/// Hands off only when the best target strictly beats the current network.
pub fn handoff_decision(current_score: f64, ranked_targets: &[RankedNetwork]) -> SelectionOutcome {
    match ranked_targets.first() {
        Some(best) if best.score > current_score => SelectionOutcome::Handoff {
            target: best.network.clone(),
            score: best.score,
        },
        _ => SelectionOutcome::Stay,
    }
}
