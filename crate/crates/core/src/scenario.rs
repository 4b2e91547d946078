//! Scenario documents: networks, weights, measurements, GA settings and the
//! trigger sequence, loaded from JSON and validated as a whole.

use crate::ahp::{
    derive_weights, normalize_weights, validate_matrix, ComparisonMatrix, EigenResult, WeightVector,
};
use crate::ansf::{
    normalize_attribute, AttributeSpec, Bound, Criterion, CriterionBounds, NetworkProfile,
    Technology, CRITERIA_COUNT,
};
use crate::ga::GaConfig;
use crate::initiation::{InitiationInputs, DEFAULT_THRESHOLD};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    /// Field path, e.g. `networks[3].bounds.data_rate`.
    pub path: String,
    pub message: String,
}

impl Violation {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scenario:\n{}", list(.0))]
    Validation(Vec<Violation>),
}

fn list(v: &[Violation]) -> String {
    v.iter()
        .map(|x| format!("  - {x}"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkEntry {
    pub id: String,
    pub technology: Technology,
    /// Membership bounds per criterion; `null` marks a network without data.
    #[serde(default)]
    pub bounds: Option<BTreeMap<Criterion, Bound>>,
    /// Raw measurements, normalized through `attribute_specs` into a point box.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_attributes: Option<BTreeMap<Criterion, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSource {
    Fixed {
        values: BTreeMap<Criterion, f64>,
        /// Divide by the sum before use.
        #[serde(default)]
        renormalize: bool,
    },
    /// 9×9 comparison matrix in canonical criterion order.
    Matrix { matrix: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TriggerEvent {
    NewAttachmentPoint {
        networks: Vec<String>,
    },
    ProfileChange {
        weights: WeightSource,
    },
    SignalDegradation {
        /// Updated RSSI of the current network, dBm.
        #[serde(default)]
        rssi: Option<f64>,
    },
}

impl TriggerEvent {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::NewAttachmentPoint { .. } => "new_attachment_point",
            Self::ProfileChange { .. } => "profile_change",
            Self::SignalDegradation { .. } => "signal_degradation",
        }
    }
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub networks: Vec<NetworkEntry>,
    pub weights: WeightSource,
    #[serde(default)]
    pub current_network: Option<String>,
    #[serde(default)]
    pub measurements: BTreeMap<String, InitiationInputs>,
    #[serde(default = "default_threshold")]
    pub initiation_threshold: f64,
    #[serde(default)]
    pub ga: GaConfig,
    /// Maximum raw value per criterion, used with `raw_attributes`.
    #[serde(default)]
    pub attribute_specs: BTreeMap<Criterion, f64>,
    #[serde(default)]
    pub triggers: Vec<TriggerEvent>,
}

/// Weights after applying a [`WeightSource`].
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedWeights {
    pub weights: WeightVector,
    pub eigen: Option<EigenResult>,
    pub warnings: Vec<String>,
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let config: ScenarioConfig = serde_json::from_str(text)?;
    config.validate()?;
    Ok(config)
}

fn complete_table<T: Copy>(
    table: &BTreeMap<Criterion, T>,
    path: &str,
    out: &mut Vec<Violation>,
) -> Option<[T; CRITERIA_COUNT]> {
    let missing: Vec<&str> = Criterion::ALL
        .iter()
        .filter(|c| !table.contains_key(c))
        .map(|c| c.name())
        .collect();
    if !missing.is_empty() {
        out.push(Violation::new(
            path,
            format!("missing criteria: {}", missing.join(", ")),
        ));
        return None;
    }
    Some(Criterion::ALL.map(|c| table[&c]))
}

fn check_weight_source(source: &WeightSource, path: &str, out: &mut Vec<Violation>) {
    match source {
        WeightSource::Fixed {
            values,
            renormalize,
        } => {
            let before = out.len();
            for (c, w) in values {
                if !(w.is_finite() && *w > 0.0) {
                    out.push(Violation::new(
                        format!("{path}.values.{c}"),
                        format!("weight {w} must be positive"),
                    ));
                } else if !renormalize && *w >= 1.0 {
                    out.push(Violation::new(
                        format!("{path}.values.{c}"),
                        format!("weight {w} must be below 1"),
                    ));
                }
            }
            let Some(w) = complete_table(values, &format!("{path}.values"), out) else {
                return;
            };
            if out.len() == before && !renormalize {
                let sum: f64 = w.iter().sum();
                if (sum - 1.0).abs() > crate::ahp::WEIGHT_SUM_TOLERANCE {
                    out.push(Violation::new(
                        format!("{path}.values"),
                        format!(
                            "weights sum to {sum}; set \"renormalize\": true or fix the values"
                        ),
                    ));
                }
            }
        }
        WeightSource::Matrix { matrix } => match ComparisonMatrix::from_rows(matrix.clone()) {
            Err(e) => out.push(Violation::new(format!("{path}.matrix"), e.to_string())),
            Ok(m) if m.n() != CRITERIA_COUNT => out.push(Violation::new(
                format!("{path}.matrix"),
                format!(
                    "expected {CRITERIA_COUNT}×{CRITERIA_COUNT}, got {}×{}",
                    m.n(),
                    m.n()
                ),
            )),
            Ok(m) => {
                for v in validate_matrix(&m).violations {
                    out.push(Violation::new(format!("{path}.matrix"), v.to_string()));
                }
            }
        },
    }
}

impl ScenarioConfig {
    /// Collects every violated constraint.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.networks.is_empty() {
            out.push(Violation::new(
                "networks",
                "at least one network is required",
            ));
        }
        let mut ids = HashSet::new();
        for (i, net) in self.networks.iter().enumerate() {
            let path = format!("networks[{i}]");
            if net.id.is_empty() {
                out.push(Violation::new(format!("{path}.id"), "must not be empty"));
            }
            if !ids.insert(net.id.as_str()) {
                out.push(Violation::new(
                    format!("{path}.id"),
                    format!("duplicate id '{}'", net.id),
                ));
            }
            if let Some(bounds) = &net.bounds {
                for (c, b) in bounds {
                    if !b.is_valid() {
                        out.push(Violation::new(
                            format!("{path}.bounds.{c}"),
                            format!("need 0 <= lb <= ub <= 1, got lb {} ub {}", b.lb, b.ub),
                        ));
                    }
                }
                complete_table(bounds, &format!("{path}.bounds"), &mut out);
            }
            if let Some(raw) = &net.raw_attributes {
                if net.bounds.is_some() {
                    out.push(Violation::new(
                        format!("{path}.raw_attributes"),
                        "give either bounds or raw_attributes, not both",
                    ));
                }
                for (c, v) in raw {
                    if !(v.is_finite() && *v >= 0.0) {
                        out.push(Violation::new(
                            format!("{path}.raw_attributes.{c}"),
                            format!("value {v} must be >= 0"),
                        ));
                    }
                    if !self.attribute_specs.contains_key(c) {
                        out.push(Violation::new(
                            format!("{path}.raw_attributes.{c}"),
                            "no attribute_specs entry for this criterion",
                        ));
                    }
                }
                complete_table(raw, &format!("{path}.raw_attributes"), &mut out);
            }
        }
        for (c, max) in &self.attribute_specs {
            if !(max.is_finite() && *max > 0.0) {
                out.push(Violation::new(
                    format!("attribute_specs.{c}"),
                    format!("max value {max} must be positive"),
                ));
            }
        }

        check_weight_source(&self.weights, "weights", &mut out);

        match &self.current_network {
            None => out.push(Violation::new("current_network", "required")),
            Some(id) if !ids.contains(id.as_str()) => out.push(Violation::new(
                "current_network",
                format!("unknown network '{id}'"),
            )),
            Some(_) => {}
        }
        for (id, m) in &self.measurements {
            if !ids.contains(id.as_str()) {
                out.push(Violation::new(
                    format!("measurements.{id}"),
                    "unknown network",
                ));
            }
            if !m.is_finite() {
                out.push(Violation::new(
                    format!("measurements.{id}"),
                    "all values must be finite",
                ));
            }
        }
        if !(self.initiation_threshold > 0.0 && self.initiation_threshold < 1.0) {
            out.push(Violation::new(
                "initiation_threshold",
                format!("must lie in (0, 1), got {}", self.initiation_threshold),
            ));
        }
        for v in self.ga.violations() {
            out.push(Violation::new("ga", v));
        }
        for (t, trigger) in self.triggers.iter().enumerate() {
            let path = format!("triggers[{t}]");
            match trigger {
                TriggerEvent::NewAttachmentPoint { networks } => {
                    if networks.is_empty() {
                        out.push(Violation::new(
                            format!("{path}.networks"),
                            "list at least one network",
                        ));
                    }
                    for (k, id) in networks.iter().enumerate() {
                        match self.networks.iter().find(|n| n.id == *id) {
                            None => out.push(Violation::new(
                                format!("{path}.networks[{k}]"),
                                format!("unknown network '{id}'"),
                            )),
                            Some(n)
                                if n.technology == Technology::Wimax
                                    && !self.measurements.contains_key(id) =>
                            {
                                out.push(Violation::new(
                                    format!("{path}.networks[{k}]"),
                                    format!("candidate '{id}' has no measurements"),
                                ))
                            }
                            Some(_) => {}
                        }
                    }
                }
                TriggerEvent::ProfileChange { weights } => {
                    check_weight_source(weights, &format!("{path}.weights"), &mut out)
                }
                TriggerEvent::SignalDegradation { rssi } => {
                    if rssi.is_some_and(|r| !r.is_finite()) {
                        out.push(Violation::new(format!("{path}.rssi"), "must be finite"));
                    }
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(ScenarioError::Validation(v))
        }
    }

    pub fn current_network(&self) -> &str {
        self.current_network.as_deref().unwrap_or_default()
    }

    pub fn network_index(&self, id: &str) -> Option<usize> {
        self.networks.iter().position(|n| n.id == id)
    }

    /// Profiles in config order. Raw attributes become point bounds.
    pub fn profiles(&self) -> Result<Vec<NetworkProfile>, ScenarioError> {
        self.networks.iter().map(|n| self.profile_of(n)).collect()
    }

    pub fn profile(&self, id: &str) -> Option<Result<NetworkProfile, ScenarioError>> {
        self.networks
            .iter()
            .find(|n| n.id == id)
            .map(|n| self.profile_of(n))
    }

    fn profile_of(&self, net: &NetworkEntry) -> Result<NetworkProfile, ScenarioError> {
        let invalid = |m: String| {
            ScenarioError::Validation(vec![Violation::new(format!("networks.{}", net.id), m)])
        };
        let bounds = match (&net.bounds, &net.raw_attributes) {
            (Some(b), _) => {
                let pairs =
                    Criterion::ALL.map(|c| b.get(&c).copied().unwrap_or(Bound::new(1.0, 0.0)));
                Some(CriterionBounds::new(pairs).map_err(|e| invalid(e.to_string()))?)
            }
            (None, Some(raw)) => {
                let mut points = [Bound::point(0.0); CRITERIA_COUNT];
                for c in Criterion::ALL {
                    let max = self.attribute_specs.get(&c).copied().unwrap_or(f64::NAN);
                    let spec = AttributeSpec::new(c, max).map_err(|e| invalid(e.to_string()))?;
                    let value = raw.get(&c).copied().unwrap_or(f64::NAN);
                    let mu =
                        normalize_attribute(value, &spec).map_err(|e| invalid(e.to_string()))?;
                    points[c.index()] = Bound::point(mu);
                }
                Some(CriterionBounds::new(points).map_err(|e| invalid(e.to_string()))?)
            }
            (None, None) => None,
        };
        Ok(NetworkProfile::new(net.id.clone(), net.technology, bounds))
    }
}

/// Turns a weight source into a checked weight vector. Matrix sources go
/// through the AHP eigenvector; inconsistent matrices produce a warning.
pub fn resolve_weights(source: &WeightSource) -> Result<ResolvedWeights, ScenarioError> {
    let mut violations = Vec::new();
    check_weight_source(source, "weights", &mut violations);
    if !violations.is_empty() {
        return Err(ScenarioError::Validation(violations));
    }
    let fail = |m: String| ScenarioError::Validation(vec![Violation::new("weights", m)]);
    match source {
        WeightSource::Fixed {
            values,
            renormalize,
        } => {
            let raw: Vec<f64> = Criterion::ALL.iter().map(|c| values[c]).collect();
            let weights = if *renormalize {
                normalize_weights(&raw)
            } else {
                WeightVector::new(raw)
            }
            .map_err(|e| fail(e.to_string()))?;
            Ok(ResolvedWeights {
                weights,
                eigen: None,
                warnings: Vec::new(),
            })
        }
        WeightSource::Matrix { matrix } => {
            let m = ComparisonMatrix::from_rows(matrix.clone()).map_err(|e| fail(e.to_string()))?;
            let (weights, eigen) = derive_weights(&m).map_err(|e| fail(e.to_string()))?;
            let mut warnings = Vec::new();
            if !eigen.is_consistent() {
                warnings.push(format!(
                    "comparison matrix consistency ratio {:.4} exceeds {}",
                    eigen.consistency_ratio,
                    crate::ahp::CONSISTENCY_LIMIT
                ));
            }
            Ok(ResolvedWeights {
                weights,
                eigen: Some(eigen),
                warnings,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{REFERENCE_SCENARIO_JSON, REFERENCE_WEIGHTS_RAW, WIMAX_2_BOUNDS};

    fn reference() -> ScenarioConfig {
        parse_scenario(REFERENCE_SCENARIO_JSON).unwrap()
    }

    #[test]
    fn bundled_fixture_loads() {
        let cfg = reference();
        assert_eq!(cfg.current_network(), "UMTS_1");
        assert_eq!(cfg.networks.len(), 5);
        assert_eq!(cfg.initiation_threshold, 0.65);
        assert_eq!(
            cfg.ga,
            GaConfig {
                rng_seed: cfg.ga.rng_seed,
                ..GaConfig::default()
            }
        );
        let profiles = cfg.profiles().unwrap();
        let w2 = profiles.iter().find(|p| p.id == "WiMAX_2").unwrap();
        let got: Vec<(f64, f64)> = w2
            .bounds
            .as_ref()
            .unwrap()
            .as_slice()
            .iter()
            .map(|b| (b.lb, b.ub))
            .collect();
        assert_eq!(got, WIMAX_2_BOUNDS.to_vec());
        assert!(profiles.iter().filter(|p| p.bounds.is_none()).count() == 3);
        match &cfg.weights {
            WeightSource::Fixed {
                values,
                renormalize,
            } => {
                assert!(*renormalize);
                let raw: Vec<f64> = Criterion::ALL.iter().map(|c| values[c]).collect();
                assert_eq!(raw, REFERENCE_WEIGHTS_RAW.to_vec());
            }
            other => panic!("unexpected weights {other:?}"),
        }
        let resolved = resolve_weights(&cfg.weights).unwrap();
        assert_eq!(resolved.weights, crate::fixtures::reference_weights());
    }

    #[test]
    fn inverted_bound_names_the_criterion() {
        let text = REFERENCE_SCENARIO_JSON
            .replace("\"data_rate\": [0.2, 0.9]", "\"data_rate\": [0.9, 0.2]");
        assert_ne!(text, REFERENCE_SCENARIO_JSON);
        match parse_scenario(&text) {
            Err(ScenarioError::Validation(v)) => {
                assert!(
                    v.iter()
                        .any(|x| x.path.ends_with("bounds.data_rate")
                            && x.message.contains("lb 0.9")),
                    "{v:?}"
                );
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn missing_current_network() {
        let mut v: serde_json::Value = serde_json::from_str(REFERENCE_SCENARIO_JSON).unwrap();
        v.as_object_mut().unwrap().remove("current_network");
        match parse_scenario(&v.to_string()) {
            Err(ScenarioError::Validation(v)) => {
                assert!(v.iter().any(|x| x.path == "current_network"))
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn reports_every_violation() {
        let mut v: serde_json::Value = serde_json::from_str(REFERENCE_SCENARIO_JSON).unwrap();
        v["current_network"] = "nowhere".into();
        v["initiation_threshold"] = 1.5.into();
        v["ga"]["elite_count"] = 40.into();
        v["measurements"]["ghost"] =
            serde_json::json!({"rssi": -70.0, "data_rate": 1.0, "coverage": 1.0, "latency": 1.0});
        v["triggers"][0]["networks"][0] = "ghost_2".into();
        match parse_scenario(&v.to_string()) {
            Err(ScenarioError::Validation(list)) => {
                let paths: Vec<&str> = list.iter().map(|x| x.path.as_str()).collect();
                for p in [
                    "current_network",
                    "initiation_threshold",
                    "ga",
                    "measurements.ghost",
                    "triggers[0].networks[0]",
                ] {
                    assert!(paths.contains(&p), "missing {p} in {paths:?}");
                }
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unnormalized_fixed_weights_rejected() {
        let mut v: serde_json::Value = serde_json::from_str(REFERENCE_SCENARIO_JSON).unwrap();
        v["weights"]["renormalize"] = false.into();
        let err = parse_scenario(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("sum to"), "{err}");
    }

    #[test]
    fn missing_criterion_in_bounds() {
        let mut v: serde_json::Value = serde_json::from_str(REFERENCE_SCENARIO_JSON).unwrap();
        v["networks"][3]["bounds"]
            .as_object_mut()
            .unwrap()
            .remove("security");
        let err = parse_scenario(&v.to_string()).unwrap_err();
        assert!(
            err.to_string()
                .contains("networks[3].bounds: missing criteria: security"),
            "{err}"
        );
    }

    #[test]
    fn matrix_weights_resolve() {
        let w = [0.05, 0.3, 0.05, 0.15, 0.1, 0.05, 0.05, 0.05, 0.2];
        let rows = ComparisonMatrix::from_weights(&w).unwrap().rows();
        let src = WeightSource::Matrix { matrix: rows };
        let r = resolve_weights(&src).unwrap();
        for (a, b) in r.weights.as_slice().iter().zip(w) {
            assert!((a - b).abs() < 1e-9);
        }
        assert!(r.warnings.is_empty());
        let bad = WeightSource::Matrix {
            matrix: vec![vec![1.0; 3]; 3],
        };
        assert!(resolve_weights(&bad).is_err());
    }

    #[test]
    fn raw_attributes_become_point_bounds() {
        let text = r#"{
            "networks": [
                {"id": "W", "technology": "WiMAX", "bounds": null,
                 "raw_attributes": {"signal_strength": 5, "data_rate": 30, "coverage_area": 10,
                    "network_latency": 50, "reliability": 9, "security": 8, "battery_power": 2,
                    "mobile_velocity": 60, "service_cost": 3}}
            ],
            "attribute_specs": {"signal_strength": 10, "data_rate": 60, "coverage_area": 50,
                "network_latency": 200, "reliability": 10, "security": 10, "battery_power": 4,
                "mobile_velocity": 120, "service_cost": 10},
            "weights": {"kind": "fixed", "values": {"signal_strength": 1, "data_rate": 1, "coverage_area": 1,
                "network_latency": 1, "reliability": 1, "security": 1, "battery_power": 1,
                "mobile_velocity": 1, "service_cost": 1}, "renormalize": true},
            "current_network": "W"
        }"#;
        let cfg = parse_scenario(text).unwrap();
        let p = cfg.profile("W").unwrap().unwrap();
        let b = p.bounds.unwrap();
        assert_eq!(b.get(Criterion::DataRate), Bound::point(0.5));
        assert_eq!(b.get(Criterion::NetworkLatency), Bound::point(0.75));
        assert_eq!(b.get(Criterion::ServiceCost).lb, 1.0 - 0.3);
    }
}
