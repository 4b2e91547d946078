//! Trigger-driven decision loop: initiation first, then GA-backed network
//! selection only when some candidate crosses the threshold.

use crate::ahp::{AhpError, WeightVector};
use crate::ansf::{
    handoff_decision, rank_scores, select_network, AnsfError, CriterionBounds, MembershipVector,
    NetworkProfile, RankedNetwork, SelectionOutcome, Technology,
};
use crate::ga::{run_ga, GaConfig, GaError, SearchBox};
use crate::initiation::{evaluate_initiation, HandoffDirection, InitiationError, InitiationInputs};
use crate::scenario::{resolve_weights, ScenarioConfig, ScenarioError, TriggerEvent};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Initiation(#[from] InitiationError),
    #[error(transparent)]
    Ga(#[from] GaError),
    #[error(transparent)]
    Ansf(#[from] AnsfError),
    #[error(transparent)]
    Ahp(#[from] AhpError),
    #[error("unknown network '{0}'")]
    UnknownNetwork(String),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PipelineOptions {
    /// Master seed; falls back to `ga.rng_seed` from the scenario.
    pub seed: Option<u64>,
    /// Overrides `initiation_threshold`.
    pub threshold: Option<f64>,
    pub record_timings: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitiationRecord {
    pub network: String,
    pub technology: Technology,
    pub direction: Option<HandoffDirection>,
    /// Network whose measurements fed the FIS.
    pub measurement_source: Option<String>,
    pub inputs: Option<InitiationInputs>,
    pub factor: Option<f64>,
    pub initiate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Current,
    Candidate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationRecord {
    pub network: String,
    pub role: Role,
    pub seed: u64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub best_fitness: f64,
    pub memberships: Vec<f64>,
    pub generations_run: usize,
    pub converged_at: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub initiation_ms: f64,
    pub selection_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggerRecord {
    pub trigger_index: usize,
    pub trigger: String,
    pub current_network: String,
    pub seed: u64,
    pub threshold: f64,
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub consistency_ratio: Option<f64>,
    pub notes: Vec<String>,
    pub initiation: Vec<InitiationRecord>,
    pub initiated: bool,
    pub ga: GaConfig,
    pub optimizations: Vec<OptimizationRecord>,
    pub current_score: Option<f64>,
    pub ranking: Vec<RankedNetwork>,
    pub decision: SelectionOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DecisionTrace {
    pub records: Vec<TriggerRecord>,
}

impl DecisionTrace {
    pub fn final_network<'a>(&'a self, initial: &'a str) -> &'a str {
        self.records
            .iter()
            .rev()
            .find_map(|r| match &r.decision {
                SelectionOutcome::Handoff { target, .. } => Some(target.as_str()),
                SelectionOutcome::Stay => None,
            })
            .unwrap_or(initial)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// GA seed for the network at `index` in the scenario's network list.
pub fn network_seed(master: u64, index: usize) -> u64 {
    splitmix64(master ^ index as u64)
}

fn initiate_one(
    current: &NetworkProfile,
    target: &NetworkProfile,
    measurements: &BTreeMap<String, InitiationInputs>,
    threshold: f64,
) -> Result<InitiationRecord, PipelineError> {
    let mut rec = InitiationRecord {
        network: target.id.clone(),
        technology: target.technology,
        direction: None,
        measurement_source: None,
        inputs: None,
        factor: None,
        initiate: false,
        note: None,
    };
    let (direction, source) = match (
        current.technology.is_cellular(),
        target.technology.is_cellular(),
    ) {
        (true, false) => (HandoffDirection::UmtsToWimax, target),
        (false, true) => (HandoffDirection::WimaxToUmts, current),
        _ => {
            rec.note = Some(format!(
                "{} and {} are in the same family",
                current.technology, target.technology
            ));
            return Ok(rec);
        }
    };
    rec.direction = Some(direction);
    rec.measurement_source = Some(source.id.clone());
    let Some(inputs) = measurements.get(&source.id) else {
        rec.note = Some(format!("no measurements for {}", source.id));
        return Ok(rec);
    };
    let d = evaluate_initiation(inputs, direction, threshold)?;
    rec.inputs = Some(*inputs);
    rec.factor = Some(d.factor);
    rec.initiate = d.initiate;
    Ok(rec)
}

struct Optimizer<'a> {
    config: &'a ScenarioConfig,
    weights: &'a WeightVector,
    ga: &'a GaConfig,
    master: u64,
}

impl Optimizer<'_> {
    fn run(
        &self,
        id: &str,
        role: Role,
        bounds: &CriterionBounds,
    ) -> Result<OptimizationRecord, PipelineError> {
        let index = self
            .config
            .network_index(id)
            .ok_or_else(|| PipelineError::UnknownNetwork(id.into()))?;
        let seed = network_seed(self.master, index);
        let search = SearchBox::from(bounds);
        let res = run_ga(self.weights, &search, &self.ga.clone().with_seed(seed))?;
        Ok(OptimizationRecord {
            network: id.to_string(),
            role,
            seed,
            lower: search.lower().to_vec(),
            upper: search.upper().to_vec(),
            best_fitness: res.best_fitness,
            memberships: res.best.genes,
            generations_run: res.generations_run,
            converged_at: res.converged_at,
        })
    }
}

/// Runs every trigger in order. A handoff moves the terminal to the target
/// before the next trigger is processed.
pub fn run_pipeline(
    config: &ScenarioConfig,
    options: &PipelineOptions,
) -> Result<DecisionTrace, PipelineError> {
    config.validate()?;
    let threshold = options.threshold.unwrap_or(config.initiation_threshold);
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(InitiationError::InvalidThreshold(threshold).into());
    }
    let master = options.seed.unwrap_or(config.ga.rng_seed);
    let ga = config.ga.clone().with_seed(master);
    let profiles = config.profiles()?;
    let lookup = |id: &str| {
        profiles
            .iter()
            .find(|p| p.id == id)
            .ok_or_else(|| PipelineError::UnknownNetwork(id.into()))
    };
    let mut resolved = resolve_weights(&config.weights)?;
    let mut measurements = config.measurements.clone();
    let mut current = config.current_network().to_string();
    let mut records = Vec::with_capacity(config.triggers.len());

    for (trigger_index, trigger) in config.triggers.iter().enumerate() {
        let mut notes = Vec::new();
        match trigger {
            TriggerEvent::ProfileChange { weights } => resolved = resolve_weights(weights)?,
            TriggerEvent::SignalDegradation { rssi: Some(rssi) } => {
                match measurements.get_mut(&current) {
                    Some(m) => m.rssi = *rssi,
                    None => notes.push(format!(
                        "no measurements for {current}; rssi update ignored"
                    )),
                }
            }
            _ => {}
        }
        notes.extend(resolved.warnings.iter().cloned());

        let current_profile = lookup(&current)?;
        let mut candidates: Vec<&NetworkProfile> = Vec::new();
        match trigger {
            TriggerEvent::NewAttachmentPoint { networks } => {
                for id in networks {
                    if *id == current {
                        notes.push(format!("{id} is the current network"));
                    } else if !candidates.iter().any(|c| c.id == *id) {
                        candidates.push(lookup(id)?);
                    }
                }
            }
            _ => candidates.extend(profiles.iter().filter(|p| p.id != current)),
        }

        let started = Instant::now();
        let initiation = candidates
            .iter()
            .map(|c| initiate_one(current_profile, c, &measurements, threshold))
            .collect::<Result<Vec<_>, _>>()?;
        let initiation_time = started.elapsed();
        let initiated = initiation.iter().any(|r| r.initiate);

        let started = Instant::now();
        let mut optimizations = Vec::new();
        let mut current_score = None;
        let mut ranking = Vec::new();
        let mut decision = SelectionOutcome::Stay;
        if initiated {
            let opt = Optimizer {
                config,
                weights: &resolved.weights,
                ga: &ga,
                master,
            };
            let baseline = match &current_profile.bounds {
                Some(b) => {
                    let rec = opt.run(&current, Role::Current, b)?;
                    let score = rec.best_fitness;
                    optimizations.push(rec);
                    score
                }
                None => {
                    notes.push(format!(
                        "{current} has no membership bounds; baseline score 0"
                    ));
                    0.0
                }
            };
            current_score = Some(baseline);

            let mut eligible = Vec::new();
            for r in initiation.iter().filter(|r| r.initiate) {
                let p = lookup(&r.network)?;
                if p.bounds.is_some() {
                    eligible.push(p.clone());
                } else {
                    notes.push(format!("{} has no membership bounds; not ranked", p.id));
                }
            }
            if eligible.is_empty() {
                notes.push("no rankable candidate".to_string());
            } else {
                ranking = select_network(
                    &eligible,
                    &resolved.weights,
                    |p| -> Result<MembershipVector, PipelineError> {
                        let bounds = p.bounds.as_ref().expect("filtered above");
                        let rec = opt.run(&p.id, Role::Candidate, bounds)?;
                        let mu = MembershipVector::new(rec.memberships.clone())?;
                        optimizations.push(rec);
                        Ok(mu)
                    },
                )?;
            }
            decision = handoff_decision(baseline, &ranking);
        }
        let selection_time = started.elapsed();

        let record = TriggerRecord {
            trigger_index,
            trigger: trigger.kind().to_string(),
            current_network: current.clone(),
            seed: master,
            threshold,
            weights: resolved.weights.as_slice().to_vec(),
            consistency_ratio: resolved.eigen.as_ref().map(|e| e.consistency_ratio),
            notes,
            initiation,
            initiated,
            ga: ga.clone(),
            optimizations,
            current_score,
            ranking,
            decision,
            timings: options.record_timings.then_some(Timings {
                initiation_ms: initiation_time.as_secs_f64() * 1e3,
                selection_ms: selection_time.as_secs_f64() * 1e3,
            }),
        };
        if let SelectionOutcome::Handoff { target, .. } = &record.decision {
            current = target.clone();
        }
        records.push(record);
    }
    Ok(DecisionTrace { records })
}

/// Recomputes a record's decision from the inputs it stores.
pub fn replay_record(record: &TriggerRecord) -> Result<SelectionOutcome, PipelineError> {
    let weights = WeightVector::new(record.weights.clone())?;
    let mut initiated = false;
    for r in &record.initiation {
        if let (Some(direction), Some(inputs)) = (r.direction, r.inputs) {
            initiated |= evaluate_initiation(&inputs, direction, record.threshold)?.initiate;
        }
    }
    if !initiated {
        return Ok(SelectionOutcome::Stay);
    }
    let mut current_score = 0.0;
    let mut scores = Vec::new();
    for o in &record.optimizations {
        let search = SearchBox::new(o.lower.clone(), o.upper.clone())?;
        let res = run_ga(&weights, &search, &record.ga.clone().with_seed(o.seed))?;
        match o.role {
            Role::Current => current_score = res.best_fitness,
            Role::Candidate => scores.push(RankedNetwork {
                network: o.network.clone(),
                score: res.best_fitness,
            }),
        }
    }
    Ok(handoff_decision(current_score, &rank_scores(scores)))
}
