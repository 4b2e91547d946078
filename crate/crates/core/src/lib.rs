//! Vertical handoff decisions between cellular (GPRS, UMTS) and WiMAX
//! networks.
//!
//! A Mamdani fuzzy system turns measurements into a handoff factor
//! ([`initiation`]). When the factor crosses the threshold, candidates are
//! scored by a weighted sum of criterion memberships ([`ansf`]) with weights
//! from pairwise comparisons ([`ahp`]), and the memberships inside each
//! network's bounds are tuned by a genetic algorithm ([`ga`]).

pub mod ahp;
pub mod ansf;
pub mod fis;
pub mod fixtures;
pub mod ga;
pub mod initiation;
pub mod pipeline;
pub mod scenario;
pub mod trace;

pub use ahp::{derive_weights, ComparisonMatrix, EigenResult, WeightVector};
pub use ansf::{Criterion, CriterionBounds, NetworkProfile, SelectionOutcome, Technology};
pub use ga::{run_ga, GaConfig, GaResult, SearchBox};
pub use initiation::{evaluate_initiation, HandoffDirection, InitiationInputs};
pub use pipeline::{run_pipeline, DecisionTrace, PipelineOptions};
pub use scenario::{load_scenario, ScenarioConfig};
pub use trace::{emit_trace, TraceFormat};
