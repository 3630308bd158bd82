//! The mining pipeline: from extracted events to coincidences,
//! situations, processes, scenarios, forks and triggers.
//!
//! Every stage is a [`Stage`] registered by name in a [`StageRegistry`].
//! Mined nodes are keyed by their content, so running the pipeline again
//! on its own output finds the same nodes instead of duplicating them.

mod appearances;
mod chain;
mod cluster;
mod itemsets;
mod roles;
mod scenarios;
mod situations;
mod triggers;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::knowledge_graph::{Direction, EdgeFilter, EdgeKind, Graph, GraphError, ThingId, ThingKind};

pub use appearances::{anti_unify, Generalization, UnifyAppearances};
pub use chain::{maximal_chains, ChainCoincidences, ChainNode};
pub use cluster::{cluster_times, ClusterEvents};
pub use itemsets::{closed_itemsets, ClosedItemset};
pub use roles::{DifferentiateActors, ScopeRoles};
pub use scenarios::{detect_forks, DetectForks, Fork, ScenarioModel, UnifyScenarios};
pub use situations::UnifySituations;
pub use triggers::{score_candidates, DifferentiateTriggers, TriggerScore};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MiningConfig {
    /// Events closer than this many ticks (or overlapping) coincide.
    pub coincidence_window: i64,
    /// Largest start-after-end gap between consecutive process steps.
    pub chain_max_gap: i64,
    pub chain_requires_shared_actor: bool,
    pub min_support: usize,
    pub fork_epsilon: f64,
    pub trigger_min_shift: f64,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig {
            coincidence_window: 1,
            chain_max_gap: 1,
            chain_requires_shared_actor: true,
            min_support: 2,
            fork_epsilon: 0.2,
            trigger_min_shift: 0.2,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<(), MiningError> {
        let bad = |m: &str| Err(MiningError::Config(m.to_string()));
        if self.coincidence_window < 0 {
            return bad("coincidence_window must be >= 0");
        }
        if self.chain_max_gap < 1 {
            return bad("chain_max_gap must be >= 1");
        }
        if self.min_support < 1 {
            return bad("min_support must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.fork_epsilon) {
            return bad("fork_epsilon must lie in [0, 1]");
        }
        if !(self.trigger_min_shift > 0.0 && self.trigger_min_shift <= 1.0) {
            return bad("trigger_min_shift must lie in (0, 1]");
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum MiningError {
    #[error("invalid mining config: {0}")]
    Config(String),
    #[error("stage {stage} failed: {source}")]
    Stage { stage: &'static str, source: GraphError },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ActorCandidate {
    pub appearance: String,
    pub role: String,
    pub actor: String,
    pub count: usize,
    pub frequency: f64,
    /// Whether this actor is the most frequent one for the role.
    pub best: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioEntry {
    pub id: u64,
    pub situations: Vec<String>,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchEntry {
    pub situation: String,
    pub count: usize,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForkEntry {
    pub prefix: Vec<String>,
    pub support: usize,
    pub branches: Vec<BranchEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggerEntry {
    pub fork: usize,
    pub thing: String,
    pub kind: String,
    pub support: usize,
    pub score: f64,
    pub base: Vec<f64>,
    pub shifted: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MiningReport {
    /// Items found by each stage.
    pub stages: BTreeMap<String, usize>,
    pub candidates: Vec<ActorCandidate>,
    pub scenarios: Vec<ScenarioEntry>,
    pub forks: Vec<ForkEntry>,
    pub triggers: Vec<TriggerEntry>,
}

impl MiningReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// State handed from stage to stage.
pub struct PipelineContext<'g> {
    pub graph: &'g mut Graph,
    pub config: &'g MiningConfig,
    pub model: Option<ScenarioModel>,
    pub forks: Vec<Fork>,
    pub report: MiningReport,
}

pub trait Stage: Send + Sync {
    fn name(&self) -> &'static str;
    /// Runs the stage and returns how many items it found.
    fn run(&self, ctx: &mut PipelineContext<'_>) -> Result<usize, GraphError>;
}

/// Stages in execution order, addressable by name.
pub struct StageRegistry {
    stages: Vec<Box<dyn Stage>>,
}

impl StageRegistry {
    pub fn empty() -> Self {
        StageRegistry { stages: Vec::new() }
    }

    /// The nine stages in pipeline order.
    pub fn standard() -> Self {
        let mut r = StageRegistry::empty();
        r.register(Box::new(ScopeRoles));
        r.register(Box::new(DifferentiateActors));
        r.register(Box::new(UnifyAppearances));
        r.register(Box::new(ClusterEvents));
        r.register(Box::new(UnifySituations));
        r.register(Box::new(ChainCoincidences));
        r.register(Box::new(UnifyScenarios));
        r.register(Box::new(DetectForks));
        r.register(Box::new(DifferentiateTriggers));
        r
    }

    pub fn register(&mut self, stage: Box<dyn Stage>) {
        self.stages.retain(|s| s.name() != stage.name());
        self.stages.push(stage);
    }

    pub fn get(&self, name: &str) -> Option<&dyn Stage> {
        self.stages.iter().find(|s| s.name() == name).map(|s| s.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.stages.iter().map(|s| s.name()).collect()
    }

    pub fn run(&self, graph: &mut Graph, config: &MiningConfig) -> Result<MiningReport, MiningError> {
        config.validate()?;
        let mut ctx = PipelineContext { graph, config, model: None, forks: Vec::new(), report: MiningReport::default() };
        for stage in &self.stages {
            let found = stage.run(&mut ctx).map_err(|source| MiningError::Stage { stage: stage.name(), source })?;
            ctx.report.stages.insert(stage.name().to_string(), found);
        }
        Ok(ctx.report)
    }
}

/// Runs the nine standard stages over `graph`.
pub fn run_pipeline(graph: &mut Graph, config: &MiningConfig) -> Result<MiningReport, MiningError> {
    StageRegistry::standard().run(graph, config)
}


/// The appearance an event directly instantiates.
pub(crate) fn event_appearance(graph: &Graph, event: ThingId) -> Option<ThingId> {
    graph
        .neighbors(event, &EdgeFilter::Is, Direction::Out)
        .into_iter()
        .find(|&a| graph.kind_of(a) == Some(ThingKind::Appearance))
}

/// Events directly instantiating `appearance`, by id.
pub(crate) fn direct_events(graph: &Graph, appearance: ThingId) -> Vec<ThingId> {
    let mut events: Vec<ThingId> = graph
        .neighbors(appearance, &EdgeFilter::Is, Direction::In)
        .into_iter()
        .filter(|&v| graph.kind_of(v) == Some(ThingKind::Event))
        .collect();
    events.sort();
    events
}

/// `(role, actor)` pairs bound by an event.
pub(crate) fn event_bindings(graph: &Graph, event: ThingId) -> Vec<(String, ThingId)> {
    graph
        .out_edges(event)
        .filter_map(|e| match &e.kind {
            EdgeKind::Has(role) if graph.kind_of(e.to) == Some(ThingKind::Actor) => Some((role.clone(), e.to)),
            _ => None,
        })
        .collect()
}

pub(crate) fn display_name(graph: &Graph, id: ThingId) -> String {
    graph.name_of(id).map_or_else(|| format!("#{id}"), str::to_string)
}
