use std::collections::BTreeMap;

use super::{display_name, BranchEntry, ForkEntry, PipelineContext, ScenarioEntry, Stage};
use crate::knowledge_graph::{Direction, Edge, EdgeFilter, Graph, GraphError, SetKind, ThingId, ThingKind};

/// A process with each of its coincidences and the situation it was lifted
/// to, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedProcess {
    pub process: ThingId,
    pub steps: Vec<(ThingId, Option<ThingId>)>,
}

impl LiftedProcess {
    pub fn situations(&self) -> Vec<ThingId> {
        self.steps.iter().filter_map(|s| s.1).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode {
    /// `None` only for the root.
    pub situation: Option<ThingId>,
    pub parent: Option<usize>,
    pub depth: usize,
    pub children: BTreeMap<ThingId, usize>,
    /// Indices into [`ScenarioModel::processes`] of processes passing here.
    pub processes: Vec<usize>,
}

impl TreeNode {
    pub fn count(&self) -> usize {
        self.processes.len()
    }
}

/// Prefix tree over the situation sequences of processes.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioModel {
    pub nodes: Vec<TreeNode>,
    pub processes: Vec<LiftedProcess>,
}

impl ScenarioModel {
    pub fn build(processes: Vec<LiftedProcess>) -> Self {
        let root = TreeNode { situation: None, parent: None, depth: 0, children: BTreeMap::new(), processes: Vec::new() };
        let mut nodes = vec![root];
        for (k, p) in processes.iter().enumerate() {
            let mut at = 0;
            nodes[0].processes.push(k);
            for s in p.situations() {
                at = match nodes[at].children.get(&s) {
                    Some(&child) => child,
                    None => {
                        let child = nodes.len();
                        let depth = nodes[at].depth + 1;
                        nodes.push(TreeNode { situation: Some(s), parent: Some(at), depth, children: BTreeMap::new(), processes: Vec::new() });
                        nodes[at].children.insert(s, child);
                        child
                    }
                };
                nodes[at].processes.push(k);
            }
        }
        ScenarioModel { nodes, processes }
    }

    /// Model over bare situation sequences, with placeholder process and
    /// coincidence ids.
    pub fn from_sequences(sequences: &[Vec<ThingId>]) -> Self {
        let processes = sequences
            .iter()
            .enumerate()
            .map(|(k, seq)| LiftedProcess {
                process: ThingId(k as u64),
                steps: seq.iter().enumerate().map(|(i, &s)| (ThingId(i as u64), Some(s))).collect(),
            })
            .collect();
        Self::build(processes)
    }

    /// Situations on the path from the root to `node`.
    pub fn path(&self, node: usize) -> Vec<ThingId> {
        let mut out = Vec::new();
        let mut at = node;
        while let Some(s) = self.nodes[at].situation {
            out.push(s);
            at = self.nodes[at].parent.expect("non-root nodes have parents");
        }
        out.reverse();
        out
    }

    /// Frequent closed prefixes: non-root nodes passed by at least
    /// `min_support` processes none of whose children is passed by all of
    /// them. Sorted by path.
    pub fn scenario_nodes(&self, min_support: usize) -> Vec<usize> {
        let mut out: Vec<usize> = (1..self.nodes.len())
            .filter(|&n| {
                let node = &self.nodes[n];
                node.count() >= min_support && node.children.values().all(|&c| self.nodes[c].count() < node.count())
            })
            .collect();
        out.sort_by_key(|&n| self.path(n));
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub situation: ThingId,
    pub node: usize,
    pub count: usize,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fork {
    pub node: usize,
    pub prefix: Vec<ThingId>,
    pub branches: Vec<Branch>,
}

/// Non-root tree nodes with at least two children passed by `min_support`
/// processes each, whose probabilities (renormalized over those children)
/// differ by at most `epsilon`. Sorted by prefix.
pub fn detect_forks(model: &ScenarioModel, min_support: usize, epsilon: f64) -> Vec<Fork> {
    let mut forks = Vec::new();
    for (n, node) in model.nodes.iter().enumerate().skip(1) {
        let frequent: Vec<(ThingId, usize)> = node
            .children
            .iter()
            .filter(|(_, &c)| model.nodes[c].count() >= min_support)
            .map(|(&s, &c)| (s, c))
            .collect();
        if frequent.len() < 2 {
            continue;
        }
        let total: usize = frequent.iter().map(|&(_, c)| model.nodes[c].count()).sum();
        let branches: Vec<Branch> = frequent
            .into_iter()
            .map(|(situation, c)| {
                let count = model.nodes[c].count();
                Branch { situation, node: c, count, p: count as f64 / total as f64 }
            })
            .collect();
        let max = branches.iter().map(|b| b.p).fold(f64::MIN, f64::max);
        let min = branches.iter().map(|b| b.p).fold(f64::MAX, f64::min);
        if max - min <= epsilon {
            forks.push(Fork { node: n, prefix: model.path(n), branches });
        }
    }
    forks.sort_by(|a, b| a.prefix.cmp(&b.prefix));
    forks
}

/// Support of a situation (coincidences generalized by it) and its size.
fn generality(graph: &Graph, s: ThingId) -> (usize, usize) {
    let support = graph
        .neighbors(s, &EdgeFilter::Is, Direction::In)
        .into_iter()
        .filter(|&c| graph.kind_of(c) == Some(ThingKind::Coincidence))
        .count();
    let size = graph.neighbors(s, &EdgeFilter::Member(Some(SetKind::And)), Direction::Out).len();
    (support, size)
}

/// The situation a coincidence is lifted to: the supporting situation
/// with the most coincidences, then the larger itemset, then lower id.
pub(crate) fn lift(graph: &Graph, c: ThingId) -> Option<ThingId> {
    graph
        .neighbors(c, &EdgeFilter::Is, Direction::Out)
        .into_iter()
        .filter(|&s| graph.kind_of(s) == Some(ThingKind::Situation))
        .map(|s| {
            let (support, size) = generality(graph, s);
            (std::cmp::Reverse(support), std::cmp::Reverse(size), s)
        })
        .min()
        .map(|k| k.2)
}

/// Lifts every process to its situation sequence, builds the prefix tree
/// and materializes each frequent closed prefix as a scenario.
pub struct UnifyScenarios;

impl Stage for UnifyScenarios {
    fn name(&self) -> &'static str {
        "unify_scenarios"
    }

    fn run(&self, ctx: &mut PipelineContext<'_>) -> Result<usize, GraphError> {
        let graph = &mut *ctx.graph;
        let lifted: Vec<LiftedProcess> = graph
            .things_of_kind(ThingKind::Process)
            .into_iter()
            .map(|p| LiftedProcess { process: p, steps: graph.seq_members(p).into_iter().map(|c| (c, lift(graph, c))).collect() })
            .collect();
        let model = ScenarioModel::build(lifted);
        let nodes = model.scenario_nodes(ctx.config.min_support);
        let mut entries = Vec::new();
        for &n in &nodes {
            let path = model.path(n);
            let key: Vec<String> = path.iter().map(ThingId::to_string).collect();
            let names: Vec<String> = path.iter().map(|&s| display_name(graph, s)).collect();
            let (o, created) = graph.ensure_keyed(ThingKind::Scenario, &format!("scenario:{}", key.join(",")), Some(&names.join(" -> ")));
            if created {
                for &s in &path {
                    graph.add_edge(Edge::member(SetKind::Seq, o, s))?;
                }
            }
            for &k in &model.nodes[n].processes {
                graph.add_edge(Edge::is(model.processes[k].process, o))?;
            }
            entries.push(ScenarioEntry { id: o.0, situations: names, support: model.nodes[n].count() });
        }
        ctx.report.scenarios = entries;
        ctx.model = Some(model);
        Ok(nodes.len())
    }
}

/// Finds forks in the scenario model built by the previous stage.
pub struct DetectForks;

impl Stage for DetectForks {
    fn name(&self) -> &'static str {
        "detect_forks"
    }

    fn run(&self, ctx: &mut PipelineContext<'_>) -> Result<usize, GraphError> {
        let Some(model) = &ctx.model else { return Ok(0) };
        let forks = detect_forks(model, ctx.config.min_support, ctx.config.fork_epsilon);
        let graph = &*ctx.graph;
        ctx.report.forks = forks
            .iter()
            .map(|f| ForkEntry {
                prefix: f.prefix.iter().map(|&s| display_name(graph, s)).collect(),
                support: model.nodes[f.node].count(),
                branches: f
                    .branches
                    .iter()
                    .map(|b| BranchEntry { situation: display_name(graph, b.situation), count: b.count, p: b.p })
                    .collect(),
            })
            .collect();
        let found = forks.len();
        ctx.forks = forks;
        Ok(found)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(xs: &[u64]) -> Vec<ThingId> {
        xs.iter().map(|&x| ThingId(x)).collect()
    }

    #[test]
    fn one_scenario_for_identical_processes() {
        let seqs = vec![ids(&[1, 2, 3]); 10];
        let model = ScenarioModel::from_sequences(&seqs);
        let nodes = model.scenario_nodes(2);
        assert_eq!(nodes.len(), 1);
        assert_eq!(model.path(nodes[0]), ids(&[1, 2, 3]));
        assert_eq!(model.nodes[nodes[0]].count(), 10);
    }

    #[test]
    fn single_process_is_not_frequent() {
        let model = ScenarioModel::from_sequences(&[ids(&[1, 2])]);
        assert!(model.scenario_nodes(2).is_empty());
    }

    #[test]
    fn even_split_is_a_fork() {
        let mut seqs = vec![ids(&[1, 2, 3]); 5];
        seqs.extend(vec![ids(&[1, 2, 4]); 5]);
        let model = ScenarioModel::from_sequences(&seqs);
        let forks = detect_forks(&model, 2, 0.2);
        assert_eq!(forks.len(), 1);
        assert_eq!(forks[0].prefix, ids(&[1, 2]));
        let p: Vec<f64> = forks[0].branches.iter().map(|b| b.p).collect();
        assert_eq!(p, vec![0.5, 0.5]);
    }

    #[test]
    fn skewed_split_is_not_a_fork() {
        let mut seqs = vec![ids(&[1, 3]); 9];
        seqs.push(ids(&[1, 4]));
        seqs.push(ids(&[1, 4]));
        seqs.extend(vec![ids(&[1, 3]); 9]);
        let model = ScenarioModel::from_sequences(&seqs);
        assert!(detect_forks(&model, 2, 0.2).is_empty());
    }
}
