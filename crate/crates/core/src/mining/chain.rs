use super::{event_bindings, PipelineContext, Stage};
use crate::knowledge_graph::{Direction, Edge, EdgeFilter, GraphError, SetKind, ThingId, ThingKind, TimeSpec};

/// A coincidence as seen by chaining: its span and sorted actors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainNode {
    pub start: i64,
    pub end: i64,
    pub actors: Vec<ThingId>,
}

fn shares_actor(a: &[ThingId], b: &[ThingId]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Equal => return true,
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
        }
    }
    false
}

/// Maximal chains of length >= 2 in the "may follow" DAG, where `j` may
/// follow `i` if it starts strictly later, no more than `max_gap` ticks
/// after `i` ends, and (optionally) shares an actor with it. Chains are
/// listed as node indices, sorted.
pub fn maximal_chains(nodes: &[ChainNode], max_gap: i64, require_shared_actor: bool) -> Vec<Vec<usize>> {
    let follows = |i: usize, j: usize| {
        let (a, b) = (&nodes[i], &nodes[j]);
        b.start > a.start && b.start - a.end <= max_gap && (!require_shared_actor || shares_actor(&a.actors, &b.actors))
    };
    let n = nodes.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (nodes[i].start, i));
    let mut next: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut has_pred = vec![false; n];
    for (x, &i) in order.iter().enumerate() {
        for &j in &order[x + 1..] {
            if nodes[j].start - nodes[i].end > max_gap {
                break;
            }
            if follows(i, j) {
                next[i].push(j);
                has_pred[j] = true;
            }
        }
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    fn walk(i: usize, next: &[Vec<usize>], path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        path.push(i);
        if next[i].is_empty() {
            if path.len() >= 2 {
                out.push(path.clone());
            }
        } else {
            for &j in &next[i] {
                walk(j, next, path, out);
            }
        }
        path.pop();
    }
    for i in 0..n {
        if !has_pred[i] {
            walk(i, &next, &mut path, &mut out);
        }
    }
    out.sort();
    out
}

/// Chains coincidences into processes (`seq`-sets ordered by time).
pub struct ChainCoincidences;

impl Stage for ChainCoincidences {
    fn name(&self) -> &'static str {
        "chain_coincidences"
    }

    fn run(&self, ctx: &mut PipelineContext<'_>) -> Result<usize, GraphError> {
        let graph = &mut *ctx.graph;
        let mut ids = Vec::new();
        let mut nodes = Vec::new();
        for c in graph.things_of_kind(ThingKind::Coincidence) {
            let Some(spec) = graph.times_of(c) else { continue };
            let (Some(start), Some(end)) = (spec.start(), spec.end()) else { continue };
            let mut actors: Vec<ThingId> = graph
                .neighbors(c, &EdgeFilter::Member(Some(SetKind::And)), Direction::Out)
                .into_iter()
                .flat_map(|v| event_bindings(graph, v).into_iter().map(|b| b.1))
                .collect();
            actors.sort();
            actors.dedup();
            ids.push(c);
            nodes.push(ChainNode { start, end, actors });
        }
        let cfg = ctx.config;
        let chains = maximal_chains(&nodes, cfg.chain_max_gap, cfg.chain_requires_shared_actor);
        for chain in &chains {
            let key: Vec<String> = chain.iter().map(|&i| ids[i].to_string()).collect();
            let (p, created) = graph.ensure_keyed(ThingKind::Process, &format!("process:{}", key.join(",")), None);
            if created {
                let mut span = TimeSpec::empty();
                for &i in chain {
                    graph.add_edge(Edge::member(SetKind::Seq, p, ids[i]))?;
                    if let Some(t) = graph.times_of(ids[i]) {
                        span = span.union(t);
                    }
                }
                graph.add_times(p, &span)?;
            }
        }
        Ok(chains.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn node(start: i64, actors: &[u64]) -> ChainNode {
        ChainNode { start, end: start, actors: actors.iter().map(|&a| ThingId(a)).collect() }
    }

    #[test]
    fn window_cleaning_process() {
        let nodes = vec![node(1, &[7]), node(2, &[7]), node(3, &[7])];
        assert_eq!(maximal_chains(&nodes, 1, true), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn disjoint_actors_do_not_chain() {
        let nodes = vec![node(1, &[1]), node(2, &[2])];
        assert!(maximal_chains(&nodes, 1, true).is_empty());
        assert_eq!(maximal_chains(&nodes, 1, false), vec![vec![0, 1]]);
    }

    #[test]
    fn branching_gives_one_chain_per_path() {
        let nodes = vec![node(1, &[1]), node(2, &[1, 2]), node(2, &[1, 3]), node(9, &[1])];
        assert_eq!(maximal_chains(&nodes, 1, true), vec![vec![0, 1], vec![0, 2]]);
    }
}
