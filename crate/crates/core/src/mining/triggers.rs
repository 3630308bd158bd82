use std::collections::{BTreeMap, BTreeSet};

use super::situations::coincidence_appearances;
use super::{display_name, PipelineContext, Stage, TriggerEntry};
use crate::knowledge_graph::{Direction, EdgeFilter, GraphError, SetKind, ThingId, ThingKind};

#[derive(Debug, Clone, PartialEq)]
pub struct TriggerScore<K> {
    pub candidate: K,
    pub support: usize,
    pub score: f64,
    pub base: Vec<f64>,
    pub shifted: Vec<f64>,
}

/// Scores candidates against branch outcomes. Each observation is the
/// branch a process took and the candidates present before the fork.
/// The score of `x` is the largest change `|P(b | x) - P(b)|` over
/// branches. Only candidates seen in `min_support` processes and scoring at
/// least `min_shift` are returned, in candidate order.
pub fn score_candidates<K: Ord + Clone>(
    observations: &[(usize, BTreeSet<K>)],
    branches: usize,
    min_support: usize,
    min_shift: f64,
) -> Vec<TriggerScore<K>> {
    if observations.is_empty() {
        return Vec::new();
    }
    let n = observations.len() as f64;
    let mut base = vec![0.0; branches];
    let mut with: BTreeMap<&K, Vec<usize>> = BTreeMap::new();
    for (b, present) in observations {
        base[*b] += 1.0;
        for x in present {
            with.entry(x).or_insert_with(|| vec![0; branches])[*b] += 1;
        }
    }
    base.iter_mut().for_each(|c| *c /= n);
    let mut out = Vec::new();
    for (x, counts) in with {
        let support: usize = counts.iter().sum();
        if support < min_support {
            continue;
        }
        let shifted: Vec<f64> = counts.iter().map(|&c| c as f64 / support as f64).collect();
        let score = shifted.iter().zip(&base).map(|(s, b)| (s - b).abs()).fold(0.0, f64::max);
        if score >= min_shift {
            out.push(TriggerScore { candidate: x.clone(), support, score, base: base.clone(), shifted });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Candidate {
    Appearance(ThingId),
    Situation(ThingId),
}

/// For each fork, ranks appearances and situations seen before the fork
/// (beyond the lifted situations themselves) by how much their presence
/// shifts the branch distribution.
pub struct DifferentiateTriggers;

impl Stage for DifferentiateTriggers {
    fn name(&self) -> &'static str {
        "differentiate_triggers"
    }

    fn run(&self, ctx: &mut PipelineContext<'_>) -> Result<usize, GraphError> {
        let Some(model) = &ctx.model else { return Ok(0) };
        let graph = &*ctx.graph;
        let cfg = ctx.config;
        let mut entries = Vec::new();
        for (fi, fork) in ctx.forks.iter().enumerate() {
            let depth = fork.prefix.len();
            let mut observations = Vec::new();
            for (b, branch) in fork.branches.iter().enumerate() {
                for &k in &model.nodes[branch.node].processes {
                    let steps = &model.processes[k].steps;
                    let cut = steps
                        .iter()
                        .enumerate()
                        .filter(|s| s.1 .1.is_some())
                        .nth(depth)
                        .map_or(steps.len(), |(i, _)| i);
                    let mut present = BTreeSet::new();
                    for &(c, lifted) in &steps[..cut] {
                        let covered: Vec<ThingId> = lifted.map_or_else(Vec::new, |s| {
                            graph.neighbors(s, &EdgeFilter::Member(Some(SetKind::And)), Direction::Out)
                        });
                        for a in coincidence_appearances(graph, c) {
                            if !covered.contains(&a) {
                                present.insert(Candidate::Appearance(a));
                            }
                        }
                        for s in graph.neighbors(c, &EdgeFilter::Is, Direction::Out) {
                            if Some(s) != lifted && graph.kind_of(s) == Some(ThingKind::Situation) {
                                present.insert(Candidate::Situation(s));
                            }
                        }
                    }
                    observations.push((b, present));
                }
            }
            let mut scored = score_candidates(&observations, fork.branches.len(), cfg.min_support, cfg.trigger_min_shift);
            let name = |c: &Candidate| match *c {
                Candidate::Appearance(id) | Candidate::Situation(id) => display_name(graph, id),
            };
            scored.sort_by(|x, y| {
                y.score
                    .total_cmp(&x.score)
                    .then(y.support.cmp(&x.support))
                    .then_with(|| name(&x.candidate).cmp(&name(&y.candidate)))
                    .then(x.candidate.cmp(&y.candidate))
            });
            for t in scored {
                let kind = match t.candidate {
                    Candidate::Appearance(_) => "appearance",
                    Candidate::Situation(_) => "situation",
                };
                entries.push(TriggerEntry {
                    fork: fi,
                    thing: name(&t.candidate),
                    kind: kind.to_string(),
                    support: t.support,
                    score: t.score,
                    base: t.base,
                    shifted: t.shifted,
                });
            }
        }
        let found = entries.len();
        ctx.report.triggers = entries;
        Ok(found)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_injury_rate() {
        // branch 0 = safe, 1 = injury; "red" in half the processes.
        let mut obs = Vec::new();
        for i in 0..100 {
            let red = i < 50;
            let injured = if red { i < 45 } else { i < 55 };
            let present: BTreeSet<&str> = if red { ["red"].into() } else { BTreeSet::new() };
            obs.push((usize::from(injured), present));
        }
        let scores = score_candidates(&obs, 2, 2, 0.2);
        assert_eq!(scores.len(), 1);
        assert!((scores[0].score - 0.4).abs() < 1e-12);
        assert_eq!(scores[0].shifted, vec![0.1, 0.9]);
        assert_eq!(scores[0].base, vec![0.5, 0.5]);
    }

    #[test]
    fn ubiquitous_candidate_scores_zero() {
        let obs: Vec<(usize, BTreeSet<&str>)> = (0..10).map(|i| (i % 2, ["x"].into())).collect();
        assert!(score_candidates(&obs, 2, 2, 0.2).is_empty());
        assert_eq!(score_candidates(&obs, 2, 2, 1e-9).len(), 0);
    }
}
