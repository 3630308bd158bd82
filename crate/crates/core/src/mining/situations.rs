use super::itemsets::closed_itemsets;
use super::{display_name, event_appearance, PipelineContext, Stage};
use crate::knowledge_graph::{Direction, Edge, EdgeFilter, Graph, GraphError, SetKind, ThingId, ThingKind};

/// Appearances of a coincidence's events, sorted and distinct.
pub(crate) fn coincidence_appearances(graph: &Graph, c: ThingId) -> Vec<ThingId> {
    let mut apps: Vec<ThingId> = graph
        .neighbors(c, &EdgeFilter::Member(Some(SetKind::And)), Direction::Out)
        .into_iter()
        .filter_map(|v| event_appearance(graph, v))
        .collect();
    apps.sort();
    apps.dedup();
    apps
}

/// Situations are the closed frequent sets of appearances across
/// coincidences: an `and`-set over the appearances, with `is` edges from
/// every coincidence containing them all.
pub struct UnifySituations;

impl Stage for UnifySituations {
    fn name(&self) -> &'static str {
        "unify_situations"
    }

    fn run(&self, ctx: &mut PipelineContext<'_>) -> Result<usize, GraphError> {
        let graph = &mut *ctx.graph;
        let coincidences = graph.things_of_kind(ThingKind::Coincidence);
        let mut universe: Vec<ThingId> = Vec::new();
        let per_coincidence: Vec<Vec<ThingId>> =
            coincidences.iter().map(|&c| coincidence_appearances(graph, c)).collect();
        for apps in &per_coincidence {
            universe.extend(apps);
        }
        universe.sort();
        universe.dedup();
        let transactions: Vec<Vec<u32>> = per_coincidence
            .iter()
            .map(|apps| apps.iter().map(|a| universe.binary_search(a).expect("collected above") as u32).collect())
            .collect();
        let sets = closed_itemsets(&transactions, ctx.config.min_support);
        for set in &sets {
            let apps: Vec<ThingId> = set.items.iter().map(|&i| universe[i as usize]).collect();
            let key: Vec<String> = apps.iter().map(ThingId::to_string).collect();
            let mut names: Vec<String> = apps.iter().map(|&a| display_name(graph, a)).collect();
            names.sort();
            let (s, _) = graph.ensure_keyed(ThingKind::Situation, &format!("situation:{}", key.join(",")), Some(&names.join(" + ")));
            for &a in &apps {
                graph.add_edge(Edge::member(SetKind::And, s, a))?;
            }
            for &t in &set.support {
                graph.add_edge(Edge::is(coincidences[t], s))?;
            }
        }
        Ok(sets.len())
    }
}
