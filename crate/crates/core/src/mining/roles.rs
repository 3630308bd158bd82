use std::collections::BTreeMap;

use super::{direct_events, display_name, event_bindings, ActorCandidate, PipelineContext, Stage};
use crate::knowledge_graph::{Edge, EdgeKind, GraphError, SetKind, ThingId, ThingKind};

/// For each appearance and role, an any-set of every actor bound to that
/// role by the appearance's events, linked from the appearance by a
/// `domain` edge.
pub struct ScopeRoles;

impl Stage for ScopeRoles {
    fn name(&self) -> &'static str {
        "scope_roles"
    }

    fn run(&self, ctx: &mut PipelineContext<'_>) -> Result<usize, GraphError> {
        let graph = &mut *ctx.graph;
        let mut found = 0;
        for app in graph.things_of_kind(ThingKind::Appearance) {
            let mut domains: BTreeMap<String, Vec<ThingId>> = BTreeMap::new();
            for ev in direct_events(graph, app) {
                for (role, actor) in event_bindings(graph, ev) {
                    let actors = domains.entry(role).or_default();
                    if !actors.contains(&actor) {
                        actors.push(actor);
                    }
                }
            }
            let app_name = display_name(graph, app);
            for (role, actors) in domains {
                let key = format!("domain:{app}:{role}");
                let (set, _) = graph.ensure_keyed(ThingKind::Generic, &key, Some(&format!("{app_name}/{role}")));
                graph.add_edge(Edge::new(EdgeKind::Domain(role), app, set))?;
                for actor in actors {
                    graph.add_edge(Edge::member(SetKind::Any, set, actor))?;
                }
                found += 1;
            }
        }
        Ok(found)
    }
}

/// Relative frequency of each actor in each role of each appearance, with
/// the most frequent actor flagged.
pub struct DifferentiateActors;

impl Stage for DifferentiateActors {
    fn name(&self) -> &'static str {
        "differentiate_actors"
    }

    fn run(&self, ctx: &mut PipelineContext<'_>) -> Result<usize, GraphError> {
        let graph = &*ctx.graph;
        let mut rows = Vec::new();
        let mut apps: Vec<(String, ThingId)> =
            graph.things_of_kind(ThingKind::Appearance).into_iter().map(|a| (display_name(graph, a), a)).collect();
        apps.sort();
        for (app_name, app) in apps {
            // role -> (events with the role filled, actor -> (count, first tick))
            let mut table: BTreeMap<String, (usize, BTreeMap<ThingId, (usize, i64)>)> = BTreeMap::new();
            for ev in direct_events(graph, app) {
                let t = graph.times_of(ev).and_then(|s| s.start()).unwrap_or(i64::MAX);
                let bindings = event_bindings(graph, ev);
                let mut roles: Vec<&String> = bindings.iter().map(|b| &b.0).collect();
                roles.sort();
                roles.dedup();
                for role in roles {
                    table.entry(role.clone()).or_default().0 += 1;
                }
                let mut seen = Vec::new();
                for (role, actor) in &bindings {
                    if seen.contains(&(role, actor)) {
                        continue;
                    }
                    seen.push((role, actor));
                    let entry = table.get_mut(role).expect("role counted above").1.entry(*actor).or_insert((0, t));
                    entry.0 += 1;
                    entry.1 = entry.1.min(t);
                }
            }
            for (role, (total, actors)) in table {
                let mut ranked: Vec<(usize, i64, String, ThingId)> =
                    actors.into_iter().map(|(a, (count, first))| (count, first, display_name(graph, a), a)).collect();
                ranked.sort_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)).then(x.3.cmp(&y.3)));
                for (rank, (count, _, actor, _)) in ranked.into_iter().enumerate() {
                    rows.push(ActorCandidate {
                        appearance: app_name.clone(),
                        role: role.clone(),
                        actor,
                        count,
                        frequency: count as f64 / total as f64,
                        best: rank == 0,
                    });
                }
            }
        }
        let found = rows.len();
        ctx.report.candidates = rows;
        Ok(found)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knowledge_graph::{Graph, TimeSpec};
    use crate::mining::{MiningConfig, MiningReport};

    fn run(stage: &dyn Stage, graph: &mut Graph) -> MiningReport {
        let config = MiningConfig::default();
        let mut ctx = PipelineContext { graph, config: &config, model: None, forks: Vec::new(), report: MiningReport::default() };
        stage.run(&mut ctx).unwrap();
        ctx.report
    }

    fn cleaning(g: &mut Graph, app: ThingId, actor: &str, t: i64) {
        let v = g.add_thing(ThingKind::Event, Some("cleaning"));
        g.add_edge(Edge::is(v, app)).unwrap();
        g.add_times(v, &TimeSpec::point(t)).unwrap();
        let (a, _) = g.ensure_keyed(ThingKind::Actor, &format!("actor:{actor}"), Some(actor));
        g.add_edge(Edge::has(v, "cleaner", a)).unwrap();
    }

    #[test]
    fn mother_is_most_probable_cleaner() {
        let mut g = Graph::new();
        let app = g.add_thing(ThingKind::Appearance, Some("cleaning"));
        cleaning(&mut g, app, "father", 1);
        cleaning(&mut g, app, "mother", 2);
        cleaning(&mut g, app, "mother", 3);
        let report = run(&DifferentiateActors, &mut g);
        let rows: Vec<(&str, usize, bool)> =
            report.candidates.iter().map(|c| (c.actor.as_str(), c.count, c.best)).collect();
        assert_eq!(rows, vec![("mother", 2, true), ("father", 1, false)]);
        assert!((report.candidates[0].frequency - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn ties_go_to_earliest_actor() {
        let mut g = Graph::new();
        let app = g.add_thing(ThingKind::Appearance, Some("cleaning"));
        cleaning(&mut g, app, "zed", 1);
        cleaning(&mut g, app, "amy", 2);
        let report = run(&DifferentiateActors, &mut g);
        assert_eq!(report.candidates[0].actor, "zed");
        assert!(report.candidates[0].best);
    }

    #[test]
    fn stoplight_domain() {
        let mut g = Graph::new();
        let app = g.add_thing(ThingKind::Appearance, Some("light"));
        for (t, color) in ["red", "green", "yellow", "red"].into_iter().enumerate() {
            let v = g.add_thing(ThingKind::Event, None);
            g.add_edge(Edge::is(v, app)).unwrap();
            g.add_times(v, &TimeSpec::point(t as i64)).unwrap();
            let (a, _) = g.ensure_keyed(ThingKind::Actor, &format!("actor:{color}"), Some(color));
            g.add_edge(Edge::has(v, "light color", a)).unwrap();
        }
        run(&ScopeRoles, &mut g);
        let set = g.find_key(&format!("domain:{app}:light color")).unwrap();
        let names: Vec<String> = g
            .neighbors(set, &crate::knowledge_graph::EdgeFilter::Member(Some(SetKind::Any)), crate::knowledge_graph::Direction::Out)
            .into_iter()
            .map(|a| display_name(&g, a))
            .collect();
        assert_eq!(names, vec!["red", "green", "yellow"]);
        let before = g.thing_count();
        run(&ScopeRoles, &mut g);
        assert_eq!(g.thing_count(), before);
    }
}
