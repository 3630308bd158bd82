use super::{PipelineContext, Stage};
use crate::knowledge_graph::{Edge, GraphError, SetKind, ThingKind, TimeSpec};

/// Connected components of the "coincides" relation: two specs coincide
/// when they intersect or the gap between them is below `window` ticks.
/// Components list member indices ascending and are ordered by their
/// smallest member.
pub fn cluster_times(specs: &[TimeSpec], window: i64) -> Vec<Vec<usize>> {
    let slack = (window - 1).max(0);
    let mut intervals: Vec<(i64, i64, usize)> =
        specs.iter().enumerate().flat_map(|(i, s)| s.intervals().iter().map(move |&(a, b)| (a, b, i))).collect();
    intervals.sort_unstable();
    let mut parent: Vec<usize> = (0..specs.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut run: Option<(i64, usize)> = None;
    for (start, end, owner) in intervals {
        match run {
            Some((reach, rep)) if start <= reach.saturating_add(slack) => {
                let (a, b) = (find(&mut parent, rep), find(&mut parent, owner));
                parent[a.max(b)] = a.min(b);
                run = Some((reach.max(end), rep));
            }
            _ => run = Some((end, owner)),
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); specs.len()];
    for i in 0..specs.len() {
        if !specs[i].is_empty() {
            let root = find(&mut parent, i);
            groups[root].push(i);
        }
    }
    let mut out: Vec<Vec<usize>> = groups.into_iter().filter(|g| !g.is_empty()).collect();
    out.sort();
    out
}

/// Groups coinciding events into coincidence nodes (`and`-sets of events
/// carrying the union of their times). Lone events form singletons.
pub struct ClusterEvents;

impl Stage for ClusterEvents {
    fn name(&self) -> &'static str {
        "cluster_events"
    }

    fn run(&self, ctx: &mut PipelineContext<'_>) -> Result<usize, GraphError> {
        let graph = &mut *ctx.graph;
        let events: Vec<_> = graph.things_of_kind(ThingKind::Event).into_iter().filter(|&v| graph.times_of(v).is_some()).collect();
        let specs: Vec<TimeSpec> = events.iter().map(|&v| graph.times_of(v).cloned().unwrap_or_default()).collect();
        let components = cluster_times(&specs, ctx.config.coincidence_window);
        for component in &components {
            let key: Vec<String> = component.iter().map(|&i| events[i].to_string()).collect();
            let (c, created) = graph.ensure_keyed(ThingKind::Coincidence, &format!("coincidence:{}", key.join(",")), None);
            if created {
                let mut span = TimeSpec::empty();
                for &i in component {
                    graph.add_edge(Edge::member(SetKind::And, c, events[i]))?;
                    span = span.union(&specs[i]);
                }
                graph.add_times(c, &span)?;
            }
        }
        Ok(components.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_tick_coincides() {
        let specs = vec![TimeSpec::point(5), TimeSpec::point(5), TimeSpec::point(15)];
        assert_eq!(cluster_times(&specs, 1), vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn window_controls_gap() {
        let specs = vec![TimeSpec::point(1), TimeSpec::point(2), TimeSpec::point(4)];
        assert_eq!(cluster_times(&specs, 1), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(cluster_times(&specs, 2), vec![vec![0, 1], vec![2]]);
        assert_eq!(cluster_times(&specs, 3), vec![vec![0, 1, 2]]);
        let overlapping = vec![TimeSpec::interval(1, 3).unwrap(), TimeSpec::point(3)];
        assert_eq!(cluster_times(&overlapping, 0), vec![vec![0, 1]]);
    }

    #[test]
    fn multi_interval_specs_bridge() {
        let specs = vec![
            TimeSpec::from_intervals([(0, 0), (20, 20)]).unwrap(),
            TimeSpec::point(10),
            TimeSpec::point(20),
        ];
        assert_eq!(cluster_times(&specs, 1), vec![vec![0, 2], vec![1]]);
    }
}
