//! Functional-set queries over the graph. Each query returns a
//! [`WeightedSet`]; graph facts have weight 1.0, and only the transitive
//! `is` lookups can attenuate per hop.

mod registry;

use std::collections::{HashMap, VecDeque};

use thiserror::Error;

use crate::knowledge_graph::{Direction, EdgeFilter, EdgeKind, Graph, SetKind, ThingId, ThingKind, TimeSpec, WeightedSet};

pub use registry::{QueryFunction, QueryInput, QueryOutput, QueryRegistry, SubjectArg};

/// Optional narrowing of a query by role name, tick interval and seq
/// position. Absent filters match everything.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryScope {
    pub role: Option<String>,
    pub time: Option<(i64, i64)>,
    pub order: Option<u32>,
}

impl QueryScope {
    pub fn role(role: &str) -> Self {
        QueryScope { role: Some(role.to_string()), ..Default::default() }
    }

    pub fn time(start: i64, end: i64) -> Self {
        QueryScope { time: Some((start, end)), ..Default::default() }
    }

    pub fn order(q: u32) -> Self {
        QueryScope { order: Some(q), ..Default::default() }
    }

    fn admits_time(&self, spec: Option<&TimeSpec>) -> bool {
        match self.time {
            None => true,
            Some((s, e)) => spec.is_some_and(|t| t.intersects_interval(s, e)),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum QueryError {
    #[error("unknown thing {0}")]
    UnknownThing(ThingId),
    #[error("{kind} {id} has no temporal extent")]
    NoTimespan { id: ThingId, kind: ThingKind },
    #[error("query {query} needs {what}")]
    MissingArgument { query: String, what: &'static str },
}

type QResult = Result<WeightedSet, QueryError>;

/// A relation stored as edges `from --filter--> to` between two kinds.
struct Relation {
    filter: EdgeFilter,
    from: ThingKind,
    to: ThingKind,
}

const fn rel(filter: EdgeFilter, from: ThingKind, to: ThingKind) -> Relation {
    Relation { filter, from, to }
}

const ACTOR_ROLE: Relation = rel(EdgeFilter::Is, ThingKind::Actor, ThingKind::Role);
const APPEARANCE_ROLE: Relation = rel(EdgeFilter::Has(None), ThingKind::Appearance, ThingKind::Role);
const SITUATION_APPEARANCE: Relation = rel(EdgeFilter::Member(Some(SetKind::And)), ThingKind::Situation, ThingKind::Appearance);
const COINCIDENCE_SITUATION: Relation = rel(EdgeFilter::Is, ThingKind::Coincidence, ThingKind::Situation);
const COINCIDENCE_EVENT: Relation = rel(EdgeFilter::Member(Some(SetKind::And)), ThingKind::Coincidence, ThingKind::Event);
const PROCESS_SCENARIO: Relation = rel(EdgeFilter::Is, ThingKind::Process, ThingKind::Scenario);

pub struct Queries<'g> {
    graph: &'g Graph,
    is_attenuation: f64,
}

impl<'g> Queries<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        Queries { graph, is_attenuation: 1.0 }
    }

    /// Weight factor applied per extra `is` hop in transitive lookups;
    /// 1.0 (the default) keeps them crisp.
    pub fn with_is_attenuation(mut self, factor: f64) -> Self {
        self.is_attenuation = factor.clamp(0.0, 1.0);
        self
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    fn kind(&self, id: ThingId) -> Result<ThingKind, QueryError> {
        self.graph.kind_of(id).ok_or(QueryError::UnknownThing(id))
    }

    fn forward(&self, r: &Relation, x: ThingId) -> QResult {
        if self.kind(x)? != r.from {
            return Ok(WeightedSet::new());
        }
        let ids = self.graph.neighbors(x, &r.filter, Direction::Out);
        Ok(WeightedSet::crisp(ids.into_iter().filter(|&y| self.graph.kind_of(y) == Some(r.to))))
    }

    fn backward(&self, r: &Relation, y: ThingId) -> QResult {
        if self.kind(y)? != r.to {
            return Ok(WeightedSet::new());
        }
        let ids = self.graph.neighbors(y, &r.filter, Direction::In);
        Ok(WeightedSet::crisp(ids.into_iter().filter(|&x| self.graph.kind_of(x) == Some(r.from))))
    }

    fn all_at(&self, kind: ThingKind, start: i64, end: i64) -> WeightedSet {
        WeightedSet::crisp(
            self.graph
                .things_of_kind(kind)
                .into_iter()
                .filter(|&id| self.timespan(id).is_some_and(|t| t.intersects_interval(start, end))),
        )
    }

    fn timespan(&self, id: ThingId) -> Option<TimeSpec> {
        self.timespan_of(id).ok()
    }

    /// A(r): actors playing role `r`.
    pub fn actors_of_role(&self, r: ThingId) -> QResult {
        self.backward(&ACTOR_ROLE, r)
    }

    /// R(a): roles played by actor `a`.
    pub fn roles_of_actor(&self, a: ThingId) -> QResult {
        self.forward(&ACTOR_ROLE, a)
    }

    /// R(e): roles of appearance `e`.
    pub fn roles_of_appearance(&self, e: ThingId) -> QResult {
        self.forward(&APPEARANCE_ROLE, e)
    }

    /// E(r): appearances having role `r`.
    pub fn appearances_of_role(&self, r: ThingId) -> QResult {
        self.backward(&APPEARANCE_ROLE, r)
    }

    /// E(v): appearances event `v` instantiates, following `is` chains
    /// through appearances.
    pub fn appearances_of_event(&self, v: ThingId) -> QResult {
        if self.kind(v)? != ThingKind::Event {
            return Ok(WeightedSet::new());
        }
        Ok(self.is_closure(v, Direction::Out, ThingKind::Appearance))
    }

    /// V(e): events instantiating appearance `e`, directly or through more
    /// specific appearances.
    pub fn events_of_appearance(&self, e: ThingId) -> QResult {
        if self.kind(e)? != ThingKind::Appearance {
            return Ok(WeightedSet::new());
        }
        Ok(self.is_closure(e, Direction::In, ThingKind::Event))
    }

    /// Breadth-first walk over `is` edges passing only through appearances;
    /// collects things of `target` kind weighted by hop distance.
    fn is_closure(&self, start: ThingId, dir: Direction, target: ThingKind) -> WeightedSet {
        let mut dist: HashMap<ThingId, u32> = HashMap::new();
        let mut queue = VecDeque::from([(start, 0u32)]);
        let mut out = WeightedSet::new();
        while let Some((x, d)) = queue.pop_front() {
            for y in self.graph.neighbors(x, &EdgeFilter::Is, dir) {
                if y == start || dist.contains_key(&y) {
                    continue;
                }
                let kind = self.graph.kind_of(y);
                dist.insert(y, d + 1);
                if kind == Some(target) {
                    out.insert(y, self.is_attenuation.powi(d as i32));
                }
                if kind == Some(ThingKind::Appearance) {
                    queue.push_back((y, d + 1));
                }
            }
        }
        out
    }

    /// V(t): events whose times intersect `[start, end]`.
    pub fn events_at(&self, start: i64, end: i64) -> WeightedSet {
        self.all_at(ThingKind::Event, start, end)
    }

    /// E(t): appearances of the events at `[start, end]`.
    pub fn appearances_at(&self, start: i64, end: i64) -> WeightedSet {
        let mut out = WeightedSet::new();
        for (v, _) in self.events_at(start, end).iter() {
            out = out.union(&self.appearances_of_event(v).unwrap_or_default());
        }
        out
    }

    /// A(v, r): actors of event `v`, optionally limited by role and by the
    /// event's time.
    pub fn actors_of_event(&self, v: ThingId, scope: &QueryScope) -> QResult {
        if self.kind(v)? != ThingKind::Event || !scope.admits_time(self.graph.times_of(v)) {
            return Ok(WeightedSet::new());
        }
        let filter = EdgeFilter::Has(scope.role.clone());
        let ids = self.graph.neighbors(v, &filter, Direction::Out);
        Ok(WeightedSet::crisp(ids.into_iter().filter(|&a| self.graph.kind_of(a) == Some(ThingKind::Actor))))
    }

    /// V(a, r, t): events actor `a` takes part in, optionally limited by
    /// role and time.
    pub fn events_of_actor(&self, a: ThingId, scope: &QueryScope) -> QResult {
        if self.kind(a)? != ThingKind::Actor {
            return Ok(WeightedSet::new());
        }
        let filter = EdgeFilter::Has(scope.role.clone());
        let ids = self.graph.neighbors(a, &filter, Direction::In);
        Ok(WeightedSet::crisp(ids.into_iter().filter(|&v| {
            self.graph.kind_of(v) == Some(ThingKind::Event) && scope.admits_time(self.graph.times_of(v))
        })))
    }

    pub fn situations_of_appearance(&self, e: ThingId) -> QResult {
        self.backward(&SITUATION_APPEARANCE, e)
    }

    pub fn appearances_of_situation(&self, s: ThingId) -> QResult {
        self.forward(&SITUATION_APPEARANCE, s)
    }

    /// S(c): situations generalizing coincidence `c`.
    pub fn situations_of_coincidence(&self, c: ThingId) -> QResult {
        self.forward(&COINCIDENCE_SITUATION, c)
    }

    pub fn coincidences_of_situation(&self, s: ThingId) -> QResult {
        self.backward(&COINCIDENCE_SITUATION, s)
    }

    pub fn coincidences_of_event(&self, v: ThingId) -> QResult {
        self.backward(&COINCIDENCE_EVENT, v)
    }

    pub fn events_of_coincidence(&self, c: ThingId) -> QResult {
        self.forward(&COINCIDENCE_EVENT, c)
    }

    /// C(t, v): coincidences at `[start, end]`, optionally only those
    /// containing event `v`.
    pub fn coincidences_at(&self, start: i64, end: i64, v: Option<ThingId>) -> QResult {
        let mut out = self.all_at(ThingKind::Coincidence, start, end);
        if let Some(v) = v {
            let of_event = self.coincidences_of_event(v)?;
            out.retain(|c, _| of_event.contains(c));
        }
        Ok(out)
    }

    fn seq_members(&self, parent: ThingId, member: ThingKind, order: Option<u32>) -> WeightedSet {
        WeightedSet::crisp(self.graph.out_edges(parent).filter_map(|e| match e.kind {
            EdgeKind::Member { set: SetKind::Seq, order: Some(o) }
                if order.is_none_or(|q| q == o) && self.graph.kind_of(e.to) == Some(member) =>
            {
                Some(e.to)
            }
            _ => None,
        }))
    }

    fn seq_parents(&self, child: ThingId, parent: ThingKind, order: Option<u32>) -> WeightedSet {
        WeightedSet::crisp(self.graph.in_edges(child).filter_map(|e| match e.kind {
            EdgeKind::Member { set: SetKind::Seq, order: Some(o) }
                if order.is_none_or(|q| q == o) && self.graph.kind_of(e.from) == Some(parent) =>
            {
                Some(e.from)
            }
            _ => None,
        }))
    }

    /// O(s, q): scenarios containing situation `s`, at position `q` if given.
    pub fn scenarios_of_situation(&self, s: ThingId, q: Option<u32>) -> QResult {
        if self.kind(s)? != ThingKind::Situation {
            return Ok(WeightedSet::new());
        }
        Ok(self.seq_parents(s, ThingKind::Scenario, q))
    }

    /// S(o, q): situations of scenario `o`, or the one at position `q`.
    pub fn situations_of_scenario(&self, o: ThingId, q: Option<u32>) -> QResult {
        if self.kind(o)? != ThingKind::Scenario {
            return Ok(WeightedSet::new());
        }
        Ok(self.seq_members(o, ThingKind::Situation, q))
    }

    pub fn processes_of_scenario(&self, o: ThingId) -> QResult {
        self.backward(&PROCESS_SCENARIO, o)
    }

    pub fn scenarios_of_process(&self, p: ThingId) -> QResult {
        self.forward(&PROCESS_SCENARIO, p)
    }

    /// P(t): processes whose span intersects `[start, end]`.
    pub fn processes_at(&self, start: i64, end: i64) -> WeightedSet {
        self.all_at(ThingKind::Process, start, end)
    }

    /// P(c, t): processes containing coincidence `c`; with a time filter
    /// only when `c` itself falls in it.
    pub fn processes_of_coincidence(&self, c: ThingId, scope: &QueryScope) -> QResult {
        if self.kind(c)? != ThingKind::Coincidence || !scope.admits_time(self.graph.times_of(c)) {
            return Ok(WeightedSet::new());
        }
        Ok(self.seq_parents(c, ThingKind::Process, None))
    }

    /// C(p, t): coincidences of process `p` in order, optionally only those
    /// in the time filter.
    pub fn coincidences_of_process(&self, p: ThingId, scope: &QueryScope) -> QResult {
        if self.kind(p)? != ThingKind::Process {
            return Ok(WeightedSet::new());
        }
        let ordered = self.graph.seq_members(p);
        Ok(WeightedSet::crisp(ordered.into_iter().filter(|&c| {
            self.graph.kind_of(c) == Some(ThingKind::Coincidence) && scope.admits_time(self.graph.times_of(c))
        })))
    }

    /// T(x) for events, coincidences, actors and processes.
    pub fn timespan_of(&self, x: ThingId) -> Result<TimeSpec, QueryError> {
        let kind = self.kind(x)?;
        let union_of = |ids: WeightedSet| {
            ids.iter().fold(TimeSpec::empty(), |acc, (id, _)| match self.graph.times_of(id) {
                Some(t) => acc.union(t),
                None => acc,
            })
        };
        match kind {
            ThingKind::Event | ThingKind::Coincidence => Ok(self.graph.times_of(x).cloned().unwrap_or_default()),
            ThingKind::Actor => Ok(union_of(self.events_of_actor(x, &QueryScope::default())?)),
            ThingKind::Process => Ok(union_of(self.coincidences_of_process(x, &QueryScope::default())?)),
            _ => Err(QueryError::NoTimespan { id: x, kind }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knowledge_graph::Edge;

    #[test]
    fn stoplight_roles() {
        let mut g = Graph::new();
        let role = g.add_thing(ThingKind::Role, Some("light color"));
        let colors: Vec<ThingId> = ["red", "yellow", "green"]
            .into_iter()
            .map(|c| {
                let a = g.add_thing(ThingKind::Actor, Some(c));
                g.add_edge(Edge::is(a, role)).unwrap();
                a
            })
            .collect();
        let q = Queries::new(&g);
        assert_eq!(q.actors_of_role(role).unwrap().ids(), colors);
        assert_eq!(q.roles_of_actor(colors[1]).unwrap().ids(), vec![role]);
        assert_eq!(q.actors_of_role(ThingId(77)), Err(QueryError::UnknownThing(ThingId(77))));
    }

    fn event_at(g: &mut Graph, app: ThingId, t: i64) -> ThingId {
        let v = g.add_thing(ThingKind::Event, None);
        g.add_edge(Edge::is(v, app)).unwrap();
        g.add_times(v, &TimeSpec::point(t)).unwrap();
        v
    }

    #[test]
    fn transitive_appearances_and_attenuation() {
        let mut g = Graph::new();
        let specific = g.add_thing(ThingKind::Appearance, Some("john cleans window"));
        let general = g.add_thing(ThingKind::Appearance, Some("$x cleans window"));
        g.add_edge(Edge::is(specific, general)).unwrap();
        let v = event_at(&mut g, specific, 100);
        let q = Queries::new(&g);
        assert_eq!(q.appearances_of_event(v).unwrap().ids(), vec![specific, general]);
        assert_eq!(q.events_of_appearance(general).unwrap().ids(), vec![v]);
        let q = Queries::new(&g).with_is_attenuation(0.5);
        assert_eq!(q.appearances_of_event(v).unwrap().weight(general), Some(0.5));
        assert_eq!(q.events_of_appearance(general).unwrap().weight(v), Some(0.5));
        assert!(q.events_at(90, 110).contains(v));
        assert!(q.events_at(101, 110).is_empty());
        assert_eq!(q.appearances_at(100, 100).len(), 2);
    }

    #[test]
    fn scoped_actor_queries() {
        let mut g = Graph::new();
        let app = g.add_thing(ThingKind::Appearance, Some("sanctions"));
        let v = event_at(&mut g, app, 100);
        let eu = g.add_thing(ThingKind::Actor, Some("EU"));
        let ru = g.add_thing(ThingKind::Actor, Some("Russia"));
        g.add_edge(Edge::has(v, "organization", eu)).unwrap();
        g.add_edge(Edge::has(v, "target", ru)).unwrap();
        let q = Queries::new(&g);
        assert_eq!(q.actors_of_event(v, &QueryScope::role("target")).unwrap().ids(), vec![ru]);
        assert!(q.actors_of_event(v, &QueryScope::time(0, 5)).unwrap().is_empty());
        assert_eq!(q.events_of_actor(ru, &QueryScope::role("target")).unwrap().ids(), vec![v]);
        assert!(q.events_of_actor(ru, &QueryScope::role("organization")).unwrap().is_empty());
        assert_eq!(q.timespan_of(ru).unwrap().intervals(), &[(100, 100)]);
        assert!(matches!(q.timespan_of(app), Err(QueryError::NoTimespan { .. })));
    }

    #[test]
    fn scenario_positions_and_process_span() {
        let mut g = Graph::new();
        let o = g.add_thing(ThingKind::Scenario, None);
        let s: Vec<ThingId> = (0..3).map(|_| g.add_thing(ThingKind::Situation, None)).collect();
        for &x in &s {
            g.add_edge(Edge::member(SetKind::Seq, o, x)).unwrap();
        }
        let p = g.add_thing(ThingKind::Process, None);
        for (a, b) in [(1, 2), (2, 4)] {
            let c = g.add_thing(ThingKind::Coincidence, None);
            g.add_times(c, &TimeSpec::interval(a, b).unwrap()).unwrap();
            g.add_edge(Edge::member(SetKind::Seq, p, c)).unwrap();
        }
        g.add_edge(Edge::is(p, o)).unwrap();
        let q = Queries::new(&g);
        assert_eq!(q.situations_of_scenario(o, Some(1)).unwrap().ids(), vec![s[1]]);
        assert_eq!(q.scenarios_of_situation(s[1], Some(1)).unwrap().ids(), vec![o]);
        assert!(q.scenarios_of_situation(s[1], Some(0)).unwrap().is_empty());
        assert_eq!(q.timespan_of(p).unwrap().intervals(), &[(1, 4)]);
        assert_eq!(q.processes_at(4, 9).ids(), vec![p]);
        assert_eq!(q.processes_of_scenario(o).unwrap().ids(), vec![p]);
        assert_eq!(q.coincidences_of_process(p, &QueryScope::time(3, 3)).unwrap().len(), 1);
    }

    #[test]
    fn empty_graph() {
        let g = Graph::new();
        let q = Queries::new(&g);
        assert!(q.events_at(i64::MIN, i64::MAX).is_empty());
        assert!(q.coincidences_at(0, 10, None).unwrap().is_empty());
    }
}
