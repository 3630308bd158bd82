use std::collections::{BTreeMap, HashMap, HashSet};

use super::{Edge, EdgeKind, GraphError, SetKind, Thing, ThingId, ThingKind, TimeSpec, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Out,
    In,
}

/// Selects edges by kind; `None` parameters match any role or set kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EdgeFilter {
    Any,
    Is,
    Has(Option<String>),
    Times,
    Member(Option<SetKind>),
    Domain(Option<String>),
}

impl EdgeFilter {
    pub fn has(role: &str) -> Self {
        EdgeFilter::Has(Some(role.to_string()))
    }

    pub fn matches(&self, kind: &EdgeKind) -> bool {
        match (self, kind) {
            (EdgeFilter::Any, _) => true,
            (EdgeFilter::Is, EdgeKind::Is) => true,
            (EdgeFilter::Times, EdgeKind::Times) => true,
            (EdgeFilter::Has(want), EdgeKind::Has(role)) => want.as_ref().is_none_or(|w| w == role),
            (EdgeFilter::Domain(want), EdgeKind::Domain(role)) => want.as_ref().is_none_or(|w| w == role),
            (EdgeFilter::Member(want), EdgeKind::Member { set, .. }) => want.is_none_or(|w| w == *set),
            _ => false,
        }
    }
}

/// In-memory graph. Thing ids are never reused and a thing's kind never
/// changes. Things carrying a `"key"` text property are indexed so callers
/// can create content-addressed nodes idempotently.
#[derive(Debug, Clone, Default)]
pub struct Graph {
    things: Vec<Thing>,
    index: HashMap<ThingId, usize>,
    edges: Vec<Edge>,
    edge_set: HashSet<Edge>,
    out: HashMap<ThingId, Vec<usize>>,
    inn: HashMap<ThingId, Vec<usize>>,
    seq_len: HashMap<ThingId, u32>,
    times: BTreeMap<ThingId, TimeSpec>,
    keys: HashMap<String, ThingId>,
    next_id: u64,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.things == other.things && self.edges == other.edges && self.times == other.times
    }
}

pub(crate) const KEY_PROPERTY: &str = "key";

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn thing_count(&self) -> usize {
        self.things.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn add_thing(&mut self, kind: ThingKind, name: Option<&str>) -> ThingId {
        self.add_thing_with(kind, name, BTreeMap::new())
    }

    pub fn add_thing_with(&mut self, kind: ThingKind, name: Option<&str>, properties: BTreeMap<String, Value>) -> ThingId {
        let id = ThingId(self.next_id);
        self.insert_thing(Thing { id, kind, name: name.map(str::to_string), properties });
        id
    }

    pub(crate) fn insert_thing(&mut self, thing: Thing) {
        let id = thing.id;
        self.next_id = self.next_id.max(id.0 + 1);
        if let Some(Value::Text(key)) = thing.properties.get(KEY_PROPERTY) {
            self.keys.insert(key.clone(), id);
        }
        self.index.insert(id, self.things.len());
        self.things.push(thing);
    }

    /// Returns the thing registered under `key`, creating it if absent.
    /// The flag is true when a new thing was created.
    pub fn ensure_keyed(&mut self, kind: ThingKind, key: &str, name: Option<&str>) -> (ThingId, bool) {
        if let Some(&id) = self.keys.get(key) {
            return (id, false);
        }
        let mut props = BTreeMap::new();
        props.insert(KEY_PROPERTY.to_string(), Value::Text(key.to_string()));
        (self.add_thing_with(kind, name, props), true)
    }

    pub fn find_key(&self, key: &str) -> Option<ThingId> {
        self.keys.get(key).copied()
    }

    pub fn thing(&self, id: ThingId) -> Option<&Thing> {
        self.index.get(&id).map(|&i| &self.things[i])
    }

    pub fn contains(&self, id: ThingId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn kind_of(&self, id: ThingId) -> Option<ThingKind> {
        self.thing(id).map(|t| t.kind)
    }

    pub fn name_of(&self, id: ThingId) -> Option<&str> {
        self.thing(id).and_then(|t| t.name.as_deref())
    }

    pub fn property(&self, id: ThingId, key: &str) -> Option<&Value> {
        self.thing(id).and_then(|t| t.properties.get(key))
    }

    pub fn set_property(&mut self, id: ThingId, key: &str, value: Value) -> Result<(), GraphError> {
        let &i = self.index.get(&id).ok_or(GraphError::UnknownThing(id))?;
        if key == KEY_PROPERTY {
            if let Value::Text(k) = &value {
                self.keys.insert(k.clone(), id);
            }
        }
        self.things[i].properties.insert(key.to_string(), value);
        Ok(())
    }

    pub fn things(&self) -> impl Iterator<Item = &Thing> + '_ {
        self.things.iter()
    }

    pub fn things_of_kind(&self, kind: ThingKind) -> Vec<ThingId> {
        self.things.iter().filter(|t| t.kind == kind).map(|t| t.id).collect()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn out_edges(&self, id: ThingId) -> impl Iterator<Item = &Edge> + '_ {
        self.out.get(&id).into_iter().flatten().map(|&i| &self.edges[i])
    }

    pub fn in_edges(&self, id: ThingId) -> impl Iterator<Item = &Edge> + '_ {
        self.inn.get(&id).into_iter().flatten().map(|&i| &self.edges[i])
    }

    pub fn has_edge(&self, edge: &Edge) -> bool {
        self.edge_set.contains(edge)
    }

    /// Adds an edge after validating it. Returns `Ok(false)` when an
    /// identical edge already exists. A seq membership without an order is
    /// appended, so it always creates a new edge.
    pub fn add_edge(&mut self, edge: Edge) -> Result<bool, GraphError> {
        let edge = self.validate(edge)?;
        if let EdgeKind::Member { set: SetKind::Seq, order } = edge.kind {
            let expected = self.seq_len.get(&edge.from).copied().unwrap_or(0);
            let edge = match order {
                None => Edge::new(EdgeKind::Member { set: SetKind::Seq, order: Some(expected) }, edge.from, edge.to),
                Some(o) => {
                    if self.edge_set.contains(&edge) {
                        return Ok(false);
                    }
                    if o != expected {
                        return Err(GraphError::OrderConflict { parent: edge.from, order: o, expected });
                    }
                    edge
                }
            };
            self.seq_len.insert(edge.from, expected + 1);
            self.push_edge(edge);
            return Ok(true);
        }
        if self.edge_set.contains(&edge) {
            return Ok(false);
        }
        self.push_edge(edge);
        Ok(true)
    }

    fn validate(&self, edge: Edge) -> Result<Edge, GraphError> {
        let (from, to) = (edge.from, edge.to);
        let invalid = |reason: &str| GraphError::InvalidEdge { from, to, reason: reason.to_string() };
        let from_kind = self.kind_of(from).ok_or(GraphError::UnknownThing(from))?;
        let to_kind = self.kind_of(to).ok_or(GraphError::UnknownThing(to))?;
        match &edge.kind {
            EdgeKind::Is if from == to => Err(invalid("a thing cannot be an instance of itself")),
            EdgeKind::Has(role) | EdgeKind::Domain(role) if role.is_empty() => Err(invalid("empty role name")),
            EdgeKind::Times => {
                if to_kind != ThingKind::Time || from_kind == ThingKind::Time {
                    return Err(invalid("times edges must point from a non-time thing to a time node"));
                }
                if self.out_edges(from).any(|e| e.kind == EdgeKind::Times && e.to != to) {
                    return Err(invalid("thing already has a time node"));
                }
                Ok(edge)
            }
            EdgeKind::Member { set, order } if *set != SetKind::Seq && order.is_some() => {
                Ok(Edge::new(EdgeKind::Member { set: *set, order: None }, from, to))
            }
            _ => Ok(edge),
        }
    }

    pub(crate) fn push_edge(&mut self, edge: Edge) {
        let i = self.edges.len();
        self.out.entry(edge.from).or_default().push(i);
        self.inn.entry(edge.to).or_default().push(i);
        self.edge_set.insert(edge.clone());
        self.edges.push(edge);
    }

    pub(crate) fn set_seq_len(&mut self, parent: ThingId, len: u32) {
        self.seq_len.insert(parent, len);
    }

    /// Neighbours over matching edges, distinct, in edge insertion order.
    /// Outgoing seq members are returned by position.
    pub fn neighbors(&self, id: ThingId, filter: &EdgeFilter, dir: Direction) -> Vec<ThingId> {
        let mut matched: Vec<&Edge> = match dir {
            Direction::Out => self.out_edges(id).filter(|e| filter.matches(&e.kind)).collect(),
            Direction::In => self.in_edges(id).filter(|e| filter.matches(&e.kind)).collect(),
        };
        if dir == Direction::Out {
            matched.sort_by_key(|e| match e.kind {
                EdgeKind::Member { set: SetKind::Seq, order } => order.unwrap_or(u32::MAX),
                _ => u32::MAX,
            });
        }
        let mut seen = HashSet::new();
        matched
            .into_iter()
            .map(|e| if dir == Direction::Out { e.to } else { e.from })
            .filter(|n| seen.insert(*n))
            .collect()
    }

    /// Members of a seq set in order (duplicates kept).
    pub fn seq_members(&self, id: ThingId) -> Vec<ThingId> {
        let mut members: Vec<(u32, ThingId)> = self
            .out_edges(id)
            .filter_map(|e| match e.kind {
                EdgeKind::Member { set: SetKind::Seq, order } => Some((order.unwrap_or(u32::MAX), e.to)),
                _ => None,
            })
            .collect();
        members.sort();
        members.into_iter().map(|m| m.1).collect()
    }

    /// Attaches `spec` to `id`, merging into its existing time node if any.
    /// Returns the time node.
    pub fn add_times(&mut self, id: ThingId, spec: &TimeSpec) -> Result<ThingId, GraphError> {
        match self.kind_of(id) {
            None => return Err(GraphError::UnknownThing(id)),
            Some(ThingKind::Time) => {
                return Err(GraphError::InvalidEdge { from: id, to: id, reason: "time nodes carry no times edge".into() })
            }
            Some(_) => {}
        }
        if let Some(node) = self.time_node(id) {
            let merged = self.times[&node].union(spec);
            self.times.insert(node, merged);
            return Ok(node);
        }
        let node = self.add_thing(ThingKind::Time, None);
        self.times.insert(node, spec.clone());
        self.add_edge(Edge::new(EdgeKind::Times, id, node))?;
        Ok(node)
    }

    pub fn time_node(&self, id: ThingId) -> Option<ThingId> {
        self.out_edges(id).find(|e| e.kind == EdgeKind::Times).map(|e| e.to)
    }

    /// Time spec of a thing (through its time node), or of a time node.
    pub fn times_of(&self, id: ThingId) -> Option<&TimeSpec> {
        if let Some(spec) = self.times.get(&id) {
            return Some(spec);
        }
        self.time_node(id).and_then(|node| self.times.get(&node))
    }

    pub(crate) fn time_table(&self) -> &BTreeMap<ThingId, TimeSpec> {
        &self.times
    }

    pub(crate) fn set_time_spec(&mut self, node: ThingId, spec: TimeSpec) {
        self.times.insert(node, spec);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seq_order_append_and_conflict() {
        let mut g = Graph::new();
        let p = g.add_thing(ThingKind::Process, None);
        let a = g.add_thing(ThingKind::Coincidence, None);
        let b = g.add_thing(ThingKind::Coincidence, None);
        assert!(g.add_edge(Edge::member(SetKind::Seq, p, b)).unwrap());
        assert!(g.add_edge(Edge::member(SetKind::Seq, p, a)).unwrap());
        assert_eq!(g.seq_members(p), vec![b, a]);
        let explicit = Edge::new(EdgeKind::Member { set: SetKind::Seq, order: Some(0) }, p, b);
        assert!(!g.add_edge(explicit).unwrap());
        let bad = Edge::new(EdgeKind::Member { set: SetKind::Seq, order: Some(5) }, p, a);
        assert!(matches!(g.add_edge(bad), Err(GraphError::OrderConflict { expected: 2, .. })));
    }

    #[test]
    fn edges_are_idempotent_and_validated() {
        let mut g = Graph::new();
        let e = g.add_thing(ThingKind::Event, None);
        let a = g.add_thing(ThingKind::Appearance, Some("sanctions"));
        assert!(g.add_edge(Edge::is(e, a)).unwrap());
        assert!(!g.add_edge(Edge::is(e, a)).unwrap());
        assert_eq!(g.edge_count(), 1);
        assert!(g.add_edge(Edge::is(e, e)).is_err());
        assert!(g.add_edge(Edge::has(a, "", e)).is_err());
        assert_eq!(g.add_edge(Edge::is(e, ThingId(99))), Err(GraphError::UnknownThing(ThingId(99))));
        assert!(g.add_edge(Edge::new(EdgeKind::Times, e, a)).is_err());
    }

    #[test]
    fn times_merge_into_one_node() {
        let mut g = Graph::new();
        let e = g.add_thing(ThingKind::Process, None);
        let n1 = g.add_times(e, &TimeSpec::point(3)).unwrap();
        let n2 = g.add_times(e, &TimeSpec::point(4)).unwrap();
        assert_eq!(n1, n2);
        assert_eq!(g.times_of(e).unwrap().intervals(), &[(3, 4)]);
        assert_eq!(g.times_of(n1), g.times_of(e));
    }

    #[test]
    fn neighbors_distinct_both_directions() {
        let mut g = Graph::new();
        let s = g.add_thing(ThingKind::Situation, None);
        let a = g.add_thing(ThingKind::Appearance, None);
        let b = g.add_thing(ThingKind::Appearance, None);
        g.add_edge(Edge::member(SetKind::And, s, a)).unwrap();
        g.add_edge(Edge::member(SetKind::And, s, b)).unwrap();
        g.add_edge(Edge::member(SetKind::And, s, a)).unwrap();
        assert_eq!(g.neighbors(s, &EdgeFilter::Member(Some(SetKind::And)), Direction::Out), vec![a, b]);
        assert_eq!(g.neighbors(a, &EdgeFilter::Member(None), Direction::In), vec![s]);
        assert!(g.neighbors(a, &EdgeFilter::Is, Direction::In).is_empty());
    }

    #[test]
    fn keyed_things_are_reused() {
        let mut g = Graph::new();
        let (a, new_a) = g.ensure_keyed(ThingKind::Actor, "actor:eu", Some("EU"));
        let (b, new_b) = g.ensure_keyed(ThingKind::Actor, "actor:eu", Some("EU"));
        assert!(new_a && !new_b);
        assert_eq!(a, b);
        assert_eq!(g.find_key("actor:eu"), Some(a));
    }
}
