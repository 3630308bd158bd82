use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{Edge, EdgeKind, Graph, GraphError, SetKind, Thing, ThingId, ThingKind, TimeSpec, Value};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Snapshot {
    things: Vec<ThingRecord>,
    edges: Vec<EdgeRecord>,
    times: Vec<TimeRecord>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ThingRecord {
    id: u64,
    kind: ThingKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    properties: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum EdgeTag {
    Is,
    Has,
    Times,
    Member,
    Domain,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    kind: EdgeTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    role: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    set_kind: Option<SetKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    order: Option<u32>,
    from: u64,
    to: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TimeRecord {
    id: u64,
    intervals: TimeSpec,
}

impl EdgeRecord {
    fn from_edge(edge: &Edge) -> Self {
        let (kind, role, set_kind, order) = match &edge.kind {
            EdgeKind::Is => (EdgeTag::Is, None, None, None),
            EdgeKind::Has(r) => (EdgeTag::Has, Some(r.clone()), None, None),
            EdgeKind::Times => (EdgeTag::Times, None, None, None),
            EdgeKind::Member { set, order } => (EdgeTag::Member, None, Some(*set), *order),
            EdgeKind::Domain(r) => (EdgeTag::Domain, Some(r.clone()), None, None),
        };
        EdgeRecord { kind, role, set_kind, order, from: edge.from.0, to: edge.to.0 }
    }

    fn into_edge(self, i: usize) -> Result<Edge, GraphError> {
        let bad = |what: &str| GraphError::Malformed(format!("edge {i}: {what}"));
        let kind = match self.kind {
            EdgeTag::Has | EdgeTag::Domain => {
                if self.set_kind.is_some() || self.order.is_some() {
                    return Err(bad("role edges carry no set kind or order"));
                }
                let role = self.role.ok_or_else(|| bad("missing role"))?;
                if self.kind == EdgeTag::Has {
                    EdgeKind::Has(role)
                } else {
                    EdgeKind::Domain(role)
                }
            }
            EdgeTag::Member => {
                if self.role.is_some() {
                    return Err(bad("member edges carry no role"));
                }
                let set = self.set_kind.ok_or_else(|| bad("missing set_kind"))?;
                if (set == SetKind::Seq) != self.order.is_some() {
                    return Err(bad("seq members need an order, other sets none"));
                }
                EdgeKind::Member { set, order: self.order }
            }
            EdgeTag::Is | EdgeTag::Times => {
                if self.role.is_some() || self.set_kind.is_some() || self.order.is_some() {
                    return Err(bad("unexpected attributes"));
                }
                if self.kind == EdgeTag::Is {
                    EdgeKind::Is
                } else {
                    EdgeKind::Times
                }
            }
        };
        Ok(Edge::new(kind, ThingId(self.from), ThingId(self.to)))
    }
}

impl Graph {
    pub fn to_json(&self) -> String {
        let snapshot = Snapshot {
            things: self
                .things()
                .map(|t| ThingRecord { id: t.id.0, kind: t.kind, name: t.name.clone(), properties: t.properties.clone() })
                .collect(),
            edges: self.edges().iter().map(EdgeRecord::from_edge).collect(),
            times: self.time_table().iter().map(|(id, spec)| TimeRecord { id: id.0, intervals: spec.clone() }).collect(),
        };
        serde_json::to_string_pretty(&snapshot).expect("snapshot serialization cannot fail")
    }

    /// Parses and validates a snapshot. Truncated or inconsistent input is
    /// rejected as a whole.
    pub fn from_json(text: &str) -> Result<Graph, GraphError> {
        let snapshot: Snapshot = serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))?;
        let mut graph = Graph::new();
        for record in snapshot.things {
            let id = ThingId(record.id);
            if graph.contains(id) {
                return Err(GraphError::Malformed(format!("duplicate thing id {id}")));
            }
            graph.insert_thing(Thing { id, kind: record.kind, name: record.name, properties: record.properties });
        }

        let mut spec_ids = HashSet::new();
        for record in snapshot.times {
            let id = ThingId(record.id);
            if graph.kind_of(id) != Some(ThingKind::Time) {
                return Err(GraphError::Malformed(format!("times entry {id} is not a time node")));
            }
            if !spec_ids.insert(id) {
                return Err(GraphError::Malformed(format!("duplicate times entry {id}")));
            }
            graph.set_time_spec(id, record.intervals);
        }
        if let Some(t) = graph.things().find(|t| t.kind == ThingKind::Time && !spec_ids.contains(&t.id)) {
            return Err(GraphError::Malformed(format!("time node {} has no intervals", t.id)));
        }

        let mut seq_orders: HashMap<ThingId, Vec<u32>> = HashMap::new();
        let mut times_from = HashSet::new();
        for (i, record) in snapshot.edges.into_iter().enumerate() {
            let edge = record.into_edge(i)?;
            for end in [edge.from, edge.to] {
                if !graph.contains(end) {
                    return Err(GraphError::UnknownThing(end));
                }
            }
            if graph.has_edge(&edge) {
                return Err(GraphError::Malformed(format!("edge {i} is duplicated")));
            }
            match &edge.kind {
                EdgeKind::Is if edge.from == edge.to => return Err(GraphError::Malformed(format!("edge {i} is a self instance"))),
                EdgeKind::Has(r) | EdgeKind::Domain(r) if r.is_empty() => {
                    return Err(GraphError::Malformed(format!("edge {i} has an empty role")))
                }
                EdgeKind::Times => {
                    let ok = graph.kind_of(edge.to) == Some(ThingKind::Time)
                        && graph.kind_of(edge.from) != Some(ThingKind::Time)
                        && times_from.insert(edge.from);
                    if !ok {
                        return Err(GraphError::Malformed(format!("edge {i} is not a valid times edge")));
                    }
                }
                EdgeKind::Member { set: SetKind::Seq, order: Some(o) } => seq_orders.entry(edge.from).or_default().push(*o),
                _ => {}
            }
            graph.push_edge(edge);
        }
        for (parent, mut orders) in seq_orders {
            orders.sort_unstable();
            if orders.iter().enumerate().any(|(i, &o)| o as usize != i) {
                return Err(GraphError::Malformed(format!("seq orders of {parent} are not 0..n")));
            }
            graph.set_seq_len(parent, orders.len() as u32);
        }
        Ok(graph)
    }
}
