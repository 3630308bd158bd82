//! Typed graph of things connected by `is`, `has`, `times` and membership
//! edges, with time specs and JSON snapshots.

mod snapshot;
mod store;
mod time;
mod weighted;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use store::{Direction, EdgeFilter, Graph};
pub use time::TimeSpec;
pub use weighted::WeightedSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ThingId(pub u64);

impl fmt::Display for ThingId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThingKind {
    Actor,
    Role,
    Appearance,
    Event,
    Situation,
    Coincidence,
    Scenario,
    Process,
    Generic,
    /// Holder of a [`TimeSpec`]; the target of `times` edges.
    Time,
}

impl ThingKind {
    pub const ALL: [ThingKind; 10] = [
        ThingKind::Actor,
        ThingKind::Role,
        ThingKind::Appearance,
        ThingKind::Event,
        ThingKind::Situation,
        ThingKind::Coincidence,
        ThingKind::Scenario,
        ThingKind::Process,
        ThingKind::Generic,
        ThingKind::Time,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ThingKind::Actor => "actor",
            ThingKind::Role => "role",
            ThingKind::Appearance => "appearance",
            ThingKind::Event => "event",
            ThingKind::Situation => "situation",
            ThingKind::Coincidence => "coincidence",
            ThingKind::Scenario => "scenario",
            ThingKind::Process => "process",
            ThingKind::Generic => "generic",
            ThingKind::Time => "time",
        }
    }
}

impl fmt::Display for ThingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Property value. Serialized as a bare string, a bare number, or
/// `{"tick": n}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawValue", into = "RawValue")]
pub enum Value {
    Text(String),
    Number(f64),
    Tick(i64),
}

impl Value {
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(n) => Some(*n),
            Value::Tick(t) => Some(*t as f64),
            Value::Text(_) => None,
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<f64> for Value {
    fn from(n: f64) -> Self {
        Value::Number(n)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TickRecord {
    tick: i64,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawValue {
    Text(String),
    Number(f64),
    Tick(TickRecord),
}

impl From<RawValue> for Value {
    fn from(raw: RawValue) -> Self {
        match raw {
            RawValue::Text(s) => Value::Text(s),
            RawValue::Number(n) => Value::Number(n),
            RawValue::Tick(t) => Value::Tick(t.tick),
        }
    }
}

impl From<Value> for RawValue {
    fn from(v: Value) -> Self {
        match v {
            Value::Text(s) => RawValue::Text(s),
            Value::Number(n) => RawValue::Number(n),
            Value::Tick(tick) => RawValue::Tick(TickRecord { tick }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Thing {
    pub id: ThingId,
    pub kind: ThingKind,
    pub name: Option<String>,
    pub properties: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SetKind {
    And,
    Seq,
    Any,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeKind {
    Is,
    Has(String),
    Times,
    /// Membership in an and/seq/any set. Seq members carry their position;
    /// a seq edge added with `order: None` is appended at the end.
    Member { set: SetKind, order: Option<u32> },
    /// Links a role slot of an appearance to its domain (an any-set).
    Domain(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub kind: EdgeKind,
    pub from: ThingId,
    pub to: ThingId,
}

impl Edge {
    pub fn new(kind: EdgeKind, from: ThingId, to: ThingId) -> Self {
        Edge { kind, from, to }
    }

    pub fn is(from: ThingId, to: ThingId) -> Self {
        Edge::new(EdgeKind::Is, from, to)
    }

    pub fn has(from: ThingId, role: &str, to: ThingId) -> Self {
        Edge::new(EdgeKind::Has(role.to_string()), from, to)
    }

    pub fn member(set: SetKind, from: ThingId, to: ThingId) -> Self {
        Edge::new(EdgeKind::Member { set, order: None }, from, to)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GraphError {
    #[error("unknown thing {0}")]
    UnknownThing(ThingId),
    #[error("invalid edge from {from} to {to}: {reason}")]
    InvalidEdge { from: ThingId, to: ThingId, reason: String },
    #[error("seq member order {order} conflicts with next free position {expected} of {parent}")]
    OrderConflict { parent: ThingId, order: u32, expected: u32 },
    #[error("malformed snapshot: {0}")]
    Malformed(String),
}
