//! Pattern-driven event extraction and scenario mining over a temporal
//! knowledge graph.
//!
//! The crate is split along the processing path:
//!
//! - [`pattern_lang`] parses the pattern notation (`{any}`, `(and)`, `[seq]`,
//!   `$variables`) and the definition statements that attach patterns and
//!   typed roles to named things.
//! - [`matcher`] tokenizes text, matches patterns with variable binding and
//!   turns accepted matches into event nodes.
//! - [`knowledge_graph`] is the typed graph store with JSON snapshots.
//! - [`queries`] is the functional-set algebra over the graph (actors of a
//!   role, events at a time, situations of a coincidence, ...).
//! - [`mining`] runs the nine analysis stages from events up to scenarios,
//!   situational forks and triggers.

pub mod knowledge_graph;
pub mod matcher;
pub mod mining;
pub mod pattern_lang;
pub mod queries;

pub use knowledge_graph::{Edge, EdgeKind, Graph, GraphError, SetKind, ThingId, ThingKind, TimeSpec, Value, WeightedSet};
pub use matcher::{extract_corpus, extract_events, match_pattern, parse_corpus, tokenize, Document, Match, Token, TokenClass, TypeEnv};
pub use mining::{run_pipeline, MiningConfig, MiningError, MiningReport, StageRegistry};
pub use pattern_lang::{parse_definitions, parse_pattern, render_pattern, Pattern, ThingDefinition, TypeRef};
pub use queries::{Queries, QueryError, QueryRegistry, QueryScope};
