//! Tokenizing, pattern matching with typed variable binding, and event
//! extraction into the graph.

mod corpus;
mod engine;
mod extract;
mod token;
mod types;

pub use corpus::{parse_corpus, parse_corpus_line, CorpusError, Document, TickGranularity};
pub use engine::{match_pattern, Binding, Match};
pub use extract::{draft_events, extract_corpus, extract_events, instantiate_event, EventDraft, ExtractError};
pub use token::{surface_of, tokenize, Token, TokenClass};
pub use types::{check_type, TypeEnv};
