//! The pattern notation and the definition statements built on it.
//!
//! Patterns are written as whitespace-separated elements: bare words,
//! quoted phrases, `$variables`, and nested sets `{any}`, `(and)`, `[seq]`.
//! Definition files attach patterns and typed roles to named things:
//!
//! ```text
//! There name item_quantity_cost patterns "On sale: $item, quantity $amount, prices $cost",
//!   has item, amount, cost.
//! Cost is money. Amount is number. Item is word.
//! ```

mod ast;
mod definitions;
mod parse;
mod render;

pub use ast::{list_variables, AtomicType, Pattern, ThingDefinition, TypeRef};
pub use definitions::{parse_definitions, DefinitionError};
pub use parse::{parse_pattern, PatternError};
pub use render::{render_pattern, render_with};
