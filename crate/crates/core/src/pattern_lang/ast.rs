use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::parse::{parse_pattern, PatternError};
use crate::matcher::tokenize;

/// A parsed pattern.
///
/// Literals keep the text as written; matching is case-insensitive.
/// Variables are stored without the `$` sigil. Their types come from the
/// role declarations of the owning definition, not from the pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pattern {
    Literal(String),
    Any(Vec<Pattern>),
    And(Vec<Pattern>),
    Seq(Vec<Pattern>),
    Variable(String),
}

impl Pattern {
    pub fn literal(s: impl Into<String>) -> Self {
        Pattern::Literal(s.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Pattern::Variable(name.into())
    }

    pub fn children(&self) -> &[Pattern] {
        match self {
            Pattern::Any(c) | Pattern::And(c) | Pattern::Seq(c) => c,
            Pattern::Literal(_) | Pattern::Variable(_) => &[],
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(Pattern::node_count).sum::<usize>()
    }

    pub fn has_variables(&self) -> bool {
        match self {
            Pattern::Variable(_) => true,
            _ => self.children().iter().any(Pattern::has_variables),
        }
    }

    /// Checks the structural invariants the parser guarantees: sets are
    /// non-empty, literals are exactly one token, variable names are
    /// identifier-like.
    pub fn is_valid(&self) -> bool {
        match self {
            Pattern::Literal(s) => {
                let toks = tokenize(s);
                toks.len() == 1 && toks[0].surface == *s
            }
            Pattern::Variable(name) => {
                !name.is_empty() && name.chars().all(|c| c.is_alphanumeric() || c == '_')
            }
            Pattern::Any(c) | Pattern::And(c) | Pattern::Seq(c) => {
                !c.is_empty() && c.iter().all(Pattern::is_valid)
            }
        }
    }
}

/// Variable names in order of first occurrence, without repeats. The
/// length of the result is the arity of the pattern.
pub fn list_variables(pattern: &Pattern) -> Vec<String> {
    fn walk(p: &Pattern, out: &mut Vec<String>) {
        match p {
            Pattern::Variable(name) => {
                if !out.contains(name) {
                    out.push(name.clone());
                }
            }
            _ => p.children().iter().for_each(|c| walk(c, out)),
        }
    }
    let mut out = Vec::new();
    walk(pattern, &mut out);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomicType {
    Word,
    Time,
    Number,
    Money,
}

impl AtomicType {
    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_lowercase().as_str() {
            "word" => Some(AtomicType::Word),
            "time" => Some(AtomicType::Time),
            "number" => Some(AtomicType::Number),
            "money" => Some(AtomicType::Money),
            _ => None,
        }
    }
}

/// Domain restriction for a role.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum TypeRef {
    Atomic(AtomicType),
    /// A variable-free pattern the bound text must match completely.
    Composite(Pattern),
    #[default]
    Untyped,
}

/// A named thing with its patterns and declared roles.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ThingDefinition {
    pub name: String,
    pub patterns: Vec<Pattern>,
    /// Role names from the `has` list, lowercased.
    pub roles: Vec<String>,
    pub role_types: BTreeMap<String, TypeRef>,
}

impl ThingDefinition {
    pub fn new(name: impl Into<String>) -> Self {
        ThingDefinition { name: name.into(), ..Default::default() }
    }

    /// The explicit patterns, or the pattern implied by the name when none
    /// were given.
    pub fn effective_patterns(&self) -> Result<Vec<Pattern>, PatternError> {
        if self.patterns.is_empty() {
            Ok(vec![parse_pattern(&self.name)?])
        } else {
            Ok(self.patterns.clone())
        }
    }

    /// Roles from the `has` list followed by pattern variables not already
    /// listed, all lowercased.
    pub fn all_roles(&self) -> Vec<String> {
        let mut roles = self.roles.clone();
        for p in &self.patterns {
            for v in list_variables(p) {
                let v = v.to_lowercase();
                if !roles.contains(&v) {
                    roles.push(v);
                }
            }
        }
        roles
    }

    pub fn role_type(&self, role: &str) -> &TypeRef {
        static UNTYPED: TypeRef = TypeRef::Untyped;
        self.role_types.get(&role.to_lowercase()).unwrap_or(&UNTYPED)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn variables_deduplicated_in_order() {
        let p = parse_pattern("$a $b $a").unwrap();
        assert_eq!(list_variables(&p), ["a", "b"]);
    }

    #[test]
    fn sanctions_pattern_has_arity_two() {
        let p = parse_pattern(
            "{obama trump} {forced suggested} $organization to {impose implement apply} sanctions against $target",
        )
        .unwrap();
        assert_eq!(list_variables(&p), ["organization", "target"]);
    }

    #[test]
    fn nullary_pattern() {
        let p = parse_pattern("{'trump' 'us president'}").unwrap();
        assert!(list_variables(&p).is_empty());
    }

    #[test]
    fn implicit_pattern_from_name() {
        let d = ThingDefinition::new("person");
        assert_eq!(d.effective_patterns().unwrap(), vec![Pattern::literal("person")]);
    }

    #[test]
    fn validity() {
        assert!(Pattern::literal("abc").is_valid());
        assert!(!Pattern::literal("a b").is_valid());
        assert!(!Pattern::literal("a.b").is_valid());
        assert!(!Pattern::Any(vec![]).is_valid());
        assert!(!Pattern::var("").is_valid());
    }
}
