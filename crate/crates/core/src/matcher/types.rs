use std::collections::BTreeMap;

use chrono::NaiveDate;

use super::engine::matches_whole;
use super::token::{Token, TokenClass};
use crate::pattern_lang::{AtomicType, ThingDefinition, TypeRef};

/// Role name to type, used to restrict what a variable may bind.
/// Lookups are case-insensitive; unknown roles are untyped.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TypeEnv {
    roles: BTreeMap<String, TypeRef>,
}

impl TypeEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_definition(def: &ThingDefinition) -> Self {
        TypeEnv { roles: def.role_types.clone() }
    }

    pub fn with(mut self, role: &str, ty: TypeRef) -> Self {
        self.roles.insert(role.to_lowercase(), ty);
        self
    }

    pub fn get(&self, role: &str) -> &TypeRef {
        static UNTYPED: TypeRef = TypeRef::Untyped;
        self.roles.get(&role.to_lowercase()).unwrap_or(&UNTYPED)
    }
}

const CURRENCY: [&str; 3] = ["$", "\u{20AC}", "\u{00A3}"];

fn contiguous(tokens: &[Token]) -> bool {
    tokens.windows(2).all(|w| w[0].span.1 == w[1].span.0)
}

fn is_time(tokens: &[Token]) -> bool {
    if let [t] = tokens {
        return t.class == TokenClass::Number && t.surface.parse::<i64>().is_ok();
    }
    if !contiguous(tokens) {
        return false;
    }
    let text: String = tokens.iter().map(|t| t.surface.as_str()).collect();
    let digits = |s: &str, n: std::ops::RangeInclusive<usize>| {
        n.contains(&s.len()) && s.bytes().all(|b| b.is_ascii_digit())
    };
    match tokens.len() {
        5 => {
            let parts: Vec<&str> = text.split('-').collect();
            parts.len() == 3
                && digits(parts[0], 4..=4)
                && digits(parts[1], 2..=2)
                && digits(parts[2], 2..=2)
                && NaiveDate::parse_from_str(&text, "%Y-%m-%d").is_ok()
        }
        3 => match text.split_once(':') {
            Some((h, m)) if digits(h, 1..=2) && digits(m, 2..=2) => {
                h.parse::<u32>().is_ok_and(|h| h < 24) && m.parse::<u32>().is_ok_and(|m| m < 60)
            }
            _ => false,
        },
        _ => false,
    }
}

/// Whether a non-empty token slice is an admissible value of `ty`.
///
/// `time` accepts an integer tick, a `YYYY-MM-DD` date or an `HH:MM` clock
/// time; dates and clock times span several tokens and must be written
/// without spaces.
pub fn check_type(tokens: &[Token], ty: &TypeRef, env: &TypeEnv) -> bool {
    if tokens.is_empty() {
        return false;
    }
    match ty {
        TypeRef::Untyped => true,
        TypeRef::Atomic(AtomicType::Word) => matches!(tokens, [t] if t.class == TokenClass::Word),
        TypeRef::Atomic(AtomicType::Number) => matches!(tokens, [t] if t.class == TokenClass::Number),
        TypeRef::Atomic(AtomicType::Money) => matches!(
            tokens,
            [sign, amount] if sign.class == TokenClass::Punct
                && CURRENCY.contains(&sign.surface.as_str())
                && amount.class == TokenClass::Number
        ),
        TypeRef::Atomic(AtomicType::Time) => is_time(tokens),
        TypeRef::Composite(pattern) => matches_whole(pattern, tokens, env),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::tokenize;
    use crate::pattern_lang::parse_pattern;

    fn check(text: &str, ty: TypeRef) -> bool {
        check_type(&tokenize(text), &ty, &TypeEnv::new())
    }

    #[test]
    fn money() {
        assert!(check("$3.50", TypeRef::Atomic(AtomicType::Money)));
        assert!(check("\u{20AC}12", TypeRef::Atomic(AtomicType::Money)));
        assert!(!check("3.50", TypeRef::Atomic(AtomicType::Money)));
        assert!(!check("# 3", TypeRef::Atomic(AtomicType::Money)));
    }

    #[test]
    fn number_and_word() {
        assert!(!check("apples", TypeRef::Atomic(AtomicType::Number)));
        assert!(check("12", TypeRef::Atomic(AtomicType::Number)));
        assert!(check("apples", TypeRef::Atomic(AtomicType::Word)));
        assert!(!check("red apples", TypeRef::Atomic(AtomicType::Word)));
    }

    #[test]
    fn time_shapes() {
        let time = || TypeRef::Atomic(AtomicType::Time);
        assert!(check("2018-03-15", time()));
        assert!(!check("2018-13-15", time()));
        assert!(!check("2018 - 03 - 15", time()));
        assert!(check("09:30", time()));
        assert!(check("9:30", time()));
        assert!(!check("25:00", time()));
        assert!(check("1700", time()));
        assert!(!check("17.5", time()));
        assert!(!check("noon", time()));
    }

    #[test]
    fn composite() {
        let people = TypeRef::Composite(parse_pattern("{John Jane Joe Joi}").unwrap());
        assert!(check("john", people.clone()));
        assert!(!check("jack", people.clone()));
        assert!(!check("john jane", people));
    }

    #[test]
    fn untyped_needs_tokens() {
        assert!(check("anything at all", TypeRef::Untyped));
        assert!(!check("", TypeRef::Untyped));
    }
}
