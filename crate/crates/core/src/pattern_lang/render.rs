use super::ast::Pattern;
use super::parse::{is_double_quote, is_single_quote, is_special};

/// Canonical text for a pattern; parsing it back yields an equal pattern.
pub fn render_pattern(pattern: &Pattern) -> String {
    render_with(pattern, &|_| None)
}

/// Renders a pattern, replacing each variable for which `fill` returns a
/// value with that text verbatim.
pub fn render_with(pattern: &Pattern, fill: &dyn Fn(&str) -> Option<String>) -> String {
    match pattern {
        Pattern::Seq(items) if items.len() > 1 => {
            items.iter().map(|p| element(p, fill)).collect::<Vec<_>>().join(" ")
        }
        _ => element(pattern, fill),
    }
}

fn literal(s: &str) -> String {
    if !s.chars().any(is_special) {
        s.to_string()
    } else if s.chars().any(is_single_quote) {
        format!("\"{s}\"")
    } else {
        format!("'{s}'")
    }
}

fn phrase(items: &[Pattern]) -> Option<String> {
    if items.len() < 2 {
        return None;
    }
    let words: Option<Vec<&str>> = items
        .iter()
        .map(|p| match p {
            Pattern::Literal(s) => Some(s.as_str()),
            _ => None,
        })
        .collect();
    let words = words?;
    let has = |f: fn(char) -> bool| words.iter().any(|w| w.chars().any(f));
    let body = words.join(" ");
    if !has(is_single_quote) {
        Some(format!("'{body}'"))
    } else if !has(is_double_quote) {
        Some(format!("\"{body}\""))
    } else {
        None
    }
}

fn element(pattern: &Pattern, fill: &dyn Fn(&str) -> Option<String>) -> String {
    let set = |open: &str, close: &str, items: &[Pattern]| {
        let inner: Vec<String> = items.iter().map(|p| element(p, fill)).collect();
        format!("{open}{}{close}", inner.join(" "))
    };
    match pattern {
        Pattern::Literal(s) => literal(s),
        Pattern::Variable(name) => fill(name).unwrap_or_else(|| format!("${name}")),
        Pattern::Any(items) => set("{", "}", items),
        Pattern::And(items) => set("(", ")", items),
        Pattern::Seq(items) => phrase(items).unwrap_or_else(|| set("[", "]", items)),
    }
}
