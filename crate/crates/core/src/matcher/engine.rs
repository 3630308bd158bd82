use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use super::token::{surface_of, Token};
use super::types::{check_type, TypeEnv};
use crate::pattern_lang::Pattern;

const ARTICLES: [&str; 3] = ["a", "an", "the"];

/// A variable's value. `start..end` is the bound token range; `text` is the
/// surface text with leading articles removed.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Binding {
    pub start: usize,
    pub end: usize,
    pub text: String,
}

/// One way a pattern matches the token range `start..end`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Match {
    pub start: usize,
    pub end: usize,
    pub bindings: BTreeMap<String, Binding>,
}

impl Match {
    pub fn text(&self, var: &str) -> Option<&str> {
        self.bindings.get(var).map(|b| b.text.as_str())
    }
}

type Spans = BTreeMap<String, (usize, usize)>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Partial {
    end: usize,
    spans: Spans,
}

struct Engine<'a> {
    tokens: &'a [Token],
    env: &'a TypeEnv,
    memo: HashMap<(usize, usize), Rc<Vec<Partial>>>,
    windows: HashMap<usize, Rc<BTreeSet<(usize, usize, Spans)>>>,
}

fn key(p: &Pattern) -> usize {
    p as *const Pattern as usize
}

impl<'a> Engine<'a> {
    fn new(tokens: &'a [Token], env: &'a TypeEnv) -> Self {
        Engine { tokens, env, memo: HashMap::new(), windows: HashMap::new() }
    }

    fn norms(&self, (s, e): (usize, usize)) -> impl Iterator<Item = &str> + '_ {
        self.tokens[s..e].iter().map(|t| t.norm.as_str())
    }

    /// Unions two binding sets. A variable bound twice must have equal
    /// normalized text; the earlier span is kept.
    fn merge(&self, a: &Spans, b: &Spans) -> Option<Spans> {
        let mut out = a.clone();
        for (name, &span) in b {
            match out.get(name) {
                Some(&prev) => {
                    if !self.norms(prev).eq(self.norms(span)) {
                        return None;
                    }
                    if span < prev {
                        out.insert(name.clone(), span);
                    }
                }
                None => {
                    out.insert(name.clone(), span);
                }
            }
        }
        Some(out)
    }

    /// All matches of `p` beginning at token `start`.
    fn at(&mut self, p: &Pattern, start: usize) -> Rc<Vec<Partial>> {
        if let Some(hit) = self.memo.get(&(key(p), start)) {
            return Rc::clone(hit);
        }
        let n = self.tokens.len();
        let result: Vec<Partial> = match p {
            Pattern::Literal(s) => {
                if start < n && self.tokens[start].norm == s.to_lowercase() {
                    vec![Partial { end: start + 1, spans: Spans::new() }]
                } else {
                    Vec::new()
                }
            }
            Pattern::Variable(name) => {
                // Shortest spans first.
                let ty = self.env.get(name);
                (start + 1..=n)
                    .filter(|&end| check_type(&self.tokens[start..end], ty, self.env))
                    .map(|end| Partial { end, spans: Spans::from([(name.clone(), (start, end))]) })
                    .collect()
            }
            Pattern::Seq(items) => {
                let mut states = BTreeSet::from([(start, Spans::new())]);
                for item in items {
                    let mut next = BTreeSet::new();
                    for (pos, spans) in &states {
                        if *pos >= n {
                            continue;
                        }
                        for partial in self.at(item, *pos).iter() {
                            if let Some(merged) = self.merge(spans, &partial.spans) {
                                next.insert((partial.end, merged));
                            }
                        }
                    }
                    states = next;
                    if states.is_empty() {
                        break;
                    }
                }
                states.into_iter().map(|(end, spans)| Partial { end, spans }).collect()
            }
            Pattern::Any(items) => {
                let mut all = BTreeSet::new();
                for item in items {
                    all.extend(self.at(item, start).iter().cloned());
                }
                all.into_iter().collect()
            }
            Pattern::And(_) => self
                .windows(p)
                .iter()
                .filter(|(s, _, _)| *s == start)
                .map(|(_, end, spans)| Partial { end: *end, spans: spans.clone() })
                .collect(),
        };
        let result = Rc::new(result);
        self.memo.insert((key(p), start), Rc::clone(&result));
        result
    }

    /// Every window in which each child of an and-set matches at least once;
    /// the window is the smallest range covering one match per child.
    fn windows(&mut self, p: &Pattern) -> Rc<BTreeSet<(usize, usize, Spans)>> {
        if let Some(hit) = self.windows.get(&key(p)) {
            return Rc::clone(hit);
        }
        let mut combos = BTreeSet::from([(usize::MAX, 0, Spans::new())]);
        for item in p.children() {
            let mut found = Vec::new();
            for s in 0..self.tokens.len() {
                for partial in self.at(item, s).iter() {
                    found.push((s, partial.end, partial.spans.clone()));
                }
            }
            let mut next = BTreeSet::new();
            for (lo, hi, spans) in &combos {
                for (s, e, child) in &found {
                    if let Some(merged) = self.merge(spans, child) {
                        next.insert(((*lo).min(*s), (*hi).max(*e), merged));
                    }
                }
            }
            combos = next;
        }
        let combos = Rc::new(combos);
        self.windows.insert(key(p), Rc::clone(&combos));
        combos
    }

    fn binding(&self, (start, end): (usize, usize)) -> Binding {
        let mut from = start;
        while end - from > 1 && ARTICLES.contains(&self.tokens[from].norm.as_str()) {
            from += 1;
        }
        Binding { start, end, text: surface_of(&self.tokens[from..end]) }
    }
}

/// All matches of `pattern` in `tokens`, at every start position, sorted by
/// start, end and bindings.
///
/// Literals compare case-insensitively, sequences match their elements
/// back to back, any-sets match when one alternative does, and and-sets
/// match the smallest window containing a match of every element in any
/// order. Variables bind every non-empty token range admitted by their type
/// in `env`; a variable used twice must bind equal text both times.
pub fn match_pattern(pattern: &Pattern, tokens: &[Token], env: &TypeEnv) -> Vec<Match> {
    let mut engine = Engine::new(tokens, env);
    let mut out = BTreeSet::new();
    for start in 0..tokens.len() {
        for partial in engine.at(pattern, start).iter() {
            let bindings = partial
                .spans
                .iter()
                .map(|(name, &span)| (name.clone(), engine.binding(span)))
                .collect();
            out.insert(Match { start, end: partial.end, bindings });
        }
    }
    out.into_iter().collect()
}

/// Whether `pattern` matches the whole token slice.
pub(crate) fn matches_whole(pattern: &Pattern, tokens: &[Token], env: &TypeEnv) -> bool {
    let mut engine = Engine::new(tokens, env);
    !tokens.is_empty() && engine.at(pattern, 0).iter().any(|p| p.end == tokens.len())
}
