use std::collections::{BTreeMap, HashMap};

use super::itemsets::closed_itemsets;
use super::{event_appearance, PipelineContext, Stage};
use crate::knowledge_graph::{Edge, EdgeKind, GraphError, SetKind, ThingKind, Value};
use crate::matcher::{tokenize, Token};

/// A template covering several equal-length token sequences. `None`
/// slots are variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Generalization {
    pub slots: Vec<Option<String>>,
    /// Indices of the covered sequences.
    pub covered: Vec<usize>,
    /// Observed tokens for each variable slot, sorted.
    pub domains: Vec<Vec<String>>,
}

impl Generalization {
    /// Template text with variables written `$x1`, `$x2`, ... left to right.
    pub fn render(&self) -> String {
        let mut k = 0;
        let parts: Vec<String> = self
            .slots
            .iter()
            .map(|slot| match slot {
                Some(tok) => tok.clone(),
                None => {
                    k += 1;
                    format!("$x{k}")
                }
            })
            .collect();
        parts.join(" ")
    }
}

/// Generalizations of equal-length sequences: every maximal set of
/// `(position, token)` anchors shared by at least `min_support` sequences,
/// with the remaining positions turned into variables.
pub fn anti_unify(sequences: &[Vec<String>], min_support: usize) -> Vec<Generalization> {
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, s) in sequences.iter().enumerate() {
        if !s.is_empty() {
            groups.entry(s.len()).or_default().push(i);
        }
    }
    let mut out = Vec::new();
    for (len, members) in groups {
        let mut ids: HashMap<(usize, &str), u32> = HashMap::new();
        let mut items: Vec<(usize, &str)> = Vec::new();
        let transactions: Vec<Vec<u32>> = members
            .iter()
            .map(|&m| {
                sequences[m]
                    .iter()
                    .enumerate()
                    .map(|(pos, tok)| {
                        *ids.entry((pos, tok.as_str())).or_insert_with(|| {
                            items.push((pos, tok.as_str()));
                            items.len() as u32 - 1
                        })
                    })
                    .collect()
            })
            .collect();
        for set in closed_itemsets(&transactions, min_support) {
            let mut slots: Vec<Option<String>> = vec![None; len];
            for &item in &set.items {
                let (pos, tok) = items[item as usize];
                slots[pos] = Some(tok.to_string());
            }
            let covered: Vec<usize> = set.support.iter().map(|&t| members[t]).collect();
            let domains = (0..len)
                .filter(|&pos| slots[pos].is_none())
                .map(|pos| {
                    let mut d: Vec<String> = covered.iter().map(|&c| sequences[c][pos].clone()).collect();
                    d.sort();
                    d.dedup();
                    d
                })
                .collect();
            out.push(Generalization { slots, covered, domains });
        }
    }
    out.sort_by(|a, b| a.render().cmp(&b.render()).then(a.covered.cmp(&b.covered)));
    out
}

/// Materializes generalizations of event texts as abstract appearances
/// with `is` edges from the covered events' appearances and an any-set
/// domain per variable.
pub struct UnifyAppearances;

impl Stage for UnifyAppearances {
    fn name(&self) -> &'static str {
        "unify_appearances"
    }

    fn run(&self, ctx: &mut PipelineContext<'_>) -> Result<usize, GraphError> {
        let graph = &mut *ctx.graph;
        let events = graph.things_of_kind(ThingKind::Event);
        let sequences: Vec<Vec<String>> = events
            .iter()
            .map(|&v| {
                let text = graph.property(v, "matched").or_else(|| graph.property(v, "text")).and_then(Value::as_text);
                text.map(|t| tokenize(t).into_iter().map(|t: Token| t.norm).collect()).unwrap_or_default()
            })
            .collect();
        let generalizations = anti_unify(&sequences, ctx.config.min_support);
        for g in &generalizations {
            let name = g.render();
            let (app, _) = graph.ensure_keyed(ThingKind::Appearance, &format!("generalization:{name}"), Some(&name));
            graph.set_property(app, "pattern", Value::Text(name.clone()))?;
            for (k, domain) in g.domains.iter().enumerate() {
                let var = format!("x{}", k + 1);
                let (role, _) = graph.ensure_keyed(ThingKind::Role, &format!("role:{var}"), Some(&var));
                graph.add_edge(Edge::has(app, &var, role))?;
                let (set, _) = graph.ensure_keyed(ThingKind::Generic, &format!("domain:{app}:{var}"), Some(&format!("{name}/{var}")));
                graph.add_edge(Edge::new(EdgeKind::Domain(var.clone()), app, set))?;
                for tok in domain {
                    let (actor, _) = graph.ensure_keyed(ThingKind::Actor, &format!("actor:{tok}"), Some(tok));
                    graph.add_edge(Edge::member(SetKind::Any, set, actor))?;
                }
            }
            for &c in &g.covered {
                if let Some(specific) = event_appearance(graph, events[c]) {
                    if specific != app {
                        graph.add_edge(Edge::is(specific, app))?;
                    }
                }
            }
        }
        Ok(generalizations.len())
    }
}
