use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use super::corpus::Document;
use super::engine::match_pattern;
use super::token::{surface_of, tokenize};
use super::types::TypeEnv;
use crate::knowledge_graph::{Edge, Graph, GraphError, ThingId, ThingKind, TimeSpec, Value};
use crate::pattern_lang::{render_with, PatternError, ThingDefinition};

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("definition {definition}: {source}")]
    Pattern { definition: String, source: PatternError },
    #[error("event {definition} has no times")]
    NoTimes { definition: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Everything needed to create one event node, independent of any graph.
#[derive(Debug, Clone, PartialEq)]
pub struct EventDraft {
    /// Name of the appearance (definition) the event instantiates.
    pub definition: String,
    /// Roles the appearance declares, in declaration order.
    pub roles: Vec<String>,
    pub times: TimeSpec,
    pub source: String,
    /// Pattern rendering with variables replaced by their bound text.
    pub text: String,
    /// Surface text of the whole matched token range.
    pub matched: String,
    /// Role name to bound surface text.
    pub bindings: BTreeMap<String, String>,
}

pub(crate) fn appearance_key(name: &str) -> String {
    format!("appearance:{name}")
}

pub(crate) fn role_key(role: &str) -> String {
    format!("role:{role}")
}

pub(crate) fn actor_key(text: &str) -> String {
    let norm: Vec<String> = tokenize(text).iter().map(|t| t.norm.clone()).collect();
    format!("actor:{}", norm.join(" "))
}

/// The role node named `role`, created on first use.
pub(crate) fn ensure_role(graph: &mut Graph, role: &str) -> ThingId {
    graph.ensure_keyed(ThingKind::Role, &role_key(role), Some(role)).0
}

/// The appearance node for `name`, with a `has` edge to each role node.
pub(crate) fn ensure_appearance(graph: &mut Graph, name: &str, roles: &[String]) -> Result<ThingId, GraphError> {
    let (app, _) = graph.ensure_keyed(ThingKind::Appearance, &appearance_key(name), Some(name));
    for role in roles {
        let r = ensure_role(graph, role);
        graph.add_edge(Edge::has(app, role, r))?;
    }
    Ok(app)
}

/// Matches every definition against one document without touching a graph.
pub fn draft_events(defs: &[ThingDefinition], doc: &Document) -> Result<Vec<EventDraft>, ExtractError> {
    let tokens = tokenize(&doc.text);
    let mut drafts = Vec::new();
    for def in defs {
        let patterns = def
            .effective_patterns()
            .map_err(|source| ExtractError::Pattern { definition: def.name.clone(), source })?;
        let env = TypeEnv::from_definition(def);
        let roles = def.all_roles();
        for pattern in &patterns {
            for m in match_pattern(pattern, &tokens, &env) {
                let bindings: BTreeMap<String, String> =
                    m.bindings.iter().map(|(var, b)| (var.to_lowercase(), b.text.clone())).collect();
                let text = render_with(pattern, &|var| m.text(var).map(str::to_string));
                drafts.push(EventDraft {
                    definition: def.name.clone(),
                    roles: roles.clone(),
                    times: TimeSpec::point(doc.time),
                    source: doc.source.clone(),
                    text,
                    matched: surface_of(&tokens[m.start..m.end]),
                    bindings,
                });
            }
        }
    }
    Ok(drafts)
}

/// Creates the event node for `draft`: an `is` edge to its appearance, a
/// time node, `sources`/`text` properties, and a `has` edge per binding to
/// an actor node shared by all events binding the same normalized text.
/// Each actor gets an `is` edge to the role it fills.
pub fn instantiate_event(graph: &mut Graph, draft: &EventDraft) -> Result<ThingId, ExtractError> {
    if draft.times.is_empty() {
        return Err(ExtractError::NoTimes { definition: draft.definition.clone() });
    }
    let mut roles = draft.roles.clone();
    for role in draft.bindings.keys() {
        if !roles.contains(role) {
            roles.push(role.clone());
        }
    }
    let app = ensure_appearance(graph, &draft.definition, &roles)?;
    let mut props = BTreeMap::new();
    props.insert("sources".to_string(), Value::Text(draft.source.clone()));
    props.insert("text".to_string(), Value::Text(draft.text.clone()));
    props.insert("matched".to_string(), Value::Text(draft.matched.clone()));
    let event = graph.add_thing_with(ThingKind::Event, Some(&draft.definition), props);
    graph.add_edge(Edge::is(event, app))?;
    graph.add_times(event, &draft.times)?;
    for (role, text) in &draft.bindings {
        let (actor, _) = graph.ensure_keyed(ThingKind::Actor, &actor_key(text), Some(text));
        graph.add_edge(Edge::has(event, role, actor))?;
        let r = ensure_role(graph, role);
        graph.add_edge(Edge::is(actor, r))?;
    }
    Ok(event)
}

/// Extracts events from one document into `graph`, returning the new
/// event ids in match order.
pub fn extract_events(defs: &[ThingDefinition], doc: &Document, graph: &mut Graph) -> Result<Vec<ThingId>, ExtractError> {
    let drafts = draft_events(defs, doc)?;
    drafts.iter().map(|d| instantiate_event(graph, d)).collect()
}

/// Matches documents in parallel, then writes their events in document
/// order. Appearance nodes for every definition are created even when
/// nothing matched.
pub fn extract_corpus(defs: &[ThingDefinition], docs: &[Document], graph: &mut Graph) -> Result<Vec<ThingId>, ExtractError> {
    for def in defs {
        ensure_appearance(graph, &def.name, &def.all_roles())?;
    }
    let drafts: Vec<Vec<EventDraft>> = docs.par_iter().map(|d| draft_events(defs, d)).collect::<Result<_, _>>()?;
    let mut ids = Vec::new();
    for draft in drafts.iter().flatten() {
        ids.push(instantiate_event(graph, draft)?);
    }
    Ok(ids)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knowledge_graph::{Direction, EdgeFilter};
    use crate::pattern_lang::parse_definitions;

    const SANCTIONS: &str = "There name sanctions patterns \"{obama trump} {forced suggested} $organization to {impose implement apply} sanctions against $target\", has organization, target.";

    fn doc(t: i64, text: &str) -> Document {
        Document::new(t, "http://example.org/news", text)
    }

    #[test]
    fn sanctions_event() {
        let defs = parse_definitions(SANCTIONS).unwrap();
        let mut g = Graph::new();
        let ids = extract_events(&defs, &doc(100, "Obama forced the EU to impose sanctions against Russia"), &mut g).unwrap();
        assert_eq!(ids.len(), 1);
        let ev = ids[0];
        assert_eq!(g.times_of(ev).unwrap().intervals(), &[(100, 100)]);
        assert_eq!(g.things_of_kind(ThingKind::Actor).len(), 2);
        let target = g.neighbors(ev, &EdgeFilter::has("target"), Direction::Out);
        assert_eq!(g.name_of(target[0]), Some("Russia"));
        let org = g.neighbors(ev, &EdgeFilter::has("organization"), Direction::Out);
        assert_eq!(g.name_of(org[0]), Some("EU"));
        assert_eq!(g.property(ev, "sources").and_then(Value::as_text), Some("http://example.org/news"));
        let text = g.property(ev, "text").and_then(Value::as_text).unwrap();
        assert!(text.ends_with("EU to {impose implement apply} sanctions against Russia"), "{text}");
        assert_eq!(g.neighbors(ev, &EdgeFilter::Is, Direction::Out).len(), 1);
    }

    #[test]
    fn nullary_event_has_no_roles() {
        let defs = parse_definitions("There name trump patterns \"{'trump' 'us president'}\".").unwrap();
        let mut g = Graph::new();
        let ids = extract_events(&defs, &doc(1, "US president spoke"), &mut g).unwrap();
        assert_eq!(ids.len(), 1);
        assert!(g.neighbors(ids[0], &EdgeFilter::Has(None), Direction::Out).is_empty());
    }

    #[test]
    fn actors_reused_across_documents() {
        let defs = parse_definitions(SANCTIONS).unwrap();
        let mut g = Graph::new();
        let d = doc(5, "Trump suggested the EU to apply sanctions against Russia");
        extract_events(&defs, &d, &mut g).unwrap();
        extract_events(&defs, &d, &mut g).unwrap();
        assert_eq!(g.things_of_kind(ThingKind::Event).len(), 2);
        assert_eq!(g.things_of_kind(ThingKind::Actor).len(), 2);
        assert_eq!(g.things_of_kind(ThingKind::Appearance).len(), 1);
    }

    #[test]
    fn implicit_pattern_from_name() {
        let defs = parse_definitions("There name person.").unwrap();
        let mut g = Graph::new();
        let ids = extract_events(&defs, &doc(3, "A person walked by another person"), &mut g).unwrap();
        assert_eq!(ids.len(), 2);
    }

    #[test]
    fn type_failure_rejects_match() {
        let src = "There name iqc patterns \"On sale: $item, quantity $amount, prices '$' $cost\", has item, amount, cost. Amount is number. Item is word.";
        let defs = parse_definitions(src).unwrap();
        let mut g = Graph::new();
        let ok = extract_events(&defs, &doc(1, "On sale: apples, quantity 5, prices $ 3.50"), &mut g).unwrap();
        assert_eq!(ok.len(), 1);
        let bad = extract_events(&defs, &doc(2, "On sale: apples, quantity five, prices $ 3.50"), &mut g).unwrap();
        assert!(bad.is_empty());
    }

    #[test]
    fn parallel_corpus_matches_sequential() {
        let defs = parse_definitions(SANCTIONS).unwrap();
        let docs: Vec<Document> = (0..40)
            .map(|i| doc(i, if i % 3 == 0 { "Obama forced NATO to impose sanctions against Iran" } else { "nothing here" }))
            .collect();
        let mut a = Graph::new();
        extract_corpus(&defs, &docs, &mut a).unwrap();
        let mut b = Graph::new();
        for def in &defs {
            ensure_appearance(&mut b, &def.name, &def.all_roles()).unwrap();
        }
        for d in &docs {
            extract_events(&defs, d, &mut b).unwrap();
        }
        assert_eq!(a, b);
    }
}
