use std::collections::BTreeMap;

use super::{Queries, QueryError, QueryScope};
use crate::knowledge_graph::{ThingId, ThingKind, TimeSpec, WeightedSet};

/// Arguments of a named query: the thing it is about (if any) and scope.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryInput {
    pub subject: Option<ThingId>,
    pub scope: QueryScope,
}

#[derive(Debug, Clone, PartialEq)]
pub enum QueryOutput {
    Set(WeightedSet),
    Span(TimeSpec),
}

/// A query callable by name.
pub trait QueryFunction: Send + Sync {
    fn name(&self) -> &'static str;
    fn subject(&self) -> SubjectArg;
    fn needs_time(&self) -> bool {
        false
    }
    fn evaluate(&self, queries: &Queries<'_>, input: &QueryInput) -> Result<QueryOutput, QueryError>;
}

/// How a query uses its subject argument. The kind, when present, is the
/// kind of thing a subject given by name must have.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubjectArg {
    None,
    Optional(Option<ThingKind>),
    Required(Option<ThingKind>),
}

impl SubjectArg {
    pub fn kind(self) -> Option<ThingKind> {
        match self {
            SubjectArg::None => None,
            SubjectArg::Optional(k) | SubjectArg::Required(k) => k,
        }
    }
}

type Run = fn(&Queries<'_>, &QueryInput) -> Result<QueryOutput, QueryError>;

struct FnQuery {
    name: &'static str,
    subject: SubjectArg,
    needs_time: bool,
    run: Run,
}

impl QueryFunction for FnQuery {
    fn name(&self) -> &'static str {
        self.name
    }

    fn subject(&self) -> SubjectArg {
        self.subject
    }

    fn needs_time(&self) -> bool {
        self.needs_time
    }

    fn evaluate(&self, queries: &Queries<'_>, input: &QueryInput) -> Result<QueryOutput, QueryError> {
        let missing = |what| QueryError::MissingArgument { query: self.name.to_string(), what };
        if matches!(self.subject, SubjectArg::Required(_)) && input.subject.is_none() {
            return Err(missing("a subject"));
        }
        if self.needs_time && input.scope.time.is_none() {
            return Err(missing("a time interval"));
        }
        (self.run)(queries, input)
    }
}

fn subject(input: &QueryInput) -> ThingId {
    input.subject.expect("checked before dispatch")
}

fn time(input: &QueryInput) -> (i64, i64) {
    input.scope.time.expect("checked before dispatch")
}

macro_rules! set {
    ($e:expr) => {
        Ok(QueryOutput::Set($e?))
    };
}

/// Queries indexed by name.
pub struct QueryRegistry {
    functions: BTreeMap<&'static str, Box<dyn QueryFunction>>,
}

impl QueryRegistry {
    pub fn empty() -> Self {
        QueryRegistry { functions: BTreeMap::new() }
    }

    pub fn register(&mut self, f: Box<dyn QueryFunction>) {
        self.functions.insert(f.name(), f);
    }

    pub fn get(&self, name: &str) -> Option<&dyn QueryFunction> {
        self.functions.get(name).map(|b| b.as_ref())
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.functions.keys().copied().collect()
    }

    /// Every functional-set query of [`Queries`].
    pub fn standard() -> Self {
        use ThingKind::*;
        let req = |k| SubjectArg::Required(Some(k));
        let table: Vec<(&'static str, SubjectArg, bool, Run)> = vec![
            ("actors_of_role", req(Role), false, |q, i| set!(q.actors_of_role(subject(i)))),
            ("roles_of_actor", req(Actor), false, |q, i| set!(q.roles_of_actor(subject(i)))),
            ("roles_of_appearance", req(Appearance), false, |q, i| set!(q.roles_of_appearance(subject(i)))),
            ("appearances_of_role", req(Role), false, |q, i| set!(q.appearances_of_role(subject(i)))),
            ("appearances_of_event", req(Event), false, |q, i| set!(q.appearances_of_event(subject(i)))),
            ("events_of_appearance", req(Appearance), false, |q, i| set!(q.events_of_appearance(subject(i)))),
            ("events_at", SubjectArg::None, true, |q, i| {
                let (s, e) = time(i);
                Ok(QueryOutput::Set(q.events_at(s, e)))
            }),
            ("appearances_at", SubjectArg::None, true, |q, i| {
                let (s, e) = time(i);
                Ok(QueryOutput::Set(q.appearances_at(s, e)))
            }),
            ("actors_of_event", req(Event), false, |q, i| set!(q.actors_of_event(subject(i), &i.scope))),
            ("events_of_actor", req(Actor), false, |q, i| set!(q.events_of_actor(subject(i), &i.scope))),
            ("situations_of_appearance", req(Appearance), false, |q, i| {
                set!(q.situations_of_appearance(subject(i)))
            }),
            ("appearances_of_situation", req(Situation), false, |q, i| {
                set!(q.appearances_of_situation(subject(i)))
            }),
            ("situations_of_coincidence", req(Coincidence), false, |q, i| {
                set!(q.situations_of_coincidence(subject(i)))
            }),
            ("coincidences_of_situation", req(Situation), false, |q, i| {
                set!(q.coincidences_of_situation(subject(i)))
            }),
            ("coincidences_of_event", req(Event), false, |q, i| set!(q.coincidences_of_event(subject(i)))),
            ("events_of_coincidence", req(Coincidence), false, |q, i| set!(q.events_of_coincidence(subject(i)))),
            ("coincidences_at", SubjectArg::Optional(Some(Event)), true, |q, i| {
                let (s, e) = time(i);
                set!(q.coincidences_at(s, e, i.subject))
            }),
            ("scenarios_of_situation", req(Situation), false, |q, i| {
                set!(q.scenarios_of_situation(subject(i), i.scope.order))
            }),
            ("situations_of_scenario", req(Scenario), false, |q, i| {
                set!(q.situations_of_scenario(subject(i), i.scope.order))
            }),
            ("processes_of_scenario", req(Scenario), false, |q, i| set!(q.processes_of_scenario(subject(i)))),
            ("scenarios_of_process", req(Process), false, |q, i| set!(q.scenarios_of_process(subject(i)))),
            ("processes_at", SubjectArg::None, true, |q, i| {
                let (s, e) = time(i);
                Ok(QueryOutput::Set(q.processes_at(s, e)))
            }),
            ("processes_of_coincidence", req(Coincidence), false, |q, i| {
                set!(q.processes_of_coincidence(subject(i), &i.scope))
            }),
            ("coincidences_of_process", req(Process), false, |q, i| {
                set!(q.coincidences_of_process(subject(i), &i.scope))
            }),
            ("timespan_of", SubjectArg::Required(None), false, |q, i| Ok(QueryOutput::Span(q.timespan_of(subject(i))?))),
        ];
        let mut registry = QueryRegistry::empty();
        for (name, subject, needs_time, run) in table {
            registry.register(Box::new(FnQuery { name, subject, needs_time, run }));
        }
        registry
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knowledge_graph::{Edge, Graph};

    #[test]
    fn standard_inventory() {
        let r = QueryRegistry::standard();
        assert_eq!(r.names().len(), 25);
        assert!(r.get("actors_of_role").is_some());
        assert!(r.get("nonsense").is_none());
    }

    #[test]
    fn dispatch_matches_direct_call() {
        let mut g = Graph::new();
        let role = g.add_thing(ThingKind::Role, Some("light color"));
        let red = g.add_thing(ThingKind::Actor, Some("red"));
        g.add_edge(Edge::is(red, role)).unwrap();
        let q = Queries::new(&g);
        let f = QueryRegistry::standard();
        let f = f.get("actors_of_role").unwrap();
        let out = f.evaluate(&q, &QueryInput { subject: Some(role), ..Default::default() }).unwrap();
        assert_eq!(out, QueryOutput::Set(q.actors_of_role(role).unwrap()));
        assert!(matches!(f.evaluate(&q, &QueryInput::default()), Err(QueryError::MissingArgument { .. })));
    }
}
