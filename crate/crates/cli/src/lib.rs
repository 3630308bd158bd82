//! Command implementations behind the `scenario` binary. Each command
//! returns the JSON it would print so tests can compare it with direct
//! library calls.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use scenario_core::knowledge_graph::ThingKind;
use scenario_core::matcher::{parse_corpus, TickGranularity};
use scenario_core::pattern_lang::parse_definitions;
use scenario_core::queries::{QueryInput, QueryOutput, SubjectArg};
use scenario_core::{extract_corpus, run_pipeline, Graph, MiningConfig, Queries, QueryRegistry, QueryScope, ThingId, TimeSpec};
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: definitions, corpus, snapshot, query or config.
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Domain(_) => 1,
            CliError::Io(_) => 2,
        }
    }
}

/// Settings shared by all commands. Loaded from a JSON file, then
/// overridden by command-line flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub definitions: Option<PathBuf>,
    pub corpus: Option<PathBuf>,
    pub snapshot: Option<PathBuf>,
    pub out: Option<PathBuf>,
    /// Seconds per tick for timestamped corpus lines.
    pub granularity: Option<u64>,
    pub mining: MiningConfig,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = read(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
    }

    fn path(&self, field: Option<&PathBuf>, flag: &str) -> Result<PathBuf, CliError> {
        field.cloned().ok_or_else(|| CliError::Domain(format!("missing --{flag}")))
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Writes `contents` to a temporary file next to `path` and renames it
/// into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents.as_bytes()).map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

fn load_snapshot(path: &Path) -> Result<Graph, CliError> {
    let text = read(path)?;
    Graph::from_json(&text).map_err(|e| CliError::Domain(format!("{}: {e}", path.display())))
}

/// Parses definitions and corpus, extracts events and writes the snapshot.
/// Returns the extraction summary.
pub fn cmd_extract(config: &Config) -> Result<String, CliError> {
    let graph = extract_graph(config)?;
    let snapshot = config.path(config.snapshot.as_ref(), "snapshot")?;
    let summary = extraction_summary(&graph);
    write_atomic(&snapshot, &graph.to_json())?;
    Ok(summary)
}

fn extract_graph(config: &Config) -> Result<Graph, CliError> {
    let defs_path = config.path(config.definitions.as_ref(), "definitions")?;
    let corpus_path = config.path(config.corpus.as_ref(), "corpus")?;
    let defs = parse_definitions(&read(&defs_path)?)
        .map_err(|e| CliError::Domain(format!("{}:{}: {e}", defs_path.display(), e.line())))?;
    let granularity = TickGranularity::seconds(config.granularity.unwrap_or(1))
        .ok_or_else(|| CliError::Domain("granularity must be positive".into()))?;
    let docs = parse_corpus(&read(&corpus_path)?, granularity)
        .map_err(|e| CliError::Domain(format!("{}:{}: {}", corpus_path.display(), e.line, e.message)))?;
    let mut graph = Graph::new();
    extract_corpus(&defs, &docs, &mut graph).map_err(|e| CliError::Domain(e.to_string()))?;
    Ok(graph)
}

fn extraction_summary(graph: &Graph) -> String {
    let mut per_definition: BTreeMap<String, usize> = BTreeMap::new();
    for app in graph.things_of_kind(ThingKind::Appearance) {
        per_definition.insert(graph.name_of(app).unwrap_or_default().to_string(), 0);
    }
    let events = graph.things_of_kind(ThingKind::Event);
    for &v in &events {
        *per_definition.entry(graph.name_of(v).unwrap_or_default().to_string()).or_default() += 1;
    }
    let summary = json!({ "events": events.len(), "per_definition": per_definition });
    serde_json::to_string_pretty(&summary).expect("summary serializes")
}

/// Loads the snapshot, runs the mining pipeline, writes the updated
/// snapshot and returns the report.
pub fn cmd_mine(config: &Config) -> Result<String, CliError> {
    let snapshot = config.path(config.snapshot.as_ref(), "snapshot")?;
    let mut graph = load_snapshot(&snapshot)?;
    let report = run_pipeline(&mut graph, &config.mining).map_err(|e| CliError::Domain(e.to_string()))?;
    write_atomic(&snapshot, &graph.to_json())?;
    Ok(report.to_json())
}

/// Extraction followed by mining; returns the mining report.
pub fn cmd_run(config: &Config) -> Result<String, CliError> {
    let mut graph = extract_graph(config)?;
    let report = run_pipeline(&mut graph, &config.mining).map_err(|e| CliError::Domain(e.to_string()))?;
    let snapshot = config.path(config.snapshot.as_ref(), "snapshot")?;
    write_atomic(&snapshot, &graph.to_json())?;
    Ok(report.to_json())
}

/// A query request as given on the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueryRequest {
    pub function: String,
    /// Numeric id or thing name.
    pub subject: Option<String>,
    pub scope: QueryScope,
}

/// Parses a time filter: `t` or `start,end`.
pub fn parse_time(s: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Domain(format!("invalid time filter {s:?}; expected T or START,END"));
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let nums: Vec<i64> = parts.iter().map(|p| p.parse().map_err(|_| bad())).collect::<Result<_, _>>()?;
    match nums[..] {
        [t] => Ok((t, t)),
        [a, b] if a <= b => Ok((a, b)),
        _ => Err(bad()),
    }
}

fn resolve_subject(graph: &Graph, subject: &str, kind: Option<ThingKind>) -> Result<Vec<ThingId>, CliError> {
    if let Ok(n) = subject.parse::<u64>() {
        let id = ThingId(n);
        return if graph.contains(id) { Ok(vec![id]) } else { Err(CliError::Domain(format!("unknown thing {id}"))) };
    }
    Ok(graph
        .things()
        .filter(|t| t.name.as_deref() == Some(subject) && kind.is_none_or(|k| k == t.kind))
        .map(|t| t.id)
        .collect())
}

/// Evaluates a named query against a snapshot file.
pub fn cmd_query(snapshot: &Path, request: &QueryRequest) -> Result<String, CliError> {
    let graph = load_snapshot(snapshot)?;
    query_graph(&graph, request)
}

/// Evaluates a named query; results are JSON arrays of
/// `{id, name, kind, weight}`, or `{"intervals": [...]}` for time spans.
pub fn query_graph(graph: &Graph, request: &QueryRequest) -> Result<String, CliError> {
    let registry = QueryRegistry::standard();
    let function = registry.get(&request.function).ok_or_else(|| {
        CliError::Domain(format!("unknown query {:?}; valid queries: {}", request.function, registry.names().join(", ")))
    })?;
    let queries = Queries::new(graph);
    let subjects: Vec<Option<ThingId>> = match (&request.subject, function.subject()) {
        (None, SubjectArg::Required(_)) => {
            return Err(CliError::Domain(format!("query {} needs a subject", request.function)));
        }
        (None, _) => vec![None],
        (Some(_), SubjectArg::None) => {
            return Err(CliError::Domain(format!("query {} takes no subject", request.function)));
        }
        (Some(s), arg) => resolve_subject(graph, s, arg.kind())?.into_iter().map(Some).collect(),
    };
    let mut set = scenario_core::WeightedSet::new();
    let mut span: Option<TimeSpec> = None;
    let mut last_err = None;
    for subject in subjects {
        let input = QueryInput { subject, scope: request.scope.clone() };
        match function.evaluate(&queries, &input) {
            Ok(QueryOutput::Set(s)) => set = set.union(&s),
            Ok(QueryOutput::Span(t)) => span = Some(span.map_or(t.clone(), |acc| acc.union(&t))),
            Err(e) => last_err = Some(e),
        }
    }
    if request.function == "timespan_of" {
        return match (span, last_err) {
            (Some(t), _) => Ok(json!({ "intervals": Vec::<[i64; 2]>::from(t) }).to_string()),
            (None, Some(e)) => Err(CliError::Domain(e.to_string())),
            (None, None) => Ok(json!({ "intervals": [] }).to_string()),
        };
    }
    if let Some(e) = last_err {
        return Err(CliError::Domain(e.to_string()));
    }
    let rows: Vec<serde_json::Value> = set
        .iter()
        .map(|(id, w)| {
            json!({
                "id": id.0,
                "name": graph.name_of(id),
                "kind": graph.kind_of(id).map(|k| k.as_str()),
                "weight": w,
            })
        })
        .collect();
    Ok(serde_json::to_string(&rows).expect("rows serialize"))
}
