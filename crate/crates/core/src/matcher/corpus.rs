use chrono::{DateTime, NaiveDate, NaiveDateTime};
use serde::Deserialize;
use thiserror::Error;

/// A timestamped text with its origin.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub time: i64,
    pub source: String,
    pub text: String,
}

impl Document {
    pub fn new(time: i64, source: impl Into<String>, text: impl Into<String>) -> Self {
        Document { time, source: source.into(), text: text.into() }
    }
}

/// Seconds of wall-clock time per tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TickGranularity(u64);

impl TickGranularity {
    pub fn seconds(seconds: u64) -> Option<Self> {
        (seconds > 0).then_some(TickGranularity(seconds))
    }

    pub fn get(self) -> u64 {
        self.0
    }

    fn ticks(self, unix_seconds: i64) -> i64 {
        unix_seconds.div_euclid(self.0 as i64)
    }
}

impl Default for TickGranularity {
    fn default() -> Self {
        TickGranularity(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct CorpusError {
    pub line: usize,
    pub message: String,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawTime {
    Tick(i64),
    Stamp(String),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    time: RawTime,
    source: String,
    text: String,
}

fn parse_stamp(stamp: &str) -> Option<i64> {
    if let Ok(t) = DateTime::parse_from_rfc3339(stamp) {
        return Some(t.timestamp());
    }
    for fmt in ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M"] {
        if let Ok(t) = NaiveDateTime::parse_from_str(stamp, fmt) {
            return Some(t.and_utc().timestamp());
        }
    }
    NaiveDate::parse_from_str(stamp, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|t| t.and_utc().timestamp())
}

/// Parses one JSON-lines record: `{"time": <tick or ISO-8601>, "source": "...", "text": "..."}`.
/// Timestamps without an offset are read as UTC.
pub fn parse_corpus_line(line: &str, granularity: TickGranularity) -> Result<Document, String> {
    let raw: RawDocument = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let time = match raw.time {
        RawTime::Tick(t) => t,
        RawTime::Stamp(s) => {
            granularity.ticks(parse_stamp(&s).ok_or_else(|| format!("unrecognized timestamp `{s}`"))?)
        }
    };
    Ok(Document { time, source: raw.source, text: raw.text })
}

/// Parses a whole JSON-lines corpus; blank lines are skipped. Line numbers
/// in errors start at 1.
pub fn parse_corpus(text: &str, granularity: TickGranularity) -> Result<Vec<Document>, CorpusError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_corpus_line(l, granularity).map_err(|message| CorpusError { line: i + 1, message }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_ticks_pass_through() {
        let d = parse_corpus_line(r#"{"time": 100, "source": "u:1", "text": "hi"}"#, TickGranularity::default()).unwrap();
        assert_eq!(d, Document::new(100, "u:1", "hi"));
    }

    #[test]
    fn iso_stamps_use_granularity() {
        let g = TickGranularity::seconds(60).unwrap();
        let d = parse_corpus_line(r#"{"time": "1970-01-01T01:00:00Z", "source": "s", "text": ""}"#, g).unwrap();
        assert_eq!(d.time, 60);
        let d = parse_corpus_line(r#"{"time": "1970-01-02", "source": "s", "text": ""}"#, TickGranularity::default())
            .unwrap();
        assert_eq!(d.time, 86_400);
        let d = parse_corpus_line(r#"{"time": "1970-01-01T00:00:10+00:00", "source": "s", "text": ""}"#, TickGranularity::default())
            .unwrap();
        assert_eq!(d.time, 10);
    }

    #[test]
    fn errors_name_the_line() {
        let corpus = "{\"time\": 1, \"source\": \"a\", \"text\": \"x\"}\n\n{\"time\": 2, \"source\": \"a\"\n";
        let err = parse_corpus(corpus, TickGranularity::default()).unwrap_err();
        assert_eq!(err.line, 3);
        let err = parse_corpus(r#"{"time": "yesterday", "source": "a", "text": "x"}"#, TickGranularity::default())
            .unwrap_err();
        assert!(err.message.contains("yesterday"));
        assert!(parse_corpus(r#"{"time": 1, "source": "a", "text": "x", "extra": 1}"#, TickGranularity::default()).is_err());
    }

    #[test]
    fn zero_granularity_rejected() {
        assert!(TickGranularity::seconds(0).is_none());
    }
}
