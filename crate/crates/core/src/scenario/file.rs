//! Scenario documents on disk.
//!
//! Scenarios are TOML documents:
//!
//! ```toml
//! version = 1
//! title = "Two sensors"
//! description = ""
//! frame = ["cyclist", "truck", "false_negative"]
//! edges = ["SensorA->SensorB"]
//! normalize = false
//!
//! [assignment]
//! SensorA = "observed"
//! SensorB = "observed"
//!
//! [[sources]]
//! name = "SensorA"
//! category = "aleatoric"
//! states = ["observed"]
//!
//! [sources.table.observed]
//! cyclist = 0.9
//! "cyclist+truck" = 0.05
//! ANY = 0.05
//! ```
//!
//! Subset expressions are `+`-joined outcome labels or `ANY` for the whole
//! frame. Unknown fields are rejected. [`save_scenario`] writes the same
//! schema with keys sorted.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use super::{
    graph::parse_edge, Category, Finding, ScenarioConfig, ScenarioMetadata, UncertaintySource,
};
use crate::frame::{Frame, EXPR_SEPARATOR, UNIVERSE_EXPR};
use crate::mass::MassFunction;

/// The only schema version understood.
pub const SCHEMA_VERSION: i64 = 1;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("scenario is invalid ({} finding(s))", .0.len())]
    Validation(Vec<Finding>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    #[allow(dead_code)]
    version: i64,
    title: String,
    #[serde(default)]
    description: String,
    frame: Vec<String>,
    sources: Vec<SourceDoc>,
    #[serde(default)]
    edges: Vec<String>,
    assignment: BTreeMap<String, String>,
    #[serde(default)]
    normalize: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SourceDoc {
    name: String,
    category: Category,
    states: Vec<String>,
    table: BTreeMap<String, BTreeMap<String, f64>>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |i| offset - i - 1) + 1;
    (line, column)
}

fn schema_error(text: &str, err: toml::de::Error) -> ScenarioError {
    let message = err.message().trim().to_string();
    match err.span() {
        Some(span) => {
            let (line, column) = line_col(text, span.start);
            ScenarioError::Schema(format!("{message} (line {line}, column {column})"))
        }
        None => ScenarioError::Schema(message),
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text)
}

/// Parses and validates scenario text.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        ScenarioError::Parse {
            line,
            column,
            message: e.message().trim().to_string(),
        }
    })?;
    match table.get("version") {
        None => return Err(ScenarioError::Schema("missing field `version`".into())),
        Some(toml::Value::Integer(SCHEMA_VERSION)) => {}
        Some(other) => {
            return Err(ScenarioError::Schema(format!(
                "unsupported version {other}; expected {SCHEMA_VERSION}"
            )))
        }
    }
    let doc: ScenarioDoc = toml::from_str(text).map_err(|e| schema_error(text, e))?;
    build(doc)
}

fn build(doc: ScenarioDoc) -> Result<ScenarioConfig, ScenarioError> {
    let invalid = |f: Finding| ScenarioError::Validation(vec![f]);

    let frame =
        Frame::new(&doc.frame).map_err(|e| invalid(Finding::new("frame", e.to_string())))?;
    let mut findings = Vec::new();
    for label in frame.labels() {
        if label == UNIVERSE_EXPR || label.contains(EXPR_SEPARATOR) {
            findings.push(Finding::new(
                "frame",
                format!("label `{label}` clashes with subset-expression syntax"),
            ));
        }
    }
    if !findings.is_empty() {
        return Err(ScenarioError::Validation(findings));
    }

    let mut sources = Vec::new();
    for src in doc.sources {
        let mut table = BTreeMap::new();
        for (state, row) in &src.table {
            match build_row(&frame, row, doc.normalize) {
                Ok(m) => {
                    table.insert(state.clone(), m);
                }
                Err(reason) => findings.push(
                    Finding::new("table", reason)
                        .with_source(&src.name)
                        .with_state(state),
                ),
            }
        }
        let row_failed = findings
            .iter()
            .any(|f| f.source.as_deref() == Some(src.name.as_str()));
        match UncertaintySource::new(&src.name, src.category, src.states.clone(), table) {
            Ok(s) => sources.push(s),
            // Missing-row findings would only repeat the row errors above.
            Err(fs) => findings
                .extend(fs.into_iter().filter(|f| {
                    !(row_failed && f.reason == "no mass function for declared state")
                })),
        }
    }

    let mut edges = Vec::new();
    for e in &doc.edges {
        match parse_edge(e) {
            Some(edge) => edges.push(edge),
            None => findings.push(Finding::new(
                "edges",
                format!("`{e}` is not of the form Parent->Child"),
            )),
        }
    }
    if !findings.is_empty() {
        return Err(ScenarioError::Validation(findings));
    }

    let metadata = ScenarioMetadata {
        title: doc.title,
        description: doc.description,
    };
    ScenarioConfig::new(frame, sources, edges, doc.assignment, metadata)
        .map(|c| c.with_normalize_flag(doc.normalize))
        .map_err(ScenarioError::Validation)
}

fn build_row(
    frame: &Frame,
    row: &BTreeMap<String, f64>,
    normalize: bool,
) -> Result<MassFunction, String> {
    let mut entries = Vec::with_capacity(row.len());
    let mut seen: BTreeMap<u64, &str> = BTreeMap::new();
    for (expr, &mass) in row {
        let subset = frame
            .parse_subset(expr)
            .map_err(|e| format!("subset `{expr}`: {e}"))?;
        if let Some(prev) = seen.insert(subset.bits(), expr) {
            return Err(format!("subsets `{prev}` and `{expr}` denote the same set"));
        }
        entries.push((subset, mass));
    }
    let built = if normalize {
        MassFunction::normalize(frame, entries)
    } else {
        MassFunction::new(frame, entries)
    };
    built.map_err(|e| e.to_string())
}

/// Serializes a scenario in canonical form: keys sorted lexicographically,
/// sources ordered by name, subset expressions in frame order.
pub fn save_scenario(config: &ScenarioConfig) -> String {
    use toml::{Table, Value};

    let strings = |items: &mut dyn Iterator<Item = &String>| {
        Value::Array(items.map(|s| Value::String(s.clone())).collect())
    };

    let mut doc = Table::new();
    doc.insert("version".into(), Value::Integer(SCHEMA_VERSION));
    doc.insert(
        "title".into(),
        Value::String(config.metadata().title.clone()),
    );
    doc.insert(
        "description".into(),
        Value::String(config.metadata().description.clone()),
    );
    doc.insert("frame".into(), strings(&mut config.frame().labels().iter()));
    doc.insert("normalize".into(), Value::Boolean(config.normalize()));
    let edges: Vec<String> = config
        .graph()
        .edges()
        .iter()
        .map(|(p, c)| format!("{p}->{c}"))
        .collect();
    doc.insert("edges".into(), strings(&mut edges.iter()));
    doc.insert(
        "assignment".into(),
        Value::Table(
            config
                .assignment()
                .iter()
                .map(|(k, v)| (k.clone(), Value::String(v.clone())))
                .collect(),
        ),
    );

    let sources = config
        .sources()
        .map(|s| {
            let mut t = Table::new();
            t.insert("name".into(), Value::String(s.name().to_string()));
            t.insert(
                "category".into(),
                Value::String(s.category().as_str().into()),
            );
            t.insert("states".into(), strings(&mut s.states().iter()));
            let table: Table = s
                .table()
                .iter()
                .map(|(state, m)| {
                    let row: Table = m
                        .to_expr_map()
                        .into_iter()
                        .map(|(expr, v)| (expr, Value::Float(v)))
                        .collect();
                    (state.clone(), Value::Table(row))
                })
                .collect();
            t.insert("table".into(), Value::Table(table));
            Value::Table(t)
        })
        .collect();
    doc.insert("sources".into(), Value::Array(sources));

    toml::to_string(&doc).expect("scenario tables always serialize")
}
