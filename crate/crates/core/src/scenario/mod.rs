//! Scenario model: uncertainty sources with per-state evidence tables, their
//! dependency graph, the concrete state assignment, and end-to-end fusion.

mod file;
mod graph;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::combination::{combine_many, CombinationRule};
use crate::error::{Error, Result};
use crate::frame::Frame;
use crate::mass::MassFunction;

pub use file::{load_scenario, parse_scenario, save_scenario, ScenarioError, SCHEMA_VERSION};
pub use graph::{parse_edge, topological_order, validate_dag, DependencyGraph, GraphIssue};

/// Kind of uncertainty a source carries. Descriptive only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Aleatoric,
    Epistemic,
    Both,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Aleatoric => "aleatoric",
            Category::Epistemic => "epistemic",
            Category::Both => "both",
        }
    }
}

/// One problem found while validating a scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub source: Option<String>,
    pub state: Option<String>,
    pub field: String,
    pub reason: String,
}

impl Finding {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            source: None,
            state: None,
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn with_source(mut self, source: impl Into<String>) -> Self {
        self.source = Some(source.into());
        self
    }

    pub fn with_state(mut self, state: impl Into<String>) -> Self {
        self.state = Some(state.into());
        self
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(source) = &self.source {
            write!(f, "source `{source}`")?;
            if let Some(state) = &self.state {
                write!(f, ", state `{state}`")?;
            }
            write!(f, ": ")?;
        }
        write!(f, "{}: {}", self.field, self.reason)
    }
}

/// A named source of uncertainty with one mass function per state.
#[derive(Debug, Clone, PartialEq)]
pub struct UncertaintySource {
    name: String,
    category: Category,
    states: Vec<String>,
    table: BTreeMap<String, MassFunction>,
}

impl UncertaintySource {
    pub fn new(
        name: impl Into<String>,
        category: Category,
        states: Vec<String>,
        mut table: BTreeMap<String, MassFunction>,
    ) -> std::result::Result<Self, Vec<Finding>> {
        let name = name.into();
        let mut findings = Vec::new();
        if name.trim().is_empty() {
            findings.push(Finding::new("name", "source name must be non-empty"));
        }
        if states.is_empty() {
            findings
                .push(Finding::new("states", "at least one state is required").with_source(&name));
        }
        let mut seen = std::collections::BTreeSet::new();
        for state in &states {
            if state.trim().is_empty() {
                findings.push(
                    Finding::new("states", "state labels must be non-empty").with_source(&name),
                );
            } else if !seen.insert(state.as_str()) {
                findings.push(
                    Finding::new("states", "duplicate state")
                        .with_source(&name)
                        .with_state(state),
                );
            } else if !table.contains_key(state) {
                findings.push(
                    Finding::new("table", "no mass function for declared state")
                        .with_source(&name)
                        .with_state(state),
                );
            }
        }
        for state in table.keys() {
            if !seen.contains(state.as_str()) {
                findings.push(
                    Finding::new("table", "entry for undeclared state")
                        .with_source(&name)
                        .with_state(state),
                );
            }
        }
        let mut frames = table.values().map(MassFunction::frame);
        if let Some(first) = frames.next() {
            if frames.any(|f| f != first) {
                findings.push(
                    Finding::new("table", "mass functions are defined over different frames")
                        .with_source(&name),
                );
            }
        }
        if !findings.is_empty() {
            return Err(findings);
        }
        table.retain(|k, _| seen.contains(k.as_str()));
        Ok(Self {
            name,
            category,
            states,
            table,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn category(&self) -> Category {
        self.category
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    /// Conditional mass function for `state`.
    pub fn evidence_for(&self, state: &str) -> Result<&MassFunction> {
        self.table.get(state).ok_or_else(|| Error::UnknownState {
            source_name: self.name.clone(),
            state: state.to_string(),
        })
    }

    pub fn table(&self) -> &BTreeMap<String, MassFunction> {
        &self.table
    }
}

/// Free-text description carried alongside a scenario.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScenarioMetadata {
    pub title: String,
    pub description: String,
}

/// A validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    frame: Frame,
    sources: BTreeMap<String, UncertaintySource>,
    graph: DependencyGraph,
    assignment: BTreeMap<String, String>,
    metadata: ScenarioMetadata,
    normalize: bool,
}

impl ScenarioConfig {
    pub fn new(
        frame: Frame,
        sources: Vec<UncertaintySource>,
        edges: Vec<(String, String)>,
        assignment: BTreeMap<String, String>,
        metadata: ScenarioMetadata,
    ) -> std::result::Result<Self, Vec<Finding>> {
        let mut findings = Vec::new();
        let mut by_name = BTreeMap::new();
        for source in sources {
            if let Some(mf) = source.table.values().next() {
                if mf.frame() != &frame {
                    findings.push(
                        Finding::new("table", "mass functions are not over the scenario frame")
                            .with_source(&source.name),
                    );
                }
            }
            if by_name.contains_key(&source.name) {
                findings.push(
                    Finding::new("sources", "duplicate source name").with_source(&source.name),
                );
                continue;
            }
            by_name.insert(source.name.clone(), source);
        }

        for (name, source) in &by_name {
            match assignment.get(name) {
                None => findings.push(
                    Finding::new("assignment", "source has no assigned state").with_source(name),
                ),
                Some(state) if !source.states.contains(state) => findings.push(
                    Finding::new("assignment", "state is not in the source's domain")
                        .with_source(name)
                        .with_state(state),
                ),
                Some(_) => {}
            }
        }
        for (name, state) in &assignment {
            if !by_name.contains_key(name) {
                findings.push(
                    Finding::new("assignment", "assignment names an undeclared source")
                        .with_source(name)
                        .with_state(state),
                );
            }
        }

        let graph = match DependencyGraph::new(by_name.keys().cloned(), edges) {
            Ok(g) => Some(g),
            Err(issues) => {
                findings.extend(
                    issues
                        .into_iter()
                        .map(|i| Finding::new("edges", i.to_string())),
                );
                None
            }
        };

        match graph {
            Some(graph) if findings.is_empty() => Ok(Self {
                frame,
                sources: by_name,
                graph,
                assignment,
                metadata,
                normalize: false,
            }),
            _ => Err(findings),
        }
    }

    pub(crate) fn with_normalize_flag(mut self, normalize: bool) -> Self {
        self.normalize = normalize;
        self
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn sources(&self) -> impl Iterator<Item = &UncertaintySource> {
        self.sources.values()
    }

    pub fn source(&self, name: &str) -> Result<&UncertaintySource> {
        self.sources
            .get(name)
            .ok_or_else(|| Error::UnknownSource(name.to_string()))
    }

    pub fn source_count(&self) -> usize {
        self.sources.len()
    }

    pub fn graph(&self) -> &DependencyGraph {
        &self.graph
    }

    pub fn assignment(&self) -> &BTreeMap<String, String> {
        &self.assignment
    }

    pub fn metadata(&self) -> &ScenarioMetadata {
        &self.metadata
    }

    /// Whether the tables were normalized on load.
    pub fn normalize(&self) -> bool {
        self.normalize
    }

    /// Fusion order: the graph's topological order.
    pub fn fusion_order(&self) -> &[String] {
        self.graph.order()
    }

    /// Fuses the baseline assignment, optionally with one source moved to
    /// another state.
    pub fn fuse_with(
        &self,
        rule: CombinationRule,
        overridden: Option<(&str, &str)>,
    ) -> Result<MassFunction> {
        if let Some((name, state)) = overridden {
            self.source(name)?.evidence_for(state)?;
        }
        let order = self.fusion_order();
        let evidence = order
            .iter()
            .map(|name| {
                let state = match overridden {
                    Some((o, s)) if o == name => s,
                    _ => self.assignment[name].as_str(),
                };
                self.sources[name].evidence_for(state)
            })
            .collect::<Result<Vec<_>>>()?;
        if evidence.is_empty() {
            return Ok(MassFunction::vacuous(&self.frame));
        }
        combine_many(evidence, rule).map_err(|e| match e {
            Error::TotalConflict { k, step, .. } => Error::TotalConflict {
                k,
                step,
                source_name: step.map(|i| order[i].clone()),
            },
            other => other,
        })
    }
}

/// Fuses every source's evidence for its assigned state, in topological
/// order.
pub fn fuse_scenario(config: &ScenarioConfig, rule: CombinationRule) -> Result<MassFunction> {
    config.fuse_with(rule, None)
}
