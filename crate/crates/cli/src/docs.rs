//! Output documents. Each command's JSON output deserializes back into the
//! matching type.

use std::collections::BTreeMap;

use dsfuse::analysis::outcome_intervals;
use dsfuse::{
    AnalysisReport, CombinationRule, ImpactThresholds, MassFunction, OutcomeInterval,
    ScenarioConfig, SensitivityResult, SourceImpact,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuseDoc {
    pub rule: CombinationRule,
    pub order: Vec<String>,
    /// Focal elements keyed by subset expression.
    pub masses: BTreeMap<String, f64>,
    pub intervals: Vec<OutcomeInterval>,
}

impl FuseDoc {
    pub fn new(config: &ScenarioConfig, rule: CombinationRule, fused: &MassFunction) -> Self {
        Self {
            rule,
            order: config.fusion_order().to_vec(),
            masses: fused.to_expr_map(),
            intervals: outcome_intervals(fused),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyDoc {
    pub rule: CombinationRule,
    pub thresholds: ImpactThresholds,
    pub thresholds_derived: bool,
    pub sources: Vec<SourceImpact>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VbsaDoc {
    pub rule: CombinationRule,
    pub ranking: Vec<SensitivityResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToolInfo {
    pub name: String,
    pub version: String,
}

impl Default for ToolInfo {
    fn default() -> Self {
        Self {
            name: "dsfuse".into(),
            version: env!("CARGO_PKG_VERSION").into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioInfo {
    pub title: String,
    pub description: String,
    pub outcomes: Vec<String>,
    pub sources: usize,
    pub edges: usize,
    pub assignment: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub tool: ToolInfo,
    pub scenario: ScenarioInfo,
    pub rule: CombinationRule,
    pub order: Vec<String>,
    pub masses: BTreeMap<String, f64>,
    pub intervals: Vec<OutcomeInterval>,
    pub thresholds: ImpactThresholds,
    pub thresholds_derived: bool,
    pub impact: Vec<SourceImpact>,
    pub sensitivity: Vec<SensitivityResult>,
}

impl ReportDoc {
    pub fn new(config: &ScenarioConfig, report: AnalysisReport) -> Self {
        let meta = config.metadata();
        Self {
            tool: ToolInfo::default(),
            scenario: ScenarioInfo {
                title: meta.title.clone(),
                description: meta.description.clone(),
                outcomes: config.frame().labels().to_vec(),
                sources: config.source_count(),
                edges: config.graph().edges().len(),
                assignment: config.assignment().clone(),
            },
            rule: report.rule,
            order: report.order,
            masses: report.fused.to_expr_map(),
            intervals: report.intervals,
            thresholds: report.thresholds,
            thresholds_derived: report.thresholds_derived,
            impact: report.impacts,
            sensitivity: report.sensitivity,
        }
    }
}
