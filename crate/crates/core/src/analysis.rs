//! Impact classification of uncertainty sources and one-at-a-time
//! variance-based sensitivity analysis.
//!
//! Both analyses sweep a single source over its states while every other
//! source stays at the scenario's baseline assignment, fusing the evidence
//! each time and reading the belief / plausibility of every singleton
//! outcome.

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combination::CombinationRule;
use crate::error::{Error, Result};
use crate::mass::{MassFunction, UncertaintyInterval};
use crate::scenario::{fuse_scenario, ScenarioConfig};

/// Slack allowed when checking that an interval width lies in `[0, 1]`.
const RANGE_SLACK: f64 = 1e-9;

/// Band edges for impact classification, `0 < tau1 < tau2 < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpactThresholds {
    pub tau1: f64,
    pub tau2: f64,
}

impl ImpactThresholds {
    /// `tau1 = 0.2`, `tau2 = 0.5`.
    pub const DEFAULT: ImpactThresholds = ImpactThresholds {
        tau1: 0.2,
        tau2: 0.5,
    };

    pub fn new(tau1: f64, tau2: f64) -> Result<Self> {
        if !(tau1 > 0.0 && tau1 < tau2 && tau2 < 1.0) {
            return Err(Error::InvalidThresholds { tau1, tau2 });
        }
        Ok(Self { tau1, tau2 })
    }
}

impl Default for ImpactThresholds {
    fn default() -> Self {
        Self::DEFAULT
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ImpactLevel {
    Low,
    Moderate,
    High,
}

impl ImpactLevel {
    pub fn as_str(self) -> &'static str {
        match self {
            ImpactLevel::Low => "Low",
            ImpactLevel::Moderate => "Moderate",
            ImpactLevel::High => "High",
        }
    }
}

impl fmt::Display for ImpactLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Half-open bands: `u < tau1` is Low, `tau1 <= u < tau2` Moderate, else High.
pub fn classify_impact(u: f64, thresholds: ImpactThresholds) -> Result<ImpactLevel> {
    if !(-RANGE_SLACK..=1.0 + RANGE_SLACK).contains(&u) {
        return Err(Error::OutOfRange(u));
    }
    Ok(if u < thresholds.tau1 {
        ImpactLevel::Low
    } else if u < thresholds.tau2 {
        ImpactLevel::Moderate
    } else {
        ImpactLevel::High
    })
}

/// Percentile of sorted data by linear interpolation between order
/// statistics at rank `h = p·(n−1)`.
pub fn percentile(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput);
    }
    let h = p * (sorted.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// `tau1` and `tau2` as the 25th and 75th percentiles of per-source maximum
/// uncertainties.
pub fn derive_thresholds(max_us: &[f64]) -> Result<ImpactThresholds> {
    if max_us.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(&bad) = max_us.iter().find(|u| !(0.0..=1.0).contains(*u)) {
        return Err(Error::OutOfRange(bad));
    }
    let mut sorted = max_us.to_vec();
    sorted.sort_by(f64::total_cmp);
    let tau1 = percentile(&sorted, 0.25)?;
    let tau2 = percentile(&sorted, 0.75)?;
    ImpactThresholds::new(tau1, tau2).map_err(|_| Error::DegenerateThresholds { tau1, tau2 })
}

/// Population variance. Independent of input order, and exactly zero for
/// constant input.
pub fn population_variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted[0] == sorted[sorted.len() - 1] {
        return 0.0;
    }
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    sorted.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n
}

/// Singleton intervals of the fused evidence for each state of one source.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSweep {
    pub source: String,
    pub states: Vec<String>,
    /// `intervals[state][outcome]`.
    pub intervals: Vec<Vec<UncertaintyInterval>>,
}

impl StateSweep {
    /// Largest `Pl − Bel` over all states and singleton outcomes.
    pub fn max_width(&self) -> f64 {
        self.intervals
            .iter()
            .flatten()
            .map(|i| i.width)
            .fold(0.0, f64::max)
    }
}

pub fn sweep_source(
    config: &ScenarioConfig,
    source: &str,
    rule: CombinationRule,
) -> Result<StateSweep> {
    let src = config.source(source)?;
    let intervals = src
        .states()
        .iter()
        .map(|state| {
            config
                .fuse_with(rule, Some((source, state)))
                .map(|m| m.singleton_intervals())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(StateSweep {
        source: source.to_string(),
        states: src.states().to_vec(),
        intervals,
    })
}

/// Maximum interval width `U = Pl − Bel` seen while sweeping `source`.
pub fn source_uncertainty(
    config: &ScenarioConfig,
    source: &str,
    rule: CombinationRule,
) -> Result<f64> {
    Ok(sweep_source(config, source, rule)?.max_width())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeVariance {
    pub outcome: String,
    pub var_bel: f64,
    pub var_pl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityResult {
    pub source: String,
    pub outcomes: Vec<OutcomeVariance>,
    /// Max over outcomes of `max(var_bel, var_pl)`.
    pub score: f64,
}

impl SensitivityResult {
    fn from_sweep(sweep: &StateSweep, labels: &[String]) -> Self {
        let outcomes: Vec<OutcomeVariance> = labels
            .iter()
            .enumerate()
            .map(|(i, label)| {
                let bel: Vec<f64> = sweep.intervals.iter().map(|row| row[i].belief).collect();
                let pl: Vec<f64> = sweep
                    .intervals
                    .iter()
                    .map(|row| row[i].plausibility)
                    .collect();
                OutcomeVariance {
                    outcome: label.clone(),
                    var_bel: population_variance(&bel),
                    var_pl: population_variance(&pl),
                }
            })
            .collect();
        let score = outcomes
            .iter()
            .map(|o| o.var_bel.max(o.var_pl))
            .fold(0.0, f64::max);
        Self {
            source: sweep.source.clone(),
            outcomes,
            score,
        }
    }
}

/// One-at-a-time variance of singleton belief and plausibility over the
/// states of `source`.
pub fn vbsa(
    config: &ScenarioConfig,
    source: &str,
    rule: CombinationRule,
) -> Result<SensitivityResult> {
    let sweep = sweep_source(config, source, rule)?;
    Ok(SensitivityResult::from_sweep(
        &sweep,
        config.frame().labels(),
    ))
}

fn by_score_then_name(a: &SensitivityResult, b: &SensitivityResult) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.source.cmp(&b.source))
}

fn sweep_all(config: &ScenarioConfig, rule: CombinationRule) -> Result<Vec<StateSweep>> {
    let names: Vec<&str> = config.sources().map(|s| s.name()).collect();
    names
        .par_iter()
        .map(|name| sweep_source(config, name, rule))
        .collect()
}

/// Sensitivity of every source, highest score first; ties by name.
pub fn rank_sources(
    config: &ScenarioConfig,
    rule: CombinationRule,
) -> Result<Vec<SensitivityResult>> {
    let labels = config.frame().labels();
    let mut ranked: Vec<_> = sweep_all(config, rule)?
        .iter()
        .map(|s| SensitivityResult::from_sweep(s, labels))
        .collect();
    ranked.sort_by(by_score_then_name);
    Ok(ranked)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdChoice {
    Fixed(ImpactThresholds),
    /// Quartiles of the per-source maximum uncertainties.
    Derive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeInterval {
    pub outcome: String,
    pub belief: f64,
    pub plausibility: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceImpact {
    pub source: String,
    pub max_u: f64,
    pub level: ImpactLevel,
}

/// Everything the pipeline produces for one scenario and rule.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub rule: CombinationRule,
    pub order: Vec<String>,
    pub fused: MassFunction,
    pub intervals: Vec<OutcomeInterval>,
    pub thresholds: ImpactThresholds,
    pub thresholds_derived: bool,
    /// One entry per source, by name.
    pub impacts: Vec<SourceImpact>,
    /// Sensitivity ranking, highest score first.
    pub sensitivity: Vec<SensitivityResult>,
}

pub fn outcome_intervals(mass: &MassFunction) -> Vec<OutcomeInterval> {
    mass.frame()
        .labels()
        .iter()
        .zip(mass.singleton_intervals())
        .map(|(label, i)| OutcomeInterval {
            outcome: label.clone(),
            belief: i.belief,
            plausibility: i.plausibility,
            width: i.width,
        })
        .collect()
}

/// Classifies every source from its maximum uncertainty.
pub fn classify_sources(
    config: &ScenarioConfig,
    rule: CombinationRule,
    choice: ThresholdChoice,
) -> Result<(ImpactThresholds, Vec<SourceImpact>)> {
    let sweeps = sweep_all(config, rule)?;
    impacts_from_sweeps(&sweeps, choice)
}

fn impacts_from_sweeps(
    sweeps: &[StateSweep],
    choice: ThresholdChoice,
) -> Result<(ImpactThresholds, Vec<SourceImpact>)> {
    let max_us: Vec<f64> = sweeps.iter().map(StateSweep::max_width).collect();
    let thresholds = match choice {
        ThresholdChoice::Fixed(t) => t,
        ThresholdChoice::Derive => derive_thresholds(&max_us)?,
    };
    let impacts = sweeps
        .iter()
        .zip(&max_us)
        .map(|(s, &u)| {
            Ok(SourceImpact {
                source: s.source.clone(),
                max_u: u,
                level: classify_impact(u, thresholds)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((thresholds, impacts))
}

pub fn build_report(
    config: &ScenarioConfig,
    rule: CombinationRule,
    choice: ThresholdChoice,
) -> Result<AnalysisReport> {
    let fused = fuse_scenario(config, rule)?;
    let sweeps = sweep_all(config, rule)?;
    let (thresholds, impacts) = impacts_from_sweeps(&sweeps, choice)?;
    let labels = config.frame().labels();
    let mut sensitivity: Vec<_> = sweeps
        .iter()
        .map(|s| SensitivityResult::from_sweep(s, labels))
        .collect();
    sensitivity.sort_by(by_score_then_name);
    Ok(AnalysisReport {
        rule,
        order: config.fusion_order().to_vec(),
        intervals: outcome_intervals(&fused),
        fused,
        thresholds,
        thresholds_derived: matches!(choice, ThresholdChoice::Derive),
        impacts,
        sensitivity,
    })
}
