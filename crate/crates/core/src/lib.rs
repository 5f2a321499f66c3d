//! Dempster-Shafer evidential reasoning for SOTIF uncertainty analysis.
//!
//! The crate is organised bottom-up:
//!
//! - [`frame`]: frames of discernment and subset words,
//! - [`mass`]: mass functions with belief / plausibility queries,
//! - [`combination`]: conflict, Dempster's and Yager's rules, ordered folds,
//! - [`scenario`]: uncertainty sources, dependency DAG, scenario files,
//! - [`analysis`]: impact classification and variance-based sensitivity.
//!
//! ```
//! use dsfuse::{Frame, MassFunction, yager};
//!
//! let frame = Frame::new(["cyclist", "truck", "false_negative"])?;
//! let s = |e: &str| frame.parse_subset(e).unwrap();
//! let m1 = MassFunction::new(&frame, [(s("cyclist"), 0.9), (s("truck"), 0.1)])?;
//! let m2 = MassFunction::new(&frame, [(s("false_negative"), 0.9), (s("truck"), 0.1)])?;
//! let fused = yager(&m1, &m2)?;
//! assert!((fused.mass(frame.full())? - 0.99).abs() < 1e-9);
//! # Ok::<(), dsfuse::Error>(())
//! ```

pub mod analysis;
pub mod combination;
pub mod error;
pub mod frame;
pub mod mass;
pub mod scenario;

pub use analysis::{
    build_report, classify_impact, classify_sources, derive_thresholds, population_variance,
    rank_sources, source_uncertainty, vbsa, AnalysisReport, ImpactLevel, ImpactThresholds,
    OutcomeInterval, OutcomeVariance, SensitivityResult, SourceImpact, ThresholdChoice,
};
pub use combination::{combine_many, conflict, dempster, yager, CombinationRule, ConflictReport};
pub use error::{Error, Result};
pub use frame::{Frame, SubsetMask};
pub use mass::{MassFunction, UncertaintyInterval};
pub use scenario::{
    fuse_scenario, load_scenario, parse_scenario, save_scenario, Category, DependencyGraph,
    Finding, ScenarioConfig, ScenarioError, UncertaintySource,
};
