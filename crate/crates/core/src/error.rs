use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised by the evidence-theory primitives and the analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("duplicate outcome label `{0}`")]
    DuplicateLabel(String),

    #[error("outcome labels must be non-empty")]
    EmptyLabel,

    #[error("frame has {0} outcomes; at most 64 are supported")]
    FrameTooLarge(usize),

    #[error("unknown outcome label `{0}`")]
    UnknownLabel(String),

    #[error("frame has {0} outcomes; exhaustive enumeration is limited to 20")]
    FrameTooLargeForEnumeration(usize),

    #[error("subsets or mass functions belong to different frames")]
    FrameMismatch,

    #[error("mass {0} assigned to the empty set")]
    EmptySetMass(f64),

    #[error("masses sum to {0}, expected 1")]
    NotNormalized(f64),

    #[error("negative mass {0}")]
    NegativeMass(f64),

    #[error("mass {0} is not a finite number")]
    NonFiniteMass(f64),

    #[error("no mass on any non-empty subset; cannot normalize")]
    AllMassOnEmptySet,

    #[error("{}", conflict_message(*.k, *.step, .source_name.as_deref()))]
    TotalConflict {
        k: f64,
        /// Index of the operand being folded in when the conflict occurred.
        step: Option<usize>,
        source_name: Option<String>,
    },

    #[error("cannot combine an empty list of mass functions")]
    EmptyList,

    #[error("dependency graph contains a cycle: {}", .0.join(" -> "))]
    CyclicGraph(Vec<String>),

    #[error("source `{source_name}` has no state `{state}`")]
    UnknownState { source_name: String, state: String },

    #[error("unknown source `{0}`")]
    UnknownSource(String),

    #[error("empty input")]
    EmptyInput,

    #[error("thresholds collapse (tau1 = {tau1}, tau2 = {tau2})")]
    DegenerateThresholds { tau1: f64, tau2: f64 },

    #[error("thresholds must satisfy 0 < tau1 < tau2 < 1 (got tau1 = {tau1}, tau2 = {tau2})")]
    InvalidThresholds { tau1: f64, tau2: f64 },

    #[error("value {0} is outside [0, 1]")]
    OutOfRange(f64),
}

fn conflict_message(k: f64, step: Option<usize>, source: Option<&str>) -> String {
    let mut msg = format!("total conflict (K = {k})");
    match (step, source) {
        (Some(step), Some(source)) => {
            msg.push_str(&format!(" at fold step {step} (source `{source}`)"))
        }
        (Some(step), None) => msg.push_str(&format!(" at fold step {step}")),
        (None, Some(source)) => msg.push_str(&format!(" combining source `{source}`")),
        (None, None) => {}
    }
    msg.push_str("; Dempster's rule is undefined, use Yager's rule");
    msg
}
