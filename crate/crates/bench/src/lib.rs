//! Inputs shared by the benchmarks.

use std::path::Path;

use dsfuse::{load_scenario, Frame, MassFunction, ScenarioConfig};

pub fn bundled_scenario() -> ScenarioConfig {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/sotif_lidar.scenario");
    load_scenario(&path).expect("bundled scenario loads")
}

/// Frame `o0 … o{n-1}`.
pub fn frame(n: usize) -> Frame {
    Frame::new((0..n).map(|i| format!("o{i}"))).expect("valid frame size")
}

/// Deterministic BPA with `focal` focal elements: singletons, adjacent
/// pairs and the whole frame, weighted by a shifted sequence.
pub fn spread_bpa(frame: &Frame, focal: usize, shift: usize) -> MassFunction {
    let n = frame.len();
    let labels = frame.labels();
    let mut entries = Vec::with_capacity(focal);
    entries.push((frame.full(), 1.0));
    for i in 0..focal.saturating_sub(1) {
        let a = &labels[(i + shift) % n];
        let expr = if i < n {
            a.clone()
        } else {
            format!("{a}+{}", labels[(i + shift + 1) % n])
        };
        let subset = frame.parse_subset(&expr).expect("labels from frame");
        entries.push((subset, 1.0 + ((i * 7 + shift) % 5) as f64));
    }
    MassFunction::normalize(frame, entries).expect("positive weights")
}
