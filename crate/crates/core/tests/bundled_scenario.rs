use std::path::PathBuf;

use dsfuse::analysis::sweep_source;
use dsfuse::{
    fuse_scenario, load_scenario, parse_scenario, rank_sources, save_scenario, source_uncertainty,
    CombinationRule, ScenarioConfig, ScenarioError,
};

fn bundled_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/sotif_lidar.scenario")
}

fn bundled_text() -> String {
    std::fs::read_to_string(bundled_path()).unwrap()
}

fn bundled() -> ScenarioConfig {
    load_scenario(bundled_path()).unwrap()
}

/// Hand-traced Kahn order over the bundled edges, smallest name first.
const FOLD_ORDER: [&str; 10] = [
    "DlModelTrainingQuality",
    "FogDensity",
    "ObjectProximity",
    "RainIntensity",
    "NoiseInLidarData",
    "SurfaceType",
    "ScatteringOfLidarSignals",
    "WetRoadConditions",
    "ReflectionVariability",
    "LidarSensorPerformance",
];

/// Per-source (max U, sensitivity score), computed by a separate
/// dictionary-based implementation of the pipeline.
const REFERENCE: [(&str, f64, f64); 10] = [
    ("RainIntensity", 0.7379548641597654, 0.09336642779226251),
    (
        "LidarSensorPerformance",
        0.5732633458620052,
        0.05195640887800307,
    ),
    ("SurfaceType", 0.5472726446660209, 0.04761620951478405),
    ("WetRoadConditions", 0.4108264385099224, 0.02566037244793252),
    ("ObjectProximity", 0.3175790348378271, 0.014285421893001604),
    (
        "NoiseInLidarData",
        0.27380678636049105,
        0.010201910331607023,
    ),
    (
        "DlModelTrainingQuality",
        0.24105365699594994,
        0.007414812368683052,
    ),
    (
        "ScatteringOfLidarSignals",
        0.18623967486383822,
        0.14910149239935694,
    ),
    (
        "ReflectionVariability",
        0.11383617559322641,
        0.001043097554164358,
    ),
    ("FogDensity", 0.08801552727788531, 0.00041776070543958726),
];

/// Yager's rule over dense `2^n` mass vectors, enumerating every pair of
/// subsets.
fn dense_yager(a: &[f64], b: &[f64]) -> Vec<f64> {
    let full = a.len() - 1;
    let mut out = vec![0.0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            let c = i & j;
            if c == 0 {
                out[full] += x * y;
            } else {
                out[c] += x * y;
            }
        }
    }
    out
}

fn dense(cfg: &ScenarioConfig, source: &str, state: &str) -> Vec<f64> {
    let m = cfg.source(source).unwrap().evidence_for(state).unwrap();
    cfg.frame()
        .enumerate_subsets()
        .unwrap()
        .map(|s| m.mass(s).unwrap())
        .collect()
}

#[test]
fn shape_of_bundled_scenario() {
    let cfg = bundled();
    assert_eq!(cfg.source_count(), 10);
    assert_eq!(cfg.frame().len(), 4);
    assert_eq!(cfg.graph().edges().len(), 10);
    assert_eq!(cfg.fusion_order(), FOLD_ORDER);
    for s in cfg.sources() {
        assert_eq!(s.states().len(), 3, "{}", s.name());
        for state in s.states() {
            let m = s.evidence_for(state).unwrap();
            assert!((m.total_mass() - 1.0).abs() < 1e-9);
            assert!(m.focal_elements().all(|(f, v)| !f.is_empty() && v > 0.0));
        }
    }
}

#[test]
fn fusion_matches_dense_oracle() {
    let cfg = bundled();
    let frame = cfg.frame();
    let mut acc = vec![0.0; 16];
    acc[15] = 1.0;
    for name in FOLD_ORDER {
        acc = dense_yager(&acc, &dense(&cfg, name, &cfg.assignment()[name]));
    }
    let fused = fuse_scenario(&cfg, CombinationRule::Yager).unwrap();
    for (i, subset) in frame.enumerate_subsets().unwrap().enumerate() {
        assert!(
            (fused.mass(subset).unwrap() - acc[i]).abs() < 1e-9,
            "subset {i}"
        );
    }
    let cyclist = frame.parse_subset("cyclist").unwrap();
    assert!((fused.mass(cyclist).unwrap() - 0.9587379934047829).abs() < 1e-9);
    assert!((fused.mass(frame.full()).unwrap() - 0.041262006595216595).abs() < 1e-9);
}

#[test]
fn per_source_values_match_reference() {
    let cfg = bundled();
    for (name, max_u, _) in REFERENCE {
        let u = source_uncertainty(&cfg, name, CombinationRule::Yager).unwrap();
        assert!((u - max_u).abs() < 1e-9, "{name}: {u} vs {max_u}");
    }
    let ranked = rank_sources(&cfg, CombinationRule::Yager).unwrap();
    for (name, _, score) in REFERENCE {
        let r = ranked.iter().find(|r| r.source == name).unwrap();
        assert!(
            (r.score - score).abs() < 1e-9,
            "{name}: {} vs {score}",
            r.score
        );
    }
}

#[test]
fn sweep_uses_dense_oracle_too() {
    // Rain in its High state, everything else at baseline.
    let cfg = bundled();
    let mut acc = vec![0.0; 16];
    acc[15] = 1.0;
    for name in FOLD_ORDER {
        let state = if name == "RainIntensity" {
            "High"
        } else {
            cfg.assignment()[name].as_str()
        };
        acc = dense_yager(&acc, &dense(&cfg, name, state));
    }
    let sweep = sweep_source(&cfg, "RainIntensity", CombinationRule::Yager).unwrap();
    assert_eq!(sweep.states, ["Low", "Medium", "High"]);
    let high = &sweep.intervals[2];
    for (k, interval) in high.iter().enumerate() {
        let single = 1usize << k;
        let bel = acc[single];
        let pl: f64 = (1..16).filter(|s| s & single != 0).map(|s| acc[s]).sum();
        assert!((interval.belief - bel).abs() < 1e-9);
        assert!((interval.plausibility - pl).abs() < 1e-9);
    }
}

#[test]
fn evidence_tables_follow_stated_trends() {
    let cfg = bundled();
    let frame = cfg.frame();
    let bel = |source: &str, state: &str, outcome: &str| {
        cfg.source(source)
            .unwrap()
            .evidence_for(state)
            .unwrap()
            .belief(frame.parse_subset(outcome).unwrap())
            .unwrap()
    };
    let fp: Vec<f64> = ["Low", "Medium", "High"]
        .iter()
        .map(|s| bel("RainIntensity", s, "false_positive"))
        .collect();
    assert!(fp[0] < fp[1] && fp[1] < fp[2]);
    let fneg: Vec<f64> = ["Low", "Medium", "High"]
        .iter()
        .map(|s| bel("ScatteringOfLidarSignals", s, "false_negative"))
        .collect();
    assert!(fneg[0] < fneg[1] && fneg[1] < fneg[2]);
    let fog_fp: Vec<f64> = ["Low", "Medium", "High"]
        .iter()
        .map(|s| bel("FogDensity", s, "false_positive"))
        .collect();
    assert!(fog_fp.iter().all(|&v| v <= 0.02));
}

#[test]
fn reverse_edge_creates_cycle() {
    let text = bundled_text().replace(
        "edges = [\n",
        "edges = [\n  \"WetRoadConditions->RainIntensity\",\n",
    );
    match parse_scenario(&text).unwrap_err() {
        ScenarioError::Validation(findings) => {
            assert_eq!(findings.len(), 1);
            assert!(
                findings[0]
                    .reason
                    .contains("cycle RainIntensity->WetRoadConditions->RainIntensity"),
                "{}",
                findings[0]
            );
        }
        other => panic!("expected validation error, got {other:?}"),
    }
}

#[test]
fn assignment_outside_domain() {
    let text = bundled_text().replace("RainIntensity = \"Low\"", "RainIntensity = \"Extreme\"");
    match parse_scenario(&text).unwrap_err() {
        ScenarioError::Validation(findings) => {
            assert!(findings
                .iter()
                .any(|f| f.source.as_deref() == Some("RainIntensity")
                    && f.state.as_deref() == Some("Extreme")));
        }
        other => panic!("expected validation error, got {other:?}"),
    }
}

/// Re-emits the document with its `[[sources]]` blocks in reverse order.
fn reverse_source_blocks(text: &str) -> String {
    let mut parts: Vec<&str> = text.split("[[sources]]").collect();
    let head = parts.remove(0);
    parts.reverse();
    let mut out = head.to_string();
    for p in parts {
        out.push_str("[[sources]]");
        out.push_str(p.trim_end());
        out.push_str("\n\n");
    }
    out
}

#[test]
fn declaration_order_is_irrelevant() {
    let text = bundled_text();
    let reversed = reverse_source_blocks(&text);
    assert_ne!(text, reversed);
    let a = parse_scenario(&text).unwrap();
    let b = parse_scenario(&reversed).unwrap();
    for rule in [CombinationRule::Yager, CombinationRule::Dempster] {
        assert_eq!(
            fuse_scenario(&a, rule).unwrap(),
            fuse_scenario(&b, rule).unwrap()
        );
        assert_eq!(
            rank_sources(&a, rule).unwrap(),
            rank_sources(&b, rule).unwrap()
        );
    }
}

#[test]
fn save_load_round_trip() {
    let cfg = bundled();
    let saved = save_scenario(&cfg);
    let again = parse_scenario(&saved).unwrap();
    assert_eq!(again, cfg);
    assert_eq!(save_scenario(&again), saved);
}

#[test]
fn fusion_is_bit_identical_across_runs() {
    let cfg = bundled();
    let a = fuse_scenario(&cfg, CombinationRule::Yager).unwrap();
    let b = fuse_scenario(&cfg, CombinationRule::Yager).unwrap();
    assert_eq!(a, b);
}
