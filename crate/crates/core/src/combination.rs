//! Evidence fusion: conflict coefficient, Dempster's rule, Yager's rule and
//! ordered multi-source folding.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mass::MassFunction;

/// Dempster's rule is undefined when `|1 - K|` falls below this.
pub const TOTAL_CONFLICT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombinationRule {
    Dempster,
    #[default]
    Yager,
}

impl CombinationRule {
    pub fn combine(self, m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
        match self {
            CombinationRule::Dempster => dempster(m1, m2),
            CombinationRule::Yager => yager(m1, m2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CombinationRule::Dempster => "dempster",
            CombinationRule::Yager => "yager",
        }
    }
}

impl fmt::Display for CombinationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CombinationRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dempster" => Ok(CombinationRule::Dempster),
            "yager" => Ok(CombinationRule::Yager),
            other => Err(format!("unknown combination rule `{other}`")),
        }
    }
}

/// Conflict coefficient `K` between two bodies of evidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConflictReport {
    pub k: f64,
}

impl ConflictReport {
    pub fn is_total(self) -> bool {
        (1.0 - self.k).abs() <= TOTAL_CONFLICT_TOLERANCE
    }
}

/// Conjunctive product table: mass of every non-empty intersection, plus the
/// mass falling on the empty set (the conflict).
struct Conjunction {
    masses: BTreeMap<u64, f64>,
    conflict: f64,
}

fn conjunction(m1: &MassFunction, m2: &MassFunction) -> Result<Conjunction> {
    if m1.frame() != m2.frame() {
        return Err(Error::FrameMismatch);
    }
    let mut masses = BTreeMap::new();
    let mut conflict = 0.0;
    for (&a, &x) in m1.focal_bits() {
        for (&b, &y) in m2.focal_bits() {
            let c = a & b;
            if c == 0 {
                conflict += x * y;
            } else {
                *masses.entry(c).or_insert(0.0) += x * y;
            }
        }
    }
    Ok(Conjunction { masses, conflict })
}

/// `K = Σ_{A∩B=∅} m1(A)·m2(B)`.
pub fn conflict(m1: &MassFunction, m2: &MassFunction) -> Result<ConflictReport> {
    if m1.frame() != m2.frame() {
        return Err(Error::FrameMismatch);
    }
    let mut k = 0.0;
    for (&a, &x) in m1.focal_bits() {
        for (&b, &y) in m2.focal_bits() {
            if a & b == 0 {
                k += x * y;
            }
        }
    }
    Ok(ConflictReport { k })
}

/// Dempster's rule: conjunctive combination renormalized by `1 - K`.
///
/// The normalizer is the accumulated non-conflicting mass, which equals
/// `1 - K` for normalized inputs but keeps the result's total at 1 to
/// rounding.
pub fn dempster(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    let Conjunction {
        mut masses,
        conflict,
    } = conjunction(m1, m2)?;
    if (ConflictReport { k: conflict }).is_total() {
        return Err(Error::TotalConflict {
            k: conflict,
            step: None,
            source_name: None,
        });
    }
    let agreement: f64 = masses.values().sum();
    for m in masses.values_mut() {
        *m /= agreement;
    }
    Ok(MassFunction::from_parts(m1.frame(), masses))
}

/// Yager's rule: conjunctive combination with the conflicting mass assigned
/// to the whole frame instead of renormalizing.
pub fn yager(m1: &MassFunction, m2: &MassFunction) -> Result<MassFunction> {
    let Conjunction {
        mut masses,
        conflict,
    } = conjunction(m1, m2)?;
    if conflict > 0.0 {
        *masses.entry(m1.frame().full().bits()).or_insert(0.0) += conflict;
    }
    Ok(MassFunction::from_parts(m1.frame(), masses))
}

/// Left fold `((m1 ⊕ m2) ⊕ m3) …` in the order given.
///
/// Yager's rule is not associative, so the order is part of the result.
/// A total conflict under Dempster's rule reports the index of the operand
/// being folded in.
pub fn combine_many<'a, I>(masses: I, rule: CombinationRule) -> Result<MassFunction>
where
    I: IntoIterator<Item = &'a MassFunction>,
{
    let mut iter = masses.into_iter();
    let first = iter.next().ok_or(Error::EmptyList)?;
    let mut acc = first.clone();
    for (i, m) in iter.enumerate() {
        acc = rule.combine(&acc, m).map_err(|e| match e {
            Error::TotalConflict { k, source_name, .. } => Error::TotalConflict {
                k,
                step: Some(i + 1),
                source_name,
            },
            other => other,
        })?;
    }
    Ok(acc)
}
