//! Basic probability assignments and the belief / plausibility queries.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frame::{Frame, SubsetMask};

/// Allowed deviation of the total mass from 1.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// A normalized mass function over the subsets of a frame.
///
/// Only focal elements (subsets with strictly positive mass) are stored, keyed
/// by their set word so iteration order is fixed.
#[derive(Debug, Clone, PartialEq)]
pub struct MassFunction {
    frame: Frame,
    focal: BTreeMap<u64, f64>,
}

/// `[Bel(A), Pl(A)]` together with its width `Pl(A) - Bel(A)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyInterval {
    pub belief: f64,
    pub plausibility: f64,
    pub width: f64,
}

impl UncertaintyInterval {
    pub fn new(belief: f64, plausibility: f64) -> Self {
        Self {
            belief,
            plausibility,
            width: plausibility - belief,
        }
    }
}

fn collect_masses<I>(frame: &Frame, assignments: I) -> Result<BTreeMap<u64, f64>>
where
    I: IntoIterator<Item = (SubsetMask, f64)>,
{
    let mut masses = BTreeMap::new();
    for (subset, mass) in assignments {
        frame.check(subset)?;
        if !mass.is_finite() {
            return Err(Error::NonFiniteMass(mass));
        }
        if mass < 0.0 {
            return Err(Error::NegativeMass(mass));
        }
        *masses.entry(subset.bits()).or_insert(0.0) += mass;
    }
    Ok(masses)
}

impl MassFunction {
    /// Validates an assignment. Zero entries are dropped; repeated subsets
    /// are summed.
    pub fn new<I>(frame: &Frame, assignments: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SubsetMask, f64)>,
    {
        let mut masses = collect_masses(frame, assignments)?;
        if let Some(&m) = masses.get(&0) {
            if m > 0.0 {
                return Err(Error::EmptySetMass(m));
            }
        }
        masses.retain(|_, m| *m > 0.0);
        let total: f64 = masses.values().sum();
        if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self {
            frame: frame.clone(),
            focal: masses,
        })
    }

    /// Builds a mass function from unnormalized weights: mass on the empty
    /// set is discarded and the rest rescaled to sum to 1.
    pub fn normalize<I>(frame: &Frame, assignments: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SubsetMask, f64)>,
    {
        let mut masses = collect_masses(frame, assignments)?;
        masses.remove(&0);
        masses.retain(|_, m| *m > 0.0);
        let total: f64 = masses.values().sum();
        if masses.is_empty() || total <= 0.0 {
            return Err(Error::AllMassOnEmptySet);
        }
        for m in masses.values_mut() {
            *m /= total;
        }
        masses.retain(|_, m| *m > 0.0);
        Ok(Self {
            frame: frame.clone(),
            focal: masses,
        })
    }

    /// Total ignorance: all mass on the whole frame.
    pub fn vacuous(frame: &Frame) -> Self {
        Self {
            frame: frame.clone(),
            focal: BTreeMap::from([(frame.full().bits(), 1.0)]),
        }
    }

    /// Wraps masses produced by a combination rule. Callers guarantee keys are
    /// non-empty subsets of `frame` and that the values sum to 1.
    pub(crate) fn from_parts(frame: &Frame, mut focal: BTreeMap<u64, f64>) -> Self {
        focal.retain(|_, m| *m > 0.0);
        debug_assert!(!focal.contains_key(&0));
        debug_assert!((focal.values().sum::<f64>() - 1.0).abs() <= NORMALIZATION_TOLERANCE);
        Self {
            frame: frame.clone(),
            focal,
        }
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    /// Focal elements and their masses in ascending set-word order.
    pub fn focal_elements(&self) -> impl Iterator<Item = (SubsetMask, f64)> + '_ {
        self.focal
            .iter()
            .map(|(&bits, &m)| (self.frame.mask_from_bits(bits), m))
    }

    pub(crate) fn focal_bits(&self) -> &BTreeMap<u64, f64> {
        &self.focal
    }

    pub fn focal_count(&self) -> usize {
        self.focal.len()
    }

    /// `m(subset)`; zero for non-focal subsets.
    pub fn mass(&self, subset: SubsetMask) -> Result<f64> {
        self.frame.check(subset)?;
        Ok(self.focal.get(&subset.bits()).copied().unwrap_or(0.0))
    }

    pub fn total_mass(&self) -> f64 {
        self.focal.values().sum()
    }

    pub fn is_vacuous(&self) -> bool {
        self.focal.len() == 1 && self.focal.contains_key(&self.frame.full().bits())
    }

    /// `Bel(A)`: total mass of focal elements contained in `subset`.
    pub fn belief(&self, subset: SubsetMask) -> Result<f64> {
        self.frame.check(subset)?;
        let a = subset.bits();
        Ok(self
            .focal
            .iter()
            .filter(|(&b, _)| b & !a == 0)
            .map(|(_, &m)| m)
            .sum())
    }

    /// `Pl(A)`: total mass of focal elements intersecting `subset`.
    pub fn plausibility(&self, subset: SubsetMask) -> Result<f64> {
        self.frame.check(subset)?;
        let a = subset.bits();
        Ok(self
            .focal
            .iter()
            .filter(|(&b, _)| b & a != 0)
            .map(|(_, &m)| m)
            .sum())
    }

    pub fn uncertainty_interval(&self, subset: SubsetMask) -> Result<UncertaintyInterval> {
        Ok(UncertaintyInterval::new(
            self.belief(subset)?,
            self.plausibility(subset)?,
        ))
    }

    /// Interval for every singleton outcome, in frame order.
    pub fn singleton_intervals(&self) -> Vec<UncertaintyInterval> {
        self.frame
            .singletons()
            .map(|s| {
                self.uncertainty_interval(s)
                    .expect("singletons come from the owning frame")
            })
            .collect()
    }

    /// Largest deviation between the masses of two functions over the union
    /// of their focal elements.
    pub fn max_abs_diff(&self, other: &MassFunction) -> Result<f64> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch);
        }
        let mut diff: f64 = 0.0;
        for (bits, m) in &self.focal {
            diff = diff.max((m - other.focal.get(bits).copied().unwrap_or(0.0)).abs());
        }
        for (bits, m) in &other.focal {
            diff = diff.max((m - self.focal.get(bits).copied().unwrap_or(0.0)).abs());
        }
        Ok(diff)
    }

    /// Focal elements as canonical subset expressions.
    pub fn to_expr_map(&self) -> BTreeMap<String, f64> {
        self.focal_elements()
            .map(|(s, m)| {
                (
                    self.frame
                        .format_subset(s)
                        .expect("focal elements come from the owning frame"),
                    m,
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const EPS: f64 = 1e-9;

    fn frame() -> Frame {
        Frame::new(["t1", "t2", "t3", "t4"]).unwrap()
    }

    fn bits(f: &Frame, b: u64) -> SubsetMask {
        f.mask_from_bits(b)
    }

    fn sample(f: &Frame) -> MassFunction {
        MassFunction::new(
            f,
            [
                (bits(f, 0b0001), 0.5),
                (bits(f, 0b0011), 0.3),
                (f.full(), 0.2),
            ],
        )
        .unwrap()
    }

    #[test]
    fn vacuous_is_valid() {
        let f = frame();
        let m = MassFunction::new(&f, [(f.full(), 1.0)]).unwrap();
        assert!(m.is_vacuous());
        assert_eq!(m, MassFunction::vacuous(&f));
    }

    #[test]
    fn sample_has_three_focal_elements() {
        assert_eq!(sample(&frame()).focal_count(), 3);
    }

    #[test]
    fn validation_errors() {
        let f = frame();
        assert_eq!(
            MassFunction::new(&f, [(bits(&f, 1), 0.5)]).unwrap_err(),
            Error::NotNormalized(0.5)
        );
        assert_eq!(
            MassFunction::new(&f, [(f.empty(), 0.1), (f.full(), 0.9)]).unwrap_err(),
            Error::EmptySetMass(0.1)
        );
        assert_eq!(
            MassFunction::new(&f, [(bits(&f, 1), -0.1), (f.full(), 1.1)]).unwrap_err(),
            Error::NegativeMass(-0.1)
        );
        assert!(matches!(
            MassFunction::new(&f, [(f.full(), f64::NAN)]),
            Err(Error::NonFiniteMass(_))
        ));
        let g = Frame::new(["x"]).unwrap();
        assert_eq!(
            MassFunction::new(&f, [(g.full(), 1.0)]).unwrap_err(),
            Error::FrameMismatch
        );
    }

    #[test]
    fn zero_entries_and_tolerance() {
        let f = frame();
        let m = MassFunction::new(
            &f,
            [
                (f.empty(), 0.0),
                (bits(&f, 1), 0.0),
                (f.full(), 1.0 + 5e-10),
            ],
        )
        .unwrap();
        assert_eq!(m.focal_count(), 1);
        assert!(MassFunction::new(&f, [(f.full(), 1.0 + 2e-9)]).is_err());
    }

    #[test]
    fn normalize_examples() {
        let f = frame();
        let m = MassFunction::normalize(&f, [(bits(&f, 1), 2.0), (bits(&f, 2), 2.0)]).unwrap();
        assert_eq!(m.mass(bits(&f, 1)).unwrap(), 0.5);
        assert_eq!(m.mass(bits(&f, 2)).unwrap(), 0.5);

        let m = MassFunction::normalize(&f, [(f.empty(), 0.5), (f.full(), 0.5)]).unwrap();
        assert!(m.is_vacuous());
        assert_eq!(m.mass(f.full()).unwrap(), 1.0);

        assert_eq!(
            MassFunction::normalize(&f, [(f.empty(), 1.0)]).unwrap_err(),
            Error::AllMassOnEmptySet
        );
    }

    #[test]
    fn belief_examples() {
        let f = frame();
        let m = sample(&f);
        assert!((m.belief(bits(&f, 0b0001)).unwrap() - 0.5).abs() < EPS);
        assert!((m.belief(bits(&f, 0b0011)).unwrap() - 0.8).abs() < EPS);
        assert!((m.belief(f.full()).unwrap() - 1.0).abs() < EPS);
        assert_eq!(m.belief(f.empty()).unwrap(), 0.0);
    }

    #[test]
    fn plausibility_examples() {
        let f = frame();
        let m = sample(&f);
        assert!((m.plausibility(bits(&f, 0b0001)).unwrap() - 1.0).abs() < EPS);
        assert!((m.plausibility(bits(&f, 0b0100)).unwrap() - 0.2).abs() < EPS);
        assert_eq!(m.plausibility(f.empty()).unwrap(), 0.0);
    }

    #[test]
    fn interval_examples() {
        let f = frame();
        let i = sample(&f).uncertainty_interval(bits(&f, 1)).unwrap();
        assert!((i.belief - 0.5).abs() < EPS);
        assert!((i.plausibility - 1.0).abs() < EPS);
        assert!((i.width - 0.5).abs() < EPS);

        let v = MassFunction::vacuous(&f)
            .uncertainty_interval(bits(&f, 1))
            .unwrap();
        assert_eq!((v.belief, v.plausibility, v.width), (0.0, 1.0, 1.0));

        let t = sample(&f).uncertainty_interval(f.full()).unwrap();
        assert!((t.belief - 1.0).abs() < EPS);
        assert_eq!(t.width, 0.0);
    }

    #[test]
    fn queries_reject_foreign_subsets() {
        let f = frame();
        let g = Frame::new(["x", "y"]).unwrap();
        let m = sample(&f);
        assert_eq!(m.belief(g.full()), Err(Error::FrameMismatch));
        assert_eq!(m.plausibility(g.full()), Err(Error::FrameMismatch));
        assert!(m.uncertainty_interval(g.full()).is_err());
    }

    fn arb_mass() -> impl Strategy<Value = MassFunction> {
        prop::collection::vec((1u64..16, 0.01f64..1.0), 1..6).prop_map(|entries| {
            let f = frame();
            MassFunction::normalize(&f, entries.into_iter().map(|(b, w)| (bits(&f, b), w))).unwrap()
        })
    }

    proptest! {
        #[test]
        fn interval_laws(m in arb_mass()) {
            let f = m.frame().clone();
            let all: Vec<_> = f.enumerate_subsets().unwrap().collect();
            for &a in &all {
                let bel = m.belief(a).unwrap();
                let pl = m.plausibility(a).unwrap();
                prop_assert!(bel <= pl);
                prop_assert!(bel >= 0.0 && pl <= 1.0 + EPS);
                let dual = 1.0 - m.belief(f.complement(a).unwrap()).unwrap();
                prop_assert!((pl - dual).abs() <= EPS);
                for &b in &all {
                    if a.is_subset_of(b).unwrap() {
                        prop_assert!(bel <= m.belief(b).unwrap() + EPS);
                        prop_assert!(pl <= m.plausibility(b).unwrap() + EPS);
                    }
                }
            }
        }

        #[test]
        fn normalized_functions_are_valid(m in arb_mass()) {
            prop_assert!((m.total_mass() - 1.0).abs() <= EPS);
            prop_assert!(m.focal_elements().all(|(s, v)| !s.is_empty() && v > 0.0 && v <= 1.0 + EPS));
            let rebuilt = MassFunction::new(m.frame(), m.focal_elements()).unwrap();
            prop_assert_eq!(rebuilt, m);
        }
    }
}
