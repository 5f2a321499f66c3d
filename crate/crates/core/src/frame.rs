//! Frame of discernment and fixed-width subset words.
//!
//! A [`Frame`] is an ordered, immutable list of mutually exclusive outcome
//! labels. Subsets of the frame are [`SubsetMask`] values: a 64-bit word where
//! bit `i` is set when outcome `i` belongs to the subset. Every mask carries
//! the fingerprint of the frame that produced it so that masks from unrelated
//! frames cannot be mixed silently.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest frame representable by a 64-bit subset word.
pub const MAX_FRAME_SIZE: usize = 64;

/// Largest frame for which the full powerset may be enumerated.
pub const MAX_ENUMERATION_SIZE: usize = 20;

/// Subset expression denoting the whole frame.
pub const UNIVERSE_EXPR: &str = "ANY";

/// Separator between labels in a subset expression (`cyclist+truck`).
pub const EXPR_SEPARATOR: char = '+';

#[derive(Debug)]
struct FrameInner {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    fingerprint: u64,
}

/// Ordered set of outcome labels. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Frame {
    inner: Arc<FrameInner>,
}

impl PartialEq for Frame {
    fn eq(&self, other: &Self) -> bool {
        self.inner.fingerprint == other.inner.fingerprint && self.inner.labels == other.inner.labels
    }
}

impl Eq for Frame {}

/// Subset of a frame as a set word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask {
    frame: u64,
    bits: u64,
}

impl Frame {
    /// Builds a frame from labels in the given order. Labels are trimmed;
    /// comparison is case-sensitive.
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let labels: Vec<String> = labels
            .into_iter()
            .map(|l| l.as_ref().trim().to_string())
            .collect();
        if labels.is_empty() {
            return Err(Error::EmptyInput);
        }
        if labels.len() > MAX_FRAME_SIZE {
            return Err(Error::FrameTooLarge(labels.len()));
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(Error::EmptyLabel);
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        let mut hasher = DefaultHasher::new();
        labels.hash(&mut hasher);
        let fingerprint = hasher.finish();
        Ok(Self {
            inner: Arc::new(FrameInner {
                labels,
                index,
                fingerprint,
            }),
        })
    }

    pub fn len(&self) -> usize {
        self.inner.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inner.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.inner.labels
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.inner.labels.get(index).map(String::as_str)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.inner.index.get(label).copied()
    }

    fn full_bits(&self) -> u64 {
        match self.len() {
            MAX_FRAME_SIZE => u64::MAX,
            n => (1u64 << n) - 1,
        }
    }

    pub(crate) fn mask_from_bits(&self, bits: u64) -> SubsetMask {
        debug_assert_eq!(bits & !self.full_bits(), 0);
        SubsetMask {
            frame: self.inner.fingerprint,
            bits,
        }
    }

    pub fn empty(&self) -> SubsetMask {
        self.mask_from_bits(0)
    }

    /// The whole frame, Θ.
    pub fn full(&self) -> SubsetMask {
        self.mask_from_bits(self.full_bits())
    }

    /// Singleton `{θ_index}`; `None` if the index is out of range.
    pub fn singleton(&self, index: usize) -> Option<SubsetMask> {
        (index < self.len()).then(|| self.mask_from_bits(1u64 << index))
    }

    /// Every singleton in frame order.
    pub fn singletons(&self) -> impl Iterator<Item = SubsetMask> + '_ {
        (0..self.len()).map(move |i| self.mask_from_bits(1u64 << i))
    }

    /// Mask containing exactly the named outcomes.
    pub fn subset_from_labels<I, S>(&self, labels: I) -> Result<SubsetMask>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut bits = 0u64;
        for label in labels {
            let label = label.as_ref();
            let i = self
                .index_of(label)
                .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
            bits |= 1u64 << i;
        }
        Ok(self.mask_from_bits(bits))
    }

    /// Labels of the outcomes in `mask`, in frame order.
    pub fn labels_of(&self, mask: SubsetMask) -> Result<Vec<&str>> {
        self.check(mask)?;
        Ok(self
            .inner
            .labels
            .iter()
            .enumerate()
            .filter(|(i, _)| mask.bits & (1u64 << i) != 0)
            .map(|(_, l)| l.as_str())
            .collect())
    }

    /// Complement of `mask` relative to this frame.
    pub fn complement(&self, mask: SubsetMask) -> Result<SubsetMask> {
        self.check(mask)?;
        Ok(self.mask_from_bits(!mask.bits & self.full_bits()))
    }

    /// Every subset of the frame, in ascending order of the set word.
    pub fn enumerate_subsets(&self) -> Result<impl Iterator<Item = SubsetMask> + '_> {
        if self.len() > MAX_ENUMERATION_SIZE {
            return Err(Error::FrameTooLargeForEnumeration(self.len()));
        }
        Ok((0..=self.full_bits()).map(move |bits| self.mask_from_bits(bits)))
    }

    /// Parses a subset expression: `ANY` for the whole frame, otherwise
    /// `+`-joined outcome labels.
    pub fn parse_subset(&self, expr: &str) -> Result<SubsetMask> {
        let expr = expr.trim();
        if expr == UNIVERSE_EXPR {
            return Ok(self.full());
        }
        if expr.is_empty() {
            return Err(Error::EmptyLabel);
        }
        let mut bits = 0u64;
        for part in expr.split(EXPR_SEPARATOR) {
            let part = part.trim();
            if part.is_empty() {
                return Err(Error::EmptyLabel);
            }
            let i = self
                .index_of(part)
                .ok_or_else(|| Error::UnknownLabel(part.to_string()))?;
            bits |= 1u64 << i;
        }
        Ok(self.mask_from_bits(bits))
    }

    /// Canonical subset expression: labels in frame order, `ANY` for Θ and
    /// `{}` for the empty set.
    pub fn format_subset(&self, mask: SubsetMask) -> Result<String> {
        self.check(mask)?;
        if mask.bits == self.full_bits() {
            return Ok(UNIVERSE_EXPR.to_string());
        }
        if mask.bits == 0 {
            return Ok("{}".to_string());
        }
        let sep = EXPR_SEPARATOR.to_string();
        Ok(self.labels_of(mask)?.join(&sep))
    }

    pub(crate) fn check(&self, mask: SubsetMask) -> Result<()> {
        if mask.frame == self.inner.fingerprint {
            Ok(())
        } else {
            Err(Error::FrameMismatch)
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.inner.labels.join(", "))
    }
}

impl SubsetMask {
    /// Raw set word; bit `i` is outcome `i`.
    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    /// Number of outcomes in the subset.
    pub fn len(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn same_frame(self, other: SubsetMask) -> bool {
        self.frame == other.frame
    }

    pub fn intersect(self, other: SubsetMask) -> Result<SubsetMask> {
        if !self.same_frame(other) {
            return Err(Error::FrameMismatch);
        }
        Ok(SubsetMask {
            frame: self.frame,
            bits: self.bits & other.bits,
        })
    }

    pub fn union(self, other: SubsetMask) -> Result<SubsetMask> {
        if !self.same_frame(other) {
            return Err(Error::FrameMismatch);
        }
        Ok(SubsetMask {
            frame: self.frame,
            bits: self.bits | other.bits,
        })
    }

    /// `self ⊆ other`.
    pub fn is_subset_of(self, other: SubsetMask) -> Result<bool> {
        if !self.same_frame(other) {
            return Err(Error::FrameMismatch);
        }
        Ok(self.bits & !other.bits == 0)
    }
}
