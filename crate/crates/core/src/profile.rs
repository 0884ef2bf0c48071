//! Output types shared by every algorithm, and the brute-force oracle.
//!
//! Alignments are numbered from 1: alignment `i` places the pattern under
//! text positions `i..=i+m-1`.

use crate::alphabet::{Sequence, WILDCARD};
use crate::error::{check_lengths, Result};

/// Exact Hamming distance for every alignment `1..=n-m+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceProfile {
    distances: Vec<usize>,
}

impl DistanceProfile {
    pub fn new(distances: Vec<usize>) -> Self {
        Self { distances }
    }

    /// Distances in alignment order; index 0 holds alignment 1.
    pub fn as_slice(&self) -> &[usize] {
        &self.distances
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }

    /// Distance at 1-based `alignment`.
    pub fn get(&self, alignment: usize) -> Option<usize> {
        alignment
            .checked_sub(1)
            .and_then(|i| self.distances.get(i).copied())
    }

    /// `(alignment, distance)` pairs, 1-based.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.distances.iter().enumerate().map(|(i, &d)| (i + 1, d))
    }

    /// Thresholds every alignment at `k`.
    pub fn bounded(&self, k: usize) -> BoundedReport {
        BoundedReport::new(
            k,
            self.iter().map(|(i, d)| (i, Bound::within(d, k))).collect(),
        )
    }

    /// Thresholds the given 1-based alignments at `k`.
    pub fn bounded_subset(&self, k: usize, alignments: &[usize]) -> BoundedReport {
        BoundedReport::new(
            k,
            alignments
                .iter()
                .map(|&i| (i, Bound::within(self.distances[i - 1], k)))
                .collect(),
        )
    }
}

/// Outcome of a k-mismatch test at one alignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Exact(usize),
    ExceedsK,
}

impl Bound {
    pub fn within(distance: usize, k: usize) -> Self {
        if distance <= k {
            Bound::Exact(distance)
        } else {
            Bound::ExceedsK
        }
    }

    pub fn exact(self) -> Option<usize> {
        match self {
            Bound::Exact(d) => Some(d),
            Bound::ExceedsK => None,
        }
    }
}

/// Per-alignment k-mismatch outcomes, sorted by alignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedReport {
    k: usize,
    entries: Vec<(usize, Bound)>,
}

impl BoundedReport {
    pub fn new(k: usize, mut entries: Vec<(usize, Bound)>) -> Self {
        entries.sort_unstable_by_key(|e| e.0);
        debug_assert!(entries
            .iter()
            .all(|&(_, b)| b.exact().is_none_or(|d| d <= k)));
        Self { k, entries }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[(usize, Bound)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, alignment: usize) -> Option<Bound> {
        self.entries
            .binary_search_by_key(&alignment, |e| e.0)
            .ok()
            .map(|idx| self.entries[idx].1)
    }

    /// Alignments with at most `k` mismatches.
    pub fn occurrences(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.entries
            .iter()
            .filter_map(|&(i, b)| b.exact().map(|d| (i, d)))
    }
}

/// O(nm) scan computing the Hamming distance at every alignment.
/// A wild card on either side matches anything.
pub fn naive_profile(text: &Sequence, pattern: &Sequence) -> Result<DistanceProfile> {
    let (t, p) = (text.ranks(), pattern.ranks());
    check_lengths(t.len(), p.len())?;
    let distances = t
        .windows(p.len())
        .map(|w| {
            w.iter()
                .zip(p)
                .filter(|&(&a, &b)| a != WILDCARD && b != WILDCARD && a != b)
                .count()
        })
        .collect();
    Ok(DistanceProfile::new(distances))
}
