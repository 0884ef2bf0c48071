//! Deterministic k-mismatch search.
//!
//! [`subset_k_mismatches`] scans the text once, splitting it into maximal
//! pieces that occur in the pattern. Inside a piece the text equals a known
//! pattern substring, so each alignment's mismatches there are found by
//! jumping between longest-common-extension queries on the pattern alone.
//! [`knapsack_k_mismatches`] chooses which symbols to mark by text frequency
//! and either filters candidates for the subset scan or falls back to
//! convolutions.

use crate::alphabet::Sequence;
use crate::convolution::Correlator;
use crate::error::{check_lengths, Error, Result};
use crate::exact_count::{mark_limited, PositionTable};
use crate::pattern_index::SuffixIndex;
use crate::profile::{Bound, BoundedReport};
pub use crate::work::WorkCounters;

/// Adds to `count` the mismatches between `P[s1..s1+l)` and `P[s2..s2+l)`
/// (1-based), stopping once the total exceeds `k`.
pub fn update_mism(
    index: &SuffixIndex,
    mut count: usize,
    mut s1: usize,
    mut s2: usize,
    mut l: usize,
    k: usize,
    counters: &mut WorkCounters,
) -> usize {
    while l > 0 && count <= k {
        let mut d = index.lce(s1, s2);
        counters.lce_queries += 1;
        if d >= l {
            return count;
        }
        count += 1;
        d += 1;
        s1 += d;
        s2 += d;
        l -= d;
    }
    count
}

fn validate_no_wildcards(text: &Sequence, pattern: &Sequence, what: &'static str) -> Result<()> {
    check_lengths(text.len(), pattern.len())?;
    if text.has_wildcards() || pattern.has_wildcards() {
        return Err(Error::WildcardUnsupported(what));
    }
    Ok(())
}

/// k-mismatch test restricted to the 1-based alignments in `subset`.
pub fn subset_k_mismatches(
    text: &Sequence,
    pattern: &Sequence,
    subset: &[usize],
    k: usize,
) -> Result<BoundedReport> {
    validate_no_wildcards(text, pattern, "subset_k_mismatches")?;
    let index = SuffixIndex::build(pattern)?;
    subset_k_mismatches_with(
        &index,
        text,
        pattern,
        subset,
        k,
        &mut WorkCounters::default(),
    )
}

/// As [`subset_k_mismatches`] with a prebuilt index and instrumentation.
///
/// The symbol right after each maximal piece is compared directly: it is the
/// position where the piece stopped matching the pattern, and no query can
/// cover it.
pub fn subset_k_mismatches_with(
    index: &SuffixIndex,
    text: &Sequence,
    pattern: &Sequence,
    subset: &[usize],
    k: usize,
    counters: &mut WorkCounters,
) -> Result<BoundedReport> {
    validate_no_wildcards(text, pattern, "subset_k_mismatches")?;
    let (n, m) = (text.len(), pattern.len());
    let last = n - m + 1;
    let mut alignments = subset.to_vec();
    alignments.sort_unstable();
    alignments.dedup();
    if let Some(&bad) = alignments.iter().find(|&&s| s == 0 || s > last) {
        return Err(Error::InvalidParameter(format!(
            "alignment {bad} outside 1..={last}"
        )));
    }

    let (t, p) = (text.ranks(), pattern.ranks());
    let mut counts = vec![0usize; alignments.len()];
    let mut alive: Vec<usize> = Vec::new();
    let mut next = 0;
    let mut i = 1;
    while i <= n {
        if alive.is_empty() {
            match alignments.get(next) {
                None => break,
                Some(&s) if s > i => i = s,
                _ => {}
            }
        }
        let ms = index.matching_statistics(text, i);
        counters.segments += 1;
        let l = ms.len;
        let boundary = i + l;
        while next < alignments.len() && alignments[next] <= boundary.min(n) {
            alive.push(next);
            next += 1;
        }
        alive.retain(|&idx| {
            let s = alignments[idx];
            let window_end = s + m - 1;
            let mut c = counts[idx];
            let lo = i.max(s);
            let hi = (i + l).min(window_end + 1);
            if lo < hi {
                c = update_mism(
                    index,
                    c,
                    lo - s + 1,
                    ms.witness + (lo - i),
                    hi - lo,
                    k,
                    counters,
                );
            }
            if c <= k && boundary <= n && (s..=window_end).contains(&boundary) {
                c += (t[boundary - 1] != p[boundary - s]) as usize;
            }
            counts[idx] = c;
            c <= k && window_end > boundary
        });
        i = boundary + 1;
    }

    Ok(BoundedReport::new(
        k,
        alignments
            .iter()
            .zip(&counts)
            .map(|(&s, &c)| (s, Bound::within(c, k)))
            .collect(),
    ))
}

/// Greedy selection of `2k` pattern instances, cheapest text frequency first.
#[derive(Clone, Debug, PartialEq)]
pub struct KnapsackPlan {
    /// Instances taken per rank (index = rank).
    pub picked: Vec<usize>,
    /// Ranks in the order they were considered.
    pub order: Vec<u8>,
    pub size: usize,
    pub cost: u64,
    pub budget: f64,
    pub filled: bool,
}

/// `n * sqrt(k * log2(max(k, 2)))`.
pub fn default_budget(n: usize, k: usize) -> f64 {
    n as f64 * (k as f64 * (k.max(2) as f64).log2()).sqrt()
}

/// Fills a knapsack of size `2k` where every pattern instance of rank `r`
/// costs `text_freq[r]`. Ranks are taken in ascending text frequency (ties by
/// rank) until the knapsack is full or the running cost reaches `budget`.
pub fn knapsack_plan(
    pattern_freq: &[usize],
    text_freq: &[usize],
    k: usize,
    budget: f64,
) -> KnapsackPlan {
    let text_cost = |r: usize| text_freq.get(r).copied().unwrap_or(0);
    let mut order: Vec<u8> = (1..pattern_freq.len())
        .filter(|&r| pattern_freq[r] > 0)
        .map(|r| r as u8)
        .collect();
    order.sort_by_key(|&r| (text_cost(r as usize), r));

    let target = 2 * k;
    let mut picked = vec![0usize; pattern_freq.len()];
    let (mut size, mut cost) = (0usize, 0u64);
    for &r in &order {
        if size >= target || cost as f64 >= budget {
            break;
        }
        let take = pattern_freq[r as usize].min(target - size);
        picked[r as usize] = take;
        size += take;
        cost += (take * text_cost(r as usize)) as u64;
    }
    KnapsackPlan {
        picked,
        order,
        size,
        cost,
        budget,
        filled: size == target,
    }
}

/// Result of one knapsack run.
#[derive(Clone, Debug)]
pub struct KnapsackRun {
    pub report: BoundedReport,
    pub plan: KnapsackPlan,
    /// Alignments passed to the subset scan (filled knapsack only).
    pub candidates: Option<usize>,
}

/// Configurable knapsack k-mismatch search.
#[derive(Clone, Copy, Debug, Default)]
pub struct KnapsackMatcher {
    pub correlator: Correlator,
    /// Overrides [`default_budget`].
    pub budget: Option<f64>,
}

pub fn knapsack_k_mismatches(
    text: &Sequence,
    pattern: &Sequence,
    k: usize,
) -> Result<BoundedReport> {
    KnapsackMatcher::default()
        .run(text, pattern, k, &mut WorkCounters::default())
        .map(|run| run.report)
}

impl KnapsackMatcher {
    pub fn run(
        &self,
        text: &Sequence,
        pattern: &Sequence,
        k: usize,
        counters: &mut WorkCounters,
    ) -> Result<KnapsackRun> {
        validate_no_wildcards(text, pattern, "knapsack_k_mismatches")?;
        let (n, m) = (text.len(), pattern.len());
        if k == 0 || k > m {
            return Err(Error::InvalidParameter(format!("k = {k} outside 1..={m}")));
        }
        let table = PositionTable::new(pattern);
        let sigma = table.max_rank().max(text.max_rank()) as usize;
        let pattern_freq: Vec<usize> = (0..=table.max_rank()).map(|r| table.frequency(r)).collect();
        let text_freq = text.frequencies(sigma);
        let budget = self.budget.unwrap_or_else(|| default_budget(n, k));
        let plan = knapsack_plan(&pattern_freq, &text_freq, k, budget);
        let last = n - m + 1;

        if plan.filled {
            // a perfect alignment collects exactly 2k marks and every
            // mismatch removes at most one
            let marks = mark_limited(text, &table, &plan.picked, counters);
            let candidates: Vec<usize> = marks.as_slice()[..last]
                .iter()
                .enumerate()
                .filter(|&(_, &v)| v as usize >= k)
                .map(|(i, _)| i + 1)
                .collect();
            let index = SuffixIndex::build(pattern)?;
            let found = subset_k_mismatches_with(&index, text, pattern, &candidates, k, counters)?;
            let mut entries: Vec<(usize, Bound)> =
                (1..=last).map(|i| (i, Bound::ExceedsK)).collect();
            for &(s, b) in found.entries() {
                entries[s - 1].1 = b;
            }
            return Ok(KnapsackRun {
                report: BoundedReport::new(k, entries),
                plan,
                candidates: Some(candidates.len()),
            });
        }

        let full: Vec<usize> = plan
            .picked
            .iter()
            .zip(&pattern_freq)
            .map(|(&take, &f)| if take == f { take } else { 0 })
            .collect();
        let marks = mark_limited(text, &table, &full, counters);
        let mut matches: Vec<i64> = marks.as_slice()[..last].iter().map(|&v| v as i64).collect();
        for r in 1..pattern_freq.len() {
            if pattern_freq[r] > 0 && full[r] == 0 {
                let c = self
                    .correlator
                    .indicator_correlate(text, pattern, r as u8)?;
                counters.convolutions_run += 1;
                for (acc, v) in matches.iter_mut().zip(c) {
                    *acc += v;
                }
            }
        }
        let entries = matches
            .into_iter()
            .enumerate()
            .map(|(i, c)| (i + 1, Bound::within(m - c as usize, k)))
            .collect();
        Ok(KnapsackRun {
            report: BoundedReport::new(k, entries),
            plan,
            candidates: None,
        })
    }
}
