//! Suffix array over the pattern, with LCP and a sparse table for O(1)
//! longest-common-extension queries, plus a matching-statistics search for
//! scanning a text against the pattern.
//!
//! Positions in the public API are 1-based.

use std::ops::Range;

use crate::alphabet::{Sequence, WILDCARD};
use crate::error::{Error, Result};

/// Range-minimum sparse table.
#[derive(Clone, Debug)]
pub struct SparseTable {
    n: usize,
    table: Vec<u32>,
}

impl SparseTable {
    pub fn new(a: &[u32]) -> Self {
        let n = a.len();
        if n == 0 {
            return Self {
                n,
                table: Vec::new(),
            };
        }
        let levels = n.ilog2() as usize + 1;
        let mut table = vec![0u32; n * levels];
        table[..n].copy_from_slice(a);
        for k in 1..levels {
            let half = 1 << (k - 1);
            for i in 0..=n - (1 << k) {
                table[k * n + i] = table[(k - 1) * n + i].min(table[(k - 1) * n + i + half]);
            }
        }
        Self { n, table }
    }

    /// Minimum over the 0-based half-open `range`, which must be non-empty.
    pub fn query(&self, range: Range<usize>) -> u32 {
        let Range { start, end } = range;
        debug_assert!(start < end && end <= self.n);
        let k = (end - start).ilog2() as usize;
        self.table[k * self.n + start].min(self.table[k * self.n + end - (1 << k)])
    }
}

/// Suffix structures over a wild-card-free pattern.
#[derive(Clone, Debug)]
pub struct SuffixIndex {
    pattern: Vec<u8>,
    sa: Vec<u32>,
    rank: Vec<u32>,
    lcp: Vec<u32>,
    rmq: SparseTable,
}

/// Longest prefix of `text[text_pos..]` occurring in the pattern, with the
/// pattern position where it occurs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatchStat {
    pub text_pos: usize,
    pub len: usize,
    /// Meaningless when `len == 0`.
    pub witness: usize,
}

fn suffix_array(s: &[u8]) -> Vec<u32> {
    let n = s.len();
    let mut sa: Vec<u32> = (0..n as u32).collect();
    let mut rank: Vec<u32> = s.iter().map(|&c| c as u32).collect();
    let mut next = vec![0u32; n];
    let mut step = 1;
    loop {
        // end of string sorts before every symbol
        let key = |i: u32| {
            let i = i as usize;
            let second = if i + step < n { rank[i + step] + 1 } else { 0 };
            (rank[i], second)
        };
        sa.sort_unstable_by_key(|&i| key(i));
        next[sa[0] as usize] = 0;
        for w in 1..n {
            let bump = (key(sa[w - 1]) != key(sa[w])) as u32;
            next[sa[w] as usize] = next[sa[w - 1] as usize] + bump;
        }
        std::mem::swap(&mut rank, &mut next);
        if rank[sa[n - 1] as usize] as usize == n - 1 || step >= n {
            break;
        }
        step *= 2;
    }
    sa
}

/// Kasai: `lcp[r]` is the common prefix of suffixes `sa[r - 1]` and `sa[r]`; `lcp[0] = 0`.
fn lcp_array(s: &[u8], sa: &[u32], rank: &[u32]) -> Vec<u32> {
    let n = s.len();
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        let r = rank[i] as usize;
        if r == 0 {
            h = 0;
            continue;
        }
        let j = sa[r - 1] as usize;
        while i + h < n && j + h < n && s[i + h] == s[j + h] {
            h += 1;
        }
        lcp[r] = h as u32;
        h = h.saturating_sub(1);
    }
    lcp
}

impl SuffixIndex {
    pub fn build(pattern: &Sequence) -> Result<Self> {
        if pattern.is_empty() {
            return Err(Error::Empty("pattern"));
        }
        if pattern.has_wildcards() {
            return Err(Error::WildcardUnsupported("suffix index"));
        }
        let s = pattern.ranks().to_vec();
        let sa = suffix_array(&s);
        let mut rank = vec![0u32; s.len()];
        for (r, &i) in sa.iter().enumerate() {
            rank[i as usize] = r as u32;
        }
        let lcp = lcp_array(&s, &sa, &rank);
        let rmq = SparseTable::new(&lcp);
        Ok(Self {
            pattern: s,
            sa,
            rank,
            lcp,
            rmq,
        })
    }

    pub fn pattern_len(&self) -> usize {
        self.pattern.len()
    }

    /// Suffix start positions (1-based) in lexicographic order.
    pub fn suffix_array(&self) -> Vec<usize> {
        self.sa.iter().map(|&i| i as usize + 1).collect()
    }

    /// `lcp[r]` for suffix-array slots `r = 1..m` (the first slot has no predecessor).
    pub fn adjacent_lcp(&self) -> &[u32] {
        &self.lcp[1..]
    }

    /// Longest common prefix of the suffixes starting at 1-based `i` and `j`.
    pub fn lce(&self, i: usize, j: usize) -> usize {
        let m = self.pattern.len();
        debug_assert!((1..=m).contains(&i) && (1..=m).contains(&j));
        if i == j {
            return m - i + 1;
        }
        let (a, b) = (self.rank[i - 1] as usize, self.rank[j - 1] as usize);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.rmq.query(lo + 1..hi + 1) as usize
    }

    /// Longest `l` such that `text[from..from+l-1]` occurs in the pattern
    /// (1-based `from`). Binary-searches the suffix array one symbol at a time.
    pub fn matching_statistics(&self, text: &Sequence, from: usize) -> MatchStat {
        let t = text.ranks();
        let p = &self.pattern;
        let (mut lo, mut hi) = (0usize, self.sa.len());
        let mut len = 0;
        let start = from - 1;
        while start + len < t.len() {
            let c = t[start + len];
            if c == WILDCARD {
                break;
            }
            // suffixes in [lo, hi) share a prefix of length `len`; those too
            // short to have a symbol at offset `len` sort first
            let a = lo
                + self.sa[lo..hi]
                    .partition_point(|&s| p.get(s as usize + len).is_none_or(|&x| x < c));
            let b = a + self.sa[a..hi].partition_point(|&s| p.get(s as usize + len) == Some(&c));
            if a == b {
                break;
            }
            lo = a;
            hi = b;
            len += 1;
        }
        MatchStat {
            text_pos: from,
            len,
            witness: self.sa[lo] as usize + 1,
        }
    }
}
