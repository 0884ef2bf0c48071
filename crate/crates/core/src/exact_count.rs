//! Full distance profiles without thresholds: marking, Abrahamson's split
//! between convolved and marked symbols, and its wild-card extension.

use crate::alphabet::{Sequence, WILDCARD};
use crate::convolution::Correlator;
use crate::error::{check_lengths, Error, Result};
use crate::profile::DistanceProfile;
use crate::work::WorkCounters;

/// Pattern positions (0-based, ascending) of every non-wild-card rank.
#[derive(Clone, Debug)]
pub struct PositionTable {
    pos: Vec<Vec<usize>>,
}

impl PositionTable {
    pub fn new(pattern: &Sequence) -> Self {
        let mut pos = vec![Vec::new(); pattern.max_rank() as usize + 1];
        for (j, &r) in pattern.ranks().iter().enumerate() {
            if r != WILDCARD {
                pos[r as usize].push(j);
            }
        }
        Self { pos }
    }

    pub fn positions(&self, rank: u8) -> &[usize] {
        self.pos.get(rank as usize).map_or(&[], |v| v.as_slice())
    }

    pub fn frequency(&self, rank: u8) -> usize {
        self.positions(rank).len()
    }

    /// Largest rank that may occur in the table.
    pub fn max_rank(&self) -> u8 {
        (self.pos.len() - 1) as u8
    }

    /// Number of non-wild-card pattern positions.
    pub fn non_wildcard(&self) -> usize {
        self.pos.iter().map(Vec::len).sum()
    }

    /// Ranks present in the pattern, most frequent first, ties by ascending rank.
    pub fn by_frequency(&self) -> Vec<u8> {
        let mut ranks: Vec<u8> = (1..self.pos.len())
            .filter(|&r| !self.pos[r].is_empty())
            .map(|r| r as u8)
            .collect();
        ranks.sort_by_key(|&r| (std::cmp::Reverse(self.frequency(r)), r));
        ranks
    }
}

/// Per-text-position mark counts; entry `i - 1` belongs to alignment `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkVector {
    marks: Vec<u32>,
}

impl MarkVector {
    pub fn as_slice(&self) -> &[u32] {
        &self.marks
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.marks
    }
}

/// Marks with every pattern instance of each rank in `gamma`.
pub fn mark(text: &Sequence, table: &PositionTable, gamma: &[u8]) -> MarkVector {
    let mut limits = vec![0usize; table.max_rank() as usize + 1];
    for &r in gamma {
        if r != WILDCARD && (r as usize) < limits.len() {
            limits[r as usize] = table.frequency(r);
        }
    }
    mark_limited(text, table, &limits, &mut WorkCounters::default())
}

/// Marking where rank `r` uses only its first `limits[r]` pattern positions.
pub(crate) fn mark_limited(
    text: &Sequence,
    table: &PositionTable,
    limits: &[usize],
    counters: &mut WorkCounters,
) -> MarkVector {
    let mut marks = vec![0u32; text.len()];
    let mut created = 0u64;
    for (i, &r) in text.ranks().iter().enumerate() {
        let Some(&limit) = limits.get(r as usize) else {
            continue;
        };
        if limit == 0 || r == WILDCARD {
            continue;
        }
        for &j in &table.positions(r)[..limit] {
            if j > i {
                break;
            }
            marks[i - j] += 1;
            created += 1;
        }
    }
    counters.marks_created += created;
    MarkVector { marks }
}

/// Number of symbols handled by convolution for a pattern with `size`
/// counted positions.
pub fn convolved_set_size(size: usize, m: usize, distinct: usize) -> usize {
    let log_m = (m.max(2) as f64).log2();
    let a = (size as f64 / log_m).sqrt().ceil() as usize;
    a.max(1).min(distinct)
}

/// Matches contributed by each non-wild-card symbol, per alignment.
fn count_matches(
    text: &Sequence,
    pattern: &Sequence,
    table: &PositionTable,
    convolved: usize,
    correlator: &Correlator,
    counters: &mut WorkCounters,
) -> Result<Vec<i64>> {
    let out_len = text.len() - pattern.len() + 1;
    let ranked = table.by_frequency();
    let mut matches = vec![0i64; out_len];

    for &r in &ranked[..convolved] {
        let c = correlator.indicator_correlate(text, pattern, r)?;
        counters.convolutions_run += 1;
        for (acc, v) in matches.iter_mut().zip(c) {
            *acc += v;
        }
    }

    let marked = &ranked[convolved..];
    if !marked.is_empty() {
        let mut limits = vec![0usize; table.max_rank() as usize + 1];
        for &r in marked {
            limits[r as usize] = table.frequency(r);
        }
        let marks = mark_limited(text, table, &limits, counters);
        for (acc, &v) in matches.iter_mut().zip(marks.as_slice()) {
            *acc += v as i64;
        }
    }
    Ok(matches)
}

pub fn abrahamson_profile(text: &Sequence, pattern: &Sequence) -> Result<DistanceProfile> {
    abrahamson_profile_with(
        text,
        pattern,
        &Correlator::default(),
        &mut WorkCounters::default(),
    )
}

/// Exact profile for wild-card-free inputs: the most frequent pattern
/// symbols are convolved, the rest are marked.
pub fn abrahamson_profile_with(
    text: &Sequence,
    pattern: &Sequence,
    correlator: &Correlator,
    counters: &mut WorkCounters,
) -> Result<DistanceProfile> {
    check_lengths(text.len(), pattern.len())?;
    if text.has_wildcards() || pattern.has_wildcards() {
        return Err(Error::WildcardUnsupported("abrahamson_profile"));
    }
    let m = pattern.len();
    let table = PositionTable::new(pattern);
    let distinct = table.by_frequency().len();
    let convolved = convolved_set_size(m, m, distinct);
    let matches = count_matches(text, pattern, &table, convolved, correlator, counters)?;
    Ok(DistanceProfile::new(
        matches.into_iter().map(|c| m - c as usize).collect(),
    ))
}

pub fn wildcard_profile(text: &Sequence, pattern: &Sequence) -> Result<DistanceProfile> {
    wildcard_profile_with(
        text,
        pattern,
        &Correlator::default(),
        &mut WorkCounters::default(),
    )
}

/// Exact profile with wild cards on either side. The convolved set is sized
/// by the number of non-wild-card pattern positions, and positions holding a
/// wild card on either side are counted as matches by one extra correlation.
pub fn wildcard_profile_with(
    text: &Sequence,
    pattern: &Sequence,
    correlator: &Correlator,
    counters: &mut WorkCounters,
) -> Result<DistanceProfile> {
    check_lengths(text.len(), pattern.len())?;
    let m = pattern.len();
    let table = PositionTable::new(pattern);
    let distinct = table.by_frequency().len();
    let convolved = convolved_set_size(table.non_wildcard(), m, distinct);
    let mut matches = count_matches(text, pattern, &table, convolved, correlator, counters)?;

    if text.has_wildcards() || pattern.has_wildcards() {
        let solid = |s: &Sequence| -> Vec<i64> {
            s.ranks().iter().map(|&r| (r != WILDCARD) as i64).collect()
        };
        let both_solid = correlator.correlate(&solid(text), &solid(pattern))?;
        counters.convolutions_run += 1;
        for (acc, c) in matches.iter_mut().zip(both_solid) {
            *acc += m as i64 - c;
        }
    }
    Ok(DistanceProfile::new(
        matches.into_iter().map(|c| m - c as usize).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alphabet::Alphabet;
    use crate::profile::naive_profile;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pair(t: &[u8], p: &[u8]) -> (Sequence, Sequence, Alphabet) {
        let mut a = Alphabet::new(b'?');
        let (t, p) = (a.encode(t), a.encode(p));
        (t, p, a)
    }

    fn random_seq(rng: &mut ChaCha8Rng, len: usize, sigma: u8, wild: f64) -> Sequence {
        (0..len)
            .map(|_| {
                if rng.gen_bool(wild) {
                    0
                } else {
                    rng.gen_range(1..=sigma)
                }
            })
            .collect::<Vec<_>>()
            .into()
    }

    #[test]
    fn mark_examples() {
        let (t, p, a) = pair(b"aba", b"ab");
        let table = PositionTable::new(&p);
        let ra = a.rank_of(b'a').unwrap();
        assert_eq!(mark(&t, &table, &[ra]).as_slice(), &[1, 0, 1]);
        assert_eq!(mark(&t, &table, &[]).as_slice(), &[0, 0, 0]);

        let (t, p, _) = pair(b"aabb", b"ab");
        let table = PositionTable::new(&p);
        assert_eq!(mark(&t, &table, &[1, 2]).as_slice(), &[1, 2, 1, 0]);
    }

    #[test]
    fn abrahamson_examples() {
        let (t, p, _) = pair(b"abab", b"ab");
        assert_eq!(abrahamson_profile(&t, &p).unwrap().as_slice(), &[0, 2, 0]);
        let (t, p, _) = pair(b"gattaca", b"gattaca");
        assert_eq!(abrahamson_profile(&t, &p).unwrap().as_slice(), &[0]);
        let (t, p, _) = pair(b"ab?b", b"ab");
        assert_eq!(
            abrahamson_profile(&t, &p),
            Err(Error::WildcardUnsupported("abrahamson_profile"))
        );
    }

    #[test]
    fn wildcard_examples() {
        let (t, p, _) = pair(b"axbaab", b"a?b");
        assert_eq!(wildcard_profile(&t, &p).unwrap().as_slice(), &[0, 2, 2, 0]);
        let (t, p, _) = pair(b"axbaab", b"???");
        assert_eq!(wildcard_profile(&t, &p).unwrap().as_slice(), &[0, 0, 0, 0]);
    }

    #[test]
    fn convolved_set_rounding() {
        // sqrt(100 / log2 100) = 3.89
        assert_eq!(convolved_set_size(100, 100, 26), 4);
        assert_eq!(convolved_set_size(100, 100, 3), 3);
        assert_eq!(convolved_set_size(1, 1, 1), 1);
        assert_eq!(convolved_set_size(0, 10, 0), 0);
    }

    #[test]
    fn abrahamson_sweep_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for case in 0..200 {
            let sigma = [2u8, 4, 20][case % 3];
            let m = rng.gen_range(1..=50);
            let n = rng.gen_range(m..=500);
            let t = random_seq(&mut rng, n, sigma, 0.0);
            let p = random_seq(&mut rng, m, sigma, 0.0);
            assert_eq!(
                abrahamson_profile(&t, &p).unwrap(),
                naive_profile(&t, &p).unwrap()
            );
        }
    }

    #[test]
    fn wildcard_sweep_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for case in 0..200 {
            let sigma = [2u8, 4, 20][case % 3];
            let m = rng.gen_range(1..=50);
            let n = rng.gen_range(m..=500);
            let t = random_seq(&mut rng, n, sigma, 0.1);
            let p = random_seq(&mut rng, m, sigma, 0.1);
            assert_eq!(
                wildcard_profile(&t, &p).unwrap(),
                naive_profile(&t, &p).unwrap()
            );
        }
    }

    proptest! {
        #[test]
        fn mark_agrees_with_indicator_correlations(
            t in proptest::collection::vec(1u8..6, 20..120),
            p in proptest::collection::vec(1u8..6, 1..20),
            gamma in proptest::collection::btree_set(1u8..6, 0..5),
        ) {
            let (t, p) = (Sequence::from(t), Sequence::from(p));
            let table = PositionTable::new(&p);
            let gamma: Vec<u8> = gamma.into_iter().collect();
            let mut counters = WorkCounters::default();
            let mut limits = vec![0; table.max_rank() as usize + 1];
            for &g in &gamma {
                if (g as usize) < limits.len() {
                    limits[g as usize] = table.frequency(g);
                }
            }
            let marks = mark_limited(&t, &table, &limits, &mut counters);
            let plain = mark(&t, &table, &gamma);
            prop_assert_eq!(marks.as_slice(), plain.as_slice());
            let c = Correlator::default();
            for i in 0..=t.len() - p.len() {
                let expected: i64 = gamma
                    .iter()
                    .map(|&g| c.indicator_correlate(&t, &p, g).unwrap()[i])
                    .sum();
                prop_assert_eq!(marks.as_slice()[i] as i64, expected);
            }
            let max_f = gamma.iter().map(|&g| table.frequency(g)).max().unwrap_or(0);
            prop_assert!(counters.marks_created <= (t.len() * max_f) as u64);
        }

        #[test]
        fn abrahamson_equals_naive(
            t in proptest::collection::vec(1u8..5, 1..150),
            p in proptest::collection::vec(1u8..5, 1..40),
        ) {
            prop_assume!(p.len() <= t.len());
            let (t, p) = (Sequence::from(t), Sequence::from(p));
            prop_assert_eq!(abrahamson_profile(&t, &p).unwrap(), naive_profile(&t, &p).unwrap());
        }

        #[test]
        fn wildcard_equals_naive(
            t in proptest::collection::vec(0u8..5, 1..150),
            p in proptest::collection::vec(0u8..5, 1..40),
        ) {
            prop_assume!(p.len() <= t.len());
            let (t, p) = (Sequence::from(t), Sequence::from(p));
            prop_assert_eq!(wildcard_profile(&t, &p).unwrap(), naive_profile(&t, &p).unwrap());
        }
    }
}
