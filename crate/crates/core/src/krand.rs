//! Randomized mismatch algorithms built on the 1-mismatch detector.
//!
//! With ranks as integers and wild cards as 0, the error term
//! `e = (t - p)^2 * t * p` is non-zero exactly on a non-wild-card mismatch.
//! Summing it per alignment (`E`), and summing it weighted by text position
//! (`E'`), locates a lone mismatch at `E' / E`. Sampling pattern positions
//! makes lone mismatches common, which drives both the Las Vegas k-mismatch
//! search and, with random binary relabelings, the approximate counter.

use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{Sequence, WILDCARD};
use crate::convolution::Correlator;
use crate::error::{check_lengths, Error, Result};
use crate::profile::{Bound, BoundedReport};

/// Reproducible generator; [`SeededRng::fork`] derives independent sub-streams.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn fork(&mut self) -> SeededRng {
        SeededRng::new(self.inner.next_u64())
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

#[inline]
pub fn error_term(t: u8, p: u8) -> i64 {
    let (t, p) = (t as i64, p as i64);
    (t - p) * (t - p) * t * p
}

/// Per-alignment `sum_j e(t_{i+j-1}, p_j)`, weighted by the 1-based text
/// position `i + j - 1` when `position_weighted`. Computed from
/// `t^3 p - 2 t^2 p^2 + t p^3`.
pub fn error_sums(
    correlator: &Correlator,
    text: &Sequence,
    pattern: &Sequence,
    position_weighted: bool,
) -> Result<Vec<i64>> {
    let cubic_t = correlator.power_correlate(text, pattern, 3, 1, position_weighted)?;
    let square = correlator.power_correlate(text, pattern, 2, 2, position_weighted)?;
    let cubic_p = correlator.power_correlate(text, pattern, 1, 3, position_weighted)?;
    let overflow = || Error::Precision {
        predicted: u128::MAX,
        limit: i64::MAX as u128,
    };
    cubic_t
        .iter()
        .zip(&square)
        .zip(&cubic_p)
        .map(|((&a, &b), &c)| {
            b.checked_mul(2)
                .and_then(|b2| a.checked_sub(b2))
                .and_then(|v| v.checked_add(c))
                .ok_or_else(overflow)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OneMismatchVerdict {
    ZeroMismatch,
    /// 1-based text position of the only mismatch.
    ExactlyOne(usize),
    Other,
}

pub fn one_mismatch(text: &Sequence, pattern: &Sequence) -> Result<Vec<OneMismatchVerdict>> {
    one_mismatch_with(&Correlator::default(), text, pattern)
}

/// Decides for every alignment whether it has zero, exactly one, or some
/// other number of mismatches, using six correlations.
pub fn one_mismatch_with(
    correlator: &Correlator,
    text: &Sequence,
    pattern: &Sequence,
) -> Result<Vec<OneMismatchVerdict>> {
    check_lengths(text.len(), pattern.len())?;
    let total = error_sums(correlator, text, pattern, false)?;
    let weighted = error_sums(correlator, text, pattern, true)?;
    let (t, p, m) = (text.ranks(), pattern.ranks(), pattern.len());
    Ok(total
        .iter()
        .zip(&weighted)
        .enumerate()
        .map(|(idx, (&e, &ew))| {
            let i = idx + 1;
            if e == 0 {
                return OneMismatchVerdict::ZeroMismatch;
            }
            if ew % e != 0 {
                return OneMismatchVerdict::Other;
            }
            let b = ew / e;
            if b < i as i64 || b > (i + m - 1) as i64 {
                return OneMismatchVerdict::Other;
            }
            let b = b as usize;
            if error_term(t[b - 1], p[b - i]) == e {
                OneMismatchVerdict::ExactlyOne(b)
            } else {
                OneMismatchVerdict::Other
            }
        })
        .collect())
}

/// Copy of `pattern` keeping `count` uniformly chosen positions and zeroing
/// (wild-carding) the rest.
pub fn sample_project<R: Rng + ?Sized>(pattern: &Sequence, count: usize, rng: &mut R) -> Sequence {
    let m = pattern.len();
    let mut out = vec![WILDCARD; m];
    for j in sample(rng, m, count.clamp(1, m)) {
        out[j] = pattern.ranks()[j];
    }
    Sequence::from(out)
}

/// Residual error and discovered mismatch positions per alignment.
#[derive(Clone, Debug)]
pub struct MismatchLedger {
    residual: Vec<i64>,
    found: Vec<Vec<usize>>,
    k: usize,
}

impl MismatchLedger {
    /// Starts from the full error sums of every alignment.
    pub fn new(error_sums: Vec<i64>, k: usize) -> Self {
        let found = vec![Vec::new(); error_sums.len()];
        Self {
            residual: error_sums,
            found,
            k,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.residual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residual.is_empty()
    }

    /// Residual error of 1-based `alignment`.
    pub fn residual(&self, alignment: usize) -> i64 {
        self.residual[alignment - 1]
    }

    /// Discovered mismatch text positions of 1-based `alignment`, ascending.
    pub fn found(&self, alignment: usize) -> &[usize] {
        &self.found[alignment - 1]
    }

    /// Either every mismatch is known or more than `k` are.
    pub fn is_resolved(&self, alignment: usize) -> bool {
        self.residual[alignment - 1] == 0 || self.found[alignment - 1].len() > self.k
    }

    pub fn all_resolved(&self) -> bool {
        (1..=self.len()).all(|i| self.is_resolved(i))
    }

    /// Records mismatch `position` with error term `error`; duplicates are ignored.
    pub fn record(&mut self, alignment: usize, position: usize, error: i64) -> bool {
        let list = &mut self.found[alignment - 1];
        match list.binary_search(&position) {
            Ok(_) => false,
            Err(at) => {
                list.insert(at, position);
                self.residual[alignment - 1] -= error;
                debug_assert!(self.residual[alignment - 1] >= 0);
                true
            }
        }
    }

    pub fn report(&self) -> BoundedReport {
        BoundedReport::new(
            self.k,
            (1..=self.len())
                .map(|i| {
                    let bound = if self.residual(i) == 0 && self.found(i).len() <= self.k {
                        Bound::Exact(self.found(i).len())
                    } else {
                        Bound::ExceedsK
                    };
                    (i, bound)
                })
                .collect(),
        )
    }
}

/// Constants of the sampling schedules.
#[derive(Clone, Copy, Debug)]
pub struct SamplingConfig {
    /// Sparse sampling runs `ceil(phase_factor * k * log2 n)` phases.
    pub phase_factor: f64,
    /// Steps per halving phase of the Las Vegas search: `steps_factor * k`.
    pub steps_factor: usize,
    /// Steps per halving phase when `k < log2 n`: `ceil(steps_factor * alpha * log2 n)`.
    pub small_k_factor: f64,
    pub correlator: Correlator,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            phase_factor: 2.0,
            steps_factor: 36,
            small_k_factor: 36.0,
            correlator: Correlator::default(),
        }
    }
}

fn log2_len(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

/// One sampling step: project the pattern onto `count` random positions, run
/// the 1-mismatch detector and record every isolated mismatch.
fn sampling_step(
    config: &SamplingConfig,
    text: &Sequence,
    pattern: &Sequence,
    count: usize,
    rng: &mut SeededRng,
    ledger: &mut MismatchLedger,
) -> Result<()> {
    let projected = sample_project(pattern, count, rng);
    let verdicts = one_mismatch_with(&config.correlator, text, &projected)?;
    let (t, p) = (text.ranks(), pattern.ranks());
    for (idx, v) in verdicts.into_iter().enumerate() {
        let i = idx + 1;
        if let OneMismatchVerdict::ExactlyOne(pos) = v {
            if !ledger.is_resolved(i) {
                ledger.record(i, pos, error_term(t[pos - 1], p[pos - i]));
            }
        }
    }
    Ok(())
}

/// Monte Carlo sampling pass: `ceil(phase_factor * k * log2 n)` phases, each
/// keeping `max(1, m / k)` pattern positions.
pub fn sparse_sampling(
    config: &SamplingConfig,
    text: &Sequence,
    pattern: &Sequence,
    k: usize,
    rng: &mut SeededRng,
    ledger: &mut MismatchLedger,
) -> Result<()> {
    check_lengths(text.len(), pattern.len())?;
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let phases = (config.phase_factor * k as f64 * log2_len(text.len())).ceil() as usize;
    let count = (pattern.len() / k).max(1);
    for _ in 0..phases {
        if ledger.all_resolved() {
            break;
        }
        let mut phase_rng = rng.fork();
        sampling_step(config, text, pattern, count, &mut phase_rng, ledger)?;
    }
    Ok(())
}

pub fn las_vegas_k_mismatches(
    text: &Sequence,
    pattern: &Sequence,
    k: usize,
    alpha: f64,
    rng: &mut SeededRng,
) -> Result<BoundedReport> {
    las_vegas_with(&SamplingConfig::default(), text, pattern, k, alpha, rng).map(|l| l.report())
}

/// Always-correct k-mismatch search. Repeats a sampling pass followed by
/// levels `l = 1..=w` sampling `max(1, m / (2^(l+1) k))` positions, until
/// every alignment has either zero residual error or more than `k` known
/// mismatches.
pub fn las_vegas_with(
    config: &SamplingConfig,
    text: &Sequence,
    pattern: &Sequence,
    k: usize,
    alpha: f64,
    rng: &mut SeededRng,
) -> Result<MismatchLedger> {
    check_lengths(text.len(), pattern.len())?;
    let (n, m) = (text.len(), pattern.len());
    if k == 0 || k > m {
        return Err(Error::InvalidParameter(format!("k = {k} outside 1..={m}")));
    }
    let mut ledger = MismatchLedger::new(error_sums(&config.correlator, text, pattern, false)?, k);

    // smallest w with k * 2^w >= m, so the last level samples a single
    // position and any alignment with more than k mismatches can be isolated
    let mut halvings = 0;
    while k << halvings < m {
        halvings += 1;
    }
    let steps = if (k as f64) < log2_len(n) {
        (config.small_k_factor * alpha * log2_len(n)).ceil() as usize
    } else {
        config.steps_factor * k
    };

    while !ledger.all_resolved() {
        sparse_sampling(config, text, pattern, k, rng, &mut ledger)?;
        'halving: for level in 1..=halvings {
            let count = (m / ((1usize << (level + 1)) * k)).max(1);
            for _ in 0..steps {
                if ledger.all_resolved() {
                    break 'halving;
                }
                let mut step_rng = rng.fork();
                sampling_step(config, text, pattern, count, &mut step_rng, &mut ledger)?;
            }
        }
    }
    Ok(ledger)
}

/// Per-alignment Hamming distance estimates.
#[derive(Clone, Debug)]
pub struct EstimateProfile {
    pub h: Vec<f64>,
    pub epsilon: f64,
    pub alpha: f64,
    pub phases: usize,
    pub one_sided: bool,
}

/// `ceil(6 (alpha + 3) ln m / epsilon^2)`.
pub fn approx_phases(m: usize, epsilon: f64, alpha: f64) -> usize {
    (6.0 * (alpha + 3.0) * (m as f64).ln() / (epsilon * epsilon)).ceil() as usize
}

/// Independent uniform map of ranks `1..=sigma` onto `{1, 2}`; rank 0 stays 0.
pub fn random_binary_map<R: Rng + ?Sized>(sigma: usize, rng: &mut R) -> Vec<u8> {
    let mut map = vec![0u8; sigma + 1];
    for slot in map.iter_mut().skip(1) {
        *slot = rng.gen_range(1..=2);
    }
    map
}

pub fn approx_count(
    text: &Sequence,
    pattern: &Sequence,
    epsilon: f64,
    alpha: f64,
    rng: &mut SeededRng,
    one_sided: bool,
) -> Result<EstimateProfile> {
    approx_count_with(
        &Correlator::default(),
        text,
        pattern,
        epsilon,
        alpha,
        rng,
        one_sided,
    )
}

/// Estimates every Hamming distance within a `1 +- epsilon` factor with
/// probability at least `1 - m^-alpha`. Each phase relabels the alphabet onto
/// `{1, 2}` at random and adds the relabeled error sums; a mismatching pair
/// contributes 2 with probability 1/2. With `one_sided`, estimates are scaled
/// by `1 / (1 - epsilon)` so they do not undershoot.
pub fn approx_count_with(
    correlator: &Correlator,
    text: &Sequence,
    pattern: &Sequence,
    epsilon: f64,
    alpha: f64,
    rng: &mut SeededRng,
    one_sided: bool,
) -> Result<EstimateProfile> {
    check_lengths(text.len(), pattern.len())?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {epsilon} outside (0, 1)"
        )));
    }
    if pattern.len() < 2 {
        return Err(Error::InvalidParameter(
            "pattern must have at least 2 symbols".into(),
        ));
    }
    let sigma = text.max_rank().max(pattern.max_rank()) as usize;
    let phases = approx_phases(pattern.len(), epsilon, alpha);
    let relabel = |s: &Sequence, map: &[u8]| -> Sequence {
        s.ranks()
            .iter()
            .map(|&r| map[r as usize])
            .collect::<Vec<_>>()
            .into()
    };

    let mut total = vec![0i64; text.len() - pattern.len() + 1];
    for _ in 0..phases {
        let mut phase_rng = rng.fork();
        let map = random_binary_map(sigma, &mut phase_rng);
        let sums = error_sums(
            correlator,
            &relabel(text, &map),
            &relabel(pattern, &map),
            false,
        )?;
        for (acc, v) in total.iter_mut().zip(sums) {
            *acc += v;
        }
    }
    let scale = if one_sided {
        (1.0 - epsilon) * phases as f64
    } else {
        phases as f64
    };
    Ok(EstimateProfile {
        h: total.into_iter().map(|c| c as f64 / scale).collect(),
        epsilon,
        alpha,
        phases,
        one_sided,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::naive_profile;

    fn s(v: &[u8]) -> Sequence {
        Sequence::from(v.to_vec())
    }

    /// Counts mismatches directly and locates a lone one.
    fn classify(t: &[u8], p: &[u8]) -> Vec<OneMismatchVerdict> {
        (0..=t.len() - p.len())
            .map(|i| {
                let mism: Vec<usize> = (0..p.len())
                    .filter(|&j| t[i + j] != 0 && p[j] != 0 && t[i + j] != p[j])
                    .collect();
                match mism.as_slice() {
                    [] => OneMismatchVerdict::ZeroMismatch,
                    [j] => OneMismatchVerdict::ExactlyOne(i + j + 1),
                    _ => OneMismatchVerdict::Other,
                }
            })
            .collect()
    }

    #[test]
    fn one_mismatch_examples() {
        let c = Correlator::default();
        // a = 1, b = 2, c = 3
        assert_eq!(
            error_sums(&c, &s(&[1, 3]), &s(&[1, 2]), false).unwrap(),
            vec![6]
        );
        assert_eq!(
            error_sums(&c, &s(&[1, 3]), &s(&[1, 2]), true).unwrap(),
            vec![12]
        );
        assert_eq!(
            one_mismatch(&s(&[1, 3]), &s(&[1, 2])).unwrap(),
            vec![OneMismatchVerdict::ExactlyOne(2)]
        );
        assert_eq!(
            one_mismatch(&s(&[2, 1, 2]), &s(&[2, 1, 2])).unwrap(),
            vec![OneMismatchVerdict::ZeroMismatch]
        );
        assert_eq!(
            error_sums(&c, &s(&[3, 3]), &s(&[1, 2]), false).unwrap(),
            vec![18]
        );
        assert_eq!(
            error_sums(&c, &s(&[3, 3]), &s(&[1, 2]), true).unwrap(),
            vec![24]
        );
        assert_eq!(
            one_mismatch(&s(&[3, 3]), &s(&[1, 2])).unwrap(),
            vec![OneMismatchVerdict::Other]
        );
    }

    #[test]
    fn one_mismatch_exhaustive_small() {
        // every text of length 6 and pattern of length <= 3 over {0, 1, 2, 3}
        let words = |len: usize| -> Vec<Vec<u8>> {
            (0..4usize.pow(len as u32))
                .map(|mut code| {
                    (0..len)
                        .map(|_| {
                            let d = (code % 4) as u8;
                            code /= 4;
                            d
                        })
                        .collect()
                })
                .collect()
        };
        let texts = words(6);
        for m in 1..=3 {
            for p in words(m) {
                for t in texts.iter().step_by(7) {
                    assert_eq!(
                        one_mismatch(&s(t), &s(&p)).unwrap(),
                        classify(t, &p),
                        "t={t:?} p={p:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn sample_project_keeps_chosen_positions() {
        let mut rng = SeededRng::new(3);
        let p = s(&[1, 2, 0, 3, 4]);
        assert_eq!(sample_project(&p, 5, &mut rng), p);
        let wild = s(&[0, 0, 0]);
        assert_eq!(sample_project(&wild, 2, &mut rng), wild);
        for _ in 0..20 {
            let q = sample_project(&p, 2, &mut rng);
            assert_eq!(q.len(), 5);
            for (a, b) in q.ranks().iter().zip(p.ranks()) {
                assert!(*a == 0 || a == b);
            }
        }
    }

    #[test]
    fn sample_project_is_uniform() {
        let p = s(&[1, 2]);
        let mut first = 0;
        let trials = 4000;
        for seed in 0..trials {
            let q = sample_project(&p, 1, &mut SeededRng::new(seed));
            match q.ranks() {
                [1, 0] => first += 1,
                [0, 2] => {}
                other => panic!("unexpected projection {other:?}"),
            }
        }
        // binomial(4000, 1/2): sd = 31.6
        assert!((first as i64 - 2000).abs() < 4 * 32, "{first}");
    }

    #[test]
    fn sparse_sampling_converges_on_small_case() {
        let mut a = crate::alphabet::Alphabet::new(b'?');
        let (t, p) = (a.encode(b"abcab"), a.encode(b"abc"));
        let config = SamplingConfig::default();
        let mut ledger =
            MismatchLedger::new(error_sums(&config.correlator, &t, &p, false).unwrap(), 3);
        let mut rng = SeededRng::new(9);
        while ledger.residual(2) != 0 {
            sparse_sampling(&config, &t, &p, 3, &mut rng, &mut ledger).unwrap();
        }
        assert_eq!(ledger.found(2), &[2, 3, 4]);
        assert_eq!(ledger.residual(1), 0);
        assert!(ledger.found(1).is_empty());
    }

    #[test]
    fn identical_strings_leave_ledger_untouched() {
        let t = s(&[1, 2, 3, 1, 2]);
        let config = SamplingConfig::default();
        let mut ledger =
            MismatchLedger::new(error_sums(&config.correlator, &t, &t, false).unwrap(), 2);
        sparse_sampling(&config, &t, &t, 2, &mut SeededRng::new(1), &mut ledger).unwrap();
        assert_eq!(ledger.residual(1), 0);
        assert!(ledger.found(1).is_empty());
    }

    #[test]
    fn las_vegas_examples() {
        let mut a = crate::alphabet::Alphabet::new(b'?');
        let (t, p) = (a.encode(b"abcab"), a.encode(b"abc"));
        for seed in 0..5 {
            let rep = las_vegas_k_mismatches(&t, &p, 1, 1.0, &mut SeededRng::new(seed)).unwrap();
            assert_eq!(
                rep.entries(),
                &[
                    (1, Bound::Exact(0)),
                    (2, Bound::ExceedsK),
                    (3, Bound::ExceedsK)
                ]
            );
        }
        let t = a.encode(b"ab?cab");
        let p = a.encode(b"a?bcab");
        let rep = las_vegas_k_mismatches(&t, &p, 2, 1.0, &mut SeededRng::new(0)).unwrap();
        assert_eq!(rep.get(1), Some(Bound::Exact(0)));
    }

    #[test]
    fn las_vegas_with_large_k() {
        // 2k >= m skips the halving phases entirely
        let t = s(&[1, 2, 3, 4, 1, 2, 3, 4, 4, 4]);
        let p = s(&[4, 3, 2, 1]);
        for k in 2..=4 {
            let rep =
                las_vegas_k_mismatches(&t, &p, k, 1.0, &mut SeededRng::new(k as u64)).unwrap();
            assert_eq!(rep, naive_profile(&t, &p).unwrap().bounded(k));
        }
    }

    #[test]
    fn approx_identity_and_wildcards() {
        let t = s(&[1, 2, 3, 1, 2, 3, 1]);
        let prof =
            approx_count(&t, &t.slice(0, 4), 0.5, 1.0, &mut SeededRng::new(5), false).unwrap();
        assert_eq!(prof.h[0], 0.0);
        assert_eq!(prof.h[3], 0.0);
        let prof = approx_count(&t, &t, 0.5, 1.0, &mut SeededRng::new(5), true).unwrap();
        assert_eq!(prof.h, vec![0.0]);
        let prof =
            approx_count(&t, &s(&[0, 0, 0]), 0.3, 1.0, &mut SeededRng::new(6), false).unwrap();
        assert!(prof.h.iter().all(|&h| h == 0.0));
        assert_eq!(prof.phases, approx_phases(3, 0.3, 1.0));
    }

    #[test]
    fn approx_rejects_bad_parameters() {
        let t = s(&[1, 2, 3]);
        assert!(approx_count(&t, &s(&[1, 2]), 0.0, 1.0, &mut SeededRng::new(0), false).is_err());
        assert!(approx_count(&t, &s(&[1, 2]), 1.0, 1.0, &mut SeededRng::new(0), false).is_err());
        assert!(approx_count(&t, &s(&[1]), 0.5, 1.0, &mut SeededRng::new(0), false).is_err());
    }

    #[test]
    fn relabeled_pair_contributes_two() {
        assert_eq!(error_term(1, 2), 2);
        assert_eq!(error_term(2, 1), 2);
        assert_eq!(error_term(2, 2), 0);
        assert_eq!(error_term(0, 2), 0);
    }

    #[test]
    fn per_phase_expectation_is_one() {
        let mut rng = SeededRng::new(77);
        let trials = 100_000;
        let total: i64 = (0..trials)
            .map(|_| {
                let map = random_binary_map(2, &mut rng);
                error_term(map[1], map[2])
            })
            .sum();
        let mean = total as f64 / trials as f64;
        // per-phase standard deviation is 1
        assert!((mean - 1.0).abs() <= 3.0 / (trials as f64).sqrt(), "{mean}");
    }

    #[test]
    fn forks_are_reproducible() {
        let mut a = SeededRng::new(42);
        let mut b = SeededRng::new(42);
        let (mut fa, mut fb) = (a.fork(), b.fork());
        assert_eq!(fa.next_u64(), fb.next_u64());
        assert_ne!(a.fork().next_u64(), fa.next_u64());
    }
}
