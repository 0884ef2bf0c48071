use kmis::krand::{
    error_sums, error_term, las_vegas_with, sparse_sampling, MismatchLedger, SamplingConfig,
};
use kmis::{approx_count, las_vegas_k_mismatches, naive_profile, SeededRng, Sequence};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

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

fn true_mismatches(t: &Sequence, p: &Sequence, i: usize) -> Vec<usize> {
    let (t, p) = (t.ranks(), p.ranks());
    (0..p.len())
        .filter(|&j| error_term(t[i - 1 + j], p[j]) != 0)
        .map(|j| i + j)
        .collect()
}

fn assert_sound(ledger: &MismatchLedger, t: &Sequence, p: &Sequence) {
    for i in 1..=ledger.len() {
        let truth = true_mismatches(t, p, i);
        for pos in ledger.found(i) {
            assert!(
                truth.contains(pos),
                "alignment {i}: {pos} is not a mismatch"
            );
        }
        let undiscovered: i64 = truth
            .iter()
            .filter(|pos| !ledger.found(i).contains(pos))
            .map(|&pos| error_term(t.ranks()[pos - 1], p.ranks()[pos - i]))
            .sum();
        assert_eq!(ledger.residual(i), undiscovered, "alignment {i}");
    }
}

#[test]
fn ledger_stays_sound_between_passes() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let config = SamplingConfig {
        phase_factor: 0.25,
        ..SamplingConfig::default()
    };
    for _ in 0..30 {
        let m = rng.gen_range(2..=24);
        let n = rng.gen_range(m..=120);
        let k = rng.gen_range(1..=m);
        let sigma = rng.gen_range(2..=6);
        let t = random_seq(&mut rng, n, sigma, 0.1);
        let p = random_seq(&mut rng, m, sigma, 0.1);
        let mut ledger =
            MismatchLedger::new(error_sums(&config.correlator, &t, &p, false).unwrap(), k);
        assert_sound(&ledger, &t, &p);
        let mut srng = SeededRng::new(rng.gen());
        for _ in 0..4 {
            sparse_sampling(&config, &t, &p, k, &mut srng, &mut ledger).unwrap();
            assert_sound(&ledger, &t, &p);
        }
    }
}

#[test]
fn las_vegas_is_exact_for_every_seed() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for case in 0..40 {
        let m = rng.gen_range(1..=40);
        let n = rng.gen_range(m..=300);
        let k = rng.gen_range(1..=m);
        let sigma = [2u8, 4, 20][case % 3];
        let t = random_seq(&mut rng, n, sigma, 0.1);
        let p = random_seq(&mut rng, m, sigma, 0.1);
        let expected = naive_profile(&t, &p).unwrap().bounded(k);
        for seed in 0..3 {
            let got = las_vegas_k_mismatches(&t, &p, k, 1.0, &mut SeededRng::new(seed)).unwrap();
            assert_eq!(got, expected, "case {case} seed {seed}");
        }
    }
}

#[test]
fn las_vegas_ledger_lists_every_mismatch_of_close_alignments() {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let t = random_seq(&mut rng, 200, 4, 0.05);
    let p = t.slice(50, 30);
    let ledger = las_vegas_with(
        &SamplingConfig::default(),
        &t,
        &p,
        5,
        1.0,
        &mut SeededRng::new(1),
    )
    .unwrap();
    assert_sound(&ledger, &t, &p);
    for i in 1..=ledger.len() {
        if ledger.residual(i) == 0 {
            assert_eq!(ledger.found(i), true_mismatches(&t, &p, i).as_slice());
        }
    }
}

#[test]
fn identical_seeds_reproduce_estimates() {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let t = random_seq(&mut rng, 150, 5, 0.1);
    let p = random_seq(&mut rng, 20, 5, 0.1);
    let a = approx_count(&t, &p, 0.3, 1.0, &mut SeededRng::new(4), false).unwrap();
    let b = approx_count(&t, &p, 0.3, 1.0, &mut SeededRng::new(4), false).unwrap();
    assert_eq!(a.h, b.h);
}

#[test]
fn one_sided_estimates_dominate() {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let (mut hits, mut total) = (0, 0);
    for _ in 0..5 {
        let t = random_seq(&mut rng, 200, 6, 0.1);
        let p = random_seq(&mut rng, 64, 6, 0.1);
        let truth = naive_profile(&t, &p).unwrap();
        let est = approx_count(&t, &p, 0.2, 1.0, &mut SeededRng::new(rng.gen()), true).unwrap();
        for (h, &d) in est.h.iter().zip(truth.as_slice()) {
            total += 1;
            hits += (*h >= d as f64) as usize;
        }
    }
    assert!(
        hits as f64 >= (1.0 - 2.0 / 64.0) * total as f64,
        "{hits}/{total}"
    );
}
