//! Timing sweep over text length, pattern length, threshold and algorithm.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use kmis::exact_count::{abrahamson_profile_with, wildcard_profile_with};
use kmis::kdet::{subset_k_mismatches_with, KnapsackMatcher};
use kmis::{naive_profile, Correlator, SeededRng, Sequence, SuffixIndex, WorkCounters};
use rand::Rng;

use crate::ingest::extract_pattern;
use crate::CliError;

pub const CSV_HEADER: &str = "algorithm,n,m,k,sigma,seed,ms,marks,convs,lce";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchAlgo {
    Naive,
    Abrahamson,
    Wildcard,
    Subset,
    Knapsack,
}

impl BenchAlgo {
    pub const ALL: [BenchAlgo; 5] = [
        BenchAlgo::Naive,
        BenchAlgo::Abrahamson,
        BenchAlgo::Wildcard,
        BenchAlgo::Subset,
        BenchAlgo::Knapsack,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchAlgo::Naive => "naive",
            BenchAlgo::Abrahamson => "abrahamson",
            BenchAlgo::Wildcard => "wildcard",
            BenchAlgo::Subset => "subset",
            BenchAlgo::Knapsack => "knapsack",
        }
    }
}

impl fmt::Display for BenchAlgo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchAlgo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BenchAlgo::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown bench algorithm `{s}`"))
    }
}

/// One row of the sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub algorithm: BenchAlgo,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub sigma: usize,
    pub seed: u64,
    pub ms: f64,
    pub work: WorkCounters,
}

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3},{},{},{}",
            self.algorithm,
            self.n,
            self.m,
            self.k,
            self.sigma,
            self.seed,
            self.ms,
            self.work.marks_created,
            self.work.convolutions_run,
            self.work.lce_queries
        )
    }
}

/// Runs `algo` once and times only the algorithm call.
pub fn run_cell(
    algo: BenchAlgo,
    text: &Sequence,
    pattern: &Sequence,
    k: usize,
    correlator: &Correlator,
) -> Result<(f64, WorkCounters), CliError> {
    let mut work = WorkCounters::default();
    let start = Instant::now();
    match algo {
        BenchAlgo::Naive => {
            naive_profile(text, pattern)?;
        }
        BenchAlgo::Abrahamson => {
            abrahamson_profile_with(text, pattern, correlator, &mut work)?;
        }
        BenchAlgo::Wildcard => {
            wildcard_profile_with(text, pattern, correlator, &mut work)?;
        }
        BenchAlgo::Subset => {
            let index = SuffixIndex::build(pattern)?;
            let all: Vec<usize> = (1..=text.len() - pattern.len() + 1).collect();
            subset_k_mismatches_with(&index, text, pattern, &all, k, &mut work)?;
        }
        BenchAlgo::Knapsack => {
            KnapsackMatcher {
                correlator: *correlator,
                budget: None,
            }
            .run(text, pattern, k, &mut work)?;
        }
    }
    Ok((start.elapsed().as_secs_f64() * 1e3, work))
}

/// Sweep axes. Cells with `m > n` or `k > m` are skipped.
#[derive(Clone, Debug)]
pub struct BenchGrid {
    pub lengths: Vec<usize>,
    pub pattern_lengths: Vec<usize>,
    pub thresholds: Vec<usize>,
    pub algorithms: Vec<BenchAlgo>,
    pub seed: u64,
}

fn distinct_symbols(s: &Sequence) -> usize {
    let mut seen = [false; 256];
    for &r in s.ranks() {
        seen[r as usize] = r != 0;
    }
    seen.iter().filter(|&&b| b).count()
}

/// Runs the grid against prefixes of `corpus`, in grid order. The pattern of
/// each `(n, m)` pair is a random substring drawn from its own rng stream and
/// shared by every `k` and algorithm.
pub fn run_grid(
    corpus: &Sequence,
    grid: &BenchGrid,
    correlator: &Correlator,
) -> Result<Vec<BenchRecord>, CliError> {
    let mut root = SeededRng::new(grid.seed);
    let mut records = Vec::new();
    for &n in &grid.lengths {
        if n > corpus.len() {
            return Err(CliError::Usage(format!(
                "text length {n} exceeds corpus length {}",
                corpus.len()
            )));
        }
        let text = corpus.slice(0, n);
        let sigma = distinct_symbols(&text);
        for &m in &grid.pattern_lengths {
            let cell_seed = root.gen::<u64>();
            if m == 0 || m > n {
                continue;
            }
            let (_, pattern) = extract_pattern(&text, m, &mut SeededRng::new(cell_seed))?;
            for &k in &grid.thresholds {
                if k == 0 || k > m {
                    continue;
                }
                for &algo in &grid.algorithms {
                    let (ms, work) = run_cell(algo, &text, &pattern, k, correlator)?;
                    records.push(BenchRecord {
                        algorithm: algo,
                        n,
                        m,
                        k,
                        sigma,
                        seed: cell_seed,
                        ms,
                        work,
                    });
                }
            }
        }
    }
    Ok(records)
}

/// Uniform random text over ranks `1..=sigma`.
pub fn synthetic_text(n: usize, sigma: u8, seed: u64) -> Sequence {
    let mut rng = SeededRng::new(seed);
    (0..n)
        .map(|_| rng.gen_range(1..=sigma))
        .collect::<Vec<_>>()
        .into()
}

pub fn write_csv<W: Write>(out: &mut W, records: &[BenchRecord]) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}
