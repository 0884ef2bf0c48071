use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kmis::exact_count::{abrahamson_profile, wildcard_profile};
use kmis::kdet::{subset_k_mismatches, KnapsackMatcher};
use kmis::krand::{approx_count, las_vegas_with, SamplingConfig};
use kmis::{
    naive_profile, Alphabet, BoundedReport, Correlator, DistanceProfile, SeededRng, Sequence,
    WorkCounters,
};

use crate::bench::{run_grid, synthetic_text, write_csv, BenchAlgo, BenchGrid};
use crate::ingest::{extract_pattern, ingest, Format};
use crate::{CliError, EXIT_MISMATCH};

#[derive(Debug, Parser)]
#[command(
    name = "kmis",
    version,
    about = "Pattern matching with mismatches under Hamming distance"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact Hamming distance at every alignment.
    Count {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = CountAlgo::Naive)]
        algo: CountAlgo,
    },
    /// Deterministic k-mismatch search.
    Kmm {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum, default_value_t = KmmAlgo::Knapsack)]
        algo: KmmAlgo,
        #[arg(short, long)]
        k: usize,
        /// Marking budget override for the knapsack algorithm.
        #[arg(long)]
        budget: Option<f64>,
    },
    /// Las Vegas k-mismatch search (wild cards allowed).
    KmmLv {
        #[command(flatten)]
        input: InputArgs,
        #[arg(short, long)]
        k: usize,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Approximate mismatch counts.
    Approx {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Scale estimates so they do not undershoot.
        #[arg(long)]
        one_sided: bool,
    },
    /// Run an algorithm and the naive oracle; exit 1 if they differ.
    Verify {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        algo: VerifyAlgo,
        #[arg(short, long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
    /// Timing sweep; writes CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Text corpus.
    #[arg(long)]
    pub text: PathBuf,
    #[arg(long, default_value = "plain")]
    pub format: Format,
    /// Literal pattern.
    #[arg(long, group = "pattern_source")]
    pub pattern: Option<String>,
    /// Pattern file, read in the same format as the text.
    #[arg(long, group = "pattern_source")]
    pub pattern_file: Option<PathBuf>,
    /// Use a random substring of the text of this length.
    #[arg(long, group = "pattern_source")]
    pub pattern_len: Option<usize>,
    /// Byte treated as a wild card (none by default).
    #[arg(long)]
    pub wildcard: Option<char>,
    #[arg(long, env = "KMIS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout if omitted).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SamplingArgs {
    /// Phase factor of the fixed-rate sampling pass.
    #[arg(long, default_value_t = 2.0)]
    pub phase_factor: f64,
    /// Steps per halving phase, as a multiple of k.
    #[arg(long, default_value_t = 36)]
    pub steps_factor: usize,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Corpus to truncate; a uniform random text is generated when omitted.
    #[arg(long)]
    pub text: Option<PathBuf>,
    #[arg(long, default_value = "plain")]
    pub format: Format,
    /// Alphabet size of the generated text.
    #[arg(long, default_value_t = 4)]
    pub sigma: u8,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub m: Vec<usize>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub k: Vec<usize>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "naive,abrahamson,subset,knapsack"
    )]
    pub algos: Vec<BenchAlgo>,
    #[arg(long)]
    pub wildcard: Option<char>,
    #[arg(long, env = "KMIS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Direct-summation crossover of the correlation engine.
    #[arg(long, default_value_t = kmis::convolution::DEFAULT_CROSSOVER)]
    pub crossover: usize,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CountAlgo {
    Naive,
    Abrahamson,
    Wildcard,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum KmmAlgo {
    Subset,
    Knapsack,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum VerifyAlgo {
    Abrahamson,
    Wildcard,
    Subset,
    Knapsack,
    LasVegas,
}

fn wildcard_byte(c: Option<char>) -> Result<u8, CliError> {
    match c {
        None => Ok(0),
        Some(c) if c.is_ascii() => Ok(c as u8),
        Some(c) => Err(CliError::Usage(format!(
            "wild card `{c}` is not a single byte"
        ))),
    }
}

struct Instance {
    text: Sequence,
    pattern: Sequence,
}

fn load(input: &InputArgs, rng: &mut SeededRng) -> Result<Instance, CliError> {
    let mut alphabet = Alphabet::new(wildcard_byte(input.wildcard)?);
    let text = ingest(&input.text, input.format, &mut alphabet)?;
    let pattern = match (&input.pattern, &input.pattern_file, input.pattern_len) {
        (Some(lit), None, None) => alphabet.encode(lit.as_bytes()),
        (None, Some(path), None) => ingest(path, input.format, &mut alphabet)?,
        (None, None, Some(m)) => extract_pattern(&text, m, &mut rng.fork())?.1,
        _ => {
            return Err(CliError::Usage(
                "exactly one of --pattern, --pattern-file, --pattern-len is required".into(),
            ))
        }
    };
    if pattern.is_empty() {
        return Err(CliError::Usage("empty pattern".into()));
    }
    if pattern.len() > text.len() {
        return Err(CliError::Input(format!(
            "pattern length {} exceeds text length {}",
            pattern.len(),
            text.len()
        )));
    }
    Ok(Instance { text, pattern })
}

fn check_k(k: usize, m: usize) -> Result<usize, CliError> {
    if k == 0 || k > m {
        return Err(CliError::Usage(format!("k must lie in 1..={m}, got {k}")));
    }
    Ok(k)
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn write_profile<W: Write + ?Sized>(out: &mut W, profile: &DistanceProfile) -> io::Result<()> {
    for (i, d) in profile.iter() {
        writeln!(out, "{i}\t{d}")?;
    }
    Ok(())
}

/// `position<TAB>distance`, or `position<TAB>>k` past the threshold.
pub fn write_report<W: Write + ?Sized>(out: &mut W, report: &BoundedReport) -> io::Result<()> {
    for &(i, b) in report.entries() {
        match b.exact() {
            Some(d) => writeln!(out, "{i}\t{d}")?,
            None => writeln!(out, "{i}\t>{}", report.k())?,
        }
    }
    Ok(())
}

/// Runs one command and returns the process exit code.
pub fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Count { input, algo } => {
            let inst = load(&input, &mut SeededRng::new(input.seed))?;
            let profile = match algo {
                CountAlgo::Naive => naive_profile(&inst.text, &inst.pattern)?,
                CountAlgo::Abrahamson => abrahamson_profile(&inst.text, &inst.pattern)?,
                CountAlgo::Wildcard => wildcard_profile(&inst.text, &inst.pattern)?,
            };
            let mut out = output(&input.output)?;
            write_profile(&mut out, &profile)?;
            out.flush()?;
        }
        Command::Kmm {
            input,
            algo,
            k,
            budget,
        } => {
            let inst = load(&input, &mut SeededRng::new(input.seed))?;
            let k = check_k(k, inst.pattern.len())?;
            let report = match algo {
                KmmAlgo::Subset => {
                    let all: Vec<usize> = (1..=inst.text.len() - inst.pattern.len() + 1).collect();
                    subset_k_mismatches(&inst.text, &inst.pattern, &all, k)?
                }
                KmmAlgo::Knapsack => {
                    KnapsackMatcher {
                        correlator: Correlator::default(),
                        budget,
                    }
                    .run(&inst.text, &inst.pattern, k, &mut WorkCounters::default())?
                    .report
                }
            };
            let mut out = output(&input.output)?;
            write_report(&mut out, &report)?;
            out.flush()?;
        }
        Command::KmmLv {
            input,
            k,
            alpha,
            sampling,
        } => {
            let mut rng = SeededRng::new(input.seed);
            let inst = load(&input, &mut rng)?;
            let k = check_k(k, inst.pattern.len())?;
            let config = SamplingConfig {
                phase_factor: sampling.phase_factor,
                steps_factor: sampling.steps_factor,
                ..SamplingConfig::default()
            };
            let ledger = las_vegas_with(
                &config,
                &inst.text,
                &inst.pattern,
                k,
                alpha,
                &mut rng.fork(),
            )?;
            let mut out = output(&input.output)?;
            write_report(&mut out, &ledger.report())?;
            out.flush()?;
        }
        Command::Approx {
            input,
            epsilon,
            alpha,
            one_sided,
        } => {
            if !(epsilon > 0.0 && epsilon < 1.0) {
                return Err(CliError::Usage(format!(
                    "epsilon must lie in (0, 1), got {epsilon}"
                )));
            }
            let mut rng = SeededRng::new(input.seed);
            let inst = load(&input, &mut rng)?;
            let est = approx_count(
                &inst.text,
                &inst.pattern,
                epsilon,
                alpha,
                &mut rng.fork(),
                one_sided,
            )?;
            let mut out = output(&input.output)?;
            for (i, h) in est.h.iter().enumerate() {
                writeln!(out, "{}\t{}", i + 1, h)?;
            }
            out.flush()?;
        }
        Command::Verify {
            input,
            algo,
            k,
            alpha,
        } => {
            let mut rng = SeededRng::new(input.seed);
            let inst = load(&input, &mut rng)?;
            let (t, p) = (&inst.text, &inst.pattern);
            let oracle = naive_profile(t, p)?;
            let needs_k = || -> Result<usize, CliError> {
                let k =
                    k.ok_or_else(|| CliError::Usage(format!("--k is required for {algo:?}")))?;
                check_k(k, p.len())
            };
            let mismatch = match algo {
                VerifyAlgo::Abrahamson => first_profile_diff(&abrahamson_profile(t, p)?, &oracle),
                VerifyAlgo::Wildcard => first_profile_diff(&wildcard_profile(t, p)?, &oracle),
                VerifyAlgo::Subset => {
                    let k = needs_k()?;
                    let all: Vec<usize> = (1..=oracle.len()).collect();
                    first_report_diff(&subset_k_mismatches(t, p, &all, k)?, &oracle.bounded(k))
                }
                VerifyAlgo::Knapsack => {
                    let k = needs_k()?;
                    first_report_diff(&kmis::knapsack_k_mismatches(t, p, k)?, &oracle.bounded(k))
                }
                VerifyAlgo::LasVegas => {
                    let k = needs_k()?;
                    let ledger = las_vegas_with(
                        &SamplingConfig::default(),
                        t,
                        p,
                        k,
                        alpha,
                        &mut rng.fork(),
                    )?;
                    first_report_diff(&ledger.report(), &oracle.bounded(k))
                }
            };
            let mut out = output(&input.output)?;
            match mismatch {
                None => writeln!(out, "ok\t{} alignments", oracle.len())?,
                Some(i) => writeln!(out, "mismatch\talignment {i}")?,
            }
            out.flush()?;
            if mismatch.is_some() {
                return Ok(EXIT_MISMATCH);
            }
        }
        Command::Bench(args) => {
            let corpus = match &args.text {
                Some(path) => {
                    let mut alphabet = Alphabet::new(wildcard_byte(args.wildcard)?);
                    ingest(path, args.format, &mut alphabet)?
                }
                None => {
                    let longest = args.n.iter().copied().max().unwrap_or(0);
                    if args.sigma == 0 {
                        return Err(CliError::Usage("--sigma must be at least 1".into()));
                    }
                    synthetic_text(longest, args.sigma, args.seed)
                }
            };
            let grid = BenchGrid {
                lengths: args.n,
                pattern_lengths: args.m,
                thresholds: args.k,
                algorithms: args.algos,
                seed: args.seed,
            };
            let records = run_grid(&corpus, &grid, &Correlator::with_crossover(args.crossover))?;
            let mut out = output(&args.output)?;
            write_csv(&mut out, &records)?;
            out.flush()?;
        }
    }
    Ok(0)
}

fn first_profile_diff(got: &DistanceProfile, oracle: &DistanceProfile) -> Option<usize> {
    if got.len() != oracle.len() {
        return Some(got.len().min(oracle.len()) + 1);
    }
    got.iter()
        .zip(oracle.iter())
        .find(|(a, b)| a != b)
        .map(|(a, _)| a.0)
}

fn first_report_diff(got: &BoundedReport, oracle: &BoundedReport) -> Option<usize> {
    if got.len() != oracle.len() {
        return Some(got.len().min(oracle.len()) + 1);
    }
    got.entries()
        .iter()
        .zip(oracle.entries())
        .find(|(a, b)| a != b)
        .map(|(a, _)| a.0)
}
