//! Pattern matching with mismatches under Hamming distance.
//!
//! Texts and patterns are byte strings encoded to ranks by an [`Alphabet`];
//! rank 0 is a wild card that matches anything. Alignments and positions are
//! 1-based throughout.
//!
//! - [`naive_profile`]: O(nm) oracle.
//! - [`abrahamson_profile`], [`wildcard_profile`]: exact profiles mixing
//!   convolution and marking.
//! - [`subset_k_mismatches`], [`knapsack_k_mismatches`]: deterministic
//!   k-mismatch search without wild cards.
//! - [`las_vegas_k_mismatches`]: randomized, always-correct k-mismatch
//!   search with wild cards.
//! - [`approx_count`]: `1 +- epsilon` estimates of every distance.

pub mod alphabet;
pub mod convolution;
pub mod error;
pub mod exact_count;
pub mod kdet;
pub mod krand;
pub mod pattern_index;
pub mod profile;
pub mod work;

pub use alphabet::{encode, Alphabet, Sequence, WILDCARD};
pub use convolution::{Correlator, MAGNITUDE_BOUND};
pub use error::{Error, Result};
pub use exact_count::{abrahamson_profile, mark, wildcard_profile, PositionTable};
pub use kdet::{
    knapsack_k_mismatches, knapsack_plan, subset_k_mismatches, KnapsackMatcher, KnapsackPlan,
};
pub use krand::{approx_count, las_vegas_k_mismatches, one_mismatch, EstimateProfile, SeededRng};
pub use pattern_index::{MatchStat, SuffixIndex};
pub use profile::{naive_profile, Bound, BoundedReport, DistanceProfile};
pub use work::WorkCounters;
