//! Construction of permutation codes by incremental evolutionary search.
//!
//! A permutation code `PA(n, d)` is a set of permutations of `1..=n` whose
//! pairwise Hamming distance is at least `d`. The crate grows such codes one
//! row at a time, using either a steady-state genetic algorithm or uniform
//! random sampling to find each next row, and provides exact bounds and an
//! exact small-instance solver to judge the results.
//!
//! ```
//! use permcode::{run_seeded, Method, SearchConfig};
//!
//! let mut config = SearchConfig::new(5, 5);
//! config.method = Method::Rs;
//! config.budget = 100_000;
//! let record = run_seeded(&config).unwrap();
//! assert!(record.code.is_valid());
//! assert_eq!(record.peak_size, 5);
//! ```

pub mod code;
pub mod combinatorics;
pub mod config;
pub mod driver;
pub mod error;
pub mod experiment;
pub mod fitness;
pub mod oracle;
pub mod perm;
pub mod search;
pub mod variation;

pub use code::PermutationCode;
pub use combinatorics::{known_best, BoundsReport, KnownBest};
pub use config::{CoolingClock, Method, Policy, PolicyKind, SearchConfig};
pub use driver::{run, run_seeded, Event, EventKind, RunRecord};
pub use error::{Error, Result};
pub use experiment::{ExperimentPlan, RunRow, Variant};
pub use fitness::FitnessKind;
pub use perm::{hamming_distance, Permutation};
pub use variation::{Crossover, Mutation, OperatorPool};
