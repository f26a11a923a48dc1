//! Exact pair correlation statistics of van der Corput sequences.
//!
//! `F_N(s)` counts the ordered pairs among the first `N` points whose circle
//! distance is at most `s/N`, divided by `N`. This crate evaluates it three
//! ways over exact rationals:
//!
//! * [`pair_count_naive`]: every pair, O(N²);
//! * [`pair_count_sorted`]: sort and sweep, O(N log N);
//! * [`f_closed_form`]: from the binary digits of `N` alone, O(log N), for the
//!   base-2 sequence.
//!
//! [`analysis`] uses the closed form to probe `lim F_N(s)` along subsequences
//! of `N`, which exists exactly for `s <= 1/2`.

pub mod analysis;
pub mod closedform;
mod error;
pub mod exactnum;
pub mod paircount;
pub mod sequence;

pub use analysis::{
    limit_probe, poisson_reference, sweep, sweep_points, CorrelationRecord, Engine, ProbeSeries, RecordStatus,
    SubsequenceKind,
};
pub use closedform::{
    binary_digits, count_a, count_b, decomposition_counts, f_closed_form, BinaryDigits, DecompositionCounts,
};
pub use error::{Error, Result};
pub use exactnum::{circle_distance, ParseRationalError, Rational};
pub use paircount::{pair_count_naive, pair_count_sorted, PairCountResult};
pub use sequence::{radical_inverse, vdc_prefix, PointSet};

pub use num_bigint::BigInt;
