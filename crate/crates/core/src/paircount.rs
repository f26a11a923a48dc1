//! Direct evaluation of the empiric pair correlation function
//!
//! ```text
//! F_N(s) = (1/N) #{ 1 <= k != l <= N : ‖x_k − x_l‖ <= s/N }
//! ```
//!
//! for an arbitrary [`PointSet`]. Two engines compute the same ordered-pair
//! count: a literal O(N²) enumeration and a sort-and-sweep counter. Both
//! compare exactly; the threshold is inclusive.

use std::ops::{Add, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::{circle_distance_at_most, Rational};
use crate::sequence::PointSet;

/// Outcome of one pair count at scale `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairCountResult {
    /// Number of ordered pairs `(k, l)`, `k != l`, within distance `s/N`.
    pub ordered_pair_count: u64,
    /// `ordered_pair_count / n`.
    pub f_value: Rational,
    pub n: usize,
    pub s: Rational,
}

impl PairCountResult {
    fn new(count: u64, n: usize, s: &Rational) -> Self {
        PairCountResult {
            ordered_pair_count: count,
            f_value: Rational::new(count, n as u64).expect("n > 0"),
            n,
            s: s.clone(),
        }
    }
}

fn check_inputs(pts: &PointSet, s: &Rational) -> Result<()> {
    if pts.is_empty() {
        return Err(Error::Domain("point set is empty".into()));
    }
    if s.is_negative() {
        return Err(Error::Domain(format!("s must be nonnegative, got {s}")));
    }
    Ok(())
}

fn saturated(n: usize, s: &Rational) -> bool {
    // s/N >= 1/2  <=>  2s >= N
    s + s >= Rational::from(n as u64)
}

/// Counts every ordered pair by comparing its circle distance with `s/N`.
pub fn pair_count_naive(pts: &PointSet, s: &Rational) -> Result<PairCountResult> {
    check_inputs(pts, s)?;
    let n = pts.len();
    let threshold = s / &Rational::from(n as u64);
    let points = pts.as_slice();
    let count: u64 = (0..n)
        .into_par_iter()
        .map(|k| {
            let xk = &points[k];
            points
                .iter()
                .enumerate()
                .filter(|&(l, xl)| l != k && circle_distance_at_most(xk, xl, &threshold))
                .count() as u64
        })
        .sum();
    Ok(PairCountResult::new(count, n, s))
}

/// Sorts the points, then for each point counts neighbours inside the closed
/// window `[x − s/N, x + s/N]` on the circle.
///
/// When every denominator divides a common `D < 2^100` the points are mapped
/// to the integer lattice `x·D` and the window to `⌊s·D/N⌋`, which is exact
/// because all distances are then multiples of `1/D`.
pub fn pair_count_sorted(pts: &PointSet, s: &Rational) -> Result<PairCountResult> {
    check_inputs(pts, s)?;
    let n = pts.len();
    if saturated(n, s) {
        return Ok(PairCountResult::new(n as u64 * (n as u64 - 1), n, s));
    }
    let count = match common_denominator(pts) {
        Some(den) => {
            let radius = (s.numer() * BigInt::from(den)).div_floor(&(s.denom() * n));
            let radius = radius.to_i128().expect("radius below D/2");
            let mut keys: Vec<i128> = pts
                .iter()
                .map(|p| {
                    let num = p.numer().to_u128().expect("numerator below denominator");
                    let den_p = p.denom().to_u128().expect("divides D");
                    (num * (den / den_p)) as i128
                })
                .collect();
            keys.sort_unstable();
            window_count(&keys, &(den as i128), &radius)
        }
        None => {
            let mut keys: Vec<Rational> = pts.as_slice().to_vec();
            keys.sort_unstable();
            let radius = s / &Rational::from(n as u64);
            window_count(&keys, &Rational::one(), &radius)
        }
    };
    Ok(PairCountResult::new(count, n, s))
}

const LATTICE_BITS: u64 = 100;

fn common_denominator(pts: &PointSet) -> Option<u128> {
    let mut den = 1u128;
    for p in pts {
        let d = p.denom().to_u128()?;
        if den % d != 0 {
            den = (den / den.gcd(&d)).checked_mul(d)?;
            if den >> LATTICE_BITS != 0 {
                return None;
            }
        }
    }
    Some(den)
}

/// Ordered-pair count over `sorted` keys in `[0, period)` where the window
/// radius is below `period / 2`. The keys are unrolled once in each direction
/// so every window is a contiguous run of the extended array.
fn window_count<T>(sorted: &[T], period: &T, radius: &T) -> u64
where
    T: Ord + Clone,
    for<'a> &'a T: Add<&'a T, Output = T> + Sub<&'a T, Output = T>,
{
    let n = sorted.len();
    let extended: Vec<T> = sorted
        .iter()
        .map(|x| x - period)
        .chain(sorted.iter().cloned())
        .chain(sorted.iter().map(|x| x + period))
        .collect();
    let (mut lo, mut hi) = (0usize, 0usize);
    let mut total = 0u64;
    for x in sorted {
        let low = x - radius;
        let high = x + radius;
        while extended[lo] < low {
            lo += 1;
        }
        if hi < lo {
            hi = lo;
        }
        while hi < extended.len() && extended[hi] <= high {
            hi += 1;
        }
        // the window always contains x itself
        total += (hi - lo - 1) as u64;
    }
    debug_assert!(total <= (n * n.saturating_sub(1)) as u64);
    total
}
