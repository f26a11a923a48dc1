//! Van der Corput sequences via the radical-inverse function.
//!
//! Indexing starts at one with `x_1 = 0` and `x_i = g_b(i - 1)` for `i >= 2`.
//! Since `g_b(0) = 0` this is simply `x_i = g_b(i - 1)` for every `i`.

use std::ops::Index;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactnum::Rational;

/// An ordered, finite list of points in `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PointSet {
    points: Vec<Rational>,
}

impl PointSet {
    /// Fails if any point lies outside `[0, 1)`.
    pub fn new(points: Vec<Rational>) -> Result<Self> {
        let one = Rational::one();
        if let Some(bad) = points.iter().find(|p| p.is_negative() || **p >= one) {
            return Err(Error::Domain(format!("point {bad} is outside [0, 1)")));
        }
        Ok(PointSet { points })
    }

    /// Reduces every value mod 1 into `[0, 1)`.
    pub fn from_reduced(values: impl IntoIterator<Item = Rational>) -> Self {
        PointSet {
            points: values.into_iter().map(|v| v.fract()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn as_slice(&self) -> &[Rational] {
        &self.points
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rational> {
        self.points.iter()
    }

    /// The first `n` points (all of them if `n >= len`).
    pub fn prefix(&self, n: usize) -> PointSet {
        PointSet {
            points: self.points[..n.min(self.len())].to_vec(),
        }
    }

    /// Every point shifted by `t` on the circle.
    pub fn translate(&self, t: &Rational) -> PointSet {
        PointSet::from_reduced(self.points.iter().map(|p| p + t))
    }

    pub fn into_vec(self) -> Vec<Rational> {
        self.points
    }
}

impl Index<usize> for PointSet {
    type Output = Rational;

    fn index(&self, i: usize) -> &Rational {
        &self.points[i]
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a Rational;
    type IntoIter = std::slice::Iter<'a, Rational>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

fn check_base(base: u64) -> Result<()> {
    if base < 2 {
        return Err(Error::Domain(format!("base must be at least 2, got {base}")));
    }
    Ok(())
}

/// `g_b(n)`: mirrors the base-`b` digits of `n` across the radix point.
pub fn radical_inverse(n: u64, base: u64) -> Result<Rational> {
    check_base(base)?;
    Ok(radical_inverse_unchecked(n, base))
}

fn radical_inverse_unchecked(mut n: u64, base: u64) -> Rational {
    if n == 0 {
        return Rational::zero();
    }
    // Horner over the digits, least significant first: num / base^digits.
    let b = BigInt::from(base);
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    while n > 0 {
        num = num * &b + (n % base);
        den *= &b;
        n /= base;
    }
    Rational::new(num, den).expect("positive denominator")
}

/// The first `n` points `[x_1, ..., x_n]` of the base-`base` van der Corput sequence.
pub fn vdc_prefix(n: usize, base: u64) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::Domain("prefix length must be at least 1".into()));
    }
    check_base(base)?;
    if base == 2 {
        return Ok(vdc2_prefix(n));
    }
    let points = (0..n as u64).map(|i| radical_inverse_unchecked(i, base)).collect();
    Ok(PointSet { points })
}

/// Base-2 prefix built by bit reversal over the block denominator `2^(M+1)`.
fn vdc2_prefix(n: usize) -> PointSet {
    let bits = usize::BITS - (n - 1).leading_zeros();
    let den = BigInt::one() << bits;
    let points = (0..n as u64)
        .map(|i| {
            let rev = if bits == 0 { 0 } else { i.reverse_bits() >> (64 - bits) };
            Rational::new(rev, den.clone()).expect("positive denominator")
        })
        .collect();
    PointSet { points }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn rs(v: &[&str]) -> Vec<Rational> {
        v.iter().map(|s| r(s)).collect()
    }

    #[test]
    fn radical_inverse_examples() {
        assert_eq!(radical_inverse(0, 2).unwrap(), r("0"));
        assert_eq!(radical_inverse(6, 2).unwrap(), r("3/8"));
        assert_eq!(radical_inverse(5, 3).unwrap(), r("7/9"));
        assert!(radical_inverse(5, 1).is_err());
        assert!(radical_inverse(5, 0).is_err());
    }

    #[test]
    fn prefix_examples() {
        assert_eq!(vdc_prefix(1, 2).unwrap().into_vec(), rs(&["0"]));
        assert_eq!(
            vdc_prefix(8, 2).unwrap().into_vec(),
            rs(&["0", "1/2", "1/4", "3/4", "1/8", "5/8", "3/8", "7/8"])
        );
        assert_eq!(vdc_prefix(4, 3).unwrap().into_vec(), rs(&["0", "1/3", "2/3", "1/9"]));
        assert!(vdc_prefix(0, 2).is_err());
        assert!(vdc_prefix(3, 1).is_err());
    }

    #[test]
    fn base2_fast_path_matches_radical_inverse() {
        for n in [1usize, 2, 3, 7, 64, 65, 1000] {
            let fast = vdc_prefix(n, 2).unwrap();
            for (i, p) in fast.iter().enumerate() {
                assert_eq!(*p, radical_inverse(i as u64, 2).unwrap(), "index {i}");
            }
        }
    }

    #[test]
    fn large_index_stays_in_unit_interval() {
        let x = radical_inverse(u64::MAX, 2).unwrap();
        assert!(x < Rational::one());
        assert_eq!(x, Rational::one() - Rational::new(1, BigInt::one() << 64).unwrap());
        let y = radical_inverse(u64::MAX, 10).unwrap();
        assert!(y < Rational::one() && !y.is_negative());
    }

    #[test]
    fn point_set_validation() {
        assert!(PointSet::new(rs(&["0", "1/2"])).is_ok());
        assert!(PointSet::new(rs(&["1"])).is_err());
        assert!(PointSet::new(rs(&["-1/2"])).is_err());
        let reduced = PointSet::from_reduced(rs(&["3/2", "-1/4", "2"]));
        assert_eq!(reduced.into_vec(), rs(&["1/2", "3/4", "0"]));
    }
}
