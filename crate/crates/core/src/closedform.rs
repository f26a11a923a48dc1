//! Closed-form pair correlation of the base-2 van der Corput sequence.
//!
//! With `N = Σ_{k=0}^{M} e_k 2^k`, the ordered-pair count is
//!
//! ```text
//! N·F_N(s) = Σ_k e_k ( ⌊s·2^k/N⌋ + Σ_{l=k+1}^{M} e_l · 2·⌈⌊s·2^(l+1)/N⌋ / 2⌉ ) · 2^(k+1)
//! ```
//!
//! which costs O(log N) big-integer operations and needs none of the points.
//! The expression is checked against the pair-counting oracle for `s < N/2`;
//! beyond that the true count saturates at `N(N−1)` while the formula keeps
//! growing, so [`f_closed_form`] refuses those inputs.
//!
//! The split of the pairs among the first `2^M` indices (block A), the
//! remaining `N − 2^M` indices (block C) and the cross pairs (B) is exposed by
//! [`decomposition_counts`], enumerated directly from the points, together with
//! the closed counts [`count_a`] and [`count_b`] for A and B.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exactnum::Rational;
use crate::sequence::vdc_prefix;

/// Binary digits `e_0, ..., e_M` of a positive integer, least significant first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryDigits {
    digits: Vec<u8>,
}

impl BinaryDigits {
    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    /// Index `M` of the leading one.
    pub fn m(&self) -> usize {
        self.digits.len() - 1
    }

    /// `e_l`, zero beyond the leading digit.
    pub fn digit(&self, l: usize) -> u8 {
        self.digits.get(l).copied().unwrap_or(0)
    }

    pub fn value(&self) -> u64 {
        self.digits.iter().rev().fold(0u64, |acc, &e| (acc << 1) | e as u64)
    }
}

pub fn binary_digits(n: u64) -> Result<BinaryDigits> {
    if n == 0 {
        return Err(Error::Domain("binary digits need N >= 1".into()));
    }
    let len = (u64::BITS - n.leading_zeros()) as usize;
    let digits = (0..len).map(|k| ((n >> k) & 1) as u8).collect();
    Ok(BinaryDigits { digits })
}

/// `⌊s·2^k/N⌋ · 2^(k+1)`: ordered pairs at distance `<= s/N` among `2^k`
/// equispaced points, valid while the window does not wrap.
pub fn count_a(s: &Rational, k: usize, n: u64) -> BigInt {
    s.floor_scaled(k, &BigInt::from(n)) << (k + 1)
}

/// `⌈⌊s·2^(k+1)/N_eff⌋ / 2⌉ · block2_size · 2`: ordered cross pairs between
/// `2^k` equispaced points and `block2_size` odd multiples of `2^-(k+1)`.
pub fn count_b(s: &Rational, k: usize, n_eff: u64, block2_size: u64) -> BigInt {
    half_ceil(&s.floor_scaled(k + 1, &BigInt::from(n_eff))) * block2_size * 2u32
}

fn half_ceil(x: &BigInt) -> BigInt {
    x.div_ceil(&BigInt::from(2))
}

fn check_s(s: &Rational) -> Result<()> {
    if s.is_negative() {
        return Err(Error::Domain(format!("s must be nonnegative, got {s}")));
    }
    Ok(())
}

/// `s < N/2`, the range on which the closed form is validated.
pub fn in_validated_domain(n: u64, s: &Rational) -> bool {
    s + s < Rational::from(n)
}

/// `F_N(s)` of the base-2 van der Corput sequence from the binary digits of `N`.
///
/// Requires `0 <= s < N/2`; `N = 1` yields zero.
pub fn f_closed_form(n: u64, s: &Rational) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Domain("N must be at least 1".into()));
    }
    check_s(s)?;
    if n == 1 {
        return Ok(Rational::zero());
    }
    if !in_validated_domain(n, s) {
        return Err(Error::OutsideValidatedDomain { n, s: s.clone() });
    }
    Ok(Rational::new(closed_form_count(n, s), n).expect("n > 0"))
}

/// The closed-form sum with no domain guard and no `N = 1` special case.
///
/// Used to map where the formula departs from the true count; prefer
/// [`f_closed_form`] everywhere else.
pub fn f_closed_form_unchecked(n: u64, s: &Rational) -> Rational {
    Rational::new(closed_form_count(n, s), n).expect("n > 0")
}

/// `N·F_N(s)`, in O(M) by accumulating the inner sums from the top digit down.
fn closed_form_count(n: u64, s: &Rational) -> BigInt {
    let digits = binary_digits(n).expect("n > 0");
    let big_n = BigInt::from(n);
    let mut total = BigInt::zero();
    // Σ_{l>k} e_l · 2⌈⌊s·2^(l+1)/N⌋/2⌉
    let mut tail = BigInt::zero();
    for k in (0..=digits.m()).rev() {
        if digits.digit(k) == 1 {
            let inner = s.floor_scaled(k, &big_n) + &tail;
            total += inner << (k + 1);
            tail += half_ceil(&s.floor_scaled(k + 1, &big_n)) * 2u32;
        }
    }
    total
}

/// `N·F_N(s)` by the literal double sum with the inner index running to
/// `inner_upper` (`e_l = 0` past the leading digit). Any bound `>= M` gives
/// the same value.
pub fn closed_form_count_with_inner_bound(n: u64, s: &Rational, inner_upper: usize) -> Result<BigInt> {
    let digits = binary_digits(n)?;
    check_s(s)?;
    let big_n = BigInt::from(n);
    let mut total = BigInt::zero();
    for k in 0..=digits.m() {
        if digits.digit(k) == 0 {
            continue;
        }
        let mut inner = s.floor_scaled(k, &big_n);
        for l in k + 1..=inner_upper {
            if digits.digit(l) == 1 {
                inner += half_ceil(&s.floor_scaled(l + 1, &big_n)) * 2u32;
            }
        }
        total += inner << (k + 1);
    }
    Ok(total)
}

/// Brute-force sizes of the three index blocks of the pair count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionCounts {
    /// Ordered pairs with both indices in `1..=2^M`.
    pub a_count: u64,
    /// Ordered pairs `(i, j)` with `i <= 2^M < j`; appears twice in the total.
    pub b_count: u64,
    /// Ordered pairs with both indices in `2^M+1..=N`.
    pub c_count: u64,
    pub m: usize,
}

impl DecompositionCounts {
    /// `a + 2b + c`, the full ordered-pair count.
    pub fn total(&self) -> u64 {
        self.a_count + 2 * self.b_count + self.c_count
    }
}

/// Enumerates the three blocks pair by pair over the actual sequence points.
/// Independent of [`count_a`] / [`count_b`].
pub fn decomposition_counts(n: u64, s: &Rational) -> Result<DecompositionCounts> {
    if n < 2 {
        return Err(Error::Domain(format!("decomposition needs N >= 2, got {n}")));
    }
    check_s(s)?;
    if !in_validated_domain(n, s) {
        return Err(Error::OutsideValidatedDomain { n, s: s.clone() });
    }
    let len = n
        .to_usize()
        .ok_or_else(|| Error::Domain(format!("N = {n} too large to enumerate")))?;
    let pts = vdc_prefix(len, 2)?;
    let m = (u64::BITS - 1 - n.leading_zeros()) as usize;
    let split = 1usize << m;

    // Every point is a multiple of 2^-(M+1); compare distances on that lattice.
    let den = BigInt::from(1u8) << (m + 1);
    let keys: Vec<u128> = pts
        .iter()
        .map(|p| (p.numer() * (&den / p.denom())).to_u128().expect("below 2^64"))
        .collect();
    let period = den.to_u128().expect("at most 2^64");
    let radius = (s.numer() * &den).div_floor(&(s.denom() * BigInt::from(n)));
    let radius = radius.to_u128().expect("below period / 2");
    let close = |i: usize, j: usize| {
        let d = keys[i].abs_diff(keys[j]);
        d.min(period - d) <= radius
    };
    let count = |rows: std::ops::Range<usize>, cols: std::ops::Range<usize>| -> u64 {
        rows.into_par_iter()
            .map(|i| cols.clone().filter(|&j| i != j && close(i, j)).count() as u64)
            .sum()
    };

    let a_count = count(0..split, 0..split);
    let b_count = count(0..split, split..len);
    let c_count = count(split..len, split..len);
    Ok(DecompositionCounts {
        a_count,
        b_count,
        c_count,
        m,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn int(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn binary_digit_examples() {
        assert_eq!(binary_digits(1).unwrap().digits(), &[1]);
        assert_eq!(binary_digits(5).unwrap().digits(), &[1, 0, 1]);
        assert_eq!(binary_digits(6).unwrap().digits(), &[0, 1, 1]);
        assert_eq!(binary_digits(6).unwrap().m(), 2);
        assert_eq!(binary_digits(u64::MAX).unwrap().value(), u64::MAX);
        assert!(binary_digits(0).is_err());
    }

    #[test]
    fn count_a_examples() {
        assert_eq!(count_a(&r("1"), 2, 4), int(8));
        assert_eq!(count_a(&r("0"), 7, 1000), int(0));
        assert_eq!(count_a(&r("1"), 0, 3), int(0));
    }

    #[test]
    fn count_b_examples() {
        assert_eq!(count_b(&r("1"), 1, 3, 1), int(2));
        assert_eq!(count_b(&r("0"), 5, 77, 13), int(0));
        assert_eq!(count_b(&r("1"), 2, 5, 1), int(2));
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(f_closed_form(3, &r("1")).unwrap(), r("4/3"));
        assert_eq!(f_closed_form(5, &r("1")).unwrap(), r("4/5"));
        for m in 2..12u32 {
            let n = 1u64 << m;
            for (s, l) in [("1", 2), ("3/2", 2), ("2", 4), ("5/2", 4)] {
                if r(s) < Rational::from(n / 2) {
                    assert_eq!(
                        f_closed_form(n, &r(s)).unwrap(),
                        Rational::from(l as u64),
                        "N = {n}, s = {s}"
                    );
                }
            }
            assert_eq!(f_closed_form(n + 1, &r("1")).unwrap(), Rational::new(4, n + 1).unwrap());
        }
        for n in 2..100 {
            assert_eq!(f_closed_form(n, &r("1/2")).unwrap(), r("0"));
        }
    }

    #[test]
    fn closed_form_domain() {
        assert_eq!(f_closed_form(1, &r("7")).unwrap(), r("0"));
        assert!(matches!(
            f_closed_form(2, &r("1")),
            Err(Error::OutsideValidatedDomain { .. })
        ));
        assert!(matches!(
            f_closed_form(9, &r("9/2")),
            Err(Error::OutsideValidatedDomain { .. })
        ));
        assert!(f_closed_form(9, &r("89/20")).is_ok());
        assert!(matches!(f_closed_form(4, &r("-1/4")), Err(Error::Domain(_))));
        assert!(f_closed_form(0, &r("0")).is_err());
        // the unguarded sum overshoots the true value F_2(1) = 1
        assert_eq!(f_closed_form_unchecked(2, &r("1")), r("2"));
    }

    #[test]
    fn near_u64_max_does_not_overflow() {
        let n = u64::MAX - 12345;
        let f = f_closed_form(n, &r("13/10")).unwrap();
        assert!(f >= r("0"));
        let via_double_sum = closed_form_count_with_inner_bound(n, &r("13/10"), 63).unwrap();
        assert_eq!(f, Rational::new(via_double_sum, n).unwrap());
    }

    #[test]
    fn decomposition_examples() {
        let d = decomposition_counts(3, &r("1")).unwrap();
        assert_eq!((d.a_count, d.b_count, d.c_count, d.m), (0, 2, 0, 1));
        assert_eq!(d.total(), 4);

        let d = decomposition_counts(16, &r("3")).unwrap();
        assert_eq!((d.b_count, d.c_count), (0, 0));
        assert_eq!(
            Rational::new(d.a_count, 16u64).unwrap(),
            f_closed_form(16, &r("3")).unwrap()
        );

        let d = decomposition_counts(5, &r("1")).unwrap();
        assert_eq!(d.total(), 4);

        assert!(decomposition_counts(1, &r("0")).is_err());
    }
}
