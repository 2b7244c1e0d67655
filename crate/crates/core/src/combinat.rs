//! Exact counts of the combinatorial families: binomials, Catalan numbers,
//! partial triangulations, balanced strings with zeros, Dyck paths by
//! excursion count.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision nonnegative count.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BigCount(BigUint);

impl BigCount {
    pub fn zero() -> Self {
        BigCount(BigUint::zero())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }

    pub fn to_decimal(&self) -> String {
        self.0.to_str_radix(10)
    }

    /// Natural log; `-inf` for zero. Accurate to double precision for any size.
    pub fn ln(&self) -> f64 {
        let bits = self.0.bits();
        if bits == 0 {
            return f64::NEG_INFINITY;
        }
        if bits <= 1000 {
            return self.0.to_f64().unwrap_or(f64::INFINITY).ln();
        }
        let shift = bits - 64;
        let top = (&self.0 >> shift).to_f64().unwrap_or(f64::INFINITY);
        top.ln() + shift as f64 * std::f64::consts::LN_2
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount(v)
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(BigUint::from(v))
    }
}

impl PartialEq<u64> for BigCount {
    fn eq(&self, other: &u64) -> bool {
        self.0 == BigUint::from(*other)
    }
}

/// Divides and panics on a nonzero remainder. A remainder here means a
/// formula was transcribed wrong, so it is treated as an internal bug.
fn exact_div(num: BigUint, den: &BigUint, what: &str) -> BigUint {
    let (q, r) = num.div_rem(den);
    assert!(r.is_zero(), "inexact division in {what}");
    q
}

fn binom_raw(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc = exact_div(acc, &BigUint::from(i + 1), "binomial");
    }
    acc
}

/// C(n, k), zero when k > n.
pub fn binomial(n: u64, k: u64) -> BigCount {
    BigCount(binom_raw(n, k))
}

/// m-th Catalan number C(2m, m)/(m+1).
pub fn catalan(m: u64) -> BigCount {
    BigCount(exact_div(binom_raw(2 * m, m), &BigUint::from(m + 1), "catalan"))
}

/// Number of partial triangulations of the (n+2)-gon into k parts
/// (k−1 diagonals).
pub fn count_partial_triangulations(n: u64, k: u64) -> Result<BigCount> {
    if n < 1 || k < 1 || k > n {
        return Err(Error::OutOfRange(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    let num = binom_raw(n + k, k) * binom_raw(n - 1, k - 1);
    Ok(BigCount(exact_div(num, &BigUint::from(n + 1), "partial triangulation count")))
}

/// Number of strings with m balanced parenthesis pairs and j zeros, each
/// zero enclosed by some pair.
pub fn count_strings(m: u64, j: u64) -> Result<BigCount> {
    if m == 0 {
        return Err(Error::OutOfRange("count_strings needs m >= 1".into()));
    }
    let num = catalan(m).0 * binom_raw(2 * m + j, j) * BigUint::from(m) * BigUint::from(m + 1);
    let den = BigUint::from(m + j) * BigUint::from(m + j + 1);
    Ok(BigCount(exact_div(num, &den, "string count")))
}

/// Dyck paths of semilength m with exactly k returns to the axis.
pub fn count_dyck_with_excursions(m: u64, k: u64) -> Result<BigCount> {
    if m < 1 || k < 1 || k > m {
        return Err(Error::OutOfRange(format!("need 1 <= k <= m, got m={m}, k={k}")));
    }
    let num = BigUint::from(k) * binom_raw(2 * m - k, m);
    Ok(BigCount(exact_div(num, &BigUint::from(2 * m - k), "excursion count")))
}

/// All partial triangulations of the (n+2)-gon (little Schröder number).
pub fn total_partial_triangulations(n: u64) -> BigCount {
    let mut total = BigUint::zero();
    for k in 1..=n {
        let num = binom_raw(n + k, k) * binom_raw(n - 1, k - 1);
        total += exact_div(num, &BigUint::from(n + 1), "partial triangulation count");
    }
    BigCount(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn factorial(n: u64) -> BigUint {
        (1..=n).fold(BigUint::one(), |acc, i| acc * i)
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(9, 0), 1);
        assert_eq!(binomial(0, 0), 1);
        assert_eq!(binomial(3, 4), 0);
        let b = binomial(2000, 1000);
        let f = factorial(2000) / (factorial(1000) * factorial(1000));
        assert_eq!(b.value(), &f);
        assert!((600..=602).contains(&b.to_decimal().len()));
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0), 1);
        assert_eq!(catalan(4), 14);
        // C_{m+1} = Σ C_i C_{m-i}
        let mut c = vec![BigUint::one()];
        for m in 0..12u64 {
            let next: BigUint = (0..=m as usize).map(|i| &c[i] * &c[m as usize - i]).sum();
            c.push(next);
        }
        for (m, v) in c.iter().enumerate() {
            assert_eq!(catalan(m as u64).value(), v);
        }
        assert_eq!(catalan(8), 1430);
    }

    #[test]
    fn partial_triangulation_values() {
        for n in 1..20 {
            assert_eq!(count_partial_triangulations(n, 1).unwrap(), 1);
        }
        assert_eq!(count_partial_triangulations(4, 4).unwrap(), 14);
        assert_eq!(count_partial_triangulations(4, 3).unwrap(), 21);
        assert_eq!(count_partial_triangulations(3, 2).unwrap(), 5);
        assert!(count_partial_triangulations(3, 0).is_err());
        assert!(count_partial_triangulations(3, 4).is_err());
        assert!(count_partial_triangulations(0, 0).is_err());
    }

    #[test]
    fn alternate_form_agrees() {
        // C_k · C(n+k, n−k) · k(k+1) / (n(n+1))
        for n in 1..60u64 {
            for k in 1..=n {
                let num = catalan(k).0 * binom_raw(n + k, n - k) * BigUint::from(k * (k + 1));
                let alt = exact_div(num, &BigUint::from(n * (n + 1)), "alt");
                assert_eq!(count_partial_triangulations(n, k).unwrap().0, alt);
            }
        }
    }

    #[test]
    fn string_counts() {
        assert_eq!(count_strings(1, 0).unwrap(), 1);
        assert_eq!(count_strings(3, 1).unwrap(), 21);
        assert_eq!(count_strings(2, 2).unwrap(), 9);
        assert!(count_strings(0, 3).is_err());
        for n in 1..40 {
            for k in 1..=n {
                assert_eq!(
                    count_strings(k, n - k).unwrap(),
                    count_partial_triangulations(n, k).unwrap()
                );
            }
        }
    }

    #[test]
    fn dyck_excursions() {
        assert_eq!(count_dyck_with_excursions(2, 1).unwrap(), 1);
        assert_eq!(count_dyck_with_excursions(2, 2).unwrap(), 1);
        assert_eq!(count_dyck_with_excursions(3, 1).unwrap(), 2);
        for m in 1..=12 {
            let s: BigUint = (1..=m).map(|k| count_dyck_with_excursions(m, k).unwrap().0).sum();
            assert_eq!(&s, catalan(m).value());
        }
        assert!(count_dyck_with_excursions(2, 3).is_err());
    }

    #[test]
    fn schroeder_totals() {
        let expect = [1u64, 3, 11, 45, 197, 903, 4279, 20793];
        for (i, e) in expect.iter().enumerate() {
            assert_eq!(total_partial_triangulations(i as u64 + 1), *e);
        }
    }

    #[test]
    fn big_ln() {
        let b = binomial(20000, 10000);
        // Stirling: ln C(2m,m) ≈ 2m ln2 − ½ ln(πm)
        let approx = 20000.0 * std::f64::consts::LN_2 - 0.5 * (std::f64::consts::PI * 10000.0).ln();
        assert!((b.ln() - approx).abs() < 1e-4);
        assert_eq!(BigCount::zero().ln(), f64::NEG_INFINITY);
        assert!((BigCount::from(1000u64).ln() - 1000f64.ln()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn pascal_rule(n in 1u64..200, k in 1u64..200) {
            prop_assert_eq!(binom_raw(n, k), binom_raw(n - 1, k - 1) + binom_raw(n - 1, k));
        }

        #[test]
        fn strings_match_triangulations(n in 1u64..300, k in 1u64..300) {
            prop_assume!(k <= n);
            prop_assert_eq!(count_strings(k, n - k).unwrap(), count_partial_triangulations(n, k).unwrap());
        }
    }
}
