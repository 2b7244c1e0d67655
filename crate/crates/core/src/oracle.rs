//! Brute-force enumerations, exact distributions and goodness-of-fit tools
//! used as ground truth by the tests.
//!
//! Triangulations are enumerated two ways on purpose: through strings and
//! the bijection, and directly as non-crossing diagonal subsets.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::combinat::{count_strings, total_partial_triangulations};
use crate::error::{Error, Result};
use crate::geometry::PartialTriangulation;
use crate::structure::{admissible_positions, Encoding, Parenthesization};

/// Enumeration size cap for strings.
pub const STRING_CAP: u64 = 1_000_000;
/// Largest n for direct triangulation enumeration.
pub const DIRECT_N_MAX: u64 = 9;
/// Largest n for exact distributions.
pub const DISTRIBUTION_N_MAX: u64 = 8;

/// All balanced parenthesizations with k ≥ 1 pairs, in lexicographic order
/// with '(' first.
pub fn enumerate_parenthesizations(k: usize) -> Vec<Parenthesization> {
    fn rec(open: usize, close: usize, k: usize, cur: &mut Vec<bool>, out: &mut Vec<Parenthesization>) {
        if cur.len() == 2 * k {
            out.push(Parenthesization::new(cur.clone()).expect("generated balanced"));
            return;
        }
        if open < k {
            cur.push(true);
            rec(open + 1, close, k, cur, out);
            cur.pop();
        }
        if close < open {
            cur.push(false);
            rec(open, close + 1, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k >= 1 {
        rec(0, 0, k, &mut Vec::with_capacity(2 * k), &mut out);
    }
    out
}

/// All weak compositions of `total` into `parts` parts.
pub fn enumerate_compositions(total: u64, parts: usize) -> Vec<Vec<u64>> {
    fn rec(left: u64, parts: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if cur.len() + 1 == parts {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for v in 0..=left {
            cur.push(v);
            rec(left - v, parts, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(total, parts, &mut Vec::with_capacity(parts), &mut out);
    out
}

/// Every string of Υ_{k,j}.
pub fn enumerate_strings(k: u64, j: u64) -> Result<Vec<Encoding>> {
    let count = count_strings(k, j)?;
    if count.to_u64().map_or(true, |c| c > STRING_CAP) {
        return Err(Error::CapExceeded(format!("|Y(k={k}, j={j})| = {count} exceeds {STRING_CAP}")));
    }
    let mut out = Vec::new();
    for p in enumerate_parenthesizations(k as usize) {
        let r = admissible_positions(&p);
        for c in enumerate_compositions(j, r) {
            out.push(Encoding::new(p.clone(), c, k + j)?);
        }
    }
    Ok(out)
}

fn crosses(x: (u64, u64), y: (u64, u64)) -> bool {
    (x.0 < y.0 && y.0 < x.1 && x.1 < y.1) || (y.0 < x.0 && x.0 < y.1 && y.1 < x.1)
}

/// Partial triangulations with k parts, found by backtracking over raw
/// non-crossing diagonal subsets.
pub fn enumerate_triangulations_direct(n: u64, k: u64) -> Result<Vec<PartialTriangulation>> {
    if n > DIRECT_N_MAX {
        return Err(Error::CapExceeded(format!("direct enumeration needs n <= {DIRECT_N_MAX}, got {n}")));
    }
    if n < 1 || k < 1 || k > n {
        return Err(Error::OutOfRange(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    let mut cands = Vec::new();
    for a in 0..=n + 1 {
        for b in a + 2..=n + 1 {
            if (a, b) != (0, n + 1) {
                cands.push((a, b));
            }
        }
    }
    fn rec(
        start: usize,
        need: usize,
        cands: &[(u64, u64)],
        cur: &mut Vec<(u64, u64)>,
        n: u64,
        out: &mut Vec<PartialTriangulation>,
    ) {
        if need == 0 {
            out.push(PartialTriangulation::new(n, cur.iter().copied()));
            return;
        }
        for i in start..cands.len() {
            let d = cands[i];
            if cur.iter().all(|&e| !crosses(d, e)) {
                cur.push(d);
                rec(i + 1, need - 1, cands, cur, n, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(0, (k - 1) as usize, &cands, &mut Vec::new(), n, &mut out);
    out.sort();
    Ok(out)
}

/// All partial triangulations of the (n+2)-gon, every k.
pub fn enumerate_all_triangulations(n: u64) -> Result<Vec<PartialTriangulation>> {
    let mut out = Vec::new();
    for k in 1..=n {
        out.extend(enumerate_triangulations_direct(n, k)?);
    }
    Ok(out)
}

/// Exact pmf λ^{|σ|}/Z over every partial triangulation.
#[derive(Debug, Clone)]
pub struct ExactDistribution {
    pub support: Vec<PartialTriangulation>,
    pub probs: Vec<BigRational>,
    index: HashMap<PartialTriangulation, usize>,
}

impl ExactDistribution {
    pub fn index_of(&self, t: &PartialTriangulation) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn probs_f64(&self) -> Vec<f64> {
        self.probs.iter().map(|p| p.to_f64().expect("probability fits f64")).collect()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }
}

pub fn exact_distribution(n: u64, lambda: &BigRational) -> Result<ExactDistribution> {
    if n > DISTRIBUTION_N_MAX {
        return Err(Error::CapExceeded(format!("exact distribution needs n <= {DISTRIBUTION_N_MAX}, got {n}")));
    }
    if !lambda.is_positive() {
        return Err(Error::OutOfRange("lambda must be positive".into()));
    }
    let support = enumerate_all_triangulations(n)?;
    let mut pows = vec![BigRational::one()];
    for _ in 0..n {
        let next = pows.last().expect("nonempty") * lambda;
        pows.push(next);
    }
    let weights: Vec<&BigRational> = support.iter().map(|t| &pows[t.diagonals().len()]).collect();
    let z: BigRational = weights.iter().fold(BigRational::zero(), |acc, w| acc + *w);
    let probs: Vec<BigRational> = weights.into_iter().map(|w| w / &z).collect();
    debug_assert_eq!(
        BigInt::from(support.len()),
        BigInt::from(total_partial_triangulations(n).into_inner())
    );
    let index = support.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    Ok(ExactDistribution { support, probs, index })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareOutcome {
    pub statistic: f64,
    pub dof: u64,
    pub threshold: f64,
    pub pass: bool,
}

/// Pearson goodness of fit; passes iff the statistic is below the
/// `quantile` point of χ² with |support| − 1 degrees of freedom.
pub fn chi_square_test(observed: &[u64], expected: &[f64], total: u64, quantile: f64) -> Result<ChiSquareOutcome> {
    if observed.len() != expected.len() {
        return Err(Error::DegenerateInput(format!("{} observed vs {} expected", observed.len(), expected.len())));
    }
    if observed.len() < 2 || total == 0 {
        return Err(Error::DegenerateInput("need at least two cells and a positive total".into()));
    }
    if expected.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::DegenerateInput("expected probabilities must be positive".into()));
    }
    if !(0.0 < quantile && quantile < 1.0) {
        return Err(Error::DegenerateInput(format!("quantile {quantile} outside (0, 1)")));
    }
    let t = total as f64;
    let statistic = observed
        .iter()
        .zip(expected)
        .map(|(&o, &p)| {
            let e = p * t;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let dof = observed.len() as u64 - 1;
    let threshold = ChiSquared::new(dof as f64).expect("dof >= 1").inverse_cdf(quantile);
    Ok(ChiSquareOutcome { statistic, dof, threshold, pass: statistic < threshold })
}

/// ½ Σ |p − q| over a common indexed support.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::SupportMismatch(format!("{} vs {} outcomes", p.len(), q.len())));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Counts divided by their total.
pub fn empirical(counts: &[u64]) -> Vec<f64> {
    let t: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / t as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::{catalan, count_partial_triangulations};
    use crate::geometry::{encoding_to_triangulation, validate};
    use crate::rng::RandomSource;
    use std::collections::BTreeSet;

    #[test]
    fn parenthesization_counts() {
        for k in 1..=8 {
            assert_eq!(enumerate_parenthesizations(k).len() as u64, catalan(k as u64).to_u64().unwrap());
        }
    }

    #[test]
    fn string_enumeration() {
        assert_eq!(enumerate_strings(1, 0).unwrap().iter().map(|e| e.to_string()).collect::<Vec<_>>(), ["()"]);
        let s: BTreeSet<String> = enumerate_strings(2, 1).unwrap().iter().map(|e| e.to_string()).collect();
        let expect: BTreeSet<String> = ["(0)()", "()(0)", "(0())", "(()0)", "((0))"].map(String::from).into();
        assert_eq!(s, expect);
        assert_eq!(enumerate_strings(3, 1).unwrap().len(), 21);
        for m in 1..=8u64 {
            for j in 0..=6u64 {
                if count_strings(m, j).unwrap().to_u64().unwrap() > 300_000 {
                    continue;
                }
                let v = enumerate_strings(m, j).unwrap();
                let set: BTreeSet<_> = v.iter().collect();
                assert_eq!(set.len(), v.len());
                assert_eq!(count_strings(m, j).unwrap(), v.len() as u64, "m={m} j={j}");
            }
        }
        assert!(matches!(enumerate_strings(12, 6), Err(Error::CapExceeded(_))));
    }

    #[test]
    fn direct_enumeration() {
        assert_eq!(enumerate_triangulations_direct(3, 2).unwrap().len(), 5);
        assert_eq!(enumerate_triangulations_direct(2, 2).unwrap().len(), 2);
        assert_eq!(enumerate_triangulations_direct(4, 4).unwrap().len(), 14);
        for n in 1..=8u64 {
            for k in 1..=n {
                let v = enumerate_triangulations_direct(n, k).unwrap();
                assert!(v.iter().all(|t| validate(t).is_ok()));
                assert_eq!(count_partial_triangulations(n, k).unwrap(), v.len() as u64);
            }
        }
        assert!(enumerate_triangulations_direct(10, 2).is_err());
    }

    #[test]
    fn dual_enumeration_agrees() {
        for n in 1..=7u64 {
            for k in 1..=n {
                let direct: BTreeSet<_> = enumerate_triangulations_direct(n, k).unwrap().into_iter().collect();
                let via: BTreeSet<_> = enumerate_strings(k, n - k)
                    .unwrap()
                    .iter()
                    .map(|e| encoding_to_triangulation(e).unwrap())
                    .collect();
                assert_eq!(direct, via, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn distributions() {
        let r = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        let d = exact_distribution(2, &r(1, 1)).unwrap();
        assert!(d.probs.iter().all(|p| *p == r(1, 3)));
        let d = exact_distribution(2, &r(2, 1)).unwrap();
        let mut ps = d.probs.clone();
        ps.sort();
        assert_eq!(ps, vec![r(1, 5), r(2, 5), r(2, 5)]);
        for n in 1..=6 {
            let d = exact_distribution(n, &r(3, 7)).unwrap();
            let s: BigRational = d.probs.iter().cloned().sum();
            assert_eq!(s, BigRational::one());
            assert_eq!(total_partial_triangulations(n), d.len() as u64);
            for (i, t) in d.support.iter().enumerate() {
                assert_eq!(d.index_of(t), Some(i));
            }
        }
        assert!(exact_distribution(9, &r(1, 1)).is_err());
    }

    #[test]
    fn chi_square_basics() {
        let o = chi_square_test(&[10, 20, 30], &[1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0], 60, 0.999).unwrap();
        assert!(o.statistic.abs() < 1e-12 && o.pass && o.dof == 2);
        assert!((o.threshold - 13.8155).abs() < 1e-3);
        assert!(chi_square_test(&[1, 2], &[0.5], 3, 0.999).is_err());
        assert!(chi_square_test(&[1, 2], &[0.0, 1.0], 3, 0.999).is_err());
        assert!(chi_square_test(&[0, 0], &[0.5, 0.5], 0, 0.999).is_err());
    }

    #[test]
    fn chi_square_calibration_fair_die() {
        let mut passes = 0;
        for seed in 0..100 {
            let mut r = RandomSource::new(seed);
            let mut c = [0u64; 6];
            for _ in 0..6000 {
                c[r.uniform_int(6) as usize] += 1;
            }
            passes += chi_square_test(&c, &[1.0 / 6.0; 6], 6000, 0.999).unwrap().pass as u32;
        }
        assert!(passes >= 99, "{passes}");
    }

    #[test]
    fn chi_square_power_skewed() {
        // face 0 twice as likely as each other face
        let mut r = RandomSource::new(1);
        let mut c = [0u64; 6];
        let n = 100_000;
        for _ in 0..n {
            let x = r.uniform_int(7);
            c[if x == 6 { 0 } else { x as usize }] += 1;
        }
        assert!(!chi_square_test(&c, &[1.0 / 6.0; 6], n, 0.999).unwrap().pass);
    }

    #[test]
    fn tv_basics() {
        assert_eq!(tv_distance(&[0.2, 0.8], &[0.2, 0.8]).unwrap(), 0.0);
        assert_eq!(tv_distance(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 1.0);
        assert!(matches!(tv_distance(&[1.0], &[0.5, 0.5]), Err(Error::SupportMismatch(_))));
    }

    #[test]
    fn compositions() {
        assert_eq!(enumerate_compositions(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(enumerate_compositions(0, 3), vec![vec![0, 0, 0]]);
        assert_eq!(enumerate_compositions(5, 3).len(), 21);
    }
}
