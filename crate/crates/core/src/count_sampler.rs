//! Exact sampling of the diagonal count.
//!
//! Each round walks k = 0, 1, … and stops at k with probability p_k, where
//! the p_k are chosen so that the round ends at k with probability
//! |Ω_{n,k+1}| λ^k / Z⁺. A round that reaches k = n−1 without stopping is
//! rejected and restarted; rounds succeed with probability Z/Z⁺.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinat::count_partial_triangulations;
use crate::error::{Error, Result};
use crate::logspace::CompensatedSum;
use crate::partition::{log_series_terms, ModelParams, ZEstimate};
use crate::rng::RandomSource;

/// Largest n accepted by the exact-rational sampler.
pub const RATIONAL_N_MAX: u64 = 30;

/// Probabilities this far above 1 count as clamp events; smaller overshoot
/// is ordinary rounding and is capped silently.
pub const CLAMP_REPORT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DiagonalCountSample {
    /// Number of diagonals drawn, in [0, n−1].
    pub diagonals: u64,
    /// Rounds until acceptance (1 when the first round succeeds).
    pub rounds_used: u64,
    /// Stop/continue coin flips across all rounds.
    pub iterations_total: u64,
}

/// The exact pmf of the diagonal count, given `zlog = ln Z`.
pub fn pi_perp_pmf(params: &ModelParams, zlog: f64) -> Vec<f64> {
    log_series_terms(params).into_iter().map(|t| (t - zlog).exp()).collect()
}

/// Generator of p_0 = 1/Z⁺ and the O(1) recurrence
/// p_{k+1} = (n+k+2)(n−k−1)/((k+1)(k+2)) · λ p_k/(1−p_k), kept in logs.
#[derive(Debug, Clone)]
pub struct PSequence {
    n: u64,
    ln_lambda: f64,
    next_k: u64,
    log_p: f64,
    p: f64,
    clamp_events: u64,
}

impl PSequence {
    pub fn new(params: &ModelParams, log_z_upper: f64) -> Self {
        PSequence {
            n: params.n(),
            ln_lambda: params.lambda().ln(),
            next_k: 0,
            log_p: -log_z_upper,
            p: 0.0,
            clamp_events: 0,
        }
    }

    /// Index of the next emission.
    pub fn next_index(&self) -> u64 {
        self.next_k
    }

    pub fn clamp_events(&self) -> u64 {
        self.clamp_events
    }

    /// p_k for the next k, or `None` once k would exceed n−1.
    pub fn next_p(&mut self) -> Option<f64> {
        let k = self.next_k;
        if k >= self.n {
            return None;
        }
        if k > 0 {
            let j = k - 1;
            if self.p >= 1.0 {
                self.log_p = 0.0;
            } else {
                let num = (self.n + j + 2) as u128 * (self.n - j - 1) as u128;
                let den = (j + 1) as u128 * (j + 2) as u128;
                self.log_p += (num as f64).ln() - (den as f64).ln() + self.ln_lambda - (-self.p).ln_1p();
            }
        }
        let mut p = self.log_p.exp();
        if p > 1.0 {
            if p > 1.0 + CLAMP_REPORT_SLACK {
                self.clamp_events += 1;
            }
            p = 1.0;
            self.log_p = 0.0;
        }
        self.p = p;
        self.next_k += 1;
        Some(p)
    }
}

/// Reusable sampler: the p_k are computed lazily once and shared by all
/// draws with the same Z⁺.
#[derive(Debug, Clone)]
pub struct DiagonalCountSampler {
    seq: PSequence,
    probs: Vec<f64>,
    z_upper: ZEstimate,
}

impl DiagonalCountSampler {
    pub fn new(params: &ModelParams, z_upper: ZEstimate) -> Self {
        DiagonalCountSampler { seq: PSequence::new(params, z_upper.log_upper), probs: Vec::new(), z_upper }
    }

    pub fn z_upper(&self) -> &ZEstimate {
        &self.z_upper
    }

    pub fn clamp_events(&self) -> u64 {
        self.seq.clamp_events()
    }

    fn p(&mut self, k: usize) -> Option<f64> {
        while self.probs.len() <= k {
            self.probs.push(self.seq.next_p()?);
        }
        Some(self.probs[k])
    }

    pub fn sample(&mut self, rng: &mut RandomSource) -> DiagonalCountSample {
        let mut rounds = 1;
        let mut iterations = 0;
        loop {
            let mut k = 0;
            while let Some(p) = self.p(k) {
                iterations += 1;
                if rng.uniform_real() < p {
                    return DiagonalCountSample { diagonals: k as u64, rounds_used: rounds, iterations_total: iterations };
                }
                k += 1;
            }
            rounds += 1;
        }
    }
}

/// One draw from a fresh sampler.
pub fn sample_diagonal_count(params: &ModelParams, z_upper: ZEstimate, rng: &mut RandomSource) -> DiagonalCountSample {
    DiagonalCountSampler::new(params, z_upper).sample(rng)
}

/// Exact-rational variant: every p_k is an exact rational and each coin is
/// flipped by lazy bit comparison. `z_upper` must be at least Z.
pub fn sample_diagonal_count_rational(
    n: u64,
    lambda: &BigRational,
    z_upper: &BigRational,
    rng: &mut RandomSource,
) -> Result<DiagonalCountSample> {
    if n < 1 || n > RATIONAL_N_MAX {
        return Err(Error::OutOfRange(format!("rational sampler needs 1 <= n <= {RATIONAL_N_MAX}, got {n}")));
    }
    if !lambda.is_positive() || !z_upper.is_positive() {
        return Err(Error::OutOfRange("lambda and z_upper must be positive".into()));
    }
    let mut probs = Vec::with_capacity(n as usize);
    let mut remaining = z_upper.clone();
    let mut pow = BigRational::one();
    for k in 0..n {
        let c = count_partial_triangulations(n, k + 1)?.into_inner();
        let t = BigRational::from_integer(BigInt::from(c)) * &pow;
        if t > remaining {
            return Err(Error::OutOfRange("z_upper is below Z".into()));
        }
        let p = &t / &remaining;
        remaining -= t;
        pow *= lambda;
        probs.push(p);
    }
    let mut rounds = 1;
    let mut iterations = 0;
    loop {
        for (k, p) in probs.iter().enumerate() {
            iterations += 1;
            if !p.is_zero() && rng.bernoulli_rational(p) {
                return Ok(DiagonalCountSample { diagonals: k as u64, rounds_used: rounds, iterations_total: iterations });
            }
        }
        rounds += 1;
    }
}

/// Σ_k p_k Π_{j<k}(1−p_j), the per-round success probability implied by
/// the emitted sequence.
pub fn round_success_probability(params: &ModelParams, log_z_upper: f64) -> f64 {
    let mut seq = PSequence::new(params, log_z_upper);
    let mut survive = 1.0;
    let mut s = CompensatedSum::new();
    while let Some(p) = seq.next_p() {
        s.add(p * survive);
        survive *= 1.0 - p;
    }
    s.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{z_exact_log, z_exact_rational, Regime};

    fn p(n: u64, l: f64) -> ModelParams {
        ModelParams::new(n, l).unwrap()
    }

    fn exact(params: &ModelParams) -> ZEstimate {
        let lz = z_exact_log(params);
        ZEstimate { log_lower: lz, log_upper: lz, regime: Regime::Exact, compute_cost_terms: params.n() }
    }

    #[test]
    fn pmf_values() {
        let q = p(3, 1.0);
        let v = pi_perp_pmf(&q, z_exact_log(&q));
        for (a, b) in v.iter().zip([1.0 / 11.0, 5.0 / 11.0, 5.0 / 11.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        let q = p(2, 1.0);
        let v = pi_perp_pmf(&q, z_exact_log(&q));
        assert!((v[0] - 1.0 / 3.0).abs() < 1e-15 && (v[1] - 2.0 / 3.0).abs() < 1e-15);
        for (n, l) in [(50u64, 0.3), (1000, 0.01), (20_000, 1e-4), (7, 100.0)] {
            let q = p(n, l);
            let v = pi_perp_pmf(&q, z_exact_log(&q));
            assert_eq!(v.len(), n as usize);
            assert!(v.iter().all(|&x| x >= 0.0));
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn p0_is_inverse_z() {
        let mut s = PSequence::new(&p(2, 1.0), 3f64.ln());
        assert!((s.next_p().unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!((s.next_p().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(s.next_p(), None);
    }

    #[test]
    fn sequence_consistency() {
        for (n, l, slack) in [(60u64, 0.3, 1.0), (80, 1.0, 1.5), (200, 0.05, 3.0)] {
            let q = p(n, l);
            let lzu = z_exact_log(&q) + f64::ln(slack);
            let mut s = PSequence::new(&q, lzu);
            let mut survive = 1.0;
            for k in 0..=50u64 {
                let pk = s.next_p().unwrap();
                let lhs = pk * survive;
                let rhs = (count_partial_triangulations(n, k + 1).unwrap().ln() + k as f64 * l.ln() - lzu).exp();
                assert!((lhs - rhs).abs() <= 1e-9 * rhs, "n={n} k={k}: {lhs} vs {rhs}");
                survive *= 1.0 - pk;
            }
        }
    }

    #[test]
    fn success_probability_is_z_over_zplus() {
        let q = p(40, 0.7);
        let lz = z_exact_log(&q);
        for c in [1.0, 1.5, 3.0] {
            let r = round_success_probability(&q, lz + f64::ln(c));
            assert!((r - 1.0 / c).abs() < 1e-10, "c={c}: {r}");
        }
    }

    #[test]
    fn exact_z_means_one_round() {
        let q = p(5, 2.0);
        let mut s = DiagonalCountSampler::new(&q, exact(&q));
        let mut r = RandomSource::new(8);
        for _ in 0..10_000 {
            let d = s.sample(&mut r);
            assert_eq!(d.rounds_used, 1);
            assert!(d.diagonals < 5);
            assert!(d.iterations_total >= 1);
        }
        assert_eq!(s.clamp_events(), 0);
    }

    #[test]
    fn deterministic_per_seed() {
        let q = p(30, 0.4);
        let z = exact(&q);
        let draw = |seed| {
            let mut r = RandomSource::new(seed);
            let mut s = DiagonalCountSampler::new(&q, z);
            (0..200).map(|_| s.sample(&mut r)).collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
        assert_ne!(draw(5), draw(6));
    }

    #[test]
    fn rational_sampler_matches_pmf() {
        let lam = BigRational::new(1.into(), 1.into());
        let z = z_exact_rational(3, &lam, 300).unwrap();
        let zu = &z * BigRational::new(3.into(), 2.into());
        let mut r = RandomSource::new(12);
        let mut c = [0u64; 3];
        let mut rounds = 0u64;
        let draws = 60_000u64;
        for _ in 0..draws {
            let d = sample_diagonal_count_rational(3, &lam, &zu, &mut r).unwrap();
            c[d.diagonals as usize] += 1;
            rounds += d.rounds_used;
        }
        let expect = [1.0 / 11.0, 5.0 / 11.0, 5.0 / 11.0];
        for (o, e) in c.iter().zip(expect) {
            let sd = (draws as f64 * e * (1.0 - e)).sqrt();
            assert!((*o as f64 - draws as f64 * e).abs() < 4.0 * sd, "{c:?}");
        }
        let mean = rounds as f64 / draws as f64;
        assert!((mean - 1.5).abs() < 0.03, "{mean}");
        assert!(sample_diagonal_count_rational(31, &lam, &zu, &mut r).is_err());
        let low = BigRational::new(1.into(), 1.into());
        assert!(sample_diagonal_count_rational(3, &lam, &low, &mut r).is_err());
    }

    #[test]
    fn huge_log_z_does_not_underflow() {
        let q = p(20_000, 0.05);
        let z = exact(&q);
        assert!(z.log_upper > 800.0);
        let mut s = DiagonalCountSampler::new(&q, z);
        let mut r = RandomSource::new(1);
        let d = s.sample(&mut r);
        assert_eq!(d.rounds_used, 1);
        let mean = expected(&q);
        assert!((d.diagonals as f64 - mean).abs() < 0.2 * mean);
    }

    fn expected(q: &ModelParams) -> f64 {
        crate::partition::expected_diagonals_exact(q)
    }
}
