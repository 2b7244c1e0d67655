//! The partition function Z = Σ_k |Ω_{n,k}| λ^{k−1}: exact evaluation and
//! rigorous lower/upper bounds for large n.
//!
//! Bounds come in two flavours. The mid regime (roughly 8/n² ≤ λ < 0.1)
//! approximates the series by Stirling-corrected terms `F(α)` around the
//! maximizer `α_max`. The small regime (λ ≤ 1/n) expands the series in
//! powers of n²λ and truncates after ω terms.

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::combinat::count_partial_triangulations;
use crate::error::{Error, Result};
use crate::logspace::{log_sum_exp, CompensatedSum};

/// Exact summation is used whenever n is at most this.
pub const EXACT_N_MAX: u64 = 10_000;
/// Exact summation is used whenever λ is at least this.
pub const EXACT_LAMBDA_MIN: f64 = 0.1;
/// Mid bounds need λ ≥ MID_SCALE / n².
pub const MID_SCALE: f64 = 8.0;
/// Largest λ the mid bounds accept when called directly.
pub const MID_LAMBDA_MAX: f64 = 0.25;
/// Relative margin added to bound-regime upper estimates by the dispatcher.
pub const UPPER_SAFETY: f64 = 1e-9;
/// Default size cap for [`z_exact_rational`].
pub const DEFAULT_RATIONAL_CAP: u64 = 300;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    n: u64,
    lambda: f64,
}

impl ModelParams {
    pub fn new(n: u64, lambda: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::OutOfRange(format!("n must be >= 1, got {n}")));
        }
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::OutOfRange(format!("lambda must be positive and finite, got {lambda}")));
        }
        Ok(ModelParams { n, lambda })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    Exact,
    Mid,
    SmallL1,
    SmallL2,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Exact => "exact",
            Regime::Mid => "mid",
            Regime::SmallL1 => "small-l1",
            Regime::SmallL2 => "small-l2",
        })
    }
}

/// How the dispatcher picks a regime.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Exact for small n or large λ, bounds otherwise.
    Auto,
    /// Always sum the full series.
    Exact,
    /// Use a bound regime whenever one applies, regardless of n.
    Bounds,
}

/// Natural-log bounds on Z with the regime that produced them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZEstimate {
    pub log_lower: f64,
    pub log_upper: f64,
    pub regime: Regime,
    pub compute_cost_terms: u64,
}

impl ZEstimate {
    fn exact(params: &ModelParams) -> Self {
        let lz = z_exact_log(params);
        ZEstimate { log_lower: lz, log_upper: lz, regime: Regime::Exact, compute_cost_terms: params.n }
    }

    /// Z⁺/Z⁻.
    pub fn ratio(&self) -> f64 {
        (self.log_upper - self.log_lower).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaximizerBracket {
    pub xi_minus: f64,
    pub xi_plus: f64,
    pub x_max: f64,
    pub alpha_max: f64,
}

fn ln_term_ratio(n: u64, k: u64) -> f64 {
    // ln((n+k+2)(n−k−1) / ((k+1)(k+2))), exact integer products when they fit
    let num = (n + k + 2) as u128 * (n - k - 1) as u128;
    let den = (k + 1) as u128 * (k + 2) as u128;
    (num as f64).ln() - (den as f64).ln()
}

/// `ln(|Ω_{n,k+1}| λ^k)` for k = 0..n−1, built by the term-ratio recurrence.
pub fn log_series_terms(params: &ModelParams) -> Vec<f64> {
    let n = params.n;
    let ll = params.lambda.ln();
    let mut out = Vec::with_capacity(n as usize);
    let mut acc = CompensatedSum::new();
    out.push(0.0);
    for k in 0..n.saturating_sub(1) {
        acc.add(ln_term_ratio(n, k));
        acc.add(ll);
        out.push(acc.value());
    }
    out
}

/// ln Z by full summation.
pub fn z_exact_log(params: &ModelParams) -> f64 {
    log_sum_exp(&log_series_terms(params))
}

/// Z as an exact rational, for n up to `cap`.
pub fn z_exact_rational(n: u64, lambda: &BigRational, cap: u64) -> Result<BigRational> {
    if n < 1 {
        return Err(Error::OutOfRange("n must be >= 1".into()));
    }
    if n > cap {
        return Err(Error::CapExceeded(format!("n = {n} exceeds rational cap {cap}")));
    }
    if !lambda.is_positive() {
        return Err(Error::OutOfRange("lambda must be positive".into()));
    }
    let mut z = BigRational::zero();
    let mut pow = BigRational::one();
    for k in 1..=n {
        let c = count_partial_triangulations(n, k)?.into_inner();
        z += BigRational::from_integer(BigInt::from(c)) * &pow;
        pow *= lambda;
    }
    Ok(z)
}

/// f(x) = 1 + λx − n ln x.
pub fn f_aux(x: f64, params: &ModelParams) -> f64 {
    1.0 + params.lambda * x - params.n as f64 * x.ln()
}

/// ln F(α) = (n+½)(ln(1+α) − ln(1−α)) + αn ln((1−α²)λ/α²).
pub fn log_f(alpha: f64, params: &ModelParams) -> f64 {
    let n = params.n as f64;
    let a2 = alpha * alpha;
    (n + 0.5) * (alpha.ln_1p() - (-alpha).ln_1p())
        + alpha * n * ((-a2).ln_1p() + params.lambda.ln() - a2.ln())
}

fn a_plus(n: f64, k: f64) -> f64 {
    1.0 / (12.0 * n) - 1.0 / (12.0 * k + 1.0) - 1.0 / (12.0 * (n - k) + 1.0)
}

fn a_minus(n: f64, k: f64) -> f64 {
    1.0 / (12.0 * n + 1.0) - 1.0 / (12.0 * k) - 1.0 / (12.0 * (n - k))
}

/// Stirling correction exponents (A⁺, A⁻) bracketing ln C(n, k).
pub fn stirling_corrections(n: u64, k: u64) -> Result<(f64, f64)> {
    if k < 1 || k + 1 > n {
        return Err(Error::OutOfRange(format!("need 1 <= k <= n-1, got n={n}, k={k}")));
    }
    Ok((a_plus(n as f64, k as f64), a_minus(n as f64, k as f64)))
}

/// (ξ⁻, ξ⁺) = (exp((1+λ)/n), exp((1+e^{2/n}λ)/n)).
pub fn xi_bracket(params: &ModelParams) -> (f64, f64) {
    let n = params.n as f64;
    let lam = params.lambda;
    (((1.0 + lam) / n).exp(), ((1.0 + (2.0 / n).exp() * lam) / n).exp())
}

/// Root of `f_aux` inside [ξ⁻, ξ⁺] by bisection.
pub fn maximizer(params: &ModelParams) -> Result<MaximizerBracket> {
    if params.n < 4 {
        return Err(Error::RegimeMismatch(format!("maximizer needs n >= 4, got {}", params.n)));
    }
    let (xi_minus, xi_plus) = xi_bracket(params);
    let (f_lo, f_hi) = (f_aux(xi_minus, params), f_aux(xi_plus, params));
    if !(f_lo > 0.0 && f_hi < 0.0) {
        return Err(Error::RegimeMismatch(format!(
            "bracket signs fail: f(xi-)={f_lo}, f(xi+)={f_hi}"
        )));
    }
    let (mut lo, mut hi) = (xi_minus, xi_plus);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f_aux(mid, params) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let x_max = 0.5 * (lo + hi);
    let lx = params.lambda * x_max;
    Ok(MaximizerBracket { xi_minus, xi_plus, x_max, alpha_max: (lx / (1.0 + lx)).sqrt() })
}

fn check_mid(params: &ModelParams) -> Result<()> {
    let n = params.n as f64;
    if params.n < 4 || params.lambda < MID_SCALE / (n * n) || params.lambda > MID_LAMBDA_MAX {
        return Err(Error::RegimeMismatch(format!(
            "mid bounds need n >= 4 and {MID_SCALE}/n^2 <= lambda <= {MID_LAMBDA_MAX} (n={}, lambda={})",
            params.n, params.lambda
        )));
    }
    Ok(())
}

/// ln(2π λ n(n+1)), the common normaliser of the S sums.
fn mid_log_norm(params: &ModelParams) -> f64 {
    let n = params.n as f64;
    (2.0 * PI * params.lambda * n * (n + 1.0)).ln()
}

/// ln M, the bound on the k = n term.
fn mid_log_m(params: &ModelParams, a: f64) -> f64 {
    let n = params.n as f64;
    let lam = params.lambda;
    n * (4.0 * lam).ln() + a - 0.5 * (PI * n).ln() - (lam * (n + 1.0)).ln()
}

fn log_f_corrected(k: u64, params: &ModelParams, corr: fn(f64, f64) -> f64) -> f64 {
    let n = params.n as f64;
    let kf = k as f64;
    log_f(kf / n, params) + corr(n + kf, kf) + corr(n, kf)
}

/// Pieces of the mid-regime upper bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MidUpper {
    pub bracket: MaximizerBracket,
    /// Last index of the truncated sum, ⌊(5/4)α_max n⌋ capped at n−1.
    pub k_cut: u64,
    /// ln of the truncated sum of corrected F terms.
    pub log_core: f64,
    /// ln T from the closed-form tail estimate.
    pub log_tail_closed: f64,
    /// ln of the geometric tail bound, `-inf` if nothing lies past `k_cut`.
    pub log_tail_geometric: f64,
    pub log_m: f64,
    pub log_upper: f64,
    pub terms: u64,
}

impl MidUpper {
    /// ln of the tail term actually used.
    pub fn log_tail(&self) -> f64 {
        self.log_tail_closed.max(self.log_tail_geometric)
    }
}

/// Mid-regime upper bound only; costs O(α_max n) evaluations.
pub fn mid_upper(params: &ModelParams) -> Result<MidUpper> {
    check_mid(params)?;
    let bracket = maximizer(params)?;
    let n = params.n;
    let nf = n as f64;
    let am = bracket.alpha_max;
    let k_cut = ((1.25 * am * nf + 1e-12).floor() as u64).min(n - 1);
    let core: Vec<f64> = (2..=k_cut).map(|k| log_f_corrected(k, params, a_plus)).collect();
    let log_core = log_sum_exp(&core);
    let mut terms = core.len() as u64;

    let log_tail_closed = (8.0 / (am * nf)).ln() + 63.0 / 32.0 * am * nf + 1.6 * am.powi(3) * nf;
    // F(k/n) is log-concave in k on this range, so its ratios past k_cut
    // only shrink and a geometric series dominates the remaining terms.
    let mut log_tail_geometric = f64::NEG_INFINITY;
    if k_cut + 1 <= n - 1 {
        let a1 = log_f((k_cut + 1) as f64 / nf, params);
        let a2 = if k_cut + 2 <= n - 1 { log_f((k_cut + 2) as f64 / nf, params) } else { f64::NEG_INFINITY };
        terms += 2;
        let rho = (a2 - a1).exp();
        if rho >= 1.0 {
            return Err(Error::RegimeMismatch("mid tail is not decreasing past the cut".into()));
        }
        log_tail_geometric = a1 - (-rho).ln_1p();
    }
    let log_tail = log_tail_closed.max(log_tail_geometric);
    let log_m = mid_log_m(params, a_plus(2.0 * nf, nf));
    let log_upper = log_sum_exp(&[0.0, log_m, log_sum_exp(&[log_core, log_tail]) - mid_log_norm(params)]);
    Ok(MidUpper { bracket, k_cut, log_core, log_tail_closed, log_tail_geometric, log_m, log_upper, terms })
}

/// Mid-regime lower bound; sums all n−2 middle terms, so it is O(n).
pub fn mid_lower(params: &ModelParams) -> Result<f64> {
    check_mid(params)?;
    let n = params.n;
    let nf = n as f64;
    let s: Vec<f64> = (2..n).map(|k| log_f_corrected(k, params, a_minus)).collect();
    let log_m = mid_log_m(params, a_minus(2.0 * nf, nf));
    Ok(log_sum_exp(&[0.0, log_m, log_sum_exp(&s) - mid_log_norm(params)]))
}

/// Both mid-regime bounds.
pub fn z_bounds_mid(params: &ModelParams) -> Result<ZEstimate> {
    let up = mid_upper(params)?;
    let lo = mid_lower(params)?;
    Ok(ZEstimate { log_lower: lo, log_upper: up.log_upper, regime: Regime::Mid, compute_cost_terms: up.terms })
}

/// Constants of the small-λ bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallConstants {
    /// Multiplier of ln n in the truncation index ω.
    pub b: f64,
    /// Constant of the per-term correction Δ.
    pub c_r: f64,
}

impl Default for SmallConstants {
    fn default() -> Self {
        SmallConstants { b: 4.0, c_r: 8.0 }
    }
}

/// Truncation index ω = ⌈B ln n + 10 n √λ⌉.
pub fn small_omega(params: &ModelParams, consts: &SmallConstants) -> u64 {
    let n = params.n as f64;
    (consts.b * n.ln() + 10.0 * n * params.lambda.sqrt()).ceil() as u64
}

pub fn z_bounds_small(params: &ModelParams) -> Result<ZEstimate> {
    z_bounds_small_with(params, &SmallConstants::default())
}

/// Small-λ bounds for λ ≤ 1/n.
pub fn z_bounds_small_with(params: &ModelParams, consts: &SmallConstants) -> Result<ZEstimate> {
    let n = params.n;
    let nf = n as f64;
    if n < 2 || params.lambda > 1.0 / nf {
        return Err(Error::RegimeMismatch(format!(
            "small bounds need n >= 2 and lambda <= 1/n (n={n}, lambda={})",
            params.lambda
        )));
    }
    let omega = small_omega(params, consts);
    // terms past j = n−1 would count diagonals the polygon cannot hold
    let top = omega.min(n - 1);
    let lx = (nf * nf * params.lambda).ln();
    let mut l_terms = Vec::with_capacity(top as usize + 1);
    let mut d_terms = Vec::with_capacity(top as usize);
    // ln((n²λ)^j / ((j+1)! j!))
    let mut lt = 0.0;
    for j in 0..=top {
        if j > 0 {
            let jf = j as f64;
            lt += lx - (jf + 1.0).ln() - jf.ln();
            d_terms.push(lt + 3.0 * jf.ln());
        }
        l_terms.push(lt + ((j + 1) as f64 / nf).ln_1p());
    }
    let log_l = (nf / (nf + 1.0)).ln() + log_sum_exp(&l_terms);
    let log_d = (consts.c_r / (nf * (nf + 1.0))).ln() + log_sum_exp(&d_terms);
    let log_tail = 4f64.ln() + omega as f64 * (2.0 - 100f64.ln());
    let rel = (log_d - log_l).exp();
    if rel >= 1.0 {
        return Err(Error::DegenerateBound(format!("L - Delta <= 0 at n={n}, lambda={}", params.lambda)));
    }
    let regime = if params.lambda < MID_SCALE / (nf * nf) { Regime::SmallL2 } else { Regime::SmallL1 };
    Ok(ZEstimate {
        log_lower: log_l + (-rel).ln_1p(),
        log_upper: log_sum_exp(&[log_l, log_tail, log_d]),
        regime,
        compute_cost_terms: top + 1,
    })
}

/// Regime the thresholds select before any fallback.
pub fn select_regime(params: &ModelParams, mode: Mode) -> Regime {
    let n = params.n as f64;
    let lam = params.lambda;
    match mode {
        Mode::Exact => Regime::Exact,
        Mode::Auto if params.n <= EXACT_N_MAX => Regime::Exact,
        _ if lam >= EXACT_LAMBDA_MIN => Regime::Exact,
        _ if lam < MID_SCALE / (n * n) => Regime::SmallL2,
        _ if lam <= 1.0 / n => Regime::SmallL1,
        _ => Regime::Mid,
    }
}

/// Upper estimate for the sampler in [`Mode::Auto`].
pub fn z_upper_dispatch(params: &ModelParams) -> ZEstimate {
    z_upper_with_mode(params, Mode::Auto)
}

/// Upper estimate for the sampler. Bound regimes skip the O(n) lower bound
/// and report the trivial `log_lower = 0` (Z ≥ 1) instead; they also carry a
/// relative margin of [`UPPER_SAFETY`]. Falls back to exact summation when
/// a bound fails or the mid tail term dominates the sum.
pub fn z_upper_with_mode(params: &ModelParams, mode: Mode) -> ZEstimate {
    let margin = UPPER_SAFETY.ln_1p();
    match select_regime(params, mode) {
        Regime::Exact => ZEstimate::exact(params),
        Regime::Mid => match mid_upper(params) {
            Ok(up) if up.log_tail() <= up.log_core => ZEstimate {
                log_lower: 0.0,
                log_upper: up.log_upper + margin,
                regime: Regime::Mid,
                compute_cost_terms: up.terms,
            },
            _ => ZEstimate::exact(params),
        },
        Regime::SmallL1 | Regime::SmallL2 => match z_bounds_small(params) {
            Ok(est) => ZEstimate { log_upper: est.log_upper + margin, ..est },
            Err(_) => ZEstimate::exact(params),
        },
    }
}

/// Both bounds in the selected regime (lower bounds included, so O(n) in the
/// mid regime). Same fallbacks as [`z_upper_with_mode`], without the margin.
pub fn z_estimate(params: &ModelParams, mode: Mode) -> ZEstimate {
    match select_regime(params, mode) {
        Regime::Exact => ZEstimate::exact(params),
        Regime::Mid => match mid_upper(params) {
            Ok(up) if up.log_tail() <= up.log_core => {
                z_bounds_mid(params).unwrap_or_else(|_| ZEstimate::exact(params))
            }
            _ => ZEstimate::exact(params),
        },
        Regime::SmallL1 | Regime::SmallL2 => {
            z_bounds_small(params).unwrap_or_else(|_| ZEstimate::exact(params))
        }
    }
}

/// E[#diagonals] under the model, by full summation.
pub fn expected_diagonals_exact(params: &ModelParams) -> f64 {
    let terms = log_series_terms(params);
    let lz = log_sum_exp(&terms);
    let s: CompensatedSum = terms.iter().enumerate().map(|(k, &t)| k as f64 * (t - lz).exp()).collect();
    s.value()
}
