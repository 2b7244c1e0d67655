//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::combinat::{count_partial_triangulations, total_partial_triangulations};
use crate::count_sampler::{pi_perp_pmf, DiagonalCountSampler};
use crate::geometry::{encoding_to_triangulation, triangulation_to_string, validate, TriangulationSampler};
use crate::oracle::{
    chi_square_test, enumerate_all_triangulations, enumerate_strings, enumerate_triangulations_direct,
    exact_distribution, tv_distance, empirical,
};
use crate::partition::{
    z_bounds_small_with, z_estimate, z_exact_log, z_upper_with_mode, Mode, ModelParams, Regime, SmallConstants,
};
use crate::rng::RandomSource;
use crate::structure::{floyd_subset, remy_tree, tree_to_parens};

/// λ as typed, its exact rational value and the nearest double.
#[derive(Debug, Clone, PartialEq)]
pub struct Lambda {
    pub text: String,
    pub rational: BigRational,
    pub value: f64,
}

impl FromStr for Lambda {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        let rational = match t.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| format!("bad numerator in {t:?}"))?;
                let q: BigInt = q.trim().parse().map_err(|_| format!("bad denominator in {t:?}"))?;
                if q.is_zero() {
                    return Err("zero denominator".into());
                }
                BigRational::new(p, q)
            }
            None => parse_decimal(t)?,
        };
        if !rational.is_positive() {
            return Err(format!("lambda must be positive, got {t:?}"));
        }
        let value = rational.to_f64().unwrap_or(f64::NAN);
        if !(value.is_finite() && value > 0.0) {
            return Err(format!("lambda {t:?} is not representable as a positive double"));
        }
        Ok(Lambda { text: t.to_string(), rational, value })
    }
}

fn parse_decimal(t: &str) -> Result<BigRational, String> {
    let bad = || format!("cannot parse lambda {t:?}");
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (t, 0),
    };
    let mant = mant.strip_prefix('+').unwrap_or(mant);
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())) {
        return Err(bad());
    }
    if exp.abs() > 400 {
        return Err(format!("exponent of {t:?} is out of range"));
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    Ok(if scale >= 0 {
        BigRational::from_integer(digits * Pow::pow(&ten, scale as u32))
    } else {
        BigRational::new(digits, Pow::pow(&ten, (-scale) as u32))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Auto,
    Exact,
    Bounds,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Auto => Mode::Auto,
            ModeArg::Exact => Mode::Exact,
            ModeArg::Bounds => Mode::Bounds,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// One JSON object per line with every field.
    Json,
    /// JSON without the string field.
    Edges,
    /// The encoded string only.
    String,
}

#[derive(Debug, Parser)]
#[command(name = "partri", version, about = "Exact sampler for weighted partial triangulations of convex polygons")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Number of partial triangulations of the (n+2)-gon with k parts.
    Count {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        /// Omit to print the whole row k = 1..n.
        #[arg(long)]
        k: Option<u64>,
    },
    /// Bounds on the partition function and the regime that produced them.
    Zbounds {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long)]
        lambda: Lambda,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
    },
    /// Stream samples as JSON lines.
    Sample {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long)]
        lambda: Lambda,
        #[arg(long, default_value_t = 1)]
        samples: u64,
        #[arg(long, env = "PARTRI_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
        /// Shard the samples over this many threads; lines gain a shard tag.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        threads: u64,
    },
    /// Empirical diagonal-count histogram next to the exact pmf.
    Hist {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=100_000))]
        n: u64,
        #[arg(long)]
        lambda: Lambda,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, env = "PARTRI_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
        mode: ModeArg,
    },
    /// Oracle-backed consistency checks.
    Selftest {
        #[arg(long, env = "PARTRI_SEED", default_value_t = 1)]
        seed: u64,
    },
    /// Mean time per sample for each n.
    Bench {
        #[arg(long)]
        lambda: Lambda,
        #[arg(long, value_delimiter = ',', required = true)]
        n_list: Vec<u64>,
        #[arg(long, default_value_t = 200)]
        samples: u64,
        #[arg(long, env = "PARTRI_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = ModeArg::Bounds)]
        mode: ModeArg,
    },
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code: 2 for argument errors, 1 for a failed self-test.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match CliConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    match execute(cfg, out, err) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            // a closed stdout is not an argument error
            if e.kind() == std::io::ErrorKind::BrokenPipe {
                0
            } else {
                1
            }
        }
    }
}

enum Failure {
    Usage(String),
    Io(std::io::Error),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

fn params(n: u64, lambda: &Lambda) -> Result<ModelParams, Failure> {
    ModelParams::new(n, lambda.value).map_err(|e| Failure::Usage(e.to_string()))
}

fn execute(cfg: CliConfig, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    match cfg.command {
        Command::Count { n, k } => {
            match k {
                Some(k) => {
                    let c = count_partial_triangulations(n, k).map_err(|e| Failure::Usage(e.to_string()))?;
                    writeln!(out, "{c}")?;
                }
                None => {
                    for k in 1..=n {
                        writeln!(out, "{k} {}", count_partial_triangulations(n, k).expect("k in range"))?;
                    }
                }
            }
            Ok(0)
        }
        Command::Zbounds { n, lambda, mode } => {
            let p = params(n, &lambda)?;
            let est = z_estimate(&p, mode.into());
            writeln!(out, "regime {}", est.regime)?;
            writeln!(out, "log_lower {}", est.log_lower)?;
            writeln!(out, "log_upper {}", est.log_upper)?;
            writeln!(out, "ratio {}", est.ratio())?;
            writeln!(out, "terms {}", est.compute_cost_terms)?;
            Ok(0)
        }
        Command::Sample { n, lambda, samples, seed, format, mode, threads } => {
            sample_cmd(params(n, &lambda)?, &lambda, samples, seed, format, mode.into(), threads, out, err)
        }
        Command::Hist { n, lambda, samples, seed, mode } => {
            let p = params(n, &lambda)?;
            let mut sampler = DiagonalCountSampler::new(&p, z_upper_with_mode(&p, mode.into()));
            let mut rng = RandomSource::new(seed);
            let mut counts = vec![0u64; n as usize];
            for _ in 0..samples {
                counts[sampler.sample(&mut rng).diagonals as usize] += 1;
            }
            let pmf = pi_perp_pmf(&p, z_exact_log(&p));
            writeln!(out, "k\tempirical\texact")?;
            let mut total = 0.0;
            for (k, (&c, &e)) in counts.iter().zip(&pmf).enumerate() {
                if c == 0 && e < 1e-15 {
                    continue;
                }
                total += e;
                writeln!(out, "{k}\t{}\t{e}", c as f64 / samples.max(1) as f64)?;
            }
            writeln!(out, "# exact_sum\t{total}")?;
            writeln!(out, "# regime\t{}", sampler.z_upper().regime)?;
            if sampler.clamp_events() > 0 {
                writeln!(err, "warning: {} probability clamp events", sampler.clamp_events())?;
            }
            Ok(0)
        }
        Command::Selftest { seed } => selftest(seed, out, err),
        Command::Bench { lambda, n_list, samples, seed, mode } => {
            bench(&lambda, &n_list, samples, seed, mode.into(), out, err)
        }
    }
}

#[derive(Serialize)]
struct SampleLine<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    shard: Option<u64>,
    n: u64,
    lambda: f64,
    k: u64,
    diagonals: Vec<[u64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    string: Option<&'a str>,
}

fn render_sample(
    s: &crate::geometry::TriangulationSample,
    lambda: f64,
    format: Format,
    shard: Option<u64>,
) -> String {
    let string = s.encoding.to_expanded_string();
    match format {
        Format::String => match shard {
            Some(i) => format!("{i}\t{string}"),
            None => string,
        },
        Format::Json | Format::Edges => {
            let line = SampleLine {
                shard,
                n: s.triangulation.n(),
                lambda,
                k: s.count.diagonals,
                diagonals: s.triangulation.diagonals().iter().map(|&(a, b)| [a, b]).collect(),
                string: (format == Format::Json).then_some(string.as_str()),
            };
            serde_json::to_string(&line).expect("plain struct serializes")
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn sample_cmd(
    p: ModelParams,
    lambda: &Lambda,
    samples: u64,
    seed: u64,
    format: Format,
    mode: Mode,
    threads: u64,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let base = TriangulationSampler::new(p, mode);
    if threads <= 1 {
        let mut sampler = base;
        let mut rng = RandomSource::new(seed);
        for _ in 0..samples {
            let s = sampler.sample(&mut rng);
            writeln!(out, "{}", render_sample(&s, lambda.value, format, None))?;
        }
        if sampler.clamp_events() > 0 {
            writeln!(err, "warning: {} probability clamp events", sampler.clamp_events())?;
        }
        return Ok(0);
    }
    let per = samples / threads;
    let extra = samples % threads;
    let shards: Vec<Vec<String>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|i| {
                let mut sampler = base.clone();
                let count = per + u64::from(i < extra);
                scope.spawn(move || {
                    let mut rng = RandomSource::with_stream(seed, i + 1);
                    (0..count)
                        .map(|_| render_sample(&sampler.sample(&mut rng), lambda.value, format, Some(i)))
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("shard thread panicked")).collect()
    });
    for line in shards.iter().flatten() {
        writeln!(out, "{line}")?;
    }
    Ok(0)
}

struct Checks<'a> {
    out: &'a mut dyn Write,
    failed: usize,
}

impl Checks<'_> {
    fn report(&mut self, name: &str, ok: bool, detail: String) -> std::io::Result<()> {
        if !ok {
            self.failed += 1;
        }
        writeln!(self.out, "{} {name}: {detail}", if ok { "PASS" } else { "FAIL" })
    }
}

fn selftest(seed: u64, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let mut c = Checks { out, failed: 0 };

    let mut ok = true;
    for n in 1..=6u64 {
        for k in 1..=n {
            let direct = enumerate_triangulations_direct(n, k).map(|v| v.len() as u64).unwrap_or(u64::MAX);
            let strings = enumerate_strings(k, n - k).map(|v| v.len() as u64).unwrap_or(u64::MAX);
            let formula = count_partial_triangulations(n, k).expect("k in range");
            ok &= formula == direct && formula == strings;
        }
    }
    c.report("counts", ok, "formula = direct enumeration = string enumeration for n <= 6".into())?;

    let mut ok = true;
    for n in 1..=5u64 {
        for t in enumerate_all_triangulations(n).unwrap_or_default() {
            ok &= triangulation_to_string(&t).and_then(|e| encoding_to_triangulation(&e)).ok() == Some(t);
        }
        for k in 1..=n {
            for e in enumerate_strings(k, n - k).unwrap_or_default() {
                ok &= encoding_to_triangulation(&e).and_then(|t| triangulation_to_string(&t)).ok() == Some(e);
            }
        }
    }
    c.report("bijection", ok, "round trips are identities for n <= 5".into())?;

    // bound sandwich; the small-regime constants are doubled on a violation
    let mut consts = SmallConstants::default();
    let mut violations = 0;
    let mut points = 0;
    for n in [50u64, 200, 1000, 5000] {
        for lam in [1e-9, 1e-7, 1e-5, 8.0 / (n * n) as f64, 1.0 / n as f64, 0.01, 0.05] {
            let p = ModelParams::new(n, lam).expect("valid grid point");
            let z = z_exact_log(&p);
            if lam <= 1.0 / n as f64 {
                let mut tries = 0;
                loop {
                    match z_bounds_small_with(&p, &consts) {
                        Ok(e) if !(e.log_lower <= z && z <= e.log_upper) && tries < 4 => {
                            writeln!(err, "warning: small bound violated at n={n} lambda={lam}; raising constants")?;
                            consts.b *= 2.0;
                            consts.c_r *= 2.0;
                            tries += 1;
                        }
                        Ok(e) => {
                            points += 1;
                            violations += !(e.log_lower <= z && z <= e.log_upper) as u32;
                            break;
                        }
                        Err(_) => break,
                    }
                }
            }
            let e = z_estimate(&p, Mode::Bounds);
            if e.regime != Regime::Exact {
                points += 1;
                violations += !(e.log_lower <= z && z <= e.log_upper) as u32;
            }
        }
    }
    c.report(
        "z-sandwich",
        violations == 0,
        format!("{violations} violations over {points} bound evaluations (B={}, C_R={})", consts.b, consts.c_r),
    )?;

    let mut rng = RandomSource::new(seed);
    let lam3 = BigRational::from_integer(1.into());
    let dist = exact_distribution(3, &lam3).expect("n=3 is within the cap");
    let p = ModelParams::new(3, 1.0).expect("valid");
    let mut sampler = TriangulationSampler::new(p, Mode::Auto);
    let draws = 200_000u64;
    let mut counts = vec![0u64; dist.len()];
    let mut all_valid = true;
    for _ in 0..draws {
        let t = sampler.sample(&mut rng).triangulation;
        all_valid &= validate(&t).is_ok();
        match dist.index_of(&t) {
            Some(i) => counts[i] += 1,
            None => all_valid = false,
        }
    }
    let probs = dist.probs_f64();
    let chi = chi_square_test(&counts, &probs, draws, 0.999).map_err(|e| Failure::Usage(e.to_string()))?;
    let tv = tv_distance(&empirical(&counts), &probs).expect("same support");
    c.report(
        "end-to-end n=3 lambda=1",
        chi.pass && tv <= 0.01 && all_valid,
        format!("chi2={:.2} < {:.2}, tv={tv:.4}", chi.statistic, chi.threshold),
    )?;

    let p = ModelParams::new(6, 0.3).expect("valid");
    let z = z_exact_log(&p);
    let pmf = pi_perp_pmf(&p, z);
    let zu = crate::partition::ZEstimate { log_upper: z + 0.5, ..z_upper_with_mode(&p, Mode::Exact) };
    let mut s = DiagonalCountSampler::new(&p, zu);
    let mut counts = vec![0u64; 6];
    for _ in 0..draws {
        counts[s.sample(&mut rng).diagonals as usize] += 1;
    }
    let chi = chi_square_test(&counts, &pmf, draws, 0.999).map_err(|e| Failure::Usage(e.to_string()))?;
    c.report("count sampler n=6 lambda=0.3", chi.pass, format!("chi2={:.2} < {:.2}", chi.statistic, chi.threshold))?;

    let mut clamps = s.clamp_events();
    for n in [10u64, 100, 1000, 20_000] {
        for lam in [1e-6, 1e-3, 0.05, 1.0, 10.0] {
            let p = ModelParams::new(n, lam).expect("valid");
            let mut t = TriangulationSampler::new(p, Mode::Bounds);
            for _ in 0..20 {
                t.sample(&mut rng);
            }
            clamps += t.clamp_events();
        }
    }
    c.report("clamp counter", clamps == 0, format!("{clamps} clamp events"))?;

    let mut shapes = std::collections::HashMap::new();
    for _ in 0..100_000 {
        *shapes.entry(tree_to_parens(&remy_tree(4, &mut rng)).to_string()).or_insert(0u64) += 1;
    }
    let obs: Vec<u64> = shapes.values().copied().collect();
    let chi = chi_square_test(&obs, &vec![1.0 / 14.0; obs.len()], 100_000, 0.999);
    c.report(
        "remy k=4",
        obs.len() == 14 && chi.is_ok_and(|o| o.pass),
        format!("{} shapes", obs.len()),
    )?;

    let mut subsets = std::collections::HashMap::new();
    for _ in 0..100_000 {
        *subsets.entry(floyd_subset(5, 2, &mut rng).expect("2 <= 5")).or_insert(0u64) += 1;
    }
    let obs: Vec<u64> = subsets.values().copied().collect();
    let chi = chi_square_test(&obs, &vec![0.1; obs.len()], 100_000, 0.999);
    c.report("floyd (5,2)", obs.len() == 10 && chi.is_ok_and(|o| o.pass), format!("{} subsets", obs.len()))?;

    c.report(
        "schroeder totals",
        (1..=6u64).all(|n| {
            enumerate_all_triangulations(n).map(|v| v.len() as u64).ok() == total_partial_triangulations(n).to_u64()
        }),
        "1 3 11 45 197 903".into(),
    )?;

    let failed = c.failed;
    writeln!(c.out, "{} check(s) failed", failed)?;
    Ok(if failed == 0 { 0 } else { 1 })
}

/// Growth factor per doubling of n above which `bench` warns.
pub const BENCH_GROWTH_LIMIT: f64 = 2.6;

fn bench(
    lambda: &Lambda,
    n_list: &[u64],
    samples: u64,
    seed: u64,
    mode: Mode,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let mut rows: Vec<(u64, f64)> = Vec::new();
    for &n in n_list {
        let p = params(n, lambda)?;
        let mut rng = RandomSource::new(seed);
        let mut regime = Regime::Exact;
        let start = Instant::now();
        for _ in 0..samples.max(1) {
            // each draw pays for its own Z⁺
            let mut s = TriangulationSampler::new(p, mode);
            regime = s.z_upper().regime;
            std::hint::black_box(s.sample(&mut rng));
        }
        let mean_ns = start.elapsed().as_nanos() as f64 / samples.max(1) as f64;
        writeln!(out, "n={n} regime={regime} mean_ns={mean_ns:.0}")?;
        rows.push((n, mean_ns));
    }
    for w in rows.windows(2) {
        let (n0, t0) = w[0];
        let (n1, t1) = w[1];
        let doublings = (n1 as f64 / n0 as f64).log2();
        if doublings <= 0.0 {
            continue;
        }
        let per = (t1 / t0).powf(1.0 / doublings);
        writeln!(out, "growth {n0}->{n1}: {per:.2} per doubling")?;
        if per > BENCH_GROWTH_LIMIT {
            writeln!(err, "warning: growth {per:.2} per doubling exceeds {BENCH_GROWTH_LIMIT}")?;
        }
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("partri").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn lambda_parsing() {
        let l: Lambda = "0.3".parse().unwrap();
        assert_eq!(l.rational, BigRational::new(3.into(), 10.into()));
        let l: Lambda = "1/3".parse().unwrap();
        assert_eq!(l.rational, BigRational::new(1.into(), 3.into()));
        assert!((l.value - 1.0 / 3.0).abs() < 1e-16);
        let l: Lambda = "2.5e-3".parse().unwrap();
        assert_eq!(l.rational, BigRational::new(1.into(), 400.into()));
        let l: Lambda = "1E2".parse().unwrap();
        assert_eq!(l.value, 100.0);
        let l: Lambda = ".5".parse().unwrap();
        assert_eq!(l.value, 0.5);
        for bad in ["0", "-1", "abc", "1/0", "", ".", "1e999", "0/5", "1.2.3"] {
            assert!(bad.parse::<Lambda>().is_err(), "{bad}");
        }
    }

    #[test]
    fn count_command() {
        assert_eq!(run_str(&["count", "--n", "4", "--k", "4"]), (0, "14\n".into(), String::new()));
        assert_eq!(run_str(&["count", "--n", "4", "--k", "1"]).1, "1\n");
        assert_eq!(run_str(&["count", "--n", "3"]).1, "1 1\n2 5\n3 5\n");
        assert_eq!(run_str(&["count", "--n", "3", "--k", "4"]).0, 2);
        assert_eq!(run_str(&["count", "--n", "0"]).0, 2);
        assert_eq!(run_str(&["bogus"]).0, 2);
    }

    #[test]
    fn zbounds_command() {
        let (code, out, _) = run_str(&["zbounds", "--n", "3", "--lambda", "1"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("regime exact\n"));
        assert!(out.contains(&format!("log_upper {}", 11f64.ln())));
        let (_, out, _) = run_str(&["zbounds", "--n", "1000", "--lambda", "0.01", "--mode", "bounds"]);
        assert!(out.starts_with("regime mid\n"), "{out}");
        assert_eq!(run_str(&["zbounds", "--n", "3", "--lambda", "-2"]).0, 2);
    }

    #[test]
    fn sample_command_reproducible() {
        let args = ["sample", "--n", "3", "--lambda", "1", "--samples", "2", "--seed", "7"];
        let (code, a, _) = run_str(&args);
        assert_eq!(code, 0);
        let (_, b, _) = run_str(&args);
        assert_eq!(a, b);
        let lines: Vec<&str> = a.lines().collect();
        assert_eq!(lines.len(), 2);
        for l in lines {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            assert_eq!(v["n"], 3);
            let diags: Vec<(u64, u64)> = v["diagonals"]
                .as_array()
                .unwrap()
                .iter()
                .map(|d| (d[0].as_u64().unwrap(), d[1].as_u64().unwrap()))
                .collect();
            assert_eq!(v["k"].as_u64().unwrap(), diags.len() as u64);
            let t = crate::geometry::PartialTriangulation::new(3, diags);
            assert!(validate(&t).is_ok());
            assert_eq!(triangulation_to_string(&t).unwrap().to_string(), v["string"].as_str().unwrap());
        }
    }

    #[test]
    fn sample_formats_and_threads() {
        let (_, out, _) = run_str(&["sample", "--n", "5", "--lambda", "1/2", "--samples", "3", "--format", "edges"]);
        assert!(out.lines().all(|l| !l.contains("string")));
        let (_, out, _) = run_str(&["sample", "--n", "5", "--lambda", "2", "--samples", "3", "--format", "string"]);
        assert!(out.lines().all(|l| Encoding::parse(l).is_ok()));
        let args = ["sample", "--n", "20", "--lambda", "0.5", "--samples", "11", "--threads", "3"];
        let (code, a, _) = run_str(&args);
        assert_eq!(code, 0);
        assert_eq!(a, run_str(&args).1);
        assert_eq!(a.lines().count(), 11);
        assert!(a.lines().all(|l| l.starts_with("{\"shard\":")));
    }

    use crate::structure::Encoding;

    #[test]
    fn hist_command() {
        let (code, out, _) = run_str(&["hist", "--n", "6", "--lambda", "0.3", "--samples", "1000", "--seed", "3"]);
        assert_eq!(code, 0);
        let sum: f64 = out
            .lines()
            .skip(1)
            .filter(|l| !l.starts_with('#'))
            .map(|l| l.split('\t').nth(2).unwrap().parse::<f64>().unwrap())
            .sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bench_command() {
        let (code, out, _) = run_str(&["bench", "--lambda", "0.01", "--n-list", "100,200", "--samples", "5"]);
        assert_eq!(code, 0);
        assert!(out.contains("n=100 ") && out.contains("growth 100->200"));
    }
}
