//! Uniform generation of balanced strings with zeros.
//!
//! A string in Υ_{k,j} is a balanced parenthesization with k pairs plus j
//! zeros, every zero sitting in a gap of nesting depth ≥ 1. It is stored
//! compactly as the parenthesization and the number of zeros in each
//! admissible gap. Sampling draws a uniform parenthesization with Rémy's
//! algorithm, accepts it with probability proportional to the number of
//! ways to place the zeros, then places them with a uniform composition.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::combinat::binomial;
use crate::error::{Error, Result};
use crate::logspace::CompensatedSum;
use crate::rng::RandomSource;

const NIL: u32 = u32::MAX;

/// Full binary tree stored as an arena; leaves have no children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryTree {
    children: Vec<[u32; 2]>,
    root: u32,
}

impl BinaryTree {
    pub fn internal_count(&self) -> usize {
        self.children.iter().filter(|c| c[0] != NIL).count()
    }

    pub fn leaf_count(&self) -> usize {
        self.children.len() - self.internal_count()
    }

    pub fn node_count(&self) -> usize {
        self.children.len()
    }

    pub fn root(&self) -> u32 {
        self.root
    }

    /// `(left, right)` of an internal node, `None` for a leaf.
    pub fn children(&self, v: u32) -> Option<(u32, u32)> {
        let c = self.children[v as usize];
        (c[0] != NIL).then_some((c[0], c[1]))
    }

    /// Checks that every node is reachable once and internal nodes have two
    /// children.
    pub fn is_full(&self) -> bool {
        let mut seen = vec![false; self.children.len()];
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            if v as usize >= seen.len() || seen[v as usize] {
                return false;
            }
            seen[v as usize] = true;
            let c = self.children[v as usize];
            match (c[0] == NIL, c[1] == NIL) {
                (true, true) => {}
                (false, false) => stack.extend([c[0], c[1]]),
                _ => return false,
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Uniform full binary tree with `k` internal nodes.
///
/// Start from a single leaf. Step j picks one of the 2j−1 existing nodes
/// and a side uniformly, then splices a new internal node above the chosen
/// node with a fresh leaf on that side.
pub fn remy_tree(k: usize, rng: &mut RandomSource) -> BinaryTree {
    let total = 2 * k + 1;
    let mut children = Vec::with_capacity(total);
    let mut parent = Vec::with_capacity(total);
    children.push([NIL, NIL]);
    parent.push(NIL);
    let mut root = 0u32;
    for _ in 0..k {
        let existing = children.len() as u64;
        let pick = rng.uniform_int(2 * existing);
        let x = (pick >> 1) as u32;
        let side = (pick & 1) as usize;
        let internal = children.len() as u32;
        let leaf = internal + 1;
        let mut c = [x, x];
        c[side] = leaf;
        let px = parent[x as usize];
        children.push(c);
        parent.push(px);
        children.push([NIL, NIL]);
        parent.push(internal);
        if px == NIL {
            root = internal;
        } else {
            let pc = &mut children[px as usize];
            if pc[0] == x {
                pc[0] = internal;
            } else {
                pc[1] = internal;
            }
        }
        parent[x as usize] = internal;
    }
    BinaryTree { children, root }
}

/// Balanced parenthesization; `true` is '('.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Parenthesization {
    symbols: Vec<bool>,
}

impl Parenthesization {
    /// Rejects unbalanced or empty input.
    pub fn new(symbols: Vec<bool>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::MalformedEncoding("empty parenthesization".into()));
        }
        let mut depth = 0i64;
        for &s in &symbols {
            depth += if s { 1 } else { -1 };
            if depth < 0 {
                return Err(Error::MalformedEncoding("prefix closes more than it opens".into()));
            }
        }
        if depth != 0 {
            return Err(Error::MalformedEncoding("unbalanced parenthesization".into()));
        }
        Ok(Parenthesization { symbols })
    }

    pub fn symbols(&self) -> &[bool] {
        &self.symbols
    }

    /// Number of pairs.
    pub fn k(&self) -> usize {
        self.symbols.len() / 2
    }

    /// Returns of the prefix depth to zero.
    pub fn excursions(&self) -> usize {
        let mut depth = 0i64;
        let mut count = 0;
        for &s in &self.symbols {
            depth += if s { 1 } else { -1 };
            if depth == 0 {
                count += 1;
            }
        }
        count
    }

    /// For each internal gap (after symbol i, i < 2k−1), whether it is
    /// nested at depth ≥ 1.
    pub fn gap_admissibility(&self) -> Vec<bool> {
        let mut depth = 0i64;
        let mut out = Vec::with_capacity(self.symbols.len().saturating_sub(1));
        for &s in &self.symbols[..self.symbols.len() - 1] {
            depth += if s { 1 } else { -1 };
            out.push(depth >= 1);
        }
        out
    }
}

impl fmt::Display for Parenthesization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.symbols.iter().map(|&b| if b { '(' } else { ')' }).collect();
        f.write_str(&s)
    }
}

impl FromStr for Parenthesization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = s
            .chars()
            .map(|c| match c {
                '(' => Ok(true),
                ')' => Ok(false),
                other => Err(Error::MalformedEncoding(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Parenthesization::new(symbols)
    }
}

/// leaf ↦ "", internal (L, R) ↦ "(" L ")" R.
pub fn tree_to_parens(tree: &BinaryTree) -> Parenthesization {
    enum Step {
        Visit(u32),
        Close,
    }
    let mut symbols = Vec::with_capacity(2 * tree.internal_count());
    let mut stack = vec![Step::Visit(tree.root)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Close => symbols.push(false),
            Step::Visit(v) => {
                if let Some((l, r)) = tree.children(v) {
                    symbols.push(true);
                    stack.push(Step::Visit(r));
                    stack.push(Step::Close);
                    stack.push(Step::Visit(l));
                }
            }
        }
    }
    Parenthesization { symbols }
}

/// r(P) = 2k − #excursions.
pub fn admissible_positions(p: &Parenthesization) -> usize {
    2 * p.k() - p.excursions()
}

/// r(P) by scanning gap depths directly.
pub fn admissible_positions_scan(p: &Parenthesization) -> usize {
    p.gap_admissibility().into_iter().filter(|&a| a).count()
}

fn check_accept_args(n: u64, k: u64, r: u64) -> Result<()> {
    if k < 1 || k > n || r < 1 || r > 2 * k - 1 {
        return Err(Error::OutOfRange(format!("need 1 <= k <= n and 1 <= r <= 2k-1, got n={n}, k={k}, r={r}")));
    }
    Ok(())
}

/// w(P)/M = C(n−k+r−1, r−1) / C(n+k−2, 2k−2), by the O(k) product form.
pub fn acceptance_prob(n: u64, k: u64, r: u64) -> Result<f64> {
    check_accept_args(n, k, r)?;
    let mut s = CompensatedSum::new();
    for j in 0..(2 * k - 1 - r) {
        s.add(((r + j) as f64).ln() - ((n - k + r + j) as f64).ln());
    }
    Ok(s.value().exp().min(1.0))
}

/// w(P)/M as an exact rational.
pub fn acceptance_prob_rational(n: u64, k: u64, r: u64) -> Result<BigRational> {
    check_accept_args(n, k, r)?;
    let w = BigInt::from(binomial(n - k + r - 1, r - 1).into_inner());
    let m = BigInt::from(binomial(n + k - 2, 2 * k - 2).into_inner());
    Ok(BigRational::new(w, m))
}

/// Uniform `s`-subset of {1..m}, sorted.
pub fn floyd_subset(m: u64, s: u64, rng: &mut RandomSource) -> Result<Vec<u64>> {
    if s > m {
        return Err(Error::OutOfRange(format!("subset size {s} exceeds universe {m}")));
    }
    let mut chosen = HashSet::with_capacity(s as usize);
    let mut out = Vec::with_capacity(s as usize);
    for j in (m - s + 1)..=m {
        let t = rng.uniform_int(j) + 1;
        let v = if chosen.contains(&t) { j } else { t };
        chosen.insert(v);
        out.push(v);
    }
    out.sort_unstable();
    Ok(out)
}

/// Stars and bars: a sorted (r−1)-subset of {1..total+r−1} to a weak
/// composition of `total` into `r` parts.
pub fn subset_to_composition(subset: &[u64], total: u64, r: u64) -> Result<Vec<u64>> {
    if r < 1 || subset.len() as u64 != r - 1 {
        return Err(Error::MalformedEncoding(format!("need r >= 1 and {} = r-1 separators", subset.len())));
    }
    let top = total + r - 1;
    let mut out = Vec::with_capacity(r as usize);
    let mut prev = 0u64;
    for &s in subset {
        if s <= prev || s > top {
            return Err(Error::MalformedEncoding(format!("separator {s} out of order or range")));
        }
        out.push(s - prev - 1);
        prev = s;
    }
    out.push(top - prev);
    Ok(out)
}

/// A string of Υ_{k, n−k} in compressed form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Encoding {
    parens: Parenthesization,
    gap_counts: Vec<u64>,
    n: u64,
}

impl Encoding {
    pub fn new(parens: Parenthesization, gap_counts: Vec<u64>, n: u64) -> Result<Self> {
        let k = parens.k() as u64;
        let r = admissible_positions(&parens);
        if gap_counts.len() != r {
            return Err(Error::MalformedEncoding(format!("{} gap counts for {r} admissible gaps", gap_counts.len())));
        }
        let zeros: u64 = gap_counts.iter().sum();
        if n < k || zeros != n - k {
            return Err(Error::MalformedEncoding(format!("{zeros} zeros with k={k} does not fit n={n}")));
        }
        Ok(Encoding { parens, gap_counts, n })
    }

    pub fn parens(&self) -> &Parenthesization {
        &self.parens
    }

    pub fn gap_counts(&self) -> &[u64] {
        &self.gap_counts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.parens.k() as u64
    }

    /// Zeros after each symbol except the last (0 at inadmissible gaps).
    pub fn zeros_after_symbols(&self) -> Vec<u64> {
        let mut counts = self.gap_counts.iter();
        let mut out: Vec<u64> = self
            .parens
            .gap_admissibility()
            .into_iter()
            .map(|a| if a { *counts.next().expect("gap count per admissible gap") } else { 0 })
            .collect();
        out.push(0);
        out
    }

    /// The full string over '(', ')', '0'.
    pub fn to_expanded_string(&self) -> String {
        let mut s = String::with_capacity((self.n + self.k()) as usize);
        for (&sym, z) in self.parens.symbols().iter().zip(self.zeros_after_symbols()) {
            s.push(if sym { '(' } else { ')' });
            s.extend(std::iter::repeat('0').take(z as usize));
        }
        s
    }

    /// Parses an expanded string; n is k plus the number of zeros.
    pub fn parse(s: &str) -> Result<Self> {
        let mut b = EncodingBuilder::default();
        for c in s.chars() {
            match c {
                '(' => b.open(),
                ')' => b.close(),
                '0' => b.zeros(1)?,
                other => return Err(Error::MalformedEncoding(format!("unexpected character {other:?}"))),
            }
        }
        b.finish()
    }
}

/// Accumulates an encoding from a stream of symbols and zero runs.
#[derive(Debug, Default)]
pub struct EncodingBuilder {
    symbols: Vec<bool>,
    gaps: Vec<u64>,
    depth: i64,
    run: u64,
    zeros: u64,
}

impl EncodingBuilder {
    fn symbol(&mut self, open: bool) {
        if !self.symbols.is_empty() && self.depth >= 1 {
            self.gaps.push(self.run);
        }
        self.run = 0;
        self.symbols.push(open);
        self.depth += if open { 1 } else { -1 };
    }

    pub fn open(&mut self) {
        self.symbol(true);
    }

    pub fn close(&mut self) {
        self.symbol(false);
    }

    pub fn zeros(&mut self, count: u64) -> Result<()> {
        if count > 0 && self.depth < 1 {
            return Err(Error::MalformedEncoding("zero outside every pair".into()));
        }
        self.run += count;
        self.zeros += count;
        Ok(())
    }

    /// n is taken as k plus the number of zeros.
    pub fn finish(self) -> Result<Encoding> {
        let k = (self.symbols.len() / 2) as u64;
        let parens = Parenthesization::new(self.symbols)?;
        Encoding::new(parens, self.gaps, k + self.zeros)
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expanded_string())
    }
}

fn check_nk(n: u64, k: u64) -> Result<()> {
    if k < 1 || k > n {
        return Err(Error::OutOfRange(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    Ok(())
}

/// Uniform element of Υ_{k, n−k}.
pub fn sample_encoding(n: u64, k: u64, rng: &mut RandomSource) -> Result<Encoding> {
    sample_encoding_with_trials(n, k, rng).map(|(e, _)| e)
}

/// Like [`sample_encoding`], also returning the number of skeleton trials.
pub fn sample_encoding_with_trials(n: u64, k: u64, rng: &mut RandomSource) -> Result<(Encoding, u64)> {
    check_nk(n, k)?;
    let mut trials = 0;
    loop {
        trials += 1;
        let parens = tree_to_parens(&remy_tree(k as usize, rng));
        let r = admissible_positions(&parens) as u64;
        if rng.bernoulli(acceptance_prob(n, k, r)?) {
            return Ok((place_zeros(parens, n, k, r, rng)?, trials));
        }
    }
}

/// Exact-rational variant: the acceptance coin is an exact Bernoulli.
pub fn sample_encoding_exact(n: u64, k: u64, rng: &mut RandomSource) -> Result<(Encoding, u64)> {
    check_nk(n, k)?;
    let mut trials = 0;
    loop {
        trials += 1;
        let parens = tree_to_parens(&remy_tree(k as usize, rng));
        let r = admissible_positions(&parens) as u64;
        if rng.bernoulli_rational(&acceptance_prob_rational(n, k, r)?) {
            return Ok((place_zeros(parens, n, k, r, rng)?, trials));
        }
    }
}

fn place_zeros(parens: Parenthesization, n: u64, k: u64, r: u64, rng: &mut RandomSource) -> Result<Encoding> {
    let subset = floyd_subset(n - k + r - 1, r - 1, rng)?;
    let gaps = subset_to_composition(&subset, n - k, r)?;
    Encoding::new(parens, gaps, n)
}
