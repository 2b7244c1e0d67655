//! Partial triangulations of the convex (n+2)-gon and their bijection with
//! encoded strings.
//!
//! Vertices are labelled 0..=n+1 clockwise and the polygon is rooted at the
//! edge (0, n+1). The face on the root edge with vertices
//! 0 = v_0 < v_1 < … < v_m = n+1 is written
//! `"(" s_0 0 s_1 0 … 0 s_{m−2} ")" s_{m−1}`, where s_i encodes the
//! sub-polygon cut off by the edge (v_i, v_{i+1}) and a boundary edge
//! encodes as the empty string. Boundary edge (i, i+1) is then the i-th
//! leaf in depth-first order.

use serde::Serialize;

use crate::count_sampler::{DiagonalCountSample, DiagonalCountSampler};
use crate::error::{Error, Result};
use crate::partition::{z_upper_with_mode, Mode, ModelParams, ZEstimate};
use crate::rng::RandomSource;
use crate::structure::{sample_encoding_with_trials, Encoding, EncodingBuilder};

/// A set of diagonals of the (n+2)-gon, kept sorted with a < b in each pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PartialTriangulation {
    n: u64,
    diagonals: Vec<(u64, u64)>,
}

impl PartialTriangulation {
    /// Orders each pair and sorts the set. Does not check validity; see
    /// [`validate`].
    pub fn new(n: u64, diagonals: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut diagonals: Vec<(u64, u64)> = diagonals.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        diagonals.sort_unstable();
        PartialTriangulation { n, diagonals }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn diagonals(&self) -> &[(u64, u64)] {
        &self.diagonals
    }

    /// Number of faces, one more than the number of diagonals.
    pub fn parts(&self) -> u64 {
        self.diagonals.len() as u64 + 1
    }

    /// `{"n", "diagonals", "string"}` as a JSON value.
    pub fn to_json(&self) -> Result<serde_json::Value> {
        #[derive(Serialize)]
        struct Repr<'a> {
            n: u64,
            diagonals: Vec<[u64; 2]>,
            string: &'a str,
        }
        let string = triangulation_to_string(self)?.to_expanded_string();
        let repr = Repr { n: self.n, diagonals: self.diagonals.iter().map(|&(a, b)| [a, b]).collect(), string: &string };
        Ok(serde_json::to_value(repr).expect("plain struct serializes"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    LabelOutOfRange { a: u64, b: u64 },
    NotADiagonal { a: u64, b: u64 },
    RootEdge,
    Duplicate { a: u64, b: u64 },
    Crossing { first: (u64, u64), second: (u64, u64) },
    TooMany { count: u64, max: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks labels, diagonal-ness, duplicates, crossings and the count bound.
pub fn validate(tri: &PartialTriangulation) -> ValidationReport {
    let n = tri.n;
    let mut violations = Vec::new();
    let mut good = Vec::with_capacity(tri.diagonals.len());
    for &(a, b) in &tri.diagonals {
        if a >= b || b > n + 1 {
            violations.push(Violation::LabelOutOfRange { a, b });
        } else if b - a < 2 {
            violations.push(Violation::NotADiagonal { a, b });
        } else if (a, b) == (0, n + 1) {
            violations.push(Violation::RootEdge);
        } else {
            good.push((a, b));
        }
    }
    good.sort_unstable_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
    good.dedup_by(|x, y| {
        let dup = x == y;
        if dup {
            violations.push(Violation::Duplicate { a: x.0, b: x.1 });
        }
        dup
    });
    // nested or disjoint intervals form a laminar family; a stack of open
    // intervals finds the first interleaving pair
    let mut stack: Vec<(u64, u64)> = Vec::new();
    for &(a, b) in &good {
        while stack.last().is_some_and(|t| t.1 <= a) {
            stack.pop();
        }
        if let Some(&t) = stack.last() {
            if t.1 < b {
                violations.push(Violation::Crossing { first: t, second: (a, b) });
                continue;
            }
        }
        stack.push((a, b));
    }
    let count = tri.diagonals.len() as u64;
    let max = n.saturating_sub(1);
    if count > max {
        violations.push(Violation::TooMany { count, max });
    }
    ValidationReport { violations }
}

/// Decodes an encoding into its diagonal set. Zero runs are consumed as
/// counts, so the cost is O(k) plus the final sort.
pub fn encoding_to_triangulation(enc: &Encoding) -> Result<PartialTriangulation> {
    #[derive(Clone, Copy, PartialEq)]
    enum Tok {
        Open,
        Close,
        Zeros(u64),
        End,
    }
    let n = enc.n();
    let symbols = enc.parens().symbols();
    let zeros = enc.zeros_after_symbols();
    let mut toks = Vec::with_capacity(2 * symbols.len() + 1);
    for (&s, &z) in symbols.iter().zip(&zeros) {
        toks.push(if s { Tok::Open } else { Tok::Close });
        if z > 0 {
            toks.push(Tok::Zeros(z));
        }
    }
    toks.push(Tok::End);

    let mut cursor = 0u64;
    let mut depth = 0u64;
    // open regions as (paren depth where they began, first vertex)
    let mut open: Vec<(u64, u64)> = Vec::new();
    let mut diagonals = Vec::with_capacity(enc.k() as usize);
    let mut close_regions = |open: &mut Vec<(u64, u64)>, depth: u64, cursor: u64| {
        while open.last().is_some_and(|r| r.0 == depth) {
            let (_, start) = open.pop().expect("checked nonempty");
            if (start, cursor) != (0, n + 1) {
                diagonals.push((start, cursor));
            }
        }
    };
    // A substring begins here: a region if it starts with '(', else a leaf.
    let begin = |next: Tok, open: &mut Vec<(u64, u64)>, depth: u64, cursor: &mut u64| {
        if next == Tok::Open {
            open.push((depth, *cursor));
        } else {
            *cursor += 1;
        }
    };
    begin(toks[0], &mut open, depth, &mut cursor);
    for i in 0..toks.len() - 1 {
        let next = toks[i + 1];
        match toks[i] {
            Tok::Open => {
                depth += 1;
                begin(next, &mut open, depth, &mut cursor);
            }
            Tok::Zeros(c) => {
                close_regions(&mut open, depth, cursor);
                // all but the last zero are followed by an empty substring
                cursor += c - 1;
                begin(next, &mut open, depth, &mut cursor);
            }
            Tok::Close => {
                close_regions(&mut open, depth, cursor);
                depth = depth
                    .checked_sub(1)
                    .ok_or_else(|| Error::MalformedEncoding("unbalanced parenthesization".into()))?;
                begin(next, &mut open, depth, &mut cursor);
            }
            Tok::End => unreachable!("End is last"),
        }
    }
    close_regions(&mut open, 0, cursor);
    drop(close_regions);
    if cursor != n + 1 || !open.is_empty() || depth != 0 {
        return Err(Error::MalformedEncoding(format!("decoded {cursor} leaves, expected {}", n + 1)));
    }
    diagonals.sort_unstable();
    Ok(PartialTriangulation { n, diagonals })
}

/// Encodes a valid partial triangulation.
pub fn triangulation_to_string(tri: &PartialTriangulation) -> Result<Encoding> {
    let report = validate(tri);
    if !report.is_ok() {
        return Err(Error::InvalidTriangulation(format!("{:?}", report.violations)));
    }
    let n = tri.n;
    let nv = (n + 2) as usize;
    let mut adj: Vec<Vec<u64>> = vec![Vec::new(); nv];
    for v in 0..=n {
        adj[v as usize].push(v + 1);
        adj[v as usize + 1].push(v);
    }
    adj[0].push(n + 1);
    adj[nv - 1].push(0);
    for &(a, b) in &tri.diagonals {
        adj[a as usize].push(b);
        adj[b as usize].push(a);
    }
    for l in &mut adj {
        l.sort_unstable();
    }
    // largest neighbour of v that is <= bound
    let step = |v: u64, bound: u64| -> u64 {
        let l = &adj[v as usize];
        let i = l.partition_point(|&w| w <= bound);
        l[i - 1]
    };

    enum Work {
        Region(u64, u64),
        Open,
        Close,
        Zero,
    }
    let mut b = EncodingBuilder::default();
    let mut stack = vec![Work::Region(0, n + 1)];
    let mut face = Vec::new();
    while let Some(w) = stack.pop() {
        match w {
            Work::Open => b.open(),
            Work::Close => b.close(),
            Work::Zero => b.zeros(1)?,
            Work::Region(lo, hi) => {
                if hi == lo + 1 {
                    continue;
                }
                face.clear();
                face.push(lo);
                let mut v = step(lo, hi - 1);
                face.push(v);
                while v != hi {
                    v = step(v, hi);
                    face.push(v);
                }
                // pushed in reverse so pops read "(" s_0 0 s_1 … ")" s_last
                let m = face.len() - 1;
                stack.push(Work::Region(face[m - 1], face[m]));
                stack.push(Work::Close);
                for i in (0..m - 1).rev() {
                    stack.push(Work::Region(face[i], face[i + 1]));
                    if i > 0 {
                        stack.push(Work::Zero);
                    }
                }
                stack.push(Work::Open);
            }
        }
    }
    let enc = b.finish()?;
    debug_assert_eq!(enc.n(), n);
    Ok(enc)
}

/// One full draw with diagnostics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangulationSample {
    pub triangulation: PartialTriangulation,
    pub encoding: Encoding,
    pub count: DiagonalCountSample,
    /// Skeletons proposed before one was accepted.
    pub encoding_trials: u64,
}

/// Two-stage sampler sharing one Z⁺ across draws.
#[derive(Debug, Clone)]
pub struct TriangulationSampler {
    params: ModelParams,
    counts: DiagonalCountSampler,
}

impl TriangulationSampler {
    pub fn new(params: ModelParams, mode: Mode) -> Self {
        Self::with_estimate(params, z_upper_with_mode(&params, mode))
    }

    /// Uses a caller-supplied Z⁺, which must not be below Z.
    pub fn with_estimate(params: ModelParams, z_upper: ZEstimate) -> Self {
        TriangulationSampler { counts: DiagonalCountSampler::new(&params, z_upper), params }
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn z_upper(&self) -> &ZEstimate {
        self.counts.z_upper()
    }

    pub fn clamp_events(&self) -> u64 {
        self.counts.clamp_events()
    }

    pub fn sample(&mut self, rng: &mut RandomSource) -> TriangulationSample {
        let n = self.params.n();
        let count = self.counts.sample(rng);
        let (encoding, encoding_trials) =
            sample_encoding_with_trials(n, count.diagonals + 1, rng).expect("1 <= X+1 <= n");
        let triangulation = encoding_to_triangulation(&encoding).expect("sampled encodings are valid");
        TriangulationSample { triangulation, encoding, count, encoding_trials }
    }
}

/// A single draw from the model with the automatic regime choice.
pub fn sample_partial_triangulation(params: &ModelParams, rng: &mut RandomSource) -> PartialTriangulation {
    TriangulationSampler::new(*params, Mode::Auto).sample(rng).triangulation
}
