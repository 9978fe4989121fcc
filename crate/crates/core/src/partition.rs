//! Integer partitions, weak compositions and their diagram-boundary functions.
//!
//! A configuration of `n` cards is either a [`Partition`] (pile sizes sorted
//! in decreasing order) or a [`WeakComposition`] (pile sizes in creation
//! order, with empty piles kept). Both map to a right-continuous
//! [`StepFunction`] via [`Diagram::boundary`]; the unit-area rescaling is
//! [`StepFunction::rescale`], and distances to a weakly decreasing
//! [`Reference`] shape are computed exactly by [`sup_distance`] and
//! [`restricted_distance`].

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Weakly decreasing sequence of positive parts.
///
/// Indexing with [`Partition::part`] is 1-based and yields 0 past the last
/// part.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Partition {
    parts: Vec<u64>,
    n: u64,
}

impl Partition {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidPartition {
                parts,
                reason: "parts must be positive",
            });
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidPartition {
                parts,
                reason: "parts must be weakly decreasing",
            });
        }
        let n = parts.iter().sum();
        Ok(Partition { parts, n })
    }

    /// Sorts arbitrary pile sizes into a partition, dropping empty piles.
    pub fn from_unsorted<I: IntoIterator<Item = u64>>(piles: I) -> Self {
        let mut parts: Vec<u64> = piles.into_iter().filter(|&p| p > 0).collect();
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let n = parts.iter().sum();
        Partition { parts, n }
    }

    pub fn empty() -> Self {
        Partition::default()
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of parts, ℓ(λ).
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The `i`-th part (1-based); 0 for `i > len()`.
    pub fn part(&self, i: usize) -> u64 {
        assert!(i >= 1, "parts are indexed from 1");
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn largest(&self) -> u64 {
        self.part(1)
    }

    pub fn into_parts(self) -> Vec<u64> {
        self.parts
    }
}

impl TryFrom<Vec<u64>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<u64>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u64> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

impl fmt::Display for Partition {
    /// Parts joined by `+`, e.g. `4+4+2+1+1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.parts)
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Accepts parts separated by `+` or `,`, e.g. `4+4+2+1+1` or `(3,2,1)`.
    fn from_str(s: &str) -> Result<Self> {
        Partition::new(parse_parts(s)?)
    }
}

/// Pile sizes in creation order; index 1 is the most recently created bowl.
///
/// Empty bowls are kept where they occur. Indexing past the stored length
/// yields 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<u64>", into = "Vec<u64>")]
pub struct WeakComposition {
    parts: Vec<u64>,
    n: u64,
}

impl WeakComposition {
    pub fn new(parts: Vec<u64>) -> Self {
        let n = parts.iter().sum();
        WeakComposition { parts, n }
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of stored bowls, including empty ones.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Cards in bowl `k` (1-based); 0 past the stored length.
    pub fn part(&self, k: usize) -> u64 {
        assert!(k >= 1, "bowls are indexed from 1");
        self.parts.get(k - 1).copied().unwrap_or(0)
    }

    /// Sorts the bowls by size, dropping empty ones.
    pub fn ord(&self) -> Partition {
        Partition::from_unsorted(self.parts.iter().copied())
    }

    pub fn into_parts(self) -> Vec<u64> {
        self.parts
    }
}

impl From<Vec<u64>> for WeakComposition {
    fn from(parts: Vec<u64>) -> Self {
        WeakComposition::new(parts)
    }
}

impl From<WeakComposition> for Vec<u64> {
    fn from(c: WeakComposition) -> Self {
        c.parts
    }
}

impl From<&Partition> for WeakComposition {
    fn from(p: &Partition) -> Self {
        WeakComposition::new(p.parts.clone())
    }
}

impl fmt::Display for WeakComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_joined(f, &self.parts)
    }
}

impl FromStr for WeakComposition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(WeakComposition::new(parse_parts(s)?))
    }
}

/// Free-function form of [`WeakComposition::ord`].
pub fn ord(alpha: &WeakComposition) -> Partition {
    alpha.ord()
}

fn write_joined(f: &mut fmt::Formatter<'_>, parts: &[u64]) -> fmt::Result {
    for (i, p) in parts.iter().enumerate() {
        if i > 0 {
            f.write_str("+")?;
        }
        write!(f, "{p}")?;
    }
    Ok(())
}

fn parse_parts(s: &str) -> Result<Vec<u64>> {
    let trimmed = s
        .trim()
        .trim_start_matches('(')
        .trim_end_matches(')')
        .trim();
    if trimmed.is_empty() {
        return Ok(Vec::new());
    }
    trimmed
        .split(['+', ','])
        .map(|t| {
            t.trim().parse::<u64>().map_err(|e| Error::Parse {
                input: s.to_string(),
                reason: e.to_string(),
            })
        })
        .collect()
}

/// Anything with a Young diagram: a sequence of column heights.
pub trait Diagram {
    fn heights(&self) -> &[u64];

    /// Total number of cells.
    fn size(&self) -> u64;

    /// The diagram-boundary function `x ↦ h_{⌊x⌋+1}`.
    ///
    /// Trailing empty columns are dropped since the function is 0 there
    /// anyway.
    fn boundary(&self) -> StepFunction {
        let heights = self.heights();
        let len = heights.iter().rposition(|&h| h > 0).map_or(0, |i| i + 1);
        StepFunction::unit_segments(heights[..len].iter().map(|&h| h as f64))
    }

    /// Boundary rescaled to unit area with scaling factor `a`.
    fn rescaled_boundary(&self, a: f64) -> Result<StepFunction> {
        self.boundary().rescale(a, self.size())
    }
}

impl Diagram for Partition {
    fn heights(&self) -> &[u64] {
        &self.parts
    }

    fn size(&self) -> u64 {
        self.n
    }
}

impl Diagram for WeakComposition {
    fn heights(&self) -> &[u64] {
        &self.parts
    }

    fn size(&self) -> u64 {
        self.n
    }
}

/// Right-continuous, nonnegative, piecewise-constant function on `[0, ∞)`
/// with finite support.
///
/// Segment `i` is `[edges[i], edges[i+1])` with value `values[i]`; the
/// function is 0 from the last edge on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    edges: Vec<f64>,
    values: Vec<f64>,
}

impl Default for StepFunction {
    fn default() -> Self {
        StepFunction::zero()
    }
}

impl StepFunction {
    /// `edges` must start at 0, be strictly increasing and have exactly one
    /// more entry than `values`.
    pub fn new(edges: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if edges.len() != values.len() + 1 {
            return Err(Error::InvalidStepFunction(
                "need exactly one more edge than values",
            ));
        }
        if edges[0] != 0.0 {
            return Err(Error::InvalidStepFunction("first edge must be 0"));
        }
        if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidStepFunction(
                "edges must be finite and strictly increasing",
            ));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidStepFunction(
                "values must be finite and nonnegative",
            ));
        }
        Ok(StepFunction { edges, values })
    }

    pub fn zero() -> Self {
        StepFunction {
            edges: vec![0.0],
            values: Vec::new(),
        }
    }

    /// Segments `[k, k+1)` carrying the given values in order.
    pub fn unit_segments<I: IntoIterator<Item = f64>>(values: I) -> Self {
        let values: Vec<f64> = values.into_iter().collect();
        let edges = (0..=values.len()).map(|k| k as f64).collect();
        StepFunction { edges, values }
    }

    /// Segment start points.
    pub fn breakpoints(&self) -> &[f64] {
        &self.edges[..self.values.len()]
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.edges[i], self.edges[i + 1], v))
    }

    /// End of the last segment; the function is 0 from here on.
    pub fn support_end(&self) -> f64 {
        *self.edges.last().expect("edges are never empty")
    }

    pub fn peak(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let idx = self.edges.partition_point(|&e| e <= x);
        // idx >= 1 since edges[0] == 0 <= x.
        self.values.get(idx - 1).copied().unwrap_or(0.0)
    }

    /// `lim_{y↑x} f(y)`; equals `f(0)` at `x = 0`.
    pub fn eval_left(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return self.eval(0.0);
        }
        let idx = self.edges.partition_point(|&e| e < x);
        self.values.get(idx - 1).copied().unwrap_or(0.0)
    }

    pub fn area(&self) -> f64 {
        let mut acc = Neumaier::default();
        for (l, r, v) in self.segments() {
            acc.add((r - l) * v);
        }
        acc.sum()
    }

    pub fn is_weakly_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] >= w[1])
    }

    /// `x ↦ (a/n)·f(a·x)`: segment widths divided by `a`, heights
    /// multiplied by `a/n`. For the boundary of a size-`n` diagram the
    /// result has unit area.
    pub fn rescale(&self, a: f64, n: u64) -> Result<StepFunction> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(domain("a", a, "a > 0"));
        }
        if n == 0 {
            return Err(domain("n", n, "n >= 1"));
        }
        let height = a / n as f64;
        Ok(StepFunction {
            edges: self.edges.iter().map(|e| e / a).collect(),
            values: self.values.iter().map(|v| v * height).collect(),
        })
    }
}

/// Free-function form of [`StepFunction::rescale`].
pub fn rescale(f: &StepFunction, a: f64, n: u64) -> Result<StepFunction> {
    f.rescale(a, n)
}

/// A reference shape to measure boundaries against.
///
/// Exact distances need `g` to be weakly decreasing, right-continuous,
/// nonnegative, and to tend to 0; implementors declare monotonicity
/// through [`Reference::is_decreasing`].
pub trait Reference {
    fn value(&self, x: f64) -> f64;

    /// Left limit at `x`. Continuous references can keep the default.
    fn left_limit(&self, x: f64) -> f64 {
        self.value(x)
    }

    fn is_decreasing(&self) -> bool;
}

/// `height · e^{-rate·x}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponential {
    pub height: f64,
    pub rate: f64,
}

impl Exponential {
    /// The limit shape `e^{-x}`.
    pub const STANDARD: Exponential = Exponential {
        height: 1.0,
        rate: 1.0,
    };

    pub fn new(height: f64, rate: f64) -> Self {
        Exponential { height, rate }
    }
}

impl Reference for Exponential {
    fn value(&self, x: f64) -> f64 {
        self.height * (-self.rate * x).exp()
    }

    fn is_decreasing(&self) -> bool {
        self.height >= 0.0 && self.rate > 0.0
    }
}

/// Named reference shapes: `e^{-x}` and the unit-area triangle
/// `max(0, √2 − x)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    #[default]
    Exponential,
    Triangle,
}

impl Reference for Shape {
    fn value(&self, x: f64) -> f64 {
        match self {
            Shape::Exponential => (-x).exp(),
            Shape::Triangle => (std::f64::consts::SQRT_2 - x).max(0.0),
        }
    }

    fn is_decreasing(&self) -> bool {
        true
    }
}

/// The zero function.
#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroReference;

impl Reference for ZeroReference {
    fn value(&self, _x: f64) -> f64 {
        0.0
    }

    fn is_decreasing(&self) -> bool {
        true
    }
}

impl Reference for StepFunction {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn left_limit(&self, x: f64) -> f64 {
        self.eval_left(x)
    }

    fn is_decreasing(&self) -> bool {
        self.is_weakly_decreasing()
    }
}

/// A continuous reference given by a closure, with a caller-declared
/// monotonicity flag.
pub struct FnReference<F> {
    f: F,
    decreasing: bool,
}

impl<F: Fn(f64) -> f64> FnReference<F> {
    pub fn new(f: F, decreasing: bool) -> Self {
        FnReference { f, decreasing }
    }
}

impl<F: Fn(f64) -> f64> Reference for FnReference<F> {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    fn is_decreasing(&self) -> bool {
        self.decreasing
    }
}

/// Exact `sup_{x≥0} |f(x) − g(x)|`.
///
/// On a segment `[l, r)` with value `c` a monotone `g` ranges over
/// `[g(r−), g(l)]`, so the supremum is `max(|c − g(l)|, |c − g(r−)|)`.
/// Past the support `f = 0` and the supremum is `g(end)`.
pub fn sup_distance<G: Reference + ?Sized>(f: &StepFunction, g: &G) -> Result<f64> {
    if !g.is_decreasing() {
        return Err(Error::NonMonotoneReference);
    }
    let mut sup = 0.0f64;
    for (l, r, c) in f.segments() {
        sup = sup
            .max((c - g.value(l)).abs())
            .max((c - g.left_limit(r)).abs());
    }
    Ok(sup.max(g.value(f.support_end()).abs()))
}

/// Where [`restricted_distance`] measures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Region {
    /// Closed interval `[lo, hi]`; `hi` may be `f64::INFINITY`.
    Interval {
        lo: f64,
        hi: f64,
    },
    Point(f64),
}

impl Region {
    pub fn everywhere() -> Self {
        Region::Interval {
            lo: 0.0,
            hi: f64::INFINITY,
        }
    }
}

/// `sup |f − g|` over a closed interval, or `|f(x) − g(x)|` at a point.
pub fn restricted_distance<G: Reference + ?Sized>(
    f: &StepFunction,
    g: &G,
    region: Region,
) -> Result<f64> {
    if !g.is_decreasing() {
        return Err(Error::NonMonotoneReference);
    }
    match region {
        Region::Point(x) => {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(domain("x", x, "finite x >= 0"));
            }
            Ok((f.eval(x) - g.value(x)).abs())
        }
        Region::Interval { lo, hi } => {
            if !(lo >= 0.0 && lo.is_finite()) {
                return Err(domain("lo", lo, "finite lo >= 0"));
            }
            if hi.is_nan() || hi < lo {
                return Err(domain("hi", hi, "hi >= lo"));
            }
            let mut sup = 0.0f64;
            for (l, r, c) in f.segments() {
                if r <= lo {
                    continue;
                }
                if l > hi {
                    break;
                }
                let start = l.max(lo);
                sup = sup.max((c - g.value(start)).abs());
                let end_term = if hi < r { g.value(hi) } else { g.left_limit(r) };
                sup = sup.max((c - end_term).abs());
            }
            let tail_start = f.support_end().max(lo);
            if tail_start <= hi {
                sup = sup.max(g.value(tail_start).abs());
            }
            Ok(sup)
        }
    }
}

/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn sum(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Largest `n` for which [`UniformPartitions`] counts fit in `u128`.
pub const MAX_UNIFORM_N: u64 = 1200;

/// Uniform sampler over the partitions of every `n` up to a fixed maximum.
///
/// Keeps the table `q[m][k]` = number of partitions of `m` with parts at
/// most `k`, and draws the parts largest-first.
#[derive(Clone, Debug)]
pub struct UniformPartitions {
    max_n: usize,
    counts: Vec<u128>,
}

impl UniformPartitions {
    pub fn new(max_n: u64) -> Result<Self> {
        if max_n > MAX_UNIFORM_N {
            return Err(Error::CapExceeded {
                n: max_n,
                cap: MAX_UNIFORM_N,
            });
        }
        let size = max_n as usize + 1;
        let mut counts = vec![0u128; size * size];
        counts[..size].fill(1);
        for m in 1..size {
            for k in 1..size {
                let without_k = counts[m * size + k - 1];
                let with_k = if k <= m {
                    counts[(m - k) * size + k]
                } else {
                    0
                };
                counts[m * size + k] = without_k + with_k;
            }
        }
        Ok(UniformPartitions {
            max_n: max_n as usize,
            counts,
        })
    }

    fn q(&self, m: usize, k: usize) -> u128 {
        self.counts[m * (self.max_n + 1) + k.min(m)]
    }

    /// Number of partitions of `n`.
    pub fn count(&self, n: u64) -> u128 {
        self.q(n as usize, n as usize)
    }

    pub fn sample<R: Rng + ?Sized>(&self, n: u64, rng: &mut R) -> Result<Partition> {
        if n as usize > self.max_n {
            return Err(Error::CapExceeded {
                n,
                cap: self.max_n as u64,
            });
        }
        let mut parts = Vec::new();
        let mut m = n as usize;
        let mut k = m;
        while m > 0 {
            let mut r = rng.random_range(0..self.q(m, k));
            let mut j = k.min(m);
            loop {
                let w = self.q(m - j, j);
                if r < w {
                    break;
                }
                r -= w;
                j -= 1;
            }
            parts.push(j as u64);
            m -= j;
            k = j;
        }
        Ok(Partition { parts, n })
    }
}
