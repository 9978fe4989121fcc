//! Exact card-based chain on the partitions of a small `n`.
//!
//! States are ordered reverse-lexicographically: `(n)`, `(n−1, 1)`,
//! `(n−2, 2)`, `(n−2, 1, 1)`, … This order is part of the CSV output format.

use std::collections::{HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::partition::Partition;

/// Default largest `n` the oracle will enumerate (135 states).
pub const DEFAULT_CAP: u64 = 14;

/// All partitions of `n` in canonical order, with reverse lookup.
#[derive(Clone, Debug)]
pub struct PartitionIndex {
    n: u64,
    partitions: Vec<Partition>,
    lookup: HashMap<Partition, usize>,
}

impl PartitionIndex {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn get(&self, i: usize) -> &Partition {
        &self.partitions[i]
    }

    pub fn index_of(&self, lambda: &Partition) -> Option<usize> {
        self.lookup.get(lambda).copied()
    }
}

pub fn enumerate_partitions(n: u64) -> Result<PartitionIndex> {
    enumerate_partitions_capped(n, DEFAULT_CAP)
}

pub fn enumerate_partitions_capped(n: u64, cap: u64) -> Result<PartitionIndex> {
    if n == 0 {
        return Err(domain("n", n, "n >= 1"));
    }
    if n > cap {
        return Err(Error::CapExceeded { n, cap });
    }
    let mut partitions = Vec::new();
    let mut prefix = Vec::new();
    descend(n, n, &mut prefix, &mut partitions);
    let lookup = partitions
        .iter()
        .enumerate()
        .map(|(i, p)| (p.clone(), i))
        .collect();
    Ok(PartitionIndex {
        n,
        partitions,
        lookup,
    })
}

fn descend(remaining: u64, max_part: u64, prefix: &mut Vec<u64>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition::new(prefix.clone()).expect("generated parts are decreasing"));
        return;
    }
    for first in (1..=remaining.min(max_part)).rev() {
        prefix.push(first);
        descend(remaining - first, first, prefix, out);
        prefix.pop();
    }
}

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(domain("p", p, "0 <= p <= 1"))
    }
}

/// `C(size, k) p^k (1−p)^{size−k}` for `k = 0..=size`.
fn pick_pmf(size: u64, p: f64) -> Vec<f64> {
    let q = 1.0 - p;
    let mut binom = 1.0f64;
    (0..=size)
        .map(|k| {
            if k > 0 {
                binom = binom * (size - k + 1) as f64 / k as f64;
            }
            binom * p.powi(k as i32) * q.powi((size - k) as i32)
        })
        .collect()
}

/// One row of the transition kernel: every reachable state with its
/// probability.
///
/// Enumerates all pick vectors `(k_1, …, k_ℓ)`, `0 ≤ k_i ≤ λ_i`; the next
/// state is `{λ_i − k_i > 0} ∪ {Σ k_i}` sorted.
pub fn transition_row(lambda: &Partition, p: f64) -> Result<HashMap<Partition, f64>> {
    check_p(p)?;
    let pmfs: Vec<Vec<f64>> = lambda.parts().iter().map(|&s| pick_pmf(s, p)).collect();
    let mut row = HashMap::new();
    let mut remaining = Vec::with_capacity(lambda.len() + 1);
    enumerate_picks(lambda.parts(), &pmfs, 0, 1.0, 0, &mut remaining, &mut row);
    Ok(row)
}

fn enumerate_picks(
    parts: &[u64],
    pmfs: &[Vec<f64>],
    i: usize,
    prob: f64,
    picked: u64,
    remaining: &mut Vec<u64>,
    row: &mut HashMap<Partition, f64>,
) {
    if prob == 0.0 {
        return;
    }
    if i == parts.len() {
        let next =
            Partition::from_unsorted(remaining.iter().copied().chain(std::iter::once(picked)));
        *row.entry(next).or_insert(0.0) += prob;
        return;
    }
    for (k, &w) in pmfs[i].iter().enumerate() {
        remaining.push(parts[i] - k as u64);
        enumerate_picks(
            parts,
            pmfs,
            i + 1,
            prob * w,
            picked + k as u64,
            remaining,
            row,
        );
        remaining.pop();
    }
}

/// `P(λ → μ)` for one round of the card-based game.
pub fn transition_probability(lambda: &Partition, mu: &Partition, p: f64) -> Result<f64> {
    if lambda.n() != mu.n() {
        return Err(Error::SizeMismatch {
            expected: lambda.n(),
            found: mu.n(),
        });
    }
    Ok(transition_row(lambda, p)?.get(mu).copied().unwrap_or(0.0))
}

/// Row-stochastic transition matrix over a [`PartitionIndex`].
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    pub index: PartitionIndex,
    pub p: f64,
    pub matrix: DMatrix<f64>,
}

pub fn transition_matrix(n: u64, p: f64) -> Result<TransitionMatrix> {
    transition_matrix_for(enumerate_partitions(n)?, p)
}

pub fn transition_matrix_for(index: PartitionIndex, p: f64) -> Result<TransitionMatrix> {
    check_p(p)?;
    let size = index.len();
    let mut matrix = DMatrix::zeros(size, size);
    for (i, lambda) in index.partitions().iter().enumerate() {
        for (mu, prob) in transition_row(lambda, p)? {
            let j = index.index_of(&mu).expect("moves preserve n");
            matrix[(i, j)] += prob;
        }
    }
    Ok(TransitionMatrix { index, p, matrix })
}

impl TransitionMatrix {
    pub fn size(&self) -> usize {
        self.index.len()
    }

    /// Largest `|Σ_j T_ij − 1|` over rows.
    pub fn row_sum_defect(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn has_positive_diagonal(&self) -> bool {
        (0..self.size()).all(|i| self.matrix[(i, i)] > 0.0)
    }

    /// Whether the graph of nonzero entries is strongly connected.
    pub fn is_irreducible(&self) -> bool {
        let size = self.size();
        #[allow(clippy::needless_range_loop)]
        let reaches_all = |forward: bool| {
            let mut seen = vec![false; size];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(i) = queue.pop_front() {
                for j in 0..size {
                    let w = if forward {
                        self.matrix[(i, j)]
                    } else {
                        self.matrix[(j, i)]
                    };
                    if w > 0.0 && !seen[j] {
                        seen[j] = true;
                        queue.push_back(j);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        size > 0 && reaches_all(true) && reaches_all(false)
    }

    /// `d · T`.
    pub fn apply(&self, d: &DistributionVector) -> Result<DistributionVector> {
        if d.probabilities.len() != self.size() {
            return Err(Error::SizeMismatch {
                expected: self.size() as u64,
                found: d.probabilities.len() as u64,
            });
        }
        let row = DVector::from_column_slice(&d.probabilities).transpose() * &self.matrix;
        Ok(DistributionVector {
            n: d.n,
            probabilities: row.iter().copied().collect(),
        })
    }

    /// `‖πT − π‖_∞`.
    pub fn residual(&self, pi: &DistributionVector) -> Result<f64> {
        let next = self.apply(pi)?;
        Ok(next
            .probabilities
            .iter()
            .zip(&pi.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Probabilities over the canonical partition order of `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistributionVector {
    pub n: u64,
    pub probabilities: Vec<f64>,
}

impl DistributionVector {
    pub fn point_mass(n: u64, size: usize, at: usize) -> Self {
        let mut probabilities = vec![0.0; size];
        probabilities[at] = 1.0;
        DistributionVector { n, probabilities }
    }

    /// Normalized empirical frequencies.
    pub fn from_counts(n: u64, counts: &[u64]) -> Self {
        let total: u64 = counts.iter().sum();
        let probabilities = counts
            .iter()
            .map(|&c| {
                if total == 0 {
                    0.0
                } else {
                    c as f64 / total as f64
                }
            })
            .collect();
        DistributionVector { n, probabilities }
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// The unique stationary law of the card-based chain, by direct solve.
pub fn stationary_exact(n: u64, p: f64) -> Result<DistributionVector> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("p", p, "0 < p < 1"));
    }
    stationary_solve(&transition_matrix(n, p)?)
}

/// Solves `π(T − I) = 0` with the last balance equation replaced by
/// `Σ π = 1`.
pub fn stationary_solve(t: &TransitionMatrix) -> Result<DistributionVector> {
    let size = t.size();
    let mut a = t.matrix.transpose() - DMatrix::identity(size, size);
    for j in 0..size {
        a[(size - 1, j)] = 1.0;
    }
    let mut b = DVector::zeros(size);
    b[size - 1] = 1.0;
    let x = a.lu().solve(&b).ok_or(Error::Solver("singular system"))?;
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Solver("non-finite solution"));
    }
    // clamp round-off negatives and renormalize
    let clamped: Vec<f64> = x.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    Ok(DistributionVector {
        n: t.index.n(),
        probabilities: clamped.into_iter().map(|v| v / total).collect(),
    })
}

/// Stationary law by power iteration from the uniform distribution, stopping
/// when successive iterates differ by at most `tol` in max-norm.
pub fn stationary_power(
    t: &TransitionMatrix,
    tol: f64,
    max_iter: usize,
) -> Result<DistributionVector> {
    let size = t.size();
    let mut d = DistributionVector {
        n: t.index.n(),
        probabilities: vec![1.0 / size as f64; size],
    };
    for _ in 0..max_iter {
        let next = t.apply(&d)?;
        let diff = next
            .probabilities
            .iter()
            .zip(&d.probabilities)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        d = next;
        if diff <= tol {
            return Ok(d);
        }
    }
    Err(Error::Solver("power iteration did not converge"))
}

/// `½ Σ |d₁ − d₂|`.
pub fn total_variation(d1: &DistributionVector, d2: &DistributionVector) -> Result<f64> {
    if d1.n != d2.n || d1.len() != d2.len() {
        return Err(Error::SizeMismatch {
            expected: d1.len() as u64,
            found: d2.len() as u64,
        });
    }
    Ok(0.5
        * d1.probabilities
            .iter()
            .zip(&d2.probabilities)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>())
}
