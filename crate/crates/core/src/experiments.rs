//! Ensemble experiments: limit-shape deviation, stationary sampling, cycle
//! detection for the deterministic game, bowl marginals and the pile-based
//! comparison.
//!
//! Every trial `t` draws from `rng::stream(master_seed, t)` and trials run
//! in parallel; outputs are collected in trial order, so reports do not
//! depend on the thread count.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{finite_n_bound, DeviationBound};
use crate::engine::{
    move_deterministic, move_pile_based, triangular_root, BowlChain, GameParams, Variant,
};
use crate::error::{domain, Error, Result};
use crate::exact::{enumerate_partitions, DistributionVector, DEFAULT_CAP};
use crate::partition::{
    sup_distance, Diagram, Exponential, Partition, Reference, Shape, StepFunction, WeakComposition,
};
use crate::rng;

/// Order statistics of a sample (linear interpolation between ranks).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub q10: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub q90: f64,
    pub max: f64,
}

impl Quantiles {
    pub fn from_values(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q = |u: f64| {
            let h = u * (sorted.len() - 1) as f64;
            let lo = h.floor() as usize;
            let hi = h.ceil() as usize;
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        };
        Some(Quantiles {
            min: sorted[0],
            q10: q(0.1),
            q25: q(0.25),
            median: q(0.5),
            q75: q(0.75),
            q90: q(0.9),
            max: sorted[sorted.len() - 1],
        })
    }
}

/// One trajectory of a limit-shape experiment.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    /// Seed of the trial's random stream.
    pub seed: u64,
    /// Distance of the sorted terminal state to `e^{-x}` at scaling `1/p`.
    pub sup_distance: f64,
    /// Same distance measured on the unsorted bowl sequence.
    pub composition_distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub params: GameParams,
    pub initial: Partition,
    pub m: u64,
    pub epsilon: f64,
    pub trials: u64,
    pub count_within: u64,
    pub empirical_prob: f64,
    pub quantiles: Quantiles,
    pub bound: DeviationBound,
    pub outcomes: Vec<TrialOutcome>,
}

impl DeviationReport {
    /// Trials whose sorted distance is at most `threshold`.
    pub fn count_within(&self, threshold: f64) -> u64 {
        self.outcomes
            .iter()
            .filter(|o| o.sup_distance <= threshold)
            .count() as u64
    }

    pub fn master_seed(&self) -> u64 {
        self.params.master_seed
    }
}

fn require_card_based(params: &GameParams) -> Result<()> {
    params.validate()?;
    if params.variant != Variant::CardBased {
        return Err(domain("variant", params.variant, "card_based"));
    }
    if !(params.p > 0.0 && params.p < 1.0) {
        return Err(domain("p", params.p, "0 < p < 1"));
    }
    Ok(())
}

fn require_size(params: &GameParams, initial: &Partition) -> Result<()> {
    if initial.n() != params.n {
        return Err(Error::SizeMismatch {
            expected: params.n,
            found: initial.n(),
        });
    }
    Ok(())
}

/// Runs `trials` independent card-based games of `m` rounds and measures
/// the `1/p`-rescaled terminal diagram against `e^{-x}`.
pub fn limit_shape_experiment(
    params: &GameParams,
    initial: &Partition,
    m: u64,
    epsilon: f64,
    trials: u64,
) -> Result<DeviationReport> {
    require_card_based(params)?;
    require_size(params, initial)?;
    if m == 0 {
        return Err(domain("m", m, "m >= 1"));
    }
    if trials == 0 {
        return Err(domain("trials", trials, "trials >= 1"));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(domain("epsilon", epsilon, "epsilon > 0"));
    }
    let bound = finite_n_bound(params.n, params.p, epsilon, m)?;
    let start = WeakComposition::from(initial);
    let scale = 1.0 / params.p;
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<TrialOutcome> {
            let seed = rng::stream_seed(params.master_seed, trial);
            let mut rng = rng::stream(params.master_seed, trial);
            let mut chain = BowlChain::new(&start);
            for _ in 0..m {
                chain.step(params.p, &mut rng);
            }
            let sorted = chain.to_partition().rescaled_boundary(scale)?;
            let raw = chain.to_composition().rescaled_boundary(scale)?;
            Ok(TrialOutcome {
                trial,
                seed,
                sup_distance: sup_distance(&sorted, &Exponential::STANDARD)?,
                composition_distance: sup_distance(&raw, &Exponential::STANDARD)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let distances: Vec<f64> = outcomes.iter().map(|o| o.sup_distance).collect();
    let count_within = distances.iter().filter(|&&d| d <= epsilon).count() as u64;
    Ok(DeviationReport {
        params: *params,
        initial: initial.clone(),
        m,
        epsilon,
        trials,
        count_within,
        empirical_prob: count_within as f64 / trials as f64,
        quantiles: Quantiles::from_values(&distances).expect("trials >= 1"),
        bound,
        outcomes,
    })
}

/// Default burn-in: `10·⌈1/p⌉` rounds.
pub fn default_burn_in(p: f64) -> u64 {
    10 * (1.0 / p).ceil() as u64
}

/// Sup-distance statistics of states sampled from one long chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryStats {
    pub n: u64,
    pub p: f64,
    pub samples: u64,
    pub mean: f64,
    pub quantiles: Quantiles,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StationaryOutcome {
    /// Empirical law over the canonical partition order (small `n`).
    Distribution(DistributionVector),
    /// Distance statistics (large `n`).
    Deviation(StationaryStats),
}

/// Samples the card-based chain: discards `burn_in` rounds, then records
/// every `thinning`-th state until `samples` states are collected.
///
/// For `n` within the exact oracle's cap the result is an empirical
/// distribution; otherwise sup-distance statistics at scaling `1/p`.
pub fn stationary_experiment(
    params: &GameParams,
    initial: &Partition,
    burn_in: u64,
    samples: u64,
    thinning: u64,
) -> Result<StationaryOutcome> {
    require_card_based(params)?;
    require_size(params, initial)?;
    if samples == 0 {
        return Err(domain("samples", samples, "samples >= 1"));
    }
    if thinning == 0 {
        return Err(domain("thinning", thinning, "thinning >= 1"));
    }
    let mut rng = rng::stream(params.master_seed, 0);
    let mut chain = BowlChain::new(&WeakComposition::from(initial));
    for _ in 0..burn_in {
        chain.step(params.p, &mut rng);
    }
    let mut sample = |chain: &mut BowlChain| {
        for _ in 0..thinning {
            chain.step(params.p, &mut rng);
        }
        chain.to_partition()
    };
    if params.n <= DEFAULT_CAP {
        let index = enumerate_partitions(params.n)?;
        let mut counts = vec![0u64; index.len()];
        for _ in 0..samples {
            let lambda = sample(&mut chain);
            counts[index.index_of(&lambda).expect("states partition n")] += 1;
        }
        Ok(StationaryOutcome::Distribution(
            DistributionVector::from_counts(params.n, &counts),
        ))
    } else {
        let scale = 1.0 / params.p;
        let mut distances = Vec::with_capacity(samples as usize);
        for _ in 0..samples {
            let f = sample(&mut chain).rescaled_boundary(scale)?;
            distances.push(sup_distance(&f, &Exponential::STANDARD)?);
        }
        let mean = distances.iter().sum::<f64>() / distances.len() as f64;
        Ok(StationaryOutcome::Deviation(StationaryStats {
            n: params.n,
            p: params.p,
            samples,
            mean,
            quantiles: Quantiles::from_values(&distances).expect("samples >= 1"),
        }))
    }
}

/// Eventual behaviour of the deterministic game from one start.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    pub initial: Partition,
    /// Rounds before the first cycle state is reached.
    pub tail_length: u64,
    pub cycle_length: u64,
    /// Cycle states in the order visited.
    pub cycle: Vec<Partition>,
    pub near_triangular: Vec<bool>,
}

/// Whether `lambda` arises from `(k, k−1, …, 1)` by adding at most one card
/// to each pile and possibly one more pile of size 1, where `k` is maximal
/// with `T_k ≤ n`.
pub fn is_near_triangular(lambda: &Partition) -> bool {
    let n = lambda.n();
    if n == 0 {
        return false;
    }
    let k = triangular_root(n) as usize;
    let len = lambda.len();
    if len != k && len != k + 1 {
        return false;
    }
    if len == k + 1 && lambda.part(k + 1) != 1 {
        return false;
    }
    (1..=k).all(|i| {
        let base = (k + 1 - i) as u64;
        let part = lambda.part(i);
        part == base || part == base + 1
    })
}

/// Iterates the deterministic move until a state repeats.
pub fn cycle_detect(initial: &Partition) -> CycleReport {
    let mut first_seen: HashMap<Partition, u64> = HashMap::new();
    let mut history = Vec::new();
    let mut state = initial.clone();
    let mut round = 0u64;
    let tail_length = loop {
        if let Some(&seen) = first_seen.get(&state) {
            break seen;
        }
        first_seen.insert(state.clone(), round);
        history.push(state.clone());
        state = move_deterministic(&state);
        round += 1;
    };
    let cycle: Vec<Partition> = history.split_off(tail_length as usize);
    let near_triangular = cycle.iter().map(is_near_triangular).collect();
    CycleReport {
        initial: initial.clone(),
        tail_length,
        cycle_length: cycle.len() as u64,
        cycle,
        near_triangular,
    }
}

/// Moment comparison of one bowl against `Bin(n, p(1−p)^{k−1})`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarginalStat {
    pub k: u64,
    pub trials: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub expected_mean: f64,
    pub expected_variance: f64,
    /// `(mean − expected_mean) / sqrt(expected_variance / trials)`.
    pub z_mean: f64,
    pub variance_ratio: f64,
}

/// Plays `trials` card-based games of `m` rounds and records the contents
/// of bowls `ks` at the end.
pub fn alpha_marginal_check(
    params: &GameParams,
    initial: &Partition,
    m: u64,
    ks: &[u64],
    trials: u64,
) -> Result<Vec<MarginalStat>> {
    params.validate()?;
    if params.variant != Variant::CardBased {
        return Err(domain("variant", params.variant, "card_based"));
    }
    require_size(params, initial)?;
    if trials < 2 {
        return Err(domain("trials", trials, "trials >= 2"));
    }
    if let Some(&k) = ks.iter().find(|&&k| k == 0 || k > m) {
        return Err(domain("k", k, "1 <= k <= m"));
    }
    let start = WeakComposition::from(initial);
    let draws: Vec<Vec<u64>> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng::stream(params.master_seed, trial);
            let mut chain = BowlChain::new(&start);
            for _ in 0..m {
                chain.step(params.p, &mut rng);
            }
            ks.iter().map(|&k| chain.bowl(k)).collect()
        })
        .collect();
    let n = params.n as f64;
    Ok(ks
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let (sum, sum_sq) = draws.iter().fold((0u128, 0u128), |(s, s2), row| {
                let x = u128::from(row[j]);
                (s + x, s2 + x * x)
            });
            let t = trials as f64;
            let mean = sum as f64 / t;
            // exact integer centering: T·Σx² − (Σx)²
            let centered = (u128::from(trials) * sum_sq - sum * sum) as f64;
            let variance = centered / (t * (t - 1.0));
            let q = params.p * (1.0 - params.p).powi((k - 1) as i32);
            let expected_mean = n * q;
            let expected_variance = n * q * (1.0 - q);
            let se = (expected_variance / t).sqrt();
            MarginalStat {
                k,
                trials,
                mean,
                variance,
                expected_mean,
                expected_variance,
                z_mean: if se > 0.0 {
                    (mean - expected_mean) / se
                } else if mean == expected_mean {
                    0.0
                } else {
                    f64::INFINITY
                },
                variance_ratio: if expected_variance > 0.0 {
                    variance / expected_variance
                } else if variance == 0.0 {
                    1.0
                } else {
                    f64::INFINITY
                },
            }
        })
        .collect())
}

/// Rescaled terminal diagrams of the pile-based game next to the card-based
/// and deterministic games at the same `(n, p, m)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PopovReport {
    pub n: u64,
    pub p: f64,
    pub m: u64,
    /// Scaling used for the pile-based snapshots, `sqrt(n/p)`.
    pub pile_scale: f64,
    pub pile_snapshots: Vec<StepFunction>,
    pub mean_piles: f64,
    /// Distances of the pile snapshots to the line `y = √2 − x`.
    pub triangle_distances: Vec<f64>,
    /// One card-based terminal state at scaling `1/p`.
    pub card_snapshot: StepFunction,
    /// Deterministic terminal state at scaling `sqrt(n)`.
    pub deterministic_snapshot: StepFunction,
}

/// The unit-area triangle `y = max(0, √2 − x)`.
pub fn unit_triangle(x: f64) -> f64 {
    Shape::Triangle.value(x)
}

/// Exploratory comparison; reports shapes only.
pub fn popov_comparison(
    n: u64,
    p: f64,
    m: u64,
    trials: u64,
    master_seed: u64,
    initial: &Partition,
) -> Result<PopovReport> {
    let params = GameParams::new(n, p, Variant::PileBased, master_seed)?;
    require_size(&params, initial)?;
    if p.is_nan() || p <= 0.0 {
        return Err(domain("p", p, "0 < p <= 1"));
    }
    if trials == 0 {
        return Err(domain("trials", trials, "trials >= 1"));
    }
    let pile_scale = (n as f64 / p).sqrt();
    let terminals: Vec<Partition> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = rng::stream(master_seed, trial);
            let mut lambda = initial.clone();
            for _ in 0..m {
                lambda = move_pile_based(&lambda, p, &mut rng);
            }
            lambda
        })
        .collect();
    let pile_snapshots = terminals
        .iter()
        .map(|l| l.rescaled_boundary(pile_scale))
        .collect::<Result<Vec<_>>>()?;
    let triangle_distances = pile_snapshots
        .iter()
        .map(|f| sup_distance(f, &Shape::Triangle))
        .collect::<Result<Vec<_>>>()?;
    let mean_piles = terminals.iter().map(|l| l.len() as f64).sum::<f64>() / terminals.len() as f64;

    let card_snapshot = if p < 1.0 {
        let mut rng = rng::stream(master_seed, trials);
        let mut chain = BowlChain::new(&WeakComposition::from(initial));
        for _ in 0..m {
            chain.step(p, &mut rng);
        }
        chain.to_partition().rescaled_boundary(1.0 / p)?
    } else {
        StepFunction::zero()
    };
    let mut det = initial.clone();
    for _ in 0..m {
        det = move_deterministic(&det);
    }
    Ok(PopovReport {
        n,
        p,
        m,
        pile_scale,
        pile_snapshots,
        mean_piles,
        triangle_distances,
        card_snapshot,
        deterministic_snapshot: det.rescaled_boundary((n as f64).sqrt())?,
    })
}
