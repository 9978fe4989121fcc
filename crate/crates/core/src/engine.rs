//! Game dynamics and seeded trajectory generation.
//!
//! Three variants share the same interface:
//!
//! * **deterministic**: one card from every pile forms the new pile;
//! * **card-based**: every card joins the new pile independently with
//!   probability `p`;
//! * **pile-based**: every pile independently gives up one card with
//!   probability `p`.
//!
//! Card-based states are weak compositions in bowl order (newest bowl
//! first); the other two variants live on sorted partitions.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::partition::{sup_distance, Diagram, Partition, Shape, WeakComposition};
use crate::rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Deterministic,
    CardBased,
    PileBased,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Deterministic => "deterministic",
            Variant::CardBased => "card_based",
            Variant::PileBased => "pile_based",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "deterministic" | "det" => Ok(Variant::Deterministic),
            "card" | "card_based" | "card-based" => Ok(Variant::CardBased),
            "pile" | "pile_based" | "pile-based" | "popov" => Ok(Variant::PileBased),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "expected one of deterministic, card, pile".into(),
            }),
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub n: u64,
    pub p: f64,
    pub variant: Variant,
    pub master_seed: u64,
}

impl GameParams {
    pub fn new(n: u64, p: f64, variant: Variant, master_seed: u64) -> Result<Self> {
        let params = GameParams {
            n,
            p,
            variant,
            master_seed,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(domain("n", self.n, "n >= 1"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(domain("p", self.p, "0 <= p <= 1"));
        }
        Ok(())
    }
}

/// A configuration in the representation its variant uses.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameState {
    Partition(Partition),
    Composition(WeakComposition),
}

impl GameState {
    pub fn n(&self) -> u64 {
        match self {
            GameState::Partition(p) => p.n(),
            GameState::Composition(c) => c.n(),
        }
    }

    /// The sorted partition of this state.
    pub fn to_partition(&self) -> Partition {
        match self {
            GameState::Partition(p) => p.clone(),
            GameState::Composition(c) => c.ord(),
        }
    }

    pub fn pile_count(&self) -> usize {
        match self {
            GameState::Partition(p) => p.len(),
            GameState::Composition(c) => c.parts().iter().filter(|&&x| x > 0).count(),
        }
    }

    fn into_composition(self) -> WeakComposition {
        match self {
            GameState::Partition(p) => WeakComposition::from(&p),
            GameState::Composition(c) => c,
        }
    }

    fn into_partition(self) -> Partition {
        match self {
            GameState::Partition(p) => p,
            GameState::Composition(c) => c.ord(),
        }
    }
}

impl From<Partition> for GameState {
    fn from(p: Partition) -> Self {
        GameState::Partition(p)
    }
}

impl From<WeakComposition> for GameState {
    fn from(c: WeakComposition) -> Self {
        GameState::Composition(c)
    }
}

/// `(k, k−1, …, 1)` with `k` maximal such that `T_k ≤ n`, and the
/// `r = n − T_k` leftover cards added one each to the `r` largest piles.
pub fn triangular_start(n: u64) -> Result<Partition> {
    if n == 0 {
        return Err(domain("n", n, "n >= 1"));
    }
    let k = triangular_root(n);
    let r = n - k * (k + 1) / 2;
    let parts = (0..k).map(|i| k - i + u64::from(i < r)).collect();
    Partition::new(parts)
}

/// Largest `k` with `k(k+1)/2 ≤ n`.
pub fn triangular_root(n: u64) -> u64 {
    let mut k = (((8.0 * n as f64 + 1.0).sqrt() - 1.0) / 2.0) as u64;
    while k * (k + 1) / 2 > n {
        k -= 1;
    }
    while (k + 1) * (k + 2) / 2 <= n {
        k += 1;
    }
    k
}

/// An exact `Binomial(count, p)` draw (inversion for small means, BTPE
/// otherwise).
pub fn binomial_sample<R: Rng + ?Sized>(count: u64, p: f64, rng: &mut R) -> u64 {
    if count == 0 || p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return count;
    }
    Binomial::new(count, p)
        .expect("p checked to lie in (0, 1)")
        .sample(rng)
}

/// One round of the deterministic game.
pub fn move_deterministic(lambda: &Partition) -> Partition {
    let new_pile = lambda.len() as u64;
    Partition::from_unsorted(
        lambda
            .parts()
            .iter()
            .map(|&x| x - 1)
            .chain(std::iter::once(new_pile)),
    )
}

/// One round of the card-based game.
///
/// Each nonempty bowl loses a `Binomial(α_k, p)` number of cards; they form
/// a new bowl at the front (kept even when empty) and every old bowl moves
/// one place to the right.
pub fn move_card_based<R: Rng + ?Sized>(
    alpha: &WeakComposition,
    p: f64,
    rng: &mut R,
) -> WeakComposition {
    let mut next = Vec::with_capacity(alpha.len() + 1);
    next.push(0);
    let mut picked = 0;
    for &count in alpha.parts() {
        let taken = if count > 0 {
            binomial_sample(count, p, rng)
        } else {
            0
        };
        picked += taken;
        next.push(count - taken);
    }
    next[0] = picked;
    WeakComposition::new(next)
}

/// One round of the pile-based game. An empty new pile is dropped.
pub fn move_pile_based<R: Rng + ?Sized>(lambda: &Partition, p: f64, rng: &mut R) -> Partition {
    pile_based_round(lambda, p, rng).0
}

/// [`move_pile_based`] that also returns the size of the new pile.
pub fn pile_based_round<R: Rng + ?Sized>(
    lambda: &Partition,
    p: f64,
    rng: &mut R,
) -> (Partition, u64) {
    let mut released = 0;
    let mut piles = Vec::with_capacity(lambda.len() + 1);
    for &size in lambda.parts() {
        if rng.random_bool(p) {
            released += 1;
            piles.push(size - 1);
        } else {
            piles.push(size);
        }
    }
    piles.push(released);
    (Partition::from_unsorted(piles), released)
}

/// One round of either partition-level variant, with the new pile size.
fn partition_round<R: Rng + ?Sized>(
    variant: Variant,
    lambda: &Partition,
    p: f64,
    rng: &mut R,
) -> (Partition, u64) {
    match variant {
        Variant::Deterministic => (move_deterministic(lambda), lambda.len() as u64),
        _ => pile_based_round(lambda, p, rng),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Bowl {
    /// Round in which the bowl was filled; bowls of the initial state get
    /// `1 - position` so that `index = round - birth + 1` holds throughout.
    birth: i64,
    count: u64,
}

/// Card-based game state that stores only nonempty bowls.
///
/// A round costs O(nonempty bowls) rather than O(rounds played). Consumes
/// randomness exactly as [`move_card_based`] does, so both produce the same
/// trajectory from the same stream.
#[derive(Clone, Debug)]
pub struct BowlChain {
    n: u64,
    round: u64,
    initial_len: usize,
    bowls: VecDeque<Bowl>,
}

impl BowlChain {
    pub fn new(initial: &WeakComposition) -> Self {
        let bowls = initial
            .parts()
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &count)| Bowl {
                birth: -(i as i64),
                count,
            })
            .collect();
        BowlChain {
            n: initial.n(),
            round: 0,
            initial_len: initial.len(),
            bowls,
        }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn nonempty_bowls(&self) -> usize {
        self.bowls.len()
    }

    /// Plays one round and returns the size of the new pile.
    pub fn step<R: Rng + ?Sized>(&mut self, p: f64, rng: &mut R) -> u64 {
        let mut picked = 0;
        for bowl in self.bowls.iter_mut() {
            let taken = binomial_sample(bowl.count, p, rng);
            bowl.count -= taken;
            picked += taken;
        }
        self.bowls.retain(|b| b.count > 0);
        self.round += 1;
        if picked > 0 {
            self.bowls.push_front(Bowl {
                birth: self.round as i64,
                count: picked,
            });
        }
        picked
    }

    /// Cards in bowl `k` (1-based, newest first).
    pub fn bowl(&self, k: u64) -> u64 {
        assert!(k >= 1, "bowls are indexed from 1");
        let birth = self.round as i64 - k as i64 + 1;
        // births strictly decrease from the front
        let idx = self.bowls.partition_point(|b| b.birth > birth);
        match self.bowls.get(idx) {
            Some(b) if b.birth == birth => b.count,
            _ => 0,
        }
    }

    /// Dense view with one entry per bowl ever used.
    pub fn to_composition(&self) -> WeakComposition {
        let len = self.initial_len + self.round as usize;
        let mut parts = vec![0; len];
        for b in &self.bowls {
            let idx = (self.round as i64 - b.birth) as usize;
            parts[idx] = b.count;
        }
        WeakComposition::new(parts)
    }

    pub fn to_partition(&self) -> Partition {
        Partition::from_unsorted(self.bowls.iter().map(|b| b.count))
    }
}

/// Every state of a run, plus the new pile formed in each round.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub params: GameParams,
    pub states: Vec<GameState>,
    pub new_piles: Vec<u64>,
}

impl Trajectory {
    /// Rounds played, `m`.
    pub fn rounds(&self) -> usize {
        self.states.len() - 1
    }

    pub fn initial(&self) -> &GameState {
        &self.states[0]
    }

    pub fn terminal(&self) -> &GameState {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }
}

fn check_initial(params: &GameParams, initial: &GameState) -> Result<()> {
    params.validate()?;
    if initial.n() != params.n {
        return Err(Error::SizeMismatch {
            expected: params.n,
            found: initial.n(),
        });
    }
    Ok(())
}

/// Plays `m` rounds from `initial`, recording every state.
///
/// Randomness comes from stream 0 of `params.master_seed`. Card-based runs
/// convert a partition start into bowls in part order.
pub fn play(params: &GameParams, initial: GameState, m: u64) -> Result<Trajectory> {
    let mut rng = rng::stream(params.master_seed, 0);
    play_with_rng(params, initial, m, &mut rng)
}

pub fn play_with_rng<R: Rng + ?Sized>(
    params: &GameParams,
    initial: GameState,
    m: u64,
    rng: &mut R,
) -> Result<Trajectory> {
    check_initial(params, &initial)?;
    let mut states = Vec::with_capacity(m as usize + 1);
    let mut new_piles = Vec::with_capacity(m as usize);
    match params.variant {
        Variant::CardBased => {
            let mut alpha = initial.into_composition();
            states.push(GameState::Composition(alpha.clone()));
            for _ in 0..m {
                alpha = move_card_based(&alpha, params.p, rng);
                new_piles.push(alpha.part(1));
                states.push(GameState::Composition(alpha.clone()));
            }
        }
        Variant::Deterministic | Variant::PileBased => {
            let mut lambda = initial.into_partition();
            states.push(GameState::Partition(lambda.clone()));
            for _ in 0..m {
                let (next, released) = partition_round(params.variant, &lambda, params.p, rng);
                lambda = next;
                new_piles.push(released);
                states.push(GameState::Partition(lambda.clone()));
            }
        }
    }
    Ok(Trajectory {
        params: *params,
        states,
        new_piles,
    })
}

/// Per-round record kept by [`play_streaming`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundSummary {
    pub round: u64,
    pub new_pile: u64,
    pub piles: u64,
    /// Distance of the rescaled sorted state to the reference, when requested.
    pub sup_distance: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StreamOptions {
    /// Record a distance every this many rounds (0 = never). The terminal
    /// round is always measured when this is nonzero.
    pub distance_every: u64,
    /// Scaling factor for the distance; defaults to `1/p`.
    pub scale: Option<f64>,
    pub reference: Shape,
}

impl Default for StreamOptions {
    fn default() -> Self {
        StreamOptions {
            distance_every: 0,
            scale: None,
            reference: Shape::Exponential,
        }
    }
}

/// Result of a streaming run: per-round summaries and the final state.
#[derive(Clone, Debug, PartialEq)]
pub struct StreamRun {
    pub summaries: Vec<RoundSummary>,
    pub terminal: GameState,
}

/// Like [`play`] but keeps only per-round summaries; memory is O(m + ℓ).
pub fn play_streaming(
    params: &GameParams,
    initial: GameState,
    m: u64,
    options: StreamOptions,
) -> Result<StreamRun> {
    check_initial(params, &initial)?;
    let scale = match options.scale {
        Some(a) if a > 0.0 => a,
        Some(a) => return Err(domain("scale", a, "scale > 0")),
        None if params.p > 0.0 => 1.0 / params.p,
        None => 1.0,
    };
    let due = |round: u64| {
        let every = options.distance_every;
        every > 0 && (round.is_multiple_of(every) || round == m)
    };
    let measure = |lambda: &Partition| -> Result<f64> {
        let f = lambda.rescaled_boundary(scale)?;
        sup_distance(&f, &options.reference)
    };
    let mut rng = rng::stream(params.master_seed, 0);
    let mut summaries = Vec::with_capacity(m as usize);
    let terminal = match params.variant {
        Variant::CardBased => {
            let mut chain = BowlChain::new(&initial.into_composition());
            for round in 1..=m {
                let new_pile = chain.step(params.p, &mut rng);
                let sup_distance = if due(round) {
                    Some(measure(&chain.to_partition())?)
                } else {
                    None
                };
                summaries.push(RoundSummary {
                    round,
                    new_pile,
                    piles: chain.nonempty_bowls() as u64,
                    sup_distance,
                });
            }
            GameState::Composition(chain.to_composition())
        }
        Variant::Deterministic | Variant::PileBased => {
            let mut lambda = initial.into_partition();
            for round in 1..=m {
                let (next, new_pile) = partition_round(params.variant, &lambda, params.p, &mut rng);
                lambda = next;
                summaries.push(RoundSummary {
                    round,
                    new_pile,
                    piles: lambda.len() as u64,
                    sup_distance: if due(round) {
                        Some(measure(&lambda)?)
                    } else {
                        None
                    },
                });
            }
            GameState::Partition(lambda)
        }
    };
    Ok(StreamRun {
        summaries,
        terminal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{ord, Exponential};

    fn part(v: &[u64]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    fn comp(v: &[u64]) -> WeakComposition {
        WeakComposition::new(v.to_vec())
    }

    #[test]
    fn deterministic_moves() {
        assert_eq!(
            move_deterministic(&part(&[4, 4, 2, 1, 1])),
            part(&[5, 3, 3, 1])
        );
        assert_eq!(move_deterministic(&part(&[2])), part(&[1, 1]));
        assert_eq!(move_deterministic(&part(&[3, 2, 1])), part(&[3, 2, 1]));
        for k in 1..30 {
            let tri = Partition::new((1..=k).rev().collect()).unwrap();
            assert_eq!(move_deterministic(&tri), tri);
        }
    }

    #[test]
    fn deterministic_run_from_single_pile() {
        let params = GameParams::new(6, 0.5, Variant::Deterministic, 1).unwrap();
        let t = play(&params, part(&[6]).into(), 3).unwrap();
        let states: Vec<Partition> = t.states.iter().map(GameState::to_partition).collect();
        assert_eq!(
            states,
            vec![part(&[6]), part(&[5, 1]), part(&[4, 2]), part(&[3, 2, 1])]
        );
        assert_eq!(t.new_piles, vec![1, 2, 2]);
        assert_eq!(t.rounds(), 3);
    }

    #[test]
    fn zero_rounds_keeps_only_initial() {
        for variant in [
            Variant::Deterministic,
            Variant::CardBased,
            Variant::PileBased,
        ] {
            let params = GameParams::new(5, 0.3, variant, 9).unwrap();
            let t = play(&params, part(&[3, 2]).into(), 0).unwrap();
            assert_eq!(t.states.len(), 1);
            assert!(t.new_piles.is_empty());
        }
    }

    #[test]
    fn triangular_starts() {
        assert_eq!(triangular_start(6).unwrap(), part(&[3, 2, 1]));
        assert_eq!(triangular_start(7).unwrap(), part(&[4, 2, 1]));
        assert_eq!(triangular_start(9).unwrap(), part(&[4, 3, 2]));
        assert_eq!(triangular_start(1).unwrap(), part(&[1]));
        assert!(triangular_start(0).is_err());
        for n in 1..2000u64 {
            let k = triangular_root(n);
            assert!(k * (k + 1) / 2 <= n && (k + 1) * (k + 2) / 2 > n);
            assert_eq!(triangular_start(n).unwrap().n(), n);
        }
    }

    #[test]
    fn card_move_edge_probabilities() {
        let mut rng = rng::stream(3, 0);
        let a = comp(&[3, 0, 2]);
        assert_eq!(move_card_based(&a, 0.0, &mut rng), comp(&[0, 3, 0, 2]));
        assert_eq!(move_card_based(&a, 1.0, &mut rng), comp(&[5, 0, 0, 0]));
    }

    #[test]
    fn pile_move_edge_probabilities() {
        let mut rng = rng::stream(3, 0);
        let lam = part(&[4, 4, 2, 1, 1]);
        assert_eq!(move_pile_based(&lam, 0.0, &mut rng), lam);
        assert_eq!(
            move_pile_based(&lam, 1.0, &mut rng),
            move_deterministic(&lam)
        );
        let (next, released) = pile_based_round(&lam, 0.0, &mut rng);
        assert_eq!((next, released), (lam, 0));
    }

    #[test]
    fn binomial_edges_and_mean() {
        let mut rng = rng::stream(11, 0);
        assert_eq!(binomial_sample(1000, 0.0, &mut rng), 0);
        assert_eq!(binomial_sample(1000, 1.0, &mut rng), 1000);
        assert_eq!(binomial_sample(0, 0.4, &mut rng), 0);
        let draws = 1_000_000u64;
        let total: u64 = (0..draws)
            .map(|_| binomial_sample(100, 0.3, &mut rng))
            .sum();
        let mean = total as f64 / draws as f64;
        assert!(
            (mean - 30.0).abs() <= 4.0 * (21.0f64 / 1e6).sqrt(),
            "{mean}"
        );
    }

    #[test]
    fn pile_new_pile_from_two_singletons_is_bin_2_p() {
        let p = 0.3;
        let trials = 200_000;
        let mut rng = rng::stream(5, 0);
        let mut counts = [0u64; 3];
        for _ in 0..trials {
            let (_, released) = pile_based_round(&part(&[1, 1]), p, &mut rng);
            counts[released as usize] += 1;
        }
        let expected = [(1.0 - p) * (1.0 - p), 2.0 * p * (1.0 - p), p * p];
        for (c, e) in counts.iter().zip(expected) {
            let freq = *c as f64 / trials as f64;
            let se = (e * (1.0 - e) / trials as f64).sqrt();
            assert!((freq - e).abs() < 5.0 * se, "{freq} vs {e}");
        }
    }

    #[test]
    fn cards_are_conserved() {
        for variant in [
            Variant::Deterministic,
            Variant::CardBased,
            Variant::PileBased,
        ] {
            let params = GameParams::new(500, 0.07, variant, 77).unwrap();
            let t = play(&params, triangular_start(500).unwrap().into(), 300).unwrap();
            assert!(t.states.iter().all(|s| s.n() == 500));
            assert_eq!(t.states.len(), 301);
        }
    }

    #[test]
    fn runs_are_reproducible() {
        let params = GameParams::new(1000, 0.05, Variant::CardBased, 2024).unwrap();
        let a = play(&params, part(&[1000]).into(), 100).unwrap();
        let b = play(&params, part(&[1000]).into(), 100).unwrap();
        assert_eq!(a, b);
        let other = GameParams::new(1000, 0.05, Variant::CardBased, 2025).unwrap();
        let c = play(&other, part(&[1000]).into(), 100).unwrap();
        assert_ne!(a.new_piles, c.new_piles);
    }

    #[test]
    fn sparse_chain_matches_dense_moves() {
        let start = comp(&[5, 0, 7, 3, 0, 1]);
        let p = 0.2;
        let mut dense_rng = rng::stream(99, 0);
        let mut sparse_rng = rng::stream(99, 0);
        let mut dense = start.clone();
        let mut chain = BowlChain::new(&start);
        for _ in 0..200 {
            dense = move_card_based(&dense, p, &mut dense_rng);
            let new_pile = chain.step(p, &mut sparse_rng);
            assert_eq!(new_pile, dense.part(1));
            assert_eq!(chain.to_composition(), dense);
            assert_eq!(chain.to_partition(), ord(&dense));
            for k in 1..=dense.len() as u64 + 2 {
                assert_eq!(chain.bowl(k), dense.part(k as usize));
            }
        }
    }

    #[test]
    fn streaming_matches_full_trajectory() {
        for variant in [
            Variant::Deterministic,
            Variant::CardBased,
            Variant::PileBased,
        ] {
            let params = GameParams::new(300, 0.1, variant, 8).unwrap();
            let start: GameState = triangular_start(300).unwrap().into();
            let full = play(&params, start.clone(), 60).unwrap();
            let options = StreamOptions {
                distance_every: 7,
                ..StreamOptions::default()
            };
            let run = play_streaming(&params, start, 60, options).unwrap();
            assert_eq!(&run.terminal, full.terminal());
            let piles: Vec<u64> = run.summaries.iter().map(|s| s.new_pile).collect();
            assert_eq!(piles, full.new_piles);
            let measured: Vec<u64> = run
                .summaries
                .iter()
                .filter(|s| s.sup_distance.is_some())
                .map(|s| s.round)
                .collect();
            assert_eq!(measured, vec![7, 14, 21, 28, 35, 42, 49, 56, 60]);
            let last = run.summaries.last().unwrap().sup_distance.unwrap();
            let f = full
                .terminal()
                .to_partition()
                .rescaled_boundary(10.0)
                .unwrap();
            assert_eq!(last, sup_distance(&f, &Exponential::STANDARD).unwrap());
        }
    }

    #[test]
    fn never_picked_mass() {
        // P(all cards picked at least once within m rounds) = (1-(1-p)^m)^n
        let (n, m, p) = (3u64, 2u64, 0.5);
        let trials = 100_000;
        let mut rng = rng::stream(12, 0);
        let mut cleared = 0u64;
        for _ in 0..trials {
            let mut chain = BowlChain::new(&comp(&[n]));
            for _ in 0..m {
                chain.step(p, &mut rng);
            }
            if (m + 1..=m + 1).all(|k| chain.bowl(k) == 0) {
                cleared += 1;
            }
        }
        let expected = (1.0 - (1.0 - p).powi(m as i32)).powi(n as i32);
        let freq = cleared as f64 / trials as f64;
        let se = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!((freq - expected).abs() < 5.0 * se, "{freq} vs {expected}");
    }

    #[test]
    fn size_mismatch_and_bad_params_rejected() {
        let params = GameParams::new(5, 0.3, Variant::PileBased, 0).unwrap();
        assert!(matches!(
            play(&params, part(&[4]).into(), 1),
            Err(Error::SizeMismatch {
                expected: 5,
                found: 4
            })
        ));
        assert!(GameParams::new(0, 0.3, Variant::PileBased, 0).is_err());
        assert!(GameParams::new(5, 1.5, Variant::PileBased, 0).is_err());
        assert!(GameParams::new(5, f64::NAN, Variant::CardBased, 0).is_err());
    }

    #[test]
    fn variant_names_parse() {
        for v in [
            Variant::Deterministic,
            Variant::CardBased,
            Variant::PileBased,
        ] {
            assert_eq!(v.name().parse::<Variant>().unwrap(), v);
        }
        assert_eq!("popov".parse::<Variant>().unwrap(), Variant::PileBased);
        assert!("cards".parse::<Variant>().is_err());
    }
}
