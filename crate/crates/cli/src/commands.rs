//! One function per subcommand.

use std::path::Path;

use bulgaria_core::bounds::{finite_n_bound, theorem_rate, uniform_conv_gap, DeviationBound};
use bulgaria_core::engine::{play, play_streaming, triangular_start, BowlChain, StreamOptions};
use bulgaria_core::exact::{
    enumerate_partitions, stationary_exact, stationary_solve, total_variation, transition_matrix,
};
use bulgaria_core::experiments::{
    alpha_marginal_check, cycle_detect, limit_shape_experiment, popov_comparison,
    stationary_experiment, PopovReport, StationaryOutcome,
};
use bulgaria_core::partition::{Shape, UniformPartitions};
use bulgaria_core::plot::write_svg_plot;
use bulgaria_core::report::{
    fmt_float, write_csv, write_json, CsvTable, DistributionTable, JsonDocument,
};
use bulgaria_core::{
    rng, sup_distance, Diagram, GameParams, GameState, Partition, Reference, StepFunction, Variant,
    WeakComposition,
};
use serde::Serialize;

use crate::config::{CommandKind, RunConfig, StartSpec};
use crate::CliError;

/// Runs longer than this many stored bowl entries switch to streaming.
const STREAM_THRESHOLD: u64 = 20_000_000;

/// Stream index reserved for drawing a random start.
const START_STREAM: u64 = u64::MAX;

/// Runs the configured command, writes requested files and returns a short
/// human-readable summary.
pub fn execute(cfg: &RunConfig) -> Result<String, CliError> {
    match cfg.command {
        CommandKind::Simulate => simulate(cfg),
        CommandKind::LimitShape => limit_shape(cfg),
        CommandKind::Stationary => stationary(cfg),
        CommandKind::StationaryExact => stationary_exact_cmd(cfg),
        CommandKind::Cycle => cycle(cfg),
        CommandKind::Marginals => marginals(cfg),
        CommandKind::Bounds => bounds(cfg),
        CommandKind::Popov => popov(cfg),
    }
}

pub fn initial_state(cfg: &RunConfig) -> Result<Partition, CliError> {
    Ok(match &cfg.start {
        StartSpec::Triangular => triangular_start(cfg.n)?,
        StartSpec::Single => Partition::new(vec![cfg.n])?,
        StartSpec::Random => {
            let mut rng = rng::stream(cfg.seed, START_STREAM);
            UniformPartitions::new(cfg.n)?.sample(cfg.n, &mut rng)?
        }
        StartSpec::Parts(lambda) => lambda.clone(),
    })
}

/// Scaling and reference shape under which a variant's diagrams are compared.
pub fn natural_scaling(variant: Variant, n: u64, p: f64) -> (f64, Shape) {
    let n = n as f64;
    match variant {
        Variant::CardBased if p > 0.0 => (1.0 / p, Shape::Exponential),
        Variant::CardBased => (1.0, Shape::Exponential),
        Variant::PileBased if p > 0.0 => ((n / p).sqrt(), Shape::Triangle),
        Variant::PileBased | Variant::Deterministic => (n.sqrt(), Shape::Triangle),
    }
}

fn params(cfg: &RunConfig, variant: Variant) -> Result<GameParams, CliError> {
    Ok(GameParams::new(cfg.n, cfg.p, variant, cfg.seed)?)
}

fn emit<R: Serialize, T: CsvTable + ?Sized>(
    cfg: &RunConfig,
    table: &T,
    results: &R,
) -> Result<(), CliError> {
    if let Some(path) = &cfg.out {
        write_csv(path, table)?;
    }
    if let Some(path) = &cfg.json {
        write_json(path, &JsonDocument::new(cfg, results, cfg.seed))?;
    }
    Ok(())
}

fn plot<G: Reference>(
    path: Option<&Path>,
    step: &StepFunction,
    reference: G,
    title: &str,
) -> Result<(), CliError> {
    if let Some(path) = path {
        let curve = |x: f64| reference.value(x);
        write_svg_plot(path, step, Some(&curve), title)?;
    }
    Ok(())
}

fn title(cfg: &RunConfig, variant: Variant) -> String {
    format!(
        "{variant}, n={}, p={}, m={}, seed={}",
        cfg.n, cfg.p, cfg.rounds, cfg.seed
    )
}

/// One row per recorded state of a full trajectory.
struct TrajectoryTable {
    rows: Vec<[String; 5]>,
}

impl CsvTable for TrajectoryTable {
    fn header(&self) -> Vec<String> {
        ["round", "new_pile", "piles", "sup_distance", "state"]
            .map(String::from)
            .to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows.iter().map(|r| r.to_vec()).collect()
    }
}

#[derive(Serialize)]
struct SimulateResults {
    rounds: u64,
    streaming: bool,
    scale: f64,
    reference: Shape,
    terminal_piles: u64,
    terminal_sup_distance: f64,
    terminal: Partition,
}

fn simulate(cfg: &RunConfig) -> Result<String, CliError> {
    let params = params(cfg, cfg.variant)?;
    let initial = initial_state(cfg)?;
    let (scale, shape) = natural_scaling(cfg.variant, cfg.n, cfg.p);
    let stored = (cfg.rounds + 1).saturating_mul(initial.len() as u64 + cfg.rounds);
    let streaming = cfg.stream || stored > STREAM_THRESHOLD;
    let distance = |lambda: &Partition| -> Result<f64, CliError> {
        Ok(sup_distance(&lambda.rescaled_boundary(scale)?, &shape)?)
    };

    let terminal = if streaming {
        let options = StreamOptions {
            distance_every: cfg.distance_every,
            scale: Some(scale),
            reference: shape,
        };
        let run = play_streaming(&params, initial.into(), cfg.rounds, options)?;
        if let Some(path) = &cfg.out {
            write_csv(path, run.summaries.as_slice())?;
        }
        run.terminal.to_partition()
    } else {
        let traj = play(&params, initial.into(), cfg.rounds)?;
        if cfg.out.is_some() {
            let mut rows = Vec::with_capacity(traj.states.len());
            for (round, state) in traj.states.iter().enumerate() {
                let new_pile = match round {
                    0 => String::new(),
                    r => traj.new_piles[r - 1].to_string(),
                };
                rows.push([
                    round.to_string(),
                    new_pile,
                    state.pile_count().to_string(),
                    fmt_float(distance(&state.to_partition())?),
                    state_string(state),
                ]);
            }
            write_csv(
                cfg.out.as_deref().expect("checked"),
                &TrajectoryTable { rows },
            )?;
        }
        traj.terminal().to_partition()
    };

    let results = SimulateResults {
        rounds: cfg.rounds,
        streaming,
        scale,
        reference: shape,
        terminal_piles: terminal.len() as u64,
        terminal_sup_distance: distance(&terminal)?,
        terminal,
    };
    if let Some(path) = &cfg.json {
        write_json(path, &JsonDocument::new(cfg, &results, cfg.seed))?;
    }
    let step = results.terminal.rescaled_boundary(scale)?;
    plot(cfg.plot.as_deref(), &step, shape, &title(cfg, cfg.variant))?;
    Ok(format!(
        "{} rounds of the {} game (n={}, p={}{}): {} piles, sup distance {:.6} to {:?} at scale {:.6}",
        cfg.rounds,
        cfg.variant,
        cfg.n,
        cfg.p,
        if streaming { ", streamed" } else { "" },
        results.terminal_piles,
        results.terminal_sup_distance,
        shape,
        scale
    ))
}

fn state_string(state: &GameState) -> String {
    match state {
        GameState::Partition(p) => p.to_string(),
        GameState::Composition(c) => c.to_string(),
    }
}

fn limit_shape(cfg: &RunConfig) -> Result<String, CliError> {
    let params = params(cfg, Variant::CardBased)?;
    let initial = initial_state(cfg)?;
    let report = limit_shape_experiment(&params, &initial, cfg.rounds, cfg.epsilon, cfg.trials)?;
    emit(cfg, &report, &report)?;
    if cfg.plot.is_some() {
        // trial 0 is replayed from its own stream
        let mut rng = rng::stream(cfg.seed, 0);
        let mut chain = BowlChain::new(&WeakComposition::from(&initial));
        for _ in 0..cfg.rounds {
            chain.step(cfg.p, &mut rng);
        }
        let step = chain.to_partition().rescaled_boundary(1.0 / cfg.p)?;
        plot(
            cfg.plot.as_deref(),
            &step,
            Shape::Exponential,
            &title(cfg, Variant::CardBased),
        )?;
    }
    let q = &report.quantiles;
    Ok(format!(
        "{}/{} trials within epsilon={} after m={} rounds; sup distance median {:.6}, max {:.6}; finite-n failure bound {:.6e}",
        report.count_within, report.trials, cfg.epsilon, cfg.rounds, q.median, q.max, report.bound.combined
    ))
}

#[derive(Serialize)]
struct StationaryResults {
    outcome: StationaryOutcome,
    partitions: Option<Vec<Partition>>,
    exact_total_variation: Option<f64>,
}

fn stationary(cfg: &RunConfig) -> Result<String, CliError> {
    let params = params(cfg, Variant::CardBased)?;
    let initial = initial_state(cfg)?;
    let outcome = stationary_experiment(&params, &initial, cfg.burn_in, cfg.samples, cfg.thinning)?;
    match &outcome {
        StationaryOutcome::Distribution(empirical) => {
            let index = enumerate_partitions(cfg.n)?;
            let exact = stationary_exact(cfg.n, cfg.p)?;
            let tv = total_variation(empirical, &exact)?;
            let results = StationaryResults {
                outcome: outcome.clone(),
                partitions: Some(index.partitions().to_vec()),
                exact_total_variation: Some(tv),
            };
            emit(cfg, &DistributionTable::new(&index, empirical), &results)?;
            Ok(format!(
                "{} samples over {} partitions of {}; total variation to the exact law {:.6}",
                cfg.samples,
                index.len(),
                cfg.n,
                tv
            ))
        }
        StationaryOutcome::Deviation(stats) => {
            let results = StationaryResults {
                outcome: outcome.clone(),
                partitions: None,
                exact_total_variation: None,
            };
            emit(cfg, stats, &results)?;
            Ok(format!(
                "{} samples; sup distance to e^(-x): mean {:.6}, median {:.6}, max {:.6}",
                stats.samples, stats.mean, stats.quantiles.median, stats.quantiles.max
            ))
        }
    }
}

#[derive(Serialize)]
struct ExactResults {
    partitions: Vec<Partition>,
    probabilities: Vec<f64>,
    residual: f64,
    row_sum_defect: f64,
    irreducible: bool,
    positive_diagonal: bool,
}

fn stationary_exact_cmd(cfg: &RunConfig) -> Result<String, CliError> {
    let t = transition_matrix(cfg.n, cfg.p)?;
    let pi = stationary_solve(&t)?;
    let results = ExactResults {
        partitions: t.index.partitions().to_vec(),
        probabilities: pi.probabilities.clone(),
        residual: t.residual(&pi)?,
        row_sum_defect: t.row_sum_defect(),
        irreducible: t.is_irreducible(),
        positive_diagonal: t.has_positive_diagonal(),
    };
    emit(cfg, &DistributionTable::new(&t.index, &pi), &results)?;
    let (best, prob) = pi
        .probabilities
        .iter()
        .enumerate()
        .fold(
            (0, f64::MIN),
            |acc, (i, &q)| if q > acc.1 { (i, q) } else { acc },
        );
    Ok(format!(
        "{} states; most likely {} with probability {:.6}; residual {:.3e}",
        t.size(),
        t.index.get(best),
        prob,
        results.residual
    ))
}

fn cycle(cfg: &RunConfig) -> Result<String, CliError> {
    let initial = initial_state(cfg)?;
    let report = cycle_detect(&initial);
    emit(cfg, &report, &report)?;
    let all_near = report.near_triangular.iter().all(|&b| b);
    Ok(format!(
        "from {}: tail {} rounds, cycle of length {}, every cycle state near-triangular: {}",
        initial, report.tail_length, report.cycle_length, all_near
    ))
}

fn marginals(cfg: &RunConfig) -> Result<String, CliError> {
    let params = params(cfg, Variant::CardBased)?;
    let initial = initial_state(cfg)?;
    let stats = alpha_marginal_check(&params, &initial, cfg.rounds, &cfg.ks, cfg.trials)?;
    emit(cfg, stats.as_slice(), &stats)?;
    let lines: Vec<String> = stats
        .iter()
        .map(|s| {
            format!(
                "k={}: mean {:.4} (expected {:.4}, z={:.2}), variance ratio {:.4}",
                s.k, s.mean, s.expected_mean, s.z_mean, s.variance_ratio
            )
        })
        .collect();
    Ok(lines.join("\n"))
}

#[derive(Serialize)]
struct BoundsResults {
    bound: DeviationBound,
    rate: f64,
    uniform_conv_gap: f64,
}

fn bounds(cfg: &RunConfig) -> Result<String, CliError> {
    let bound = finite_n_bound(cfg.n, cfg.p, cfg.epsilon, cfg.rounds)?;
    let results = BoundsResults {
        bound,
        rate: theorem_rate(cfg.epsilon)?,
        uniform_conv_gap: uniform_conv_gap(cfg.p)?,
    };
    emit(cfg, &bound, &results)?;
    Ok(format!(
        "n={}, p={}, epsilon={}, m={}: regime 1 {:.6e}, regime 2 {:.6e}, combined {:.6e}",
        cfg.n, cfg.p, cfg.epsilon, cfg.rounds, bound.regime1, bound.regime2, bound.combined
    ))
}

struct PopovTable<'a>(&'a PopovReport);

impl CsvTable for PopovTable<'_> {
    fn header(&self) -> Vec<String> {
        ["trial", "triangle_distance"].map(String::from).to_vec()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.0
            .triangle_distances
            .iter()
            .enumerate()
            .map(|(i, &d)| vec![i.to_string(), fmt_float(d)])
            .collect()
    }
}

fn popov(cfg: &RunConfig) -> Result<String, CliError> {
    let initial = initial_state(cfg)?;
    let report = popov_comparison(cfg.n, cfg.p, cfg.rounds, cfg.trials, cfg.seed, &initial)?;
    emit(cfg, &PopovTable(&report), &report)?;
    plot(
        cfg.plot.as_deref(),
        &report.pile_snapshots[0],
        Shape::Triangle,
        &title(cfg, Variant::PileBased),
    )?;
    let mean_distance =
        report.triangle_distances.iter().sum::<f64>() / report.triangle_distances.len() as f64;
    Ok(format!(
        "pile-based: mean {:.1} piles, mean distance {:.6} to the unit triangle at scale sqrt(n/p)={:.4}",
        report.mean_piles, mean_distance, report.pile_scale
    ))
}
