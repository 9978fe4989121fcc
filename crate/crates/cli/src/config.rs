//! Command-line and config-file parsing.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::PathBuf;
use std::str::FromStr;

use bulgaria_core::bounds::theorem_rounds;
use bulgaria_core::exact::DEFAULT_CAP;
use bulgaria_core::experiments::default_burn_in;
use bulgaria_core::partition::MAX_UNIFORM_N;
use bulgaria_core::{Partition, Variant};
use clap::{Args, Parser, Subcommand};
use serde::{Serialize, Serializer};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(
    name = "bulgaria",
    version,
    about = "Stochastic Bulgarian solitaire: simulation, limit shapes, bounds and exact small-n stationary laws"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Play one game and record every round.
    Simulate(Flags),
    /// Many card-based games; distance of each terminal diagram to e^{-x}.
    LimitShape(Flags),
    /// Long card-based chain sampled after burn-in.
    Stationary(Flags),
    /// Exact stationary law by linear solve (n <= 14).
    StationaryExact(Flags),
    /// Tail and cycle of the deterministic game.
    Cycle(Flags),
    /// Moments of bowl contents against their binomial law.
    Marginals(Flags),
    /// Explicit finite-n failure bounds.
    Bounds(Flags),
    /// Pile-based game compared with the card-based and deterministic ones.
    Popov(Flags),
}

/// Flags shared by every subcommand. Unset flags fall back to the
/// `--config` file, then to the defaults shown.
#[derive(Args, Debug, Default, Clone)]
struct Flags {
    /// Game variant: det, card or pile [default: card]
    #[arg(long)]
    variant: Option<String>,
    /// Number of cards [default: 1000; stationary commands: 6]
    #[arg(long)]
    n: Option<u64>,
    /// Pick probability in [0, 1] [default: 0.01; stationary commands: 0.3]
    #[arg(long)]
    p: Option<f64>,
    /// Rounds to play [default: 200; limit-shape and bounds: ceil(f(eps)n)+1; marginals: 100]
    #[arg(long)]
    rounds: Option<u64>,
    /// Master seed [default: 0]
    #[arg(long)]
    seed: Option<u64>,
    /// Initial state: triangular, single, random or explicit parts like 4+3+1
    /// [default: triangular; cycle: random]
    #[arg(long)]
    start: Option<String>,
    /// Independent trials [default: 20]
    #[arg(long)]
    trials: Option<u64>,
    /// Distance tolerance epsilon [default: 0.3]
    #[arg(long)]
    epsilon: Option<f64>,
    /// Rounds discarded before sampling [default: 10*ceil(1/p)]
    #[arg(long = "burn-in")]
    burn_in: Option<u64>,
    /// Rounds between samples [default: 10]
    #[arg(long)]
    thinning: Option<u64>,
    /// Number of samples [default: 10000]
    #[arg(long)]
    samples: Option<u64>,
    /// Bowl indices for marginals, comma separated [default: 1,10,50]
    #[arg(long)]
    ks: Option<String>,
    /// Record a distance every this many rounds in streamed runs [default: max(1, rounds/100)]
    #[arg(long = "distance-every")]
    distance_every: Option<u64>,
    /// Keep only per-round summaries instead of every state
    #[arg(long)]
    stream: bool,
    /// CSV output path
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON output path
    #[arg(long)]
    json: Option<PathBuf>,
    /// SVG plot path
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Plain-text file with `key = value` lines and `#` comments
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Simulate,
    LimitShape,
    Stationary,
    StationaryExact,
    Cycle,
    Marginals,
    Bounds,
    Popov,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Simulate => "simulate",
            CommandKind::LimitShape => "limit-shape",
            CommandKind::Stationary => "stationary",
            CommandKind::StationaryExact => "stationary-exact",
            CommandKind::Cycle => "cycle",
            CommandKind::Marginals => "marginals",
            CommandKind::Bounds => "bounds",
            CommandKind::Popov => "popov",
        }
    }

    fn is_stationary(self) -> bool {
        matches!(self, CommandKind::Stationary | CommandKind::StationaryExact)
    }
}

/// How the initial state is chosen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StartSpec {
    Triangular,
    Single,
    /// Uniform over partitions of `n`, drawn from a stream of the master seed.
    Random,
    Parts(Partition),
}

impl FromStr for StartSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "triangular" => Ok(StartSpec::Triangular),
            "single" => Ok(StartSpec::Single),
            "random" => Ok(StartSpec::Random),
            other => other
                .parse::<Partition>()
                .map(StartSpec::Parts)
                .map_err(|e| e.to_string()),
        }
    }
}

impl fmt::Display for StartSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StartSpec::Triangular => f.write_str("triangular"),
            StartSpec::Single => f.write_str("single"),
            StartSpec::Random => f.write_str("random"),
            StartSpec::Parts(p) => write!(f, "{p}"),
        }
    }
}

impl Serialize for StartSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Fully resolved and validated run settings.
///
/// Output paths are not serialized, so writing the same run to different
/// files yields identical JSON.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: CommandKind,
    pub variant: Variant,
    pub n: u64,
    pub p: f64,
    pub rounds: u64,
    pub seed: u64,
    pub start: StartSpec,
    pub trials: u64,
    pub epsilon: f64,
    pub burn_in: u64,
    pub thinning: u64,
    pub samples: u64,
    pub ks: Vec<u64>,
    pub distance_every: u64,
    pub stream: bool,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub json: Option<PathBuf>,
    #[serde(skip)]
    pub plot: Option<PathBuf>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| usage(format!("invalid value '{value}' for '--{key}': {e}")))
}

/// Reads `key = value` lines; `#` starts a comment.
fn read_config_file(path: &PathBuf) -> Result<BTreeMap<String, String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config file {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            usage(format!(
                "{}:{}: expected 'key = value'",
                path.display(),
                lineno + 1
            ))
        })?;
        let key = key.trim().replace('_', "-");
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

impl Flags {
    /// Fills unset flags from config-file entries.
    fn merge_file(&mut self, entries: BTreeMap<String, String>) -> Result<(), CliError> {
        fn fill<T: FromStr>(slot: &mut Option<T>, key: &str, value: &str) -> Result<(), CliError>
        where
            T::Err: fmt::Display,
        {
            if slot.is_none() {
                *slot = Some(parse_value(key, value)?);
            }
            Ok(())
        }
        for (key, value) in entries {
            let v = value.as_str();
            match key.as_str() {
                "variant" => fill(&mut self.variant, &key, v)?,
                "n" => fill(&mut self.n, &key, v)?,
                "p" => fill(&mut self.p, &key, v)?,
                "rounds" => fill(&mut self.rounds, &key, v)?,
                "seed" => fill(&mut self.seed, &key, v)?,
                "start" => fill(&mut self.start, &key, v)?,
                "trials" => fill(&mut self.trials, &key, v)?,
                "epsilon" => fill(&mut self.epsilon, &key, v)?,
                "burn-in" => fill(&mut self.burn_in, &key, v)?,
                "thinning" => fill(&mut self.thinning, &key, v)?,
                "samples" => fill(&mut self.samples, &key, v)?,
                "ks" => fill(&mut self.ks, &key, v)?,
                "distance-every" => fill(&mut self.distance_every, &key, v)?,
                "stream" => self.stream |= parse_value::<bool>(&key, v)?,
                "out" => fill(&mut self.out, &key, v)?,
                "json" => fill(&mut self.json, &key, v)?,
                "plot" => fill(&mut self.plot, &key, v)?,
                _ => return Err(usage(format!("unknown config key '{key}'"))),
            }
        }
        Ok(())
    }
}

/// Parses `argv` (including the program name) into a validated config.
///
/// Help and version requests come back as `CliError::Clap` so the caller
/// can print them and exit 0.
pub fn parse_cli<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(CliError::Clap)?;
    let (command, mut flags) = match cli.command {
        Command::Simulate(f) => (CommandKind::Simulate, f),
        Command::LimitShape(f) => (CommandKind::LimitShape, f),
        Command::Stationary(f) => (CommandKind::Stationary, f),
        Command::StationaryExact(f) => (CommandKind::StationaryExact, f),
        Command::Cycle(f) => (CommandKind::Cycle, f),
        Command::Marginals(f) => (CommandKind::Marginals, f),
        Command::Bounds(f) => (CommandKind::Bounds, f),
        Command::Popov(f) => (CommandKind::Popov, f),
    };
    if let Some(path) = flags.config.clone() {
        flags.merge_file(read_config_file(&path)?)?;
    }
    resolve(command, flags)
}

fn resolve(command: CommandKind, f: Flags) -> Result<RunConfig, CliError> {
    let default_variant = match command {
        CommandKind::Cycle => Variant::Deterministic,
        CommandKind::Popov => Variant::PileBased,
        _ => Variant::CardBased,
    };
    let variant = match &f.variant {
        Some(v) => parse_value::<Variant>("variant", v)?,
        None => default_variant,
    };
    let fixed_variant = !matches!(command, CommandKind::Simulate);
    if fixed_variant && variant != default_variant {
        return Err(usage(format!(
            "'--variant {}' is not supported by '{}' (it uses {})",
            variant,
            command.name(),
            default_variant
        )));
    }

    let (default_n, default_p) = if command.is_stationary() {
        (6, 0.3)
    } else {
        (1000, 0.01)
    };
    let n = f.n.unwrap_or(default_n);
    let p = f.p.unwrap_or(default_p);
    if n == 0 {
        return Err(usage("invalid value for '--n': must be >= 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(usage(format!(
            "invalid value '{p}' for '--p': must lie in [0, 1]"
        )));
    }
    let needs_open_p = matches!(
        command,
        CommandKind::LimitShape
            | CommandKind::Stationary
            | CommandKind::StationaryExact
            | CommandKind::Marginals
            | CommandKind::Bounds
    );
    if needs_open_p && !(p > 0.0 && p < 1.0) {
        return Err(usage(format!(
            "invalid value '{p}' for '--p': '{}' needs 0 < p < 1",
            command.name()
        )));
    }
    if command == CommandKind::Popov && p == 0.0 {
        return Err(usage("invalid value '0' for '--p': 'popov' needs p > 0"));
    }
    if command == CommandKind::StationaryExact && n > DEFAULT_CAP {
        return Err(usage(format!(
            "invalid value '{n}' for '--n': 'stationary-exact' supports n <= {DEFAULT_CAP}"
        )));
    }

    let epsilon = f.epsilon.unwrap_or(0.3);
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(usage(format!(
            "invalid value '{epsilon}' for '--epsilon': must be > 0"
        )));
    }
    let rounds = match (f.rounds, command) {
        (Some(m), _) => m,
        (None, CommandKind::LimitShape | CommandKind::Bounds) => theorem_rounds(epsilon, n)
            .map_err(|e| usage(format!("cannot derive '--rounds': {e}")))?,
        (None, CommandKind::Marginals) => 100,
        (None, _) => 200,
    };
    if rounds == 0
        && matches!(
            command,
            CommandKind::LimitShape | CommandKind::Marginals | CommandKind::Bounds
        )
    {
        return Err(usage("invalid value '0' for '--rounds': must be >= 1"));
    }

    let start = match &f.start {
        Some(s) => parse_value::<StartSpec>("start", s)?,
        None if command == CommandKind::Cycle => StartSpec::Random,
        None => StartSpec::Triangular,
    };
    match &start {
        StartSpec::Parts(lambda) if lambda.n() != n => {
            return Err(usage(format!(
                "invalid value '{lambda}' for '--start': sums to {} but --n is {n}",
                lambda.n()
            )));
        }
        StartSpec::Random if n > MAX_UNIFORM_N => {
            return Err(usage(format!(
                "'--start random' supports n <= {MAX_UNIFORM_N}"
            )));
        }
        _ => {}
    }

    let trials = f.trials.unwrap_or(20);
    let min_trials = if command == CommandKind::Marginals {
        2
    } else {
        1
    };
    if trials < min_trials {
        return Err(usage(format!(
            "invalid value '{trials}' for '--trials': must be >= {min_trials}"
        )));
    }
    let thinning = f.thinning.unwrap_or(10);
    if thinning == 0 {
        return Err(usage("invalid value '0' for '--thinning': must be >= 1"));
    }
    let samples = f.samples.unwrap_or(10_000);
    if samples == 0 {
        return Err(usage("invalid value '0' for '--samples': must be >= 1"));
    }
    let burn_in = match f.burn_in {
        Some(b) => b,
        None if p > 0.0 => default_burn_in(p),
        None => 0,
    };
    let ks = match &f.ks {
        Some(s) => s
            .split(',')
            .map(|k| parse_value::<u64>("ks", k))
            .collect::<Result<Vec<_>, _>>()?,
        None => vec![1, 10, 50],
    };
    if command == CommandKind::Marginals {
        if let Some(k) = ks.iter().find(|&&k| k == 0 || k > rounds) {
            return Err(usage(format!(
                "invalid value '{k}' for '--ks': bowl indices must lie in 1..={rounds}"
            )));
        }
    }
    let distance_every = f.distance_every.unwrap_or((rounds / 100).max(1));

    Ok(RunConfig {
        command,
        variant,
        n,
        p,
        rounds,
        seed: f.seed.unwrap_or(0),
        start,
        trials,
        epsilon,
        burn_in,
        thinning,
        samples,
        ks,
        distance_every,
        stream: f.stream,
        out: f.out,
        json: f.json,
        plot: f.plot,
    })
}
