//! CSV and JSON output.
//!
//! CSV files have a header row, fixed column order, and floats written with
//! 17 significant digits (`{:.16e}`), which round-trips every `f64`. JSON
//! files hold one object `{schema_version, config, results, provenance}`.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::bounds::DeviationBound;
use crate::engine::RoundSummary;
use crate::error::{Error, Result};
use crate::exact::{DistributionVector, PartitionIndex};
use crate::experiments::{CycleReport, DeviationReport, MarginalStat, StationaryStats};
use crate::partition::Partition;

pub const SCHEMA_VERSION: u32 = 1;

/// Identifies the producing build; contains no timestamps.
pub fn build_id() -> String {
    concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub master_seed: u64,
    pub build_id: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonDocument<C, R> {
    pub schema_version: u32,
    pub config: C,
    pub results: R,
    pub provenance: Provenance,
}

impl<C, R> JsonDocument<C, R> {
    pub fn new(config: C, results: R, master_seed: u64) -> Self {
        JsonDocument {
            schema_version: SCHEMA_VERSION,
            config,
            results,
            provenance: Provenance {
                master_seed,
                build_id: build_id(),
            },
        }
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(doc)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json<T: DeserializeOwned>(s: &str) -> Result<T> {
    Ok(serde_json::from_str(s)?)
}

pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> Result<()> {
    fs::write(path, to_json(doc)?)?;
    Ok(())
}

/// Float formatting shared by every CSV column.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_float(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Parse {
        input: s.to_string(),
        reason: "not a float".into(),
    })
}

fn parse_int(s: &str) -> Result<u64> {
    s.parse().map_err(|_| Error::Parse {
        input: s.to_string(),
        reason: "not an unsigned integer".into(),
    })
}

/// Something that renders as a CSV table.
pub trait CsvTable {
    fn header(&self) -> Vec<String>;
    fn rows(&self) -> Vec<Vec<String>>;
}

pub fn to_csv<T: CsvTable + ?Sized>(table: &T) -> Result<String> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(table.header())?;
    for row in table.rows() {
        writer.write_record(row)?;
    }
    let bytes = writer.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_csv<T: CsvTable + ?Sized>(path: &Path, table: &T) -> Result<()> {
    fs::write(path, to_csv(table)?)?;
    Ok(())
}

/// Untyped CSV contents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CsvRecords {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable for CsvRecords {
    fn header(&self) -> Vec<String> {
        self.header.clone()
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.rows.clone()
    }
}

pub fn parse_csv(s: &str) -> Result<CsvRecords> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(s.as_bytes());
    let header = reader.headers()?.iter().map(str::to_string).collect();
    let rows = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<std::result::Result<_, _>>()?;
    Ok(CsvRecords { header, rows })
}

fn strings(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

impl CsvTable for DeviationReport {
    fn header(&self) -> Vec<String> {
        strings(&["trial", "seed", "sup_distance", "within_epsilon"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.outcomes
            .iter()
            .map(|o| {
                vec![
                    o.trial.to_string(),
                    o.seed.to_string(),
                    fmt_float(o.sup_distance),
                    (o.sup_distance <= self.epsilon).to_string(),
                ]
            })
            .collect()
    }
}

/// A distribution together with the partitions it is indexed by.
pub struct DistributionTable<'a> {
    pub partitions: &'a [Partition],
    pub distribution: &'a DistributionVector,
}

impl<'a> DistributionTable<'a> {
    pub fn new(index: &'a PartitionIndex, distribution: &'a DistributionVector) -> Self {
        DistributionTable {
            partitions: index.partitions(),
            distribution,
        }
    }
}

impl CsvTable for DistributionTable<'_> {
    fn header(&self) -> Vec<String> {
        strings(&["index", "partition", "probability"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.partitions
            .iter()
            .zip(&self.distribution.probabilities)
            .enumerate()
            .map(|(i, (lambda, &prob))| vec![i.to_string(), lambda.to_string(), fmt_float(prob)])
            .collect()
    }
}

/// Reads a file written from a [`DistributionTable`].
pub fn parse_distribution_csv(s: &str) -> Result<(Vec<Partition>, DistributionVector)> {
    let records = parse_csv(s)?;
    let mut partitions = Vec::with_capacity(records.rows.len());
    let mut probabilities = Vec::with_capacity(records.rows.len());
    for (i, row) in records.rows.iter().enumerate() {
        if row.len() != 3 || parse_int(&row[0])? != i as u64 {
            return Err(Error::Parse {
                input: row.join(","),
                reason: "expected index,partition,probability in index order".into(),
            });
        }
        partitions.push(row[1].parse::<Partition>()?);
        probabilities.push(parse_float(&row[2])?);
    }
    let n = partitions.first().map_or(0, Partition::n);
    Ok((partitions, DistributionVector { n, probabilities }))
}

impl CsvTable for CycleReport {
    fn header(&self) -> Vec<String> {
        strings(&["position", "partition", "near_triangular"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.cycle
            .iter()
            .zip(&self.near_triangular)
            .enumerate()
            .map(|(i, (lambda, flag))| vec![i.to_string(), lambda.to_string(), flag.to_string()])
            .collect()
    }
}

impl CsvTable for [MarginalStat] {
    fn header(&self) -> Vec<String> {
        strings(&[
            "k",
            "trials",
            "mean",
            "variance",
            "expected_mean",
            "expected_variance",
            "z_mean",
            "variance_ratio",
        ])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|s| {
                vec![
                    s.k.to_string(),
                    s.trials.to_string(),
                    fmt_float(s.mean),
                    fmt_float(s.variance),
                    fmt_float(s.expected_mean),
                    fmt_float(s.expected_variance),
                    fmt_float(s.z_mean),
                    fmt_float(s.variance_ratio),
                ]
            })
            .collect()
    }
}

impl CsvTable for DeviationBound {
    fn header(&self) -> Vec<String> {
        strings(&[
            "n",
            "p",
            "epsilon",
            "m",
            "regime1",
            "regime2",
            "combined",
            "asymptotic_rate",
        ])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            self.n.to_string(),
            fmt_float(self.p),
            fmt_float(self.epsilon),
            self.m.to_string(),
            fmt_float(self.regime1),
            fmt_float(self.regime2),
            fmt_float(self.combined),
            fmt_float(self.asymptotic_rate),
        ]]
    }
}

impl CsvTable for [RoundSummary] {
    fn header(&self) -> Vec<String> {
        strings(&["round", "new_pile", "piles", "sup_distance"])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        self.iter()
            .map(|s| {
                vec![
                    s.round.to_string(),
                    s.new_pile.to_string(),
                    s.piles.to_string(),
                    s.sup_distance.map(fmt_float).unwrap_or_default(),
                ]
            })
            .collect()
    }
}

impl CsvTable for StationaryStats {
    fn header(&self) -> Vec<String> {
        strings(&[
            "n", "p", "samples", "mean", "min", "q10", "q25", "median", "q75", "q90", "max",
        ])
    }

    fn rows(&self) -> Vec<Vec<String>> {
        let q = &self.quantiles;
        let mut row = vec![
            self.n.to_string(),
            fmt_float(self.p),
            self.samples.to_string(),
        ];
        row.extend(
            [
                self.mean, q.min, q.q10, q.q25, q.median, q.q75, q.q90, q.max,
            ]
            .into_iter()
            .map(fmt_float),
        );
        vec![row]
    }
}
