//! Replays instances through an algorithm and turns the per-batch
//! measurements into per-instance and cross-instance metrics.
//!
//! Timed runs and recourse runs are separate: snapshotting the coloring
//! would distort the clock, so a recourse run leaves `time_ns` empty and a
//! timed run leaves the recourse columns empty.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::EdgeId;
use crate::instance::InstanceStream;
use crate::oracle::{recourse, validate, RecourseScope};
use crate::session::Session;
use crate::solver::AlgoSpec;

pub const DEFAULT_REPEATS: usize = 3;

/// One batch of one run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub instance: String,
    pub algo: String,
    pub k: usize,
    pub seed: u64,
    pub repeat: usize,
    pub batch: usize,
    pub b: usize,
    pub time_ns: Option<u64>,
    pub weight: u64,
    pub recourse_all: Option<u64>,
    pub recourse_touched: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub instance: String,
    pub spec: AlgoSpec,
    pub k: usize,
    pub repeats: usize,
    pub seed: u64,
    pub measure_recourse: bool,
}

impl ExperimentConfig {
    pub fn new(instance: impl Into<String>, spec: AlgoSpec, k: usize) -> Self {
        ExperimentConfig { instance: instance.into(), spec, k, repeats: DEFAULT_REPEATS, seed: 1, measure_recourse: false }
    }

    /// Randomized algorithms get a distinct seed per repeat.
    pub fn seed_for(&self, repeat: usize) -> u64 {
        if self.spec.kind.is_randomized() {
            self.seed.wrapping_add(repeat as u64)
        } else {
            self.seed
        }
    }
}

/// Runs `cfg.repeats` independent replays of `inst`. Every batch is
/// validated outside the timed region; a failure aborts with
/// [`Error::Internal`].
pub fn run_experiment(cfg: &ExperimentConfig, inst: &InstanceStream) -> Result<Vec<MetricsRecord>> {
    if cfg.repeats == 0 {
        return Err(Error::Config("repeats must be at least 1".into()));
    }
    let batches = inst.to_delta_batches();
    let label = cfg.spec.label();
    let mut out = Vec::with_capacity(cfg.repeats * batches.len());
    for repeat in 0..cfg.repeats {
        let seed = cfg.seed_for(repeat);
        let mut session = Session::new(inst.n, cfg.k, &cfg.spec, seed)?;
        for (idx, raw) in batches.iter().enumerate() {
            let before = cfg.measure_recourse.then(|| session.coloring.snapshot());
            let start = Instant::now();
            let outcome = session.process_batch(raw)?;
            let elapsed = start.elapsed().as_nanos() as u64;

            let (g, c) = (&session.graph, &session.coloring);
            validate(g, c).map_err(|v| {
                Error::Internal(format!("{label} k={} seed={seed} batch {idx}: {v}", cfg.k))
            })?;
            let recount: u64 = c.colored_edges().map(|(e, _)| g.weight(e)).sum();
            if recount != c.total_weight() {
                return Err(Error::Internal(format!(
                    "batch {idx}: cached weight {} differs from recount {recount}",
                    c.total_weight()
                )));
            }
            let (rec_all, rec_touched) = match &before {
                Some(snap) => {
                    let touched: Vec<EdgeId> = outcome.applied.iter().map(|a| a.edge).collect();
                    (
                        Some(recourse(snap, c, RecourseScope::All) as u64),
                        Some(recourse(snap, c, RecourseScope::Touched(&touched)) as u64),
                    )
                }
                None => (None, None),
            };
            out.push(MetricsRecord {
                instance: cfg.instance.clone(),
                algo: label.clone(),
                k: cfg.k,
                seed,
                repeat,
                batch: idx,
                b: outcome.size,
                time_ns: (!cfg.measure_recourse).then_some(elapsed),
                weight: recount,
                recourse_all: rec_all,
                recourse_touched: rec_touched,
            });
        }
    }
    Ok(out)
}

pub fn write_records<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(r: R) -> Result<Vec<MetricsRecord>> {
    let mut rdr = csv::Reader::from_reader(r);
    rdr.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Repeats of one batch collapsed into one value per column.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedRecord {
    pub instance: String,
    pub algo: String,
    pub k: usize,
    pub batch: usize,
    pub b: usize,
    pub time_ns: Option<f64>,
    pub weight: f64,
    pub recourse_all: Option<f64>,
    pub recourse_touched: Option<f64>,
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 { v[mid] } else { (v[mid - 1] + v[mid]) / 2.0 })
}

type CellKey = (String, String, usize);

/// Collapses repeats: median time for deterministic algorithms, mean time
/// for randomized ones (told apart by `randomized(algo)`); weights and
/// recourse are averaged.
pub fn reduce(records: &[MetricsRecord], randomized: impl Fn(&str) -> bool) -> Vec<ReducedRecord> {
    let mut groups: BTreeMap<(CellKey, usize), Vec<&MetricsRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(((r.instance.clone(), r.algo.clone(), r.k), r.batch)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|(((instance, algo, k), batch), rows)| {
            let col = |f: &dyn Fn(&MetricsRecord) -> Option<f64>| rows.iter().filter_map(|r| f(r)).collect::<Vec<f64>>();
            let times = col(&|r| r.time_ns.map(|t| t as f64));
            let time_ns = if randomized(&algo) { mean(&times) } else { median(&times) };
            ReducedRecord {
                b: rows[0].b,
                time_ns,
                weight: mean(&col(&|r| Some(r.weight as f64))).unwrap_or(0.0),
                recourse_all: mean(&col(&|r| r.recourse_all.map(|x| x as f64))),
                recourse_touched: mean(&col(&|r| r.recourse_touched.map(|x| x as f64))),
                instance,
                algo,
                k,
                batch,
            }
        })
        .collect()
}

/// Per-instance averages over batches.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PerInstance {
    /// Mean time per update, over batches with at least one update.
    pub tau: Option<f64>,
    /// Mean weight.
    pub sigma: f64,
    /// Mean recourse, all-edges scope.
    pub omicron: Option<f64>,
    pub omicron_touched: Option<f64>,
}

/// `rows` must be the reduced batches of one (instance, algorithm, k), with
/// batch indices 0..N.
pub fn compute_per_instance(rows: &[ReducedRecord]) -> Result<PerInstance> {
    if rows.is_empty() {
        return Err(Error::Config("no batches to summarize".into()));
    }
    let mut idx: Vec<usize> = rows.iter().map(|r| r.batch).collect();
    idx.sort_unstable();
    if let Some(missing) = (0..idx.len()).find(|&i| idx[i] != i) {
        return Err(Error::Config(format!("batch {missing} missing for {} / {}", rows[0].instance, rows[0].algo)));
    }
    let per_update: Vec<f64> = rows.iter().filter(|r| r.b > 0).filter_map(|r| r.time_ns.map(|t| t / r.b as f64)).collect();
    let weights: Vec<f64> = rows.iter().map(|r| r.weight).collect();
    let rec: Vec<f64> = rows.iter().filter_map(|r| r.recourse_all).collect();
    let rec_t: Vec<f64> = rows.iter().filter_map(|r| r.recourse_touched).collect();
    Ok(PerInstance {
        tau: mean(&per_update),
        sigma: mean(&weights).unwrap(),
        omicron: (rec.len() == rows.len()).then(|| mean(&rec)).flatten(),
        omicron_touched: (rec_t.len() == rows.len()).then(|| mean(&rec_t)).flatten(),
    })
}

/// Speedup, relative weight and relative recourse of `a` against reference
/// `r` on one instance. A ratio is absent when an input is missing or the
/// denominator is zero.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Ratios {
    pub speedup: Option<f64>,
    pub weight: Option<f64>,
    pub recourse: Option<f64>,
}

pub fn relative(a: &PerInstance, r: &PerInstance) -> Ratios {
    let ratio = |num: Option<f64>, den: Option<f64>| match (num, den) {
        (Some(x), Some(y)) if y > 0.0 => Some(x / y),
        _ => None,
    };
    Ratios {
        speedup: ratio(r.tau, a.tau),
        weight: ratio(Some(a.sigma), Some(r.sigma)),
        recourse: ratio(a.omicron, r.omicron),
    }
}

/// Geometric mean of the positive finite values; others are skipped.
pub fn geometric_mean(xs: impl IntoIterator<Item = f64>) -> Option<f64> {
    let (mut sum, mut n) = (0.0, 0usize);
    for x in xs {
        if x > 0.0 && x.is_finite() {
            sum += x.ln();
            n += 1;
        } else {
            log::warn!("skipping non-positive ratio {x} in geometric mean");
        }
    }
    (n > 0).then(|| (sum / n as f64).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub dataset: String,
    pub algo: String,
    pub reference: String,
    pub k: usize,
    pub instances: usize,
    pub speedup: Option<f64>,
    pub relative_weight: Option<f64>,
    pub relative_recourse: Option<f64>,
}

/// Keyed by (instance, algorithm, k).
pub type PerInstanceTable = BTreeMap<CellKey, PerInstance>;

pub fn per_instance_table(reduced: &[ReducedRecord]) -> Result<PerInstanceTable> {
    let mut cells: BTreeMap<CellKey, Vec<ReducedRecord>> = BTreeMap::new();
    for r in reduced {
        cells.entry((r.instance.clone(), r.algo.clone(), r.k)).or_default().push(r.clone());
    }
    cells.into_iter().map(|(key, rows)| Ok((key, compute_per_instance(&rows)?))).collect()
}

/// Geometric means across instances of every algorithm's ratios against
/// `reference`, per k. Instances the reference was not run on are skipped.
pub fn aggregate_relative(table: &PerInstanceTable, reference: &str, dataset: &str) -> Vec<AggregateRow> {
    let mut by_algo: BTreeMap<(String, usize), Vec<Ratios>> = BTreeMap::new();
    for ((instance, algo, k), a) in table {
        if algo == reference {
            continue;
        }
        match table.get(&(instance.clone(), reference.to_string(), *k)) {
            Some(r) => by_algo.entry((algo.clone(), *k)).or_default().push(relative(a, r)),
            None => log::warn!("no {reference} run for {instance} k={k}; skipping {algo} there"),
        }
    }
    by_algo
        .into_iter()
        .map(|((algo, k), ratios)| AggregateRow {
            dataset: dataset.to_string(),
            algo,
            reference: reference.to_string(),
            k,
            instances: ratios.len(),
            speedup: geometric_mean(ratios.iter().filter_map(|r| r.speedup)),
            relative_weight: geometric_mean(ratios.iter().filter_map(|r| r.weight)),
            relative_recourse: geometric_mean(ratios.iter().filter_map(|r| r.recourse)),
        })
        .collect()
}
