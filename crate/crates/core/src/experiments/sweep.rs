use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::config::{parse_list, parse_value};
use super::{run_trials, RunConfig, RunRecord};
use crate::catalog::enumerate_obstructions;
use crate::error::{Error, Result};
use crate::trajectories::{counting_estimate, CountingEstimate};

pub const SWEEP_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub q: f64,
    pub y: f64,
    pub w: f64,
    /// W labels with `k` above this are reported but not checked.
    pub w_max_k: usize,
    /// Rows later than this are reported but not checked. At desk-scale n
    /// the observed `|Q|` sits below the prediction by a bias that shrinks
    /// like `1/n` and grows quickly as `p -> 0`.
    pub t_max: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            q: 0.05,
            y: 0.10,
            w: 0.20,
            w_max_k: 0,
            t_max: 0.13,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NAggregate {
    pub n: usize,
    pub seeds: Vec<u64>,
    pub mean_m: f64,
    pub mean_remaining: f64,
    pub stddev_remaining: f64,
    pub mean_covered_fraction: f64,
}

/// Worst absolute relative error per quantity over all records at one grid
/// time (snapshot times rounded to three decimals).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationRow {
    pub t: f64,
    pub samples: usize,
    pub worst: BTreeMap<String, f64>,
    /// `None` for rows after `t_max`.
    pub within: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub schema_version: u32,
    pub ells: Vec<usize>,
    pub per_n: Vec<NAggregate>,
    /// Slope of log mean remaining edges against log n; absent when the grid
    /// has fewer than three n values or fewer than three seeds at some n.
    pub fitted_exponent: Option<f64>,
    pub concentration: Vec<ConcentrationRow>,
    pub tolerances: Tolerances,
    pub pass: bool,
}

impl SweepReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Least-squares slope of `log mean(remaining)` against `log n`.
pub fn fit_exponent(grid: &BTreeMap<usize, Vec<f64>>) -> Result<f64> {
    if grid.len() < 3 {
        return Err(Error::DegenerateGrid(format!("need 3 distinct n, got {}", grid.len())));
    }
    let mut pts = Vec::with_capacity(grid.len());
    for (&n, xs) in grid {
        if xs.len() < 3 {
            return Err(Error::DegenerateGrid(format!("n = {n} has {} seeds, need 3", xs.len())));
        }
        let (mean, _) = mean_std(xs);
        if mean.is_nan() || mean <= 0.0 || n < 2 {
            return Err(Error::DegenerateGrid(format!("n = {n}: cannot take logs of mean {mean}")));
        }
        pts.push(((n as f64).ln(), mean.ln()));
    }
    let k = pts.len() as f64;
    let xbar = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let ybar = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - xbar) * (p.1 - ybar)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - xbar).powi(2)).sum();
    Ok(sxy / sxx)
}

fn grid_t(t: f64) -> f64 {
    (t * 1000.0).round() / 1000.0
}

fn w_k(label: &str) -> Option<usize> {
    label.strip_prefix("w_mean:")?.rsplit(':').next()?.parse().ok()
}

/// Aggregates records independently of their order: terminal statistics per
/// n, the fitted exponent and the worst snapshot errors per grid time.
pub fn concentration_report(records: &[RunRecord], tol: Tolerances) -> SweepReport {
    let mut sorted: Vec<&RunRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.config.n, r.config.ell, r.config.seed));

    let mut ells: Vec<usize> = sorted.iter().map(|r| r.config.ell).collect();
    ells.sort_unstable();
    ells.dedup();

    let mut by_n: BTreeMap<usize, Vec<&RunRecord>> = BTreeMap::new();
    for r in &sorted {
        by_n.entry(r.config.n).or_default().push(r);
    }
    let per_n: Vec<NAggregate> = by_n
        .iter()
        .map(|(&n, rs)| {
            let rem: Vec<f64> = rs.iter().map(|r| r.terminal.remaining_edges as f64).collect();
            let (mean_remaining, stddev_remaining) = mean_std(&rem);
            let ms: Vec<f64> = rs.iter().map(|r| r.terminal.m as f64).collect();
            let cov: Vec<f64> = rs.iter().map(|r| r.terminal.covered_fraction).collect();
            NAggregate {
                n,
                seeds: rs.iter().map(|r| r.config.seed).collect(),
                mean_m: mean_std(&ms).0,
                mean_remaining,
                stddev_remaining,
                mean_covered_fraction: mean_std(&cov).0,
            }
        })
        .collect();
    let grid: BTreeMap<usize, Vec<f64>> = by_n
        .iter()
        .map(|(&n, rs)| (n, rs.iter().map(|r| r.terminal.remaining_edges as f64).collect()))
        .collect();
    let fitted_exponent = fit_exponent(&grid).ok();

    let mut rows: BTreeMap<i64, ConcentrationRow> = BTreeMap::new();
    for r in &sorted {
        for s in &r.snapshots {
            let t = grid_t(s.t);
            let row = rows.entry((t * 1000.0).round() as i64).or_insert_with(|| ConcentrationRow {
                t,
                samples: 0,
                worst: BTreeMap::new(),
                within: None,
            });
            row.samples += 1;
            for (label, &e) in &s.rel_errors {
                let w = row.worst.entry(label.clone()).or_insert(0.0);
                *w = w.max(e.abs());
            }
        }
    }
    let mut pass = true;
    let concentration: Vec<ConcentrationRow> = rows
        .into_values()
        .map(|mut row| {
            if row.t <= tol.t_max {
                let ok = row.worst.iter().all(|(label, &e)| match label.as_str() {
                    "q" => e <= tol.q,
                    "y_mean" => e <= tol.y,
                    l => w_k(l).is_none_or(|k| k > tol.w_max_k || e <= tol.w),
                });
                pass &= ok;
                row.within = Some(ok);
            }
            row
        })
        .collect();

    SweepReport {
        schema_version: SWEEP_SCHEMA_VERSION,
        ells,
        per_n,
        fitted_exponent,
        concentration,
        tolerances: tol,
        pass,
    }
}

/// A grid of n values crossed with a list of seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub base: RunConfig,
    pub ns: Vec<usize>,
    pub seeds: Vec<u64>,
    pub tolerances: Tolerances,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            base: RunConfig {
                ell: 4,
                ..RunConfig::default()
            },
            ns: vec![100, 141, 200, 283, 400],
            seeds: (0..5).collect(),
            tolerances: Tolerances::default(),
        }
    }
}

impl SweepConfig {
    /// Applies one `key = value` setting; run keys are forwarded to `base`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        match key {
            "ns" => self.ns = parse_list(key, value)?,
            "seeds" => self.seeds = parse_list(key, value)?,
            "tol_q" => self.tolerances.q = parse_value(key, value)?,
            "tol_y" => self.tolerances.y = parse_value(key, value)?,
            "tol_w" => self.tolerances.w = parse_value(key, value)?,
            _ => return self.base.set(key, value),
        }
        Ok(true)
    }
}

/// Runs every `(n, seed)` pair and returns the records with their report.
pub fn sweep(config: &SweepConfig) -> Result<(Vec<RunRecord>, SweepReport)> {
    if config.ns.is_empty() || config.seeds.is_empty() {
        return Err(Error::DegenerateGrid("empty n grid or seed list".into()));
    }
    let mut records = Vec::new();
    for &n in &config.ns {
        let base = RunConfig {
            n,
            ..config.base.clone()
        };
        records.extend(run_trials(&base, &config.seeds)?);
    }
    let report = concentration_report(&records, config.tolerances);
    Ok((records, report))
}

/// Counting estimates for each n under one catalog.
pub fn counting_table(ell: usize, ns: &[usize]) -> Result<Vec<CountingEstimate>> {
    let catalog = enumerate_obstructions(ell)?;
    Ok(ns.iter().map(|&n| counting_estimate(n, &catalog)).collect())
}
