//! Trials, sweeps, run records and aggregate reports.

mod config;
mod record;
mod sweep;

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::catalog::{enumerate_obstructions, ObstructionCatalog};
use crate::engine::{ProcessState, DEFAULT_MAX_BYTES, RNG_NAME};
use crate::error::{Error, Result};
use crate::hypergraph::{pair_count, Triple};
use crate::observables::{take_snapshot, SampleCounts, Snapshot};

pub use config::{default_out_dir, parse_key_values, OUT_DIR_ENV};
pub use record::{CsvRun, RunRecord, SnapshotRow, Terminal, WColumn, RECORD_SCHEMA_VERSION};
pub use sweep::{
    concentration_report, counting_table, fit_exponent, sweep, ConcentrationRow, NAggregate, SweepConfig,
    SweepReport, Tolerances,
};

pub const DEFAULT_SNAPSHOT_TIMES: [f64; 5] = [0.02, 0.05, 0.10, 0.13, 0.15];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n: usize,
    pub ell: usize,
    pub seed: u64,
    /// Snapshot every this many steps in addition to the time grid; 0 disables.
    pub snapshot_every: usize,
    pub snapshot_times: Vec<f64>,
    pub samples: SampleCounts,
    pub max_bytes: u64,
    /// Store the final triple system in the record.
    pub keep_triples: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 100,
            ell: 6,
            seed: 0,
            snapshot_every: 0,
            snapshot_times: DEFAULT_SNAPSHOT_TIMES.to_vec(),
            samples: SampleCounts::default(),
            max_bytes: DEFAULT_MAX_BYTES,
            keep_triples: false,
        }
    }
}

impl RunConfig {
    /// Applies one `key = value` setting. Returns `false` for unknown keys.
    pub fn set(&mut self, key: &str, value: &str) -> Result<bool> {
        use config::{parse_list, parse_value};
        match key {
            "n" => self.n = parse_value(key, value)?,
            "ell" => self.ell = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "snapshot_every" => self.snapshot_every = parse_value(key, value)?,
            "snapshot_times" => self.snapshot_times = parse_list(key, value)?,
            "pairs" => self.samples.pairs = parse_value(key, value)?,
            "triples" => self.samples.triples = parse_value(key, value)?,
            "max_bytes" => self.max_bytes = parse_value(key, value)?,
            "keep_triples" => self.keep_triples = parse_value(key, value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    /// Step indices at which snapshots are taken: `round(t n^2)` for each
    /// grid time plus the multiples of `snapshot_every`.
    pub fn snapshot_steps(&self) -> Result<BTreeSet<usize>> {
        let n2 = (self.n * self.n) as f64;
        let mut steps = BTreeSet::new();
        for &t in &self.snapshot_times {
            if !(0.0..=crate::trajectories::T_MAX).contains(&t) {
                return Err(Error::TimeOutOfRange(t));
            }
            steps.insert((t * n2).round() as usize);
        }
        if self.snapshot_every > 0 {
            let last = self.n * self.n / 6 + 1;
            steps.extend((0..=last).step_by(self.snapshot_every));
        }
        Ok(steps)
    }
}

/// Runs one seed to termination. Snapshot sampling uses its own generator
/// stream, so the process itself does not depend on the snapshot schedule.
pub fn run_trial(config: &RunConfig, catalog: Arc<ObstructionCatalog>) -> Result<RunRecord> {
    if catalog.ell != config.ell {
        return Err(Error::Parse(format!(
            "catalog is for ell = {}, config asks for {}",
            catalog.ell, config.ell
        )));
    }
    let steps = config.snapshot_steps()?;
    let mut state = ProcessState::with_catalog(config.n, catalog, config.seed, config.max_bytes)?;
    let mut snap_rng = ChaCha8Rng::seed_from_u64(config.seed);
    snap_rng.set_stream(1);

    let start = Instant::now();
    let mut snapshots: Vec<Snapshot> = Vec::new();
    let mut failure = None;
    state.run_with(|s| {
        if failure.is_none() && steps.contains(&s.step_index()) {
            match take_snapshot(s, config.samples, &mut snap_rng) {
                Ok(snap) => snapshots.push(snap),
                Err(e) => failure = Some(e),
            }
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let wall = start.elapsed().as_secs_f64();
    let m = state.chosen().len();
    let pairs = pair_count(config.n);
    Ok(RunRecord {
        schema_version: RECORD_SCHEMA_VERSION,
        rng: RNG_NAME.to_string(),
        config: config.clone(),
        snapshots,
        terminal: Terminal {
            m,
            remaining_edges: pairs - 3 * m as u64,
            covered_fraction: 3.0 * m as f64 / pairs as f64,
            wall_time_secs: wall,
        },
        triples: config.keep_triples.then(|| state.chosen_triples().to_vec() as Vec<Triple>),
    })
}

/// One record per seed, in seed order. Seeds run independently on the rayon
/// pool and share one catalog.
pub fn run_trials(config: &RunConfig, seeds: &[u64]) -> Result<Vec<RunRecord>> {
    let catalog = Arc::new(enumerate_obstructions(config.ell)?);
    seeds
        .par_iter()
        .map(|&seed| {
            let cfg = RunConfig {
                seed,
                ..config.clone()
            };
            run_trial(&cfg, Arc::clone(&catalog))
        })
        .collect()
}
