use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::engine::ProcessState;
use crate::error::Result;
use crate::hypergraph::Triple;
use crate::trajectories::{evaluate, TrajectoryPoint};

use super::extensions::{ExtensionCounter, PairBits};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleCounts {
    pub pairs: usize,
    pub triples: usize,
}

impl Default for SampleCounts {
    fn default() -> Self {
        SampleCounts {
            pairs: 200,
            triples: 50,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YSample {
    pub u: u32,
    pub v: u32,
    pub count: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WSample {
    pub triple: Triple,
    pub key: String,
    pub k: usize,
    pub count: u64,
}

/// Observed statistics at one step next to their predictions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub i: usize,
    pub t: f64,
    pub q_size: u64,
    pub y_samples: Vec<YSample>,
    pub w_samples: Vec<WSample>,
    pub predicted: TrajectoryPoint,
    /// `(observed - predicted) / predicted`; absolute error where the
    /// prediction is below `1e-9` in magnitude.
    pub rel_errors: BTreeMap<String, f64>,
}

pub const REL_ERROR_FLOOR: f64 = 1e-9;

pub fn rel_error(observed: f64, predicted: f64) -> f64 {
    if predicted.abs() < REL_ERROR_FLOOR {
        observed - predicted
    } else {
        (observed - predicted) / predicted
    }
}

pub fn w_label(key: &str, k: usize) -> String {
    format!("w_mean:{key}:{k}")
}

impl Snapshot {
    pub fn y_mean(&self) -> Option<f64> {
        if self.y_samples.is_empty() {
            return None;
        }
        Some(self.y_samples.iter().map(|s| s.count as f64).sum::<f64>() / self.y_samples.len() as f64)
    }

    pub fn w_mean(&self, key: &str, k: usize) -> Option<f64> {
        let v: Vec<f64> = self
            .w_samples
            .iter()
            .filter(|s| s.key == key && s.k == k)
            .map(|s| s.count as f64)
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }

    /// `(key, k)` pairs present in the W samples, sorted.
    pub fn w_labels(&self) -> Vec<(String, usize)> {
        let mut out: Vec<(String, usize)> = self.w_samples.iter().map(|s| (s.key.clone(), s.k)).collect();
        out.sort();
        out.dedup();
        out
    }
}

/// Samples alive pairs and available triples uniformly without replacement
/// and measures `|Q|`, `|Y_uv|` and `|W_uvw,F,k|` against the predictions at
/// `t = i / n^2`.
pub fn take_snapshot(state: &ProcessState, counts: SampleCounts, rng: &mut impl Rng) -> Result<Snapshot> {
    let n = state.n();
    let t = state.time().min(crate::trajectories::T_MAX);
    let predicted = evaluate(t, n, state.catalog())?;

    let pairs = state.alive_pairs();
    let mut y_samples: Vec<YSample> = sample(rng, pairs.len(), counts.pairs.min(pairs.len()))
        .into_iter()
        .map(|i| {
            let (u, v) = pairs[i];
            YSample {
                u,
                v,
                count: state.codegree(u, v).expect("sampled pair is alive"),
            }
        })
        .collect();
    y_samples.sort_by_key(|s| (s.u, s.v));

    let avail = state.available();
    let mut picked: Vec<Triple> = sample(rng, avail.len(), counts.triples.min(avail.len()))
        .into_iter()
        .map(|i| avail[i].decode())
        .collect();
    picked.sort_unstable();

    let mut w_samples = Vec::new();
    let large = &state.catalog().large_members;
    if !large.is_empty() && !picked.is_empty() {
        let bits = PairBits::build(state);
        for f in large {
            let counter = ExtensionCounter::new(f);
            let key = f.key_hex();
            for &uvw in &picked {
                let by_k = counter.count_by_k(&bits, uvw);
                for (k, &count) in by_k.iter().enumerate().take(f.edge_count() - 1) {
                    w_samples.push(WSample {
                        triple: uvw,
                        key: key.clone(),
                        k,
                        count,
                    });
                }
            }
        }
    }

    let mut snap = Snapshot {
        i: state.step_index(),
        t,
        q_size: state.available_len() as u64,
        y_samples,
        w_samples,
        predicted,
        rel_errors: BTreeMap::new(),
    };
    snap.rel_errors
        .insert("q".into(), rel_error(snap.q_size as f64, snap.predicted.q_hat));
    if let Some(y) = snap.y_mean() {
        snap.rel_errors.insert("y_mean".into(), rel_error(y, snap.predicted.y_hat));
    }
    for (key, k) in snap.w_labels() {
        let obs = snap.w_mean(&key, k).unwrap();
        let pred = snap.predicted.w_hat(&key, k).unwrap_or(0.0);
        snap.rel_errors.insert(w_label(&key, k), rel_error(obs, pred));
    }
    Ok(snap)
}
