use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::error::{Error, Result};
use crate::hypergraph::{pair_count, Triple};
use crate::observables::{rel_error, Snapshot};

pub const RECORD_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Terminal {
    pub m: usize,
    /// `C(n,2) - 3m`, the pairs left uncovered.
    pub remaining_edges: u64,
    pub covered_fraction: f64,
    pub wall_time_secs: f64,
}

/// Everything one seed produced: configuration, snapshots in step order and
/// the terminal counts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub rng: String,
    pub config: RunConfig,
    pub snapshots: Vec<Snapshot>,
    pub terminal: Terminal,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub triples: Option<Vec<Triple>>,
}

impl RunRecord {
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != RECORD_SCHEMA_VERSION {
            return Err(Error::Parse(format!("unsupported schema_version {}", self.schema_version)));
        }
        let pairs = pair_count(self.config.n);
        if 3 * self.terminal.m as u64 > pairs || self.terminal.remaining_edges != pairs - 3 * self.terminal.m as u64 {
            return Err(Error::Parse("terminal counts inconsistent with n".into()));
        }
        if self.snapshots.windows(2).any(|w| w[0].i >= w[1].i) {
            return Err(Error::Parse("snapshots not ordered by step".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: RunRecord = serde_json::from_str(text)?;
        r.validate()?;
        Ok(r)
    }

    /// JSON with the wall time zeroed; equal for equal seeds and configs.
    pub fn deterministic_json(&self) -> Result<String> {
        let mut r = self.clone();
        r.terminal.wall_time_secs = 0.0;
        r.to_json()
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// The tabular projection written to CSV.
    pub fn csv_view(&self) -> CsvRun {
        let mut labels: Vec<(String, usize)> = self
            .snapshots
            .iter()
            .flat_map(|s| s.predicted.w_hat.iter().map(|w| (w.key.clone(), w.k)))
            .collect();
        labels.sort();
        labels.dedup();
        let rows = self
            .snapshots
            .iter()
            .map(|s| {
                let y_mean = s.y_mean();
                SnapshotRow {
                    i: s.i,
                    t: s.t,
                    q_obs: s.q_size,
                    q_pred: s.predicted.q_hat,
                    q_relerr: s.rel_errors.get("q").copied().unwrap_or_else(|| rel_error(s.q_size as f64, s.predicted.q_hat)),
                    y_mean_obs: y_mean,
                    y_pred: s.predicted.y_hat,
                    y_relerr: y_mean.map(|y| rel_error(y, s.predicted.y_hat)),
                    w: labels
                        .iter()
                        .map(|(key, k)| {
                            let obs = s.w_mean(key, *k);
                            let pred = s.predicted.w_hat(key, *k);
                            WColumn {
                                key: key.clone(),
                                k: *k,
                                obs,
                                pred,
                                relerr: obs.zip(pred).map(|(o, p)| rel_error(o, p)),
                            }
                        })
                        .collect(),
                }
            })
            .collect();
        CsvRun {
            schema_version: self.schema_version,
            rng: self.rng.clone(),
            n: self.config.n,
            ell: self.config.ell,
            seed: self.config.seed,
            snapshot_every: self.config.snapshot_every,
            m: self.terminal.m,
            remaining_edges: self.terminal.remaining_edges,
            wall_time_secs: self.terminal.wall_time_secs,
            w_labels: labels,
            rows,
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        self.csv_view().emit()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()?)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WColumn {
    pub key: String,
    pub k: usize,
    pub obs: Option<f64>,
    pub pred: Option<f64>,
    pub relerr: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotRow {
    pub i: usize,
    pub t: f64,
    pub q_obs: u64,
    pub q_pred: f64,
    pub q_relerr: f64,
    pub y_mean_obs: Option<f64>,
    pub y_pred: f64,
    pub y_relerr: Option<f64>,
    pub w: Vec<WColumn>,
}

/// A run as written to CSV: `# key=value` metadata lines, a header row, then
/// one row per snapshot. Empty cells stand for missing values.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvRun {
    pub schema_version: u32,
    pub rng: String,
    pub n: usize,
    pub ell: usize,
    pub seed: u64,
    pub snapshot_every: usize,
    pub m: usize,
    pub remaining_edges: u64,
    pub wall_time_secs: f64,
    pub w_labels: Vec<(String, usize)>,
    pub rows: Vec<SnapshotRow>,
}

const FIXED_COLUMNS: [&str; 8] = ["i", "t", "q_obs", "q_pred", "q_relerr", "y_mean_obs", "y_pred", "y_relerr"];

fn fmt_f64(x: f64) -> String {
    if x == 0.0 || (1e-5..1e16).contains(&x.abs()) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn cell<T: std::str::FromStr>(rec: &csv::StringRecord, idx: usize) -> Result<T> {
    let s = rec.get(idx).ok_or_else(|| Error::Parse(format!("missing column {idx}")))?;
    s.parse().map_err(|_| Error::Parse(format!("bad cell {s:?} in column {idx}")))
}

fn opt_cell(rec: &csv::StringRecord, idx: usize) -> Result<Option<f64>> {
    match rec.get(idx) {
        Some("") => Ok(None),
        Some(_) => cell(rec, idx).map(Some),
        None => Err(Error::Parse(format!("missing column {idx}"))),
    }
}

impl CsvRun {
    pub fn header(&self) -> Vec<String> {
        let mut h: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
        for (key, k) in &self.w_labels {
            for kind in ["w_obs", "w_pred", "w_relerr"] {
                h.push(format!("{kind}:{key}:{k}"));
            }
        }
        h
    }

    pub fn emit(&self) -> Result<String> {
        let mut out = String::new();
        out.push_str(&format!("# schema_version={}\n", self.schema_version));
        out.push_str(&format!("# rng={}\n", self.rng));
        out.push_str(&format!(
            "# n={} ell={} seed={} snapshot_every={}\n",
            self.n, self.ell, self.seed, self.snapshot_every
        ));
        out.push_str(&format!(
            "# m={} remaining_edges={} wall_time_secs={}\n",
            self.m,
            self.remaining_edges,
            fmt_f64(self.wall_time_secs)
        ));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header())?;
        for r in &self.rows {
            let mut rec = vec![
                r.i.to_string(),
                fmt_f64(r.t),
                r.q_obs.to_string(),
                fmt_f64(r.q_pred),
                fmt_f64(r.q_relerr),
                fmt_opt(r.y_mean_obs),
                fmt_f64(r.y_pred),
                fmt_opt(r.y_relerr),
            ];
            for c in &r.w {
                rec.extend([fmt_opt(c.obs), fmt_opt(c.pred), fmt_opt(c.relerr)]);
            }
            w.write_record(&rec)?;
        }
        let body = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        out.push_str(&String::from_utf8(body).map_err(|e| Error::Parse(e.to_string()))?);
        Ok(out)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut meta = BTreeMap::new();
        let mut body = String::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix('#') {
                for tok in rest.split_whitespace() {
                    if let Some((k, v)) = tok.split_once('=') {
                        meta.insert(k.to_string(), v.to_string());
                    }
                }
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        fn get<T: std::str::FromStr>(meta: &BTreeMap<String, String>, key: &str) -> Result<T> {
            let v = meta
                .get(key)
                .ok_or_else(|| Error::Parse(format!("missing metadata {key}")))?;
            v.parse().map_err(|_| Error::Parse(format!("bad metadata {key}={v}")))
        }

        let mut rdr = csv::Reader::from_reader(body.as_bytes());
        let header = rdr.headers()?.clone();
        if header.len() < FIXED_COLUMNS.len()
            || header.iter().take(FIXED_COLUMNS.len()).ne(FIXED_COLUMNS.iter().copied())
            || !(header.len() - FIXED_COLUMNS.len()).is_multiple_of(3)
        {
            return Err(Error::Parse("unexpected CSV header".into()));
        }
        let mut w_labels = Vec::new();
        for chunk in header.iter().skip(FIXED_COLUMNS.len()).collect::<Vec<_>>().chunks(3) {
            let mut parts = chunk[0].splitn(3, ':');
            let (kind, key, k) = (parts.next(), parts.next(), parts.next());
            let (Some("w_obs"), Some(key), Some(k)) = (kind, key, k) else {
                return Err(Error::Parse(format!("bad W column {:?}", chunk[0])));
            };
            let k: usize = k.parse().map_err(|_| Error::Parse(format!("bad k in {:?}", chunk[0])))?;
            if chunk[1] != format!("w_pred:{key}:{k}") || chunk[2] != format!("w_relerr:{key}:{k}") {
                return Err(Error::Parse(format!("W columns out of order at {:?}", chunk[0])));
            }
            w_labels.push((key.to_string(), k));
        }

        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let w = w_labels
                .iter()
                .enumerate()
                .map(|(j, (key, k))| {
                    let base = FIXED_COLUMNS.len() + 3 * j;
                    Ok(WColumn {
                        key: key.clone(),
                        k: *k,
                        obs: opt_cell(&rec, base)?,
                        pred: opt_cell(&rec, base + 1)?,
                        relerr: opt_cell(&rec, base + 2)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(SnapshotRow {
                i: cell(&rec, 0)?,
                t: cell(&rec, 1)?,
                q_obs: cell(&rec, 2)?,
                q_pred: cell(&rec, 3)?,
                q_relerr: cell(&rec, 4)?,
                y_mean_obs: opt_cell(&rec, 5)?,
                y_pred: cell(&rec, 6)?,
                y_relerr: opt_cell(&rec, 7)?,
                w,
            });
        }
        Ok(CsvRun {
            schema_version: get(&meta, "schema_version")?,
            rng: get(&meta, "rng")?,
            n: get(&meta, "n")?,
            ell: get(&meta, "ell")?,
            seed: get(&meta, "seed")?,
            snapshot_every: get(&meta, "snapshot_every")?,
            m: get(&meta, "m")?,
            remaining_edges: get(&meta, "remaining_edges")?,
            wall_time_secs: get(&meta, "wall_time_secs")?,
            w_labels,
            rows,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::run_trials;
    use crate::observables::SampleCounts;

    fn record(ell: usize) -> RunRecord {
        let c = RunConfig {
            n: 40,
            ell,
            seed: 11,
            snapshot_every: 25,
            samples: SampleCounts { pairs: 15, triples: 3 },
            keep_triples: true,
            ..RunConfig::default()
        };
        run_trials(&c, &[11]).unwrap().remove(0)
    }

    #[test]
    fn json_round_trip() {
        for ell in [4, 7] {
            let r = record(ell);
            let back = RunRecord::from_json(&r.to_json().unwrap()).unwrap();
            assert_eq!(back, r);
        }
    }

    #[test]
    fn csv_round_trip() {
        for ell in [4, 6, 7] {
            let r = record(ell);
            let view = r.csv_view();
            let text = view.emit().unwrap();
            assert_eq!(CsvRun::parse(&text).unwrap(), view);
            let first_data = text.lines().find(|l| !l.starts_with('#')).unwrap();
            assert!(first_data.starts_with("i,t,q_obs,q_pred,q_relerr,y_mean_obs,y_pred,y_relerr"));
        }
    }

    #[test]
    fn csv_columns_sorted_and_complete() {
        let view = record(7).csv_view();
        // Pasch with k in 0..=2 and the mitre with k in 0..=3
        assert_eq!(view.w_labels.len(), 3 + 4);
        assert!(view.w_labels.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(view.header().len(), 8 + 3 * 7);
        assert!(view.rows.iter().all(|r| r.w.len() == 7));
    }

    #[test]
    fn float_formatting_round_trips() {
        for x in [0.0, 1e-300, -2.5e-7, 0.1, 1234.5678, 3.0e20, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn validation_rejects_inconsistent_records() {
        let mut r = record(4);
        r.terminal.remaining_edges += 1;
        assert!(RunRecord::from_json(&r.to_json().unwrap()).is_err());
        let mut r = record(4);
        r.schema_version = 99;
        assert!(RunRecord::from_json(&r.to_json().unwrap()).is_err());
    }

    #[test]
    fn malformed_csv_rejected() {
        assert!(CsvRun::parse("# schema_version=1\na,b\n").is_err());
        let text = record(4).to_csv().unwrap().replace("# rng=chacha8\n", "");
        assert!(CsvRun::parse(&text).is_err());
    }
}
