use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hgtp_core::catalog::{check_ell, enumerate_obstructions, ObstructionCatalog};
use hgtp_core::experiments::{
    concentration_report, counting_table, default_out_dir, parse_key_values, run_trial, sweep, RunConfig,
    RunRecord, SweepConfig,
};
use hgtp_core::observables::{find_dense_subset, find_pattern_copy, partial_sts_violation, SUBSET_MAX_VERTICES};
use hgtp_core::trajectories::{evaluate, T_MAX};
use hgtp_core::Triple;

const OUTPUT_SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(name = "hgtp", version, about = "High-girth triple process simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the forbidden configurations for a girth bound.
    Catalog {
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one seed to termination and write its record.
    Run(RunArgs),
    /// Run a grid of n values and seeds, then aggregate.
    Sweep(SweepArgs),
    /// Tabulate the predicted trajectories as CSV.
    Trajectory {
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 101)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a triple system file ("a b c" per line) for girth and pair conflicts.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        ell: usize,
    },
    /// Aggregate run records, or tabulate counting estimates.
    Report {
        /// RunRecord JSON files.
        #[arg(long, num_args = 1..)]
        runs: Vec<PathBuf>,
        #[arg(long)]
        counting_ell: Option<usize>,
        #[arg(long, value_delimiter = ',')]
        counting_n: Vec<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunFlags {
    /// key = value file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    snapshot_every: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    snapshot_times: Option<Vec<f64>>,
    #[arg(long)]
    pairs: Option<usize>,
    #[arg(long)]
    triples: Option<usize>,
    #[arg(long)]
    max_bytes: Option<u64>,
    #[arg(long)]
    keep_triples: bool,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    flags: RunFlags,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Load the catalog from this file instead of enumerating.
    #[arg(long)]
    catalog: Option<PathBuf>,
    /// Output file; `.csv` selects CSV, anything else JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    flags: RunFlags,
    #[arg(long, value_delimiter = ',')]
    ns: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

fn read_config(path: &Option<PathBuf>, mut apply: impl FnMut(&str, &str) -> hgtp_core::Result<bool>) -> Result<()> {
    let Some(path) = path else { return Ok(()) };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    for (k, v) in parse_key_values(&text)? {
        if !apply(&k, &v)? {
            bail!("unknown config key {k:?} in {}", path.display());
        }
    }
    Ok(())
}

impl RunFlags {
    fn apply(&self, c: &mut RunConfig) {
        if let Some(v) = self.ell {
            c.ell = v;
        }
        if let Some(v) = self.snapshot_every {
            c.snapshot_every = v;
        }
        if let Some(v) = &self.snapshot_times {
            c.snapshot_times = v.clone();
        }
        if let Some(v) = self.pairs {
            c.samples.pairs = v;
        }
        if let Some(v) = self.triples {
            c.samples.triples = v;
        }
        if let Some(v) = self.max_bytes {
            c.max_bytes = v;
        }
        if self.keep_triples {
            c.keep_triples = true;
        }
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, text).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_catalog(ell: usize, out: Option<PathBuf>) -> Result<()> {
    let catalog = enumerate_obstructions(ell)?;
    let path = out.unwrap_or_else(|| default_out_dir().join(format!("catalog_ell{ell}.json")));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    catalog.write_json(&path)?;
    for f in &catalog.all_members {
        println!("v={} e={} aut={} key={}", f.vertex_count, f.edge_count(), f.aut_count, f.key_hex());
    }
    eprintln!("{} classes written to {}", catalog.all_members.len(), path.display());
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut config = RunConfig::default();
    read_config(&args.flags.config, |k, v| config.set(k, v))?;
    args.flags.apply(&mut config);
    if let Some(v) = args.n {
        config.n = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    let catalog = match &args.catalog {
        Some(p) => {
            let c = ObstructionCatalog::read_json(p)?;
            if c.ell != config.ell {
                bail!("catalog {} is for ell = {}, run asks for {}", p.display(), c.ell, config.ell);
            }
            c
        }
        None => enumerate_obstructions(config.ell)?,
    };
    let record = run_trial(&config, Arc::new(catalog))?;
    let path = args.out.unwrap_or_else(|| {
        default_out_dir().join(format!("run_n{}_ell{}_seed{}.json", config.n, config.ell, config.seed))
    });
    let text = if path.extension().is_some_and(|e| e == "csv") {
        record.to_csv()?
    } else {
        record.to_json()?
    };
    write_or_print(Some(&path), &text)?;
    let t = &record.terminal;
    eprintln!(
        "n={} ell={} seed={} m={} remaining_edges={} covered={:.4} wall={:.2}s -> {}",
        config.n,
        config.ell,
        config.seed,
        t.m,
        t.remaining_edges,
        t.covered_fraction,
        t.wall_time_secs,
        path.display()
    );
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let mut config = SweepConfig::default();
    read_config(&args.flags.config, |k, v| config.set(k, v))?;
    args.flags.apply(&mut config.base);
    if let Some(v) = args.ns {
        config.ns = v;
    }
    if let Some(v) = args.seeds {
        config.seeds = v;
    }
    let dir = args.out_dir.unwrap_or_else(default_out_dir);
    fs::create_dir_all(&dir)?;
    let (records, report) = sweep(&config)?;
    for r in &records {
        let stem = format!("run_n{}_ell{}_seed{}", r.config.n, r.config.ell, r.config.seed);
        r.write_json(&dir.join(format!("{stem}.json")))?;
        r.write_csv(&dir.join(format!("{stem}.csv")))?;
    }
    fs::write(dir.join("sweep_report.json"), report.to_json()?)?;
    for a in &report.per_n {
        println!(
            "n={} seeds={} mean_m={:.1} remaining={:.1}+-{:.1} covered={:.4}",
            a.n,
            a.seeds.len(),
            a.mean_m,
            a.mean_remaining,
            a.stddev_remaining,
            a.mean_covered_fraction
        );
    }
    match report.fitted_exponent {
        Some(s) => println!("fitted_exponent={s:.4}"),
        None => println!("fitted_exponent=none"),
    }
    Ok(())
}

fn cmd_trajectory(ell: usize, n: usize, points: usize, out: Option<PathBuf>) -> Result<()> {
    if points < 2 {
        bail!("--points must be at least 2");
    }
    let catalog = enumerate_obstructions(ell)?;
    let mut text = format!("# schema_version={OUTPUT_SCHEMA_VERSION}\n# ell={ell} n={n}\n");
    let mut header = vec!["t".to_string(), "p".into(), "q".into(), "q_hat".into(), "y_hat".into()];
    let first = evaluate(0.0, n, &catalog)?;
    header.extend(first.w_hat.iter().map(|w| format!("{}:{}", w.key, w.k)));
    text.push_str(&header.join(","));
    text.push('\n');
    for j in 0..points {
        let t = T_MAX * j as f64 / (points - 1) as f64;
        let pt = evaluate(t, n, &catalog)?;
        let mut row = vec![pt.t, pt.p, pt.q, pt.q_hat, pt.y_hat];
        row.extend(pt.w_hat.iter().map(|w| w.value));
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    write_or_print(out.as_deref(), &text)
}

fn read_triples(path: &Path) -> Result<Vec<Triple>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let nums: Vec<u32> = line
            .split_whitespace()
            .map(|s| s.parse())
            .collect::<Result<_, _>>()
            .with_context(|| format!("line {}: expected three vertex numbers", lineno + 1))?;
        let [a, b, c] = nums[..] else {
            bail!("line {}: expected three vertex numbers", lineno + 1);
        };
        if a == b || b == c || a == c {
            bail!("line {}: repeated vertex in {a} {b} {c}", lineno + 1);
        }
        out.push([a, b, c]);
    }
    Ok(out)
}

/// Exit code 0 when the system passes, 1 when it does not.
fn cmd_verify(input: &Path, ell: usize) -> Result<ExitCode> {
    check_ell(ell)?;
    let triples = read_triples(input)?;
    let catalog = enumerate_obstructions(ell)?;
    let mut witnesses = Vec::new();

    let conflict = partial_sts_violation(&triples);
    if let Some((a, b)) = conflict {
        witnesses.push(json!({ "kind": "shared_pair", "triples": [a, b] }));
    }
    let copy = find_pattern_copy(&triples, &catalog)?;
    if let Some(c) = &copy {
        witnesses.push(json!({ "kind": "forbidden_configuration", "key": c.key, "triples": c.triples }));
    }
    let mut vertices: Vec<u32> = triples.iter().flatten().copied().collect();
    vertices.sort_unstable();
    vertices.dedup();
    let subset_checked = vertices.len() <= SUBSET_MAX_VERTICES;
    if subset_checked {
        let dense = find_dense_subset(&triples, ell)?;
        if dense.is_some() != copy.is_some() {
            bail!("girth oracles disagree on {}", input.display());
        }
        if let Some(d) = dense {
            witnesses.push(json!({ "kind": "dense_set", "vertices": d.vertices, "triples": d.triples }));
        }
    }
    let girth_ok = copy.is_none();
    let partial_sts_ok = conflict.is_none();
    let report = json!({
        "schema_version": OUTPUT_SCHEMA_VERSION,
        "ell": ell,
        "triples": triples.len(),
        "vertices": vertices.len(),
        "girth_ok": girth_ok,
        "partial_sts_ok": partial_sts_ok,
        "subset_checked": subset_checked,
        "witnesses": witnesses,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(if girth_ok && partial_sts_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_report(runs: Vec<PathBuf>, counting_ell: Option<usize>, counting_n: Vec<usize>, out: Option<PathBuf>) -> Result<()> {
    let mut doc = serde_json::Map::new();
    doc.insert("schema_version".into(), json!(OUTPUT_SCHEMA_VERSION));
    if runs.is_empty() && counting_ell.is_none() {
        bail!("nothing to report: pass --runs and/or --counting-ell");
    }
    if !runs.is_empty() {
        let records = runs
            .iter()
            .map(|p| RunRecord::read_json(p).with_context(|| format!("reading {}", p.display())))
            .collect::<Result<Vec<_>>>()?;
        let report = concentration_report(&records, Default::default());
        doc.insert("sweep".into(), serde_json::to_value(report)?);
    }
    if let Some(ell) = counting_ell {
        if counting_n.is_empty() {
            bail!("--counting-ell needs --counting-n");
        }
        doc.insert("counting".into(), serde_json::to_value(counting_table(ell, &counting_n)?)?);
    }
    let text = serde_json::to_string_pretty(&doc)? + "\n";
    write_or_print(out.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Catalog { ell, out } => cmd_catalog(ell, out).map(|_| ExitCode::SUCCESS),
        Command::Run(args) => cmd_run(args).map(|_| ExitCode::SUCCESS),
        Command::Sweep(args) => cmd_sweep(args).map(|_| ExitCode::SUCCESS),
        Command::Trajectory { ell, n, points, out } => cmd_trajectory(ell, n, points, out).map(|_| ExitCode::SUCCESS),
        Command::Verify { input, ell } => cmd_verify(&input, ell),
        Command::Report {
            runs,
            counting_ell,
            counting_n,
            out,
        } => cmd_report(runs, counting_ell, counting_n, out).map(|_| ExitCode::SUCCESS),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
