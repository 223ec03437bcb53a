//! One line per acceptance criterion. Pass criterion numbers as arguments to
//! run a subset, e.g. `cargo test --test acceptance -- 2 8`.

mod common;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use common::{brute_canon, naive_classes, permutations, q_oracle, q_tilde_oracle, Small};
use hgtp_core::engine::BruteForceOracle;
use hgtp_core::experiments::{concentration_report, sweep, RunConfig, SweepConfig, Tolerances};
use hgtp_core::hypergraph::pair_count;
use hgtp_core::observables::{
    codegree_y_scan, girth_check_patterns, girth_check_subsets, partial_sts_violation, SampleCounts,
};
use hgtp_core::trajectories::{derivative_check, T_MAX};
use hgtp_core::{enumerate_obstructions, run_trials, ProcessState, StepOutcome, TripleCode};

type Check = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn catalog_correctness() -> Check {
    let start = Instant::now();
    let mut naive: BTreeMap<Small, usize> = BTreeMap::new();
    let mut counts = Vec::new();
    for ell in 4..=7 {
        naive.extend(naive_classes(ell));
        let cat = enumerate_obstructions(ell).map_err(err)?;
        let ours: BTreeMap<Small, usize> = cat
            .all_members
            .iter()
            .map(|f| {
                let perms = permutations(f.vertex_count);
                (brute_canon(f.vertex_count, &f.triples, &perms), f.aut_count as usize)
            })
            .collect();
        ensure(ours == naive, || format!("ell = {ell}: catalog differs from exhaustive search"))?;
        counts.push(cat.all_members.len());
    }
    ensure(counts[..3] == [1, 1, 2], || format!("class counts {counts:?}"))?;
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1}s"))?;
    Ok(format!("classes {counts:?} for ell 4..=7 match exhaustive search"))
}

fn oracle_equivalence() -> Check {
    let mut states = 0usize;
    for ell in [4, 6, 7] {
        let cat = Arc::new(enumerate_obstructions(ell).map_err(err)?);
        for seed in 0..5 {
            let mut s = ProcessState::with_catalog(20, Arc::clone(&cat), seed, 1 << 30).map_err(err)?;
            loop {
                let mut inc: Vec<TripleCode> = s.available().to_vec();
                inc.sort_unstable();
                let inc: Vec<_> = inc.into_iter().map(|c| c.decode()).collect();
                let bf = BruteForceOracle::new(&s).available_set();
                ensure(inc == bf, || {
                    format!("ell = {ell}, seed = {seed}, i = {}: sets differ", s.step_index())
                })?;
                states += 1;
                if let StepOutcome::Terminated { .. } = s.step() {
                    break;
                }
            }
        }
    }
    Ok(format!("n = 20, ell in {{4, 6, 7}}, 5 seeds: Q equals oracle set at all {states} states"))
}

fn girth_safety() -> Check {
    let mut checked = 0;
    for ell in 4..=7 {
        let cat = Arc::new(enumerate_obstructions(ell).map_err(err)?);
        for seed in 0..3 {
            let mut s = ProcessState::with_catalog(36, Arc::clone(&cat), seed, 1 << 30).map_err(err)?;
            s.run_to_end();
            let t = s.chosen_triples();
            ensure(partial_sts_violation(t).is_none(), || format!("pair conflict, ell = {ell}"))?;
            ensure(girth_check_subsets(t, ell).map_err(err)?, || {
                format!("subset check failed, n = 36, ell = {ell}, seed = {seed}")
            })?;
            checked += 1;
        }
    }
    let cat = Arc::new(enumerate_obstructions(6).map_err(err)?);
    for seed in 0..3 {
        let mut s = ProcessState::with_catalog(300, Arc::clone(&cat), seed, 1 << 31).map_err(err)?;
        s.run_to_end();
        let t = s.chosen_triples();
        ensure(partial_sts_violation(t).is_none(), || "pair conflict at n = 300".into())?;
        ensure(girth_check_patterns(t, &cat).map_err(err)?, || {
            format!("pattern check failed, n = 300, seed = {seed}")
        })?;
        checked += 1;
    }
    Ok(format!("{checked} final systems pass (12 subset checks at n = 36, 3 pattern checks at n = 300)"))
}

fn dynamic_concentration() -> Check {
    let config = RunConfig {
        n: 500,
        ell: 6,
        snapshot_times: vec![0.05, 0.10, 0.13],
        samples: SampleCounts { pairs: 200, triples: 50 },
        ..RunConfig::default()
    };
    let records = run_trials(&config, &[0, 1, 2]).map_err(err)?;
    let tol = Tolerances {
        q: 0.05,
        y: 0.10,
        w: 0.20,
        w_max_k: 0,
        t_max: 0.15,
    };
    let report = concentration_report(&records, tol);
    let pasch = enumerate_obstructions(6).map_err(err)?.large_members[0].key_hex();
    let w0 = format!("w_mean:{pasch}:0");
    let mut parts = Vec::new();
    for row in &report.concentration {
        ensure(row.samples == 3, || format!("t = {}: {} snapshots", row.t, row.samples))?;
        parts.push(format!(
            "t={:.2} Q {:.4} Y {:.4} W0 {:.4}",
            row.t, row.worst["q"], row.worst["y_mean"], row.worst[&w0]
        ));
    }
    ensure(report.concentration.len() == 3, || "missing grid times".into())?;
    let wall: f64 = records.iter().map(|r| r.terminal.wall_time_secs).fold(0.0, f64::max);
    ensure(report.pass, || format!("worst errors: {}", parts.join("; ")))?;
    ensure(wall < 600.0, || format!("slowest run {wall:.0}s"))?;
    Ok(format!("worst |rel err| over 3 seeds: {} (slowest run {wall:.1}s)", parts.join("; ")))
}

fn triangle_removal() -> Check {
    let n = 500usize;
    let mut s = ProcessState::new(n, 4, 0).map_err(err)?;
    let target = (0.10 * (n * n) as f64).round() as usize;
    while s.step_index() < target {
        if let StepOutcome::Terminated { .. } = s.step() {
            return Err(format!("terminated at i = {}", s.step_index()));
        }
    }
    let p = 1.0 - 6.0 * s.time();
    let pred = p.powi(3) * (n as f64).powi(3) / 6.0;
    let rel = (s.available_len() as f64 - pred) / pred;
    ensure(rel.abs() <= 0.05, || format!("|Q| = {}, p^3 n^3/6 = {pred:.0}, rel err {rel:.4}", s.available_len()))?;
    Ok(format!("n = 500, t = 0.10: |Q| = {} vs p^3 n^3/6 = {pred:.0} (rel err {rel:+.4})", s.available_len()))
}

fn near_completion() -> Check {
    let cfg = SweepConfig {
        base: RunConfig {
            ell: 6,
            snapshot_times: vec![],
            ..RunConfig::default()
        },
        ns: vec![100, 200, 400],
        seeds: (0..5).collect(),
        tolerances: Tolerances::default(),
    };
    let (_, report) = sweep(&cfg).map_err(err)?;
    let fracs: Vec<f64> = report.per_n.iter().map(|a| a.mean_covered_fraction).collect();
    let text: Vec<String> = report
        .per_n
        .iter()
        .map(|a| format!("n={} {:.4}", a.n, a.mean_covered_fraction))
        .collect();
    ensure(fracs.windows(2).all(|w| w[0] <= w[1]), || format!("not monotone: {}", text.join(", ")))?;
    ensure(fracs[2] >= 0.90, || format!("n = 400 below 0.90: {}", text.join(", ")))?;
    Ok(format!("mean covered fraction {}", text.join(", ")))
}

fn terminal_exponent() -> Check {
    let cfg = SweepConfig {
        base: RunConfig {
            ell: 4,
            snapshot_times: vec![],
            ..RunConfig::default()
        },
        ns: vec![100, 141, 200, 283, 400],
        seeds: (0..5).collect(),
        tolerances: Tolerances::default(),
    };
    let (_, report) = sweep(&cfg).map_err(err)?;
    let slope = report.fitted_exponent.ok_or("no fit")?;
    let means: Vec<String> = report
        .per_n
        .iter()
        .map(|a| format!("{}:{:.0}", a.n, a.mean_remaining))
        .collect();
    ensure((1.4..=1.9).contains(&slope), || format!("slope {slope:.3} ({})", means.join(" ")))?;
    Ok(format!("fitted exponent {slope:.3} from mean remaining edges {}", means.join(" ")))
}

fn trajectory_identities() -> Check {
    let (mut fd_max, mut alg_max, mut oracle_max) = (0.0f64, 0.0f64, 0.0f64);
    for ell in [4, 6, 7] {
        let cat = enumerate_obstructions(ell).map_err(err)?;
        let members: Vec<(usize, u64)> = cat.large_members.iter().map(|f| (f.edge_count(), f.aut_count)).collect();
        for j in 1..=20 {
            let t = T_MAX * j as f64 / 21.0;
            let r = derivative_check(t, 500, &cat).map_err(err)?;
            fd_max = fd_max.max(r.fd_rel_dev);
            alg_max = alg_max.max(r.algebraic_rel_dev);
            let pt = hgtp_core::trajectories::evaluate(t, 500, &cat).map_err(err)?;
            let (q, qt) = (q_oracle(t, &members), q_tilde_oracle(t, &members));
            oracle_max = oracle_max.max((pt.q - q).abs() / q).max(if qt == 0.0 {
                pt.q_tilde.abs()
            } else {
                (pt.q_tilde - qt).abs() / qt
            });
        }
    }
    ensure(fd_max <= 1e-6 && alg_max <= 1e-12 && oracle_max <= 1e-12, || {
        format!("fd {fd_max:.2e}, algebraic {alg_max:.2e}, vs oracle {oracle_max:.2e}")
    })?;
    Ok(format!(
        "60 points: max FD dev {fd_max:.2e}, algebraic {alg_max:.2e}, formula oracle {oracle_max:.2e}"
    ))
}

fn invariant_suite() -> Check {
    let mut steps = 0usize;
    for (n, ell) in [(30usize, 4usize), (45, 6), (60, 7)] {
        let mut s = ProcessState::new(n, ell, 11).map_err(err)?;
        let mut failure = None;
        s.run_with(|s| {
            if failure.is_some() {
                return;
            }
            let i = s.step_index();
            if s.alive_pair_count() as u64 != pair_count(n) - 3 * i as u64 {
                failure = Some(format!("|E({i})| wrong at n = {n}"));
                return;
            }
            let sum: u64 = s.alive_pairs().iter().map(|&(u, v)| codegree_y_scan(s, u, v) as u64).sum();
            if sum != 3 * s.available_len() as u64 {
                failure = Some(format!("sum of Y = {sum} != 3|Q| at n = {n}, i = {i}"));
            }
            steps += 1;
        });
        if let Some(f) = failure {
            return Err(f);
        }
    }
    let config = RunConfig {
        n: 80,
        ell: 7,
        snapshot_every: 100,
        keep_triples: true,
        ..RunConfig::default()
    };
    let a = run_trials(&config, &[4, 5]).map_err(err)?;
    let b = run_trials(&config, &[4, 5]).map_err(err)?;
    for (x, y) in a.iter().zip(&b) {
        ensure(x.deterministic_json().map_err(err)? == y.deterministic_json().map_err(err)?, || {
            format!("seed {} not reproducible", x.config.seed)
        })?;
    }
    ensure(a[0].triples != a[1].triples, || "distinct seeds gave the same run".into())?;
    Ok(format!(
        "|E(i)| and sum Y = 3|Q| hold on full scans at all {steps} states (n <= 60); records byte-identical per seed"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "catalog correctness", catalog_correctness),
        (2, "oracle equivalence", oracle_equivalence),
        (3, "girth safety", girth_safety),
        (4, "dynamic concentration", dynamic_concentration),
        (5, "triangle-removal specialization", triangle_removal),
        (6, "near-completion", near_completion),
        (7, "terminal exponent probe", terminal_exponent),
        (8, "trajectory identities", trajectory_identities),
        (9, "invariant suite", invariant_suite),
    ];
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !wanted.is_empty() && !wanted.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{id}] {name}: {detail} ({secs:.1}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{id}] {name}: {detail} ({secs:.1}s)");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
