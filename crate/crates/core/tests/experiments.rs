use hgtp_core::experiments::{concentration_report, CsvRun, RunConfig, RunRecord, Tolerances};
use hgtp_core::observables::SampleCounts;
use hgtp_core::run_trials;

fn config(n: usize, ell: usize) -> RunConfig {
    RunConfig {
        n,
        ell,
        samples: SampleCounts { pairs: 50, triples: 10 },
        ..RunConfig::default()
    }
}

#[test]
fn remaining_edges_concentrate() {
    let seeds: Vec<u64> = (0..10).collect();
    let records = run_trials(&config(100, 4), &seeds).unwrap();
    let report = concentration_report(&records, Tolerances::default());
    let a = &report.per_n[0];
    assert_eq!(a.seeds, seeds);
    assert!(a.stddev_remaining < 0.25 * a.mean_remaining, "{a:?}");
}

#[test]
fn girth_six_stops_short_of_a_full_system() {
    for r in run_trials(&config(100, 6), &[0, 1, 2]).unwrap() {
        assert!(r.terminal.m < 100 * 100 / 6);
        assert!(3 * r.terminal.m < 4950);
    }
}

#[test]
fn triangle_removal_rows_use_p_cubed() {
    let mut c = config(120, 4);
    c.snapshot_times = vec![0.0, 0.05, 0.1];
    let records = run_trials(&c, &[5]).unwrap();
    for s in &records[0].snapshots {
        let p = 1.0 - 6.0 * s.t;
        let expected = p.powi(3) * 120f64.powi(3) / 6.0;
        assert!((s.predicted.q_hat - expected).abs() <= 1e-9 * expected);
        assert!(s.predicted.w_hat.is_empty());
    }
    let first = &records[0].snapshots[0];
    assert_eq!(first.q_size, 120 * 119 * 118 / 6);
    let report = concentration_report(&records, Tolerances::default());
    assert_eq!(report.concentration[0].worst["q"], 1.0 - (119.0 * 118.0) / (120.0 * 120.0));
}

#[test]
fn files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(50, 7);
    c.snapshot_every = 40;
    c.keep_triples = true;
    let r = run_trials(&c, &[77]).unwrap().remove(0);
    let json = dir.path().join("r.json");
    let csv = dir.path().join("r.csv");
    r.write_json(&json).unwrap();
    r.write_csv(&csv).unwrap();
    assert_eq!(RunRecord::read_json(&json).unwrap(), r);
    let parsed = CsvRun::parse(&std::fs::read_to_string(&csv).unwrap()).unwrap();
    assert_eq!(parsed, r.csv_view());
    assert_eq!(parsed.rows.len(), r.snapshots.len());
}
