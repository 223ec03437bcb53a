mod common;

use common::{choose, q_oracle, q_tilde_oracle, w_hat_oracle};
use hgtp_core::enumerate_obstructions;
use hgtp_core::trajectories::{counting_estimate, derivative_check, evaluate, n_uvw_count, n_uvw_leading, T_MAX};

fn shape(ell: usize) -> Vec<(usize, u64)> {
    enumerate_obstructions(ell)
        .unwrap()
        .large_members
        .iter()
        .map(|f| (f.edge_count(), f.aut_count))
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

#[test]
fn evaluate_matches_written_out_formulas() {
    for ell in [4, 6, 7, 8, 9] {
        let cat = enumerate_obstructions(ell).unwrap();
        let members = shape(ell);
        for j in 0..=40 {
            let t = T_MAX * j as f64 / 40.0;
            let n = 300;
            let pt = evaluate(t, n, &cat).unwrap();
            let p = 1.0 - 6.0 * t;
            let q = q_oracle(t, &members);
            assert!(rel(pt.q, q) < 1e-13);
            assert!(rel(pt.q_tilde, q_tilde_oracle(t, &members)) < 1e-13);
            assert!(rel(pt.q_hat, p.powi(3) * q * 300f64.powi(3) / 6.0) < 1e-12);
            assert!(rel(pt.y_hat, p * p * q * 300.0) < 1e-12);
            for f in &cat.large_members {
                for k in 0..f.edge_count() - 1 {
                    let w = w_hat_oracle(t, n, f.edge_count(), f.aut_count, k, &members);
                    assert!(rel(pt.w_hat(&f.key_hex(), k).unwrap(), w) < 1e-12, "ell={ell} t={t} k={k}");
                }
            }
        }
    }
}

#[test]
fn pasch_correction_is_exp_minus_six_t_cubed() {
    let cat = enumerate_obstructions(6).unwrap();
    for t in [0.01, 0.07, 0.12, 0.16] {
        let pt = evaluate(t, 100, &cat).unwrap();
        assert!(rel(pt.q, (-(6.0 * t).powi(3)).exp()) < 1e-14);
    }
}

#[test]
fn derivative_identities_at_interior_points() {
    for ell in [4, 6, 7] {
        let cat = enumerate_obstructions(ell).unwrap();
        let members = shape(ell);
        for j in 1..=20 {
            let t = T_MAX * j as f64 / 21.0;
            let r = derivative_check(t, 500, &cat).unwrap();
            assert!(r.fd_rel_dev <= 1e-6, "ell={ell} t={t}: {r:?}");
            assert!(r.algebraic_rel_dev <= 1e-12, "ell={ell} t={t}: {r:?}");
            // and the same identities from the written-out formulas
            let h = 1e-6;
            let fd = (q_oracle(t + h, &members) - q_oracle(t - h, &members)) / (2.0 * h);
            let exact = -q_oracle(t, &members) * q_tilde_oracle(t, &members);
            assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1e-300) || members.is_empty());
        }
    }
}

#[test]
fn w_hat_at_zero_is_the_leading_copy_count() {
    let cat = enumerate_obstructions(7).unwrap();
    for n in [50usize, 400] {
        let pt = evaluate(0.0, n, &cat).unwrap();
        for f in &cat.large_members {
            let lead = n_uvw_leading(f, n);
            assert_eq!(pt.w_hat(&f.key_hex(), 0).unwrap(), lead);
            let e = f.edge_count();
            assert!(rel(lead, 6.0 * e as f64 / f.aut_count as f64 * (n as f64).powi(e as i32 - 1)) < 1e-14);
            // exact count approaches the leading term from below
            let exact = n_uvw_count(f, n);
            assert!(exact < lead && exact > lead * (1.0 - 10.0 * e as f64 / n as f64));
        }
    }
}

#[test]
fn exact_pasch_count_through_a_triple() {
    // Pasch: 4 anchor triples x 6 orders x (n-3)(n-4)(n-5) placements / 24
    let cat = enumerate_obstructions(6).unwrap();
    let f = &cat.large_members[0];
    for n in [6usize, 10, 77] {
        let m = n as f64;
        assert_eq!(n_uvw_count(f, n), (m - 3.0) * (m - 4.0) * (m - 5.0));
    }
    assert_eq!(choose(5, 2), 10.0);
}

#[test]
fn counting_estimate_closed_form() {
    // (n^2/6)(log n - 9/4) is the log of (n / e^(9/4))^(n^2/6)
    let cat = enumerate_obstructions(6).unwrap();
    for n in [1000usize, 10_000] {
        let c = counting_estimate(n, &cat);
        let nf = n as f64;
        let closed = nf * nf / 6.0 * (nf.ln() - 2.25);
        assert!(rel(c.closed_form_log_ratio.unwrap(), closed) < 1e-12);
        // numeric N1 against its closed form: both integrate the same log q_hat
        assert!(rel(c.log_n1, c.closed_form_log_n1.unwrap()) < 1e-6);
        // the ratio differs only by lower-order terms of the factorial
        assert!((c.log_ratio - closed).abs() < 5.0 * nf.ln() + 10.0);
    }
}
