//! Closed-form trajectory predictions for the process.
//!
//! With `t = i / n^2` and `p = 1 - 6t`, the large family `F` enters through
//!
//! ```text
//! q(t)  = exp(-sum_F 6 e_F / |Aut F| * (6t)^(e_F - 1))
//! q~(t) = sum_F 36 e_F (e_F - 1) / |Aut F| * (6t)^(e_F - 2)      (q' = -q q~)
//! ```
//!
//! and the predicted sizes are `|Q| ~ p^3 q n^3 / 6`, `|Y_uv| ~ p^2 q n` and
//! `|W_uvw,F,k| ~ 6 e_F / |Aut F| * C(e_F - 1, k) (6t)^k (p^3 q n)^(e_F - 1 - k)`.

use serde::{Deserialize, Serialize};

use crate::catalog::{Obstruction, ObstructionCatalog};
use crate::error::{Error, Result};
use crate::hypergraph::triple_count;

pub const T_MAX: f64 = 1.0 / 6.0;

/// Prediction for one `(F, k)` extension count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WHat {
    pub key: String,
    pub k: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub n: usize,
    pub p: f64,
    pub pi: f64,
    pub q: f64,
    pub q_tilde: f64,
    pub q_hat: f64,
    pub y_hat: f64,
    pub w_hat: Vec<WHat>,
}

impl TrajectoryPoint {
    pub fn w_hat(&self, key: &str, k: usize) -> Option<f64> {
        self.w_hat.iter().find(|w| w.key == key && w.k == k).map(|w| w.value)
    }
}

fn check_time(t: f64) -> Result<()> {
    // allow rounding noise at the right end
    if !(0.0..=T_MAX + 1e-12).contains(&t) || t.is_nan() {
        return Err(Error::TimeOutOfRange(t));
    }
    Ok(())
}

fn weight(f: &Obstruction) -> f64 {
    6.0 * f.edge_count() as f64 / f.aut_count as f64
}

/// `sum_F 6 e_F / |Aut F| (6t)^(e_F - 1)`, the exponent of `q`.
fn q_exponent(t: f64, catalog: &ObstructionCatalog) -> f64 {
    catalog
        .large_members
        .iter()
        .map(|f| weight(f) * (6.0 * t).powi(f.edge_count() as i32 - 1))
        .sum()
}

pub fn q(t: f64, catalog: &ObstructionCatalog) -> f64 {
    (-q_exponent(t, catalog)).exp()
}

pub fn q_tilde(t: f64, catalog: &ObstructionCatalog) -> f64 {
    catalog
        .large_members
        .iter()
        .map(|f| {
            let e = f.edge_count() as f64;
            36.0 * e * (e - 1.0) / f.aut_count as f64 * (6.0 * t).powi(f.edge_count() as i32 - 2)
        })
        .sum()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `x^k`, falling back to log space when the result would overflow.
fn pow_guarded(x: f64, k: i32) -> f64 {
    let direct = x.powi(k);
    if direct.is_finite() {
        direct
    } else {
        (k as f64 * x.ln()).exp()
    }
}

pub fn w_hat(f: &Obstruction, k: usize, t: f64, n: usize, q: f64) -> f64 {
    let e = f.edge_count();
    let p = 1.0 - 6.0 * t;
    weight(f)
        * binomial(e - 1, k)
        * (6.0 * t).powi(k as i32)
        * pow_guarded(p.powi(3) * q * n as f64, (e - 1 - k) as i32)
}

/// All predictions at time `t` for `n` vertices.
pub fn evaluate(t: f64, n: usize, catalog: &ObstructionCatalog) -> Result<TrajectoryPoint> {
    check_time(t)?;
    let t = t.min(T_MAX);
    let nf = n as f64;
    let p = 1.0 - 6.0 * t;
    let q = q(t, catalog);
    let mut w = Vec::new();
    for f in &catalog.large_members {
        for k in 0..=f.edge_count() - 2 {
            w.push(WHat {
                key: f.key_hex(),
                k,
                value: w_hat(f, k, t, n, q),
            });
        }
    }
    Ok(TrajectoryPoint {
        t,
        n,
        p,
        pi: 6.0 * t / nf,
        q,
        q_tilde: q_tilde(t, catalog),
        q_hat: p.powi(3) * q * nf.powi(3) / 6.0,
        y_hat: p * p * q * nf,
        w_hat: w,
    })
}

/// Exact number of copies of `f` on `n` labeled vertices that contain one
/// fixed triple: `|copies| * e_F / C(n, 3)` with
/// `|copies| = n (n-1) ... (n - v_F + 1) / |Aut F|`.
pub fn n_uvw_count(f: &Obstruction, n: usize) -> f64 {
    if n < f.vertex_count {
        return 0.0;
    }
    let falling: f64 = (0..f.vertex_count).map(|i| (n - i) as f64).product();
    let copies = falling / f.aut_count as f64;
    copies * f.edge_count() as f64 / triple_count(n) as f64
}

/// Leading-order form `6 e_F / |Aut F| * n^(e_F - 1)` of [`n_uvw_count`].
pub fn n_uvw_leading(f: &Obstruction, n: usize) -> f64 {
    weight(f) * pow_guarded(n as f64, f.edge_count() as i32 - 1)
}

/// Natural-log estimates of the number of process realizations (`n1`), the
/// orderings of one final system (`n2`) and their ratio.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingEstimate {
    pub n: usize,
    pub log_n1: f64,
    pub log_n2: f64,
    pub log_ratio: f64,
    /// `(n^2/6)(log(n^3/6) - 13/4)`, available when the large family is the
    /// Pasch configuration alone.
    pub closed_form_log_n1: Option<f64>,
    /// `(n^2/6)(log n - 9/4)`, same condition.
    pub closed_form_log_ratio: Option<f64>,
}

pub const SIMPSON_PANELS: usize = 10_000;

/// `log N1 = n^2 * integral_0^{1/6} log q_hat(t) dt`, the continuum form of
/// summing `log q_hat(i/n^2)` over the steps. With `t = (1 - u^2)/6` the
/// integrand becomes `log q_hat(t(u)) * u / 3` on `[0, 1]`, which is bounded
/// at `u = 0` where `p` vanishes.
pub fn counting_estimate(n: usize, catalog: &ObstructionCatalog) -> CountingEstimate {
    let nf = n as f64;
    let base = (nf.powi(3) / 6.0).ln();
    let integrand = |u: f64| {
        if u == 0.0 {
            return 0.0;
        }
        let t = (1.0 - u * u) / 6.0;
        let p = u * u;
        (base + 3.0 * p.ln() - q_exponent(t, catalog)) * u / 3.0
    };
    let integral = simpson(integrand, 0.0, 1.0, SIMPSON_PANELS);
    let log_n1 = nf * nf * integral;
    let steps = nf * nf / 6.0;
    let log_n2 = ln_factorial_stirling(steps);

    let pasch_only = catalog.large_members.len() == 1
        && catalog.large_members[0].vertex_count == 6
        && catalog.large_members[0].aut_count == 24;
    let (closed_n1, closed_ratio) = if pasch_only {
        (
            Some(steps * (base - 3.25)),
            Some(steps * (nf.ln() - 2.25)),
        )
    } else {
        (None, None)
    };
    CountingEstimate {
        n,
        log_n1,
        log_n2,
        log_ratio: log_n1 - log_n2,
        closed_form_log_n1: closed_n1,
        closed_form_log_ratio: closed_ratio,
    }
}

/// Composite Simpson rule; `panels` is rounded up to even.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let m = panels + panels % 2;
    let h = (b - a) / m as f64;
    let mut sum = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// `ln(x!)` by Stirling's series, for real `x >= 1`.
pub fn ln_factorial_stirling(x: f64) -> f64 {
    x * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI * x).ln() + 1.0 / (12.0 * x)
        - 1.0 / (360.0 * x.powi(3))
}

/// Relative deviations found by [`derivative_check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub t: f64,
    /// Central difference of `q` against `-q q~`.
    pub fd_rel_dev: f64,
    /// `sum_F w_hat(F, e_F - 2) / q_hat` against `q~ / n^2`.
    pub algebraic_rel_dev: f64,
}

pub const FD_STEP: f64 = 1e-6;

fn rel_dev(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-300 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

pub fn derivative_check(t: f64, n: usize, catalog: &ObstructionCatalog) -> Result<DerivativeReport> {
    if !(t > FD_STEP && t < T_MAX - FD_STEP) {
        return Err(Error::TimeOutOfRange(t));
    }
    let fd = (q(t + FD_STEP, catalog) - q(t - FD_STEP, catalog)) / (2.0 * FD_STEP);
    let qt = q(t, catalog);
    let analytic = -qt * q_tilde(t, catalog);
    // q' is identically zero when the large family is empty
    let fd_rel_dev = if catalog.large_members.is_empty() {
        fd.abs()
    } else {
        rel_dev(fd, analytic)
    };

    let point = evaluate(t, n, catalog)?;
    let lhs: f64 = catalog
        .large_members
        .iter()
        .map(|f| point.w_hat(&f.key_hex(), f.edge_count() - 2).unwrap() / point.q_hat)
        .sum();
    let rhs = point.q_tilde / (n as f64 * n as f64);
    Ok(DerivativeReport {
        t,
        fd_rel_dev,
        algebraic_rel_dev: rel_dev(lhs, rhs),
    })
}
