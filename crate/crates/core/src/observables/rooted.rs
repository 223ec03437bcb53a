//! Rooted extension counts: injections extending a fixed root map whose
//! non-root triples all land in the current hypergraph. Diagnostic only.

use serde::{Deserialize, Serialize};

use crate::embed::{EmbeddingPlan, UNMAPPED};
use crate::engine::ProcessState;
use crate::error::{Error, Result};
use crate::hypergraph::SmallHypergraph;

/// `H` on vertices `0..h.vertex_count` with root `G` on vertices
/// `0..root_vertices` carrying `root_triples`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootedPattern {
    pub h: SmallHypergraph,
    pub root_vertices: usize,
    pub root_triples: Vec<[u8; 3]>,
}

impl RootedPattern {
    pub fn new(h: SmallHypergraph, root_vertices: usize, root_triples: Vec<[u8; 3]>) -> Result<Self> {
        let mut root_triples: Vec<[u8; 3]> = root_triples
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t
            })
            .collect();
        root_triples.sort_unstable();
        root_triples.dedup();
        if root_vertices > h.vertex_count {
            return Err(Error::PatternTooLarge("root larger than pattern".into()));
        }
        for t in &root_triples {
            if !h.contains(*t) || t.iter().any(|&x| x as usize >= root_vertices) {
                return Err(Error::PatternTooLarge(format!(
                    "root triple {t:?} is not a triple of H on the root vertices"
                )));
            }
        }
        Ok(RootedPattern {
            h,
            root_vertices,
            root_triples,
        })
    }

    /// Triples of `H` outside `G`.
    pub fn extension_triples(&self) -> Vec<[u8; 3]> {
        self.h
            .triples
            .iter()
            .filter(|t| !self.root_triples.contains(t))
            .copied()
            .collect()
    }

    /// `max over G <= J <= H of (v_H - e_H) + (e_J - v_J)`.
    pub fn bound_exponent(&self) -> i64 {
        let ext = self.extension_triples();
        let base = self.h.vertex_count as i64 - self.h.edge_count() as i64;
        let mut best = i64::MIN;
        for mask in 0u64..1 << ext.len() {
            let mut verts = vec![false; self.h.vertex_count];
            verts[..self.root_vertices].fill(true);
            let mut e = self.root_triples.len() as i64;
            for (i, t) in ext.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    e += 1;
                    for &x in t {
                        verts[x as usize] = true;
                    }
                }
            }
            let v = verts.iter().filter(|&&b| b).count() as i64;
            best = best.max(base + e - v);
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub count: u64,
    pub alpha: f64,
    pub exponent: i64,
    /// `n^(alpha/9) * n^exponent`.
    pub bound: f64,
    pub within_bound: bool,
}

pub const DEFAULT_ALPHA: f64 = 0.75;

pub fn count_rooted_extensions(state: &ProcessState, pattern: &RootedPattern, rho: &[u32]) -> Result<u64> {
    let limit = 2 * state.ell();
    if pattern.h.vertex_count > limit || pattern.h.edge_count() > limit {
        return Err(Error::PatternTooLarge(format!(
            "pattern has {} vertices and {} triples, limit is {limit}",
            pattern.h.vertex_count,
            pattern.h.edge_count()
        )));
    }
    if rho.len() != pattern.root_vertices {
        return Err(Error::PatternTooLarge("root map has the wrong length".into()));
    }
    for (i, &x) in rho.iter().enumerate() {
        if x as usize >= state.n() || rho[..i].contains(&x) {
            return Err(Error::PatternTooLarge("root map is not an injection into [n]".into()));
        }
    }
    let premapped: Vec<u8> = (0..pattern.root_vertices as u8).collect();
    let plan = EmbeddingPlan::new(pattern.h.vertex_count, &pattern.extension_triples(), &premapped);
    let mut map = vec![UNMAPPED; pattern.h.vertex_count];
    map[..rho.len()].copy_from_slice(rho);
    Ok(plan.count(state, &mut map))
}

/// Count together with the extension bound, which is reported and not enforced.
pub fn rooted_extension_report(
    state: &ProcessState,
    pattern: &RootedPattern,
    rho: &[u32],
    alpha: f64,
) -> Result<ExtensionReport> {
    let count = count_rooted_extensions(state, pattern, rho)?;
    let exponent = pattern.bound_exponent();
    let n = state.n() as f64;
    let bound = n.powf(alpha / 9.0 + exponent as f64);
    Ok(ExtensionReport {
        count,
        alpha,
        exponent,
        bound,
        within_bound: count as f64 <= bound,
    })
}
