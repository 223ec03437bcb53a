//! Measurements on a live process state and independent validity oracles.

mod extensions;
mod girth;
mod rooted;
mod snapshot;

use crate::catalog::Obstruction;
use crate::engine::ProcessState;
use crate::error::{Error, Result};
use crate::hypergraph::{sorted, Triple};

pub use extensions::{ExtensionCounter, PairBits};
pub use girth::{
    find_dense_subset, find_pattern_copy, girth_check_patterns, girth_check_subsets, partial_sts_violation,
    DenseSet, PatternCopy, TripleSet, SUBSET_MAX_VERTICES,
};
pub use rooted::{count_rooted_extensions, rooted_extension_report, ExtensionReport, RootedPattern, DEFAULT_ALPHA};
pub use snapshot::{rel_error, take_snapshot, w_label, SampleCounts, Snapshot, WSample, YSample, REL_ERROR_FLOOR};

/// `|Y_uv|`: vertices `z` with `uvz` available. Read from the maintained
/// counter; debug builds recount by scanning.
pub fn codegree_y(state: &ProcessState, u: u32, v: u32) -> Result<u32> {
    let count = state.codegree(u, v)?;
    debug_assert_eq!(count, codegree_y_scan(state, u, v));
    Ok(count)
}

/// `|Y_uv|` by scanning every third vertex.
pub fn codegree_y_scan(state: &ProcessState, u: u32, v: u32) -> u32 {
    (0..state.n() as u32)
        .filter(|&z| z != u && z != v && state.is_available(sorted([u, v, z])))
        .count() as u32
}

/// `|W_uvw,F,k|`: copies of `F` through the available triple `uvw` with `k`
/// triples chosen and `e_F - k` available.
pub fn count_w(state: &ProcessState, uvw: Triple, f: &Obstruction, k: usize) -> Result<u64> {
    let uvw = sorted(uvw);
    if uvw[2] as usize >= state.n() || uvw[0] == uvw[1] || uvw[1] == uvw[2] {
        return Err(Error::InvalidTriple(uvw));
    }
    if !state.is_available(uvw) {
        return Err(Error::NotAvailable(uvw));
    }
    if k + 2 > f.edge_count() {
        return Err(Error::PatternTooLarge(format!(
            "k = {k} exceeds e_F - 2 = {}",
            f.edge_count() - 2
        )));
    }
    let bits = PairBits::build(state);
    Ok(ExtensionCounter::new(f).count_by_k(&bits, uvw)[k])
}
