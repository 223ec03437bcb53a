//! Girth oracles for arbitrary triple systems.
//!
//! The subset oracle applies the definition directly: some `g` vertices
//! (`4 <= g <= ell`) spanning at least `g - 2` triples. The pattern oracle
//! searches for an embedded member of the full forbidden family instead.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::catalog::ObstructionCatalog;
use crate::embed::{EmbeddingPlan, TripleHost, UNMAPPED};
use crate::error::{Error, Result};
use crate::hypergraph::{sorted, Triple};

/// Vertex limit of the subset oracle (vertex sets are `u64` masks).
pub const SUBSET_MAX_VERTICES: usize = 64;

/// A set of triples indexed for embedding searches.
pub struct TripleSet {
    n: u32,
    set: HashSet<Triple>,
    thirds: HashMap<(u32, u32), Vec<u32>>,
    nbrs: HashMap<u32, Vec<u32>>,
    triples: Vec<Triple>,
}

impl TripleSet {
    pub fn new(triples: &[Triple]) -> Self {
        let mut set = HashSet::new();
        let mut list = Vec::new();
        let mut thirds: HashMap<(u32, u32), Vec<u32>> = HashMap::new();
        let mut nbrs: HashMap<u32, Vec<u32>> = HashMap::new();
        let mut n = 0;
        for &t in triples {
            let t = sorted(t);
            if !set.insert(t) {
                continue;
            }
            list.push(t);
            n = n.max(t[2] + 1);
            for (a, b, c) in [(t[0], t[1], t[2]), (t[0], t[2], t[1]), (t[1], t[2], t[0])] {
                thirds.entry((a, b)).or_default().push(c);
                thirds.entry((b, a)).or_default().push(c);
            }
            for &x in &t {
                let e = nbrs.entry(x).or_default();
                e.extend(t.iter().copied().filter(|&y| y != x));
            }
        }
        for v in nbrs.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        TripleSet {
            n,
            set,
            thirds,
            nbrs,
            triples: list,
        }
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }
}

impl TripleHost for TripleSet {
    fn vertex_count(&self) -> u32 {
        self.n
    }

    fn contains(&self, t: Triple) -> bool {
        self.set.contains(&t)
    }

    fn thirds(&self, a: u32, b: u32, out: &mut Vec<u32>) {
        if let Some(v) = self.thirds.get(&(a, b)) {
            out.extend_from_slice(v);
        }
    }

    fn neighbors(&self, a: u32, out: &mut Vec<u32>) {
        if let Some(v) = self.nbrs.get(&a) {
            out.extend_from_slice(v);
        }
    }
}

fn validate(triples: &[Triple]) -> Result<()> {
    for t in triples {
        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            return Err(Error::InvalidTriple(*t));
        }
    }
    Ok(())
}

/// A vertex set violating the girth bound, with the triples it spans.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseSet {
    pub vertices: Vec<u32>,
    pub triples: Vec<Triple>,
}

/// Searches for `g` vertices (`4 <= g <= ell`) spanning at least
/// `g - 2` triples.
///
/// A violating set can be taken to induce a connected triple system, so only
/// vertex sets grown from one triple by adding triples that meet the current
/// set are examined.
pub fn find_dense_subset(triples: &[Triple], ell: usize) -> Result<Option<DenseSet>> {
    validate(triples)?;
    let hs = TripleSet::new(triples);
    let mut verts: Vec<u32> = hs.triples.iter().flatten().copied().collect();
    verts.sort_unstable();
    verts.dedup();
    if verts.len() > SUBSET_MAX_VERTICES {
        return Err(Error::PatternTooLarge(format!(
            "subset girth check covers at most {SUBSET_MAX_VERTICES} vertices, got {}",
            verts.len()
        )));
    }
    let local: HashMap<u32, u32> = verts.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let masks: Vec<u64> = hs
        .triples
        .iter()
        .map(|t| t.iter().fold(0u64, |m, x| m | 1 << local[x]))
        .collect();

    let mut seen: HashSet<u64> = HashSet::new();
    let mut frontier: Vec<u64> = masks.iter().copied().filter(|m| seen.insert(*m)).collect();
    let mut hits: Vec<u64> = Vec::new();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &s in &frontier {
            let g = s.count_ones() as usize;
            if g >= 4 {
                let spanned = masks.iter().filter(|&&m| m & s == m).count();
                if spanned + 2 >= g {
                    hits.push(s);
                    continue;
                }
            }
            for &m in &masks {
                let grown = s | m;
                if m & s != 0 && grown != s && grown.count_ones() as usize <= ell && seen.insert(grown) {
                    next.push(grown);
                }
            }
        }
        if !hits.is_empty() {
            break;
        }
        frontier = next;
    }
    let Some(&best) = hits.iter().min_by_key(|m| (m.count_ones(), **m)) else {
        return Ok(None);
    };
    let vertices: Vec<u32> = (0..verts.len()).filter(|&i| best >> i & 1 == 1).map(|i| verts[i]).collect();
    let spanned = hs
        .triples
        .iter()
        .zip(&masks)
        .filter(|(_, &m)| m & best == m)
        .map(|(t, _)| *t)
        .collect();
    Ok(Some(DenseSet {
        vertices,
        triples: spanned,
    }))
}

/// True iff no `g` vertices with `4 <= g <= ell` span `g - 2` or more triples.
pub fn girth_check_subsets(triples: &[Triple], ell: usize) -> Result<bool> {
    Ok(find_dense_subset(triples, ell)?.is_none())
}

/// A copy of a forbidden configuration found in a triple system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternCopy {
    pub key: String,
    pub triples: Vec<Triple>,
}

pub fn find_pattern_copy(triples: &[Triple], catalog: &ObstructionCatalog) -> Result<Option<PatternCopy>> {
    validate(triples)?;
    let hs = TripleSet::new(triples);
    for f in &catalog.all_members {
        let anchor = f.triples[0];
        let plan = EmbeddingPlan::new(f.vertex_count, &f.triples, &anchor);
        let mut map = vec![UNMAPPED; f.vertex_count];
        for h in hs.triples() {
            for o in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                for k in 0..3 {
                    map[anchor[k] as usize] = h[o[k]];
                }
                let mut found = None;
                let _ = plan.for_each(&hs, &mut map, &mut |m| {
                    found = Some(m.to_vec());
                    std::ops::ControlFlow::Break(())
                });
                if let Some(m) = found {
                    let mut copy: Vec<Triple> = f
                        .triples
                        .iter()
                        .map(|t| sorted(t.map(|x| m[x as usize])))
                        .collect();
                    copy.sort_unstable();
                    return Ok(Some(PatternCopy {
                        key: f.key_hex(),
                        triples: copy,
                    }));
                }
            }
        }
    }
    Ok(None)
}

/// True iff the system contains no member of the full forbidden family.
pub fn girth_check_patterns(triples: &[Triple], catalog: &ObstructionCatalog) -> Result<bool> {
    Ok(find_pattern_copy(triples, catalog)?.is_none())
}

/// Two triples sharing a pair, if any.
pub fn partial_sts_violation(triples: &[Triple]) -> Option<(Triple, Triple)> {
    let mut owner: HashMap<(u32, u32), Triple> = HashMap::new();
    for &t in triples {
        let t = sorted(t);
        for pair in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            if let Some(&prev) = owner.get(&pair) {
                return Some((prev, t));
            }
            owner.insert(pair, t);
        }
    }
    None
}
