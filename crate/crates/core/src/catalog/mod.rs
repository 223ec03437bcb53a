//! Minimal forbidden configurations for the girth constraint.
//!
//! For a fixed `ell`, the full family holds every 3-uniform hypergraph `F`
//! with `4 <= v_F <= ell` vertices and `e_F = v_F - 2` triples that contains
//! no proper subhypergraph `J` with `v_J >= 4` and `e_J = v_J - 2`. The large
//! family keeps the members with `v_F >= 6`; the diamond (two triples sharing
//! a pair) is the only member below six vertices.

mod canon;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::SmallHypergraph;

pub use canon::{automorphism_count, automorphisms, canonical_label, CanonicalForm, MAX_CANON_VERTICES};

pub const MIN_ELL: usize = 4;
pub const MAX_ELL: usize = 9;
pub const CATALOG_SCHEMA_VERSION: u32 = 1;

/// One isomorphism class of minimal forbidden configuration, in canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction {
    pub vertex_count: usize,
    pub triples: Vec<[u8; 3]>,
    pub aut_count: u64,
    pub canonical_key: Vec<u8>,
}

impl Obstruction {
    /// Canonicalizes `h` and computes its automorphism count.
    pub fn from_hypergraph(h: &SmallHypergraph) -> Result<Self> {
        let canon = canonical_label(h)?;
        let aut_count = automorphism_count(&canon.graph);
        Ok(Obstruction {
            vertex_count: canon.graph.vertex_count,
            triples: canon.graph.triples,
            aut_count,
            canonical_key: canon.key,
        })
    }

    pub fn edge_count(&self) -> usize {
        self.triples.len()
    }

    pub fn key_hex(&self) -> String {
        hex::encode(&self.canonical_key)
    }

    pub fn hypergraph(&self) -> SmallHypergraph {
        SmallHypergraph {
            vertex_count: self.vertex_count,
            triples: self.triples.clone(),
        }
    }

    pub fn is_diamond(&self) -> bool {
        self.vertex_count == 4
    }

    /// Orbit representatives of flags `(triple index, ordered vertices of that
    /// triple)` under the automorphism group, with orbit sizes.
    ///
    /// Counting embeddings that send a flag onto a fixed ordered host triple
    /// only needs one flag per orbit, weighted by the orbit size.
    pub fn flag_orbits(&self) -> Vec<FlagOrbit> {
        let auts = automorphisms(&self.hypergraph());
        let mut flags = Vec::new();
        for (i, t) in self.triples.iter().enumerate() {
            for order in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                flags.push((i, order.map(|j| t[j])));
            }
        }
        let mut seen = vec![false; flags.len()];
        let mut out = Vec::new();
        for start in 0..flags.len() {
            if seen[start] {
                continue;
            }
            let mut size = 0;
            for sigma in &auts {
                let img = flags[start].1.map(|x| sigma[x as usize]);
                let pos = flags
                    .iter()
                    .position(|f| f.1 == img)
                    .expect("automorphism maps triples to triples");
                if !seen[pos] {
                    seen[pos] = true;
                    size += 1;
                }
            }
            out.push(FlagOrbit {
                triple: flags[start].0,
                ordered: flags[start].1,
                size,
            });
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlagOrbit {
    pub triple: usize,
    pub ordered: [u8; 3],
    pub size: usize,
}

/// True iff no proper subset of the triples spans `v_J >= 4` vertices with
/// exactly `v_J - 2` triples.
pub fn is_minimal(h: &SmallHypergraph) -> bool {
    let e = h.triples.len();
    assert!(e < 64, "is_minimal supports fewer than 64 triples");
    let full = (1u64 << e) - 1;
    (1..full).all(|mask| {
        let span = h.span(mask);
        span < 4 || mask.count_ones() as usize + 2 != span
    })
}

/// True iff some subset of triples (the whole set included) spans `v_J >= 4`
/// vertices with exactly `v_J - 2` triples.
fn has_tight_subset(h: &SmallHypergraph) -> bool {
    let e = h.triples.len();
    (1..1u64 << e).any(|mask| {
        let span = h.span(mask);
        span >= 4 && mask.count_ones() as usize + 2 == span
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObstructionCatalog {
    pub ell: usize,
    pub all_members: Vec<Obstruction>,
    pub large_members: Vec<Obstruction>,
}

impl ObstructionCatalog {
    fn from_members(ell: usize, mut all_members: Vec<Obstruction>) -> Self {
        all_members.sort_by(|a, b| {
            (a.vertex_count, &a.canonical_key).cmp(&(b.vertex_count, &b.canonical_key))
        });
        let large_members = all_members
            .iter()
            .filter(|f| f.vertex_count >= 6)
            .cloned()
            .collect();
        ObstructionCatalog {
            ell,
            all_members,
            large_members,
        }
    }

    pub fn by_key(&self, key: &[u8]) -> Option<&Obstruction> {
        self.all_members.iter().find(|f| f.canonical_key == key)
    }

    pub fn to_file_format(&self) -> CatalogFile {
        CatalogFile {
            schema_version: CATALOG_SCHEMA_VERSION,
            ell: self.ell,
            obstructions: self
                .all_members
                .iter()
                .map(|f| CatalogEntry {
                    v: f.vertex_count,
                    triples: f.triples.clone(),
                    aut: f.aut_count,
                    key: f.key_hex(),
                })
                .collect(),
        }
    }

    /// Rebuilds a catalog from its file form. Canonical keys and automorphism
    /// counts are recomputed and must agree with the stored values.
    pub fn from_file_format(file: &CatalogFile) -> Result<Self> {
        let mut members = Vec::with_capacity(file.obstructions.len());
        for entry in &file.obstructions {
            let h = SmallHypergraph::new(entry.v, entry.triples.iter().copied());
            let f = Obstruction::from_hypergraph(&h)?;
            if f.key_hex() != entry.key || f.aut_count != entry.aut {
                return Err(Error::Parse(format!(
                    "catalog entry {} disagrees with its recomputed canonical form",
                    entry.key
                )));
            }
            members.push(f);
        }
        Ok(Self::from_members(file.ell, members))
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(w, &self.to_file_format())?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let file: CatalogFile = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        Self::from_file_format(&file)
    }
}

/// On-disk catalog layout.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogFile {
    pub schema_version: u32,
    pub ell: usize,
    pub obstructions: Vec<CatalogEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub v: usize,
    pub triples: Vec<[u8; 3]>,
    pub aut: u64,
    pub key: String,
}

pub fn check_ell(ell: usize) -> Result<()> {
    if ell < MIN_ELL {
        return Err(Error::EllTooSmall(ell));
    }
    if ell > MAX_ELL {
        return Err(Error::EllUnsupported { ell, max: MAX_ELL });
    }
    Ok(())
}

/// Enumerates one representative per isomorphism class of the full family
/// for `ell`, sorted by `(v_F, canonical key)`.
///
/// Members are connected, so every member arises by adding triples one at a
/// time, each new triple touching the vertices already present. Each level is
/// deduplicated by canonical key, and a partial system is dropped as soon as
/// it contains a tight subset (it could only extend to a non-minimal member).
/// Cost grows quickly with `ell`; `ell = 9` takes seconds, larger values are
/// refused.
pub fn enumerate_obstructions(ell: usize) -> Result<ObstructionCatalog> {
    check_ell(ell)?;
    let mut members = Vec::new();
    for v in 4..=ell {
        members.extend(enumerate_with_vertices(v)?);
    }
    Ok(ObstructionCatalog::from_members(ell, members))
}

fn enumerate_with_vertices(v: usize) -> Result<Vec<Obstruction>> {
    let e = v - 2;
    let mut level: BTreeMap<Vec<u8>, SmallHypergraph> = BTreeMap::new();
    let seed = SmallHypergraph::new(3, [[0, 1, 2]]);
    level.insert(canonical_label(&seed)?.key, seed);

    for j in 1..e {
        let last = j + 1 == e;
        let mut next = BTreeMap::new();
        for h in level.values() {
            for cand in extensions(h, v) {
                let remaining = e - (j + 1);
                if cand.vertex_count > v || cand.vertex_count + 2 * remaining < v {
                    continue;
                }
                let keep = if last {
                    cand.vertex_count == v && is_minimal(&cand)
                } else {
                    !has_tight_subset(&cand)
                };
                if keep {
                    let canon = canonical_label(&cand)?;
                    next.entry(canon.key).or_insert(canon.graph);
                }
            }
        }
        level = next;
    }
    level.values().map(Obstruction::from_hypergraph).collect()
}

/// Every way to add one new triple meeting the current vertex set; fresh
/// vertices get the next unused labels.
fn extensions(h: &SmallHypergraph, max_v: usize) -> Vec<SmallHypergraph> {
    let cur = h.vertex_count as u8;
    let limit = (h.vertex_count + 2).min(max_v) as u8;
    let mut out = Vec::new();
    for c in 0..limit {
        for b in 0..c {
            for a in 0..b {
                if a >= cur {
                    continue;
                }
                // fresh vertices must be cur, cur+1 in order
                let fresh: Vec<u8> = [b, c].into_iter().filter(|&x| x >= cur).collect();
                let ok = match fresh.as_slice() {
                    [] => true,
                    [x] => *x == cur,
                    [x, y] => *x == cur && *y == cur + 1,
                    _ => false,
                };
                if !ok || h.contains([a, b, c]) {
                    continue;
                }
                let new_v = h.vertex_count + fresh.len();
                let mut triples = h.triples.clone();
                triples.push([a, b, c]);
                out.push(SmallHypergraph::new(new_v, triples));
            }
        }
    }
    out
}
