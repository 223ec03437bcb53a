//! Canonical forms and automorphisms of small 3-uniform hypergraphs.
//!
//! The canonical labeling assigns labels 0, 1, 2, ... in turn. Vertices are
//! taken in order of non-increasing degree, and among those the labeling that
//! maximizes the triple incidence bitstring (read in colex rank order) wins.
//! Only labelings whose prefix ties the best prefix survive each round.

use crate::error::{Error, Result};
use crate::hypergraph::SmallHypergraph;

pub const MAX_CANON_VERTICES: usize = 12;

/// Canonical key plus one labeling (old vertex -> new label) that realizes it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalForm {
    pub key: Vec<u8>,
    pub labeling: Vec<u8>,
    pub graph: SmallHypergraph,
}

struct Incidence {
    v: usize,
    bits: Vec<bool>,
}

impl Incidence {
    fn new(h: &SmallHypergraph) -> Self {
        let v = h.vertex_count;
        let mut bits = vec![false; v * v * v];
        for t in &h.triples {
            let [a, b, c] = [t[0] as usize, t[1] as usize, t[2] as usize];
            for (x, y, z) in [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
                bits[(x * v + y) * v + z] = true;
            }
        }
        Incidence { v, bits }
    }

    #[inline]
    fn has(&self, x: u8, y: u8, z: u8) -> bool {
        self.bits[(x as usize * self.v + y as usize) * self.v + z as usize]
    }
}

/// Bits contributed by placing `x` at position `seq.len()`: one per pair of
/// earlier positions, lowest colex rank first (most significant).
fn chunk(inc: &Incidence, seq: &[u8], x: u8) -> u64 {
    let mut out = 0u64;
    for j in 1..seq.len() {
        for i in 0..j {
            out = out << 1 | inc.has(seq[i], seq[j], x) as u64;
        }
    }
    out
}

pub fn canonical_label(h: &SmallHypergraph) -> Result<CanonicalForm> {
    let v = h.vertex_count;
    if v > MAX_CANON_VERTICES {
        return Err(Error::TooManyVertices {
            got: v,
            max: MAX_CANON_VERTICES,
        });
    }
    let deg = h.degrees();
    let inc = Incidence::new(h);

    let mut partials: Vec<Vec<u8>> = vec![Vec::with_capacity(v)];
    for _ in 0..v {
        let mut best: Option<(usize, u64)> = None;
        let mut next = Vec::new();
        for seq in &partials {
            let mut isolated_tried = false;
            for x in 0..v as u8 {
                if seq.contains(&x) {
                    continue;
                }
                if deg[x as usize] == 0 {
                    // isolated vertices are interchangeable
                    if isolated_tried {
                        continue;
                    }
                    isolated_tried = true;
                }
                let score = (deg[x as usize], chunk(&inc, seq, x));
                match best {
                    Some(b) if score < b => continue,
                    Some(b) if score == b => {}
                    _ => {
                        best = Some(score);
                        next.clear();
                    }
                }
                let mut s = seq.clone();
                s.push(x);
                next.push(s);
            }
        }
        partials = next;
    }

    let order = &partials[0];
    let mut labeling = vec![0u8; v];
    for (new, &old) in order.iter().enumerate() {
        labeling[old as usize] = new as u8;
    }
    let graph = h.relabel(&labeling);
    let mut key = Vec::with_capacity(1 + 3 * graph.triples.len());
    key.push(v as u8);
    for t in &graph.triples {
        key.extend_from_slice(t);
    }
    Ok(CanonicalForm {
        key,
        labeling,
        graph,
    })
}

/// All vertex permutations (old -> new) that map the triple set onto itself.
///
/// Backtracking over partial permutations; a branch dies as soon as a triple
/// with all three vertices assigned leaves the triple set, or a degree differs.
pub fn automorphisms(h: &SmallHypergraph) -> Vec<Vec<u8>> {
    let v = h.vertex_count;
    let deg = h.degrees();
    let inc = Incidence::new(h);
    let mut out = Vec::new();
    let mut perm = vec![u8::MAX; v];
    let mut used = vec![false; v];
    extend_automorphism(h, &inc, &deg, 0, &mut perm, &mut used, &mut out);
    out
}

fn extend_automorphism(
    h: &SmallHypergraph,
    inc: &Incidence,
    deg: &[usize],
    x: usize,
    perm: &mut Vec<u8>,
    used: &mut Vec<bool>,
    out: &mut Vec<Vec<u8>>,
) {
    let v = h.vertex_count;
    if x == v {
        out.push(perm.clone());
        return;
    }
    for y in 0..v {
        if used[y] || deg[y] != deg[x] {
            continue;
        }
        perm[x] = y as u8;
        let ok = h.triples.iter().all(|t| {
            let m = t.map(|a| perm[a as usize]);
            // only triples whose largest vertex is x are newly decided
            t[2] as usize != x || inc.has(m[0], m[1], m[2])
        });
        if ok {
            used[y] = true;
            extend_automorphism(h, inc, deg, x + 1, perm, used, out);
            used[y] = false;
        }
        perm[x] = u8::MAX;
    }
}

pub fn automorphism_count(h: &SmallHypergraph) -> u64 {
    automorphisms(h).len() as u64
}
