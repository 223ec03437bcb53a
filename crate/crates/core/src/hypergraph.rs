//! Triples, their packed codes, and small pattern hypergraphs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Three vertices, stored in ascending order.
pub type Triple = [u32; 3];

pub fn sorted(mut t: [u32; 3]) -> Triple {
    t.sort_unstable();
    t
}

#[inline]
pub(crate) fn binom2(x: u64) -> u64 {
    x * x.saturating_sub(1) / 2
}

#[inline]
pub(crate) fn binom3(x: u64) -> u64 {
    x * x.saturating_sub(1) * x.saturating_sub(2) / 6
}

/// Number of 3-subsets of an `n`-set.
pub fn triple_count(n: usize) -> u64 {
    binom3(n as u64)
}

/// Number of 2-subsets of an `n`-set.
pub fn pair_count(n: usize) -> u64 {
    binom2(n as u64)
}

/// Colex rank of a sorted triple `a < b < c`: `C(c,3) + C(b,2) + a`.
///
/// The ranks of triples over `0..n` are exactly `0..C(n,3)`, so a code doubles
/// as an index into dense per-triple arrays.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TripleCode(pub u32);

impl TripleCode {
    #[inline]
    pub fn encode(t: Triple) -> Self {
        debug_assert!(t[0] < t[1] && t[1] < t[2], "unsorted triple {t:?}");
        TripleCode((binom3(t[2] as u64) + binom2(t[1] as u64) + t[0] as u64) as u32)
    }

    pub fn try_encode(t: [u32; 3]) -> Result<Self> {
        let s = sorted(t);
        if s[0] == s[1] || s[1] == s[2] {
            return Err(Error::InvalidTriple(t));
        }
        Ok(Self::encode(s))
    }

    pub fn decode(self) -> Triple {
        let mut rem = self.0 as u64;
        // Largest c with C(c,3) <= rem.
        let mut c = ((6.0 * rem as f64).cbrt() as u64).max(2);
        while binom3(c + 1) <= rem {
            c += 1;
        }
        while binom3(c) > rem {
            c -= 1;
        }
        rem -= binom3(c);
        let mut b = ((2.0 * rem as f64).sqrt() as u64).max(1);
        while binom2(b + 1) <= rem {
            b += 1;
        }
        while binom2(b) > rem {
            b -= 1;
        }
        rem -= binom2(b);
        [rem as u32, b as u32, c as u32]
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A small 3-uniform hypergraph on vertices `0..vertex_count`, used for
/// forbidden patterns. Triples are kept sorted and the list deduplicated.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SmallHypergraph {
    pub vertex_count: usize,
    pub triples: Vec<[u8; 3]>,
}

impl SmallHypergraph {
    pub fn new(vertex_count: usize, triples: impl IntoIterator<Item = [u8; 3]>) -> Self {
        let mut triples: Vec<[u8; 3]> = triples
            .into_iter()
            .map(|mut t| {
                t.sort_unstable();
                t
            })
            .collect();
        triples.sort_unstable();
        triples.dedup();
        SmallHypergraph {
            vertex_count,
            triples,
        }
    }

    pub fn edge_count(&self) -> usize {
        self.triples.len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for t in &self.triples {
            for &x in t {
                deg[x as usize] += 1;
            }
        }
        deg
    }

    /// Number of distinct vertices covered by the triples selected by `mask`.
    pub fn span(&self, mask: u64) -> usize {
        let mut seen = 0u64;
        for (i, t) in self.triples.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for &x in t {
                    seen |= 1 << x;
                }
            }
        }
        seen.count_ones() as usize
    }

    pub fn has_isolated_vertex(&self) -> bool {
        self.degrees().contains(&0)
    }

    /// True if every two triples meet in at most one vertex.
    pub fn is_linear(&self) -> bool {
        for (i, s) in self.triples.iter().enumerate() {
            for t in &self.triples[i + 1..] {
                if s.iter().filter(|x| t.contains(x)).count() >= 2 {
                    return false;
                }
            }
        }
        true
    }

    /// Connectivity of the triple system, ignoring isolated vertices.
    pub fn is_connected(&self) -> bool {
        if self.triples.is_empty() {
            return true;
        }
        let mut reached = 1u64;
        let mut verts: u64 = self.triples[0].iter().fold(0, |m, &x| m | 1 << x);
        loop {
            let before = reached;
            for (i, t) in self.triples.iter().enumerate() {
                if reached >> i & 1 == 0 && t.iter().any(|&x| verts >> x & 1 == 1) {
                    reached |= 1 << i;
                    for &x in t {
                        verts |= 1 << x;
                    }
                }
            }
            if reached == before {
                break;
            }
        }
        reached.count_ones() as usize == self.triples.len()
    }

    /// Image of the triple list under the vertex map `perm` (old -> new).
    pub fn relabel(&self, perm: &[u8]) -> SmallHypergraph {
        SmallHypergraph::new(
            self.vertex_count,
            self.triples
                .iter()
                .map(|t| [perm[t[0] as usize], perm[t[1] as usize], perm[t[2] as usize]]),
        )
    }

    pub fn contains(&self, t: [u8; 3]) -> bool {
        let mut t = t;
        t.sort_unstable();
        self.triples.binary_search(&t).is_ok()
    }
}
