//! Counting extensions `W_uvw,F,k` of an available triple to copies of `F`.
//!
//! For each pair `ab` two bitsets over the third vertex record which triples
//! `abz` are available and which are chosen. Embeddings of `F` are built by
//! fixing one flag orbit representative on `uvw` and assigning the remaining
//! pattern vertices one at a time; candidates are intersections of pair
//! bitsets. On the last vertex the counts are taken with popcounts, split by
//! how many of the completed triples are chosen.

use crate::catalog::Obstruction;
use crate::engine::ProcessState;
use crate::hypergraph::Triple;

pub struct PairBits {
    n: usize,
    words: usize,
    avail: Vec<u64>,
    chosen: Vec<u64>,
}

impl PairBits {
    pub fn build(state: &ProcessState) -> Self {
        let n = state.n();
        let words = n.div_ceil(64);
        let mut bits = PairBits {
            n,
            words,
            avail: vec![0; n * n * words],
            chosen: vec![0; n * n * words],
        };
        for code in state.available() {
            let t = code.decode();
            set_triple(&mut bits.avail, n, words, t);
        }
        for &t in state.chosen_triples() {
            set_triple(&mut bits.chosen, n, words, t);
        }
        bits
    }

    #[inline]
    fn slot(&self, a: u32, b: u32) -> usize {
        (a as usize * self.n + b as usize) * self.words
    }

    fn avail_row(&self, a: u32, b: u32) -> &[u64] {
        let s = self.slot(a, b);
        &self.avail[s..s + self.words]
    }

    fn chosen_row(&self, a: u32, b: u32) -> &[u64] {
        let s = self.slot(a, b);
        &self.chosen[s..s + self.words]
    }

    #[inline]
    fn bit(row: &[u64], z: u32) -> bool {
        row[z as usize / 64] >> (z % 64) & 1 == 1
    }
}

fn set_triple(store: &mut [u64], n: usize, words: usize, t: Triple) {
    for (a, b, z) in [
        (t[0], t[1], t[2]),
        (t[0], t[2], t[1]),
        (t[1], t[2], t[0]),
    ] {
        for (x, y) in [(a, b), (b, a)] {
            let s = (x as usize * n + y as usize) * words;
            store[s + z as usize / 64] |= 1 << (z % 64);
        }
    }
}

/// Search plan for one flag orbit of `F`.
struct OrbitPlan {
    size: u64,
    anchor: [u8; 3],
    order: Vec<u8>,
    // per level: pattern triples completed there, as the two earlier vertices
    completes: Vec<Vec<(u8, u8)>>,
}

pub struct ExtensionCounter {
    vertex_count: usize,
    edge_count: usize,
    aut: u64,
    orbits: Vec<OrbitPlan>,
}

impl ExtensionCounter {
    pub fn new(f: &Obstruction) -> Self {
        let v = f.vertex_count;
        let mut orbits = Vec::new();
        for orbit in f.flag_orbits() {
            let mut mapped = vec![false; v];
            for &x in &orbit.ordered {
                mapped[x as usize] = true;
            }
            let mut order = Vec::new();
            let mut completes = Vec::new();
            for _ in 3..v {
                let closing = |x: usize, mapped: &[bool]| {
                    f.triples
                        .iter()
                        .filter(|t| t.contains(&(x as u8)))
                        .filter(|t| t.iter().filter(|&&y| y as usize != x && mapped[y as usize]).count() == 2)
                        .count()
                };
                let x = (0..v)
                    .filter(|&x| !mapped[x])
                    .max_by_key(|&x| (closing(x, &mapped), std::cmp::Reverse(x)))
                    .unwrap();
                let done: Vec<(u8, u8)> = f
                    .triples
                    .iter()
                    .filter(|t| t.contains(&(x as u8)))
                    .filter_map(|t| {
                        let others: Vec<u8> = t.iter().copied().filter(|&y| y as usize != x).collect();
                        (mapped[others[0] as usize] && mapped[others[1] as usize])
                            .then_some((others[0], others[1]))
                    })
                    .collect();
                mapped[x] = true;
                order.push(x as u8);
                completes.push(done);
            }
            orbits.push(OrbitPlan {
                size: orbit.size as u64,
                anchor: orbit.ordered,
                order,
                completes,
            });
        }
        ExtensionCounter {
            vertex_count: v,
            edge_count: f.edge_count(),
            aut: f.aut_count,
            orbits,
        }
    }

    /// Copies of `F` through the available triple `uvw` whose other triples
    /// are all available or chosen, indexed by the number `k` of chosen ones
    /// (`0..e_F`).
    pub fn count_by_k(&self, bits: &PairBits, uvw: Triple) -> Vec<u64> {
        let mut total = vec![0u64; self.edge_count];
        for orbit in &self.orbits {
            let mut acc = vec![0u64; self.edge_count];
            let mut map = vec![u32::MAX; self.vertex_count];
            for i in 0..3 {
                map[orbit.anchor[i] as usize] = uvw[i];
            }
            let mut used = vec![0u64; bits.words];
            for &z in &uvw {
                used[z as usize / 64] |= 1 << (z % 64);
            }
            self.descend(bits, orbit, 0, &mut map, &mut used, 0, &mut acc);
            for (t, a) in total.iter_mut().zip(acc) {
                *t += a * orbit.size;
            }
        }
        total
            .into_iter()
            .map(|c| {
                debug_assert_eq!(c % self.aut, 0, "embedding count not a multiple of |Aut|");
                c / self.aut
            })
            .collect()
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        bits: &PairBits,
        orbit: &OrbitPlan,
        level: usize,
        map: &mut [u32],
        used: &mut [u64],
        k: usize,
        acc: &mut [u64],
    ) {
        if level == orbit.order.len() {
            acc[k] += 1;
            return;
        }
        let x = orbit.order[level] as usize;
        let pairs: Vec<(u32, u32)> = orbit.completes[level]
            .iter()
            .map(|&(a, b)| (map[a as usize], map[b as usize]))
            .collect();
        let words = bits.words;
        let full_last = {
            let r = bits.n % 64;
            if r == 0 { u64::MAX } else { (1u64 << r) - 1 }
        };
        let all = |w: usize| if w + 1 == words { full_last } else { u64::MAX };

        if level + 1 == orbit.order.len() && !pairs.is_empty() {
            // split by which completed triples are chosen
            for subset in 0u32..1 << pairs.len() {
                let mut count = 0u64;
                for w in 0..words {
                    let mut acc_word = all(w) & !used[w];
                    for (i, &(a, b)) in pairs.iter().enumerate() {
                        acc_word &= if subset >> i & 1 == 1 {
                            bits.chosen_row(a, b)[w]
                        } else {
                            bits.avail_row(a, b)[w]
                        };
                    }
                    count += acc_word.count_ones() as u64;
                }
                if count > 0 {
                    acc[k + subset.count_ones() as usize] += count;
                }
            }
            return;
        }

        for w in 0..words {
            let mut cand = all(w) & !used[w];
            for &(a, b) in &pairs {
                cand &= bits.avail_row(a, b)[w] | bits.chosen_row(a, b)[w];
            }
            while cand != 0 {
                let z = (w * 64 + cand.trailing_zeros() as usize) as u32;
                cand &= cand - 1;
                let extra = pairs
                    .iter()
                    .filter(|&&(a, b)| PairBits::bit(bits.chosen_row(a, b), z))
                    .count();
                map[x] = z;
                used[w] |= 1 << (z % 64);
                self.descend(bits, orbit, level + 1, map, used, k + extra, acc);
                used[w] &= !(1 << (z % 64));
                map[x] = u32::MAX;
            }
        }
    }
}
