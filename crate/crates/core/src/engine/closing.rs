//! Finding available triples closed off by a newly chosen triple.
//!
//! A triple `c` is closed by the new triple `e` when `H + c` holds a copy of a
//! large forbidden configuration `F` that uses both `e` and `c`. Every such
//! copy is an embedding of `F` that sends one triple onto `e`, one triple onto
//! `c` and the rest into `H`. One plan exists per (flag orbit of `F`, choice of
//! the closed triple): the flag fixes how `e` is matched, the remaining
//! triples are matched along the sparse adjacency of `H`.

use crate::catalog::ObstructionCatalog;
use crate::hypergraph::{sorted, Triple, TripleCode};

use super::{ProcessState, NONE};

const MAX_V: usize = 12;

#[derive(Clone, Debug)]
pub struct ClosingPlan {
    vertex_count: usize,
    // pattern vertices sent to the new triple's sorted vertices
    anchor: [u8; 3],
    // pattern triples that must land in H, in match order
    chain: Vec<[u8; 3]>,
    closed: [u8; 3],
}

impl ClosingPlan {
    pub fn build_all(catalog: &ObstructionCatalog) -> Vec<ClosingPlan> {
        let mut plans = Vec::new();
        for f in &catalog.large_members {
            let deg = f.hypergraph().degrees();
            for orbit in f.flag_orbits() {
                for (ci, &closed) in f.triples.iter().enumerate() {
                    if ci == orbit.triple {
                        continue;
                    }
                    let mut rest: Vec<[u8; 3]> = f
                        .triples
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != ci && i != orbit.triple)
                        .map(|(_, &t)| t)
                        .collect();
                    let mut mapped = vec![false; f.vertex_count];
                    for &x in &orbit.ordered {
                        mapped[x as usize] = true;
                    }
                    let mut chain = Vec::new();
                    while !rest.is_empty() {
                        // most mapped vertices first, then highest pattern degree
                        let best = (0..rest.len())
                            .max_by_key(|&i| {
                                let t = rest[i];
                                let m = t.iter().filter(|&&x| mapped[x as usize]).count();
                                let d: usize = t.iter().map(|&x| deg[x as usize]).sum();
                                (m, d, std::cmp::Reverse(i))
                            })
                            .unwrap();
                        let t = rest.swap_remove(best);
                        for &x in &t {
                            mapped[x as usize] = true;
                        }
                        chain.push(t);
                    }
                    plans.push(ClosingPlan {
                        vertex_count: f.vertex_count,
                        anchor: orbit.ordered,
                        chain,
                        closed,
                    });
                }
            }
        }
        plans
    }

    pub(super) fn search(&self, st: &ProcessState, new_triple: Triple, out: &mut Vec<TripleCode>) {
        let mut map = [NONE; MAX_V];
        for i in 0..3 {
            map[self.anchor[i] as usize] = new_triple[i];
        }
        self.extend(st, 0, &mut map, out);
    }

    fn used(&self, map: &[u32; MAX_V], z: u32) -> bool {
        map[..self.vertex_count].contains(&z)
    }

    fn extend(&self, st: &ProcessState, step: usize, map: &mut [u32; MAX_V], out: &mut Vec<TripleCode>) {
        let Some(&t) = self.chain.get(step) else {
            self.close(st, 0, map, out);
            return;
        };
        let mut mapped = [0u8; 3];
        let mut free = [0u8; 3];
        let (mut nm, mut nf) = (0, 0);
        for &x in &t {
            if map[x as usize] == NONE {
                free[nf] = x;
                nf += 1;
            } else {
                mapped[nm] = x;
                nm += 1;
            }
        }
        match nm {
            3 => {
                let img = sorted(t.map(|x| map[x as usize]));
                if st.pair_owner(img[0], img[1]).is_some_and(|i| st.chosen_triples[i] == img) {
                    self.extend(st, step + 1, map, out);
                }
            }
            2 => {
                let (a, b) = (map[mapped[0] as usize], map[mapped[1] as usize]);
                if let Some(i) = st.pair_owner(a, b) {
                    let h = st.chosen_triples[i];
                    let z = h.into_iter().find(|&z| z != a && z != b).unwrap();
                    if !self.used(map, z) {
                        map[free[0] as usize] = z;
                        self.extend(st, step + 1, map, out);
                        map[free[0] as usize] = NONE;
                    }
                }
            }
            1 => {
                let a = map[mapped[0] as usize];
                for &i in st.triples_at(a) {
                    let h = st.chosen_triples[i as usize];
                    let mut others = h.into_iter().filter(|&z| z != a);
                    let (p, q) = (others.next().unwrap(), others.next().unwrap());
                    if self.used(map, p) || self.used(map, q) {
                        continue;
                    }
                    for (zx, zy) in [(p, q), (q, p)] {
                        map[free[0] as usize] = zx;
                        map[free[1] as usize] = zy;
                        self.extend(st, step + 1, map, out);
                    }
                    map[free[0] as usize] = NONE;
                    map[free[1] as usize] = NONE;
                }
            }
            _ => {
                // a component not yet touched; try every chosen triple
                for h in st.chosen_triples() {
                    if h.iter().any(|&z| self.used(map, z)) {
                        continue;
                    }
                    for o in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
                        for k in 0..3 {
                            map[t[k] as usize] = h[o[k]];
                        }
                        self.extend(st, step + 1, map, out);
                    }
                    for &x in &t {
                        map[x as usize] = NONE;
                    }
                }
            }
        }
    }

    /// Maps any still-free vertex of the closed triple, then records it if available.
    fn close(&self, st: &ProcessState, k: usize, map: &mut [u32; MAX_V], out: &mut Vec<TripleCode>) {
        if k == 3 {
            let img = sorted(self.closed.map(|x| map[x as usize]));
            let code = TripleCode::encode(img);
            if st.position[code.index()] != NONE {
                out.push(code);
            }
            return;
        }
        let x = self.closed[k] as usize;
        if map[x] != NONE {
            self.close(st, k + 1, map, out);
            return;
        }
        for z in 0..st.n as u32 {
            if !self.used(map, z) {
                map[x] = z;
                self.close(st, k + 1, map, out);
            }
        }
        map[x] = NONE;
    }
}
