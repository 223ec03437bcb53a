//! Backtracking embedding of small patterns into a triple host.
//!
//! Pattern vertices are assigned one at a time. A vertex that closes a
//! required pattern triple with two mapped vertices `a, b` draws candidates
//! from `host.thirds(a, b)`; one that shares a required triple with a single
//! mapped vertex draws from `host.neighbors(a)`; otherwise every host vertex
//! is tried. Each completed required triple is checked with `host.contains`.

use std::ops::ControlFlow;

use crate::hypergraph::{sorted, Triple};

pub trait TripleHost {
    fn vertex_count(&self) -> u32;

    /// `t` is sorted.
    fn contains(&self, t: Triple) -> bool;

    /// Pushes every `z` with `{a, b, z}` in the host.
    fn thirds(&self, a: u32, b: u32, out: &mut Vec<u32>);

    /// Pushes every `z != a` that shares a host triple with `a`.
    fn neighbors(&self, a: u32, out: &mut Vec<u32>);
}

pub const UNMAPPED: u32 = u32::MAX;

/// A pattern with the triples an embedding must send into the host.
pub struct EmbeddingPlan {
    required: Vec<[u8; 3]>,
    order: Vec<u8>,
    premapped: Vec<bool>,
    // required triples completed when order[step] is assigned
    completes: Vec<Vec<usize>>,
}

impl EmbeddingPlan {
    /// `premapped` lists the pattern vertices fixed before the search starts.
    pub fn new(vertex_count: usize, required: &[[u8; 3]], premapped: &[u8]) -> Self {
        let mut mapped = vec![false; vertex_count];
        for &x in premapped {
            mapped[x as usize] = true;
        }
        let fixed = mapped.clone();
        let mut order = Vec::new();
        while order.len() + premapped.len() < vertex_count {
            let score = |x: usize| {
                let (mut closing, mut touching) = (0, 0);
                for t in required.iter().filter(|t| t.contains(&(x as u8))) {
                    let m = t.iter().filter(|&&y| mapped[y as usize]).count();
                    if m == 2 {
                        closing += 1;
                    } else if m == 1 {
                        touching += 1;
                    }
                }
                (closing, touching)
            };
            let next = (0..vertex_count)
                .filter(|&x| !mapped[x])
                .max_by_key(|&x| (score(x), std::cmp::Reverse(x)))
                .expect("unmapped vertex left");
            mapped[next] = true;
            order.push(next as u8);
        }

        let mut position = vec![usize::MAX; vertex_count];
        for (i, &x) in order.iter().enumerate() {
            position[x as usize] = i;
        }
        let mut completes = vec![Vec::new(); order.len()];
        for (ti, t) in required.iter().enumerate() {
            let last = t.iter().map(|&x| position[x as usize]).filter(|&p| p != usize::MAX).max();
            if let Some(p) = last {
                completes[p].push(ti);
            }
        }
        EmbeddingPlan {
            required: required.to_vec(),
            order,
            premapped: fixed,
            completes,
        }
    }

    /// Checks the required triples lying entirely inside the premapped part.
    fn premapped_ok<H: TripleHost>(&self, host: &H, map: &[u32]) -> bool {
        self.required.iter().all(|t| {
            !t.iter().all(|&x| self.premapped[x as usize])
                || host.contains(sorted(t.map(|x| map[x as usize])))
        })
    }

    /// Visits every injective extension of `map` (pattern vertex -> host
    /// vertex, `UNMAPPED` where free). `map` is restored on return.
    pub fn for_each<H: TripleHost>(
        &self,
        host: &H,
        map: &mut [u32],
        visit: &mut impl FnMut(&[u32]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if !self.premapped_ok(host, map) {
            return ControlFlow::Continue(());
        }
        let mut scratch = vec![Vec::new(); self.order.len()];
        self.extend(host, 0, map, &mut scratch, visit)
    }

    pub fn count<H: TripleHost>(&self, host: &H, map: &mut [u32]) -> u64 {
        let mut n = 0u64;
        let _ = self.for_each(host, map, &mut |_| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }

    pub fn exists<H: TripleHost>(&self, host: &H, map: &mut [u32]) -> bool {
        self.for_each(host, map, &mut |_| ControlFlow::Break(())).is_break()
    }

    /// `scratch[0]` is the candidate buffer for `step`.
    fn extend<H: TripleHost>(
        &self,
        host: &H,
        step: usize,
        map: &mut [u32],
        scratch: &mut [Vec<u32>],
        visit: &mut impl FnMut(&[u32]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if step == self.order.len() {
            return visit(map);
        }
        let x = self.order[step];
        let (head, tail) = scratch.split_at_mut(1);
        let cands = &mut head[0];
        cands.clear();
        self.candidates(host, x, map, cands);
        for i in 0..cands.len() {
            let z = cands[i];
            if map.contains(&z) {
                continue;
            }
            map[x as usize] = z;
            let ok = self.completes[step].iter().all(|&ti| {
                let t = self.required[ti];
                host.contains(sorted(t.map(|y| map[y as usize])))
            });
            if ok && self.extend(host, step + 1, map, tail, visit).is_break() {
                map[x as usize] = UNMAPPED;
                return ControlFlow::Break(());
            }
            map[x as usize] = UNMAPPED;
        }
        ControlFlow::Continue(())
    }

    fn candidates<H: TripleHost>(&self, host: &H, x: u8, map: &[u32], out: &mut Vec<u32>) {
        let mut one_mapped = None;
        for t in self.required.iter().filter(|t| t.contains(&x)) {
            let mut others = [UNMAPPED; 2];
            for (k, &y) in t.iter().filter(|&&y| y != x).enumerate() {
                others[k] = map[y as usize];
            }
            match (others[0] != UNMAPPED, others[1] != UNMAPPED) {
                (true, true) => {
                    host.thirds(others[0], others[1], out);
                    return;
                }
                (true, false) => one_mapped = Some(others[0]),
                (false, true) => one_mapped = Some(others[1]),
                _ => {}
            }
        }
        match one_mapped {
            Some(a) => host.neighbors(a, out),
            None => out.extend(0..host.vertex_count()),
        }
    }
}
