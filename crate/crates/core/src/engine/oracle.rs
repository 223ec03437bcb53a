//! Brute-force availability, used to certify the incremental state.

use crate::catalog::Obstruction;
use crate::embed::{EmbeddingPlan, TripleHost, UNMAPPED};
use crate::hypergraph::{sorted, Triple, TripleCode};

use super::ProcessState;

/// The chosen triples plus one candidate. Lookups go through a bitmap and
/// adjacency rebuilt from the chosen list; nothing from the engine's
/// incremental indices is consulted.
struct ScanHost<'a> {
    n: u32,
    /// Indexed by triple code.
    triples: &'a [bool],
    adjacent: &'a [Vec<u32>],
    extra: Triple,
}

impl TripleHost for ScanHost<'_> {
    fn vertex_count(&self) -> u32 {
        self.n
    }

    fn contains(&self, t: Triple) -> bool {
        t == self.extra || self.triples[TripleCode::encode(t).index()]
    }

    fn thirds(&self, a: u32, b: u32, out: &mut Vec<u32>) {
        out.extend((0..self.n).filter(|&z| z != a && z != b && self.contains(sorted([a, b, z]))));
    }

    fn neighbors(&self, a: u32, out: &mut Vec<u32>) {
        out.extend_from_slice(&self.adjacent[a as usize]);
        if self.extra.contains(&a) {
            out.extend(self.extra.iter().filter(|&&z| z != a && !self.adjacent[a as usize].contains(&z)));
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AvailabilityVerdict {
    pub already_chosen: bool,
    /// Shares two vertices with a chosen triple.
    pub pair_conflict: bool,
    /// Completes a copy of a large forbidden configuration.
    pub large_copy: bool,
    /// Completes a copy of any forbidden configuration, diamond included.
    pub any_copy: bool,
}

impl AvailabilityVerdict {
    pub fn available(&self) -> bool {
        !self.already_chosen && !self.pair_conflict && !self.large_copy
    }

    pub fn available_by_full_family(&self) -> bool {
        !self.already_chosen && !self.any_copy
    }
}

pub struct BruteForceOracle<'a> {
    state: &'a ProcessState,
    chosen: &'a [Triple],
    triples: Vec<bool>,
    adjacent: Vec<Vec<u32>>,
    /// One plan per anchor triple, for the large members and for the rest
    /// of the full family.
    large_plans: Vec<AnchoredPlans<'a>>,
    small_plans: Vec<AnchoredPlans<'a>>,
}

struct AnchoredPlans<'a> {
    f: &'a Obstruction,
    plans: Vec<EmbeddingPlan>,
}

impl<'a> AnchoredPlans<'a> {
    fn new(f: &'a Obstruction) -> Self {
        AnchoredPlans {
            f,
            plans: f
                .triples
                .iter()
                .map(|anchor| EmbeddingPlan::new(f.vertex_count, &f.triples, anchor))
                .collect(),
        }
    }
}

impl<'a> BruteForceOracle<'a> {
    pub fn new(state: &'a ProcessState) -> Self {
        let mut triples = vec![false; crate::hypergraph::triple_count(state.n()) as usize];
        for &t in state.chosen_triples() {
            triples[TripleCode::encode(sorted(t)).index()] = true;
        }
        let mut adjacent = vec![Vec::new(); state.n()];
        for t in state.chosen_triples() {
            for &a in t {
                adjacent[a as usize].extend(t.iter().filter(|&&z| z != a));
            }
        }
        for list in &mut adjacent {
            list.sort_unstable();
            list.dedup();
        }
        let cat = state.catalog();
        BruteForceOracle {
            state,
            chosen: state.chosen_triples(),
            triples,
            adjacent,
            large_plans: cat.large_members.iter().map(AnchoredPlans::new).collect(),
            small_plans: cat
                .all_members
                .iter()
                .filter(|f| f.vertex_count < 6)
                .map(AnchoredPlans::new)
                .collect(),
        }
    }

    pub fn verdict(&self, t: Triple) -> AvailabilityVerdict {
        let t = sorted(t);
        let already_chosen = self.triples[TripleCode::encode(t).index()];
        let pair_conflict = self
            .chosen
            .iter()
            .any(|h| h != &t && h.iter().filter(|x| t.contains(x)).count() >= 2);
        let host = ScanHost {
            n: self.state.n() as u32,
            triples: &self.triples,
            adjacent: &self.adjacent,
            extra: t,
        };
        let large_copy = self.large_plans.iter().any(|p| has_copy_through(&host, p, t));
        let any_copy = large_copy || self.small_plans.iter().any(|p| has_copy_through(&host, p, t));
        AvailabilityVerdict {
            already_chosen,
            pair_conflict,
            large_copy,
            any_copy,
        }
    }

    /// Availability judged both ways; the two must agree.
    pub fn is_available(&self, t: Triple) -> bool {
        let v = self.verdict(t);
        assert_eq!(
            v.available(),
            v.available_by_full_family(),
            "availability forms disagree on {t:?}: {v:?}"
        );
        v.available()
    }

    /// Every triple on `0..n` that the oracle accepts.
    pub fn available_set(&self) -> Vec<Triple> {
        let n = self.state.n() as u32;
        let mut out = Vec::new();
        for c in 2..n {
            for b in 1..c {
                for a in 0..b {
                    if self.is_available([a, b, c]) {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }
}

/// Whether some copy of `f` in the host uses the triple `t`.
fn has_copy_through(host: &ScanHost<'_>, p: &AnchoredPlans<'_>, t: Triple) -> bool {
    let f = p.f;
    let mut map = vec![UNMAPPED; f.vertex_count];
    for (anchor, plan) in f.triples.iter().zip(&p.plans) {
        for o in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            for k in 0..3 {
                map[anchor[k] as usize] = t[o[k]];
            }
            if plan.exists(host, &mut map) {
                return true;
            }
        }
        map.fill(UNMAPPED);
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_hypergraph_makes_everything_available() {
        let s = ProcessState::new(8, 7, 0).unwrap();
        let oracle = BruteForceOracle::new(&s);
        assert_eq!(oracle.available_set().len(), 56);
    }

    #[test]
    fn chosen_and_pair_sharing_triples_are_unavailable() {
        let mut s = ProcessState::new(8, 6, 0).unwrap();
        s.force_step([1, 2, 3]).unwrap();
        let oracle = BruteForceOracle::new(&s);
        assert!(!oracle.is_available([1, 2, 3]));
        let v = oracle.verdict([1, 2, 6]);
        assert!(v.pair_conflict && v.any_copy && !v.available());
        assert!(oracle.is_available([1, 4, 5]));
    }
}
