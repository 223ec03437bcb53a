//! The high-girth triple process.
//!
//! Available triples live in a dense array with a code -> position index, so
//! sampling is a uniform index and deletion is a swap-remove. Covered pairs
//! record which chosen triple covers them; for alive pairs a counter tracks
//! the available codegree.

mod closing;
mod oracle;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{check_ell, enumerate_obstructions, ObstructionCatalog};
use crate::embed::TripleHost;
use crate::error::{Error, Result};
use crate::hypergraph::{pair_count, sorted, triple_count, Triple, TripleCode};

pub use closing::ClosingPlan;
pub use oracle::{AvailabilityVerdict, BruteForceOracle};

/// Name of the generator recorded alongside every seed.
pub const RNG_NAME: &str = "chacha8";

/// 8 GiB.
pub const DEFAULT_MAX_BYTES: u64 = 8 << 30;

pub(crate) const NONE: u32 = u32::MAX;

/// Rough resident size of a process state on `n` vertices.
pub fn estimated_bytes(n: usize) -> u64 {
    let pairs = (n * n) as u64;
    triple_count(n) * 8 + pairs * 8 + (n as u64) * 64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Chosen(TripleCode),
    Terminated { m: usize },
}

#[derive(Clone)]
pub struct ProcessState {
    n: usize,
    ell: usize,
    seed: u64,
    catalog: Arc<ObstructionCatalog>,
    closing: Arc<Vec<ClosingPlan>>,
    chosen: Vec<TripleCode>,
    chosen_triples: Vec<Triple>,
    // n*n, index of the chosen triple covering the pair, NONE while alive
    pair_owner: Vec<u32>,
    vertex_triples: Vec<Vec<u32>>,
    available: Vec<TripleCode>,
    // per code, index into `available` or NONE
    position: Vec<u32>,
    // n*n, available codegree of each pair
    codegree: Vec<u32>,
    rng: ChaCha8Rng,
}

impl ProcessState {
    /// Fresh process with its own catalog and the default memory budget.
    pub fn new(n: usize, ell: usize, seed: u64) -> Result<Self> {
        check_ell(ell)?;
        check_size(n, DEFAULT_MAX_BYTES)?;
        let catalog = Arc::new(enumerate_obstructions(ell)?);
        Self::with_catalog(n, catalog, seed, DEFAULT_MAX_BYTES)
    }

    /// Fresh process sharing an existing catalog.
    pub fn with_catalog(
        n: usize,
        catalog: Arc<ObstructionCatalog>,
        seed: u64,
        max_bytes: u64,
    ) -> Result<Self> {
        check_ell(catalog.ell)?;
        check_size(n, max_bytes)?;
        let total = triple_count(n) as usize;
        let closing = Arc::new(ClosingPlan::build_all(&catalog));
        let mut codegree = vec![0u32; n * n];
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    codegree[u * n + v] = (n - 2) as u32;
                }
            }
        }
        Ok(ProcessState {
            n,
            ell: catalog.ell,
            seed,
            catalog,
            closing,
            chosen: Vec::new(),
            chosen_triples: Vec::new(),
            pair_owner: vec![NONE; n * n],
            vertex_triples: vec![Vec::new(); n],
            available: (0..total as u32).map(TripleCode).collect(),
            position: (0..total as u32).collect(),
            codegree,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn catalog(&self) -> &Arc<ObstructionCatalog> {
        &self.catalog
    }

    /// Steps taken so far.
    pub fn step_index(&self) -> usize {
        self.chosen.len()
    }

    /// `i / n^2`.
    pub fn time(&self) -> f64 {
        self.chosen.len() as f64 / (self.n * self.n) as f64
    }

    pub fn chosen(&self) -> &[TripleCode] {
        &self.chosen
    }

    pub fn chosen_triples(&self) -> &[Triple] {
        &self.chosen_triples
    }

    pub fn available(&self) -> &[TripleCode] {
        &self.available
    }

    pub fn available_len(&self) -> usize {
        self.available.len()
    }

    pub fn is_available(&self, t: Triple) -> bool {
        self.position[TripleCode::encode(t).index()] != NONE
    }

    pub fn is_terminated(&self) -> bool {
        self.available.is_empty()
    }

    pub fn pair_alive(&self, u: u32, v: u32) -> bool {
        u != v && self.pair_owner[u as usize * self.n + v as usize] == NONE
    }

    /// Index into `chosen_triples` of the triple covering `uv`.
    pub fn pair_owner(&self, u: u32, v: u32) -> Option<usize> {
        match self.pair_owner[u as usize * self.n + v as usize] {
            NONE => None,
            i => Some(i as usize),
        }
    }

    /// Indices of chosen triples through `v`.
    pub fn triples_at(&self, v: u32) -> &[u32] {
        &self.vertex_triples[v as usize]
    }

    /// `|E(i)|`, counted from the pair table.
    pub fn alive_pair_count(&self) -> usize {
        let mut count = 0;
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.pair_owner[u * self.n + v] == NONE {
                    count += 1;
                }
            }
        }
        count
    }

    pub fn alive_pairs(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for u in 0..self.n {
            for v in u + 1..self.n {
                if self.pair_owner[u * self.n + v] == NONE {
                    out.push((u as u32, v as u32));
                }
            }
        }
        out
    }

    /// Maintained available codegree of an alive pair.
    pub fn codegree(&self, u: u32, v: u32) -> Result<u32> {
        if !self.pair_alive(u, v) {
            return Err(Error::DeadPair(u, v));
        }
        Ok(self.codegree[u as usize * self.n + v as usize])
    }

    /// Adds one uniformly sampled available triple, or reports termination.
    pub fn step(&mut self) -> StepOutcome {
        if self.available.is_empty() {
            return StepOutcome::Terminated {
                m: self.chosen.len(),
            };
        }
        let idx = self.rng.random_range(0..self.available.len());
        let code = self.available[idx];
        self.apply(code);
        StepOutcome::Chosen(code)
    }

    /// Adds an available triple chosen by the caller instead of the generator.
    pub fn force_step(&mut self, t: [u32; 3]) -> Result<TripleCode> {
        let t = sorted(t);
        if t[2] as usize >= self.n || t[0] == t[1] || t[1] == t[2] {
            return Err(Error::InvalidTriple(t));
        }
        let code = TripleCode::encode(t);
        if self.position[code.index()] == NONE {
            return Err(Error::NotAvailable(t));
        }
        self.apply(code);
        Ok(code)
    }

    fn apply(&mut self, code: TripleCode) {
        let t = self.record_choice(code);
        self.kill_pair_sharing(t);
        for c in self.find_closing_triples(t) {
            self.remove(c);
        }
    }

    /// Moves `code` from the available set into the hypergraph.
    fn record_choice(&mut self, code: TripleCode) -> Triple {
        let t = code.decode();
        self.remove(code);
        let id = self.chosen.len() as u32;
        self.chosen.push(code);
        self.chosen_triples.push(t);
        let n = self.n;
        for (u, v) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            let (u, v) = (u as usize, v as usize);
            self.pair_owner[u * n + v] = id;
            self.pair_owner[v * n + u] = id;
        }
        for &x in &t {
            self.vertex_triples[x as usize].push(id);
        }
        t
    }

    fn kill_pair_sharing(&mut self, t: Triple) {
        let n = self.n;
        for (u, v) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            if self.codegree[u as usize * n + v as usize] == 0 {
                continue;
            }
            for z in 0..n as u32 {
                if z != u && z != v {
                    let s = sorted([u, v, z]);
                    self.remove_known(TripleCode::encode(s), s);
                }
            }
        }
    }

    fn remove(&mut self, code: TripleCode) -> bool {
        self.remove_known(code, code.decode())
    }

    fn remove_known(&mut self, code: TripleCode, t: Triple) -> bool {
        let pos = self.position[code.index()];
        if pos == NONE {
            return false;
        }
        let last = self.available.pop().expect("position implies nonempty");
        if (pos as usize) < self.available.len() {
            self.available[pos as usize] = last;
            self.position[last.index()] = pos;
        }
        self.position[code.index()] = NONE;
        let n = self.n;
        for (u, v) in [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])] {
            let (u, v) = (u as usize, v as usize);
            self.codegree[u * n + v] -= 1;
            self.codegree[v * n + u] -= 1;
        }
        true
    }

    /// Available triples that together with `new_triple` (already chosen)
    /// complete a copy of some large forbidden configuration, sorted.
    pub fn find_closing_triples(&self, new_triple: Triple) -> Vec<TripleCode> {
        let mut out = Vec::new();
        for plan in self.closing.iter() {
            plan.search(self, new_triple, &mut out);
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Steps until termination, calling `observe` before the first step and
    /// after every step. Returns `m`.
    pub fn run_with(&mut self, mut observe: impl FnMut(&ProcessState)) -> usize {
        observe(self);
        while let StepOutcome::Chosen(_) = self.step() {
            observe(self);
        }
        self.chosen.len()
    }

    pub fn run_to_end(&mut self) -> usize {
        self.run_with(|_| {})
    }

    /// Ground-truth availability, independent of the incremental bookkeeping.
    pub fn is_available_bruteforce(&self, t: Triple) -> bool {
        BruteForceOracle::new(self).is_available(t)
    }

    /// Internal consistency of the incremental structures; used by tests.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.n;
        let expected = pair_count(n) as usize - 3 * self.chosen.len();
        let alive = self.alive_pair_count();
        if alive != expected {
            return Err(format!("|E(i)| = {alive}, expected {expected}"));
        }
        for (i, &code) in self.available.iter().enumerate() {
            if self.position[code.index()] as usize != i {
                return Err(format!("position index broken at {code:?}"));
            }
            let t = code.decode();
            if !(self.pair_alive(t[0], t[1]) && self.pair_alive(t[0], t[2]) && self.pair_alive(t[1], t[2])) {
                return Err(format!("available triple {t:?} has a dead pair"));
            }
        }
        let mut sum = 0u64;
        for (u, v) in self.alive_pairs() {
            let scanned = (0..n as u32)
                .filter(|&z| z != u && z != v && self.is_available(sorted([u, v, z])))
                .count() as u32;
            if scanned != self.codegree[u as usize * n + v as usize] {
                return Err(format!("codegree of {u}{v} drifted"));
            }
            sum += scanned as u64;
        }
        if sum != 3 * self.available.len() as u64 {
            return Err(format!("sum of codegrees {sum} != 3|Q|"));
        }
        Ok(())
    }
}

fn check_size(n: usize, max_bytes: u64) -> Result<()> {
    if n < 4 {
        return Err(Error::TooFewVertices(n));
    }
    let needed = estimated_bytes(n);
    // codes and positions are u32
    if needed > max_bytes || triple_count(n) >= NONE as u64 {
        return Err(Error::MemoryBudget {
            n,
            needed,
            budget: max_bytes,
        });
    }
    Ok(())
}

/// The chosen triples as a host for embedding searches.
impl TripleHost for ProcessState {
    fn vertex_count(&self) -> u32 {
        self.n as u32
    }

    fn contains(&self, t: Triple) -> bool {
        match self.pair_owner(t[0], t[1]) {
            Some(i) => self.chosen_triples[i] == t,
            None => false,
        }
    }

    fn thirds(&self, a: u32, b: u32, out: &mut Vec<u32>) {
        if let Some(i) = self.pair_owner(a, b) {
            let t = self.chosen_triples[i];
            out.extend(t.iter().copied().filter(|&x| x != a && x != b));
        }
    }

    fn neighbors(&self, a: u32, out: &mut Vec<u32>) {
        for &i in &self.vertex_triples[a as usize] {
            out.extend(self.chosen_triples[i as usize].iter().copied().filter(|&x| x != a));
        }
    }
}
