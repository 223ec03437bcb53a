//! Independent oracles shared by the integration tests. Nothing here calls
//! into the crate's search, canonical labeling or counting code.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use hgtp_core::{Obstruction, ProcessState, Triple};

pub type Small = Vec<[u8; 3]>;

pub fn permutations(v: usize) -> Vec<Vec<u8>> {
    fn rec(cur: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                cur.push(x as u8);
                rec(cur, used, out);
                cur.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; v], &mut out);
    out
}

fn apply(perm: &[u8], triples: &[[u8; 3]]) -> Small {
    let mut out: Small = triples
        .iter()
        .map(|t| {
            let mut m = t.map(|x| perm[x as usize]);
            m.sort_unstable();
            m
        })
        .collect();
    out.sort_unstable();
    out
}

/// Lexicographically least relabeled triple list, over all `v!` relabelings.
pub fn brute_canon(v: usize, triples: &[[u8; 3]], perms: &[Vec<u8>]) -> Small {
    debug_assert!(perms.first().is_none_or(|p| p.len() == v));
    perms.iter().map(|p| apply(p, triples)).min().unwrap()
}

pub fn brute_aut(v: usize, triples: &[[u8; 3]]) -> usize {
    let base = apply(&(0..v as u8).collect::<Vec<_>>(), triples);
    permutations(v).iter().filter(|p| apply(p, triples) == base).count()
}

fn spanned(mask: u32, triples: &[[u8; 3]]) -> usize {
    triples
        .iter()
        .filter(|t| t.iter().all(|&x| mask >> x & 1 == 1))
        .count()
}

/// Isomorphism classes of `v`-vertex systems with `v - 2` triples that cover
/// every vertex and in which no proper vertex subset `S` with `|S| >= 4`
/// spans `|S| - 2` or more triples. Exhaustive over all triple subsets.
/// Returns canonical form -> automorphism count.
pub fn naive_classes(v: usize) -> BTreeMap<Small, usize> {
    let all: Small = (0..v as u8)
        .flat_map(|a| (a + 1..v as u8).flat_map(move |b| (b + 1..v as u8).map(move |c| [a, b, c])))
        .collect();
    let e = v - 2;
    let full = (1u32 << v) - 1;
    let small_sets: Vec<u32> = (0..full)
        .filter(|s| (4..v).contains(&(s.count_ones() as usize)))
        .collect();
    let perms = permutations(v);
    let mut classes = BTreeMap::new();
    let mut idx: Vec<usize> = (0..e).collect();
    loop {
        let pick: Small = idx.iter().map(|&i| all[i]).collect();
        let cover = pick.iter().flatten().fold(0u32, |m, &x| m | 1 << x);
        if cover == full && small_sets.iter().all(|&s| spanned(s, &pick) + 2 < s.count_ones() as usize) {
            let c = brute_canon(v, &pick, &perms);
            classes.entry(c.clone()).or_insert_with(|| brute_aut(v, &c));
        }
        // next combination
        let mut j = e;
        loop {
            if j == 0 {
                return classes;
            }
            j -= 1;
            if idx[j] < all.len() - e + j {
                break;
            }
        }
        idx[j] += 1;
        for k in j + 1..e {
            idx[k] = idx[k - 1] + 1;
        }
    }
}

pub fn sorted3(mut t: Triple) -> Triple {
    t.sort_unstable();
    t
}

/// `|W_uvw,F,k|` for every `k` by trying every placement of `F`: each triple
/// of `F` onto `uvw` in each order, then every injective assignment of the
/// remaining vertices. Other triples must be chosen or available; the result
/// is indexed by how many are chosen.
pub fn w_bruteforce(state: &ProcessState, uvw: Triple, f: &Obstruction) -> Vec<u64> {
    let n = state.n() as u32;
    let chosen: BTreeSet<Triple> = state.chosen_triples().iter().map(|&t| sorted3(t)).collect();
    let v = f.vertex_count;
    let e = f.triples.len();
    let mut by_k = vec![0u64; e];
    for anchor in &f.triples {
        for o in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let mut map = vec![u32::MAX; v];
            for i in 0..3 {
                map[anchor[i] as usize] = uvw[o[i]];
            }
            let free: Vec<usize> = (0..v).filter(|&x| map[x] == u32::MAX).collect();
            assign(0, &free, &mut map, n, &mut |m| {
                let mut k = 0;
                for t in &f.triples {
                    if t == anchor {
                        continue;
                    }
                    let img = sorted3(t.map(|x| m[x as usize]));
                    if chosen.contains(&img) {
                        k += 1;
                    } else if !state.is_available(img) {
                        return;
                    }
                }
                by_k[k] += 1;
            });
        }
    }
    // each copy is met once per automorphism
    for c in &mut by_k {
        assert_eq!(*c % f.aut_count, 0);
        *c /= f.aut_count;
    }
    by_k
}

fn assign(depth: usize, free: &[usize], map: &mut [u32], n: u32, visit: &mut impl FnMut(&[u32])) {
    if depth == free.len() {
        visit(map);
        return;
    }
    for x in 0..n {
        if map.contains(&x) {
            continue;
        }
        map[free[depth]] = x;
        assign(depth + 1, free, map, n, visit);
        map[free[depth]] = u32::MAX;
    }
}

/// `q(t)` written out from the `(e, |Aut|)` pairs alone.
pub fn q_oracle(t: f64, members: &[(usize, u64)]) -> f64 {
    (-members
        .iter()
        .map(|&(e, aut)| 6.0 * e as f64 / aut as f64 * (6.0 * t).powi(e as i32 - 1))
        .sum::<f64>())
    .exp()
}

pub fn q_tilde_oracle(t: f64, members: &[(usize, u64)]) -> f64 {
    members
        .iter()
        .map(|&(e, aut)| 36.0 * (e * (e - 1)) as f64 * (6.0 * t).powi(e as i32 - 2) / aut as f64)
        .sum()
}

/// Binomial coefficient as a float.
pub fn choose(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

pub fn w_hat_oracle(t: f64, n: usize, e: usize, aut: u64, k: usize, members: &[(usize, u64)]) -> f64 {
    let p = 1.0 - 6.0 * t;
    let q = q_oracle(t, members);
    6.0 * e as f64 / aut as f64
        * choose(e - 1, k)
        * (6.0 * t).powi(k as i32)
        * (p.powi(3) * q * n as f64).powi((e - 1 - k) as i32)
}

/// Random triples on `n` vertices with distinct entries.
pub fn random_system(rng: &mut impl rand::Rng, n: u32, m: usize) -> Vec<Triple> {
    let mut out = BTreeSet::new();
    while out.len() < m {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        let c = rng.random_range(0..n);
        if a != b && b != c && a != c {
            out.insert(sorted3([a, b, c]));
        }
    }
    out.into_iter().collect()
}
