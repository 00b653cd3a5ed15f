#![allow(dead_code)]

use std::collections::HashMap;

use fqtile::linalg::Echelon;
use fqtile::{Elem, FVec, FieldSpec, Space, VSet};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn field(q: u64) -> FieldSpec {
    FieldSpec::from_order(q).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn random_coords(f: &FieldSpec, n: usize, rng: &mut ChaCha8Rng) -> Vec<Elem> {
    (0..n).map(|_| rng.gen_range(0..f.q())).collect()
}

/// Random bases of a `k`-dimensional subspace and of a complement.
pub fn random_complementary(f: &FieldSpec, n: usize, k: usize, rng: &mut ChaCha8Rng) -> (Vec<FVec>, Vec<FVec>) {
    let mut e = Echelon::new(f, n);
    let mut w = Vec::new();
    let mut c = Vec::new();
    while e.rank() < n {
        let v = random_coords(f, n, rng);
        if e.insert(&v) {
            let v = FVec::new(f, v).unwrap();
            if w.len() < k { w.push(v) } else { c.push(v) }
        }
    }
    (w, c)
}

/// `U` a random subspace of dimension `k`, `V` one random representative from each coset of `U`.
pub fn random_transversal(f: &FieldSpec, n: usize, k: usize, rng: &mut ChaCha8Rng) -> (VSet, VSet) {
    let space = Space::new(f.clone(), n);
    let (w, c) = random_complementary(f, n, k, rng);
    let u = VSet::span(space.clone(), &w).unwrap();
    let reps = VSet::span(space.clone(), &c).unwrap();
    let shifted: Vec<Vec<Elem>> = reps
        .iter()
        .map(|r| {
            let pick = u.get(rng.gen_range(0..u.len()));
            r.add(&pick).unwrap().into_coords()
        })
        .collect();
    (u, VSet::from_rows(space, shifted).unwrap())
}

/// Replaces one random member of `set` by a random vector outside it; `None` when the set is
/// the whole space.
pub fn swap_one(set: &VSet, rng: &mut ChaCha8Rng) -> Option<VSet> {
    let space = set.space().clone();
    if set.len() as u64 == space.size().unwrap() {
        return None;
    }
    let drop = rng.gen_range(0..set.len());
    let mut rows: Vec<Vec<Elem>> = set.rows().enumerate().filter(|&(i, _)| i != drop).map(|(_, r)| r.to_vec()).collect();
    loop {
        let v = random_coords(set.field(), set.n(), rng);
        if !set.contains(&v) {
            rows.push(v);
            break;
        }
    }
    Some(VSet::from_rows(space, rows).unwrap())
}

/// A random subset of the space of the given size.
pub fn random_subset(space: &Space, size: usize, rng: &mut ChaCha8Rng) -> VSet {
    let mut keys: Vec<u64> = (0..space.size().unwrap()).collect();
    keys.shuffle(rng);
    keys.truncate(size);
    VSet::from_keys(space.clone(), keys).unwrap()
}

/// Every vector has exactly one decomposition `u + v`: tally all sums and compare with the space.
pub fn brute_tiling(u: &VSet, v: &VSet) -> bool {
    let space = u.space();
    let f = space.field();
    let mut sums: HashMap<Vec<Elem>, usize> = HashMap::new();
    for ur in u.rows() {
        for vr in v.rows() {
            let s: Vec<Elem> = ur.iter().zip(vr).map(|(&a, &b)| f.add(a, b)).collect();
            *sums.entry(s).or_insert(0) += 1;
        }
    }
    sums.len() as u64 == space.size().unwrap() && sums.values().all(|&c| c == 1)
}

/// Prime powers up to `limit`.
pub fn prime_powers(limit: u64) -> Vec<u64> {
    (2..=limit).filter(|&q| fqtile::gf::prime_power(q).is_some()).collect()
}
