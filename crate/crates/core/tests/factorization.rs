mod common;

use common::*;
use fqtile::linalg::rank_affine;
use fqtile::projgeo::{
    factorization_to_tiling, full_rank_points, is_period_point, points_of, project_quotient, restrict,
    tiling_to_factorization, verify_factorization, Factorization, PPoint,
};
use fqtile::tiling::{construct_projective, is_projective, kernel, verify_pair, Tiling};
use fqtile::{Error, Space, VSet};
use rand::Rng;

/// Projective pairs: complementary subspaces, and the same with one point of `V` moved.
fn projective_pairs(q: u64, n: usize, count: usize, seed: u64) -> Vec<(VSet, VSet)> {
    let f = field(q);
    let space = Space::new(f.clone(), n);
    let mut rng = rng(seed);
    let mut out = Vec::new();
    for i in 0..count {
        let k = rng.gen_range(1..n);
        let (w, c) = random_complementary(&f, n, k, &mut rng);
        let u = VSet::span(space.clone(), &w).unwrap();
        let v = VSet::span(space.clone(), &c).unwrap();
        if i % 2 == 0 {
            out.push((u, v));
            continue;
        }
        // move one point of V to a random other point
        let pts = points_of(&v);
        let drop = &pts[rng.gen_range(0..pts.len())];
        let all = fqtile::projgeo::all_points(&f, n).unwrap();
        let add = &all[rng.gen_range(0..all.len())];
        let mut kept: Vec<PPoint> = pts.iter().filter(|p| *p != drop).cloned().collect();
        kept.push(add.clone());
        let v2 = fqtile::projgeo::points_to_set(&f, n, &kept).unwrap();
        out.push((u, v2));
    }
    out
}

#[test]
fn tiling_and_factorization_verdicts_agree() {
    let mut agree_valid = 0;
    for (q, seed) in [(3u64, 1u64), (4, 2), (2, 3), (5, 4)] {
        let n = if q == 5 { 3 } else { 4 };
        for (u, v) in projective_pairs(q, n, 50, seed) {
            let tiling = verify_pair(&u, &v).unwrap().is_valid();
            let t = Tiling::new(u, v).unwrap();
            let fac = match tiling_to_factorization(&t) {
                Ok(fac) => verify_factorization(&fac).unwrap().valid,
                Err(Error::NotDisjoint) => false,
                Err(e) => panic!("{e}"),
            };
            assert_eq!(tiling, fac);
            agree_valid += tiling as usize;
            if let Ok(fac) = tiling_to_factorization(&t) {
                let back = factorization_to_tiling(&fac).unwrap();
                assert_eq!((back.u(), back.v()), (t.u(), t.v()));
            }
        }
    }
    assert!(agree_valid >= 100);
}

#[test]
fn literal_definition_is_weaker() {
    // Fano plane: U = {a}, V holds the whole line {(0,1,0), (1,1,0)} through a and one point
    // on each other line through a. Both outside points are covered once, but the full line
    // makes each of its V points lie between a and the other.
    let f = field(2);
    let p = |c: [u32; 3]| PPoint::new(&fqtile::FVec::new(&f, c.to_vec()).unwrap()).unwrap();
    let fac = Factorization::new(
        &f,
        3,
        vec![p([1, 0, 0])],
        vec![p([0, 1, 0]), p([1, 1, 0]), p([0, 0, 1]), p([0, 1, 1])],
    )
    .unwrap();
    let verdict = verify_factorization(&fac).unwrap();
    assert!(verdict.literal_valid && !verdict.valid);
    assert_eq!(verdict.stray_incidences, 2);
    let t = factorization_to_tiling(&fac).unwrap();
    assert!(!verify_pair(t.u(), t.v()).unwrap().is_valid());
}

#[test]
fn rank_and_kernel_correspondence() {
    let mut rng = rng(21);
    let f = field(3);
    let space = Space::new(f.clone(), 4);
    for _ in 0..30 {
        let k = rng.gen_range(1..=4);
        let (w, _) = random_complementary(&f, 4, k, &mut rng);
        let mut u = VSet::span(space.clone(), &w).unwrap();
        if rng.gen_bool(0.5) {
            // add a random extra point, which usually destroys the subspace structure
            let all = fqtile::projgeo::all_points(&f, 4).unwrap();
            let extra = all[rng.gen_range(0..all.len())].clone();
            let mut pts = points_of(&u);
            pts.push(extra);
            u = fqtile::projgeo::points_to_set(&f, 4, &pts).unwrap();
        }
        assert!(is_projective(&u));
        let pts = points_of(&u);
        assert_eq!(full_rank_points(&pts).unwrap(), rank_affine(&u).unwrap() == 4);
        let has_period_point = pts.iter().any(|p| is_period_point(p, &pts));
        assert_eq!(has_period_point, kernel(&u).unwrap().dim >= 1);
    }
}

#[test]
fn restriction_and_quotient_outputs_factorize() {
    for (q, seed) in [(3u64, 7u64), (4, 8)] {
        for (u, v) in projective_pairs(q, 4, 20, seed).into_iter().step_by(2) {
            let fac = tiling_to_factorization(&Tiling::new(u, v).unwrap()).unwrap();
            let r = restrict(&fac).unwrap();
            assert!(verify_factorization(&r).unwrap().valid);
            assert_eq!(r.u().len(), fac.u().len());
            for x in fac.u() {
                let qf = project_quotient(&fac, x).unwrap();
                assert!(verify_factorization(&qf).unwrap().valid);
            }
        }
    }
}

#[test]
fn projective_construction_restricted_and_quotiented() {
    let t = construct_projective(&field(3), 5).unwrap();
    let fac = tiling_to_factorization(&t).unwrap();
    // full rank: restriction is the identity and there is no period to factor out
    assert_eq!(restrict(&fac).unwrap(), fac);
    let x = fac.u()[0].clone();
    assert_eq!(project_quotient(&fac, &x).unwrap_err(), Error::NotAPeriod);
}
