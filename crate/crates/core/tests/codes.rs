mod common;

use common::*;
use fqtile::codes::{
    code_from_tiling, code_from_tiling_by_solving, code_stats, formula_check, verify_perfect, Code,
    DEFAULT_ENUM_CEILING,
};
use fqtile::tiling::{construct_semiprojective, Tiling};
use fqtile::{Error, VSet};

#[test]
fn ternary_length_13_code_from_construction() {
    let t = construct_semiprojective(&field(3), 3).unwrap();
    let code = code_from_tiling(&t, DEFAULT_ENUM_CEILING).unwrap();
    assert_eq!((code.length(), code.len()), (13, 59049));

    let solved = code_from_tiling_by_solving(&t, DEFAULT_ENUM_CEILING).unwrap();
    assert_eq!(solved.words(), code.words());

    let perfect = verify_perfect(&code, 1, DEFAULT_ENUM_CEILING).unwrap();
    assert!(perfect.is_valid(), "{perfect:?}");
    assert_eq!(perfect.covered, 1_594_323);

    let stats = code_stats(&code).unwrap();
    assert_eq!((stats.rank, stats.kernel_dim, stats.period_count), (13, 7, 2187));
    let check = formula_check(&t, &stats).unwrap();
    assert!(check.consistent(), "{check:?}");
    assert_eq!((check.columns, check.u_rank), (13, 6));
}

#[test]
fn deleting_a_codeword_uncovers_27_vectors() {
    let t = construct_semiprojective(&field(3), 3).unwrap();
    let code = code_from_tiling(&t, DEFAULT_ENUM_CEILING).unwrap();
    let words = code.words();
    let fewer = VSet::from_rows(words.space().clone(), words.rows().skip(1)).unwrap();
    let verdict = verify_perfect(&Code::new(fewer, "minus one"), 1, DEFAULT_ENUM_CEILING).unwrap();
    assert!(!verdict.is_valid());
    assert_eq!(verdict.uncovered, 27);
    assert!(verdict.double_covered.is_none());
}

#[test]
fn refusals() {
    let t = construct_semiprojective(&field(3), 4).unwrap();
    assert_eq!(
        code_from_tiling(&t, DEFAULT_ENUM_CEILING).unwrap_err(),
        Error::CeilingExceeded { q: 3, n: 40, ceiling: DEFAULT_ENUM_CEILING }
    );
    let t = construct_semiprojective(&field(3), 3).unwrap();
    let (u, v) = t.into_parts();
    let swapped = Tiling::new(v, u).unwrap();
    assert_eq!(code_from_tiling(&swapped, DEFAULT_ENUM_CEILING).unwrap_err(), Error::NotProjective);
}

#[test]
fn subspace_tilings_give_linear_codes() {
    let mut rng = rng(3);
    let f = field(3);
    for k in 1..=3 {
        let (u, v) = random_transversal(&f, 3, k, &mut rng);
        let t = Tiling::new(u, v).unwrap();
        let code = code_from_tiling(&t, DEFAULT_ENUM_CEILING).unwrap();
        assert!(verify_perfect(&code, 1, DEFAULT_ENUM_CEILING).unwrap().is_valid());
        let stats = code_stats(&code).unwrap();
        assert!(formula_check(&t, &stats).unwrap().consistent());
    }
}
