//! The two full-rank constructions of F_q^{2m}.
//!
//! Coordinates `0..m` carry the x-block (basis vectors x_1..x_m) and `m..2m` the y-block
//! (y_1..y_m). Indices are cyclic mod m. Both constructions start from the subspace
//! `H = <x_1, ..., x_m>` and exchange a family of pairwise disjoint pieces `H_{i,g}` of `H`
//! for shifted copies `U_{i,g}` outside `H`; disjointness is checked, not assumed.

use super::Tiling;
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldSpec};
use crate::linalg::{Space, VSet};

fn check_params(field: &FieldSpec, m: usize, min_m: usize) -> Result<()> {
    if field.q() <= 2 {
        return Err(Error::FieldTooSmall(field.q()));
    }
    if m < min_m {
        return Err(Error::ParameterTooSmall { min: min_m, m });
    }
    Ok(())
}

/// Full-rank aperiodic tiling of F_q^{2m} whose first tile is projective (q >= 3, m >= 3).
///
/// `V = V_1 + ... + V_m` with `V_i = (<y_i> \ {y_i}) u {y_i + x_i}`, and `U` is `H` with each
/// `H_{i,g} = <x_i> + g x_{i+1}` replaced by `U_{i,g} = <x_i> + g y_i + g x_{i+1}`.
pub fn construct_semiprojective(field: &FieldSpec, m: usize) -> Result<Tiling> {
    check_params(field, m, 3)?;
    let space = Space::new(field.clone(), 2 * m);
    space.require_keyed()?;
    let (x, y) = (|i: usize| i % m, |i: usize| m + i % m);

    let mut v = VSet::from_rows(space.clone(), [vec![0; 2 * m]])?;
    for i in 0..m {
        let mut factor = Vec::with_capacity(field.q() as usize);
        for g in field.elements().filter(|&g| g != 1) {
            let mut r = vec![0; 2 * m];
            r[y(i)] = g;
            factor.push(r);
        }
        let mut r = vec![0; 2 * m];
        r[y(i)] = 1;
        r[x(i)] = 1;
        factor.push(r);
        v = v.direct_sum(&VSet::from_distinct_rows(space.clone(), factor)?)?;
    }

    let mut removed = Vec::new();
    let mut inserted = Vec::new();
    for i in 0..m {
        for g in field.nonzero() {
            for lambda in field.elements() {
                let mut h = vec![0; 2 * m];
                h[x(i)] = lambda;
                h[x(i + 1)] = g;
                let mut u = h.clone();
                u[y(i)] = g;
                removed.push(h);
                inserted.push(u);
            }
        }
    }
    let u = exchange(&space, m, removed, inserted)?;
    Tiling::new(u, v)
}

/// Full-rank aperiodic tiling of F_q^{2m} with both tiles projective (q >= 3, m >= 5).
///
/// `V` is the image of `<y_1, ..., y_m>` under [`lift_y_block`]; `U` is `H` with each
/// `H_{i,g} = <x_i, x_{i+1}> + g x_{i+2}` replaced by `U_{i,g} = H_{i,g} + g y_{i+1}`.
pub fn construct_projective(field: &FieldSpec, m: usize) -> Result<Tiling> {
    check_params(field, m, 5)?;
    projective_unchecked(field, m)
}

/// The projective construction without the `m >= 5` guard; the disjointness check still runs.
pub(crate) fn projective_unchecked(field: &FieldSpec, m: usize) -> Result<Tiling> {
    let space = Space::new(field.clone(), 2 * m);
    space.require_keyed()?;
    let (x, y) = (|i: usize| i % m, |i: usize| m + i % m);

    let zspace = Space::new(field.clone(), m);
    let rows = zspace.vectors()?.map(|z| lift_y_block(z.coords()));
    let v = VSet::from_distinct_rows(space.clone(), rows)?;

    let mut removed = Vec::new();
    let mut inserted = Vec::new();
    for i in 0..m {
        for g in field.nonzero() {
            for a in field.elements() {
                for b in field.elements() {
                    let mut h = vec![0; 2 * m];
                    h[x(i)] = a;
                    h[x(i + 1)] = b;
                    h[x(i + 2)] = g;
                    let mut u = h.clone();
                    u[y(i + 1)] = g;
                    removed.push(h);
                    inserted.push(u);
                }
            }
        }
    }
    let u = exchange(&space, m, removed, inserted)?;
    Tiling::new(u, v)
}

/// `v(z)`: the y-block is `z`; x-coordinate `i` is `z_i` when `z_{i+1} = 0` and `0` otherwise.
pub fn lift_y_block(z: &[Elem]) -> Vec<Elem> {
    let m = z.len();
    let mut out = vec![0; 2 * m];
    for i in 0..m {
        if z[(i + 1) % m] == 0 {
            out[i] = z[i];
        }
        out[m + i] = z[i];
    }
    out
}

/// `(H \ removed) u inserted`, where `H` is the x-block subspace. Fails unless the removed
/// pieces are pairwise disjoint inside `H` and the inserted pieces are pairwise disjoint
/// outside `H`.
fn exchange(space: &Space, m: usize, removed: Vec<Vec<Elem>>, inserted: Vec<Vec<Elem>>) -> Result<VSet> {
    let n_removed = removed.len();
    let removed = VSet::from_rows(space.clone(), removed)?;
    if removed.len() != n_removed {
        return Err(Error::Construction(format!(
            "removed pieces overlap: {} vectors in {} slots",
            removed.len(),
            n_removed
        )));
    }
    let n_inserted = inserted.len();
    let inserted = VSet::from_rows(space.clone(), inserted)?;
    if inserted.len() != n_inserted {
        return Err(Error::Construction(format!(
            "inserted pieces overlap: {} vectors in {} slots",
            inserted.len(),
            n_inserted
        )));
    }
    let in_h = |r: &[Elem]| r[m..].iter().all(|&c| c == 0);
    if !removed.rows().all(in_h) || inserted.rows().any(in_h) {
        return Err(Error::Construction("exchanged pieces leave their cosets".into()));
    }
    let field = space.field();
    let hspace = Space::new(field.clone(), m);
    let kept = hspace.vectors()?.filter_map(|xb| {
        let mut r = xb.into_coords();
        r.resize(2 * m, 0);
        (!removed.contains(&r)).then_some(r)
    });
    let u = VSet::from_distinct_rows(space.clone(), kept.chain(inserted.rows().map(<[Elem]>::to_vec)))?;
    let expected = hspace.size().unwrap() as usize;
    if u.len() != expected {
        return Err(Error::Construction(format!("tile has {} vectors, expected {expected}", u.len())));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tiling::{audit, is_projective, periods, verify_tiling};

    fn f(q: u64) -> FieldSpec {
        FieldSpec::from_order(q).unwrap()
    }

    #[test]
    fn parameter_guards() {
        assert_eq!(construct_semiprojective(&f(2), 3).unwrap_err(), Error::FieldTooSmall(2));
        assert_eq!(construct_semiprojective(&f(3), 2).unwrap_err(), Error::ParameterTooSmall { min: 3, m: 2 });
        assert_eq!(construct_projective(&f(3), 4).unwrap_err(), Error::ParameterTooSmall { min: 5, m: 4 });
        assert_eq!(construct_projective(&f(2), 5).unwrap_err(), Error::FieldTooSmall(2));
    }

    #[test]
    fn projective_pieces_overlap_below_five() {
        for m in [3, 4] {
            let err = projective_unchecked(&f(3), m).unwrap_err();
            assert!(matches!(err, Error::Construction(ref s) if s.contains("overlap")), "m={m}: {err}");
        }
    }

    #[test]
    fn semiprojective_membership_spot_check() {
        let t = construct_semiprojective(&f(3), 3).unwrap();
        // x_1 + x_2 + y_1 lies in U_{1,1}
        assert!(t.u().contains(&[1, 1, 0, 1, 0, 0]));
        // x_2 alone lies in H_{1,1}, so it was removed
        assert!(!t.u().contains(&[0, 1, 0, 0, 0, 0]));
        // y_1 + x_1 is in V but 2(y_1 + x_1) is not
        assert!(t.v().contains(&[1, 0, 0, 1, 0, 0]));
        assert!(!t.v().contains(&[2, 0, 0, 2, 0, 0]));
        assert!(!is_projective(t.v()));
    }

    #[test]
    fn semiprojective_q3_m3() {
        let t = construct_semiprojective(&f(3), 3).unwrap();
        let a = audit(&t).unwrap();
        assert_eq!((a.u_size, a.v_size), (27, 27));
        assert!(a.semiprojective_ok(), "{a:?}");
        assert_eq!((a.u_rank, a.v_rank), (6, 6));
        assert!(t.u().contains_zero() && t.v().contains_zero());
    }

    #[test]
    fn semiprojective_other_fields() {
        for (q, m) in [(4u64, 3usize), (5, 3), (3, 4), (7, 3), (9, 3)] {
            let t = construct_semiprojective(&f(q), m).unwrap();
            let a = audit(&t).unwrap();
            assert!(a.semiprojective_ok(), "q={q} m={m}: {a:?}");
            assert_eq!(a.u_size, (q as usize).pow(m as u32));
        }
    }

    #[test]
    fn lift_spot_values() {
        assert_eq!(lift_y_block(&[1, 0, 0, 0, 0]), vec![1, 0, 0, 0, 0, 1, 0, 0, 0, 0]);
        assert_eq!(lift_y_block(&[1, 1, 0, 0, 0]), vec![0, 1, 0, 0, 0, 1, 1, 0, 0, 0]);
        // the last x-coordinate looks at z_1
        assert_eq!(lift_y_block(&[1, 0, 0, 0, 2]), vec![1, 0, 0, 0, 0, 1, 0, 0, 0, 2]);
        assert_eq!(lift_y_block(&[0, 0, 0, 0, 2]), vec![0, 0, 0, 0, 2, 0, 0, 0, 0, 2]);
    }

    #[test]
    fn projective_q3_m5() {
        let t = construct_projective(&f(3), 5).unwrap();
        assert_eq!(verify_tiling(&t).unwrap(), crate::tiling::TilingVerdict::Valid);
        let a = audit(&t).unwrap();
        assert!(a.projective_ok(), "{a:?}");
        assert_eq!((a.u_size, a.v_size), (243, 243));
        assert_eq!(periods(t.u()).unwrap().len(), 1);
    }

    #[test]
    fn projective_q4_m5() {
        let t = construct_projective(&f(4), 5).unwrap();
        let a = audit(&t).unwrap();
        assert!(a.projective_ok(), "{a:?}");
        assert_eq!(a.u_size, 1024);
    }
}
