//! The projective space PG(n-1, q) over F_q^n: points, factorizations, their relation to
//! projective tilings, restriction to a span, quotients by a period, and exhaustive search.
//!
//! A point is a 1-dimensional subspace, stored as its normalized representative. A pair of
//! disjoint point sets `(U, V)` factorizes the geometry when every other point lies on exactly
//! one line joining a point of `U` to a point of `V`.

mod search;

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldSpec};
use crate::linalg::{key_order, Echelon, FMatrix, FVec, Space, VSet};
use crate::tiling::{is_projective, Tiling};

pub use search::{
    counting_identity, exhaustive_search, Geometry, GeometryKind, SearchOptions, SearchOutcome, SearchSolution,
    DEFAULT_SEARCH_CEILING,
};

/// A point of PG(n-1, q).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PPoint {
    rep: FVec,
}

impl PPoint {
    /// The point spanned by `v`.
    pub fn new(v: &FVec) -> Result<Self> {
        v.normalized().map(|rep| PPoint { rep }).ok_or(Error::ZeroPoint)
    }

    pub fn rep(&self) -> &FVec {
        &self.rep
    }

    pub fn coords(&self) -> &[Elem] {
        self.rep.coords()
    }

    pub fn field(&self) -> &FieldSpec {
        self.rep.field()
    }

    pub fn n(&self) -> usize {
        self.rep.len()
    }
}

/// Number of points of PG(n-1, q), `(q^n - 1) / (q - 1)`.
pub fn point_count(q: u32, n: usize) -> Option<u128> {
    Some(((q as u128).checked_pow(n as u32)? - 1) / (q as u128 - 1))
}

/// Every point of PG(n-1, q), in key order of the representatives.
pub fn all_points(field: &FieldSpec, n: usize) -> Result<Vec<PPoint>> {
    let pts = Space::new(field.clone(), n).projective_points()?;
    Ok(pts.into_iter().map(|rep| PPoint { rep }).collect())
}

/// The points lying in a set of vectors (zero is skipped, duplicates merged).
pub fn points_of(set: &VSet) -> Vec<PPoint> {
    let mut pts: Vec<PPoint> = set.iter().filter(FVec::is_normalized).map(|rep| PPoint { rep }).collect();
    pts.sort();
    pts
}

/// Normalized points `u + l v` for `l != 0`: the line through `u` and `v` without its endpoints.
fn line_interior(f: &FieldSpec, u: &[Elem], v: &[Elem], out: &mut Vec<Vec<Elem>>) {
    for lambda in f.nonzero() {
        let w: Vec<Elem> = u.iter().zip(v).map(|(&a, &b)| f.add(a, f.mul(lambda, b))).collect();
        let lead = w.iter().find(|&&c| c != 0).copied().expect("distinct points");
        let inv = f.inv(lead).unwrap();
        out.push(w.into_iter().map(|c| f.mul(inv, c)).collect());
    }
}

/// Two disjoint point sets of the same geometry, each kept sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    field: FieldSpec,
    n: usize,
    u: Vec<PPoint>,
    v: Vec<PPoint>,
}

impl Factorization {
    pub fn new(field: &FieldSpec, n: usize, mut u: Vec<PPoint>, mut v: Vec<PPoint>) -> Result<Self> {
        for p in u.iter().chain(&v) {
            if p.field() != field {
                return Err(Error::SpaceMismatch);
            }
            if p.n() != n {
                return Err(Error::DimensionMismatch { expected: n, found: p.n() });
            }
        }
        u.sort();
        u.dedup();
        v.sort();
        v.dedup();
        let left: HashSet<&PPoint> = u.iter().collect();
        if v.iter().any(|p| left.contains(p)) {
            return Err(Error::NotDisjoint);
        }
        Ok(Factorization { field: field.clone(), n, u, v })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn u(&self) -> &[PPoint] {
        &self.u
    }

    pub fn v(&self) -> &[PPoint] {
        &self.v
    }
}

/// Why a pair fails to factorize.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FactorWitness {
    /// An outside point lying on no joining line.
    Uncovered(PPoint),
    /// An outside point lying on `count` joining lines.
    MultiplyCovered { point: PPoint, count: u32 },
    /// A point of `U` or `V` lying strictly inside a joining line.
    Stray(PPoint),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationVerdict {
    /// Every outside point is covered once and no joining line passes through `U` or `V`
    /// between its endpoints. This is the condition equivalent to the tiling property.
    pub valid: bool,
    /// Only the condition on outside points.
    pub literal_valid: bool,
    /// `U` and `V` cover every point, so the condition is vacuous.
    pub degenerate: bool,
    pub outside_points: u128,
    pub uncovered: u128,
    pub multiply_covered: u64,
    pub stray_incidences: u64,
    pub witness: Option<FactorWitness>,
}

/// Upper bound on `q^n` for enumerating the geometry to name an uncovered point.
const WITNESS_SCAN_LIMIT: u64 = 1 << 26;

pub fn verify_factorization(fac: &Factorization) -> Result<FactorizationVerdict> {
    let f = &fac.field;
    let total = point_count(f.q(), fac.n).ok_or(Error::SpaceTooLarge { q: f.q(), n: fac.n })?;
    let members: HashSet<&[Elem]> = fac.u.iter().chain(&fac.v).map(PPoint::coords).collect();
    if members.len() != fac.u.len() + fac.v.len() {
        return Err(Error::NotDisjoint);
    }
    let hits: Vec<Vec<Vec<Elem>>> = fac
        .u
        .par_iter()
        .map(|u| {
            let mut out = Vec::with_capacity(fac.v.len() * (f.q() as usize - 1));
            for v in &fac.v {
                line_interior(f, u.coords(), v.coords(), &mut out);
            }
            out
        })
        .collect();
    let mut counts: HashMap<Vec<Elem>, u32> = HashMap::new();
    for w in hits.into_iter().flatten() {
        *counts.entry(w).or_insert(0) += 1;
    }

    let mut stray: Vec<&[Elem]> = Vec::new();
    let mut stray_incidences = 0u64;
    let mut multiple: Vec<(&[Elem], u32)> = Vec::new();
    let mut hit_outside = 0u128;
    for (w, &c) in &counts {
        if members.contains(w.as_slice()) {
            stray_incidences += c as u64;
            stray.push(w);
        } else {
            hit_outside += 1;
            if c > 1 {
                multiple.push((w, c));
            }
        }
    }
    let outside_points = total - members.len() as u128;
    let uncovered = outside_points - hit_outside;
    let literal_valid = multiple.is_empty() && uncovered == 0;
    let point = |c: &[Elem]| PPoint { rep: FVec::new(f, c.to_vec()).unwrap() };

    let witness = if let Some(&(w, count)) = multiple.iter().min_by(|a, b| key_order(a.0, b.0)) {
        Some(FactorWitness::MultiplyCovered { point: point(w), count })
    } else if uncovered > 0 {
        let space = Space::new(f.clone(), fac.n);
        match space.size() {
            Some(size) if size <= WITNESS_SCAN_LIMIT => space
                .vectors()?
                .filter(FVec::is_normalized)
                .filter(|p| !members.contains(p.coords()) && !counts.contains_key(p.coords()))
                .min()
                .map(|rep| FactorWitness::Uncovered(PPoint { rep })),
            _ => None,
        }
    } else {
        stray.iter().min_by(|a, b| key_order(a, b)).map(|w| FactorWitness::Stray(point(w)))
    };
    Ok(FactorizationVerdict {
        valid: literal_valid && stray_incidences == 0,
        literal_valid,
        degenerate: outside_points == 0,
        outside_points,
        uncovered,
        multiply_covered: multiple.len() as u64,
        stray_incidences,
        witness,
    })
}

/// The point sets of a pair of projective tiles.
pub fn tiling_to_factorization(t: &Tiling) -> Result<Factorization> {
    if !is_projective(t.u()) || !is_projective(t.v()) {
        return Err(Error::NotProjective);
    }
    let space = t.space();
    Factorization::new(space.field(), space.n(), points_of(t.u()), points_of(t.v()))
}

/// `{0}` together with every multiple of every point.
pub fn points_to_set(field: &FieldSpec, n: usize, pts: &[PPoint]) -> Result<VSet> {
    let space = Space::new(field.clone(), n);
    let zero = std::iter::once(vec![0; n]);
    let multiples = pts.iter().flat_map(|p| field.nonzero().map(move |l| p.rep.scale(l).into_coords()));
    VSet::from_rows(space, zero.chain(multiples))
}

pub fn factorization_to_tiling(fac: &Factorization) -> Result<Tiling> {
    Tiling::new(points_to_set(&fac.field, fac.n, &fac.u)?, points_to_set(&fac.field, fac.n, &fac.v)?)
}

/// The representatives span F_q^n.
pub fn full_rank_points(pts: &[PPoint]) -> Result<bool> {
    let first = pts.first().ok_or(Error::EmptySet)?;
    let e = Echelon::from_vectors(first.field(), first.n(), pts.iter().map(PPoint::coords));
    Ok(e.rank() == first.n())
}

/// `p` is in `S` and every line through `p` and another point of `S` lies inside `S`.
pub fn is_period_point(p: &PPoint, pts: &[PPoint]) -> bool {
    let set: HashSet<&[Elem]> = pts.iter().map(PPoint::coords).collect();
    if !set.contains(p.coords()) {
        return false;
    }
    let f = p.field();
    let mut line = Vec::new();
    pts.iter().filter(|s| *s != p).all(|s| {
        line.clear();
        line_interior(f, p.coords(), s.coords(), &mut line);
        line.iter().all(|w| set.contains(w.as_slice()))
    })
}

fn require_valid(fac: &Factorization) -> Result<()> {
    if verify_factorization(fac)?.valid {
        Ok(())
    } else {
        Err(Error::NotAFactorization)
    }
}

/// `(U, <U> ∩ V)` as a factorization of the projective span of `U`.
///
/// The span is re-coordinatized by its reduced echelon basis: a vector of the span has
/// coordinates equal to its entries at the pivot columns, which keeps representatives
/// normalized.
pub fn restrict(fac: &Factorization) -> Result<Factorization> {
    require_valid(fac)?;
    let e = Echelon::from_vectors(&fac.field, fac.n, fac.u.iter().map(PPoint::coords));
    if e.rank() == fac.n {
        return Ok(fac.clone());
    }
    let pivots = e.pivots().to_vec();
    let to_span = |p: &PPoint| -> Result<PPoint> {
        let c = pivots.iter().map(|&j| p.coords()[j]).collect();
        Ok(PPoint { rep: FVec::new(&fac.field, c)? })
    };
    let u = fac.u.iter().map(to_span).collect::<Result<Vec<_>>>()?;
    let v = fac.v.iter().filter(|p| e.contains(p.coords())).map(to_span).collect::<Result<Vec<_>>>()?;
    Factorization::new(&fac.field, e.rank(), u, v)
}

/// `(U/x, V/x)` as a factorization of the quotient geometry `G/x`, for a period `x` of `U`.
///
/// The representative of `x` is extended to a basis by appending standard basis vectors in
/// index order; a line through `x` and `y` maps to the normalized coordinates of `y` in that
/// basis with the `x`-coordinate dropped.
pub fn project_quotient(fac: &Factorization, x: &PPoint) -> Result<Factorization> {
    require_valid(fac)?;
    if !is_period_point(x, &fac.u) {
        return Err(Error::NotAPeriod);
    }
    let (f, n) = (&fac.field, fac.n);
    let mut e = Echelon::new(f, n);
    let mut basis = vec![x.rep.clone()];
    e.insert(x.coords());
    for i in 0..n {
        let unit = FVec::unit(f, n, i);
        if e.insert(unit.coords()) {
            basis.push(unit);
        }
    }
    let inv = FMatrix::from_columns(f, n, &basis)?.inverse().expect("basis is independent");
    let image = |pts: &[PPoint]| -> Result<Vec<PPoint>> {
        pts.iter()
            .filter(|p| *p != x)
            .map(|p| {
                let c = inv.mat_vec(&p.rep)?.into_coords();
                PPoint::new(&FVec::new(f, c[1..].to_vec())?)
            })
            .collect()
    };
    Factorization::new(f, n - 1, image(&fac.u)?, image(&fac.v)?)
}
