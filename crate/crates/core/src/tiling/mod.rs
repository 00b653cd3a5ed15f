//! Tilings `(U, V)` of F_q^n: every vector is uniquely `u + v` with `u` in `U` and `v` in `V`.

mod construct;

use std::collections::HashSet;
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

pub use construct::{construct_projective, construct_semiprojective, lift_y_block};

use crate::error::{Error, Result};
use crate::gf::Elem;
use crate::keyset::AtomicBitSet;
use crate::linalg::{rank_affine, Echelon, FVec, Space, VSet};

/// Largest `q^n` for which a tiling is checked by marking every sum.
pub const VERIFY_LIMIT: u64 = 1 << 34;

/// Rows per parallel work item.
const BLOCK: usize = 1024;

/// A pair of tiles in a common space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tiling {
    u: VSet,
    v: VSet,
}

impl Tiling {
    pub fn new(u: VSet, v: VSet) -> Result<Self> {
        u.same_space(&v)?;
        Ok(Tiling { u, v })
    }

    pub fn u(&self) -> &VSet {
        &self.u
    }

    pub fn v(&self) -> &VSet {
        &self.v
    }

    pub fn space(&self) -> &Space {
        self.u.space()
    }

    pub fn into_parts(self) -> (VSet, VSet) {
        (self.u, self.v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TilingVerdict {
    Valid,
    /// `|U| * |V| != q^n`.
    CardinalityMismatch { u_len: usize, v_len: usize, space_size: Option<u128> },
    /// Two decompositions of `sum`; `sum` is the smallest-key vector with more than one.
    Collision { sum: FVec, first: (FVec, FVec), second: (FVec, FVec) },
}

impl TilingVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, TilingVerdict::Valid)
    }
}

/// Checks that `(U, V)` tiles its ambient space.
pub fn verify_tiling(t: &Tiling) -> Result<TilingVerdict> {
    verify_pair(&t.u, &t.v)
}

pub fn verify_pair(u: &VSet, v: &VSet) -> Result<TilingVerdict> {
    u.same_space(v)?;
    if u.is_empty() || v.is_empty() {
        return Err(Error::EmptySet);
    }
    let space = u.space();
    let product = u.len() as u128 * v.len() as u128;
    let size = space.size_u128();
    if size != Some(product) {
        return Ok(TilingVerdict::CardinalityMismatch { u_len: u.len(), v_len: v.len(), space_size: size });
    }
    let size = space.require_keyed()?;
    if size > VERIFY_LIMIT {
        return Err(Error::SpaceTooLarge { q: space.q(), n: space.n() });
    }

    let seen = AtomicBitSet::new(size);
    let smallest_repeat = AtomicU64::new(u64::MAX);
    let n = space.n();
    let blocks = u.len().div_ceil(BLOCK);
    (0..blocks).into_par_iter().for_each(|b| {
        let mut buf = vec![0; n];
        let lo = b * BLOCK;
        let hi = (lo + BLOCK).min(u.len());
        for i in lo..hi {
            let ur = u.row(i);
            for vr in v.rows() {
                space.add_into(ur, vr, &mut buf);
                let k = space.key_unchecked(&buf);
                if seen.insert(k) {
                    smallest_repeat.fetch_min(k, Ordering::Relaxed);
                }
            }
        }
    });
    let k = smallest_repeat.into_inner();
    if k == u64::MAX {
        return Ok(TilingVerdict::Valid);
    }
    let sum = space.decode(k);
    let mut pairs = decompositions(u, v, &sum).into_iter();
    let first = pairs.next().expect("repeated sum has a decomposition");
    let second = pairs.next().expect("repeated sum has two decompositions");
    Ok(TilingVerdict::Collision { sum, first, second })
}

/// All `(u, v)` with `u + v = s`, ordered by `u`.
pub fn decompositions(u: &VSet, v: &VSet, s: &FVec) -> Vec<(FVec, FVec)> {
    let space = u.space();
    let mut diff = vec![0; space.n()];
    let mut out = Vec::new();
    for ur in u.rows() {
        space.sub_into(s.coords(), ur, &mut diff);
        if v.contains(&diff) {
            out.push((FVec::new(space.field(), ur.to_vec()).unwrap(), FVec::new(space.field(), diff.clone()).unwrap()));
        }
    }
    out
}

/// Whether `S + d = S`.
pub fn is_period(set: &VSet, d: &[Elem]) -> bool {
    let space = set.space();
    let n = space.n();
    let check_block = |lo: usize, hi: usize| {
        let mut buf = vec![0; n];
        (lo..hi).all(|i| {
            space.add_into(set.row(i), d, &mut buf);
            set.contains(&buf)
        })
    };
    let len = set.len();
    if len < 4 * BLOCK {
        return check_block(0, len);
    }
    (0..len.div_ceil(BLOCK)).into_par_iter().all(|b| check_block(b * BLOCK, ((b + 1) * BLOCK).min(len)))
}

/// The set `per(S) = { d : S + d = S }`.
///
/// Candidates are the differences `s - s0` from the smallest-key member `s0`, since every
/// period moves `s0` inside `S`. Because `per(S)` is closed under addition, each confirmed
/// period is folded into the group found so far and candidates already in that group are
/// accepted without a membership scan.
pub fn periods(set: &VSet) -> Result<VSet> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let space = set.space();
    let f = space.field();
    let n = space.n();
    let base = set.row(0).to_vec();
    let mut group: HashSet<Vec<Elem>> = HashSet::new();
    group.insert(vec![0; n]);
    let mut d = vec![0; n];
    for r in set.rows() {
        space.sub_into(r, &base, &mut d);
        if group.contains(&d) || !is_period(set, &d) {
            continue;
        }
        // per(S) is an F_p-subspace: add every integer multiple of d to every known period.
        let multiples: Vec<Vec<Elem>> = (1..f.p() as u64)
            .map(|j| d.iter().map(|&c| f.mul(f.from_int(j), c)).collect())
            .collect();
        let old: Vec<Vec<Elem>> = group.iter().cloned().collect();
        let mut buf = vec![0; n];
        for g in &old {
            for m in &multiples {
                space.add_into(g, m, &mut buf);
                group.insert(buf.clone());
            }
        }
    }
    VSet::from_rows(space.clone(), group)
}

/// The kernel of a set: the largest F_q-subspace contained in its periods.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel {
    pub basis: Vec<FVec>,
    pub dim: usize,
}

pub fn kernel(set: &VSet) -> Result<Kernel> {
    kernel_of_periods(&periods(set)?)
}

/// Kernel computed from a precomputed period set.
pub fn kernel_of_periods(per: &VSet) -> Result<Kernel> {
    let space = per.space();
    let f = space.field();
    let mut buf = vec![0; space.n()];
    let closed: Vec<&[Elem]> = per
        .rows()
        .filter(|r| {
            f.nonzero().all(|lambda| {
                space.scale_into(lambda, r, &mut buf);
                per.contains(&buf)
            })
        })
        .collect();
    let e = Echelon::from_vectors(f, space.n(), closed.iter().copied());
    let dim = e.rank();
    if (f.q() as u128).checked_pow(dim as u32) != Some(closed.len() as u128) {
        return Err(Error::Construction(format!(
            "scalar-closed periods ({}) do not form a subspace of dimension {dim}",
            closed.len()
        )));
    }
    Ok(Kernel { basis: e.basis(), dim })
}

/// `0` is in `S` and `S` is closed under multiplication by nonzero scalars.
pub fn is_projective(set: &VSet) -> bool {
    if !set.contains_zero() {
        return false;
    }
    let space = set.space();
    let mut buf = vec![0; space.n()];
    set.rows().all(|r| {
        space.field().nonzero().skip(1).all(|lambda| {
            space.scale_into(lambda, r, &mut buf);
            set.contains(&buf)
        })
    })
}

/// Outcome of every property check on a tiling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingAudit {
    pub n: usize,
    pub verdict: TilingVerdict,
    pub u_size: usize,
    pub v_size: usize,
    pub u_projective: bool,
    pub v_projective: bool,
    pub u_rank: usize,
    pub v_rank: usize,
    pub u_period_count: usize,
    pub v_period_count: usize,
}

impl TilingAudit {
    pub fn full_rank(&self) -> bool {
        self.u_rank == self.n && self.v_rank == self.n
    }

    pub fn aperiodic(&self) -> bool {
        self.u_period_count == 1 && self.v_period_count == 1
    }

    /// Tiling, `U` projective, full-rank and aperiodic.
    pub fn semiprojective_ok(&self) -> bool {
        self.verdict.is_valid() && self.u_projective && self.full_rank() && self.aperiodic()
    }

    /// As [`Self::semiprojective_ok`] with `V` projective too.
    pub fn projective_ok(&self) -> bool {
        self.semiprojective_ok() && self.v_projective
    }
}

pub fn audit(t: &Tiling) -> Result<TilingAudit> {
    Ok(TilingAudit {
        n: t.space().n(),
        verdict: verify_tiling(t)?,
        u_size: t.u.len(),
        v_size: t.v.len(),
        u_projective: is_projective(&t.u),
        v_projective: is_projective(&t.v),
        u_rank: rank_affine(&t.u)?,
        v_rank: rank_affine(&t.v)?,
        u_period_count: periods(&t.u)?.len(),
        v_period_count: periods(&t.v)?.len(),
    })
}
