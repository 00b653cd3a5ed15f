//! Hamming balls, 1-perfect codes, and codes obtained from semiprojective tilings.
//!
//! For a tiling `(U, V)` of F_q^n with `U` projective, let `H` be the matrix whose columns are
//! normalized representatives of the 1-dimensional subspaces in `U`. Then
//! `C = { c in F_q^N : Hc in V }` is a 1-perfect code of length `N = (|U| - 1) / (q - 1)`.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldSpec};
use crate::keyset::AtomicBitSet;
use crate::linalg::{rank_affine, solve, Echelon, FMatrix, FVec, Solution, Space, VSet};
use crate::tiling::{is_projective, kernel_of_periods, periods, verify_tiling, Tiling, TilingVerdict};

/// Default bound on `q^N` for explicit enumeration of F_q^N.
pub const DEFAULT_ENUM_CEILING: u64 = 1 << 24;

/// An explicit code with a free-form provenance note.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Code {
    words: VSet,
    meta: String,
}

impl Code {
    pub fn new(words: VSet, meta: impl Into<String>) -> Self {
        Code { words, meta: meta.into() }
    }

    pub fn words(&self) -> &VSet {
        &self.words
    }

    pub fn meta(&self) -> &str {
        &self.meta
    }

    /// Code length N.
    pub fn length(&self) -> usize {
        self.words.n()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn field(&self) -> &FieldSpec {
        self.words.field()
    }

    pub fn into_words(self) -> VSet {
        self.words
    }
}

/// `sum_{i<=r} C(n, i) (q - 1)^i`.
pub fn ball_size(q: u32, n: usize, r: usize) -> u128 {
    let mut total = 0u128;
    let mut binom = 1u128;
    for i in 0..=r.min(n) {
        total += binom * (q as u128 - 1).pow(i as u32);
        binom = binom * (n - i) as u128 / (i + 1) as u128;
    }
    total
}

/// The radius-`r` Hamming ball around `center`.
#[derive(Clone, Debug)]
pub struct Ball {
    pub center: FVec,
    pub radius: usize,
}

impl Ball {
    pub fn new(center: FVec, radius: usize) -> Self {
        Ball { center, radius }
    }
}

/// Nonzero patterns of weight at most `r`, as sparse `(position, value)` lists; the empty
/// pattern comes first.
fn sparse_offsets(field: &FieldSpec, n: usize, r: usize) -> Vec<Vec<(usize, Elem)>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<Vec<(usize, Elem)>> = vec![Vec::new()];
    for _ in 0..r.min(n) {
        let mut next = Vec::new();
        for pat in &frontier {
            let start = pat.last().map_or(0, |&(p, _)| p + 1);
            for pos in start..n {
                for val in field.nonzero() {
                    let mut p = pat.clone();
                    p.push((pos, val));
                    next.push(p);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

pub fn ball_members(ball: &Ball) -> Result<VSet> {
    let field = ball.center.field().clone();
    let n = ball.center.len();
    if ball.radius > n {
        return Err(Error::DimensionMismatch { expected: n, found: ball.radius });
    }
    let space = Space::new(field.clone(), n);
    let rows = sparse_offsets(&field, n, ball.radius).into_iter().map(|pat| {
        let mut v = ball.center.coords().to_vec();
        for (p, val) in pat {
            v[p] = field.add(v[p], val);
        }
        v
    });
    VSet::from_rows(space, rows)
}

/// Normalized representatives of the points of a projective set and the matrix having them
/// as columns, both in ascending key order.
#[derive(Clone, Debug)]
pub struct Representatives {
    pub columns: Vec<FVec>,
    pub matrix: FMatrix,
}

impl Representatives {
    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

pub fn representatives(u: &VSet) -> Result<Representatives> {
    if !is_projective(u) {
        return Err(Error::NotProjective);
    }
    let mut columns: Vec<FVec> = u.iter().filter(FVec::is_normalized).collect();
    columns.sort();
    if columns.is_empty() {
        return Err(Error::EmptySet);
    }
    let q = u.field().q() as usize;
    if columns.len() * (q - 1) != u.len() - 1 {
        return Err(Error::Construction("representative count does not match |U| - 1".into()));
    }
    let matrix = FMatrix::from_columns(u.field(), u.n(), &columns)?;
    Ok(Representatives { columns, matrix })
}

fn require_code_inputs(t: &Tiling, ceiling: u64) -> Result<(Representatives, Space)> {
    let reps = representatives(t.u())?;
    match verify_tiling(t)? {
        TilingVerdict::Valid => {}
        other => return Err(Error::NotATiling(format!("{other:?}"))),
    }
    let field = t.space().field().clone();
    let n = reps.len();
    let space = Space::new(field.clone(), n);
    match space.size() {
        Some(size) if size <= ceiling => Ok((reps, space)),
        _ => Err(Error::CeilingExceeded { q: field.q(), n, ceiling }),
    }
}

/// `{ c in F_q^N : Hc in V }`, by enumerating F_q^N in key order.
///
/// The enumeration is split into blocks of consecutive keys that run in parallel; within a
/// block `Hc` is updated incrementally as the low coordinates advance.
pub fn code_from_tiling(t: &Tiling, ceiling: u64) -> Result<Code> {
    let (reps, space) = require_code_inputs(t, ceiling)?;
    let field = space.field().clone();
    let (len, n) = (reps.len(), t.space().n());
    let q = field.q() as usize;
    let h = &reps.matrix;

    // step[j][e]: change of Hc when coordinate j goes from e to e + 1 (mod q) in encoding order
    let step: Vec<Vec<Vec<Elem>>> = (0..len)
        .map(|j| {
            let col = h.column(j);
            (0..q)
                .map(|e| {
                    let next = ((e + 1) % q) as Elem;
                    col.scale(field.sub(next, e as Elem)).into_coords()
                })
                .collect()
        })
        .collect();

    let size = space.size().unwrap();
    let low = (0..=len).find(|&b| (q as u64).pow(b as u32) >= 4096).unwrap_or(len);
    let block = (q as u64).pow(low as u32);
    let blocks = size.div_ceil(block);
    let target = t.v();
    let per_block: Vec<Vec<u64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * block;
            let mut c = space.decode(start).into_coords();
            let mut s = vec![0; n];
            h.mat_vec_into(&c, &mut s);
            let mut hits = Vec::new();
            for k in start..(start + block).min(size) {
                if target.contains(&s) {
                    hits.push(k);
                }
                // advance the odometer on the low coordinates
                for j in 0..low {
                    let e = c[j] as usize;
                    for (si, &d) in s.iter_mut().zip(&step[j][e]) {
                        *si = field.add(*si, d);
                    }
                    c[j] = ((e + 1) % q) as Elem;
                    if c[j] != 0 {
                        break;
                    }
                }
            }
            hits
        })
        .collect();
    let keys: Vec<u64> = per_block.into_iter().flatten().collect();
    let words = VSet::from_keys(space, keys)?;
    Ok(Code::new(words, format!("tiling code, N = {len}")))
}

/// The same code assembled from the solution sets of `Hc = v` for `v` in `V ∩ <U>`.
pub fn code_from_tiling_by_solving(t: &Tiling, ceiling: u64) -> Result<Code> {
    let (reps, space) = require_code_inputs(t, ceiling)?;
    let span = Echelon::from_vectors(t.space().field(), t.space().n(), t.u().rows());
    let mut keys = Vec::new();
    for v in t.v().iter().filter(|v| span.contains(v.coords())) {
        if let Solution::Affine(sol) = solve(&reps.matrix, &v)? {
            keys.extend(sol.enumerate().map(|c| space.key_unchecked(c.coords())));
        }
    }
    let words = VSet::from_keys(space, keys)?;
    Ok(Code::new(words, format!("tiling code, N = {}", reps.len())))
}

/// Result of the ball-packing check for an r-perfect code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PerfectVerdict {
    pub radius: usize,
    pub code_size: usize,
    pub ball_size: u128,
    pub space_size: u128,
    /// Distinct vectors within distance `radius` of some codeword.
    pub covered: u64,
    pub uncovered: u64,
    /// Smallest-key vector lying in two balls.
    pub double_covered: Option<FVec>,
    /// Smallest-key vector lying in no ball.
    pub first_uncovered: Option<FVec>,
}

impl PerfectVerdict {
    pub fn is_valid(&self) -> bool {
        self.double_covered.is_none()
            && self.uncovered == 0
            && self.code_size as u128 * self.ball_size == self.space_size
    }
}

/// Marks every ball member of every codeword and reports overlaps and gaps.
pub fn verify_perfect(code: &Code, radius: usize, ceiling: u64) -> Result<PerfectVerdict> {
    if code.is_empty() {
        return Err(Error::EmptySet);
    }
    let words = code.words();
    let space = words.space();
    let (field, n) = (space.field(), space.n());
    if radius > n {
        return Err(Error::DimensionMismatch { expected: n, found: radius });
    }
    let size = match space.size() {
        Some(s) if s <= ceiling => s,
        _ => return Err(Error::CeilingExceeded { q: field.q(), n, ceiling }),
    };
    let radix = space.radix().unwrap();
    let offsets = sparse_offsets(field, n, radius);
    let marks = AtomicBitSet::new(size);
    let smallest_repeat = AtomicU64::new(u64::MAX);
    let keys = words.keys().unwrap();
    keys.par_iter().enumerate().with_min_len(256).for_each(|(i, &key)| {
        let c = words.row(i);
        for pat in &offsets {
            let mut k = key;
            for &(p, val) in pat {
                k = k - c[p] as u64 * radix[p] + field.add(c[p], val) as u64 * radix[p];
            }
            if marks.insert(k) {
                smallest_repeat.fetch_min(k, Ordering::Relaxed);
            }
        }
    });
    let marks = marks.into_bitset();
    let covered = marks.count_ones();
    let repeat = smallest_repeat.into_inner();
    Ok(PerfectVerdict {
        radius,
        code_size: code.len(),
        ball_size: ball_size(field.q(), n, radius),
        space_size: size as u128,
        covered,
        uncovered: size - covered,
        double_covered: (repeat != u64::MAX).then(|| space.decode(repeat)),
        first_uncovered: marks.first_clear().map(|k| space.decode(k)),
    })
}

/// Rank and kernel invariants of a code, each computed directly from the codewords.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeStats {
    pub length: usize,
    pub size: usize,
    pub rank: usize,
    pub full_rank: bool,
    pub kernel_dim: usize,
    pub period_count: usize,
}

pub fn code_stats(code: &Code) -> Result<CodeStats> {
    let words = code.words();
    let rank = rank_affine(words)?;
    let per = periods(words)?;
    let ker = kernel_of_periods(&per)?;
    Ok(CodeStats {
        length: code.length(),
        size: code.len(),
        rank,
        full_rank: rank == code.length(),
        kernel_dim: ker.dim,
        period_count: per.len(),
    })
}

/// Rank, kernel dimension and period count of a tiling code as predicted from the tiling:
/// `rank(C) = rank(V_U) + N - r`, `dim ker(C) = dim ker(V_U) + N - r` and
/// `|per(C)| = |per(V_U)| q^(N - r)`, where `V_U = V ∩ <U>` and `r = rank(U)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaCheck {
    pub columns: usize,
    pub u_rank: usize,
    pub vu_size: usize,
    pub vu_rank: usize,
    pub vu_kernel_dim: usize,
    pub vu_period_count: usize,
    pub predicted_rank: usize,
    pub predicted_kernel_dim: usize,
    pub predicted_period_count: u128,
    pub rank_ok: bool,
    pub kernel_ok: bool,
    pub periods_ok: bool,
}

impl FormulaCheck {
    pub fn consistent(&self) -> bool {
        self.rank_ok && self.kernel_ok && self.periods_ok
    }
}

pub fn formula_check(t: &Tiling, stats: &CodeStats) -> Result<FormulaCheck> {
    let reps = representatives(t.u())?;
    let space = t.space();
    let span = Echelon::from_vectors(space.field(), space.n(), t.u().rows());
    let vu = VSet::from_rows(space.clone(), t.v().rows().filter(|r| span.contains(r)))?;
    let u_rank = rank_affine(t.u())?;
    let vu_rank = rank_affine(&vu)?;
    let vu_per = periods(&vu)?;
    let vu_kernel_dim = kernel_of_periods(&vu_per)?.dim;
    let columns = reps.len();
    let extra = columns - u_rank;
    let predicted_rank = vu_rank + extra;
    let predicted_kernel_dim = vu_kernel_dim + extra;
    let predicted_period_count = vu_per.len() as u128 * (space.q() as u128).pow(extra as u32);
    Ok(FormulaCheck {
        columns,
        u_rank,
        vu_size: vu.len(),
        vu_rank,
        vu_kernel_dim,
        vu_period_count: vu_per.len(),
        predicted_rank,
        predicted_kernel_dim,
        predicted_period_count,
        rank_ok: predicted_rank == stats.rank,
        kernel_ok: predicted_kernel_dim == stats.kernel_dim,
        periods_ok: predicted_period_count == stats.period_count as u128,
    })
}
