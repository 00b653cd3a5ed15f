use std::fmt;

use super::{FVec, Space, VSet};
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldSpec};

/// A dense matrix over F_q, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct FMatrix {
    field: FieldSpec,
    rows: usize,
    cols: usize,
    entries: Vec<Elem>,
}

impl FMatrix {
    pub fn new(field: &FieldSpec, rows: usize, cols: usize, entries: Vec<Elem>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: entries.len() });
        }
        if let Some(&e) = entries.iter().find(|&&e| !field.contains(e)) {
            return Err(Error::ElementOutOfRange { value: e as u64, q: field.q() });
        }
        Ok(FMatrix { field: field.clone(), rows, cols, entries })
    }

    pub fn zeros(field: &FieldSpec, rows: usize, cols: usize) -> Self {
        FMatrix { field: field.clone(), rows, cols, entries: vec![0; rows * cols] }
    }

    pub fn identity(field: &FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    /// Matrix whose columns are the given vectors, all of length `rows`.
    pub fn from_columns(field: &FieldSpec, rows: usize, columns: &[FVec]) -> Result<Self> {
        let cols = columns.len();
        let mut m = Self::zeros(field, rows, cols);
        for (j, c) in columns.iter().enumerate() {
            if c.field() != field {
                return Err(Error::SpaceMismatch);
            }
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: c.len() });
            }
            for (i, &x) in c.coords().iter().enumerate() {
                m.entries[i * cols + j] = x;
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Elem) {
        assert!(self.field.contains(value));
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> FVec {
        FVec::from_raw(&self.field, (0..self.rows).map(|i| self.get(i, j)).collect())
    }

    pub fn columns(&self) -> Vec<FVec> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn mat_vec(&self, x: &FVec) -> Result<FVec> {
        if x.field() != &self.field {
            return Err(Error::SpaceMismatch);
        }
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        let mut out = vec![0; self.rows];
        self.mat_vec_into(x.coords(), &mut out);
        Ok(FVec::from_raw(&self.field, out))
    }

    pub fn mat_vec_into(&self, x: &[Elem], out: &mut [Elem]) {
        let f = &self.field;
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.row(i).iter().zip(x).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
        }
    }

    /// Reduced row-echelon form and its pivot columns.
    pub fn rref(&self) -> (FMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = rref_in_place(&self.field, &mut m.entries, self.rows, self.cols, self.cols);
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Inverse of a square matrix, `None` when singular.
    pub fn inverse(&self) -> Option<FMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let w = 2 * n;
        let mut aug = vec![0; n * w];
        for i in 0..n {
            aug[i * w..i * w + n].copy_from_slice(self.row(i));
            aug[i * w + n + i] = 1;
        }
        let pivots = rref_in_place(&self.field, &mut aug, n, w, n);
        if pivots.len() != n {
            return None;
        }
        let entries = (0..n).flat_map(|i| aug[i * w + n..(i + 1) * w].to_vec()).collect();
        Some(FMatrix { field: self.field.clone(), rows: n, cols: n, entries })
    }
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FMatrix {}x{} over {:?}", self.rows, self.cols, self.field)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Gauss-Jordan elimination on a row-major buffer. Pivots are searched only among the first
/// `pivot_cols` columns, lowest index first, rows in input order. Returns the pivot columns.
fn rref_in_place(f: &FieldSpec, m: &mut [Elem], rows: usize, cols: usize, pivot_cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == rows {
            break;
        }
        let Some(pr) = (r..rows).find(|&i| m[i * cols + c] != 0) else {
            continue;
        };
        if pr != r {
            for j in 0..cols {
                m.swap(pr * cols + j, r * cols + j);
            }
        }
        let inv = f.inv(m[r * cols + c]).expect("pivot is nonzero");
        for j in 0..cols {
            m[r * cols + j] = f.mul(inv, m[r * cols + j]);
        }
        for i in 0..rows {
            let factor = m[i * cols + c];
            if i != r && factor != 0 {
                for j in 0..cols {
                    let t = f.mul(factor, m[r * cols + j]);
                    m[i * cols + j] = f.sub(m[i * cols + j], t);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// An incrementally maintained basis in reduced row-echelon form.
#[derive(Clone, Debug)]
pub struct Echelon {
    field: FieldSpec,
    n: usize,
    rows: Vec<Vec<Elem>>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(field: &FieldSpec, n: usize) -> Self {
        Echelon { field: field.clone(), n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn from_vectors<'a, I: IntoIterator<Item = &'a [Elem]>>(field: &FieldSpec, n: usize, vectors: I) -> Self {
        let mut e = Self::new(field, n);
        for v in vectors {
            if e.rank() == n {
                break;
            }
            e.insert(v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Residual of `v` after eliminating the basis pivots.
    pub fn reduce(&self, v: &[Elem]) -> Vec<Elem> {
        let f = &self.field;
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = r[p];
            if c != 0 {
                for (x, &y) in r.iter_mut().zip(row) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[Elem]) -> bool {
        self.reduce(v).iter().all(|&c| c == 0)
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: &[Elem]) -> bool {
        assert_eq!(v.len(), self.n);
        let f = self.field.clone();
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|&c| c != 0) else {
            return false;
        };
        let inv = f.inv(r[p]).expect("nonzero pivot");
        for x in r.iter_mut() {
            *x = f.mul(inv, *x);
        }
        for row in self.rows.iter_mut() {
            let c = row[p];
            if c != 0 {
                for (x, &y) in row.iter_mut().zip(&r) {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        let at = self.pivots.partition_point(|&q| q < p);
        self.pivots.insert(at, p);
        self.rows.insert(at, r);
        true
    }

    /// Coordinates of `v` with respect to the echelon basis, if `v` lies in the span.
    pub fn coordinates(&self, v: &[Elem]) -> Option<Vec<Elem>> {
        self.contains(v).then(|| self.pivots.iter().map(|&p| v[p]).collect())
    }

    pub fn basis(&self) -> Vec<FVec> {
        self.rows.iter().map(|r| FVec::from_raw(&self.field, r.clone())).collect()
    }
}

/// Dimension of the linear span of `set`.
pub fn rank_linear(set: &VSet) -> usize {
    Echelon::from_vectors(set.field(), set.n(), set.rows()).rank()
}

/// Dimension of the affine span of `set`, using the smallest-key member as origin.
pub fn rank_affine(set: &VSet) -> Result<usize> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(affine_echelon(set, 0).rank())
}

pub(crate) fn affine_echelon(set: &VSet, origin: usize) -> Echelon {
    let space = set.space();
    let base = set.row(origin).to_vec();
    let mut e = Echelon::new(set.field(), set.n());
    let mut diff = vec![0; set.n()];
    for r in set.rows() {
        if e.rank() == set.n() {
            break;
        }
        space.sub_into(r, &base, &mut diff);
        e.insert(&diff);
    }
    e
}

/// Solution set of a linear system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    Inconsistent,
    Affine(AffineSolution),
}

/// `particular + span(kernel)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: FVec,
    pub kernel: Vec<FVec>,
}

impl AffineSolution {
    /// Number of solutions, `q^(kernel dimension)`, if it fits.
    pub fn count(&self) -> Option<u128> {
        (self.particular.field().q() as u128).checked_pow(self.kernel.len() as u32)
    }

    /// Every solution, kernel coefficients enumerated with the first basis vector fastest.
    pub fn enumerate(&self) -> impl Iterator<Item = FVec> + '_ {
        let f = self.particular.field().clone();
        let space = Space::new(f.clone(), self.kernel.len());
        let total = space.size().expect("kernel too large to enumerate");
        (0..total).map(move |k| {
            let coeffs = space.decode(k);
            let mut x = self.particular.clone().into_coords();
            for (&c, b) in coeffs.coords().iter().zip(&self.kernel) {
                if c != 0 {
                    for (xi, &bi) in x.iter_mut().zip(b.coords()) {
                        *xi = f.add(*xi, f.mul(c, bi));
                    }
                }
            }
            FVec::from_raw(&f, x)
        })
    }
}

/// Solves `h * x = target` over F_q.
pub fn solve(h: &FMatrix, target: &FVec) -> Result<Solution> {
    if target.field() != h.field() {
        return Err(Error::SpaceMismatch);
    }
    if target.len() != h.rows() {
        return Err(Error::DimensionMismatch { expected: h.rows(), found: target.len() });
    }
    let f = h.field();
    let (rows, cols) = (h.rows(), h.cols());
    let w = cols + 1;
    let mut aug = vec![0; rows * w];
    for i in 0..rows {
        aug[i * w..i * w + cols].copy_from_slice(h.row(i));
        aug[i * w + cols] = target.get(i);
    }
    let pivots = rref_in_place(f, &mut aug, rows, w, cols);
    let rank = pivots.len();
    if (rank..rows).any(|i| aug[i * w + cols] != 0) {
        return Ok(Solution::Inconsistent);
    }
    let mut particular = vec![0; cols];
    for (i, &p) in pivots.iter().enumerate() {
        particular[p] = aug[i * w + cols];
    }
    let mut kernel = Vec::with_capacity(cols - rank);
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0; cols];
        v[free] = 1;
        for (i, &p) in pivots.iter().enumerate() {
            v[p] = f.neg(aug[i * w + free]);
        }
        kernel.push(FVec::from_raw(f, v));
    }
    Ok(Solution::Affine(AffineSolution { particular: FVec::from_raw(f, particular), kernel }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f(q: u64) -> FieldSpec {
        FieldSpec::from_order(q).unwrap()
    }

    #[test]
    fn rank_examples() {
        let s = Space::new(f(3), 3);
        assert_eq!(rank_linear(&VSet::empty(s.clone())), 0);
        let zero = VSet::from_rows(s.clone(), [[0, 0, 0]]).unwrap();
        assert_eq!(rank_linear(&zero), 0);
        assert_eq!(rank_affine(&zero).unwrap(), 0);
        let triple = VSet::from_rows(s.clone(), [[1, 0, 0], [0, 1, 0], [1, 1, 0]]).unwrap();
        assert_eq!(rank_linear(&triple), 2);
        assert_eq!(rank_affine(&VSet::empty(s)), Err(Error::EmptySet));
    }

    #[test]
    fn affine_rank_of_coset() {
        let s = Space::new(f(4), 4);
        let w = VSet::span(s.clone(), &[s.unit(0), s.unit(2)]).unwrap();
        let t = FVec::new(s.field(), vec![3, 1, 2, 1]).unwrap();
        let coset = w.translate(&t).unwrap();
        assert_eq!(rank_affine(&coset).unwrap(), 2);
        assert_eq!(rank_linear(&coset), 3);
        // independent of the chosen origin
        for i in 0..coset.len() {
            assert_eq!(affine_echelon(&coset, i).rank(), 2);
        }
    }

    #[test]
    fn solve_identity_and_zero() {
        let fl = f(5);
        let t = FVec::new(&fl, vec![1, 4, 2]).unwrap();
        let sol = solve(&FMatrix::identity(&fl, 3), &t).unwrap();
        assert_eq!(sol, Solution::Affine(AffineSolution { particular: t.clone(), kernel: vec![] }));
        let z = solve(&FMatrix::zeros(&fl, 3, 4), &FVec::zero(&fl, 3)).unwrap();
        let Solution::Affine(a) = z else { panic!() };
        assert_eq!(a.kernel.len(), 4);
        assert_eq!(solve(&FMatrix::zeros(&fl, 3, 4), &t).unwrap(), Solution::Inconsistent);
        assert!(solve(&FMatrix::zeros(&fl, 2, 4), &t).is_err());
    }

    #[test]
    fn mat_vec_basics() {
        let fl = f(3);
        let h = FMatrix::new(&fl, 2, 3, vec![1, 2, 0, 0, 1, 1]).unwrap();
        assert!(h.mat_vec(&FVec::zero(&fl, 3)).unwrap().is_zero());
        let x = FVec::new(&fl, vec![0, 2, 0]).unwrap();
        assert_eq!(h.mat_vec(&x).unwrap(), h.column(1).scale(2));
        assert!(h.mat_vec(&FVec::zero(&fl, 2)).is_err());
        let v = FVec::new(&fl, vec![2, 0, 1]).unwrap();
        assert_eq!(FMatrix::identity(&fl, 3).mat_vec(&v).unwrap(), v);
    }

    #[test]
    fn inverse_roundtrip() {
        let fl = f(7);
        let m = FMatrix::new(&fl, 3, 3, vec![1, 2, 3, 0, 1, 4, 5, 6, 0]).unwrap();
        let inv = m.inverse().unwrap();
        for j in 0..3 {
            let e = FVec::unit(&fl, 3, j);
            assert_eq!(m.mat_vec(&inv.mat_vec(&e).unwrap()).unwrap(), e);
        }
        assert!(FMatrix::zeros(&fl, 2, 2).inverse().is_none());
    }

    fn arb_system() -> impl Strategy<Value = (u64, usize, usize, Vec<u32>, Vec<u32>)> {
        (prop::sample::select(vec![2u64, 3, 4, 5, 9]), 1usize..5, 1usize..6).prop_flat_map(|(q, r, c)| {
            (
                Just(q),
                Just(r),
                Just(c),
                prop::collection::vec(0u32..q as u32, r * c),
                prop::collection::vec(0u32..q as u32, c),
            )
        })
    }

    proptest! {
        #[test]
        fn solutions_satisfy_system((q, r, c, entries, x0) in arb_system()) {
            let fl = f(q);
            let h = FMatrix::new(&fl, r, c, entries).unwrap();
            let x0 = FVec::new(&fl, x0).unwrap();
            let target = h.mat_vec(&x0).unwrap();
            let Solution::Affine(sol) = solve(&h, &target).unwrap() else {
                return Err(TestCaseError::fail("consistent system reported inconsistent"));
            };
            prop_assert_eq!(sol.kernel.len(), c - h.rank());
            let all: Vec<FVec> = sol.enumerate().collect();
            for x in &all {
                prop_assert_eq!(&h.mat_vec(x).unwrap(), &target);
            }
            // brute force count of solutions
            let space = Space::new(fl.clone(), c);
            let brute = space.vectors().unwrap().filter(|x| h.mat_vec(x).unwrap() == target).count();
            prop_assert_eq!(brute as u128, sol.count().unwrap());
            let distinct = VSet::from_vecs(space, all).unwrap();
            prop_assert_eq!(distinct.len(), brute);
        }

        #[test]
        fn affine_rank_bounds(q in prop::sample::select(vec![2u64, 3, 4]), rows in prop::collection::vec(0u64..256, 1..8), shift in 0u64..256) {
            let space = Space::new(f(q), 4);
            let size = space.size().unwrap();
            let set = VSet::from_keys(space.clone(), rows.into_iter().map(|k| k % size).collect()).unwrap();
            let lin = rank_linear(&set);
            let aff = rank_affine(&set).unwrap();
            prop_assert!(aff <= lin && lin <= aff + 1);
            let t = space.decode(shift % size);
            prop_assert_eq!(rank_affine(&set.translate(&t).unwrap()).unwrap(), aff);
        }
    }
}
