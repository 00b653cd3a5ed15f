//! Vectors over F_q^n, vector sets, matrices and Gaussian elimination.
//!
//! Every vector has a canonical integer key `key(v) = sum_i v[i] * q^i` (coordinate 0 least
//! significant). When `q^n <= 2^63` the key is a `u64` and serves as the packed in-memory
//! representation for set membership and enumeration; larger spaces fall back to hashing
//! coordinate tuples.

mod matrix;
mod vset;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

pub use matrix::{rank_affine, rank_linear, solve, AffineSolution, Echelon, FMatrix, Solution};
pub use vset::VSet;

use crate::error::{Error, Result};
use crate::gf::{Elem, FieldSpec};

/// Largest space size for which keys are used.
pub const KEYED_LIMIT: u64 = 1 << 63;

/// The ambient space F_q^n.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Space {
    field: FieldSpec,
    n: usize,
    radix: Option<Arc<[u64]>>,
}

impl Space {
    pub fn new(field: FieldSpec, n: usize) -> Self {
        let q = field.q() as u64;
        let mut radix = Vec::with_capacity(n);
        let mut acc = Some(1u64);
        for _ in 0..n {
            match acc {
                Some(a) => {
                    radix.push(a);
                    acc = a.checked_mul(q);
                }
                None => break,
            }
        }
        let keyed = radix.len() == n && matches!(acc, Some(total) if total <= KEYED_LIMIT);
        Space { field, n, radix: keyed.then(|| radix.into()) }
    }

    #[inline]
    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u32 {
        self.field.q()
    }

    pub fn is_keyed(&self) -> bool {
        self.radix.is_some()
    }

    /// `q^n`, when the space is keyed.
    pub fn size(&self) -> Option<u64> {
        self.radix.as_ref().map(|r| match r.last() {
            Some(&top) => top * self.field.q() as u64,
            None => 1,
        })
    }

    /// `q^n` as an exact wide integer, `None` if it does not fit in a u128.
    pub fn size_u128(&self) -> Option<u128> {
        (self.field.q() as u128).checked_pow(self.n as u32)
    }

    pub fn radix(&self) -> Option<&[u64]> {
        self.radix.as_deref()
    }

    pub fn key(&self, coords: &[Elem]) -> Option<u64> {
        self.radix.as_ref().map(|r| key_with(r, coords))
    }

    /// Key of a vector in a space known to be keyed.
    #[inline]
    pub fn key_unchecked(&self, coords: &[Elem]) -> u64 {
        key_with(self.radix.as_ref().expect("space is not keyed"), coords)
    }

    pub fn decode_into(&self, mut key: u64, out: &mut [Elem]) {
        let q = self.field.q() as u64;
        for c in out.iter_mut() {
            *c = (key % q) as Elem;
            key /= q;
        }
    }

    pub fn decode(&self, key: u64) -> FVec {
        let mut coords = vec![0; self.n];
        self.decode_into(key, &mut coords);
        FVec { field: self.field.clone(), coords }
    }

    pub fn zero(&self) -> FVec {
        FVec::zero(&self.field, self.n)
    }

    pub fn unit(&self, i: usize) -> FVec {
        FVec::unit(&self.field, self.n, i)
    }

    pub fn require_keyed(&self) -> Result<u64> {
        self.size().ok_or(Error::SpaceTooLarge { q: self.q(), n: self.n })
    }

    pub fn check_coords(&self, coords: &[Elem]) -> Result<()> {
        if coords.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: coords.len() });
        }
        match coords.iter().find(|&&c| !self.field.contains(c)) {
            Some(&c) => Err(Error::ElementOutOfRange { value: c as u64, q: self.q() }),
            None => Ok(()),
        }
    }

    pub fn check_vec(&self, v: &FVec) -> Result<()> {
        if v.field != self.field {
            return Err(Error::SpaceMismatch);
        }
        self.check_coords(&v.coords)
    }

    #[inline]
    pub fn add_into(&self, a: &[Elem], b: &[Elem], out: &mut [Elem]) {
        for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
            *o = self.field.add(x, y);
        }
    }

    #[inline]
    pub fn sub_into(&self, a: &[Elem], b: &[Elem], out: &mut [Elem]) {
        for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
            *o = self.field.sub(x, y);
        }
    }

    #[inline]
    pub fn scale_into(&self, lambda: Elem, a: &[Elem], out: &mut [Elem]) {
        for (o, &x) in out.iter_mut().zip(a) {
            *o = self.field.mul(lambda, x);
        }
    }

    /// All vectors of the space in key order.
    pub fn vectors(&self) -> Result<impl Iterator<Item = FVec> + '_> {
        let size = self.require_keyed()?;
        Ok((0..size).map(move |k| self.decode(k)))
    }

    /// All normalized nonzero vectors (one per 1-dimensional subspace), in key order.
    pub fn projective_points(&self) -> Result<Vec<FVec>> {
        let mut pts: Vec<FVec> = self.vectors()?.filter(FVec::is_normalized).collect();
        pts.sort();
        Ok(pts)
    }
}

#[inline]
fn key_with(radix: &[u64], coords: &[Elem]) -> u64 {
    coords.iter().zip(radix).map(|(&c, &r)| c as u64 * r).sum()
}

impl fmt::Debug for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}^{}", self.field, self.n)
    }
}

/// Compares coordinate tuples in key order (highest coordinate most significant).
pub fn key_order(a: &[Elem], b: &[Elem]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

/// A vector of F_q^n.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FVec {
    field: FieldSpec,
    coords: Vec<Elem>,
}

impl FVec {
    pub fn new(field: &FieldSpec, coords: Vec<Elem>) -> Result<Self> {
        if let Some(&c) = coords.iter().find(|&&c| !field.contains(c)) {
            return Err(Error::ElementOutOfRange { value: c as u64, q: field.q() });
        }
        Ok(FVec { field: field.clone(), coords })
    }

    pub(crate) fn from_raw(field: &FieldSpec, coords: Vec<Elem>) -> Self {
        debug_assert!(coords.iter().all(|&c| field.contains(c)));
        FVec { field: field.clone(), coords }
    }

    pub fn zero(field: &FieldSpec, n: usize) -> Self {
        FVec { field: field.clone(), coords: vec![0; n] }
    }

    pub fn unit(field: &FieldSpec, n: usize, i: usize) -> Self {
        let mut v = Self::zero(field, n);
        v.coords[i] = 1;
        v
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Elem> {
        self.coords
    }

    pub fn get(&self, i: usize) -> Elem {
        self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn weight(&self) -> usize {
        self.coords.iter().filter(|&&c| c != 0).count()
    }

    pub fn key(&self) -> Option<u64> {
        Space::new(self.field.clone(), self.len()).key(&self.coords)
    }

    fn check_pair(&self, other: &FVec) -> Result<()> {
        if self.field != other.field {
            return Err(Error::SpaceMismatch);
        }
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), found: other.len() });
        }
        Ok(())
    }

    pub fn add(&self, other: &FVec) -> Result<FVec> {
        self.check_pair(other)?;
        let f = &self.field;
        let coords = self.coords.iter().zip(&other.coords).map(|(&a, &b)| f.add(a, b)).collect();
        Ok(FVec { field: f.clone(), coords })
    }

    pub fn sub(&self, other: &FVec) -> Result<FVec> {
        self.check_pair(other)?;
        let f = &self.field;
        let coords = self.coords.iter().zip(&other.coords).map(|(&a, &b)| f.sub(a, b)).collect();
        Ok(FVec { field: f.clone(), coords })
    }

    pub fn scale(&self, lambda: Elem) -> FVec {
        let f = &self.field;
        FVec { field: f.clone(), coords: self.coords.iter().map(|&a| f.mul(lambda, a)).collect() }
    }

    pub fn neg(&self) -> FVec {
        let f = &self.field;
        FVec { field: f.clone(), coords: self.coords.iter().map(|&a| f.neg(a)).collect() }
    }

    pub fn lead_index(&self) -> Option<usize> {
        self.coords.iter().position(|&c| c != 0)
    }

    /// The multiple of this vector whose lowest-index nonzero coordinate is 1.
    pub fn normalized(&self) -> Option<FVec> {
        let lead = self.coords[self.lead_index()?];
        Some(self.scale(self.field.inv(lead).expect("nonzero lead")))
    }

    pub fn is_normalized(&self) -> bool {
        self.lead_index().is_some_and(|i| self.coords[i] == 1)
    }

    pub fn dot(&self, other: &FVec) -> Result<Elem> {
        self.check_pair(other)?;
        let f = &self.field;
        Ok(self.coords.iter().zip(&other.coords).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
    }
}

impl PartialOrd for FVec {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Key order: the highest coordinate is most significant.
impl Ord for FVec {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| key_order(&self.coords, &other.coords))
    }
}

impl fmt::Debug for FVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

impl fmt::Display for FVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn f3() -> FieldSpec {
        FieldSpec::new(3, 1).unwrap()
    }

    #[test]
    fn keyed_mode_threshold() {
        assert_eq!(Space::new(f3(), 13).size(), Some(1_594_323));
        assert!(Space::new(f3(), 39).is_keyed());
        assert!(!Space::new(f3(), 40).is_keyed());
        let f2 = FieldSpec::new(2, 1).unwrap();
        assert!(Space::new(f2.clone(), 63).is_keyed());
        assert!(!Space::new(f2, 64).is_keyed());
        assert_eq!(Space::new(f3(), 0).size(), Some(1));
    }

    #[test]
    fn key_little_endian() {
        let s = Space::new(f3(), 3);
        assert_eq!(s.key(&[1, 0, 0]), Some(1));
        assert_eq!(s.key(&[0, 1, 0]), Some(3));
        assert_eq!(s.key(&[2, 2, 2]), Some(26));
        assert_eq!(s.decode(5).coords(), &[2, 1, 0]);
    }

    #[test]
    fn normalization() {
        let f = f3();
        let v = FVec::new(&f, vec![0, 2, 1]).unwrap();
        assert_eq!(v.normalized().unwrap().coords(), &[0, 1, 2]);
        assert!(FVec::zero(&f, 3).normalized().is_none());
        assert_eq!(Space::new(f, 3).projective_points().unwrap().len(), 13);
    }

    #[test]
    fn mismatched_vectors() {
        let f = f3();
        let a = FVec::zero(&f, 3);
        let b = FVec::zero(&f, 4);
        assert!(matches!(a.add(&b), Err(Error::DimensionMismatch { .. })));
        let c = FVec::zero(&FieldSpec::new(5, 1).unwrap(), 3);
        assert_eq!(a.add(&c), Err(Error::SpaceMismatch));
        assert!(FVec::new(&f, vec![3]).is_err());
    }

    proptest! {
        #[test]
        fn key_is_a_bijection(q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 9]), n in 1usize..8, seed in any::<u64>()) {
            let s = Space::new(FieldSpec::from_order(q).unwrap(), n);
            let key = seed % s.size().unwrap();
            let v = s.decode(key);
            prop_assert_eq!(s.key(v.coords()), Some(key));
            prop_assert_eq!(v.key(), Some(key));
        }
    }
}
