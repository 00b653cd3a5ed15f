use std::collections::HashSet;
use std::fmt;

use super::{key_order, FVec, Space};
use crate::error::{Error, Result};
use crate::gf::{Elem, FieldSpec};
use crate::keyset::BitSet;

/// Spaces up to this size index membership with a dense bit set.
const BITMAP_LIMIT: u64 = 1 << 24;

/// A deduplicated set of vectors of one space, stored in ascending key order.
///
/// Immutable once built, so it can be shared freely between worker threads.
#[derive(Clone)]
pub struct VSet {
    space: Space,
    data: Vec<Elem>,
    keys: Option<Vec<u64>>,
    index: MemberIndex,
}

#[derive(Clone)]
enum MemberIndex {
    Bitmap(BitSet),
    Keys(HashSet<u64>),
    Tuples(HashSet<Box<[Elem]>>),
}

impl VSet {
    pub fn empty(space: Space) -> Self {
        Self::assemble(space, Vec::new())
    }

    /// Builds a set from coordinate rows, dropping duplicates.
    pub fn from_rows<R, I>(space: Space, rows: I) -> Result<Self>
    where
        R: AsRef<[Elem]>,
        I: IntoIterator<Item = R>,
    {
        Ok(Self::build(space, rows)?.0)
    }

    /// Builds a set from rows that must be pairwise distinct.
    pub fn from_distinct_rows<R, I>(space: Space, rows: I) -> Result<Self>
    where
        R: AsRef<[Elem]>,
        I: IntoIterator<Item = R>,
    {
        let (set, dups) = Self::build(space, rows)?;
        if dups > 0 {
            return Err(Error::Construction(format!("{dups} repeated vectors")));
        }
        Ok(set)
    }

    pub fn from_vecs<I: IntoIterator<Item = FVec>>(space: Space, vecs: I) -> Result<Self> {
        let mut flat = Vec::new();
        for v in vecs {
            space.check_vec(&v)?;
            flat.extend_from_slice(v.coords());
        }
        Ok(Self::build_flat(space, flat).0)
    }

    pub fn from_keys(space: Space, mut keys: Vec<u64>) -> Result<Self> {
        let size = space.require_keyed()?;
        if let Some(&k) = keys.iter().find(|&&k| k >= size) {
            return Err(Error::ElementOutOfRange { value: k, q: space.q() });
        }
        keys.sort_unstable();
        keys.dedup();
        let n = space.n();
        if n == 0 {
            keys.clear();
        }
        let mut data = vec![0; keys.len() * n];
        for (chunk, &k) in data.chunks_exact_mut(n.max(1)).zip(&keys) {
            space.decode_into(k, chunk);
        }
        let index = keyed_index(&space, &keys);
        Ok(VSet { space, data, keys: Some(keys), index })
    }

    /// Every vector of the space.
    pub fn whole_space(space: Space) -> Result<Self> {
        let size = space.require_keyed()?;
        Self::from_keys(space, (0..size).collect())
    }

    /// The linear span of `generators`, enumerated explicitly.
    pub fn span(space: Space, generators: &[FVec]) -> Result<Self> {
        let mut members = vec![space.zero()];
        let f = space.field().clone();
        for g in generators {
            space.check_vec(g)?;
            let mut next = Vec::with_capacity(members.len() * f.q() as usize);
            for m in &members {
                for lambda in f.elements() {
                    next.push(m.add(&g.scale(lambda))?);
                }
            }
            next.sort();
            next.dedup();
            members = next;
        }
        Self::from_vecs(space, members)
    }

    fn build<R, I>(space: Space, rows: I) -> Result<(Self, usize)>
    where
        R: AsRef<[Elem]>,
        I: IntoIterator<Item = R>,
    {
        let mut flat = Vec::new();
        for r in rows {
            let r = r.as_ref();
            space.check_coords(r)?;
            flat.extend_from_slice(r);
        }
        Ok(Self::build_flat(space, flat))
    }

    fn build_flat(space: Space, flat: Vec<Elem>) -> (Self, usize) {
        let n = space.n();
        if n == 0 {
            return (Self::assemble(space, Vec::new()), 0);
        }
        let count = flat.len() / n;
        if let Some(radix) = space.radix() {
            let mut keyed: Vec<(u64, usize)> = flat
                .chunks_exact(n)
                .enumerate()
                .map(|(i, r)| (r.iter().zip(radix).map(|(&c, &w)| c as u64 * w).sum(), i))
                .collect();
            keyed.sort_unstable();
            keyed.dedup_by_key(|e| e.0);
            let dups = count - keyed.len();
            let mut data = Vec::with_capacity(keyed.len() * n);
            for &(_, i) in &keyed {
                data.extend_from_slice(&flat[i * n..(i + 1) * n]);
            }
            let keys: Vec<u64> = keyed.into_iter().map(|e| e.0).collect();
            let index = keyed_index(&space, &keys);
            (VSet { space, data, keys: Some(keys), index }, dups)
        } else {
            let mut rows: Vec<&[Elem]> = flat.chunks_exact(n).collect();
            rows.sort_by(|a, b| key_order(a, b));
            rows.dedup();
            let dups = count - rows.len();
            let data: Vec<Elem> = rows.concat();
            (Self::assemble(space, data), dups)
        }
    }

    /// Wraps rows that are already sorted and distinct.
    fn assemble(space: Space, data: Vec<Elem>) -> Self {
        let n = space.n();
        match space.radix() {
            Some(_) => {
                let keys: Vec<u64> = data.chunks_exact(n.max(1)).map(|r| space.key_unchecked(r)).collect();
                let index = keyed_index(&space, &keys);
                VSet { space, data, keys: Some(keys), index }
            }
            None => {
                let index =
                    MemberIndex::Tuples(data.chunks_exact(n.max(1)).map(|r| r.to_vec().into_boxed_slice()).collect());
                VSet { space, data, keys: None, index }
            }
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn field(&self) -> &FieldSpec {
        self.space.field()
    }

    pub fn n(&self) -> usize {
        self.space.n()
    }

    pub fn len(&self) -> usize {
        match &self.keys {
            Some(k) => k.len(),
            None => self.data.len() / self.n().max(1),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sorted keys, present in keyed spaces.
    pub fn keys(&self) -> Option<&[u64]> {
        self.keys.as_deref()
    }

    /// Rows in ascending key order.
    pub fn rows(&self) -> std::slice::ChunksExact<'_, Elem> {
        self.data.chunks_exact(self.n().max(1))
    }

    pub fn row(&self, i: usize) -> &[Elem] {
        let n = self.n();
        &self.data[i * n..(i + 1) * n]
    }

    pub fn get(&self, i: usize) -> FVec {
        FVec::from_raw(self.field(), self.row(i).to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = FVec> + '_ {
        (0..self.len()).map(|i| self.get(i))
    }

    pub fn to_vecs(&self) -> Vec<FVec> {
        self.iter().collect()
    }

    /// Raw flat storage, `len() * n()` coordinates.
    pub fn data(&self) -> &[Elem] {
        &self.data
    }

    pub fn contains(&self, coords: &[Elem]) -> bool {
        match &self.index {
            MemberIndex::Bitmap(b) => b.contains(self.space.key_unchecked(coords)),
            MemberIndex::Keys(h) => h.contains(&self.space.key_unchecked(coords)),
            MemberIndex::Tuples(h) => h.contains(coords),
        }
    }

    pub fn contains_vec(&self, v: &FVec) -> bool {
        v.field() == self.field() && v.len() == self.n() && self.contains(v.coords())
    }

    #[inline]
    pub fn contains_key(&self, key: u64) -> bool {
        match &self.index {
            MemberIndex::Bitmap(b) => b.contains(key),
            MemberIndex::Keys(h) => h.contains(&key),
            MemberIndex::Tuples(_) => false,
        }
    }

    pub fn contains_zero(&self) -> bool {
        self.contains(&vec![0; self.n()])
    }

    pub fn same_space(&self, other: &VSet) -> Result<()> {
        if self.field() != other.field() {
            return Err(Error::SpaceMismatch);
        }
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: other.n() });
        }
        Ok(())
    }

    pub fn translate(&self, t: &FVec) -> Result<VSet> {
        self.space.check_vec(t)?;
        let mut buf = vec![0; self.n()];
        let mut flat = Vec::with_capacity(self.data.len());
        for r in self.rows() {
            self.space.add_into(r, t.coords(), &mut buf);
            flat.extend_from_slice(&buf);
        }
        Ok(Self::build_flat(self.space.clone(), flat).0)
    }

    pub fn union(&self, other: &VSet) -> Result<VSet> {
        self.same_space(other)?;
        let mut flat = self.data.clone();
        flat.extend_from_slice(&other.data);
        Ok(Self::build_flat(self.space.clone(), flat).0)
    }

    pub fn intersection(&self, other: &VSet) -> Result<VSet> {
        self.same_space(other)?;
        VSet::from_rows(self.space.clone(), self.rows().filter(|r| other.contains(r)))
    }

    pub fn difference(&self, other: &VSet) -> Result<VSet> {
        self.same_space(other)?;
        VSet::from_rows(self.space.clone(), self.rows().filter(|r| !other.contains(r)))
    }

    pub fn is_disjoint(&self, other: &VSet) -> bool {
        self.rows().all(|r| !other.contains(r))
    }

    /// Setwise sum `{a + b}`; fails if two different pairs give the same vector.
    pub fn direct_sum(&self, other: &VSet) -> Result<VSet> {
        self.same_space(other)?;
        let n = self.n();
        let mut buf = vec![0; n];
        let mut flat = Vec::with_capacity(self.len() * other.len() * n);
        for a in self.rows() {
            for b in other.rows() {
                self.space.add_into(a, b, &mut buf);
                flat.extend_from_slice(&buf);
            }
        }
        let (set, dups) = Self::build_flat(self.space.clone(), flat);
        if dups > 0 {
            return Err(Error::Construction(format!("setwise sum is not direct ({dups} coincidences)")));
        }
        Ok(set)
    }

    /// Smallest-key member.
    pub fn first(&self) -> Option<FVec> {
        (!self.is_empty()).then(|| self.get(0))
    }
}

fn keyed_index(space: &Space, keys: &[u64]) -> MemberIndex {
    match space.size() {
        Some(size) if size <= BITMAP_LIMIT => {
            let mut b = BitSet::new(size);
            for &k in keys {
                b.insert(k);
            }
            MemberIndex::Bitmap(b)
        }
        _ => MemberIndex::Keys(keys.iter().copied().collect()),
    }
}

impl PartialEq for VSet {
    fn eq(&self, other: &Self) -> bool {
        self.space == other.space && self.data == other.data && self.len() == other.len()
    }
}

impl Eq for VSet {}

impl fmt::Debug for VSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VSet[{:?}; {}]", self.space, self.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(q: u64, n: usize) -> Space {
        Space::new(FieldSpec::from_order(q).unwrap(), n)
    }

    #[test]
    fn dedups_and_sorts() {
        let s = space(3, 2);
        let set = VSet::from_rows(s.clone(), [[1, 1], [0, 2], [1, 1], [2, 0]]).unwrap();
        assert_eq!(set.len(), 3);
        assert_eq!(set.keys().unwrap(), &[2, 4, 6]);
        assert!(set.contains(&[0, 2]));
        assert!(!set.contains(&[0, 1]));
        assert!(VSet::from_distinct_rows(s, [[1, 1], [1, 1]]).is_err());
    }

    #[test]
    fn tuple_fallback_matches_keyed_order() {
        let f = FieldSpec::new(3, 1).unwrap();
        let big = Space::new(f.clone(), 41);
        assert!(!big.is_keyed());
        let mut a = vec![0; 41];
        let mut b = vec![0; 41];
        a[0] = 2;
        b[40] = 1;
        let set = VSet::from_rows(big, [b.clone(), a.clone(), b.clone()]).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.row(0), a.as_slice());
        assert!(set.contains(&b));
        assert!(set.keys().is_none());
    }

    #[test]
    fn large_keyed_space_uses_hash_index() {
        let s = space(3, 20);
        let mut v = vec![0; 20];
        v[19] = 2;
        let set = VSet::from_rows(s, [v.clone()]).unwrap();
        assert!(set.contains(&v));
        assert!(matches!(set.index, MemberIndex::Keys(_)));
    }

    #[test]
    fn span_and_direct_sum() {
        let s = space(3, 3);
        let w = VSet::span(s.clone(), &[s.unit(0)]).unwrap();
        let w2 = VSet::span(s.clone(), &[s.unit(1), s.unit(2)]).unwrap();
        assert_eq!(w.len(), 3);
        let all = w.direct_sum(&w2).unwrap();
        assert_eq!(all, VSet::whole_space(s.clone()).unwrap());
        assert!(w.direct_sum(&w).is_err());
        assert!(w.contains_zero());
    }

    #[test]
    fn rejects_bad_rows() {
        let s = space(3, 2);
        assert!(VSet::from_rows(s.clone(), [[1, 3]]).is_err());
        assert!(VSet::from_rows(s, [vec![1, 1, 1]]).is_err());
    }
}
