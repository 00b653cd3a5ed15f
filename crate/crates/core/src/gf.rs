//! Finite fields F_q, q = p^k.
//!
//! Elements are plain integers in `[0, q)`. An element `e = a_0 + a_1 p + ... + a_{k-1} p^{k-1}`
//! stands for the polynomial `a_0 + a_1 x + ... + a_{k-1} x^{k-1}` reduced modulo the field's
//! monic irreducible modulus, so `0` is the zero element, `1` is the identity and the
//! encodings `0..p` are the prime subfield. For k = 1 arithmetic is plain arithmetic mod p.
//!
//! Fields with q <= 256 carry full operation tables built at construction time.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use crate::error::{Error, Result};

/// A field element in its canonical integer encoding.
pub type Elem = u32;

/// Default upper bound on the field order accepted by [`FieldSpec::new`].
pub const DEFAULT_FIELD_CEILING: u64 = 1 << 16;

/// Fields up to this order get precomputed tables.
const TABLE_LIMIT: u32 = 256;

/// Hard limit on the order so that products of two elements fit in a u64.
const HARD_LIMIT: u64 = 1 << 31;

/// Description of a finite field together with its arithmetic.
///
/// Cloning is cheap: the tables are shared.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    modulus: Option<Vec<u32>>,
    tables: Option<Tables>,
}

struct Tables {
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `q` as `p^k` with `p` prime, if possible.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q && !q.is_multiple_of(p) {
        p += 1;
    }
    if !q.is_multiple_of(p) {
        p = q;
    }
    let mut rest = q;
    let mut k = 0;
    while rest.is_multiple_of(p) {
        rest /= p;
        k += 1;
    }
    (rest == 1).then_some((p, k))
}

impl FieldSpec {
    /// Builds F_{p^k}. For k > 1 the modulus is the lexicographically smallest monic
    /// irreducible polynomial of degree k, comparing `(a_0, ..., a_{k-1})` ascending.
    pub fn new(p: u64, k: u32) -> Result<Self> {
        Self::with_ceiling(p, k, DEFAULT_FIELD_CEILING)
    }

    pub fn with_ceiling(p: u64, k: u32, ceiling: u64) -> Result<Self> {
        let q = check_order(p, k, ceiling)?;
        let p = p as u32;
        if k == 1 {
            return Ok(Self::assemble(p, 1, q, None));
        }
        let modulus = smallest_irreducible(p, k).ok_or(Error::NoIrreducible { p, k })?;
        Ok(Self::assemble(p, k, q, Some(modulus)))
    }

    /// Builds F_{p^k} from an explicit modulus given low degree first, leading 1 included.
    pub fn with_modulus(p: u64, modulus: &[u32]) -> Result<Self> {
        if modulus.len() < 2 {
            return Err(Error::BadModulus("degree must be at least 1".into()));
        }
        let k = (modulus.len() - 1) as u32;
        let q = check_order(p, k, DEFAULT_FIELD_CEILING)?;
        let p = p as u32;
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::BadModulus(format!("coefficient out of range for p = {p}")));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::BadModulus("modulus must be monic".into()));
        }
        if k == 1 {
            return Ok(Self::assemble(p, 1, q, None));
        }
        if !poly::is_irreducible(modulus, p) {
            return Err(Error::BadModulus(format!("{modulus:?} is reducible over F_{p}")));
        }
        Ok(Self::assemble(p, k, q, Some(modulus.to_vec())))
    }

    /// Builds the field of order `q` with the default modulus.
    pub fn from_order(q: u64) -> Result<Self> {
        let (p, k) = prime_power(q).ok_or(Error::NotPrimePower(q))?;
        Self::new(p, k)
    }

    fn assemble(p: u32, k: u32, q: u32, modulus: Option<Vec<u32>>) -> Self {
        let mut inner = Inner { p, k, q, modulus, tables: None };
        if q <= TABLE_LIMIT {
            inner.tables = Some(Tables::build(&inner));
        }
        FieldSpec { inner: Arc::new(inner) }
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.inner.p
    }

    #[inline]
    pub fn k(&self) -> u32 {
        self.inner.k
    }

    #[inline]
    pub fn q(&self) -> u32 {
        self.inner.q
    }

    /// Modulus coefficients, low degree first and including the leading 1; `None` for prime fields.
    pub fn modulus(&self) -> Option<&[u32]> {
        self.inner.modulus.as_deref()
    }

    pub fn is_prime_field(&self) -> bool {
        self.inner.k == 1
    }

    pub fn contains(&self, a: Elem) -> bool {
        a < self.inner.q
    }

    pub fn check(&self, a: u64) -> Result<Elem> {
        if a < self.inner.q as u64 {
            Ok(a as Elem)
        } else {
            Err(Error::ElementOutOfRange { value: a, q: self.inner.q })
        }
    }

    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.inner.q
    }

    pub fn nonzero(&self) -> std::ops::Range<Elem> {
        1..self.inner.q
    }

    /// The image of the integer `j` in the prime subfield.
    #[inline]
    pub fn from_int(&self, j: u64) -> Elem {
        (j % self.inner.p as u64) as Elem
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        debug_assert!(a < self.q() && b < self.q());
        match &self.inner.tables {
            Some(t) => t.add[(a * self.inner.q + b) as usize] as Elem,
            None => self.inner.raw_add(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        match &self.inner.tables {
            Some(t) => t.neg[a as usize] as Elem,
            None => self.inner.raw_neg(a),
        }
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        debug_assert!(a < self.q() && b < self.q());
        match &self.inner.tables {
            Some(t) => t.mul[(a * self.inner.q + b) as usize] as Elem,
            None => self.inner.raw_mul(a, b),
        }
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.inner.tables {
            Some(t) => t.inv[a as usize] as Elem,
            None => self.inner.raw_pow(a, self.inner.q as u64 - 2),
        })
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, e: u64) -> Elem {
        self.inner.raw_pow(a, e)
    }
}

fn check_order(p: u64, k: u32, ceiling: u64) -> Result<u32> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Err(Error::ZeroDegree);
    }
    let ceiling = ceiling.min(HARD_LIMIT);
    match p.checked_pow(k) {
        Some(q) if q <= ceiling => Ok(q as u32),
        _ => Err(Error::FieldTooLarge { p, k, ceiling }),
    }
}

fn smallest_irreducible(p: u32, k: u32) -> Option<Vec<u32>> {
    let count = (p as u64).pow(k);
    // Index t enumerates (a_0, ..., a_{k-1}) lexicographically: a_0 is the most significant digit.
    (0..count).find_map(|t| {
        let mut coeffs = vec![0u32; k as usize + 1];
        let mut rest = t;
        for i in (0..k as usize).rev() {
            coeffs[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        coeffs[k as usize] = 1;
        poly::is_irreducible(&coeffs, p).then_some(coeffs)
    })
}

impl Inner {
    fn digits(&self, mut a: Elem) -> Vec<u32> {
        let mut d = vec![0u32; self.k as usize];
        for slot in d.iter_mut() {
            *slot = a % self.p;
            a /= self.p;
        }
        d
    }

    fn undigits(&self, d: &[u32]) -> Elem {
        d.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn raw_add(&self, a: Elem, b: Elem) -> Elem {
        if self.k == 1 {
            return ((a as u64 + b as u64) % self.p as u64) as Elem;
        }
        let (mut a, mut b) = (a, b);
        let (mut out, mut scale) = (0, 1);
        for _ in 0..self.k {
            out += ((a % self.p + b % self.p) % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale *= self.p;
        }
        out
    }

    fn raw_neg(&self, a: Elem) -> Elem {
        if self.k == 1 {
            return (self.p - a % self.p) % self.p;
        }
        let d: Vec<u32> = self.digits(a).into_iter().map(|c| (self.p - c) % self.p).collect();
        self.undigits(&d)
    }

    fn raw_mul(&self, a: Elem, b: Elem) -> Elem {
        match &self.modulus {
            None => ((a as u64 * b as u64) % self.p as u64) as Elem,
            Some(m) => {
                let prod = poly::mul(&self.digits(a), &self.digits(b), self.p);
                let mut r = poly::rem(&prod, m, self.p);
                r.resize(self.k as usize, 0);
                self.undigits(&r)
            }
        }
    }

    fn raw_pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.raw_mul(acc, base);
            }
            base = self.raw_mul(base, base);
            e >>= 1;
        }
        acc
    }
}

impl Tables {
    fn build(f: &Inner) -> Self {
        let q = f.q as usize;
        let mut add = vec![0u8; q * q];
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                add[a * q + b] = f.raw_add(a as Elem, b as Elem) as u8;
                mul[a * q + b] = f.raw_mul(a as Elem, b as Elem) as u8;
            }
        }
        let neg = (0..q).map(|a| f.raw_neg(a as Elem) as u8).collect();
        let mut inv = vec![0u8; q];
        for a in 1..q {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).expect("field element without inverse") as u8;
        }
        Tables { add, mul, neg, inv }
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.p == other.inner.p
                && self.inner.k == other.inner.k
                && self.inner.modulus == other.inner.modulus)
    }
}

impl Eq for FieldSpec {}

impl Hash for FieldSpec {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.inner.p.hash(state);
        self.inner.k.hash(state);
        self.inner.modulus.hash(state);
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.inner.modulus {
            Some(m) => write!(f, "F_{}[modulus {:?}]", self.inner.q, m),
            None => write!(f, "F_{}", self.inner.q),
        }
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.inner.q)
    }
}

/// Dense polynomials over F_p, coefficients low degree first.
mod poly {
    pub fn trim(a: &mut Vec<u32>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
            }
        }
        let mut out: Vec<u32> = out.into_iter().map(|c| c as u32).collect();
        trim(&mut out);
        out
    }

    /// Remainder of `a` modulo the monic polynomial `m`.
    pub fn rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
        let mut r = a.to_vec();
        trim(&mut r);
        let dm = m.len() - 1;
        while r.len() > dm {
            let lead = *r.last().unwrap() as u64;
            let shift = r.len() - 1 - dm;
            for (i, &c) in m.iter().enumerate() {
                let sub = lead * c as u64 % p as u64;
                r[shift + i] = ((r[shift + i] as u64 + p as u64 - sub) % p as u64) as u32;
            }
            trim(&mut r);
        }
        r
    }

    /// Trial division by every monic polynomial of degree `1..=deg/2`.
    pub fn is_irreducible(m: &[u32], p: u32) -> bool {
        let deg = m.len() - 1;
        if deg == 0 {
            return false;
        }
        for d in 1..=deg / 2 {
            let count = (p as u64).pow(d as u32);
            for t in 0..count {
                let mut cand = vec![0u32; d + 1];
                let mut rest = t;
                for c in cand.iter_mut().take(d) {
                    *c = (rest % p as u64) as u32;
                    rest /= p as u64;
                }
                cand[d] = 1;
                if rem(m, &cand, p).is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Irreducibility for degree <= 3 is equivalent to having no root in F_p.
    fn has_root(coeffs: &[u32], p: u32) -> bool {
        (0..p).any(|x| {
            coeffs
                .iter()
                .rev()
                .fold(0u64, |acc, &c| (acc * x as u64 + c as u64) % p as u64)
                == 0
        })
    }

    fn smallest_rootless(p: u32, k: usize) -> Vec<u32> {
        // (a_0, ..., a_{k-1}) in lexicographic order
        let mut tuples: Vec<Vec<u32>> = vec![vec![]];
        for _ in 0..k {
            tuples = tuples
                .into_iter()
                .flat_map(|t| (0..p).map(move |c| [t.clone(), vec![c]].concat()))
                .collect();
        }
        tuples.sort();
        tuples
            .into_iter()
            .map(|mut t| {
                t.push(1);
                t
            })
            .find(|c| !has_root(c, p))
            .unwrap()
    }

    #[test]
    fn prime_field_has_no_modulus() {
        let f = FieldSpec::new(3, 1).unwrap();
        assert_eq!(f.q(), 3);
        assert!(f.modulus().is_none());
        assert_eq!(f.mul(2, 2), 1);
    }

    #[test]
    fn default_moduli_match_root_search() {
        assert_eq!(smallest_rootless(2, 2), vec![1, 1, 1]);
        for (p, k) in [(2u32, 2usize), (3, 2), (2, 3), (5, 2), (3, 3), (7, 2)] {
            let f = FieldSpec::new(p as u64, k as u32).unwrap();
            assert_eq!(f.modulus().unwrap(), smallest_rootless(p, k).as_slice(), "p={p} k={k}");
        }
        // x^2 + 1 is the first rootless monic quadratic over F_3 in (a_0, a_1) order
        assert_eq!(FieldSpec::new(3, 2).unwrap().modulus().unwrap(), &[1, 0, 1]);
    }

    #[test]
    fn gf4_alpha_squared() {
        let f = FieldSpec::new(2, 2).unwrap();
        assert_eq!(f.mul(2, 2), 3);
        assert_eq!(f.add(2, 3), 1);
        for a in f.elements() {
            assert_eq!(f.neg(a), a);
        }
    }

    #[test]
    fn inverse_of_one_and_zero() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27, 49, 121, 256, 257, 343, 625, 1024] {
            let f = FieldSpec::from_order(q).unwrap();
            assert_eq!(f.inv(1).unwrap(), 1);
            assert_eq!(f.inv(0), Err(Error::DivisionByZero));
            assert_eq!(f.div(3 % f.q(), 0), Err(Error::DivisionByZero));
        }
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(FieldSpec::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert_eq!(FieldSpec::new(3, 0).unwrap_err(), Error::ZeroDegree);
        assert!(matches!(FieldSpec::new(2, 17), Err(Error::FieldTooLarge { .. })));
        assert!(FieldSpec::with_ceiling(2, 17, 1 << 17).is_ok());
        assert!(matches!(FieldSpec::with_modulus(2, &[0, 0, 1]), Err(Error::BadModulus(_))));
        assert!(matches!(FieldSpec::with_modulus(3, &[1, 0, 2]), Err(Error::BadModulus(_))));
        assert_eq!(FieldSpec::from_order(12).unwrap_err(), Error::NotPrimePower(12));
    }

    #[test]
    fn explicit_modulus_variant() {
        let f = FieldSpec::with_modulus(3, &[2, 1, 1]).unwrap();
        assert_eq!(f.q(), 9);
        assert_ne!(f, FieldSpec::new(3, 2).unwrap());
        // x * x = x^2 = -x - 2 = 2x + 1
        assert_eq!(f.mul(3, 3), 2 * 3 + 1);
    }

    fn check_axioms(f: &FieldSpec) {
        let q = f.q();
        for a in 0..q {
            assert_eq!(f.add(a, 0), a);
            assert_eq!(f.mul(a, 1), a);
            assert_eq!(f.add(a, f.neg(a)), 0);
            let mut acc = 0;
            for _ in 0..f.p() {
                acc = f.add(acc, a);
            }
            assert_eq!(acc, 0, "exponent p");
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in 0..q {
                assert_eq!(f.add(a, b), f.add(b, a));
                assert_eq!(f.mul(a, b), f.mul(b, a));
                let p = f.p() as u64;
                assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
                for c in 0..q {
                    assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                    assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                    assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                }
            }
        }
    }

    #[test]
    fn axioms_exhaustive_small_fields() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16] {
            check_axioms(&FieldSpec::from_order(q).unwrap());
        }
    }

    #[test]
    fn tables_agree_with_direct_arithmetic() {
        let f = FieldSpec::new(3, 4).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.add(a, b), f.inner.raw_add(a, b));
                assert_eq!(f.mul(a, b), f.inner.raw_mul(a, b));
            }
        }
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(7), Some((7, 1)));
        assert_eq!(prime_power(1024), Some((2, 10)));
        assert_eq!(prime_power(1), None);
        assert_eq!(prime_power(18), None);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn large_field() -> impl Strategy<Value = FieldSpec> {
            prop_oneof![
                Just(FieldSpec::from_order(257).unwrap()),
                Just(FieldSpec::from_order(625).unwrap()),
                Just(FieldSpec::from_order(1024).unwrap()),
                Just(FieldSpec::from_order(3u64.pow(7)).unwrap()),
            ]
        }

        proptest! {
            #[test]
            fn axioms_randomized(f in large_field(), a in 0u32..1 << 16, b in 0u32..1 << 16, c in 0u32..1 << 16) {
                let (a, b, c) = (a % f.q(), b % f.q(), c % f.q());
                prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                prop_assert_eq!(f.sub(f.add(a, b), b), a);
                let p = f.p() as u64;
                prop_assert_eq!(f.pow(f.add(a, b), p), f.add(f.pow(a, p), f.pow(b, p)));
                if a != 0 {
                    prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                    prop_assert_eq!(f.div(f.mul(a, b), a).unwrap(), b);
                }
            }
        }
    }
}
