//! Dense bit sets over vector keys.

use std::sync::atomic::{AtomicU64, Ordering};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSet {
    words: Vec<u64>,
    len: u64,
}

impl BitSet {
    pub fn new(len: u64) -> Self {
        BitSet { words: vec![0; len.div_ceil(64) as usize], len }
    }

    #[inline]
    pub fn contains(&self, i: u64) -> bool {
        i < self.len && self.words[(i >> 6) as usize] >> (i & 63) & 1 == 1
    }

    /// Sets bit `i`; returns whether it was already set.
    #[inline]
    pub fn insert(&mut self, i: u64) -> bool {
        let w = &mut self.words[(i >> 6) as usize];
        let mask = 1u64 << (i & 63);
        let was = *w & mask != 0;
        *w |= mask;
        was
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Smallest index below `len` whose bit is clear.
    pub fn first_clear(&self) -> Option<u64> {
        self.words.iter().enumerate().find_map(|(i, &w)| {
            let idx = (i as u64) * 64 + (!w).trailing_zeros() as u64;
            (w != u64::MAX && idx < self.len).then_some(idx)
        })
    }
}

/// Bit set that many workers may fill concurrently.
pub struct AtomicBitSet {
    words: Vec<AtomicU64>,
    len: u64,
}

impl AtomicBitSet {
    pub fn new(len: u64) -> Self {
        AtomicBitSet { words: (0..len.div_ceil(64)).map(|_| AtomicU64::new(0)).collect(), len }
    }

    /// Sets bit `i`; returns whether it was already set.
    #[inline]
    pub fn insert(&self, i: u64) -> bool {
        let mask = 1u64 << (i & 63);
        self.words[(i >> 6) as usize].fetch_or(mask, Ordering::Relaxed) & mask != 0
    }

    pub fn into_bitset(self) -> BitSet {
        BitSet { words: self.words.into_iter().map(AtomicU64::into_inner).collect(), len: self.len }
    }
}
