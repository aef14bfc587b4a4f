//! Fixed-capacity vertex sets backed by `u64` words.

use serde::{Deserialize, Serialize};

const WORD: usize = 64;

/// A set of vertices `0..capacity` stored as a bitrow.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VertexSet {
    capacity: usize,
    words: Vec<u64>,
}

impl VertexSet {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            words: vec![0; capacity.div_ceil(WORD)],
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = Self::new(capacity);
        for w in s.words.iter_mut() {
            *w = !0;
        }
        s.trim();
        s
    }

    pub fn from_iter_with_capacity<I: IntoIterator<Item = usize>>(capacity: usize, it: I) -> Self {
        let mut s = Self::new(capacity);
        for v in it {
            s.insert(v);
        }
        s
    }

    fn trim(&mut self) {
        let rem = self.capacity % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.capacity && self.words[v / WORD] >> (v % WORD) & 1 == 1
    }

    /// Inserts `v`, returning whether it was newly added.
    #[inline]
    pub fn insert(&mut self, v: usize) -> bool {
        assert!(v < self.capacity, "vertex {v} out of range {}", self.capacity);
        let w = &mut self.words[v / WORD];
        let bit = 1u64 << (v % WORD);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, v: usize) -> bool {
        if v >= self.capacity {
            return false;
        }
        let w = &mut self.words[v / WORD];
        let bit = 1u64 << (v % WORD);
        let present = *w & bit != 0;
        *w &= !bit;
        present
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(i * WORD + b)
                }
            })
        })
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// `|self ∩ other|` without allocating.
    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    /// `|self ∩ a ∩ b|` without allocating.
    pub fn intersection3_len(&self, a: &VertexSet, b: &VertexSet) -> usize {
        self.words
            .iter()
            .zip(&a.words)
            .zip(&b.words)
            .map(|((x, y), z)| (x & y & z).count_ones() as usize)
            .sum()
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn complement(&self) -> VertexSet {
        let mut s = self.clone();
        for w in s.words.iter_mut() {
            *w = !*w;
        }
        s.trim();
        s
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }
}

impl std::fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
