//! Fixed-domain bit sets over dense indices.
//!
//! Every set carries the size of its domain; binary operations require both
//! operands to share the same domain. Sets of up to 256 elements live inline.

use std::fmt;
use std::hash::Hash;
use std::marker::PhantomData;

use smallvec::{smallvec, SmallVec};

const WORD_BITS: usize = 64;

/// A dense index usable as a [`DenseSet`] element.
pub trait Idx: Copy + Eq + Ord + Hash + fmt::Debug {
    fn new(index: usize) -> Self;
    fn index(self) -> usize;
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DenseSet<I> {
    domain: usize,
    words: SmallVec<[u64; 4]>,
    marker: PhantomData<fn(I) -> I>,
}

#[inline]
fn word_count(domain: usize) -> usize {
    domain.div_ceil(WORD_BITS)
}

#[inline]
fn locate(i: usize) -> (usize, u64) {
    (i / WORD_BITS, 1u64 << (i % WORD_BITS))
}

impl<I: Idx> DenseSet<I> {
    pub fn new_empty(domain: usize) -> Self {
        DenseSet {
            domain,
            words: smallvec![0; word_count(domain)],
            marker: PhantomData,
        }
    }

    pub fn new_filled(domain: usize) -> Self {
        let mut set = DenseSet {
            domain,
            words: smallvec![!0; word_count(domain)],
            marker: PhantomData,
        };
        set.clear_excess_bits();
        set
    }

    pub fn from_indices(domain: usize, items: impl IntoIterator<Item = I>) -> Self {
        let mut set = Self::new_empty(domain);
        for i in items {
            set.insert(i);
        }
        set
    }

    /// Set containing every element in `lo..hi`.
    pub fn from_range(domain: usize, lo: usize, hi: usize) -> Self {
        let mut set = Self::new_empty(domain);
        set.insert_range(lo, hi);
        set
    }

    fn clear_excess_bits(&mut self) {
        let rem = self.domain % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn domain_size(&self) -> usize {
        self.domain
    }

    #[inline]
    pub fn contains(&self, elem: I) -> bool {
        let i = elem.index();
        debug_assert!(i < self.domain, "{i} outside domain {}", self.domain);
        let (w, mask) = locate(i);
        self.words[w] & mask != 0
    }

    /// Returns `true` if the set changed.
    #[inline]
    pub fn insert(&mut self, elem: I) -> bool {
        let i = elem.index();
        assert!(i < self.domain, "{i} outside domain {}", self.domain);
        let (w, mask) = locate(i);
        let old = self.words[w];
        self.words[w] = old | mask;
        old & mask == 0
    }

    /// Returns `true` if the set changed.
    #[inline]
    pub fn remove(&mut self, elem: I) -> bool {
        let i = elem.index();
        debug_assert!(i < self.domain);
        let (w, mask) = locate(i);
        let old = self.words[w];
        self.words[w] = old & !mask;
        old & mask != 0
    }

    pub fn insert_range(&mut self, lo: usize, hi: usize) {
        assert!(lo <= hi && hi <= self.domain);
        for i in lo..hi {
            let (w, mask) = locate(i);
            self.words[w] |= mask;
        }
    }

    /// Keeps only the elements in `lo..hi`.
    pub fn retain_range(&mut self, lo: usize, hi: usize) {
        for (wi, word) in self.words.iter_mut().enumerate() {
            let base = wi * WORD_BITS;
            let mut keep = 0u64;
            if hi > base && lo < base + WORD_BITS {
                let a = lo.saturating_sub(base);
                let b = (hi - base).min(WORD_BITS);
                keep = if b - a == WORD_BITS {
                    !0
                } else {
                    ((1u64 << (b - a)) - 1) << a
                };
            }
            *word &= keep;
        }
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

    pub fn is_subset(&self, other: &Self) -> bool {
        self.check_domain(other);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.check_domain(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// Returns `true` if the set changed.
    pub fn union_with(&mut self, other: &Self) -> bool {
        self.check_domain(other);
        let mut changed = false;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            let new = *a | b;
            changed |= new != *a;
            *a = new;
        }
        changed
    }

    /// Returns `true` if the set changed.
    pub fn intersect_with(&mut self, other: &Self) -> bool {
        self.check_domain(other);
        let mut changed = false;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            let new = *a & b;
            changed |= new != *a;
            *a = new;
        }
        changed
    }

    /// Returns `true` if the set changed.
    pub fn subtract(&mut self, other: &Self) -> bool {
        self.check_domain(other);
        let mut changed = false;
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            let new = *a & !b;
            changed |= new != *a;
            *a = new;
        }
        changed
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.subtract(other);
        out
    }

    pub fn iter(&self) -> Iter<'_, I> {
        Iter {
            words: &self.words,
            word_index: 0,
            current: self.words.first().copied().unwrap_or(0),
            marker: PhantomData,
        }
    }

    /// Elements in descending order.
    pub fn iter_rev(&self) -> impl Iterator<Item = I> + '_ {
        self.words.iter().enumerate().rev().flat_map(|(wi, &w)| {
            let mut word = w;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = WORD_BITS - 1 - word.leading_zeros() as usize;
                word &= !(1u64 << bit);
                Some(I::new(wi * WORD_BITS + bit))
            })
        })
    }

    pub fn to_vec(&self) -> Vec<I> {
        self.iter().collect()
    }

    #[inline]
    fn check_domain(&self, other: &Self) {
        debug_assert_eq!(self.domain, other.domain, "dense set domain mismatch");
    }
}

pub struct Iter<'a, I> {
    words: &'a [u64],
    word_index: usize,
    current: u64,
    marker: PhantomData<fn() -> I>,
}

impl<I: Idx> Iterator for Iter<'_, I> {
    type Item = I;

    #[inline]
    fn next(&mut self) -> Option<I> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(I::new(self.word_index * WORD_BITS + bit));
            }
            self.word_index += 1;
            if self.word_index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.word_index];
        }
    }
}

impl<'a, I: Idx> IntoIterator for &'a DenseSet<I> {
    type Item = I;
    type IntoIter = Iter<'a, I>;

    fn into_iter(self) -> Iter<'a, I> {
        self.iter()
    }
}

impl<I: Idx> fmt::Debug for DenseSet<I> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
    struct Ix(usize);

    impl Idx for Ix {
        fn new(index: usize) -> Self {
            Ix(index)
        }
        fn index(self) -> usize {
            self.0
        }
    }

    type Set = DenseSet<Ix>;

    #[test]
    fn filled_respects_domain() {
        for domain in [0, 1, 63, 64, 65, 130, 300] {
            let s = Set::new_filled(domain);
            assert_eq!(s.len(), domain);
            assert_eq!(s.iter().count(), domain);
        }
    }

    #[test]
    fn retain_range_crosses_words() {
        let mut s = Set::new_filled(200);
        s.retain_range(60, 131);
        assert_eq!(s.to_vec(), (60..131).map(Ix).collect::<Vec<_>>());
        let mut e = Set::new_filled(10);
        e.retain_range(5, 5);
        assert!(e.is_empty());
    }

    proptest! {
        #[test]
        fn matches_btreeset(domain in 1usize..300, a in proptest::collection::vec(0usize..300, 0..60),
                            b in proptest::collection::vec(0usize..300, 0..60)) {
            use std::collections::BTreeSet;
            let a: BTreeSet<usize> = a.into_iter().filter(|&x| x < domain).collect();
            let b: BTreeSet<usize> = b.into_iter().filter(|&x| x < domain).collect();
            let sa = Set::from_indices(domain, a.iter().map(|&x| Ix(x)));
            let sb = Set::from_indices(domain, b.iter().map(|&x| Ix(x)));
            let inter: Vec<_> = a.intersection(&b).map(|&x| Ix(x)).collect();
            let uni: Vec<_> = a.union(&b).map(|&x| Ix(x)).collect();
            let diff: Vec<_> = a.difference(&b).map(|&x| Ix(x)).collect();
            prop_assert_eq!(sa.intersection(&sb).to_vec(), inter);
            prop_assert_eq!(sa.union(&sb).to_vec(), uni);
            prop_assert_eq!(sa.difference(&sb).to_vec(), diff);
            prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
            prop_assert_eq!(sa.len(), a.len());
            let rev: Vec<_> = a.iter().rev().map(|&x| Ix(x)).collect();
            prop_assert_eq!(sa.iter_rev().collect::<Vec<_>>(), rev);
        }
    }
}
