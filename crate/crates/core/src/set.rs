use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::group::{Elem, GroupSpec};

/// A subset of a finite group stored as a dense bit-vector over element
/// indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElemSet {
    group: GroupSpec,
    bits: Vec<u64>,
    card: usize,
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl ElemSet {
    pub fn empty(group: &GroupSpec) -> Self {
        ElemSet { group: group.clone(), bits: vec![0; words_for(group.order())], card: 0 }
    }

    pub fn full(group: &GroupSpec) -> Self {
        let mut s = Self::empty(group);
        for i in 0..group.order() {
            s.insert_index(i);
        }
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(group: &GroupSpec, indices: I) -> Result<Self> {
        let mut s = Self::empty(group);
        for i in indices {
            group.elem(i)?;
            s.insert_index(i);
        }
        Ok(s)
    }

    pub fn from_elems<'a, I: IntoIterator<Item = &'a Elem>>(group: &GroupSpec, elems: I) -> Result<Self> {
        let mut s = Self::empty(group);
        for e in elems {
            group.check_same(e.group())?;
            s.insert_index(e.index());
        }
        Ok(s)
    }

    /// The subset of `group` whose indices are the set bits of `mask`.
    /// Used by exhaustive sweeps over groups of order at most 64.
    pub fn from_mask(group: &GroupSpec, mask: u64) -> Self {
        debug_assert!(group.order() <= 64);
        let mut bits = vec![0; words_for(group.order())];
        if !bits.is_empty() {
            bits[0] = mask;
        }
        ElemSet { group: group.clone(), bits, card: mask.count_ones() as usize }
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.card
    }

    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    pub fn contains_index(&self, i: usize) -> bool {
        i < self.group.order() && self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn contains(&self, e: &Elem) -> bool {
        e.group() == &self.group && self.contains_index(e.index())
    }

    /// Returns true if the element was newly inserted.
    pub fn insert_index(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        let fresh = self.bits[w] >> b & 1 == 0;
        if fresh {
            self.bits[w] |= 1 << b;
            self.card += 1;
        }
        fresh
    }

    pub fn remove_index(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, i % 64);
        let present = self.bits[w] >> b & 1 == 1;
        if present {
            self.bits[w] &= !(1 << b);
            self.card -= 1;
        }
        present
    }

    pub fn insert(&mut self, e: &Elem) -> Result<bool> {
        self.group.check_same(e.group())?;
        Ok(self.insert_index(e.index()))
    }

    /// Ascending element indices.
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + b)
            })
        })
    }

    pub fn elems(&self) -> impl Iterator<Item = Elem> + '_ {
        self.indices().map(move |i| self.group.elem(i).expect("index in range"))
    }

    pub fn min_index(&self) -> Option<usize> {
        self.indices().next()
    }

    fn zip_with(&self, other: &ElemSet, f: impl Fn(u64, u64) -> u64) -> Result<ElemSet> {
        self.group.check_same(&other.group)?;
        let bits: Vec<u64> = self.bits.iter().zip(&other.bits).map(|(&a, &b)| f(a, b)).collect();
        let card = bits.iter().map(|w| w.count_ones() as usize).sum();
        Ok(ElemSet { group: self.group.clone(), bits, card })
    }

    pub fn union(&self, other: &ElemSet) -> Result<ElemSet> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &ElemSet) -> Result<ElemSet> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &ElemSet) -> Result<ElemSet> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> ElemSet {
        let full = ElemSet::full(&self.group);
        full.difference(self).expect("same group")
    }

    pub fn is_subset(&self, other: &ElemSet) -> Result<bool> {
        self.group.check_same(&other.group)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(&a, &b)| a & !b == 0))
    }

    pub fn is_disjoint(&self, other: &ElemSet) -> Result<bool> {
        self.group.check_same(&other.group)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(&a, &b)| a & b == 0))
    }

    pub fn intersection_len(&self, other: &ElemSet) -> Result<usize> {
        self.group.check_same(&other.group)?;
        Ok(self.bits.iter().zip(&other.bits).map(|(&a, &b)| (a & b).count_ones() as usize).sum())
    }

    /// `x + self`.
    pub fn translate(&self, x: &Elem) -> Result<ElemSet> {
        self.group.check_same(x.group())?;
        self.map_indices(|i| self.group.add_index(i, x.index()))
    }

    /// `{m * a : a in self}`; for a unit `m` this is an automorphic image.
    pub fn scale(&self, m: i64) -> ElemSet {
        self.map_indices(|i| self.group.scale_index(m, i)).expect("in range")
    }

    pub fn negate(&self) -> ElemSet {
        self.scale(-1)
    }

    fn map_indices(&self, f: impl Fn(usize) -> usize) -> Result<ElemSet> {
        ElemSet::from_indices(&self.group, self.indices().map(f))
    }

    /// Hex SHA-256 over the group factors and the raw bit words. Stable
    /// across runs and platforms; used as a cache key and in survey records.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        for &n in self.group.factors() {
            h.update(n.to_le_bytes());
        }
        h.update(b"|");
        for &w in &self.bits {
            h.update(w.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, e) in self.elems().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "}} in {}", self.group)
    }
}

/// Serializable view of a set: the group factors and the element
/// coordinates. This is the set file format's data model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetData {
    pub group: Vec<u32>,
    pub elements: Vec<Vec<u64>>,
}

impl From<&ElemSet> for SetData {
    fn from(s: &ElemSet) -> Self {
        SetData { group: s.group().factors().to_vec(), elements: s.indices().map(|i| s.group().decode(i)).collect() }
    }
}
