//! Finite abelian groups presented as explicit products of cyclic factors.
//!
//! An element is a residue vector `(c_1, ..., c_r)` with `0 <= c_i < n_i`.
//! It is encoded as the mixed-radix integer
//! `c_1 + n_1 * (c_2 + n_2 * (c_3 + ...))`, least-significant factor first.
//! The encoding is what the set file format and every bitset use.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Largest group order the crate will materialize as a bitset.
pub const MAX_GROUP_ORDER: usize = 1 << 26;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    factors: Arc<[u32]>,
    order: usize,
}

impl GroupSpec {
    /// Builds `Z/n_1 x ... x Z/n_r`. An empty list is the trivial group `[1]`.
    pub fn new(factors: &[u32]) -> Result<Self> {
        if factors.is_empty() {
            return Self::new(&[1]);
        }
        let mut order: usize = 1;
        for &n in factors {
            if n == 0 {
                return Err(Error::usage("cyclic factor orders must be at least 1"));
            }
            order = order.checked_mul(n as usize).filter(|&o| o <= MAX_GROUP_ORDER).ok_or_else(|| {
                Error::capability(format!("group order exceeds the materialization bound {MAX_GROUP_ORDER}"))
            })?;
        }
        Ok(GroupSpec { factors: factors.into(), order })
    }

    pub fn cyclic(n: u32) -> Result<Self> {
        Self::new(&[n])
    }

    pub fn trivial() -> Self {
        Self::new(&[1]).expect("trivial group")
    }

    /// `self x other`, factors concatenated in order.
    pub fn product(&self, other: &GroupSpec) -> Result<Self> {
        let mut f = self.factors.to_vec();
        f.extend_from_slice(&other.factors);
        Self::new(&f)
    }

    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.order == 1
    }

    pub fn identity(&self) -> Elem {
        Elem { group: self.clone(), index: 0 }
    }

    pub fn elem(&self, index: usize) -> Result<Elem> {
        if index >= self.order {
            return Err(Error::usage(format!("element index {index} out of range for group of order {}", self.order)));
        }
        Ok(Elem { group: self.clone(), index })
    }

    pub fn elem_from_coords(&self, coords: &[u64]) -> Result<Elem> {
        Ok(Elem { group: self.clone(), index: self.encode(coords)? })
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order).map(move |index| Elem { group: self.clone(), index })
    }

    /// Mixed-radix encoding of an already-reduced residue vector.
    pub fn encode(&self, coords: &[u64]) -> Result<usize> {
        if coords.len() != self.factors.len() {
            return Err(Error::usage(format!("expected {} coordinates, got {}", self.factors.len(), coords.len())));
        }
        let mut index = 0usize;
        for (&c, &n) in coords.iter().zip(self.factors.iter()).rev() {
            if c >= n as u64 {
                return Err(Error::usage(format!("residue {c} out of range for Z/{n}")));
            }
            index = index * n as usize + c as usize;
        }
        Ok(index)
    }

    pub fn decode(&self, mut index: usize) -> Vec<u64> {
        debug_assert!(index < self.order);
        self.factors
            .iter()
            .map(|&n| {
                let c = index % n as usize;
                index /= n as usize;
                c as u64
            })
            .collect()
    }

    pub fn add_index(&self, a: usize, b: usize) -> usize {
        if let [n] = *self.factors {
            let s = a + b;
            let n = n as usize;
            return if s >= n { s - n } else { s };
        }
        let (mut a, mut b) = (a, b);
        let mut out = 0usize;
        let mut place = 1usize;
        for &n in self.factors.iter() {
            let n = n as usize;
            let mut d = a % n + b % n;
            if d >= n {
                d -= n;
            }
            out += d * place;
            place *= n;
            a /= n;
            b /= n;
        }
        out
    }

    pub fn neg_index(&self, a: usize) -> usize {
        if let [n] = *self.factors {
            let n = n as usize;
            return if a == 0 { 0 } else { n - a };
        }
        let mut a = a;
        let mut out = 0usize;
        let mut place = 1usize;
        for &n in self.factors.iter() {
            let n = n as usize;
            let d = a % n;
            out += if d == 0 { 0 } else { n - d } * place;
            place *= n;
            a /= n;
        }
        out
    }

    pub fn sub_index(&self, a: usize, b: usize) -> usize {
        self.add_index(a, self.neg_index(b))
    }

    /// `m * a` for any integer `m`.
    pub fn scale_index(&self, m: i64, a: usize) -> usize {
        let mut a = a;
        let mut out = 0usize;
        let mut place = 1usize;
        for &n in self.factors.iter() {
            let n = n as i64;
            let d = (a as i64) % n;
            let prod = ((m % n) * d).rem_euclid(n);
            out += prod as usize * place;
            place *= n as usize;
            a /= n as usize;
        }
        out
    }

    pub fn double_index(&self, a: usize) -> usize {
        self.add_index(a, a)
    }

    /// Order of the element with the given index: lcm over `n_i / gcd(c_i, n_i)`.
    pub fn order_of_index(&self, a: usize) -> u64 {
        let mut a = a;
        let mut ord = 1u64;
        for &n in self.factors.iter() {
            let n = n as u64;
            let c = (a as u64) % n;
            a /= n as usize;
            let local = n / gcd(c, n);
            ord = lcm(ord, local);
        }
        ord
    }

    pub(crate) fn check_same(&self, other: &GroupSpec) -> Result<()> {
        if self != other {
            return Err(Error::usage(format!("group mismatch: {self} vs {other}")));
        }
        Ok(())
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, n) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" x ")?;
            }
            write!(f, "Z/{n}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupSpec({:?})", &*self.factors)
    }
}

/// A group element together with the group it lives in.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Elem {
    group: GroupSpec,
    index: usize,
}

impl Elem {
    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn coords(&self) -> Vec<u64> {
        self.group.decode(self.index)
    }

    pub fn is_identity(&self) -> bool {
        self.index == 0
    }

    pub fn add(&self, other: &Elem) -> Result<Elem> {
        self.group.check_same(&other.group)?;
        Ok(self.with_index(self.group.add_index(self.index, other.index)))
    }

    pub fn sub(&self, other: &Elem) -> Result<Elem> {
        self.group.check_same(&other.group)?;
        Ok(self.with_index(self.group.sub_index(self.index, other.index)))
    }

    pub fn neg(&self) -> Elem {
        self.with_index(self.group.neg_index(self.index))
    }

    pub fn scalar_mul(&self, m: i64) -> Elem {
        self.with_index(self.group.scale_index(m, self.index))
    }

    /// Least `n >= 1` with `n * self = 0`.
    pub fn order(&self) -> u64 {
        self.group.order_of_index(self.index)
    }

    fn with_index(&self, index: usize) -> Elem {
        Elem { group: self.group.clone(), index }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coords();
        if c.len() == 1 {
            write!(f, "{}", c[0])
        } else {
            write!(f, "(")?;
            for (i, x) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")
        }
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub(crate) fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_arithmetic() {
        let g = GroupSpec::cyclic(16).unwrap();
        let x = g.elem(9).unwrap();
        let y = g.elem(13).unwrap();
        assert_eq!(x.add(&y).unwrap().index(), 6);
        assert_eq!(g.elem(8).unwrap().scalar_mul(2), g.identity());
        assert_eq!(g.elem(2).unwrap().order(), 8);
        assert_eq!(g.identity().order(), 1);
    }

    #[test]
    fn product_negation_and_order() {
        let g = GroupSpec::new(&[7, 3]).unwrap();
        let x = g.elem_from_coords(&[2, 1]).unwrap();
        assert_eq!(x.neg().coords(), vec![5, 2]);
        let one = g.elem_from_coords(&[1, 1]).unwrap();
        // iterate until we return to the identity
        let mut acc = one.clone();
        let mut steps = 1;
        while !acc.is_identity() {
            acc = acc.add(&one).unwrap();
            steps += 1;
        }
        assert_eq!(steps, 21);
        assert_eq!(one.order(), 21);
    }

    #[test]
    fn encoding_is_least_significant_first() {
        let g = GroupSpec::new(&[4, 8]).unwrap();
        assert_eq!(g.encode(&[1, 2]).unwrap(), 1 + 4 * 2);
        assert_eq!(g.decode(9), vec![1, 2]);
        assert!(g.encode(&[4, 0]).is_err());
        assert!(g.encode(&[1]).is_err());
    }

    #[test]
    fn empty_factor_list_is_trivial() {
        let g = GroupSpec::new(&[]).unwrap();
        assert_eq!(g.factors(), &[1]);
        assert_eq!(g.order(), 1);
        assert!(GroupSpec::new(&[3, 0]).is_err());
    }

    #[test]
    fn mismatched_groups_are_rejected() {
        let a = GroupSpec::cyclic(5).unwrap().elem(1).unwrap();
        let b = GroupSpec::cyclic(7).unwrap().elem(1).unwrap();
        assert!(matches!(a.add(&b), Err(Error::Usage(_))));
    }

    #[test]
    fn scalar_mul_edge_cases() {
        let g = GroupSpec::new(&[6, 4]).unwrap();
        for x in g.elements() {
            assert!(x.scalar_mul(0).is_identity());
            assert_eq!(x.scalar_mul(-1), x.neg());
            assert_eq!(g.order() as u64 % x.order(), 0);
        }
    }
}
