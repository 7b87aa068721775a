//! Structural classification of the sets with φ(A) = 1.
//!
//! Exactly five shapes have φ = 1: a subgroup `H`; `H \ {0}` for a 2-torsion
//! subgroup `H`; `{b}`; `{b, 0}`; and `{b, 0, -b}`. The shapes overlap on
//! degenerate parameters, so matching uses the fixed precedence
//! Subgroup > TwoTorsionPunctured > TripleSym > PairWithZero > Singleton.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{Elem, GroupSpec};
use crate::phi::phi_exact;
use crate::set::ElemSet;
use crate::subgroup::Subgroup;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Phi1Template {
    Subgroup(Subgroup),
    TwoTorsionPunctured(Subgroup),
    TripleSym(Elem),
    PairWithZero(Elem),
    Singleton(Elem),
    NotPhi1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Phi1Tag {
    Subgroup,
    TwoTorsionPunctured,
    TripleSym,
    PairWithZero,
    Singleton,
    NotPhi1,
}

impl Phi1Template {
    pub fn tag(&self) -> Phi1Tag {
        match self {
            Phi1Template::Subgroup(_) => Phi1Tag::Subgroup,
            Phi1Template::TwoTorsionPunctured(_) => Phi1Tag::TwoTorsionPunctured,
            Phi1Template::TripleSym(_) => Phi1Tag::TripleSym,
            Phi1Template::PairWithZero(_) => Phi1Tag::PairWithZero,
            Phi1Template::Singleton(_) => Phi1Tag::Singleton,
            Phi1Template::NotPhi1 => Phi1Tag::NotPhi1,
        }
    }

    /// Human-readable parameter, if any.
    pub fn parameter(&self) -> Option<String> {
        match self {
            Phi1Template::Subgroup(h) | Phi1Template::TwoTorsionPunctured(h) => Some(format!("{:?}", h.elements())),
            Phi1Template::TripleSym(b) | Phi1Template::PairWithZero(b) | Phi1Template::Singleton(b) => {
                Some(b.to_string())
            }
            Phi1Template::NotPhi1 => None,
        }
    }
}

impl std::fmt::Display for Phi1Tag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

/// Matches `a` against the φ = 1 templates. Returns `NotPhi1` whenever
/// φ(A) != 1.
///
/// For `{b, 0, -b}` the reported `b` is the nonzero element with the larger
/// index.
pub fn classify_phi1(a: &ElemSet) -> Phi1Template {
    if phi_exact(a).phi != 1 {
        return Phi1Template::NotPhi1;
    }
    let g = a.group();
    if let Ok(h) = Subgroup::new(a.clone()) {
        return Phi1Template::Subgroup(h);
    }
    if !a.contains_index(0) {
        let mut with_zero = a.clone();
        with_zero.insert_index(0);
        if let Ok(h) = Subgroup::new(with_zero) {
            if h.is_two_torsion() {
                return Phi1Template::TwoTorsionPunctured(h);
            }
        }
    }
    let idx: Vec<usize> = a.indices().collect();
    let elem = |i: usize| g.elem(i).expect("in range");
    match *idx.as_slice() {
        [0, x, y] if g.neg_index(x) == y && x != y => Phi1Template::TripleSym(elem(y.max(x))),
        [0, b] => Phi1Template::PairWithZero(elem(b)),
        [b] => Phi1Template::Singleton(elem(b)),
        _ => Phi1Template::NotPhi1,
    }
}

/// The literal set a template describes, checked to have φ = 1.
pub fn instantiate(t: &Phi1Template, group: &GroupSpec) -> Result<ElemSet> {
    let set = match t {
        Phi1Template::Subgroup(h) => {
            group.check_same(h.group())?;
            h.elements().clone()
        }
        Phi1Template::TwoTorsionPunctured(h) => {
            group.check_same(h.group())?;
            if !h.is_two_torsion() {
                return Err(Error::usage("TwoTorsionPunctured needs a 2-torsion subgroup"));
            }
            if h.order() < 2 {
                return Err(Error::usage("TwoTorsionPunctured needs a nontrivial subgroup"));
            }
            let mut s = h.elements().clone();
            s.remove_index(0);
            s
        }
        Phi1Template::TripleSym(b) => {
            group.check_same(b.group())?;
            ElemSet::from_elems(group, [b, &group.identity(), &b.neg()])?
        }
        Phi1Template::PairWithZero(b) => {
            group.check_same(b.group())?;
            ElemSet::from_elems(group, [b, &group.identity()])?
        }
        Phi1Template::Singleton(b) => {
            group.check_same(b.group())?;
            ElemSet::from_elems(group, [b])?
        }
        Phi1Template::NotPhi1 => return Err(Error::usage("NotPhi1 has no instance")),
    };
    let phi = phi_exact(&set).phi;
    if phi != 1 {
        return Err(Error::Claim(format!("template {:?} instantiated to a set with phi = {phi}", t.tag())));
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_examples() {
        let z4 = GroupSpec::cyclic(4).unwrap();
        assert_eq!(classify_phi1(&ElemSet::full(&z4)).tag(), Phi1Tag::Subgroup);

        let v4 = GroupSpec::new(&[2, 2]).unwrap();
        let a = ElemSet::from_indices(&v4, [1, 2, 3]).unwrap();
        match classify_phi1(&a) {
            Phi1Template::TwoTorsionPunctured(h) => assert_eq!(h.order(), 4),
            other => panic!("{other:?}"),
        }

        let z5 = GroupSpec::cyclic(5).unwrap();
        let a = ElemSet::from_indices(&z5, [3, 0, 2]).unwrap();
        assert_eq!(classify_phi1(&a), Phi1Template::TripleSym(z5.elem(3).unwrap()));
        assert_eq!(classify_phi1(&ElemSet::from_indices(&z5, [1, 2]).unwrap()), Phi1Template::NotPhi1);
        assert_eq!(classify_phi1(&ElemSet::empty(&z5)), Phi1Template::NotPhi1);
    }

    #[test]
    fn degenerate_parameters_take_higher_precedence() {
        let z8 = GroupSpec::cyclic(8).unwrap();
        // {0} is a subgroup, {4, 0} is a subgroup, {4} is H \ {0} for H = {0, 4}
        assert_eq!(classify_phi1(&ElemSet::from_indices(&z8, [0]).unwrap()).tag(), Phi1Tag::Subgroup);
        assert_eq!(classify_phi1(&ElemSet::from_indices(&z8, [0, 4]).unwrap()).tag(), Phi1Tag::Subgroup);
        assert_eq!(classify_phi1(&ElemSet::from_indices(&z8, [4]).unwrap()).tag(), Phi1Tag::TwoTorsionPunctured);
        assert_eq!(classify_phi1(&ElemSet::from_indices(&z8, [3]).unwrap()).tag(), Phi1Tag::Singleton);
        assert_eq!(classify_phi1(&ElemSet::from_indices(&z8, [0, 3]).unwrap()).tag(), Phi1Tag::PairWithZero);
    }

    #[test]
    fn instantiate_examples() {
        let z7 = GroupSpec::cyclic(7).unwrap();
        let s = instantiate(&Phi1Template::Singleton(z7.elem(3).unwrap()), &z7).unwrap();
        assert_eq!(s.indices().collect::<Vec<_>>(), vec![3]);
        let z8 = GroupSpec::cyclic(8).unwrap();
        let s = instantiate(&Phi1Template::PairWithZero(z8.elem(5).unwrap()), &z8).unwrap();
        assert_eq!(s.indices().collect::<Vec<_>>(), vec![0, 5]);
        let z16 = GroupSpec::cyclic(16).unwrap();
        let h = Subgroup::generated(&z16, &[z16.elem(4).unwrap()]).unwrap();
        let s = instantiate(&Phi1Template::Subgroup(h.clone()), &z16).unwrap();
        assert_eq!(&s, h.elements());
    }

    #[test]
    fn instantiate_rejects_bad_parameters() {
        let z5 = GroupSpec::cyclic(5).unwrap();
        let t = Phi1Template::TwoTorsionPunctured(Subgroup::whole(&z5));
        assert!(matches!(instantiate(&t, &z5), Err(Error::Usage(_))));
        assert!(instantiate(&Phi1Template::NotPhi1, &z5).is_err());
        let z7 = GroupSpec::cyclic(7).unwrap();
        assert!(instantiate(&Phi1Template::Singleton(z7.elem(1).unwrap()), &z5).is_err());
    }
}
