use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::group::{Elem, GroupSpec};
use crate::set::ElemSet;

/// Default bound on the group order for [`enumerate_subgroups`].
pub const DEFAULT_ENUMERATION_BOUND: usize = 512;

/// A verified subgroup: contains the identity, closed under addition and
/// negation, and of order dividing the ambient order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subgroup {
    elements: ElemSet,
    generators: Option<Vec<Elem>>,
}

impl Subgroup {
    /// Checks closure exhaustively. Costs `O(|H|^2)`.
    pub fn new(elements: ElemSet) -> Result<Self> {
        if !elements.contains_index(0) {
            return Err(Error::usage("subgroup must contain the identity"));
        }
        let g = elements.group().clone();
        if !g.order().is_multiple_of(elements.len()) {
            return Err(Error::usage(format!(
                "set of size {} cannot be a subgroup of a group of order {}",
                elements.len(),
                g.order()
            )));
        }
        let idx: Vec<usize> = elements.indices().collect();
        for &a in &idx {
            if !elements.contains_index(g.neg_index(a)) {
                return Err(Error::usage("set is not closed under negation"));
            }
            for &b in &idx {
                if !elements.contains_index(g.add_index(a, b)) {
                    return Err(Error::usage("set is not closed under addition"));
                }
            }
        }
        Ok(Subgroup { elements, generators: None })
    }

    pub fn trivial(group: &GroupSpec) -> Self {
        Subgroup { elements: ElemSet::from_indices(group, [0]).expect("identity"), generators: Some(Vec::new()) }
    }

    pub fn whole(group: &GroupSpec) -> Self {
        Subgroup { elements: ElemSet::full(group), generators: None }
    }

    /// Smallest subgroup containing `gens`.
    pub fn generated(group: &GroupSpec, gens: &[Elem]) -> Result<Self> {
        let mut h = Subgroup::trivial(group);
        for g in gens {
            group.check_same(g.group())?;
            h = h.join_element(g.index());
        }
        h.generators = Some(gens.to_vec());
        Ok(h)
    }

    /// `<self, g>`, computed as the union of cosets `k*g + self`.
    fn join_element(&self, g: usize) -> Subgroup {
        let group = self.group().clone();
        if self.elements.contains_index(g) {
            return Subgroup { elements: self.elements.clone(), generators: None };
        }
        let base: Vec<usize> = self.elements.indices().collect();
        let mut out = self.elements.clone();
        let mut t = g;
        while !self.elements.contains_index(t) {
            for &h in &base {
                out.insert_index(group.add_index(t, h));
            }
            t = group.add_index(t, g);
        }
        Subgroup { elements: out, generators: None }
    }

    pub fn group(&self) -> &GroupSpec {
        self.elements.group()
    }

    pub fn elements(&self) -> &ElemSet {
        &self.elements
    }

    pub fn generators(&self) -> Option<&[Elem]> {
        self.generators.as_deref()
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index(&self) -> usize {
        self.group().order() / self.order()
    }

    pub fn contains(&self, e: &Elem) -> bool {
        self.elements.contains(e)
    }

    /// Every element satisfies `2x = 0`.
    pub fn is_two_torsion(&self) -> bool {
        let g = self.group();
        self.elements.indices().all(|i| g.double_index(i) == 0)
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> Result<bool> {
        self.elements.is_subset(&other.elements)
    }

    /// Partition of the ambient group into translates `x + H`, ordered by
    /// their smallest element.
    pub fn cosets(&self) -> Vec<ElemSet> {
        let g = self.group();
        let base: Vec<usize> = self.elements.indices().collect();
        let mut seen = ElemSet::empty(g);
        let mut out = Vec::with_capacity(self.index());
        for x in 0..g.order() {
            if seen.contains_index(x) {
                continue;
            }
            let mut coset = ElemSet::empty(g);
            for &h in &base {
                let y = g.add_index(x, h);
                coset.insert_index(y);
                seen.insert_index(y);
            }
            out.push(coset);
        }
        out
    }
}

/// Every subgroup of `group`, deduplicated by element set and sorted by
/// order, then by ascending element indices.
///
/// Builds subgroups by repeatedly adjoining one coset representative at a
/// time starting from the trivial subgroup; every subgroup is reached this
/// way because each is generated by at most `rank` elements.
pub fn enumerate_subgroups(group: &GroupSpec, bound: usize) -> Result<Vec<Subgroup>> {
    if group.order() > bound {
        return Err(Error::capability(format!(
            "subgroup enumeration is bounded to groups of order <= {bound}, got {}",
            group.order()
        )));
    }
    let mut seen: HashSet<ElemSet> = HashSet::new();
    let trivial = Subgroup::trivial(group);
    seen.insert(trivial.elements.clone());
    let mut all = vec![trivial];
    let mut frontier = 0;
    while frontier < all.len() {
        let h = all[frontier].clone();
        frontier += 1;
        for coset in h.cosets() {
            let rep = coset.min_index().expect("nonempty coset");
            if h.elements.contains_index(rep) {
                continue;
            }
            let joined = h.join_element(rep);
            if seen.insert(joined.elements.clone()) {
                all.push(joined);
            }
        }
    }
    all.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.indices().cmp(b.elements.indices())));
    Ok(all)
}
