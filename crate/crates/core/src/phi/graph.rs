use crate::set::ElemSet;

/// Fixed-width bit rows over local vertex ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Bits {
    words: Vec<u64>,
}

impl Bits {
    pub(crate) fn zeros(n: usize) -> Self {
        Bits { words: vec![0; n.div_ceil(64)] }
    }

    pub(crate) fn ones(n: usize) -> Self {
        let mut b = Self::zeros(n);
        for (w, word) in b.words.iter_mut().enumerate() {
            let lo = w * 64;
            let hi = (lo + 64).min(n);
            *word = if hi - lo == 64 { u64::MAX } else { (1u64 << (hi - lo)) - 1 };
        }
        b
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    #[inline]
    pub(crate) fn clear(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    #[inline]
    pub(crate) fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub(crate) fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    pub(crate) fn first(&self) -> Option<usize> {
        self.words.iter().position(|&w| w != 0).map(|w| w * 64 + self.words[w].trailing_zeros() as usize)
    }

    pub(crate) fn and_assign(&mut self, other: &Bits) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    pub(crate) fn copy_from(&mut self, other: &Bits) {
        self.words.copy_from_slice(&other.words);
    }

    /// `self = a & !b`
    pub(crate) fn assign_and_not(&mut self, a: &Bits, b: &Bits) {
        for ((o, x), y) in self.words.iter_mut().zip(&a.words).zip(&b.words) {
            *o = x & !y;
        }
    }

    pub(crate) fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
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
}

/// Graph on the elements of `A` with an edge `{a, b}` whenever `a != b` and
/// `a + b` lies in `A`. Independent sets are exactly the sum-avoiding subsets.
///
/// Vertices are stored in the canonical search order: descending degree,
/// ties by ascending element index.
#[derive(Clone, Debug)]
pub struct CollisionGraph {
    set: ElemSet,
    vertices: Vec<usize>,
    adjacency: Vec<Bits>,
}

impl CollisionGraph {
    pub fn new(set: &ElemSet) -> Self {
        let g = set.group();
        let natural: Vec<usize> = set.indices().collect();
        let n = natural.len();
        let mut rows = vec![Bits::zeros(n); n];
        for i in 0..n {
            for j in i + 1..n {
                if set.contains_index(g.add_index(natural[i], natural[j])) {
                    rows[i].set(j);
                    rows[j].set(i);
                }
            }
        }
        let degree: Vec<usize> = rows.iter().map(Bits::count).collect();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by(|&a, &b| degree[b].cmp(&degree[a]).then(natural[a].cmp(&natural[b])));
        let mut pos = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            pos[old] = new;
        }
        let adjacency = perm
            .iter()
            .map(|&old| {
                let mut row = Bits::zeros(n);
                for j in rows[old].iter() {
                    row.set(pos[j]);
                }
                row
            })
            .collect();
        CollisionGraph { set: set.clone(), vertices: perm.iter().map(|&old| natural[old]).collect(), adjacency }
    }

    pub fn set(&self) -> &ElemSet {
        &self.set
    }

    /// Element indices of the vertices, in canonical order.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].get(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].count()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.len()).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    pub(crate) fn row(&self, v: usize) -> &Bits {
        &self.adjacency[v]
    }

    pub(crate) fn to_set(&self, local: &[usize]) -> ElemSet {
        ElemSet::from_indices(self.set.group(), local.iter().map(|&v| self.vertices[v])).expect("vertices are in range")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    #[test]
    fn edges_follow_definition() {
        let g = GroupSpec::cyclic(8).unwrap();
        let a = ElemSet::from_indices(&g, [0, 2, 4]).unwrap();
        let cg = CollisionGraph::new(&a);
        assert_eq!(cg.len(), 3);
        // 0+2=2, 0+4=4 are in A; 2+4=6 is not
        assert_eq!(cg.edge_count(), 2);
        let v0 = cg.vertices().iter().position(|&x| x == 0).unwrap();
        assert_eq!(v0, 0, "highest degree first");
        for u in 0..3 {
            assert!(!cg.adjacent(u, u));
            for v in 0..3 {
                assert_eq!(cg.adjacent(u, v), cg.adjacent(v, u));
            }
        }
    }

    #[test]
    fn doubling_does_not_create_loops() {
        let g = GroupSpec::cyclic(7).unwrap();
        let a = ElemSet::from_indices(&g, [1, 2, 4]).unwrap();
        let cg = CollisionGraph::new(&a);
        assert_eq!(cg.edge_count(), 0);
    }

    #[test]
    fn bits_ones_and_first() {
        let b = Bits::ones(70);
        assert_eq!(b.count(), 70);
        assert_eq!(b.first(), Some(0));
        let mut z = Bits::zeros(70);
        z.set(69);
        assert_eq!(z.first(), Some(69));
        z.clear(69);
        assert!(z.is_empty());
    }
}
