use crate::error::{Error, Result};
use crate::set::ElemSet;

/// Largest `|A|` accepted by [`phi_brute`].
pub const BRUTE_LIMIT: usize = 24;

/// φ(A) by scanning all `2^|A|` subsets. Shares no code with the
/// branch-and-bound path: pair membership is tested straight from the
/// definition.
pub fn phi_brute(a: &ElemSet) -> Result<usize> {
    let n = a.len();
    if n > BRUTE_LIMIT {
        return Err(Error::capability(format!("brute-force oracle is limited to |A| <= {BRUTE_LIMIT}, got {n}")));
    }
    let g = a.group();
    let elems: Vec<usize> = a.indices().collect();
    let mut clash = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && a.contains_index(g.add_index(elems[i], elems[j])) {
                clash[i] |= 1 << j;
            }
        }
    }
    let mut best = 0;
    for mask in 0u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size <= best {
            continue;
        }
        let mut ok = true;
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            if clash[i] & mask != 0 {
                ok = false;
                break;
            }
        }
        if ok {
            best = size;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    #[test]
    fn small_examples() {
        let z5 = GroupSpec::cyclic(5).unwrap();
        assert_eq!(phi_brute(&ElemSet::from_indices(&z5, [1, 2]).unwrap()).unwrap(), 2);
        let z4 = GroupSpec::cyclic(4).unwrap();
        assert_eq!(phi_brute(&ElemSet::full(&z4)).unwrap(), 1);
        assert_eq!(phi_brute(&ElemSet::empty(&z4)).unwrap(), 0);
    }

    #[test]
    fn refuses_large_sets() {
        let g = GroupSpec::cyclic(30).unwrap();
        assert!(matches!(phi_brute(&ElemSet::full(&g)), Err(Error::Capability(_))));
    }
}
