//! Covering certificates: subgroups `H_1..H_m` (m <= k) with a residual set
//! `A \ (H_1 ∪ ... ∪ H_m)`, scored by
//! `C = max(|residual|, max_i |H_i| / |A ∩ H_i|)`.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::construct::smallest_factor;
use crate::error::{Error, Result};
use crate::phi::{phi_exact, zero_sum_pair};
use crate::set::{ElemSet, SetData};
use crate::subgroup::{enumerate_subgroups, Subgroup};

pub type Rational = Ratio<u64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverCertificate {
    pub k: usize,
    pub subgroups: Vec<Subgroup>,
    pub residual: ElemSet,
    pub achieved_c: Rational,
    /// `m = k` and the residual is empty.
    pub strengthened: bool,
}

impl CoverCertificate {
    /// Builds the certificate for a given subgroup choice, with the exact
    /// constant. Fails if some `H_i` misses `A` entirely.
    pub fn compute(a: &ElemSet, k: usize, subgroups: Vec<Subgroup>) -> Result<Self> {
        let mut covered = ElemSet::empty(a.group());
        let mut c = Rational::from_integer(0);
        for h in &subgroups {
            a.group().check_same(h.group())?;
            let hit = a.intersection_len(h.elements())?;
            if hit == 0 {
                return Err(Error::usage("cover subgroup is disjoint from A"));
            }
            c = c.max(Rational::new(h.order() as u64, hit as u64));
            covered = covered.union(h.elements())?;
        }
        let residual = a.difference(&covered)?;
        c = c.max(Rational::from_integer(residual.len() as u64));
        let strengthened = subgroups.len() == k && residual.is_empty();
        Ok(CoverCertificate { k, subgroups, residual, achieved_c: c, strengthened })
    }

    pub fn m(&self) -> usize {
        self.subgroups.len()
    }

    pub fn summary(&self) -> CoverSummary {
        CoverSummary {
            k: self.k,
            m: self.m(),
            subgroup_orders: self.subgroups.iter().map(Subgroup::order).collect(),
            subgroups: self.subgroups.iter().map(|h| SetData::from(h.elements()).elements).collect(),
            residual: SetData::from(&self.residual).elements,
            achieved_c: format_ratio(self.achieved_c),
            achieved_c_value: ratio_value(self.achieved_c),
            strengthened: self.strengthened,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoverSummary {
    pub k: usize,
    pub m: usize,
    pub subgroup_orders: Vec<usize>,
    pub subgroups: Vec<Vec<Vec<u64>>>,
    pub residual: Vec<Vec<u64>>,
    pub achieved_c: String,
    pub achieved_c_value: f64,
    pub strengthened: bool,
}

pub fn format_ratio(r: Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ratio_value(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Checks every certificate invariant against `a` using the certificate's
/// own claimed constant.
pub fn verify_cover(a: &ElemSet, cert: &CoverCertificate) -> Result<bool> {
    let mut covered = ElemSet::empty(a.group());
    for h in &cert.subgroups {
        a.group().check_same(h.group())?;
        covered = covered.union(h.elements())?;
    }
    a.group().check_same(cert.residual.group())?;
    let c = cert.achieved_c;
    let density_ok = cert.subgroups.iter().all(|h| {
        let hit = a.intersection_len(h.elements()).expect("same group") as u64;
        Rational::from_integer(hit) * c >= Rational::from_integer(h.order() as u64)
    });
    let ok = cert.m() <= cert.k
        && cert.residual == a.difference(&covered)?
        && density_ok
        && Rational::from_integer(cert.residual.len() as u64) <= c
        && (!cert.strengthened || (cert.m() == cert.k && cert.residual.is_empty()));
    Ok(ok)
}

/// Preference order for certificates: exact covers (empty residual) first,
/// ranked by fewest subgroups and then smallest constant; covers with a
/// residual after that, ranked by constant and then subgroup count. The
/// final tie-break is the candidate index tuple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Rank {
    Exact { m: usize, c: Rational, picks: Vec<usize> },
    Residual { c: Rational, m: usize, picks: Vec<usize> },
}

struct Candidate {
    sub: Subgroup,
    hit: usize,
    ratio: Rational,
}

struct CoverSearch<'a> {
    a: &'a ElemSet,
    cands: &'a [Candidate],
    k: usize,
    c_max: Option<Rational>,
}

impl CoverSearch<'_> {
    fn rank(&self, picks: &[usize], covered: &ElemSet, density: Rational) -> Option<Rank> {
        let residual = self.a.len() - self.a.intersection_len(covered).expect("same group");
        let c = density.max(Rational::from_integer(residual as u64));
        if self.c_max.is_some_and(|cm| c > cm) {
            return None;
        }
        let (m, picks) = (picks.len(), picks.to_vec());
        Some(if residual == 0 { Rank::Exact { m, c, picks } } else { Rank::Residual { c, m, picks } })
    }

    fn extend(&self, picks: &mut Vec<usize>, covered: &ElemSet, density: Rational, best: &mut Option<Rank>) {
        if let Some(r) = self.rank(picks, covered, density) {
            if best.as_ref().is_none_or(|b| r < *b) {
                *best = Some(r);
            }
        }
        if picks.len() == self.k {
            return;
        }
        let start = picks.last().map_or(0, |&i| i + 1);
        for j in start..self.cands.len() {
            let d = density.max(self.cands[j].ratio);
            if self.c_max.is_some_and(|cm| d > cm) {
                continue;
            }
            let next = covered.union(self.cands[j].sub.elements()).expect("same group");
            picks.push(j);
            self.extend(picks, &next, d, best);
            picks.pop();
        }
    }
}

/// Best certificate with at most `k` subgroups and constant at most `c_max`
/// (no cap when `None`), searching every subgroup tuple of the ambient group.
pub fn find_cover(a: &ElemSet, k: usize, c_max: Option<Rational>, bound: usize) -> Result<Option<CoverCertificate>> {
    if k == 0 {
        return Err(Error::usage("find_cover requires k >= 1"));
    }
    let mut cands: Vec<Candidate> = enumerate_subgroups(a.group(), bound)?
        .into_iter()
        .filter_map(|sub| {
            let hit = a.intersection_len(sub.elements()).expect("same group");
            (hit > 0).then(|| Candidate { ratio: Rational::new(sub.order() as u64, hit as u64), sub, hit })
        })
        .collect();
    // stable: equal intersections keep enumeration order
    cands.sort_by_key(|c| std::cmp::Reverse(c.hit));

    let search = CoverSearch { a, cands: &cands, k, c_max };
    let empty = ElemSet::empty(a.group());
    let zero = Rational::from_integer(0);
    let mut best = search.rank(&[], &empty, zero);
    let per_first: Vec<Option<Rank>> = (0..cands.len())
        .into_par_iter()
        .map(|j| {
            let d = cands[j].ratio;
            if c_max.is_some_and(|cm| d > cm) {
                return None;
            }
            let mut local = None;
            search.extend(&mut vec![j], cands[j].sub.elements(), d, &mut local);
            local
        })
        .collect();
    for r in per_first.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| r < *b) {
            best = Some(r);
        }
    }
    let Some(rank) = best else { return Ok(None) };
    let picks = match rank {
        Rank::Exact { picks, .. } | Rank::Residual { picks, .. } => picks,
    };
    let subs = picks.iter().map(|&i| cands[i].sub.clone()).collect();
    let cert = CoverCertificate::compute(a, k, subs)?;
    debug_assert!(verify_cover(a, &cert)?);
    Ok(Some(cert))
}

#[derive(Clone, Debug, Serialize)]
pub struct OddProbeReport {
    pub group_order: usize,
    pub smallest_prime_factor: u64,
    pub phi: usize,
    /// Smallest `k` with `phi(A) < k`.
    pub k: usize,
    pub eps: f64,
    pub best_density: f64,
    pub best_subgroup_order: usize,
    /// Subgroups of density above `1 - eps` used by the best dense cover.
    pub dense_cover_orders: Vec<usize>,
    /// Smallest residual reachable with fewer than `k` dense subgroups.
    pub dense_cover_residual: usize,
    /// The best dense cover uses `k - 1` subgroups and leaves nothing over.
    pub dense_cover_exact_at_k_minus_1: bool,
    pub density_above_half: bool,
    /// A zero-sum pair inside `A ∩ H` for the densest subgroup, when its
    /// density exceeds 1/2.
    pub zero_sum_in_dense_subgroup: Option<bool>,
    pub zero_sum_in_a: bool,
}

/// Records how `A` sits against its densest subgroups. Observational only:
/// nothing here is asserted to pass or fail.
pub fn theorem_odd_probe(a: &ElemSet, eps: f64, bound: usize) -> Result<OddProbeReport> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::usage(format!("eps must lie in (0, 1), got {eps}")));
    }
    let g = a.group();
    let subs = enumerate_subgroups(g, bound)?;
    let phi = phi_exact(a).phi;
    let k = phi + 1;
    let density = |h: &Subgroup| a.intersection_len(h.elements()).expect("same group") as f64 / h.order() as f64;
    let nontrivial: Vec<&Subgroup> = subs.iter().filter(|h| h.order() > 1 || g.is_trivial()).collect();
    let best = nontrivial
        .iter()
        .copied()
        .max_by(|x, y| density(x).total_cmp(&density(y)).then(y.order().cmp(&x.order())))
        .expect("at least one subgroup");
    let best_density = density(best);

    let dense: Vec<&Subgroup> = subs.iter().filter(|h| density(h) > 1.0 - eps).collect();
    let mut best_cover: (usize, Vec<usize>) = (a.len(), Vec::new());
    let mut stack: Vec<(usize, ElemSet, Vec<usize>)> = vec![(0, ElemSet::empty(g), Vec::new())];
    while let Some((start, covered, picks)) = stack.pop() {
        let residual = a.difference(&covered)?.len();
        if (residual, picks.len()) < (best_cover.0, best_cover.1.len()) {
            best_cover = (residual, picks.clone());
        }
        if picks.len() + 1 >= k {
            continue;
        }
        for (j, h) in dense.iter().enumerate().skip(start) {
            let mut p = picks.clone();
            p.push(j);
            stack.push((j + 1, covered.union(h.elements())?, p));
        }
    }
    let dense_cover_orders: Vec<usize> = best_cover.1.iter().map(|&j| dense[j].order()).collect();

    let zero_sum_in_dense_subgroup = (best_density > 0.5)
        .then(|| zero_sum_pair(&a.intersection(best.elements()).expect("same group"), false).is_some());
    Ok(OddProbeReport {
        group_order: g.order(),
        smallest_prime_factor: if g.order() > 1 { smallest_factor(g.order() as u64) } else { 1 },
        phi,
        k,
        eps,
        best_density,
        best_subgroup_order: best.order(),
        dense_cover_exact_at_k_minus_1: best_cover.0 == 0 && dense_cover_orders.len() + 1 == k,
        dense_cover_orders,
        dense_cover_residual: best_cover.0,
        density_above_half: best_density > 0.5,
        zero_sum_in_dense_subgroup,
        zero_sum_in_a: zero_sum_pair(a, false).is_some(),
    })
}
