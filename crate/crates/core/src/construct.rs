//! Explicit set families with known φ behaviour, and the self-checks that
//! go with them.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::group::{Elem, GroupSpec};
use crate::phi::{phi_at_most, phi_exact, zero_sum_pair};
use crate::set::{ElemSet, SetData};
use crate::subgroup::Subgroup;

/// `{(4m+1) 2^j mod 2^n : m in Z, 0 <= j <= n-2}` in `Z/2^n`.
pub fn counter_set(n: u32) -> Result<ElemSet> {
    if n < 4 {
        return Err(Error::usage(format!("counter_set requires n >= 4, got {n}")));
    }
    if n > 24 {
        return Err(Error::capability(format!("counter_set is limited to n <= 24, got {n}")));
    }
    let modulus = 1usize << n;
    let g = GroupSpec::cyclic(modulus as u32)?;
    let mut set = ElemSet::empty(&g);
    for j in 0..=n - 2 {
        for r in (1..modulus).step_by(4) {
            set.insert_index((r << j) % modulus);
        }
    }
    Ok(set)
}

/// Smallest prime factor of `n >= 2`, by trial division.
pub fn smallest_factor(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return d;
        }
        d += 2;
    }
    n
}

/// `A_0 x H` in `Z/p x H` with `p = 2^(k-1) - 1` prime and
/// `A_0 = {2^i mod p : 0 <= i <= k-2}`. A trivial `H` gives plain `Z/p`.
pub fn mersenne_set(k: u32, h: &GroupSpec) -> Result<ElemSet> {
    if k < 4 {
        return Err(Error::usage(format!("mersenne_set requires k >= 4, got {k}")));
    }
    if k > 32 {
        return Err(Error::capability(format!("mersenne_set is limited to k <= 32, got {k}")));
    }
    let p = (1u64 << (k - 1)) - 1;
    let f = smallest_factor(p);
    if f != p {
        return Err(Error::usage(format!("2^{} - 1 = {p} is composite: {f} * {}", k - 1, p / f)));
    }
    let zp = GroupSpec::cyclic(p as u32)?;
    let g = if h.is_trivial() { zp } else { zp.product(h)? };
    let mut set = ElemSet::empty(&g);
    let mut a0 = 1u64;
    for _ in 0..=k - 2 {
        for t in 0..h.order() {
            // Z/p is the least-significant factor
            set.insert_index(a0 as usize + p as usize * t);
        }
        a0 = a0 * 2 % p;
    }
    Ok(set)
}

/// All pairwise sums of distinct elements are distinct.
pub fn is_sidon(b: &ElemSet) -> bool {
    let g = b.group();
    let idx: Vec<usize> = b.indices().collect();
    let mut sums = ElemSet::empty(g);
    for (i, &x) in idx.iter().enumerate() {
        for &y in &idx[i + 1..] {
            if !sums.insert_index(g.add_index(x, y)) {
                return false;
            }
        }
    }
    true
}

/// Randomized greedy Sidon set: elements are tried in a seeded random order
/// and kept when every new pairwise sum is fresh. Stops at `target`
/// elements or when the order is exhausted.
pub fn sidon_greedy(group: &GroupSpec, target: usize, seed: u64) -> ElemSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..group.order()).collect();
    order.shuffle(&mut rng);
    let mut chosen: Vec<usize> = Vec::new();
    let mut sums = ElemSet::empty(group);
    let mut fresh = Vec::new();
    for x in order {
        if chosen.len() >= target {
            break;
        }
        fresh.clear();
        let ok = chosen.iter().all(|&b| {
            let s = group.add_index(x, b);
            fresh.push(s);
            !sums.contains_index(s)
        });
        if ok {
            for &s in &fresh {
                sums.insert_index(s);
            }
            chosen.push(x);
        }
    }
    ElemSet::from_indices(group, chosen).expect("in range")
}

/// `{ceil(N/3), ..., floor(2N/3)}` in `Z/N`.
pub fn interval_set(n: u32) -> Result<ElemSet> {
    if n < 6 {
        return Err(Error::usage(format!("interval_set requires N >= 6, got {n}")));
    }
    let g = GroupSpec::cyclic(n)?;
    let lo = n.div_ceil(3) as usize;
    let hi = (2 * n / 3) as usize;
    ElemSet::from_indices(&g, lo..=hi)
}

fn check_coset_params(h: &Subgroup, x: &Elem) -> Result<()> {
    h.group().check_same(x.group())?;
    if h.contains(x) {
        return Err(Error::usage(format!("x = {x} must lie outside H")));
    }
    if !h.contains(&x.scalar_mul(2)) {
        return Err(Error::usage(format!("2x = {} must lie in H", x.scalar_mul(2))));
    }
    Ok(())
}

/// `H ∪ S` for an explicit `S ⊆ x + H`.
pub fn coset_union(h: &Subgroup, x: &Elem, s: &ElemSet) -> Result<ElemSet> {
    check_coset_params(h, x)?;
    let coset = h.elements().translate(x)?;
    if !s.is_subset(&coset)? {
        return Err(Error::usage("S must be a subset of x + H"));
    }
    h.elements().union(s)
}

/// `H ∪ S` with `S` a seeded random subset of `x + H` holding
/// `round(density * |H|)` elements.
pub fn perturbed_coset(h: &Subgroup, x: &Elem, density: f64, seed: u64) -> Result<ElemSet> {
    check_coset_params(h, x)?;
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::usage(format!("density must lie in [0, 1], got {density}")));
    }
    let mut coset: Vec<usize> = h.elements().translate(x)?.indices().collect();
    let take = (density * coset.len() as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    coset.shuffle(&mut rng);
    let s = ElemSet::from_indices(h.group(), coset.into_iter().take(take))?;
    h.elements().union(&s)
}

pub fn union_subgroups(subgroups: &[Subgroup]) -> Result<ElemSet> {
    let Some(first) = subgroups.first() else {
        return Err(Error::usage("union_subgroups needs at least one subgroup"));
    };
    subgroups.iter().try_fold(ElemSet::empty(first.group()), |acc, h| acc.union(h.elements()))
}

/// A generated set together with the properties it is expected to have.
#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    pub name: String,
    pub parameters: BTreeMap<String, Value>,
    #[serde(rename = "set")]
    pub set_data: SetData,
    pub claimed: BTreeMap<String, Value>,
    pub verified: BTreeMap<String, bool>,
    #[serde(skip)]
    pub set: ElemSet,
}

impl ConstructionReport {
    fn new(name: &str, set: ElemSet) -> Self {
        ConstructionReport {
            name: name.to_string(),
            parameters: BTreeMap::new(),
            set_data: SetData::from(&set),
            claimed: BTreeMap::new(),
            verified: BTreeMap::new(),
            set,
        }
    }

    fn param(mut self, key: &str, value: Value) -> Self {
        self.parameters.insert(key.to_string(), value);
        self
    }

    fn claim(&mut self, key: &str, value: Value, holds: bool) {
        self.claimed.insert(key.to_string(), value);
        self.verified.insert(key.to_string(), holds);
    }

    pub fn all_verified(&self) -> bool {
        self.claimed.keys().all(|k| self.verified.get(k) == Some(&true))
    }
}

fn negation_free(a: &ElemSet) -> bool {
    a.indices().all(|x| !a.contains_index(a.group().neg_index(x)))
}

pub fn counter_report(n: u32) -> Result<ConstructionReport> {
    let a = counter_set(n)?;
    let mut r = ConstructionReport::new("counter", a.clone()).param("n", json!(n));
    let size = (1usize << (n - 1)) - 1;
    r.claim("size", json!(size), a.len() == size);
    r.claim("phi", json!(4), phi_at_most(&a, 4).holds && !phi_at_most(&a, 3).holds);
    r.claim("zero_sum_pair", json!(false), zero_sum_pair(&a, false).is_none());
    r.claim("negation_free", json!(true), negation_free(&a));
    Ok(r)
}

pub fn mersenne_report(k: u32, h: &GroupSpec) -> Result<ConstructionReport> {
    let a = mersenne_set(k, h)?;
    let mut r = ConstructionReport::new("mersenne", a.clone()).param("k", json!(k)).param("h", json!(h.factors()));
    let size = (k as usize - 1) * h.order();
    r.claim("size", json!(size), a.len() == size);
    r.claim("phi", json!(k - 1), phi_exact(&a).phi == k as usize - 1);
    r.claim("zero_sum_pair", json!(false), zero_sum_pair(&a, false).is_none());
    Ok(r)
}

pub fn sidon_report(group: &GroupSpec, target: usize, seed: u64) -> ConstructionReport {
    let b = sidon_greedy(group, target, seed);
    let mut r = ConstructionReport::new("sidon", b.clone())
        .param("group", json!(group.factors()))
        .param("target", json!(target))
        .param("seed", json!(seed));
    r.claim("sidon", json!(true), is_sidon(&b));
    r.parameters.insert("size_over_sqrt_order".into(), json!(b.len() as f64 / (group.order() as f64).sqrt()));
    if group.order() % 2 == 1 && b.len() >= 3 {
        let rest = b.complement();
        r.claim("complement_phi_below_4", json!(true), phi_at_most(&rest, 3).holds);
    }
    r
}

pub fn interval_report(n: u32) -> Result<ConstructionReport> {
    let a = interval_set(n)?;
    let phi = phi_exact(&a).phi;
    let mut r = ConstructionReport::new("interval", a).param("n", json!(n));
    r.parameters.insert("phi".into(), json!(phi));
    r.claim(
        "phi_within_band",
        json!({ "center": n as f64 / 3.0, "band": INTERVAL_BAND }),
        (phi as f64 - n as f64 / 3.0).abs() <= INTERVAL_BAND,
    );
    Ok(r)
}

/// Band for `|phi(interval_set(N)) - N/3|`. The oracle sweep over
/// `12 <= N <= 30` never exceeds 5/3.
pub const INTERVAL_BAND: f64 = 4.0;

pub fn coset_report(h: &Subgroup, x: &Elem, density: f64, seed: u64) -> Result<ConstructionReport> {
    let a = perturbed_coset(h, x, density, seed)?;
    let mut r = ConstructionReport::new("coset", a.clone())
        .param("h", json!(SetData::from(h.elements()).elements))
        .param("x", json!(x.coords()))
        .param("density", json!(density))
        .param("seed", json!(seed));
    r.claim("phi_at_most", json!(2), phi_at_most(&a, 2).holds);
    Ok(r)
}

pub fn union_report(subgroups: &[Subgroup]) -> Result<ConstructionReport> {
    let a = union_subgroups(subgroups)?;
    let m = subgroups.len();
    let mut r = ConstructionReport::new("union", a.clone()).param("count", json!(m));
    r.claim("phi_at_most", json!(m), phi_at_most(&a, m).holds);
    Ok(r)
}
