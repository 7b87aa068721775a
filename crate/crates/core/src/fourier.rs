//! Direct Fourier analysis on a finite abelian group or one of its subgroups,
//! the doubling statistic, and the multilinear form
//! `Λ = |H|^-k Σ Π f_i(x_i) Π f_ij(x_i + x_j)`.

use std::collections::HashMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{lcm, Elem, GroupSpec};
use crate::set::ElemSet;
use crate::subgroup::Subgroup;

/// Largest domain the direct transform accepts.
pub const MAX_DFT_ORDER: usize = 1 << 12;
/// Budget on `|H|^k` for the k-fold enumerations.
pub const MAX_TUPLES: u64 = 100_000_000;
/// Slack for inequalities derived from computed quantities.
pub const INEQUALITY_SLACK: f64 = 1e-9;

/// A character `x ↦ Σ ξ_i x_i / n_i mod 1`, stored by its coordinates in the
/// ambient group's dual.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Character {
    pub xi: Vec<u64>,
}

impl Character {
    /// The phase `ξ·x` in `[0, 1)`.
    pub fn pairing(&self, x: &Elem) -> Ratio<u64> {
        let factors = x.group().factors();
        let l = factors.iter().fold(1u64, |acc, &n| lcm(acc, n as u64));
        let mut num = 0u64;
        for ((&xi, c), &n) in self.xi.iter().zip(x.coords()).zip(factors) {
            num = (num + xi * c % n as u64 * (l / n as u64)) % l;
        }
        Ratio::new(num, l)
    }
}

/// The points of `H` (ascending ambient index) and its dual, realised as
/// ambient characters deduplicated by their restriction to `H`.
#[derive(Clone, Debug)]
pub struct Domain {
    group: GroupSpec,
    elements: Vec<usize>,
    position: Vec<Option<usize>>,
    coords: Vec<Vec<u64>>,
    characters: Vec<Character>,
    /// `ξ_i * (L / n_i)` per character, so the phase numerator is a dot product.
    weights: Vec<Vec<u64>>,
    /// Class of every ambient character.
    class_of: Vec<usize>,
    /// Ambient index of each class representative.
    rep: Vec<usize>,
    add: Vec<Vec<u32>>,
    l: u64,
    roots: Vec<Complex64>,
}

impl Domain {
    pub fn whole(group: &GroupSpec) -> Result<Self> {
        Self::build(group, (0..group.order()).collect())
    }

    pub fn subgroup(h: &Subgroup) -> Result<Self> {
        Self::build(h.group(), h.elements().indices().collect())
    }

    fn build(group: &GroupSpec, elements: Vec<usize>) -> Result<Self> {
        let size = elements.len();
        if size > MAX_DFT_ORDER {
            return Err(Error::capability(format!(
                "direct Fourier transform is limited to |H| <= {MAX_DFT_ORDER}, got {size}"
            )));
        }
        let factors = group.factors();
        let l = factors.iter().fold(1u64, |acc, &n| lcm(acc, n as u64));
        let mut position = vec![None; group.order()];
        for (p, &e) in elements.iter().enumerate() {
            position[e] = Some(p);
        }
        let coords: Vec<Vec<u64>> = elements.iter().map(|&e| group.decode(e)).collect();
        let weight_of = |xi: usize| -> Vec<u64> {
            group.decode(xi).iter().zip(factors).map(|(&c, &n)| c * (l / n as u64)).collect()
        };
        let phase = |w: &[u64], x: &[u64]| -> u64 { w.iter().zip(x).map(|(a, b)| a * b).sum::<u64>() % l };

        let mut class_of = vec![0; group.order()];
        let mut rep = Vec::with_capacity(size);
        if size == group.order() {
            for (xi, c) in class_of.iter_mut().enumerate() {
                *c = xi;
                rep.push(xi);
            }
        } else {
            let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
            for (xi, c) in class_of.iter_mut().enumerate() {
                let w = weight_of(xi);
                let sig: Vec<u64> = coords.iter().map(|x| phase(&w, x)).collect();
                let next = seen.len();
                *c = *seen.entry(sig).or_insert_with(|| {
                    rep.push(xi);
                    next
                });
            }
        }
        if rep.len() != size {
            return Err(Error::Claim(format!("dual has {} characters, expected {size}", rep.len())));
        }
        let characters = rep.iter().map(|&xi| Character { xi: group.decode(xi) }).collect();
        let weights = rep.iter().map(|&xi| weight_of(xi)).collect();
        let add = elements
            .iter()
            .map(|&a| elements.iter().map(|&b| position[group.add_index(a, b)].expect("closed") as u32).collect())
            .collect();
        let roots = (0..l).map(|t| Complex64::from_polar(1.0, -TAU * t as f64 / l as f64)).collect();
        Ok(Domain {
            group: group.clone(),
            elements,
            position,
            coords,
            characters,
            weights,
            class_of,
            rep,
            add,
            l,
            roots,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Ambient indices of the points, in position order.
    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn position(&self, ambient: usize) -> Option<usize> {
        self.position.get(ambient).copied().flatten()
    }

    pub fn characters(&self) -> &[Character] {
        &self.characters
    }

    /// Position of `x + y`.
    pub fn add(&self, x: usize, y: usize) -> usize {
        self.add[x][y] as usize
    }

    /// Position of the character `2ξ`.
    pub fn double_char(&self, c: usize) -> usize {
        self.class_of[self.group.double_index(self.rep[c])]
    }

    /// Position of the character `-ξ`.
    pub fn neg_char(&self, c: usize) -> usize {
        self.class_of[self.group.neg_index(self.rep[c])]
    }

    /// `e^{-2πi ξ·x}` for character `c` and point `x`.
    fn kernel(&self, c: usize, x: usize) -> Complex64 {
        let t: u64 = self.weights[c].iter().zip(&self.coords[x]).map(|(a, b)| a * b).sum::<u64>() % self.l;
        self.roots[t as usize]
    }

    /// `1_{S ∩ H}` as a function on the domain.
    pub fn indicator(&self, s: &ElemSet) -> Result<Vec<f64>> {
        self.group.check_same(s.group())?;
        Ok(self.elements.iter().map(|&e| if s.contains_index(e) { 1.0 } else { 0.0 }).collect())
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::usage(format!("function has {} values, domain has {}", f.len(), self.len())));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FourierTable {
    /// One coefficient per character, in the domain's character order.
    pub coeffs: Vec<Complex64>,
    /// `|A ∩ H| / |H|` when built from an indicator.
    pub source_density: Option<f64>,
}

impl FourierTable {
    pub fn sup(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest magnitude away from the trivial character, which is always
    /// first.
    pub fn sup_nonzero(&self) -> f64 {
        self.coeffs.iter().skip(1).map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// `f̂(ξ) = |H|^-1 Σ_x f(x) e^{-2πi ξ·x}`, evaluated directly.
pub fn dft(domain: &Domain, f: &[f64]) -> Result<FourierTable> {
    domain.check_len(f)?;
    let n = domain.len() as f64;
    let coeffs = (0..domain.len())
        .map(|c| f.iter().enumerate().map(|(x, &v)| domain.kernel(c, x) * v).sum::<Complex64>() / n)
        .collect();
    Ok(FourierTable { coeffs, source_density: None })
}

pub fn dft_indicator(domain: &Domain, s: &ElemSet) -> Result<FourierTable> {
    let f = domain.indicator(s)?;
    let density = f.iter().sum::<f64>() / domain.len() as f64;
    let mut t = dft(domain, &f)?;
    t.source_density = Some(density);
    Ok(t)
}

/// `f(x) = Σ_ξ f̂(ξ) e^{2πi ξ·x}`.
pub fn idft(domain: &Domain, table: &FourierTable) -> Result<Vec<Complex64>> {
    if table.coeffs.len() != domain.len() {
        return Err(Error::usage("coefficient table does not match the domain"));
    }
    Ok((0..domain.len())
        .map(|x| table.coeffs.iter().enumerate().map(|(c, &v)| v * domain.kernel(c, x).conj()).sum())
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DoublingStat {
    /// `|H|^-1 Σ_{x∈H} |1_{A∩H}(x) - 1_{A∩H}(2x)|`.
    pub value: f64,
    /// Doubling is a bijection on `H` only when `|H|` is odd.
    pub odd_order: bool,
}

pub fn doubling_stat(a: &ElemSet, h: &Subgroup) -> Result<DoublingStat> {
    a.group().check_same(h.group())?;
    let g = a.group();
    let moved = h.elements().indices().filter(|&x| a.contains_index(x) != a.contains_index(g.double_index(x))).count();
    Ok(DoublingStat { value: moved as f64 / h.order() as f64, odd_order: h.order() % 2 == 1 })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GapReport {
    pub order: usize,
    pub density: f64,
    pub doubling_stat: f64,
    /// Measured: a quarter of the doubling statistic.
    pub eps1: f64,
    /// The `ε_1` used for the uniformity scale (measured unless supplied).
    pub eps1_scale: f64,
    pub horizon: u32,
    /// Pairs `(ξ, j)` with `|f̂(2^j ξ) - f̂(ξ)| > 4 j ε_1 + slack`.
    pub violations: usize,
    /// Largest `|f̂(2^j ξ) - f̂(ξ)| - 4 j ε_1` seen.
    pub max_excess: f64,
    pub sup_nonzero: f64,
    pub eps1_quarter_power: f64,
    /// `sup_{ξ≠0} |f̂(ξ)| < ε_1^{1/4}`.
    pub fourier_uniform: bool,
}

/// Checks the iterated doubling inequality for `f = 1_{A∩H}` at every
/// character and every `j <= horizon`.
pub fn fourier_gap_check(a: &ElemSet, h: &Subgroup, eps1: Option<f64>, horizon: u32) -> Result<GapReport> {
    if h.order().is_multiple_of(2) {
        return Err(Error::usage(format!("doubling is not a bijection on a subgroup of even order {}", h.order())));
    }
    let stat = doubling_stat(a, h)?.value;
    let eps1_measured = stat / 4.0;
    let domain = Domain::subgroup(h)?;
    let table = dft_indicator(&domain, a)?;
    let mut violations = 0;
    let mut max_excess = f64::NEG_INFINITY;
    for c in 0..domain.len() {
        let base = table.coeffs[c];
        let mut cur = c;
        for j in 1..=horizon {
            cur = domain.double_char(cur);
            let excess = (table.coeffs[cur] - base).norm() - j as f64 * stat;
            max_excess = max_excess.max(excess);
            if excess > INEQUALITY_SLACK {
                violations += 1;
            }
        }
    }
    let eps1_scale = eps1.unwrap_or(eps1_measured);
    let quarter = eps1_scale.powf(0.25);
    let sup_nonzero = table.sup_nonzero();
    Ok(GapReport {
        order: h.order(),
        density: table.source_density.unwrap_or(0.0),
        doubling_stat: stat,
        eps1: eps1_measured,
        eps1_scale,
        horizon,
        violations,
        max_excess: if horizon == 0 { 0.0 } else { max_excess },
        sup_nonzero,
        eps1_quarter_power: quarter,
        fourier_uniform: sup_nonzero < quarter,
    })
}

fn check_k(k: usize) -> Result<()> {
    if !(3..=4).contains(&k) {
        return Err(Error::usage(format!("k must be 3 or 4, got {k}")));
    }
    Ok(())
}

fn check_budget(order: usize, k: usize) -> Result<()> {
    let tuples = (order as u64).checked_pow(k as u32).unwrap_or(u64::MAX);
    if tuples > MAX_TUPLES {
        return Err(Error::capability(format!("|H|^k = {order}^{k} exceeds the budget of {MAX_TUPLES} tuples")));
    }
    Ok(())
}

/// Pairs `(i, j)` with `i < j`, in lexicographic order.
pub fn pair_index(k: usize) -> Vec<(usize, usize)> {
    (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect()
}

/// Number of `x_1..x_k ∈ A ∩ H` with every `x_i + x_j ∈ B ∩ H`, i.e. the
/// solutions of `x_i + x_j - x_ij = 0` with `x_ij ∈ B`.
pub fn count_m_solutions(k: usize, a: &ElemSet, b: &ElemSet, h: &Subgroup) -> Result<u64> {
    check_k(k)?;
    a.group().check_same(b.group())?;
    a.group().check_same(h.group())?;
    check_budget(h.order(), k)?;
    let g = a.group();
    let xs: Vec<usize> = a.intersection(h.elements())?.indices().collect();
    let bh = b.intersection(h.elements())?;
    fn extend(g: &GroupSpec, xs: &[usize], b: &ElemSet, k: usize, chosen: &mut Vec<usize>) -> u64 {
        if chosen.len() == k {
            return 1;
        }
        let mut total = 0;
        for &x in xs {
            if chosen.iter().all(|&y| b.contains_index(g.add_index(x, y))) {
                chosen.push(x);
                total += extend(g, xs, b, k, chosen);
                chosen.pop();
            }
        }
        total
    }
    Ok(extend(g, &xs, &bh, k, &mut Vec::with_capacity(k)))
}

/// `Λ(f_1..f_k, (f_ij))` by direct k-fold summation. `fijs` follows
/// [`pair_index`] order. The outer index is split across threads; partial
/// sums are combined in index order, so the value does not depend on the
/// thread count.
pub fn lambda_form(domain: &Domain, fs: &[Vec<f64>], fijs: &[Vec<f64>]) -> Result<f64> {
    let k = fs.len();
    check_k(k)?;
    let pairs = pair_index(k);
    if fijs.len() != pairs.len() {
        return Err(Error::usage(format!("k = {k} needs {} pair functions, got {}", pairs.len(), fijs.len())));
    }
    for f in fs.iter().chain(fijs) {
        domain.check_len(f)?;
    }
    let n = domain.len();
    check_budget(n, k)?;

    struct Ctx<'a> {
        domain: &'a Domain,
        fs: &'a [Vec<f64>],
        fijs: &'a [Vec<f64>],
        pairs: &'a [(usize, usize)],
        k: usize,
    }
    fn inner(ctx: &Ctx, xs: &mut [usize], depth: usize, acc: f64) -> f64 {
        if depth == ctx.k {
            return acc;
        }
        let mut total = 0.0;
        for x in 0..ctx.domain.len() {
            let mut v = acc * ctx.fs[depth][x];
            if v == 0.0 {
                continue;
            }
            for (p, &(i, j)) in ctx.pairs.iter().enumerate() {
                if j == depth {
                    v *= ctx.fijs[p][ctx.domain.add(xs[i], x)];
                }
            }
            if v != 0.0 {
                xs[depth] = x;
                total += inner(ctx, xs, depth + 1, v);
            }
        }
        total
    }
    let ctx = Ctx { domain, fs, fijs, pairs: &pairs, k };
    let partial: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|x0| {
            let mut xs = vec![0; k];
            xs[0] = x0;
            let v = fs[0][x0];
            if v == 0.0 {
                0.0
            } else {
                inner(&ctx, &mut xs, 1, v)
            }
        })
        .collect();
    let sum: f64 = partial.iter().sum();
    Ok(sum / (n as f64).powi(k as i32))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LambdaBoundReport {
    pub lambda: f64,
    pub sup_f: Vec<f64>,
    pub sup_fij: Vec<f64>,
    /// `min_i sup |f̂_i| - |Λ|`.
    pub slack_single: f64,
    /// `min_ij sup |f̂_ij| - |Λ|`.
    pub slack_pair: f64,
    pub holds: bool,
}

/// Compares `|Λ|` with the sup-norm of every argument's transform. All
/// values must lie in `[-1, 1]`.
pub fn lambda_bound_check(domain: &Domain, fs: &[Vec<f64>], fijs: &[Vec<f64>]) -> Result<LambdaBoundReport> {
    if let Some(v) = fs.iter().chain(fijs).flatten().find(|v| !(-1.0..=1.0).contains(*v)) {
        return Err(Error::usage(format!("function value {v} lies outside [-1, 1]")));
    }
    let lambda = lambda_form(domain, fs, fijs)?;
    let sups = |list: &[Vec<f64>]| -> Result<Vec<f64>> { list.iter().map(|f| Ok(dft(domain, f)?.sup())).collect() };
    let sup_f = sups(fs)?;
    let sup_fij = sups(fijs)?;
    let min = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let slack_single = min(&sup_f) - lambda.abs();
    let slack_pair = min(&sup_fij) - lambda.abs();
    Ok(LambdaBoundReport {
        lambda,
        sup_f,
        sup_fij,
        slack_single,
        slack_pair,
        holds: slack_single >= -INEQUALITY_SLACK && slack_pair >= -INEQUALITY_SLACK,
    })
}

pub fn binomial2(k: usize) -> usize {
    k * (k - 1) / 2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndicatorLambda {
    pub k: usize,
    pub order: usize,
    pub density: f64,
    pub lambda: f64,
    pub count: u64,
    /// `count / |H|^k`.
    pub count_normalized: f64,
    /// `σ^k (1-σ)^{k(k-1)/2}`.
    pub main_term: f64,
    pub deviation: f64,
    /// `k(k-1)/2 / |H|`.
    pub diagonal_bound: f64,
}

/// `Λ(1_{A∩H}, ..., (1_{H∖A}))` alongside the solution count and the main
/// term it is compared with.
pub fn indicator_lambda(a: &ElemSet, h: &Subgroup, k: usize) -> Result<IndicatorLambda> {
    let domain = Domain::subgroup(h)?;
    let fa = domain.indicator(a)?;
    let fb: Vec<f64> = fa.iter().map(|v| 1.0 - v).collect();
    let fs = vec![fa; k];
    let fijs = vec![fb; binomial2(k)];
    let lambda = lambda_form(&domain, &fs, &fijs)?;
    let complement = h.elements().difference(a)?;
    let count = count_m_solutions(k, a, &complement, h)?;
    let order = h.order();
    let density = a.intersection_len(h.elements())? as f64 / order as f64;
    let main_term = density.powi(k as i32) * (1.0 - density).powi(binomial2(k) as i32);
    Ok(IndicatorLambda {
        k,
        order,
        density,
        lambda,
        count,
        count_normalized: count as f64 / (order as f64).powi(k as i32),
        main_term,
        deviation: (lambda - main_term).abs(),
        diagonal_bound: binomial2(k) as f64 / order as f64,
    })
}
