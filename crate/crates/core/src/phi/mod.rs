//! φ(A): the size of a largest subset of `A` in which no two distinct
//! elements sum into `A`.

mod brute;
mod graph;
mod search;

use std::time::{Duration, Instant};

pub use brute::{phi_brute, BRUTE_LIMIT};
pub use graph::CollisionGraph;

use crate::error::{Error, Result};
use crate::group::{Elem, GroupSpec};
use crate::set::ElemSet;
use search::Mode;

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Worker threads; `1` runs the plain sequential search.
    pub threads: usize,
    /// Abort with [`Error::Budget`] after this many search nodes.
    pub node_limit: Option<u64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { threads: 1, node_limit: None }
    }
}

#[derive(Clone, Debug)]
pub struct PhiResult {
    pub phi: usize,
    pub witness: ElemSet,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

#[derive(Clone, Debug)]
pub struct AtMost {
    /// `phi(A) <= k`.
    pub holds: bool,
    /// A sum-avoiding subset of size `k + 1` when `holds` is false.
    pub refutation: Option<ElemSet>,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

/// No two distinct elements of `b` sum into `a`. Requires `b ⊆ a`.
pub fn is_sum_avoiding(b: &ElemSet, a: &ElemSet) -> Result<bool> {
    if !b.is_subset(a)? {
        return Err(Error::usage("sum-avoiding test requires B to be a subset of A"));
    }
    let g = a.group();
    let idx: Vec<usize> = b.indices().collect();
    for (i, &x) in idx.iter().enumerate() {
        for &y in &idx[i + 1..] {
            if a.contains_index(g.add_index(x, y)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn run(graph: &CollisionGraph, mode: Mode, opts: &SolverOptions) -> Result<search::Outcome> {
    let limit = opts.node_limit.unwrap_or(u64::MAX);
    if opts.threads > 1 {
        search::run_parallel(graph, mode, limit, opts.threads)
    } else {
        search::run_sequential(graph, mode, limit)
    }
}

/// Exact φ(A) with a canonical witness. φ(∅) = 0.
pub fn phi_exact(a: &ElemSet) -> PhiResult {
    phi_exact_with(a, &SolverOptions::default()).expect("unbounded search cannot exhaust its budget")
}

pub fn phi_exact_with(a: &ElemSet, opts: &SolverOptions) -> Result<PhiResult> {
    let start = Instant::now();
    let graph = CollisionGraph::new(a);
    let out = run(&graph, Mode::Maximize, opts)?;
    let witness = graph.to_set(&out.witness);
    if witness.len() != out.best || !is_sum_avoiding(&witness, a)? {
        return Err(Error::Claim(format!("solver produced an invalid witness {witness:?}")));
    }
    Ok(PhiResult { phi: out.best, witness, nodes_explored: out.nodes, elapsed: start.elapsed() })
}

/// Decides `phi(A) <= k`, stopping at the first sum-avoiding set of size
/// `k + 1`.
pub fn phi_at_most(a: &ElemSet, k: usize) -> AtMost {
    phi_at_most_with(a, k, &SolverOptions::default()).expect("unbounded search cannot exhaust its budget")
}

pub fn phi_at_most_with(a: &ElemSet, k: usize, opts: &SolverOptions) -> Result<AtMost> {
    let start = Instant::now();
    if k >= a.len() {
        return Ok(AtMost { holds: true, refutation: None, nodes_explored: 0, elapsed: start.elapsed() });
    }
    let graph = CollisionGraph::new(a);
    let out = run(&graph, Mode::Exceed(k), opts)?;
    let refutation = if out.witness.is_empty() {
        None
    } else {
        let w = graph.to_set(&out.witness);
        if w.len() != k + 1 || !is_sum_avoiding(&w, a)? {
            return Err(Error::Claim(format!("decision search produced an invalid witness {w:?}")));
        }
        Some(w)
    };
    Ok(AtMost { holds: refutation.is_none(), refutation, nodes_explored: out.nodes, elapsed: start.elapsed() })
}

/// Some `(a1, a2)` in `A x A` with `a1 + a2 = 0`. Equal elements are allowed
/// unless `distinct` is set. Returns the pair with the smallest first index.
pub fn zero_sum_pair(a: &ElemSet, distinct: bool) -> Option<(Elem, Elem)> {
    let g = a.group();
    a.indices()
        .find(|&x| {
            let y = g.neg_index(x);
            a.contains_index(y) && !(distinct && x == y)
        })
        .map(|x| (g.elem(x).unwrap(), g.elem(g.neg_index(x)).unwrap()))
}

/// Embeds nonnegative integers into `Z/M` with `M = 2 * max + 1`, so no sum
/// of two distinct elements wraps around. Returns the set and `M`.
pub fn embed_integers(values: &[u64]) -> Result<(ElemSet, u32)> {
    let max = values.iter().copied().max().unwrap_or(0);
    let m = u32::try_from(2 * max + 1).map_err(|_| Error::capability("integer set too large to embed"))?;
    let g = GroupSpec::cyclic(m)?;
    let set = ElemSet::from_indices(&g, values.iter().map(|&v| v as usize))?;
    Ok((set, m))
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorsionFreeSample {
    pub n: u64,
    pub modulus: u32,
    pub phi: usize,
    pub log2_n: f64,
}

/// φ({1, ..., N}) for each requested `N`, computed inside a wraparound-free
/// cyclic embedding. Report only.
pub fn torsion_free_probe(ns: &[u64]) -> Result<Vec<TorsionFreeSample>> {
    ns.iter()
        .map(|&n| {
            let values: Vec<u64> = (1..=n).collect();
            let (set, modulus) = embed_integers(&values)?;
            let phi = phi_exact(&set).phi;
            Ok(TorsionFreeSample { n, modulus, phi, log2_n: (n as f64).log2() })
        })
        .collect()
}
