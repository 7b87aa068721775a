//! Branch-and-bound for the independence number of a collision graph.
//!
//! Candidates are covered greedily by cliques of the collision graph (a
//! sequential coloring of the complement); an independent set meets each
//! clique at most once, so the number of cliques bounds what a subtree can
//! still add. Vertices are branched in reverse coloring order.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};

use rayon::prelude::*;

use super::graph::{Bits, CollisionGraph};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Mode {
    /// Find a maximum independent set.
    Maximize,
    /// Find any independent set larger than the given size.
    Exceed(usize),
}

#[derive(Debug)]
pub(crate) struct Outcome {
    pub best: usize,
    /// Local vertex ids; empty when `Exceed` found nothing.
    pub witness: Vec<usize>,
    pub nodes: u64,
}

enum Abort {
    Found,
    Budget,
}

#[derive(Default)]
struct Frame {
    q: Option<Bits>,
    u: Option<Bits>,
    child: Option<Bits>,
    order: Vec<usize>,
    bounds: Vec<usize>,
}

struct Shared {
    best: AtomicUsize,
    nodes: AtomicU64,
    stop: AtomicBool,
}

struct Search<'a> {
    graph: &'a CollisionGraph,
    n: usize,
    best: usize,
    stop_above: Option<usize>,
    witness: Vec<usize>,
    cur: Vec<usize>,
    nodes: u64,
    node_limit: u64,
    frames: Vec<Frame>,
    shared: Option<&'a Shared>,
}

impl<'a> Search<'a> {
    fn new(graph: &'a CollisionGraph, mode: Mode, node_limit: u64, shared: Option<&'a Shared>) -> Self {
        let (best, stop_above) = match mode {
            Mode::Maximize => (0, None),
            Mode::Exceed(k) => (k, Some(k)),
        };
        Search {
            graph,
            n: graph.len(),
            best,
            stop_above,
            witness: Vec::new(),
            cur: Vec::new(),
            nodes: 0,
            node_limit,
            frames: Vec::new(),
            shared,
        }
    }

    fn bound(&self) -> usize {
        match self.shared {
            Some(s) => self.best.max(s.best.load(Ordering::Relaxed)),
            None => self.best,
        }
    }

    fn count_node(&mut self) -> Result<(), Abort> {
        self.nodes += 1;
        let total = match self.shared {
            Some(s) => {
                if s.stop.load(Ordering::Relaxed) {
                    return Err(Abort::Found);
                }
                s.nodes.fetch_add(1, Ordering::Relaxed) + 1
            }
            None => self.nodes,
        };
        if total > self.node_limit {
            return Err(Abort::Budget);
        }
        Ok(())
    }

    fn record(&mut self) -> Result<(), Abort> {
        if self.cur.len() <= self.bound() {
            return Ok(());
        }
        self.best = self.cur.len();
        self.witness.clone_from(&self.cur);
        if let Some(s) = self.shared {
            s.best.fetch_max(self.best, Ordering::Relaxed);
        }
        if self.stop_above.is_some_and(|k| self.best > k) {
            if let Some(s) = self.shared {
                s.stop.store(true, Ordering::Relaxed);
            }
            return Err(Abort::Found);
        }
        Ok(())
    }

    fn take_frame(&mut self, depth: usize) -> Frame {
        if self.frames.len() <= depth {
            self.frames.resize_with(depth + 1, Frame::default);
        }
        let mut f = std::mem::take(&mut self.frames[depth]);
        let n = self.n;
        f.q.get_or_insert_with(|| Bits::zeros(n));
        f.u.get_or_insert_with(|| Bits::zeros(n));
        f.child.get_or_insert_with(|| Bits::zeros(n));
        f
    }

    /// Greedy clique cover of `p`. `order[i]` gets clique number `bounds[i]`,
    /// nondecreasing in `i`.
    fn color(&self, p: &Bits, q: &mut Bits, u: &mut Bits, order: &mut Vec<usize>, bounds: &mut Vec<usize>) {
        order.clear();
        bounds.clear();
        q.copy_from(p);
        let mut k = 0;
        while !q.is_empty() {
            k += 1;
            u.copy_from(q);
            while let Some(v) = u.first() {
                u.clear(v);
                u.and_assign(self.graph.row(v));
                q.clear(v);
                order.push(v);
                bounds.push(k);
            }
        }
    }

    fn expand(&mut self, p: &mut Bits, depth: usize) -> Result<(), Abort> {
        self.count_node()?;
        let mut frame = self.take_frame(depth);
        let result = self.expand_with(p, depth, &mut frame);
        self.frames[depth] = frame;
        result
    }

    fn expand_with(&mut self, p: &mut Bits, depth: usize, frame: &mut Frame) -> Result<(), Abort> {
        let Frame { q, u, child, order, bounds } = frame;
        let (q, u, child) = (q.as_mut().unwrap(), u.as_mut().unwrap(), child.as_mut().unwrap());
        self.color(p, q, u, order, bounds);
        for i in (0..order.len()).rev() {
            if self.cur.len() + bounds[i] <= self.bound() {
                break;
            }
            let v = order[i];
            self.cur.push(v);
            let r = self.branch(p, v, child, depth);
            self.cur.pop();
            r?;
            p.clear(v);
        }
        Ok(())
    }

    /// `cur` already contains `v`.
    fn branch(&mut self, p: &Bits, v: usize, child: &mut Bits, depth: usize) -> Result<(), Abort> {
        child.assign_and_not(p, self.graph.row(v));
        child.clear(v);
        self.record()?;
        if !child.is_empty() {
            self.expand(child, depth + 1)?;
        }
        Ok(())
    }
}

fn finish(search: Search<'_>, r: Result<(), Abort>) -> Result<Outcome> {
    match r {
        Ok(()) | Err(Abort::Found) => Ok(Outcome { best: search.best, witness: search.witness, nodes: search.nodes }),
        Err(Abort::Budget) => Err(Error::Budget { nodes: search.nodes, best: search.best }),
    }
}

pub(crate) fn run_sequential(graph: &CollisionGraph, mode: Mode, node_limit: u64) -> Result<Outcome> {
    let mut s = Search::new(graph, mode, node_limit, None);
    if graph.is_empty() {
        return Ok(Outcome { best: s.best, witness: Vec::new(), nodes: 0 });
    }
    let mut p = Bits::ones(graph.len());
    let r = s.expand(&mut p, 0);
    let mut out = finish(s, r)?;
    if mode == Mode::Maximize && out.witness.is_empty() {
        out.best = 0;
    }
    Ok(out)
}

/// Fans the root's branches out over a thread pool, then recovers the
/// witness with a sequential search so the result matches the sequential
/// canonical-order answer.
pub(crate) fn run_parallel(graph: &CollisionGraph, mode: Mode, node_limit: u64, threads: usize) -> Result<Outcome> {
    let n = graph.len();
    if n == 0 || threads <= 1 {
        return run_sequential(graph, mode, node_limit);
    }
    let start_best = match mode {
        Mode::Maximize => 0,
        Mode::Exceed(k) => k,
    };
    let shared = Shared { best: AtomicUsize::new(start_best), nodes: AtomicU64::new(1), stop: AtomicBool::new(false) };

    let root = Search::new(graph, mode, node_limit, None);
    let p = Bits::ones(n);
    let (mut q, mut u) = (Bits::zeros(n), Bits::zeros(n));
    let (mut order, mut bounds) = (Vec::new(), Vec::new());
    root.color(&p, &mut q, &mut u, &mut order, &mut bounds);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::capability(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<u64, u64>> = pool.install(|| {
        (0..order.len())
            .rev()
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|i| {
                let mut s = Search::new(graph, mode, node_limit, Some(&shared));
                s.best = start_best;
                if bounds[i] <= s.bound() || shared.stop.load(Ordering::Relaxed) {
                    return Ok(0);
                }
                let mut avail = Bits::zeros(n);
                for &w in &order[..=i] {
                    avail.set(w);
                }
                let mut child = Bits::zeros(n);
                let v = order[i];
                s.cur.push(v);
                let r = s.branch(&avail, v, &mut child, 0);
                match r {
                    Ok(()) | Err(Abort::Found) => Ok(s.nodes),
                    Err(Abort::Budget) => Err(s.nodes),
                }
            })
            .collect()
    });
    let mut nodes = 1u64;
    let mut budget_hit = false;
    for o in outcomes {
        match o {
            Ok(k) => nodes += k,
            Err(k) => {
                nodes += k;
                budget_hit = true;
            }
        }
    }
    let best = shared.best.load(Ordering::Relaxed);
    if budget_hit {
        return Err(Error::Budget { nodes, best });
    }
    let found_size = match mode {
        Mode::Maximize => best,
        Mode::Exceed(k) if best > k => best,
        Mode::Exceed(k) => return Ok(Outcome { best: k, witness: Vec::new(), nodes }),
    };
    // Canonical witness: the first set of size `found_size` in sequential
    // order, which is exactly what the sequential maximizer would report.
    let canon = run_sequential(graph, Mode::Exceed(found_size - 1), node_limit)?;
    debug_assert_eq!(canon.witness.len(), found_size);
    Ok(Outcome { best: found_size, witness: canon.witness, nodes: nodes + canon.nodes })
}
