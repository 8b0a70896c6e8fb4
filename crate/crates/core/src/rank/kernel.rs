//! Pull-based rank kernels: synchronous two-vector iteration for the static
//! strategy and an asynchronous single-vector sweep for the dynamic ones.
//!
//! Both come in a sequential flavor (deterministic, used when `threads == 1`
//! or the `parallel` feature is off) and a rayon flavor chunked at
//! [`CHUNK`] vertices for dynamic load balancing. A vertex's rank is written
//! exactly once per sweep by the worker that owns it; the shared rank vector
//! is read concurrently with relaxed atomics, so asynchronous sweeps may
//! observe a mix of current- and previous-sweep values by design.

use super::AffectedFlags;
use crate::graph::DynGraph;
use std::cell::Cell;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
#[cfg(feature = "parallel")]
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

/// Vertices per scheduling chunk.
#[cfg(feature = "parallel")]
pub(crate) const CHUNK: usize = 2048;

/// Iteration constants shared by all strategies.
#[derive(Debug, Clone, Copy)]
pub(crate) struct IterParams {
    pub alpha: f64,
    /// Teleport term `(1 - alpha) / |V|`.
    pub c0: f64,
    pub tol: f64,
    pub frontier_tol: f64,
    pub prune_tol: f64,
    pub max_iters: usize,
}

/// Which vertices an asynchronous sweep processes and how the affected set
/// evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Policy {
    /// Every vertex, every sweep (naive-dynamic).
    ProcessAll,
    /// The set marked before the first sweep, unchanged (dynamic traversal).
    FixedSet,
    /// Frontier semantics: expand past `frontier_tol`, and with `prune`
    /// also unmark vertices whose relative change stays within `prune_tol`.
    Expand { prune: bool },
}

pub(crate) trait RankRead {
    fn get(&self, v: usize) -> f64;
}

pub(crate) trait RankStore: RankRead {
    fn set(&self, v: usize, x: f64);
}

impl RankRead for [f64] {
    #[inline]
    fn get(&self, v: usize) -> f64 {
        self[v]
    }
}

/// Single-threaded store over plain memory.
pub(crate) struct CellRanks<'a>(&'a [Cell<f64>]);

impl<'a> CellRanks<'a> {
    pub(crate) fn new(ranks: &'a mut [f64]) -> Self {
        CellRanks(Cell::from_mut(ranks).as_slice_of_cells())
    }
}

impl RankRead for CellRanks<'_> {
    #[inline]
    fn get(&self, v: usize) -> f64 {
        self.0[v].get()
    }
}

impl RankStore for CellRanks<'_> {
    #[inline]
    fn set(&self, v: usize, x: f64) {
        self.0[v].set(x);
    }
}

/// Shared store for asynchronous parallel sweeps. Relaxed loads and stores
/// of the raw bits compile to plain moves on the targets we care about; the
/// atomicity only rules out torn values.
#[cfg(feature = "parallel")]
pub(crate) struct AtomicRanks<'a>(&'a [AtomicU64]);

#[cfg(feature = "parallel")]
impl<'a> AtomicRanks<'a> {
    pub(crate) fn new(ranks: &'a mut [f64]) -> Self {
        assert_eq!(
            ranks.as_ptr() as usize % std::mem::align_of::<AtomicU64>(),
            0,
            "rank buffer must be 8-byte aligned"
        );
        // SAFETY: AtomicU64 has the same size and bit validity as u64/f64,
        // the buffer is exclusively borrowed for the returned lifetime, and
        // every access goes through the atomics.
        let cells =
            unsafe { std::slice::from_raw_parts(ranks.as_ptr() as *const AtomicU64, ranks.len()) };
        AtomicRanks(cells)
    }
}

#[cfg(feature = "parallel")]
impl RankRead for AtomicRanks<'_> {
    #[inline]
    fn get(&self, v: usize) -> f64 {
        f64::from_bits(self.0[v].load(Ordering::Relaxed))
    }
}

#[cfg(feature = "parallel")]
impl RankStore for AtomicRanks<'_> {
    #[inline]
    fn set(&self, v: usize, x: f64) {
        self.0[v].store(x.to_bits(), Ordering::Relaxed);
    }
}

/// Total in-contribution `sum_{u in in(v)} R[u] / outdeg(u)`, accumulated in
/// ascending neighbor order.
#[inline]
pub(crate) fn pull_contribution<R: RankRead + ?Sized>(g: &DynGraph, ranks: &R, v: u32) -> f64 {
    let degs = g.out_degrees();
    let mut c = 0.0;
    for &u in g.in_neighbors(v) {
        c += ranks.get(u as usize) / degs[u as usize] as f64;
    }
    c
}

/// Rank of `v` after one pull step: `alpha * c + (1 - alpha)/|V|`.
#[inline]
pub(crate) fn pull_rank<R: RankRead + ?Sized>(
    g: &DynGraph,
    ranks: &R,
    v: u32,
    alpha: f64,
    c0: f64,
) -> f64 {
    c0 + alpha * pull_contribution(g, ranks, v)
}

/// Rank of `v` with the self-loop recursion resolved in closed form:
/// `(c0 + alpha * (c - R[v]/d)) / (1 - alpha/d)` where `d = outdeg(v)` and
/// `c` includes the self-loop term that is then subtracted back out.
#[inline]
pub(crate) fn closed_loop_rank<R: RankRead + ?Sized>(
    g: &DynGraph,
    ranks: &R,
    v: u32,
    alpha: f64,
    c0: f64,
) -> f64 {
    let d = g.out_degrees()[v as usize] as f64;
    let c = pull_contribution(g, ranks, v);
    (c0 + alpha * (c - ranks.get(v as usize) / d)) / (1.0 - alpha / d)
}

/// One asynchronous update of `v`: compute the new rank, fold the change
/// into the sweep residual, prune/expand the affected set, write the rank.
/// Returns `|r - R[v]|`.
#[inline]
fn step_vertex<S: RankStore>(
    g: &DynGraph,
    ranks: &S,
    flags: &AffectedFlags,
    v: u32,
    p: &IterParams,
    policy: Policy,
) -> f64 {
    let old = ranks.get(v as usize);
    let r = match policy {
        Policy::Expand { prune: true } => closed_loop_rank(g, ranks, v, p.alpha, p.c0),
        _ => pull_rank(g, ranks, v, p.alpha, p.c0),
    };
    let dr = (r - old).abs();
    if let Policy::Expand { prune } = policy {
        let rel = dr / r.max(old);
        if prune && rel <= p.prune_tol {
            flags.unmark(v);
        }
        if rel > p.frontier_tol {
            for &w in g.out_neighbors(v) {
                flags.mark(w);
            }
        }
    }
    ranks.set(v as usize, r);
    dr
}

/// Synchronous power iteration from the uniform vector; `curr` holds the
/// result. Bitwise identical to [`static_par`] for any thread count.
pub(crate) fn static_seq(
    g: &DynGraph,
    curr: &mut Vec<f64>,
    next: &mut Vec<f64>,
    p: &IterParams,
) -> (usize, f64) {
    let n = g.num_vertices();
    curr.fill(1.0 / n as f64);
    let mut residual = f64::INFINITY;
    for it in 0..p.max_iters {
        let mut dr_max = 0.0f64;
        for v in 0..n {
            let r = pull_rank(g, &curr[..], v as u32, p.alpha, p.c0);
            dr_max = dr_max.max((r - curr[v]).abs());
            next[v] = r;
        }
        std::mem::swap(curr, next);
        residual = dr_max;
        if residual <= p.tol {
            return (it + 1, residual);
        }
    }
    (p.max_iters, residual)
}

#[cfg(feature = "parallel")]
pub(crate) fn static_par(
    g: &DynGraph,
    curr: &mut Vec<f64>,
    next: &mut Vec<f64>,
    p: &IterParams,
) -> (usize, f64) {
    let n = g.num_vertices();
    curr.fill(1.0 / n as f64);
    let mut residual = f64::INFINITY;
    for it in 0..p.max_iters {
        let src = &curr[..];
        let dr_max = next
            .par_chunks_mut(CHUNK)
            .enumerate()
            .map(|(ci, chunk)| {
                let base = ci * CHUNK;
                let mut local = 0.0f64;
                for (off, slot) in chunk.iter_mut().enumerate() {
                    let v = base + off;
                    let r = pull_rank(g, src, v as u32, p.alpha, p.c0);
                    local = local.max((r - src[v]).abs());
                    *slot = r;
                }
                local
            })
            .reduce(|| 0.0, f64::max);
        std::mem::swap(curr, next);
        residual = dr_max;
        if residual <= p.tol {
            return (it + 1, residual);
        }
    }
    (p.max_iters, residual)
}

/// Asynchronous single-vector sweeps over the affected set, sequentially in
/// ascending vertex order. The set processed by a sweep is frozen at its
/// start; marks and unmarks take effect the following sweep.
pub(crate) fn async_seq(
    g: &DynGraph,
    ranks: &mut [f64],
    flags: &AffectedFlags,
    frozen: &mut [bool],
    p: &IterParams,
    policy: Policy,
) -> (usize, f64) {
    let n = g.num_vertices();
    let store = CellRanks::new(ranks);
    let mut residual = f64::INFINITY;
    for it in 0..p.max_iters {
        let active = match policy {
            Policy::ProcessAll => n,
            Policy::FixedSet if it == 0 => flags.snapshot_live_into(frozen),
            Policy::FixedSet => frozen.iter().filter(|&&f| f).count(),
            Policy::Expand { .. } => flags.snapshot_live_into(frozen),
        };
        if active == 0 {
            return (it, 0.0);
        }
        let mut dr_max = 0.0f64;
        if policy == Policy::ProcessAll {
            for v in 0..n {
                dr_max = dr_max.max(step_vertex(g, &store, flags, v as u32, p, policy));
            }
        } else {
            for (v, &active) in frozen.iter().enumerate() {
                if active {
                    dr_max = dr_max.max(step_vertex(g, &store, flags, v as u32, p, policy));
                }
            }
        }
        residual = dr_max;
        if residual <= p.tol {
            return (it + 1, residual);
        }
    }
    (p.max_iters, residual)
}

#[cfg(feature = "parallel")]
pub(crate) fn async_par(
    g: &DynGraph,
    ranks: &mut [f64],
    flags: &AffectedFlags,
    frozen: &mut [bool],
    p: &IterParams,
    policy: Policy,
) -> (usize, f64) {
    let n = g.num_vertices();
    let store = AtomicRanks::new(ranks);
    let nchunks = n.div_ceil(CHUNK);
    let mut residual = f64::INFINITY;
    for it in 0..p.max_iters {
        let active = match policy {
            Policy::ProcessAll => n,
            Policy::FixedSet if it == 0 => snapshot_par(flags.live_slice(), frozen),
            Policy::FixedSet => frozen.iter().filter(|&&f| f).count(),
            Policy::Expand { .. } => snapshot_par(flags.live_slice(), frozen),
        };
        if active == 0 {
            return (it, 0.0);
        }
        let frozen_view = &frozen[..];
        let dr_max = (0..nchunks)
            .into_par_iter()
            .map(|ci| {
                let lo = ci * CHUNK;
                let hi = n.min(lo + CHUNK);
                let mut local = 0.0f64;
                for (off, &active) in frozen_view[lo..hi].iter().enumerate() {
                    if policy == Policy::ProcessAll || active {
                        let v = (lo + off) as u32;
                        local = local.max(step_vertex(g, &store, flags, v, p, policy));
                    }
                }
                local
            })
            .reduce(|| 0.0, f64::max);
        residual = dr_max;
        if residual <= p.tol {
            return (it + 1, residual);
        }
    }
    (p.max_iters, residual)
}

#[cfg(feature = "parallel")]
fn snapshot_par(live: &[AtomicBool], frozen: &mut [bool]) -> usize {
    frozen
        .par_chunks_mut(CHUNK)
        .zip(live.par_chunks(CHUNK))
        .map(|(fz, lv)| {
            let mut count = 0usize;
            for (f, l) in fz.iter_mut().zip(lv) {
                *f = l.load(Ordering::Relaxed);
                count += *f as usize;
            }
            count
        })
        .sum()
}
