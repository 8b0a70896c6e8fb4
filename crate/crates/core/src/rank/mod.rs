//! The five rank-computation strategies over one pull-based kernel.
//!
//! * [`Strategy::Static`]: synchronous power iteration from the uniform
//!   vector, two rank buffers.
//! * [`Strategy::NaiveDynamic`]: start from the previous snapshot's ranks,
//!   asynchronous sweeps over all vertices.
//! * [`Strategy::DynamicTraversal`]: restrict sweeps to vertices reachable
//!   from updated edge sources in either snapshot.
//! * [`Strategy::DynamicFrontier`]: start from out-neighbors of updated
//!   sources and expand the affected set where the relative rank change
//!   exceeds the frontier tolerance.
//! * [`Strategy::DynamicFrontierPruning`]: frontier expansion plus
//!   unmarking of settled vertices, with the closed-loop rank formula.

mod kernel;
mod mark;

pub use mark::{df_mark_initial, dt_mark_affected};

use crate::graph::{BatchUpdate, DynGraph, VertexId};
use kernel::{IterParams, Policy};
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

/// Strategy selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    Static,
    NaiveDynamic,
    DynamicTraversal,
    DynamicFrontier,
    DynamicFrontierPruning,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Static,
        Strategy::NaiveDynamic,
        Strategy::DynamicTraversal,
        Strategy::DynamicFrontier,
        Strategy::DynamicFrontierPruning,
    ];

    /// Short code used on the command line and in CSV output.
    pub fn code(self) -> &'static str {
        match self {
            Strategy::Static => "static",
            Strategy::NaiveDynamic => "nd",
            Strategy::DynamicTraversal => "dt",
            Strategy::DynamicFrontier => "df",
            Strategy::DynamicFrontierPruning => "dfp",
        }
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| s.eq_ignore_ascii_case(st.code()))
            .ok_or_else(|| format!("unknown strategy '{s}' (expected static, nd, dt, df or dfp)"))
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.code())
    }
}

/// Solver configuration.
///
/// `frontier_tol` and `prune_tol` act on the relative rank change
/// `dr / max(r, R[v])`; `tol` is the L-infinity sweep residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrOptions {
    /// Damping factor in (0, 1).
    pub alpha: f64,
    /// Iteration tolerance (L-infinity over processed vertices).
    pub tol: f64,
    /// Frontier tolerance: expand past this relative change.
    pub frontier_tol: f64,
    /// Prune tolerance: unmark within this relative change.
    pub prune_tol: f64,
    /// Sweep cap.
    pub max_iters: usize,
    pub strategy: Strategy,
    /// Worker count; 1 selects the deterministic sequential kernel.
    pub threads: usize,
}

impl Default for PrOptions {
    fn default() -> Self {
        PrOptions {
            alpha: 0.85,
            tol: 1e-10,
            frontier_tol: 1e-6,
            prune_tol: 1e-6,
            max_iters: 500,
            strategy: Strategy::Static,
            threads: 1,
        }
    }
}

/// Outcome of one strategy run.
#[derive(Debug, Clone)]
pub struct PrResult {
    /// Final per-vertex ranks, length `|V|`.
    pub ranks: Vec<f64>,
    /// Sweeps performed (`<= max_iters`).
    pub iterations: usize,
    /// Final L-infinity change over processed vertices; `<= tol` unless the
    /// sweep cap was hit, and 0 when the affected set emptied.
    pub residual: f64,
    /// Vertices flagged affected at any point of the run.
    pub ever_affected_count: usize,
    /// Wall-clock time of marking + sweeps + convergence detection,
    /// excluding buffer allocation.
    pub elapsed: Duration,
}

/// Per-vertex affected flags plus the monotone ever-affected record.
///
/// Marking is a relaxed, idempotent set-to-true and may race freely across
/// workers; unmarking is done only by the worker that owns the vertex in a
/// sweep, so a concurrent re-mark by an in-neighbor is allowed to win.
pub struct AffectedFlags {
    live: Vec<AtomicBool>,
    ever: Vec<AtomicBool>,
}

impl AffectedFlags {
    pub fn new(n: usize) -> Self {
        AffectedFlags {
            live: (0..n).map(|_| AtomicBool::new(false)).collect(),
            ever: (0..n).map(|_| AtomicBool::new(false)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.live.len()
    }

    pub fn is_empty(&self) -> bool {
        self.live.is_empty()
    }

    /// Clears both the live and the ever-affected sets.
    pub fn reset(&mut self) {
        for f in &mut self.live {
            *f.get_mut() = false;
        }
        for f in &mut self.ever {
            *f.get_mut() = false;
        }
    }

    #[inline]
    pub fn mark(&self, v: VertexId) {
        let i = v as usize;
        if !self.live[i].load(Ordering::Relaxed) {
            self.live[i].store(true, Ordering::Relaxed);
            self.ever[i].store(true, Ordering::Relaxed);
        }
    }

    #[inline]
    pub fn unmark(&self, v: VertexId) {
        self.live[v as usize].store(false, Ordering::Relaxed);
    }

    #[inline]
    pub fn is_marked(&self, v: VertexId) -> bool {
        self.live[v as usize].load(Ordering::Relaxed)
    }

    /// True if `v` was flagged at any point since the last reset.
    #[inline]
    pub fn ever_marked(&self, v: VertexId) -> bool {
        self.ever[v as usize].load(Ordering::Relaxed)
    }

    pub fn marked_count(&self) -> usize {
        self.live
            .iter()
            .filter(|f| f.load(Ordering::Relaxed))
            .count()
    }

    pub fn ever_count(&self) -> usize {
        self.ever
            .iter()
            .filter(|f| f.load(Ordering::Relaxed))
            .count()
    }

    /// Currently marked vertices in ascending order.
    pub fn iter_marked(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.live
            .iter()
            .enumerate()
            .filter(|(_, f)| f.load(Ordering::Relaxed))
            .map(|(v, _)| v as VertexId)
    }

    /// Ever-marked vertices in ascending order.
    pub fn iter_ever(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.ever
            .iter()
            .enumerate()
            .filter(|(_, f)| f.load(Ordering::Relaxed))
            .map(|(v, _)| v as VertexId)
    }

    /// Copies the live set into `out`, returning how many are marked.
    pub(crate) fn snapshot_live_into(&self, out: &mut [bool]) -> usize {
        let mut count = 0;
        for (slot, f) in out.iter_mut().zip(&self.live) {
            *slot = f.load(Ordering::Relaxed);
            count += *slot as usize;
        }
        count
    }

    #[cfg(feature = "parallel")]
    pub(crate) fn live_slice(&self) -> &[AtomicBool] {
        &self.live
    }
}

/// One pull step of the rank recurrence for `v`:
/// `alpha * sum_{u in in(v)} R[u]/outdeg(u) + (1 - alpha)/|V|`.
///
/// Requires `outdeg(u) >= 1` for every in-neighbor, which self-loop
/// injection guarantees.
pub fn rank_pull(g: &DynGraph, ranks: &[f64], v: VertexId, alpha: f64) -> f64 {
    let c0 = (1.0 - alpha) / g.num_vertices() as f64;
    kernel::pull_rank(g, ranks, v, alpha, c0)
}

/// Rank of `v` with its self-loop recursion resolved in closed form,
/// assuming the in-contributions of the other neighbors stay fixed:
/// `(alpha * K + (1 - alpha)/|V|) / (1 - alpha/d)` where
/// `K = sum_{u in in(v)} R[u]/outdeg(u) - R[v]/d` and `d = outdeg(v)`.
pub fn rank_closed_loop(g: &DynGraph, ranks: &[f64], v: VertexId, alpha: f64) -> f64 {
    let c0 = (1.0 - alpha) / g.num_vertices() as f64;
    kernel::closed_loop_rank(g, ranks, v, alpha, c0)
}

/// Reusable solver state for one vertex universe.
///
/// Buffers (working rank vector, the static strategy's second vector,
/// affected flags and their per-sweep snapshot) are allocated once and
/// reused across runs, so the elapsed time reported by each run covers only
/// marking, sweeps and convergence detection.
pub struct Engine {
    n: usize,
    ranks: Vec<f64>,
    aux: Vec<f64>,
    flags: AffectedFlags,
    frozen: Vec<bool>,
    #[cfg(feature = "parallel")]
    pool: Option<(usize, rayon::ThreadPool)>,
}

impl Engine {
    pub fn new(num_vertices: usize) -> Self {
        Engine {
            n: num_vertices,
            ranks: vec![0.0; num_vertices],
            aux: vec![0.0; num_vertices],
            flags: AffectedFlags::new(num_vertices),
            frozen: vec![false; num_vertices],
            #[cfg(feature = "parallel")]
            pool: None,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    /// Affected flags of the most recent marking run. The static and
    /// naive-dynamic strategies do not touch them.
    pub fn last_affected(&self) -> &AffectedFlags {
        &self.flags
    }

    /// Dispatches on `opts.strategy`. The static strategy ignores
    /// `g_prev`, `batch` and `prev`.
    pub fn run(
        &mut self,
        g_prev: &DynGraph,
        g_curr: &DynGraph,
        batch: &BatchUpdate,
        prev: &[f64],
        opts: &PrOptions,
    ) -> PrResult {
        match opts.strategy {
            Strategy::Static => self.static_pagerank(g_curr, opts),
            Strategy::NaiveDynamic => self.naive_dynamic(g_curr, prev, opts),
            Strategy::DynamicTraversal => self.dynamic_traversal(g_prev, g_curr, batch, prev, opts),
            Strategy::DynamicFrontier => {
                self.dynamic_frontier(g_prev, g_curr, batch, prev, opts, false)
            }
            Strategy::DynamicFrontierPruning => {
                self.dynamic_frontier(g_prev, g_curr, batch, prev, opts, true)
            }
        }
    }

    /// Synchronous power iteration from the uniform vector.
    pub fn static_pagerank(&mut self, g: &DynGraph, opts: &PrOptions) -> PrResult {
        let p = self.check(g, opts);
        let start = Instant::now();
        let (iterations, residual) = self.exec_static(g, &p, opts.threads);
        let elapsed = start.elapsed();
        self.result(iterations, residual, self.n, elapsed)
    }

    /// Asynchronous sweeps over all vertices, starting from `prev`.
    pub fn naive_dynamic(&mut self, g_curr: &DynGraph, prev: &[f64], opts: &PrOptions) -> PrResult {
        let p = self.check(g_curr, opts);
        assert_eq!(prev.len(), self.n, "previous rank vector length");
        let start = Instant::now();
        self.ranks.copy_from_slice(prev);
        let (iterations, residual) = self.exec_async(g_curr, &p, Policy::ProcessAll, opts.threads);
        let elapsed = start.elapsed();
        self.result(iterations, residual, self.n, elapsed)
    }

    /// Asynchronous sweeps restricted to vertices reachable from updated
    /// edge sources in either snapshot.
    pub fn dynamic_traversal(
        &mut self,
        g_prev: &DynGraph,
        g_curr: &DynGraph,
        batch: &BatchUpdate,
        prev: &[f64],
        opts: &PrOptions,
    ) -> PrResult {
        let p = self.check(g_curr, opts);
        assert_eq!(prev.len(), self.n, "previous rank vector length");
        self.flags.reset();
        let start = Instant::now();
        self.ranks.copy_from_slice(prev);
        mark::dt_mark_into(g_prev, g_curr, batch, &self.flags);
        let (iterations, residual) = self.exec_async(g_curr, &p, Policy::FixedSet, opts.threads);
        let elapsed = start.elapsed();
        let ever = self.flags.ever_count();
        self.result(iterations, residual, ever, elapsed)
    }

    /// Frontier strategy; `prune = true` selects the pruning variant with
    /// the closed-loop rank formula.
    pub fn dynamic_frontier(
        &mut self,
        g_prev: &DynGraph,
        g_curr: &DynGraph,
        batch: &BatchUpdate,
        prev: &[f64],
        opts: &PrOptions,
        prune: bool,
    ) -> PrResult {
        let p = self.check(g_curr, opts);
        assert_eq!(prev.len(), self.n, "previous rank vector length");
        self.flags.reset();
        let start = Instant::now();
        self.ranks.copy_from_slice(prev);
        mark::df_mark_initial(g_prev, g_curr, batch, &self.flags);
        let (iterations, residual) =
            self.exec_async(g_curr, &p, Policy::Expand { prune }, opts.threads);
        let elapsed = start.elapsed();
        let ever = self.flags.ever_count();
        self.result(iterations, residual, ever, elapsed)
    }

    /// Runs exactly `sweeps` synchronous power-iteration sweeps from the
    /// uniform vector, with no convergence exit. Used for reference ranks,
    /// where the tolerance is meant to be unreachable even when the
    /// iteration lands on an exact floating-point fixpoint.
    pub(crate) fn power_sweeps(
        &mut self,
        g: &DynGraph,
        alpha: f64,
        sweeps: usize,
        threads: usize,
    ) -> PrResult {
        assert_eq!(g.num_vertices(), self.n, "graph size matches engine");
        let p = IterParams {
            alpha,
            c0: (1.0 - alpha) / self.n as f64,
            tol: f64::NEG_INFINITY,
            frontier_tol: 0.0,
            prune_tol: 0.0,
            max_iters: sweeps,
        };
        let start = Instant::now();
        let (iterations, residual) = self.exec_static(g, &p, threads);
        let elapsed = start.elapsed();
        self.result(iterations, residual, self.n, elapsed)
    }

    fn check(&self, g: &DynGraph, opts: &PrOptions) -> IterParams {
        assert_eq!(g.num_vertices(), self.n, "graph size matches engine");
        assert!(opts.alpha > 0.0 && opts.alpha < 1.0, "alpha in (0, 1)");
        assert!(opts.tol > 0.0, "tolerance must be positive");
        assert!(opts.max_iters >= 1, "at least one sweep");
        assert!(opts.threads >= 1, "at least one worker");
        IterParams {
            alpha: opts.alpha,
            c0: (1.0 - opts.alpha) / self.n as f64,
            tol: opts.tol,
            frontier_tol: opts.frontier_tol,
            prune_tol: opts.prune_tol,
            max_iters: opts.max_iters,
        }
    }

    fn result(
        &self,
        iterations: usize,
        residual: f64,
        ever_affected_count: usize,
        elapsed: Duration,
    ) -> PrResult {
        PrResult {
            ranks: self.ranks.clone(),
            iterations,
            residual,
            ever_affected_count,
            elapsed,
        }
    }

    fn exec_static(&mut self, g: &DynGraph, p: &IterParams, threads: usize) -> (usize, f64) {
        #[cfg(feature = "parallel")]
        if threads > 1 {
            self.ensure_pool(threads);
            let Engine {
                ranks, aux, pool, ..
            } = self;
            let pool = &pool.as_ref().expect("pool built").1;
            return pool.install(|| kernel::static_par(g, ranks, aux, p));
        }
        #[cfg(not(feature = "parallel"))]
        let _ = threads;
        kernel::static_seq(g, &mut self.ranks, &mut self.aux, p)
    }

    fn exec_async(
        &mut self,
        g: &DynGraph,
        p: &IterParams,
        policy: Policy,
        threads: usize,
    ) -> (usize, f64) {
        #[cfg(feature = "parallel")]
        if threads > 1 {
            self.ensure_pool(threads);
            let Engine {
                ranks,
                flags,
                frozen,
                pool,
                ..
            } = self;
            let pool = &pool.as_ref().expect("pool built").1;
            return pool.install(|| kernel::async_par(g, ranks, flags, frozen, p, policy));
        }
        #[cfg(not(feature = "parallel"))]
        let _ = threads;
        kernel::async_seq(g, &mut self.ranks, &self.flags, &mut self.frozen, p, policy)
    }

    #[cfg(feature = "parallel")]
    fn ensure_pool(&mut self, threads: usize) {
        let stale = match &self.pool {
            Some((t, _)) => *t != threads,
            None => true,
        };
        if stale {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .expect("build rayon thread pool");
            self.pool = Some((threads, pool));
        }
    }
}
