//! Experiment pipelines behind the `dfrank` CLI: temporal replay over
//! consecutive batches, random-batch trials on static graphs, strong-scaling
//! sweeps, rank dumps, and CSV row assembly.

use crate::dynamics::{
    batch_size_for, random_batch, replay_plan, ExperimentPlan, PlanError, TemporalStream,
};
use crate::graph::DynGraph;
use crate::io::fmt_float;
use crate::metrics::{self, l1_error};
use crate::rank::{Engine, PrOptions, Strategy};
use std::collections::{BTreeMap, HashMap};

/// One `(strategy, batch)` execution.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub graph: String,
    pub strategy: Strategy,
    pub fraction: f64,
    pub batch_index: usize,
    /// Absolute batch size `B` in edge events.
    pub batch_size: usize,
    pub threads: usize,
    pub seed: u64,
    pub iterations: usize,
    pub residual: f64,
    /// L1 error against the per-batch reference; absent when the reference
    /// was sampled away via `ref_every`.
    pub l1_error: Option<f64>,
    pub ever_affected_fraction: f64,
    pub elapsed_s: f64,
    /// True when the temporal stream ran out before the requested batches.
    pub truncated: bool,
}

/// Column order of [`RunRecord::to_row`].
pub const CSV_HEADER: [&str; 13] = [
    "graph",
    "strategy",
    "fraction",
    "batch_index",
    "batch_size",
    "threads",
    "seed",
    "iterations",
    "residual",
    "l1_error",
    "ever_affected_fraction",
    "elapsed_s",
    "truncated",
];

impl RunRecord {
    pub fn to_row(&self) -> Vec<String> {
        vec![
            self.graph.clone(),
            self.strategy.code().to_string(),
            fmt_float(self.fraction),
            self.batch_index.to_string(),
            self.batch_size.to_string(),
            self.threads.to_string(),
            self.seed.to_string(),
            self.iterations.to_string(),
            fmt_float(self.residual),
            self.l1_error.map(fmt_float).unwrap_or_default(),
            fmt_float(self.ever_affected_fraction),
            fmt_float(self.elapsed_s),
            self.truncated.to_string(),
        ]
    }
}

/// Shared experiment knobs. Fields irrelevant to a given pipeline (for
/// example `trials` during temporal replay) are ignored by it.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub graph_name: String,
    pub strategies: Vec<Strategy>,
    pub threads: usize,
    pub seed: u64,
    /// Batches per fraction during replay.
    pub num_batches: usize,
    /// Fraction of the stream preloaded before the first batch.
    pub preload: f64,
    /// Random-batch trials per fraction.
    pub trials: usize,
    /// Insertion fraction of random batches.
    pub mix: f64,
    /// Compute the reference every k-th batch (1 = every batch).
    pub ref_every: usize,
    /// Solver constants; `strategy` and `threads` are overridden per run.
    pub opts: PrOptions,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            graph_name: "graph".to_string(),
            strategies: Strategy::ALL.to_vec(),
            threads: 1,
            seed: 0,
            num_batches: 100,
            preload: 0.90,
            trials: 5,
            mix: 0.80,
            ref_every: 1,
            opts: PrOptions::default(),
        }
    }
}

#[derive(Clone, Copy)]
struct RowMeta {
    fraction: f64,
    batch_index: usize,
    batch_size: usize,
    seed: u64,
    truncated: bool,
}

fn record(
    cfg: &ExperimentConfig,
    meta: RowMeta,
    strategy: Strategy,
    res: &crate::rank::PrResult,
    reference: Option<&[f64]>,
) -> RunRecord {
    let n = res.ranks.len();
    RunRecord {
        graph: cfg.graph_name.clone(),
        strategy,
        fraction: meta.fraction,
        batch_index: meta.batch_index,
        batch_size: meta.batch_size,
        threads: cfg.threads,
        seed: meta.seed,
        iterations: res.iterations,
        residual: res.residual,
        l1_error: reference.map(|r| l1_error(&res.ranks, r)),
        ever_affected_fraction: res.ever_affected_count as f64 / n as f64,
        elapsed_s: res.elapsed.as_secs_f64(),
        truncated: meta.truncated,
    }
}

/// Temporal-replay pipeline: per fraction, preload the stream, then run
/// every strategy over the consecutive batches. Each dynamic strategy
/// chains its own rank lineage across batches (batch `k` starts from that
/// strategy's batch `k - 1` output); the static strategy restarts from the
/// uniform vector every batch. The per-batch reference is recomputed on the
/// updated snapshot.
pub fn run_temporal(
    stream: &TemporalStream,
    fractions: &[f64],
    cfg: &ExperimentConfig,
) -> Result<Vec<RunRecord>, PlanError> {
    let n = stream.num_vertices();
    let mut engine = Engine::new(n);
    let mut rows = Vec::new();
    for &fraction in fractions {
        let batch_size = batch_size_for(fraction, stream.num_events());
        let plan = ExperimentPlan {
            preload_fraction: cfg.preload,
            batch_size,
            num_batches: cfg.num_batches,
            mix: cfg.mix,
            seed: cfg.seed,
        };
        let replay = replay_plan(stream, &plan)?;
        let mut g = replay.initial;
        let base = PrOptions {
            threads: cfg.threads,
            ..cfg.opts
        };
        let initial_ranks = engine.static_pagerank(&g, &base).ranks;
        let mut lineage: HashMap<Strategy, Vec<f64>> = cfg
            .strategies
            .iter()
            .map(|&s| (s, initial_ranks.clone()))
            .collect();
        for (bi, batch) in replay.batches.iter().enumerate() {
            let mut g_curr = g.apply_batch(batch).expect("replay batch applies cleanly");
            g_curr.add_self_loops();
            let reference = (bi % cfg.ref_every.max(1) == 0)
                .then(|| metrics::reference_ranks_with(&g_curr, cfg.opts.alpha, cfg.threads));
            for &strategy in &cfg.strategies {
                let opts = PrOptions {
                    strategy,
                    threads: cfg.threads,
                    ..cfg.opts
                };
                let prev = &lineage[&strategy];
                let res = engine.run(&g, &g_curr, batch, prev, &opts);
                let meta = RowMeta {
                    fraction,
                    batch_index: bi,
                    batch_size,
                    seed: cfg.seed,
                    truncated: replay.truncated,
                };
                rows.push(record(cfg, meta, strategy, &res, reference.as_deref()));
                lineage.insert(strategy, res.ranks);
            }
            g = g_curr;
        }
    }
    Ok(rows)
}

/// Random-batch pipeline: per fraction, synthesize one seeded batch per
/// trial on the loaded graph, run every strategy from the graph's converged
/// static ranks, and measure against the per-trial reference. Trial `t`
/// uses seed `cfg.seed + t`.
pub fn run_random(
    g0: &DynGraph,
    fractions: &[f64],
    cfg: &ExperimentConfig,
) -> Result<Vec<RunRecord>, PlanError> {
    let n = g0.num_vertices();
    let mut engine = Engine::new(n);
    let base = PrOptions {
        threads: cfg.threads,
        ..cfg.opts
    };
    let prev = engine.static_pagerank(g0, &base).ranks;
    let mut rows = Vec::new();
    for &fraction in fractions {
        let batch_size = batch_size_for(fraction, g0.num_edges());
        for trial in 0..cfg.trials {
            let seed = cfg.seed.wrapping_add(trial as u64);
            let plan = ExperimentPlan {
                preload_fraction: cfg.preload,
                batch_size,
                num_batches: 1,
                mix: cfg.mix,
                seed,
            };
            let batch = random_batch(g0, &plan)?;
            let g1 = g0
                .apply_batch(&batch)
                .expect("random batch applies cleanly");
            let reference = metrics::reference_ranks_with(&g1, cfg.opts.alpha, cfg.threads);
            for &strategy in &cfg.strategies {
                let opts = PrOptions {
                    strategy,
                    threads: cfg.threads,
                    ..cfg.opts
                };
                let res = engine.run(g0, &g1, &batch, &prev, &opts);
                let meta = RowMeta {
                    fraction,
                    batch_index: trial,
                    batch_size,
                    seed,
                    truncated: false,
                };
                rows.push(record(cfg, meta, strategy, &res, Some(&reference)));
            }
        }
    }
    Ok(rows)
}

/// Strong-scaling pipeline: repeats the fixed-fraction temporal experiment
/// at each thread count. Speedups are computed downstream from the CSV.
pub fn run_scaling(
    stream: &TemporalStream,
    fraction: f64,
    thread_list: &[usize],
    cfg: &ExperimentConfig,
) -> Result<Vec<RunRecord>, PlanError> {
    let mut rows = Vec::new();
    for &threads in thread_list {
        let cfg_t = ExperimentConfig {
            threads,
            ..cfg.clone()
        };
        rows.extend(run_temporal(stream, &[fraction], &cfg_t)?);
    }
    Ok(rows)
}

/// Final ranks of a temporal dataset: preload, then apply all remaining
/// events as one batch under the chosen strategy.
pub fn run_ranks_temporal(
    stream: &TemporalStream,
    strategy: Strategy,
    cfg: &ExperimentConfig,
) -> Result<Vec<f64>, PlanError> {
    let total = stream.num_events();
    let preload = (cfg.preload * total as f64).floor() as usize;
    let remaining = total.saturating_sub(preload).max(1);
    let plan = ExperimentPlan {
        preload_fraction: cfg.preload,
        batch_size: remaining,
        num_batches: 1,
        mix: cfg.mix,
        seed: cfg.seed,
    };
    let replay = replay_plan(stream, &plan)?;
    let mut engine = Engine::new(stream.num_vertices());
    let base = PrOptions {
        threads: cfg.threads,
        ..cfg.opts
    };
    let prev = engine.static_pagerank(&replay.initial, &base).ranks;
    match replay.batches.first() {
        None => Ok(prev),
        Some(batch) => {
            let mut g_curr = replay
                .initial
                .apply_batch(batch)
                .expect("replay batch applies cleanly");
            g_curr.add_self_loops();
            let opts = PrOptions { strategy, ..base };
            Ok(engine
                .run(&replay.initial, &g_curr, batch, &prev, &opts)
                .ranks)
        }
    }
}

/// Final ranks of a static dataset. Only the static and naive-dynamic
/// strategies make sense without a batch; others return `None`.
pub fn run_ranks_static(
    g: &DynGraph,
    strategy: Strategy,
    cfg: &ExperimentConfig,
) -> Option<Vec<f64>> {
    let n = g.num_vertices();
    let mut engine = Engine::new(n);
    let opts = PrOptions {
        strategy,
        threads: cfg.threads,
        ..cfg.opts
    };
    match strategy {
        Strategy::Static => Some(engine.static_pagerank(g, &opts).ranks),
        Strategy::NaiveDynamic => {
            let uniform = vec![1.0 / n as f64; n];
            Some(engine.naive_dynamic(g, &uniform, &opts).ranks)
        }
        _ => None,
    }
}

/// Aggregate over one `(graph, strategy, fraction, threads)` group.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub graph: String,
    pub strategy: Strategy,
    pub fraction: f64,
    pub threads: usize,
    pub runs: usize,
    pub geomean_elapsed_s: f64,
    pub amean_elapsed_s: f64,
    /// Geometric mean over strictly positive L1 errors; absent when none.
    pub geomean_l1: Option<f64>,
    pub amean_l1: Option<f64>,
    pub mean_ever_affected_fraction: f64,
}

pub const SUMMARY_HEADER: [&str; 10] = [
    "graph",
    "strategy",
    "fraction",
    "threads",
    "runs",
    "geomean_elapsed_s",
    "amean_elapsed_s",
    "geomean_l1",
    "amean_l1",
    "mean_ever_affected_fraction",
];

impl Summary {
    pub fn to_row(&self) -> Vec<String> {
        vec![
            self.graph.clone(),
            self.strategy.code().to_string(),
            fmt_float(self.fraction),
            self.threads.to_string(),
            self.runs.to_string(),
            fmt_float(self.geomean_elapsed_s),
            fmt_float(self.amean_elapsed_s),
            self.geomean_l1.map(fmt_float).unwrap_or_default(),
            self.amean_l1.map(fmt_float).unwrap_or_default(),
            fmt_float(self.mean_ever_affected_fraction),
        ]
    }
}

/// Groups records by `(graph, strategy, fraction, threads)` and reports
/// both geometric and arithmetic means per group.
pub fn summarize(rows: &[RunRecord]) -> Vec<Summary> {
    let mut groups: BTreeMap<(String, &'static str, u64, usize), Vec<&RunRecord>> = BTreeMap::new();
    for row in rows {
        groups
            .entry((
                row.graph.clone(),
                row.strategy.code(),
                row.fraction.to_bits(),
                row.threads,
            ))
            .or_default()
            .push(row);
    }
    groups
        .into_values()
        .map(|members| {
            let first = members[0];
            let elapsed: Vec<f64> = members.iter().map(|r| r.elapsed_s).collect();
            let l1: Vec<f64> = members.iter().filter_map(|r| r.l1_error).collect();
            let l1_pos: Vec<f64> = l1.iter().copied().filter(|&x| x > 0.0).collect();
            Summary {
                graph: first.graph.clone(),
                strategy: first.strategy,
                fraction: first.fraction,
                threads: first.threads,
                runs: members.len(),
                geomean_elapsed_s: metrics::geomean(&elapsed).unwrap_or(0.0),
                amean_elapsed_s: elapsed.iter().sum::<f64>() / elapsed.len() as f64,
                geomean_l1: metrics::geomean(&l1_pos).ok(),
                amean_l1: (!l1.is_empty()).then(|| l1.iter().sum::<f64>() / l1.len() as f64),
                mean_ever_affected_fraction: members
                    .iter()
                    .map(|r| r.ever_affected_fraction)
                    .sum::<f64>()
                    / members.len() as f64,
            }
        })
        .collect()
}
