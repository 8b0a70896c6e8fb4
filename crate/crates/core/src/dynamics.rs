//! Construction of experiment batch sequences: temporal-stream replay
//! (preload plus consecutive batches) and synthetic random batches with a
//! fixed insertion/deletion mix.

use crate::graph::{BatchUpdate, DynGraph, Edge, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PlanError {
    #[error("preload fraction {fraction} covers no events of a {events}-event stream")]
    EmptyPreload { fraction: f64, events: usize },
    #[error("could not sample {requested} {side} within {attempts} attempts")]
    SamplingExhausted {
        side: &'static str,
        requested: usize,
        attempts: usize,
    },
}

/// Time-ordered edge arrivals over a dense vertex universe. Construction
/// sorts stably by timestamp, so ties keep their original order.
#[derive(Debug, Clone)]
pub struct TemporalStream {
    events: Vec<(VertexId, VertexId, i64)>,
    num_vertices: usize,
}

impl TemporalStream {
    pub fn new(num_vertices: usize, mut events: Vec<(VertexId, VertexId, i64)>) -> Self {
        assert!(
            events
                .iter()
                .all(|&(u, v, _)| (u as usize) < num_vertices && (v as usize) < num_vertices),
            "event endpoints must lie in [0, {num_vertices})"
        );
        events.sort_by_key(|&(_, _, t)| t);
        TemporalStream {
            events,
            num_vertices,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    /// Number of temporal edges, duplicates included.
    pub fn num_events(&self) -> usize {
        self.events.len()
    }

    pub fn events(&self) -> &[(VertexId, VertexId, i64)] {
        &self.events
    }
}

/// Parameters of one experiment: preload split, absolute batch size, batch
/// count, insertion mix for synthetic batches, and the PRNG seed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentPlan {
    pub preload_fraction: f64,
    /// Absolute batch size `B` (edge events per batch).
    pub batch_size: usize,
    pub num_batches: usize,
    /// Insertion fraction for synthetic batches.
    pub mix: f64,
    pub seed: u64,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        ExperimentPlan {
            preload_fraction: 0.90,
            batch_size: 1,
            num_batches: 100,
            mix: 0.80,
            seed: 0,
        }
    }
}

impl ExperimentPlan {
    fn validate(&self) {
        assert!(
            self.preload_fraction > 0.0 && self.preload_fraction <= 1.0,
            "preload fraction in (0, 1]"
        );
        assert!(self.num_batches >= 1, "at least one batch");
        assert!(self.batch_size >= 1, "batch size at least 1");
        assert!((0.0..=1.0).contains(&self.mix), "mix in [0, 1]");
    }
}

/// Converts a relative batch-size fraction into an absolute edge count:
/// `max(1, round(fraction * total))` with round-half-up.
pub fn batch_size_for(fraction: f64, total: usize) -> usize {
    assert!(fraction > 0.0, "batch fraction must be positive");
    ((fraction * total as f64).round() as usize).max(1)
}

/// Splits a batch into insertion and deletion counts: insertions take the
/// ceiling of `mix * b`, deletions the remainder.
fn split_counts(mix: f64, b: usize) -> (usize, usize) {
    let n_ins = ((mix * b as f64).ceil() as usize).min(b);
    (n_ins, b - n_ins)
}

/// A replayed temporal experiment: the preloaded initial graph and the
/// batch sequence derived from the remaining events.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    /// Deduplicated static edges of the preload window, self-loops added.
    pub initial: DynGraph,
    /// One normalized insertion batch per `batch_size` consumed events.
    /// Duplicate arrivals consume budget but insert nothing.
    pub batches: Vec<BatchUpdate>,
    /// True when the stream ran out before `num_batches * batch_size`
    /// events could be consumed.
    pub truncated: bool,
}

/// Splits a temporal stream into an initial graph (the first
/// `preload_fraction` of events, deduplicated) and consecutive insertion
/// batches of `batch_size` events each, in timestamp order.
pub fn replay_plan(stream: &TemporalStream, plan: &ExperimentPlan) -> Result<Replay, PlanError> {
    plan.validate();
    let total = stream.num_events();
    let preload = (plan.preload_fraction * total as f64).floor() as usize;
    if preload < 1 {
        return Err(PlanError::EmptyPreload {
            fraction: plan.preload_fraction,
            events: total,
        });
    }
    let n = stream.num_vertices();
    let mut initial = DynGraph::from_edges(
        n,
        stream.events()[..preload].iter().map(|&(u, v, _)| (u, v)),
    );
    initial.add_self_loops();

    let remaining = &stream.events()[preload..];
    let wanted = plan.num_batches * plan.batch_size;
    let truncated = remaining.len() < wanted;
    let mut batches = Vec::new();
    let mut running = initial.clone();
    for chunk in remaining.chunks(plan.batch_size).take(plan.num_batches) {
        let batch =
            BatchUpdate::normalize_against(&running, [], chunk.iter().map(|&(u, v, _)| (u, v)));
        running = running
            .apply_batch(&batch)
            .expect("normalized batch applies cleanly");
        batches.push(batch);
    }
    Ok(Replay {
        initial,
        batches,
        truncated,
    })
}

/// Synthesizes one normalized random batch: `ceil(mix * B)` insertions drawn
/// uniformly from absent vertex pairs and the remaining `B - ceil(mix * B)`
/// deletions drawn uniformly from existing non-loop edges. The vertex
/// universe is unchanged.
pub fn random_batch(g: &DynGraph, plan: &ExperimentPlan) -> Result<BatchUpdate, PlanError> {
    plan.validate();
    let n = g.num_vertices() as VertexId;
    let b = plan.batch_size;
    let (n_ins, n_del) = split_counts(plan.mix, b);
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);

    let mut insertions: BTreeSet<Edge> = BTreeSet::new();
    let max_attempts = 100 * n_ins + 1000;
    let mut attempts = 0;
    while insertions.len() < n_ins {
        if attempts >= max_attempts {
            return Err(PlanError::SamplingExhausted {
                side: "insertions",
                requested: n_ins,
                attempts,
            });
        }
        attempts += 1;
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if !g.has_edge(u, v) {
            insertions.insert((u, v));
        }
    }

    let mut candidates: Vec<Edge> = g.edges().filter(|&(u, v)| u != v).collect();
    if candidates.len() < n_del {
        return Err(PlanError::SamplingExhausted {
            side: "deletions",
            requested: n_del,
            attempts: 0,
        });
    }
    // partial Fisher-Yates: the first n_del slots become the sample
    for i in 0..n_del {
        let j = rng.random_range(i..candidates.len());
        candidates.swap(i, j);
    }
    candidates.truncate(n_del);

    Ok(BatchUpdate::new(candidates, insertions))
}
