//! Shared fixtures for the integration suites.

use dfrank_core::dynamics::{random_batch, ExperimentPlan};
use dfrank_core::graph::{BatchUpdate, DynGraph, Edge};
use dfrank_core::rank::{Engine, PrOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A 16-vertex, 23-edge example graph (no self-loops) with a one-deletion,
/// one-insertion batch. Key structure:
///
/// * updated edge sources are 2 and 4: the batch deletes (2, 1) and
///   inserts (4, 12);
/// * the out-neighbors of 2 and 4 across both snapshots are {1, 8, 12, 14};
/// * the out-neighbors of {1, 8, 12, 14} are {3, 5, 9, 10, 14, 15};
/// * every vertex except 7, 11 and 13 is reachable from {2, 4}.
pub fn example_graph_16() -> (DynGraph, BatchUpdate) {
    let edges: [Edge; 23] = [
        (2, 1),
        (2, 8),
        (4, 14),
        (1, 3),
        (1, 5),
        (8, 9),
        (8, 10),
        (12, 14),
        (12, 15),
        (14, 15),
        (3, 4),
        (5, 6),
        (9, 10),
        (15, 0),
        (0, 2),
        (7, 1),
        (7, 8),
        (7, 11),
        (11, 12),
        (11, 15),
        (13, 11),
        (13, 14),
        (13, 0),
    ];
    let g = DynGraph::from_edges(16, edges);
    let batch = BatchUpdate::new([(2, 1)], [(4, 12)]);
    (g, batch)
}

/// Seeded directed graph with roughly `avg_out_deg` out-edges per vertex,
/// self-loops injected.
pub fn random_graph(seed: u64, n: usize, avg_out_deg: f64) -> DynGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = (n as f64 * avg_out_deg) as usize;
    let edges: Vec<Edge> = (0..m)
        .map(|_| (rng.random_range(0..n as u32), rng.random_range(0..n as u32)))
        .collect();
    let mut g = DynGraph::from_edges(n, edges);
    g.add_self_loops();
    g
}

/// One seeded single-batch experiment: a random graph, its converged static
/// ranks, a normalized random batch of `fraction * |E|` edges at the given
/// insertion mix, and the updated snapshot.
pub struct SingleBatch {
    pub g_prev: DynGraph,
    pub g_curr: DynGraph,
    pub batch: BatchUpdate,
    pub prev_ranks: Vec<f64>,
}

pub fn single_batch_experiment(
    seed: u64,
    n: usize,
    avg_out_deg: f64,
    batch_fraction: f64,
    mix: f64,
    opts: &PrOptions,
) -> SingleBatch {
    let g_prev = random_graph(seed, n, avg_out_deg);
    let batch_size = ((batch_fraction * g_prev.num_edges() as f64).round() as usize).max(1);
    let plan = ExperimentPlan {
        batch_size,
        mix,
        seed: seed ^ 0x9e3779b97f4a7c15,
        ..ExperimentPlan::default()
    };
    let batch = random_batch(&g_prev, &plan).expect("sampleable batch");
    let g_curr = g_prev
        .apply_batch(&batch)
        .expect("normalized batch applies");
    let mut engine = Engine::new(n);
    let prev_ranks = engine.static_pagerank(&g_prev, opts).ranks;
    SingleBatch {
        g_prev,
        g_curr,
        batch,
        prev_ranks,
    }
}
