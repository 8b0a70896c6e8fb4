//! Affected-vertex marking for the dynamic strategies.

use super::AffectedFlags;
use crate::graph::{merge_union, BatchUpdate, DynGraph};
use std::collections::VecDeque;

/// Marks every vertex reachable from an updated edge source in either
/// snapshot (breadth-first over the union of both out-adjacencies). The
/// source itself is marked: with universal self-loops it is reachable
/// through its own loop.
pub fn dt_mark_affected(
    g_prev: &DynGraph,
    g_curr: &DynGraph,
    batch: &BatchUpdate,
) -> AffectedFlags {
    let flags = AffectedFlags::new(g_curr.num_vertices());
    dt_mark_into(g_prev, g_curr, batch, &flags);
    flags
}

pub(crate) fn dt_mark_into(
    g_prev: &DynGraph,
    g_curr: &DynGraph,
    batch: &BatchUpdate,
    flags: &AffectedFlags,
) {
    let mut queue = VecDeque::new();
    for (u, _) in batch.edges() {
        if !flags.is_marked(u) {
            flags.mark(u);
            queue.push_back(u);
        }
    }
    while let Some(w) = queue.pop_front() {
        merge_union(g_prev.out_neighbors(w), g_curr.out_neighbors(w), |x| {
            if !flags.is_marked(x) {
                flags.mark(x);
                queue.push_back(x);
            }
        });
    }
}

/// Marks the out-neighbors of every updated edge source, in both snapshots.
/// The source is marked only when it appears among its own out-neighbors
/// (which it does once self-loops are injected).
pub fn df_mark_initial(
    g_prev: &DynGraph,
    g_curr: &DynGraph,
    batch: &BatchUpdate,
    flags: &AffectedFlags,
) {
    for (u, _) in batch.edges() {
        merge_union(g_prev.out_neighbors(u), g_curr.out_neighbors(u), |w| {
            flags.mark(w)
        });
    }
}
