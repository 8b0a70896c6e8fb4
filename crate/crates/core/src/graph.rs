//! Dynamic directed graph with dual adjacency and batched edge updates.
//!
//! Adjacency lists are kept sorted with no duplicate edges; the in-adjacency
//! mirrors the out-adjacency exactly. A batch update is applied by cloning
//! the graph and editing only the touched vertices' lists, so the caller
//! keeps the pre-update snapshot alongside the updated one.

use std::collections::BTreeSet;
use thiserror::Error;

/// Dense vertex index in `[0, |V|)`.
pub type VertexId = u32;

/// A directed edge `(source, target)`.
pub type Edge = (VertexId, VertexId);

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} out of range for graph with {1} vertices")]
    VertexOutOfRange(VertexId, usize),
    #[error("batch deletes edge ({0}, {1}) which is not present")]
    DeleteAbsent(VertexId, VertexId),
    #[error("batch deletes self-loop ({0}, {0})")]
    DeleteSelfLoop(VertexId),
    #[error("batch inserts edge ({0}, {1}) which is already present")]
    InsertPresent(VertexId, VertexId),
}

/// Directed graph over a fixed vertex universe `[0, |V|)`.
///
/// Both out- and in-neighbor lists are stored (sorted, deduplicated) so the
/// pull-based rank kernel can iterate in-neighbors while batch application
/// and frontier expansion work on out-neighbors. The structure is immutable
/// during algorithm execution; mutation happens through [`add_self_loops`]
/// or [`apply_batch`], never concurrently with reads.
///
/// [`add_self_loops`]: DynGraph::add_self_loops
/// [`apply_batch`]: DynGraph::apply_batch
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynGraph {
    out_adj: Vec<Vec<VertexId>>,
    in_adj: Vec<Vec<VertexId>>,
    out_deg: Vec<u32>,
}

impl DynGraph {
    /// Creates an edgeless graph with `n` vertices.
    pub fn new(n: usize) -> Self {
        DynGraph {
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            out_deg: vec![0; n],
        }
    }

    /// Builds a graph from an edge list; duplicate edges collapse to one.
    ///
    /// Panics if an endpoint is outside `[0, n)`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = Edge>) -> Self {
        let mut g = DynGraph::new(n);
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            assert!(
                (u as usize) < n && (v as usize) < n,
                "edge ({u}, {v}) out of range for {n} vertices"
            );
            set.insert((u, v));
        }
        for (u, v) in set {
            g.out_adj[u as usize].push(v);
            g.in_adj[v as usize].push(u);
        }
        for v in 0..n {
            g.in_adj[v].sort_unstable();
            g.out_deg[v] = g.out_adj[v].len() as u32;
        }
        g
    }

    pub fn num_vertices(&self) -> usize {
        self.out_adj.len()
    }

    /// Total number of directed edges, self-loops included.
    pub fn num_edges(&self) -> usize {
        self.out_deg.iter().map(|&d| d as usize).sum()
    }

    pub fn out_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.out_adj[v as usize]
    }

    pub fn in_neighbors(&self, v: VertexId) -> &[VertexId] {
        &self.in_adj[v as usize]
    }

    pub fn out_degree(&self, v: VertexId) -> u32 {
        self.out_deg[v as usize]
    }

    /// Cached out-degrees, indexed by vertex.
    pub fn out_degrees(&self) -> &[u32] {
        &self.out_deg
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.out_adj[u as usize].binary_search(&v).is_ok()
    }

    /// Iterates all edges in `(source, target)` order, self-loops included.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(u, outs)| outs.iter().map(move |&v| (u as VertexId, v)))
    }

    /// Adds a self-loop to every vertex. Idempotent: existing loops are kept,
    /// never duplicated. Afterwards `out_degree(v) >= 1` for all `v`, so the
    /// rank recurrence never divides by zero.
    pub fn add_self_loops(&mut self) {
        for v in 0..self.out_adj.len() {
            let id = v as VertexId;
            if let Err(pos) = self.out_adj[v].binary_search(&id) {
                self.out_adj[v].insert(pos, id);
                self.out_deg[v] += 1;
                let ipos = self.in_adj[v].binary_search(&id).unwrap_err();
                self.in_adj[v].insert(ipos, id);
            }
        }
    }

    /// Applies a batch update, returning the updated graph and leaving `self`
    /// untouched as the previous snapshot.
    ///
    /// The batch must be normalized: every deletion names a present non-loop
    /// edge and every insertion names an absent edge, otherwise the offending
    /// edge is reported as a validation error.
    pub fn apply_batch(&self, batch: &BatchUpdate) -> Result<DynGraph, GraphError> {
        let n = self.num_vertices();
        for &(u, v) in batch.deletions().iter().chain(batch.insertions()) {
            if (u as usize) >= n {
                return Err(GraphError::VertexOutOfRange(u, n));
            }
            if (v as usize) >= n {
                return Err(GraphError::VertexOutOfRange(v, n));
            }
        }
        let mut g = self.clone();
        for &(u, v) in batch.deletions() {
            if u == v {
                return Err(GraphError::DeleteSelfLoop(u));
            }
            match g.out_adj[u as usize].binary_search(&v) {
                Ok(pos) => {
                    g.out_adj[u as usize].remove(pos);
                    g.out_deg[u as usize] -= 1;
                }
                Err(_) => return Err(GraphError::DeleteAbsent(u, v)),
            }
            let ipos = g.in_adj[v as usize]
                .binary_search(&u)
                .expect("in-adjacency mirrors out-adjacency");
            g.in_adj[v as usize].remove(ipos);
        }
        for &(u, v) in batch.insertions() {
            match g.out_adj[u as usize].binary_search(&v) {
                Ok(_) => return Err(GraphError::InsertPresent(u, v)),
                Err(pos) => {
                    g.out_adj[u as usize].insert(pos, v);
                    g.out_deg[u as usize] += 1;
                }
            }
            let ipos = g.in_adj[v as usize].binary_search(&u).unwrap_err();
            g.in_adj[v as usize].insert(ipos, u);
        }
        Ok(g)
    }

    /// Full-scan structural check: sorted deduplicated lists, exact in/out
    /// mirror, and degree cache agreement. Intended for tests.
    pub fn is_consistent(&self) -> bool {
        let n = self.num_vertices();
        if self.in_adj.len() != n || self.out_deg.len() != n {
            return false;
        }
        for adj in self.out_adj.iter().chain(self.in_adj.iter()) {
            if !adj.windows(2).all(|w| w[0] < w[1]) {
                return false;
            }
            if adj.iter().any(|&x| (x as usize) >= n) {
                return false;
            }
        }
        for v in 0..n {
            if self.out_deg[v] as usize != self.out_adj[v].len() {
                return false;
            }
        }
        let mut mirror: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for (u, v) in self.edges() {
            mirror[v as usize].push(u);
        }
        (0..n).all(|v| mirror[v] == self.in_adj[v])
    }
}

/// Out-neighbors of `u` in either snapshot, deduplicated and sorted.
pub fn union_out_neighbors(g_prev: &DynGraph, g_curr: &DynGraph, u: VertexId) -> Vec<VertexId> {
    let mut out = Vec::new();
    merge_union(g_prev.out_neighbors(u), g_curr.out_neighbors(u), |v| {
        out.push(v)
    });
    out
}

/// Walks the union of two sorted slices in ascending order without
/// allocating, invoking `f` once per distinct element.
pub(crate) fn merge_union(a: &[VertexId], b: &[VertexId], mut f: impl FnMut(VertexId)) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        let (x, y) = (a[i], b[j]);
        if x < y {
            f(x);
            i += 1;
        } else if y < x {
            f(y);
            j += 1;
        } else {
            f(x);
            i += 1;
            j += 1;
        }
    }
    for &x in &a[i..] {
        f(x);
    }
    for &y in &b[j..] {
        f(y);
    }
}

/// Ordered sets of edge deletions and insertions applied between two
/// consecutive graph snapshots.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BatchUpdate {
    deletions: Vec<Edge>,
    insertions: Vec<Edge>,
}

impl BatchUpdate {
    /// Builds a batch from already-normalized edge lists. Each list is
    /// sorted and deduplicated; cross-list consistency is the caller's
    /// responsibility (see [`BatchUpdate::normalize_against`]).
    pub fn new(
        deletions: impl IntoIterator<Item = Edge>,
        insertions: impl IntoIterator<Item = Edge>,
    ) -> Self {
        let mut deletions: Vec<Edge> = deletions.into_iter().collect();
        let mut insertions: Vec<Edge> = insertions.into_iter().collect();
        deletions.sort_unstable();
        deletions.dedup();
        insertions.sort_unstable();
        insertions.dedup();
        BatchUpdate {
            deletions,
            insertions,
        }
    }

    /// Normalizes raw edge events against the pre-update graph:
    /// duplicate events collapse, an edge both deleted and inserted resolves
    /// to its final state (present), self-loop deletions are dropped,
    /// deletions of absent edges and insertions of present edges are dropped.
    /// The result always satisfies [`DynGraph::apply_batch`]'s preconditions.
    pub fn normalize_against(
        g: &DynGraph,
        deletions: impl IntoIterator<Item = Edge>,
        insertions: impl IntoIterator<Item = Edge>,
    ) -> Self {
        let ins: BTreeSet<Edge> = insertions.into_iter().collect();
        let del: BTreeSet<Edge> = deletions.into_iter().collect();
        let deletions = del
            .iter()
            .copied()
            .filter(|&(u, v)| u != v && !ins.contains(&(u, v)) && g.has_edge(u, v))
            .collect();
        let insertions = ins
            .into_iter()
            .filter(|&(u, v)| !g.has_edge(u, v))
            .collect();
        BatchUpdate {
            deletions,
            insertions,
        }
    }

    pub fn deletions(&self) -> &[Edge] {
        &self.deletions
    }

    pub fn insertions(&self) -> &[Edge] {
        &self.insertions
    }

    /// All edges in the batch, deletions first.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.deletions.iter().chain(self.insertions.iter()).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.deletions.is_empty() && self.insertions.is_empty()
    }

    /// Total number of edge events in the batch.
    pub fn len(&self) -> usize {
        self.deletions.len() + self.insertions.len()
    }

    /// The inverse batch: applying it to the updated graph restores the
    /// original edge set.
    pub fn reversed(&self) -> BatchUpdate {
        BatchUpdate {
            deletions: self.insertions.clone(),
            insertions: self.deletions.clone(),
        }
    }
}
