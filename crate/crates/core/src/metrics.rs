//! Reference ranks, error norms, and aggregation.

use crate::graph::DynGraph;
use crate::rank::{Engine, PrResult};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("geometric mean of an empty sequence")]
    Empty,
    #[error("geometric mean requires positive values, got {0}")]
    NonPositive(f64),
}

/// Error measurements of one strategy run against the reference ranks of
/// the same graph snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Sum of absolute rank differences.
    pub l1: f64,
    /// Maximum absolute rank difference.
    pub linf: f64,
    /// Ever-affected vertices as a fraction of the vertex universe.
    pub ever_affected_fraction: f64,
    /// Wall-clock seconds of the measured run.
    pub elapsed: f64,
    pub iterations: usize,
}

/// Ground-truth ranks: synchronous power iteration with a tolerance that
/// floating point can never satisfy, capped at 500 sweeps. Equivalently,
/// exactly 500 synchronous sweeps from the uniform vector.
pub fn reference_ranks(g: &DynGraph, alpha: f64) -> Vec<f64> {
    reference_ranks_with(g, alpha, 1)
}

/// [`reference_ranks`] on `threads` workers. The synchronous kernel is
/// bitwise independent of the worker count, so this only changes speed.
pub fn reference_ranks_with(g: &DynGraph, alpha: f64, threads: usize) -> Vec<f64> {
    let mut engine = Engine::new(g.num_vertices());
    reference_run(&mut engine, g, alpha, threads).ranks
}

pub(crate) fn reference_run(
    engine: &mut Engine,
    g: &DynGraph,
    alpha: f64,
    threads: usize,
) -> PrResult {
    engine.power_sweeps(g, alpha, 500, threads)
}

/// `sum_v |a[v] - b[v]|`. Panics on length mismatch.
pub fn l1_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "rank vector lengths differ");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// `max_v |a[v] - b[v]|`. Panics on length mismatch.
pub fn linf_error(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "rank vector lengths differ");
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// `exp(mean(ln x))` over positive values.
pub fn geomean(xs: &[f64]) -> Result<f64, MetricsError> {
    if xs.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut acc = 0.0;
    for &x in xs {
        if x <= 0.0 {
            return Err(MetricsError::NonPositive(x));
        }
        acc += x.ln();
    }
    Ok((acc / xs.len() as f64).exp())
}

/// Measures a run against the reference ranks of the same snapshot.
pub fn error_report(result: &PrResult, reference: &[f64]) -> ErrorReport {
    let n = reference.len();
    ErrorReport {
        l1: l1_error(&result.ranks, reference),
        linf: linf_error(&result.ranks, reference),
        ever_affected_fraction: result.ever_affected_count as f64 / n as f64,
        elapsed: result.elapsed.as_secs_f64(),
        iterations: result.iterations,
    }
}
