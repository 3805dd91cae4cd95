//! Evaluation of heuristic variants over one CDAG.
//!
//! Every variant runs the partition → linearize → replay → reuse distance
//! chain on its own; variants share only the read-only trace and CDAG, so a
//! sweep can run them on the rayon pool. Without the `parallel` feature, or
//! with [`Execution::Sequential`], they run one after another.

use std::time::{Duration, Instant};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::cdag::Cdag;
use crate::error::Result;
use crate::partition::{partition, HeuristicParams, Hierarchy};
use crate::rda::{miss_curve, replay, reuse_distances, MissCurve};
use crate::schedule::{linearize, Schedule};
use crate::trace::Trace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Whether this build can actually run variants concurrently.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

#[derive(Debug, Clone)]
pub struct VariantResult {
    pub params: HeuristicParams,
    pub levels: usize,
    /// Components at the coarsest level.
    pub components: usize,
    /// Components at the finest level that were force-started.
    pub forced: usize,
    /// Largest liveset over non-forced components of any level.
    pub peak_liveset: usize,
    pub schedule: Schedule,
    pub curve: MissCurve,
    /// Partitioning plus linearization time.
    pub runtime: Duration,
}

fn peak_over_levels(h: &Hierarchy) -> usize {
    h.levels
        .iter()
        .map(|l| l.partition.peak_live())
        .max()
        .unwrap_or(0)
}

/// Runs one variant end to end.
pub fn evaluate(
    trace: &Trace,
    cdag: &Cdag,
    params: &HeuristicParams,
    sizes: &[u64],
) -> Result<VariantResult> {
    let start = Instant::now();
    let h = partition(cdag, params)?;
    let schedule = linearize(cdag, &h);
    let runtime = start.elapsed();

    let stream = replay(trace, &schedule.order)?;
    let profile = reuse_distances(&stream);
    let curve = miss_curve(&profile, sizes, trace.total_flops(), trace.word_bytes)?;
    Ok(VariantResult {
        params: *params,
        levels: h.num_levels(),
        components: h.top().partition.len(),
        forced: h.base().partition.forced_count(),
        peak_liveset: peak_over_levels(&h),
        schedule,
        curve,
        runtime,
    })
}

/// Evaluates every variant. Results come back in the order of `variants`
/// regardless of the execution mode.
pub fn run_sweep(
    trace: &Trace,
    cdag: &Cdag,
    variants: &[HeuristicParams],
    sizes: &[u64],
    exec: Execution,
) -> Result<Vec<VariantResult>> {
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => variants
            .par_iter()
            .map(|p| evaluate(trace, cdag, p, sizes))
            .collect(),
        _ => variants
            .iter()
            .map(|p| evaluate(trace, cdag, p, sizes))
            .collect(),
    }
}
