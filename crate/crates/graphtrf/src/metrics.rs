//! Graph Response Efficiency (GRE) and derived quantities.
//!
//! GRE for one question under one representation is
//! `100 * accuracy / avg_tok^alpha`; higher is better. The log split
//! `log(gre) = acc_obj + alpha * eff_obj` with `acc_obj = ln(100*accuracy)`
//! and `eff_obj = -ln(avg_tok)` underlies the optimality argument for the
//! routed strategy, so both pieces are exposed separately.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trf::TrfKind;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GreParams {
    pub alpha: f64,
    /// Runs per (question, representation) cell during probing.
    pub probe_k: usize,
    /// Runs per cell during evaluation.
    pub eval_k: usize,
    /// Sampling temperature forwarded to the client.
    pub temperature: f64,
}

impl Default for GreParams {
    fn default() -> GreParams {
        GreParams { alpha: 0.5, probe_k: 10, eval_k: 3, temperature: 0.7 }
    }
}

/// Per-question aggregates over k runs of a single representation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeStats {
    /// Fraction of runs judged correct, in [0, 1].
    pub accuracy: f64,
    /// Mean completion tokens across all runs (at least 1 per run).
    pub avg_tok: f64,
}

pub fn gre(stats: ProbeStats, alpha: f64) -> f64 {
    100.0 * stats.accuracy / stats.avg_tok.powf(alpha)
}

/// `(acc_obj, eff_obj)` with `log(gre) = acc_obj + alpha * eff_obj`.
/// Zero accuracy has no finite log objective.
pub fn log_objectives(stats: ProbeStats) -> Result<(f64, f64)> {
    if stats.accuracy <= 0.0 {
        return Err(Error::ZeroAccuracy);
    }
    Ok(((100.0 * stats.accuracy).ln(), -stats.avg_tok.ln()))
}

/// Indices (canonical order) of the representations attaining the maximum
/// GRE, under exact equality. All-zero rows prefer every representation.
pub fn preferred_set(per_trf_gre: &[f64; TrfKind::COUNT]) -> Vec<usize> {
    let max = per_trf_gre.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max <= 0.0 {
        return (0..TrfKind::COUNT).collect();
    }
    (0..TrfKind::COUNT).filter(|&i| per_trf_gre[i] == max).collect()
}

/// Task-level aggregate: GRE of the pooled accuracy and token means, not the
/// mean of per-question GREs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaskAggregate {
    pub acc_pct: f64,
    pub avg_tok: f64,
    pub gre: f64,
}

pub fn task_aggregate(per_question: &[ProbeStats], alpha: f64) -> Result<TaskAggregate> {
    if per_question.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let n = per_question.len() as f64;
    let acc = per_question.iter().map(|s| s.accuracy).sum::<f64>() / n;
    let tok = per_question.iter().map(|s| s.avg_tok).sum::<f64>() / n;
    Ok(TaskAggregate {
        acc_pct: 100.0 * acc,
        avg_tok: tok,
        gre: 100.0 * acc / tok.powf(alpha),
    })
}
