//! Precision, recall and F1 against gold alignments, and benchmark suites.

mod benchmark;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use benchmark::{benchmark_run, load_suite, BenchmarkResults, Problem, ProblemResult, RunOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub proposed_count: usize,
    pub gold_count: usize,
    pub true_positive_count: usize,
    pub avg_candidates_per_target: f64,
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Scores a proposed set against a gold set. Every proposal counts toward
/// precision, so a gold pair found among several suggestions yields one true
/// positive and the remaining suggestions count as false positives.
pub fn evaluate<T: Ord>(proposed: &BTreeSet<T>, gold: &BTreeSet<T>, target_count: usize) -> EvalReport {
    let tp = proposed.intersection(gold).count();
    let precision = ratio(tp, proposed.len());
    let recall = ratio(tp, gold.len());
    EvalReport {
        precision,
        recall,
        f1: f1(precision, recall),
        proposed_count: proposed.len(),
        gold_count: gold.len(),
        true_positive_count: tp,
        avg_candidates_per_target: ratio(proposed.len(), target_count),
    }
}

/// Mean of the per-problem rates; F1 is averaged directly. Counts are summed.
pub fn macro_average(reports: &[EvalReport]) -> Result<EvalReport> {
    if reports.is_empty() {
        return Err(Error::contract("cannot average an empty list of reports"));
    }
    if reports.len() == 1 {
        return Ok(reports[0].clone());
    }
    let n = reports.len() as f64;
    let mean = |f: fn(&EvalReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
    Ok(EvalReport {
        precision: mean(|r| r.precision),
        recall: mean(|r| r.recall),
        f1: mean(|r| r.f1),
        proposed_count: reports.iter().map(|r| r.proposed_count).sum(),
        gold_count: reports.iter().map(|r| r.gold_count).sum(),
        true_positive_count: reports.iter().map(|r| r.true_positive_count).sum(),
        avg_candidates_per_target: mean(|r| r.avg_candidates_per_target),
    })
}

/// Rates recomputed from pooled counts.
pub fn micro_average(reports: &[EvalReport]) -> Result<EvalReport> {
    let mut pooled = macro_average(reports)?;
    pooled.precision = ratio(pooled.true_positive_count, pooled.proposed_count);
    pooled.recall = ratio(pooled.true_positive_count, pooled.gold_count);
    pooled.f1 = f1(pooled.precision, pooled.recall);
    Ok(pooled)
}
