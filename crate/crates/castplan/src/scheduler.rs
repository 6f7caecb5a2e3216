//! Exact completion-time scheduling of a batch allocation.
//!
//! Every batch `b` gets a completion time `z_b >= setup_b`; two batches on
//! the same physical resource must be separated so that one's processing and
//! the other's setup never overlap (`z_a + processing <= z_b - setup_b` in
//! one of the two orders). The objective is the total absolute deviation
//! `sum |z_b - target_b|` from per-batch target dates.
//!
//! Solved exactly: orders are enumerated per resource, and the timing of one
//! order reduces (by subtracting the cumulative chain offsets) to an L1
//! isotonic regression with a floor at zero, solved by pool-adjacent-violators
//! with lower medians. Lower medians also make the returned times the
//! earliest optimal vector for the chosen order.

use crate::instance::ProblemInstance;
use crate::qubo::Allocation;
use itertools::Itertools;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Order enumeration is factorial; more batches than this on one resource is
/// outside the intended desk scale.
pub const MAX_BATCHES_PER_RESOURCE: usize = 10;

#[derive(Debug, thiserror::Error)]
pub enum ScheduleError {
    #[error("allocation has no batches")]
    EmptyAllocation,
    #[error("batch references missing {what} {index}")]
    BadReference { what: &'static str, index: usize },
    #[error("resource {resource} carries {count} batches, enumeration supports at most {MAX_BATCHES_PER_RESOURCE}")]
    TooManyBatches { resource: usize, count: usize },
    #[error("schedule has {found} times for {expected} jobs")]
    LengthMismatch { found: usize, expected: usize },
}

/// One batch to be timed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchJob {
    pub cluster: usize,
    pub resource: usize,
    pub copy: usize,
    /// Positional task indices within the cluster.
    pub tasks: Vec<usize>,
    /// Setup interval occupied right before completion.
    pub setup_time: i64,
    /// Processing interval occupied right after completion.
    pub processing_time: i64,
    /// Target completion date (weighted median of member due dates).
    pub target: i64,
}

/// Scheduling input: jobs in allocation order plus the shared constants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleProblem {
    pub jobs: Vec<BatchJob>,
    /// Disjunctive big-M constant; also the latest completion considered.
    pub big_m: i64,
    pub horizon: i64,
}

/// Solved timing: completion times parallel to `jobs`, the sequencing bits
/// for same-resource pairs (`a_before_b` for `a < b`), and the objective.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub times: Vec<i64>,
    pub sequencing: Vec<(usize, usize, bool)>,
    pub objective: i64,
}

/// Lower weighted median: the smallest value minimizing
/// `sum_i w_i |z - d_i]`.
pub fn weighted_median(values: &mut Vec<(i64, u64)>) -> i64 {
    assert!(!values.is_empty(), "median of empty set");
    values.sort_by_key(|&(v, _)| v);
    let total: u64 = values.iter().map(|&(_, w)| w).sum();
    let mut acc = 0u64;
    for &(v, w) in values.iter() {
        acc += w;
        if 2 * acc >= total {
            return v;
        }
    }
    values.last().expect("non-empty").0
}

/// Builds the timing problem for an allocation.
///
/// Batch targets are weighted medians of member due dates (weights = task
/// weights); setup and processing times come from each batch's resource.
/// `big_m = horizon = max target + sum of (setup + processing) + 1`, large
/// enough that a deactivated disjunct never binds.
pub fn build_schedule_problem(
    inst: &ProblemInstance,
    alloc: &Allocation,
) -> Result<ScheduleProblem, ScheduleError> {
    if alloc.batches.is_empty() {
        return Err(ScheduleError::EmptyAllocation);
    }

    let mut jobs = Vec::with_capacity(alloc.batches.len());
    for batch in &alloc.batches {
        let cluster = inst
            .clusters
            .get(batch.cluster)
            .ok_or(ScheduleError::BadReference {
                what: "cluster",
                index: batch.cluster,
            })?;
        let resource = inst
            .resources
            .get(batch.resource)
            .ok_or(ScheduleError::BadReference {
                what: "resource",
                index: batch.resource,
            })?;
        let mut dues = Vec::with_capacity(batch.tasks.len());
        for &i in &batch.tasks {
            let task = cluster.tasks.get(i).ok_or(ScheduleError::BadReference {
                what: "task",
                index: i,
            })?;
            dues.push((i64::from(task.due_date), u64::from(task.weight)));
        }
        if dues.is_empty() {
            return Err(ScheduleError::BadReference {
                what: "task list of batch on resource",
                index: batch.resource,
            });
        }
        jobs.push(BatchJob {
            cluster: batch.cluster,
            resource: batch.resource,
            copy: batch.copy,
            tasks: batch.tasks.clone(),
            setup_time: i64::from(resource.setup_time),
            processing_time: i64::from(resource.processing_time),
            target: weighted_median(&mut dues),
        });
    }

    let max_target = jobs.iter().map(|j| j.target).max().unwrap_or(0);
    let total_span: i64 = jobs.iter().map(|j| j.setup_time + j.processing_time).sum();
    let big_m = max_target + total_span + 1;

    Ok(ScheduleProblem {
        jobs,
        big_m,
        horizon: big_m,
    })
}

/// L1 isotonic regression of `targets` with a floor at `0`, by PAVA with
/// lower medians. Returns the pointwise-smallest optimal non-decreasing fit.
fn isotonic_l1_floor(targets: &[i64]) -> Vec<i64> {
    // Each block keeps its member targets sorted; its fit is the lower median.
    struct Block {
        values: Vec<i64>, // sorted
        len: usize,
    }
    impl Block {
        fn fit(&self) -> i64 {
            self.values[(self.values.len() - 1) / 2]
        }
    }

    let mut blocks: Vec<Block> = Vec::new();
    for &t in targets {
        blocks.push(Block {
            values: vec![t],
            len: 1,
        });
        while blocks.len() >= 2 {
            let last = blocks.len() - 1;
            if blocks[last - 1].fit() <= blocks[last].fit() {
                break;
            }
            let merged = blocks.pop().expect("non-empty");
            let into = blocks.last_mut().expect("non-empty");
            let mut joined = Vec::with_capacity(into.values.len() + merged.values.len());
            let (mut a, mut b) = (0, 0);
            while a < into.values.len() && b < merged.values.len() {
                if into.values[a] <= merged.values[b] {
                    joined.push(into.values[a]);
                    a += 1;
                } else {
                    joined.push(merged.values[b]);
                    b += 1;
                }
            }
            joined.extend_from_slice(&into.values[a..]);
            joined.extend_from_slice(&merged.values[b..]);
            into.values = joined;
            into.len += merged.len;
        }
    }

    let mut fit = Vec::with_capacity(targets.len());
    for block in &blocks {
        // Clamping a bounded isotonic fit at the bound stays optimal for
        // convex per-point losses.
        let v = block.fit().max(0);
        for _ in 0..block.len {
            fit.push(v);
        }
    }
    fit
}

/// Exact minimum-deviation times for the jobs `order[0], order[1], ...` run
/// consecutively on one resource. Returns (times parallel to `order`, cost).
///
/// The chain constraints are `z_first >= setup_first` and
/// `z_next >= z_prev + processing_prev + setup_next`; subtracting each job's
/// earliest chain position turns them into a non-negativity plus
/// monotonicity condition, i.e. L1 isotonic regression.
pub fn optimal_times_for_order(jobs: &[BatchJob], order: &[usize]) -> (Vec<i64>, i64) {
    assert!(!order.is_empty(), "order must name at least one job");
    let mut offsets = Vec::with_capacity(order.len());
    let mut acc = jobs[order[0]].setup_time;
    offsets.push(acc);
    for w in order.windows(2) {
        acc += jobs[w[0]].processing_time + jobs[w[1]].setup_time;
        offsets.push(acc);
    }

    let shifted: Vec<i64> = order
        .iter()
        .zip(&offsets)
        .map(|(&j, &off)| jobs[j].target - off)
        .collect();
    let fit = isotonic_l1_floor(&shifted);

    let times: Vec<i64> = fit.iter().zip(&offsets).map(|(u, off)| u + off).collect();
    let cost = times
        .iter()
        .zip(order)
        .map(|(&z, &j)| (z - jobs[j].target).abs())
        .sum();
    (times, cost)
}

/// Solves the timing problem exactly.
///
/// Per resource, all batch orders are enumerated (lexicographically by job
/// index) and each is timed optimally; the best (cost, order) wins, so ties
/// go to the lexicographically smallest order, and within an order the
/// lower-median fit yields the earliest optimal times.
pub fn solve_schedule(problem: &ScheduleProblem) -> Result<Schedule, ScheduleError> {
    if problem.jobs.is_empty() {
        return Err(ScheduleError::EmptyAllocation);
    }

    let mut by_resource: std::collections::BTreeMap<usize, Vec<usize>> =
        std::collections::BTreeMap::new();
    for (ix, job) in problem.jobs.iter().enumerate() {
        by_resource.entry(job.resource).or_default().push(ix);
    }

    let mut times = vec![0i64; problem.jobs.len()];
    let mut objective = 0i64;

    for (&resource, group) in &by_resource {
        if group.len() > MAX_BATCHES_PER_RESOURCE {
            return Err(ScheduleError::TooManyBatches {
                resource,
                count: group.len(),
            });
        }
        let mut best: Option<(i64, Vec<usize>, Vec<i64>)> = None;
        for order in group.iter().copied().permutations(group.len()) {
            let (t, cost) = optimal_times_for_order(&problem.jobs, &order);
            let better = match &best {
                None => true,
                Some((c, _, _)) => cost < *c,
            };
            if better {
                best = Some((cost, order, t));
            }
        }
        let (cost, order, t) = best.expect("at least one order");
        for (pos, &j) in order.iter().enumerate() {
            times[j] = t[pos];
        }
        objective += cost;
    }

    let sequencing = sequencing_bits(problem, &times);
    Ok(Schedule {
        times,
        sequencing,
        objective,
    })
}

/// Derives `a_before_b` bits for each same-resource pair `a < b`.
fn sequencing_bits(problem: &ScheduleProblem, times: &[i64]) -> Vec<(usize, usize, bool)> {
    let mut bits = Vec::new();
    for a in 0..problem.jobs.len() {
        for b in (a + 1)..problem.jobs.len() {
            if problem.jobs[a].resource == problem.jobs[b].resource {
                bits.push((a, b, times[a] < times[b]));
            }
        }
    }
    bits
}

/// Audit findings for a proposed schedule.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleAudit {
    pub findings: Vec<String>,
}

impl ScheduleAudit {
    pub fn is_ok(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Checks floor, pairwise separation, and the stored objective.
pub fn validate_schedule(
    problem: &ScheduleProblem,
    schedule: &Schedule,
) -> Result<ScheduleAudit, ScheduleError> {
    if schedule.times.len() != problem.jobs.len() {
        return Err(ScheduleError::LengthMismatch {
            found: schedule.times.len(),
            expected: problem.jobs.len(),
        });
    }
    let mut audit = ScheduleAudit::default();
    for (ix, (job, &z)) in problem.jobs.iter().zip(&schedule.times).enumerate() {
        if z < job.setup_time {
            audit.findings.push(format!(
                "job {ix}: completion {z} is before its setup interval ({})",
                job.setup_time
            ));
        }
    }
    for a in 0..problem.jobs.len() {
        for b in (a + 1)..problem.jobs.len() {
            let (ja, jb) = (&problem.jobs[a], &problem.jobs[b]);
            if ja.resource != jb.resource {
                continue;
            }
            let (za, zb) = (schedule.times[a], schedule.times[b]);
            let a_first = zb - za >= ja.processing_time + jb.setup_time;
            let b_first = za - zb >= jb.processing_time + ja.setup_time;
            if !a_first && !b_first {
                audit.findings.push(format!(
                    "jobs {a} and {b} overlap on resource {} (times {za}, {zb})",
                    ja.resource
                ));
            }
        }
    }
    let recomputed: i64 = problem
        .jobs
        .iter()
        .zip(&schedule.times)
        .map(|(job, &z)| (z - job.target).abs())
        .sum();
    if recomputed != schedule.objective {
        audit.findings.push(format!(
            "stored objective {} differs from recomputed {recomputed}",
            schedule.objective
        ));
    }
    Ok(audit)
}

/// Total absolute deviation of arbitrary times (used by audits and tests).
pub fn deviation_objective(problem: &ScheduleProblem, times: &[i64]) -> i64 {
    problem
        .jobs
        .iter()
        .zip(times)
        .map(|(job, &z)| (z - job.target).abs())
        .sum()
}

/// Exports the exact timing model in LP text format: minimize the sum of
/// per-job deviations `t_k >= |z_k - target_k|` under the disjunctive
/// separation constraints with the computed big-M.
pub fn export_lp(problem: &ScheduleProblem) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ batch timing model, big_m = {}", problem.big_m);
    let _ = writeln!(out, "Minimize");
    let obj = (0..problem.jobs.len())
        .map(|k| format!("t_{k}"))
        .collect::<Vec<_>>()
        .join(" + ");
    let _ = writeln!(out, " obj: {obj}");
    let _ = writeln!(out, "Subject To");
    for (k, job) in problem.jobs.iter().enumerate() {
        let _ = writeln!(out, " dev_pos_{k}: t_{k} - z_{k} >= {}", -job.target);
        let _ = writeln!(out, " dev_neg_{k}: t_{k} + z_{k} >= {}", job.target);
    }
    let m = problem.big_m;
    for a in 0..problem.jobs.len() {
        for b in (a + 1)..problem.jobs.len() {
            let (ja, jb) = (&problem.jobs[a], &problem.jobs[b]);
            if ja.resource != jb.resource {
                continue;
            }
            // s_a_b = 1 means a completes first.
            let _ = writeln!(
                out,
                " seq_{a}_{b}_fwd: z_{b} - z_{a} + {m} s_{a}_{b} >= {}",
                ja.processing_time + jb.setup_time
            );
            let _ = writeln!(
                out,
                " seq_{a}_{b}_rev: z_{a} - z_{b} - {m} s_{a}_{b} >= {}",
                jb.processing_time + ja.setup_time - m
            );
        }
    }
    let _ = writeln!(out, "Bounds");
    for (k, job) in problem.jobs.iter().enumerate() {
        let _ = writeln!(out, " {} <= z_{k} <= {}", job.setup_time, problem.horizon);
        let _ = writeln!(out, " 0 <= t_{k} <= {}", problem.horizon);
    }
    let binaries: Vec<String> = (0..problem.jobs.len())
        .flat_map(|a| {
            let jobs = &problem.jobs;
            ((a + 1)..jobs.len())
                .filter(move |&b| jobs[a].resource == jobs[b].resource)
                .map(move |b| format!("s_{a}_{b}"))
        })
        .collect();
    if !binaries.is_empty() {
        let _ = writeln!(out, "Binary");
        let _ = writeln!(out, " {}", binaries.join(" "));
    }
    let _ = writeln!(out, "End");
    out
}
