//! Plan quality metrics: the two KPIs, Pareto filtering, and hypervolume.
//!
//! A plan is scored by its mean batch filling ratio (maximize) and its total
//! lead-time deviation (minimize). Fronts from different methods are compared
//! by 2D hypervolume after mapping lead time onto a shared [0, 1] utility
//! scale.

use crate::instance::ProblemInstance;
use crate::qubo::Allocation;
use crate::scheduler::ScheduleProblem;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("allocation has no batches")]
    EmptyAllocation,
    #[error("times length {found} does not match {expected} batches")]
    LengthMismatch { found: usize, expected: usize },
    #[error("batch references missing {what} {index}")]
    BadReference { what: &'static str, index: usize },
}

/// One scored plan: filling ratio in [0, 1] (higher is better) and total
/// absolute lead-time deviation (lower is better).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KpiPoint {
    pub filling_ratio: f64,
    pub lead_time: f64,
}

impl KpiPoint {
    /// Weak Pareto dominance: at least as good on both axes.
    pub fn weakly_dominates(&self, other: &KpiPoint) -> bool {
        self.filling_ratio >= other.filling_ratio && self.lead_time <= other.lead_time
    }

    pub fn strictly_dominates(&self, other: &KpiPoint) -> bool {
        self.weakly_dominates(other)
            && (self.filling_ratio > other.filling_ratio || self.lead_time < other.lead_time)
    }
}

/// Scores an allocation and its batch completion times.
///
/// Filling ratio is the mean over used batches of `load / capacity`; lead
/// time sums `|z_batch - due_task|` over every task, unweighted.
pub fn kpis(
    inst: &ProblemInstance,
    alloc: &Allocation,
    times: &[i64],
) -> Result<KpiPoint, MetricsError> {
    if alloc.batches.is_empty() {
        return Err(MetricsError::EmptyAllocation);
    }
    if times.len() != alloc.batches.len() {
        return Err(MetricsError::LengthMismatch {
            found: times.len(),
            expected: alloc.batches.len(),
        });
    }
    let mut fill_sum = 0.0;
    let mut lead = 0.0;
    for (batch, &z) in alloc.batches.iter().zip(times) {
        let resource = inst
            .resources
            .get(batch.resource)
            .ok_or(MetricsError::BadReference {
                what: "resource",
                index: batch.resource,
            })?;
        let cluster = inst
            .clusters
            .get(batch.cluster)
            .ok_or(MetricsError::BadReference {
                what: "cluster",
                index: batch.cluster,
            })?;
        fill_sum += batch.load as f64 / f64::from(resource.capacity);
        for &i in &batch.tasks {
            let task = cluster.tasks.get(i).ok_or(MetricsError::BadReference {
                what: "task",
                index: i,
            })?;
            lead += (z - i64::from(task.due_date)).abs() as f64;
        }
    }
    Ok(KpiPoint {
        filling_ratio: fill_sum / alloc.batches.len() as f64,
        lead_time: lead,
    })
}

/// Lead-time part of `kpis` for a schedule problem's jobs (used where the
/// original instance is no longer at hand).
pub fn lead_time_of(problem: &ScheduleProblem, inst: &ProblemInstance, times: &[i64]) -> f64 {
    let mut lead = 0.0;
    for (job, &z) in problem.jobs.iter().zip(times) {
        for &i in &job.tasks {
            let due = i64::from(inst.clusters[job.cluster].tasks[i].due_date);
            lead += (z - due).abs() as f64;
        }
    }
    lead
}

/// Indices of the non-dominated points, sorted by filling ratio descending
/// (ties: lead time ascending, then index). Duplicate KPI pairs keep only the
/// first-sorted representative.
pub fn pareto_indices(points: &[KpiPoint]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[b]
            .filling_ratio
            .total_cmp(&points[a].filling_ratio)
            .then(points[a].lead_time.total_cmp(&points[b].lead_time))
            .then(a.cmp(&b))
    });
    // Sweep in fill-descending order: a point survives only by strictly
    // improving the best lead seen, which also collapses exact duplicates.
    let mut front = Vec::new();
    let mut best_lead = f64::INFINITY;
    for ix in order {
        if points[ix].lead_time < best_lead {
            best_lead = points[ix].lead_time;
            front.push(ix);
        }
    }
    front
}

/// The non-dominated subset itself, in the `pareto_indices` order.
pub fn pareto_filter(points: &[KpiPoint]) -> Vec<KpiPoint> {
    pareto_indices(points).into_iter().map(|i| points[i]).collect()
}

/// 2D hypervolume of a front against the reference point (0, 0) after
/// mapping lead time to the utility `u = 1 - lead / lead_max`.
///
/// `lead_max` must cover every point (utility would go negative otherwise);
/// points at `lead_max` contribute zero area. Dominated or duplicate points
/// are filtered first, so any point set is acceptable input.
pub fn hypervolume(points: &[KpiPoint], lead_max: f64) -> f64 {
    assert!(
        lead_max > 0.0 && lead_max.is_finite(),
        "lead_max must be positive and finite"
    );
    let front = pareto_filter(points);
    let mut hv = 0.0;
    let mut covered_u = 0.0;
    // Front is sorted by filling descending; utility rises along it.
    for p in &front {
        debug_assert!(p.lead_time <= lead_max + 1e-9, "lead beyond lead_max");
        let u = (1.0 - p.lead_time / lead_max).max(0.0);
        if u > covered_u {
            hv += p.filling_ratio * (u - covered_u);
            covered_u = u;
        }
    }
    hv
}

/// One method's front in a comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodFront {
    pub method: String,
    pub points: Vec<KpiPoint>,
}

/// Hypervolume comparison of several fronts on a shared utility scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontComparison {
    pub lead_max: f64,
    pub baseline_method: String,
    pub methods: Vec<MethodRow>,
    /// Set when the baseline hypervolume is zero, making ratios undefined.
    pub degenerate_baseline: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRow {
    pub method: String,
    pub front: Vec<KpiPoint>,
    pub hypervolume: f64,
    /// Percent hypervolume change versus the baseline; `None` for the
    /// baseline row itself or when the baseline hypervolume is zero.
    pub improvement_pct: Option<f64>,
}

/// Compares fronts by hypervolume on a shared scale.
///
/// `lead_max` is the maximum lead time over all supplied points, clamped to
/// at least 1. The baseline is the method named "non-separation" when
/// present, otherwise the last entry.
pub fn compare_fronts(fronts: &[MethodFront]) -> Option<FrontComparison> {
    if fronts.is_empty() {
        return None;
    }
    let lead_max = fronts
        .iter()
        .flat_map(|f| f.points.iter().map(|p| p.lead_time))
        .fold(1.0f64, f64::max);
    let baseline_ix = fronts
        .iter()
        .position(|f| f.method == "non-separation")
        .unwrap_or(fronts.len() - 1);
    let baseline_method = fronts[baseline_ix].method.clone();
    let base_hv = hypervolume(&fronts[baseline_ix].points, lead_max);
    let degenerate = base_hv == 0.0;

    let methods = fronts
        .iter()
        .enumerate()
        .map(|(ix, f)| {
            let hv = hypervolume(&f.points, lead_max);
            let improvement_pct = if ix == baseline_ix || degenerate {
                None
            } else {
                Some((hv / base_hv - 1.0) * 100.0)
            };
            MethodRow {
                method: f.method.clone(),
                front: pareto_filter(&f.points),
                hypervolume: hv,
                improvement_pct,
            }
        })
        .collect();

    Some(FrontComparison {
        lead_max,
        baseline_method,
        methods,
        degenerate_baseline: degenerate,
    })
}

impl FrontComparison {
    /// CSV rows, one per front point:
    /// `method,filling_ratio,lead_time,normalized_utility`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,filling_ratio,lead_time,normalized_utility\n");
        for row in &self.methods {
            for p in &row.front {
                let u = (1.0 - p.lead_time / self.lead_max).max(0.0);
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    row.method, p.filling_ratio, p.lead_time, u
                ));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(f: f64, l: f64) -> KpiPoint {
        KpiPoint {
            filling_ratio: f,
            lead_time: l,
        }
    }

    #[test]
    fn dominance_is_componentwise() {
        assert!(p(0.8, 3.0).strictly_dominates(&p(0.7, 4.0)));
        assert!(p(0.8, 3.0).weakly_dominates(&p(0.8, 3.0)));
        assert!(!p(0.8, 3.0).strictly_dominates(&p(0.8, 3.0)));
        assert!(!p(0.9, 5.0).weakly_dominates(&p(0.5, 1.0)));
        assert!(!p(0.5, 1.0).weakly_dominates(&p(0.9, 5.0)));
    }

    #[test]
    fn pareto_filter_drops_dominated_and_duplicates() {
        let pts = vec![
            p(0.7, 6.0),
            p(0.5, 8.0), // dominated by (0.7, 6)
            p(0.5, 3.0),
            p(0.7, 6.0), // duplicate of the first point
            p(0.6, 7.0), // dominated by (0.7, 6)
        ];
        let front = pareto_filter(&pts);
        assert_eq!(front, vec![p(0.7, 6.0), p(0.5, 3.0)]);
        assert_eq!(pareto_indices(&pts), vec![0, 2]);
    }

    #[test]
    fn pareto_keeps_incomparable_points() {
        let pts = vec![p(0.9, 10.0), p(0.4, 1.0), p(0.6, 5.0)];
        let front = pareto_filter(&pts);
        assert_eq!(front, vec![p(0.9, 10.0), p(0.6, 5.0), p(0.4, 1.0)]);
    }

    #[test]
    fn hypervolume_staircase_value() {
        // Utilities at lead_max 10: (0.7, u=0.4) and (0.5, u=0.2). The
        // second point is dominated on this scale and adds no area.
        let hv = hypervolume(&[p(0.7, 6.0), p(0.5, 8.0)], 10.0);
        assert!((hv - 0.28).abs() < 1e-12);

        // Complementary staircase: (0.7, u=0.2) then (0.5, u=0.8).
        let hv = hypervolume(&[p(0.7, 8.0), p(0.5, 2.0)], 10.0);
        assert!((hv - (0.7 * 0.2 + 0.5 * 0.6)).abs() < 1e-12);
    }

    #[test]
    fn hypervolume_ignores_dominated_points() {
        let base = hypervolume(&[p(0.7, 6.0), p(0.5, 8.0)], 10.0);
        let with_dominated = hypervolume(&[p(0.7, 6.0), p(0.5, 8.0), p(0.6, 7.0)], 10.0);
        assert_eq!(base, with_dominated);
    }

    #[test]
    fn comparison_frozen_example() {
        // Shared scale lead_max = 10. Separated front {(0.7, 6), (0.5, 8)}
        // has hv 0.28; baseline {(0.5, 8)} has hv 0.10; improvement +180%.
        let fronts = vec![
            MethodFront {
                method: "separation-sa".into(),
                points: vec![p(0.7, 6.0), p(0.5, 8.0)],
            },
            MethodFront {
                method: "non-separation".into(),
                points: vec![p(0.5, 8.0), p(0.3, 10.0)],
            },
        ];
        let cmp = compare_fronts(&fronts).unwrap();
        assert_eq!(cmp.lead_max, 10.0);
        assert_eq!(cmp.baseline_method, "non-separation");
        assert!(!cmp.degenerate_baseline);
        assert!((cmp.methods[0].hypervolume - 0.28).abs() < 1e-12);
        assert!((cmp.methods[1].hypervolume - 0.10).abs() < 1e-12);
        let imp = cmp.methods[0].improvement_pct.unwrap();
        assert!((imp - 180.0).abs() < 1e-9);
        assert_eq!(cmp.methods[1].improvement_pct, None);

        let csv = cmp.to_csv();
        assert!(csv.starts_with("method,filling_ratio,lead_time,normalized_utility\n"));
        assert!(csv.contains("separation-sa,0.7,6,0.4"));
    }

    #[test]
    fn degenerate_baseline_is_flagged() {
        let fronts = vec![
            MethodFront {
                method: "separation-sa".into(),
                points: vec![p(0.7, 6.0)],
            },
            MethodFront {
                method: "non-separation".into(),
                // Single point at lead_max: utility 0, hv 0.
                points: vec![p(0.5, 10.0)],
            },
        ];
        let cmp = compare_fronts(&fronts).unwrap();
        assert!(cmp.degenerate_baseline);
        assert_eq!(cmp.methods[0].improvement_pct, None);
    }

    #[test]
    fn baseline_defaults_to_last_method() {
        let fronts = vec![
            MethodFront {
                method: "a".into(),
                points: vec![p(0.7, 6.0)],
            },
            MethodFront {
                method: "b".into(),
                points: vec![p(0.5, 8.0)],
            },
        ];
        let cmp = compare_fronts(&fronts).unwrap();
        assert_eq!(cmp.baseline_method, "b");
        assert!(compare_fronts(&[]).is_none());
    }

    #[test]
    fn kpis_from_instance() {
        use crate::instance::{ClusterSpec, ProblemInstance, Resource, Task};
        use crate::qubo::{Allocation, Batch};
        let inst = ProblemInstance {
            schema_version: 1,
            label: "t".into(),
            seed: 0,
            clusters: vec![ClusterSpec {
                cluster_id: 1,
                tasks: vec![
                    Task { task_id: 1, weight: 6, due_date: 4 },
                    Task { task_id: 2, weight: 4, due_date: 8 },
                    Task { task_id: 3, weight: 10, due_date: 6 },
                ],
            }],
            resources: vec![Resource {
                resource_id: 1,
                capacity: 20,
                setup_time: 1,
                processing_time: 1,
            }],
            virtual_copies: vec![vec![2]],
        };
        let alloc = Allocation {
            batches: vec![
                Batch { cluster: 0, resource: 0, copy: 0, tasks: vec![0, 1], load: 10 },
                Batch { cluster: 0, resource: 0, copy: 1, tasks: vec![2], load: 10 },
            ],
        };
        // Fill: mean(10/20, 10/20) = 0.5. Lead with times (5, 7):
        // |5-4| + |5-8| + |7-6| = 5.
        let k = kpis(&inst, &alloc, &[5, 7]).unwrap();
        assert!((k.filling_ratio - 0.5).abs() < 1e-12);
        assert!((k.lead_time - 5.0).abs() < 1e-12);

        assert!(matches!(
            kpis(&inst, &alloc, &[5]),
            Err(MetricsError::LengthMismatch { found: 1, expected: 2 })
        ));
        let empty = Allocation { batches: vec![] };
        assert!(matches!(
            kpis(&inst, &empty, &[]),
            Err(MetricsError::EmptyAllocation)
        ));
    }
}
