//! Deduplicated pool of scheduled plans and the Pareto front over it.

use crate::metrics::{pareto_indices, KpiPoint};
use crate::qubo::{Allocation, Batch};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

/// Where a pooled plan came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlanSource {
    Sampler,
    Exhaustive,
    Perturbation,
}

/// One scheduled plan: a canonical allocation, its completion times (parallel
/// to the batches), and its score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolEntry {
    pub allocation: Allocation,
    pub times: Vec<i64>,
    pub kpi: KpiPoint,
    pub source: PlanSource,
}

/// Canonicalizes an allocation together with its parallel times vector:
/// the same copy relabeling as [`Allocation::canonicalize`], with times
/// permuted alongside their batches.
pub fn canonical_plan(alloc: &Allocation, times: &[i64]) -> (Allocation, Vec<i64>) {
    assert_eq!(alloc.batches.len(), times.len(), "times must parallel batches");
    let mut groups: BTreeMap<(usize, usize), Vec<(Batch, i64)>> = BTreeMap::new();
    for (b, &z) in alloc.batches.iter().zip(times) {
        groups
            .entry((b.cluster, b.resource))
            .or_default()
            .push((b.clone(), z));
    }
    let mut batches = Vec::with_capacity(alloc.batches.len());
    let mut out_times = Vec::with_capacity(times.len());
    for (_, mut group) in groups {
        group.sort_by(|a, b| a.0.tasks.cmp(&b.0.tasks));
        for (new_copy, (mut batch, z)) in group.into_iter().enumerate() {
            batch.copy = new_copy;
            batches.push(batch);
            out_times.push(z);
        }
    }
    (Allocation { batches }, out_times)
}

/// Insertion-ordered pool that drops exact duplicates of (allocation, times).
///
/// Allocations must be canonicalized before insertion; the pool compares
/// them structurally.
#[derive(Debug, Clone, Default)]
pub struct SolutionPool {
    entries: Vec<PoolEntry>,
    seen: BTreeSet<String>,
}

impl SolutionPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts unless an identical plan is already pooled. Returns whether
    /// the entry was added.
    pub fn insert(&mut self, entry: PoolEntry) -> bool {
        let key = Self::plan_key(&entry.allocation, &entry.times);
        if self.seen.insert(key) {
            self.entries.push(entry);
            true
        } else {
            false
        }
    }

    fn plan_key(alloc: &Allocation, times: &[i64]) -> String {
        let mut key = String::new();
        for (batch, z) in alloc.batches.iter().zip(times) {
            key.push_str(&format!(
                "{}:{}:{}:{:?}@{};",
                batch.cluster, batch.resource, batch.copy, batch.tasks, z
            ));
        }
        key
    }

    pub fn entries(&self) -> &[PoolEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Non-dominated entries, filling ratio descending. Duplicate KPI pairs
    /// keep the earliest-inserted plan.
    pub fn front(&self) -> Vec<&PoolEntry> {
        let points: Vec<KpiPoint> = self.entries.iter().map(|e| e.kpi).collect();
        pareto_indices(&points)
            .into_iter()
            .map(|i| &self.entries[i])
            .collect()
    }

    pub fn front_points(&self) -> Vec<KpiPoint> {
        self.front().into_iter().map(|e| e.kpi).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qubo::Batch;

    fn entry(fill: f64, lead: f64, copy: usize, time: i64) -> PoolEntry {
        PoolEntry {
            allocation: Allocation {
                batches: vec![Batch {
                    cluster: 0,
                    resource: 0,
                    copy,
                    tasks: vec![0],
                    load: 5,
                }],
            },
            times: vec![time],
            kpi: KpiPoint {
                filling_ratio: fill,
                lead_time: lead,
            },
            source: PlanSource::Sampler,
        }
    }

    #[test]
    fn duplicate_plans_are_dropped() {
        let mut pool = SolutionPool::new();
        assert!(pool.insert(entry(0.5, 3.0, 0, 7)));
        assert!(!pool.insert(entry(0.5, 3.0, 0, 7)));
        // Same allocation, different time: a distinct plan.
        assert!(pool.insert(entry(0.5, 4.0, 0, 8)));
        // Different copy index: a distinct plan too.
        assert!(pool.insert(entry(0.5, 3.0, 1, 7)));
        assert_eq!(pool.len(), 3);
    }

    #[test]
    fn front_is_the_nondominated_subset() {
        let mut pool = SolutionPool::new();
        pool.insert(entry(0.7, 6.0, 0, 1));
        pool.insert(entry(0.5, 3.0, 0, 2));
        pool.insert(entry(0.6, 7.0, 0, 3)); // dominated by (0.7, 6)
        let front = pool.front();
        assert_eq!(front.len(), 2);
        assert_eq!(front[0].kpi.filling_ratio, 0.7);
        assert_eq!(front[1].kpi.filling_ratio, 0.5);
        assert_eq!(
            pool.front_points(),
            vec![
                KpiPoint { filling_ratio: 0.7, lead_time: 6.0 },
                KpiPoint { filling_ratio: 0.5, lead_time: 3.0 },
            ]
        );
    }

    #[test]
    fn empty_pool_has_empty_front() {
        let pool = SolutionPool::new();
        assert!(pool.is_empty());
        assert!(pool.front().is_empty());
    }

    #[test]
    fn canonical_plan_permutes_times_with_batches() {
        let batch = |copy: usize, tasks: Vec<usize>| Batch {
            cluster: 0,
            resource: 0,
            copy,
            tasks,
            load: 1,
        };
        // Copy labels are swapped relative to task-list order; canonical form
        // sorts by task lists and relabels, carrying times along.
        let alloc = Allocation {
            batches: vec![batch(0, vec![2]), batch(1, vec![0, 1])],
        };
        let (canon, times) = canonical_plan(&alloc, &[9, 4]);
        assert_eq!(canon.batches[0].tasks, vec![0, 1]);
        assert_eq!(canon.batches[0].copy, 0);
        assert_eq!(canon.batches[1].tasks, vec![2]);
        assert_eq!(canon.batches[1].copy, 1);
        assert_eq!(times, vec![4, 9]);

        // A plan already canonical is unchanged.
        let (again, times2) = canonical_plan(&canon, &times);
        assert_eq!(again, canon);
        assert_eq!(times2, times);
    }
}
