//! Single-model baseline: branch-and-bound over allocation and timing at
//! once, driven by a grid of scalarization weights.
//!
//! Each weight `w` minimizes `w * (1 - fill) + (1 - w) * lead / (N * max_due)`
//! within its share of the work budget. The search tree first places tasks
//! into capacity-feasible batches (heaviest task first, interchangeable
//! copies broken by a first-unused rule), then assigns each non-empty batch
//! an integer completion time, cheapest-deviation slots first.
//!
//! A node is pruned only when its scalar bound cannot beat the incumbent AND
//! its optimistic objective point `(fill upper bound, lead lower bound)` is
//! weakly dominated by an already pooled plan. The second condition keeps the
//! search front-complete: with enough budget the pooled front equals the
//! exhaustive Pareto front, not just the weighted-sum-supported subset.

use crate::budget::WorkBudget;
use crate::instance::ProblemInstance;
use crate::metrics::{kpis, KpiPoint};
use crate::pool::{canonical_plan, PlanSource, PoolEntry, SolutionPool};
use crate::qubo::{Allocation, Batch};
use serde::{Deserialize, Serialize};

/// Work units charged per search node, calibrated so node throughput roughly
/// matches the sampler's per-flip accounting.
pub const NODE_COST_UNITS: u64 = 16;

#[derive(Debug, thiserror::Error)]
pub enum MonolithicError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("instance has no tasks")]
    EmptyInstance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonolithicConfig {
    /// Number of scalarization weights, evenly spaced over [0, 1].
    pub weight_steps: u32,
    /// Total work budget in virtual seconds, split evenly across weights.
    pub budget_seconds: f64,
}

impl Default for MonolithicConfig {
    fn default() -> Self {
        MonolithicConfig {
            weight_steps: 11,
            budget_seconds: 1.0,
        }
    }
}

impl MonolithicConfig {
    fn validate(&self) -> Result<(), MonolithicError> {
        if self.weight_steps < 2 {
            return Err(MonolithicError::InvalidConfig(
                "weight_steps must be >= 2".into(),
            ));
        }
        if !(self.budget_seconds.is_finite() && self.budget_seconds > 0.0) {
            return Err(MonolithicError::InvalidConfig(
                "budget_seconds must be positive and finite".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MonolithicStats {
    /// Search nodes entered (allocation and timing levels).
    pub nodes: u64,
    /// Fully timed plans reached.
    pub leaves: u64,
    /// True when every weight ran to completion within its budget slice.
    pub exhausted: bool,
    /// Work units consumed across all weights.
    pub units_used: u64,
}

#[derive(Debug)]
pub struct MonolithicOutcome {
    pub pool: SolutionPool,
    pub stats: MonolithicStats,
}

struct TaskRef {
    cluster: usize,
    index: usize,
    weight: u64,
    due: i64,
}

struct SlotDef {
    cluster: usize,
    resource: usize,
    copy: usize,
    capacity: u64,
    setup: i64,
    /// Minimum spacing to any other completion on the same resource.
    separation: i64,
    /// Latest completion worth considering on this resource.
    horizon: i64,
}

struct Search<'a> {
    inst: &'a ProblemInstance,
    tasks: Vec<TaskRef>,
    slots: Vec<SlotDef>,
    /// Shared capacity when all resources agree, which makes the filling
    /// ratio a function of the used-batch count alone.
    uniform_capacity: Option<f64>,
    /// Lower bound on the final number of non-empty batches.
    min_batches: usize,
    total_weight: f64,
    /// Lead-time normalizer `N * max_due`.
    norm: f64,
    // Mutable search state.
    load: Vec<u64>,
    members: Vec<Vec<usize>>,
    open_count: usize,
    /// Sum over open slots of their standalone minimum deviation.
    lead_floor: i64,
    front: Vec<KpiPoint>,
    pool: SolutionPool,
    budget: WorkBudget,
    stats: MonolithicStats,
    weight: f64,
    incumbent: f64,
    stopped: bool,
}

/// Minimum of `sum_i |z - d_i|` over integer `z >= setup`, attained at the
/// lower median clamped to the floor.
fn standalone_cost(dues_sorted: &[i64], setup: i64) -> i64 {
    let z = dues_sorted[(dues_sorted.len() - 1) / 2].max(setup);
    dues_sorted.iter().map(|&d| (z - d).abs()).sum()
}

impl<'a> Search<'a> {
    fn new(inst: &'a ProblemInstance) -> Self {
        let mut tasks = Vec::new();
        for (c, cluster) in inst.clusters.iter().enumerate() {
            for (i, t) in cluster.tasks.iter().enumerate() {
                tasks.push(TaskRef {
                    cluster: c,
                    index: i,
                    weight: u64::from(t.weight),
                    due: i64::from(t.due_date),
                });
            }
        }
        // Heaviest first narrows capacity-feasible choices near the root.
        tasks.sort_by(|a, b| b.weight.cmp(&a.weight).then(
            (a.cluster, a.index).cmp(&(b.cluster, b.index)),
        ));

        let max_due = i64::from(inst.max_due_date());
        let mut slots = Vec::new();
        let mut slots_per_resource = vec![0usize; inst.resources.len()];
        for copies in &inst.virtual_copies {
            for (j, &count) in copies.iter().enumerate() {
                slots_per_resource[j] += count as usize;
            }
        }
        for (c, copies) in inst.virtual_copies.iter().enumerate() {
            for (j, &count) in copies.iter().enumerate() {
                let r = &inst.resources[j];
                let separation = i64::from(r.setup_time) + i64::from(r.processing_time);
                let horizon =
                    max_due + slots_per_resource[j] as i64 * separation + i64::from(r.setup_time) + 1;
                for l in 0..count as usize {
                    slots.push(SlotDef {
                        cluster: c,
                        resource: j,
                        copy: l,
                        capacity: u64::from(r.capacity),
                        setup: i64::from(r.setup_time),
                        separation,
                        horizon,
                    });
                }
            }
        }

        let first_cap = inst.resources.first().map(|r| r.capacity);
        let uniform_capacity = match first_cap {
            Some(cap) if inst.resources.iter().all(|r| r.capacity == cap) => {
                Some(f64::from(cap))
            }
            _ => None,
        };
        let min_batches = match first_cap {
            Some(cap) if uniform_capacity.is_some() => inst
                .clusters
                .iter()
                .map(|c| (c.tasks.iter().map(|t| u64::from(t.weight)).sum::<u64>())
                    .div_ceil(u64::from(cap)) as usize)
                .sum::<usize>()
                .max(1),
            _ => 1,
        };
        let total_weight: u64 = tasks.iter().map(|t| t.weight).sum();
        let n = tasks.len();
        let n_slots = slots.len();

        Search {
            inst,
            slots,
            uniform_capacity,
            min_batches,
            total_weight: total_weight as f64,
            norm: (n as f64) * f64::from(inst.max_due_date().max(1)),
            load: vec![0; n_slots],
            members: vec![Vec::new(); n_slots],
            open_count: 0,
            lead_floor: 0,
            front: Vec::new(),
            pool: SolutionPool::new(),
            budget: WorkBudget::unlimited(),
            stats: MonolithicStats::default(),
            weight: 0.0,
            incumbent: f64::INFINITY,
            stopped: false,
            tasks,
        }
    }

    /// Upper bound on the final filling ratio from a partial allocation.
    fn fill_upper_bound(&self) -> f64 {
        match self.uniform_capacity {
            Some(cap) => {
                let k = self.open_count.max(self.min_batches).max(1);
                self.total_weight / (cap * k as f64)
            }
            // Per-batch ratios never exceed 1, so neither does their mean.
            None => 1.0,
        }
    }

    fn scalar(&self, fill: f64, lead: f64) -> f64 {
        self.weight * (1.0 - fill) + (1.0 - self.weight) * lead / self.norm
    }

    /// Prunes only nodes that are hopeless for the current weight AND
    /// redundant for the front.
    fn prune(&self, fill_ub: f64, lead_lb: f64) -> bool {
        if self.scalar(fill_ub, lead_lb) < self.incumbent {
            return false;
        }
        let optimistic = KpiPoint {
            filling_ratio: fill_ub,
            lead_time: lead_lb,
        };
        self.front.iter().any(|p| p.weakly_dominates(&optimistic))
    }

    fn enter_node(&mut self) -> bool {
        if self.stopped {
            return false;
        }
        if !self.budget.has_room() {
            self.stopped = true;
            return false;
        }
        self.budget.charge(NODE_COST_UNITS);
        self.stats.nodes += 1;
        true
    }

    fn assign(&mut self, t: usize) {
        if !self.enter_node() {
            return;
        }
        if t == self.tasks.len() {
            self.time_batches();
            return;
        }
        let (cluster, weight) = (self.tasks[t].cluster, self.tasks[t].weight);
        for s in 0..self.slots.len() {
            if self.stopped {
                return;
            }
            let slot = &self.slots[s];
            if slot.cluster != cluster || self.load[s] + weight > slot.capacity {
                continue;
            }
            // Copies of one resource are interchangeable: only the first
            // empty copy may be opened.
            if slot.copy > 0 && self.load[s - 1] == 0 {
                continue;
            }

            let was_empty = self.load[s] == 0;
            let old_cost = if was_empty {
                0
            } else {
                let mut dues: Vec<i64> =
                    self.members[s].iter().map(|&m| self.tasks[m].due).collect();
                dues.sort_unstable();
                standalone_cost(&dues, self.slots[s].setup)
            };
            self.load[s] += weight;
            self.members[s].push(t);
            if was_empty {
                self.open_count += 1;
            }
            let mut dues: Vec<i64> =
                self.members[s].iter().map(|&m| self.tasks[m].due).collect();
            dues.sort_unstable();
            let new_cost = standalone_cost(&dues, self.slots[s].setup);
            self.lead_floor += new_cost - old_cost;

            if !self.prune(self.fill_upper_bound(), self.lead_floor as f64) {
                self.assign(t + 1);
            }

            self.lead_floor -= new_cost - old_cost;
            self.members[s].pop();
            self.load[s] -= weight;
            if was_empty {
                self.open_count -= 1;
            }
        }
    }

    /// Second phase: every task is placed; time the non-empty batches.
    fn time_batches(&mut self) {
        let open: Vec<usize> = (0..self.slots.len())
            .filter(|&s| self.load[s] > 0)
            .collect();
        let fill = match self.uniform_capacity {
            Some(cap) => self.total_weight / (cap * open.len() as f64),
            None => {
                open.iter()
                    .map(|&s| self.load[s] as f64 / self.slots[s].capacity as f64)
                    .sum::<f64>()
                    / open.len() as f64
            }
        };

        // Candidate completions per batch, cheapest deviation first.
        let mut candidates = Vec::with_capacity(open.len());
        let mut floors = Vec::with_capacity(open.len());
        for &s in &open {
            let mut dues: Vec<i64> =
                self.members[s].iter().map(|&m| self.tasks[m].due).collect();
            dues.sort_unstable();
            let mut cand: Vec<(i64, i64)> = (self.slots[s].setup..=self.slots[s].horizon)
                .map(|z| (dues.iter().map(|&d| (z - d).abs()).sum::<i64>(), z))
                .collect();
            cand.sort_unstable();
            floors.push(standalone_cost(&dues, self.slots[s].setup));
            candidates.push(cand);
        }
        // Suffix sums of standalone floors: a lower bound on untimed batches.
        let mut rest = vec![0i64; open.len() + 1];
        for k in (0..open.len()).rev() {
            rest[k] = rest[k + 1] + floors[k];
        }

        let mut times = vec![0i64; open.len()];
        self.time_assign(0, &open, &candidates, &rest, fill, 0, &mut times);
    }

    #[allow(clippy::too_many_arguments)]
    fn time_assign(
        &mut self,
        k: usize,
        open: &[usize],
        candidates: &[Vec<(i64, i64)>],
        rest: &[i64],
        fill: f64,
        lead_so_far: i64,
        times: &mut Vec<i64>,
    ) {
        if !self.enter_node() {
            return;
        }
        if k == open.len() {
            self.stats.leaves += 1;
            self.record_leaf(open, times);
            return;
        }
        let slot = &self.slots[open[k]];
        let (resource, separation) = (slot.resource, slot.separation);
        for &(cost, z) in &candidates[k] {
            if self.stopped {
                return;
            }
            let conflict = (0..k).any(|m| {
                self.slots[open[m]].resource == resource
                    && (times[m] - z).abs() < separation.max(self.slots[open[m]].separation)
            });
            if conflict {
                continue;
            }
            let lead_lb = (lead_so_far + cost + rest[k + 1]) as f64;
            if self.prune(fill, lead_lb) {
                continue;
            }
            times[k] = z;
            self.time_assign(k + 1, open, candidates, rest, fill, lead_so_far + cost, times);
        }
    }

    fn record_leaf(&mut self, open: &[usize], times: &[i64]) {
        let batches = open
            .iter()
            .map(|&s| {
                let mut tasks: Vec<usize> =
                    self.members[s].iter().map(|&m| self.tasks[m].index).collect();
                tasks.sort_unstable();
                Batch {
                    cluster: self.slots[s].cluster,
                    resource: self.slots[s].resource,
                    copy: self.slots[s].copy,
                    tasks,
                    load: self.load[s],
                }
            })
            .collect();
        let (alloc, times) = canonical_plan(&Allocation { batches }, times);
        let kpi = kpis(self.inst, &alloc, &times).expect("leaf plans are complete");

        let scalar = self.scalar(kpi.filling_ratio, kpi.lead_time);
        if scalar < self.incumbent {
            self.incumbent = scalar;
        }
        if self.front.iter().any(|p| p.weakly_dominates(&kpi)) {
            return;
        }
        self.front.retain(|p| !kpi.weakly_dominates(p));
        self.front.push(kpi);
        self.pool.insert(PoolEntry {
            allocation: alloc,
            times,
            kpi,
            source: PlanSource::Exhaustive,
        });
    }
}

/// Runs the weighted-sum branch-and-bound over the whole weight grid.
///
/// The pool keeps every plan that was non-dominated when found; its front is
/// the method's result. `stats.exhausted` reports whether the search tree
/// was fully explored, in which case the front is exactly the Pareto front
/// over all feasible plans.
pub fn solve_monolithic(
    inst: &ProblemInstance,
    config: &MonolithicConfig,
) -> Result<MonolithicOutcome, MonolithicError> {
    config.validate()?;
    if inst.num_tasks() == 0 {
        return Err(MonolithicError::EmptyInstance);
    }

    let mut search = Search::new(inst);
    let slice_seconds = config.budget_seconds / f64::from(config.weight_steps);
    let mut exhausted = true;
    let mut units = 0u64;
    for step in 0..config.weight_steps {
        search.weight = f64::from(step) / f64::from(config.weight_steps - 1);
        search.incumbent = f64::INFINITY;
        search.budget = WorkBudget::from_seconds(slice_seconds);
        search.stopped = false;
        search.assign(0);
        exhausted &= !search.stopped;
        units += search.budget.used();
    }
    search.stats.exhausted = exhausted;
    search.stats.units_used = units;

    Ok(MonolithicOutcome {
        pool: search.pool,
        stats: search.stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{ClusterSpec, Resource, Task};
    use crate::metrics::pareto_filter;

    fn inst(weights: &[u32], dues: &[u32], capacity: u32, copies: u32) -> ProblemInstance {
        ProblemInstance {
            schema_version: 1,
            label: "t".into(),
            seed: 0,
            clusters: vec![ClusterSpec {
                cluster_id: 1,
                tasks: weights
                    .iter()
                    .zip(dues)
                    .enumerate()
                    .map(|(i, (&w, &d))| Task {
                        task_id: i as u32 + 1,
                        weight: w,
                        due_date: d,
                    })
                    .collect(),
            }],
            resources: vec![Resource {
                resource_id: 1,
                capacity,
                setup_time: 1,
                processing_time: 1,
            }],
            virtual_copies: vec![vec![copies]],
        }
    }

    #[test]
    fn two_tasks_recover_the_handmade_front() {
        // Together: fill 10/20, one batch at any z in [4, 8] costs 4.
        // Split: fill mean(6/20, 4/20) = 0.25, both dues hit exactly.
        let inst = inst(&[6, 4], &[4, 8], 20, 2);
        let out = solve_monolithic(&inst, &MonolithicConfig::default()).unwrap();
        assert!(out.stats.exhausted);
        let front = out.pool.front_points();
        assert_eq!(
            front,
            vec![
                KpiPoint { filling_ratio: 0.5, lead_time: 4.0 },
                KpiPoint { filling_ratio: 0.25, lead_time: 0.0 },
            ]
        );
    }

    #[test]
    fn front_matches_partition_grid_oracle() {
        let inst = inst(&[6, 4, 10], &[4, 8, 6], 20, 3);
        let out = solve_monolithic(
            &inst,
            &MonolithicConfig {
                weight_steps: 11,
                budget_seconds: 30.0,
            },
        )
        .unwrap();
        assert!(out.stats.exhausted);
        let got = out.pool.front_points();

        // Oracle: every set partition of {0,1,2} under capacity, timed by a
        // full grid sweep with the separation constraint.
        let partitions: Vec<Vec<Vec<usize>>> = vec![
            vec![vec![0, 1, 2]],
            vec![vec![0, 1], vec![2]],
            vec![vec![0, 2], vec![1]],
            vec![vec![1, 2], vec![0]],
            vec![vec![0], vec![1], vec![2]],
        ];
        let weights = [6u64, 4, 10];
        let dues = [4i64, 8, 6];
        let sep = 2i64;
        let horizon = 8 + 3 * sep + 1 + 1;
        let mut points = Vec::new();
        for part in &partitions {
            if part.iter().any(|b| b.iter().map(|&i| weights[i]).sum::<u64>() > 20) {
                continue;
            }
            let fill = part
                .iter()
                .map(|b| b.iter().map(|&i| weights[i]).sum::<u64>() as f64 / 20.0)
                .sum::<f64>()
                / part.len() as f64;
            let cost = |b: &[usize], z: i64| -> i64 {
                b.iter().map(|&i| (z - dues[i]).abs()).sum()
            };
            let mut best = i64::MAX;
            let zs: Vec<i64> = (1..=horizon).collect();
            match part.len() {
                1 => {
                    for &z in &zs {
                        best = best.min(cost(&part[0], z));
                    }
                }
                2 => {
                    for &a in &zs {
                        for &b in &zs {
                            if (a - b).abs() < sep {
                                continue;
                            }
                            best = best.min(cost(&part[0], a) + cost(&part[1], b));
                        }
                    }
                }
                3 => {
                    for &a in &zs {
                        for &b in &zs {
                            if (a - b).abs() < sep {
                                continue;
                            }
                            for &c in &zs {
                                if (a - c).abs() < sep || (b - c).abs() < sep {
                                    continue;
                                }
                                best = best
                                    .min(cost(&part[0], a) + cost(&part[1], b) + cost(&part[2], c));
                            }
                        }
                    }
                }
                _ => unreachable!(),
            }
            points.push(KpiPoint {
                filling_ratio: fill,
                lead_time: best as f64,
            });
        }
        let expected = pareto_filter(&points);
        assert_eq!(got, expected);
    }

    #[test]
    fn runs_are_deterministic() {
        let inst = inst(&[6, 4, 10, 3], &[4, 8, 6, 12], 20, 3);
        let config = MonolithicConfig {
            weight_steps: 5,
            budget_seconds: 0.05,
        };
        let a = solve_monolithic(&inst, &config).unwrap();
        let b = solve_monolithic(&inst, &config).unwrap();
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.pool.front_points(), b.pool.front_points());
        assert_eq!(a.stats.units_used, a.stats.nodes * NODE_COST_UNITS);
    }

    #[test]
    fn tiny_budget_stops_early_and_reports_it() {
        let inst = inst(&[6, 4, 10, 3, 7], &[4, 8, 6, 12, 9], 20, 4);
        let out = solve_monolithic(
            &inst,
            &MonolithicConfig {
                weight_steps: 2,
                budget_seconds: 1e-4,
            },
        )
        .unwrap();
        assert!(!out.stats.exhausted);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let inst = inst(&[5], &[5], 20, 1);
        assert!(matches!(
            solve_monolithic(
                &inst,
                &MonolithicConfig { weight_steps: 1, budget_seconds: 1.0 }
            ),
            Err(MonolithicError::InvalidConfig(_))
        ));
        assert!(matches!(
            solve_monolithic(
                &inst,
                &MonolithicConfig { weight_steps: 11, budget_seconds: 0.0 }
            ),
            Err(MonolithicError::InvalidConfig(_))
        ));
        let empty = ProblemInstance {
            schema_version: 1,
            label: "e".into(),
            seed: 0,
            clusters: vec![],
            resources: vec![],
            virtual_copies: vec![],
        };
        assert!(matches!(
            solve_monolithic(&empty, &MonolithicConfig::default()),
            Err(MonolithicError::EmptyInstance)
        ));
    }
}
