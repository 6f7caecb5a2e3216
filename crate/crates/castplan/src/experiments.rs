//! End-to-end experiment drivers: the decomposed pipeline, the benchmark
//! sweep against the single-model baseline, and the swap-perturbation
//! robustness harness.
//!
//! All randomness is derived from explicit master seeds and all budgets are
//! virtual work units, so every report is a pure function of its
//! configuration regardless of thread count or machine.

use crate::annealer::{sample_reads, SaConfig, SampleError, SampleRecord};
use crate::budget::WorkBudget;
use crate::instance::{generate_instance, GeneratorParams, InstanceError, ProblemInstance};
use crate::metrics::{
    compare_fronts, hypervolume, kpis, MethodFront, MetricsError,
};
use crate::monolithic::{solve_monolithic, MonolithicConfig, MonolithicError, MonolithicStats};
use crate::pool::{PlanSource, PoolEntry, SolutionPool};
use crate::qubo::{
    build_qubo, decode, default_penalties, Allocation, PenaltyConfig, QuboError, VariableMap,
};
use crate::rng::derive_seed;
use crate::scheduler::{build_schedule_problem, solve_schedule, ScheduleError};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::str::FromStr;

/// Swap attempts before a perturbation gives up.
pub const PERTURB_ATTEMPTS: u32 = 20;

#[derive(Debug, thiserror::Error)]
pub enum ExperimentError {
    #[error(transparent)]
    Instance(#[from] InstanceError),
    #[error(transparent)]
    Qubo(#[from] QuboError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Monolithic(#[from] MonolithicError),
    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),
    #[error("method {0} needs externally produced samples; import them with the solve command's sample file option")]
    ExternalSamplesRequired(&'static str),
}

/// Solution methods a plan pool can come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// Decomposed pipeline: annealed allocation, exact timing.
    SeparationSa,
    /// Single weighted-sum model over allocation and timing at once.
    NonSeparation,
    /// Decomposed pipeline fed by an imported sample file.
    SeparationImport,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::SeparationSa => "separation-sa",
            Method::NonSeparation => "non-separation",
            Method::SeparationImport => "separation-import",
        }
    }

    pub const ALL: [Method; 3] = [
        Method::SeparationSa,
        Method::NonSeparation,
        Method::SeparationImport,
    ];
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                format!("unknown method {s:?}, expected one of {}", names.join(", "))
            })
    }
}

/// Configuration for one decomposed-pipeline run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationConfig {
    pub sa: SaConfig,
    /// Virtual-seconds budget; each read costs `sweeps * n_vars` units and
    /// `sa.num_reads` caps the read count.
    pub budget_seconds: f64,
    /// `None` derives penalties from the instance.
    pub penalties: Option<PenaltyConfig>,
}

impl Default for SeparationConfig {
    fn default() -> Self {
        SeparationConfig {
            sa: SaConfig::default(),
            budget_seconds: 1.0,
            penalties: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationStats {
    pub reads_requested: u32,
    pub reads_executed: u32,
    pub feasible: u32,
    pub infeasible: u32,
    /// Feasible reads whose plan was already pooled.
    pub duplicates: u32,
    pub units_used: u64,
}

#[derive(Debug)]
pub struct SeparationOutcome {
    pub pool: SolutionPool,
    pub stats: SeparationStats,
}

/// Decodes, audits, schedules, and pools a batch of sample records.
fn pool_records(
    inst: &ProblemInstance,
    map: &VariableMap,
    records: &[SampleRecord],
) -> Result<(SolutionPool, u32, u32), ExperimentError> {
    let mut pool = SolutionPool::new();
    let mut feasible = 0u32;
    let mut infeasible = 0u32;
    for record in records {
        let (alloc, audit) = decode(inst, map, &record.assignment)?;
        if !audit.feasible() {
            infeasible += 1;
            continue;
        }
        feasible += 1;
        let canon = alloc.canonicalize();
        let problem = build_schedule_problem(inst, &canon)?;
        let schedule = solve_schedule(&problem)?;
        let kpi = kpis(inst, &canon, &schedule.times)?;
        pool.insert(PoolEntry {
            allocation: canon,
            times: schedule.times,
            kpi,
            source: PlanSource::Sampler,
        });
    }
    Ok((pool, feasible, infeasible))
}

/// Runs the decomposed pipeline: sample allocations, keep the feasible ones,
/// time each exactly, and pool the deduplicated plans.
///
/// `stats.feasible + stats.infeasible == stats.reads_executed` always holds.
pub fn run_separation(
    inst: &ProblemInstance,
    config: &SeparationConfig,
) -> Result<SeparationOutcome, ExperimentError> {
    let penalties = match &config.penalties {
        Some(p) => p.clone(),
        None => default_penalties(inst),
    };
    let model = build_qubo(inst, &penalties)?;
    if !(config.budget_seconds.is_finite() && config.budget_seconds > 0.0) {
        return Err(ExperimentError::InvalidConfig(
            "budget_seconds must be positive and finite".into(),
        ));
    }

    let read_cost = u64::from(config.sa.sweeps_per_read) * model.n_vars() as u64;
    let mut budget = WorkBudget::from_seconds(config.budget_seconds);
    let mut executed = 0u32;
    while executed < config.sa.num_reads && budget.has_room() {
        budget.charge(read_cost);
        executed += 1;
    }

    let records = sample_reads(&model, &config.sa, 0..executed)?;
    let (pool, feasible, infeasible) = pool_records(inst, model.map(), &records)?;
    let duplicates = feasible - pool.len() as u32;
    Ok(SeparationOutcome {
        stats: SeparationStats {
            reads_requested: config.sa.num_reads,
            reads_executed: executed,
            feasible,
            infeasible,
            duplicates,
            units_used: budget.used(),
        },
        pool,
    })
}

/// Same pipeline on externally produced samples instead of a sampler run.
pub fn run_separation_from_samples(
    inst: &ProblemInstance,
    records: &[SampleRecord],
) -> Result<SeparationOutcome, ExperimentError> {
    let map = VariableMap::new(inst);
    if let Some(r) = records.iter().find(|r| r.assignment.len() != map.len()) {
        return Err(ExperimentError::InvalidConfig(format!(
            "sample read {} has {} bits, instance needs {}",
            r.read_index,
            r.assignment.len(),
            map.len()
        )));
    }
    let (pool, feasible, infeasible) = pool_records(inst, &map, records)?;
    let duplicates = feasible - pool.len() as u32;
    Ok(SeparationOutcome {
        stats: SeparationStats {
            reads_requested: records.len() as u32,
            reads_executed: records.len() as u32,
            feasible,
            infeasible,
            duplicates,
            units_used: 0,
        },
        pool,
    })
}

/// What a perturbation attempt did.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerturbStatus {
    /// Two tasks from different batches of one cluster swapped places.
    Swapped,
    /// Every sampled pair violated a capacity; the plan is unchanged.
    NoChange,
    /// No two batches of any cluster to swap between.
    NoPairs,
}

/// Randomly swaps one task pair between two batches of the same cluster,
/// keeping both batches within capacity. Pairs are drawn uniformly with
/// replacement, up to [`PERTURB_ATTEMPTS`] times; the result is canonical.
pub fn perturb_allocation(
    inst: &ProblemInstance,
    alloc: &Allocation,
    rng: &mut ChaCha8Rng,
) -> (Allocation, PerturbStatus) {
    // Candidate pairs: positions (batch p, member a) x (batch q, member b)
    // with p < q in the same cluster.
    let mut pairs = Vec::new();
    for p in 0..alloc.batches.len() {
        for q in (p + 1)..alloc.batches.len() {
            if alloc.batches[p].cluster != alloc.batches[q].cluster {
                continue;
            }
            for a in 0..alloc.batches[p].tasks.len() {
                for b in 0..alloc.batches[q].tasks.len() {
                    pairs.push((p, a, q, b));
                }
            }
        }
    }
    if pairs.is_empty() {
        return (alloc.clone(), PerturbStatus::NoPairs);
    }

    for _ in 0..PERTURB_ATTEMPTS {
        let (p, a, q, b) = pairs[rng.gen_range(0..pairs.len())];
        let cluster = &inst.clusters[alloc.batches[p].cluster];
        let task_a = alloc.batches[p].tasks[a];
        let task_b = alloc.batches[q].tasks[b];
        let w_a = u64::from(cluster.tasks[task_a].weight);
        let w_b = u64::from(cluster.tasks[task_b].weight);
        let cap_p = u64::from(inst.resources[alloc.batches[p].resource].capacity);
        let cap_q = u64::from(inst.resources[alloc.batches[q].resource].capacity);
        let load_p = alloc.batches[p].load - w_a + w_b;
        let load_q = alloc.batches[q].load - w_b + w_a;
        if load_p > cap_p || load_q > cap_q {
            continue;
        }
        let mut batches = alloc.batches.clone();
        batches[p].tasks[a] = task_b;
        batches[q].tasks[b] = task_a;
        batches[p].tasks.sort_unstable();
        batches[q].tasks.sort_unstable();
        batches[p].load = load_p;
        batches[q].load = load_q;
        return (
            Allocation { batches }.canonicalize(),
            PerturbStatus::Swapped,
        );
    }
    (alloc.clone(), PerturbStatus::NoChange)
}

/// One instance's robustness measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRow {
    pub size: u32,
    pub instance_index: u32,
    pub hv_before: f64,
    pub hv_after: f64,
    pub delta: f64,
    pub swapped: u32,
    pub no_change: u32,
    pub no_pairs: u32,
    pub front_size: u32,
}

/// Perturbs every front plan of a separation run once and compares the
/// hypervolume of the perturbed-only front against the original, on a lead
/// scale covering both pools.
pub fn robustness_single(
    inst: &ProblemInstance,
    config: &SeparationConfig,
    perturb_seed: u64,
) -> Result<(RobustnessRow, SeparationStats), ExperimentError> {
    let outcome = run_separation(inst, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(perturb_seed);

    let mut perturbed = SolutionPool::new();
    let (mut swapped, mut no_change, mut no_pairs) = (0u32, 0u32, 0u32);
    let front = outcome.pool.front();
    for entry in &front {
        let (alloc, status) = perturb_allocation(inst, &entry.allocation, &mut rng);
        match status {
            PerturbStatus::Swapped => swapped += 1,
            PerturbStatus::NoChange => no_change += 1,
            PerturbStatus::NoPairs => no_pairs += 1,
        }
        let problem = build_schedule_problem(inst, &alloc)?;
        let schedule = solve_schedule(&problem)?;
        let kpi = kpis(inst, &alloc, &schedule.times)?;
        perturbed.insert(PoolEntry {
            allocation: alloc,
            times: schedule.times,
            kpi,
            source: PlanSource::Perturbation,
        });
    }

    let lead_max = outcome
        .pool
        .entries()
        .iter()
        .chain(perturbed.entries())
        .map(|e| e.kpi.lead_time)
        .fold(1.0f64, f64::max);
    let hv_before = hypervolume(&outcome.pool.front_points(), lead_max);
    let hv_after = hypervolume(&perturbed.front_points(), lead_max);

    Ok((
        RobustnessRow {
            size: inst.num_tasks() as u32,
            instance_index: 0,
            hv_before,
            hv_after,
            delta: hv_after - hv_before,
            swapped,
            no_change,
            no_pairs,
            front_size: front.len() as u32,
        },
        outcome.stats,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessConfig {
    pub size: u32,
    pub num_instances: u32,
    pub master_seed: u64,
    pub separation: SeparationConfig,
    /// Template; `num_tasks` is overridden by `size`.
    pub generator: GeneratorParams,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        RobustnessConfig {
            size: 8,
            num_instances: 40,
            master_seed: 0,
            separation: SeparationConfig::default(),
            generator: GeneratorParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessReport {
    pub config: RobustnessConfig,
    pub rows: Vec<RobustnessRow>,
    /// Fraction of instances whose hypervolume did not increase.
    pub non_increase_rate: f64,
}

/// Runs the robustness harness over freshly generated instances, in parallel
/// but with per-instance derived seeds so the report is reproducible.
pub fn run_robustness(config: &RobustnessConfig) -> Result<RobustnessReport, ExperimentError> {
    if config.num_instances == 0 {
        return Err(ExperimentError::InvalidConfig(
            "num_instances must be >= 1".into(),
        ));
    }
    let rows: Vec<RobustnessRow> = (0..config.num_instances)
        .into_par_iter()
        .map(|idx| -> Result<RobustnessRow, ExperimentError> {
            let params = GeneratorParams {
                num_tasks: config.size,
                ..config.generator.clone()
            };
            let args = [u64::from(config.size), u64::from(idx)];
            let inst = generate_instance(
                &params,
                derive_seed(config.master_seed, "inst", &args),
            )?;
            let sep = SeparationConfig {
                sa: SaConfig {
                    master_seed: derive_seed(config.master_seed, "sa", &args),
                    ..config.separation.sa.clone()
                },
                ..config.separation.clone()
            };
            let perturb_seed = derive_seed(config.master_seed, "perturb", &args);
            let (mut row, _) = robustness_single(&inst, &sep, perturb_seed)?;
            row.instance_index = idx;
            Ok(row)
        })
        .collect::<Result<_, _>>()?;

    let non_increase = rows.iter().filter(|r| r.hv_after <= r.hv_before).count();
    Ok(RobustnessReport {
        config: config.clone(),
        non_increase_rate: non_increase as f64 / rows.len() as f64,
        rows,
    })
}

impl RobustnessReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let config = serde_json::to_string(&self.config).expect("config serializes");
        let _ = writeln!(out, "# config: {config}");
        let _ = writeln!(
            out,
            "size,instance,hv_before,hv_after,delta,swapped,no_change,no_pairs,front_size"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.size,
                r.instance_index,
                r.hv_before,
                r.hv_after,
                r.delta,
                r.swapped,
                r.no_change,
                r.no_pairs,
                r.front_size
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub sizes: Vec<u32>,
    pub instances_per_size: u32,
    pub master_seed: u64,
    /// Virtual-seconds budget granted to each method in each cell.
    pub budget_seconds: f64,
    pub sa: SaConfig,
    pub weight_steps: u32,
    /// Template; `num_tasks` is overridden per cell.
    pub generator: GeneratorParams,
}

impl Default for BenchmarkConfig {
    fn default() -> Self {
        BenchmarkConfig {
            sizes: vec![6, 8, 10, 12],
            instances_per_size: 10,
            master_seed: 0,
            budget_seconds: 0.1,
            sa: SaConfig::default(),
            weight_steps: 11,
            generator: GeneratorParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkCell {
    pub size: u32,
    pub instance_index: u32,
    pub lead_max: f64,
    pub separation_hv: f64,
    pub monolithic_hv: f64,
    /// Percent hypervolume change of the decomposed method over the
    /// baseline; `None` when the baseline hypervolume is zero.
    pub improvement_pct: Option<f64>,
    pub separation: SeparationStats,
    pub monolithic: MonolithicStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeSummary {
    pub size: u32,
    /// Cells with a defined improvement (nonzero baseline hypervolume).
    pub defined_cells: u32,
    pub median_improvement_pct: Option<f64>,
    pub mean_improvement_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config: BenchmarkConfig,
    pub cells: Vec<BenchmarkCell>,
    pub summaries: Vec<SizeSummary>,
}

pub(crate) fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Runs the full benchmark grid: per cell, both methods under equal budgets,
/// compared by hypervolume on a shared lead scale over both pools.
pub fn run_benchmark(config: &BenchmarkConfig) -> Result<BenchmarkReport, ExperimentError> {
    if config.sizes.is_empty() || config.instances_per_size == 0 {
        return Err(ExperimentError::InvalidConfig(
            "benchmark needs at least one size and one instance per size".into(),
        ));
    }
    let cells_spec: Vec<(u32, u32)> = config
        .sizes
        .iter()
        .flat_map(|&s| (0..config.instances_per_size).map(move |i| (s, i)))
        .collect();

    let cells: Vec<BenchmarkCell> = cells_spec
        .par_iter()
        .map(|&(size, idx)| -> Result<BenchmarkCell, ExperimentError> {
            let args = [u64::from(size), u64::from(idx)];
            let params = GeneratorParams {
                num_tasks: size,
                ..config.generator.clone()
            };
            let inst = generate_instance(
                &params,
                derive_seed(config.master_seed, "inst", &args),
            )?;

            let sep_config = SeparationConfig {
                sa: SaConfig {
                    master_seed: derive_seed(config.master_seed, "sa", &args),
                    ..config.sa.clone()
                },
                budget_seconds: config.budget_seconds,
                penalties: None,
            };
            let sep = run_separation(&inst, &sep_config)?;

            let mono = solve_monolithic(
                &inst,
                &MonolithicConfig {
                    weight_steps: config.weight_steps,
                    budget_seconds: config.budget_seconds,
                },
            )?;

            let fronts = [
                MethodFront {
                    method: Method::SeparationSa.name().to_string(),
                    points: sep.pool.entries().iter().map(|e| e.kpi).collect(),
                },
                MethodFront {
                    method: Method::NonSeparation.name().to_string(),
                    points: mono.pool.entries().iter().map(|e| e.kpi).collect(),
                },
            ];
            let cmp = compare_fronts(&fronts).expect("two fronts supplied");
            Ok(BenchmarkCell {
                size,
                instance_index: idx,
                lead_max: cmp.lead_max,
                separation_hv: cmp.methods[0].hypervolume,
                monolithic_hv: cmp.methods[1].hypervolume,
                improvement_pct: cmp.methods[0].improvement_pct,
                separation: sep.stats,
                monolithic: mono.stats,
            })
        })
        .collect::<Result<_, _>>()?;

    let summaries = config
        .sizes
        .iter()
        .map(|&size| {
            let mut defined: Vec<f64> = cells
                .iter()
                .filter(|c| c.size == size)
                .filter_map(|c| c.improvement_pct)
                .collect();
            defined.sort_by(f64::total_cmp);
            SizeSummary {
                size,
                defined_cells: defined.len() as u32,
                median_improvement_pct: (!defined.is_empty()).then(|| median(&defined)),
                mean_improvement_pct: (!defined.is_empty())
                    .then(|| defined.iter().sum::<f64>() / defined.len() as f64),
            }
        })
        .collect();

    Ok(BenchmarkReport {
        config: config.clone(),
        cells,
        summaries,
    })
}

impl BenchmarkReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let config = serde_json::to_string(&self.config).expect("config serializes");
        let _ = writeln!(out, "# config: {config}");
        let _ = writeln!(
            out,
            "size,instance,lead_max,separation_hv,monolithic_hv,improvement_pct,\
             reads_executed,feasible,infeasible,duplicates,mono_nodes,mono_leaves,mono_exhausted"
        );
        for c in &self.cells {
            let improvement = c
                .improvement_pct
                .map(|v| v.to_string())
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                c.size,
                c.instance_index,
                c.lead_max,
                c.separation_hv,
                c.monolithic_hv,
                improvement,
                c.separation.reads_executed,
                c.separation.feasible,
                c.separation.infeasible,
                c.separation.duplicates,
                c.monolithic.nodes,
                c.monolithic.leaves,
                c.monolithic.exhausted
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{ClusterSpec, Resource, Task};
    use crate::qubo::Batch;

    fn small_inst(seed: u64, n: u32) -> ProblemInstance {
        generate_instance(
            &GeneratorParams {
                num_tasks: n,
                ..GeneratorParams::default()
            },
            seed,
        )
        .unwrap()
    }

    fn fast_sep() -> SeparationConfig {
        SeparationConfig {
            sa: SaConfig {
                num_reads: 60,
                sweeps_per_read: 60,
                beta_range: None,
                master_seed: 5,
            },
            budget_seconds: 10.0,
            penalties: None,
        }
    }

    #[test]
    fn separation_counts_add_up() {
        let inst = small_inst(3, 5);
        let out = run_separation(&inst, &fast_sep()).unwrap();
        let s = &out.stats;
        assert_eq!(s.reads_executed, 60, "budget covers all reads");
        assert_eq!(s.feasible + s.infeasible, s.reads_executed);
        assert_eq!(s.duplicates, s.feasible - out.pool.len() as u32);
        assert!(!out.pool.is_empty(), "some reads decode to feasible plans");
        // Every pooled plan passes its own audit by construction; spot-check
        // the KPI ranges.
        for e in out.pool.entries() {
            assert!(e.kpi.filling_ratio > 0.0 && e.kpi.filling_ratio <= 1.0);
            assert!(e.kpi.lead_time >= 0.0);
        }
    }

    #[test]
    fn separation_budget_truncates_reads() {
        let inst = small_inst(3, 5);
        let mut config = fast_sep();
        // One read costs sweeps * n_vars units; grant roughly 2.5 reads.
        let model_vars = VariableMap::new(&inst).len() as u64;
        let units = u64::from(config.sa.sweeps_per_read) * model_vars;
        config.budget_seconds =
            (units as f64 * 2.5) / crate::budget::WORK_UNITS_PER_SECOND as f64;
        let out = run_separation(&inst, &config).unwrap();
        assert_eq!(out.stats.reads_executed, 3);

        config.budget_seconds = -1.0;
        assert!(matches!(
            run_separation(&inst, &config),
            Err(ExperimentError::InvalidConfig(_))
        ));
    }

    #[test]
    fn separation_is_deterministic() {
        let inst = small_inst(7, 6);
        let a = run_separation(&inst, &fast_sep()).unwrap();
        let b = run_separation(&inst, &fast_sep()).unwrap();
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.pool.front_points(), b.pool.front_points());
    }

    #[test]
    fn imported_records_share_the_pipeline() {
        let inst = small_inst(3, 4);
        let sep = fast_sep();
        let penalties = default_penalties(&inst);
        let model = build_qubo(&inst, &penalties).unwrap();
        let records = sample_reads(&model, &sep.sa, 0..40).unwrap();

        let direct = run_separation(
            &inst,
            &SeparationConfig {
                sa: SaConfig {
                    num_reads: 40,
                    ..sep.sa.clone()
                },
                ..sep
            },
        )
        .unwrap();
        let imported = run_separation_from_samples(&inst, &records).unwrap();
        assert_eq!(direct.pool.front_points(), imported.pool.front_points());
        assert_eq!(direct.stats.feasible, imported.stats.feasible);

        let short = vec![SampleRecord {
            assignment: vec![true],
            energy: 0.0,
            read_index: 0,
        }];
        assert!(matches!(
            run_separation_from_samples(&inst, &short),
            Err(ExperimentError::InvalidConfig(_))
        ));
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(Method::from_str(m.name()).unwrap(), m);
        }
        assert!(Method::from_str("annealer").is_err());
    }

    fn two_batch_alloc() -> (ProblemInstance, Allocation) {
        let inst = ProblemInstance {
            schema_version: 1,
            label: "t".into(),
            seed: 0,
            clusters: vec![ClusterSpec {
                cluster_id: 1,
                tasks: vec![
                    Task { task_id: 1, weight: 9, due_date: 4 },
                    Task { task_id: 2, weight: 2, due_date: 8 },
                    Task { task_id: 3, weight: 9, due_date: 6 },
                ],
            }],
            resources: vec![Resource {
                resource_id: 1,
                capacity: 11,
                setup_time: 1,
                processing_time: 1,
            }],
            virtual_copies: vec![vec![2]],
        };
        let alloc = Allocation {
            batches: vec![
                Batch { cluster: 0, resource: 0, copy: 0, tasks: vec![0, 1], load: 11 },
                Batch { cluster: 0, resource: 0, copy: 1, tasks: vec![2], load: 9 },
            ],
        };
        (inst, alloc)
    }

    #[test]
    fn perturbation_swaps_exactly_one_pair() {
        let (inst, alloc) = two_batch_alloc();
        // Swapping task 1 (w=2) with task 2 (w=9) would overload batch 0 at
        // 18 > 11, so the only feasible swap is task 0 (w=9) with task 2
        // (w=9), giving canonical batches {0} and {1, 2}.
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (new_alloc, status) = perturb_allocation(&inst, &alloc, &mut rng);
        assert_eq!(status, PerturbStatus::Swapped);
        assert_eq!(new_alloc.batches[0].tasks, vec![0]);
        assert_eq!(new_alloc.batches[0].load, 9);
        assert_eq!(new_alloc.batches[1].tasks, vec![1, 2]);
        assert_eq!(new_alloc.batches[1].load, 11);
    }

    #[test]
    fn perturbation_reports_impossible_cases() {
        let (inst, _) = two_batch_alloc();
        // Single batch: no second batch to swap with.
        let single = Allocation {
            batches: vec![Batch {
                cluster: 0,
                resource: 0,
                copy: 0,
                tasks: vec![0, 1],
                load: 11,
            }],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (same, status) = perturb_allocation(&inst, &single, &mut rng);
        assert_eq!(status, PerturbStatus::NoPairs);
        assert_eq!(same, single);

        // Every candidate swap moves a weight-5 task onto the capacity-2
        // resource, so all attempts fail and the plan is unchanged.
        let tight = ProblemInstance {
            schema_version: 1,
            label: "tight".into(),
            seed: 0,
            clusters: vec![ClusterSpec {
                cluster_id: 1,
                tasks: vec![
                    Task { task_id: 1, weight: 5, due_date: 3 },
                    Task { task_id: 2, weight: 5, due_date: 4 },
                    Task { task_id: 3, weight: 1, due_date: 5 },
                    Task { task_id: 4, weight: 1, due_date: 6 },
                ],
            }],
            resources: vec![
                Resource { resource_id: 1, capacity: 10, setup_time: 0, processing_time: 1 },
                Resource { resource_id: 2, capacity: 2, setup_time: 0, processing_time: 1 },
            ],
            virtual_copies: vec![vec![1, 1]],
        };
        let blocked = Allocation {
            batches: vec![
                Batch { cluster: 0, resource: 0, copy: 0, tasks: vec![0, 1], load: 10 },
                Batch { cluster: 0, resource: 1, copy: 0, tasks: vec![2, 3], load: 2 },
            ],
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (same, status) = perturb_allocation(&tight, &blocked, &mut rng);
        assert_eq!(status, PerturbStatus::NoChange);
        assert_eq!(same, blocked);
    }

    #[test]
    fn perturbation_is_seed_deterministic() {
        let (inst, alloc) = two_batch_alloc();
        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(
            perturb_allocation(&inst, &alloc, &mut r1),
            perturb_allocation(&inst, &alloc, &mut r2)
        );
    }

    #[test]
    fn robustness_single_compares_on_a_shared_scale() {
        let inst = small_inst(11, 6);
        let (row, stats) = robustness_single(&inst, &fast_sep(), 42).unwrap();
        assert_eq!(stats.feasible + stats.infeasible, stats.reads_executed);
        assert_eq!(row.swapped + row.no_change + row.no_pairs, row.front_size);
        assert!(row.hv_before >= 0.0 && row.hv_after >= 0.0);
        assert!((row.delta - (row.hv_after - row.hv_before)).abs() < 1e-15);
    }

    #[test]
    fn benchmark_report_is_reproducible_and_well_formed() {
        let config = BenchmarkConfig {
            sizes: vec![4, 5],
            instances_per_size: 2,
            master_seed: 17,
            budget_seconds: 0.02,
            sa: SaConfig {
                num_reads: 50,
                sweeps_per_read: 50,
                beta_range: None,
                master_seed: 0,
            },
            weight_steps: 5,
            generator: GeneratorParams::default(),
        };
        let a = run_benchmark(&config).unwrap();
        let b = run_benchmark(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.cells.len(), 4);
        assert_eq!(a.summaries.len(), 2);

        let csv = a.to_csv();
        let mut lines = csv.lines();
        assert!(lines.next().unwrap().starts_with("# config: {"));
        assert!(lines.next().unwrap().starts_with("size,instance,"));
        assert_eq!(csv.lines().count(), 2 + 4);

        let json = a.to_json();
        let parsed: BenchmarkReport = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed, a);

        assert!(matches!(
            run_benchmark(&BenchmarkConfig {
                sizes: vec![],
                ..config
            }),
            Err(ExperimentError::InvalidConfig(_))
        ));
    }

    #[test]
    fn robustness_report_is_reproducible() {
        let config = RobustnessConfig {
            size: 5,
            num_instances: 3,
            master_seed: 23,
            separation: SeparationConfig {
                sa: SaConfig {
                    num_reads: 40,
                    sweeps_per_read: 40,
                    beta_range: None,
                    master_seed: 0,
                },
                budget_seconds: 10.0,
                penalties: None,
            },
            generator: GeneratorParams::default(),
        };
        let a = run_robustness(&config).unwrap();
        let b = run_robustness(&config).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.rows.len(), 3);
        for (i, row) in a.rows.iter().enumerate() {
            assert_eq!(row.instance_index, i as u32);
            assert_eq!(row.size, 5);
        }
        assert!((0.0..=1.0).contains(&a.non_increase_rate));

        let csv = a.to_csv();
        assert!(csv.starts_with("# config: {"));
        assert_eq!(csv.lines().count(), 2 + 3);
    }
}
