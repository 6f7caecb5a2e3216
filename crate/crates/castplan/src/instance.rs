//! Problem instances: task clusters, resources, and virtual resource copies.
//!
//! An instance groups tasks into clusters (tasks of one cluster may share a
//! batch), lists the physical resources (furnace-like units with a capacity,
//! a setup time and a processing time), and fixes how many virtual copies of
//! each resource a cluster may open. Instances are value types: generated
//! reproducibly from a seed, validated structurally, and round-tripped
//! through a versioned JSON file format.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::path::Path;

/// Current instance file schema version.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("failed to read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("failed to write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed instance file {path} at line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported schema_version {found} in {path} (this build reads version {expected})")]
    SchemaVersion {
        path: String,
        found: u32,
        expected: u32,
    },
    #[error("invalid instance field {location}: {message}")]
    Field { location: String, message: String },
}

/// One production task: an indivisible work item with a weight (material
/// amount) and a due date. Both are positive integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub task_id: u32,
    pub weight: u32,
    pub due_date: u32,
}

/// Tasks that are allowed to share batches.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub cluster_id: u32,
    pub tasks: Vec<Task>,
}

/// A physical resource. `capacity` bounds the total weight of one batch,
/// `setup_time` is the preparation interval occupied right before a batch
/// completes, `processing_time` the exclusive interval occupied right after.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resource {
    pub resource_id: u32,
    pub capacity: u32,
    pub setup_time: u32,
    pub processing_time: u32,
}

/// A full problem instance.
///
/// `virtual_copies[c][j]` is the number of batches cluster `c` may open on
/// resource `j`; it bounds the copy index and hence the binary variable count
/// of the allocation model.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub schema_version: u32,
    pub label: String,
    pub seed: u64,
    pub clusters: Vec<ClusterSpec>,
    pub resources: Vec<Resource>,
    pub virtual_copies: Vec<Vec<u32>>,
}

/// Parameters of the reproducible single-cluster generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub num_tasks: u32,
    /// Inclusive weight range.
    pub weight_range: (u32, u32),
    /// Inclusive due-date range.
    pub due_range: (u32, u32),
    pub capacity: u32,
    pub setup_time: u32,
    pub processing_time: u32,
    /// Overrides the derived virtual copy count when set.
    pub virtual_copies: Option<u32>,
    pub label: String,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            num_tasks: 6,
            weight_range: (1, 10),
            due_range: (3, 30),
            capacity: 20,
            setup_time: 0,
            processing_time: 1,
            virtual_copies: None,
            label: String::new(),
        }
    }
}

/// One structural problem found by [`validate_instance`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub location: String,
    pub message: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// Result of structural validation; empty findings means the instance is
/// well-formed and not provably infeasible.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.findings.is_empty()
    }

    fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.findings.push(Finding {
            location: location.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.findings.is_empty() {
            write!(f, "ok")
        } else {
            for (i, finding) in self.findings.iter().enumerate() {
                if i > 0 {
                    writeln!(f)?;
                }
                write!(f, "{finding}")?;
            }
            Ok(())
        }
    }
}

impl ProblemInstance {
    /// Total number of tasks across clusters.
    pub fn num_tasks(&self) -> usize {
        self.clusters.iter().map(|c| c.tasks.len()).sum()
    }

    /// Total weight of one cluster's tasks.
    pub fn cluster_weight(&self, cluster: usize) -> u64 {
        self.clusters[cluster]
            .tasks
            .iter()
            .map(|t| u64::from(t.weight))
            .sum()
    }

    /// Largest due date anywhere in the instance (0 for no tasks).
    pub fn max_due_date(&self) -> u32 {
        self.clusters
            .iter()
            .flat_map(|c| c.tasks.iter().map(|t| t.due_date))
            .max()
            .unwrap_or(0)
    }

    /// Largest within-cluster due-date spread.
    pub fn max_due_spread(&self) -> u32 {
        self.clusters
            .iter()
            .filter_map(|c| {
                let min = c.tasks.iter().map(|t| t.due_date).min()?;
                let max = c.tasks.iter().map(|t| t.due_date).max()?;
                Some(max - min)
            })
            .max()
            .unwrap_or(0)
    }
}

/// Derived default copy count: enough batches for the cluster's weight plus
/// two spare, never more than one batch per task.
pub fn default_virtual_copies(total_weight: u64, num_tasks: u32, capacity: u32) -> u32 {
    let needed = total_weight.div_ceil(u64::from(capacity.max(1))) as u32;
    (needed + 2).min(num_tasks).max(1)
}

/// Generates a single-cluster, single-resource instance from `params`.
///
/// Task weights and due dates are drawn i.i.d. uniformly from the inclusive
/// ranges, one task at a time (weight, then due date), from a ChaCha8 stream
/// seeded with `seed`. The same `(params, seed)` pair always yields a
/// structurally identical instance.
pub fn generate_instance(
    params: &GeneratorParams,
    seed: u64,
) -> Result<ProblemInstance, InstanceError> {
    if params.num_tasks == 0 {
        return Err(InstanceError::InvalidParams(
            "num_tasks must be at least 1".into(),
        ));
    }
    let (wlo, whi) = params.weight_range;
    let (dlo, dhi) = params.due_range;
    if wlo == 0 || wlo > whi {
        return Err(InstanceError::InvalidParams(format!(
            "weight_range ({wlo}, {whi}) must satisfy 1 <= lo <= hi"
        )));
    }
    if dlo == 0 || dlo > dhi {
        return Err(InstanceError::InvalidParams(format!(
            "due_range ({dlo}, {dhi}) must satisfy 1 <= lo <= hi"
        )));
    }
    if params.capacity < whi {
        return Err(InstanceError::InvalidParams(format!(
            "capacity {} is below the maximum task weight {whi}",
            params.capacity
        )));
    }
    if params.processing_time == 0 {
        return Err(InstanceError::InvalidParams(
            "processing_time must be at least 1".into(),
        ));
    }
    if let Some(v) = params.virtual_copies {
        if v == 0 || v > params.num_tasks {
            return Err(InstanceError::InvalidParams(format!(
                "virtual_copies {v} must be in 1..={}",
                params.num_tasks
            )));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tasks: Vec<Task> = (1..=params.num_tasks)
        .map(|task_id| {
            let weight = rng.gen_range(wlo..=whi);
            let due_date = rng.gen_range(dlo..=dhi);
            Task {
                task_id,
                weight,
                due_date,
            }
        })
        .collect();

    let total_weight: u64 = tasks.iter().map(|t| u64::from(t.weight)).sum();
    let copies = params.virtual_copies.unwrap_or_else(|| {
        default_virtual_copies(total_weight, params.num_tasks, params.capacity)
    });

    let label = if params.label.is_empty() {
        format!("gen_n{}_s{}", params.num_tasks, seed)
    } else {
        params.label.clone()
    };

    Ok(ProblemInstance {
        schema_version: SCHEMA_VERSION,
        label,
        seed,
        clusters: vec![ClusterSpec {
            cluster_id: 1,
            tasks,
        }],
        resources: vec![Resource {
            resource_id: 1,
            capacity: params.capacity,
            setup_time: params.setup_time,
            processing_time: params.processing_time,
        }],
        virtual_copies: vec![vec![copies]],
    })
}

/// Checks structural well-formedness and cheap infeasibility certificates.
///
/// Reported findings: empty cluster/resource lists, duplicate ids, zero
/// weights/dues/capacities, copy counts outside `1..=N_c`, any task heavier
/// than every resource it could be placed on, and clusters whose total weight
/// exceeds their total opened capacity.
pub fn validate_instance(inst: &ProblemInstance) -> ValidationReport {
    let mut report = ValidationReport::default();

    if inst.schema_version != SCHEMA_VERSION {
        report.push(
            "schema_version",
            format!(
                "expected {SCHEMA_VERSION}, found {}",
                inst.schema_version
            ),
        );
    }
    if inst.clusters.is_empty() {
        report.push("clusters", "at least one cluster is required");
    }
    if inst.resources.is_empty() {
        report.push("resources", "at least one resource is required");
    }

    let mut resource_ids = std::collections::HashSet::new();
    for (j, res) in inst.resources.iter().enumerate() {
        let loc = format!("resources[{j}]");
        if !resource_ids.insert(res.resource_id) {
            report.push(&loc, format!("duplicate resource_id {}", res.resource_id));
        }
        if res.capacity == 0 {
            report.push(&loc, "capacity must be at least 1");
        }
        if res.processing_time == 0 {
            report.push(&loc, "processing_time must be at least 1");
        }
    }

    let mut cluster_ids = std::collections::HashSet::new();
    for (c, cluster) in inst.clusters.iter().enumerate() {
        let cloc = format!("clusters[{c}]");
        if !cluster_ids.insert(cluster.cluster_id) {
            report.push(&cloc, format!("duplicate cluster_id {}", cluster.cluster_id));
        }
        if cluster.tasks.is_empty() {
            report.push(&cloc, "at least one task is required");
        }
        let mut task_ids = std::collections::HashSet::new();
        for (i, task) in cluster.tasks.iter().enumerate() {
            let tloc = format!("{cloc}.tasks[{i}]");
            if !task_ids.insert(task.task_id) {
                report.push(&tloc, format!("duplicate task_id {}", task.task_id));
            }
            if task.weight == 0 {
                report.push(&tloc, "weight must be at least 1");
            }
            if task.due_date == 0 {
                report.push(&tloc, "due_date must be at least 1");
            }
        }
    }

    // Copy matrix shape and ranges.
    if inst.virtual_copies.len() != inst.clusters.len() {
        report.push(
            "virtual_copies",
            format!(
                "expected one row per cluster ({} rows), found {}",
                inst.clusters.len(),
                inst.virtual_copies.len()
            ),
        );
    }
    for (c, row) in inst.virtual_copies.iter().enumerate() {
        if c >= inst.clusters.len() {
            break;
        }
        let n_c = inst.clusters[c].tasks.len() as u32;
        if row.len() != inst.resources.len() {
            report.push(
                format!("virtual_copies[{c}]"),
                format!(
                    "expected one entry per resource ({} entries), found {}",
                    inst.resources.len(),
                    row.len()
                ),
            );
            continue;
        }
        for (j, &v) in row.iter().enumerate() {
            if v == 0 || v > n_c {
                report.push(
                    format!("virtual_copies[{c}][{j}]"),
                    format!("copy count {v} must be in 1..={n_c}"),
                );
            }
        }
    }

    // Cheap infeasibility certificates, only meaningful on a well-shaped matrix.
    let shape_ok = inst.virtual_copies.len() == inst.clusters.len()
        && inst
            .virtual_copies
            .iter()
            .all(|row| row.len() == inst.resources.len());
    if shape_ok && !inst.resources.is_empty() {
        for (c, cluster) in inst.clusters.iter().enumerate() {
            let max_capacity = inst
                .resources
                .iter()
                .enumerate()
                .filter(|(j, _)| inst.virtual_copies[c][*j] > 0)
                .map(|(_, r)| r.capacity)
                .max()
                .unwrap_or(0);
            for (i, task) in cluster.tasks.iter().enumerate() {
                if task.weight > max_capacity {
                    report.push(
                        format!("clusters[{c}].tasks[{i}]"),
                        format!(
                            "weight {} exceeds every opened capacity (max {max_capacity}); \
                             instance is infeasible",
                            task.weight
                        ),
                    );
                }
            }
            let total: u64 = cluster.tasks.iter().map(|t| u64::from(t.weight)).sum();
            let opened: u64 = inst
                .resources
                .iter()
                .enumerate()
                .map(|(j, r)| u64::from(inst.virtual_copies[c][j]) * u64::from(r.capacity))
                .sum();
            if total > opened {
                report.push(
                    format!("clusters[{c}]"),
                    format!(
                        "total weight {total} exceeds total opened capacity {opened}; \
                         instance is infeasible"
                    ),
                );
            }
        }
    }

    report
}

/// Serializes the instance as pretty JSON.
pub fn instance_to_json(inst: &ProblemInstance) -> String {
    // Struct serialization cannot fail.
    let mut s = serde_json::to_string_pretty(inst).expect("instance serializes");
    s.push('\n');
    s
}

/// Writes the instance file.
pub fn save_instance(inst: &ProblemInstance, path: &Path) -> Result<(), InstanceError> {
    std::fs::write(path, instance_to_json(inst)).map_err(|source| InstanceError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Permissive mirror of the file schema: integers parse as `i64` first so a
/// range error can cite the exact field instead of a line/column pair.
mod raw {
    use serde::Deserialize;

    #[derive(Deserialize)]
    pub struct Task {
        pub task_id: i64,
        pub weight: i64,
        pub due_date: i64,
    }

    #[derive(Deserialize)]
    pub struct Cluster {
        pub cluster_id: i64,
        pub tasks: Vec<Task>,
    }

    #[derive(Deserialize)]
    pub struct Resource {
        pub resource_id: i64,
        pub capacity: i64,
        pub setup_time: i64,
        pub processing_time: i64,
    }

    #[derive(Deserialize)]
    pub struct Instance {
        pub schema_version: u32,
        pub label: String,
        pub seed: u64,
        pub clusters: Vec<Cluster>,
        pub resources: Vec<Resource>,
        pub virtual_copies: Vec<Vec<i64>>,
    }
}

fn narrow_u32(value: i64, location: String) -> Result<u32, InstanceError> {
    u32::try_from(value).map_err(|_| InstanceError::Field {
        location,
        message: format!("must be a non-negative integer fitting 32 bits, got {value}"),
    })
}

/// Parses an instance from JSON text. `origin` names the source in errors.
pub fn instance_from_json(text: &str, origin: &str) -> Result<ProblemInstance, InstanceError> {
    let raw: raw::Instance = serde_json::from_str(text).map_err(|e| InstanceError::Parse {
        path: origin.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if raw.schema_version != SCHEMA_VERSION {
        return Err(InstanceError::SchemaVersion {
            path: origin.to_string(),
            found: raw.schema_version,
            expected: SCHEMA_VERSION,
        });
    }

    let clusters = raw
        .clusters
        .into_iter()
        .enumerate()
        .map(|(c, cluster)| {
            let tasks = cluster
                .tasks
                .into_iter()
                .enumerate()
                .map(|(i, t)| {
                    let at = |field: &str| format!("clusters[{c}].tasks[{i}].{field}");
                    Ok(Task {
                        task_id: narrow_u32(t.task_id, at("task_id"))?,
                        weight: narrow_u32(t.weight, at("weight"))?,
                        due_date: narrow_u32(t.due_date, at("due_date"))?,
                    })
                })
                .collect::<Result<Vec<_>, InstanceError>>()?;
            Ok(ClusterSpec {
                cluster_id: narrow_u32(cluster.cluster_id, format!("clusters[{c}].cluster_id"))?,
                tasks,
            })
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;

    let resources = raw
        .resources
        .into_iter()
        .enumerate()
        .map(|(j, r)| {
            let at = |field: &str| format!("resources[{j}].{field}");
            Ok(Resource {
                resource_id: narrow_u32(r.resource_id, at("resource_id"))?,
                capacity: narrow_u32(r.capacity, at("capacity"))?,
                setup_time: narrow_u32(r.setup_time, at("setup_time"))?,
                processing_time: narrow_u32(r.processing_time, at("processing_time"))?,
            })
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;

    let virtual_copies = raw
        .virtual_copies
        .into_iter()
        .enumerate()
        .map(|(c, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j, v)| narrow_u32(v, format!("virtual_copies[{c}][{j}]")))
                .collect::<Result<Vec<_>, InstanceError>>()
        })
        .collect::<Result<Vec<_>, InstanceError>>()?;

    let inst = ProblemInstance {
        schema_version: raw.schema_version,
        label: raw.label,
        seed: raw.seed,
        clusters,
        resources,
        virtual_copies,
    };

    // Field-level range errors with precise locations.
    let report = validate_instance(&inst);
    if let Some(finding) = report.findings.first() {
        return Err(InstanceError::Field {
            location: finding.location.clone(),
            message: finding.message.clone(),
        });
    }
    Ok(inst)
}

/// Reads and validates an instance file.
pub fn load_instance(path: &Path) -> Result<ProblemInstance, InstanceError> {
    let text = std::fs::read_to_string(path).map_err(|source| InstanceError::Read {
        path: path.display().to_string(),
        source,
    })?;
    instance_from_json(&text, &path.display().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generate_respects_ranges_and_shape() {
        let params = GeneratorParams::default();
        let inst = generate_instance(&params, 7).unwrap();
        assert_eq!(inst.clusters.len(), 1);
        assert_eq!(inst.resources.len(), 1);
        assert_eq!(inst.clusters[0].tasks.len(), 6);
        for task in &inst.clusters[0].tasks {
            assert!((1..=10).contains(&task.weight));
            assert!((3..=30).contains(&task.due_date));
        }
        let total = inst.cluster_weight(0);
        let expected = default_virtual_copies(total, 6, 20);
        assert_eq!(inst.virtual_copies, vec![vec![expected]]);
        assert!(validate_instance(&inst).is_ok());
    }

    #[test]
    fn generate_is_deterministic() {
        let params = GeneratorParams::default();
        let a = generate_instance(&params, 12345).unwrap();
        let b = generate_instance(&params, 12345).unwrap();
        assert_eq!(a, b);
        let c = generate_instance(&params, 12346).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn single_task_instance_gets_one_copy() {
        let params = GeneratorParams {
            num_tasks: 1,
            ..GeneratorParams::default()
        };
        let inst = generate_instance(&params, 3).unwrap();
        assert_eq!(inst.virtual_copies, vec![vec![1]]);
    }

    #[test]
    fn invalid_params_are_rejected() {
        let mut params = GeneratorParams {
            num_tasks: 0,
            ..GeneratorParams::default()
        };
        assert!(generate_instance(&params, 0).is_err());
        params.num_tasks = 3;
        params.weight_range = (9, 2);
        assert!(generate_instance(&params, 0).is_err());
        params.weight_range = (1, 10);
        params.capacity = 5; // below max weight
        assert!(generate_instance(&params, 0).is_err());
    }

    #[test]
    fn save_load_round_trip_is_identity() {
        let inst = generate_instance(&GeneratorParams::default(), 99).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        save_instance(&inst, &path).unwrap();
        let loaded = load_instance(&path).unwrap();
        assert_eq!(inst, loaded);
    }

    #[test]
    fn negative_weight_is_a_parse_error() {
        let inst = generate_instance(&GeneratorParams::default(), 5).unwrap();
        let text = instance_to_json(&inst).replace(
            &format!("\"weight\": {}", inst.clusters[0].tasks[0].weight),
            "\"weight\": -5",
        );
        let err = instance_from_json(&text, "inline").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("weight"), "error should cite the field: {msg}");
    }

    #[test]
    fn zero_weight_error_names_the_task() {
        let mut inst = generate_instance(&GeneratorParams::default(), 5).unwrap();
        inst.clusters[0].tasks[2].weight = 0;
        let err = instance_from_json(&instance_to_json(&inst), "inline").unwrap_err();
        match err {
            InstanceError::Field { location, .. } => {
                assert_eq!(location, "clusters[0].tasks[2]");
            }
            other => panic!("expected Field error, got {other}"),
        }
    }

    #[test]
    fn version_mismatch_is_explicit() {
        let mut inst = generate_instance(&GeneratorParams::default(), 5).unwrap();
        inst.schema_version = 2;
        let err = instance_from_json(&instance_to_json(&inst), "inline").unwrap_err();
        assert!(matches!(err, InstanceError::SchemaVersion { found: 2, .. }));
    }

    #[test]
    fn overweight_cluster_is_flagged_infeasible() {
        let mut inst = generate_instance(&GeneratorParams::default(), 5).unwrap();
        inst.virtual_copies = vec![vec![1]];
        inst.clusters[0].tasks.iter_mut().for_each(|t| t.weight = 10);
        let report = validate_instance(&inst);
        assert!(!report.is_ok());
        assert!(report.findings.iter().any(|f| f.message.contains("infeasible")));
    }
}
