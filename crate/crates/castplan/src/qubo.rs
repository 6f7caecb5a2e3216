//! QUBO compilation of the batch-allocation subproblem.
//!
//! Allocation decisions are encoded in binary variables: `Assign(c,i,j,l)`
//! puts task `i` of cluster `c` into batch (copy) `l` on resource `j`, and
//! `Use(c,j,l)` marks that batch as opened. The energy combines one objective
//! term per concern:
//!
//! * batch count (one unit per opened batch),
//! * due-date spread inside a batch (squared pairwise differences, both
//!   orders counted),
//! * a one-hot penalty forcing each task into exactly one batch,
//! * a soft capacity penalty pulling each batch load to `alpha * capacity`,
//! * a link penalty tying assignments to opened batches.
//!
//! The link term costs `lambda_xy / 4` per (task, batch) pair even when fully
//! satisfied (a constant floor absorbed into the model offset) and exactly
//! `2 * lambda_xy` more when an assignment points into an unopened batch.
//!
//! Energies follow the standard sparse convention: `E(q) = sum_i d_i q_i +
//! sum_{i<j} w_ij q_i q_j + offset`, i.e. the symmetric coefficient matrix is
//! stored as its diagonal plus upper-triangle pair terms.

use crate::instance::{validate_instance, ProblemInstance, ValidationReport};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

/// Coefficients with absolute value below this are dropped at build time.
pub const COEFF_EPSILON: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum QuboError {
    #[error("instance fails validation:\n{0}")]
    InvalidInstance(ValidationReport),
    #[error("invalid penalty configuration: {0}")]
    InvalidPenalties(String),
    #[error("assignment length {found} does not match variable count {expected}")]
    AssignmentLength { found: usize, expected: usize },
}

/// Penalty weights and the soft filling target `alpha`.
///
/// `lambda_deadline` scales the due-date spread objective (it doubles as the
/// spread-vs-batch-count trade-off weight); the other three scale constraint
/// penalties. All must be non-negative and `alpha` must lie in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PenaltyConfig {
    pub lambda_deadline: f64,
    pub lambda_one_hot: f64,
    pub lambda_capacity: f64,
    pub lambda_xy: f64,
    pub alpha: f64,
}

impl PenaltyConfig {
    fn validate(&self) -> Result<(), QuboError> {
        let named = [
            ("lambda_deadline", self.lambda_deadline),
            ("lambda_one_hot", self.lambda_one_hot),
            ("lambda_capacity", self.lambda_capacity),
            ("lambda_xy", self.lambda_xy),
        ];
        for (name, v) in named {
            if !v.is_finite() || v < 0.0 {
                return Err(QuboError::InvalidPenalties(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        if !self.alpha.is_finite() || self.alpha <= 0.0 || self.alpha > 1.0 {
            return Err(QuboError::InvalidPenalties(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Identity of one binary variable.
///
/// Indices are positional (0-based) into the instance's clusters, tasks and
/// resources; `copy` indexes the virtual copy in `0..virtual_copies[c][j]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarTag {
    Assign {
        cluster: usize,
        task: usize,
        resource: usize,
        copy: usize,
    },
    Use {
        cluster: usize,
        resource: usize,
        copy: usize,
    },
}

/// Bijection between variable tags and flat indices.
///
/// Order is canonical: all `Assign` variables first (cluster, task, resource,
/// copy lexicographic), then all `Use` variables (cluster, resource, copy).
#[derive(Debug, Clone)]
pub struct VariableMap {
    tags: Vec<VarTag>,
    lookup: HashMap<VarTag, usize>,
}

impl VariableMap {
    /// Builds the map for an instance.
    pub fn new(inst: &ProblemInstance) -> Self {
        let mut tags = Vec::new();
        for (c, cluster) in inst.clusters.iter().enumerate() {
            for i in 0..cluster.tasks.len() {
                for j in 0..inst.resources.len() {
                    for l in 0..inst.virtual_copies[c][j] as usize {
                        tags.push(VarTag::Assign {
                            cluster: c,
                            task: i,
                            resource: j,
                            copy: l,
                        });
                    }
                }
            }
        }
        for (c, _) in inst.clusters.iter().enumerate() {
            for j in 0..inst.resources.len() {
                for l in 0..inst.virtual_copies[c][j] as usize {
                    tags.push(VarTag::Use {
                        cluster: c,
                        resource: j,
                        copy: l,
                    });
                }
            }
        }
        let lookup = tags
            .iter()
            .copied()
            .enumerate()
            .map(|(ix, tag)| (tag, ix))
            .collect();
        VariableMap { tags, lookup }
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }

    pub fn tags(&self) -> &[VarTag] {
        &self.tags
    }

    pub fn tag(&self, index: usize) -> VarTag {
        self.tags[index]
    }

    pub fn index_of(&self, tag: VarTag) -> Option<usize> {
        self.lookup.get(&tag).copied()
    }

    pub fn assign_index(&self, cluster: usize, task: usize, resource: usize, copy: usize) -> Option<usize> {
        self.index_of(VarTag::Assign {
            cluster,
            task,
            resource,
            copy,
        })
    }

    pub fn use_index(&self, cluster: usize, resource: usize, copy: usize) -> Option<usize> {
        self.index_of(VarTag::Use {
            cluster,
            resource,
            copy,
        })
    }

    /// Number of `Assign` variables (they precede all `Use` variables).
    pub fn num_assign_vars(&self) -> usize {
        self.tags
            .iter()
            .take_while(|t| matches!(t, VarTag::Assign { .. }))
            .count()
    }
}

/// One upper-triangle pair term (`i < j`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairTerm {
    pub i: u32,
    pub j: u32,
    pub coeff: f64,
}

/// Sparse symmetric QUBO: diagonal, strict upper-triangle pairs, offset.
#[derive(Debug, Clone)]
pub struct QuboModel {
    map: VariableMap,
    penalties: PenaltyConfig,
    diag: Vec<f64>,
    pairs: Vec<PairTerm>,
    offset: f64,
}

impl QuboModel {
    pub fn n_vars(&self) -> usize {
        self.diag.len()
    }

    pub fn map(&self) -> &VariableMap {
        &self.map
    }

    pub fn penalties(&self) -> &PenaltyConfig {
        &self.penalties
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    /// Pair terms sorted by (i, j) with `i < j`.
    pub fn pairs(&self) -> &[PairTerm] {
        &self.pairs
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Number of stored coefficient entries (non-zero diagonal + pairs).
    pub fn n_terms(&self) -> usize {
        self.diag.iter().filter(|d| **d != 0.0).count() + self.pairs.len()
    }

    /// Evaluates `E(q) = sum d_i q_i + sum_{i<j} w_ij q_i q_j + offset`.
    pub fn energy(&self, assignment: &[bool]) -> Result<f64, QuboError> {
        if assignment.len() != self.n_vars() {
            return Err(QuboError::AssignmentLength {
                found: assignment.len(),
                expected: self.n_vars(),
            });
        }
        let mut e = self.offset;
        for (i, &d) in self.diag.iter().enumerate() {
            if assignment[i] {
                e += d;
            }
        }
        for term in &self.pairs {
            if assignment[term.i as usize] && assignment[term.j as usize] {
                e += term.coeff;
            }
        }
        Ok(e)
    }

    /// Per-variable bound on the single-flip energy change: `|d_v| + sum of
    /// |w_vu|`. Used for temperature-range estimation.
    pub fn flip_bounds(&self) -> Vec<f64> {
        let mut bounds: Vec<f64> = self.diag.iter().map(|d| d.abs()).collect();
        for term in &self.pairs {
            bounds[term.i as usize] += term.coeff.abs();
            bounds[term.j as usize] += term.coeff.abs();
        }
        bounds
    }
}

struct Accumulator {
    diag: Vec<f64>,
    pairs: BTreeMap<(u32, u32), f64>,
    offset: f64,
}

impl Accumulator {
    fn new(n: usize) -> Self {
        Accumulator {
            diag: vec![0.0; n],
            pairs: BTreeMap::new(),
            offset: 0.0,
        }
    }

    fn add_diag(&mut self, i: usize, w: f64) {
        self.diag[i] += w;
    }

    fn add_pair(&mut self, a: usize, b: usize, w: f64) {
        debug_assert_ne!(a, b);
        let key = (a.min(b) as u32, a.max(b) as u32);
        *self.pairs.entry(key).or_insert(0.0) += w;
    }

    fn finish(self, map: VariableMap, penalties: PenaltyConfig) -> QuboModel {
        let diag = self
            .diag
            .into_iter()
            .map(|d| if d.abs() < COEFF_EPSILON { 0.0 } else { d })
            .collect();
        let pairs = self
            .pairs
            .into_iter()
            .filter(|(_, w)| w.abs() >= COEFF_EPSILON)
            .map(|((i, j), coeff)| PairTerm { i, j, coeff })
            .collect();
        QuboModel {
            map,
            penalties,
            diag,
            pairs,
            offset: self.offset,
        }
    }
}

/// Compiles the instance into a QUBO under the given penalties.
///
/// The instance must pass [`validate_instance`]. Coefficients with absolute
/// value below [`COEFF_EPSILON`] are dropped.
pub fn build_qubo(
    inst: &ProblemInstance,
    penalties: &PenaltyConfig,
) -> Result<QuboModel, QuboError> {
    let report = validate_instance(inst);
    if !report.is_ok() {
        return Err(QuboError::InvalidInstance(report));
    }
    penalties.validate()?;

    let map = VariableMap::new(inst);
    let mut acc = Accumulator::new(map.len());
    let p = *penalties;

    for (c, cluster) in inst.clusters.iter().enumerate() {
        let n_c = cluster.tasks.len();
        for (j, res) in inst.resources.iter().enumerate() {
            let cap = f64::from(res.capacity);
            let target = p.alpha * cap;
            for l in 0..inst.virtual_copies[c][j] as usize {
                let y = map.use_index(c, j, l).expect("use var exists");

                // Batch-count objective: one unit per opened batch.
                acc.add_diag(y, 1.0);
                // Soft capacity, y-side: (sum w x - target y)^2 expands to a
                // linear y term target^2 (y^2 = y).
                acc.add_diag(y, p.lambda_capacity * target * target);

                for i in 0..n_c {
                    let x = map.assign_index(c, i, j, l).expect("assign var exists");
                    let w_i = f64::from(cluster.tasks[i].weight);

                    // Soft capacity, x-side linear term.
                    acc.add_diag(x, p.lambda_capacity * w_i * w_i);
                    // Soft capacity, cross term.
                    acc.add_pair(x, y, -2.0 * p.lambda_capacity * target * w_i);
                    // Link penalty: (y - x - 1/2)^2 = 2x - 2xy + 1/4 on binaries.
                    acc.add_diag(x, 2.0 * p.lambda_xy);
                    acc.add_pair(x, y, -2.0 * p.lambda_xy);
                    acc.offset += p.lambda_xy / 4.0;

                    for k in (i + 1)..n_c {
                        let xk = map.assign_index(c, k, j, l).expect("assign var exists");
                        let w_k = f64::from(cluster.tasks[k].weight);
                        // Soft capacity, same-batch weight product.
                        acc.add_pair(x, xk, 2.0 * p.lambda_capacity * w_i * w_k);
                        // Due-date spread: both orders of each pair count,
                        // hence the factor 2 on the unordered pair.
                        let ds = f64::from(cluster.tasks[i].due_date)
                            - f64::from(cluster.tasks[k].due_date);
                        acc.add_pair(x, xk, 2.0 * p.lambda_deadline * ds * ds);
                    }
                }
            }
        }

        // One-hot per task: (sum_b x_b - 1)^2 = 1 - sum x_b + 2 sum_{b<b'} x_b x_b'.
        for i in 0..n_c {
            let group: Vec<usize> = (0..inst.resources.len())
                .flat_map(|j| {
                    (0..inst.virtual_copies[c][j] as usize)
                        .map(move |l| (j, l))
                })
                .map(|(j, l)| map.assign_index(c, i, j, l).expect("assign var exists"))
                .collect();
            acc.offset += p.lambda_one_hot;
            for (a_pos, &a) in group.iter().enumerate() {
                acc.add_diag(a, -p.lambda_one_hot);
                for &b in &group[a_pos + 1..] {
                    acc.add_pair(a, b, 2.0 * p.lambda_one_hot);
                }
            }
        }
    }

    Ok(acc.finish(map, p))
}

/// Default penalty scaling for an instance.
///
/// The objective terms (batch count plus weighted due-date spread) can reward
/// a single bit flip by at most `G`; the hard-constraint penalties are set to
/// `2 * (G + 1)` so that no single-bit constraint violation ever pays off,
/// and the capacity weight is normalized by the squared largest capacity to
/// keep the squared-load term commensurate with the batch-count unit. The
/// spread weight defaults to `1 / (2 * D^2 * N)` (D = largest within-cluster
/// due-date spread, clamped to 1; N = total tasks), which keeps the total
/// spread objective below the value of one batch.
pub fn default_penalties(inst: &ProblemInstance) -> PenaltyConfig {
    let n_tasks = inst.num_tasks().max(1) as f64;
    let spread = f64::from(inst.max_due_spread().max(1));
    let lambda_deadline = 1.0 / (2.0 * spread * spread * n_tasks);

    // Max single-flip objective gain: a Use flip moves the batch count by 1;
    // an Assign flip moves the spread term by at most the sum of its pair
    // coefficients within one batch.
    let mut g: f64 = 1.0;
    for cluster in &inst.clusters {
        for i in 0..cluster.tasks.len() {
            let mut bound = 0.0;
            for k in 0..cluster.tasks.len() {
                if k == i {
                    continue;
                }
                let ds = f64::from(cluster.tasks[i].due_date)
                    - f64::from(cluster.tasks[k].due_date);
                bound += 2.0 * lambda_deadline * ds * ds;
            }
            g = g.max(bound);
        }
    }

    let max_capacity = inst
        .resources
        .iter()
        .map(|r| r.capacity)
        .max()
        .unwrap_or(1)
        .max(1);
    let cap = f64::from(max_capacity);

    PenaltyConfig {
        lambda_deadline,
        lambda_one_hot: 2.0 * (g + 1.0),
        lambda_capacity: (g + 1.0) / (cap * cap),
        lambda_xy: 2.0 * (g + 1.0),
        alpha: 0.95,
    }
}

/// One decoded batch: tasks of `cluster` placed on copy `copy` of `resource`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Batch {
    pub cluster: usize,
    pub resource: usize,
    pub copy: usize,
    /// Positional task indices within the cluster, ascending.
    pub tasks: Vec<usize>,
    /// Total member weight.
    pub load: u64,
}

/// A batch allocation: the non-empty batches, sorted by (cluster, resource,
/// copy). No task appears in two batches.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Allocation {
    pub batches: Vec<Batch>,
}

impl Allocation {
    pub fn num_batches(&self) -> usize {
        self.batches.len()
    }

    /// Copy indices on identical resources are interchangeable; this relabels
    /// copies so equal-up-to-copy-permutation allocations compare equal.
    /// Within each (cluster, resource) group, batches are ordered by their
    /// member lists and renumbered 0, 1, ...
    pub fn canonicalize(&self) -> Allocation {
        let mut groups: BTreeMap<(usize, usize), Vec<Batch>> = BTreeMap::new();
        for b in &self.batches {
            groups.entry((b.cluster, b.resource)).or_default().push(b.clone());
        }
        let mut batches = Vec::with_capacity(self.batches.len());
        for ((_, _), mut group) in groups {
            group.sort_by(|a, b| a.tasks.cmp(&b.tasks));
            for (new_copy, mut batch) in group.into_iter().enumerate() {
                batch.copy = new_copy;
                batches.push(batch);
            }
        }
        Allocation { batches }
    }
}

/// Constraint audit of a decoded assignment against the true instance bounds
/// (the hard capacity, not the soft target).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub one_hot_ok: bool,
    pub capacity_ok: bool,
    pub xy_link_ok: bool,
    /// (cluster, task) with no assignment bit set.
    pub unassigned_tasks: Vec<(usize, usize)>,
    /// (cluster, task) with more than one assignment bit set.
    pub multiply_assigned_tasks: Vec<(usize, usize)>,
    /// (cluster, resource, copy, load) exceeding the resource capacity.
    pub overloaded_batches: Vec<(usize, usize, usize, u64)>,
    /// (cluster, resource, copy) holding assignments while unopened.
    pub dangling_batches: Vec<(usize, usize, usize)>,
}

impl FeasibilityReport {
    /// Conjunction of the per-constraint audits.
    pub fn feasible(&self) -> bool {
        self.one_hot_ok && self.capacity_ok && self.xy_link_ok
    }
}

/// Decodes a raw assignment into an [`Allocation`] plus its audit.
///
/// Batches are the non-empty assignment groups. A task with several bits set
/// lands in its lowest (resource, copy) batch so the allocation stays
/// well-formed; the report still records the violation.
pub fn decode(
    inst: &ProblemInstance,
    map: &VariableMap,
    assignment: &[bool],
) -> Result<(Allocation, FeasibilityReport), QuboError> {
    if assignment.len() != map.len() {
        return Err(QuboError::AssignmentLength {
            found: assignment.len(),
            expected: map.len(),
        });
    }

    let mut report = FeasibilityReport {
        one_hot_ok: true,
        capacity_ok: true,
        xy_link_ok: true,
        unassigned_tasks: Vec::new(),
        multiply_assigned_tasks: Vec::new(),
        overloaded_batches: Vec::new(),
        dangling_batches: Vec::new(),
    };

    let mut members: BTreeMap<(usize, usize, usize), Vec<usize>> = BTreeMap::new();

    for (c, cluster) in inst.clusters.iter().enumerate() {
        for i in 0..cluster.tasks.len() {
            let mut placed: Vec<(usize, usize)> = Vec::new();
            for j in 0..inst.resources.len() {
                for l in 0..inst.virtual_copies[c][j] as usize {
                    let x = map.assign_index(c, i, j, l).expect("assign var exists");
                    if assignment[x] {
                        placed.push((j, l));
                    }
                }
            }
            match placed.len() {
                0 => {
                    report.one_hot_ok = false;
                    report.unassigned_tasks.push((c, i));
                }
                1 => {
                    let (j, l) = placed[0];
                    members.entry((c, j, l)).or_default().push(i);
                }
                _ => {
                    report.one_hot_ok = false;
                    report.multiply_assigned_tasks.push((c, i));
                    let (j, l) = placed[0];
                    members.entry((c, j, l)).or_default().push(i);
                }
            }
        }
    }

    let mut batches = Vec::new();
    for ((c, j, l), tasks) in members {
        let load: u64 = tasks
            .iter()
            .map(|&i| u64::from(inst.clusters[c].tasks[i].weight))
            .sum();
        if load > u64::from(inst.resources[j].capacity) {
            report.capacity_ok = false;
            report.overloaded_batches.push((c, j, l, load));
        }
        let y = map.use_index(c, j, l).expect("use var exists");
        if !assignment[y] {
            report.xy_link_ok = false;
            report.dangling_batches.push((c, j, l));
        }
        batches.push(Batch {
            cluster: c,
            resource: j,
            copy: l,
            tasks,
            load,
        });
    }

    Ok((Allocation { batches }, report))
}

/// Serializes the model in the plain interchange format: a header line
/// `n_vars n_terms offset`, then one `i j coeff` line per stored term
/// (`i == j` for diagonal entries), sorted by `(i, j)`.
pub fn export_qubo(model: &QuboModel) -> String {
    let mut entries: Vec<(u32, u32, f64)> = Vec::with_capacity(model.n_terms());
    for (i, &d) in model.diag.iter().enumerate() {
        if d != 0.0 {
            entries.push((i as u32, i as u32, d));
        }
    }
    for term in &model.pairs {
        entries.push((term.i, term.j, term.coeff));
    }
    entries.sort_by_key(|&(i, j, _)| (i, j));

    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", model.n_vars(), entries.len(), model.offset);
    for (i, j, w) in entries {
        let _ = writeln!(out, "{i} {j} {w}");
    }
    out
}
