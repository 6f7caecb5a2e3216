//! Simulated-annealing sampler and exact brute-force reference for QUBOs.
//!
//! Each read starts from a uniformly random state and runs single-bit-flip
//! Metropolis sweeps over a geometric inverse-temperature ladder, visiting
//! variables in fixed index order. Energy changes are computed incrementally
//! from cached local fields; the energy recorded for a read is recomputed
//! exactly from the model at the end. Reads are seeded independently from
//! `(master_seed, read_index)`, so a sample set does not depend on how reads
//! are grouped or interleaved across calls.

use crate::qubo::QuboModel;
use crate::rng::derive_seed;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::ops::Range;

/// Hard ceiling for [`brute_force_solve`]; 2^24 states is the point where
/// exhaustive enumeration stops being a desk-scale tool.
pub const BRUTE_FORCE_MAX_VARS: usize = 24;

#[derive(Debug, thiserror::Error)]
pub enum SampleError {
    #[error("brute force supports at most {BRUTE_FORCE_MAX_VARS} variables, model has {0}")]
    BruteForceTooLarge(usize),
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error("malformed sample line {line}: {message}")]
    ParseSample { line: usize, message: String },
    #[error("sample line {line}: bit-string length {found} does not match variable count {expected}")]
    SampleLength {
        line: usize,
        found: usize,
        expected: usize,
    },
}

/// Sampler configuration.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SaConfig {
    pub num_reads: u32,
    pub sweeps_per_read: u32,
    /// `None` derives the range from the model via [`auto_beta_range`].
    pub beta_range: Option<(f64, f64)>,
    pub master_seed: u64,
}

impl Default for SaConfig {
    fn default() -> Self {
        SaConfig {
            num_reads: 1000,
            sweeps_per_read: 1000,
            beta_range: None,
            master_seed: 0,
        }
    }
}

impl SaConfig {
    fn validate(&self) -> Result<(), SampleError> {
        if self.num_reads == 0 {
            return Err(SampleError::InvalidConfig("num_reads must be >= 1".into()));
        }
        if self.sweeps_per_read == 0 {
            return Err(SampleError::InvalidConfig(
                "sweeps_per_read must be >= 1".into(),
            ));
        }
        if let Some((lo, hi)) = self.beta_range {
            if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 || hi < lo {
                return Err(SampleError::InvalidConfig(format!(
                    "beta_range ({lo}, {hi}) must satisfy 0 < lo <= hi"
                )));
            }
        }
        Ok(())
    }
}

/// One read's final state.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub assignment: Vec<bool>,
    pub energy: f64,
    pub read_index: u32,
}

/// Records of all executed reads, ascending by `(energy, read_index)`.
#[derive(Debug, Clone)]
pub struct SampleSet {
    pub records: Vec<SampleRecord>,
    /// Beta range actually used.
    pub beta_range: (f64, f64),
    /// Configuration echo.
    pub config: SaConfig,
}

impl SampleSet {
    /// Lowest-energy record (ties already broken by read index).
    pub fn best(&self) -> Option<&SampleRecord> {
        self.records.first()
    }

    pub fn sort_records(records: &mut [SampleRecord]) {
        records.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then(a.read_index.cmp(&b.read_index))
        });
    }
}

/// Derives an inverse-temperature range from the model's coefficients.
///
/// The hottest rung accepts the largest possible flip with probability 1/2
/// (`beta_min = ln 2 / max_v (|d_v| + sum_u |w_vu|)`); the coldest rung
/// rejects the smallest resolvable energy difference, the minimum nonzero
/// coefficient magnitude, at probability 1/100
/// (`beta_max = ln 100 / min nonzero |coefficient|`). Penalty terms dwarf the
/// objective terms here, so resolving by coefficient rather than by flip
/// bound is what lets the cold phase order near-degenerate assignments. An
/// all-zero model falls back to (1, 10).
pub fn auto_beta_range(model: &QuboModel) -> (f64, f64) {
    let max = model
        .flip_bounds()
        .into_iter()
        .fold(0.0f64, f64::max);
    let mut min_nonzero = f64::INFINITY;
    for &d in model.diag() {
        if d != 0.0 {
            min_nonzero = min_nonzero.min(d.abs());
        }
    }
    for t in model.pairs() {
        if t.coeff != 0.0 {
            min_nonzero = min_nonzero.min(t.coeff.abs());
        }
    }
    if max <= 0.0 || !min_nonzero.is_finite() {
        return (1.0, 10.0);
    }
    (2.0f64.ln() / max, 100.0f64.ln() / min_nonzero)
}

/// Geometric ladder from `beta_min` to `beta_max` with one rung per sweep.
/// A single sweep quenches at `beta_max`.
fn beta_ladder(beta_min: f64, beta_max: f64, sweeps: u32) -> Vec<f64> {
    if sweeps == 1 {
        return vec![beta_max];
    }
    let n = sweeps as usize;
    let ratio = (beta_max / beta_min).ln() / (n as f64 - 1.0);
    (0..n).map(|k| beta_min * (ratio * k as f64).exp()).collect()
}

/// Flat adjacency built once per model so sweeps touch contiguous memory.
struct Neighborhood {
    offsets: Vec<u32>,
    targets: Vec<u32>,
    weights: Vec<f64>,
}

impl Neighborhood {
    fn new(model: &QuboModel) -> Self {
        let n = model.n_vars();
        let mut degree = vec![0u32; n];
        for t in model.pairs() {
            degree[t.i as usize] += 1;
            degree[t.j as usize] += 1;
        }
        let mut offsets = vec![0u32; n + 1];
        for v in 0..n {
            offsets[v + 1] = offsets[v] + degree[v];
        }
        let total = offsets[n] as usize;
        let mut targets = vec![0u32; total];
        let mut weights = vec![0.0f64; total];
        let mut cursor: Vec<u32> = offsets[..n].to_vec();
        for t in model.pairs() {
            let (i, j) = (t.i as usize, t.j as usize);
            targets[cursor[i] as usize] = t.j;
            weights[cursor[i] as usize] = t.coeff;
            cursor[i] += 1;
            targets[cursor[j] as usize] = t.i;
            weights[cursor[j] as usize] = t.coeff;
            cursor[j] += 1;
        }
        Neighborhood {
            offsets,
            targets,
            weights,
        }
    }

    #[inline]
    fn range(&self, v: usize) -> Range<usize> {
        self.offsets[v] as usize..self.offsets[v + 1] as usize
    }
}

/// Local fields: `h[v] = d_v + sum_u w_vu x_u`, so a flip of `v` changes the
/// energy by `h[v]` (0 -> 1) or `-h[v]` (1 -> 0).
fn init_fields(model: &QuboModel, nbh: &Neighborhood, state: &[bool]) -> Vec<f64> {
    let mut h = model.diag().to_vec();
    for v in 0..state.len() {
        if state[v] {
            for k in nbh.range(v) {
                h[nbh.targets[k] as usize] += nbh.weights[k];
            }
        }
    }
    h
}

#[inline]
fn apply_flip(nbh: &Neighborhood, state: &mut [bool], h: &mut [f64], v: usize) {
    state[v] = !state[v];
    let sign = if state[v] { 1.0 } else { -1.0 };
    for k in nbh.range(v) {
        h[nbh.targets[k] as usize] += sign * nbh.weights[k];
    }
}

fn run_read(
    model: &QuboModel,
    nbh: &Neighborhood,
    betas: &[f64],
    seed: u64,
) -> (Vec<bool>, f64) {
    let n = model.n_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state: Vec<bool> = (0..n).map(|_| rng.gen::<bool>()).collect();
    let mut h = init_fields(model, nbh, &state);

    for &beta in betas {
        for v in 0..n {
            let delta = if state[v] { -h[v] } else { h[v] };
            let accept = delta <= 0.0 || rng.gen::<f64>() < (-beta * delta).exp();
            if accept {
                apply_flip(nbh, &mut state, &mut h, v);
            }
        }
    }

    let energy = model.energy(&state).expect("state length matches model");
    (state, energy)
}

/// Work units one read costs (one unit per proposed flip).
pub fn read_cost(model: &QuboModel, config: &SaConfig) -> u64 {
    u64::from(config.sweeps_per_read) * model.n_vars() as u64
}

/// Runs the reads in `range` (clamped to `config.num_reads`) and returns
/// their records in read order.
///
/// Read `k` is seeded from `(master_seed, k)` only, so partitioning the read
/// range across calls changes nothing.
pub fn sample_reads(
    model: &QuboModel,
    config: &SaConfig,
    range: Range<u32>,
) -> Result<Vec<SampleRecord>, SampleError> {
    config.validate()?;
    let beta = match config.beta_range {
        Some(r) => r,
        None => auto_beta_range(model),
    };
    let betas = beta_ladder(beta.0, beta.1, config.sweeps_per_read);
    let nbh = Neighborhood::new(model);

    let end = range.end.min(config.num_reads);
    let mut records = Vec::new();
    for read_index in range.start..end {
        let seed = derive_seed(config.master_seed, "sa-read", &[u64::from(read_index)]);
        let (assignment, energy) = run_read(model, &nbh, &betas, seed);
        records.push(SampleRecord {
            assignment,
            energy,
            read_index,
        });
    }
    Ok(records)
}

/// Runs all `config.num_reads` reads and returns the sorted sample set.
pub fn sample(model: &QuboModel, config: &SaConfig) -> Result<SampleSet, SampleError> {
    let mut records = sample_reads(model, config, 0..config.num_reads)?;
    SampleSet::sort_records(&mut records);
    let beta_range = config
        .beta_range
        .unwrap_or_else(|| auto_beta_range(model));
    Ok(SampleSet {
        records,
        beta_range,
        config: config.clone(),
    })
}

/// Exhaustive minimization by Gray-code enumeration.
///
/// Ties on exact energy equality are broken toward the lexicographically
/// smallest assignment (`false < true`, index order). Errors above
/// [`BRUTE_FORCE_MAX_VARS`] variables.
pub fn brute_force_solve(model: &QuboModel) -> Result<(Vec<bool>, f64), SampleError> {
    let n = model.n_vars();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(SampleError::BruteForceTooLarge(n));
    }
    let mut state = vec![false; n];
    if n == 0 {
        return Ok((state, model.offset()));
    }

    let nbh = Neighborhood::new(model);
    let mut h = init_fields(model, &nbh, &state);
    let mut energy = model.offset();

    let mut best_state = state.clone();
    let mut best_energy = energy;

    // Gray-code walk: step k flips bit trailing_zeros(k). The running energy
    // is incremental; candidates are re-evaluated exactly before they can
    // displace the incumbent, so float drift cannot corrupt tie-breaks.
    let total: u64 = 1u64 << n;
    for k in 1..total {
        let v = k.trailing_zeros() as usize;
        let delta = if state[v] { -h[v] } else { h[v] };
        energy += delta;
        apply_flip(&nbh, &mut state, &mut h, v);

        if energy <= best_energy + 1e-9 {
            let exact = model.energy(&state).expect("state length matches model");
            if exact < best_energy || (exact == best_energy && state < best_state) {
                best_energy = exact;
                best_state.copy_from_slice(&state);
            }
        }
    }
    Ok((best_state, best_energy))
}

/// Serializes records as `energy bit-string` lines (bit i = variable i).
pub fn export_samples(records: &[SampleRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let bits: String = r
            .assignment
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        let _ = writeln!(out, "{} {}", r.energy, bits);
    }
    out
}

/// Parses `energy bit-string` lines into records for `model`.
///
/// Energies are recomputed from the model (recorded energies must always be
/// re-verifiable); the parsed value is only used to reject corrupt lines that
/// disagree by more than 1e-6. Read indices number the lines from 0.
pub fn import_samples(model: &QuboModel, text: &str) -> Result<SampleSet, SampleError> {
    let mut records = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let energy_text = parts.next().ok_or_else(|| SampleError::ParseSample {
            line: lineno + 1,
            message: "missing energy field".into(),
        })?;
        let bits_text = parts.next().ok_or_else(|| SampleError::ParseSample {
            line: lineno + 1,
            message: "missing bit-string field".into(),
        })?;
        if parts.next().is_some() {
            return Err(SampleError::ParseSample {
                line: lineno + 1,
                message: "expected exactly two fields: energy bit-string".into(),
            });
        }
        let claimed: f64 = energy_text.parse().map_err(|e| SampleError::ParseSample {
            line: lineno + 1,
            message: format!("bad energy value: {e}"),
        })?;
        if bits_text.len() != model.n_vars() {
            return Err(SampleError::SampleLength {
                line: lineno + 1,
                found: bits_text.len(),
                expected: model.n_vars(),
            });
        }
        let assignment: Vec<bool> = bits_text
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(SampleError::ParseSample {
                    line: lineno + 1,
                    message: format!("bit-string may contain only 0/1, found {other:?}"),
                }),
            })
            .collect::<Result<_, _>>()?;
        let energy = model.energy(&assignment).expect("length checked");
        if (energy - claimed).abs() > 1e-6 {
            return Err(SampleError::ParseSample {
                line: lineno + 1,
                message: format!(
                    "stated energy {claimed} disagrees with recomputed {energy}"
                ),
            });
        }
        records.push(SampleRecord {
            assignment,
            energy,
            read_index: records.len() as u32,
        });
    }
    SampleSet::sort_records(&mut records);
    Ok(SampleSet {
        records,
        beta_range: (0.0, 0.0),
        config: SaConfig {
            num_reads: 0,
            sweeps_per_read: 0,
            beta_range: None,
            master_seed: 0,
        },
    })
}
