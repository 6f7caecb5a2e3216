//! Batch allocation and exact scheduling for furnace-style production
//! planning, with a Pareto/hypervolume benchmarking harness.
//!
//! The solver decomposes planning into two stages: batch allocation is
//! compiled to a QUBO ([`qubo`]) and sampled with simulated annealing
//! ([`annealer`]); decoded allocations are then timed exactly by a total
//! absolute-deviation scheduler ([`scheduler`]). A budgeted weighted-sum
//! search over the joint problem ([`monolithic`]) serves as the baseline.
//! Solution pools are evaluated as Pareto fronts under a two-dimensional
//! hypervolume ([`metrics`]) and compared across methods by the experiment
//! drivers ([`experiments`]).
//!
//! Start with the runnable examples (`cargo run --example <name>`):
//!
//! * `generate_instance` - reproducible instance generation and the file format
//! * `build_qubo` - allocation model compilation and text export
//! * `anneal` - simulated annealing, decoding, feasibility audits
//! * `schedule` - exact completion-time scheduling and validation
//! * `baseline` - the monolithic weighted-sum search
//! * `pareto_metrics` - fronts, hypervolume, method comparison
//! * `full_pipeline` - the end-to-end decomposed pipeline on one instance
//! * `robustness` - swap perturbations and hypervolume degradation
//!
//! The same capabilities are scriptable through the thin `castplan` binary
//! (subcommands `generate`, `solve`, `compare`, `benchmark`, `robustness`,
//! `validate`).

pub mod annealer;
pub mod budget;
pub mod cli;
pub mod experiments;
pub mod instance;
pub mod metrics;
pub mod monolithic;
pub mod plot;
pub mod pool;
pub mod qubo;
pub mod rng;
pub mod scheduler;
