//! Command-line front end tying the pipeline together: instance generation,
//! per-method solves, pool comparison, and the benchmark and robustness
//! experiment drivers, with CSV/JSON reports and SVG plots.
//!
//! Exit codes: 0 success, 2 usage or bad configuration, 3 I/O failure,
//! 4 empty result.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::annealer::{import_samples, SaConfig};
use crate::experiments::{
    run_benchmark, run_robustness, run_separation, run_separation_from_samples, BenchmarkConfig,
    BenchmarkReport, ExperimentError, Method, RobustnessConfig, SeparationConfig,
};
use crate::instance::{
    generate_instance, load_instance, save_instance, GeneratorParams, InstanceError,
};
use crate::metrics::{compare_fronts, hypervolume, MethodFront};
use crate::monolithic::{solve_monolithic, MonolithicConfig};
use crate::plot::{front_svg, improvement_bars_svg, paired_bars_svg};
use crate::pool::{PoolEntry, SolutionPool};
use crate::qubo::{build_qubo, default_penalties, PenaltyConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_EMPTY: i32 = 4;

/// Fully resolved run configuration. Every field has a default, a config
/// file overrides the defaults, and command-line flags override the file.
/// The resolved document is echoed into every report for provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub master_seed: u64,
    pub out_dir: String,
    /// Worker thread count; `None` leaves the pool at its default size.
    pub threads: Option<usize>,
    pub generator: GeneratorParams,
    /// `None` derives penalties from each instance.
    pub penalties: Option<PenaltyConfig>,
    pub sa: SaConfig,
    /// Virtual-seconds budget per method run.
    pub budget_seconds: f64,
    pub weight_steps: u32,
    pub benchmark_sizes: Vec<u32>,
    pub instances_per_size: u32,
    pub robustness_size: u32,
    pub robustness_instances: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            master_seed: 42,
            out_dir: "out".into(),
            threads: None,
            generator: GeneratorParams::default(),
            penalties: None,
            sa: SaConfig::default(),
            budget_seconds: 0.1,
            weight_steps: 11,
            benchmark_sizes: vec![6, 8, 10, 12],
            instances_per_size: 10,
            robustness_size: 8,
            robustness_instances: 40,
        }
    }
}

/// On-disk form of one solved pool: provenance, instance identity, method,
/// sampler or search statistics, and every pooled plan with its metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PoolFile {
    pub config: RunConfig,
    pub instance_label: String,
    pub method: String,
    pub stats: serde_json::Value,
    pub entries: Vec<PoolEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Empty(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
            CliError::Empty(_) => EXIT_EMPTY,
        }
    }
}

impl From<InstanceError> for CliError {
    fn from(e: InstanceError) -> Self {
        match &e {
            InstanceError::Read { .. } | InstanceError::Write { .. } => CliError::Io(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        match e {
            ExperimentError::Instance(inner) => inner.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<crate::monolithic::MonolithicError> for CliError {
    fn from(e: crate::monolithic::MonolithicError) -> Self {
        CliError::Usage(e.to_string())
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "castplan",
    version,
    about = "Batch planning benchmarks: annealed allocation with exact \
             scheduling versus a monolithic weighted-sum baseline"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// JSON config file; flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output directory, created if missing; overrides the config file.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker thread count; overrides the config file.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Print the fully resolved configuration before running.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Generate deterministic benchmark instances.
    Generate {
        /// Tasks per instance.
        #[arg(long)]
        size: u32,
        /// Number of instances.
        #[arg(long, default_value_t = 10)]
        count: u32,
    },
    /// Run one method on one instance and write its pool and front.
    Solve {
        /// Instance file to solve.
        #[arg(long, value_name = "FILE")]
        instance: PathBuf,
        /// separation-sa, non-separation, or separation-import.
        #[arg(long)]
        method: Method,
        /// Sample file for separation-import: `energy bitstring` lines.
        #[arg(long, value_name = "FILE")]
        samples: Option<PathBuf>,
    },
    /// Compare solution pools by hypervolume on a shared lead scale.
    Compare {
        /// Pool files written by solve; the non-separation pool, when
        /// present, is the improvement baseline.
        #[arg(long = "pools", num_args = 1.., required = true, value_name = "FILE")]
        pools: Vec<PathBuf>,
    },
    /// Run the full size-sweep benchmark and write reports and plots.
    Benchmark,
    /// Run the swap-perturbation robustness experiment.
    Robustness,
    /// Check instance files and report the first problem in each.
    Validate {
        /// Instance files to check.
        #[arg(long = "instance", num_args = 1.., required = true, value_name = "FILE")]
        instances: Vec<PathBuf>,
    },
}

/// Entry point for the binary; returns the process exit code.
pub fn main() -> i32 {
    run_with_args(std::env::args_os())
}

/// Parses `args` and runs the selected command. Split from [`main`] so tests
/// can drive the full CLI in-process.
pub fn run_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn resolve_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out_dir = out.display().to_string();
    }
    if let Some(threads) = cli.threads {
        config.threads = Some(threads);
    }
    Ok(config)
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let config = resolve_config(cli)?;
    if cli.print_config {
        println!(
            "{}",
            serde_json::to_string_pretty(&config).expect("config serializes")
        );
    }
    match config.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(cli, &config))
        }
        None => dispatch(cli, &config),
    }
}

fn dispatch(cli: &Cli, config: &RunConfig) -> Result<(), CliError> {
    match &cli.command {
        Cmd::Generate { size, count } => cmd_generate(config, *size, *count),
        Cmd::Solve {
            instance,
            method,
            samples,
        } => cmd_solve(config, instance, *method, samples.as_deref()),
        Cmd::Compare { pools } => cmd_compare(config, pools),
        Cmd::Benchmark => cmd_benchmark(config),
        Cmd::Robustness => cmd_robustness(config),
        Cmd::Validate { instances } => cmd_validate(instances),
    }
}

fn out_dir(config: &RunConfig) -> Result<PathBuf, CliError> {
    let dir = PathBuf::from(&config.out_dir);
    fs::create_dir_all(&dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn config_line(config: &RunConfig) -> String {
    format!(
        "# config: {}\n",
        serde_json::to_string(config).expect("config serializes")
    )
}

fn cmd_generate(config: &RunConfig, size: u32, count: u32) -> Result<(), CliError> {
    if size == 0 || count == 0 {
        return Err(CliError::Usage(
            "generate needs --size and --count of at least 1".into(),
        ));
    }
    let dir = out_dir(config)?;
    for idx in 0..count {
        let params = GeneratorParams {
            num_tasks: size,
            label: format!("s{size}-i{idx}"),
            ..config.generator.clone()
        };
        let seed = crate::rng::derive_seed(
            config.master_seed,
            "inst",
            &[u64::from(size), u64::from(idx)],
        );
        let inst = generate_instance(&params, seed)?;
        let path = dir.join(format!("inst_s{size}_i{idx}.json"));
        save_instance(&inst, &path)?;
        println!(
            "wrote {} label={} seed={} tasks={}",
            path.display(),
            inst.label,
            inst.seed,
            inst.num_tasks()
        );
    }
    println!(
        "generated {count} instances of size {size} under {}",
        dir.display()
    );
    Ok(())
}

fn cmd_solve(
    config: &RunConfig,
    instance: &Path,
    method: Method,
    samples: Option<&Path>,
) -> Result<(), CliError> {
    let inst = load_instance(instance)?;
    let (pool, stats): (SolutionPool, serde_json::Value) = match method {
        Method::SeparationSa => {
            let outcome = run_separation(
                &inst,
                &SeparationConfig {
                    sa: SaConfig {
                        master_seed: config.master_seed,
                        ..config.sa.clone()
                    },
                    budget_seconds: config.budget_seconds,
                    penalties: config.penalties,
                },
            )?;
            let stats = serde_json::to_value(&outcome.stats).expect("stats serialize");
            (outcome.pool, stats)
        }
        Method::NonSeparation => {
            let outcome = solve_monolithic(
                &inst,
                &MonolithicConfig {
                    weight_steps: config.weight_steps,
                    budget_seconds: config.budget_seconds,
                },
            )?;
            let stats = serde_json::to_value(&outcome.stats).expect("stats serialize");
            (outcome.pool, stats)
        }
        Method::SeparationImport => {
            let Some(samples) = samples else {
                return Err(ExperimentError::ExternalSamplesRequired(
                    Method::SeparationImport.name(),
                )
                .into());
            };
            let text = fs::read_to_string(samples)
                .map_err(|e| CliError::Io(format!("{}: {e}", samples.display())))?;
            let penalties = config.penalties.unwrap_or_else(|| default_penalties(&inst));
            let model =
                build_qubo(&inst, &penalties).map_err(|e| CliError::Usage(e.to_string()))?;
            let set = import_samples(&model, &text).map_err(|e| CliError::Usage(e.to_string()))?;
            let outcome = run_separation_from_samples(&inst, &set.records)?;
            let stats = serde_json::to_value(&outcome.stats).expect("stats serialize");
            (outcome.pool, stats)
        }
    };

    let front = pool.front_points();
    let lead_max = pool
        .entries()
        .iter()
        .map(|e| e.kpi.lead_time)
        .fold(1.0f64, f64::max);
    let hv = hypervolume(&front, lead_max);

    let dir = out_dir(config)?;
    let stem = instance
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("instance");
    let pool_file = PoolFile {
        config: config.clone(),
        instance_label: inst.label.clone(),
        method: method.name().to_string(),
        stats,
        entries: pool.entries().to_vec(),
    };
    let pool_path = dir.join(format!("{stem}.{}.pool.json", method.name()));
    let mut json = serde_json::to_string_pretty(&pool_file).expect("pool serializes");
    json.push('\n');
    write_text(&pool_path, &json)?;

    let mut csv = config_line(config);
    csv.push_str(&format!(
        "# instance: {} method: {}\n",
        inst.label,
        method.name()
    ));
    csv.push_str("filling_ratio,lead_time\n");
    for p in &front {
        csv.push_str(&format!("{},{}\n", p.filling_ratio, p.lead_time));
    }
    let front_path = dir.join(format!("{stem}.{}.front.csv", method.name()));
    write_text(&front_path, &csv)?;

    println!(
        "pool {} plans, front {} points, hypervolume {hv:.6} on this pool's own \
         lead scale (L_max {lead_max})",
        pool.len(),
        front.len()
    );
    println!("note: hypervolumes of separate solve runs are not comparable; use `compare`");
    if pool.is_empty() {
        return Err(CliError::Empty(format!(
            "method {} produced an empty pool",
            method.name()
        )));
    }
    Ok(())
}

fn cmd_compare(config: &RunConfig, pools: &[PathBuf]) -> Result<(), CliError> {
    let mut fronts = Vec::new();
    for path in pools {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let file: PoolFile = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        fronts.push(MethodFront {
            method: file.method,
            points: file.entries.iter().map(|e| e.kpi).collect(),
        });
    }
    let cmp = compare_fronts(&fronts).expect("at least one pool is required");

    let dir = out_dir(config)?;
    let mut csv = config_line(config);
    csv.push_str(&cmp.to_csv());
    write_text(&dir.join("comparison.csv"), &csv)?;
    let mut json = serde_json::to_string_pretty(&cmp).expect("comparison serializes");
    json.push('\n');
    write_text(&dir.join("comparison.json"), &json)?;
    write_text(&dir.join("fronts.svg"), &front_svg(&fronts, cmp.lead_max))?;

    println!("L_max {} baseline {}", cmp.lead_max, cmp.baseline_method);
    if cmp.degenerate_baseline {
        println!("baseline hypervolume is zero; improvement rates are undefined");
    }
    for row in &cmp.methods {
        match row.improvement_pct {
            Some(pct) => println!(
                "{}: hypervolume {:.6} ({pct:+.2}% vs baseline)",
                row.method, row.hypervolume
            ),
            None => println!("{}: hypervolume {:.6}", row.method, row.hypervolume),
        }
    }
    Ok(())
}

fn cmd_benchmark(config: &RunConfig) -> Result<(), CliError> {
    let bench = BenchmarkConfig {
        sizes: config.benchmark_sizes.clone(),
        instances_per_size: config.instances_per_size,
        master_seed: config.master_seed,
        budget_seconds: config.budget_seconds,
        sa: config.sa.clone(),
        weight_steps: config.weight_steps,
        generator: config.generator.clone(),
    };
    let report = run_benchmark(&bench)?;

    let dir = out_dir(config)?;
    write_text(&dir.join("benchmark.csv"), &report.to_csv())?;
    write_text(&dir.join("benchmark.json"), &report.to_json())?;
    write_text(
        &dir.join("improvement.svg"),
        &improvement_bars_svg(&report.summaries),
    )?;
    write_text(&dir.join("hv_by_size.svg"), &hv_by_size_svg(&report))?;

    for s in &report.summaries {
        let fmt = |v: Option<f64>| match v {
            Some(v) => format!("{v:+.2}%"),
            None => "undefined".into(),
        };
        println!(
            "size {}: {} cells with a defined rate, median improvement {}, mean {}",
            s.size,
            s.defined_cells,
            fmt(s.median_improvement_pct),
            fmt(s.mean_improvement_pct)
        );
    }
    Ok(())
}

/// Per-size median hypervolume of each method, as grouped bars.
fn hv_by_size_svg(report: &BenchmarkReport) -> String {
    let groups: Vec<(String, Option<f64>, Option<f64>)> = report
        .config
        .sizes
        .iter()
        .map(|&size| {
            let column = |pick: fn(&crate::experiments::BenchmarkCell) -> f64| {
                let mut values: Vec<f64> = report
                    .cells
                    .iter()
                    .filter(|c| c.size == size)
                    .map(pick)
                    .collect();
                values.sort_by(f64::total_cmp);
                (!values.is_empty()).then(|| crate::experiments::median(&values))
            };
            (
                size.to_string(),
                column(|c| c.separation_hv),
                column(|c| c.monolithic_hv),
            )
        })
        .collect();
    paired_bars_svg(
        &groups,
        ("separation-sa", "non-separation"),
        "instance size (tasks)",
        "median hypervolume",
    )
}

fn cmd_robustness(config: &RunConfig) -> Result<(), CliError> {
    let robustness = RobustnessConfig {
        size: config.robustness_size,
        num_instances: config.robustness_instances,
        master_seed: config.master_seed,
        separation: SeparationConfig {
            sa: config.sa.clone(),
            budget_seconds: config.budget_seconds,
            penalties: config.penalties,
        },
        generator: config.generator.clone(),
    };
    let report = run_robustness(&robustness)?;

    let dir = out_dir(config)?;
    write_text(&dir.join("robustness.csv"), &report.to_csv())?;
    write_text(&dir.join("robustness.json"), &report.to_json())?;
    let groups: Vec<(String, Option<f64>, Option<f64>)> = report
        .rows
        .iter()
        .map(|r| {
            (
                r.instance_index.to_string(),
                Some(r.hv_before),
                Some(r.hv_after),
            )
        })
        .collect();
    write_text(
        &dir.join("robustness.svg"),
        &paired_bars_svg(&groups, ("before", "after"), "instance", "hypervolume"),
    )?;

    println!(
        "hypervolume did not increase after perturbation in {:.1}% of {} instances",
        report.non_increase_rate * 100.0,
        report.rows.len()
    );
    Ok(())
}

fn cmd_validate(instances: &[PathBuf]) -> Result<(), CliError> {
    let mut first_error: Option<CliError> = None;
    for path in instances {
        match load_instance(path) {
            Ok(inst) => println!(
                "ok: {} label={} tasks={}",
                path.display(),
                inst.label,
                inst.num_tasks()
            ),
            Err(e) => {
                println!("invalid: {}: {e}", path.display());
                first_error.get_or_insert(e.into());
            }
        }
    }
    match first_error {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> i32 {
        run_with_args(args.iter().map(|s| s.to_string()))
    }

    #[test]
    fn generate_is_deterministic_and_validates() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(
            run(&["castplan", "generate", "--size", "5", "--count", "2", "--seed", "42", "--out", out]),
            EXIT_OK
        );
        let first = fs::read_to_string(dir.path().join("inst_s5_i0.json")).unwrap();
        assert_eq!(
            run(&["castplan", "generate", "--size", "5", "--count", "2", "--seed", "42", "--out", out]),
            EXIT_OK
        );
        let second = fs::read_to_string(dir.path().join("inst_s5_i0.json")).unwrap();
        assert_eq!(first, second);

        let inst = dir.path().join("inst_s5_i1.json");
        assert_eq!(
            run(&["castplan", "validate", "--instance", inst.to_str().unwrap()]),
            EXIT_OK
        );
    }

    #[test]
    fn zero_size_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(
            run(&["castplan", "generate", "--size", "0", "--out", out]),
            EXIT_USAGE
        );
    }

    #[test]
    fn unknown_method_is_a_usage_error() {
        assert_eq!(
            run(&["castplan", "solve", "--instance", "x.json", "--method", "mystery"]),
            EXIT_USAGE
        );
    }

    #[test]
    fn import_without_samples_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(
            run(&["castplan", "generate", "--size", "3", "--count", "1", "--out", out]),
            EXIT_OK
        );
        let inst = dir.path().join("inst_s3_i0.json");
        assert_eq!(
            run(&[
                "castplan",
                "solve",
                "--instance",
                inst.to_str().unwrap(),
                "--method",
                "separation-import",
                "--out",
                out,
            ]),
            EXIT_USAGE
        );
    }

    #[test]
    fn missing_instance_file_is_an_io_error() {
        assert_eq!(
            run(&["castplan", "validate", "--instance", "/nonexistent/inst.json"]),
            EXIT_IO
        );
    }

    #[test]
    fn corrupt_instance_file_is_a_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("broken.json");
        fs::write(&path, "{ not json").unwrap();
        assert_eq!(
            run(&["castplan", "validate", "--instance", path.to_str().unwrap()]),
            EXIT_USAGE
        );
    }

    #[test]
    fn solve_and_compare_produce_reports() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(
            run(&["castplan", "generate", "--size", "4", "--count", "1", "--seed", "7", "--out", out]),
            EXIT_OK
        );
        let inst = dir.path().join("inst_s4_i0.json");
        let config = dir.path().join("config.json");
        fs::write(
            &config,
            r#"{ "budget_seconds": 0.05, "sa": { "num_reads": 60, "sweeps_per_read": 40, "beta_range": null, "master_seed": 0 } }"#,
        )
        .unwrap();

        for method in ["separation-sa", "non-separation"] {
            assert_eq!(
                run(&[
                    "castplan",
                    "solve",
                    "--instance",
                    inst.to_str().unwrap(),
                    "--method",
                    method,
                    "--config",
                    config.to_str().unwrap(),
                    "--seed",
                    "7",
                    "--out",
                    out,
                ]),
                EXIT_OK
            );
            assert!(dir.path().join(format!("inst_s4_i0.{method}.pool.json")).exists());
            assert!(dir.path().join(format!("inst_s4_i0.{method}.front.csv")).exists());
        }

        let sep = dir.path().join("inst_s4_i0.separation-sa.pool.json");
        let mono = dir.path().join("inst_s4_i0.non-separation.pool.json");
        assert_eq!(
            run(&[
                "castplan",
                "compare",
                "--pools",
                sep.to_str().unwrap(),
                mono.to_str().unwrap(),
                "--out",
                out,
            ]),
            EXIT_OK
        );
        for name in ["comparison.csv", "comparison.json", "fronts.svg"] {
            assert!(dir.path().join(name).exists());
        }
        let csv = fs::read_to_string(dir.path().join("comparison.csv")).unwrap();
        assert!(csv.starts_with("# config: {"));
        assert!(csv.contains("method,filling_ratio,lead_time,normalized_utility"));

        let parsed: PoolFile =
            serde_json::from_str(&fs::read_to_string(&sep).unwrap()).unwrap();
        assert_eq!(parsed.method, "separation-sa");
        assert!(!parsed.entries.is_empty());
    }

    #[test]
    fn empty_pool_exits_with_the_empty_code() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(
            run(&["castplan", "generate", "--size", "3", "--count", "1", "--out", out]),
            EXIT_OK
        );
        let inst = dir.path().join("inst_s3_i0.json");
        // A budget too small to run a single read leaves the pool empty;
        // artifacts are still written.
        let config = dir.path().join("config.json");
        fs::write(&config, r#"{ "budget_seconds": 1e-9 }"#).unwrap();
        assert_eq!(
            run(&[
                "castplan",
                "solve",
                "--instance",
                inst.to_str().unwrap(),
                "--method",
                "separation-sa",
                "--config",
                config.to_str().unwrap(),
                "--out",
                out,
            ]),
            EXIT_EMPTY
        );
        assert!(dir
            .path()
            .join("inst_s3_i0.separation-sa.pool.json")
            .exists());
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        fs::write(&path, r#"{ "master_seed": 7, "out_dir": "elsewhere" }"#).unwrap();
        let cli = Cli::try_parse_from([
            "castplan",
            "benchmark",
            "--config",
            path.to_str().unwrap(),
            "--seed",
            "9",
        ])
        .unwrap();
        let config = resolve_config(&cli).unwrap();
        assert_eq!(config.master_seed, 9);
        assert_eq!(config.out_dir, "elsewhere");
        assert_eq!(config.weight_steps, RunConfig::default().weight_steps);
    }

    #[test]
    fn unknown_config_fields_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("config.json");
        fs::write(&path, r#"{ "master_sede": 7 }"#).unwrap();
        let cli =
            Cli::try_parse_from(["castplan", "benchmark", "--config", path.to_str().unwrap()])
                .unwrap();
        assert!(matches!(resolve_config(&cli), Err(CliError::Usage(_))));
    }

    #[test]
    fn help_exits_cleanly() {
        assert_eq!(run(&["castplan", "--help"]), EXIT_OK);
    }
}
