//! The whole pipeline on one instance: generate, solve with both methods
//! under the same virtual-time budget, compare fronts, and render the plots
//! the benchmark reports are built from.

use castplan::annealer::SaConfig;
use castplan::experiments::{run_separation, SeparationConfig};
use castplan::instance::{generate_instance, GeneratorParams};
use castplan::metrics::{compare_fronts, MethodFront};
use castplan::monolithic::{solve_monolithic, MonolithicConfig};
use castplan::plot::front_svg;

fn main() {
    let params = GeneratorParams {
        num_tasks: 6,
        label: "pipeline-demo".into(),
        ..GeneratorParams::default()
    };
    let inst = generate_instance(&params, 42).expect("parameters are valid");

    let budget_seconds = 0.1;
    let separation = run_separation(
        &inst,
        &SeparationConfig {
            sa: SaConfig {
                num_reads: 500,
                sweeps_per_read: 100,
                beta_range: None,
                master_seed: 42,
            },
            budget_seconds,
            penalties: None,
        },
    )
    .expect("separation run succeeds");
    println!(
        "separation-sa: {} of {} reads within budget, {} feasible, {} unique plans",
        separation.stats.reads_executed,
        separation.stats.reads_requested,
        separation.stats.feasible,
        separation.pool.len()
    );

    let monolithic = solve_monolithic(
        &inst,
        &MonolithicConfig {
            weight_steps: 11,
            budget_seconds,
        },
    )
    .expect("config is valid");
    println!(
        "non-separation: {} nodes, exhausted: {}, {} plans",
        monolithic.stats.nodes,
        monolithic.stats.exhausted,
        monolithic.pool.len()
    );

    let fronts = [
        MethodFront {
            method: "separation-sa".into(),
            points: separation.pool.entries().iter().map(|e| e.kpi).collect(),
        },
        MethodFront {
            method: "non-separation".into(),
            points: monolithic.pool.entries().iter().map(|e| e.kpi).collect(),
        },
    ];
    let cmp = compare_fronts(&fronts).expect("two fronts supplied");
    for row in &cmp.methods {
        match row.improvement_pct {
            Some(pct) => println!(
                "{}: hv {:.4} ({:+.1}% vs baseline)",
                row.method, row.hypervolume, pct
            ),
            None => println!("{}: hv {:.4} (baseline)", row.method, row.hypervolume),
        }
    }

    let dir = std::env::temp_dir().join("castplan-full-pipeline");
    std::fs::create_dir_all(&dir).expect("temp dir is writable");
    let svg_path = dir.join("fronts.svg");
    std::fs::write(&svg_path, front_svg(&fronts, cmp.lead_max)).expect("svg writes");
    let csv_path = dir.join("comparison.csv");
    std::fs::write(&csv_path, cmp.to_csv()).expect("csv writes");
    println!("wrote {}", svg_path.display());
    println!("wrote {}", csv_path.display());
}
