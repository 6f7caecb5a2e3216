//! Compiles a small instance into a QUBO, inspects the model, and shows how
//! the penalty terms separate feasible from infeasible assignments.

use castplan::annealer::brute_force_solve;
use castplan::instance::{generate_instance, GeneratorParams};
use castplan::qubo::{build_qubo, decode, default_penalties};

fn main() {
    let params = GeneratorParams {
        num_tasks: 3,
        label: "qubo-demo".into(),
        ..GeneratorParams::default()
    };
    let inst = generate_instance(&params, 11).expect("parameters are valid");
    let penalties = default_penalties(&inst);
    println!(
        "penalties: deadline {:.6}, one-hot {:.3}, capacity {:.6}, xy {:.3}, alpha {}",
        penalties.lambda_deadline,
        penalties.lambda_one_hot,
        penalties.lambda_capacity,
        penalties.lambda_xy,
        penalties.alpha
    );

    let model = build_qubo(&inst, &penalties).expect("penalties are valid");
    println!(
        "{} variables ({} assignment bits), {} nonzero terms, offset {:.3}",
        model.n_vars(),
        model.map().num_assign_vars(),
        model.n_terms(),
        model.offset()
    );

    // All-zeros leaves every task unassigned; each one-hot group pays its
    // full penalty, so the energy sits far above the constant offset.
    let zeros = vec![false; model.n_vars()];
    println!("energy of all-zeros: {:.3}", model.energy(&zeros).unwrap());

    let (best, energy) = brute_force_solve(&model).expect("model is small");
    println!("ground state energy: {:.6}", energy);

    let (alloc, audit) = decode(&inst, model.map(), &best).expect("assignment fits the map");
    assert!(audit.feasible(), "default penalties make the optimum feasible");
    for batch in &alloc.batches {
        println!(
            "batch (cluster {}, resource {}, copy {}): tasks {:?}, load {}",
            batch.cluster, batch.resource, batch.copy, batch.tasks, batch.load
        );
    }
}
