//! Generates a seeded instance and reports how much the closure prunes.
//!
//! cargo run --release --example generate -- 7

use cudf_upgrade::generator::{generate_instance, GenParams};
use cudf_upgrade::solver::{build_problem, encoding_size};
use cudf_upgrade::{compute_closure, full_scope, CriteriaSeq};

fn main() {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(7);
    let params = GenParams {
        seed,
        packages: 1000,
        dep_density: 0.3,
        install_ratio: 0.05,
        request_size: 5,
        ..GenParams::default()
    };
    let doc = generate_instance(&params);
    let criteria = CriteriaSeq::paranoid();
    let closure = compute_closure(&doc, &criteria);
    println!(
        "seed {seed}: universe={} out={} closure={} feasible={}",
        doc.packages().len(),
        closure.out.len(),
        closure.closure.len(),
        closure.feasible
    );
    if !closure.feasible {
        return;
    }
    for (label, scope) in [("closure", closure), ("full", full_scope(&doc))] {
        let problem = build_problem(&doc, &criteria, &scope).expect("feasible scope");
        let (vars, clauses) = encoding_size(&problem);
        println!("  {label}: {vars} variables, {clauses} clauses");
    }
}
