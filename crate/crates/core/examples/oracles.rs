//! Cross-checks the CDCL solver against branch and bound and exhaustive
//! search on small generated instances.

use cudf_upgrade::generator::{generate_instance, GenParams};
use cudf_upgrade::solver::{branch_and_bound, brute_force, build_problem, BRUTE_FORCE_LIMIT};
use cudf_upgrade::{full_scope, solve, CriteriaSeq, Limits, SolveOutcome};

fn objective(outcome: &SolveOutcome) -> String {
    outcome
        .solution()
        .map_or_else(|| "FAIL".to_string(), |s| s.objective.to_string())
}

fn main() {
    let criteria = CriteriaSeq::trendy();
    for seed in 0..10 {
        let doc = generate_instance(&GenParams {
            seed,
            packages: 8,
            ..GenParams::default()
        });
        let scope = full_scope(&doc);
        assert!(scope.closure.len() <= BRUTE_FORCE_LIMIT);
        let cdcl = solve(&doc, &criteria, &Limits::unlimited());
        let bnb = match build_problem(&doc, &criteria, &scope) {
            Ok(problem) => branch_and_bound(&problem, &Limits::unlimited()),
            Err(_) => SolveOutcome::Unsat,
        };
        let brute = brute_force(&doc, &criteria, &scope.closure).expect("small scope");
        let agree = objective(&cdcl) == objective(&bnb) && objective(&bnb) == objective(&brute);
        println!(
            "seed {seed}: {} {}",
            objective(&cdcl),
            if agree { "agree" } else { "DISAGREE" }
        );
    }
}
