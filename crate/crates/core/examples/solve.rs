//! Solves the sample under a criteria string given on the command line.
//!
//! cargo run --example solve -- -removed,-changed

use cudf_upgrade::{parse_criteria, parse_document, render_solution, solve, Limits, SolveOutcome};

const SAMPLE: &str = include_str!("../data/sample.cudf");

fn main() {
    let spec = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "paranoid".to_string());
    let criteria = parse_criteria(&spec).expect("valid criteria");
    let doc = parse_document(SAMPLE).expect("sample parses");
    match solve(&doc, &criteria, &Limits::default()) {
        SolveOutcome::Optimal(sol) => {
            println!("objective: {}", sol.objective);
            print!("{}", render_solution(&sol.installed));
        }
        SolveOutcome::TimedOut(best) => {
            println!(
                "timed out, incumbent: {:?}",
                best.map(|s| s.objective.to_string())
            );
        }
        SolveOutcome::Unsat => println!("FAIL"),
    }
}
