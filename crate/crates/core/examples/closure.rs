//! Computes the excluded set and the relevance closure for both criteria
//! presets.

use cudf_upgrade::{compute_closure, parse_document, CriteriaSeq};

const SAMPLE: &str = include_str!("../data/sample.cudf");

fn main() {
    let doc = parse_document(SAMPLE).expect("sample parses");
    for (label, criteria) in [
        ("paranoid", CriteriaSeq::paranoid()),
        ("trendy", CriteriaSeq::trendy()),
    ] {
        let result = compute_closure(&doc, &criteria);
        println!(
            "{label}: feasible={} iterations={}",
            result.feasible, result.iterations
        );
        let show = |set: &std::collections::BTreeSet<cudf_upgrade::PackageId>| {
            set.iter()
                .map(|p| format!("({},{})", p.name, p.version))
                .collect::<Vec<_>>()
                .join(" ")
        };
        println!("  out:     {}", show(&result.out));
        println!("  closure: {}", show(&result.closure));
    }
}
