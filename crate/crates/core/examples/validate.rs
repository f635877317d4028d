//! Checks two proposed installations of the sample and scores the valid one.

use std::collections::BTreeSet;

use cudf_upgrade::{evaluate, parse_document, validate_solution, CriteriaSeq, PackageId};

const SAMPLE: &str = include_str!("../data/sample.cudf");

fn main() {
    let doc = parse_document(SAMPLE).expect("sample parses");
    let proposals: [&[(&str, u64)]; 2] = [
        &[("avail", 1), ("conf", 2), ("dep", 1), ("inst", 1)],
        &[("inst", 3), ("conf", 2)],
    ];
    for pairs in proposals {
        let installation: BTreeSet<PackageId> =
            pairs.iter().map(|&(n, v)| PackageId::new(n, v)).collect();
        let report = validate_solution(&doc, &installation);
        println!("{pairs:?}");
        if report.ok {
            println!(
                "  OK, paranoid: {}",
                evaluate(&doc, &installation, &CriteriaSeq::paranoid())
            );
        }
        for v in &report.violations {
            println!("  {v}");
        }
    }
}
