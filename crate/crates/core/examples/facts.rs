//! Prints the logical facts for the sample under the trendy criteria.

use cudf_upgrade::{compute_closure, generate, parse_document, render_facts, CriteriaSeq};

const SAMPLE: &str = include_str!("../data/sample.cudf");

fn main() {
    let doc = parse_document(SAMPLE).expect("sample parses");
    let criteria = CriteriaSeq::trendy();
    let closure = compute_closure(&doc, &criteria);
    let facts = generate(&doc, &criteria, &closure).expect("sample is feasible");
    print!("{}", render_facts(&facts));
}
