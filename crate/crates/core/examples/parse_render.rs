//! Parses the sample document, prints a summary and renders it back.

use cudf_upgrade::{parse_document, render_document};

const SAMPLE: &str = include_str!("../data/sample.cudf");

fn main() {
    let doc = parse_document(SAMPLE).expect("sample parses");
    println!(
        "{} packages, {} names",
        doc.packages().len(),
        doc.names().count()
    );
    for pkg in doc.packages().iter().filter(|p| p.installed) {
        println!("installed: ({},{})", pkg.id.name, pkg.id.version);
    }
    let text = render_document(&doc);
    assert_eq!(parse_document(&text).expect("rendering parses"), doc);
    print!("{text}");
}
