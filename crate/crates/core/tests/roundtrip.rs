mod common;

use common::{arb_document, SAMPLE};
use cudf_upgrade::parser::{parse_bytes, ParseErrorKind};
use cudf_upgrade::{parse_document, render_document};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn render_then_parse_is_identity(doc in arb_document()) {
        let text = render_document(&doc);
        prop_assert_eq!(parse_document(&text).unwrap(), doc);
    }

    #[test]
    fn arbitrary_bytes_never_panic(bytes in prop::collection::vec(any::<u8>(), 0..512)) {
        let _ = parse_bytes(&bytes);
    }

    #[test]
    fn mutated_sample_never_panics(
        cut in 0..SAMPLE.len(),
        insert in "[a-z:<>=!|, \n\t0-9-]{0,12}",
    ) {
        let mut text = SAMPLE.as_bytes().to_vec();
        text.splice(cut..cut, insert.bytes());
        if let Err(err) = parse_bytes(&text) {
            prop_assert!(err.line >= 1);
        }
    }
}

#[test]
fn layout_variants_parse_alike() {
    let reference = parse_document(SAMPLE).unwrap();
    let crlf = SAMPLE.replace('\n', "\r\n");
    assert_eq!(parse_document(&crlf).unwrap(), reference);
    let packed: String = SAMPLE
        .lines()
        .filter(|l| !l.is_empty())
        .map(|l| format!("{l}\n"))
        .collect();
    assert_eq!(parse_document(&packed).unwrap(), reference);
    assert_eq!(
        parse_document(&render_document(&reference)).unwrap(),
        reference
    );
}

#[test]
fn errors_carry_kind_and_line() {
    let err = parse_document("package: a\nversion: 0\n").unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::BadVersion);
    assert_eq!(err.line, 2);
    let err = parse_document("package: a\nversion: 1\ndepends: b => 2\n").unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::BadOperator);
    assert_eq!(err.line, 3);
    let err = parse_bytes(b"package: a\n\xff\n").unwrap_err();
    assert_eq!(err.kind, ParseErrorKind::Syntax);
    assert_eq!(err.line, 2);
}
