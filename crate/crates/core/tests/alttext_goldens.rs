mod common;

use std::path::Path;

#[test]
fn alt_texts_match_goldens() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/alttext");
    if let Err(e) = common::golden_alt_texts(&dir) {
        panic!("{e}");
    }
}
