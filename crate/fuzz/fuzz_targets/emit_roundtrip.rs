#![no_main]

use libfuzzer_sys::fuzz_target;
use qrel::format::{emit, parse};

fuzz_target!(|data: &[u8]| {
    let Ok(doc) = parse(data) else { return };
    let text = emit(&doc);
    let again = parse(text.as_bytes()).expect("emitted document parses");
    assert_eq!(again, doc);
    assert_eq!(emit(&again), text);
});
