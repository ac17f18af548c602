#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(doc) = qrel::format::parse(data) {
        let tol = qrel::Tolerance::default();
        // every accessor must fail cleanly on the wrong kind
        let _ = doc.to_matrix();
        let _ = doc.to_space(tol);
        let _ = doc.to_algebra(tol);
        let _ = doc.to_channel(tol);
        let _ = doc.to_projection(tol);
        let _ = doc.to_classical();
    }
});
