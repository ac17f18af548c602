#![no_main]

use std::path::Path;

use libfuzzer_sys::fuzz_target;

// NUL-separated argv; the first field stands in for QREL_TOL.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let mut fields = text.split('\0');
    let env_tol = fields.next().filter(|s| !s.is_empty());
    let args: Vec<&str> = std::iter::once("qrel").chain(fields).collect();
    // keep the target hermetic and cheap: no real files, small dimensions
    if args.iter().any(|a| Path::new(a).exists()) {
        return;
    }
    if args.windows(2).any(|w| w[0] == "--dim" && w[1].parse::<usize>().map_or(false, |d| d > 8)) {
        return;
    }
    let out = qrel::cli::run(args, env_tol);
    assert!(matches!(out.code, 0..=3));
    if out.code != 0 {
        let v: serde_json::Value = serde_json::from_str(&out.stdout).expect("error envelope is JSON");
        assert_eq!(v["ok"], false);
    }
});
