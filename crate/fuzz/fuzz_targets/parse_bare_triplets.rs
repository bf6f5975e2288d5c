#![no_main]

use fancl::linalg::{parse_bare_triplets, write_bare_triplets};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = parse_bare_triplets(data) {
        let mut out = Vec::new();
        write_bare_triplets(&mut out, &s).unwrap();
        let back = parse_bare_triplets(out.as_slice()).unwrap();
        assert_eq!(back, s);
    }
});
