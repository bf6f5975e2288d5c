#![no_main]

use fancl::linalg::{parse_matrix_market, write_matrix_market};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = parse_matrix_market(data) {
        let mut out = Vec::new();
        write_matrix_market(&mut out, &s).unwrap();
        let back = parse_matrix_market(out.as_slice()).unwrap();
        assert_eq!(back, s);
    }
});
