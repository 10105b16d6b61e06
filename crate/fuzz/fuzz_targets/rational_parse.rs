#![no_main]
use borcherds::series::{format_rational, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(r) = parse_rational(text) {
            assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
        }
    }
});
