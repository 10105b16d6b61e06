#![no_main]
use borcherds_cli::parse_coefficient_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(list) = parse_coefficient_list(text) {
            let joined = list.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
            assert_eq!(parse_coefficient_list(&joined).unwrap(), list);
        }
    }
});
