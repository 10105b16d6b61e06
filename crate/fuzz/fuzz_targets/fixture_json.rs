#![no_main]
use borcherds::fixtures::FixtureSet;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        let _ = FixtureSet::from_json(text);
    }
});
