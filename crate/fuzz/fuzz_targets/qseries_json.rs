#![no_main]
use borcherds::QSeries;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(s) = QSeries::from_json(text) {
            let again = QSeries::from_json(&s.to_json()).expect("encoded series decodes");
            assert_eq!(again, s);
        }
    }
});
