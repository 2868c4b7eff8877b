#![no_main]

use libfuzzer_sys::fuzz_target;
use monoint::formats::parse_number_list;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(xs) = parse_number_list(s) {
        assert!(!xs.is_empty() && xs.iter().all(|x| x.is_finite()));
        let joined = xs.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        assert_eq!(parse_number_list(&joined).unwrap(), xs);
    }
});
