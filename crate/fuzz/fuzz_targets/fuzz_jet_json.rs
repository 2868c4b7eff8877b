#![no_main]

use libfuzzer_sys::fuzz_target;
use monoint::formats::parse_jets_json;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(jets) = parse_jets_json(s) {
        assert!(jets.left.is_valid() && jets.right.is_valid());
        let text = serde_json::to_string(&jets).unwrap();
        assert_eq!(parse_jets_json(&text).unwrap(), jets);
    }
});
