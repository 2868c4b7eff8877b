#![no_main]

use libfuzzer_sys::fuzz_target;
use monoint::formats::parse_tuple_json;
use monoint::wn::wn_member;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(t) = parse_tuple_json(s) {
        let verdict = wn_member(&t);
        assert_eq!(verdict.is_err(), t.n() > 3);
    }
});
