#![no_main]

use libfuzzer_sys::fuzz_target;
use monoint::curve::{Curve, Integration};
use monoint::formats::parse_curve_json;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(curve) = parse_curve_json(s) else { return };
    // anything accepted must survive a round trip and basic use
    let again = Curve::from_json(&curve.to_json()).expect("re-parse of our own output");
    assert_eq!(curve, again);
    let [lo, hi] = curve.domain();
    for x in [lo, 0.5 * (lo + hi), hi] {
        let _ = curve.eval(x);
        let _ = curve.deriv(x);
    }
    let _ = curve.iterated_integral(hi, 2, Integration::Moments);
});
