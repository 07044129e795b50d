#![no_main]

use dlevo_core::{parse_kb, serialize_kb};
use libfuzzer_sys::fuzz_target;

// serialize(parse(x)) must parse back to itself
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(kb) = parse_kb(text) else { return };
    let once = serialize_kb(&kb);
    let again = parse_kb(&once).expect("serialized KB does not parse");
    assert_eq!(once, serialize_kb(&again));
});
