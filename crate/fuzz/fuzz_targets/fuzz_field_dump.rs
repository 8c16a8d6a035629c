#![no_main]

use libfuzzer_sys::fuzz_target;
use wavepax::io::decode_field;

fuzz_target!(|data: &[u8]| {
    let _ = decode_field(data);
});
