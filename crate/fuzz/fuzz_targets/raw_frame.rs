#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let _ = fcm_core::codec::raw_frame::read_raw_frames(data);
});
