#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(group) = fcm_core::fcm_decode(data) {
        assert!(!group.is_empty());
    }
});
