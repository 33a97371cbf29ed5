#![no_main]

use fcm_core::vcm::TemporalSideInfo;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(side) = TemporalSideInfo::from_bytes(data) {
        assert_eq!(side.to_bytes(), data);
    }
});
