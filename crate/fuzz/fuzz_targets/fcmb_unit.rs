#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((header, payload, used)) = fcm_core::parse_unit(data) {
        assert!(used <= data.len());
        // whatever parses must serialize back to the bytes it came from
        let again = fcm_core::serialize_unit(&header, &payload).unwrap();
        assert_eq!(again, &data[..used]);
    }
});
