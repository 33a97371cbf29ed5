#![no_main]

use fcm_core::container::{decode_tensor_group, encode_tensor_group};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(group) = decode_tensor_group(data) {
        assert_eq!(
            decode_tensor_group(&encode_tensor_group(&group)).unwrap(),
            group
        );
    }
});
