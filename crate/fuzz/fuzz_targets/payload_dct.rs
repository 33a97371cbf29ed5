#![no_main]

use fcm_core::codec::MAX_QP;
use fcm_core::{codec_decode, CodecId, EncodedPayload};
use libfuzzer_sys::fuzz_target;

// height u8 | width u8 | qp u8 | bit depth u8 | payload
fuzz_target!(|data: &[u8]| {
    let Some((head, bytes)) = data.split_first_chunk::<4>() else {
        return;
    };
    let dims = (head[0].max(1) as usize, head[1].max(1) as usize);
    let payload = EncodedPayload {
        codec: CodecId::BLOCK_DCT,
        qp: head[2] % (MAX_QP + 1),
        bytes: bytes.to_vec(),
    };
    if let Ok(frame) = codec_decode(&payload, dims, head[3]) {
        assert_eq!(frame.dims(), dims);
    }
});
