//! Feature-tensor codec for split inference.
//!
//! The encoder turns a group of `C×H×W` feature tensors into a self-describing
//! `FCMB` byte stream: statistics capture, an optional transform, channel
//! pruning signalled by lexicographic combinatorial rank, tiling into a 2D
//! frame, n-bit conversion and a pluggable inner frame codec. The decoder
//! reverses each stage and re-imposes the transmitted global statistics.
//!
//! ```
//! use fcm_core::{fcm_decode, fcm_encode, EncoderConfig, FeatureTensor, TensorGroup};
//!
//! let t = FeatureTensor::new(4, 8, 8, (0..256).map(|v| (v as f32).sin()).collect()).unwrap();
//! let group = TensorGroup::unlabeled(vec![t]).unwrap();
//! let stream = fcm_encode(&group, &EncoderConfig::default()).unwrap();
//! let decoded = fcm_decode(&stream).unwrap();
//! assert_eq!(decoded.tensors().next().unwrap().shape(), (4, 8, 8));
//! ```
//!
//! The crate also carries the pixel-domain [`vcm`] tools and the
//! [`metrics`] used to compare rate-quality curves.

pub mod bitstream;
mod bytes;
pub mod channel;
pub mod codec;
pub mod container;
pub mod conversion;
pub mod error;
pub mod frame;
pub mod lcr;
pub mod metrics;
pub mod packing;
pub mod pipeline;
pub mod tensor;
pub mod transform;
pub mod vcm;

pub use bitstream::{
    parse_stream, parse_unit, serialize_stream, serialize_unit, BitstreamUnit, UnitHeader,
};
pub use channel::{prune_channels, restore_channels, score_channels, select_pruned, PruneDecision};
pub use codec::{codec_decode, codec_encode, CodecId, CodecRegistry, EncodedPayload, InnerCodec};
pub use container::{read_tensor_file, write_tensor_file};
pub use conversion::{dequantize_frame, quantize_frame, ConversionParams};
pub use error::{CodecError, Error, ErrorKind, FormatError, LcrError, Result};
pub use frame::{Frame2D, RealFrame, SampleFrame};
pub use lcr::{binomial, lcr_decode, lcr_encode, ChannelIndexSet, LcrCode};
pub use metrics::{bd_rate, psnr, RdCurve, RdPoint};
pub use packing::{pack, unpack, PackingLayout};
pub use pipeline::{
    fcm_decode, fcm_decode_detailed, fcm_encode, DecodedUnit, EncoderConfig, Toolset,
};
pub use tensor::{apply_refinement, compute_global_stats, FeatureTensor, GlobalStats, TensorGroup};
pub use transform::{FeatureTransform, TransformId};
