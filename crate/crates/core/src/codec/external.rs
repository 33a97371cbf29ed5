//! Adapter for inner codecs implemented by external programs.
//!
//! The encoder command receives the frame on stdin in the planar raw-frame
//! format and writes the payload to stdout. The decoder command receives the
//! payload on stdin and writes a raw frame to stdout. Both see `FCM_QP`,
//! `FCM_BIT_DEPTH`, `FCM_WIDTH` and `FCM_HEIGHT` in their environment.

use std::io::{Read, Write};
use std::process::{Command, Stdio};

use super::raw_frame::{encode_raw_frame, read_raw_frame};
use super::{CodecId, InnerCodec};
use crate::error::CodecError;
use crate::frame::SampleFrame;

#[derive(Debug, Clone)]
pub struct ExternalCodec {
    id: CodecId,
    name: String,
    encoder: Vec<String>,
    decoder: Vec<String>,
}

impl ExternalCodec {
    /// `id` must be one of the reserved external ids (2..=255).
    pub fn new(
        id: CodecId,
        name: impl Into<String>,
        encoder: Vec<String>,
        decoder: Vec<String>,
    ) -> Result<Self, CodecError> {
        if id.is_builtin() {
            return Err(CodecError::External(format!(
                "codec id {} is reserved",
                id.0
            )));
        }
        if encoder.is_empty() || decoder.is_empty() {
            return Err(CodecError::External("empty command line".into()));
        }
        Ok(Self {
            id,
            name: name.into(),
            encoder,
            decoder,
        })
    }

    fn run(
        &self,
        argv: &[String],
        input: Vec<u8>,
        env: [(&str, String); 4],
    ) -> Result<Vec<u8>, CodecError> {
        let mut child = Command::new(&argv[0])
            .args(&argv[1..])
            .envs(env)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| CodecError::External(format!("spawning {}: {e}", argv[0])))?;
        let mut stdin = child.stdin.take().expect("stdin is piped");
        let writer = std::thread::spawn(move || stdin.write_all(&input));
        let mut out = Vec::new();
        child
            .stdout
            .take()
            .expect("stdout is piped")
            .read_to_end(&mut out)
            .map_err(|e| CodecError::External(e.to_string()))?;
        let status = child
            .wait()
            .map_err(|e| CodecError::External(e.to_string()))?;
        writer
            .join()
            .map_err(|_| CodecError::External("stdin writer panicked".into()))?
            .map_err(|e| CodecError::External(format!("writing to {}: {e}", argv[0])))?;
        if !status.success() {
            return Err(CodecError::External(format!(
                "{} exited with {status}",
                argv[0]
            )));
        }
        Ok(out)
    }
}

fn env(qp: u8, bit_depth: u8, height: usize, width: usize) -> [(&'static str, String); 4] {
    [
        ("FCM_QP", qp.to_string()),
        ("FCM_BIT_DEPTH", bit_depth.to_string()),
        ("FCM_WIDTH", width.to_string()),
        ("FCM_HEIGHT", height.to_string()),
    ]
}

impl InnerCodec for ExternalCodec {
    fn id(&self) -> CodecId {
        self.id
    }

    fn name(&self) -> &str {
        &self.name
    }

    fn encode(&self, frame: &SampleFrame, bit_depth: u8, qp: u8) -> Result<Vec<u8>, CodecError> {
        let env = env(qp, bit_depth, frame.height(), frame.width());
        self.run(&self.encoder, encode_raw_frame(frame, bit_depth), env)
    }

    fn decode(
        &self,
        payload: &[u8],
        height: usize,
        width: usize,
        bit_depth: u8,
        qp: u8,
    ) -> Result<SampleFrame, CodecError> {
        let out = self.run(
            &self.decoder,
            payload.to_vec(),
            env(qp, bit_depth, height, width),
        )?;
        let (frame, depth, used) = read_raw_frame(&out)
            .map_err(|e| CodecError::External(format!("decoder output: {e}")))?;
        if used != out.len() || depth != bit_depth || frame.dims() != (height, width) {
            return Err(CodecError::External(
                "decoder output does not match the expected frame".into(),
            ));
        }
        Ok(frame)
    }
}
