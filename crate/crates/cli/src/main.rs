//! `fcm` command-line front end.

mod report;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fcm_core::codec::raw_frame::{read_raw_frames, write_raw_frame};
use fcm_core::metrics::{bd_rate, RdCurve, RdPoint};
use fcm_core::pipeline::parse_units;
use fcm_core::vcm::{
    bitdepth_restore, bitdepth_truncate, temporal_resample_scalar, temporal_restore, PixelSequence,
    TemporalSideInfo,
};
use fcm_core::{
    fcm_decode, fcm_encode, read_tensor_file, write_tensor_file, CodecId, EncoderConfig, ErrorKind,
    TransformId,
};

const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_DOMAIN: u8 = 4;

/// Raw frame files carry no timing; sequences are handled at a nominal rate.
const NOMINAL_FPS: f64 = 30.0;

#[derive(Debug)]
struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn parse(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }

    fn domain(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DOMAIN,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<fcm_core::Error> for CliError {
    fn from(e: fcm_core::Error) -> Self {
        let code = match e.kind() {
            ErrorKind::Config => EXIT_USAGE,
            ErrorKind::Parse | ErrorKind::Io => EXIT_PARSE,
            ErrorKind::Domain => EXIT_DOMAIN,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<fcm_core::FormatError> for CliError {
    fn from(e: fcm_core::FormatError) -> Self {
        fcm_core::Error::from(e).into()
    }
}

type CliResult<T = ()> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "fcm", version, about = "Feature-tensor codec tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode an FTNS tensor file into an FCMB stream
    Encode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        encoder: EncoderFlags,
    },
    /// Decode an FCMB stream into an FTNS tensor file
    Decode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Encode and decode in memory and write a JSON quality report
    Roundtrip {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        encoder: EncoderFlags,
        #[arg(long)]
        report: PathBuf,
    },
    /// Print every header field of an FCMB stream, one unit per line
    Inspect {
        #[arg(long)]
        input: PathBuf,
    },
    /// BD-rate of a test RD curve against an anchor (CSV: rate_kbps,quality)
    Bdrate {
        #[arg(long)]
        anchor: PathBuf,
        #[arg(long)]
        test: PathBuf,
    },
    /// Drop least significant bits of every sample
    VcmTruncate {
        #[command(flatten)]
        io: SequenceIo,
        #[arg(long)]
        shift: u8,
    },
    /// Scale samples back up after truncation
    VcmRestore {
        #[command(flatten)]
        io: SequenceIo,
        #[arg(long)]
        shift: u8,
    },
    /// Keep every ratio-th frame and write the side information
    VcmTsample {
        #[command(flatten)]
        io: SequenceIo,
        #[arg(long)]
        ratio: u8,
        #[arg(long)]
        side_info: PathBuf,
    },
    /// Re-create dropped frames from kept frames and side information
    VcmTrestore {
        #[command(flatten)]
        io: SequenceIo,
        #[arg(long)]
        side_info: PathBuf,
    },
}

#[derive(Args)]
struct SequenceIo {
    /// Raw frame sequence
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum CodecArg {
    Raw,
    Dct,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformArg {
    Identity,
    Pool2,
}

#[derive(Args)]
struct EncoderFlags {
    /// Fraction of channels to prune, in [0, 1)
    #[arg(long, default_value_t = 0.0)]
    prune_ratio: f64,
    #[arg(long, default_value_t = fcm_core::conversion::DEFAULT_BIT_DEPTH)]
    bit_depth: u8,
    #[arg(long, value_enum, default_value_t = CodecArg::Raw)]
    codec: CodecArg,
    #[arg(long, default_value_t = 22)]
    qp: u8,
    #[arg(long, value_enum, default_value_t = TransformArg::Identity)]
    transform: TransformArg,
}

impl EncoderFlags {
    fn config(&self) -> CliResult<EncoderConfig> {
        let cfg = EncoderConfig {
            prune_ratio: self.prune_ratio,
            bit_depth: self.bit_depth,
            codec: match self.codec {
                CodecArg::Raw => CodecId::RAW_LOSSLESS,
                CodecArg::Dct => CodecId::BLOCK_DCT,
            },
            qp: self.qp,
            transform: match self.transform {
                TransformArg::Identity => TransformId::IDENTITY,
                TransformArg::Pool2 => TransformId::MEAN_POOL_2X,
            },
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::parse(format!("reading {}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> CliResult {
    fs::write(path, bytes).map_err(|e| CliError::parse(format!("writing {}: {e}", path.display())))
}

fn read_sequence(path: &Path) -> CliResult<PixelSequence> {
    let frames = read_raw_frames(&read(path)?)?;
    let Some(&(_, depth)) = frames.first() else {
        return Err(CliError::domain(format!(
            "{} holds no frames",
            path.display()
        )));
    };
    if frames.iter().any(|&(_, d)| d != depth) {
        return Err(CliError::parse(format!(
            "{} mixes bit depths",
            path.display()
        )));
    }
    let frames = frames.into_iter().map(|(f, _)| f).collect();
    Ok(PixelSequence::new(frames, depth, NOMINAL_FPS)?)
}

fn write_sequence(path: &Path, s: &PixelSequence) -> CliResult {
    let mut out = Vec::new();
    for f in s.frames() {
        write_raw_frame(&mut out, f, s.bit_depth());
    }
    write(path, &out)
}

#[derive(serde::Deserialize)]
struct CsvPoint {
    rate_kbps: f64,
    quality: f64,
}

fn read_curve(path: &Path) -> CliResult<RdCurve> {
    let bad = |e: &dyn fmt::Display| CliError::parse(format!("{}: {e}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(&e))?;
    let headers = reader.headers().map_err(|e| bad(&e))?;
    for column in ["rate_kbps", "quality"] {
        if !headers.iter().any(|h| h == column) {
            return Err(bad(&format!("missing `{column}` column in header row")));
        }
    }
    let mut points = reader
        .deserialize::<CsvPoint>()
        .map(|row| {
            row.map(|p| RdPoint {
                rate: p.rate_kbps,
                quality: p.quality,
            })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| bad(&e))?;
    points.sort_by(|a, b| a.rate.total_cmp(&b.rate));
    RdCurve::new(points).map_err(|e| CliError::domain(format!("{}: {e}", path.display())))
}

fn inspect(path: &Path) -> CliResult {
    for (i, u) in parse_units(&read(path)?)?.iter().enumerate() {
        let h = &u.header;
        let l = &h.layout;
        let permutation = if l.permutation.is_empty() {
            "identity".to_owned()
        } else {
            l.permutation
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        println!(
            "unit={i} label={:?} channels={} pruned={} rank={} mu={} sigma={} mu_x={} sigma_x={} \
             bit_depth={} min={} max={} grid={}x{} tile={}x{} packed={} permutation={} \
             transform={} tensor={}x{} codec={} qp={} payload_bytes={}",
            h.label,
            h.original_channels,
            h.lcr.k,
            h.lcr.rank,
            h.transform_stats.mu,
            h.transform_stats.sigma,
            h.reduced_stats.mu,
            h.reduced_stats.sigma,
            h.conversion.bit_depth,
            h.conversion.min_val,
            h.conversion.max_val,
            l.grid_rows,
            l.grid_cols,
            l.tile_h,
            l.tile_w,
            l.channel_count,
            permutation,
            h.transform.0,
            h.tensor_height,
            h.tensor_width,
            h.codec,
            h.qp,
            u.payload.len(),
        );
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Encode {
            input,
            output,
            encoder,
        } => {
            let cfg = encoder.config()?;
            let group = read_tensor_file(&input)?;
            write(&output, &fcm_encode(&group, &cfg)?)
        }
        Command::Decode { input, output } => {
            let group = fcm_decode(&read(&input)?)?;
            write_tensor_file(&output, &group).map_err(CliError::from)
        }
        Command::Roundtrip {
            input,
            encoder,
            report,
        } => {
            let cfg = encoder.config()?;
            let group = read_tensor_file(&input)?;
            let stream = fcm_encode(&group, &cfg)?;
            let decoded = fcm_decode(&stream)?;
            let r = report::Report::new(&group, &decoded, stream.len())?;
            let json = serde_json::to_string_pretty(&r)
                .map_err(|e| CliError::domain(format!("serializing report: {e}")))?;
            write(&report, json.as_bytes())?;
            println!(
                "{} tensors, {} stream bytes",
                r.tensors.len(),
                r.stream_bytes
            );
            Ok(())
        }
        Command::Inspect { input } => inspect(&input),
        Command::Bdrate { anchor, test } => {
            let value = bd_rate(&read_curve(&anchor)?, &read_curve(&test)?)?;
            println!("{value:+.2}%");
            Ok(())
        }
        Command::VcmTruncate { io, shift } => write_sequence(
            &io.output,
            &bitdepth_truncate(&read_sequence(&io.input)?, shift)?,
        ),
        Command::VcmRestore { io, shift } => write_sequence(
            &io.output,
            &bitdepth_restore(&read_sequence(&io.input)?, shift)?,
        ),
        Command::VcmTsample {
            io,
            ratio,
            side_info,
        } => {
            let (kept, side) = temporal_resample_scalar(&read_sequence(&io.input)?, ratio)?;
            write_sequence(&io.output, &kept)?;
            write(&side_info, &side.to_bytes())
        }
        Command::VcmTrestore { io, side_info } => {
            let side = TemporalSideInfo::from_bytes(&read(&side_info)?)?;
            write_sequence(
                &io.output,
                &temporal_restore(&read_sequence(&io.input)?, &side)?,
            )
        }
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fcm: {e}");
            ExitCode::from(e.code)
        }
    }
}
