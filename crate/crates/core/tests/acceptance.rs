//! End-to-end acceptance gate. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fcm_core::codec::MAX_QP;
use fcm_core::container::decode_tensor_group;
use fcm_core::metrics::{bd_rate, RdCurve, RdPoint};
use fcm_core::pipeline::fcm_decode_detailed;
use fcm_core::vcm::{
    bitdepth_restore, bitdepth_truncate, temporal_resample_scalar, temporal_restore, PixelSequence,
};
use fcm_core::{
    codec_decode, codec_encode, compute_global_stats, fcm_decode, fcm_encode, lcr_decode,
    lcr_encode, ChannelIndexSet, CodecId, EncodedPayload, EncoderConfig, SampleFrame, TensorGroup,
    Toolset, TransformId,
};
use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use common::{random_group, random_tensor, rng, smooth_frame, smooth_tensor, stats_match};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// k-subsets of `0..n` in lexicographic order, built without any ranking.
fn lex_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn lcr_exhaustive() -> Outcome {
    let start = Instant::now();
    let mut cases = 0usize;
    for n in 0..=12 {
        for k in 0..=n {
            for (index, subset) in lex_subsets(n, k).into_iter().enumerate() {
                let set = ChannelIndexSet::new(subset.clone(), n).map_err(|e| e.to_string())?;
                let code = lcr_encode(&set);
                ensure(code.rank == BigUint::from(index), || {
                    format!(
                        "N={n} {subset:?}: rank {} vs enumeration {index}",
                        code.rank
                    )
                })?;
                let back = lcr_decode(&code, n).map_err(|e| e.to_string())?;
                ensure(back.indices() == subset.as_slice(), || {
                    format!("N={n} {subset:?} decoded to {:?}", back.indices())
                })?;
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("{cases} subsets in {elapsed:.2?}"))
}

fn lcr_worked_examples() -> Outcome {
    for (subset, want) in [([0usize, 2], 1u32), ([1, 3], 5)] {
        let set = ChannelIndexSet::new(subset.to_vec(), 5).map_err(|e| e.to_string())?;
        let code = lcr_encode(&set);
        ensure(code.rank == BigUint::from(want), || {
            format!("{subset:?}: rank {} expected {want}", code.rank)
        })?;
        let back = lcr_decode(&code, 5).map_err(|e| e.to_string())?;
        ensure(back.indices() == subset, || {
            format!("{subset:?} decoded to {:?}", back.indices())
        })?;
    }
    Ok("{0,2} -> 1, {1,3} -> 5".into())
}

fn lcr_bignum() -> Outcome {
    let mut r = rng(3);
    let all: Vec<usize> = (0..256).collect();
    let mut longest = 0;
    for _ in 0..100 {
        let mut subset: Vec<usize> = all.choose_multiple(&mut r, 128).copied().collect();
        subset.sort_unstable();
        let set = ChannelIndexSet::new(subset.clone(), 256).map_err(|e| e.to_string())?;
        let code = lcr_encode(&set);
        let bytes = code.rank.to_bytes_be().len();
        longest = longest.max(bytes);
        ensure(bytes <= 32, || format!("rank needs {bytes} bytes"))?;
        let back = lcr_decode(&code, 256).map_err(|e| e.to_string())?;
        ensure(back.indices() == subset.as_slice(), || {
            "round trip mismatch".into()
        })?;
    }
    Ok(format!("100 subsets, longest rank {longest} bytes"))
}

fn stats_restoration() -> Outcome {
    const TOL: f64 = 1e-4;
    let start = Instant::now();
    let mut configs = Vec::new();
    for codec in [CodecId::RAW_LOSSLESS, CodecId::BLOCK_DCT] {
        for qp in [4u8, 22, 40] {
            for prune_ratio in [0.0, 0.25, 0.5] {
                configs.push(EncoderConfig {
                    prune_ratio,
                    codec,
                    qp,
                    ..Default::default()
                });
            }
        }
    }
    let tools = Toolset::default();
    let worst = (0..200u64)
        .into_par_iter()
        .map(|seed| -> Result<(f64, f64), String> {
            let mut r = rng(1000 + seed);
            let group = random_group(&mut r, 4);
            let mut worst: (f64, f64) = (0.0, 0.0);
            for cfg in &configs {
                let stream = fcm_encode(&group, cfg).map_err(|e| e.to_string())?;
                let units = fcm_decode_detailed(&stream, &tools).map_err(|e| e.to_string())?;
                for u in &units {
                    let h = &u.header;
                    let out = compute_global_stats(&u.output);
                    let red = compute_global_stats(&u.reduced_refined);
                    let want = (h.transform_stats.mu, h.transform_stats.sigma);
                    let want_red = (h.reduced_stats.mu, h.reduced_stats.sigma);
                    ensure(stats_match((out.mu, out.sigma), want, TOL), || {
                        format!("seed {seed} {cfg:?}: output stats {out:?} vs {want:?}")
                    })?;
                    ensure(stats_match((red.mu, red.sigma), want_red, TOL), || {
                        format!("seed {seed} {cfg:?}: reduced stats {red:?} vs {want_red:?}")
                    })?;
                    worst.0 = worst.0.max(rel_err(out.sigma, want.1));
                    worst.1 = worst.1.max(rel_err(red.sigma, want_red.1));
                }
            }
            Ok(worst)
        })
        .try_reduce(|| (0.0, 0.0), |a, b| Ok((a.0.max(b.0), a.1.max(b.1))))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "200 groups x {} configs, worst sigma error {:.2e} (output) {:.2e} (reduced), {elapsed:.2?}",
        configs.len(),
        worst.0,
        worst.1
    ))
}

fn rel_err(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        (got - want).abs() / want
    }
}

fn near_lossless() -> Outcome {
    let cfg = EncoderConfig {
        prune_ratio: 0.0,
        bit_depth: 10,
        codec: CodecId::RAW_LOSSLESS,
        transform: TransformId::IDENTITY,
        ..Default::default()
    };
    let tools = Toolset::default();
    let mut r = rng(5);
    let mut worst_conv = 0f64;
    let mut worst_final = 0f64;
    let mut final_over = 0usize;
    for i in 0..100 {
        let (c, h, w) = (
            r.gen_range(1..=16),
            r.gen_range(1..=16),
            r.gen_range(1..=16),
        );
        let t = random_tensor(&mut r, c, h, w);
        let group = TensorGroup::unlabeled(vec![t.clone()]).map_err(|e| e.to_string())?;
        let stream = fcm_encode(&group, &cfg).map_err(|e| e.to_string())?;
        let unit = fcm_decode_detailed(&stream, &tools)
            .map_err(|e| e.to_string())?
            .remove(0);
        let (lo, hi) = t
            .data()
            .iter()
            .fold((f32::INFINITY, f32::NEG_INFINITY), |(a, b), &v| {
                (a.min(v), b.max(v))
            });
        let bound = (hi as f64 - lo as f64) / 2046.0 + 1e-6;
        let max_err = |rec: &[f32]| {
            t.data()
                .iter()
                .zip(rec)
                .map(|(&a, &b)| (a as f64 - b as f64).abs())
                .fold(0.0, f64::max)
        };
        let conv = max_err(unit.reduced_unrefined.data());
        let fin = max_err(unit.output.data());
        ensure(conv <= bound, || {
            format!("tensor {i}: conversion error {conv:e} > {bound:e}")
        })?;
        let got = compute_global_stats(&unit.output);
        let want = unit.header.transform_stats;
        ensure(
            stats_match((got.mu, got.sigma), (want.mu, want.sigma), 1e-4),
            || format!("tensor {i}: refined stats {got:?} vs {want:?}"),
        )?;
        if fin > bound {
            final_over += 1;
        }
        let scale = bound - 1e-6;
        if scale > 0.0 {
            worst_conv = worst_conv.max(conv / scale);
            worst_final = worst_final.max(fin / scale);
        }
    }
    Ok(format!(
        "100 tensors, conversion round trip within {worst_conv:.4} half-steps and refined \
         stats restored; refined output reaches {worst_final:.4} half-steps \
         ({final_over} tensors beyond the conversion bound)"
    ))
}

fn rate_dominance() -> Outcome {
    let mut r = rng(6);
    let corpus: Vec<TensorGroup> = (0..6)
        .map(|_| {
            let tensors = (0..2).map(|_| smooth_tensor(&mut r, 16, 24, 24)).collect();
            TensorGroup::unlabeled(tensors).unwrap()
        })
        .collect();
    for codec in [CodecId::BLOCK_DCT, CodecId::RAW_LOSSLESS] {
        for (i, group) in corpus.iter().enumerate() {
            let sizes: Vec<usize> = [0.0, 0.25, 0.5]
                .iter()
                .map(|&prune_ratio| {
                    let cfg = EncoderConfig {
                        prune_ratio,
                        codec,
                        qp: 22,
                        ..Default::default()
                    };
                    fcm_encode(group, &cfg)
                        .map(|s| s.len())
                        .map_err(|e| e.to_string())
                })
                .collect::<Result<_, _>>()?;
            ensure(sizes.windows(2).all(|w| w[1] < w[0]), || {
                format!("{codec} group {i}: sizes {sizes:?} over prune ratios 0, 0.25, 0.5")
            })?;
        }
    }
    let qps = [4u8, 10, 22, 34, 40, 51];
    let mut worst = 0;
    for i in 0..8 {
        let frame = smooth_frame(&mut r, 64, 96);
        let sizes: Vec<usize> = qps
            .iter()
            .map(|&qp| codec_encode(&frame, CodecId::BLOCK_DCT, 10, qp).map(|p| p.bytes.len()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let inversions = sizes.windows(2).filter(|w| w[1] > w[0]).count();
        worst = worst.max(inversions);
        ensure(inversions <= 1, || {
            format!("frame {i}: sizes {sizes:?} over qp {qps:?}")
        })?;
    }
    Ok(format!(
        "prune-ratio sizes strictly decreasing; at most {worst} qp inversion(s)"
    ))
}

fn bd_rate_analytics() -> Outcome {
    let anchor = RdCurve::new(
        [
            (120.0, 29.8),
            (210.0, 32.9),
            (390.0, 35.7),
            (720.0, 38.4),
            (1300.0, 40.6),
        ]
        .iter()
        .map(|&(rate, quality)| RdPoint { rate, quality })
        .collect(),
    )
    .map_err(|e| e.to_string())?;
    let bd = |test: &RdCurve| bd_rate(&anchor, test).map_err(|e| e.to_string());
    let same = bd(&anchor)?;
    ensure(same.abs() <= 1e-9, || {
        format!("identical curves gave {same}")
    })?;
    let doubled = bd(&anchor.scaled(2.0).map_err(|e| e.to_string())?)?;
    ensure((doubled - 100.0).abs() <= 1e-6, || {
        format!("doubled gave {doubled}")
    })?;
    let halved = bd(&anchor.scaled(0.5).map_err(|e| e.to_string())?)?;
    ensure((halved + 50.0).abs() <= 1e-6, || {
        format!("halved gave {halved}")
    })?;
    // cheaper at every quality, by varying amounts
    let cheaper = RdCurve::new(
        anchor
            .points()
            .iter()
            .enumerate()
            .map(|(i, p)| RdPoint {
                rate: p.rate * (0.7 + 0.05 * i as f64),
                quality: p.quality,
            })
            .collect(),
    )
    .map_err(|e| e.to_string())?;
    let gain = bd(&cheaper)?;
    ensure(gain < 0.0, || format!("cheaper curve gave {gain}"))?;
    Ok(format!(
        "0 -> {same:.1e}, x2 -> {doubled:.6}%, x0.5 -> {halved:.6}%, cheaper -> {gain:.2}%"
    ))
}

fn bit_depth_tools() -> Outcome {
    let frame = SampleFrame::new(32, 32, (0..1024u16).collect()).map_err(|e| e.to_string())?;
    let seq = PixelSequence::new(vec![frame], 10, 30.0).map_err(|e| e.to_string())?;
    for shift in 1..=3u8 {
        let t = bitdepth_truncate(&seq, shift).map_err(|e| e.to_string())?;
        let back = bitdepth_restore(&t, shift).map_err(|e| e.to_string())?;
        ensure(back.bit_depth() == 10, || {
            format!("restored depth {}", back.bit_depth())
        })?;
        for (&a, &b) in seq.frames()[0]
            .samples()
            .iter()
            .zip(back.frames()[0].samples())
        {
            ensure(b <= a && a - b < 1 << shift, || {
                format!("shift {shift}: {a} -> {b}")
            })?;
        }
    }
    Ok("1024 values x shifts 1..=3".into())
}

fn temporal_tools() -> Outcome {
    let mut r = rng(9);
    let mut trials = 0;
    for _ in 0..200 {
        let len = r.gen_range(1..=100);
        let ratio = *[2u8, 4, 8].choose(&mut r).unwrap();
        let frames: Vec<SampleFrame> = (0..len)
            .map(|_| {
                SampleFrame::new(3, 5, (0..15).map(|_| r.gen_range(0..1024)).collect()).unwrap()
            })
            .collect();
        let seq = PixelSequence::new(frames, 10, 30.0).map_err(|e| e.to_string())?;
        let (kept, side) = temporal_resample_scalar(&seq, ratio).map_err(|e| e.to_string())?;
        let side = fcm_core::vcm::TemporalSideInfo::from_bytes(&side.to_bytes())
            .map_err(|e| e.to_string())?;
        let back = temporal_restore(&kept, &side).map_err(|e| e.to_string())?;
        ensure(back.len() == len, || {
            format!("len {len} ratio {ratio}: got {}", back.len())
        })?;
        for i in (0..len).step_by(ratio as usize) {
            ensure(back.frames()[i] == seq.frames()[i], || {
                format!("len {len} ratio {ratio}: kept frame {i} changed")
            })?;
        }
        let still = PixelSequence::new(vec![seq.frames()[0].clone(); len], 10, 30.0)
            .map_err(|e| e.to_string())?;
        let (kept, side) = temporal_resample_scalar(&still, ratio).map_err(|e| e.to_string())?;
        let back = temporal_restore(&kept, &side).map_err(|e| e.to_string())?;
        ensure(back.frames() == still.frames(), || {
            format!("static len {len} ratio {ratio}")
        })?;
        trials += 1;
    }
    Ok(format!("{trials} random and {trials} static sequences"))
}

/// Random edits of a valid input: byte flips, truncation, insertion,
/// splices of random bytes, or entirely random data.
fn mutate(r: &mut impl Rng, seed: &[u8]) -> Vec<u8> {
    let mut out = seed.to_vec();
    match r.gen_range(0..6) {
        0 => {
            let len = r.gen_range(0..64);
            return (0..len).map(|_| r.gen()).collect();
        }
        1 => out.truncate(r.gen_range(0..=out.len())),
        2 => {
            for _ in 0..r.gen_range(1..4) {
                let at = r.gen_range(0..=out.len());
                out.insert(at, r.gen());
            }
        }
        _ => {
            for _ in 0..r.gen_range(1..8) {
                if out.is_empty() {
                    break;
                }
                let at = r.gen_range(0..out.len());
                out[at] = match r.gen_range(0..4) {
                    0 => r.gen(),
                    1 => out[at] ^ (1 << r.gen_range(0..8)),
                    2 => 0xff,
                    _ => 0,
                };
            }
        }
    }
    out
}

struct FuzzReport {
    cases: usize,
    ok: usize,
    slowest: Duration,
}

/// Runs `target` on `cases` derived inputs; any panic or a case slower than
/// `limit` fails the run.
fn fuzz(
    name: &str,
    cases: usize,
    limit: Duration,
    input: impl Fn(&mut rand_chacha::ChaCha8Rng) -> Vec<u8> + Sync,
    target: impl Fn(&[u8]) -> bool + Sync,
) -> Result<FuzzReport, String> {
    let results: Vec<Result<(bool, Duration), String>> = (0..cases)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(0xf022_0000 + i as u64);
            let data = input(&mut r);
            let start = Instant::now();
            let ok = catch_unwind(AssertUnwindSafe(|| target(&data)))
                .map_err(|_| format!("{name}: panic on case {i} ({} bytes)", data.len()))?;
            let took = start.elapsed();
            ensure(took <= limit, || format!("{name}: case {i} took {took:?}"))?;
            Ok((ok, took))
        })
        .collect();
    let mut report = FuzzReport {
        cases,
        ok: 0,
        slowest: Duration::ZERO,
    };
    for res in results {
        let (ok, took) = res?;
        report.ok += ok as usize;
        report.slowest = report.slowest.max(took);
    }
    Ok(report)
}

fn robustness() -> Outcome {
    const CASES: usize = 100_000;
    let limit = Duration::from_secs(2);
    let mut r = rng(10);
    let seeds: Vec<Vec<u8>> = [
        (CodecId::RAW_LOSSLESS, 0.0, TransformId::IDENTITY),
        (CodecId::BLOCK_DCT, 0.3, TransformId::IDENTITY),
        (CodecId::BLOCK_DCT, 0.5, TransformId::MEAN_POOL_2X),
        (CodecId::RAW_LOSSLESS, 0.25, TransformId::MEAN_POOL_2X),
    ]
    .iter()
    .map(|&(codec, prune_ratio, transform)| {
        let group = random_group(&mut r, 3);
        let cfg = EncoderConfig {
            prune_ratio,
            codec,
            transform,
            ..Default::default()
        };
        fcm_encode(&group, &cfg).unwrap()
    })
    .collect();

    let mut lines = Vec::new();
    let stream = fuzz(
        "stream",
        CASES,
        limit,
        |r| {
            let pick = r.gen_range(0..seeds.len());
            mutate(r, &seeds[pick])
        },
        |data| match fcm_decode(data) {
            Ok(g) => !g.is_empty(),
            Err(e) => {
                let _ = e.kind();
                false
            }
        },
    )?;
    lines.push(format!("stream {}/{} decoded", stream.ok, stream.cases));

    for codec in [CodecId::RAW_LOSSLESS, CodecId::BLOCK_DCT] {
        let mut r = rng(11 + codec.0 as u64);
        let payloads: Vec<(Vec<u8>, (usize, usize), u8)> = (0..4)
            .map(|_| {
                let (h, w) = (r.gen_range(1..40), r.gen_range(1..40));
                let frame = smooth_frame(&mut r, h, w);
                let p = codec_encode(&frame, codec, 10, r.gen_range(0..=MAX_QP)).unwrap();
                (p.bytes, (h, w), p.qp)
            })
            .collect();
        let report = fuzz(
            "payload",
            CASES,
            limit,
            |r| {
                let (bytes, dims, qp) = &payloads[r.gen_range(0..payloads.len())];
                // parameters travel with the input so the target stays a pure function
                let mut data = vec![dims.0 as u8, dims.1 as u8, *qp, r.gen_range(8..=16)];
                if r.gen_bool(0.2) {
                    data[0] = r.gen_range(1..64);
                    data[1] = r.gen_range(1..64);
                }
                data.extend(mutate(r, bytes));
                data
            },
            |data| {
                let (head, bytes) = data.split_at(4);
                let payload = EncodedPayload {
                    codec,
                    qp: head[2] % (MAX_QP + 1),
                    bytes: bytes.to_vec(),
                };
                let dims = (head[0].max(1) as usize, head[1].max(1) as usize);
                match codec_decode(&payload, dims, head[3]) {
                    Ok(f) => f.dims() == dims || panic!("wrong dims"),
                    Err(_) => false,
                }
            },
        )?;
        lines.push(format!(
            "{codec} payload {}/{} decoded",
            report.ok, report.cases
        ));
    }

    let mut r = rng(12);
    let ftns: Vec<Vec<u8>> = (0..4)
        .map(|_| fcm_core::container::encode_tensor_group(&random_group(&mut r, 4)))
        .collect();
    let report = fuzz(
        "container",
        CASES,
        limit,
        |r| {
            let pick = r.gen_range(0..ftns.len());
            mutate(r, &ftns[pick])
        },
        |data| decode_tensor_group(data).is_ok(),
    )?;
    lines.push(format!("container {}/{} parsed", report.ok, report.cases));
    Ok(lines.join(", "))
}

fn determinism() -> Outcome {
    let mut r = rng(13);
    let tensors = (0..8).map(|_| smooth_tensor(&mut r, 16, 20, 20)).collect();
    let group = TensorGroup::unlabeled(tensors).map_err(|e| e.to_string())?;
    let mut checked = 0;
    for cfg in [
        EncoderConfig {
            prune_ratio: 0.25,
            codec: CodecId::BLOCK_DCT,
            qp: 22,
            ..Default::default()
        },
        EncoderConfig {
            prune_ratio: 0.5,
            transform: TransformId::MEAN_POOL_2X,
            ..Default::default()
        },
    ] {
        let encode_on = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| fcm_encode(&group, &cfg))
                .map_err(|e| e.to_string())
        };
        let single = encode_on(1)?;
        for threads in [2, 4, 8, 8, 8] {
            let multi = encode_on(threads)?;
            ensure(multi == single, || {
                format!("{threads} threads differ for {cfg:?}")
            })?;
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} multi-threaded encodes identical to single-threaded"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("lcr exhaustive N<=12", lcr_exhaustive),
        ("lcr worked examples", lcr_worked_examples),
        ("lcr N=256 k=128", lcr_bignum),
        ("statistics restoration", stats_restoration),
        ("near-lossless path", near_lossless),
        ("rate dominance", rate_dominance),
        ("bd-rate analytics", bd_rate_analytics),
        ("bit-depth tools", bit_depth_tools),
        ("temporal tools", temporal_tools),
        ("robustness fuzzing", robustness),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS [{:>2}] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{:>2}] {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
