//! Self-check suite behind `eventzoom verify` and the acceptance tests.
//!
//! Each criterion compares the library against an oracle written separately
//! from the code it checks: brute-force pixel marking for coverage, a direct
//! lerp for interpolation, rasterization for the sparse/dense equivalence, and
//! byte comparison of whole output trees for determinism.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use crate::baselines::{ablation_augment, AblationVariant};
use crate::codec::{self, DatasetManifest, EntryKind, ManifestEntry};
use crate::config::{AnchorMode, AugConfig};
use crate::event::{one_hot, FrameTensor, SoftLabelTrack, CHANNELS};
use crate::pipeline::{augment_dataset, simulate_donor_weights, AugmentOptions};
use crate::raster::{rasterize, FrameDims};
use crate::rng::{mix64, DeterministicRng};
use crate::synth::{gen_dataset, gen_sample, random_stream, SynthGeometry};
use crate::zoom::{
    embed_step, eventzoom_events, eventzoom_frames, eventzoom_frames_traced, interp_pos,
    interp_scale, zoom_frames_with_params, ZoomParams,
};

type CheckResult = std::result::Result<String, String>;

/// One acceptance criterion.
pub struct Criterion {
    pub id: &'static str,
    pub description: &'static str,
    /// Wall-clock limit; exceeding it fails the criterion.
    pub budget: Option<Duration>,
    check: fn() -> CheckResult,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:<22} {:>9.3}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

impl Criterion {
    pub fn run(&self) -> Outcome {
        let start = Instant::now();
        let result = (self.check)();
        let elapsed = start.elapsed();
        let (mut passed, mut detail) = match result {
            Ok(d) => (true, d),
            Err(d) => (false, d),
        };
        if let Some(budget) = self.budget {
            if elapsed > budget {
                passed = false;
                detail = format!("{detail}; exceeded budget of {:.1}s", budget.as_secs_f64());
            }
        }
        Outcome {
            id: self.id,
            passed,
            detail,
            elapsed,
        }
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($fmt)+)),
        }
    };
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            id: "interpolation",
            description: "endpoints exact and second differences < 1e-12 over 1000 random trajectories",
            budget: Some(Duration::from_secs(1)),
            check: check_interpolation,
        },
        Criterion {
            id: "label-simplex",
            description: "1000 eventzoom runs (mixnum 0..=3) give labels on the simplex within 1e-9",
            budget: Some(Duration::from_secs(10)),
            check: check_label_simplex,
        },
        Criterion {
            id: "coverage-oracle",
            description: "closed-form coverage equals brute-force pixel marking on 1000 cases",
            budget: Some(Duration::from_secs(5)),
            check: check_coverage_oracle,
        },
        Criterion {
            id: "domain-equivalence",
            description: "rasterize(eventzoom_events) == eventzoom_frames(rasterize) on 200 streams",
            budget: Some(Duration::from_secs(30)),
            check: check_domain_equivalence,
        },
        Criterion {
            id: "ps-pp-equivalence",
            description: "PS_PP ablation bit-equals eventzoom(mixnum=1) on 100 cases",
            budget: None,
            check: check_ps_pp,
        },
        Criterion {
            id: "determinism",
            description: "100-sample dataset: identical trees for 1 vs 8 workers and reruns, different for other seeds",
            budget: Some(Duration::from_secs(60)),
            check: check_determinism,
        },
        Criterion {
            id: "identity-cases",
            description: "mixnum=0 keeps the base; unit scale centered replaces it with the donor",
            budget: None,
            check: check_identity,
        },
        Criterion {
            id: "monotone-mixing",
            description: "mean donor weight for lambda 0.5-1.5 exceeds 0.2-0.6 by > 0.1 (10000 draws)",
            budget: Some(Duration::from_secs(10)),
            check: check_monotone_mixing,
        },
        Criterion {
            id: "codec-rng",
            description: "all codecs round-trip bit-exactly; splitmix64 reference output from state 0",
            budget: None,
            check: check_codecs,
        },
        Criterion {
            id: "bench-sanity",
            description: "eventzoom mixnum=2 on 8x2x48x48 averages < 5 ms single-threaded",
            budget: None,
            check: check_bench,
        },
    ]
}

pub fn run_all() -> Vec<Outcome> {
    criteria().iter().map(Criterion::run).collect()
}

pub fn run_one(id: &str) -> Option<Outcome> {
    criteria().iter().find(|c| c.id == id).map(Criterion::run)
}

fn random_tensor(
    rng: &mut DeterministicRng,
    bins: usize,
    h: usize,
    w: usize,
    density: f64,
) -> FrameTensor {
    let data = (0..bins * CHANNELS * h * w)
        .map(|_| {
            if rng.next_f64() < density {
                (1 + rng.below(3)) as f32
            } else {
                0.0
            }
        })
        .collect();
    FrameTensor::from_vec(bins, CHANNELS, h, w, data).expect("valid shape")
}

fn check_interpolation() -> CheckResult {
    let mut rng = DeterministicRng::new(0x1A7E);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let bins = 2 + rng.below(31);
        let p = ZoomParams {
            donor_index: 0,
            lambda_start: rng.uniform(0.01, 5.0),
            lambda_end: rng.uniform(0.01, 5.0),
            anchor_start: (rng.uniform(0.0, 640.0), rng.uniform(0.0, 480.0)),
            anchor_end: (rng.uniform(0.0, 640.0), rng.uniform(0.0, 480.0)),
        };
        ensure!(
            interp_scale(&p, 0, bins) == p.lambda_start,
            "case {case}: start scale not exact"
        );
        ensure!(
            interp_scale(&p, bins - 1, bins) == p.lambda_end,
            "case {case}: end scale not exact"
        );
        ensure!(
            interp_pos(&p, 0, bins) == p.anchor_start,
            "case {case}: start anchor not exact"
        );
        ensure!(
            interp_pos(&p, bins - 1, bins) == p.anchor_end,
            "case {case}: end anchor not exact"
        );
        let lo = p.lambda_start.min(p.lambda_end);
        let hi = p.lambda_start.max(p.lambda_end);
        let scales: Vec<f64> = (0..bins).map(|t| interp_scale(&p, t, bins)).collect();
        let xs: Vec<f64> = (0..bins).map(|t| interp_pos(&p, t, bins).0).collect();
        for &s in &scales {
            ensure!(
                s >= lo - 1e-15 && s <= hi + 1e-15,
                "case {case}: scale {s} outside [{lo}, {hi}]"
            );
        }
        for w in scales.windows(3) {
            worst = worst.max((w[2] - 2.0 * w[1] + w[0]).abs());
        }
        // positions are on a larger scale; check relative to their magnitude
        for w in xs.windows(3) {
            let d2 = (w[2] - 2.0 * w[1] + w[0]).abs();
            ensure!(
                d2 < 1e-12 * 640.0,
                "case {case}: position second difference {d2:e}"
            );
        }
    }
    ensure!(worst < 1e-12, "max scale second difference {worst:e}");
    Ok(format!("max |second difference| {worst:.2e}"))
}

fn check_label_simplex() -> CheckResult {
    let mut rng = DeterministicRng::new(0x5EED);
    let pool: Vec<FrameTensor> = (0..6)
        .map(|_| random_tensor(&mut rng, 8, 48, 48, 0.05))
        .collect();
    let num_classes = 10;
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let mixnum = case % 4;
        let cfg = AugConfig {
            mixnum,
            anchor_mode: if case % 2 == 0 {
                AnchorMode::Center
            } else {
                AnchorMode::TopLeft
            },
            lambda_min: rng.uniform(0.1, 1.0),
            lambda_max: rng.uniform(1.0, 2.5),
            ..Default::default()
        };
        let base = &pool[rng.below(pool.len())];
        let yb = one_hot(rng.below(num_classes), num_classes).expect("class in range");
        let donor_labels: Vec<Vec<f64>> = (0..mixnum)
            .map(|_| one_hot(rng.below(num_classes), num_classes).expect("class in range"))
            .collect();
        let donors: Vec<(&FrameTensor, &[f64])> = donor_labels
            .iter()
            .map(|y| (&pool[rng.below(pool.len())], y.as_slice()))
            .collect();
        let mut run_rng = DeterministicRng::new(mix64(case as u64));
        let (_, track) =
            eventzoom_frames(base, &yb, &donors, &cfg, &mut run_rng).map_err(|e| e.to_string())?;
        let err = track.simplex_error();
        ensure!(err <= 1e-9, "case {case}: simplex error {err:e}");
        let mean_ok = (0..num_classes).all(|k| {
            let m = track.per_step().iter().map(|s| s[k]).sum::<f64>() / track.steps() as f64;
            (m - track.averaged()[k]).abs() < 1e-12
        });
        ensure!(
            mean_ok,
            "case {case}: averaged label is not the per-step mean"
        );
        worst = worst.max(err);
    }
    Ok(format!("max simplex error {worst:.2e}"))
}

/// Coverage by marking every frame pixel inside the box spanned by the
/// scaled source pixels.
fn coverage_by_marking(
    w: usize,
    h: usize,
    lambda: f64,
    anchor: (f64, f64),
    mode: AnchorMode,
) -> f64 {
    let span = |n: usize| {
        let cells: Vec<i64> = (0..n).map(|v| (v as f64 * lambda).floor() as i64).collect();
        (*cells.iter().min().unwrap(), *cells.iter().max().unwrap())
    };
    let (x_min, x_max) = span(w);
    let (y_min, y_max) = span(h);
    let (ox, oy) = match mode {
        AnchorMode::Center => (
            anchor.0.round() as i64 - (x_max - x_min + 1) / 2,
            anchor.1.round() as i64 - (y_max - y_min + 1) / 2,
        ),
        AnchorMode::TopLeft => (anchor.0.round() as i64, anchor.1.round() as i64),
    };
    let mut marked = vec![false; w * h];
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            if x >= ox + x_min && x <= ox + x_max && y >= oy + y_min && y <= oy + y_max {
                marked[(y * w as i64 + x) as usize] = true;
            }
        }
    }
    marked.iter().filter(|&&m| m).count() as f64 / (w * h) as f64
}

fn check_coverage_oracle() -> CheckResult {
    let mut rng = DeterministicRng::new(0xC0DE);
    let geometries = [(48usize, 48usize), (17, 23), (23, 17)];
    for case in 0..1000 {
        let (w, h) = geometries[case % geometries.len()];
        let lambda = rng.uniform(0.25, 2.0);
        let anchor = (rng.uniform(0.0, w as f64), rng.uniform(0.0, h as f64));
        let mode = if case % 4 == 3 {
            AnchorMode::TopLeft
        } else {
            AnchorMode::Center
        };
        let dims = FrameDims::new(CHANNELS, h, w);
        let mut frame = vec![1.0f32; dims.len()];
        let donor = vec![0.0f32; dims.len()];
        let placed = embed_step(&mut frame, &donor, dims, lambda, anchor, mode);
        let expected = coverage_by_marking(w, h, lambda, anchor, mode);
        ensure!(
            placed.coverage == expected,
            "case {case}: {w}x{h} lambda {lambda} anchor {anchor:?}: {} vs oracle {expected}",
            placed.coverage
        );
        // cleared cells are exactly the mask, in both channels
        let zeros = frame.iter().filter(|&&v| v == 0.0).count();
        ensure!(
            zeros % CHANNELS == 0 && (zeros / CHANNELS) as f64 / (w * h) as f64 == expected,
            "case {case}: {zeros} cleared cells vs coverage {expected}"
        );
    }

    // per-step coverage of a two-donor run
    let cfg = AugConfig {
        mixnum: 2,
        ..Default::default()
    };
    let mut rng = DeterministicRng::new(1);
    let base = random_tensor(&mut rng, 8, 48, 48, 0.1);
    let d1 = random_tensor(&mut rng, 8, 48, 48, 0.1);
    let d2 = random_tensor(&mut rng, 8, 48, 48, 0.1);
    let y = one_hot(0, 3).expect("class");
    let z = eventzoom_frames_traced(
        &base,
        &y,
        &[(&d1, &y), (&d2, &y)],
        &cfg,
        &mut DeterministicRng::new(7),
    )
    .map_err(|e| e.to_string())?;
    for (p, steps) in z.params.iter().zip(&z.placements) {
        for (t, pl) in steps.iter().enumerate() {
            let lambda = (1.0 - t as f64 / 7.0) * p.lambda_start + (t as f64 / 7.0) * p.lambda_end;
            let ax = (1.0 - t as f64 / 7.0) * p.anchor_start.0 + (t as f64 / 7.0) * p.anchor_end.0;
            let ay = (1.0 - t as f64 / 7.0) * p.anchor_start.1 + (t as f64 / 7.0) * p.anchor_end.1;
            let expected = coverage_by_marking(48, 48, lambda, (ax, ay), AnchorMode::Center);
            ensure!(
                pl.coverage == expected,
                "seed 7 run, step {t}: {} vs {expected}",
                pl.coverage
            );
        }
    }
    Ok("1000 cases + 16 traced steps exact".into())
}

fn check_domain_equivalence() -> CheckResult {
    let geometry = SynthGeometry::default();
    let streams: Vec<_> = (0..200)
        .map(|i| {
            if i % 2 == 0 {
                gen_sample(i % 3, 3, i, 0xD0, geometry).map_err(|e| e.to_string())
            } else {
                let mut rng = DeterministicRng::new(mix64(i as u64));
                let n = rng.below(4000);
                Ok(random_stream(&mut rng, n, 48, 48, geometry.duration))
            }
        })
        .collect::<std::result::Result<_, _>>()?;
    let raster = |s: &crate::event::EventStream| rasterize(s, 8, 48, 48).map_err(|e| e.to_string());
    let frames: Vec<FrameTensor> = streams
        .iter()
        .map(raster)
        .collect::<std::result::Result<_, _>>()?;
    let y = |k: usize| one_hot(k % 3, 3).expect("class");

    for i in 0..200 {
        let mixnum = 1 + i % 3;
        let cfg = AugConfig {
            mixnum,
            anchor_mode: if i % 5 == 0 {
                AnchorMode::TopLeft
            } else {
                AnchorMode::Center
            },
            ..Default::default()
        };
        let donor_idx: Vec<usize> = (0..mixnum).map(|k| (i + 1 + 37 * k) % 200).collect();
        let labels: Vec<Vec<f64>> = donor_idx.iter().map(|&d| y(d)).collect();
        let seed = mix64(0xE0 ^ i as u64);
        let sparse_donors: Vec<_> = donor_idx
            .iter()
            .zip(&labels)
            .map(|(&d, l)| (&streams[d], l.as_slice()))
            .collect();
        let dense_donors: Vec<_> = donor_idx
            .iter()
            .zip(&labels)
            .map(|(&d, l)| (&frames[d], l.as_slice()))
            .collect();
        let (sparse, ls) = eventzoom_events(
            &streams[i],
            &y(i),
            &sparse_donors,
            &cfg,
            &mut DeterministicRng::new(seed),
        )
        .map_err(|e| e.to_string())?;
        let (dense, ld) = eventzoom_frames(
            &frames[i],
            &y(i),
            &dense_donors,
            &cfg,
            &mut DeterministicRng::new(seed),
        )
        .map_err(|e| e.to_string())?;
        let rs = raster(&sparse)?;
        ensure!(
            rs.as_slice() == dense.as_slice(),
            "case {i}: rasterized sparse output differs"
        );
        ensure!(ls == ld, "case {i}: label tracks differ");
        ensure!(
            sparse.validate().is_empty(),
            "case {i}: sparse output violates stream invariants"
        );
    }
    Ok("200 cases bit-exact".into())
}

fn check_ps_pp() -> CheckResult {
    let cfg = AugConfig::default();
    let mut rng = DeterministicRng::new(0xAB);
    for case in 0..100u64 {
        let base = random_tensor(&mut rng, 8, 48, 48, 0.1);
        let donor = random_tensor(&mut rng, 8, 48, 48, 0.1);
        let yb = one_hot(0, 2).expect("class");
        let yd = one_hot(1, 2).expect("class");
        let seed = mix64(case);
        let a = eventzoom_frames(
            &base,
            &yb,
            &[(&donor, &yd)],
            &cfg,
            &mut DeterministicRng::new(seed),
        )
        .map_err(|e| e.to_string())?;
        let mut r = DeterministicRng::new(seed);
        let b = ablation_augment(
            &base,
            &yb,
            &donor,
            &yd,
            AblationVariant::PS_PP,
            &cfg,
            &mut r,
        )
        .map_err(|e| e.to_string())?;
        let bits = |t: &FrameTensor| t.as_slice().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        ensure!(bits(&a.0) == bits(&b.0), "case {case}: tensors differ");
        ensure!(a.1 == b.1, "case {case}: labels differ");
    }
    Ok("100 cases bit-equal".into())
}

fn read_tree(dir: &Path) -> std::result::Result<Vec<(String, Vec<u8>)>, String> {
    let mut files = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).map_err(|e| format!("{}: {e}", d.display()))? {
            let path = entry.map_err(|e| e.to_string())?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path
                    .strip_prefix(dir)
                    .expect("under root")
                    .to_string_lossy()
                    .into_owned();
                files.push((rel, fs::read(&path).map_err(|e| e.to_string())?));
            }
        }
    }
    files.sort();
    Ok(files)
}

fn check_determinism() -> CheckResult {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let data = tmp.path().join("data");
    let manifest =
        gen_dataset(2, 50, &data, 3, SynthGeometry::default()).map_err(|e| e.to_string())?;
    ensure!(
        manifest.len() == 100,
        "expected 100 samples, got {}",
        manifest.len()
    );
    let cfg = AugConfig {
        mixnum: 2,
        master_seed: 11,
        ..Default::default()
    };

    let run = |name: &str, cfg: &AugConfig, workers: usize| {
        let out = tmp.path().join(name);
        let opts = AugmentOptions {
            workers,
            cache_dir: None,
        };
        augment_dataset(&manifest, &data, cfg, &out, &opts).map_err(|e| e.to_string())?;
        read_tree(&out)
    };
    let one = run("w1", &cfg, 1)?;
    let eight = run("w8", &cfg, 8)?;
    let again = run("w1b", &cfg, 1)?;
    let other = run(
        "seed12",
        &AugConfig {
            master_seed: 12,
            ..cfg.clone()
        },
        4,
    )?;
    ensure!(
        one.len() == 101,
        "expected 100 outputs + manifest, got {}",
        one.len()
    );
    ensure!(one == eight, "1-worker and 8-worker trees differ");
    ensure!(one == again, "rerun with the same seed differs");
    ensure!(one != other, "a different seed produced an identical tree");
    Ok(format!(
        "{} files identical across worker counts",
        one.len()
    ))
}

fn check_identity() -> CheckResult {
    let mut rng = DeterministicRng::new(0x1D);
    let base = random_tensor(&mut rng, 8, 48, 48, 0.2);
    let donor = random_tensor(&mut rng, 8, 48, 48, 0.2);
    let yb = one_hot(1, 4).expect("class");
    let yd = one_hot(3, 4).expect("class");

    let cfg = AugConfig {
        mixnum: 0,
        ..Default::default()
    };
    let (out, track) =
        eventzoom_frames(&base, &yb, &[], &cfg, &mut rng).map_err(|e| e.to_string())?;
    ensure!(out == base, "mixnum=0 changed the base");
    ensure!(
        track.per_step().iter().all(|s| *s == yb) && track.averaged() == yb,
        "mixnum=0 label is not one-hot"
    );

    let p = ZoomParams {
        donor_index: 0,
        lambda_start: 1.0,
        lambda_end: 1.0,
        anchor_start: (24.0, 24.0),
        anchor_end: (24.0, 24.0),
    };
    let z = zoom_frames_with_params(&base, &yb, &[(&donor, &yd)], &[p], AnchorMode::Center)
        .map_err(|e| e.to_string())?;
    ensure!(
        z.data == donor,
        "unit-scale centered embedding is not the donor"
    );
    ensure!(
        z.labels.averaged() == yd,
        "unit-scale centered label is not the donor's"
    );
    Ok("both identities hold".into())
}

fn check_monotone_mixing() -> CheckResult {
    let mean = |lo, hi| {
        let cfg = AugConfig {
            lambda_min: lo,
            lambda_max: hi,
            master_seed: 0x7AB4,
            ..Default::default()
        };
        let w = simulate_donor_weights(&cfg, 10_000);
        w.iter().sum::<f64>() / w.len() as f64
    };
    let wide = mean(0.5, 1.5);
    let narrow = mean(0.2, 0.6);
    ensure!(
        wide - narrow > 0.1,
        "mean weight {wide:.4} vs {narrow:.4}: margin {:.4}",
        wide - narrow
    );
    Ok(format!(
        "mean donor weight {wide:.4} (0.5-1.5) vs {narrow:.4} (0.2-0.6)"
    ))
}

fn check_codecs() -> CheckResult {
    let mut first = DeterministicRng::new(0);
    let v = first.next_u64();
    ensure!(v == 0xE220_A839_7B1D_CDAF, "splitmix64 from 0 gave {v:#x}");

    let mut rng = DeterministicRng::new(0xC0);
    for case in 0..20 {
        let s = random_stream(&mut rng, 1000, 346, 260, 1_000_000);
        let bytes = codec::write_evt(&s);
        let back = codec::read_evt(&bytes).map_err(|e| e.to_string())?;
        ensure!(back == s, "case {case}: EVT1 value mismatch");
        ensure!(
            codec::write_evt(&back) == bytes,
            "case {case}: EVT1 bytes differ"
        );

        let text = codec::write_csv(&s);
        let back =
            codec::read_csv(&text, s.width, s.height, s.duration).map_err(|e| e.to_string())?;
        ensure!(back == s, "case {case}: CSV mismatch");

        let t = 1 + rng.below(8);
        let (h, w) = (1 + rng.below(40), 1 + rng.below(40));
        let frames = random_tensor(&mut rng, t, h, w, 0.3);
        let n = 1 + rng.below(10);
        let steps: Vec<Vec<f64>> = (0..t)
            .map(|_| (0..n).map(|_| rng.next_f64() as f32 as f64).collect())
            .collect();
        let averaged: Vec<f64> = (0..n).map(|_| rng.next_f64() as f32 as f64).collect();
        let track = SoftLabelTrack::from_parts(n, steps, averaged).map_err(|e| e.to_string())?;
        for labels in [None, Some(&track)] {
            let bytes = codec::write_evzf(&frames, labels).map_err(|e| e.to_string())?;
            let back = codec::read_evzf(&bytes).map_err(|e| e.to_string())?;
            ensure!(
                back.frames == frames && back.labels.as_ref() == labels,
                "case {case}: EVZF mismatch"
            );
            let again =
                codec::write_evzf(&back.frames, back.labels.as_ref()).map_err(|e| e.to_string())?;
            ensure!(again == bytes, "case {case}: EVZF bytes differ");
        }

        let manifest = DatasetManifest {
            num_classes: 5,
            entries: (0..50)
                .map(|i| ManifestEntry {
                    path: format!("c{case}/s {i}.evt"),
                    class: rng.below(5),
                    kind: if rng.next_f64() < 0.5 {
                        EntryKind::Events
                    } else {
                        EntryKind::Frames
                    },
                })
                .collect(),
        };
        let text = codec::write_manifest(&manifest).map_err(|e| e.to_string())?;
        ensure!(
            codec::read_manifest(&text).map_err(|e| e.to_string())? == manifest,
            "case {case}: manifest mismatch"
        );
    }
    Ok("EVT1/CSV/EVZF/manifest x20 round-trips exact".into())
}

fn check_bench() -> CheckResult {
    let cfg = AugConfig {
        mixnum: 2,
        ..Default::default()
    };
    let mut rng = DeterministicRng::new(0xBE);
    let mk = |rng: &mut DeterministicRng| {
        let s = random_stream(rng, 4000, 48, 48, 100_000);
        rasterize(&s, 8, 48, 48).expect("geometry matches")
    };
    let (base, d1, d2) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
    let y = one_hot(0, 3).expect("class");
    let iterations = 200;
    // warm-up
    for i in 0..10 {
        let _ = eventzoom_frames(
            &base,
            &y,
            &[(&d1, &y), (&d2, &y)],
            &cfg,
            &mut DeterministicRng::new(i),
        );
    }
    let start = Instant::now();
    for i in 0..iterations {
        let out = eventzoom_frames(
            &base,
            &y,
            &[(&d1, &y), (&d2, &y)],
            &cfg,
            &mut DeterministicRng::new(i),
        )
        .map_err(|e| e.to_string())?;
        std::hint::black_box(out);
    }
    let mean_ms = start.elapsed().as_secs_f64() * 1e3 / iterations as f64;
    ensure!(mean_ms < 5.0, "mean {mean_ms:.3} ms per application");
    Ok(format!("mean {mean_ms:.3} ms per application"))
}
