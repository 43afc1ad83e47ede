use std::fs;
use std::path::Path;

use eventzoom::codec::{
    load_evzf, load_manifest, save_evzf, save_manifest, DatasetManifest, EntryKind, ManifestEntry,
};
use eventzoom::pipeline::{augment_dataset, label_weight_histogram, output_name, AugmentOptions};
use eventzoom::raster::rasterize;
use eventzoom::synth::{gen_dataset, SynthGeometry};
use eventzoom::{child_rng, codec, AnchorMode, AugConfig, Error, Strategy};

fn dataset(dir: &Path, classes: usize, per_class: usize, seed: u64) -> DatasetManifest {
    gen_dataset(classes, per_class, dir, seed, SynthGeometry::default()).unwrap()
}

fn tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn opts(workers: usize) -> AugmentOptions {
    AugmentOptions {
        workers,
        cache_dir: None,
    }
}

#[test]
fn output_independent_of_worker_count_for_every_strategy() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let m = dataset(&data, 3, 4, 21);
    for strategy in Strategy::all() {
        let cfg = AugConfig {
            strategy,
            mixnum: 2,
            master_seed: 5,
            ..Default::default()
        };
        let runs: Vec<_> = [1, 2, 8]
            .iter()
            .map(|&w| {
                let out = tmp.path().join(format!("{strategy}-{w}").replace(':', "_"));
                let report = augment_dataset(&m, &data, &cfg, &out, &opts(w)).unwrap();
                assert!(
                    report.failures.is_empty(),
                    "{strategy}: {:?}",
                    report.failures
                );
                tree(&out)
            })
            .collect();
        assert_eq!(runs[0].len(), 13, "{strategy}");
        assert!(
            runs.iter().all(|r| *r == runs[0]),
            "{strategy} differs across worker counts"
        );
    }
}

/// Coverage of a frame-sized donor by explicit pixel marking.
fn marked_coverage(w: usize, h: usize, lambda: f64, anchor: (f64, f64)) -> f64 {
    let ext = |n: usize| {
        (0..n)
            .map(|v| (v as f64 * lambda).floor() as i64)
            .max()
            .unwrap()
            + 1
    };
    let (ew, eh) = (ext(w), ext(h));
    let ox = anchor.0.round() as i64 - ew / 2;
    let oy = anchor.1.round() as i64 - eh / 2;
    let mut count = 0usize;
    for y in 0..h as i64 {
        for x in 0..w as i64 {
            if (ox..ox + ew).contains(&x) && (oy..oy + eh).contains(&y) {
                count += 1;
            }
        }
    }
    count as f64 / (w * h) as f64
}

#[test]
fn averaged_labels_match_single_threaded_replay() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let m = dataset(&data, 2, 50, 3);
    let cfg = AugConfig {
        mixnum: 2,
        master_seed: 3,
        ..Default::default()
    };
    let out = tmp.path().join("out");
    augment_dataset(&m, &data, &cfg, &out, &opts(8)).unwrap();
    let n = m.len();
    let (bins, w, h) = (cfg.bins, cfg.width, cfg.height);

    for i in 0..n {
        let mut rng = child_rng(3, i as u64);
        let mut steps = vec![vec![0.0; 2]; bins];
        steps.iter_mut().for_each(|s| s[m.entries[i].class] = 1.0);
        for _ in 0..cfg.mixnum {
            let donor = loop {
                let d = ((rng.next_f64() * n as f64).floor() as usize).min(n - 1);
                if d != i {
                    break d;
                }
            };
            let mut u = |lo: f64, hi: f64| lo + (hi - lo) * rng.next_f64();
            let (ls, le) = (u(0.5, 1.5), u(0.5, 1.5));
            let (xs, ys) = (u(0.0, w as f64), u(0.0, h as f64));
            let (xe, ye) = (u(0.0, w as f64), u(0.0, h as f64));
            for (t, step) in steps.iter_mut().enumerate() {
                let s = t as f64 / (bins - 1) as f64;
                let lambda = (1.0 - s) * ls + s * le;
                let anchor = ((1.0 - s) * xs + s * xe, (1.0 - s) * ys + s * ye);
                let a = marked_coverage(w, h, lambda, anchor);
                for (k, v) in step.iter_mut().enumerate() {
                    let y = if k == m.entries[donor].class {
                        1.0
                    } else {
                        0.0
                    };
                    *v = (1.0 - a) * *v + a * y;
                }
            }
        }
        let expected: Vec<f64> = (0..2)
            .map(|k| steps.iter().map(|s| s[k]).sum::<f64>() / bins as f64)
            .collect();
        let stored = load_evzf(out.join(output_name(i))).unwrap().labels.unwrap();
        for (k, (got, want)) in stored.averaged().iter().zip(&expected).enumerate() {
            assert!(
                (got - want).abs() < 1e-6,
                "sample {i} class {k}: {got} vs replay {want}"
            );
        }
    }
}

#[test]
fn mixnum_zero_outputs_rasterized_bases() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let m = dataset(&data, 2, 3, 8);
    let cfg = AugConfig {
        mixnum: 0,
        ..Default::default()
    };
    let out = tmp.path().join("out");
    let report = augment_dataset(&m, &data, &cfg, &out, &opts(2)).unwrap();
    assert_eq!(report.manifest.len(), 6);
    for (i, e) in m.entries.iter().enumerate() {
        let s = codec::load_evt(data.join(&e.path)).unwrap();
        let f = load_evzf(out.join(output_name(i))).unwrap();
        assert_eq!(f.frames, rasterize(&s, 8, 48, 48).unwrap());
        let labels = f.labels.unwrap();
        assert_eq!(labels.averaged()[e.class], 1.0);
    }
    let hist = label_weight_histogram(&report.manifest, &out, 10).unwrap();
    assert_eq!(hist.counts[0], 6);
    assert_eq!(hist.counts.iter().sum::<usize>(), 6);
}

#[test]
fn histogram_is_pure_function_of_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let m = dataset(&data, 3, 5, 1);
    let cfg = AugConfig {
        mixnum: 2,
        master_seed: 9,
        ..Default::default()
    };
    let out = tmp.path().join("out");
    let report = augment_dataset(&m, &data, &cfg, &out, &opts(4)).unwrap();
    let written = load_manifest(out.join("manifest.txt")).unwrap();
    assert_eq!(written, report.manifest);
    let a = label_weight_histogram(&written, &out, 8).unwrap();
    let b = label_weight_histogram(&written, &out, 8).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.counts.iter().sum::<usize>(), 15);
    assert!((a.cumulative.last().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn histogram_requires_label_tracks() {
    let tmp = tempfile::tempdir().unwrap();
    let f = eventzoom::FrameTensor::zeros(2, 2, 4, 4).unwrap();
    save_evzf(tmp.path().join("a.evzf"), &f, None).unwrap();
    let m = DatasetManifest {
        num_classes: 2,
        entries: vec![ManifestEntry {
            path: "a.evzf".into(),
            class: 0,
            kind: EntryKind::Frames,
        }],
    };
    assert!(matches!(
        label_weight_histogram(&m, tmp.path(), 4),
        Err(Error::NoLabelTrack(_))
    ));
}

#[test]
fn unreadable_entries_fail_individually() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let mut m = dataset(&data, 2, 4, 2);
    m.entries.push(ManifestEntry {
        path: "missing.evt".into(),
        class: 1,
        kind: EntryKind::Events,
    });
    let cfg = AugConfig {
        mixnum: 1,
        master_seed: 1,
        ..Default::default()
    };
    let out = tmp.path().join("out");
    let report = augment_dataset(&m, &data, &cfg, &out, &opts(2)).unwrap();
    assert!(report.failures.iter().any(|(i, _)| *i == 8));
    assert_eq!(report.outcomes.len() + report.failures.len(), 9);
    assert_eq!(report.manifest.len(), report.outcomes.len());
    assert!(!out.join(output_name(8)).exists());
}

#[test]
fn all_failed_is_an_error() {
    let tmp = tempfile::tempdir().unwrap();
    let m = DatasetManifest {
        num_classes: 2,
        entries: (0..3)
            .map(|i| ManifestEntry {
                path: format!("nope{i}.evt"),
                class: i % 2,
                kind: EntryKind::Events,
            })
            .collect(),
    };
    let r = augment_dataset(
        &m,
        tmp.path(),
        &AugConfig::default(),
        &tmp.path().join("out"),
        &opts(1),
    );
    assert!(matches!(r, Err(Error::AllSamplesFailed(3))));
}

#[test]
fn dataset_must_have_a_donor() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let mut m = dataset(&data, 2, 1, 0);
    m.entries.truncate(1);
    let r = augment_dataset(
        &m,
        &data,
        &AugConfig::default(),
        &tmp.path().join("out"),
        &opts(1),
    );
    assert!(matches!(r, Err(Error::NoDonor(1))));
}

#[test]
fn cache_dir_is_reused_and_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let m = dataset(&data, 2, 3, 4);
    let cache = tmp.path().join("cache");
    let cfg = AugConfig {
        mixnum: 1,
        anchor_mode: AnchorMode::TopLeft,
        ..Default::default()
    };
    let with_cache = AugmentOptions {
        workers: 2,
        cache_dir: Some(cache.clone()),
    };
    augment_dataset(&m, &data, &cfg, &tmp.path().join("a"), &with_cache).unwrap();
    let cached = cache.join(format!("{}.8x48x48.evzf", m.entries[0].path));
    assert!(cached.exists());
    augment_dataset(&m, &data, &cfg, &tmp.path().join("b"), &with_cache).unwrap();
    augment_dataset(&m, &data, &cfg, &tmp.path().join("c"), &opts(1)).unwrap();
    assert_eq!(tree(&tmp.path().join("a")), tree(&tmp.path().join("b")));
    assert_eq!(tree(&tmp.path().join("a")), tree(&tmp.path().join("c")));
}

#[test]
fn frame_entries_and_downscaling() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let m = dataset(&data, 2, 2, 6);
    // convert the inputs to pre-rasterized frame entries
    let mut frames_manifest = DatasetManifest::new(2);
    for (i, e) in m.entries.iter().enumerate() {
        let s = codec::load_evt(data.join(&e.path)).unwrap();
        let rel = format!("f{i}.evzf");
        save_evzf(data.join(&rel), &rasterize(&s, 8, 48, 48).unwrap(), None).unwrap();
        frames_manifest.entries.push(ManifestEntry {
            path: rel,
            class: e.class,
            kind: EntryKind::Frames,
        });
    }
    save_manifest(data.join("frames.txt"), &frames_manifest).unwrap();
    let cfg = AugConfig {
        height: 24,
        width: 24,
        mixnum: 1,
        ..Default::default()
    };
    let out = tmp.path().join("out");
    let report = augment_dataset(&frames_manifest, &data, &cfg, &out, &opts(2)).unwrap();
    assert!(report.failures.is_empty());
    let f = load_evzf(out.join(output_name(0))).unwrap();
    assert_eq!(f.frames.shape(), [8, 2, 24, 24]);
}
