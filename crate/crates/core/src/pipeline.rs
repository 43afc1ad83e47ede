//! Dataset-level augmentation.
//!
//! Sample `i` of a run always uses `child_rng(master_seed, i)`, whatever
//! worker picks it up, so output files are identical for any worker count.
//! Inputs are loaded (and rasterized) once up front and shared read-only.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use crate::baselines::{ablation_augment, cutmix_frames, eventdrop, eventmix_frames, mixup_frames};
use crate::codec::{self, DatasetManifest, EntryKind, ManifestEntry};
use crate::config::{AugConfig, Strategy};
use crate::error::{Error, Result};
use crate::event::{one_hot, EventStream, FrameTensor, SoftLabelTrack, CHANNELS};
use crate::raster::{downscale_frames, rasterize};
use crate::rng::{child_rng, DeterministicRng};
use crate::synth::random_stream;
use crate::zoom::{
    interp_pos, interp_scale, mix_label_step, place, sample_donor, sample_zoom_params,
    zoom_frames_with_params, ZoomParams,
};

/// One input sample after loading.
#[derive(Debug, Clone)]
pub struct LoadedSample {
    pub class: usize,
    pub frames: std::result::Result<FrameTensor, String>,
    /// Kept only for strategies that work on raw events.
    pub stream: Option<EventStream>,
}

#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub num_classes: usize,
    pub samples: Vec<LoadedSample>,
}

fn to_config_frames(stream: &EventStream, cfg: &AugConfig) -> Result<FrameTensor> {
    let (w, h) = (stream.width as usize, stream.height as usize);
    let native = rasterize(stream, cfg.bins, h, w)?;
    fit_frames(native, cfg)
}

fn fit_frames(frames: FrameTensor, cfg: &AugConfig) -> Result<FrameTensor> {
    if frames.bins() != cfg.bins || frames.channels() != CHANNELS {
        return Err(Error::ShapeMismatch(format!(
            "tensor {:?} has wrong bin/channel count for {} bins",
            frames.shape(),
            cfg.bins
        )));
    }
    if (frames.height(), frames.width()) == (cfg.height, cfg.width) {
        Ok(frames)
    } else {
        downscale_frames(&frames, cfg.height, cfg.width)
    }
}

fn cache_path(cache_dir: &Path, rel: &str, cfg: &AugConfig) -> PathBuf {
    cache_dir.join(format!(
        "{rel}.{}x{}x{}.evzf",
        cfg.bins, cfg.height, cfg.width
    ))
}

fn load_entry(
    entry: &ManifestEntry,
    root: &Path,
    cfg: &AugConfig,
    cache_dir: Option<&Path>,
    keep_stream: bool,
) -> (Result<FrameTensor>, Option<EventStream>) {
    let path = root.join(&entry.path);
    match entry.kind {
        EntryKind::Frames => (
            codec::load_evzf(&path).and_then(|f| fit_frames(f.frames, cfg)),
            None,
        ),
        EntryKind::Events => {
            let stream = match codec::load_evt(&path) {
                Ok(s) => s,
                Err(e) => return (Err(e), None),
            };
            if let Some(cached) = cache_dir.map(|d| cache_path(d, &entry.path, cfg)) {
                if let Ok(f) = codec::load_evzf(&cached) {
                    if f.frames.shape() == [cfg.bins, CHANNELS, cfg.height, cfg.width] {
                        return (Ok(f.frames), keep_stream.then_some(stream));
                    }
                }
                let frames = to_config_frames(&stream, cfg);
                if let Ok(f) = &frames {
                    if let Err(e) = codec::save_evzf(&cached, f, None) {
                        log::warn!("could not write cache {}: {e}", cached.display());
                    }
                }
                return (frames, keep_stream.then_some(stream));
            }
            (
                to_config_frames(&stream, cfg),
                keep_stream.then_some(stream),
            )
        }
    }
}

impl LoadedDataset {
    /// Reads and rasterizes every manifest entry. Unreadable entries are kept
    /// as errors so that the samples depending on them fail individually.
    pub fn load(
        manifest: &DatasetManifest,
        root: &Path,
        cfg: &AugConfig,
        cache_dir: Option<&Path>,
    ) -> Self {
        let keep_stream = cfg.strategy == Strategy::EventDrop;
        let samples = manifest
            .entries
            .par_iter()
            .map(|entry| {
                let (frames, stream) = load_entry(entry, root, cfg, cache_dir, keep_stream);
                LoadedSample {
                    class: entry.class,
                    frames: frames.map_err(|e| format!("{}: {e}", entry.path)),
                    stream,
                }
            })
            .collect();
        LoadedDataset {
            num_classes: manifest.num_classes,
            samples,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn frames(&self, i: usize) -> Result<&FrameTensor> {
        self.samples[i]
            .frames
            .as_ref()
            .map_err(|e| Error::InvalidConfig(format!("sample {i} unavailable: {e}")))
    }

    fn label(&self, i: usize) -> Result<Vec<f64>> {
        one_hot(self.samples[i].class, self.num_classes)
    }
}

/// What happened while augmenting one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    pub index: usize,
    pub donors: Vec<usize>,
    /// Uniform draws beyond the nominal budget (donor self-collisions).
    pub redraws: u64,
    pub params: Vec<ZoomParams>,
}

/// Augments sample `index` of `data` with its own child stream.
pub fn augment_one(
    data: &LoadedDataset,
    index: usize,
    cfg: &AugConfig,
) -> Result<(FrameTensor, SoftLabelTrack, SampleOutcome)> {
    let mut rng = child_rng(cfg.master_seed, index as u64);
    let start = rng.clone();
    let base_label = data.label(index)?;
    let n = data.len();
    let mut outcome = SampleOutcome {
        index,
        donors: Vec::new(),
        redraws: 0,
        params: Vec::new(),
    };

    let (frames, labels) = match cfg.strategy {
        Strategy::EventZoom => {
            let base = data.frames(index)?;
            let params = (0..cfg.mixnum)
                .map(|_| sample_zoom_params(&mut rng, cfg, n, index))
                .collect::<Result<Vec<_>>>()?;
            let donor_labels = params
                .iter()
                .map(|p| data.label(p.donor_index))
                .collect::<Result<Vec<_>>>()?;
            let donors = params
                .iter()
                .zip(&donor_labels)
                .map(|(p, y)| Ok((data.frames(p.donor_index)?, y.as_slice())))
                .collect::<Result<Vec<_>>>()?;
            let z = zoom_frames_with_params(base, &base_label, &donors, &params, cfg.anchor_mode)?;
            let nominal = 7 * cfg.mixnum as u64;
            outcome.redraws = rng.draws_since(&start) - nominal;
            outcome.donors = params.iter().map(|p| p.donor_index).collect();
            outcome.params = params;
            (z.data, z.labels)
        }
        Strategy::EventDrop => {
            let stream = data.samples[index].stream.as_ref().ok_or_else(|| {
                Error::InvalidConfig(format!("sample {index} has no event stream"))
            })?;
            let dropped = eventdrop(stream, cfg.drop_ratio, &mut rng)?;
            let frames = to_config_frames(&dropped, cfg)?;
            let labels = SoftLabelTrack::constant(&base_label, cfg.bins)?;
            (frames, labels)
        }
        strategy => {
            let base = data.frames(index)?;
            let before = rng.clone();
            let d = sample_donor(&mut rng, n, index)?;
            outcome.redraws = rng.draws_since(&before) - 1;
            outcome.donors = vec![d];
            let donor = data.frames(d)?;
            let yd = data.label(d)?;
            match strategy {
                Strategy::Mixup => mixup_frames(
                    base,
                    &base_label,
                    donor,
                    &yd,
                    None,
                    cfg.mixup_alpha,
                    &mut rng,
                )?,
                Strategy::CutMix => cutmix_frames(base, &base_label, donor, &yd, &mut rng)?,
                Strategy::EventMix => eventmix_frames(base, &base_label, donor, &yd, &mut rng)?,
                Strategy::Ablation(v) => {
                    ablation_augment(base, &base_label, donor, &yd, v, cfg, &mut rng)?
                }
                Strategy::EventZoom | Strategy::EventDrop => unreachable!(),
            }
        }
    };
    if outcome.redraws > 0 {
        log::debug!("sample {index}: {} donor redraws", outcome.redraws);
    }
    Ok((frames, labels, outcome))
}

/// Output file name for sample `i`.
pub fn output_name(i: usize) -> String {
    format!("aug{i:06}.evzf")
}

#[derive(Debug, Clone)]
pub struct AugmentReport {
    pub manifest: DatasetManifest,
    pub outcomes: Vec<SampleOutcome>,
    pub failures: Vec<(usize, String)>,
}

impl AugmentReport {
    pub fn total_redraws(&self) -> u64 {
        self.outcomes.iter().map(|o| o.redraws).sum()
    }
}

#[derive(Debug, Clone, Default)]
pub struct AugmentOptions {
    pub workers: usize,
    pub cache_dir: Option<PathBuf>,
}

/// Augments every entry of `manifest` (paths relative to `input_root`) and
/// writes one EVZF per sample plus `manifest.txt` into `out_dir`.
pub fn augment_dataset(
    manifest: &DatasetManifest,
    input_root: &Path,
    cfg: &AugConfig,
    out_dir: &Path,
    opts: &AugmentOptions,
) -> Result<AugmentReport> {
    cfg.validate()?;
    manifest.validate()?;
    let needed = cfg.strategy.donors_needed(cfg.mixnum);
    if needed > 0 && manifest.len() < cfg.mixnum.max(1) + 1 {
        return Err(Error::NoDonor(manifest.len()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;

    pool.install(|| {
        let data = LoadedDataset::load(manifest, input_root, cfg, opts.cache_dir.as_deref());
        let results: Vec<std::result::Result<SampleOutcome, String>> = (0..data.len())
            .into_par_iter()
            .map(|i| {
                let (frames, labels, outcome) =
                    augment_one(&data, i, cfg).map_err(|e| e.to_string())?;
                codec::save_evzf(out_dir.join(output_name(i)), &frames, Some(&labels))
                    .map_err(|e| e.to_string())?;
                Ok(outcome)
            })
            .collect();

        let mut out = DatasetManifest::new(manifest.num_classes);
        let mut outcomes = Vec::new();
        let mut failures = Vec::new();
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok(o) => {
                    out.entries.push(ManifestEntry {
                        path: output_name(i),
                        class: manifest.entries[i].class,
                        kind: EntryKind::Frames,
                    });
                    outcomes.push(o);
                }
                Err(e) => {
                    log::error!("sample {i} ({}) failed: {e}", manifest.entries[i].path);
                    failures.push((i, e));
                }
            }
        }
        if outcomes.is_empty() && !failures.is_empty() {
            return Err(Error::AllSamplesFailed(failures.len()));
        }
        codec::save_manifest(out_dir.join("manifest.txt"), &out)?;
        Ok(AugmentReport {
            manifest: out,
            outcomes,
            failures,
        })
    })
}

/// Histogram of averaged donor weight (`1 - mass on the base class`).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightHistogram {
    pub counts: Vec<usize>,
    pub cumulative: Vec<f64>,
    pub mean: f64,
}

impl WeightHistogram {
    pub fn from_weights(weights: &[f64], bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidConfig(
                "histogram needs at least one bin".into(),
            ));
        }
        let mut counts = vec![0usize; bins];
        for &w in weights {
            let w = w.clamp(0.0, 1.0);
            counts[((w * bins as f64) as usize).min(bins - 1)] += 1;
        }
        let total = weights.len().max(1) as f64;
        let cumulative = counts
            .iter()
            .scan(0usize, |acc, &c| {
                *acc += c;
                Some(*acc as f64 / total)
            })
            .collect();
        let mean = if weights.is_empty() {
            0.0
        } else {
            weights.iter().sum::<f64>() / weights.len() as f64
        };
        Ok(WeightHistogram {
            counts,
            cumulative,
            mean,
        })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Tab-separated table: `lo  hi  count  cumulative`.
    pub fn to_table(&self) -> String {
        let bins = self.counts.len() as f64;
        let mut out = String::from("lo\thi\tcount\tcumulative\n");
        for (i, (c, cum)) in self.counts.iter().zip(&self.cumulative).enumerate() {
            let _ = writeln!(
                out,
                "{:.4}\t{:.4}\t{c}\t{cum:.6}",
                i as f64 / bins,
                (i + 1) as f64 / bins
            );
        }
        let _ = writeln!(out, "# samples\t{}\tmean\t{:.6}", self.total(), self.mean);
        out
    }
}

/// Reads every output's label track and bins the donor weights.
pub fn label_weight_histogram(
    manifest: &DatasetManifest,
    root: &Path,
    bins: usize,
) -> Result<WeightHistogram> {
    let weights = manifest
        .entries
        .iter()
        .map(|e| {
            let path = root.join(&e.path);
            let f = codec::load_evzf(&path)?;
            let track = f.labels.ok_or_else(|| Error::NoLabelTrack(path.clone()))?;
            let base = track
                .averaged()
                .get(e.class)
                .copied()
                .ok_or(Error::ClassOutOfRange {
                    class: e.class,
                    num_classes: track.num_classes(),
                })?;
            Ok(1.0 - base)
        })
        .collect::<Result<Vec<_>>>()?;
    WeightHistogram::from_weights(&weights, bins)
}

/// Averaged donor weight of `n` simulated augmentations, computed from the
/// label arithmetic alone (donors assumed to differ from the base class).
pub fn simulate_donor_weights(cfg: &AugConfig, n: usize) -> Vec<f64> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = child_rng(cfg.master_seed, i as u64);
            let base = one_hot(0, 2).expect("2 classes");
            let donor = one_hot(1, 2).expect("2 classes");
            let mut steps = vec![base; cfg.bins];
            for _ in 0..cfg.mixnum {
                let p = sample_zoom_params(&mut rng, cfg, 2, 0).expect("2 samples");
                for (t, step) in steps.iter_mut().enumerate() {
                    let lambda = interp_scale(&p, t, cfg.bins);
                    let anchor = interp_pos(&p, t, cfg.bins);
                    let pl = place(
                        cfg.width,
                        cfg.height,
                        cfg.width,
                        cfg.height,
                        lambda,
                        anchor,
                        cfg.anchor_mode,
                    );
                    *step = mix_label_step(step, &donor, pl.coverage).expect("coverage in [0, 1]");
                }
            }
            steps.iter().map(|s| s[1]).sum::<f64>() / cfg.bins as f64
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub strategy: Strategy,
    pub parallel: bool,
    pub iterations: usize,
    pub mean_ms: f64,
    pub median_ms: f64,
    pub p99_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_table(&self) -> String {
        let mut out = String::from("strategy\tmode\titerations\tmean_ms\tmedian_ms\tp99_ms\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{:.4}\t{:.4}\t{:.4}",
                r.strategy,
                if r.parallel { "parallel" } else { "single" },
                r.iterations,
                r.mean_ms,
                r.median_ms,
                r.p99_ms
            );
        }
        out
    }
}

fn summarize(strategy: Strategy, parallel: bool, mut times: Vec<f64>) -> BenchRow {
    times.sort_by(f64::total_cmp);
    let n = times.len();
    let p99 = times[((n as f64 * 0.99).ceil() as usize).clamp(1, n) - 1];
    BenchRow {
        strategy,
        parallel,
        iterations: n,
        mean_ms: times.iter().sum::<f64>() / n as f64,
        median_ms: times[n / 2],
        p99_ms: p99,
    }
}

/// In-memory dataset of random streams at the config geometry.
pub fn bench_dataset(cfg: &AugConfig, samples: usize, events_per_sample: usize) -> LoadedDataset {
    let duration = 100_000;
    let samples = (0..samples)
        .map(|i| {
            let mut rng = DeterministicRng::new(i as u64);
            let s = random_stream(
                &mut rng,
                events_per_sample,
                cfg.width as u16,
                cfg.height as u16,
                duration,
            );
            LoadedSample {
                class: i % 3,
                frames: rasterize(&s, cfg.bins, cfg.height, cfg.width).map_err(|e| e.to_string()),
                stream: Some(s),
            }
        })
        .collect();
    LoadedDataset {
        num_classes: 3,
        samples,
    }
}

/// Times `iterations` single-sample augmentations per strategy, once on the
/// calling thread and once spread over the rayon pool.
pub fn bench(cfg: &AugConfig, strategies: &[Strategy], iterations: usize) -> Result<BenchReport> {
    cfg.validate()?;
    if iterations == 0 {
        return Ok(BenchReport::default());
    }
    let data = bench_dataset(cfg, 16, 4000);
    let mut rows = Vec::new();
    for &strategy in strategies {
        let scfg = AugConfig {
            strategy,
            ..cfg.clone()
        };
        let run = |i: usize| -> Result<f64> {
            let start = Instant::now();
            let out = augment_one(&data, i % data.len(), &scfg)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            std::hint::black_box(out);
            Ok(ms)
        };
        let single = (0..iterations).map(run).collect::<Result<Vec<_>>>()?;
        rows.push(summarize(strategy, false, single));
        let parallel = (0..iterations)
            .into_par_iter()
            .map(run)
            .collect::<Result<Vec<_>>>()?;
        rows.push(summarize(strategy, true, parallel));
    }
    Ok(BenchReport { rows })
}
