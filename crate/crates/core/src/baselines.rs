//! Comparison augmentations and the spatial/temporal ablation variants.
//!
//! The mixing baselines work on frame tensors and hold their region or weight
//! fixed across all time steps. EventMix is a simplified version: only the
//! Gaussian-ellipse region replacement is reproduced.

use rand_distr::{Beta, Distribution};

use crate::config::AugConfig;
use crate::error::{Error, Result};
use crate::event::{EventStream, FrameTensor, Rect, SoftLabelTrack};
use crate::raster::FrameDims;
use crate::rng::DeterministicRng;
use crate::zoom::{
    clear_rect, interp_pos, interp_scale, mix_label_step, place, Placement, ZoomParams,
};

/// How a per-step parameter evolves over time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamMode {
    /// Linear between two draws.
    Progressive,
    /// A fresh draw at every step.
    RandomPerStep,
    /// One draw held for all steps.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EmbedMode {
    /// Scale the whole donor into the mask.
    ZoomSplat,
    /// Copy the donor's unscaled content at the mask coordinates.
    CropReplace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AblationVariant {
    pub scale: ParamMode,
    pub position: ParamMode,
    pub embed: EmbedMode,
}

const fn variant(scale: ParamMode, position: ParamMode, embed: EmbedMode) -> AblationVariant {
    AblationVariant {
        scale,
        position,
        embed,
    }
}

impl AblationVariant {
    pub const PS_PP: AblationVariant = variant(
        ParamMode::Progressive,
        ParamMode::Progressive,
        EmbedMode::ZoomSplat,
    );
    pub const RS_RP: AblationVariant = variant(
        ParamMode::RandomPerStep,
        ParamMode::RandomPerStep,
        EmbedMode::ZoomSplat,
    );
    // Random position, fixed scale.
    pub const RS_FP: AblationVariant = variant(
        ParamMode::Fixed,
        ParamMode::RandomPerStep,
        EmbedMode::ZoomSplat,
    );
    // Random scale, fixed position.
    pub const FS_RP: AblationVariant = variant(
        ParamMode::RandomPerStep,
        ParamMode::Fixed,
        EmbedMode::ZoomSplat,
    );
    pub const FS_FP: AblationVariant =
        variant(ParamMode::Fixed, ParamMode::Fixed, EmbedMode::ZoomSplat);
    pub const C_RS_FP: AblationVariant = variant(
        ParamMode::RandomPerStep,
        ParamMode::Fixed,
        EmbedMode::CropReplace,
    );
    pub const C_RP_FS: AblationVariant = variant(
        ParamMode::Fixed,
        ParamMode::RandomPerStep,
        EmbedMode::CropReplace,
    );
    pub const C_PS_PP: AblationVariant = variant(
        ParamMode::Progressive,
        ParamMode::Progressive,
        EmbedMode::CropReplace,
    );

    pub const PRESETS: [(&'static str, AblationVariant); 8] = [
        ("PS_PP", Self::PS_PP),
        ("RS_RP", Self::RS_RP),
        ("RS_FP", Self::RS_FP),
        ("FS_RP", Self::FS_RP),
        ("FS_FP", Self::FS_FP),
        ("C_RS_FP", Self::C_RS_FP),
        ("C_RP_FS", Self::C_RP_FS),
        ("C_PS_PP", Self::C_PS_PP),
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::PRESETS
            .iter()
            .find(|(n, _)| *n == name)
            .map(|&(_, v)| v)
    }

    /// Preset name, or a descriptive tag for custom combinations.
    pub fn name(&self) -> String {
        Self::PRESETS
            .iter()
            .find(|(_, v)| v == self)
            .map(|(n, _)| n.to_string())
            .unwrap_or_else(|| format!("{:?}/{:?}/{:?}", self.scale, self.position, self.embed))
    }
}

fn check_pair(a: &FrameTensor, ya: &[f64], b: &FrameTensor, yb: &[f64]) -> Result<()> {
    a.check_same_shape(b)?;
    if ya.len() != yb.len() {
        return Err(Error::InvalidLabel(format!(
            "label widths differ: {} vs {}",
            ya.len(),
            yb.len()
        )));
    }
    Ok(())
}

fn blend(ya: &[f64], yb: &[f64], weight_b: f64) -> Vec<f64> {
    ya.iter()
        .zip(yb)
        .map(|(&a, &b)| (1.0 - weight_b) * a + weight_b * b)
        .collect()
}

/// Frame-wise convex blend `weight * a + (1 - weight) * b`. With `weight`
/// unset, it is drawn from Beta(alpha, alpha).
pub fn mixup_frames(
    a: &FrameTensor,
    ya: &[f64],
    b: &FrameTensor,
    yb: &[f64],
    weight: Option<f64>,
    alpha: f64,
    rng: &mut DeterministicRng,
) -> Result<(FrameTensor, SoftLabelTrack)> {
    check_pair(a, ya, b, yb)?;
    let beta = match weight {
        Some(w) if (0.0..=1.0).contains(&w) => w,
        Some(w) => return Err(Error::RatioOutOfRange(w)),
        None => Beta::new(alpha, alpha)
            .map_err(|e| Error::InvalidConfig(format!("mixup alpha {alpha}: {e}")))?
            .sample(rng),
    };
    let data = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(&va, &vb)| (beta * va as f64 + (1.0 - beta) * vb as f64) as f32)
        .collect();
    let [t, c, h, w] = a.shape();
    let out = FrameTensor::from_vec(t, c, h, w, data)?;
    let label = blend(ya, yb, 1.0 - beta);
    Ok((out, SoftLabelTrack::constant(&label, t)?))
}

/// Replaces `a` by `b` wherever `mask` (an `H x W` plane) is set, at every
/// step and channel. Label weight of `b` is the mask's area fraction.
pub fn replace_region(
    a: &FrameTensor,
    ya: &[f64],
    b: &FrameTensor,
    yb: &[f64],
    mask: &[bool],
) -> Result<(FrameTensor, SoftLabelTrack)> {
    check_pair(a, ya, b, yb)?;
    let plane = a.height() * a.width();
    if mask.len() != plane {
        return Err(Error::ShapeMismatch(format!(
            "mask has {} cells, frame has {plane}",
            mask.len()
        )));
    }
    let mut out = a.clone();
    for (dst, src) in out
        .as_mut_slice()
        .chunks_exact_mut(plane)
        .zip(b.as_slice().chunks_exact(plane))
    {
        for ((d, &s), &m) in dst.iter_mut().zip(src).zip(mask) {
            if m {
                *d = s;
            }
        }
    }
    let weight = mask.iter().filter(|&&m| m).count() as f64 / plane as f64;
    Ok((
        out,
        SoftLabelTrack::constant(&blend(ya, yb, weight), a.bins())?,
    ))
}

fn rect_mask(rect: Rect, width: usize, height: usize) -> Vec<bool> {
    let r = rect.clip(width, height);
    (0..height)
        .flat_map(|y| (0..width).map(move |x| r.contains(x as i64, y as i64)))
        .collect()
}

/// CutMix with an explicit rectangle (clipped to the frame).
pub fn cutmix_with_rect(
    a: &FrameTensor,
    ya: &[f64],
    b: &FrameTensor,
    yb: &[f64],
    rect: Rect,
) -> Result<(FrameTensor, SoftLabelTrack)> {
    replace_region(a, ya, b, yb, &rect_mask(rect, a.width(), a.height()))
}

/// Area-uniform box: side fractions `sqrt(r)` with `r ~ U(0, 1)`, center
/// uniform over the frame, clipped.
pub fn sample_cutmix_rect(rng: &mut DeterministicRng, width: usize, height: usize) -> Rect {
    let r = rng.next_f64().sqrt();
    let cut_w = (width as f64 * r).floor() as usize;
    let cut_h = (height as f64 * r).floor() as usize;
    let cx = rng.below(width) as i64;
    let cy = rng.below(height) as i64;
    Rect::new(
        cx - (cut_w / 2) as i64,
        cy - (cut_h / 2) as i64,
        cut_w,
        cut_h,
    )
    .clip(width, height)
}

pub fn cutmix_frames(
    a: &FrameTensor,
    ya: &[f64],
    b: &FrameTensor,
    yb: &[f64],
    rng: &mut DeterministicRng,
) -> Result<(FrameTensor, SoftLabelTrack)> {
    check_pair(a, ya, b, yb)?;
    let rect = sample_cutmix_rect(rng, a.width(), a.height());
    cutmix_with_rect(a, ya, b, yb, rect)
}

/// Axis-aligned 1-sigma ellipse of a 2-D Gaussian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipse {
    pub cx: f64,
    pub cy: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
}

impl Ellipse {
    /// Pixel-center membership mask over a `width x height` plane.
    pub fn mask(&self, width: usize, height: usize) -> Vec<bool> {
        let sx = self.sigma_x.max(f64::MIN_POSITIVE);
        let sy = self.sigma_y.max(f64::MIN_POSITIVE);
        (0..height)
            .flat_map(|y| {
                (0..width).map(move |x| {
                    let dx = (x as f64 + 0.5 - self.cx) / sx;
                    let dy = (y as f64 + 0.5 - self.cy) / sy;
                    dx * dx + dy * dy <= 1.0
                })
            })
            .collect()
    }

    /// Mean uniform over the frame, per-axis sigma uniform in `(0, extent / 2)`.
    pub fn sample(rng: &mut DeterministicRng, width: usize, height: usize) -> Self {
        let cx = rng.uniform(0.0, width as f64);
        let cy = rng.uniform(0.0, height as f64);
        let sigma_x = rng.uniform(0.0, width as f64 / 2.0);
        let sigma_y = rng.uniform(0.0, height as f64 / 2.0);
        Ellipse {
            cx,
            cy,
            sigma_x,
            sigma_y,
        }
    }
}

pub fn eventmix_with_ellipse(
    a: &FrameTensor,
    ya: &[f64],
    b: &FrameTensor,
    yb: &[f64],
    ellipse: Ellipse,
) -> Result<(FrameTensor, SoftLabelTrack)> {
    replace_region(a, ya, b, yb, &ellipse.mask(a.width(), a.height()))
}

/// Simplified EventMix: Gaussian-ellipse region replacement held over time.
pub fn eventmix_frames(
    a: &FrameTensor,
    ya: &[f64],
    b: &FrameTensor,
    yb: &[f64],
    rng: &mut DeterministicRng,
) -> Result<(FrameTensor, SoftLabelTrack)> {
    check_pair(a, ya, b, yb)?;
    let e = Ellipse::sample(rng, a.width(), a.height());
    eventmix_with_ellipse(a, ya, b, yb, e)
}

/// Keeps each event independently with probability `1 - drop_ratio`.
pub fn eventdrop(
    s: &EventStream,
    drop_ratio: f64,
    rng: &mut DeterministicRng,
) -> Result<EventStream> {
    if !(0.0..=1.0).contains(&drop_ratio) {
        return Err(Error::RatioOutOfRange(drop_ratio));
    }
    let events = s
        .events
        .iter()
        .filter(|_| rng.next_f64() >= drop_ratio)
        .copied()
        .collect();
    Ok(EventStream::new(s.width, s.height, s.duration, events))
}

/// Per-step scales and anchors used by an ablation run.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub lambdas: Vec<f64>,
    pub anchors: Vec<(f64, f64)>,
}

/// Draws the schedule for `variant`: all scale draws first (2, `T` or 1),
/// then anchor draws as (x, y) pairs (2, `T` or 1 pairs).
pub fn sample_schedule(
    variant: AblationVariant,
    cfg: &AugConfig,
    rng: &mut DeterministicRng,
) -> Schedule {
    let bins = cfg.bins;
    let (w, h) = (cfg.width as f64, cfg.height as f64);
    let mut scale = || rng.uniform(cfg.lambda_min, cfg.lambda_max);
    let lambdas: Vec<f64> = match variant.scale {
        ParamMode::Progressive => {
            let (ls, le) = (scale(), scale());
            let p = ZoomParams {
                donor_index: 0,
                lambda_start: ls,
                lambda_end: le,
                anchor_start: (0.0, 0.0),
                anchor_end: (0.0, 0.0),
            };
            (0..bins).map(|t| interp_scale(&p, t, bins)).collect()
        }
        ParamMode::RandomPerStep => (0..bins).map(|_| scale()).collect(),
        ParamMode::Fixed => vec![scale(); bins],
    };
    let mut anchor = || (rng.uniform(0.0, w), rng.uniform(0.0, h));
    let anchors: Vec<(f64, f64)> = match variant.position {
        ParamMode::Progressive => {
            let (a0, a1) = (anchor(), anchor());
            let p = ZoomParams {
                donor_index: 0,
                lambda_start: 0.0,
                lambda_end: 0.0,
                anchor_start: a0,
                anchor_end: a1,
            };
            (0..bins).map(|t| interp_pos(&p, t, bins)).collect()
        }
        ParamMode::RandomPerStep => (0..bins).map(|_| anchor()).collect(),
        ParamMode::Fixed => vec![anchor(); bins],
    };
    Schedule { lambdas, anchors }
}

/// Copies `donor` into `frame` inside `mask`, unscaled, all channels.
fn copy_rect(frame: &mut [f32], donor: &[f32], dims: FrameDims, mask: Rect) {
    let plane = dims.height * dims.width;
    let (x0, y0) = (mask.x0 as usize, mask.y0 as usize);
    for c in 0..dims.channels {
        for y in y0..y0 + mask.h {
            let row = c * plane + y * dims.width;
            frame[row + x0..row + x0 + mask.w].copy_from_slice(&donor[row + x0..row + x0 + mask.w]);
        }
    }
}

/// Applies an explicit schedule. Returns the mixed tensor, its label track and
/// the per-step placements.
pub fn ablation_with_schedule(
    base: &FrameTensor,
    base_label: &[f64],
    donor: &FrameTensor,
    donor_label: &[f64],
    embed: EmbedMode,
    schedule: &Schedule,
    cfg: &AugConfig,
) -> Result<(FrameTensor, SoftLabelTrack, Vec<Placement>)> {
    check_pair(base, base_label, donor, donor_label)?;
    if schedule.lambdas.len() != base.bins() || schedule.anchors.len() != base.bins() {
        return Err(Error::ShapeMismatch(
            "schedule length differs from bin count".into(),
        ));
    }
    let dims = FrameDims::of(base);
    let mut out = base.clone();
    let mut steps = Vec::with_capacity(base.bins());
    let mut placed = Vec::with_capacity(base.bins());
    for (t, frame) in out.frames_mut().enumerate() {
        let lambda = schedule.lambdas[t];
        let pl = place(
            dims.width,
            dims.height,
            dims.width,
            dims.height,
            lambda,
            schedule.anchors[t],
            cfg.anchor_mode,
        );
        clear_rect(frame, dims, pl.mask);
        match embed {
            EmbedMode::ZoomSplat => {
                crate::raster::splat(donor.frame(t), dims, lambda, pl.offset, frame, dims)
            }
            EmbedMode::CropReplace => copy_rect(frame, donor.frame(t), dims, pl.mask),
        }
        steps.push(mix_label_step(base_label, donor_label, pl.coverage)?);
        placed.push(pl);
    }
    Ok((
        out,
        SoftLabelTrack::from_steps(base_label.len(), steps)?,
        placed,
    ))
}

pub fn ablation_augment(
    base: &FrameTensor,
    base_label: &[f64],
    donor: &FrameTensor,
    donor_label: &[f64],
    variant: AblationVariant,
    cfg: &AugConfig,
    rng: &mut DeterministicRng,
) -> Result<(FrameTensor, SoftLabelTrack)> {
    check_pair(base, base_label, donor, donor_label)?;
    let want = [cfg.bins, cfg.channels(), cfg.height, cfg.width];
    if base.shape() != want {
        return Err(Error::ShapeMismatch(format!(
            "tensor {:?} does not match config {want:?}",
            base.shape()
        )));
    }
    let schedule = sample_schedule(variant, cfg, rng);
    let (out, labels, _) = ablation_with_schedule(
        base,
        base_label,
        donor,
        donor_label,
        variant.embed,
        &schedule,
        cfg,
    )?;
    Ok((out, labels))
}
