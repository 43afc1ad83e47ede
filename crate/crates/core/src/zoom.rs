//! Progressive zoom-and-embed augmentation.
//!
//! Each donor gets a linear trajectory: a start and end scale and a start and
//! end anchor position, interpolated across time steps. At every step the
//! donor frame is scaled and shifted by forward splat, the base content under
//! the donor's footprint is cleared, and the donor is added. The label at that
//! step moves toward the donor's class in proportion to the footprint's share
//! of the frame. Donors are embedded one after another, each on top of the
//! previous result.
//!
//! The dense path ([`eventzoom_frames`]) and the sparse path
//! ([`eventzoom_events`]) consume identical random draws and use the same
//! placement arithmetic, so rasterizing the sparse result reproduces the dense
//! result exactly.

use crate::config::{AnchorMode, AugConfig};
use crate::error::{Error, Result};
use crate::event::{EventStream, FrameTensor, Rect, SoftLabelTrack};
use crate::raster::{bin_of, scaled_coord, splat, splat_extent, FrameDims};
use crate::rng::DeterministicRng;

/// One donor's sampled trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZoomParams {
    pub donor_index: usize,
    pub lambda_start: f64,
    pub lambda_end: f64,
    pub anchor_start: (f64, f64),
    pub anchor_end: (f64, f64),
}

/// Where a donor lands at one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub lambda: f64,
    pub offset: (i64, i64),
    /// Footprint clipped to the frame.
    pub mask: Rect,
    /// Mask area over frame area.
    pub coverage: f64,
}

/// Draws a trajectory for an already chosen donor: start scale, end scale,
/// start anchor (x, y), end anchor (x, y), in that order.
pub fn sample_trajectory(
    rng: &mut DeterministicRng,
    cfg: &AugConfig,
    donor_index: usize,
) -> ZoomParams {
    let lambda_start = rng.uniform(cfg.lambda_min, cfg.lambda_max);
    let lambda_end = rng.uniform(cfg.lambda_min, cfg.lambda_max);
    let w = cfg.width as f64;
    let h = cfg.height as f64;
    let anchor_start = (rng.uniform(0.0, w), rng.uniform(0.0, h));
    let anchor_end = (rng.uniform(0.0, w), rng.uniform(0.0, h));
    ZoomParams {
        donor_index,
        lambda_start,
        lambda_end,
        anchor_start,
        anchor_end,
    }
}

/// Picks a donor other than `exclude` (re-drawing on collision), then draws
/// its trajectory. Donors may come from any class.
pub fn sample_zoom_params(
    rng: &mut DeterministicRng,
    cfg: &AugConfig,
    dataset_size: usize,
    exclude: usize,
) -> Result<ZoomParams> {
    let donor_index = sample_donor(rng, dataset_size, exclude)?;
    Ok(sample_trajectory(rng, cfg, donor_index))
}

/// Uniform dataset index different from `exclude`, one draw per attempt.
pub fn sample_donor(
    rng: &mut DeterministicRng,
    dataset_size: usize,
    exclude: usize,
) -> Result<usize> {
    if dataset_size < 2 {
        return Err(Error::NoDonor(dataset_size));
    }
    loop {
        let i = rng.below(dataset_size);
        if i != exclude {
            return Ok(i);
        }
        log::debug!("donor draw hit base index {exclude}, redrawing");
    }
}

/// Normalized time in `[0, 1]`; a single step sits at 0.
#[inline]
fn unit_time(t: usize, bins: usize) -> f64 {
    if bins <= 1 {
        0.0
    } else {
        t as f64 / (bins - 1) as f64
    }
}

#[inline]
fn lerp(a: f64, b: f64, u: f64) -> f64 {
    (1.0 - u) * a + u * b
}

pub fn interp_scale(params: &ZoomParams, t: usize, bins: usize) -> f64 {
    lerp(params.lambda_start, params.lambda_end, unit_time(t, bins))
}

pub fn interp_pos(params: &ZoomParams, t: usize, bins: usize) -> (f64, f64) {
    let u = unit_time(t, bins);
    (
        lerp(params.anchor_start.0, params.anchor_end.0, u),
        lerp(params.anchor_start.1, params.anchor_end.1, u),
    )
}

/// Computes offset, clipped mask and coverage for a donor of `src_w x src_h`
/// scaled by `lambda` and anchored at `anchor` on a `width x height` frame.
pub fn place(
    src_w: usize,
    src_h: usize,
    width: usize,
    height: usize,
    lambda: f64,
    anchor: (f64, f64),
    mode: AnchorMode,
) -> Placement {
    let probe = splat_extent(src_w, src_h, lambda, (0, 0));
    let ax = anchor.0.round() as i64;
    let ay = anchor.1.round() as i64;
    let offset = match mode {
        AnchorMode::Center => (ax - (probe.w / 2) as i64, ay - (probe.h / 2) as i64),
        AnchorMode::TopLeft => (ax, ay),
    };
    let mask = splat_extent(src_w, src_h, lambda, offset).clip(width, height);
    Placement {
        lambda,
        offset,
        mask,
        coverage: mask.area() as f64 / (width * height) as f64,
    }
}

/// Zeroes `mask` in every channel of one time step.
pub(crate) fn clear_rect(frame: &mut [f32], dims: FrameDims, mask: Rect) {
    if mask.area() == 0 {
        return;
    }
    let plane = dims.height * dims.width;
    let (x0, y0) = (mask.x0 as usize, mask.y0 as usize);
    for c in 0..dims.channels {
        for y in y0..y0 + mask.h {
            let row = c * plane + y * dims.width;
            frame[row + x0..row + x0 + mask.w].fill(0.0);
        }
    }
}

/// Embeds one donor time step into `frame` in place and returns where it
/// landed. Both frames must share `dims`.
pub fn embed_step(
    frame: &mut [f32],
    donor: &[f32],
    dims: FrameDims,
    lambda: f64,
    anchor: (f64, f64),
    mode: AnchorMode,
) -> Placement {
    let p = place(
        dims.width,
        dims.height,
        dims.width,
        dims.height,
        lambda,
        anchor,
        mode,
    );
    clear_rect(frame, dims, p.mask);
    splat(donor, dims, lambda, p.offset, frame, dims);
    p
}

/// `(1 - a) * prev + a * donor`.
pub fn mix_label_step(prev: &[f64], donor: &[f64], coverage: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&coverage) {
        return Err(Error::CoverageOutOfRange(coverage));
    }
    if prev.len() != donor.len() {
        return Err(Error::InvalidLabel(format!(
            "label widths differ: {} vs {}",
            prev.len(),
            donor.len()
        )));
    }
    Ok(prev
        .iter()
        .zip(donor)
        .map(|(&p, &d)| (1.0 - coverage) * p + coverage * d)
        .collect())
}

fn placements(
    params: &ZoomParams,
    dims: FrameDims,
    bins: usize,
    mode: AnchorMode,
) -> Vec<Placement> {
    (0..bins)
        .map(|t| {
            place(
                dims.width,
                dims.height,
                dims.width,
                dims.height,
                interp_scale(params, t, bins),
                interp_pos(params, t, bins),
                mode,
            )
        })
        .collect()
}

fn check_label(label: &[f64], num_classes: usize) -> Result<()> {
    if label.len() != num_classes {
        return Err(Error::InvalidLabel(format!(
            "label has {} classes, expected {num_classes}",
            label.len()
        )));
    }
    Ok(())
}

/// Result of a traced zoom run: the mixed data, its label track, and the
/// per-donor, per-step placements that produced them.
#[derive(Debug, Clone)]
pub struct Zoomed<T> {
    pub data: T,
    pub labels: SoftLabelTrack,
    pub params: Vec<ZoomParams>,
    pub placements: Vec<Vec<Placement>>,
}

/// Dense embedding with explicit trajectories, one per donor.
pub fn zoom_frames_with_params(
    base: &FrameTensor,
    base_label: &[f64],
    donors: &[(&FrameTensor, &[f64])],
    params: &[ZoomParams],
    mode: AnchorMode,
) -> Result<Zoomed<FrameTensor>> {
    if donors.len() != params.len() {
        return Err(Error::DonorCountMismatch {
            expected: params.len(),
            got: donors.len(),
        });
    }
    let n = base_label.len();
    for (donor, label) in donors {
        base.check_same_shape(donor)?;
        check_label(label, n)?;
    }
    let bins = base.bins();
    let dims = FrameDims::of(base);
    let mut out = base.clone();
    let mut steps = vec![base_label.to_vec(); bins];
    let mut all = Vec::with_capacity(donors.len());

    for ((donor, donor_label), p) in donors.iter().zip(params) {
        let placed = placements(p, dims, bins, mode);
        for (t, (frame, pl)) in out.frames_mut().zip(&placed).enumerate() {
            clear_rect(frame, dims, pl.mask);
            splat(donor.frame(t), dims, pl.lambda, pl.offset, frame, dims);
            steps[t] = mix_label_step(&steps[t], donor_label, pl.coverage)?;
        }
        all.push(placed);
    }
    Ok(Zoomed {
        data: out,
        labels: SoftLabelTrack::from_steps(n, steps)?,
        params: params.to_vec(),
        placements: all,
    })
}

fn check_frames_cfg(base: &FrameTensor, cfg: &AugConfig, donors: usize) -> Result<()> {
    if donors != cfg.mixnum {
        return Err(Error::DonorCountMismatch {
            expected: cfg.mixnum,
            got: donors,
        });
    }
    let want = [cfg.bins, cfg.channels(), cfg.height, cfg.width];
    if base.shape() != want {
        return Err(Error::ShapeMismatch(format!(
            "tensor {:?} does not match config {want:?}",
            base.shape()
        )));
    }
    Ok(())
}

/// Traced form of [`eventzoom_frames`].
pub fn eventzoom_frames_traced(
    base: &FrameTensor,
    base_label: &[f64],
    donors: &[(&FrameTensor, &[f64])],
    cfg: &AugConfig,
    rng: &mut DeterministicRng,
) -> Result<Zoomed<FrameTensor>> {
    check_frames_cfg(base, cfg, donors.len())?;
    let params: Vec<ZoomParams> = (0..donors.len())
        .map(|i| sample_trajectory(rng, cfg, i))
        .collect();
    zoom_frames_with_params(base, base_label, donors, &params, cfg.anchor_mode)
}

/// Embeds `cfg.mixnum` donors into `base`, drawing one trajectory per donor
/// from `rng`.
pub fn eventzoom_frames(
    base: &FrameTensor,
    base_label: &[f64],
    donors: &[(&FrameTensor, &[f64])],
    cfg: &AugConfig,
    rng: &mut DeterministicRng,
) -> Result<(FrameTensor, SoftLabelTrack)> {
    let z = eventzoom_frames_traced(base, base_label, donors, cfg, rng)?;
    Ok((z.data, z.labels))
}

/// Sparse embedding with explicit trajectories. Base events under a step's
/// mask are removed; donor events are moved with the same arithmetic as the
/// dense splat and dropped if they leave the sensor.
pub fn zoom_events_with_params(
    base: &EventStream,
    base_label: &[f64],
    donors: &[(&EventStream, &[f64])],
    params: &[ZoomParams],
    bins: usize,
    mode: AnchorMode,
) -> Result<Zoomed<EventStream>> {
    if donors.len() != params.len() {
        return Err(Error::DonorCountMismatch {
            expected: params.len(),
            got: donors.len(),
        });
    }
    let n = base_label.len();
    for (donor, label) in donors {
        if (donor.width, donor.height, donor.duration) != (base.width, base.height, base.duration) {
            return Err(Error::ShapeMismatch(format!(
                "donor stream {}x{} over {}us vs base {}x{} over {}us",
                donor.width, donor.height, donor.duration, base.width, base.height, base.duration
            )));
        }
        check_label(label, n)?;
    }
    if base.duration == 0 && (!base.is_empty() || donors.iter().any(|(d, _)| !d.is_empty())) {
        return Err(Error::ZeroDuration);
    }
    let (w, h) = (base.width as usize, base.height as usize);
    let dims = FrameDims::new(crate::event::CHANNELS, h, w);
    let duration = base.duration.max(1);
    let mut events = base.events.clone();
    let mut steps = vec![base_label.to_vec(); bins];
    let mut all = Vec::with_capacity(donors.len());

    for ((donor, donor_label), p) in donors.iter().zip(params) {
        let placed = placements(p, dims, bins, mode);
        events.retain(|e| {
            let m = placed[bin_of(e.t, bins, duration)].mask;
            !m.contains(e.x as i64, e.y as i64)
        });
        for e in &donor.events {
            if e.x >= donor.width || e.y >= donor.height {
                continue;
            }
            let pl = &placed[bin_of(e.t, bins, duration)];
            let x = scaled_coord(e.x as usize, pl.lambda) + pl.offset.0;
            let y = scaled_coord(e.y as usize, pl.lambda) + pl.offset.1;
            if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
                events.push(crate::event::Event {
                    x: x as u16,
                    y: y as u16,
                    ..*e
                });
            }
        }
        for (step, pl) in steps.iter_mut().zip(&placed) {
            *step = mix_label_step(step, donor_label, pl.coverage)?;
        }
        all.push(placed);
    }
    events.sort_by_key(|e| e.t);
    Ok(Zoomed {
        data: EventStream::new(base.width, base.height, base.duration, events),
        labels: SoftLabelTrack::from_steps(n, steps)?,
        params: params.to_vec(),
        placements: all,
    })
}

/// Sparse-domain counterpart of [`eventzoom_frames`]: same draws, same
/// placements, same labels.
pub fn eventzoom_events(
    base: &EventStream,
    base_label: &[f64],
    donors: &[(&EventStream, &[f64])],
    cfg: &AugConfig,
    rng: &mut DeterministicRng,
) -> Result<(EventStream, SoftLabelTrack)> {
    if donors.len() != cfg.mixnum {
        return Err(Error::DonorCountMismatch {
            expected: cfg.mixnum,
            got: donors.len(),
        });
    }
    if (base.width as usize, base.height as usize) != (cfg.width, cfg.height) {
        return Err(Error::ShapeMismatch(format!(
            "stream {}x{} does not match config {}x{}",
            base.width, base.height, cfg.width, cfg.height
        )));
    }
    let params: Vec<ZoomParams> = (0..donors.len())
        .map(|i| sample_trajectory(rng, cfg, i))
        .collect();
    let z = zoom_events_with_params(base, base_label, donors, &params, cfg.bins, cfg.anchor_mode)?;
    Ok((z.data, z.labels))
}
