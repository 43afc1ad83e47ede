//! Event-to-frame binning and the forward-splat geometric primitive.
//!
//! A splat maps every source cell `(x, y)` to `(floor(x * lambda) + ox,
//! floor(y * lambda) + oy)` and adds its value there. Collisions sum, and
//! destinations outside the canvas are dropped. Events are mapped with the
//! same [`scaled_coord`] so that sparse and dense transforms agree exactly.

use crate::error::{Error, Result};
use crate::event::{EventStream, FrameTensor, Rect, CHANNELS};

/// Channel/height/width of one time step of a tensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameDims {
    pub channels: usize,
    pub height: usize,
    pub width: usize,
}

impl FrameDims {
    pub fn new(channels: usize, height: usize, width: usize) -> Self {
        FrameDims {
            channels,
            height,
            width,
        }
    }

    pub fn of(t: &FrameTensor) -> Self {
        FrameDims::new(t.channels(), t.height(), t.width())
    }

    pub fn len(&self) -> usize {
        self.channels * self.height * self.width
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Scaled source coordinate before offsetting.
#[inline]
pub fn scaled_coord(v: usize, lambda: f64) -> i64 {
    (v as f64 * lambda).floor() as i64
}

/// Time bin for timestamp `t`; the last bin absorbs `t >= duration`.
#[inline]
pub fn bin_of(t: u32, bins: usize, duration: u32) -> usize {
    let b = (t as u64 * bins as u64 / duration as u64) as usize;
    b.min(bins - 1)
}

pub fn rasterize(s: &EventStream, bins: usize, height: usize, width: usize) -> Result<FrameTensor> {
    if s.width as usize != width || s.height as usize != height {
        return Err(Error::GeometryMismatch {
            stream_w: s.width as usize,
            stream_h: s.height as usize,
            target_w: width,
            target_h: height,
        });
    }
    if s.duration == 0 && !s.events.is_empty() {
        return Err(Error::ZeroDuration);
    }
    let mut out = FrameTensor::zeros(bins, CHANNELS, height, width)?;
    for e in &s.events {
        if e.x >= s.width || e.y >= s.height {
            continue;
        }
        let b = bin_of(e.t, bins, s.duration);
        out.add_at(b, e.polarity.channel(), e.y as usize, e.x as usize, 1.0);
    }
    Ok(out)
}

/// Destination lookup for one axis: `Some(dst)` when the scaled coordinate
/// lands inside `[0, dst_len)`.
fn axis_map(src_len: usize, lambda: f64, offset: i64, dst_len: usize) -> Vec<Option<usize>> {
    (0..src_len)
        .map(|v| {
            let d = scaled_coord(v, lambda) + offset;
            (d >= 0 && d < dst_len as i64).then_some(d as usize)
        })
        .collect()
}

/// Adds the forward splat of `src` onto `canvas`. Both are single time steps
/// laid out channel-major; the channel count must match.
pub fn splat(
    src: &[f32],
    src_dims: FrameDims,
    lambda: f64,
    offset: (i64, i64),
    canvas: &mut [f32],
    dst_dims: FrameDims,
) {
    debug_assert!(lambda > 0.0);
    debug_assert_eq!(src.len(), src_dims.len());
    debug_assert_eq!(canvas.len(), dst_dims.len());
    debug_assert_eq!(src_dims.channels, dst_dims.channels);

    let xs = axis_map(src_dims.width, lambda, offset.0, dst_dims.width);
    let ys = axis_map(src_dims.height, lambda, offset.1, dst_dims.height);
    let src_plane = src_dims.height * src_dims.width;
    let dst_plane = dst_dims.height * dst_dims.width;

    for c in 0..src_dims.channels {
        let src_c = &src[c * src_plane..(c + 1) * src_plane];
        let dst_c = &mut canvas[c * dst_plane..(c + 1) * dst_plane];
        for (y, dy) in ys.iter().enumerate() {
            let Some(dy) = *dy else { continue };
            let row = &src_c[y * src_dims.width..(y + 1) * src_dims.width];
            let dst_row = &mut dst_c[dy * dst_dims.width..(dy + 1) * dst_dims.width];
            for (&v, dx) in row.iter().zip(&xs) {
                if v > 0.0 {
                    if let Some(dx) = *dx {
                        dst_row[dx] += v;
                    }
                }
            }
        }
    }
}

/// Unclipped bounding box of every destination a splat can write.
pub fn splat_extent(src_w: usize, src_h: usize, lambda: f64, offset: (i64, i64)) -> Rect {
    Rect {
        x0: offset.0,
        y0: offset.1,
        w: (scaled_coord(src_w - 1, lambda) + 1) as usize,
        h: (scaled_coord(src_h - 1, lambda) + 1) as usize,
    }
}

/// Uniform downscale of every bin and channel by forward splat.
pub fn downscale_frames(
    frames: &FrameTensor,
    target_h: usize,
    target_w: usize,
) -> Result<FrameTensor> {
    let [bins, channels, h, w] = frames.shape();
    if target_h * w != target_w * h {
        return Err(Error::NonUniformScale {
            src_w: w,
            src_h: h,
            dst_w: target_w,
            dst_h: target_h,
        });
    }
    if target_w > w || target_h > h || target_w == 0 {
        return Err(Error::ShapeMismatch(format!(
            "cannot downscale {w}x{h} to {target_w}x{target_h}"
        )));
    }
    if target_w == w {
        return Ok(frames.clone());
    }
    let lambda = target_w as f64 / w as f64;
    let src_dims = FrameDims::new(channels, h, w);
    let dst_dims = FrameDims::new(channels, target_h, target_w);
    let mut out = FrameTensor::zeros(bins, channels, target_h, target_w)?;
    for (src, dst) in frames.frames().zip(out.frames_mut()) {
        splat(src, src_dims, lambda, (0, 0), dst, dst_dims);
    }
    Ok(out)
}
