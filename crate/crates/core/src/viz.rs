//! Plain (ASCII) PGM dumps of frame tensors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::codec::write_file;
use crate::error::{Error, Result};
use crate::event::FrameTensor;

/// Encodes a `width x height` plane as plain PGM, min-max normalized to
/// 0..=255. A constant plane maps to black.
pub fn plane_to_pgm(plane: &[f32], width: usize, height: usize) -> String {
    assert_eq!(
        plane.len(),
        width * height,
        "plane size does not match geometry"
    );
    let (lo, hi) = plane
        .iter()
        .fold((f32::INFINITY, f32::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let range = hi - lo;
    let mut out = format!("P2\n{width} {height}\n255\n");
    for row in plane.chunks_exact(width.max(1)) {
        let mut sep = "";
        for &v in row {
            let g = if range > 0.0 {
                ((v - lo) / range * 255.0).round() as u8
            } else {
                0
            };
            let _ = write!(out, "{sep}{g}");
            sep = " ";
        }
        out.push('\n');
    }
    out
}

/// Parses a plain PGM back into `(width, height, pixels)`.
pub fn parse_pgm(text: &str) -> Result<(usize, usize, Vec<u8>)> {
    let bad = |reason: &str| Error::Parse {
        line: 0,
        reason: reason.to_string(),
    };
    let mut tokens = text.split_ascii_whitespace();
    if tokens.next() != Some("P2") {
        return Err(bad("missing P2 magic"));
    }
    let mut num = || -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| bad("truncated"))?
            .parse()
            .map_err(|_| bad("not a number"))
    };
    let (w, h, max) = (num()?, num()?, num()?);
    if max != 255 {
        return Err(bad("maxval must be 255"));
    }
    let pixels = (0..w * h)
        .map(|_| num().and_then(|v| u8::try_from(v).map_err(|_| bad("pixel exceeds 255"))))
        .collect::<Result<Vec<_>>>()?;
    Ok((w, h, pixels))
}

/// Writes `t<k>_c<j>.pgm` for every bin and channel of `frames`. With
/// `compare`, also writes `strip_c<j>.pgm`: `frames` on the top row and
/// `compare` on the bottom row, one column per bin.
pub fn write_viz(
    frames: &FrameTensor,
    compare: Option<&FrameTensor>,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    let (h, w) = (frames.height(), frames.width());
    let plane = h * w;
    let mut written = Vec::new();
    for t in 0..frames.bins() {
        for (c, chunk) in frames.frame(t).chunks_exact(plane).enumerate() {
            let path = out_dir.join(format!("t{t}_c{c}.pgm"));
            write_file(&path, plane_to_pgm(chunk, w, h).as_bytes())?;
            written.push(path);
        }
    }
    if let Some(other) = compare {
        if !frames.same_shape(other) {
            return Err(Error::ShapeMismatch(format!(
                "cannot compare {:?} with {:?}",
                frames.shape(),
                other.shape()
            )));
        }
        let bins = frames.bins();
        for c in 0..frames.channels() {
            let mut strip = vec![0.0f32; 2 * h * bins * w];
            for (row, tensor) in [frames, other].into_iter().enumerate() {
                for t in 0..bins {
                    let src = &tensor.frame(t)[c * plane..(c + 1) * plane];
                    for y in 0..h {
                        let dst = (row * h + y) * bins * w + t * w;
                        strip[dst..dst + w].copy_from_slice(&src[y * w..(y + 1) * w]);
                    }
                }
            }
            let path = out_dir.join(format!("strip_c{c}.pgm"));
            write_file(&path, plane_to_pgm(&strip, bins * w, 2 * h).as_bytes())?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_plane_is_black() {
        let pgm = plane_to_pgm(&[3.0; 6], 3, 2);
        assert_eq!(pgm, "P2\n3 2\n255\n0 0 0\n0 0 0\n");
    }

    #[test]
    fn min_max_normalized() {
        let (w, h, px) = parse_pgm(&plane_to_pgm(&[1.0, 2.0, 3.0, 5.0], 2, 2)).unwrap();
        assert_eq!((w, h), (2, 2));
        assert_eq!(px, vec![0, 64, 128, 255]);
    }

    #[test]
    fn writes_every_plane_and_strip() {
        let dir = tempfile::tempdir().unwrap();
        let mut a = FrameTensor::zeros(3, 2, 4, 5).unwrap();
        a.add_at(1, 0, 2, 3, 4.0);
        let b = FrameTensor::zeros(3, 2, 4, 5).unwrap();
        let files = write_viz(&a, Some(&b), dir.path()).unwrap();
        assert_eq!(files.len(), 3 * 2 + 2);
        let strip = std::fs::read_to_string(dir.path().join("strip_c0.pgm")).unwrap();
        let (w, h, px) = parse_pgm(&strip).unwrap();
        assert_eq!((w, h), (15, 8));
        assert_eq!(px.iter().filter(|&&v| v == 255).count(), 1);
        assert_eq!(px[2 * 15 + 5 + 3], 255);
    }

    #[test]
    fn compare_rejects_shape_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let a = FrameTensor::zeros(3, 2, 4, 5).unwrap();
        let b = FrameTensor::zeros(2, 2, 4, 5).unwrap();
        assert!(matches!(
            write_viz(&a, Some(&b), dir.path()),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
