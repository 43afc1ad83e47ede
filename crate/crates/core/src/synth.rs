//! Synthetic moving-shape event data.
//!
//! A shape outline moves linearly across the sensor; each outline pixel fires
//! a Poisson number of events per time bin. The half of the outline facing the
//! direction of motion emits positive events, the other half negative ones.

use std::f64::consts::PI;
use std::path::Path;

use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::codec::{save_evt, save_manifest, DatasetManifest, EntryKind, ManifestEntry};
use crate::error::{Error, Result};
use crate::event::{Event, EventStream, Polarity};
use crate::rng::{child_rng, DeterministicRng};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ShapeKind {
    Square,
    Circle,
    Triangle,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 3] = [ShapeKind::Square, ShapeKind::Circle, ShapeKind::Triangle];

    /// Distance from `(dx, dy)` (relative to the shape center) to the outline
    /// of a shape with circumradius-like size `r`.
    fn outline_distance(self, dx: f64, dy: f64, r: f64) -> f64 {
        match self {
            ShapeKind::Square => (dx.abs().max(dy.abs()) - r).abs(),
            ShapeKind::Circle => (dx.hypot(dy) - r).abs(),
            ShapeKind::Triangle => {
                let a = (0.0, -r);
                let b = (-r, r);
                let c = (r, r);
                let p = (dx, dy);
                segment_distance(p, a, b)
                    .min(segment_distance(p, b, c))
                    .min(segment_distance(p, c, a))
            }
        }
    }
}

fn segment_distance(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    let (vx, vy) = (b.0 - a.0, b.1 - a.1);
    let (wx, wy) = (p.0 - a.0, p.1 - a.1);
    let len2 = vx * vx + vy * vy;
    let u = if len2 > 0.0 {
        ((wx * vx + wy * vy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (wx - u * vx).hypot(wy - u * vy)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    /// Side length / diameter in pixels.
    pub size: f64,
    /// Center at bin 0.
    pub start: (f64, f64),
    /// Pixels per bin.
    pub velocity: (f64, f64),
    /// Mean events per outline pixel per bin.
    pub events_per_edge_pixel: f64,
}

impl ShapeSpec {
    pub fn center(&self, bin: usize) -> (f64, f64) {
        (
            self.start.0 + self.velocity.0 * bin as f64,
            self.start.1 + self.velocity.1 * bin as f64,
        )
    }

    /// Outline pixels at `bin`, clipped to the sensor, with their polarity.
    pub fn outline(&self, bin: usize, width: usize, height: usize) -> Vec<(u16, u16, Polarity)> {
        let (cx, cy) = self.center(bin);
        let r = self.size / 2.0;
        let reach = r + 1.0;
        let x_lo = ((cx - reach).floor().max(0.0)) as usize;
        let y_lo = ((cy - reach).floor().max(0.0)) as usize;
        let x_hi = ((cx + reach).ceil().max(0.0) as usize).min(width);
        let y_hi = ((cy + reach).ceil().max(0.0) as usize).min(height);
        let mut out = Vec::new();
        for y in y_lo..y_hi {
            for x in x_lo..x_hi {
                let dx = x as f64 - cx;
                let dy = y as f64 - cy;
                if self.kind.outline_distance(dx, dy, r) <= 0.5 {
                    let lead = dx * self.velocity.0 + dy * self.velocity.1 >= 0.0;
                    let p = if lead {
                        Polarity::Positive
                    } else {
                        Polarity::Negative
                    };
                    out.push((x as u16, y as u16, p));
                }
            }
        }
        out
    }
}

/// Renders `spec` over `bins` time bins of a `width x height` sensor.
pub fn gen_stream(
    spec: &ShapeSpec,
    bins: usize,
    height: u16,
    width: u16,
    duration: u32,
    rng: &mut DeterministicRng,
) -> Result<EventStream> {
    if bins == 0 || duration == 0 {
        return Err(Error::InvalidConfig(
            "bins and duration must be positive".into(),
        ));
    }
    let poisson = if spec.events_per_edge_pixel > 0.0 {
        Some(
            Poisson::new(spec.events_per_edge_pixel)
                .map_err(|e| Error::InvalidConfig(e.to_string()))?,
        )
    } else {
        None
    };
    let mut events = Vec::new();
    for b in 0..bins {
        let outline = spec.outline(b, width as usize, height as usize);
        if outline.is_empty() {
            return Err(Error::ShapeEscapesFrame(b));
        }
        let Some(poisson) = &poisson else { continue };
        // [ceil(b*D/T), ceil((b+1)*D/T)) bins back to exactly b
        let t0 = (b as u64 * duration as u64).div_ceil(bins as u64) as u32;
        let t1 = ((b as u64 + 1) * duration as u64).div_ceil(bins as u64) as u32;
        if t1 <= t0 {
            continue;
        }
        for (x, y, p) in outline {
            let k = poisson.sample(rng) as u64;
            for _ in 0..k {
                let t = t0 + rng.below((t1 - t0) as usize) as u32;
                events.push(Event::new(t, x, y, p));
            }
        }
    }
    events.sort_by_key(|e| e.t);
    Ok(EventStream::new(width, height, duration, events))
}

/// Sensor and binning geometry for generated data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthGeometry {
    pub bins: usize,
    pub height: u16,
    pub width: u16,
    pub duration: u32,
}

impl Default for SynthGeometry {
    fn default() -> Self {
        SynthGeometry {
            bins: 8,
            height: 48,
            width: 48,
            duration: 100_000,
        }
    }
}

/// Per-class parameter ranges: class `k` draws shape kind `k`, moves roughly
/// along direction `2*pi*k / num_classes`, and stays near the frame center.
pub fn sample_spec(
    class: usize,
    num_classes: usize,
    geometry: SynthGeometry,
    rng: &mut DeterministicRng,
) -> ShapeSpec {
    let w = geometry.width as f64;
    let h = geometry.height as f64;
    let side = w.min(h);
    let size = rng.uniform(0.2, 0.35) * side;
    let start = (rng.uniform(0.35, 0.65) * w, rng.uniform(0.35, 0.65) * h);
    let angle = 2.0 * PI * class as f64 / num_classes as f64 + rng.uniform(-0.3, 0.3);
    let speed = rng.uniform(0.5, 1.0) * side / (4.0 * geometry.bins.max(1) as f64);
    let rate = rng.uniform(1.0, 3.0);
    ShapeSpec {
        kind: ShapeKind::ALL[class % ShapeKind::ALL.len()],
        size,
        start,
        velocity: (speed * angle.cos(), speed * angle.sin()),
        events_per_edge_pixel: rate,
    }
}

/// Generates the sample with global index `index` of a dataset.
pub fn gen_sample(
    class: usize,
    num_classes: usize,
    index: usize,
    master_seed: u64,
    geometry: SynthGeometry,
) -> Result<EventStream> {
    let mut rng = child_rng(master_seed, index as u64);
    let spec = sample_spec(class, num_classes, geometry, &mut rng);
    gen_stream(
        &spec,
        geometry.bins,
        geometry.height,
        geometry.width,
        geometry.duration,
        &mut rng,
    )
}

/// Relative path of sample `j` of class `k` inside a generated dataset.
pub fn sample_path(class: usize, j: usize) -> String {
    format!("class{class}/sample{j:04}.evt")
}

/// Writes `num_classes * samples_per_class` EVT1 files plus `manifest.txt`
/// under `out_dir`. Output depends only on the arguments.
pub fn gen_dataset(
    num_classes: usize,
    samples_per_class: usize,
    out_dir: &Path,
    master_seed: u64,
    geometry: SynthGeometry,
) -> Result<DatasetManifest> {
    if !(2..=3).contains(&num_classes) {
        return Err(Error::InvalidConfig(format!(
            "num_classes must be 2 or 3, got {num_classes}"
        )));
    }
    let jobs: Vec<(usize, usize)> = (0..num_classes)
        .flat_map(|k| (0..samples_per_class).map(move |j| (k, j)))
        .collect();
    let entries = jobs
        .par_iter()
        .enumerate()
        .map(|(index, &(class, j))| {
            let stream = gen_sample(class, num_classes, index, master_seed, geometry)?;
            let rel = sample_path(class, j);
            save_evt(out_dir.join(&rel), &stream)?;
            Ok(ManifestEntry {
                path: rel,
                class,
                kind: EntryKind::Events,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let manifest = DatasetManifest {
        num_classes,
        entries,
    };
    save_manifest(out_dir.join("manifest.txt"), &manifest)?;
    Ok(manifest)
}

/// Uniformly scattered, time-sorted events. Handy for fixtures and benches.
pub fn random_stream(
    rng: &mut DeterministicRng,
    n: usize,
    width: u16,
    height: u16,
    duration: u32,
) -> EventStream {
    let mut events: Vec<Event> = (0..n)
        .map(|_| {
            let t = rng.below(duration as usize) as u32;
            let x = rng.below(width as usize) as u16;
            let y = rng.below(height as usize) as u16;
            let p = if rng.next_f64() < 0.5 {
                Polarity::Positive
            } else {
                Polarity::Negative
            };
            Event::new(t, x, y, p)
        })
        .collect();
    events.sort_by_key(|e| e.t);
    EventStream::new(width, height, duration, events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::bin_of;
    use std::collections::HashSet;

    fn spec(kind: ShapeKind, velocity: (f64, f64), rate: f64) -> ShapeSpec {
        ShapeSpec {
            kind,
            size: 12.0,
            start: (24.0, 24.0),
            velocity,
            events_per_edge_pixel: rate,
        }
    }

    #[test]
    fn zero_rate_is_empty() {
        let s = gen_stream(
            &spec(ShapeKind::Circle, (1.0, 0.0), 0.0),
            8,
            48,
            48,
            8000,
            &mut DeterministicRng::new(1),
        )
        .unwrap();
        assert!(s.is_empty());
    }

    #[test]
    fn static_shape_stays_on_outline() {
        for kind in ShapeKind::ALL {
            let sp = spec(kind, (0.0, 0.0), 5.0);
            let s = gen_stream(&sp, 8, 48, 48, 8000, &mut DeterministicRng::new(2)).unwrap();
            assert!(!s.is_empty());
            let outline: HashSet<(u16, u16)> = sp
                .outline(0, 48, 48)
                .iter()
                .map(|&(x, y, _)| (x, y))
                .collect();
            assert!(s.events.iter().all(|e| outline.contains(&(e.x, e.y))));
            assert!(s.validate().is_empty());
            // every bin is populated
            let bins: HashSet<usize> = s.events.iter().map(|e| bin_of(e.t, 8, 8000)).collect();
            assert_eq!(bins.len(), 8);
        }
    }

    #[test]
    fn events_land_in_their_bin() {
        let sp = spec(ShapeKind::Square, (1.5, -0.5), 2.0);
        let s = gen_stream(&sp, 3, 48, 48, 10, &mut DeterministicRng::new(3)).unwrap();
        for e in &s.events {
            let b = bin_of(e.t, 3, 10);
            let outline: Vec<(u16, u16)> = sp
                .outline(b, 48, 48)
                .iter()
                .map(|&(x, y, _)| (x, y))
                .collect();
            assert!(outline.contains(&(e.x, e.y)));
        }
    }

    #[test]
    fn leading_edge_is_positive() {
        let sp = spec(ShapeKind::Square, (1.0, 0.0), 1.0);
        for (x, _, p) in sp.outline(0, 48, 48) {
            let expected = if x as f64 >= 24.0 {
                Polarity::Positive
            } else {
                Polarity::Negative
            };
            assert_eq!(p, expected);
        }
    }

    #[test]
    fn escaping_shape() {
        let sp = ShapeSpec {
            start: (40.0, 24.0),
            ..spec(ShapeKind::Circle, (10.0, 0.0), 1.0)
        };
        assert!(matches!(
            gen_stream(&sp, 8, 48, 48, 8000, &mut DeterministicRng::new(0)),
            Err(Error::ShapeEscapesFrame(_))
        ));
    }

    #[test]
    fn deterministic_generation() {
        let g = SynthGeometry::default();
        let a = gen_sample(1, 3, 5, 99, g).unwrap();
        let b = gen_sample(1, 3, 5, 99, g).unwrap();
        assert_eq!(crate::codec::write_evt(&a), crate::codec::write_evt(&b));
    }

    #[test]
    fn generated_samples_are_valid() {
        let g = SynthGeometry::default();
        for i in 0..60 {
            let s = gen_sample(i % 3, 3, i, 7, g).unwrap();
            assert!(s.validate().is_empty());
            assert!(!s.is_empty());
        }
    }
}
