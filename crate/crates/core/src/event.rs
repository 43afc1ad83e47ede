//! Core value types: events, streams, dense frame tensors, label tracks and
//! rectangles.
//!
//! Everything here is a plain value. Once built, a stream or tensor is only
//! read by the transforms, so values can be shared freely between workers.

use std::fmt;

use crate::error::{Error, Result};

/// Number of polarity channels in a [`FrameTensor`].
pub const CHANNELS: usize = 2;

/// Sign of a brightness change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(i8)]
pub enum Polarity {
    Positive = 1,
    Negative = -1,
}

impl Polarity {
    pub fn from_i8(v: i8) -> Option<Self> {
        match v {
            1 => Some(Polarity::Positive),
            -1 => Some(Polarity::Negative),
            _ => None,
        }
    }

    pub fn as_i8(self) -> i8 {
        self as i8
    }

    /// Frame channel: +1 maps to 0, -1 maps to 1.
    pub fn channel(self) -> usize {
        match self {
            Polarity::Positive => 0,
            Polarity::Negative => 1,
        }
    }
}

/// A single DVS event. Timestamps are integer microseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Event {
    pub t: u32,
    pub x: u16,
    pub y: u16,
    pub polarity: Polarity,
}

impl Event {
    pub fn new(t: u32, x: u16, y: u16, polarity: Polarity) -> Self {
        Event { t, x, y, polarity }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventStream {
    pub width: u16,
    pub height: u16,
    pub duration: u32,
    pub events: Vec<Event>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    XOutOfBounds(usize),
    YOutOfBounds(usize),
    Unsorted(usize),
    TimeOutOfRange(usize),
}

impl Violation {
    pub fn index(&self) -> usize {
        match *self {
            Violation::XOutOfBounds(i)
            | Violation::YOutOfBounds(i)
            | Violation::Unsorted(i)
            | Violation::TimeOutOfRange(i) => i,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::XOutOfBounds(i) => write!(f, "x out of bounds at index {i}"),
            Violation::YOutOfBounds(i) => write!(f, "y out of bounds at index {i}"),
            Violation::Unsorted(i) => write!(f, "unsorted at index {i}"),
            Violation::TimeOutOfRange(i) => write!(f, "t out of range at index {i}"),
        }
    }
}

impl EventStream {
    pub fn new(width: u16, height: u16, duration: u32, events: Vec<Event>) -> Self {
        EventStream {
            width,
            height,
            duration,
            events,
        }
    }

    pub fn empty(width: u16, height: u16, duration: u32) -> Self {
        Self::new(width, height, duration, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    fn in_bounds(&self, e: &Event) -> bool {
        e.x < self.width && e.y < self.height
    }

    /// Checks every stream invariant. Each kind of violation is reported once,
    /// at the first offending index.
    pub fn validate(&self) -> Vec<Violation> {
        let mut x_bad = None;
        let mut y_bad = None;
        let mut unsorted = None;
        let mut t_bad = None;
        for (i, e) in self.events.iter().enumerate() {
            if x_bad.is_none() && e.x >= self.width {
                x_bad = Some(Violation::XOutOfBounds(i));
            }
            if y_bad.is_none() && e.y >= self.height {
                y_bad = Some(Violation::YOutOfBounds(i));
            }
            if unsorted.is_none() && i > 0 && self.events[i - 1].t > e.t {
                unsorted = Some(Violation::Unsorted(i));
            }
            if t_bad.is_none() && e.t >= self.duration {
                t_bad = Some(Violation::TimeOutOfRange(i));
            }
        }
        let mut out: Vec<Violation> = [x_bad, y_bad, unsorted, t_bad]
            .into_iter()
            .flatten()
            .collect();
        out.sort_by_key(Violation::index);
        out
    }

    /// Stable sort by timestamp. Rejects streams holding out-of-bounds events.
    pub fn sorted(mut self) -> Result<Self> {
        if let Some(index) = self.events.iter().position(|e| !self.in_bounds(e)) {
            return Err(Error::InvalidEvent {
                index,
                reason: "coordinates outside sensor".into(),
            });
        }
        self.events.sort_by_key(|e| e.t);
        Ok(self)
    }
}

/// Free-function form of [`EventStream::validate`].
pub fn validate_stream(s: &EventStream) -> Vec<Violation> {
    s.validate()
}

/// Free-function form of [`EventStream::sorted`].
pub fn sort_events(s: EventStream) -> Result<EventStream> {
    s.sorted()
}

/// Dense `T x C x H x W` event counts, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTensor {
    bins: usize,
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl FrameTensor {
    pub fn zeros(bins: usize, channels: usize, height: usize, width: usize) -> Result<Self> {
        if bins == 0 || channels == 0 || height == 0 || width == 0 {
            return Err(Error::ShapeMismatch(format!(
                "dimensions must be positive, got {bins}x{channels}x{height}x{width}"
            )));
        }
        Ok(FrameTensor {
            bins,
            channels,
            height,
            width,
            data: vec![0.0; bins * channels * height * width],
        })
    }

    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn from_vec(
        bins: usize,
        channels: usize,
        height: usize,
        width: usize,
        data: Vec<f32>,
    ) -> Result<Self> {
        let mut t = Self::zeros(bins, channels, height, width)?;
        if data.len() != t.data.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values, got {}",
                t.data.len(),
                data.len()
            )));
        }
        if let Some(v) = data.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::ShapeMismatch(format!("negative or NaN value {v}")));
        }
        t.data = data;
        Ok(t)
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> [usize; 4] {
        [self.bins, self.channels, self.height, self.width]
    }

    pub fn frame_len(&self) -> usize {
        self.channels * self.height * self.width
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f32] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f32> {
        self.data
    }

    pub fn frame(&self, t: usize) -> &[f32] {
        let n = self.frame_len();
        &self.data[t * n..(t + 1) * n]
    }

    pub fn frame_mut(&mut self, t: usize) -> &mut [f32] {
        let n = self.frame_len();
        &mut self.data[t * n..(t + 1) * n]
    }

    pub fn frames(&self) -> std::slice::ChunksExact<'_, f32> {
        self.data.chunks_exact(self.frame_len())
    }

    pub fn frames_mut(&mut self) -> std::slice::ChunksExactMut<'_, f32> {
        let n = self.frame_len();
        self.data.chunks_exact_mut(n)
    }

    #[inline]
    pub fn offset(&self, t: usize, c: usize, y: usize, x: usize) -> usize {
        ((t * self.channels + c) * self.height + y) * self.width + x
    }

    pub fn get(&self, t: usize, c: usize, y: usize, x: usize) -> f32 {
        self.data[self.offset(t, c, y, x)]
    }

    pub fn add_at(&mut self, t: usize, c: usize, y: usize, x: usize, v: f32) {
        let i = self.offset(t, c, y, x);
        self.data[i] += v;
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().map(|&v| v as f64).sum()
    }

    pub fn channel_sum(&self, c: usize) -> f64 {
        let hw = self.height * self.width;
        self.data
            .chunks_exact(hw)
            .enumerate()
            .filter(|(i, _)| i % self.channels == c)
            .flat_map(|(_, plane)| plane.iter())
            .map(|&v| v as f64)
            .sum()
    }

    pub fn same_shape(&self, other: &FrameTensor) -> bool {
        self.shape() == other.shape()
    }

    pub(crate) fn check_same_shape(&self, other: &FrameTensor) -> Result<()> {
        if self.same_shape(other) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape(),
                other.shape()
            )))
        }
    }
}

/// Per-step class distributions plus their entrywise mean.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftLabelTrack {
    num_classes: usize,
    per_step: Vec<Vec<f64>>,
    averaged: Vec<f64>,
}

impl SoftLabelTrack {
    /// Builds a track from per-step distributions, computing the average.
    pub fn from_steps(num_classes: usize, per_step: Vec<Vec<f64>>) -> Result<Self> {
        if per_step.is_empty() {
            return Err(Error::InvalidLabel(
                "label track needs at least one step".into(),
            ));
        }
        if let Some(bad) = per_step.iter().find(|s| s.len() != num_classes) {
            return Err(Error::InvalidLabel(format!(
                "step has {} entries, expected {num_classes}",
                bad.len()
            )));
        }
        let steps = per_step.len() as f64;
        let averaged = (0..num_classes)
            .map(|k| per_step.iter().map(|s| s[k]).sum::<f64>() / steps)
            .collect();
        Ok(SoftLabelTrack {
            num_classes,
            per_step,
            averaged,
        })
    }

    /// Builds a track with an explicitly stored average, as read from disk.
    pub fn from_parts(
        num_classes: usize,
        per_step: Vec<Vec<f64>>,
        averaged: Vec<f64>,
    ) -> Result<Self> {
        if averaged.len() != num_classes || per_step.iter().any(|s| s.len() != num_classes) {
            return Err(Error::InvalidLabel("label width mismatch".into()));
        }
        Ok(SoftLabelTrack {
            num_classes,
            per_step,
            averaged,
        })
    }

    /// The same one-hot distribution at every step.
    pub fn constant(distribution: &[f64], steps: usize) -> Result<Self> {
        Self::from_steps(distribution.len(), vec![distribution.to_vec(); steps])
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn steps(&self) -> usize {
        self.per_step.len()
    }

    pub fn per_step(&self) -> &[Vec<f64>] {
        &self.per_step
    }

    pub fn averaged(&self) -> &[f64] {
        &self.averaged
    }

    /// Largest deviation of any distribution (per-step or averaged) from the
    /// probability simplex: either a negative entry or a sum away from 1.
    pub fn simplex_error(&self) -> f64 {
        self.per_step
            .iter()
            .chain(std::iter::once(&self.averaged))
            .map(|d| {
                let neg = d.iter().fold(0.0f64, |m, &v| m.max(-v));
                let sum: f64 = d.iter().sum();
                neg.max((sum - 1.0).abs())
            })
            .fold(0.0, f64::max)
    }
}

/// One-hot distribution over `num_classes` classes.
pub fn one_hot(class: usize, num_classes: usize) -> Result<Vec<f64>> {
    if class >= num_classes {
        return Err(Error::ClassOutOfRange { class, num_classes });
    }
    let mut v = vec![0.0; num_classes];
    v[class] = 1.0;
    Ok(v)
}

/// Axis-aligned pixel rectangle. The origin may be negative before clipping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn new(x0: i64, y0: i64, w: usize, h: usize) -> Self {
        Rect { x0, y0, w, h }
    }

    pub fn area(&self) -> usize {
        self.w * self.h
    }

    pub fn x1(&self) -> i64 {
        self.x0 + self.w as i64
    }

    pub fn y1(&self) -> i64 {
        self.y0 + self.h as i64
    }

    /// Intersection with `[0, width) x [0, height)`. An empty intersection
    /// yields a zero-extent rectangle anchored inside the frame.
    pub fn clip(&self, width: usize, height: usize) -> Rect {
        let cx0 = self.x0.clamp(0, width as i64);
        let cy0 = self.y0.clamp(0, height as i64);
        let cx1 = self.x1().clamp(0, width as i64);
        let cy1 = self.y1().clamp(0, height as i64);
        Rect {
            x0: cx0,
            y0: cy0,
            w: (cx1 - cx0).max(0) as usize,
            h: (cy1 - cy0).max(0) as usize,
        }
    }

    pub fn contains(&self, x: i64, y: i64) -> bool {
        x >= self.x0 && x < self.x1() && y >= self.y0 && y < self.y1()
    }
}
