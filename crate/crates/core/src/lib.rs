//! Progressive zoom-and-embed augmentation for event-camera data.
//!
//! Donor event sequences are scaled and shifted along linear trajectories and
//! embedded into a base sequence time step by time step, with per-step soft
//! labels weighted by the donor's footprint. The crate also carries mixing
//! baselines, ablation variants, binary formats, a synthetic moving-shape
//! dataset generator and a deterministic parallel dataset pipeline.

pub mod baselines;
pub mod codec;
pub mod config;
pub mod error;
pub mod event;
pub mod pipeline;
pub mod raster;
pub mod rng;
pub mod synth;
pub mod verify;
pub mod viz;
pub mod zoom;

pub use config::{AnchorMode, AugConfig, LabelMode, Strategy};
pub use error::{Error, Result};
pub use event::{
    one_hot, Event, EventStream, FrameTensor, Polarity, Rect, SoftLabelTrack, CHANNELS,
};
pub use rng::{child_rng, DeterministicRng};
pub use zoom::{eventzoom_events, eventzoom_frames, ZoomParams};
