//! C ABI over the `eventzoom` crate.
//!
//! Objects cross the boundary as opaque handles (`EvzStream`, `EvzFrames`,
//! `EvzLabels`) that the caller releases with the matching `*_free`. Every
//! fallible call returns an [`EvzStatus`]; on failure a description is
//! available from [`evz_last_error_message`] on the same thread until the next
//! call. Panics never unwind into C: they are reported as `EVZ_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use eventzoom::codec;
use eventzoom::raster::{downscale_frames, rasterize};
use eventzoom::{
    eventzoom_frames, AnchorMode, AugConfig, DeterministicRng, Error, Event, EventStream,
    FrameTensor, Polarity, SoftLabelTrack,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvzStatus {
    EvzOk = 0,
    EvzNullPointer = 1,
    EvzInvalidArgument = 2,
    EvzIo = 3,
    EvzFormat = 4,
    EvzShape = 5,
    EvzPanic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvzAnchorMode {
    EvzAnchorCenter = 0,
    EvzAnchorTopLeft = 1,
}

/// Augmentation parameters. Tensor geometry is taken from the base tensor.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EvzConfig {
    pub mixnum: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub anchor_mode: EvzAnchorMode,
}

/// One event; `polarity` is +1 or -1.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvzEvent {
    pub t: u32,
    pub x: u16,
    pub y: u16,
    pub polarity: i8,
}

pub struct EvzStream(EventStream);
pub struct EvzFrames(FrameTensor);
pub struct EvzLabels(SoftLabelTrack);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure {
    status: EvzStatus,
    message: String,
}

impl Failure {
    fn new(status: EvzStatus, message: impl Into<String>) -> Self {
        Failure {
            status,
            message: message.into(),
        }
    }

    fn null(what: &str) -> Self {
        Failure::new(EvzStatus::EvzNullPointer, format!("{what} is null"))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Io { .. } => EvzStatus::EvzIo,
            Error::NotEvt1
            | Error::NotEvzf
            | Error::UnexpectedEof
            | Error::CorruptRecord(_)
            | Error::Parse { .. }
            | Error::TruncatedTensor
            | Error::InvalidEvent { .. }
            | Error::DuplicateEntry(_) => EvzStatus::EvzFormat,
            Error::ShapeMismatch(_)
            | Error::GeometryMismatch { .. }
            | Error::NonUniformScale { .. }
            | Error::DimensionTooLarge(_)
            | Error::DonorCountMismatch { .. } => EvzStatus::EvzShape,
            _ => EvzStatus::EvzInvalidArgument,
        };
        Failure::new(status, e.to_string())
    }
}

fn set_last_error(message: Option<String>) {
    let c = message.map(|m| CString::new(m.replace('\0', " ")).expect("nul bytes removed"));
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> EvzStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_last_error(None);
            EvzStatus::EvzOk
        }
        Ok(Err(f)) => {
            set_last_error(Some(f.message));
            f.status
        }
        Err(_) => {
            set_last_error(Some("internal panic".into()));
            EvzStatus::EvzPanic
        }
    }
}

unsafe fn path_arg<'a>(path: *const c_char) -> Result<&'a str, Failure> {
    if path.is_null() {
        return Err(Failure::null("path"));
    }
    CStr::from_ptr(path)
        .to_str()
        .map_err(|_| Failure::new(EvzStatus::EvzInvalidArgument, "path is not valid UTF-8"))
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure::null(what))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_arg<T>(out: *mut *mut T, what: &str) -> Result<&'static mut *mut T, Failure> {
    let slot = out.as_mut().ok_or_else(|| Failure::null(what))?;
    *slot = ptr::null_mut();
    Ok(slot)
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

/// Message for the most recent failure on this thread, or null after a
/// successful call. Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn evz_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn evz_config_default() -> EvzConfig {
    let d = AugConfig::default();
    EvzConfig {
        mixnum: d.mixnum,
        lambda_min: d.lambda_min,
        lambda_max: d.lambda_max,
        anchor_mode: EvzAnchorMode::EvzAnchorCenter,
    }
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn evz_stream_read_evt(
    path: *const c_char,
    out: *mut *mut EvzStream,
) -> EvzStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let stream = codec::load_evt(path_arg(path)?)?;
        *out = boxed(EvzStream(stream));
        Ok(())
    })
}

/// # Safety
/// `stream` must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn evz_stream_write_evt(
    stream: *const EvzStream,
    path: *const c_char,
) -> EvzStatus {
    guard(|| {
        let stream = handle(stream, "stream")?;
        codec::save_evt(path_arg(path)?, &stream.0)?;
        Ok(())
    })
}

/// Builds a stream from `n` events; they are stably sorted by time.
///
/// # Safety
/// `events` must point to `n` readable elements (may be null when `n == 0`).
#[no_mangle]
pub unsafe extern "C" fn evz_stream_from_events(
    width: u16,
    height: u16,
    duration: u32,
    events: *const EvzEvent,
    n: usize,
    out: *mut *mut EvzStream,
) -> EvzStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let raw = slice_arg(events, n, "events")?;
        let events = raw
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let p = Polarity::from_i8(e.polarity).ok_or_else(|| {
                    Failure::new(
                        EvzStatus::EvzInvalidArgument,
                        format!("event {i}: polarity {} is not +1 or -1", e.polarity),
                    )
                })?;
                Ok(Event::new(e.t, e.x, e.y, p))
            })
            .collect::<Result<Vec<_>, Failure>>()?;
        let stream = EventStream::new(width, height, duration, events).sorted()?;
        if let Some(v) = stream.validate().first() {
            return Err(Failure::new(EvzStatus::EvzInvalidArgument, v.to_string()));
        }
        *out = boxed(EvzStream(stream));
        Ok(())
    })
}

/// Number of events; 0 for a null handle.
///
/// # Safety
/// `stream` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn evz_stream_len(stream: *const EvzStream) -> usize {
    stream.as_ref().map_or(0, |s| s.0.len())
}

/// Copies event `index` into `out`.
///
/// # Safety
/// `stream` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn evz_stream_event(
    stream: *const EvzStream,
    index: usize,
    out: *mut EvzEvent,
) -> EvzStatus {
    guard(|| {
        let stream = handle(stream, "stream")?;
        let out = out.as_mut().ok_or_else(|| Failure::null("out"))?;
        let e = stream.0.events.get(index).ok_or_else(|| {
            Failure::new(
                EvzStatus::EvzInvalidArgument,
                format!("index {index} out of range for {} events", stream.0.len()),
            )
        })?;
        *out = EvzEvent {
            t: e.t,
            x: e.x,
            y: e.y,
            polarity: e.polarity.as_i8(),
        };
        Ok(())
    })
}

/// # Safety
/// `stream` must be null or come from this library, and not be used after.
#[no_mangle]
pub unsafe extern "C" fn evz_stream_free(stream: *mut EvzStream) {
    if !stream.is_null() {
        drop(Box::from_raw(stream));
    }
}

/// Bins `stream` into a `bins x 2 x height x width` tensor, downscaling when
/// the requested geometry is smaller than the stream's.
///
/// # Safety
/// `stream` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn evz_rasterize(
    stream: *const EvzStream,
    bins: usize,
    height: usize,
    width: usize,
    out: *mut *mut EvzFrames,
) -> EvzStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let s = &handle(stream, "stream")?.0;
        let native = rasterize(s, bins, s.height as usize, s.width as usize)?;
        let frames = if (height, width) == (native.height(), native.width()) {
            native
        } else {
            downscale_frames(&native, height, width)?
        };
        *out = boxed(EvzFrames(frames));
        Ok(())
    })
}

/// Copies `len` values laid out as `[bins][channels][height][width]`.
///
/// # Safety
/// `data` must point to `len` readable floats.
#[no_mangle]
pub unsafe extern "C" fn evz_frames_from_data(
    bins: usize,
    channels: usize,
    height: usize,
    width: usize,
    data: *const f32,
    len: usize,
    out: *mut *mut EvzFrames,
) -> EvzStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let values = slice_arg(data, len, "data")?.to_vec();
        *out = boxed(EvzFrames(FrameTensor::from_vec(
            bins, channels, height, width, values,
        )?));
        Ok(())
    })
}

/// Writes `[bins, channels, height, width]` into `shape`.
///
/// # Safety
/// `frames` must come from this library; `shape` must hold 4 elements.
#[no_mangle]
pub unsafe extern "C" fn evz_frames_shape(
    frames: *const EvzFrames,
    shape: *mut usize,
) -> EvzStatus {
    guard(|| {
        let f = handle(frames, "frames")?;
        if shape.is_null() {
            return Err(Failure::null("shape"));
        }
        std::slice::from_raw_parts_mut(shape, 4).copy_from_slice(&f.0.shape());
        Ok(())
    })
}

/// Borrowed pointer to the tensor values, valid while `frames` lives.
///
/// # Safety
/// `frames` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn evz_frames_data(frames: *const EvzFrames) -> *const f32 {
    frames
        .as_ref()
        .map_or(ptr::null(), |f| f.0.as_slice().as_ptr())
}

/// Number of values in the tensor; 0 for a null handle.
///
/// # Safety
/// `frames` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn evz_frames_len(frames: *const EvzFrames) -> usize {
    frames.as_ref().map_or(0, |f| f.0.as_slice().len())
}

/// # Safety
/// `frames` must be null or come from this library, and not be used after.
#[no_mangle]
pub unsafe extern "C" fn evz_frames_free(frames: *mut EvzFrames) {
    if !frames.is_null() {
        drop(Box::from_raw(frames));
    }
}

/// Runs EventZoom on dense tensors.
///
/// `donors` holds `config.mixnum` tensors shaped like `base`;
/// `donor_labels` holds `config.mixnum * num_classes` values, one row per
/// donor. The same `seed` always yields the same output.
///
/// # Safety
/// All pointers must be valid for the element counts above; `out_frames`
/// and `out_labels` must be writable.
#[no_mangle]
pub unsafe extern "C" fn evz_eventzoom_frames(
    base: *const EvzFrames,
    base_label: *const f64,
    num_classes: usize,
    donors: *const *const EvzFrames,
    donor_labels: *const f64,
    config: *const EvzConfig,
    seed: u64,
    out_frames: *mut *mut EvzFrames,
    out_labels: *mut *mut EvzLabels,
) -> EvzStatus {
    guard(|| {
        let out_frames = out_arg(out_frames, "out_frames")?;
        let out_labels = out_arg(out_labels, "out_labels")?;
        let base = &handle(base, "base")?.0;
        let config = handle(config, "config")?;
        let m = config.mixnum;
        let base_label = slice_arg(base_label, num_classes, "base_label")?;
        let donor_ptrs = slice_arg(donors, m, "donors")?;
        let donor_labels = slice_arg(donor_labels, m * num_classes, "donor_labels")?;
        let donors = donor_ptrs
            .iter()
            .zip(donor_labels.chunks_exact(num_classes.max(1)))
            .map(|(&d, y)| Ok((&handle(d, "donor")?.0, y)))
            .collect::<Result<Vec<_>, Failure>>()?;

        let [bins, _, height, width] = base.shape();
        let cfg = AugConfig {
            mixnum: m,
            lambda_min: config.lambda_min,
            lambda_max: config.lambda_max,
            anchor_mode: match config.anchor_mode {
                EvzAnchorMode::EvzAnchorCenter => AnchorMode::Center,
                EvzAnchorMode::EvzAnchorTopLeft => AnchorMode::TopLeft,
            },
            bins,
            height,
            width,
            master_seed: seed,
            ..Default::default()
        };
        cfg.validate()?;
        let (frames, labels) = eventzoom_frames(
            base,
            base_label,
            &donors,
            &cfg,
            &mut DeterministicRng::new(seed),
        )?;
        *out_frames = boxed(EvzFrames(frames));
        *out_labels = boxed(EvzLabels(labels));
        Ok(())
    })
}

/// # Safety
/// `labels` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn evz_labels_num_classes(labels: *const EvzLabels) -> usize {
    labels.as_ref().map_or(0, |l| l.0.num_classes())
}

/// # Safety
/// `labels` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn evz_labels_steps(labels: *const EvzLabels) -> usize {
    labels.as_ref().map_or(0, |l| l.0.steps())
}

/// Borrowed pointer to the `num_classes` time-averaged label.
///
/// # Safety
/// `labels` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn evz_labels_averaged(labels: *const EvzLabels) -> *const f64 {
    labels
        .as_ref()
        .map_or(ptr::null(), |l| l.0.averaged().as_ptr())
}

/// Borrowed pointer to the label of time bin `step`, or null if out of range.
///
/// # Safety
/// `labels` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn evz_labels_step(labels: *const EvzLabels, step: usize) -> *const f64 {
    labels
        .as_ref()
        .and_then(|l| l.0.per_step().get(step))
        .map_or(ptr::null(), |s| s.as_ptr())
}

/// # Safety
/// `labels` must be null or come from this library, and not be used after.
#[no_mangle]
pub unsafe extern "C" fn evz_labels_free(labels: *mut EvzLabels) {
    if !labels.is_null() {
        drop(Box::from_raw(labels));
    }
}

/// Writes an EVZF file; `labels` may be null.
///
/// # Safety
/// Handles must come from this library; `path` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn evz_write_evzf(
    path: *const c_char,
    frames: *const EvzFrames,
    labels: *const EvzLabels,
) -> EvzStatus {
    guard(|| {
        let frames = handle(frames, "frames")?;
        let labels = labels.as_ref().map(|l| &l.0);
        codec::save_evzf(path_arg(path)?, &frames.0, labels)?;
        Ok(())
    })
}

/// Reads an EVZF file. `out_labels` may be null to skip labels; otherwise it
/// receives null when the file carries none.
///
/// # Safety
/// `path` must be NUL-terminated; out pointers must be writable or null as
/// described.
#[no_mangle]
pub unsafe extern "C" fn evz_read_evzf(
    path: *const c_char,
    out_frames: *mut *mut EvzFrames,
    out_labels: *mut *mut EvzLabels,
) -> EvzStatus {
    guard(|| {
        let out_frames = out_arg(out_frames, "out_frames")?;
        let out_labels = if out_labels.is_null() {
            None
        } else {
            Some(out_arg(out_labels, "out_labels")?)
        };
        let file = codec::load_evzf(path_arg(path)?)?;
        *out_frames = boxed(EvzFrames(file.frames));
        if let (Some(slot), Some(track)) = (out_labels, file.labels) {
            *slot = boxed(EvzLabels(track));
        }
        Ok(())
    })
}
