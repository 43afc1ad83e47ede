#ifndef EVENTZOOM_H
#define EVENTZOOM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EvzAnchorMode {
  EVZ_ANCHOR_CENTER = 0,
  EVZ_ANCHOR_TOP_LEFT = 1,
} EvzAnchorMode;

// Result code of every fallible call.
typedef enum EvzStatus {
  EVZ_OK = 0,
  EVZ_NULL_POINTER = 1,
  EVZ_INVALID_ARGUMENT = 2,
  EVZ_IO = 3,
  EVZ_FORMAT = 4,
  EVZ_SHAPE = 5,
  EVZ_PANIC = 99,
} EvzStatus;

typedef struct EvzFrames EvzFrames;

typedef struct EvzLabels EvzLabels;

typedef struct EvzStream EvzStream;

// Augmentation parameters. Tensor geometry is taken from the base tensor.
typedef struct EvzConfig {
  size_t mixnum;
  double lambda_min;
  double lambda_max;
  enum EvzAnchorMode anchor_mode;
} EvzConfig;

// One event; `polarity` is +1 or -1.
typedef struct EvzEvent {
  uint32_t t;
  uint16_t x;
  uint16_t y;
  int8_t polarity;
} EvzEvent;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null after a
// successful call. Valid until the next call on this thread.
const char *evz_last_error_message(void);

struct EvzConfig evz_config_default(void);

// # Safety
// `path` must be a NUL-terminated string and `out` a writable pointer.
enum EvzStatus evz_stream_read_evt(const char *path, struct EvzStream **out);

// # Safety
// `stream` must come from this library; `path` must be NUL-terminated.
enum EvzStatus evz_stream_write_evt(const struct EvzStream *stream, const char *path);

// Builds a stream from `n` events; they are stably sorted by time.
//
// # Safety
// `events` must point to `n` readable elements (may be null when `n == 0`).
enum EvzStatus evz_stream_from_events(uint16_t width,
                                      uint16_t height,
                                      uint32_t duration,
                                      const struct EvzEvent *events,
                                      size_t n,
                                      struct EvzStream **out);

// Number of events; 0 for a null handle.
//
// # Safety
// `stream` must be null or come from this library.
size_t evz_stream_len(const struct EvzStream *stream);

// Copies event `index` into `out`.
//
// # Safety
// `stream` must come from this library and `out` be writable.
enum EvzStatus evz_stream_event(const struct EvzStream *stream, size_t index, struct EvzEvent *out);

// # Safety
// `stream` must be null or come from this library, and not be used after.
void evz_stream_free(struct EvzStream *stream);

// Bins `stream` into a `bins x 2 x height x width` tensor, downscaling when
// the requested geometry is smaller than the stream's.
//
// # Safety
// `stream` must come from this library and `out` be writable.
enum EvzStatus evz_rasterize(const struct EvzStream *stream,
                             size_t bins,
                             size_t height,
                             size_t width,
                             struct EvzFrames **out);

// Copies `len` values laid out as `[bins][channels][height][width]`.
//
// # Safety
// `data` must point to `len` readable floats.
enum EvzStatus evz_frames_from_data(size_t bins,
                                    size_t channels,
                                    size_t height,
                                    size_t width,
                                    const float *data,
                                    size_t len,
                                    struct EvzFrames **out);

// Writes `[bins, channels, height, width]` into `shape`.
//
// # Safety
// `frames` must come from this library; `shape` must hold 4 elements.
enum EvzStatus evz_frames_shape(const struct EvzFrames *frames, size_t *shape);

// Borrowed pointer to the tensor values, valid while `frames` lives.
//
// # Safety
// `frames` must be null or come from this library.
const float *evz_frames_data(const struct EvzFrames *frames);

// Number of values in the tensor; 0 for a null handle.
//
// # Safety
// `frames` must be null or come from this library.
size_t evz_frames_len(const struct EvzFrames *frames);

// # Safety
// `frames` must be null or come from this library, and not be used after.
void evz_frames_free(struct EvzFrames *frames);

// Runs EventZoom on dense tensors.
//
// `donors` holds `config.mixnum` tensors shaped like `base`;
// `donor_labels` holds `config.mixnum * num_classes` values, one row per
// donor. The same `seed` always yields the same output.
//
// # Safety
// All pointers must be valid for the element counts above; `out_frames`
// and `out_labels` must be writable.
enum EvzStatus evz_eventzoom_frames(const struct EvzFrames *base,
                                    const double *base_label,
                                    size_t num_classes,
                                    const struct EvzFrames *const *donors,
                                    const double *donor_labels,
                                    const struct EvzConfig *config,
                                    uint64_t seed,
                                    struct EvzFrames **out_frames,
                                    struct EvzLabels **out_labels);

// # Safety
// `labels` must be null or come from this library.
size_t evz_labels_num_classes(const struct EvzLabels *labels);

// # Safety
// `labels` must be null or come from this library.
size_t evz_labels_steps(const struct EvzLabels *labels);

// Borrowed pointer to the `num_classes` time-averaged label.
//
// # Safety
// `labels` must be null or come from this library.
const double *evz_labels_averaged(const struct EvzLabels *labels);

// Borrowed pointer to the label of time bin `step`, or null if out of range.
//
// # Safety
// `labels` must be null or come from this library.
const double *evz_labels_step(const struct EvzLabels *labels, size_t step);

// # Safety
// `labels` must be null or come from this library, and not be used after.
void evz_labels_free(struct EvzLabels *labels);

// Writes an EVZF file; `labels` may be null.
//
// # Safety
// Handles must come from this library; `path` must be NUL-terminated.
enum EvzStatus evz_write_evzf(const char *path,
                              const struct EvzFrames *frames,
                              const struct EvzLabels *labels);

// Reads an EVZF file. `out_labels` may be null to skip labels; otherwise it
// receives null when the file carries none.
//
// # Safety
// `path` must be NUL-terminated; out pointers must be writable or null as
// described.
enum EvzStatus evz_read_evzf(const char *path,
                             struct EvzFrames **out_frames,
                             struct EvzLabels **out_labels);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EVENTZOOM_H */
