use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use eventzoom::{eventzoom_frames, one_hot, AugConfig, DeterministicRng, FrameTensor};
use eventzoom_ffi::*;

fn cpath(p: &Path) -> CString {
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = evz_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn sample_events() -> Vec<EvzEvent> {
    (0..200u32)
        .map(|i| EvzEvent {
            t: (i * 7919) % 1000,
            x: (i % 48) as u16,
            y: ((i * 13) % 48) as u16,
            polarity: if i % 3 == 0 { -1 } else { 1 },
        })
        .collect()
}

unsafe fn make_stream(events: &[EvzEvent]) -> *mut EvzStream {
    let mut s = ptr::null_mut();
    let st = evz_stream_from_events(48, 48, 1000, events.as_ptr(), events.len(), &mut s);
    assert_eq!(st, EvzStatus::EvzOk);
    s
}

#[test]
fn stream_round_trips_through_evt() {
    let dir = tempfile::tempdir().unwrap();
    let path = cpath(&dir.path().join("a.evt"));
    unsafe {
        let s = make_stream(&sample_events());
        assert_eq!(evz_stream_len(s), 200);
        assert_eq!(evz_stream_write_evt(s, path.as_ptr()), EvzStatus::EvzOk);
        let mut back = ptr::null_mut();
        assert_eq!(
            evz_stream_read_evt(path.as_ptr(), &mut back),
            EvzStatus::EvzOk
        );
        assert_eq!(evz_stream_len(back), 200);
        let mut prev = 0;
        for i in 0..200 {
            let (mut a, mut b) = (
                EvzEvent {
                    t: 0,
                    x: 0,
                    y: 0,
                    polarity: 0,
                },
                EvzEvent {
                    t: 0,
                    x: 0,
                    y: 0,
                    polarity: 0,
                },
            );
            assert_eq!(evz_stream_event(s, i, &mut a), EvzStatus::EvzOk);
            assert_eq!(evz_stream_event(back, i, &mut b), EvzStatus::EvzOk);
            assert_eq!(a, b);
            assert!(a.t >= prev, "events are sorted");
            prev = a.t;
        }
        evz_stream_free(s);
        evz_stream_free(back);
    }
}

#[test]
fn rejects_bad_input_with_messages() {
    unsafe {
        let mut s = ptr::null_mut();
        let bad = [EvzEvent {
            t: 0,
            x: 0,
            y: 0,
            polarity: 0,
        }];
        assert_eq!(
            evz_stream_from_events(4, 4, 10, bad.as_ptr(), 1, &mut s),
            EvzStatus::EvzInvalidArgument
        );
        assert!(s.is_null());
        assert!(last_error().contains("polarity"));

        let oob = [EvzEvent {
            t: 0,
            x: 9,
            y: 0,
            polarity: 1,
        }];
        assert_ne!(
            evz_stream_from_events(4, 4, 10, oob.as_ptr(), 1, &mut s),
            EvzStatus::EvzOk
        );

        assert_eq!(
            evz_stream_read_evt(ptr::null(), &mut s),
            EvzStatus::EvzNullPointer
        );
        let missing = CString::new("/nonexistent/dir/file.evt").unwrap();
        assert_eq!(
            evz_stream_read_evt(missing.as_ptr(), &mut s),
            EvzStatus::EvzIo
        );
        assert!(last_error().contains("/nonexistent/dir/file.evt"));

        let mut out = EvzEvent {
            t: 0,
            x: 0,
            y: 0,
            polarity: 0,
        };
        let good = make_stream(&sample_events());
        assert_eq!(
            evz_stream_event(good, 200, &mut out),
            EvzStatus::EvzInvalidArgument
        );
        assert_eq!(evz_stream_len(ptr::null()), 0);
        evz_stream_free(good);
        evz_stream_free(ptr::null_mut());
    }
}

#[test]
fn success_clears_last_error() {
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(
            evz_stream_read_evt(ptr::null(), &mut s),
            EvzStatus::EvzNullPointer
        );
        assert!(!evz_last_error_message().is_null());
        let good = make_stream(&[]);
        assert!(evz_last_error_message().is_null());
        evz_stream_free(good);
    }
}

#[test]
fn format_errors_are_classified() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("junk.evzf");
    std::fs::write(&p, b"not a tensor").unwrap();
    let path = cpath(&p);
    unsafe {
        let mut f = ptr::null_mut();
        assert_eq!(
            evz_read_evzf(path.as_ptr(), &mut f, ptr::null_mut()),
            EvzStatus::EvzFormat
        );
        assert!(f.is_null());
    }
}

#[test]
fn eventzoom_matches_library_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = cpath(&dir.path().join("z.evzf"));
    let mut rng = DeterministicRng::new(5);
    let tensors: Vec<FrameTensor> = (0..3)
        .map(|_| {
            let data = (0..8 * 2 * 48 * 48).map(|_| rng.below(3) as f32).collect();
            FrameTensor::from_vec(8, 2, 48, 48, data).unwrap()
        })
        .collect();
    let yb = one_hot(0, 3).unwrap();
    let yd: Vec<f64> = [one_hot(1, 3).unwrap(), one_hot(2, 3).unwrap()].concat();

    let cfg = AugConfig {
        mixnum: 2,
        ..Default::default()
    };
    let (want_frames, want_labels) = eventzoom_frames(
        &tensors[0],
        &yb,
        &[(&tensors[1], &yd[..3]), (&tensors[2], &yd[3..])],
        &cfg,
        &mut DeterministicRng::new(42),
    )
    .unwrap();

    unsafe {
        let handles: Vec<*mut EvzFrames> = tensors
            .iter()
            .map(|t| {
                let mut h = ptr::null_mut();
                let st = evz_frames_from_data(
                    8,
                    2,
                    48,
                    48,
                    t.as_slice().as_ptr(),
                    t.as_slice().len(),
                    &mut h,
                );
                assert_eq!(st, EvzStatus::EvzOk);
                h
            })
            .collect();
        let donors = [handles[1] as *const EvzFrames, handles[2]];
        let config = EvzConfig {
            mixnum: 2,
            ..evz_config_default()
        };
        let (mut out, mut labels) = (ptr::null_mut(), ptr::null_mut());
        let st = evz_eventzoom_frames(
            handles[0],
            yb.as_ptr(),
            3,
            donors.as_ptr(),
            yd.as_ptr(),
            &config,
            42,
            &mut out,
            &mut labels,
        );
        assert_eq!(st, EvzStatus::EvzOk, "{}", last_error());

        let data = std::slice::from_raw_parts(evz_frames_data(out), evz_frames_len(out));
        assert_eq!(data, want_frames.as_slice());
        let mut shape = [0usize; 4];
        assert_eq!(evz_frames_shape(out, shape.as_mut_ptr()), EvzStatus::EvzOk);
        assert_eq!(shape, [8, 2, 48, 48]);
        assert_eq!(evz_labels_steps(labels), 8);
        assert_eq!(evz_labels_num_classes(labels), 3);
        assert_eq!(
            std::slice::from_raw_parts(evz_labels_averaged(labels), 3),
            want_labels.averaged()
        );
        for t in 0..8 {
            assert_eq!(
                std::slice::from_raw_parts(evz_labels_step(labels, t), 3),
                &want_labels.per_step()[t][..]
            );
        }
        assert!(evz_labels_step(labels, 8).is_null());

        assert_eq!(evz_write_evzf(path.as_ptr(), out, labels), EvzStatus::EvzOk);
        let (mut f2, mut l2) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(
            evz_read_evzf(path.as_ptr(), &mut f2, &mut l2),
            EvzStatus::EvzOk
        );
        assert!(!l2.is_null());
        assert_eq!(
            std::slice::from_raw_parts(evz_frames_data(f2), evz_frames_len(f2)),
            data
        );
        assert_eq!(evz_labels_steps(l2), 8);

        assert_eq!(
            evz_write_evzf(path.as_ptr(), out, ptr::null()),
            EvzStatus::EvzOk
        );
        let (mut f3, mut l3) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(
            evz_read_evzf(path.as_ptr(), &mut f3, &mut l3),
            EvzStatus::EvzOk
        );
        assert!(l3.is_null());

        // donor with the wrong shape
        let mut small = ptr::null_mut();
        let zeros = vec![0.0f32; 8 * 2 * 24 * 24];
        assert_eq!(
            evz_frames_from_data(8, 2, 24, 24, zeros.as_ptr(), zeros.len(), &mut small),
            EvzStatus::EvzOk
        );
        let bad_donors = [small as *const EvzFrames, handles[2]];
        let (mut o, mut l) = (ptr::null_mut(), ptr::null_mut());
        let st = evz_eventzoom_frames(
            handles[0],
            yb.as_ptr(),
            3,
            bad_donors.as_ptr(),
            yd.as_ptr(),
            &config,
            42,
            &mut o,
            &mut l,
        );
        assert_eq!(st, EvzStatus::EvzShape);
        assert!(o.is_null() && l.is_null());

        let inverted = EvzConfig {
            lambda_min: 2.0,
            lambda_max: 1.0,
            ..config
        };
        let st = evz_eventzoom_frames(
            handles[0],
            yb.as_ptr(),
            3,
            donors.as_ptr(),
            yd.as_ptr(),
            &inverted,
            42,
            &mut o,
            &mut l,
        );
        assert_eq!(st, EvzStatus::EvzInvalidArgument);

        for h in handles.into_iter().chain([out, f2, f3, small]) {
            evz_frames_free(h);
        }
        evz_labels_free(labels);
        evz_labels_free(l2);
    }
}

#[test]
fn rasterize_matches_library() {
    unsafe {
        let events = sample_events();
        let s = make_stream(&events);
        let mut f = ptr::null_mut();
        assert_eq!(evz_rasterize(s, 4, 24, 24, &mut f), EvzStatus::EvzOk);
        let mut shape = [0usize; 4];
        evz_frames_shape(f, shape.as_mut_ptr());
        assert_eq!(shape, [4, 2, 24, 24]);
        let total: f32 = std::slice::from_raw_parts(evz_frames_data(f), evz_frames_len(f))
            .iter()
            .sum();
        assert_eq!(total, 200.0);
        let mut g = ptr::null_mut();
        assert_eq!(evz_rasterize(s, 4, 24, 48, &mut g), EvzStatus::EvzShape);
        evz_frames_free(f);
        evz_stream_free(s);
    }
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/eventzoom.h")
}

fn have_cc() -> bool {
    Command::new("cc")
        .arg("--version")
        .output()
        .is_ok_and(|o| o.status.success())
}

#[test]
fn header_declares_every_export() {
    let text = std::fs::read_to_string(header()).unwrap();
    let src =
        std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("src/lib.rs")).unwrap();
    let exports: Vec<&str> = src
        .split("extern \"C\" fn ")
        .skip(1)
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 20, "{exports:?}");
    for name in exports {
        assert!(
            text.contains(&format!("{name}(")),
            "{name} missing from header"
        );
    }
}

#[test]
fn header_compiles_as_c_and_cpp() {
    if !have_cc() {
        eprintln!("skipping: no C compiler");
        return;
    }
    for lang in ["c", "c++"] {
        let out = Command::new("cc")
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(header())
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{lang}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

const C_SMOKE: &str = r#"
#include <stdio.h>
#include "eventzoom.h"

int main(void) {
    EvzEvent ev[3] = {{5, 1, 2, 1}, {1, 0, 0, -1}, {9, 3, 3, 1}};
    EvzStream *s = NULL;
    if (evz_stream_from_events(4, 4, 10, ev, 3, &s) != EVZ_OK) return 1;
    EvzFrames *f = NULL;
    if (evz_rasterize(s, 2, 4, 4, &f) != EVZ_OK) return 2;
    size_t shape[4];
    evz_frames_shape(f, shape);
    const float *d = evz_frames_data(f);
    float total = 0;
    for (size_t i = 0; i < evz_frames_len(f); i++) total += d[i];
    EvzStream *bad = NULL;
    if (evz_stream_read_evt(NULL, &bad) != EVZ_NULL_POINTER) return 3;
    printf("%zu %zu %zu %zu %.0f %s\n", shape[0], shape[1], shape[2], shape[3], total, evz_last_error_message());
    evz_frames_free(f);
    evz_stream_free(s);
    return 0;
}
"#;

#[test]
fn c_program_links_against_static_library() {
    let exe = std::env::current_exe().unwrap();
    let lib = exe
        .parent()
        .and_then(Path::parent)
        .map(|d| d.join("libeventzoom_ffi.a"));
    let Some(lib) = lib.filter(|l| l.exists()) else {
        eprintln!("skipping: static library not found next to the test binary");
        return;
    };
    if !have_cc() {
        eprintln!("skipping: no C compiler");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    let bin = dir.path().join("smoke");
    std::fs::write(&src, C_SMOKE).unwrap();
    let out = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status);
    assert_eq!(
        String::from_utf8_lossy(&run.stdout),
        "2 2 4 4 3 path is null\n"
    );
}
