use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use eventzoom::codec::{load_evzf, save_evzf};
use eventzoom::viz::parse_pgm;
use eventzoom::FrameTensor;

fn evz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eventzoom"))
        .args(args)
        .env("EVZ_LOG", "error")
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn synth(dir: &Path, seed: &str) {
    let o = evz(&[
        "synth",
        "--classes",
        "3",
        "--per-class",
        "4",
        "--size",
        "48x48",
        "--bins",
        "8",
        "--seed",
        seed,
        "--out",
        p(dir),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = walk(dir)
        .into_iter()
        .map(|f| {
            (
                f.strip_prefix(dir).unwrap().display().to_string(),
                fs::read(&f).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        if path.is_dir() {
            out.extend(walk(&path));
        } else {
            out.push(path);
        }
    }
    out
}

#[test]
fn synth_augment_stats_round() {
    let tmp = tempfile::tempdir().unwrap();
    let (data, again) = (tmp.path().join("data"), tmp.path().join("again"));
    synth(&data, "4");
    synth(&again, "4");
    assert_eq!(read_dir_sorted(&data), read_dir_sorted(&again));

    let manifest = data.join("manifest.txt");
    let augment = |out: &Path, workers: &str| {
        evz(&[
            "augment",
            "--manifest",
            p(&manifest),
            "--strategy",
            "eventzoom",
            "--mixnum",
            "2",
            "--lambda-min",
            "0.5",
            "--lambda-max",
            "1.5",
            "--anchor",
            "center",
            "--seed",
            "1",
            "--workers",
            workers,
            "--out",
            p(out),
        ])
    };
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(code(&augment(&a, "1")), 0);
    assert_eq!(code(&augment(&b, "8")), 0);
    assert_eq!(read_dir_sorted(&a), read_dir_sorted(&b));

    let stats = evz(&[
        "stats",
        "--manifest",
        p(&a.join("manifest.txt")),
        "--bins",
        "4",
    ]);
    assert_eq!(code(&stats), 0);
    let table = String::from_utf8(stats.stdout).unwrap();
    let counts: usize = table
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').nth(2).unwrap().parse::<usize>().unwrap())
        .sum();
    assert_eq!(counts, 12, "{table}");
}

#[test]
fn usage_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data, "0");
    let m = data.join("manifest.txt");
    let out = tmp.path().join("out");
    for extra in [
        vec!["--strategy", "zoomy"],
        vec!["--lambda-min", "2", "--lambda-max", "1"],
        vec!["--lambda-min", "0"],
        vec!["--lambda-min", "-1"],
        vec!["--anchor", "middle"],
    ] {
        let mut args = vec!["augment", "--manifest", p(&m), "--out", p(&out)];
        args.extend(extra.iter().copied());
        let o = evz(&args);
        assert_eq!(
            code(&o),
            2,
            "{extra:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    assert!(!out.exists());
    assert_eq!(code(&evz(&["bench", "--strategy", "nope"])), 2);
    assert_eq!(code(&evz(&["frobnicate"])), 2);
    assert_eq!(
        code(&evz(&["synth", "--classes", "5", "--out", p(&out)])),
        2
    );
    assert_eq!(code(&evz(&["verify", "--only", "nothing"])), 2);
}

#[test]
fn runtime_errors_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("missing.txt");
    let o = evz(&[
        "augment",
        "--manifest",
        p(&missing),
        "--out",
        p(&tmp.path().join("o")),
    ]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing.txt"));

    let junk = tmp.path().join("junk.evt");
    fs::write(&junk, b"junk").unwrap();
    assert_eq!(
        code(&evz(&[
            "rasterize",
            p(&junk),
            p(&tmp.path().join("x.evzf"))
        ])),
        1
    );
}

#[test]
fn rasterize_and_viz() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data, "2");
    let evzf = tmp.path().join("s.evzf");
    let o = evz(&[
        "rasterize",
        "--bins",
        "4",
        "--size",
        "24x24",
        p(&data.join("class0/sample0000.evt")),
        p(&evzf),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let f = load_evzf(&evzf).unwrap();
    assert_eq!(f.frames.shape(), [4, 2, 24, 24]);
    assert!(f.labels.is_none());

    let zeros = tmp.path().join("zeros.evzf");
    save_evzf(&zeros, &FrameTensor::zeros(4, 2, 24, 24).unwrap(), None).unwrap();
    let out = tmp.path().join("viz");
    let o = evz(&[
        "viz",
        p(&zeros),
        "--out",
        p(&out),
        "--format",
        "pgm",
        "--compare",
        p(&evzf),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for t in 0..4 {
        for c in 0..2 {
            let (w, h, px) =
                parse_pgm(&fs::read_to_string(out.join(format!("t{t}_c{c}.pgm"))).unwrap())
                    .unwrap();
            assert_eq!((w, h), (24, 24));
            assert!(
                px.iter().all(|&v| v == 0),
                "all-zero input must give black images"
            );
        }
    }
    let (w, h, px) = parse_pgm(&fs::read_to_string(out.join("strip_c0.pgm")).unwrap()).unwrap();
    assert_eq!((w, h), (96, 48));
    assert!(px[..48 * 24].iter().all(|&v| v == 0));
    assert!(px.contains(&255));

    assert_eq!(
        code(&evz(&[
            "viz",
            p(&zeros),
            "--out",
            p(&out),
            "--format",
            "png"
        ])),
        2
    );
}

#[test]
fn bench_and_verify() {
    let o = evz(&["bench", "--strategy", "eventzoom", "--iterations", "0"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 1);

    let o = evz(&[
        "bench",
        "--strategy",
        "ablation:C_PS_PP",
        "--iterations",
        "3",
    ]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("ablation:C_PS_PP\tsingle\t3"), "{text}");
    assert!(text.contains("ablation:C_PS_PP\tparallel\t3"), "{text}");

    let o = evz(&["verify", "--only", "identity-cases"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .starts_with("[PASS] identity-cases"));
}
