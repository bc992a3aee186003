use std::path::{Path, PathBuf};

use intensity_cli::run_with;

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("intensity").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn toy_config() -> String {
    data().join("toy/config.txt").display().to_string()
}

#[test]
fn golden_calibration_is_byte_exact() {
    let dir = tempfile::tempdir().unwrap();
    let expected = std::fs::read(data().join("toy/expected_lambda.txt")).unwrap();
    for k in 0..2 {
        let out = dir.path().join(format!("lambda{k}.txt"));
        let (code, stdout, stderr) = run(&["calibrate", "-f", &toy_config(), &format!("--output_file={}", out.display())]);
        assert_eq!(code, 0, "{stderr}");
        assert!(stdout.contains("iterations: 500"), "{stdout}");
        assert_eq!(std::fs::read(&out).unwrap(), expected);
    }
}

#[test]
fn cross_validation_writes_intensities() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cv.txt");
    let (code, stdout, stderr) = run(&[
        "calibrate",
        "-f",
        &toy_config(),
        "--method=cross_validation",
        "--max_iter=50",
        &format!("--output_file={}", out.display()),
    ]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("best weight:"), "{stdout}");
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 3 * 14);
}

#[test]
fn exit_codes() {
    let (code, _, err) = run(&["calibrate", "-f", &toy_config(), "--algorithm=boundary"]);
    assert_eq!(code, 1);
    assert!(err.contains("unsupported variant"), "{err}");
    let (code, _, _) = run(&["calibrate", "-f", &toy_config(), "--sigma=abc"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, 1);
    let (code, out, _) = run(&["calibrate", "--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("cv_proportion=0.2"), "{out}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("weights.txt");
    std::fs::write(&bad, "1 -2\n").unwrap();
    let (code, _, err) = run(&[
        "calibrate",
        "-f",
        &toy_config(),
        "--method=cross_validation",
        &format!("--cv_weights_file={}", bad.display()),
        &format!("--output_file={}", dir.path().join("o.txt").display()),
    ]);
    assert_eq!(code, 2, "{err}");
    assert!(err.contains("non-negative"), "{err}");
    let (code, _, _) = run(&["calibrate", "-f", &toy_config(), "--info_file=/nonexistent/info.txt"]);
    assert_eq!(code, 2);
}

#[test]
fn discretize_then_read_back() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).display().to_string();
    let events = data().join("events_sample.csv").display().to_string();
    let (code, out, err) = run(&[
        "discretize",
        "--events",
        &events,
        "--features",
        "priority",
        "--border",
        "convex",
        "--space",
        "hex",
        "3",
        "--time",
        "H:6:24",
        "--time",
        "D:1:7",
        "--out-arrivals",
        &p("arrivals.txt"),
        "--out-info",
        &p("info.txt"),
        "--out-regions",
        &p("regions.txt"),
        "--out-geojson",
        &p("regions.geojson"),
        "--out-legend",
        &p("legend.csv"),
    ]);
    assert_eq!(code, 0, "{err}");
    assert!(out.starts_with("events: 18, aggregated: 18, dropped: 0"), "{out}");

    let info = intensity_core::io::parse_info(&std::fs::read_to_string(p("info.txt")).unwrap(), "info").unwrap();
    assert_eq!((info.periods, info.weekdays), (4, 7));
    let arrivals =
        intensity_core::io::parse_arrivals(&std::fs::read_to_string(p("arrivals.txt")).unwrap(), &info, "arr").unwrap();
    assert_eq!(arrivals.iter().map(|e| e.count).sum::<u64>(), 18);
    let zones =
        intensity_core::io::parse_neighbors(&std::fs::read_to_string(p("regions.txt")).unwrap(), &info, "nb").unwrap();
    assert_eq!(zones.len(), info.zones);
    let legend = std::fs::read_to_string(p("legend.csv")).unwrap();
    assert!(legend.starts_with("feature,code,label\npriority,0,"), "{legend}");
    let geo = intensity_core::geojson::read_features(Path::new(&p("regions.geojson"))).unwrap();
    assert_eq!(geo.len(), info.zones);
}

#[test]
fn discretize_rejects_bad_specs() {
    let events = data().join("events_sample.csv").display().to_string();
    let (code, _, _) = run(&["discretize", "--events", &events, "--space", "hex", "40"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["discretize", "--events", &events, "--space", "rect", "2", "2", "--time", "Q:1:2"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["discretize", "--events", "/nonexistent.csv", "--space", "rect", "2", "2"]);
    assert_eq!(code, 2);
}
