use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const DISC: &str = "[medium]\nk = 6.283185307179586\nalpha = 0\nh = 1\nr_meas = 2\n\n\
[shape]\ntype = ellipse\ncx = 0\ncy = 0\nax = 0.5\nay = 0.5\nq_re = 1\n";
const EMPTY: &str = "[medium]\nk = 6.283185307179586\nalpha = 0\nh = 1\nr_meas = 2\n";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpscat")).args(args).output().expect("spawn qpscat")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_scene(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn stderr_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().rev().find(|l| l.starts_with('{')).expect("json error on stderr");
    serde_json::from_str(line).unwrap()
}

fn forward(dir: &Path, scene: &Path, n: &str, out: &str) -> PathBuf {
    let o = dir.join(out);
    let r = run(&["forward", "--config", s(scene), "--n-sources", n, "--grid", "64x64", "--out", s(&o)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    o
}

fn rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("source_id"))
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect()
}

#[test]
fn forward_on_empty_scene_gives_zero_coefficients() {
    let tmp = tempfile::tempdir().unwrap();
    let scene = write_scene(tmp.path(), "empty.scene", EMPTY);
    let out = forward(tmp.path(), &scene, "2", "fwd");
    let csv = fs::read_to_string(out.join("rayleigh.csv")).unwrap();
    let r = rows(&csv);
    assert!(!r.is_empty());
    assert!(r.iter().all(|row| row[2..].iter().all(|v| *v == 0.0)));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["n_sources"], 2);
    assert!(out.join("traces.csv").exists());
}

#[test]
fn malformed_config_exits_2_with_parse_error() {
    let tmp = tempfile::tempdir().unwrap();
    let scene = write_scene(tmp.path(), "bad.scene", "[medium]\nk = six\n");
    let r = run(&["forward", "--config", s(&scene), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(r.status.code(), Some(2));
    let j = stderr_json(&r);
    assert_eq!(j["error"], "ParseError");
    assert!(j["line"].is_u64());
}

#[test]
fn missing_inputs_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nothing");
    let r = run(&["forward", "--config", s(&missing), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(r.status.code(), Some(3));
    assert_eq!(stderr_json(&r)["error"], "MissingInput");
    let r = run(&["image", "--data", s(&missing), "--out", s(&tmp.path().join("o"))]);
    assert_eq!(r.status.code(), Some(3));
    let r = run(&["noise", "--data", s(&missing), "--delta", "0.1", "--out", s(&tmp.path().join("o"))]);
    assert_eq!(r.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_2() {
    let r = run(&["forward", "--config", "x", "--grid", "64by64", "--out", "o"]);
    assert_eq!(r.status.code(), Some(2));
    assert_eq!(stderr_json(&r)["error"], "Usage");
    let r = run(&["image", "--data", "x", "--method", "music", "--out", "o"]);
    assert_eq!(r.status.code(), Some(2));
    assert!(run(&["--help"]).status.success());
}

#[test]
fn noise_levels_and_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let scene = write_scene(tmp.path(), "disc.scene", DISC);
    let fwd = forward(tmp.path(), &scene, "4", "fwd");
    let clean = fs::read_to_string(fwd.join("rayleigh.csv")).unwrap();

    let n0 = tmp.path().join("n0");
    let r = run(&["noise", "--data", s(&fwd), "--delta", "0", "--out", s(&n0)]);
    assert!(r.status.success());
    assert_eq!(fs::read_to_string(n0.join("rayleigh.csv")).unwrap(), clean);

    let r = run(&["noise", "--data", s(&fwd), "--delta", "1.5", "--out", s(&tmp.path().join("nb"))]);
    assert_eq!(r.status.code(), Some(2));
    assert_eq!(stderr_json(&r)["error"], "InvalidNoiseLevel");

    let mut outs = Vec::new();
    for (name, seed) in [("a", "7"), ("b", "7"), ("c", "8")] {
        let o = tmp.path().join(name);
        let r = run(&["noise", "--data", s(&fwd), "--delta", "0.2", "--seed", seed, "--out", s(&o)]);
        assert!(r.status.success());
        outs.push(fs::read(o.join("rayleigh.csv")).unwrap());
        let meta: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(o.join("noise_meta.json")).unwrap()).unwrap();
        let achieved = meta["achieved_delta"].as_f64().unwrap();
        assert!(achieved > 0.0 && achieved < 0.2);
    }
    assert_eq!(outs[0], outs[1]);
    assert_ne!(outs[0], outs[2]);
}

#[test]
fn image_of_zero_data_is_black() {
    let tmp = tempfile::tempdir().unwrap();
    let scene = write_scene(tmp.path(), "empty.scene", EMPTY);
    let fwd = forward(tmp.path(), &scene, "2", "fwd");
    let img = tmp.path().join("img");
    let r = run(&["image", "--data", s(&fwd), "--grid", "32x16", "--out", s(&img)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let pgm = fs::read(img.join("indicator_proposed.pgm")).unwrap();
    let header = b"P5\n32 16\n65535\n";
    assert!(pgm.starts_with(header));
    assert_eq!(pgm.len(), header.len() + 32 * 16 * 2);
    assert!(pgm[header.len()..].iter().all(|b| *b == 0));
    assert!(img.join("indicator_proposed.csv").exists());
    assert!(img.join("metrics_proposed.json").exists());
    assert!(img.join("manifest.json").exists());
}

#[test]
fn image_of_disc_finds_centre() {
    let tmp = tempfile::tempdir().unwrap();
    let scene = write_scene(tmp.path(), "disc.scene", DISC);
    let fwd = forward(tmp.path(), &scene, "16", "fwd");
    let img = tmp.path().join("img");
    let r = run(&["image", "--data", s(&fwd), "--config", s(&scene), "--method", "osm", "--out", s(&img)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(img.join("metrics_osm.json")).unwrap()).unwrap();
    assert!(m["argmax_error"].as_f64().unwrap() < 0.5);
}

#[test]
fn kernel_outputs_are_written() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("k");
    let r = run(&["kernel", "--grid", "33x31", "--out", s(&out)]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    for f in ["kernel_j0.csv", "kernel_j0.pgm", "kernel_periodic.csv", "kernel_periodic.pgm", "manifest.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn verify_modes_suite_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("report.json");
    let r = run(&["verify", "--suite", "modes", "--out", s(&out)]);
    assert_eq!(r.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert!(j.to_string().contains("\"passed\":true"));
    let r = run(&["verify", "--suite", "bogus"]);
    assert_eq!(r.status.code(), Some(2));
}

#[test]
fn pipeline_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let scene = write_scene(tmp.path(), "disc.scene", DISC);
    let mut maps = Vec::new();
    for name in ["p1", "p2"] {
        let o = tmp.path().join(name);
        let r = run(&[
            "pipeline", "--config", s(&scene), "--n-sources", "8", "--grid", "64x64", "--delta", "0.1",
            "--seed", "3", "--out", s(&o),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        assert!(o.join("manifest.json").exists());
        maps.push((
            fs::read(o.join("noise/rayleigh.csv")).unwrap(),
            fs::read(o.join("image/indicator_proposed.csv")).unwrap(),
        ));
    }
    assert_eq!(maps[0], maps[1]);
}
