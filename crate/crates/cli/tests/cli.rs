use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn shvel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shvel"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(cmd: &str, scenario: &Path, out: &Path, extra: &[&str]) {
    let mut args = vec![
        cmd,
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let o = shvel(&args);
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
}

fn error_line(o: &Output) -> Value {
    assert!(!o.status.success());
    let stderr = String::from_utf8_lossy(&o.stderr);
    let line = stderr
        .lines()
        .rev()
        .find_map(|l| l.strip_prefix("error: "))
        .unwrap_or_else(|| panic!("no error line in {stderr}"));
    serde_json::from_str(line).expect("error line is JSON")
}

/// Rows of a field CSV after the metadata and column header lines.
fn read_csv(path: &Path) -> (String, String, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let meta = lines.next().unwrap().to_string();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| {
            l.split(',')
                .map(|x| x.parse().unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    (meta, header, rows)
}

fn write_scenario(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("scenario.toml");
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn plane_wave_field_vectors_are_parallel() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok("field", &scenarios_dir().join("fig2.toml"), tmp.path(), &[]);
    let (meta, header, rows) = read_csv(&tmp.path().join("field_2000Hz.csv"));
    assert!(meta.starts_with(&format!(
        "# shvel {} command=field scenario_sha256=",
        shvel::VERSION
    )));
    assert_eq!(header, shvel::field::FIELD_CSV_HEADER);
    let axis = [(2.0 * PI / 3.0).cos(), (2.0 * PI / 3.0).sin()];
    let mut worst: f64 = 0.0;
    for r in &rows {
        assert_eq!(r.len(), 11);
        let (vx, vy) = (r[5], r[7]);
        let n = vx.hypot(vy);
        if n > 1e-9 {
            let c = ((vx * axis[0] + vy * axis[1]) / n).abs().min(1.0);
            worst = worst.max(c.acos().to_degrees());
        }
    }
    assert!(worst < 0.1, "{worst}");

    let meta: Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("run.json")).unwrap())
            .unwrap();
    assert_eq!(meta["degrees"]["pressure"], 10);
    assert_eq!(meta["degrees"]["velocity"], 9);
    assert_eq!(
        meta["grid"]["points"].as_u64().unwrap() as usize,
        rows.len()
    );
    assert_eq!(meta["grid"]["reconstructed_spacing"], true);
    assert_eq!(meta["version"], shvel::VERSION);
}

#[test]
fn point_source_field_points_along_source_bearing() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok("field", &scenarios_dir().join("fig3.toml"), tmp.path(), &[]);
    let (_, _, rows) = read_csv(&tmp.path().join("field_2000Hz.csv"));
    let src = [0.6 * (2.0 * PI / 3.0).cos(), 0.6 * (2.0 * PI / 3.0).sin()];
    let peak = rows.iter().map(|r| r[5].hypot(r[7])).fold(0.0, f64::max);
    let mut strong = 0;
    for r in &rows {
        let (dx, dy) = (r[0] - src[0], r[1] - src[1]);
        let d = dx.hypot(dy);
        let (vx, vy) = (r[5], r[7]);
        let n = vx.hypot(vy);
        if n > 0.3 * peak {
            strong += 1;
            assert!(((vx * dx + vy * dy) / (n * d)).abs() > 0.95);
        }
    }
    assert!(strong > rows.len() / 3);
}

#[test]
fn five_speaker_reproduce_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    run_ok(
        "reproduce",
        &scenarios_dir().join("fig5.toml"),
        tmp.path(),
        &[],
    );
    for name in ["desired_1000Hz.csv", "vm_1000Hz.csv", "pm_1000Hz.csv"] {
        let (_, header, rows) = read_csv(&tmp.path().join(name));
        assert_eq!(header, shvel::field::FIELD_CSV_HEADER);
        assert_eq!(rows.len(), 2821);
    }
    for name in ["weights_vm.csv", "weights_pm.csv"] {
        let (_, header, rows) = read_csv(&tmp.path().join(name));
        assert_eq!(header, "frequency_hz,speaker_index,re_w,im_w");
        assert_eq!(rows.len(), 5);
        assert!(rows
            .iter()
            .all(|r| r[0] == 1000.0 && r[2].is_finite() && r[3].is_finite()));
    }
    let meta: Value =
        serde_json::from_str(&std::fs::read_to_string(tmp.path().join("run.json")).unwrap())
            .unwrap();
    assert_eq!(meta["H_shape"], serde_json::json!([48, 5]));
    assert_eq!(meta["G_shape"], serde_json::json!([25, 5]));
    let eta = &meta["per_frequency"][0]["eta"];
    assert!(eta["vm_inner"]["mean"].as_f64().unwrap() < eta["pm_inner"]["mean"].as_f64().unwrap());
}

#[test]
fn sweep_schema_and_ordering() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenarios_dir().join("sweep.toml"))
        .unwrap()
        .replace("start = 50.0", "start = 200.0")
        .replace("stop = 2000.0", "stop = 1000.0")
        .replace("step = 50.0", "step = 200.0");
    let scenario = write_scenario(tmp.path(), &text);
    run_ok("sweep", &scenario, tmp.path(), &[]);
    let text = std::fs::read_to_string(tmp.path().join("sweep.csv")).unwrap();
    let mut lines = text.lines().skip(1);
    assert_eq!(lines.next(), Some(shvel::metrics::SWEEP_CSV_HEADER));
    let mut last = 0.0;
    let mut n = 0;
    for line in lines {
        let cols: Vec<&str> = line.split(',').collect();
        let f: f64 = cols[0].parse().unwrap();
        assert!(f > last);
        last = f;
        let eta: Vec<f64> = cols[3..7].iter().map(|c| c.parse().unwrap()).collect();
        assert!(eta.iter().all(|e| (0.0..=1.0).contains(e)));
        assert!(eta[2] < eta[3], "inner VM not below PM at {f} Hz");
        n += 1;
    }
    assert_eq!(n, 5);
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let scenario = scenarios_dir().join("fig5.toml");
    run_ok("reproduce", &scenario, a.path(), &["--threads", "1"]);
    run_ok("reproduce", &scenario, b.path(), &["--threads", "3"]);
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names.len(), 6);
    for name in names {
        assert_eq!(
            std::fs::read(a.path().join(&name)).unwrap(),
            std::fs::read(b.path().join(&name)).unwrap(),
            "{name:?} differs"
        );
    }
}

#[test]
fn missing_source_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(
        tmp.path(),
        "region_radius = 0.2\nmax_degree = 10\nfrequencies = [2000.0]\n",
    );
    let o = shvel(&[
        "field",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    let err = error_line(&o);
    assert_eq!(err["kind"], "validation");
    assert_eq!(err["field"], "source");
}

#[test]
fn parse_error_reports_line() {
    let tmp = tempfile::tempdir().unwrap();
    let scenario = write_scenario(tmp.path(), "region_radius = 0.2\nmax_degree = 10\n[[source]]\ntype = \"plane_wave\"\ntheta = \"sideways\"\nphi = 0\n");
    let o = shvel(&["field", "--scenario", scenario.to_str().unwrap()]);
    let err = error_line(&o);
    assert_eq!(err["kind"], "parse");
    assert!(err["message"].as_str().unwrap().contains("line 5"), "{err}");
}

#[test]
fn loudspeaker_inside_region_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenarios_dir().join("fig5.toml"))
        .unwrap()
        .replace("radius = 1.21", "radius = 0.4");
    let scenario = write_scenario(tmp.path(), &text);
    let o = shvel(&[
        "reproduce",
        "--scenario",
        scenario.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    let err = error_line(&o);
    assert_eq!(err["kind"], "model");
    assert!(err["message"]
        .as_str()
        .unwrap()
        .contains("inside the listening region"));
}

#[test]
fn single_loudspeaker_runs_with_tolerance_override() {
    let tmp = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(scenarios_dir().join("fig5.toml"))
        .unwrap()
        .replace(
            "azimuths = [0, \"pi/4\", \"3pi/4\", \"5pi/4\", \"7pi/4\"]",
            "azimuths = [\"45deg\"]",
        );
    let scenario = write_scenario(tmp.path(), &text);
    run_ok("reproduce", &scenario, tmp.path(), &["--tolerance", "1e-8"]);
    let (_, _, rows) = read_csv(&tmp.path().join("weights_vm.csv"));
    assert_eq!(rows.len(), 1);
    let bad = shvel(&[
        "reproduce",
        "--scenario",
        scenario.to_str().unwrap(),
        "--tolerance=-1",
    ]);
    assert_eq!(error_line(&bad)["field"], "tolerance");
    let usage = shvel(&[
        "reproduce",
        "--scenario",
        scenario.to_str().unwrap(),
        "--tolerance",
        "-1",
    ]);
    assert_eq!(usage.status.code(), Some(2));
    assert_eq!(error_line(&usage)["kind"], "usage");
}

#[test]
fn missing_file_is_io_error() {
    let o = shvel(&["field", "--scenario", "/nonexistent/scenario.toml"]);
    assert_eq!(error_line(&o)["kind"], "io");
}
