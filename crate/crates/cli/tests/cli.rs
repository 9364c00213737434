use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn mirrorsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirrorsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .map(|it| it.map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect())
        .unwrap_or_default();
    names.sort();
    names
}

#[test]
fn run_writes_every_report() {
    let out = tempfile::tempdir().unwrap();
    let o = mirrorsim(&[
        "run",
        corpus("widlar.cir").to_str().unwrap(),
        "-o",
        out.path().to_str().unwrap(),
        "--format",
        "csv,svg,text",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        listing(out.path()),
        [
            "widlar.dc.csv",
            "widlar.dc.svg",
            "widlar.four.txt",
            "widlar.op.txt",
            "widlar.power.txt",
            "widlar.tran.csv",
            "widlar.tran.svg"
        ]
    );
    let four = fs::read_to_string(out.path().join("widlar.four.txt")).unwrap();
    assert!(four.contains("Total harmonic distortion:"));
    let dc = fs::read_to_string(out.path().join("widlar.dc.csv")).unwrap();
    assert_eq!(dc.lines().count(), 102);
}

#[test]
fn csv_header_matches_signal_names() {
    let out = tempfile::tempdir().unwrap();
    let o = mirrorsim(&["run", corpus("basic_cm.cir").to_str().unwrap(), "-o", out.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.path().join("basic_cm.dc.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert_eq!(
        header,
        "axis,V(out),V(ref),V(vcc),Ic(Q1),Ib(Q1),Ie(Q1),Ic(Q2),Ib(Q2),Ie(Q2),I(R1),I(VCC),I(VL)"
    );
    // Values round-trip through text exactly.
    for line in csv.lines().skip(1) {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert_eq!(v.to_string(), field);
        }
    }
}

#[test]
fn csv_output_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for dir in [&a, &b] {
        let o = mirrorsim(&["run", corpus("memristor_sine.cir").to_str().unwrap(), "-o", dir.path().to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("memristor_sine.tran.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn sequential_and_parallel_runs_agree() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let file = corpus("basic_cm.cir");
    let file = file.to_str().unwrap();
    assert!(mirrorsim(&["run", file, "-o", a.path().to_str().unwrap()]).status.success());
    assert!(mirrorsim(&["--sequential", "run", file, "-o", b.path().to_str().unwrap()]).status.success());
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("basic_cm.dc.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn memristor_run_yields_loop_data() {
    let out = tempfile::tempdir().unwrap();
    let o = mirrorsim(&[
        "run",
        corpus("memristor_sine.cir").to_str().unwrap(),
        "-o",
        out.path().to_str().unwrap(),
        "--format",
        "csv,svg",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.path().join("memristor_sine.m1.iv.svg").exists());
    let csv = fs::read_to_string(out.path().join("memristor_sine.tran.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let v = header.iter().position(|h| *h == "V(n001)").unwrap();
    let i = header.iter().position(|h| *h == "I(M1)").unwrap();
    let mut rows = 0;
    for line in csv.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(f[i] * f[v] >= 0.0);
        rows += 1;
    }
    assert_eq!(rows, 3001);
}

#[test]
fn tstep_override_changes_the_sample_count() {
    let out = tempfile::tempdir().unwrap();
    let o = mirrorsim(&[
        "run",
        corpus("memristor_sine.cir").to_str().unwrap(),
        "-o",
        out.path().to_str().unwrap(),
        "--tstep",
        "10m",
        "--reltol",
        "1e-4",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(out.path().join("memristor_sine.tran.csv")).unwrap();
    assert_eq!(csv.lines().count(), 302);
}

#[test]
fn parse_error_exits_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cir");
    fs::write(&bad, "broken\nV1 a 0 DC 1\nR1 a 0 9.3q.k\n").unwrap();
    let out = dir.path().join("out");
    let o = mirrorsim(&["run", bad.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let msg = stderr(&o);
    assert!(msg.contains("bad.cir:3:"), "{msg}");
    assert!(!out.exists());
}

#[test]
fn missing_file_exits_3() {
    let o = mirrorsim(&["run", "/nonexistent/none.cir"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn convergence_failure_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("loop.cir");
    // Two ideal sources in parallel disagree: no solution exists.
    fs::write(&f, "loop\nV1 a 0 DC 1\nV2 a 0 DC 2\nR1 a 0 1k\n.op\n").unwrap();
    let o = mirrorsim(&["run", f.to_str().unwrap(), "-o", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn compare_thd_prefers_the_memristor_variant() {
    let o = mirrorsim(&[
        "compare",
        corpus("widlar.cir").to_str().unwrap(),
        corpus("widlar_mem.cir").to_str().unwrap(),
        "--metric",
        "thd",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = stdout(&o);
    assert!(table.contains("Verdict: widlar_mem.cir has lower THD than widlar.cir"), "{table}");
}

#[test]
fn compare_with_itself_is_equal() {
    let f = corpus("widlar.cir");
    let o = mirrorsim(&["compare", f.to_str().unwrap(), f.to_str().unwrap(), "--metric", "thd"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("Verdict: equal"));
}

#[test]
fn compare_power_lists_components_and_totals() {
    let o = mirrorsim(&[
        "compare",
        corpus("widlar.cir").to_str().unwrap(),
        corpus("widlar_mem.cir").to_str().unwrap(),
        "--metric",
        "power",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = stdout(&o);
    for row in ["R1", "MIN", "VCC", "total delivered", "total dissipated", "Verdict:"] {
        assert!(table.contains(row), "missing {row}:\n{table}");
    }
}

#[test]
fn compare_thd_without_fourier_exits_2() {
    let o = mirrorsim(&[
        "compare",
        corpus("basic_cm.cir").to_str().unwrap(),
        corpus("widlar.cir").to_str().unwrap(),
        "--metric",
        "thd",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains(".four"));
}

#[test]
fn bad_arguments_exit_1() {
    assert_eq!(mirrorsim(&["run"]).status.code(), Some(1));
    assert_eq!(mirrorsim(&["frobnicate"]).status.code(), Some(1));
}
