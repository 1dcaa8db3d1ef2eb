use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rectwave::imageio::{axis_edges_fixture, load_coeffs_as, read_pgm_file};
use rectwave::transform2d::{CoeffContainer, TransformKind};

fn rectwave(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rectwave"))
        .args(args)
        .output()
        .expect("spawn rectwave")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rectwave-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn fixture_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/axis_edges_512.pgm")
}

#[test]
fn bundled_fixture_matches_generator() {
    let stored = read_pgm_file(fixture_path()).unwrap();
    assert_eq!(stored, axis_edges_fixture(512));
}

#[test]
fn compress_ratio_160_keeps_1638() {
    let fx = fixture_path();
    let o = rectwave(&[
        "compress",
        fx.to_str().unwrap(),
        "--ratio",
        "160",
        "--bank",
        "haar",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[4], "1638");
    assert_eq!(row[5], "262144");
    assert_eq!(row[6], "160.0391");
}

#[test]
fn compress_writes_outputs_and_appends_csv() {
    let pgm = scratch("recon.pgm");
    let csv = scratch("report.csv");
    let _ = std::fs::remove_file(&csv);
    for _ in 0..2 {
        let o = rectwave(&[
            "compress",
            "synth:noise:32",
            "--seed",
            "7",
            "--keep-n",
            "100",
            "--out",
            pgm.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(read_pgm_file(&pgm).unwrap().rows(), 32);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("image,bank"));
    assert_eq!(lines[1], lines[2]);
}

#[test]
fn theorem_strategy_needs_rect() {
    let o = rectwave(&[
        "compress",
        "synth:tensor_smooth:64",
        "--keep-n",
        "100",
        "--strategy",
        "theorem",
        "--transform",
        "square",
        "--bank",
        "haar",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = rectwave(&[
        "compress",
        "synth:tensor_smooth:64",
        "--keep-n",
        "100",
        "--strategy",
        "theorem",
        "--M",
        "1",
        "--p",
        "2",
        "--bank",
        "haar",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("theorem:M=1:p=2:N=100"));
}

#[test]
fn decompose_layout_and_errors() {
    let pgm = scratch("composite.pgm");
    let o = rectwave(&[
        "decompose",
        "synth:fixture:64",
        "--bank",
        "haar",
        "--transform",
        "rect",
        "--levels",
        "3,2",
        "--out",
        pgm.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let comp = read_pgm_file(&pgm).unwrap();
    assert_eq!((comp.rows(), comp.cols()), (64, 64));
    let dec = load_coeffs_as(
        &std::fs::read(pgm.with_extension("coeffs")).unwrap(),
        TransformKind::Rect,
    )
    .unwrap();
    assert_eq!(dec.total(), 64 * 64);

    let o = rectwave(&[
        "decompose",
        "synth:noise:100",
        "--levels",
        "3",
        "--out",
        pgm.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = rectwave(&[
        "decompose",
        "synth:noise:100",
        "--levels",
        "3",
        "--pad",
        "reflect",
        "--out",
        pgm.to_str().unwrap(),
    ]);
    assert!(o.status.success());
}

#[test]
fn compare_is_deterministic() {
    let args = ["compare", "synth:fixture:128", "--levels", "4"];
    let a = rectwave(&args);
    let b = rectwave(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 1 + 8);
}

#[test]
fn missing_input_is_io_error() {
    let o = rectwave(&["compare", "/nonexistent/lena.pgm"]);
    assert_eq!(o.status.code(), Some(2));
    let bad = scratch("bad.pgm");
    std::fs::write(&bad, b"P5\n4 4\n255\n\x00").unwrap();
    let o = rectwave(&["energy", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn energy_rows_equal_levels() {
    let o = rectwave(&["energy", "synth:fixture:64", "--levels", "4"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 1 + 4);
    let o = rectwave(&["energy", "synth:noise:16", "--levels", "2,3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn energy_of_constant_is_zero() {
    let flat = scratch("flat.pgm");
    let mut bytes = b"P5\n16 16\n255\n".to_vec();
    bytes.extend(std::iter::repeat_n(90u8, 256));
    std::fs::write(&flat, bytes).unwrap();
    let o = rectwave(&["energy", flat.to_str().unwrap(), "--bank", "haar"]);
    assert!(o.status.success());
    for line in stdout(&o).lines().skip(1) {
        let f: Vec<f64> = line
            .split(',')
            .skip(1)
            .map(|x| x.parse().unwrap())
            .collect();
        assert!(f.iter().all(|&v| v == 0.0), "{line}");
    }
}

#[test]
fn rate_budgets_must_be_sorted() {
    let o = rectwave(&[
        "rate",
        "--input",
        "synth:tensor_smooth:32",
        "--budgets",
        "64,16,32",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn rate_refits_power_law_curve() {
    let csv = scratch("curve.csv");
    let mut text = String::from("transform,bank,N,error_q\n");
    for k in 4..=12 {
        let n = 1usize << k;
        text.push_str(&format!("rect,haar,{n},{:e}\n", 5.0 / n as f64));
    }
    std::fs::write(&csv, text).unwrap();
    let o = rectwave(&["rate", "--curve", csv.to_str().unwrap()]);
    assert!(o.status.success());
    let out = stdout(&o);
    let slope: f64 = out.split_whitespace().last().unwrap().parse().unwrap();
    assert!((slope + 1.0).abs() < 1e-9, "{out}");
}

#[test]
fn rate_reports_both_curves() {
    let o = rectwave(&[
        "rate",
        "--input",
        "synth:tensor_smooth:64",
        "--budgets",
        "32,64,128,256,512",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(out.lines().filter(|l| l.starts_with("square,")).count(), 5);
    assert_eq!(out.lines().filter(|l| l.starts_with("rect,")).count(), 5);
    assert_eq!(out.lines().filter(|l| l.starts_with("# slope")).count(), 2);
}

#[test]
fn validate_filter_from_spec_file() {
    let good = scratch("haar.filter");
    std::fs::write(
        &good,
        rectwave::filterbank::builtin("haar")
            .unwrap()
            .to_filter_spec(),
    )
    .unwrap();
    let o = rectwave(&["validate-filter", "--filter-spec", good.to_str().unwrap()]);
    assert!(o.status.success());

    let bad = scratch("bad.filter");
    std::fs::write(
        &bad,
        "bank bad\nh 0 1 1\nh_dual 0 1 1\ng 0 1 -1\ng_dual 0 1 1\nmoments 1 1\n",
    )
    .unwrap();
    let o = rectwave(&["validate-filter", "--filter-spec", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}
