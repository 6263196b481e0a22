use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use cgsws::bench::{rescale_snr, sample_signal, TestSignal};
use cgsws::cli::{parse_coefficients, parse_signal, run_selfcheck, CheckLevel};
use cgsws::distributions::{sample_normal, RngStream};
use cgsws::transform::{load_filters, ComplexFilterPair};
use num_complex::Complex64;
use tempfile::TempDir;

fn cgsws(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cgsws"))
        .args(args)
        .env_remove("CGSWS_SEED")
        .output()
        .unwrap()
}

fn write_column(path: &Path, values: &[f64]) {
    let body: String = values.iter().map(|v| format!("{v}\n")).collect();
    fs::write(path, body).unwrap();
}

fn read_column(path: &Path) -> Vec<f64> {
    parse_signal(&fs::read_to_string(path).unwrap(), "test").unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn noisy_heavisine(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let truth = rescale_snr(&sample_signal(TestSignal::Heavisine, n).unwrap(), 4.0).unwrap();
    let mut rng = RngStream::new(seed, 0);
    let y = truth.iter().map(|t| t + sample_normal(&mut rng)).collect();
    (truth, y)
}

fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64
}

#[test]
fn zero_signal_denoises_to_zero() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("zeros.csv");
    write_column(&input, &[0.0; 256]);
    let o = cgsws(&["denoise", input.to_str().unwrap(), "--iters", "200", "--burnin", "100"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = read_column(&dir.path().join("zeros.csv.denoised.csv"));
    assert_eq!(out.len(), 256);
    assert!(out.iter().all(|v| v.abs() < 1e-6));
    assert!(dir.path().join("zeros.csv.denoised.json").exists());
}

#[test]
fn denoising_reduces_error_and_writes_sidecar() {
    let dir = TempDir::new().unwrap();
    let (truth, y) = noisy_heavisine(512, 3);
    let input = dir.path().join("noisy.csv");
    let output = dir.path().join("clean.csv");
    write_column(&input, &y);
    let o = cgsws(&[
        "denoise",
        input.to_str().unwrap(),
        "-o",
        output.to_str().unwrap(),
        "--iters",
        "1000",
        "--burnin",
        "500",
        "--seed",
        "5",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let est = read_column(&output);
    assert!(mse(&est, &truth) < 0.5 * mse(&y, &truth));

    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("clean.json")).unwrap()).unwrap();
    assert_eq!(sidecar["n"], 512);
    assert_eq!(sidecar["method"], "cgsws");
    assert!(sidecar["sigma2"].as_f64().unwrap() > 0.5 && sidecar["sigma2"].as_f64().unwrap() < 2.0);
    assert!(sidecar["imag_residual"].as_f64().unwrap().is_finite());
}

#[test]
fn baseline_methods_run_from_the_cli() {
    let dir = TempDir::new().unwrap();
    let (truth, y) = noisy_heavisine(256, 4);
    let input = dir.path().join("noisy.csv");
    write_column(&input, &y);
    for method in ["cmws-hard", "ceb"] {
        let output = dir.path().join(format!("{method}.csv"));
        let o = cgsws(&[
            "denoise",
            input.to_str().unwrap(),
            "-o",
            output.to_str().unwrap(),
            "--method",
            method,
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(mse(&read_column(&output), &truth) < mse(&y, &truth));
    }
    let o = cgsws(&["denoise", input.to_str().unwrap(), "--method", "median"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn missing_input_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("absent.csv");
    let o = cgsws(&["denoise", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("absent.csv"), "{}", stderr(&o));
}

#[test]
fn non_power_of_two_needs_pad() {
    let dir = TempDir::new().unwrap();
    let (_, y) = noisy_heavisine(512, 6);
    let input = dir.path().join("odd.csv");
    write_column(&input, &y[..300]);
    let o = cgsws(&["denoise", input.to_str().unwrap(), "--iters", "200", "--burnin", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("300"), "{}", stderr(&o));

    let o = cgsws(&[
        "denoise",
        input.to_str().unwrap(),
        "--pad",
        "--iters",
        "200",
        "--burnin",
        "100",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read_column(&dir.path().join("odd.csv.denoised.csv")).len(), 300);
    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("odd.csv.denoised.json")).unwrap()).unwrap();
    assert_eq!(sidecar["padded_n"], 512);
}

#[test]
fn bench_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let prefix = dir.path().join("study");
    let args = [
        "bench", "--signal", "doppler", "--n", "128", "--snr", "5", "--reps", "1", "--seed", "7", "--iters", "300",
        "--burnin", "150",
    ];
    let a = cgsws(&args);
    let b = cgsws(&args);
    assert!(a.status.success(), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("doppler") && text.contains("AMSE="), "{text}");

    let mut with_out = args.to_vec();
    with_out.extend(["--out", prefix.to_str().unwrap()]);
    assert!(cgsws(&with_out).status.success());
    let csv = fs::read_to_string(prefix.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(prefix.with_extension("json").exists());

    let o = cgsws(&["bench", "--signal", "nosuch"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nosuch"));
}

#[test]
fn transform_round_trip() {
    let dir = TempDir::new().unwrap();
    let (_, y) = noisy_heavisine(128, 8);
    let input = dir.path().join("x.csv");
    let coeffs = dir.path().join("x.coef");
    let back = dir.path().join("x.back.csv");
    write_column(&input, &y);
    let o = cgsws(&[
        "transform",
        input.to_str().unwrap(),
        "--j0",
        "3",
        "-o",
        coeffs.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let tree = parse_coefficients(&fs::read_to_string(&coeffs).unwrap(), "x.coef").unwrap();
    assert_eq!(tree.j0, 3);
    let o = cgsws(&[
        "transform",
        coeffs.to_str().unwrap(),
        "--direction",
        "inverse",
        "-o",
        back.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rec = read_column(&back);
    assert!(rec.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-9));
}

#[test]
fn transform_of_constant_has_no_detail() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("c.csv");
    write_column(&input, &[2.5; 64]);
    let o = cgsws(&["transform", input.to_str().unwrap(), "--j0", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let tree = parse_coefficients(&text, "stdout").unwrap();
    assert!(tree.details.iter().flatten().all(|c| c.norm() < 1e-9));
    assert!(tree.approx.iter().all(|c| c.norm() > 1.0));
}

#[test]
fn inconsistent_coefficient_file_rejected() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("bad.coef");
    // level 2 should hold 4 coefficients
    fs::write(
        &path,
        "j,k,re,im\n-1,0,1,0\n-1,1,1,0\n-1,2,1,0\n-1,3,1,0\n2,0,0,0\n2,1,0,0\n3,0,0,0\n",
    )
    .unwrap();
    let o = cgsws(&["transform", path.to_str().unwrap(), "--direction", "inverse"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn selfcheck_quick_passes() {
    let o = cgsws(&["selfcheck", "--level", "quick"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}{}",
        String::from_utf8_lossy(&o.stdout),
        stderr(&o)
    );
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("[PASS] filter scd3"));
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn selfcheck_names_the_broken_invariant() {
    let good = load_filters("scd3").unwrap();
    let mut taps = good.low_pass().to_vec();
    taps[2] += Complex64::new(0.05, 0.0);
    let broken = ComplexFilterPair::from_taps_unchecked("scd3-broken", taps);
    let report = run_selfcheck(CheckLevel::Quick, &[broken]);
    assert!(!report.passed());
    let failures: Vec<_> = report.failures().collect();
    assert!(
        failures
            .iter()
            .any(|c| c.name == "filter scd3-broken" && c.detail.contains("sqrt(2)")),
        "{failures:?}"
    );
    assert!(failures.iter().any(|c| c.name.starts_with("unitarity")));
    assert!(report.to_string().contains("[FAIL] filter scd3-broken"));
}

#[test]
fn config_file_and_seed_environment() {
    let dir = TempDir::new().unwrap();
    let (_, y) = noisy_heavisine(128, 9);
    let input = dir.path().join("y.csv");
    write_column(&input, &y);
    let config = dir.path().join("run.conf");
    fs::write(&config, "# short chains\niters = 200\nburnin = 100\nseed = 3\n").unwrap();

    let run = |name: &str, extra: &[&str], env_seed: Option<&str>| {
        let out = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_cgsws"));
        cmd.args([
            "--config",
            config.to_str().unwrap(),
            "denoise",
            input.to_str().unwrap(),
            "-o",
        ])
        .arg(&out)
        .args(extra)
        .env_remove("CGSWS_SEED");
        if let Some(s) = env_seed {
            cmd.env("CGSWS_SEED", s);
        }
        let o = cmd.output().unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        let sidecar: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
        (read_column(&out), sidecar)
    };
    let (from_file, meta) = run("a.csv", &[], None);
    assert_eq!(meta["config"]["iters"], 200);
    assert_eq!(meta["config"]["seed"], 3);
    let (flag, meta) = run("b.csv", &["--seed", "4", "--iters", "300"], None);
    assert_eq!(meta["config"]["iters"], 300);
    assert_eq!(meta["config"]["seed"], 4);
    assert_ne!(from_file, flag);
    // the file's seed wins over the environment
    let (env_ignored, _) = run("c.csv", &[], Some("99"));
    assert_eq!(env_ignored, from_file);

    // without a seed anywhere the environment variable is used
    let plain = dir.path().join("plain.conf");
    fs::write(&plain, "iters = 200\nburnin = 100\n").unwrap();
    let with_env = |s: &str, name: &str| {
        let out = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_cgsws"))
            .args([
                "--config",
                plain.to_str().unwrap(),
                "denoise",
                input.to_str().unwrap(),
                "-o",
            ])
            .arg(&out)
            .env("CGSWS_SEED", s)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", stderr(&o));
        read_column(&out)
    };
    assert_eq!(with_env("3", "d.csv"), from_file);
    assert_ne!(with_env("5", "e.csv"), from_file);
}

#[test]
fn help_and_bad_flags() {
    assert_eq!(cgsws(&["--help"]).status.code(), Some(0));
    assert_eq!(cgsws(&["denoise"]).status.code(), Some(2));
    assert_eq!(cgsws(&["selfcheck", "--level", "slow"]).status.code(), Some(2));
    assert_eq!(cgsws(&["bench", "--scale", "huge"]).status.code(), Some(2));
}
