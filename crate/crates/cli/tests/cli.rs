//! Exit-code contract, report determinism and the sampling CSV surface of
//! the binary.

use std::process::Command;

fn glmix() -> Command {
    Command::new(env!("CARGO_BIN_EXE_glmix"))
}

#[test]
fn verify_passing_suite_exits_zero() {
    let out = glmix().args(["verify", "--suite", "erdelyi", "--tol", "1e-8"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn verify_unattainable_tolerance_exits_one() {
    let out = glmix().args(["verify", "--suite", "all", "--tol", "1e-30"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_unwritable_output_exits_two() {
    let out = glmix()
        .args(["verify", "--suite", "lasso", "--out", "/nonexistent/x.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_bad_config_exits_two() {
    let out = glmix()
        .args(["verify", "--suite", "lasso", "--mc-samples", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = glmix().args(["verify", "--suite", "no_such_suite"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_are_identical_up_to_timestamp() {
    let run = || {
        let out = glmix()
            .args(["verify", "--suite", "quantile", "--out", "-"])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        let json_start = text.find("{\n").unwrap();
        text[json_start..]
            .lines()
            .filter(|l| !l.contains("\"timestamp\""))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(run(), run());
}

#[test]
fn penalty_prints_twelve_significant_digits() {
    let cases = [
        (vec!["penalty", "--family", "check_loss", "--tau", "0.5", "--x", "1"], "0.500000000000"),
        (vec!["penalty", "--family", "check_loss", "--tau", "0.9", "--x", "1"], "0.900000000000"),
        (vec!["penalty", "--family", "svm", "--a", "1", "--b", "1", "--c", "1"], "2.00000000000"),
        (vec!["penalty", "--family", "lasso", "--x", "-2.5"], "2.50000000000"),
    ];
    for (args, want) in cases {
        let out = glmix().args(&args).output().unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), want, "{args:?}");
    }
}

#[test]
fn penalty_missing_parameters_exit_two() {
    let out = glmix().args(["penalty", "--family", "svm", "--a", "1", "--c", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = glmix().args(["penalty", "--family", "check_loss", "--x", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sample_is_deterministic_and_csv_shaped() {
    let dir = std::env::temp_dir();
    let p1 = dir.join(format!("glmix-cli-a-{}.csv", std::process::id()));
    let p2 = dir.join(format!("glmix-cli-b-{}.csv", std::process::id()));
    for p in [&p1, &p2] {
        let out = glmix()
            .args(["sample", "--density", "laplace", "--method", "khintchine", "-n", "10000", "--seed", "42", "--out"])
            .arg(p)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(&p1).unwrap();
    let b = std::fs::read(&p2).unwrap();
    assert_eq!(a, b, "same seed must give byte-identical files");
    let text = String::from_utf8(a).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("value"));
    assert_eq!(lines.count(), 10_000);
    std::fs::remove_file(&p1).ok();
    std::fs::remove_file(&p2).ok();
}

#[test]
fn sample_gig_inverse_cdf_passes_ks() {
    let out = glmix()
        .args([
            "sample", "--density", "gig", "--lambda", "1", "--delta", "1", "--gamma", "1",
            "--method", "inverse_cdf", "-n", "1e5", "--seed", "9",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let values: Vec<f64> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 100_000);
    let d = glmix_core::densities::gig_density(
        glmix_core::densities::GigParams::new(1.0, 1.0, 1.0).unwrap(),
    )
    .unwrap();
    let cdf = glmix_core::samplers::NumericCdf::build(&d, 16_384).unwrap();
    let ks = glmix_core::samplers::ks_statistic(&values, |x| cdf.eval(x));
    assert!(ks < glmix_core::samplers::ks_critical_1pct(values.len()), "ks = {ks}");
}

#[test]
fn khintchine_method_rejects_shifted_mode() {
    // a normal with its mode away from zero violates the product
    // representation; the derived factor density fails its normalization
    // check (the clamped negative part inflates the mass)
    let out = glmix()
        .args(["sample", "--density", "normal", "--mean", "2", "--method", "khintchine", "-n", "1000"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn khintchine_method_covers_one_sided_mode_at_zero() {
    // a decreasing density on (0, inf) is unimodal with mode at zero; the
    // factor density of Exp(1) is Gamma(2,1) and sampling goes through
    let out = glmix()
        .args(["sample", "--density", "exp", "--method", "khintchine", "-n", "1000", "--seed", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 1001);
}

#[test]
fn workers_env_is_respected() {
    let out = glmix()
        .env("GLMIX_WORKERS", "1")
        .args(["verify", "--suite", "erdelyi"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
