//! End-to-end behaviour of the `lrsearch` binary.

use std::process::{Command, Output};

use lrsearch_cli::{EXIT_CONFIG, EXIT_OK, EXIT_VALIDATION};

fn lrsearch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lrsearch"))
        .args(args)
        .env(lrsearch_cli::WORKERS_ENV, "2")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// Parses CSV text into a header and rows of fields (no quoted fields).
fn csv(bytes: &[u8]) -> (Vec<String>, Vec<Vec<String>>) {
    let text = String::from_utf8(bytes.to_vec()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<String> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].clone()).collect()
}

fn numbers(cells: Vec<String>) -> Vec<f64> {
    cells.iter().map(|c| c.parse().unwrap()).collect()
}

#[test]
fn gap_scan_apd_shrinks_with_n() {
    let out = lrsearch(&["gap-scan", "--n", "2^10:2^14:x2", "--alpha", "2"]);
    assert_eq!(code(&out), EXIT_OK);
    let (h, rows) = csv(&out.stdout);
    let apd = numbers(column(&h, &rows, "apd_Delta"));
    assert_eq!(apd.len(), 5);
    assert!(apd.windows(2).all(|w| w[1] < w[0]), "{apd:?}");
    assert!(column(&h, &rows, "regime")
        .iter()
        .all(|r| r == "intermediate"));
}

#[test]
fn gap_scan_plateau_below_d() {
    let out = lrsearch(&["gap-scan", "--n", "2^10:2^14:x2", "--alpha", "0.5"]);
    let (h, rows) = csv(&out.stdout);
    let gaps = numbers(column(&h, &rows, "Delta_exact"));
    let steps: Vec<f64> = gaps.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    assert!(steps.windows(2).all(|s| s[1] < s[0]), "{gaps:?}");
    let predicted = numbers(column(&h, &rows, "Delta_asymptotic"));
    assert!(predicted.windows(2).all(|w| w[0] == w[1]));
    assert!(gaps
        .iter()
        .all(|g| (g - predicted[0]).abs() / predicted[0] < 0.03));
}

#[test]
fn empty_alpha_list_exits_2() {
    let out = lrsearch(&["gap-scan", "--n", "16", "--alpha", ""]);
    assert_eq!(code(&out), EXIT_CONFIG);
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
}

#[test]
fn domain_errors_exit_2() {
    for args in [
        ["gap-scan", "--n", "15", "--alpha", "1"],
        ["gap-scan", "--n", "16", "--alpha", "-1"],
        ["gap-scan", "--n", "16", "--alpha", "x"],
        ["gap-scan", "--n", "16", "--norm", "chebyshev"],
        ["gap-scan", "--n", "1024", "--max-n", "512"],
    ] {
        assert_eq!(code(&lrsearch(&args)), EXIT_CONFIG, "{args:?}");
    }
    // unknown flags are rejected by the parser with the same code
    assert_eq!(code(&lrsearch(&["gap-scan", "--bogus"])), EXIT_CONFIG);
}

#[test]
fn chi_map_single_point_and_trends() {
    let out = lrsearch(&["chi-map", "--n", "64", "--alpha", "1.2"]);
    let (_, rows) = csv(&out.stdout);
    assert_eq!(rows.len(), 1);

    let out = lrsearch(&["chi-map", "--n", "2^8:2^16:x4", "--alpha", "0.5,2"]);
    let (h, rows) = csv(&out.stdout);
    let chi = numbers(column(&h, &rows, "chi_exact"));
    let (complete, short): (Vec<f64>, Vec<f64>) = (
        chi.iter().step_by(2).copied().collect(),
        chi.iter().skip(1).step_by(2).copied().collect(),
    );
    assert!(complete.windows(2).all(|w| w[1] > w[0]) && complete[2] > 0.99);
    assert!(short.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn fidelity_series_starts_at_one_over_n() {
    let out = lrsearch(&[
        "fidelity",
        "--n",
        "1024",
        "--alpha",
        "0.5",
        "--samples",
        "101",
    ]);
    assert_eq!(code(&out), EXIT_OK);
    let (h, rows) = csv(&out.stdout);
    assert_eq!(rows.len(), 101);
    let f = numbers(column(&h, &rows, "fidelity"));
    assert!((f[0] - 1.0 / 1024.0).abs() < 1e-15);
    // the horizon spans two predicted search times: the peak sits mid-series
    let peak = f
        .iter()
        .enumerate()
        .fold((0, 0.0), |a, (i, &v)| if v > a.1 { (i, v) } else { a });
    assert!((45..=55).contains(&peak.0), "{peak:?}");
    let meta: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    let t = meta["summary"]["T"].as_f64().unwrap();
    let t2 = meta["summary"]["T_two_level"].as_f64().unwrap();
    assert!((t - t2).abs() / t2 < 0.1);
}

#[test]
fn fidelity_two_level_column_tracks_exact_for_small_alpha() {
    let out = lrsearch(&[
        "fidelity",
        "--n",
        "4096",
        "--alpha",
        "0.5",
        "--samples",
        "41",
    ]);
    let (h, rows) = csv(&out.stdout);
    let exact = numbers(column(&h, &rows, "fidelity"));
    let two = numbers(column(&h, &rows, "two_level"));
    let peak = exact.iter().cloned().fold(0.0, f64::max);
    let peak_two = two.iter().cloned().fold(0.0, f64::max);
    assert!(
        (peak - peak_two).abs() / peak < 0.05,
        "{peak} vs {peak_two}"
    );
}

#[test]
fn fidelity_with_oracle_matches_dense() {
    let out = lrsearch(&[
        "fidelity",
        "--n",
        "128",
        "--alpha",
        "1.2",
        "--oracle",
        "on",
        "--samples",
        "21",
    ]);
    let (h, rows) = csv(&out.stdout);
    let exact = numbers(column(&h, &rows, "fidelity"));
    let dense = numbers(column(&h, &rows, "oracle_fidelity"));
    for (a, b) in exact.iter().zip(&dense) {
        assert!((a - b).abs() < 1e-10);
    }
    assert_eq!(
        code(&lrsearch(&["fidelity", "--n", "16,32", "--alpha", "1"])),
        EXIT_CONFIG
    );
}

#[test]
fn dos_fit_and_out_of_regime_rows() {
    let out = lrsearch(&["dos", "--n", "2^14", "--alpha", "1.5,0.5"]);
    assert_eq!(code(&out), EXIT_OK);
    let (h, rows) = csv(&out.stdout);
    let alpha = column(&h, &rows, "alpha");
    let fit = column(&h, &rows, "d_s_fit");
    let theory = column(&h, &rows, "d_s_theory");
    let regime = column(&h, &rows, "regime");
    for i in 0..rows.len() {
        if alpha[i].starts_with("5.") {
            assert!(fit[i].is_empty() && theory[i].is_empty());
            assert_eq!(regime[i], "mimics-complete");
        } else {
            let f: f64 = fit[i].parse().unwrap();
            assert!((f - 4.0).abs() < 0.4, "{f}");
            assert_eq!(theory[i].parse::<f64>().unwrap(), 4.0);
        }
    }
    let lambda = numbers(column(&h, &rows, "lambda"));
    assert_eq!(lambda[0], 0.0);
}

#[test]
fn phase_examples() {
    let out = lrsearch(&["phase", "--d", "1,3,4", "--alpha", "1.4,4.5,7"]);
    let (h, rows) = csv(&out.stdout);
    let find = |d: &str, a: &str| {
        rows.iter()
            .find(|r| r[0] == d && r[1].starts_with(a))
            .unwrap()
            .clone()
    };
    let col = |name: &str| h.iter().position(|c| c == name).unwrap();
    let r = find("1", "1.39");
    assert_eq!(r[col("optimal")], "true");
    assert!((r[col("d_s")].parse::<f64>().unwrap() - 5.0).abs() < 1e-12);
    let r = find("3", "4.5");
    assert_eq!(r[col("at_alpha_c")], "true");
    assert_eq!(r[col("optimal")], "false");
    let r = find("4", "7");
    assert_eq!(r[col("regime")], "short-range");
    assert_eq!(r[col("optimal")], "false");
}

#[test]
fn validate_passes_and_catches_an_injected_fault() {
    let out = lrsearch(&["validate", "--d", "1,2", "--n", "8"]);
    assert_eq!(code(&out), EXIT_OK);
    let meta: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(meta["summary"]["passed"], true);
    let checks = meta["summary"]["checks"].as_array().unwrap();
    assert!(checks
        .iter()
        .all(|c| c["tolerance"].is_number() && c["observed"].is_number()));

    let out = lrsearch(&["validate", "--n", "8", "--inject-fault", "coupling-sign"]);
    assert_eq!(code(&out), EXIT_VALIDATION);
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("dispersion_fft_vs_direct"));
    assert!(text.contains("validation failed"));
}

#[test]
fn validate_over_the_oracle_cap_exits_2() {
    let out = lrsearch(&["validate", "--d", "1", "--n", "8192", "--alpha", "1.5"]);
    assert_eq!(code(&out), EXIT_CONFIG);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}

#[test]
fn out_file_sidecar_and_config_layering() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "d = 1\nn = \"32,64\"\nalpha = [0.5, 3.5]\nnorm = \"manhattan\"\n",
    )
    .unwrap();
    let csv_path = dir.path().join("scan.csv");
    let out = lrsearch(&[
        "chi-map",
        "--config",
        cfg.to_str().unwrap(),
        "--n",
        "16",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), EXIT_OK);
    assert!(out.stdout.is_empty());
    let (h, rows) = csv(&std::fs::read(&csv_path).unwrap());
    assert_eq!(column(&h, &rows, "n"), vec!["16", "16"]);
    assert!(column(&h, &rows, "norm").iter().all(|n| n == "manhattan"));

    let meta: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("scan.csv.json")).unwrap()).unwrap();
    assert_eq!(meta["command"], "chi-map");
    assert_eq!(meta["norm"], "manhattan");
    assert_eq!(meta["config"]["n"], serde_json::json!([16]));
    assert_eq!(meta["config"]["workers"], 2);
    assert!(meta["versions"]["lrsearch"].is_string());
    assert!(meta["wall_time_seconds"].as_f64().unwrap() >= 0.0);

    std::fs::write(&cfg, "dimension = 1\n").unwrap();
    let out = lrsearch(&["chi-map", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), EXIT_CONFIG);
}

#[test]
fn worker_count_does_not_change_output() {
    let run = |workers: &str| {
        Command::new(env!("CARGO_BIN_EXE_lrsearch"))
            .args([
                "gap-scan",
                "--d",
                "2",
                "--n",
                "8,16",
                "--alpha",
                "1:5:1",
                "--workers",
                workers,
            ])
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}
