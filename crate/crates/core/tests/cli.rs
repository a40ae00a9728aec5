use std::path::PathBuf;
use std::process::{Command, Output};

fn intermod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_intermod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = intermod(args);
    assert!(
        out.status.success(),
        "intermod {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("intermod-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// Header plus data rows, skipping comment lines.
fn rows(csv: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = csv.lines().filter(|l| !l.starts_with('#'));
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let data = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, data)
}

fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn weights_table_has_manifest_and_known_value() {
    let csv = stdout(&["weights"]);
    assert!(csv.starts_with("# intermod "));
    assert!(csv.contains("# schema: weights/v1"));
    let (header, data) = rows(&csv);
    assert_eq!(header, ["alpha", "rho_mag", "norm0_sq", "norm1_sq", "xi_oracle", "xi_paper_printed"]);
    assert_eq!(data.len(), 200);
    let row = data.iter().find(|r| r[0] == "0.2" && r[1] == "0.8").unwrap();
    assert_eq!(row[4], "1.61111111111");
}

#[test]
fn closed_form_comparison_adds_columns() {
    let csv = stdout(&["weights", "--alpha", "0.2", "--rho", "0.8", "--paper-closed-forms"]);
    let (header, data) = rows(&csv);
    assert_eq!(header.len(), 8);
    let diff: f64 = data[0][column(&header, "xi_difference")].parse().unwrap();
    let oracle: f64 = data[0][column(&header, "xi_oracle")].parse().unwrap();
    let printed: f64 = data[0][column(&header, "xi_paper_printed")].parse().unwrap();
    assert!((diff - (printed - oracle)).abs() < 1e-10 || (diff - (oracle - printed)).abs() < 1e-10);
}

#[test]
fn theory_single_sample_point() {
    let csv = stdout(&["theory", "--n", "1", "--snr-db", "0"]);
    let (header, data) = rows(&csv);
    assert_eq!(data.len(), 1);
    assert_eq!(data[0][column(&header, "pe")], "0.375");
    assert_eq!(data[0][column(&header, "threshold")], "1.38629436112");
}

#[test]
fn theory_thresholds_positive_and_pdfs_normalised() {
    let pdf_path = scratch("pdf.csv");
    let csv = stdout(&["theory", "--n", "1,10,100", "--snr-db", "-10,0,10", "--pdf-out", pdf_path.to_str().unwrap()]);
    let (header, data) = rows(&csv);
    let t = column(&header, "threshold");
    assert!(data.iter().all(|r| r[t].parse::<f64>().unwrap() > 0.0));

    let pdf = std::fs::read_to_string(&pdf_path).unwrap();
    assert!(pdf.contains("# schema: theory-pdf/v1"));
    let (header, data) = rows(&pdf);
    let (cn, cs, ce, cm) = (
        column(&header, "n"),
        column(&header, "snr_db"),
        column(&header, "epsilon"),
        column(&header, "pdf_mixture"),
    );
    type Curve = ((String, String), Vec<(f64, f64)>);
    let mut curves: Vec<Curve> = Vec::new();
    for r in &data {
        let key = (r[cn].clone(), r[cs].clone());
        let point = (r[ce].parse().unwrap(), r[cm].parse().unwrap());
        match curves.last_mut() {
            Some((k, pts)) if *k == key => pts.push(point),
            _ => curves.push((key, vec![point])),
        }
    }
    assert_eq!(curves.len(), 9);
    for (key, pts) in curves {
        let area: f64 = pts.windows(2).map(|w| 0.5 * (w[1].0 - w[0].0) * (w[1].1 + w[0].1)).sum();
        assert!((area - 1.0).abs() < 1e-3, "{key:?}: {area}");
    }
}

#[test]
fn ber_is_reproducible_across_runs_and_thread_counts() {
    let args = ["ber", "--n", "10", "--snr-db", "-5,0", "--bits", "20000", "--seed", "42"];
    let a = stdout(&args);
    let b = stdout(&args);
    assert_eq!(a, b);
    let one = stdout(&[&args[..], &["--jobs", "1"]].concat());
    let eight = stdout(&[&args[..], &["--jobs", "8"]].concat());
    assert_eq!(one, eight);
    assert_eq!(a, one);
    let other = stdout(&["ber", "--n", "10", "--snr-db", "-5,0", "--bits", "20000", "--seed", "43"]);
    assert_ne!(rows(&a).1, rows(&other).1);
}

#[test]
fn ber_writes_to_out_path() {
    let path = scratch("ber.csv");
    let printed = stdout(&["ber", "--n", "10", "--snr-db", "0", "--bits", "5000", "--out", path.to_str().unwrap()]);
    assert!(printed.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let (header, data) = rows(&text);
    assert_eq!(data.len(), 1);
    assert_eq!(data[0][column(&header, "n_bits")], "5000");
    assert!(text.contains(&format!("# out: {}", path.display())));
    assert!(text.lines().last().unwrap().starts_with("# within_3sigma "));
}

#[test]
fn sumrate_baseline_and_infeasible_rows() {
    let csv = stdout(&["sumrate", "--rho", "0.1,0.9", "--alpha", "0,1e-6,0.01,0.5"]);
    let (header, data) = rows(&csv);
    let (ca, cn, cs, ct) = (
        column(&header, "alpha"),
        column(&header, "n_alpha"),
        column(&header, "su_rate"),
        column(&header, "total"),
    );
    assert_eq!(data.len(), 8);
    for r in &data {
        if r[ca] == "0" {
            assert_eq!(r[ct], "9.96722625884");
        }
        if r[cn].is_empty() {
            assert_eq!(r[cs], "0");
        }
    }
    assert!(data.iter().any(|r| r[cn].is_empty()));
    assert!(csv.contains("# baseline log2(1+gamma) 9.96722625884"));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let cfg = scratch("weights.toml");
    std::fs::write(&cfg, "k = 5\nalpha = 0.5\nrho = [0.1, 0.2]\n").unwrap();
    let csv = stdout(&["weights", "--config", cfg.to_str().unwrap(), "--alpha", "0.3"]);
    assert!(csv.contains("# param k = 5  [config]"));
    assert!(csv.contains("# param alpha = 0.3  [flag]"));
    assert!(csv.contains("# param rho_phase = 0\n"));
    let (_, data) = rows(&csv);
    assert_eq!(data.len(), 2);
    assert!(data.iter().all(|r| r[0] == "0.3"));
}

#[test]
fn usage_errors_are_reported() {
    for args in [
        &["weights", "--alpha", "abc"][..],
        &["weights", "--alpha", "1.5"],
        &["bogus"],
        &["ber", "--jobs", "x"],
        &["theory", "--snr-db", "1:2"],
    ] {
        let out = intermod(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.starts_with("error[usage]"), "{args:?}: {err}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn domain_and_io_errors_have_their_own_codes() {
    let out = intermod(&["weights", "--k", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[domain]"));

    let out = intermod(&["weights", "--config", "/nonexistent/intermod.toml"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error[io]"));
}

#[test]
fn unknown_config_key_is_rejected() {
    let cfg = scratch("bad.toml");
    std::fs::write(&cfg, "k = 5\nsnr = 3\n").unwrap();
    let out = intermod(&["weights", "--config", cfg.to_str().unwrap()]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("snr"));
}

#[test]
fn in_process_execute_matches_binary() {
    let arts = intermod::cli::execute(["intermod", "theory", "--n", "10", "--snr-db", "-3"]).unwrap();
    assert_eq!(arts.len(), 1);
    assert_eq!(arts[0].path, "-");
    assert_eq!(arts[0].text, stdout(&["theory", "--n", "10", "--snr-db", "-3"]));
}
