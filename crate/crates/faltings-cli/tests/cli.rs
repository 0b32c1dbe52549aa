//! End-to-end tests of the `faltings` binary: flag plumbing, env-var
//! overrides, output formats, and exit codes.  The numerics behind each
//! subcommand are validated in the library's own suites; here we check the
//! CLI reports them faithfully.

use std::process::{Command, Output};

fn run(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_faltings"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn height_json_matches_library() {
    let out = run(&["height", "17", "-33", "--format", "json"], &[]);
    let v = stdout_json(&out);
    let want = faltings::heights::faltings_hf(17, -33).unwrap();
    let got = v["log_hf"].as_f64().unwrap();
    assert!((got - want.log_hf).abs() < 1e-12 * want.log_hf.abs());
    assert_eq!(v["lambda"].as_str().unwrap(), want.lambda.label());
    assert_eq!(v["min_disc"].as_i64().unwrap() as i128, want.min_disc);
}

#[test]
fn singular_curve_exits_2() {
    let out = run(&["height", "0", "0"], &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("singular"));
}

#[test]
fn count_reports_agreeing_counters() {
    let out = run(&["count", "--x", "0.001", "--format", "json"], &[]);
    let v = stdout_json(&out);
    assert_eq!(v["count"].as_u64(), v["sieve_count"].as_u64());
    assert_eq!(v["families"].as_array().unwrap().len(), 4);
    let ratio = v["ratio"].as_f64().unwrap();
    assert!(ratio > 0.9 && ratio < 1.05, "ratio = {ratio}");
}

#[test]
fn count_naive_matches_library() {
    let out = run(&["count", "--naive", "10000", "--format", "json"], &[]);
    let v = stdout_json(&out);
    let want = faltings::census::count_naive(1e4).unwrap();
    assert_eq!(v["count"].as_u64().unwrap(), want.count);
    assert!((v["prediction"].as_f64().unwrap() - want.prediction).abs() < 1e-9);
}

#[test]
fn conflicting_count_flags_exit_2() {
    let out = run(&["count", "--x", "1", "--naive", "100"], &[]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sigma_honors_tolerance_flag() {
    let out = run(&["sigma", "--tol", "1e-3", "--format", "json"], &[]);
    let v = stdout_json(&out);
    let sigma = v["quadrature"]["sigma"].as_f64().unwrap();
    let err = v["quadrature"]["error_bound"].as_f64().unwrap();
    assert!((sigma - 29088.6217672416763899851003323).abs() < 1e-3 * 29088.6);
    assert!(err <= 1e-3 * sigma);
    assert!(v["monte_carlo"].is_null());
}

#[test]
fn sigma_monte_carlo_is_deterministic() {
    let args = ["sigma", "--tol", "1e-2", "--mc-samples", "200000", "--seed", "7", "--format", "json"];
    let first = run(&args, &[]);
    let second = run(&args, &[]);
    assert_eq!(first.stdout, second.stdout);
    let v = stdout_json(&first);
    let mc = v["monte_carlo"]["sigma"].as_f64().unwrap();
    let se = v["monte_carlo"]["std_error"].as_f64().unwrap();
    let quad = v["quadrature"]["sigma"].as_f64().unwrap();
    assert!((mc - quad).abs() < 5.0 * se, "mc = {mc}, quad = {quad}, se = {se}");
}

#[test]
fn constants_csv_lists_all_seven() {
    let out = run(&["constants", "--format", "csv"], &[]);
    assert!(out.status.success());
    let body = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "name,value");
    assert_eq!(lines.len(), 8);
    let names: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(
        names,
        ["sup_g", "cusp_coeff", "eps0", "delta_i", "zeta10", "sigma", "census_constant"]
    );
    let sup_g: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((sup_g - 7674464.992087209).abs() < 1.0);
}

#[test]
fn classes_reports_exact_table_counts() {
    let out = run(&["classes", "--format", "json"], &[]);
    let v = stdout_json(&out);
    assert_eq!(v["counts_mod_64"]["minimal"].as_u64(), Some(4080));
    assert_eq!(v["counts_mod_64"]["nonminimal"].as_u64(), Some(12));
    assert_eq!(v["counts_mod_64"]["non_weakly_minimal"].as_u64(), Some(4));
    assert_eq!(v["counts_mod_729"]["minimal"].as_u64(), Some(531414));
    assert_eq!(v["counts_mod_729"]["nonminimal"].as_u64(), Some(18));
    assert_eq!(v["counts_mod_729"]["non_weakly_minimal"].as_u64(), Some(9));
    assert_eq!(v["family_sizes"]["1"].as_u64(), Some(2168169120));
    assert_eq!(v["family_sizes"]["6^-12"].as_u64(), Some(216));
    assert_eq!(v["nonminimal_mod_64"].as_array().unwrap().len(), 12);
    assert_eq!(v["nonminimal_mod_729"].as_array().unwrap().len(), 18);
}

#[test]
fn boundary_csv_is_rectangular() {
    let out = run(&["boundary", "--x", "1", "--n", "12", "--format", "csv"], &[]);
    assert!(out.status.success());
    let body = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = body.lines().collect();
    assert_eq!(lines[0], "a,b,eps,f_a,f_b");
    assert_eq!(lines.len(), 13);
    let mut tongue = 0;
    for row in &lines[1..] {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), 5);
        for idx in [0, 1, 3, 4] {
            let x: f64 = cells[idx].parse().unwrap();
            assert!(x.is_finite());
        }
        if !cells[2].is_empty() {
            tongue += 1;
            let _: f64 = cells[2].parse().unwrap();
        }
    }
    assert_eq!(tongue, 6, "n − 2·(n/4) tongue points carry eps");
}

#[test]
fn precision_below_53_is_rejected_and_above_clamps() {
    let out = run(&["constants", "--precision", "52"], &[]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["constants", "--precision", "100"], &[]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("clamping to 53"));
}

#[test]
fn env_vars_select_format_and_outfile() {
    let path = std::env::temp_dir().join(format!("faltings-cli-{}.json", std::process::id()));
    let path_s = path.to_str().unwrap();
    let out = run(
        &["count", "--x", "0.001"],
        &[("FALTINGS_FORMAT", "json"), ("FALTINGS_OUT", path_s)],
    );
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let body = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&body).unwrap();
    assert_eq!(v["count"].as_u64(), v["sieve_count"].as_u64());
    std::fs::remove_file(&path).ok();
}

#[test]
fn domain_errors_exit_2() {
    for args in [
        vec!["count", "--x", "-1"],
        vec!["boundary", "--x", "1", "--n", "4"],
        vec!["sigma", "--tol", "1"],
    ] {
        let out = run(&args, &[]);
        assert_eq!(out.status.code(), Some(2), "args = {args:?}");
    }
}

#[test]
fn thread_pool_flag_is_deterministic() {
    let args = ["count", "--x", "0.01", "--threads", "3", "--format", "json"];
    let first = run(&args, &[]);
    let second = run(&args, &[]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}
