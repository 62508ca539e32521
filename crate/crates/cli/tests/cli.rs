use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn chiral(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chiral"))
        .args(args)
        .arg("--out-dir")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn error_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("stderr holds one JSON object")
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn gamma_table_header_and_manifest() {
    let d = tempfile::tempdir().unwrap();
    let out = chiral(d.path(), &["gamma-table", "--levels", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(d.path(), "gamma_table.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,l,delta,eps,Hn,Hn_pot,Hn_der,AGs_energy,gap,limit,rel_err"));
    assert_eq!(lines.count(), 2);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), csv);

    let m: serde_json::Value = serde_json::from_str(&read(d.path(), "gamma_table.manifest.json")).unwrap();
    assert_eq!(m["command"], "gamma-table");
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["settings"]["levels"], 2);
    assert_eq!(m["settings"]["kernel"], "quartic");
    let lv = m["derived"]["levels"].as_array().unwrap();
    assert_eq!(lv.len(), 2);
    let (eps, delta, l) = (lv[1]["eps"].as_f64().unwrap(), lv[1]["delta"].as_f64().unwrap(), lv[1]["l"].as_f64().unwrap());
    assert!((eps - 0.04).abs() < 1e-15);
    assert!((delta - 0.04f64.powf(0.6)).abs() < 1e-14);
    assert!((l - eps * delta.sqrt()).abs() < 1e-15);
}

#[test]
fn ground_state_example_has_zero_energy() {
    let d = tempfile::tempdir().unwrap();
    let out = chiral(d.path(), &["ground-state", "--chi", "0.7071,0.7071", "--alpha", "7.92"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = read(d.path(), "ground_state_energies.csv");
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    let col = |k: &str| row[header.iter().position(|h| *h == k).unwrap()];
    assert!(col("F_per_cell") <= 1e-20, "{}", col("F_per_cell"));
    assert!((col("delta") - 0.04).abs() < 1e-12);
    assert!(read(d.path(), "ground_state_field.csv").starts_with("# format = chiral-field-1\n"));
}

#[test]
fn bad_schedule_exits_with_scaling_violation() {
    let d = tempfile::tempdir().unwrap();
    // δ^{5/2}/l grows from level 0 to level 1
    let out = chiral(d.path(), &["gamma-table", "--eps", "0.08,0.04", "--delta", "0.2,0.19"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"]["code"], "SCALING_VIOLATION");
    assert!(!d.path().join("gamma_table.csv").exists());
}

#[test]
fn validation_errors_exit_two_with_json() {
    let d = tempfile::tempdir().unwrap();
    let out = chiral(d.path(), &["ground-state", "--chi", "1,1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"]["code"], "INVALID_CONFIGURATION");

    let out = chiral(d.path(), &["relax", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_json(&out)["error"]["code"], "USAGE_ERROR");

    let out = chiral(d.path(), &["diagnose", "--field", "/nonexistent/field.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(error_json(&out)["error"]["code"], "IO_ERROR");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.toml");
    fs::write(&cfg, "threads = 2\n[entropy-scan]\ncount = 3\nresolution = 16\n").unwrap();
    let out = chiral(d.path(), &["--config", cfg.to_str().unwrap(), "entropy-scan", "--count", "4"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(read(d.path(), "entropy_scan.csv").lines().count(), 5);
    let m: serde_json::Value = serde_json::from_str(&read(d.path(), "entropy_scan.manifest.json")).unwrap();
    assert_eq!(m["threads"], 2);
    assert_eq!(m["settings"]["resolution"], 16);
    assert_eq!(m["settings"]["count"], 4);

    fs::write(&cfg, "[entropy-scan]\ncuont = 3\n").unwrap();
    let out = chiral(d.path(), &["--config", cfg.to_str().unwrap(), "entropy-scan"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn relax_then_diagnose_stored_field() {
    let d = tempfile::tempdir().unwrap();
    let out = chiral(d.path(), &["relax", "--max-iters", "50"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = read(d.path(), "relax_trace.csv");
    let energies: Vec<f64> = trace.lines().skip(1).map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
    assert!(energies.windows(2).all(|w| w[1] <= w[0]));
    let m: serde_json::Value = serde_json::from_str(&read(d.path(), "relax.manifest.json")).unwrap();
    assert_eq!(m["derived"]["heuristic"], true);
    assert_eq!(m["derived"]["delta_source"], "commensurate");
    assert_eq!(m["settings"]["start"], "sharp");

    let field = d.path().join("relax_field.csv");
    let out = chiral(d.path(), &["diagnose", "--field", field.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r: serde_json::Value = serde_json::from_str(&read(d.path(), "diagnose.json")).unwrap();
    assert_eq!(r["nx"], 64);
    assert_eq!(r["curl_quantization"]["counts"]["other"], 0);
}

#[test]
fn outputs_identical_across_thread_counts() {
    let runs: Vec<Vec<String>> = ["1", "2", "8"]
        .iter()
        .map(|t| {
            let d = tempfile::tempdir().unwrap();
            let mut files = Vec::new();
            for (args, names) in [
                (vec!["gamma-table", "--levels", "2", "--wall-angle", "0.3"], vec!["gamma_table.csv"]),
                (vec!["wall-energy", "--levels", "2"], vec!["wall_energy.csv"]),
                (vec!["relax", "--max-iters", "200", "--boundary", "periodic", "--nx", "24", "--ny", "24", "--seed", "7"], vec!["relax_trace.csv", "relax_field.csv"]),
                (vec!["entropy-scan", "--count", "9"], vec!["entropy_scan.csv"]),
                (vec!["ground-state", "--nx", "48", "--ny", "40"], vec!["ground_state_energies.csv", "ground_state_field.csv"]),
            ] {
                let mut a = args.clone();
                a.extend(["--threads", t]);
                let out = chiral(d.path(), &a);
                assert!(out.status.success(), "{a:?}: {}", String::from_utf8_lossy(&out.stderr));
                files.extend(names.iter().map(|n| read(d.path(), n)));
            }
            let field = d.path().join("relax_field.csv");
            let out = chiral(d.path(), &["diagnose", "--field", field.to_str().unwrap(), "--threads", t]);
            assert!(out.status.success());
            files.push(read(d.path(), "diagnose.json"));
            files
        })
        .collect();
    assert!(runs.windows(2).all(|w| w[0] == w[1]));
}
