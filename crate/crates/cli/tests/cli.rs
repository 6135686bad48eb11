use std::path::Path;
use std::process::{Command, Output};

use shiftcorr::arith::{load_table, sieve};
use shiftcorr::correlation::correlate_linear;
use shiftcorr::ArithFn;

fn shiftcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftcorr"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sieve_file_rereads_first_ten_mobius_values() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m.tbl");
    let o = shiftcorr(&[
        "sieve",
        "--fn",
        "mobius",
        "--start",
        "1",
        "--len",
        "10",
        "--out",
        path_str(&file),
    ]);
    assert!(o.status.success(), "{o:?}");
    let table = load_table(&file).unwrap();
    assert_eq!(table.values(), &[1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
    assert_eq!(std::fs::metadata(&file).unwrap().len(), 22 + 10);
}

#[test]
fn file_and_in_memory_correlations_agree() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("l.tbl");
    let (x, tmax) = (5000u64, 40u64);
    let len = (x + tmax).to_string();
    assert!(shiftcorr(&[
        "sieve",
        "--fn",
        "liouville",
        "--len",
        &len,
        "--out",
        path_str(&file)
    ])
    .status
    .success());
    let (xs, ts) = (x.to_string(), tmax.to_string());
    let from_file = shiftcorr(&[
        "correlate",
        "--in",
        path_str(&file),
        "--x",
        &xs,
        "--tmax",
        &ts,
    ]);
    let sieved = shiftcorr(&["correlate", "--fn", "liouville", "--x", &xs, "--tmax", &ts]);
    assert!(from_file.status.success() && sieved.status.success());
    assert_eq!(stdout(&from_file), stdout(&sieved));

    let la = sieve(ArithFn::Liouville, 1, x + tmax).unwrap();
    let series = correlate_linear(&la, &la, x, tmax).unwrap();
    let mut expected = Vec::new();
    series.write_csv(&mut expected).unwrap();
    assert_eq!(stdout(&from_file).into_bytes(), expected);
}

#[test]
fn verify_passes() {
    let o = shiftcorr(&["verify"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("PASS ")).count() >= 20);
    assert!(!text.contains("FAIL "));
}

#[test]
fn constants_recovers_squarefree_density() {
    let o = shiftcorr(&[
        "constants",
        "--offsets",
        "0",
        "--prime-bound",
        "1000000",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let value = doc["value"].as_f64().unwrap();
    assert!(
        (value - 6.0 / std::f64::consts::PI.powi(2)).abs() < 1e-6,
        "{value}"
    );
}

#[test]
fn ktuple_small_example() {
    let o = shiftcorr(&["ktuple", "--offsets", "0,1,2", "--x", "8"]);
    assert_eq!(
        stdout(&o),
        "function,offsets,q,x,value,value_over_x\nmobius,0;1;2,1,8,2,0.25\n"
    );
}

#[test]
fn exit_codes() {
    assert_eq!(shiftcorr(&["--bogus", "verify"]).status.code(), Some(1));
    assert_eq!(
        shiftcorr(&["sieve", "--fn", "euler", "--len", "5", "--out", "x"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(
        shiftcorr(&["sieve", "--fn", "mobius", "--len", "5"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(shiftcorr(&["--help"]).status.code(), Some(0));
    let refused = shiftcorr(&[
        "--budget-mib",
        "1",
        "correlate",
        "--x",
        "10000000",
        "--tmax",
        "5",
    ]);
    assert_eq!(refused.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&refused.stderr).contains("exceeds budget"));
}

#[test]
fn sweep_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("spec.json");
    std::fs::write(
        &config,
        r#"{"kind":"SUP_TWISTED","x_grid":[10000,20000],"q_bound":10,"random_samples":20,"seed":1}"#,
    )
    .unwrap();
    let mut bodies = Vec::new();
    for threads in ["1", "8"] {
        // Same relative --out in separate directories, so the echoed spec matches.
        let run_dir = dir.path().join(format!("t{threads}"));
        std::fs::create_dir(&run_dir).unwrap();
        let o = Command::new(env!("CARGO_BIN_EXE_shiftcorr"))
            .current_dir(&run_dir)
            .args([
                "--threads",
                threads,
                "--format",
                "json",
                "--out",
                "report.json",
            ])
            .args(["sweep", "--config", path_str(&config)])
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(run_dir.join("report.timings.csv").exists());
        bodies.push(std::fs::read(run_dir.join("report.json")).unwrap());
    }
    assert_eq!(bodies[0], bodies[1]);
    let doc: serde_json::Value = serde_json::from_slice(&bodies[0]).unwrap();
    assert_eq!(doc["schema_version"], 1);
    assert_eq!(doc["conventions"]["dft_sign"], "FORWARD_POSITIVE");
}
