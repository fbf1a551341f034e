use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

fn bandset(args: &[&str], stdin: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_bandset"))
        .args(args)
        .env_remove("BANDSET_SEED")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("spawn bandset");
    // The child may exit before reading its input.
    let _ = child.stdin.take().unwrap().write_all(stdin);
    child.wait_with_output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn build_then_query_three_keys() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.tsv");
    let file = dir.path().join("ds.bset");
    std::fs::write(&input, "alpha\t1\nbeta\t0\ngamma\t1\n").unwrap();
    let out = bandset(&["build", "-i", path(&input), "-o", path(&file)], b"");
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rep = json(&out);
    assert_eq!(rep["m"], 3);
    assert_eq!(rep["schema_version"], 1);

    let q = bandset(&["query", "-f", path(&file)], b"alpha\nbeta\ngamma\n");
    assert!(q.status.success());
    assert_eq!(String::from_utf8(q.stdout).unwrap(), "1\n0\n1\n");

    let info = bandset(&["info", "-f", path(&file)], b"");
    assert_eq!(json(&info)["overhead"], rep["overhead"]);
    assert_eq!(json(&info)["total_bits"], rep["total_bits"]);
}

#[test]
fn malformed_hex_is_an_input_error_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.tsv");
    std::fs::write(&input, "a\t1\nb\t0\nc\tq7\n").unwrap();
    let out = bandset(
        &[
            "build",
            "-i",
            path(&input),
            "-o",
            path(&dir.path().join("x")),
        ],
        b"",
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn value_too_wide_and_duplicates_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out_file = dir.path().join("x");
    let wide = bandset(
        &[
            "build",
            "-i",
            "-",
            "-o",
            path(&out_file),
            "--value-bits",
            "2",
        ],
        b"a\t4\n",
    );
    assert_eq!(wide.status.code(), Some(2));
    let dup = bandset(
        &["build", "-i", "-", "-o", path(&out_file)],
        b"a\t1\na\t0\n",
    );
    assert_eq!(dup.status.code(), Some(2));
}

#[test]
fn construction_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let tsv: String = (0..200).map(|i| format!("key{i}\t1\n")).collect();
    let out = bandset(
        &[
            "build",
            "-i",
            "-",
            "-o",
            path(&dir.path().join("x")),
            "--block-len",
            "1",
            "--retries",
            "2",
        ],
        tsv.as_bytes(),
    );
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn corrupt_file_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.bset");
    std::fs::write(&file, b"not a structure").unwrap();
    let out = bandset(&["query", "-f", path(&file)], b"k\n");
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn builds_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let tsv: String = (0..5_000)
        .map(|i| format!("k{i}\t{:x}\n", i % 16))
        .collect();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for f in [&a, &b] {
        let out = bandset(
            &[
                "build",
                "-i",
                "-",
                "-o",
                path(f),
                "--value-bits",
                "4",
                "--seed",
                "9",
                "--chunk-size",
                "1000",
            ],
            tsv.as_bytes(),
        );
        assert!(out.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let keys: String = (0..5_000).map(|i| format!("k{i}\n")).collect();
    let q = bandset(&["query", "-f", path(&a)], keys.as_bytes());
    let want: String = (0..5_000).map(|i| format!("{:x}\n", i % 16)).collect();
    assert_eq!(String::from_utf8(q.stdout).unwrap(), want);
}

#[test]
fn seed_falls_back_to_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_bandset"))
        .args(["bench", "--m", "100"])
        .env("BANDSET_SEED", "42")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(json(&out)["params"]["base_seed"], 42);
}

#[test]
fn query_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("ds");
    bandset(
        &["build", "-i", "-", "-o", path(&file), "--value-bits", "8"],
        b"x\tab\ny\tcd\n",
    );
    let empty = bandset(&["query", "-f", path(&file)], b"");
    assert!(empty.status.success());
    assert!(empty.stdout.is_empty());
    let unknown = bandset(&["query", "-f", path(&file)], b"never-inserted\n");
    assert!(unknown.status.success());
    let line = String::from_utf8(unknown.stdout).unwrap();
    assert_eq!(line.trim_end().len(), 2);
}

#[test]
fn binary_keys_mode() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("ds");
    let mut records = Vec::new();
    let mut keys = Vec::new();
    for i in 0u64..100 {
        let key = format!("bin\t{i}\n").into_bytes();
        for buf in [&mut records, &mut keys] {
            buf.extend_from_slice(&(key.len() as u32).to_le_bytes());
            buf.extend_from_slice(&key);
        }
        records.extend_from_slice(&(i % 2).to_le_bytes());
    }
    let out = bandset(
        &["build", "-i", "-", "-o", path(&file), "--binary-keys"],
        &records,
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let q = bandset(&["query", "-f", path(&file), "--binary-keys"], &keys);
    let want: String = (0..100).map(|i| format!("{}\n", i % 2)).collect();
    assert_eq!(String::from_utf8(q.stdout).unwrap(), want);
}

#[test]
fn bench_overhead_near_target() {
    let out = bandset(
        &["bench", "--m", "100000", "--eps", "0.07", "--seed", "1"],
        b"",
    );
    assert!(out.status.success());
    let rep = json(&out);
    let overhead = rep["overhead"].as_f64().unwrap();
    assert!((overhead - 0.088).abs() <= 0.007, "{overhead}");
    assert!(rep["query_ns_per_key"].as_f64().unwrap() > 0.0);
    assert!(rep["construct_ns_per_key"].as_f64().unwrap() > 0.0);
}

#[test]
fn simulate_queue_is_deterministic() {
    let args = [
        "simulate", "queue", "--rho", "0.9", "--steps", "1000000", "--seed", "1",
    ];
    let a = bandset(&args, b"");
    let b = bandset(&args, b"");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.starts_with("rho,steps,seed,z_time_average"));
    assert!(text.lines().nth(1).unwrap().ends_with(",true"));
}

#[test]
fn simulate_coupling_positions_equal_pivots() {
    let out = bandset(
        &[
            "simulate", "coupling", "--m", "1000", "--trials", "100", "--eps", "0.1",
        ],
        b"",
    );
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let headers = rdr.headers().unwrap().clone();
    let col = headers.iter().position(|h| h == "pos_eq_piv").unwrap();
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| &r[col] == "true"));
}

#[test]
fn simulate_sweep_mean_height_decreases() {
    let out = bandset(
        &["simulate", "sweep", "--eps", "0.05,0.1,0.2", "--seed", "3"],
        b"",
    );
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(&out.stdout[..]);
    let col = rdr
        .headers()
        .unwrap()
        .iter()
        .position(|h| h == "mean_height")
        .unwrap();
    let means: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[col].parse().unwrap())
        .collect();
    assert_eq!(means.len(), 3);
    assert!(means.windows(2).all(|w| w[0] > w[1]), "{means:?}");
}

#[test]
fn simulate_cfrh_rows_and_bad_params() {
    let out = bandset(
        &[
            "simulate",
            "cfrh",
            "--n",
            "100",
            "--eps",
            "0.1",
            "--block-len",
            "8",
        ],
        b"",
    );
    assert!(out.status.success());
    let lines = String::from_utf8(out.stdout).unwrap();
    assert!(lines.lines().count() > 107);
    let bad = bandset(&["simulate", "sweep", "--eps", "1.5"], b"");
    assert_eq!(bad.status.code(), Some(2));
    let unknown = bandset(&["simulate", "nonsense"], b"");
    assert_eq!(unknown.status.code(), Some(2));
}
