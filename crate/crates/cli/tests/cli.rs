use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn gcoverlay(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcoverlay")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_adder_is_34_lines() {
    let o = gcoverlay(&["gen", "--kind", "adder", "--width", "6"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 34);
    assert_eq!(text.lines().filter(|l| l.contains(" = ")).count(), 30);
}

#[test]
fn gen_mult8_file_has_120_ands() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("mult8.gcn");
    let o = gcoverlay(&["gen", "--kind", "mult", "--width", "8", "--out", path_str(&file)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = gcoverlay(&["stats", "--netlist", path_str(&file), "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(doc["gate"]["ands"], 120);
    assert_eq!(doc["gate"]["reprogram10"], 12);
    assert_eq!(doc["problem"], "mult8");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["gen", "--kind", "bogus", "--width", "4"][..],
        &["gen", "--kind", "adder", "--width", "4", "--netlist", "x.gcn"],
        &["gen"],
        &["gen", "--kind", "sorter", "--width", "4"],
        &["gen", "--kind", "mult", "--width", "1"],
        &["simulate", "--kind", "adder", "--width", "4", "--cells", "0"],
        &["simulate", "--kind", "adder", "--width", "4", "--policy", "lru"],
        &["verify", "--kind", "adder", "--width", "4", "--seed", "abc"],
        &["frobnicate"],
    ] {
        let o = gcoverlay(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn help_exits_0() {
    assert_eq!(code(&gcoverlay(&["--help"])), 0);
    assert_eq!(code(&gcoverlay(&["simulate", "--help"])), 0);
}

#[test]
fn parse_errors_report_line_numbers() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("bad.gcn");
    fs::write(&file, "IN 0 1\n0 AND 1 = 2\n0 NAND 1 = 3\nOUT 3\n").unwrap();
    let o = gcoverlay(&["stats", "--netlist", path_str(&file)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    let o = gcoverlay(&["stats", "--netlist", path_str(&dir.path().join("missing.gcn"))]);
    assert_eq!(code(&o), 2);
}

#[test]
fn verify_adder_exhaustively() {
    let o = gcoverlay(&["verify", "--kind", "adder", "--width", "6"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("4096/4096 passed (exhaustive"), "{}", stdout(&o));
}

#[test]
fn verify_sorter_random_trials() {
    let o = gcoverlay(&["verify", "--kind", "sorter", "--width", "4", "--dim", "10", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!((doc["passed"].as_u64(), doc["total"].as_u64()), (Some(1000), Some(1000)));
    assert_eq!(doc["mode"], "random");
}

#[test]
fn corrupted_container_fails_verification() {
    let dir = TempDir::new().unwrap();
    let good = dir.path().join("g.bin");
    let o = gcoverlay(&["garble", "--kind", "mult", "--width", "4", "--seed", "9", "--out", path_str(&good)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = gcoverlay(&["verify", "--kind", "mult", "--width", "4", "--garbled", path_str(&good)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let mut bytes = fs::read(&good).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x5a;
    let bad = dir.path().join("bad.bin");
    fs::write(&bad, &bytes).unwrap();
    let o = gcoverlay(&["verify", "--kind", "mult", "--width", "4", "--garbled", path_str(&bad)]);
    assert_eq!(code(&o), 1, "{}", stdout(&o));
    assert!(stdout(&o).contains("matches neither decode label"), "{}", stdout(&o));

    fs::write(&bad, b"not a container").unwrap();
    let o = gcoverlay(&["verify", "--kind", "mult", "--width", "4", "--garbled", path_str(&bad)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn garble_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let files: Vec<_> = ["a.bin", "b.bin", "c.bin"].iter().map(|n| dir.path().join(n)).collect();
    for (f, seed) in files.iter().zip(["7", "7", "8"]) {
        let o = gcoverlay(&["garble", "--kind", "hamming", "--width", "30", "--seed", seed, "--out", path_str(f)]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let [a, b, c] = [0, 1, 2].map(|k| fs::read(&files[k]).unwrap());
    assert_eq!(a, b);
    assert_ne!(a, c);
    let summary = |seed: &str| stdout(&gcoverlay(&["garble", "--kind", "hamming", "--width", "30", "--seed", seed]));
    assert_eq!(summary("7"), summary("7"));
}

#[test]
fn simulate_is_deterministic_and_frozen() {
    let args = [
        "simulate", "--kind", "mult", "--width", "64", "--cells", "10,10", "--policy", "directly-used", "--overlap", "--packed",
        "--format", "json",
    ];
    let a = gcoverlay(&args);
    let b = gcoverlay(&args);
    assert_eq!(code(&a), 0, "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let doc: serde_json::Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(doc["total_ns"], 6_480_035.0);
    assert_eq!(doc["pcie_ns"], 2_425_600.0);
    assert_eq!(doc["and_gates"], 8128);
}

#[test]
fn sweep_emits_csv() {
    let o = gcoverlay(&["simulate", "--kind", "mult", "--width", "8", "--sweep-cells", "5,10,15", "--overlap"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n_and,n_xor,total_ns,speedup_vs_previous");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("5,5,"));
    let totals: Vec<f64> = lines[1..].iter().map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
    assert!(totals.windows(2).all(|w| w[1] <= w[0]), "{totals:?}");
}

#[test]
fn trace_round_trips_through_simulate() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("t.bin");
    let o = gcoverlay(&["schedule", "--kind", "mult", "--width", "6", "--cells", "4,3", "--policy", "direct", "--trace", path_str(&trace)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let flags = ["--policy", "direct", "--overlap", "--packed", "--format", "json"];
    let from_trace = gcoverlay(&[&["simulate", "--trace", path_str(&trace)][..], &flags].concat());
    let direct = gcoverlay(&[&["simulate", "--kind", "mult", "--width", "6", "--cells", "4,3"][..], &flags].concat());
    assert_eq!(code(&from_trace), 0, "{}", stderr(&from_trace));
    assert_eq!(from_trace.stdout, direct.stdout);
}

#[test]
fn exact_and_float_agree_on_integral_times() {
    let get = |extra: &[&str]| {
        let o = gcoverlay(&[&["simulate", "--kind", "adder", "--width", "6", "--format", "csv"][..], extra].concat());
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        stdout(&o)
    };
    assert_eq!(get(&[]), get(&["--exact"]));
}

#[test]
fn print_config_goes_to_stderr() {
    let o = gcoverlay(&["garble", "--kind", "adder", "--width", "4", "--seed", "random", "--print-config"]);
    assert_eq!(code(&o), 0);
    let cfg: serde_json::Value = serde_json::from_str(&stderr(&o)).unwrap();
    assert_eq!(cfg["subcommand"], "garble");
    let seed = cfg["seed"].as_u64().unwrap();
    assert!(stdout(&o).contains(&format!("seed {seed}")));
}

#[test]
fn unwritable_output_is_internal_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("no/such/dir/x.gcn");
    let o = gcoverlay(&["gen", "--kind", "adder", "--width", "4", "--out", path_str(&out)]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn report_marks_provenance() {
    let o = gcoverlay(&["report", "--kind", "adder", "--format", "csv"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("problem,field,reference,computed,provenance,match"));
    assert_eq!(text.lines().filter(|l| l.ends_with(",exact,true")).count(), 16);
    let o = gcoverlay(&["report", "--kind", "mult"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("typo"));
}
