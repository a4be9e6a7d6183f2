use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use revquant::synthetic::{cycle10_2_analog, staircase, t481_like};
use revquant::{emit, parse, Circuit, Control, Gate, GateKind};
use revquant_cli::{run, CSV_HEADER, EXIT_FAILED, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE};
use tempfile::TempDir;

struct Outcome {
    code: i32,
    out: String,
    err: String,
}

fn cli(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("revquant").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Outcome { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn write(dir: &Path, name: &str, c: &Circuit) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, emit(c)).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn cost_of_empty_circuit() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "empty.real", &Circuit::new(3));
    let r = cli(&["cost", s(&p)]);
    assert_eq!(r.code, EXIT_OK);
    assert_eq!(r.out, "lines 3\ngates 0\ncost 0\nclass count cost\n");
}

#[test]
fn cost_json() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "c.real", &cycle10_2_analog());
    let r = cli(&["cost", s(&p), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["cost"], 727);
    assert_eq!(v["distribution"]["T11"], 1);
    assert_eq!(v["distribution"]["T2"], 2);
}

#[test]
fn parse_error_exits_one() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.real");
    fs::write(&p, ".numvars 2\n.variables a b\n.begin\nt2 a z\n.end\n").unwrap();
    let r = cli(&["cost", s(&p)]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("bad.real"), "{}", r.err);
    assert_eq!(cli(&["optimize"]).code, EXIT_USAGE);
    assert_eq!(cli(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(cli(&["--help"]).code, EXIT_OK);
}

#[test]
fn optimize_without_shared_controls_is_identity() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "t.real", &t481_like());
    let out = dir.path().join("o.real");
    let r = cli(&["optimize", s(&p), "-o", s(&out)]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("(0.00%)"), "{}", r.out);
    assert_eq!(fs::read_to_string(&out).unwrap(), fs::read_to_string(&p).unwrap());
}

#[test]
fn optimize_to_stdout_and_verify() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "s.real", &staircase(10));
    let r = cli(&["optimize", s(&p)]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.err.contains("verdict Equivalent"), "{}", r.err);
    let optimized = parse(&r.out).unwrap();
    assert!(optimized.line_count() > 10);
    let o = dir.path().join("o.real");
    fs::write(&o, &r.out).unwrap();
    let v = cli(&["verify", s(&p), s(&o)]);
    assert_eq!((v.code, v.out.as_str()), (EXIT_OK, "Equivalent\n"));
    let same = cli(&["verify", s(&p), s(&p)]);
    assert_eq!(same.code, EXIT_OK);
}

#[test]
fn deleting_a_fredkin_is_caught() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "s.real", &staircase(8));
    let r = cli(&["optimize", s(&p)]);
    let optimized = parse(&r.out).unwrap();
    let first_swap = optimized.gates().iter().position(|g| g.kind() == GateKind::Swap).unwrap();
    let broken = write(dir.path(), "broken.real", &optimized.remove(first_swap).unwrap());
    let v = cli(&["verify", s(&p), s(&broken)]);
    assert_eq!(v.code, EXIT_FAILED);
    assert!(v.out.starts_with("CounterExample: input "), "{}", v.out);
}

#[test]
fn fixed_point_mode_on_derangement() {
    // three 4-bit increments controlled by line 0: no proper fixed cube
    let mut gates = Vec::new();
    for _ in 0..3 {
        for t in (1..=4).rev() {
            gates.push(Gate::mct(std::iter::once(Control::pos(0)).chain((1..t).map(Control::pos)), t));
        }
    }
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "inc.real", &Circuit::new(5).with_gates(gates));
    let r = cli(&["optimize", s(&p), "--prep", "fixed-point"]);
    assert_eq!(r.code, EXIT_USAGE);
    assert!(r.err.contains("no fixed point"), "{}", r.err);
    assert_eq!(cli(&["optimize", s(&p), "--prep", "hadamard"]).code, EXIT_OK);
}

#[test]
fn strict_sampling_is_inconclusive() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "s.real", &staircase(7));
    let out = dir.path().join("o.real");
    let r = cli(&["optimize", s(&p), "--verify", "sample", "--strict", "-o", s(&out)]);
    assert_eq!(r.code, EXIT_INCONCLUSIVE);
    assert!(r.out.contains("verdict Inconclusive"));
    assert!(!out.exists());
    let r = cli(&["optimize", s(&p), "--verify", "sample", "-o", s(&out)]);
    assert_eq!(r.code, EXIT_OK);
    assert!(out.exists());
}

#[test]
fn budget_and_passes_flags() {
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "s.real", &staircase(10));
    let json = dir.path().join("r.json");
    let r = cli(&["optimize", s(&p), "--ancilla-budget", "3", "--passes", "2", "--json", s(&json), "-o", "/dev/null"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert!(v["ancillae_used"].as_u64().unwrap() <= 3);
    assert_eq!(v["ancilla_budget"], 3);
    assert_eq!(v["verdict"], "Equivalent");
    assert_eq!(cli(&["optimize", s(&p), "--ancilla-budget", "many"]).code, EXIT_USAGE);
    assert_eq!(cli(&["optimize", s(&p), "--passes", "0"]).code, EXIT_USAGE);
    let r = cli(&["optimize", s(&p), "--pre-pass", "commute", "-o", "/dev/null"]);
    assert_eq!(r.code, EXIT_OK);
}

#[test]
fn bench_with_broken_file() {
    let dir = TempDir::new().unwrap();
    write(dir.path(), "b_stair.real", &staircase(6));
    fs::write(dir.path().join("a_broken.real"), "not a circuit\n").unwrap();
    fs::write(dir.path().join("notes.txt"), "ignored\n").unwrap();
    let json = dir.path().join("rows.json");
    let r = cli(&["bench", s(dir.path()), "--json", s(&json)]);
    assert_eq!(r.code, EXIT_FAILED);
    let lines: Vec<&str> = r.out.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("a_broken,") && lines[1].contains(",FAILED,"));
    assert!(lines[2].starts_with("b_stair,6,") && lines[2].contains(",Equivalent,"));
    let rows: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert!(rows[0]["detail"].as_str().unwrap().contains("a_broken.real"));
}

#[test]
fn bench_synthetic_suite() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks/synthetic");
    let csv = TempDir::new().unwrap();
    let path = csv.path().join("t.csv");
    let r = cli(&["bench", s(&dir), "--csv", s(&path)]);
    assert_eq!(r.code, EXIT_OK);
    let table = fs::read_to_string(&path).unwrap();
    let mut staircase_gains = Vec::new();
    for line in table.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f.len(), 11);
        assert_eq!(f[9], "Equivalent", "{line}");
        if f[0].starts_with("staircase") {
            staircase_gains.push(f[8].parse::<f64>().unwrap());
        }
    }
    // golden values for staircase 6..10
    assert_eq!(staircase_gains, [11.11, 23.02, 27.07, 32.11, 33.96]);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_revquant");
    let dir = TempDir::new().unwrap();
    let p = write(dir.path(), "s.real", &staircase(5));
    let ok = Command::new(bin).args(["cost", s(&p)]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["cost", "/nonexistent.real"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
