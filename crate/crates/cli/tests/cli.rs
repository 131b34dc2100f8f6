use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use probdom::formats::{parse_instance, Instance};
use probdom::scalar::parse_rational;
use probdom::twdp::{parse_pace, validate_decomposition};
use probdom::{brute_force_ksum, brute_force_pbds};
use serde_json::Value;

const P3: &str = "ugraph 3 2\n0 1\n1 1\n2 1\n0 1 1/2\n1 2 1/2\n";

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_probdom"));
    c.env_remove("PROBDOM_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_is_deterministic() {
    let a = stdout(&run(&["gen", "tree", "--n", "10", "--seed", "7"]));
    let b = stdout(&run(&["gen", "tree", "--n", "10", "--seed", "7"]));
    assert_eq!(a, b);
    let c = stdout(&bin().args(["gen", "tree", "--n", "10"]).env("PROBDOM_SEED", "7").output().unwrap());
    assert_eq!(a, c);
    match parse_instance(&a).unwrap() {
        Instance::Graph(g) => assert!(g.is_tree()),
        other => panic!("{other:?}"),
    }
}

#[test]
fn gen_kinds() {
    let g = stdout(&run(&["gen", "graph", "--n", "8", "--density", "0.5", "--prob-range", "1,1"]));
    match parse_instance(&g).unwrap() {
        Instance::Graph(g) => assert!(g.m() > 0 && g.edges().iter().all(|e| e.2 == parse_rational("1").unwrap())),
        other => panic!("{other:?}"),
    }
    let m = stdout(&run(&["gen", "mcc", "--k", "2", "--n", "2", "--m", "1"]));
    match parse_instance(&m).unwrap() {
        Instance::Mcc(m) => assert_eq!((m.k, m.class_size(), m.cross_edge_count()), (2, 2, 1)),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_instance(&stdout(&run(&["gen", "kspm", "--n", "5", "--k", "2"]))).unwrap(), Instance::Kspm(_)));
    assert_eq!(run(&["gen", "tree", "--n", "0"]).status.code(), Some(2));
    assert_eq!(run(&["gen", "mcc", "--k", "2", "--n", "2", "--m", "9"]).status.code(), Some(2));
}

#[test]
fn solve_examples() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = write(dir.path(), "p3.txt", P3);
    let r = json(&run(&["solve", s(&p3), "--algo", "tree-ptas", "--k", "1", "--eps", "0.1"]));
    assert_eq!(r["value"], 2.0);
    assert_eq!(r["guarantee"], "(1-ε)-approx");
    assert_eq!(r["set"], serde_json::json!([1]));

    let r = json(&run(&["solve", s(&p3), "--algo", "brute", "--k", "0", "--exact"]));
    assert_eq!(r["value"], 0.0);
    assert_eq!(r["value_exact"], "0");
    assert_eq!(r["set"], serde_json::json!([]));

    let nu = write(dir.path(), "nu.txt", "ugraph 3 2\n0 1\n1 1\n2 1\n0 1 1/2\n1 2 1/4\n");
    let o = run(&["solve", s(&nu), "--algo", "twdp", "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("(1,2)"));

    let o = run(&["solve", s(&nu), "--algo", "kspm-brute"]);
    assert_eq!(o.status.code(), Some(2));
    let cyc = write(dir.path(), "c3.txt", "ugraph 3 3\n0 1\n1 1\n2 1\n0 1 1\n1 2 1\n0 2 1\n");
    assert_eq!(run(&["solve", s(&cyc), "--algo", "tree-exact-spm", "--k", "1"]).status.code(), Some(2));
}

#[test]
fn parse_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "ugraph 2 1\n0 1\n1 1\n0 1 3/2\n");
    let o = run(&["solve", s(&bad), "--algo", "brute", "--k", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
    assert_eq!(run(&["solve", "/nonexistent/x.txt", "--algo", "brute", "--k", "1"]).status.code(), Some(2));
    assert_eq!(run(&["solve"]).status.code(), Some(2));
}

#[test]
fn every_record_checks() {
    let dir = tempfile::tempdir().unwrap();
    let tree = stdout(&run(&["gen", "tree", "--n", "9", "--seed", "3", "--prob-range", "1/2", "--weight-range", "1,4"]));
    let tree = write(dir.path(), "t.txt", &tree);
    let algos = ["brute", "greedy", "tree-ptas", "tree-exact-uniform", "tree-exact-spm", "twdp", "apex"];
    for exact in [false, true] {
        for a in algos {
            let mut args = vec!["solve", s(&tree), "--algo", a, "--k", "3"];
            if exact {
                args.push("--exact");
            }
            let rec = stdout(&run(&args));
            let rp = write(dir.path(), "r.json", &rec);
            let c = json(&run(&["check", s(&rp), s(&tree)]));
            assert_eq!(c["ok"], true, "{a}");
        }
    }
    let kspm = write(dir.path(), "k.txt", &stdout(&run(&["gen", "kspm", "--n", "6", "--k", "2", "--seed", "1"])));
    for a in ["kspm-brute", "kspm-cc"] {
        let rp = write(dir.path(), "r.json", &stdout(&run(&["solve", s(&kspm), "--algo", a, "--exact"])));
        assert_eq!(json(&run(&["check", s(&rp), s(&kspm)]))["ok"], true);
    }
}

#[test]
fn tampered_record_fails() {
    let dir = tempfile::tempdir().unwrap();
    let p3 = write(dir.path(), "p3.txt", P3);
    let rec: Value = json(&run(&["solve", s(&p3), "--algo", "brute", "--k", "1", "--exact"]));
    let mut bumped = rec.clone();
    bumped["value"] = (rec["value"].as_f64().unwrap() + 1.0).into();
    let rp = write(dir.path(), "r.json", &bumped.to_string());
    let o = run(&["check", s(&rp), s(&p3)]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains('3') && err.contains('2'), "{err}");

    let mut exact = rec.clone();
    exact["value_exact"] = "3".into();
    exact["value"] = 3.0.into();
    let rp = write(dir.path(), "r.json", &exact.to_string());
    assert_eq!(run(&["check", s(&rp), s(&p3)]).status.code(), Some(1));

    let other = write(dir.path(), "o.txt", "ugraph 3 2\n0 2\n1 1\n2 1\n0 1 1/2\n1 2 1/2\n");
    let rp = write(dir.path(), "r.json", &rec.to_string());
    assert_eq!(run(&["check", s(&rp), s(&other)]).status.code(), Some(1));
}

#[test]
fn reduce_ksum_to_tree_matches_double_brute() {
    let dir = tempfile::tempdir().unwrap();
    for (xs, yes) in [("-1 0 1", true), ("1 1 2", false), ("-2 1 1 2", true)] {
        let n = xs.split_whitespace().count();
        let ks = write(dir.path(), "ks.txt", &format!("ksum {n} 3\n{xs}\n"));
        let out = dir.path().join("tree.txt");
        let rep = json(&run(&["reduce", s(&ks), "--from", "ksum", "--to", "tree", "-o", s(&out)]));
        let Instance::Graph(g) = parse_instance(&fs::read_to_string(&out).unwrap()).unwrap() else { panic!() };
        assert!(g.is_tree());
        let thr = parse_rational(rep["threshold"]["exact"].as_str().unwrap()).unwrap();
        let opt = brute_force_pbds(&g, rep["k"].as_u64().unwrap() as usize);
        let xs: Vec<i64> = xs.split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert_eq!(brute_force_ksum(&xs, 3).is_some(), yes);
        assert_eq!(opt.value >= thr, yes, "{xs:?}");
    }
    let ks = write(dir.path(), "ks.txt", "ksum 3 3\n-1 0 1\n");
    let rep = json(&run(&["reduce", s(&ks), "--from", "ksum", "--to", "kspm"]));
    assert!(rep["instance"].as_str().unwrap().starts_with("kspm 3 3 0\n"));
    assert_eq!(run(&["reduce", s(&ks), "--from", "mcc", "--to", "unipbds"]).status.code(), Some(2));
}

#[test]
fn reduce_mcc_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "m.txt", "mcc 4 1 2\n0 0 1 1\n0 2\n");
    let out = dir.path().join("g.txt");
    let td = dir.path().join("g.td");
    let rep = json(&run(&["reduce", s(&m), "--from", "mcc", "--to", "unipbds", "--p", "1/2", "--certificate", "0,2", "-o", s(&out), "--td-out", s(&td)]));
    assert_eq!(rep["k"], 15);
    assert_eq!(rep["threshold"]["exact"], "227/2");
    assert_eq!(rep["certificate_value"]["exact"], "227/2");
    let Instance::Graph(g) = parse_instance(&fs::read_to_string(&out).unwrap()).unwrap() else { panic!() };
    let (d, n) = parse_pace(&fs::read_to_string(&td).unwrap()).unwrap();
    assert_eq!(n, g.n());
    assert!(validate_decomposition(&g, &d).unwrap() <= 10);
    let o = run(&["reduce", s(&m), "--from", "mcc", "--to", "unipbds", "--certificate", "1,3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bench_table() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "p3.txt", P3);
    let manifest = write(
        dir.path(),
        "bench.txt",
        "# five solvers on the path\np3.txt brute 1\np3.txt greedy 1\np3.txt tree-ptas 1 eps=0.1\np3.txt tree-exact-spm 1\np3.txt twdp 1 exact=true\n",
    );
    let table = stdout(&run(&["bench", s(&manifest)]));
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 6);
    assert!(lines[0].starts_with("algo"));
    let algos = ["brute", "greedy", "tree-ptas", "tree-exact-spm", "twdp"];
    for (line, a) in lines[1..].iter().zip(algos) {
        let cols: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cols[0], a);
        assert_eq!(cols[4], "2.0");
    }
    let bad = write(dir.path(), "bad.txt", "p3.txt nosuch 1\n");
    assert_eq!(run(&["bench", s(&bad)]).status.code(), Some(3));
}
