use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use psdi::instance::gen;
use psdi::instance::{parse_instance, serialize_instance};
use psdi::ops::{make_edge, OpKind};
use psdi::padding::{count_nonprojective_remaining, random_parity_padding, recommended_padding_size};
use psdi::solver::{solve_bruteforce, SolveReport};
use serde_json::Value;
use tempfile::TempDir;

fn psdi_sat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_psdi-sat")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn op_preserved(report: &Value, op: &str) -> bool {
    let rel = &report["relations"][0];
    rel["ops"].as_array().unwrap().iter().find(|e| e["op"] == op).unwrap()["preserved"].as_bool().unwrap()
}

#[test]
fn classify_reports() {
    let dir = TempDir::new().unwrap();
    let r13 = write(&dir, "r13", "001 010 100\n");
    let rep = json(&psdi_sat(&["classify", "--in", &r13, "--max-level", "3", "--json"]));
    assert!(op_preserved(&rep, "edge_2"));
    assert!(!op_preserved(&rep, "near_3"));

    let clause = write(&dir, "c3", "001 010 011 100 101 110 111\n");
    let rep = json(&psdi_sat(&["classify", "--in", &clause, "--max-level", "4", "--json"]));
    assert!(!op_preserved(&rep, "universal_3"));
    assert!(op_preserved(&rep, "near_4"));

    let full = write(&dir, "full", "00 01 10 11\n");
    let rep = json(&psdi_sat(&["classify", "--in", &full, "--json", "--pattern", "xxy>y;xyx>y"]));
    assert!(rep["relations"][0]["ops"].as_array().unwrap().iter().all(|e| e["preserved"] == true));
    let text = stdout(&psdi_sat(&["classify", "--in", &full]));
    assert!(text.starts_with("R: edge_2 yes"));
}

fn solve_file(path: &str, algo: &str) -> (i32, Value) {
    let o = psdi_sat(&["solve", "--in", path, "--algo", algo, "--json"]);
    (o.status.code().unwrap(), json(&o))
}

fn agree(inst: &psdi::instance::Instance, algo: &str) {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "i.inst", &serialize_instance(inst));
    let truth: SolveReport = solve_bruteforce(inst).unwrap();
    let (code, rep) = solve_file(&path, algo);
    assert_eq!(code, if truth.is_sat() { 10 } else { 20 }, "{algo}");
    if let Some(a) = rep["assignment"].as_str() {
        let vals: Vec<u32> = a.chars().map(|c| c.to_digit(36).unwrap()).collect();
        assert!(inst.check_assignment(&vals));
    }
    for key in ["oracle_queries", "enumerated_nodes", "graph_edges"] {
        assert!(rep[key].is_u64(), "{key}");
    }
    assert!(rep["complete"].is_boolean() && rep["variable_order"].is_array());
    assert!(rep.get("wall_time_ms").is_none());
}

#[test]
fn solve_agrees_with_brute_force() {
    for seed in 0..4 {
        agree(&gen::gen_linear_mod(8, 5, 3, seed).unwrap(), "mitm2e");
        agree(&gen::gen_binary_csp(7, 12, 3, 0.4, seed).unwrap(), "tri3nu");
        agree(&gen::gen_sym3e_instance(8, 5, seed).unwrap(), "sym3e");
    }
}

#[test]
fn solve_exit_codes() {
    let dir = TempDir::new().unwrap();
    let unsat = write(&dir, "u.inst", "DOMAIN 2\nVARS 1\nREL one ARITY 1 TUPLES 1\nREL zero ARITY 1 TUPLES 0\nCON one 0\nCON zero 0\n");
    assert_eq!(psdi_sat(&["solve", "--in", &unsat, "--algo", "brute"]).status.code(), Some(20));
    let sat = write(&dir, "s.inst", "DOMAIN 2\nVARS 2\nREL r ARITY 3 TUPLES 001 010 100\nCON r 0 1 0\n");
    let o = psdi_sat(&["solve", "--in", &sat, "--algo", "mitm2e"]);
    assert_eq!(o.status.code(), Some(10));
    assert!(stdout(&o).starts_with("s SATISFIABLE\nv 0 1\n"));
    let clause = write(&dir, "c.inst", "DOMAIN 2\nVARS 3\nREL c ARITY 3 TUPLES 001 010 011 100 101 110 111\nCON c 0 1 2\n");
    let o = psdi_sat(&["solve", "--in", &clause, "--algo", "mitm2e"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not preserved by edge_2: rows"));
    assert_eq!(psdi_sat(&["solve", "--in", &clause, "--algo", "mitm2e", "--skip-precheck"]).status.code(), Some(10));
}

#[test]
fn gen_is_parseable_and_deterministic() {
    let a = psdi_sat(&["gen", "ksat", "--n", "10", "--m", "30", "--k", "3", "--seed", "1"]);
    let b = psdi_sat(&["gen", "ksat", "--n", "10", "--m", "30", "--k", "3", "--seed", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let inst = parse_instance(&stdout(&a)).unwrap();
    assert_eq!(inst.n_vars(), 10);
    assert_eq!(inst.constraints().len(), 30);

    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", "p cnf 3 2\n1 -2 0\n2 3 0\n");
    let o = psdi_sat(&["gen", "ksat", "--from-dimacs", &cnf]);
    assert_eq!(parse_instance(&stdout(&o)).unwrap().constraints().len(), 2);
}

#[test]
fn pad_edge2_exact() {
    let o = psdi_sat(&["pad", "--op", "edge2", "--n", "3", "--eps", "0.25", "--verify", "exact", "--json"]);
    assert!(o.status.success());
    let rep = json(&o);
    let m = recommended_padding_size(OpKind::Edge(2), 3, 0.25).unwrap();
    assert_eq!(rep["m"], m);
    let spec = random_parity_padding(3, m, 0);
    let count = count_nonprojective_remaining(&make_edge(2, 2).unwrap(), &spec).unwrap();
    assert_eq!(rep["nonprojective_remaining"], count.to_string());
    assert_eq!(rep["universal"], if count == 0u32.into() { "yes" } else { "no" });
    assert_eq!(rep["exact"], true);

    let dir = TempDir::new().unwrap();
    let out = dir.path().join("pads.txt");
    let text = psdi_sat(&["pad", "--op", "edge2", "--n", "3", "--out", out.to_str().unwrap()]);
    assert!(stdout(&text).lines().all(|l| l.starts_with('#')));
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), m);
}

#[test]
fn mitm_node_exponent() {
    let o = psdi_sat(&["bench", "--algo", "mitm2e", "--n-min", "8", "--n-max", "16", "--json"]);
    let e = json(&o)["node_exponent"].as_f64().unwrap();
    assert!((0.45..=0.55).contains(&e), "{e}");
    let csv = psdi_sat(&["bench", "--algo", "tri3nu", "--n-min", "4", "--n-max", "5", "--seeds", "1"]);
    let text = stdout(&csv);
    assert_eq!(text.lines().next(), Some("n,algo,seed,nodes,queries,millis"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn reduce_subsetsum() {
    let dir = TempDir::new().unwrap();
    let w = write(&dir, "w", "3 5 7\n");
    assert_eq!(psdi_sat(&["reduce", "subsetsum", "--weights", &w, "--target", "8", "--blocks", "2", "--solve"]).status.code(), Some(10));
    assert_eq!(psdi_sat(&["reduce", "subsetsum", "--weights", &w, "--target", "16", "--solve"]).status.code(), Some(20));
    let out = dir.path().join("guesses");
    let o = psdi_sat(&["reduce", "subsetsum", "--weights", &w, "--target", "8", "--blocks", "2", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let files: Vec<_> = fs::read_dir(&out).unwrap().collect();
    assert_eq!(files.len(), 4);
    let any_sat = files.iter().any(|f| {
        let inst = parse_instance(&fs::read_to_string(f.as_ref().unwrap().path()).unwrap()).unwrap();
        solve_bruteforce(&inst).unwrap().is_sat()
    });
    assert!(any_sat);
}

#[test]
fn reduce_seth_roundtrip() {
    let dir = TempDir::new().unwrap();
    let cnf = write(&dir, "f.cnf", "p cnf 3 3\n1 2 0\n-1 3 0\n-3 -2 0\n");
    let inst_path = dir.path().join("padded.inst");
    let o = psdi_sat(&["reduce", "seth", "--cnf", &cnf, "--op", "edge2", "--eps", "0.25", "--seed", "3", "--out", inst_path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let inst = parse_instance(&fs::read_to_string(&inst_path).unwrap()).unwrap();
    assert_eq!(inst.constraints().len(), 3);
    let (code, rep) = solve_file(inst_path.to_str().unwrap(), "mitm2e");
    assert_eq!(code, 10);
    let a: Vec<u32> = rep["assignment"].as_str().unwrap().chars().map(|c| c.to_digit(2).unwrap()).collect();
    assert!((a[0] == 1 || a[1] == 1) && (a[0] == 0 || a[2] == 1) && (a[2] == 0 || a[1] == 0));
    assert!(Path::new(&inst_path).exists());
}
