use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nilclean::{CnfInstance, Gf2Matrix, SearchReport, SearchStatus};
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilclean")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_c_holds() {
    let o = run(&["verify-c"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["holds"], true);
    assert_eq!(v["polynomial"], "10011");
    assert_eq!(v["value"], "4\n0000\n0000\n0000\n0000\n");
}

#[test]
fn derive_identity_prints_six_words() {
    let o = run(&["derive-identity"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "PQP+PQPQ+PQQP+QPQP+QPQQ+QQPQ\n");
    assert_eq!(code(&run(&["derive-identity", "--index", "0"])), 64);
}

#[test]
fn decompose_exit_codes() {
    let c = data("C.txt");
    let none = run(&["decompose", "--matrix", path_str(&c), "--index", "3"]);
    assert_eq!(code(&none), 1);
    let v = json(&none);
    assert_eq!(v["status"], "exhausted-none");
    assert_eq!(v["space_size"], 802);
    let found = run(&["decompose", "--matrix", path_str(&c), "--index", "4"]);
    assert_eq!(code(&found), 0);
    assert_eq!(json(&found)["witness_p"], "4\n0000\n0000\n0000\n0011\n");
    let sat = run(&["decompose", "--matrix", path_str(&c), "--index", "4", "--strategy", "sat"]);
    assert_eq!(code(&sat), 0);
    assert_eq!(json(&sat)["witness_p"], json(&found)["witness_p"]);
    let sat_none = run(&["decompose", "--matrix", path_str(&c), "--index", "3", "--strategy", "sat"]);
    assert_eq!(code(&sat_none), 1);
}

#[test]
fn decompose_is_byte_identical_across_runs_and_workers() {
    let cc = data("I4.txt");
    let args = ["decompose", "--matrix", path_str(&cc), "--index", "2"];
    let first = run(&args);
    let again = run(&args);
    let one_worker = run(&[&args[..], &["--workers", "1"]].concat());
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(first.stdout, one_worker.stdout);
}

#[test]
fn decompose_errors() {
    assert_eq!(code(&run(&["decompose", "--matrix", "/nonexistent/m.txt", "--index", "3"])), 66);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "2\n1x\n00\n").unwrap();
    assert_eq!(code(&run(&["decompose", "--matrix", path_str(&bad), "--index", "3"])), 65);
    assert_eq!(code(&run(&["decompose", "--matrix", path_str(&data("C.txt")), "--index", "0"])), 64);
    assert_eq!(
        code(&run(&["decompose", "--matrix", path_str(&data("CC.txt")), "--index", "3", "--strategy", "brute"])),
        64
    );
    assert_eq!(code(&run(&["no-such-command"])), 64);
    assert_eq!(code(&run(&["decompose"])), 64);
}

#[test]
fn certificates_round_trip_through_verify_cert() {
    let dir = tempfile::tempdir().unwrap();
    for (index, status) in [("4", "found"), ("3", "exhausted-none")] {
        let cert = dir.path().join(format!("c{index}.json"));
        let o =
            run(&["decompose", "--matrix", path_str(&data("C.txt")), "--index", index, "--emit-cert", path_str(&cert)]);
        let text = std::fs::read_to_string(&cert).unwrap();
        assert_eq!(text.trim_end(), stdout(&o).trim_end());
        let report = SearchReport::from_json(&text).unwrap();
        assert_eq!(report.status.as_str(), status);
        let v = run(&["verify-cert", "--cert", path_str(&cert)]);
        assert_eq!(code(&v), 0);
        assert_eq!(json(&v)["valid"], true);
    }
    let forged = dir.path().join("forged.json");
    let mut cert: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("c4.json")).unwrap()).unwrap();
    cert["witness_p"] = Value::from("4\n0000\n0000\n0000\n0001\n");
    std::fs::write(&forged, cert.to_string()).unwrap();
    let v = run(&["verify-cert", "--cert", path_str(&forged)]);
    assert_eq!(code(&v), 1);
    assert_eq!(json(&v)["valid"], false);
}

#[test]
fn theorem_single_copy_and_export() {
    let one = run(&["theorem", "--copies", "1"]);
    assert_eq!(code(&one), 1);
    assert_eq!(json(&one)["status"], "exhausted-none");
    assert_eq!(code(&run(&["theorem", "--copies", "2"])), 64);
    let dir = tempfile::tempdir().unwrap();
    let cnf_path = dir.path().join("m3.cnf");
    let three = run(&["theorem", "--copies", "3", "--out", path_str(&cnf_path)]);
    assert_eq!(code(&three), 2);
    assert_eq!(json(&three)["status"], "exported");
    let text = std::fs::read_to_string(&cnf_path).unwrap();
    let cnf = CnfInstance::parse_dimacs(&text).unwrap();
    assert_eq!(cnf.varmap.len(), 144);
    assert_eq!(cnf.meta.as_ref().unwrap().target, Gf2Matrix::direct_power(&Gf2Matrix::matrix_c(), 3).unwrap());
    assert_eq!(cnf.to_dimacs(), text);
}

#[test]
fn survey_table() {
    let o = run(&["survey", "--n", "2", "--index", "2"]);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("chain\tstatus\tspace_size\twitness_p"));
    assert_eq!(lines.count(), 6);
    assert!(code(&o) == 0 || code(&o) == 1);
    let four = run(&["survey", "--n", "4", "--index", "4"]);
    assert_eq!(code(&four), 0);
    assert!(stdout(&four).lines().skip(1).all(|l| l.split('\t').nth(1) == Some("found")));
}

#[test]
fn enumerate_idempotents() {
    for (n, count) in [("1", "2"), ("2", "8"), ("3", "58"), ("4", "802")] {
        let o = run(&["enumerate-idempotents", "--n", n, "--count-only"]);
        assert_eq!(code(&o), 0);
        assert_eq!(stdout(&o).trim(), count);
    }
    let brute = run(&["enumerate-idempotents", "--n", "3", "--count-only", "--strategy", "brute"]);
    assert_eq!(stdout(&brute).trim(), "58");
    let listed = run(&["enumerate-idempotents", "--n", "2"]);
    let text = stdout(&listed);
    let blocks: Vec<&str> = text.split("\n\n").collect();
    assert_eq!(blocks.len(), 8);
    for b in blocks {
        assert!(Gf2Matrix::parse_text(b).unwrap().is_idempotent());
    }
}

#[test]
fn export_and_import_solution() {
    let dir = tempfile::tempdir().unwrap();
    let cnf_path = dir.path().join("c4.cnf");
    let o = run(&["export-cnf", "--matrix", path_str(&data("C.txt")), "--index", "4", "--out", path_str(&cnf_path)]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["status"], "exported");
    let cnf = CnfInstance::parse_dimacs(&std::fs::read_to_string(&cnf_path).unwrap()).unwrap();

    let nilclean::SolveResult::Sat(model) = nilclean::dpll_solve(&cnf, nilclean::SolveMode::FirstSolution, None).result
    else {
        panic!("expected a model");
    };
    let lits: Vec<String> = model
        .values
        .iter()
        .enumerate()
        .map(|(i, &b)| if b { format!("{}", i + 1) } else { format!("-{}", i + 1) })
        .collect();
    let sol = dir.path().join("sol.txt");
    std::fs::write(&sol, format!("s SATISFIABLE\nv {} 0\n", lits.join(" "))).unwrap();
    let imported = run(&["import-solution", "--cnf", path_str(&cnf_path), "--solution", path_str(&sol)]);
    assert_eq!(code(&imported), 0);
    let report = SearchReport::from_json(&stdout(&imported)).unwrap();
    assert_eq!(report.status, SearchStatus::Found);

    std::fs::write(&sol, "s UNSATISFIABLE\n").unwrap();
    let unsat =
        run(&["import-solution", "--cnf", path_str(&cnf_path), "--solution", path_str(&sol), "--solver", "kissat"]);
    assert_eq!(code(&unsat), 2);
    assert_eq!(json(&unsat)["status"], "unknown");

    let mut flipped = model.values.clone();
    flipped[15] = !flipped[15];
    let lits: Vec<String> = flipped
        .iter()
        .enumerate()
        .map(|(i, &b)| if b { format!("{}", i + 1) } else { format!("-{}", i + 1) })
        .collect();
    std::fs::write(&sol, format!("SAT\n{} 0\n", lits.join(" "))).unwrap();
    let broken = run(&["import-solution", "--cnf", path_str(&cnf_path), "--solution", path_str(&sol)]);
    assert_ne!(code(&broken), 0);
}

#[test]
fn canonical_form_of_data_files() {
    let o = run(&["canonical-form", "--matrix", path_str(&data("C.txt"))]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["invariant_factors"], serde_json::json!(["10011"]));
    assert_eq!(v["frobenius_form"], Gf2Matrix::matrix_c().to_text());
    let cc = json(&run(&["canonical-form", "--matrix", path_str(&data("CC.txt"))]));
    assert_eq!(cc["invariant_factors"], serde_json::json!(["10011", "10011"]));
    let j2 = json(&run(&["canonical-form", "--matrix", path_str(&data("J2.txt"))]));
    assert_eq!(j2["invariant_factors"], serde_json::json!(["001"]));
}
