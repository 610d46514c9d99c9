use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn alloyrep(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alloyrep"))
        .current_dir(dir)
        .args(args)
        .env_remove("ALLOYREP_RANK_TOL")
        .env_remove("ALLOYREP_RESIDUAL_TOL")
        .env_remove("ALLOYREP_EIGEN_GAP_TOL")
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad report ({e}): {}", String::from_utf8_lossy(&out.stderr));
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn build_and_check_rep() {
    let dir = tempfile::tempdir().unwrap();
    let out = alloyrep(
        dir.path(),
        &[
            "build-asl2",
            "--dims",
            "1,2,1",
            "--gamma",
            "0.5",
            "--seed",
            "42",
            "-o",
            "r.json",
        ],
    );
    assert_eq!(code(&out), 0);
    assert_eq!(report(&out)["results"]["space_dim"], 4);
    assert!(dir.path().join("r.params.json").exists());
    let out = alloyrep(dir.path(), &["check", "rep", "r.json"]);
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["seed"], 0);
    assert_eq!(r["inputs"]["rep"]["sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn inadmissible_dims_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&alloyrep(
            dir.path(),
            &["build-asl2", "--dims", "1,3,1", "-o", "x.json"]
        )),
        2
    );
    assert!(!dir.path().join("x.json").exists());
    assert_eq!(
        code(&alloyrep(dir.path(), &["build-asl2", "-o", "x.json"])),
        2
    );
}

#[test]
fn spin_build_has_vanishing_e1() {
    let dir = tempfile::tempdir().unwrap();
    let out = alloyrep(dir.path(), &["build-asl2", "--spin", "2", "-o", "s.json"]);
    assert_eq!(code(&out), 0);
    let rep: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!(rep["space_dim"], 3);
    let e1 = rep["mats"][3].as_array().unwrap();
    let biggest = e1
        .iter()
        .flat_map(|row| row.as_array().unwrap())
        .flat_map(|z| z.as_array().unwrap())
        .map(|x| x.as_f64().unwrap().abs())
        .fold(0.0, f64::max);
    assert!(biggest <= 1e-12);
}

#[test]
fn check_failures_and_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        code(&alloyrep(
            dir.path(),
            &["generate", "cross", "--n", "3", "--seed", "1", "-o", "c.json"]
        )),
        0
    );
    let out = alloyrep(dir.path(), &["check", "cross", "c.json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(report(&out)["ok"], false);

    alloyrep(dir.path(), &["build-asl2", "--spin", "1", "-o", "s.json"]);
    let full = std::fs::read_to_string(dir.path().join("s.json")).unwrap();
    std::fs::write(dir.path().join("t.json"), &full[..full.len() / 2]).unwrap();
    assert_eq!(code(&alloyrep(dir.path(), &["check", "rep", "t.json"])), 2);
    assert_eq!(
        code(&alloyrep(dir.path(), &["check", "rep", "missing.json"])),
        2
    );
    assert_eq!(
        code(&alloyrep(dir.path(), &["check", "algebra", "s.json"])),
        2
    );
}

#[test]
fn tensor_decompose_examples() {
    let dir = tempfile::tempdir().unwrap();
    alloyrep(dir.path(), &["build-asl2", "--spin", "2", "-o", "s2.json"]);
    alloyrep(dir.path(), &["build-asl2", "--spin", "0", "-o", "s0.json"]);
    let out = alloyrep(
        dir.path(),
        &[
            "tensor-decompose",
            "s2.json",
            "s2.json",
            "--seed",
            "3",
            "-o",
            "td",
        ],
    );
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(r["results"]["dim_multiset"], serde_json::json!([5, 3, 1]));
    assert!(r["results"]["reassembly_residual"].as_f64().unwrap() < 1e-8);
    for k in 0..3 {
        assert!(dir.path().join(format!("td/component_{k}.json")).exists());
    }
    assert!(dir.path().join("td/basis.json").exists());

    let out = alloyrep(
        dir.path(),
        &["tensor-decompose", "s2.json", "s0.json", "-o", "one"],
    );
    assert_eq!(
        report(&out)["results"]["dim_multiset"],
        serde_json::json!([3])
    );
}

#[test]
fn tensor_of_different_alloys_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    alloyrep(dir.path(), &["build-asl2", "--spin", "1", "-o", "s.json"]);
    let text = std::fs::read_to_string(dir.path().join("s.json")).unwrap();
    let renamed = text.replacen("\"e1\"", "\"z\"", 1);
    std::fs::write(dir.path().join("z.json"), renamed).unwrap();
    assert_eq!(
        code(&alloyrep(
            dir.path(),
            &["tensor-decompose", "s.json", "z.json", "-o", "o"]
        )),
        2
    );
}

#[test]
fn classify_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = alloyrep(
        dir.path(),
        &["classify", "--dim", "3", "--trials", "10", "--seed", "1"],
    );
    assert_eq!(code(&out), 0);
    let r = report(&out);
    assert_eq!(
        r["results"]["rows"][0]["dims"],
        serde_json::json!([1, 1, 1])
    );
    assert_eq!(r["results"]["rows"].as_array().unwrap().len(), 1);
    let out = alloyrep(dir.path(), &["classify", "--dim", "4", "--trials", "10"]);
    let rows: Vec<Value> = report(&out)["results"]["rows"].as_array().unwrap().clone();
    let dims: Vec<&Value> = rows.iter().map(|r| &r["dims"]).collect();
    assert_eq!(
        dims,
        vec![
            &serde_json::json!([1, 1, 1, 1]),
            &serde_json::json!([1, 2, 1])
        ]
    );
    assert_eq!(report(&out)["results"]["necessity_rate"], 1.0);
    assert_eq!(code(&alloyrep(dir.path(), &["classify", "--dim", "9"])), 2);
}

#[test]
fn alloyability_modes() {
    let dir = tempfile::tempdir().unwrap();
    alloyrep(
        dir.path(),
        &[
            "generate",
            "quaternary",
            "--n",
            "3",
            "--seed",
            "4",
            "-o",
            "q.json",
        ],
    );
    let out = alloyrep(
        dir.path(),
        &["alloyability", "--canonical", "q.json", "-o", "can"],
    );
    assert_eq!(code(&out), 0);
    assert!(
        report(&out)["results"]["check"]["worst_residual"]
            .as_f64()
            .unwrap()
            <= 1e-12
    );

    alloyrep(
        dir.path(),
        &[
            "generate", "planted", "--n", "3", "--m", "3", "--seed", "9", "-o", "pl",
        ],
    );
    let out = alloyrep(
        dir.path(),
        &[
            "alloyability",
            "--q1",
            "pl/q1.json",
            "--q2",
            "pl/q2.json",
            "--search",
            "--seed",
            "2",
            "-o",
            "found",
        ],
    );
    assert_eq!(code(&out), 0);
    assert!(report(&out)["results"]["best_residual"].as_f64().unwrap() < 1e-6);

    let check = [
        "alloyability",
        "--q1",
        "pl/q1.json",
        "--q2",
        "pl/q2.json",
        "--factorization",
        "found/factorization.json",
    ];
    assert_eq!(code(&alloyrep(dir.path(), &check)), 0);

    alloyrep(
        dir.path(),
        &["generate", "quaternary", "--n", "2", "-o", "small.json"],
    );
    let wrong = [
        "alloyability",
        "--q1",
        "small.json",
        "--q2",
        "pl/q2.json",
        "--factorization",
        "pl/factorization.json",
    ];
    assert_eq!(code(&alloyrep(dir.path(), &wrong)), 2);
    assert_eq!(
        code(&alloyrep(
            dir.path(),
            &["alloyability", "--q1", "q.json", "--q2", "q.json"]
        )),
        2
    );
}

#[test]
fn tolerances_from_flags_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    alloyrep(dir.path(), &["build-asl2", "--spin", "1", "-o", "s.json"]);
    let out = Command::new(env!("CARGO_BIN_EXE_alloyrep"))
        .current_dir(dir.path())
        .args(["check", "rep", "s.json"])
        .env("ALLOYREP_RESIDUAL_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(report(&out)["tolerances"]["residual_tol"], 1e-6);
    let out = alloyrep(
        dir.path(),
        &["check", "rep", "s.json", "--rank-tol", "1e-11"],
    );
    assert_eq!(report(&out)["tolerances"]["rank_tol"], 1e-11);
    assert_eq!(
        code(&alloyrep(
            dir.path(),
            &["check", "rep", "s.json", "--rank-tol", "-1"]
        )),
        2
    );
}

#[test]
fn exit_zero_reports_stay_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    alloyrep(
        dir.path(),
        &[
            "build-asl2",
            "--dims",
            "1,2,2,1",
            "--seed",
            "5",
            "-o",
            "a.json",
        ],
    );
    alloyrep(
        dir.path(),
        &["build-asl2", "--dims", "1,1", "--seed", "6", "-o", "b.json"],
    );
    let out = alloyrep(
        dir.path(),
        &["tensor-decompose", "a.json", "b.json", "-o", "td"],
    );
    let r = report(&out);
    if code(&out) == 0 {
        let tol = r["tolerances"]["residual_tol"].as_f64().unwrap();
        for (_, v) in r["residuals"].as_object().unwrap() {
            assert!(v.as_f64().unwrap() <= tol);
        }
    }
}
