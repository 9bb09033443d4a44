//! The shipped spec files agree with the built-in constructions, and the
//! binary reports pass, fail and usage errors through its exit code.

use std::path::PathBuf;
use std::process::Command;

use pclh::operad::CochainConfig;
use pclh::pseudoalg::{self, PseudoAlgebra};
use pclh::suites;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn load(name: &str) -> PseudoAlgebra {
    let text = std::fs::read_to_string(data(name)).expect("data file");
    pseudoalg::load_json(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn same_structure(a: &PseudoAlgebra, b: &PseudoAlgebra) -> Result<(), String> {
    let (ma, mb) = (a.module(), b.module());
    if ma.generator_count() != mb.generator_count() || ma.dim() != mb.dim() || a.is_poisson() != b.is_poisson() {
        return Err("shape differs".into());
    }
    for i in 0..ma.generator_count() {
        if ma.gen_odd(i) != mb.gen_odd(i) {
            return Err(format!("parity of generator {i}"));
        }
        for j in 0..ma.generator_count() {
            if a.table_entry(i, j) != b.table_entry(i, j) {
                return Err(format!(
                    "entry ({i},{j}): {} vs {}",
                    ma.fmt_pseudo(a.table_entry(i, j)),
                    mb.fmt_pseudo(b.table_entry(i, j))
                ));
            }
        }
    }
    Ok(())
}

#[test]
fn spec_files_match_builtins() {
    let pairs = [
        ("boson_n1.json", "boson"),
        ("fermion.json", "fermion"),
        ("affine.json", "affine"),
        ("affine_sl2.json", "affine_sl2"),
        ("w_d1.json", "w_d1"),
        ("w_d2.json", "w_d2"),
        ("w_d_nonabelian.json", "w_d_nonabelian"),
        ("type_w.json", "type_w"),
        ("type_k_m1.json", "type_k"),
    ];
    for (file, name) in pairs {
        let built = pseudoalg::builtin(name).expect("builtin");
        same_structure(&load(file), &built).unwrap_or_else(|e| panic!("{file} vs {name}: {e}"));
    }
    same_structure(&load("jacobi_broken.json"), &suites::jacobi_broken()).expect("jacobi control");
}

#[test]
fn broken_spec_fails_skewsymmetry_only() {
    let r = suites::pseudoalgebra_suite(&load("boson_broken.json"));
    assert!(!r.check("skewsymmetry").expect("check").passed);
    assert!(r.check("jacobi").expect("check").passed);
}

#[test]
fn cochain_files_build() {
    let boson = load("boson_n1.json");
    for (file, arity) in [
        ("boson_class.json", 0),
        ("boson_euler.json", 1),
        ("boson_shift.json", 1),
        ("boson_master.json", 2),
        ("zero.json", 1),
    ] {
        let text = std::fs::read_to_string(data("cochains").join(file)).expect("cochain file");
        let f = CochainConfig::from_json(&text).and_then(|c| c.build(&boson)).unwrap_or_else(|e| panic!("{file}: {e}"));
        assert_eq!(f.arity(), arity, "{file}");
        assert!(suites::variational_leibniz(&f).expect("leibniz check"), "{file}");
    }
}

fn pclh(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pclh")).args(args).output().expect("spawn pclh");
    (out.status.code().expect("exit code"), String::from_utf8(out.stdout).expect("utf8"))
}

#[test]
fn exit_codes() {
    let good = data("fermion.json");
    let broken = data("boson_broken.json");
    assert_eq!(pclh(&["verify", good.to_str().unwrap()]).0, 0);
    assert_eq!(pclh(&["verify", broken.to_str().unwrap()]).0, 1);
    assert_eq!(pclh(&["verify", "no/such/file.json"]).0, 2);
    assert_eq!(pclh(&["verify", "builtin:nothing"]).0, 2);
    assert_eq!(pclh(&["graphs", "enumerate", "7"]).0, 2);
    assert_eq!(pclh(&["bracket", "builtin:boson", "u", "v"]).0, 2);
}

#[test]
fn bracket_command_output() {
    let (code, out) = pclh(&["bracket", "builtin:boson", "u", "u", "--lambda"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "-λ");
    let (_, out) = pclh(&["bracket", "builtin:affine_sl2", "e", "f"]);
    assert_eq!(out.trim(), "(1|1) @ h + (d[1]|1) @ 1");
}

#[test]
fn cohomology_command() {
    let boson = data("boson_n1.json");
    let zero = data("cochains/zero.json");
    let (code, out) = pclh(&["cohomology", boson.to_str().unwrap(), zero.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).expect("json");
    assert_eq!(v["closed"], true);
    assert_eq!(v["image"].as_array().map(Vec::len), Some(0));

    // the cubic Hamiltonian generates the flow u ↦ 6 u u'
    let class = data("cochains/boson_class.json");
    let (_, out) = pclh(&["cohomology", boson.to_str().unwrap(), class.to_str().unwrap(), "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).expect("json");
    assert_eq!(v["closed"], false);
    assert_eq!(v["image"][0]["value"], "-6 (1) @ u * d[1] u");
}

#[test]
fn golden_graphs_command() {
    let (code, out) = pclh(&["graphs", "golden"]);
    assert_eq!(code, 0);
    assert!(out.contains("5/5 match"));
    let (_, out) = pclh(&["graphs", "enumerate", "2"]);
    assert!(out.ends_with("3 acyclic 2-graphs\n"));
}
