use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn qdp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdp"))
        .args(args)
        .env_remove("QDP_DEFAULT_ORDER")
        .current_dir(root())
        .output()
        .expect("qdp runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let out = qdp(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stdout));
    });
    (out.status.code().unwrap(), v)
}

fn schema() -> jsonschema::JSONSchema {
    let text = std::fs::read_to_string(root().join("schemas/report.schema.json")).unwrap();
    let s: Value = serde_json::from_str(&text).unwrap();
    jsonschema::JSONSchema::compile(&s).expect("schema compiles")
}

fn assert_valid(s: &jsonschema::JSONSchema, v: &Value) {
    if let Err(errs) = s.validate(v) {
        let msgs: Vec<String> = errs.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{} does not validate:\n{}", v["command"], msgs.join("\n"));
    }
}

#[test]
fn dual_check_borel2_passes() {
    let (code, v) = json(&["dual-check", "borel2"]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
    assert_eq!(v["tables"]["poisson"]["bracket"], v["tables"]["dual"]["bracket"]);
    assert_eq!(v["tables"]["poisson"]["cobracket"], v["tables"]["expected_dual"]["cobracket"]);
    assert_eq!(v["tables"]["dual"]["bracket"], serde_json::json!([[0, 1, 1, "1"]]));
}

#[test]
fn y_is_not_in_borel2_prime() {
    let (code, v) = json(&["member", "borel2", "--element", "y"]);
    assert_eq!(code, 1);
    assert_eq!(v["delta"]["verdict"]["kind"], "NotMember");
    assert_eq!(v["delta"]["verdict"]["witness"], 2);
    assert_eq!(v["h_order"], 8);
    assert_eq!(v["degree_cap"], 8);
}

#[test]
fn unknown_example_is_a_usage_error() {
    assert_eq!(qdp(&["show", "nope"]).status.code(), Some(2));
    let (code, v) = json(&["show", "nope"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"]["kind"], "UnknownExample");
}

#[test]
fn exit_codes() {
    let cases: &[(&[&str], i32)] = &[
        (&["list"], 0),
        (&["member", "borel2", "--element", "h*y"], 0),
        (&["member", "borel2", "--element", "h*q"], 2),
        (&["member", "borel2", "--element", "x +"], 2),
        (&["member", "borel2", "--element", "exp(x)"], 2),
        (&["member", "borel2'", "--element", "X"], 2),
        (&["member", "heisenberg3", "--element", "h*z", "--via", "pairing"], 1),
        (&["vee", "borel2"], 2),
        (&["frobnicate"], 2),
        (&["--h-order", "0", "list"], 2),
        (&["check-hopf", "missing/file.json"], 2),
        (&["roundtrip", "borel2", "--direction", "vee-prime"], 2),
        (&["roundtrip", "borel2'", "--direction", "vee-prime"], 0),
        (&["limit", "heisenberg3'"], 0),
    ];
    for (args, want) in cases {
        let out = qdp(args);
        assert_eq!(
            out.status.code(),
            Some(*want),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn not_divisible_input_is_a_math_failure() {
    let dir = std::env::temp_dir().join(format!("qdp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    // x⊗y appears in Δ(y) without a power of h
    let mut m: Value = serde_json::from_str(&std::fs::read_to_string(root().join("manifests/abelian2.json")).unwrap()).unwrap();
    m["name"] = "bad".into();
    let one = serde_json::json!({"v_min": 0, "order": 8, "coeffs": ["1"]});
    m["coproduct"]["x2"] = serde_json::json!([
        {"monomials": [[0, 1], [0, 0]], "coeff": one},
        {"monomials": [[0, 0], [0, 1]], "coeff": one},
        {"monomials": [[1, 0], [0, 1]], "coeff": one},
    ]);
    std::fs::write(&path, serde_json::to_string(&m).unwrap()).unwrap();
    let p = path.to_str().unwrap();
    let (code, v) = json(&["prime", p]);
    assert_eq!(code, 1);
    assert_eq!(v["error"]["kind"], "NotDivisible");
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn shipped_manifests_match_show() {
    for name in qdp::examples::NAMES {
        let out = qdp(&["show", name, "--manifest"]);
        assert_eq!(out.status.code(), Some(0));
        let file = std::fs::read(root().join(format!("manifests/{name}.json"))).unwrap();
        assert!(out.stdout == file, "manifests/{name}.json differs from `qdp show {name} --manifest`");
    }
}

#[test]
fn shipped_seeds_match_the_builtin_seeds() {
    for name in ["abelian1", "borel2"] {
        let b = qdp::examples::builtin(name).unwrap();
        let q = qdp::drinfeld::prime_presentation(&b.quea).unwrap();
        let text = std::fs::read_to_string(root().join(format!("manifests/{name}.seed.json"))).unwrap();
        let seed = qdp::manifest::load_seed(&text, &b.quea, &q).unwrap();
        assert_eq!(seed.values, b.pairing_seed.unwrap().values);
        assert_eq!(qdp::manifest::dump_seed(&seed, &b.quea, &q), text);
    }
}

#[test]
fn pair_from_seed_file() {
    let seed = "manifests/borel2.seed.json";
    let (code, v) = json(&["pair", "borel2", "borel2'", "--seed", seed, "--left-elem", "x*y", "--right-elem", "X*Y"]);
    assert_eq!(code, 0);
    assert_eq!(v["validated"], true);
    // ⟨x⊗y, Δ(X)Δ(Y)⟩: X·e^X⊗Y gives 1, e^X⊗XY gives ⟨y, XY⟩ = h
    assert_eq!(v["value"]["coeffs"][0], "1");
    assert_eq!(v["value"]["coeffs"][1], "1");
    assert!(v["value"]["coeffs"].as_array().unwrap()[2..].iter().all(|c| c == "0"));
}

#[test]
fn prime_writes_a_loadable_manifest() {
    let dir = std::env::temp_dir().join(format!("qdp-prime-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("borel2p.json");
    let p = path.to_str().unwrap();
    assert_eq!(qdp(&["prime", "borel2", "-o", p]).status.code(), Some(0));
    let (code, v) = json(&["vee", p]);
    assert_eq!(code, 0);
    assert_eq!(v["output"], "borel2");
    let (code, _) = json(&["roundtrip", p, "--direction", "vee-prime"]);
    assert_eq!(code, 0);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn env_var_sets_default_order() {
    let out = Command::new(env!("CARGO_BIN_EXE_qdp"))
        .args(["member", "borel2", "--element", "h*x", "--format", "json"])
        .env("QDP_DEFAULT_ORDER", "5")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["h_order"], 5);
    assert_eq!(v["delta"]["valuations"].as_array().unwrap().len(), 6);
    assert!(!v["warnings"].as_array().unwrap().is_empty(), "N < D should warn");
}

#[test]
fn both_routes_agree_through_the_cli() {
    for e in ["1", "x", "h*x", "h*y", "x*y", "h^2*x*y", "h*x + y", "exp(h*x) - 1"] {
        let (code, v) = json(&["member", "borel2", "--element", e, "--via", "both", "--h-order", "6", "--degree", "6"]);
        assert_ne!(code, 3, "{e}");
        assert_eq!(v["agree"], true, "{e}");
    }
}

#[test]
fn json_reports_validate() {
    let s = schema();
    let seed = "manifests/borel2.seed.json";
    let runs: &[&[&str]] = &[
        &["list"],
        &["show", "borel2"],
        &["show", "nope"],
        &["check-hopf", "heisenberg3", "--bound", "2"],
        &["diamond", "heisenberg3"],
        &["prime", "borel2"],
        &["vee", "borel2'"],
        &["member", "borel2", "--element", "y", "--via", "both"],
        &["limit", "borel2"],
        &["limit", "borel2'"],
        &["dual-check", "heisenberg3"],
        &["roundtrip", "abelian2", "--direction", "prime-vee"],
        &["pair", "borel2", "borel2'", "--seed", seed, "--left-elem", "y", "--right-elem", "Y"],
        &["pair", "abelian1", "abelian1'", "--seed", "manifests/borel2.seed.json", "--left-elem", "x", "--right-elem", "X"],
        &["selftest", "--h-order", "2", "--degree", "2"],
    ];
    for args in runs {
        let (_, v) = json(args);
        assert_valid(&s, &v);
    }
}

#[test]
fn failing_reports_carry_discrepancies() {
    let dir = std::env::temp_dir().join(format!("qdp-seed-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("h.seed.json");
    // ⟨x, X⟩ = h clashes with the unscaled x^k⊗y terms of Δ(y)
    let text = std::fs::read_to_string(root().join("manifests/borel2.seed.json")).unwrap();
    let mut seed: Value = serde_json::from_str(&text).unwrap();
    seed["values"][0]["value"] = serde_json::json!({"v_min": 1, "order": 8, "coeffs": ["1"]});
    std::fs::write(&path, serde_json::to_string(&seed).unwrap()).unwrap();
    let (code, v) = json(&[
        "pair",
        "borel2",
        "borel2'",
        "--seed",
        path.to_str().unwrap(),
        "--left-elem",
        "x",
        "--right-elem",
        "X",
    ]);
    assert_eq!(code, 1);
    assert_eq!(v["validated"], false);
    let checks = v["report"]["checked_axioms"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["pass"] == false && c.get("discrepancy").is_some()));
    assert_valid(&schema(), &v);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn json_output_is_stable() {
    let args = ["check-hopf", "borel2", "--bound", "2", "--format", "json", "--h-order", "5", "--degree", "5"];
    let a = qdp(&args).stdout;
    let b = qdp(&args).stdout;
    let mut seq = args.to_vec();
    seq.push("--no-parallel");
    let c = qdp(&seq).stdout;
    assert_eq!(a, b);
    assert_eq!(a, c);
}
