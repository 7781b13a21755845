use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn manifest_dir() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn metalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metalg")).current_dir(manifest_dir()).args(args).output().expect("run metalg")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn golden_path(name: &str) -> PathBuf {
    manifest_dir().join("tests/golden").join(name)
}

/// Compares stdout with `tests/golden/<name>`; `UPDATE_GOLDEN=1` rewrites it.
fn golden(name: &str, args: &[&str], want_code: i32) {
    let out = metalg(args);
    assert_eq!(code(&out), want_code, "{args:?}: stderr {}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let path = golden_path(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        fs::write(&path, &text).unwrap();
        return;
    }
    let want = fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(text, want, "golden {name} differs");
}

#[test]
fn goldens() {
    let t = "--format=table";
    let cases: &[(&str, &[&str], i32)] = &[
        (
            "reflect_collapse.json",
            &["reflect", "--theory", "examples/collapse/theory.json", "--space", "examples/collapse/X.json"],
            0,
        ),
        (
            "reflect_2_2.txt",
            &["reflect", "--theory", "examples/collapse/theory.json", "--space", "examples/collapse/2_2.json", t],
            0,
        ),
        ("check_space_triangle.json", &["check-space", "examples/spaces/triangle.json"], 1),
        ("check_space_pseudo.json", &["check-space", "examples/spaces/pseudo.json"], 0),
        ("check_space_pseudo_as_metric.json", &["check-space", "examples/spaces/pseudo.json", "--kind", "metric"], 1),
        ("closure.txt", &["closure", "examples/spaces/raw.json", t], 0),
        ("product.txt", &["product", "examples/spaces/2_1.json", "examples/collapse/2_2.json", t], 0),
        ("coproduct.txt", &["coproduct", "examples/spaces/2_1.json", "examples/spaces/2_1.json", t], 0),
        ("tensor.txt", &["tensor", "examples/spaces/2_1.json", "examples/spaces/2_1.json", t], 0),
        ("hom.txt", &["hom", "examples/spaces/2_1.json", "examples/collapse/X.json", t], 0),
        ("reflect_metric.txt", &["reflect-metric", "examples/spaces/pseudo.json", t], 0),
        ("coequalize_chain.json", &["coequalize", "examples/chain/f.json", "examples/chain/g.json"], 0),
        ("pushout_chain.txt", &["pushout", "examples/chain/f.json", "examples/chain/g.json", t], 0),
        ("factorize.json", &["factorize", "examples/chain/collapse.json"], 0),
        ("fp_chain_path.json", &["fp-chain", "examples/collapse/X.json"], 0),
        ("fp_chain_discrete.json", &["fp-chain", "examples/spaces/discrete2.json"], 0),
        (
            "check_algebra.json",
            &["check-algebra", "--theory", "examples/quant/theory.json", "--algebra", "examples/quant/swap.json"],
            0,
        ),
        (
            "check_quant_fails.json",
            &[
                "check-quant",
                "--theory",
                "examples/quant/theory.json",
                "--lhs",
                "e0,s",
                "--rhs",
                "e1",
                "--eps",
                "1",
                "--algebra",
                "examples/quant/swap.json",
            ],
            1,
        ),
        (
            "encode_quant.json",
            &["encode-quant", "--theory", "examples/quant/theory.json", "--lhs", "e0,s", "--rhs", "e1", "--eps", "1"],
            0,
        ),
        (
            "enumerate_models.json",
            &["enumerate-models", "--theory", "examples/collapse/theory.json", "--space", "examples/collapse/2_2.json"],
            0,
        ),
        (
            "hom_limit.json",
            &["hom-limit", "--arity", "examples/collapse/X.json", "--space", "examples/collapse/2_2.json"],
            0,
        ),
        ("monoid_check_bad_unit.json", &["monoid-check", "examples/monoids/bad_unit.json"], 1),
        (
            "monoid_coeq_z2.json",
            &["monoid-coeq", "examples/monoids/z2.json", "--classes", "0,0", "--oracle-bound", "2"],
            0,
        ),
        ("laws_small.txt", &["laws", "--suite", "--config", "examples/laws/small.json", t], 0),
        (
            "laws_onestep_mutation.txt",
            &[
                "laws",
                "--law",
                "tensor_coeq_commute",
                "--max-points",
                "2",
                "--random-count",
                "5",
                "--mutation",
                "coequalizer-one-step",
                t,
            ],
            1,
        ),
        ("gen_monoid.json", &["gen", "monoid", "--seed", "11"], 0),
    ];
    for (name, args, want) in cases {
        golden(name, args, *want);
    }
}

#[test]
fn collapse_reflects_to_a_point() {
    let out = metalg(&["reflect", "--theory", "examples/collapse/theory.json", "--space", "examples/collapse/X.json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["type"], "space");
    assert_eq!(v["points"].as_array().unwrap().len(), 1);
}

#[test]
fn suite_reports_every_law() {
    let out = metalg(&["laws", "--suite", "--max-points", "2", "--random-count", "10"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let verdicts = v["report"]["verdicts"].as_array().unwrap();
    assert!(verdicts.len() >= 9);
    assert!(verdicts.iter().all(|x| x["status"] == "pass"));
}

#[test]
fn product_sum_mutation_exits_one() {
    let out = metalg(&["laws", "--suite", "--max-points", "2", "--random-count", "10", "--mutation", "product-sum"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad_dist = dir.path().join("bad.json");
    fs::write(&bad_dist, r#"{"version":1,"type":"space","points":["a"],"kind":"metric","dist":[["x"]]}"#).unwrap();
    let not_json = dir.path().join("junk.json");
    fs::write(&not_json, "{").unwrap();
    let wrong_version = dir.path().join("v2.json");
    fs::write(&wrong_version, r#"{"version":2,"type":"space","points":[],"kind":"metric","dist":[]}"#).unwrap();
    let missing = dir.path().join("missing.json");
    let cases: Vec<Vec<String>> = vec![
        vec!["closure".into(), bad_dist.display().to_string()],
        vec!["closure".into(), not_json.display().to_string()],
        vec!["closure".into(), wrong_version.display().to_string()],
        vec!["closure".into(), missing.display().to_string()],
        vec![
            "reflect".into(),
            "--theory".into(),
            "examples/collapse/X.json".into(),
            "--space".into(),
            "examples/collapse/X.json".into(),
        ],
        vec!["laws".into(), "--law".into(), "nope".into()],
        vec!["laws".into(), "--suite".into(), "--grid".into(), "1,zero".into()],
        vec!["gen".into(), "nothing".into()],
        vec!["monoid-coeq".into(), "examples/monoids/z2.json".into(), "--classes".into(), "0".into()],
    ];
    for args in cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = metalg(&args);
        assert_eq!(code(&out), 2, "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{args:?}");
    }
}

#[test]
fn out_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.json");
    let out =
        metalg(&["product", "examples/spaces/2_1.json", "examples/spaces/2_1.json", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let written = fs::read_to_string(&path).unwrap();
    assert!(written.contains("\"(1,1)\""));
    // The written document reads back as input.
    let again = metalg(&["check-space", path.to_str().unwrap()]);
    assert_eq!(code(&again), 0);
}

#[test]
fn output_is_deterministic() {
    let args = ["gen", "reflexive-pair", "--seed", "5", "--max-points", "3"];
    assert_eq!(metalg(&args).stdout, metalg(&args).stdout);
}
