use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn likit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_likit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("likit-cli-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn rootsys_info_reports_weyl_order() {
    let out = likit(&["rootsys", "info", "E6", "--format", "json"]);
    assert!(out.status.success());
    let j = stdout_json(&out);
    assert_eq!(j["weyl_order"], "51840");
    assert_eq!(j["roots"], 72);
    assert_eq!(j["weight_root_index"], "3");
}

#[test]
fn unsupported_system_is_a_usage_error() {
    assert_eq!(likit(&["rootsys", "info", "B1"]).status.code(), Some(2));
}

#[test]
fn passing_suite_exits_zero_with_pass_status() {
    let out = likit(&["sp8-index", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["status"], "pass");
}

#[test]
fn failing_suite_exits_one() {
    let out = likit(&["prop91-constructions", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["status"], "fail");
}

#[test]
fn unknown_suite_and_bad_flag_exit_two() {
    assert_eq!(likit(&["no-such-suite"]).status.code(), Some(2));
    assert_eq!(likit(&["so9-table", "--format", "yaml"]).status.code(), Some(2));
}

#[test]
fn reports_are_byte_stable() {
    let a = likit(&["disentangle", "--format", "json", "--seed", "11"]);
    let b = likit(&["disentangle", "--format", "json", "--seed", "11"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout_json(&a)["seed"], 11);
}

#[test]
fn parallel_run_matches_sequential() {
    let a = likit(&["lattice-invariants", "--format", "json"]);
    let b = likit(&["lattice-invariants", "--format", "json", "--parallel"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let cfg = scratch("config.json");
    fs::write(&cfg, r#"{"seed": 5, "max_rank": 2}"#).unwrap();
    let out = likit(&["freudenthal-vs-weyl", "--format", "json", "--config", cfg.to_str().unwrap(), "--seed", "9"]);
    let j = stdout_json(&out);
    assert_eq!(j["seed"], 9);
    // rank 2 systems: A1, A2, B2, G2 fundamental weights plus the C4 π2 check
    assert_eq!(j["checks"].as_array().unwrap().len(), 1 + 2 + 2 + 2 + 1);
    let notes = j["notes"].as_array().unwrap();
    assert!(notes.iter().any(|n| n.as_str().unwrap().contains("C4 π2")));
}

#[test]
fn out_flag_writes_file() {
    let path = scratch("table.txt");
    let out = likit(&["so9-table", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 5);
}

#[test]
fn rep_weights_json() {
    let out = likit(&["rep", "weights", "C4", "2", "--format", "json"]);
    let j = stdout_json(&out);
    let total: u64 = j["weights"].as_array().unwrap().iter().map(|w| w["mult"].as_u64().unwrap()).sum();
    assert_eq!(total, 27);
}

#[test]
fn stabilizer_of_a2_roots() {
    let path = scratch("a2-roots.json");
    let roots = [[1, -1, 0], [-1, 1, 0], [0, 1, -1], [0, -1, 1], [1, 0, -1], [-1, 0, 1]];
    let weights: Vec<_> = roots
        .iter()
        .map(|r| serde_json::json!({"coords": r.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "mult": 1}))
        .collect();
    fs::write(&path, serde_json::json!({"ambient_dim": 3, "weights": weights}).to_string()).unwrap();
    let out = likit(&["stab", "weights", path.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let j = stdout_json(&out);
    assert_eq!(j["order"], "12");
    assert_eq!(j["restricted_to_span"], true);
}

#[test]
fn embed_branch_from_file() {
    let path = scratch("emb.json");
    fs::write(
        &path,
        r#"{"source": "A2", "target": "F4", "coroot_images": [["1","2","0","1"], ["1","-1","0","-2"]]}"#,
    )
    .unwrap();
    let out = likit(&["embed", "branch", path.to_str().unwrap(), "1", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let j = stdout_json(&out);
    let dec = j["decomposition"].as_array().unwrap();
    assert_eq!(dec.len(), 2);
    assert_eq!(dec[0]["multiplicity"], 3);
    assert_eq!(dec[1]["multiplicity"], 2);
}

#[test]
fn trace_membership_from_files() {
    let target = scratch("target.json");
    let gens = scratch("gens.json");
    fs::write(&target, r#"[{"coeff": "1", "words": [[1, 2]]}]"#).unwrap();
    fs::write(
        &gens,
        r#"[[{"coeff": "1", "words": [[1, 1]]}], [{"coeff": "1", "words": [[2, 2]]}]]"#,
    )
    .unwrap();
    let args = |g: &str| {
        likit(&[
            "trace", "member", target.to_str().unwrap(), g, "--algebra", "gl2", "--arity", "2",
            "--degree", "4", "--format", "json",
        ])
    };
    assert_eq!(stdout_json(&args(gens.to_str().unwrap()))["member"], false);
    let lie = stdout_json(&args("lie"));
    assert_eq!(lie["member"], true);
}
