use std::process::{Command, Output};

use serde_json::Value;

const WALK: &str = "1,2,3,4,3,5;5,6,5,7,5,3,8,3;3,2,9,10,9,11,9;9,2,12,13,12,14,12;12,2,15,2,16,2";
const ANNOTATION: &str = "1-2:1:> 2-15:1:> 3-5:1:> 5-6:1:> 5-7:1:> 9-11:1:> 2-3:2:> 2-12:2:> \
                          2-9:3:> 3-4:2:> 3-8:3:> 9-10:2:> 12-13:3:> 12-14:3:> 2-16:2:>";

fn lve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json output")
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn counts_agree_with_formula() {
    let o = lve(&["counts", "--n", "3", "--k", "1", "--D", "3", "--s", "1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["trees"]["enumerated"], "144");
    assert_eq!(v["trees"]["formula"], "144");
    assert_eq!(v["trees"]["face_failures"], 0);
    assert_eq!(v["loop_insertions"]["status"], "PASS");

    let o = lve(&["--format", "csv", "counts", "--n", "3", "--k", "1", "--D", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("trees,3,1,3,,144,144,PASS"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&lve(&["--help"])), 0);
    assert_eq!(code(&lve(&["--version"])), 0);
    assert_eq!(code(&lve(&["no-such-command"])), 1);
    assert_eq!(code(&lve(&["melonic", "--D", "3", "--lambda", "x", "--nmax", "3"])), 1);
    assert_eq!(code(&lve(&["series", "--graph", "dipole", "--m", "1"])), 1);
    assert_eq!(code(&lve(&["series", "--graph", "(1,2);(1)(2)", "--D", "3", "--m", "1"])), 1);
    assert_eq!(code(&lve(&["counts", "--n", "0", "--k", "0", "--D", "3"])), 1);
    assert_eq!(code(&lve(&["--format", "csv", "faces", "--walk", WALK, "--annotation", ANNOTATION, "--D", "3"])), 1);

    let o = lve(&["series", "--graph", "dipole", "--D", "3", "--m", "40"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
    assert_eq!(code(&lve(&["oracle-check", "--graph", "dipole", "--D", "3", "--m", "9"])), 2);
    assert_eq!(code(&lve(&["wg-table", "--k", "9"])), 2);
}

#[test]
fn worked_example_faces() {
    let o = lve(&["faces", "--walk", WALK, "--annotation", ANNOTATION, "--D", "3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(strings(&v["xi"]), ["(1,2)(3)(4)", "(1)(2,4)(3)", "(1)(2)(3)(4)"]);
    assert_eq!(v["total"], v["expected_total"]);
    let strand = v["strands"]
        .as_array()
        .unwrap()
        .iter()
        .find(|s| s["color"] == 1 && s["from"] == 2)
        .unwrap();
    assert_eq!(strand["vertices"], serde_json::json!([3, 3, 3, 5]));
}

#[test]
fn worked_example_loops() {
    let o = lve(&[
        "decorate",
        "--walk",
        WALK,
        "--annotation",
        ANNOTATION,
        "--D",
        "3",
        "--tau",
        "(2)(1,3,4);(2)(1,4,3);(1,2)(3,4)",
        "--loop",
        "2-31:3",
        "--loop",
        "3-7:1",
    ]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["cilium_steps"], serde_json::json!([2, 3, 7, 9, 17, 24, 31, 33]));
    assert_eq!(v["m"], serde_json::json!([4, 5, 6, 7]));
    assert_eq!(v["t"], serde_json::json!([[1, 8], [2, 3]]));
    assert_eq!(
        strings(&v["xi_prime"]),
        ["(1,2,8)(3,4,5)(6)(7)", "(1,2,3,5,7,8)(4)(6)", "(1,2,6,8)(3,5)(4)(7)"]
    );
    assert_eq!(
        strings(&v["tau_prime"]),
        ["(1)(2,3)(4,6,7)(5)(8)", "(1)(2)(3)(4,7,6)(5)(8)", "(1,8)(2)(3)(4,5)(6,7)"]
    );
}

#[test]
fn dipole_series_csv() {
    let o = lve(&["--format", "csv", "series", "--graph", "dipole", "--D", "3", "--m", "2"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "lambda_power,coefficient");
    assert_eq!(lines[1], "0,\"1 ; 1\"");
    assert_eq!(lines[2], "1,\"-6,-6 ; 0,1\"");
}

#[test]
fn output_is_deterministic_across_workers() {
    let args = ["series", "--graph", "(1,2);(1)(2);(1)(2)", "--m", "2"];
    let one = lve(&[&["--workers", "1"], &args[..]].concat());
    let many = lve(&[&["--workers", "3"], &args[..]].concat());
    let default = lve(&args);
    assert_eq!(code(&one), 0);
    assert_eq!(one.stdout, many.stdout);
    assert_eq!(one.stdout, default.stdout);
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("lve-cli-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let o = lve(&["--output", p, "gaussian-moment", "--graph", "dipole", "--D", "4", "--sigma2", "3"]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(v["value"], "0,3 ; 1");
    assert_eq!(v["omega"], 0);
}

#[test]
fn oracle_check_two_point() {
    let o = lve(&["oracle-check", "--graph", "(1,2);(1)(2);(1)(2)", "--m", "2", "--lambda", "1/100"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["comparison"]["mismatched_powers"], serde_json::json!([]));
}

#[test]
fn melonic_and_bounds() {
    let o = lve(&["melonic", "--D", "3", "--lambda", "1/100", "--nmax", "30"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert!(v["difference"].as_f64().unwrap() < 1e-15);
    assert!((v["partial_sum"].as_f64().unwrap() - 0.946_273_9).abs() < 1e-7);

    let o = lve(&[
        "bounds", "--D", "3", "--lambda", "1/10", "--N0", "10", "--nmax", "3", "--qmax", "1",
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn enumerate_lists_trees() {
    let o = lve(&["enumerate", "--n", "2", "--k", "1", "--D", "3"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["listed"], 6);
    let o = lve(&["--format", "csv", "enumerate", "--n", "3", "--k", "1", "--D", "3", "--limit", "5"]);
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn lemma_and_weingarten() {
    let o = lve(&["lemma-check", "--D", "3", "--k", "2", "--nmax", "3", "--prop1", "3"]);
    assert_eq!(code(&o), 0);
    let o = lve(&["wg-table", "--k", "3", "--N0", "5"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["gram_identity"], true);
    assert_eq!(v["entries"]["3"], "2 ; 0,4,0,-5,0,1");
}

#[test]
fn verify_all_passes() {
    let o = lve(&["--format", "csv", "verify-all"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}
