//! End-to-end command-line tests: every subcommand, the exit-code contract,
//! and byte-identical reports across runs.

use std::path::{Path, PathBuf};
use std::process::Command;

fn opsat() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opsat"))
}

fn run(args: &[&str]) -> (i32, String) {
    let out = opsat().args(args).output().expect("binary runs");
    (
        out.status.code().expect("no signal"),
        String::from_utf8(out.stdout).expect("utf8"),
    )
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

const R13_LANGUAGE: &str = r#"{
  "R13": {"arity": 3, "tuples": [[-1,1,1],[1,-1,1],[1,1,-1]]}
}"#;

const T_INSTANCE: &str = r#"{
  "language": {"T": {"arity": 2, "tuples": [[-1,-1],[-1,1],[1,-1],[1,1]]}},
  "variables": ["Z1", "Z2"],
  "constraints": [{"relation": "T", "scope": ["Z1", "Z2"]}]
}"#;

const JI_DEFS: &str = r#"{
  "source": {"R13": {"arity": 3, "tuples": [[-1,1,1],[1,-1,1],[1,1,-1]]}},
  "definitions": {
    "T": {
      "free": ["Z1", "Z2"],
      "bound": ["U1", "U2", "U3", "U4"],
      "atoms": [
        {"relation": "R13", "scope": ["Z1", "U1", "U4"]},
        {"relation": "R13", "scope": ["Z2", "U2", "U4"]},
        {"relation": "R13", "scope": ["U1", "U2", "U3"]}
      ]
    }
  }
}"#;

#[test]
fn transform_prints_indicator_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    let lang = write(dir.path(), "lang.json", R13_LANGUAGE);
    let (code, out) = run(&[
        "transform",
        "--relation",
        "R13",
        "--language",
        lang.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["nvars"], 3);
    // Leading coefficient of the cubic term is 3/4.
    let terms = doc["terms"].as_array().unwrap();
    let cubic = terms
        .iter()
        .find(|t| t["vars"].as_array().unwrap().len() == 3)
        .unwrap();
    assert_eq!(cubic["coef"], "3/4");

    // Unknown relation name is an input error.
    let (code, _) = run(&[
        "transform",
        "--relation",
        "Nope",
        "--language",
        lang.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
}

#[test]
fn reduce_lift_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write(dir.path(), "t.json", T_INSTANCE);
    let defs = write(dir.path(), "defs.json", JI_DEFS);

    let (code, out) = run(&[
        "reduce",
        "--instance",
        instance.to_str().unwrap(),
        "--defs",
        defs.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["extended"], false);
    assert_eq!(doc["instance"]["constraints"].as_array().unwrap().len(), 3);
    assert_eq!(doc["blocks"].as_array().unwrap().len(), 1);

    let (code, out) = run(&[
        "reduce",
        "--instance",
        instance.to_str().unwrap(),
        "--defs",
        defs.to_str().unwrap(),
        "--extended",
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["extended"], true);
    assert_eq!(
        doc["instance"]["constraints"].as_array().unwrap().len(),
        3 + 15
    );

    // Lift a dimension-1 witness through the reduction.
    let witness = write(
        dir.path(),
        "w.json",
        r#"{
  "dim": 1,
  "assign": {
    "Z1": {"dim": 1, "rows": [[{"re": "-1/1", "im": "0/1"}]]},
    "Z2": {"dim": 1, "rows": [[{"re": "1/1", "im": "0/1"}]]}
  }
}"#,
    );
    let (code, out) = run(&[
        "lift",
        "--instance",
        instance.to_str().unwrap(),
        "--defs",
        defs.to_str().unwrap(),
        "--operators",
        witness.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["dim"], 1);
    let assign = doc["assign"].as_object().unwrap();
    assert!(assign.contains_key("B0__U1"));
    assert!(assign.contains_key("B0__U4"));

    // A non-involution input is rejected as invalid (exit 1 via report).
    let bad = write(
        dir.path(),
        "bad.json",
        r#"{
  "dim": 1,
  "assign": {
    "Z1": {"dim": 1, "rows": [[{"re": "2/1", "im": "0/1"}]]},
    "Z2": {"dim": 1, "rows": [[{"re": "1/1", "im": "0/1"}]]}
  }
}"#,
    );
    let (code, _) = run(&[
        "lift",
        "--instance",
        instance.to_str().unwrap(),
        "--defs",
        defs.to_str().unwrap(),
        "--operators",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
}

#[test]
fn closure_composes_assignments() {
    let dir = tempfile::tempdir().unwrap();
    // Three copies of a one-variable assignment; xor3 gives the triple
    // Kronecker product (here of 1x1 scalars: product of values).
    let minus = r#"{
  "dim": 1,
  "assign": {"X": {"dim": 1, "rows": [[{"re": "-1/1", "im": "0/1"}]]}}
}"#;
    let a = write(dir.path(), "a.json", minus);
    let b = write(dir.path(), "b.json", minus);
    let c = write(dir.path(), "c.json", minus);
    let (code, out) = run(&[
        "closure",
        "--op",
        "xor3",
        "--assignments",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        c.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["assign"]["X"]["rows"][0][0]["re"], "-1/1");
}

#[test]
fn scenario_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let cnf = write(
        dir.path(),
        "cnf.json",
        r#"{
  "language": {"or2": {"arity": 2, "tuples": [[-1,-1],[-1,1],[1,-1]]}},
  "variables": ["x", "y"],
  "constraints": [{"relation": "or2", "scope": ["x", "y"]}]
}"#,
    );
    let (code, out) = run(&["scenario", "--from-3sat", cnf.to_str().unwrap()]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(doc["edges"].as_array().unwrap().len() > 3);

    // Size-2 decision: a path is realizable, a triangle is not.
    let path_graph = write(
        dir.path(),
        "path.json",
        r#"{"vertices": ["a", "b", "c"], "edges": [["a","b"], ["b","c"]]}"#,
    );
    let (code, out) = run(&["scenario", "--decide-2", path_graph.to_str().unwrap()]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["verdict"], "realizable");
    // Emit the model and verify it through the CLI as well.
    let model = serde_json::to_string(&doc["detail"]["model"]).unwrap();
    let model_path = write(dir.path(), "model.json", &model);
    let (code, _) = run(&[
        "scenario",
        "--verify",
        path_graph.to_str().unwrap(),
        model_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);

    let triangle = write(
        dir.path(),
        "triangle.json",
        r#"{"vertices": ["a", "b", "c"], "edges": [["a","b"], ["b","c"], ["a","c"]]}"#,
    );
    let (code, out) = run(&["scenario", "--decide-2", triangle.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(out.contains("not-realizable"));

    // An obviously wrong model fails verification with exit 1.
    let bad_model = write(
        dir.path(),
        "bad_model.json",
        r#"{
  "dim": 1,
  "assign": {
    "a": {"dim": 1, "rows": [[{"re": "1/1", "im": "0/1"}]]},
    "b": {"dim": 1, "rows": [[{"re": "1/1", "im": "0/1"}]]},
    "c": {"dim": 1, "rows": [[{"re": "0/1", "im": "0/1"}]]}
  }
}"#,
    );
    let (code, out) = run(&[
        "scenario",
        "--verify",
        path_graph.to_str().unwrap(),
        bad_model.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(out.contains("invalid-model"));
}

#[test]
fn mermin_report_embeds_certificate() {
    let (code, out) = run(&["mermin", "--emit", "report"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["boolean_max"], "5/6");
    assert_eq!(doc["witness_dim"], 4);
    assert_eq!(doc["kind"], "First");
    assert_eq!(doc["witness"]["dim"], 4);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (_, instance_text) = run(&["mermin", "--emit", "instance"]);
    let instance = write(dir.path(), "m.json", &instance_text);
    let args = [
        "solve",
        "--instance",
        instance.to_str().unwrap(),
        "--method",
        "brute",
    ];
    let (c1, first) = run(&args);
    let (c2, second) = run(&args);
    assert_eq!(c1, c2);
    assert_eq!(first, second);
}

#[test]
fn input_and_cap_errors_use_reserved_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // Malformed JSON: exit 2.
    let broken = write(dir.path(), "broken.json", "{ not json");
    let (code, out) = run(&[
        "solve",
        "--instance",
        broken.to_str().unwrap(),
        "--method",
        "brute",
    ]);
    assert_eq!(code, 2);
    assert!(out.contains("\"verdict\": \"error\""));

    // Brute force beyond the variable cap: exit 3.
    let vars: Vec<String> = (0..25).map(|i| format!("\"X{i}\"")).collect();
    let big = format!(
        r#"{{"language": {{}}, "variables": [{}], "constraints": []}}"#,
        vars.join(", ")
    );
    let big_path = write(dir.path(), "big.json", &big);
    let (code, _) = run(&[
        "solve",
        "--instance",
        big_path.to_str().unwrap(),
        "--method",
        "brute",
    ]);
    assert_eq!(code, 3);
}

#[test]
fn solve_methods_agree_on_a_horn_instance() {
    let dir = tempfile::tempdir().unwrap();
    // Implication chain: (x), (¬x ∨ y); satisfiable as Horn and as 2SAT.
    let instance = write(
        dir.path(),
        "horn.json",
        r#"{
  "language": {
    "unit_pos": {"arity": 1, "tuples": [[-1]]},
    "implies": {"arity": 2, "tuples": [[-1,-1],[1,-1],[1,1]]}
  },
  "variables": ["x", "y"],
  "constraints": [
    {"relation": "unit_pos", "scope": ["x"]},
    {"relation": "implies", "scope": ["x", "y"]}
  ]
}"#,
    );
    for method in ["brute", "2sat", "horn"] {
        let (code, out) = run(&[
            "solve",
            "--instance",
            instance.to_str().unwrap(),
            "--method",
            method,
        ]);
        assert_eq!(code, 0, "method {method}: {out}");
        let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(doc["verdict"], "sat", "method {method}");
        assert_eq!(doc["detail"]["witness"]["x"], -1, "method {method}");
        assert_eq!(doc["detail"]["witness"]["y"], -1, "method {method}");
    }
}

#[test]
fn gap_transport_through_files() {
    // Rewrite the magic square into the odd-parity language through files,
    // lift the committed witness, and verify the lifted assignment against
    // the rewritten instance. This drives reduce/lift/verify end to end.
    let dir = tempfile::tempdir().unwrap();
    let (_, instance_text) = run(&["mermin", "--emit", "instance"]);
    let instance = write(dir.path(), "square.json", &instance_text);
    let (_, witness_text) = run(&["mermin", "--emit", "witness"]);
    let witness = write(dir.path(), "witness.json", &witness_text);

    let defs = write(
        dir.path(),
        "defs.json",
        r#"{
  "source": {"odd3": {"arity": 3, "tuples": [[-1,-1,-1],[-1,1,1],[1,-1,1],[1,1,-1]]}},
  "definitions": {
    "even3": {
      "free": ["x1", "x2", "x3"],
      "bound": ["w"],
      "atoms": [
        {"relation": "odd3", "scope": ["x1", "x2", "w"]},
        {"relation": "odd3", "scope": ["w", "x3", "+1"]}
      ]
    },
    "odd3": {
      "free": ["x1", "x2", "x3"],
      "bound": [],
      "atoms": [{"relation": "odd3", "scope": ["x1", "x2", "x3"]}]
    }
  }
}"#,
    );

    let (code, reduced) = run(&[
        "reduce",
        "--instance",
        instance.to_str().unwrap(),
        "--defs",
        defs.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&reduced).unwrap();
    // Five even-parity constraints contribute two atoms each, the odd one a
    // single atom: eleven constraints total.
    assert_eq!(doc["instance"]["constraints"].as_array().unwrap().len(), 11);
    let reduced_instance =
        write(dir.path(), "reduced.json", &serde_json::to_string(&doc["instance"]).unwrap());

    // The rewritten instance is still unsatisfiable over Booleans.
    let (code, out) = run(&[
        "solve",
        "--instance",
        reduced_instance.to_str().unwrap(),
        "--method",
        "gf2",
    ]);
    assert_eq!(code, 1, "{out}");

    // Lift the dimension-4 witness and verify it on the rewritten instance.
    let (code, lifted) = run(&[
        "lift",
        "--instance",
        instance.to_str().unwrap(),
        "--defs",
        defs.to_str().unwrap(),
        "--operators",
        witness.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{lifted}");
    let lifted_path = write(dir.path(), "lifted.json", &lifted);
    let (code, out) = run(&[
        "verify",
        "--instance",
        reduced_instance.to_str().unwrap(),
        "--operators",
        lifted_path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("\"value\": \"1/1\""));
}

#[test]
fn reduce_rejects_wrong_definitions() {
    // A formula that defines the wrong relation is a hard input error.
    let dir = tempfile::tempdir().unwrap();
    let instance = write(dir.path(), "t.json", T_INSTANCE);
    let bad_defs = write(
        dir.path(),
        "bad.json",
        r#"{
  "source": {"R13": {"arity": 3, "tuples": [[-1,1,1],[1,-1,1],[1,1,-1]]}},
  "definitions": {
    "T": {
      "free": ["Z1", "Z2"],
      "bound": ["U"],
      "atoms": [{"relation": "R13", "scope": ["Z1", "Z2", "U"]}]
    }
  }
}"#,
    );
    let (code, out) = run(&[
        "reduce",
        "--instance",
        instance.to_str().unwrap(),
        "--defs",
        bad_defs.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(out.contains("does not define"));
}
