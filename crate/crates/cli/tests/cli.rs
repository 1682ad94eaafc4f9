use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

const FIXTURE: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/fixture_corpus.json");

fn advqa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_advqa")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

/// `n` single-question paragraphs built around one answer sentence.
fn write_corpus(path: &Path, n: usize, suffix: &str) {
    let context = "Tesla moved to Prague in 1880. He studied there for a year.";
    let paragraphs: Vec<Value> = (0..n)
        .map(|i| {
            json!({
                "context": context,
                "qas": [{
                    "id": format!("q{i:04}{suffix}"),
                    "question": "Where did Tesla move in 1880?",
                    "answers": [{"answer_start": 15, "text": "Prague"}],
                }],
            })
        })
        .collect();
    let doc = json!({"version": "1.1", "data": [{"title": "T", "paragraphs": paragraphs}]});
    std::fs::write(path, serde_json::to_string(&doc).unwrap()).unwrap();
}

fn questions(doc: &Value) -> usize {
    doc["data"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|a| a["paragraphs"].as_array().unwrap())
        .map(|p| p["qas"].as_array().unwrap().len())
        .sum()
}

fn generate(dir: &TempDir, name: &str, extra: &[&str]) -> (PathBuf, PathBuf) {
    let out = dir.path().join(format!("{name}.json"));
    let log = dir.path().join(format!("{name}.jsonl"));
    let mut args = vec!["generate", "--input", FIXTURE, "--output", s(&out), "--log", s(&log)];
    args.extend_from_slice(extra);
    let o = advqa(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    (out, log)
}

#[test]
fn generate_is_byte_identical_across_runs_and_threads() {
    let dir = TempDir::new().unwrap();
    let flags = ["--place", "random", "--fake", "dynamic", "--seed", "7"];
    let (a, la) = generate(&dir, "a", &flags);
    let mut threaded = flags.to_vec();
    threaded.extend(["--threads", "4"]);
    let (b, lb) = generate(&dir, "b", &threaded);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(std::fs::read(&la).unwrap(), std::fs::read(&lb).unwrap());

    let doc = read_json(&a);
    let prov = &doc["provenance"];
    assert_eq!(prov["tool"], "advqa");
    assert_eq!(prov["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(prov["config"]["generation"]["seed"], 7);
    assert_eq!(prov["config"]["generation"]["strategy"], "random");
    assert!(questions(&doc) > 29);
}

#[test]
fn logs_are_json_lines_on_stderr() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o.json");
    let o = advqa(&["generate", "--input", FIXTURE, "--output", s(&out)]);
    assert_eq!(code(&o), 0);
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(!err.is_empty());
    for line in err.lines() {
        let v: Value = serde_json::from_str(line).expect("json log line");
        assert!(v["level"].is_string() && v["message"].is_string());
    }
}

#[test]
fn flags_override_the_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"seed": 5, "strategy": "append", "variants_per_question": 2}"#).unwrap();
    let (out, _) = generate(&dir, "c", &["--config", s(&cfg), "--seed", "9"]);
    let g = &read_json(&out)["provenance"]["config"]["generation"];
    assert_eq!(g["seed"], 9);
    assert_eq!(g["strategy"], "append");
    assert_eq!(g["variants_per_question"], 2);

    std::fs::write(&cfg, r#"{"sede": 5}"#).unwrap();
    let o = advqa(&["generate", "--config", s(&cfg), "--input", FIXTURE, "--output", s(&out)]);
    assert_eq!(code(&o), 4);
}

#[test]
fn exit_codes_distinguish_usage_missing_and_invalid() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o.json");
    assert_eq!(code(&advqa(&["frobnicate"])), 2);
    assert_eq!(code(&advqa(&["generate", "--input", FIXTURE, "--output", s(&out), "--bogus"])), 2);
    assert_eq!(code(&advqa(&["generate", "--input", FIXTURE, "--output", s(&out), "--place", "sideways"])), 2);
    assert_eq!(code(&advqa(&["generate", "--input", FIXTURE, "--output", s(&out), "--variants", "0"])), 2);

    let missing = dir.path().join("nope.json");
    assert_eq!(code(&advqa(&["validate", "--input", s(&missing)])), 3);
    assert_eq!(code(&advqa(&["generate", "--input", s(&missing), "--output", s(&out)])), 3);

    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    assert_eq!(code(&advqa(&["generate", "--input", s(&bad), "--output", s(&out)])), 4);

    let shifted = dir.path().join("shifted.json");
    let text = std::fs::read_to_string(FIXTURE).unwrap().replacen("\"answer_start\": ", "\"answer_start\": 1", 1);
    std::fs::write(&shifted, text).unwrap();
    let o = advqa(&["validate", "--input", s(&shifted)]);
    assert_eq!(code(&o), 4);
    let finding: Value = serde_json::from_str(String::from_utf8(o.stdout).unwrap().lines().next().unwrap()).unwrap();
    assert_eq!(finding["qa_id"], "fx000");

    assert_eq!(code(&advqa(&["validate", "--input", FIXTURE])), 0);
}

#[test]
fn mix_reaches_a_fifth_of_the_output() {
    let dir = TempDir::new().unwrap();
    let (orig, adv, out) = (dir.path().join("o.json"), dir.path().join("a.json"), dir.path().join("m.json"));
    write_corpus(&orig, 800, "");
    write_corpus(&adv, 300, "-adv1");
    let o = advqa(&["mix", "--original", s(&orig), "--adversarial", s(&adv), "--output", s(&out), "--adv-fraction", "0.2", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&out);
    assert_eq!(questions(&doc), 1000);
    assert_eq!(doc["provenance"]["config"]["seed"], 3);

    let again = dir.path().join("m2.json");
    advqa(&["mix", "--original", s(&orig), "--adversarial", s(&adv), "--output", s(&again), "--adv-fraction", "0.2", "--seed", "3"]);
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&again).unwrap());

    write_corpus(&adv, 100, "-adv1");
    assert_ne!(code(&advqa(&["mix", "--original", s(&orig), "--adversarial", s(&adv), "--output", s(&out)])), 0);
    assert_eq!(code(&advqa(&["mix", "--original", s(&orig), "--adversarial", s(&adv), "--output", s(&out), "--adv-fraction", "1.5"])), 2);
}

#[test]
fn analyze_writes_csv_and_summary() {
    let dir = TempDir::new().unwrap();
    let (adv, _) = generate(&dir, "g", &["--place", "append", "--seed", "1"]);
    let (csv, summary) = (dir.path().join("s.csv"), dir.path().join("s.json"));
    let o = advqa(&["analyze", "--input", s(&adv), "--csv", s(&csv), "--summary", s(&summary)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some("n,a,p_x,p_y,p_sa"));
    let doc = read_json(&summary);
    assert!(doc["by_strategy"]["append"].is_object());
    assert!(doc["overall"]["aggregate"]["uniformity"].is_number());
    // Append always lands last: P_{s_n}(n) = 2 for every n.
    for (n, row) in doc["overall"]["per_n"].as_object().unwrap() {
        let n: usize = n.parse().unwrap();
        assert_eq!(row["conditional"][n - 1], 2.0);
    }

    let o = advqa(&["analyze", "--input", FIXTURE, "--summary", s(&summary)]);
    assert_eq!(code(&o), 4, "fixture has no distractor metadata");
    let o = advqa(&["analyze", "--input", FIXTURE, "--subject", "answer", "--summary", s(&summary)]);
    assert_eq!(code(&o), 0);
}

#[test]
fn annotate_baseline_and_evaluate() {
    let dir = TempDir::new().unwrap();
    let side = dir.path().join("f.json");
    assert_eq!(code(&advqa(&["annotate", "--input", FIXTURE, "--output", s(&side)])), 0);
    assert_eq!(read_json(&side).as_object().unwrap().len(), 29);

    let (a1, _) = generate(&dir, "g1", &["--seed", "1"]);
    let (a2, _) = generate(&dir, "g2", &["--seed", "2"]);
    let (p1, p2) = (dir.path().join("p1.json"), dir.path().join("p2.json"));
    assert_eq!(code(&advqa(&["baseline", "--input", s(&a1), "--output", s(&p1)])), 0);
    assert_eq!(code(&advqa(&["baseline", "--input", s(&a2), "--output", s(&p2)])), 0);

    let r1 = dir.path().join("r1.json");
    assert_eq!(code(&advqa(&["evaluate", "--data", s(&a1), "--predictions", s(&p1), "--output", s(&r1)])), 0);
    let single = read_json(&r1);

    let rw = dir.path().join("rw.json");
    let o = advqa(&[
        "evaluate", "--base", FIXTURE, "--data", s(&a1), "--data", s(&a2), "--worst-case", s(&p1), s(&p2), "--output", s(&rw),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let worst = read_json(&rw);
    assert!(worst["worst_case"].is_object());
    assert!(worst["macro_f1"].as_f64().unwrap() <= single["macro_f1"].as_f64().unwrap() + 1e-12);

    let o = advqa(&["evaluate", "--data", s(&a1), "--predictions", s(&p1), "--worst-case", s(&p2)]);
    assert_eq!(code(&o), 2);
    let o = advqa(&["evaluate", "--data", s(&a1), "--worst-case", s(&p1)]);
    assert_eq!(code(&o), 2, "worst case needs a base corpus");
}
