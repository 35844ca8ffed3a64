use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(rel)
}

fn phids(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phids")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn elect_reproduces_the_example_network() {
    let topo = data("fixture9.topo");
    let plane = data("example_plane.txt");
    let o = phids(&["elect", s(&topo), "--plane", s(&plane), "--threshold", "4"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("monitors: 3 4 7"), "{out}");
    assert!(out.contains("cluster 1: root 3 children 1 2"), "{out}");

    let o = phids(&["elect", s(&topo), "--plane", s(&plane), "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["clusters"].as_array().unwrap().len(), 3);
}

#[test]
fn elect_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.topo");
    std::fs::write(&empty, "# nothing here\n").unwrap();
    let o = phids(&["elect", s(&empty), "--plane-values", "1=2"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));

    let topo = data("fixture9.topo");
    let o = phids(&["elect", s(&topo), "--plane", s(&data("example_plane.txt")), "--threshold", "9.5"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));

    let o = phids(&["elect", s(&topo), "--plane-values", "1=2,42=3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_writes_comparison_with_fewer_nodes_touched() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cliques");
    let o = phids(&["simulate", s(&data("scenarios/three_cliques.json")), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["report.json", "monitors.csv", "bpr.csv", "events.csv", "comparison.csv"] {
        assert!(out.join(name).exists(), "{name} missing");
    }
    let report = read_json(&out.join("report.json"));
    let c = &report["comparison"];
    let (p, sp) = (c["phids"]["nodes_touched"].as_u64().unwrap(), c["spaid"]["nodes_touched"].as_u64().unwrap());
    assert!(p <= sp, "phids {p} spaid {sp}");
    let table = std::fs::read_to_string(out.join("comparison.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.contains(",phids,") && table.contains(",spaid_baseline,"));
}

#[test]
fn malformed_scenario_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("bad.json");
    std::fs::write(&sc, r#"{"edges": [[1, 2]], "default_bpr": 10, "seed": "seven"}"#).unwrap();
    let o = phids(&["simulate", s(&sc), "--out", s(&dir.path().join("out"))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed"), "{}", stderr(&o));
}

#[test]
fn zero_duration_runs_only_the_initial_election() {
    let dir = tempfile::tempdir().unwrap();
    let sc = dir.path().join("idle.json");
    std::fs::write(&sc, r#"{"edges": [[1, 2], [2, 3]], "default_bpr": 10, "threshold": 0, "duration": 0}"#).unwrap();
    let out = dir.path().join("out");
    let o = phids(&["simulate", s(&sc), "--out", s(&out), "--mode", "phids"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let report = read_json(&out.join("report.json"));
    let run = &report["runs"][0];
    assert!(run["events"].as_array().unwrap().is_empty());
    assert_eq!(run["monitor_sets"].as_array().unwrap().len(), 1);
    assert!(!out.join("comparison.csv").exists());
}

#[test]
fn report_and_compare_reproduce_tables() {
    let dir = tempfile::tempdir().unwrap();
    let sc = data("scenarios/handover.json");
    let a = dir.path().join("a");
    assert!(phids(&["simulate", s(&sc), "--out", s(&a)]).status.success());
    let b = dir.path().join("b");
    let o = phids(&["report", s(&a.join("report.json")), "--out", s(&b)]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["monitors.csv", "bpr.csv", "events.csv", "comparison.csv"] {
        assert_eq!(std::fs::read(a.join(name)).unwrap(), std::fs::read(b.join(name)).unwrap(), "{name}");
    }

    let (p, sp) = (dir.path().join("p"), dir.path().join("s"));
    assert!(phids(&["simulate", s(&sc), "--out", s(&p), "--mode", "phids"]).status.success());
    assert!(phids(&["simulate", s(&sc), "--out", s(&sp), "--mode", "spaid"]).status.success());
    let c = dir.path().join("c");
    let o = phids(&["compare", s(&p.join("report.json")), s(&sp.join("report.json")), "--out", s(&c)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read(a.join("comparison.csv")).unwrap(), std::fs::read(c.join("comparison.csv")).unwrap());

    let o = phids(&["compare", s(&p.join("report.json")), s(&p.join("report.json"))]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn train_classify_evaluate_on_the_bundled_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let csv = data("separable_41.csv");
    let model = dir.path().join("model.json");
    let o = phids(&["train", s(&csv), "--out", s(&model), "--seed", "41", "--linear"]);
    assert!(o.status.success(), "{}", stderr(&o));

    let out = dir.path().join("eval");
    let o = phids(&["evaluate", s(&csv), "--model", s(&model), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = read_json(&out.join("metrics.json"));
    assert!(m["accuracy"].as_f64().unwrap() >= 0.95, "{m}");
    assert!(out.join("roc.csv").exists());

    let o = phids(&["evaluate", s(&csv), "--model", s(&model), "--baseline"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("accuracy: 1.0000"), "{}", stdout(&o));

    let labels = dir.path().join("labels.txt");
    let o = phids(&["classify", s(&csv), "--model", s(&model), "--out", s(&labels)]);
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(&labels).unwrap().lines().count(), 200);
}

#[test]
fn training_on_one_class_fails_with_its_own_code() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(data("separable_41.csv")).unwrap();
    let normal: Vec<&str> = text.lines().filter(|l| !l.ends_with("intrusion")).collect();
    let one = dir.path().join("normal.csv");
    std::fs::write(&one, normal.join("\n")).unwrap();
    let o = phids(&["train", s(&one), "--out", s(&dir.path().join("m.json"))]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn perfect_predictions_score_perfectly() {
    let dir = tempfile::tempdir().unwrap();
    let csv = data("separable_41.csv");
    let text = std::fs::read_to_string(&csv).unwrap();
    let preds: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    let file = dir.path().join("preds.txt");
    std::fs::write(&file, preds.join("\n")).unwrap();
    let out = dir.path().join("eval");
    let o = phids(&["evaluate", s(&csv), "--predictions", s(&file), "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let m = read_json(&out.join("metrics.json"));
    assert_eq!(m["accuracy"].as_f64(), Some(1.0));
    assert_eq!(m["false_positive_rate"].as_f64(), Some(0.0));
    assert_eq!(m["detection_rate"].as_f64(), Some(1.0));
}
