use std::path::Path;
use std::process::{Command, Output};

fn ari(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ari"))
        .args(args)
        .current_dir(dir)
        .env_remove("ARI_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_full_cube() {
    let dir = tempfile::tempdir().unwrap();
    let o = ari(&["generate", "--function", "g2", "--dim", "10", "--range", "2", "--full", "--out", "g2.csv"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("1024 rows x 10 features"));
    let text = std::fs::read_to_string(dir.path().join("g2.csv")).unwrap();
    assert_eq!(text.lines().count(), 1025);
    assert_eq!(text.lines().next().unwrap(), "x1,x2,x3,x4,x5,x6,x7,x8,x9,x10,class");
}

#[test]
fn generate_sample_and_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let o = ari(&["generate", "--function", "g1", "--dim", "15", "--range", "3", "--sample", "10000", "--seed", "7"], dir.path());
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 10001);
}

#[test]
fn generate_rejects_ternary_g8() {
    let dir = tempfile::tempdir().unwrap();
    let o = ari(&["generate", "--function", "g8", "--range", "3", "--out", "x.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("range 3"));
    assert!(!dir.path().join("x.csv").exists());
}

#[test]
fn score_raw_tiny() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("tiny.csv"), "a,b,y\n0,0,0\n0,1,1\n1,0,1\n1,1,0\n").unwrap();
    let o = ari(&["score", "tiny.csv", "--methods", "ari", "--reps", "1", "--fraction", "1.0", "--no-normalize", "--out", "r.json"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(&dir.path().join("r.json"));
    let features = doc["methods"][0]["features"].as_array().unwrap();
    for f in features {
        assert_eq!(f["raw_mean"], 1.0);
        assert!(f["normalized"].is_null());
    }
    assert!(stdout(&o).contains("1.00"));
}

#[test]
fn score_flags_duplicated_column() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("a,b,c,y\n");
    for i in 0..16u32 {
        let (a, c) = (i % 2, (i / 2) % 2);
        csv.push_str(&format!("{a},{a},{c},{}\n", a ^ c));
    }
    std::fs::write(dir.path().join("dup.csv"), csv).unwrap();
    let o = ari(&["score", "dup.csv", "--methods", "ari", "--reps", "2", "--fraction", "1", "--json"], dir.path());
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let f = &doc["methods"][0]["features"];
    for i in 0..2 {
        assert_eq!(f[i]["flags"], serde_json::json!(["redundant"]));
        assert_eq!(f[i]["value"], 2.0);
        assert!(f[i]["normalized"].is_null());
    }
    assert_eq!(f[2]["flags"], serde_json::json!([]));
}

#[test]
fn score_reports_missing_file_and_bad_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = ari(&["score", "nope.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    std::fs::write(dir.path().join("bad.csv"), "a,y\n0,1\n1\n").unwrap();
    let o = ari(&["score", "bad.csv"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn eval_rejects_zero_k() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("data.csv"), "a,y\n0,1\n1,0\n").unwrap();
    let o = ari(&["eval", "data.csv", "--k", "0"], dir.path());
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("--k"));
}

#[test]
fn eval_reports_short_selection() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ari(&["generate", "--function", "g2", "--dim", "6", "--out", "g2.csv"], dir.path()).status.success());
    let o = ari(&["eval", "g2.csv", "--methods", "ari", "--k", "4", "--fraction", "1", "--reps", "1", "--iters", "50", "--out", "e.json"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("ari: only 2 feature(s) used"));
    let doc = json(&dir.path().join("e.json"));
    assert_eq!(doc["accuracy"]["methods"][0]["features"], serde_json::json!(["x1", "x2"]));
    assert_eq!(doc["accuracy"]["baseline"]["features"].as_array().unwrap().len(), 6);
}

#[test]
fn sweep_coverage() {
    let dir = tempfile::tempdir().unwrap();
    let o = ari(&["sweep", "--function", "g1", "--dims", "10", "--ranges", "2", "--sizes", "500", "--reps", "2", "--out", "s.json"], dir.path());
    assert!(o.status.success());
    assert!(stdout(&o).contains("48.8%"));
    let doc = json(&dir.path().join("s.json"));
    assert_eq!(doc["sweep"][0]["universe_size"], "1024");

    let o = ari(&["sweep", "--function", "g4", "--dims", "1", "--ranges", "2", "--sizes", "2", "--json"], dir.path());
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["sweep"][0]["universe_size"], "2");
    assert_eq!(doc["sweep"][0]["coverage_percent"], 100.0);

    let o = ari(&["sweep", "--function", "g1", "--dims", "15", "--ranges", "3", "--sizes", "400", "--reps", "1", "--json"], dir.path());
    assert!(o.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["sweep"][0]["universe_size"], "14348907");
}

#[test]
fn seed_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_ari"))
            .args(["generate", "--function", "g3", "--sample", "20"])
            .env("ARI_SEED", seed)
            .current_dir(dir.path())
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
}
