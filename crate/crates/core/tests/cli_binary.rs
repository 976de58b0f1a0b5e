use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qenc(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qenc")).current_dir(dir).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_string()).collect()
}

#[test]
fn synth_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    for out in ["a.csv", "b.csv"] {
        let o = qenc(dir.path(), &["synth", "--n", "1000", "--seed", "7", "--out", out]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("rows: 1000"));
    }
    assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
}

#[test]
fn synth_rounding_reports_cardinality() {
    let dir = tempfile::tempdir().unwrap();
    let o = qenc(dir.path(), &["synth", "--n", "1000", "--round", "0", "--out", "d.csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let k: usize = text
        .lines()
        .find_map(|l| l.strip_prefix("cardinality x1: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(k > 1 && k < 1000, "{text}");
}

#[test]
fn synth_rejects_zero_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = qenc(dir.path(), &["synth", "--n", "0", "--out", "d.csv"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("n_rows must be positive"), "{}", stderr(&o));
}

#[test]
fn encode_toy_median() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("toy.csv"), "c,y\na,1\na,2\na,9\nb,5\n").unwrap();
    let o = qenc(
        dir.path(),
        &["encode", "--train", "toy.csv", "--cat", "c", "--target", "y", "--p", "0.5", "--m", "0", "--out", "enc.csv", "--dump-encoder", "enc.json"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("enc.csv")).unwrap();
    let values: Vec<f64> = column(&csv, "c").iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(values, vec![2.0, 2.0, 2.0, 5.0]);
    assert_eq!(column(&csv, "y"), vec!["1", "2", "9", "5"]);
    let dump: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("enc.json")).unwrap()).unwrap();
    assert_eq!(dump["kind"], "quantile");
}

#[test]
fn encode_summary_emits_three_columns_plus_passthrough() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.csv"), "c,x,y\na,0.5,1\na,1.5,2\nb,2.5,9\nb,3.5,5\n").unwrap();
    let o = qenc(
        dir.path(),
        &["encode", "--train", "t.csv", "--cat", "c", "--num", "x", "--target", "y", "--encoder", "summary", "--quantiles", "0.25,0.5,0.75", "--out", "o.csv"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("o.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    assert_eq!(header.iter().filter(|h| h.starts_with("c__q")).count(), 3);
    assert!(header.contains(&"x") && header.contains(&"y"));
}

#[test]
fn encode_unseen_category_warns_but_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("train.csv"), "c,y\na,1\na,3\n").unwrap();
    fs::write(dir.path().join("apply.csv"), "c,y\nz,0\na,0\n").unwrap();
    let o = qenc(
        dir.path(),
        &["encode", "--train", "train.csv", "--apply", "apply.csv", "--cat", "c", "--target", "y", "--m", "0", "--out", "o.csv"],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("warning: 1 unseen"), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("o.csv")).unwrap();
    assert_eq!(column(&csv, "c"), vec!["2", "2"]);
}

#[test]
fn encode_reports_missing_column() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("t.csv"), "c,y\na,1\n").unwrap();
    let o = qenc(dir.path(), &["encode", "--train", "t.csv", "--cat", "city", "--target", "y", "--out", "o.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("city"), "{}", stderr(&o));
}

#[test]
fn benchmark_with_reference_grid() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        "benchmark", "--synthetic-rows", "240", "--round", "0", "--seed", "3", "--encoder", "quantile,target", "--metric", "mae",
        "--folds", "4", "--repeats", "3", "--m-values", "0,1,10,50", "--p-values", "0.25,0.5,0.75", "--out",
    ];
    args.push("r.json");
    let o = qenc(dir.path(), &args);
    assert!(o.status.success(), "{}", stderr(&o));
    let r1 = fs::read_to_string(dir.path().join("r.json")).unwrap();
    assert!(qenc(dir.path(), &args).status.success());
    assert_eq!(r1, fs::read_to_string(dir.path().join("r.json")).unwrap());
    let report: serde_json::Value = serde_json::from_str(&r1).unwrap();
    let run = &report["runs"][0];
    let quantile = run["cv"]["encoders"].as_array().unwrap().iter().find(|e| e["name"] == "quantile").unwrap();
    assert_eq!(quantile["configs"].as_array().unwrap().len(), 12);
    let cmp = run["comparisons"].as_array().unwrap().iter().find(|c| c["encoder"] == "quantile").unwrap();
    let p = cmp["wilcoxon"]["p_value"].as_f64().unwrap();
    let pq = cmp["p_q"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&pq));
    assert!(report["version"].is_string() && report["config"].is_object());
    assert!(stdout(&o).contains("quantile"));
    let csv = fs::read_to_string(dir.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 13 * 12);
}

#[test]
fn benchmark_config_errors_abort_early() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.toml"), "seed = 1\nbogus = 2\n[dataset]\nsource = \"cauchy\"\n").unwrap();
    let o = qenc(dir.path(), &["benchmark", "--config", "bad.toml", "--out", "r.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("r.json").exists());
    fs::write(dir.path().join("stray.toml"), "[dataset]\nsource = \"csv\"\npath = \"d.csv\"\ntarget = \"y\"\nextra = 1\n[[encoders]]\nname = \"target\"\n").unwrap();
    let o = qenc(dir.path(), &["benchmark", "--config", "stray.toml"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("extra"), "{}", stderr(&o));
    let o = qenc(dir.path(), &["benchmark"]);
    assert_eq!(o.status.code(), Some(1));
}
