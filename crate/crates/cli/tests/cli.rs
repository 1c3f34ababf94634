use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use prspace::{aucpr_min_range, merged_metrics, MetricsReport, RecallRange};
use prspace_cli::format::parse_report_json;
use prspace_cli::input::read_predictions;
use serde_json::Value;
use tempfile::TempDir;

fn prspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prspace"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_stdout(args: &[&str]) -> String {
    let out = prspace(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok_stdout(args)).unwrap()
}

fn error_of(out: &Output) -> Value {
    assert!(!out.status.success());
    serde_json::from_str(String::from_utf8_lossy(&out.stderr).trim()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Every negative scored above every positive.
fn worst_file(pos: usize, neg: usize) -> String {
    let mut text = String::from("label,score\n");
    for i in 0..neg {
        let _ = writeln!(text, "0,{}", 0.9 - i as f64 * 1e-4);
    }
    for i in 0..pos {
        let _ = writeln!(text, "1,{}", 0.1 - i as f64 * 1e-4);
    }
    text
}

fn perfect_file(pos: usize, neg: usize) -> String {
    let mut text = String::from("label,score\n");
    for i in 0..pos {
        let _ = writeln!(text, "1,{}", 0.9 - i as f64 * 1e-4);
    }
    for i in 0..neg {
        let _ = writeln!(text, "0,{}", 0.1 - i as f64 * 1e-4);
    }
    text
}

/// Deterministic interleaving with some overlap between the classes.
fn mixed_rows(pos: usize, neg: usize, fold: &str, offset: usize) -> String {
    let mut text = String::new();
    for i in 0..pos {
        let _ = writeln!(
            text,
            "1,{},{fold}",
            0.3 + ((i * 37 + offset) % 70) as f64 / 100.0
        );
    }
    for i in 0..neg {
        let _ = writeln!(text, "0,{},{fold}", ((i * 53 + offset) % 80) as f64 / 100.0);
    }
    text
}

#[test]
fn worst_ranking_at_even_skew() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "worst.csv", &worst_file(40, 40));
    let v = json(&["analyze", "--input", s(&path)]);
    let floor = 1.0 - std::f64::consts::LN_2;
    assert_eq!(v["skew"], 0.5);
    assert!((v["aucpr"].as_f64().unwrap() - floor).abs() < 1e-6);
    assert!((v["aucpr"].as_f64().unwrap() - 0.3069).abs() < 5e-5);
    assert!((v["aucpr_min"].as_f64().unwrap() - floor).abs() < 1e-6);
    assert!(v["aucnpr"].as_f64().unwrap().abs() < 1e-6);
    assert_eq!(v["range"], serde_json::json!([0.0, 1.0]));
}

#[test]
fn perfect_ranking_scores_one() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "perfect.csv", &perfect_file(7, 30));
    let v = json(&["analyze", "--input", s(&path)]);
    assert_eq!(v["aucpr"], 1.0);
    assert_eq!(v["aucnpr"], 1.0);
    assert_eq!(v["ap"], 1.0);
}

#[test]
fn analyze_keys_and_operating_point() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "m.csv",
        &format!("label,score,fold\n{}", mixed_rows(10, 20, "a", 0)),
    );
    let v = json(&["analyze", "--input", s(&path)]);
    let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    keys.sort();
    assert_eq!(
        keys,
        [
            "ap",
            "ap_min",
            "aucnpr",
            "aucpr",
            "aucpr_min",
            "neg",
            "pos",
            "range",
            "skew"
        ]
    );
    let v = json(&["analyze", "--input", s(&path), "--beta", "2"]);
    let op = &v["operating_point"];
    assert_eq!(op["beta"], 2.0);
    for k in ["recall", "precision", "f_beta", "modified_f1"] {
        assert!(op[k].is_number(), "{k}");
    }
}

#[test]
fn nan_score_names_line_seven() {
    let dir = TempDir::new().unwrap();
    let text = "label,score\n1,0.9\n0,0.8\n1,0.7\n0,0.6\n1,0.5\n0,NaN\n1,0.3\n";
    let path = write(&dir, "nan.csv", text);
    let err = error_of(&prspace(&["analyze", "--input", s(&path)]));
    assert_eq!(err["error"], "ParseError");
    let msg = err["message"].as_str().unwrap();
    assert!(msg.contains(":7:"), "{msg}");
}

#[test]
fn header_must_use_known_columns() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "x.csv", "label,score,weight\n1,0.5,1\n");
    let err = error_of(&prspace(&["analyze", "--input", s(&path)]));
    assert_eq!(err["error"], "ParseError");
    assert!(err["message"].as_str().unwrap().contains(":1:"));
}

#[test]
fn single_class_file_is_degenerate() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "pos.csv", "label,score\n1,0.5\n1,0.4\n");
    let err = error_of(&prspace(&["analyze", "--input", s(&path)]));
    assert_eq!(err["error"], "DegenerateDataset");
}

#[test]
fn bad_flags_are_usage_errors() {
    let out = prspace(&["analyze", "--input", "x.csv", "--recall-range", "0.9:0.1"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_of(&out)["error"], "UsageError");
    let out = prspace(&["analyze", "--input", "/nonexistent/x.csv"]);
    assert_eq!(error_of(&out)["error"], "ReadError");
}

#[test]
fn json_round_trips_to_report() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "m.csv",
        &format!("label,score,fold\n{}", mixed_rows(12, 31, "a", 3)),
    );
    let range = RecallRange::new(0.2, 0.9).unwrap();
    let text = ok_stdout(&[
        "analyze",
        "--input",
        s(&path),
        "--recall-range",
        "0.2:0.9",
        "--full-precision",
    ]);
    let parsed = parse_report_json(&text).unwrap();
    let direct = MetricsReport::compute(&read_predictions(&path).unwrap(), range).unwrap();
    assert_eq!(parsed, direct);

    let rounded = parse_report_json(&ok_stdout(&[
        "analyze",
        "--input",
        s(&path),
        "--recall-range",
        "0.2:0.9",
    ]))
    .unwrap();
    assert!((rounded.aucpr - direct.aucpr).abs() <= 5e-7 * direct.aucpr);
    assert_eq!(rounded.range, direct.range);
}

#[test]
fn concatenated_folds_equal_merged_metrics() {
    let dir = TempDir::new().unwrap();
    let a = mixed_rows(9, 25, "a", 1);
    let b = mixed_rows(14, 18, "b", 5);
    let grouped = write(&dir, "grouped.csv", &format!("label,score,fold\n{a}{b}"));
    let strip = |rows: &str| -> String {
        rows.lines()
            .map(|l| format!("{}\n", l.rsplit_once(',').unwrap().0))
            .collect()
    };
    let pooled = write(
        &dir,
        "pooled.csv",
        &format!("label,score\n{}{}", strip(&a), strip(&b)),
    );

    let direct = json(&["analyze", "--input", s(&pooled), "--full-precision"]);
    let agg = json(&[
        "aggregate",
        "--input",
        s(&grouped),
        "--group-by",
        "fold",
        "--full-precision",
    ]);
    let merged = &agg["merged"];
    for k in [
        "pos",
        "neg",
        "skew",
        "aucpr",
        "aucpr_min",
        "aucnpr",
        "ap",
        "ap_min",
        "range",
    ] {
        assert_eq!(merged[k], direct[k], "{k}");
    }
    let lib = merged_metrics(&read_predictions(&grouped).unwrap(), RecallRange::FULL).unwrap();
    assert_eq!(merged["aucpr"].as_f64().unwrap(), lib.aucpr);
    assert_eq!(agg["groups"].as_array().unwrap().len(), 2);
    assert_eq!(agg["groups"][0]["group"], "a");
}

#[test]
fn aggregate_csv_has_group_mean_and_merged_rows() {
    let dir = TempDir::new().unwrap();
    let text = format!(
        "label,score,task\n{}{}{}",
        mixed_rows(10, 10, "t1", 0),
        mixed_rows(5, 45, "t2", 2),
        mixed_rows(8, 12, "t3", 4)
    );
    let path = write(&dir, "tasks.csv", &text);
    let out = prspace(&[
        "aggregate",
        "--input",
        s(&path),
        "--group-by",
        "task",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    let first: Vec<_> = stdout
        .lines()
        .map(|l| l.split(',').next().unwrap().to_owned())
        .collect();
    assert_eq!(first, ["group", "t1", "t2", "t3", "mean", "merged"]);
    // skews 0.5, 0.1, 0.4 differ by more than the default threshold
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));

    let v = json(&[
        "aggregate",
        "--input",
        s(&path),
        "--group-by",
        "task",
        "--full-precision",
    ]);
    let groups = v["groups"].as_array().unwrap();
    let mean: f64 = groups
        .iter()
        .map(|g| g["aucnpr"].as_f64().unwrap())
        .sum::<f64>()
        / 3.0;
    assert!((v["mean"]["aucnpr"].as_f64().unwrap() - mean).abs() < 1e-12);
    assert_eq!(v["skew_spread"]["warning"], true);
}

#[test]
fn aggregate_vertical_average_grid() {
    let dir = TempDir::new().unwrap();
    let text = format!(
        "label,score,fold\n{}{}",
        mixed_rows(10, 20, "1", 0),
        mixed_rows(10, 30, "2", 7)
    );
    let path = write(&dir, "folds.csv", &text);
    let v = json(&["aggregate", "--input", s(&path), "--grid-step", "0.1"]);
    let va = &v["vertical_average"];
    assert_eq!(va["points"].as_array().unwrap().len(), 11);
    assert_eq!(va["points"][10]["recall"], 1.0);
    let p = &va["points"][5];
    let folds: Vec<f64> = p["fold_precisions"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert!((p["precision"].as_f64().unwrap() - (folds[0] + folds[1]) / 2.0).abs() < 1e-5);
    assert!(v.get("vertical_average").is_some());
    let plain = json(&["aggregate", "--input", s(&path)]);
    assert!(plain.get("vertical_average").is_none());
}

#[test]
fn downsample_rows_and_reproducibility() {
    let dir = TempDir::new().unwrap();
    let text = format!(
        "label,score\n{}",
        mixed_rows(20, 200, "", 0).replace(",\n", "\n")
    );
    let path = write(&dir, "big.csv", &text);
    let args = [
        "downsample",
        "--input",
        s(&path),
        "--ratio",
        "1:1,1:4",
        "--seeds",
        "1-3",
        "--format",
        "csv",
    ];
    let a = ok_stdout(&args);
    assert_eq!(a, ok_stdout(&args));
    let lines: Vec<_> = a.lines().collect();
    assert_eq!(lines.len(), 1 + 2 * 3);
    assert!(lines[0].starts_with("ratio,seed,pos,neg,aucpr,aucnpr"));
    assert!(lines[1].starts_with("1:1,1,20,20,"));
    assert!(lines[4].starts_with("1:4,1,20,80,"));

    let v = json(&[
        "downsample",
        "--input",
        s(&path),
        "--ratio",
        "1:2",
        "--seeds",
        "4,5",
    ]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    assert!(v["dispersion"]["aucnpr_sd"].is_number());

    let err = error_of(&prspace(&[
        "downsample",
        "--input",
        s(&path),
        "--ratio",
        "1:20",
    ]));
    assert_eq!(err["error"], "InsufficientNegatives");
}

#[test]
fn bounds_for_counts() {
    let v = json(&[
        "bounds",
        "--counts",
        "1:2",
        "--full-precision",
        "--recall",
        "0,0.5,1",
    ]);
    let skew = 1.0 / 3.0;
    assert_eq!(v["skew"].as_f64().unwrap(), skew);
    let floor = 1.0 + (1.0 - skew) * (1.0 - skew).ln() / skew;
    assert!((v["aucpr_min"].as_f64().unwrap() - floor).abs() < 1e-12);
    // one positive ranked below both negatives
    assert!((v["ap_min"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-15);
    let pts = v["min_precision"].as_array().unwrap();
    assert_eq!(pts.len(), 3);
    assert_eq!(pts[0]["min_precision"], 0.0);
    assert!((pts[2]["min_precision"].as_f64().unwrap() - skew).abs() < 1e-15);
    assert!((pts[1]["min_precision"].as_f64().unwrap() - 0.2).abs() < 1e-15);

    let v = json(&[
        "bounds",
        "--skew",
        "0.1",
        "--recall-range",
        "0.8:1",
        "--grid-step",
        "0.05",
    ]);
    assert_eq!(v["aucpr_min_range"].as_f64().unwrap(), 0.0181756);
    assert_eq!(v["min_precision"].as_array().unwrap().len(), 5);
    assert!(v.get("ap_min").is_none());

    let err = error_of(&prspace(&["bounds", "--skew", "1.5"]));
    assert_eq!(err["error"], "DegenerateSkew");
}

fn count(svg: &str, needle: &str) -> usize {
    svg.matches(needle).count()
}

#[test]
fn plot_draws_one_overlay_per_distinct_skew() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", &worst_file(10, 20));
    let b = write(&dir, "b.csv", &perfect_file(10, 20));
    let c = write(&dir, "c.csv", &perfect_file(10, 10));
    let out = dir.path().join("p.svg");
    ok_stdout(&[
        "plot",
        "--input",
        s(&a),
        "--input",
        s(&b),
        "--input",
        s(&c),
        "--output",
        s(&out),
    ]);
    let svg = std::fs::read_to_string(&out).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert!(svg.contains(r#"version="1.1""#));
    assert!(svg.contains(r#"width="800" height="600""#));
    assert_eq!(count(&svg, r#"class="min-curve""#), 2);
    assert_eq!(count(&svg, r#"class="unachievable""#), 2);
    assert_eq!(count(&svg, r#"class="pr-curve""#), 3);
    assert!(svg.contains("π = 0.333333"));
    assert!(svg.contains("π = 0.5"));
}

#[test]
fn plot_bytes_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let text = format!(
        "label,score,fold\n{}{}",
        mixed_rows(10, 20, "x", 0),
        mixed_rows(6, 30, "y&z", 3)
    );
    let path = write(&dir, "f.csv", &text);
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok_stdout(&[
            "plot",
            "--input",
            s(&path),
            "--group-by",
            "fold",
            "--output",
            s(&out),
        ]);
        std::fs::read(out).unwrap()
    };
    let first = run("1.svg");
    assert_eq!(first, run("2.svg"));
    let svg = String::from_utf8(first).unwrap();
    assert!(svg.contains("y&amp;z"));
    assert!(!svg.contains("y&z"));
}

#[test]
fn plot_clipped_range_annotates_restricted_floor() {
    let dir = TempDir::new().unwrap();
    let path = write(&dir, "w.csv", &worst_file(10, 90));
    let out = dir.path().join("clip.svg");
    ok_stdout(&[
        "plot",
        "--input",
        s(&path),
        "--recall-range",
        "0.8:1",
        "--output",
        s(&out),
    ]);
    let svg = std::fs::read_to_string(&out).unwrap();
    let floor = aucpr_min_range(0.1, RecallRange::new(0.8, 1.0).unwrap()).unwrap();
    assert!((floor - 0.018_175_634_142_324_96).abs() < 1e-15);
    assert!(svg.contains("AUCPR_MIN on [0.8, 1] = 0.0181756"), "{svg}");
    // x axis starts at the range start
    for tick in ["0.8", "0.84", "0.88", "0.92", "0.96", "1"] {
        assert!(svg.contains(&format!(">{tick}</text>")), "{tick}");
    }
}

#[test]
fn plot_family_of_minimum_curves() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("family.svg");
    ok_stdout(&[
        "plot",
        "--skew",
        "0.01,0.1,0.3,0.5,0.7,0.9",
        "--output",
        s(&out),
    ]);
    let svg = std::fs::read_to_string(&out).unwrap();
    assert_eq!(count(&svg, r#"class="min-curve""#), 6);
    assert_eq!(count(&svg, r#"class="pr-curve""#), 0);
    assert!(svg.contains(r#"data-skew="0.01""#));

    let err = error_of(&prspace(&["plot", "--output", s(&out)]));
    assert_eq!(err["error"], "UsageError");
}

#[test]
fn unwritable_output_is_write_error() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("missing").join("p.svg");
    let err = error_of(&prspace(&["plot", "--skew", "0.5", "--output", s(&out)]));
    assert_eq!(err["error"], "WriteError");
    let path = write(&dir, "w.csv", &worst_file(3, 3));
    let err = error_of(&prspace(&[
        "analyze",
        "--input",
        s(&path),
        "--output",
        s(&out),
    ]));
    assert_eq!(err["error"], "WriteError");
}
