use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use zeta_strips_cli::plot::read_csv;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeta-strips"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn digest_of(o: &Output) -> String {
    let line = stderr(o).lines().find(|l| l.starts_with("run ")).unwrap().to_string();
    let record: Value = serde_json::from_str(&line[4..]).unwrap();
    record["results_digest"].as_str().unwrap().to_string()
}

#[test]
fn eval_prints_value_bound_and_terms() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["eval", "--sigma", "2", "-k", "0", "--precision-digits", "12"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("(1.644934066848 + 0.000000000000i)e0"), "{out}");
    assert!(out.contains("terms used"));
    let bad = run(dir.path(), &["eval", "--sigma", "-1", "--t", "3", "-k", "1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("hint"));
}

#[test]
fn regions_lists_strips() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["regions", "100"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("S_2") && out.contains("S_3") && !out.contains("S_4"));
}

#[test]
fn zero_stream_fields_and_count() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["zeros", "2", "38", "--count-at", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let lines: Vec<Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 5);
    let mut keys: Vec<&str> = lines[0].as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort_unstable();
    assert_eq!(
        keys,
        ["M", "j", "k", "location", "newton_iters", "predicted", "residual", "simplicity_margin"]
    );
    assert!(lines[0]["location"]["sigma"].is_f64());

    let o = run(dir.path(), &["zeros", "2", "38", "--t-max", "50"]);
    assert_eq!(stdout(&o).lines().count(), 3);
    let o = run(dir.path(), &["zeros", "3", "100", "--count-at", "1"]);
    assert!(o.status.success());
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let table = run(dir.path(), &["verify", "m4-10", "--json"]);
    assert!(table.status.success());
    let checks: Vec<Value> = stdout(&table).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(checks.len(), 21);
    assert!(checks.iter().all(|c| c["pass"] == true && c["relation"] == "<"));
    // one stated constant of the first suite does not hold at k = 3
    assert_eq!(run(dir.path(), &["verify", "vk"]).status.code(), Some(1));
}

#[test]
fn identical_runs_share_a_digest_and_the_cache_replays() {
    let dir = tempfile::tempdir().unwrap();
    let a = run(dir.path(), &["regions", "400"]);
    let b = run(dir.path(), &["regions", "400"]);
    assert_eq!(digest_of(&a), digest_of(&b));

    let cache = dir.path().join("c.jsonl");
    let c = cache.to_str().unwrap();
    let first = run(dir.path(), &["zeros", "2", "100", "--count-at", "2", "--use-cache", "--cache", c]);
    let second = run(dir.path(), &["zeros", "2", "100", "--count-at", "2", "--use-cache", "--cache", c]);
    assert!(second.status.success());
    assert_eq!(stdout(&first), stdout(&second));
    assert!(stderr(&second).starts_with("cached run"));
    assert_eq!(std::fs::read_to_string(&cache).unwrap().lines().count(), 1);
}

/// Every `<circle>` and `<line>` in document order, as `(x0, y0, x1, y1)`.
fn svg_coordinates(svg: &str) -> Vec<(f64, f64, f64, f64)> {
    let attr = |el: &str, name: &str| -> f64 {
        let start = el.find(&format!(" {name}=\"")).unwrap() + name.len() + 3;
        let end = start + el[start..].find('"').unwrap();
        el[start..end].parse().unwrap()
    };
    svg.lines()
        .map(str::trim)
        .filter_map(|l| {
            if l.starts_with("<circle") {
                let (x, y) = (attr(l, "cx"), attr(l, "cy"));
                Some((x, y, x, y))
            } else if l.starts_with("<line") {
                Some((attr(l, "x1"), attr(l, "y1"), attr(l, "x2"), attr(l, "y2")))
            } else {
                None
            }
        })
        .collect()
}

#[test]
fn plot_csv_and_svg_agree_exactly() {
    let dir = tempfile::tempdir().unwrap();
    for kind in ["figure2", "regions", "figure4"] {
        let o = run(dir.path(), &["plot", kind, "--out-dir", "out"]);
        assert!(o.status.success(), "{}", stderr(&o));
        let paths: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
        let items = read_csv(&dir.path().join(&paths[0])).unwrap();
        let svg = std::fs::read_to_string(dir.path().join(&paths[1])).unwrap();
        let drawn = svg_coordinates(&svg);
        let listed: Vec<(f64, f64, f64, f64)> = items.iter().map(|i| (i.x0, i.y0, i.x1, i.y1)).collect();
        assert_eq!(drawn, listed, "{kind}");
        assert!(svg.starts_with("<?xml"));
    }
    let fig2 = read_csv(&dir.path().join("out/figure2.csv")).unwrap();
    // T = 50 spans four cells; markers for j = 0..=4
    assert_eq!(fig2.iter().filter(|i| i.kind == "zero").count(), 5);
}

#[test]
fn berndt_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["berndt", "1", "50"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("N(50) = 10"));
    assert_eq!(run(dir.path(), &["berndt", "5", "50"]).status.code(), Some(2));
}
