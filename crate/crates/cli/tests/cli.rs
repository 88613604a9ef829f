use std::fs;
use std::process::{Command, Output};

fn reductlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reductlab"))
        .args(args)
        .env_remove("REDUCTLAB_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const FIXTURE: &str = concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../core/fixtures/preservation_table.tsv"
);

#[test]
fn table_has_one_row_per_group_and_is_stable() {
    let a = reductlab(&["table"]);
    assert_eq!(a.status.code(), Some(0));
    let text = stdout(&a);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 43);
    assert!(lines[0].starts_with("row\tE\tR3"));
    assert!(lines
        .iter()
        .all(|l| l.split('\t').count() == lines[0].split('\t').count()));
    assert_eq!(stdout(&reductlab(&["table"])), text);

    let json = reductlab(&["table", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&json)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 42);
    assert!(v["rows"][0]["cells"].is_array());
}

#[test]
fn table_diff_against_fixture() {
    let ok = reductlab(&["table", "--diff-expected", FIXTURE]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));

    // mark row `a` as preserving `<`
    let text = fs::read_to_string(FIXTURE).unwrap();
    let edited: String = text
        .lines()
        .map(|l| {
            if l.starts_with("a\t") {
                let mut cells: Vec<&str> = l.split('\t').collect();
                cells[5] = "x";
                cells.join("\t")
            } else {
                l.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join("\n");
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("edited.tsv");
    fs::write(&path, edited).unwrap();
    let bad = reductlab(&["table", "--diff-expected", path.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("a / <"));
}

#[test]
fn lattice_listing_and_dot() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("l.dot");
    let o = reductlab(&["lattice", "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "atoms a b c d e f"));
    let dot = fs::read_to_string(dot).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("->"));
}

#[test]
fn orbit_listing() {
    let o = reductlab(&["orbits", "gh", "--arity", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().all(|l| l.starts_with("k=2 size=")));
    let sizes: usize = text
        .lines()
        .map(|l| l.split(": ").nth(1).unwrap().split(',').count())
        .sum();
    assert_eq!(sizes, 4);
    let oracle = reductlab(&["orbits", "gh", "--arity", "2", "--oracle"]);
    assert_eq!(stdout(&oracle), text);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(reductlab(&[]).status.code(), Some(2));
    assert_eq!(reductlab(&["orbits", "xyz"]).status.code(), Some(2));
    assert_eq!(
        reductlab(&["check", "--case", "C9:z9"]).status.code(),
        Some(2)
    );
    assert_eq!(
        reductlab(&["--witness-depth", "9", "check"]).status.code(),
        Some(2)
    );
    assert_eq!(
        reductlab(&["--max-arity", "3", "table"]).status.code(),
        Some(2)
    );
}

#[test]
fn check_single_case() {
    let o = reductlab(&["check", "--case", "C2:a2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("claimed d"));
    assert!(text.contains("switch"));

    let j = reductlab(&["check", "--case", "C2:a3", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&j)).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["claimed"], "cdghj");
    assert_eq!(v["minimal"][0], "cdghj");
}

#[test]
fn surrogate_search_reports_failure() {
    let o = reductlab(&["find-sd"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("no surrogate"));
}

#[test]
fn verify_all_sections() {
    let o = reductlab(&["verify-all", "--json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let sections = v["sections"].as_array().unwrap();
    let status = |name: &str| {
        sections
            .iter()
            .find(|s| s["name"] == name)
            .map(|s| s["status"].as_str().unwrap().to_string())
    };
    assert_eq!(status("table").as_deref(), Some("pass"));
    assert_eq!(status("sd-surrogate").as_deref(), Some("finding"));
    assert_eq!(status("constellations").as_deref(), Some("pass"));

    assert_eq!(
        reductlab(&["verify-all", "--strict"]).status.code(),
        Some(1)
    );
}

#[test]
fn verify_all_detects_a_broken_move_table() {
    let o = reductlab(&["verify-all", "--corrupt", "g"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("failed sections: table"));
}
