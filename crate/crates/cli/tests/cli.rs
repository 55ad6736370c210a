use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use boolglr::trivalue::TruthValue;
use boolglr::{corpus, Recognizer};
use boolglr_cli::{all_words, bench, compare_engines, glr_verdicts, loglog_slope, CliError};

fn grammar(name: &str) -> String {
    let p: PathBuf = [
        env!("CARGO_MANIFEST_DIR"),
        "..",
        "..",
        "grammars",
        &format!("{name}.bg"),
    ]
    .iter()
    .collect();
    p.to_string_lossy().into_owned()
}

fn boolglr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boolglr"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn check_ww_with_oracle() {
    let o = boolglr(&[
        "check",
        "--grammar",
        &grammar("ww"),
        "--engine",
        "oracle",
        "abab",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "abab\t+\n");
}

#[test]
fn check_footnote_on_both_engines() {
    let o = boolglr(&[
        "check",
        "--grammar",
        &grammar("footnote"),
        "--engine",
        "both",
        "a",
        "b",
        "ab",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "a\t-\nb\t+\nab\t~\n");
}

#[test]
fn empty_word_spellings() {
    for w in ["%eps", ""] {
        let o = boolglr(&["check", "--grammar", &grammar("ww"), w]);
        assert_eq!(stdout(&o), "%eps\t+\n");
    }
}

#[test]
fn prefixes_and_json_lines() {
    let o = boolglr(&[
        "check",
        "--grammar",
        &grammar("footnote"),
        "--prefixes",
        "--format",
        "json-lines",
        "ab",
    ]);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["word"], "ab");
    assert_eq!(v["verdict"], "~");
    assert_eq!(v["prefixes"], serde_json::json!(["-", "-", "~"]));

    let o = boolglr(&[
        "check",
        "--grammar",
        &grammar("footnote"),
        "--prefixes",
        "--format",
        "tsv",
        "b",
    ]);
    assert_eq!(stdout(&o), "word\tverdict\tprefixes\nb\t+\t-+\n");
}

#[test]
fn words_from_file_and_stdin() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "abab\n%eps\nba").unwrap();
    let path = f.path().to_string_lossy().into_owned();
    let o = boolglr(&["check", "--grammar", &grammar("ww"), "--input", &path]);
    assert_eq!(stdout(&o), "abab\t+\n%eps\t+\nba\t-\n");

    let mut child = Command::new(env!("CARGO_BIN_EXE_boolglr"))
        .args(["check", "--grammar", &grammar("ww")])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"aa\nab\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(stdout(&o), "aa\t+\nab\t-\n");
}

#[test]
fn exit_codes() {
    assert_eq!(
        boolglr(&["check", "--grammar", "/no/such/file.bg", "a"])
            .status
            .code(),
        Some(1)
    );
    let mut bad = tempfile::NamedTempFile::new().unwrap();
    write!(bad, "S -> T ;").unwrap();
    let o = boolglr(&["check", "--grammar", &bad.path().to_string_lossy(), "a"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("undefined variable T"));
    assert_eq!(boolglr(&["check", "a"]).status.code(), Some(2));
    assert_eq!(
        boolglr(&["check", "--grammar", &grammar("ww"), "abc"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        boolglr(&["diff", "--grammar", &grammar("ww"), "--max-len", "11"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn diff_runs_clean() {
    for name in ["ww", "contradictory"] {
        let o = boolglr(&["diff", "--grammar", &grammar(name), "--max-len", "6"]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert_eq!(stdout(&o), "checked 127 words, 0 mismatches\n");
    }
}

#[test]
fn corrupted_engine_is_caught() {
    let g = corpus::ww();
    let r = Recognizer::new(&g);
    let words = all_words(&g, 4);
    let flip_last = |w: &str| {
        let mut v = glr_verdicts(&r, w).map_err(|e| e.to_string())?;
        if w.len() == 3 {
            *v.last_mut().unwrap() = TruthValue::Unknown;
        }
        Ok(v)
    };
    let mismatches = compare_engines(&g, &words, flip_last).unwrap();
    assert_eq!(mismatches.len(), 8);
    assert_eq!(CliError::Mismatch(mismatches.len()).exit_code(), 3);
}

#[test]
fn dumps() {
    let o = boolglr(&["dump", "nullability", "--grammar", &grammar("footnote")]);
    assert_eq!(stdout(&o), "A\t+\nS\t-\n");

    let o = boolglr(&[
        "dump",
        "automaton",
        "--grammar",
        &grammar("ww"),
        "--format",
        "dot",
    ]);
    let dot = stdout(&o);
    assert!(dot.starts_with("digraph automaton {"));
    assert_eq!(dot.matches('{').count(), dot.matches('}').count());
    assert!(dot.trim_end().ends_with('}'));

    let o = boolglr(&[
        "dump",
        "automaton",
        "--grammar",
        &grammar("footnote"),
        "--format",
        "plain",
    ]);
    assert!(stdout(&o).starts_with("state 0\n"));

    let o = boolglr(&["dump", "gss", "ab", "--grammar", &grammar("footnote")]);
    let dot = stdout(&o);
    assert_eq!(dot.matches("rank=same").count(), 3);
    for j in 0..3 {
        assert!(dot.contains(&format!("subgraph gen{j} ")));
    }
}

#[test]
fn bench_output() {
    let o = boolglr(&[
        "bench",
        "--grammar",
        &grammar("ww"),
        "--lengths",
        "8,16,32",
        "--repeats",
        "1",
    ]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "length\tnodes\tedges\tnanos");
    assert_eq!(lines.len(), 6);
    assert!(lines[4].starts_with("# slope edges\t"));

    let o = boolglr(&["bench", "--grammar", &grammar("ww"), "--lengths", "8"]);
    assert_eq!(stdout(&o).lines().count(), 2);
    assert!(!stdout(&o).contains("slope"));
}

#[test]
fn output_is_deterministic() {
    let g = corpus::ww();
    let a = bench(&g, &[8, 16], 9, 1);
    let b = bench(&g, &[8, 16], 9, 1);
    let counts = |r: &boolglr_cli::BenchReport| {
        r.rows
            .iter()
            .map(|r| (r.nodes, r.edges))
            .collect::<Vec<_>>()
    };
    assert_eq!(counts(&a), counts(&b));
    let args = [
        "diff",
        "--grammar",
        &grammar("not_anbn"),
        "--max-len",
        "5",
        "--format",
        "json-lines",
    ];
    assert_eq!(stdout(&boolglr(&args)), stdout(&boolglr(&args)));
}

#[test]
fn slope_fit() {
    let pts: Vec<(f64, f64)> = [2.0f64, 4.0, 8.0]
        .iter()
        .map(|&x| (x, 3.0 * x * x))
        .collect();
    assert!((loglog_slope(&pts).unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(loglog_slope(&pts[..1]), None);
}
