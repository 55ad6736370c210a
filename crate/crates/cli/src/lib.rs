//! Library side of the `boolglr` command: every subcommand writes to the
//! given streams and returns a [`CliError`] whose [`CliError::exit_code`]
//! the binary passes on.

pub mod args;

use std::fs;
use std::io::{self, BufRead, Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use boolglr::automaton::Automaton;
use boolglr::oracle::{self, OracleError};
use boolglr::trivalue::{words_up_to, TruthValue};
use boolglr::{parse_grammar, Grammar, GrammarError, ParseError, Recognizer};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

pub use args::{Cli, Command, DumpTarget, Engine, Format};

/// Command-line spelling of the empty word.
pub const EPS: &str = "%eps";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("writing output: {0}")]
    Output(#[from] io::Error),
    #[error("no grammar given; pass --grammar PATH")]
    MissingGrammar,
    #[error("{path}: {source}")]
    Grammar { path: PathBuf, source: GrammarError },
    #[error("word {word:?}: {reason}")]
    Word { word: String, reason: String },
    #[error("{0} word(s) where the engines disagree")]
    Mismatch(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Output(_) => 1,
            CliError::MissingGrammar | CliError::Grammar { .. } | CliError::Word { .. } => 2,
            CliError::Mismatch(_) => 3,
        }
    }
}

pub fn load_grammar(path: &Path) -> Result<Grammar, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_grammar(&text).map_err(|source| CliError::Grammar {
        path: path.to_path_buf(),
        source,
    })
}

/// `%eps` and the empty string both denote ε.
pub fn decode_word(arg: &str) -> &str {
    if arg == EPS {
        ""
    } else {
        arg
    }
}

pub fn show_word(w: &str) -> &str {
    if w.is_empty() {
        EPS
    } else {
        w
    }
}

pub fn glyphs(vs: &[TruthValue]) -> String {
    vs.iter().map(|v| v.glyph()).collect()
}

/// Runs a parsed command line.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let path = cli.grammar.as_deref().ok_or(CliError::MissingGrammar)?;
    let g = load_grammar(path)?;
    match &cli.command {
        Command::Check { words, input } => {
            let words = match input {
                Some(p) => read_words(fs::File::open(p), p)?,
                None if words.is_empty() => read_words(Ok(io::stdin()), Path::new("<stdin>"))?,
                None => words.iter().map(|w| decode_word(w).to_string()).collect(),
            };
            check(cli, &g, &words, out, err)
        }
        Command::Diff => diff(cli, &g, out, err),
        Command::Dump(target) => dump(cli, &g, target, out),
        Command::Bench { lengths, repeats } => {
            let report = bench(&g, lengths, cli.seed, (*repeats).max(1));
            write_bench(cli.format.unwrap_or(Format::Tsv), &report, out)
        }
    }
}

fn read_words<R: Read>(src: io::Result<R>, path: &Path) -> Result<Vec<String>, CliError> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let reader = io::BufReader::new(src.map_err(io_err)?);
    let mut words = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(io_err)?;
        words.push(decode_word(line.trim_end_matches('\r')).to_string());
    }
    Ok(words)
}

fn word_error(word: &str, e: impl ToString) -> CliError {
    CliError::Word {
        word: word.to_string(),
        reason: e.to_string(),
    }
}

/// Prefix verdicts from the fixpoint oracle.
pub fn oracle_verdicts(g: &Grammar, w: &str) -> Result<Vec<TruthValue>, OracleError> {
    oracle::classify_prefixes(g, w)
}

/// Prefix verdicts from the parser.
pub fn glr_verdicts(r: &Recognizer<'_>, w: &str) -> Result<Vec<TruthValue>, ParseError> {
    r.parse(w).map(|p| p.prefix_verdicts())
}

fn check(
    cli: &Cli,
    g: &Grammar,
    words: &[String],
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let r = Recognizer::new(g);
    let format = cli.format.unwrap_or(Format::Plain);
    if format == Format::Tsv {
        write!(out, "word\tverdict")?;
        if cli.prefixes {
            write!(out, "\tprefixes")?;
        }
        writeln!(out)?;
    }
    for w in words {
        let from_oracle = |err: &mut dyn Write| -> Result<Vec<TruthValue>, CliError> {
            if cli.trace {
                let m = oracle::entailment_model(g, w, true).map_err(|e| word_error(w, e))?;
                for line in oracle::render_trace(g, &m) {
                    writeln!(err, "{}\t{line}", show_word(w))?;
                }
            }
            oracle_verdicts(g, w).map_err(|e| word_error(w, e))
        };
        let from_glr = || glr_verdicts(&r, w).map_err(|e| word_error(w, e));
        let verdicts = match cli.engine {
            Engine::Oracle => from_oracle(err)?,
            Engine::Glr => from_glr()?,
            Engine::Both => {
                let (a, b) = (from_oracle(err)?, from_glr()?);
                if a != b {
                    writeln!(
                        err,
                        "{}\toracle {}\tglr {}",
                        show_word(w),
                        glyphs(&a),
                        glyphs(&b)
                    )?;
                    return Err(CliError::Mismatch(1));
                }
                a
            }
        };
        let verdict = *verdicts.last().unwrap();
        match format {
            Format::JsonLines => {
                let mut obj = json!({ "word": w, "verdict": verdict.glyph().to_string() });
                if cli.prefixes {
                    obj["prefixes"] = json!(verdicts
                        .iter()
                        .map(|v| v.glyph().to_string())
                        .collect::<Vec<_>>());
                }
                writeln!(out, "{obj}")?;
            }
            _ => {
                write!(out, "{}\t{}", show_word(w), verdict)?;
                if cli.prefixes {
                    write!(out, "\t{}", glyphs(&verdicts))?;
                }
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

/// A word on which the engines disagree, with both prefix verdict vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub word: String,
    pub oracle: Vec<TruthValue>,
    pub glr: Result<Vec<TruthValue>, String>,
}

/// Runs the oracle and `glr` on every word, in parallel, and returns the
/// disagreements in word order.
pub fn compare_engines<F>(g: &Grammar, words: &[String], glr: F) -> Result<Vec<Mismatch>, CliError>
where
    F: Fn(&str) -> Result<Vec<TruthValue>, String> + Sync,
{
    let results: Vec<Result<Option<Mismatch>, CliError>> = words
        .par_iter()
        .map(|w| {
            let expected = oracle_verdicts(g, w).map_err(|e| word_error(w, e))?;
            let got = glr(w);
            Ok((got.as_ref() != Ok(&expected)).then(|| Mismatch {
                word: w.clone(),
                oracle: expected,
                glr: got,
            }))
        })
        .collect();
    let mut out = Vec::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

pub fn all_words(g: &Grammar, max_len: usize) -> Vec<String> {
    words_up_to(g.alphabet(), max_len).collect()
}

fn diff(cli: &Cli, g: &Grammar, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let words = all_words(g, cli.max_len as usize);
    let r = Recognizer::new(g);
    let mismatches = compare_engines(g, &words, |w| {
        glr_verdicts(&r, w).map_err(|e| e.to_string())
    })?;
    report_diff(
        cli.format.unwrap_or(Format::Plain),
        words.len(),
        &mismatches,
        out,
    )?;
    if mismatches.is_empty() {
        Ok(())
    } else {
        writeln!(err, "{} mismatches", mismatches.len())?;
        Err(CliError::Mismatch(mismatches.len()))
    }
}

pub fn report_diff(
    format: Format,
    checked: usize,
    mismatches: &[Mismatch],
    out: &mut dyn Write,
) -> io::Result<()> {
    let glr_text = |m: &Mismatch| match &m.glr {
        Ok(v) => glyphs(v),
        Err(e) => format!("error: {e}"),
    };
    match format {
        Format::JsonLines => {
            for m in mismatches {
                writeln!(
                    out,
                    "{}",
                    json!({ "word": m.word, "oracle": glyphs(&m.oracle), "glr": glr_text(m) })
                )?;
            }
            writeln!(
                out,
                "{}",
                json!({ "checked": checked, "mismatches": mismatches.len() })
            )
        }
        _ => {
            for m in mismatches {
                writeln!(
                    out,
                    "{}\toracle {}\tglr {}",
                    show_word(&m.word),
                    glyphs(&m.oracle),
                    glr_text(m)
                )?;
            }
            writeln!(
                out,
                "checked {checked} words, {} mismatches",
                mismatches.len()
            )
        }
    }
}

fn dump(cli: &Cli, g: &Grammar, target: &DumpTarget, out: &mut dyn Write) -> Result<(), CliError> {
    match target {
        DumpTarget::Nullability => {
            let m = boolglr::compute_nullability(g);
            match cli.format.unwrap_or(Format::Plain) {
                Format::JsonLines => {
                    for v in g.var_ids() {
                        writeln!(
                            out,
                            "{}",
                            json!({ "variable": g.var_name(v), "value": m.var(v).glyph().to_string() })
                        )?;
                    }
                }
                _ => out.write_all(m.render(g).as_bytes())?,
            }
        }
        DumpTarget::Automaton => {
            let r = Recognizer::new(g);
            match cli.format.unwrap_or(Format::Dot) {
                Format::Dot => out.write_all(r.automaton().to_dot(g).as_bytes())?,
                _ => out.write_all(render_automaton(g, r.automaton()).as_bytes())?,
            }
        }
        DumpTarget::Gss { word } => {
            let w = decode_word(word);
            let r = Recognizer::new(g);
            let (res, gss) = r.parse_with_stack(w).map_err(|e| word_error(w, e))?;
            match cli.format.unwrap_or(Format::Dot) {
                Format::Dot => out.write_all(gss.to_dot(g).as_bytes())?,
                _ => {
                    for e in gss.edges() {
                        let (s, t) = (gss.node(e.source), gss.node(e.target));
                        writeln!(
                            out,
                            "(s{}, {})\t{}\t(s{}, {})",
                            s.state.0,
                            s.generation,
                            e.label.render(g),
                            t.state.0,
                            t.generation
                        )?;
                    }
                    writeln!(out, "verdicts\t{}", glyphs(&res.prefix_verdicts()))?;
                }
            }
        }
    }
    Ok(())
}

/// One block per state: items (kernel items flagged `K`) and transitions.
pub fn render_automaton(g: &Grammar, a: &Automaton) -> String {
    let mut s = String::new();
    for st in &a.states {
        s.push_str(&format!("state {}\n", st.id.0));
        for it in &st.items {
            let flag = if it.kernel { "K" } else { " " };
            s.push_str(&format!("  {flag} {}\n", it.item.render(g)));
        }
        for (label, t) in a.edges_from(st.id) {
            s.push_str(&format!("  {} -> {}\n", label.render(g), t.0));
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub length: usize,
    pub nodes: usize,
    pub edges: usize,
    pub nanos: u128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub edge_slope: Option<f64>,
    pub time_slope: Option<f64>,
}

/// Least-squares slope of `ln y` over `ln x`; `None` below two points.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .iter()
        .map(|&(x, y)| (x.ln(), y.max(1.0).ln()))
        .unzip();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    (var > 0.0).then(|| cov / var)
}

/// Parses one uniformly random word per length, sequentially so timings
/// do not compete.
pub fn bench(g: &Grammar, lengths: &[usize], seed: u64, repeats: usize) -> BenchReport {
    let r = Recognizer::new(g);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for &n in lengths {
        let w: String = (0..n)
            .map(|_| *g.alphabet().choose(&mut rng).unwrap_or(&' '))
            .collect();
        let mut best = u128::MAX;
        let mut stats = None;
        for _ in 0..repeats.max(1) {
            let t = Instant::now();
            let res = r.parse(&w);
            best = best.min(t.elapsed().as_nanos());
            stats = res.ok().map(|p| p.stats);
        }
        let stats = stats.unwrap_or_default();
        rows.push(BenchRow {
            length: n,
            nodes: stats.nodes,
            edges: stats.edges,
            nanos: best,
        });
    }
    let pts = |f: &dyn Fn(&BenchRow) -> f64| -> Vec<(f64, f64)> {
        rows.iter().map(|r| (r.length as f64, f(r))).collect()
    };
    let edge_slope = loglog_slope(&pts(&|r| r.edges as f64));
    let time_slope = loglog_slope(&pts(&|r| r.nanos as f64));
    BenchReport {
        rows,
        edge_slope,
        time_slope,
    }
}

pub fn write_bench(
    format: Format,
    report: &BenchReport,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    if format == Format::JsonLines {
        for r in &report.rows {
            writeln!(
                out,
                "{}",
                json!({ "length": r.length, "nodes": r.nodes, "edges": r.edges, "nanos": r.nanos as u64 })
            )?;
        }
        if let (Some(e), Some(t)) = (report.edge_slope, report.time_slope) {
            writeln!(out, "{}", json!({ "edge_slope": e, "time_slope": t }))?;
        }
        return Ok(());
    }
    writeln!(out, "length\tnodes\tedges\tnanos")?;
    for r in &report.rows {
        writeln!(out, "{}\t{}\t{}\t{}", r.length, r.nodes, r.edges, r.nanos)?;
    }
    if let (Some(e), Some(t)) = (report.edge_slope, report.time_slope) {
        writeln!(out, "# slope edges\t{e:.3}")?;
        writeln!(out, "# slope nanos\t{t:.3}")?;
    }
    Ok(())
}
