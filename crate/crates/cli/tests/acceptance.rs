//! Acceptance run: every criterion prints one PASS/FAIL line, and the test
//! fails if any criterion does.

use std::sync::Mutex;
use std::time::{Duration, Instant};

use boolglr::generate::{random_boolean_grammar, random_cfg, GenConfig};
use boolglr::oracle::{entailment_model, model_violations};
use boolglr::reference::Cfg;
use boolglr::trivalue::{conj, disj, neg, words_up_to, TruthValue};
use boolglr::{corpus, parse_grammar, Grammar, ParseError, Recognizer};
use boolglr_cli::{bench, compare_engines, glyphs};
use rayon::prelude::*;

/// Records both-sign yields and atom tables over their size bound, across
/// every engine run of the other criteria.
#[derive(Default)]
struct Consistency {
    violations: Mutex<Vec<String>>,
    parses: Mutex<usize>,
    models: Mutex<usize>,
}

impl Consistency {
    fn flag(&self, msg: String) {
        self.violations.lock().unwrap().push(msg);
    }

    fn glr(&self, r: &Recognizer<'_>, w: &str) -> Vec<TruthValue> {
        *self.parses.lock().unwrap() += 1;
        match r.parse(w) {
            Ok(res) => {
                for j in 0..=res.len() {
                    if res.yielded(j).len() > 1 {
                        self.flag(format!("{w:?}: both signs at {j}"));
                    }
                }
                res.prefix_verdicts()
            }
            Err(ParseError::ContradictoryYield(j)) => {
                self.flag(format!("{w:?}: both signs at {j}"));
                Vec::new()
            }
            Err(e) => {
                self.flag(format!("{w:?}: {e}"));
                Vec::new()
            }
        }
    }

    fn oracle(&self, g: &Grammar, w: &str) -> Vec<TruthValue> {
        *self.models.lock().unwrap() += 1;
        let m = entailment_model(g, w, false).unwrap();
        let n = w.chars().count();
        let bound = (1 + n * (n + 1) / 2) * g.symbol_count();
        if m.table.atom_count() > bound {
            self.flag(format!("{w:?}: {} atoms > {bound}", m.table.atom_count()));
        }
        (0..=n).map(|j| m.value(g.start(), 0, j)).collect()
    }

    fn final_verdicts(
        &self,
        g: &Grammar,
        r: &Recognizer<'_>,
        w: &str,
    ) -> (TruthValue, Option<TruthValue>) {
        (
            *self.oracle(g, w).last().unwrap(),
            self.glr(r, w).last().copied(),
        )
    }
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> String {
    format!("{:.2}s", d.as_secs_f64())
}

fn kleene_tables() -> Outcome {
    use TruthValue::*;
    // rows and columns in the order ⊤, ∼, ⊥
    let order = [True, Unknown, False];
    let neg_row = "-~+";
    let conj_rows = ["+~-", "~~-", "---"];
    let disj_rows = ["+++", "+~~", "+~-"];
    let start = Instant::now();
    let mut ok = 0;
    let mut bad = Vec::new();
    let glyph = |s: &str, k: usize| TruthValue::from_glyph(s.chars().nth(k).unwrap()).unwrap();
    for (i, &a) in order.iter().enumerate() {
        let mut check = |name: &str, got: TruthValue, want: TruthValue| {
            if got == want {
                ok += 1;
            } else {
                bad.push(format!("{name}: {got} != {want}"));
            }
        };
        check(&format!("¬{a}"), neg(a), glyph(neg_row, i));
        for (k, &b) in order.iter().enumerate() {
            check(&format!("{a}∧{b}"), conj([a, b]), glyph(conj_rows[i], k));
            check(&format!("{a}∨{b}"), disj([a, b]), glyph(disj_rows[i], k));
        }
    }
    let elapsed = start.elapsed();
    outcome(
        ok == 21 && elapsed < Duration::from_millis(1),
        format!(
            "{ok}/21 entries match, {:.3} ms {}",
            elapsed.as_secs_f64() * 1e3,
            bad.join(" ")
        ),
    )
}

fn is_square(w: &str) -> bool {
    let n = w.len();
    n.is_multiple_of(2) && w[..n / 2] == w[n / 2..]
}

fn ww_up_to_8(c: &Consistency) -> Outcome {
    let g = corpus::ww();
    let r = Recognizer::new(&g);
    let start = Instant::now();
    let words: Vec<String> = words_up_to(g.alphabet(), 8).collect();
    let wrong: Vec<String> = words
        .par_iter()
        .filter_map(|w| {
            let want: TruthValue = is_square(w).into();
            let (o, p) = c.final_verdicts(&g, &r, w);
            (o != want || p != Some(want)).then(|| format!("{w:?}: oracle {o} parser {p:?}"))
        })
        .collect();
    let elapsed = start.elapsed();
    outcome(
        wrong.is_empty() && elapsed < Duration::from_secs(30),
        format!(
            "{} words, {} wrong, {}",
            words.len(),
            wrong.len(),
            secs(elapsed)
        ),
    )
}

fn footnote(c: &Consistency) -> Outcome {
    let g = corpus::footnote();
    let r = Recognizer::new(&g);
    let got: Vec<String> = ["a", "b", "ab"]
        .iter()
        .map(|w| {
            let (o, p) = c.final_verdicts(&g, &r, w);
            format!("{o}{}", p.map_or('?', |v| v.glyph()))
        })
        .collect();
    outcome(
        got == ["--", "++", "~~"],
        format!("a b ab -> oracle/parser {}", got.join(" ")),
    )
}

fn all_unknown(c: &Consistency, g: &Grammar) -> Outcome {
    let r = Recognizer::new(g);
    let words: Vec<String> = words_up_to(g.alphabet(), 6).collect();
    let determinate = words
        .iter()
        .filter(|w| c.final_verdicts(g, &r, w) != (TruthValue::Unknown, Some(TruthValue::Unknown)))
        .count();
    outcome(
        determinate == 0,
        format!("{} words, {determinate} not ~ on both engines", words.len()),
    )
}

fn is_anbncn(w: &str) -> bool {
    let n = w.len() / 3;
    w.len().is_multiple_of(3)
        && *w == format!("{}{}{}", "a".repeat(n), "b".repeat(n), "c".repeat(n))
}

fn equivalence_corpus() -> Vec<(String, Grammar)> {
    let mut out: Vec<(String, Grammar)> = corpus::ALL
        .iter()
        .map(|(n, s)| (n.to_string(), parse_grammar(s).unwrap()))
        .collect();
    for seed in [101, 202, 303] {
        out.push((
            format!("random-{seed}"),
            random_boolean_grammar(seed, GenConfig::default()),
        ));
    }
    out
}

fn oracle_equivalence(c: &Consistency) -> Outcome {
    let start = Instant::now();
    let mut total = 0;
    let mut notes = Vec::new();
    let mut pass = true;
    for (name, g) in equivalence_corpus() {
        let r = Recognizer::new(&g);
        let words: Vec<String> = words_up_to(g.alphabet(), 6).collect();
        total += words.len();
        for w in &words {
            c.oracle(&g, w);
        }
        let mismatches = compare_engines(&g, &words, |w| Ok(c.glr(&r, w))).unwrap();
        if !mismatches.is_empty() {
            pass = false;
            let m = &mismatches[0];
            notes.push(format!(
                "{name}: {} mismatches, first {:?} oracle {}",
                mismatches.len(),
                m.word,
                glyphs(&m.oracle)
            ));
        }
        if name == "anbncn" {
            let off = words
                .iter()
                .filter(|w| c.glr(&r, w).last() != Some(&is_anbncn(w).into()))
                .count();
            if off > 0 {
                pass = false;
                notes.push(format!("anbncn: {off} words disagree with the predicate"));
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        pass && elapsed < Duration::from_secs(300),
        format!(
            "10 grammars, {total} words, all prefixes compared, {} {}",
            secs(elapsed),
            notes.join("; ")
        ),
    )
}

fn fixpoint_properties() -> Outcome {
    let mut runs = 0;
    let mut bad = Vec::new();
    for (name, g) in equivalence_corpus() {
        for w in words_up_to(g.alphabet(), 6) {
            runs += 1;
            let m = entailment_model(&g, &w, true).unwrap();
            let trace = m.trace.as_ref().unwrap();
            let monotone = trace.iterations.windows(2).all(|p| p[0].leq(&p[1]));
            let within = trace.converged && m.sweeps <= 2 * m.table.atom_count() + 2;
            let model = model_violations(&g, &m).is_empty();
            if !(monotone && within && model) {
                bad.push(format!("{name} {w:?}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{runs} oracle runs, {} violations {}",
            bad.len(),
            bad.join(" ")
        ),
    )
}

fn context_free_agreement(c: &Consistency) -> Outcome {
    let mut words_checked = 0;
    let mut bad = Vec::new();
    for seed in 0..50u64 {
        let g = random_cfg(1000 + seed, GenConfig::default());
        let cfg = Cfg::from_grammar(&g).unwrap();
        let lang = &cfg.language_up_to(6)[g.start().0 as usize];
        let r = Recognizer::new(&g);
        let words: Vec<String> = words_up_to(g.alphabet(), 6).collect();
        words_checked += words.len();
        let wrong = words
            .par_iter()
            .filter(|w| {
                let yields = c.glr(&r, w);
                yields.len() != w.len() + 1
                    || (0..=w.len())
                        .any(|j| (yields[j] == TruthValue::True) != lang.contains(&w[..j]))
            })
            .count();
        if wrong > 0 {
            bad.push(format!("seed {}: {wrong} words", 1000 + seed));
        }
    }
    outcome(
        bad.is_empty(),
        format!("50 grammars, {words_checked} words {}", bad.join(" ")),
    )
}

fn asymptotics() -> Outcome {
    let g = corpus::ww();
    let start = Instant::now();
    let report = bench(
        &g,
        &[8, 16, 32, 64, 128],
        boolglr_cli::args::DEFAULT_SEED,
        2,
    );
    let elapsed = start.elapsed();
    let (e, t) = (report.edge_slope.unwrap(), report.time_slope.unwrap());
    outcome(
        e <= 2.3 && t <= 3.3 && elapsed < Duration::from_secs(120),
        format!("edge slope {e:.3}, time slope {t:.3}, {}", secs(elapsed)),
    )
}

#[test]
fn acceptance() {
    let c = Consistency::default();
    let mut results: Vec<(u32, &str, Outcome)> = vec![
        (1, "kleene tables", kleene_tables()),
        (2, "ww up to length 8", ww_up_to_8(&c)),
        (3, "footnote verdicts", footnote(&c)),
        (
            4,
            "S -> !S indeterminate",
            all_unknown(&c, &corpus::contradictory()),
        ),
        (
            5,
            "S -> S indeterminate",
            all_unknown(&c, &corpus::underdetermined()),
        ),
        (6, "oracle equivalence", oracle_equivalence(&c)),
        (7, "fixpoint properties", fixpoint_properties()),
        (8, "context-free agreement", context_free_agreement(&c)),
        (9, "asymptotics", asymptotics()),
    ];
    let violations = c.violations.lock().unwrap().clone();
    let detail = format!(
        "{} parses, {} oracle runs, {} violations {}",
        c.parses.lock().unwrap(),
        c.models.lock().unwrap(),
        violations.len(),
        violations
            .iter()
            .take(5)
            .cloned()
            .collect::<Vec<_>>()
            .join(" ")
    );
    results.push((10, "consistency", outcome(violations.is_empty(), detail)));

    for (n, name, o) in &results {
        println!(
            "{} {n:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail.trim_end()
        );
    }
    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
