//! Reference semantics: the entailment model of the logic rules a grammar
//! induces on one word, computed by iterating Φ from the all-unknown
//! valuation.
//!
//! Only atoms over substrings of the input matter, since every rule body for
//! a word mentions atoms over that word's substrings alone. The table
//! therefore holds `|Γ|` atoms per distinct substring (including ε).

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::grammar::{ExprId, Grammar, NodeKind, VarId};
use crate::trivalue::{conj, disj, leq_certainty, neg, TruthValue};

/// A predicate symbol of the induced logic program: a member of Γ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Epsilon,
    Terminal(char),
    Variable(VarId),
}

/// `P(c)` with `P` a grammar symbol and `c` a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub symbol: Symbol,
    pub word: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("symbol {0:?} is not in the grammar alphabet")]
    ForeignSymbol(char),
    #[error("atom {0} is outside the valuation domain")]
    UnknownAtom(String),
    #[error("valuation for {atom} moved from {from} to {to}, against the certainty order")]
    NonMonotone {
        atom: String,
        from: TruthValue,
        to: TruthValue,
    },
    #[error("no fixpoint after {0} sweeps")]
    NoConvergence(usize),
}

/// The atoms relevant to one word: every symbol of Γ applied to every
/// distinct substring.
#[derive(Debug, Clone)]
pub struct AtomTable {
    word: Vec<char>,
    substrings: Vec<String>,
    index: HashMap<String, usize>,
    /// `extent[i][j - i]` is the substring id of `word[i..j]`.
    extent: Vec<Vec<usize>>,
    /// One representative extent per substring id.
    witness: Vec<(usize, usize)>,
    symbols: Vec<Symbol>,
}

impl AtomTable {
    pub fn new(g: &Grammar, word: &str) -> Result<Self, OracleError> {
        let chars: Vec<char> = word.chars().collect();
        if let Some(&c) = chars.iter().find(|c| !g.alphabet().contains(c)) {
            return Err(OracleError::ForeignSymbol(c));
        }
        Ok(Self::build(g, chars))
    }

    fn build(g: &Grammar, word: Vec<char>) -> Self {
        let n = word.len();
        let mut substrings = Vec::new();
        let mut index = HashMap::new();
        let mut witness = Vec::new();
        let mut extent = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let mut row = Vec::with_capacity(n - i + 1);
            for j in i..=n {
                let s: String = word[i..j].iter().collect();
                let id = *index.entry(s.clone()).or_insert_with(|| {
                    substrings.push(s);
                    witness.push((i, j));
                    substrings.len() - 1
                });
                row.push(id);
            }
            extent.push(row);
        }
        let mut symbols = vec![Symbol::Epsilon];
        symbols.extend(g.alphabet().iter().map(|&c| Symbol::Terminal(c)));
        symbols.extend(g.var_ids().map(Symbol::Variable));
        AtomTable {
            word,
            substrings,
            index,
            extent,
            witness,
            symbols,
        }
    }

    pub fn word(&self) -> String {
        self.word.iter().collect()
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn substrings(&self) -> &[String] {
        &self.substrings
    }

    pub fn substring_id(&self, i: usize, j: usize) -> usize {
        self.extent[i][j - i]
    }

    pub fn substring_index(&self, s: &str) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Number of atoms: symbols × distinct substrings.
    pub fn atom_count(&self) -> usize {
        self.symbols.len() * self.substrings.len()
    }

    /// `(1 + |w|(|w|+1)/2) · |Γ|`.
    pub fn atom_bound(&self) -> usize {
        let n = self.word.len();
        (1 + n * (n + 1) / 2) * self.symbols.len()
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.symbols.iter().flat_map(move |&symbol| {
            self.substrings.iter().map(move |w| Atom {
                symbol,
                word: w.clone(),
            })
        })
    }
}

/// Truth values of the variable atoms over one table. Terminal and ε atoms
/// are two-valued and fixed, so they are computed rather than stored.
#[derive(Clone, PartialEq, Eq)]
pub struct Valuation {
    subs: usize,
    values: Vec<TruthValue>,
}

impl Valuation {
    /// `I_⊥`: every variable atom unknown.
    pub fn null(g: &Grammar, table: &AtomTable) -> Self {
        let subs = table.substrings.len();
        Valuation {
            subs,
            values: vec![TruthValue::Unknown; subs * g.variables().len()],
        }
    }

    pub fn var(&self, v: VarId, sub: usize) -> TruthValue {
        self.values[v.0 as usize * self.subs + sub]
    }

    fn set_var(&mut self, v: VarId, sub: usize, t: TruthValue) {
        self.values[v.0 as usize * self.subs + sub] = t;
    }

    /// Value of any atom of the table.
    pub fn get(&self, table: &AtomTable, atom: &Atom) -> Result<TruthValue, OracleError> {
        let sub = table
            .substring_index(&atom.word)
            .ok_or_else(|| OracleError::UnknownAtom(format!("{atom:?}")))?;
        Ok(match atom.symbol {
            Symbol::Epsilon => atom.word.is_empty().into(),
            Symbol::Terminal(c) => {
                let mut it = atom.word.chars();
                (it.next() == Some(c) && it.next().is_none()).into()
            }
            Symbol::Variable(v) => {
                if v.0 as usize * self.subs >= self.values.len() {
                    return Err(OracleError::UnknownAtom(format!("{atom:?}")));
                }
                self.var(v, sub)
            }
        })
    }

    /// Pointwise certainty order `self ≼ other`.
    pub fn leq(&self, other: &Valuation) -> bool {
        self.values.len() == other.values.len()
            && self
                .values
                .iter()
                .zip(&other.values)
                .all(|(&a, &b)| leq_certainty(a, b))
    }
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.values.iter().map(|v| v.glyph()).collect();
        write!(f, "Valuation({s})")
    }
}

/// The sequence `I_0, I_1, …` of one fixpoint computation.
#[derive(Debug, Clone, Default)]
pub struct FixpointTrace {
    pub iterations: Vec<Valuation>,
    pub converged: bool,
}

/// Result of one oracle run together with the numbers the invariants talk about.
#[derive(Debug, Clone)]
pub struct Model {
    pub table: AtomTable,
    pub valuation: Valuation,
    /// Number of Φ applications until the valuation stopped changing.
    pub sweeps: usize,
    pub trace: Option<FixpointTrace>,
}

impl Model {
    /// Value of `X(w[i..j])`.
    pub fn value(&self, v: VarId, i: usize, j: usize) -> TruthValue {
        self.valuation.var(v, self.table.substring_id(i, j))
    }

    /// Value of `X(s)` for a substring `s` of the word.
    pub fn value_of(&self, v: VarId, s: &str) -> Option<TruthValue> {
        self.table
            .substring_index(s)
            .map(|sub| self.valuation.var(v, sub))
    }
}

/// Evaluates `ρ(e, w[i..j])` under a valuation. Concatenations are
/// evaluated by splitting off one part at a time, memoized per
/// (node, parts consumed, extents) for the lifetime of the evaluator.
pub struct BodyEvaluator<'a> {
    g: &'a Grammar,
    table: &'a AtomTable,
    val: &'a Valuation,
    memo: HashMap<(ExprId, usize, usize, usize), TruthValue>,
}

impl<'a> BodyEvaluator<'a> {
    pub fn new(g: &'a Grammar, table: &'a AtomTable, val: &'a Valuation) -> Self {
        BodyEvaluator {
            g,
            table,
            val,
            memo: HashMap::new(),
        }
    }

    pub fn eval(&mut self, e: ExprId, i: usize, j: usize) -> TruthValue {
        let w = &self.table.word;
        match self.g.kind(e) {
            NodeKind::Epsilon => (i == j).into(),
            NodeKind::Terminal(c) => (j == i + 1 && w[i] == *c).into(),
            NodeKind::Variable(v) => self.val.var(*v, self.table.substring_id(i, j)),
            NodeKind::Negation(c) => neg(self.eval(*c, i, j)),
            NodeKind::Disjunction(cs) => {
                let cs = cs.clone();
                let mut acc = TruthValue::False;
                for c in cs {
                    acc = disj([acc, self.eval(c, i, j)]);
                    if acc == TruthValue::True {
                        break;
                    }
                }
                acc
            }
            NodeKind::Conjunction(cs) => {
                let cs = cs.clone();
                let mut acc = TruthValue::True;
                for c in cs {
                    acc = conj([acc, self.eval(c, i, j)]);
                    if acc == TruthValue::False {
                        break;
                    }
                }
                acc
            }
            NodeKind::Concatenation(_) => self.suffix(e, 0, i, j),
        }
    }

    /// Value of the concatenation of parts `from..` of `cat` over `w[i..j]`.
    fn suffix(&mut self, cat: ExprId, from: usize, i: usize, j: usize) -> TruthValue {
        let parts = self.g.kind(cat).children();
        if from + 1 == parts.len() {
            return self.eval(parts[from], i, j);
        }
        if let Some(&v) = self.memo.get(&(cat, from, i, j)) {
            return v;
        }
        let head = parts[from];
        let mut acc = TruthValue::False;
        for k in i..=j {
            let left = self.eval(head, i, k);
            if left == TruthValue::False {
                continue;
            }
            acc = disj([acc, conj([left, self.suffix(cat, from + 1, k, j)])]);
            if acc == TruthValue::True {
                break;
            }
        }
        self.memo.insert((cat, from, i, j), acc);
        acc
    }
}

/// `ρ(e, w)` for the whole word of the table.
pub fn eval_body(
    g: &Grammar,
    table: &AtomTable,
    e: ExprId,
    val: &Valuation,
) -> Result<TruthValue, OracleError> {
    if val.values.len() != table.substrings.len() * g.variables().len() {
        return Err(OracleError::UnknownAtom(
            "valuation built for another table".into(),
        ));
    }
    Ok(BodyEvaluator::new(g, table, val).eval(e, 0, table.len()))
}

/// One synchronous Φ sweep: every variable atom takes the value of its
/// rule body under `val`.
pub fn step_phi(g: &Grammar, table: &AtomTable, val: &Valuation) -> Valuation {
    let mut next = val.clone();
    let mut ev = BodyEvaluator::new(g, table, val);
    for v in g.var_ids() {
        let body = g.body(v);
        for (sub, &(i, j)) in table.witness.iter().enumerate() {
            next.set_var(v, sub, ev.eval(body, i, j));
        }
    }
    next
}

/// Iterates Φ from `I_⊥` to its least fixpoint. Every sweep is checked
/// against the certainty order, and more than `2·|atoms| + 2` sweeps is
/// reported as a defect.
pub fn entailment_model(g: &Grammar, word: &str, keep_trace: bool) -> Result<Model, OracleError> {
    let table = AtomTable::new(g, word)?;
    let bound = 2 * table.atom_count() + 2;
    let mut val = Valuation::null(g, &table);
    let mut trace = keep_trace.then(|| FixpointTrace {
        iterations: vec![val.clone()],
        converged: false,
    });
    let mut sweeps = 0;
    loop {
        if sweeps > bound {
            return Err(OracleError::NoConvergence(bound));
        }
        let next = step_phi(g, &table, &val);
        sweeps += 1;
        for (idx, (&a, &b)) in val.values.iter().zip(&next.values).enumerate() {
            if !leq_certainty(a, b) {
                let v = VarId((idx / table.substrings.len()) as u32);
                return Err(OracleError::NonMonotone {
                    atom: format!(
                        "{}({:?})",
                        g.var_name(v),
                        table.substrings[idx % table.substrings.len()]
                    ),
                    from: a,
                    to: b,
                });
            }
        }
        let done = next == val;
        if let Some(t) = trace.as_mut() {
            t.iterations.push(next.clone());
            t.converged = done;
        }
        val = next;
        if done {
            break;
        }
    }
    Ok(Model {
        table,
        valuation: val,
        sweeps,
        trace,
    })
}

/// Membership of `word` in the start symbol's three-valued language.
pub fn classify(g: &Grammar, word: &str) -> Result<TruthValue, OracleError> {
    let m = entailment_model(g, word, false)?;
    Ok(m.value(g.start(), 0, m.table.len()))
}

/// Verdicts for every prefix `word[..j]`, `j = 0..=|word|`, from one model.
pub fn classify_prefixes(g: &Grammar, word: &str) -> Result<Vec<TruthValue>, OracleError> {
    let m = entailment_model(g, word, false)?;
    Ok((0..=m.table.len())
        .map(|j| m.value(g.start(), 0, j))
        .collect())
}

/// Variable atoms whose value differs from their re-evaluated rule body.
/// Empty for a genuine fixpoint.
pub fn model_violations(g: &Grammar, m: &Model) -> Vec<Atom> {
    let mut ev = BodyEvaluator::new(g, &m.table, &m.valuation);
    let mut bad = Vec::new();
    for v in g.var_ids() {
        for (sub, &(i, j)) in m.table.witness.iter().enumerate() {
            if ev.eval(g.body(v), i, j) != m.valuation.var(v, sub) {
                bad.push(Atom {
                    symbol: Symbol::Variable(v),
                    word: m.table.substrings[sub].clone(),
                });
            }
        }
    }
    bad
}

/// Human-readable per-sweep changes: one line per iteration listing the
/// atoms whose value changed.
pub fn render_trace(g: &Grammar, m: &Model) -> Vec<String> {
    let Some(trace) = &m.trace else {
        return Vec::new();
    };
    let show = |s: &str| {
        if s.is_empty() {
            "%eps".to_string()
        } else {
            s.to_string()
        }
    };
    trace
        .iterations
        .windows(2)
        .enumerate()
        .map(|(n, pair)| {
            let mut changes = Vec::new();
            for v in g.var_ids() {
                for (sub, s) in m.table.substrings.iter().enumerate() {
                    let (a, b) = (pair[0].var(v, sub), pair[1].var(v, sub));
                    if a != b {
                        changes.push(format!("{}({})={}", g.var_name(v), show(s), b));
                    }
                }
            }
            format!("{}\t{}", n + 1, changes.join(" "))
        })
        .collect()
}
