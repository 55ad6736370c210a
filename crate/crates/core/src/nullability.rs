//! Three-valued behaviour of every expression node on the empty word.
//!
//! This is the entailment model restricted to the atoms `X(ε)`, extended to
//! each node and to each suffix `φr … φn` of each concatenation. The only
//! partition of ε is into empty parts, so a concatenation is nullable
//! exactly as the conjunction of its parts.

use std::collections::HashMap;

use thiserror::Error;

use crate::automaton::Sign;
use crate::grammar::{ExprId, Grammar, NodeKind, VarId};
use crate::trivalue::{conj, disj, leq_certainty, neg, TruthValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NullabilityError {
    #[error("expression node {0:?} is not part of this grammar")]
    UnknownNode(ExprId),
    #[error("{0:?} is not a concatenation or has no suffix at {1}")]
    UnknownSuffix(ExprId, usize),
}

/// A node, or the tail of a concatenation starting at part `from`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Nullable {
    Node(ExprId),
    Suffix { cat: ExprId, from: usize },
}

#[derive(Debug, Clone)]
pub struct NullabilityMap {
    vars: Vec<TruthValue>,
    nodes: Vec<TruthValue>,
    /// `suffixes[cat][r]` is the value of parts `r..n`; index `n` is the empty tail.
    suffixes: HashMap<ExprId, Vec<TruthValue>>,
    /// Variable values after each sweep, starting from all-unknown.
    history: Vec<Vec<TruthValue>>,
}

fn eval_empty(g: &Grammar, vars: &[TruthValue], e: ExprId) -> TruthValue {
    match g.kind(e) {
        NodeKind::Epsilon => TruthValue::True,
        NodeKind::Terminal(_) => TruthValue::False,
        NodeKind::Variable(v) => vars[v.0 as usize],
        NodeKind::Negation(c) => neg(eval_empty(g, vars, *c)),
        NodeKind::Disjunction(cs) => disj(cs.iter().map(|&c| eval_empty(g, vars, c))),
        NodeKind::Conjunction(cs) | NodeKind::Concatenation(cs) => {
            conj(cs.iter().map(|&c| eval_empty(g, vars, c)))
        }
    }
}

/// Runs Φ on ε until the variable values stop changing.
///
/// Panics if a sweep is not ≼-monotone or if more than `2|V| + 2` sweeps are
/// needed; both mean a defect rather than a property of the input.
pub fn compute_nullability(g: &Grammar) -> NullabilityMap {
    let nvars = g.variables().len();
    let bound = 2 * nvars + 2;
    let mut vars = vec![TruthValue::Unknown; nvars];
    let mut history = vec![vars.clone()];
    loop {
        let next: Vec<TruthValue> = g
            .var_ids()
            .map(|v| eval_empty(g, &vars, g.body(v)))
            .collect();
        assert!(
            vars.iter().zip(&next).all(|(&a, &b)| leq_certainty(a, b)),
            "nullability sweep is not monotone"
        );
        let done = next == vars;
        history.push(next.clone());
        vars = next;
        if done {
            break;
        }
        assert!(
            history.len() <= bound + 1,
            "nullability did not converge in {bound} sweeps"
        );
    }

    let nodes: Vec<TruthValue> = g.node_ids().map(|e| eval_empty(g, &vars, e)).collect();
    let mut suffixes = HashMap::new();
    for e in g.node_ids() {
        if let NodeKind::Concatenation(cs) = g.kind(e) {
            let mut tail = vec![TruthValue::True; cs.len() + 1];
            for r in (0..cs.len()).rev() {
                tail[r] = conj([nodes[cs[r].index()], tail[r + 1]]);
            }
            suffixes.insert(e, tail);
        }
    }
    NullabilityMap {
        vars,
        nodes,
        suffixes,
        history,
    }
}

impl NullabilityMap {
    pub fn var(&self, v: VarId) -> TruthValue {
        self.vars[v.0 as usize]
    }

    pub fn node(&self, e: ExprId) -> TruthValue {
        self.nodes[e.index()]
    }

    /// Value of parts `from..` of a concatenation; the empty tail is `True`.
    pub fn suffix(&self, cat: ExprId, from: usize) -> TruthValue {
        self.suffixes[&cat][from]
    }

    pub fn value(&self, what: Nullable) -> Result<TruthValue, NullabilityError> {
        match what {
            Nullable::Node(e) => self
                .nodes
                .get(e.index())
                .copied()
                .ok_or(NullabilityError::UnknownNode(e)),
            Nullable::Suffix { cat, from } => self
                .suffixes
                .get(&cat)
                .and_then(|t| t.get(from))
                .copied()
                .ok_or(NullabilityError::UnknownSuffix(cat, from)),
        }
    }

    /// Whether `±ε` matches: `+` needs value ⊤, `-` needs ⊥; ∼ matches neither.
    pub fn matches_empty(&self, sign: Sign, what: Nullable) -> Result<bool, NullabilityError> {
        Ok(sign.accepts(self.value(what)?))
    }

    /// Shorthand for node tests where the node is known to exist.
    pub fn node_matches(&self, sign: Sign, e: ExprId) -> bool {
        sign.accepts(self.node(e))
    }

    pub fn suffix_matches(&self, sign: Sign, cat: ExprId, from: usize) -> bool {
        sign.accepts(self.suffix(cat, from))
    }

    /// Variable values after each sweep, beginning with the all-unknown start.
    pub fn history(&self) -> &[Vec<TruthValue>] {
        &self.history
    }

    /// Number of Φ sweeps performed, including the final confirming one.
    pub fn sweeps(&self) -> usize {
        self.history.len() - 1
    }

    /// `NAME<TAB>glyph` for every variable, in declaration order.
    pub fn render(&self, g: &Grammar) -> String {
        g.var_ids()
            .map(|v| format!("{}\t{}\n", g.var_name(v), self.var(v)))
            .collect()
    }
}
