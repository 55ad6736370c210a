//! Boolean grammars: expression trees, normalization, validation and the
//! compiled node arena the automaton and parser work over.

mod syntax;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

pub use syntax::{parse_grammar, render_expr};

/// A grammar expression as written by the user.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GrammarExpr {
    Epsilon,
    Terminal(char),
    Variable(String),
    Negation(Box<GrammarExpr>),
    Disjunction(Vec<GrammarExpr>),
    Conjunction(Vec<GrammarExpr>),
    Concatenation(Vec<GrammarExpr>),
}

/// Which of the seven expression forms a node is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExprKind {
    Epsilon,
    Terminal,
    Variable,
    Negation,
    Disjunction,
    Conjunction,
    Concatenation,
}

impl GrammarExpr {
    pub fn kind(&self) -> ExprKind {
        match self {
            GrammarExpr::Epsilon => ExprKind::Epsilon,
            GrammarExpr::Terminal(_) => ExprKind::Terminal,
            GrammarExpr::Variable(_) => ExprKind::Variable,
            GrammarExpr::Negation(_) => ExprKind::Negation,
            GrammarExpr::Disjunction(_) => ExprKind::Disjunction,
            GrammarExpr::Conjunction(_) => ExprKind::Conjunction,
            GrammarExpr::Concatenation(_) => ExprKind::Concatenation,
        }
    }

    pub fn var(name: &str) -> Self {
        GrammarExpr::Variable(name.to_string())
    }

    pub fn negate(e: GrammarExpr) -> Self {
        GrammarExpr::Negation(Box::new(e))
    }

    /// Direct subexpressions.
    pub fn children(&self) -> &[GrammarExpr] {
        match self {
            GrammarExpr::Negation(c) => std::slice::from_ref(c),
            GrammarExpr::Disjunction(cs)
            | GrammarExpr::Conjunction(cs)
            | GrammarExpr::Concatenation(cs) => cs,
            _ => &[],
        }
    }

    /// Variable names referenced anywhere in the expression.
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        if let GrammarExpr::Variable(v) = self {
            out.insert(v);
        }
        for c in self.children() {
            c.collect_vars(out);
        }
    }

    pub fn terminals(&self, out: &mut BTreeSet<char>) {
        if let GrammarExpr::Terminal(c) = self {
            out.insert(*c);
        }
        for c in self.children() {
            c.terminals(out);
        }
    }

    /// True when the arity and no-same-kind-nesting rules hold everywhere.
    pub fn is_normal(&self) -> bool {
        let nary = matches!(
            self,
            GrammarExpr::Disjunction(_)
                | GrammarExpr::Conjunction(_)
                | GrammarExpr::Concatenation(_)
        );
        if nary && self.children().len() < 2 {
            return false;
        }
        self.children()
            .iter()
            .all(|c| c.kind() != self.kind() && c.is_normal())
    }
}

impl fmt::Display for GrammarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_expr(self))
    }
}

/// Flattens nested same-kind n-ary nodes, removes double negation and
/// collapses one-child n-ary nodes. An empty concatenation becomes ε.
pub fn normalize(e: &GrammarExpr) -> GrammarExpr {
    fn flatten(
        cs: &[GrammarExpr],
        kind: ExprKind,
        rebuild: fn(Vec<GrammarExpr>) -> GrammarExpr,
    ) -> GrammarExpr {
        let mut out = Vec::with_capacity(cs.len());
        for c in cs {
            let c = normalize(c);
            if c.kind() == kind {
                match c {
                    GrammarExpr::Disjunction(inner)
                    | GrammarExpr::Conjunction(inner)
                    | GrammarExpr::Concatenation(inner) => out.extend(inner),
                    _ => unreachable!(),
                }
            } else {
                out.push(c);
            }
        }
        match out.len() {
            0 if kind == ExprKind::Concatenation => GrammarExpr::Epsilon,
            1 => out.pop().unwrap(),
            _ => rebuild(out),
        }
    }

    match e {
        GrammarExpr::Negation(c) => match normalize(c) {
            GrammarExpr::Negation(inner) => *inner,
            c => GrammarExpr::Negation(Box::new(c)),
        },
        GrammarExpr::Disjunction(cs) => {
            flatten(cs, ExprKind::Disjunction, GrammarExpr::Disjunction)
        }
        GrammarExpr::Conjunction(cs) => {
            flatten(cs, ExprKind::Conjunction, GrammarExpr::Conjunction)
        }
        GrammarExpr::Concatenation(cs) => {
            flatten(cs, ExprKind::Concatenation, GrammarExpr::Concatenation)
        }
        other => other.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub head: String,
    pub body: GrammarExpr,
}

impl Rule {
    pub fn new(head: &str, body: GrammarExpr) -> Self {
        Rule {
            head: head.to_string(),
            body,
        }
    }
}

/// A well-formedness violation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Diagnostic {
    #[error("grammar has no rules")]
    EmptyRuleSet,
    #[error("variable {0} has more than one rule")]
    DuplicateHead(String),
    #[error("rule for {rule} references undefined variable {name}")]
    UndefinedVariable { rule: String, name: String },
    #[error("rule for {0} is not in normal form")]
    NotNormalized(String),
    #[error("start symbol {0} has no rule")]
    UnknownStart(String),
}

/// Checks one-rule-per-variable, that every referenced variable is defined
/// and that every body is normalized. Returns one diagnostic per violation.
pub fn validate(rules: &[Rule], start: Option<&str>) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    if rules.is_empty() {
        diags.push(Diagnostic::EmptyRuleSet);
        return diags;
    }
    let mut seen = BTreeSet::new();
    let mut reported = BTreeSet::new();
    for r in rules {
        if !seen.insert(r.head.as_str()) && reported.insert(r.head.as_str()) {
            diags.push(Diagnostic::DuplicateHead(r.head.clone()));
        }
    }
    for r in rules {
        for name in r.body.variables() {
            if !seen.contains(name) {
                diags.push(Diagnostic::UndefinedVariable {
                    rule: r.head.clone(),
                    name: name.to_string(),
                });
            }
        }
        if !r.body.is_normal() {
            diags.push(Diagnostic::NotNormalized(r.head.clone()));
        }
    }
    if let Some(s) = start {
        if !seen.contains(s) {
            diags.push(Diagnostic::UnknownStart(s.to_string()));
        }
    }
    diags
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GrammarError {
    #[error("{line}:{col}: {msg}")]
    Syntax {
        line: usize,
        col: usize,
        msg: String,
    },
    #[error("invalid grammar: {}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Diagnostic>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

/// Identity of an expression node in the compiled grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExprId(pub u32);

impl ExprId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Epsilon,
    Terminal(char),
    Variable(VarId),
    Negation(ExprId),
    Disjunction(Vec<ExprId>),
    Conjunction(Vec<ExprId>),
    Concatenation(Vec<ExprId>),
}

impl NodeKind {
    pub fn children(&self) -> &[ExprId] {
        match self {
            NodeKind::Negation(c) => std::slice::from_ref(c),
            NodeKind::Disjunction(cs) | NodeKind::Conjunction(cs) | NodeKind::Concatenation(cs) => {
                cs
            }
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub kind: NodeKind,
    /// Enclosing expression node; `None` for rule bodies and the start node.
    pub parent: Option<ExprId>,
    /// Position among the parent's children.
    pub slot: usize,
}

/// A validated, normalized Boolean grammar.
///
/// Every subexpression occurrence is a distinct node, so two occurrences of
/// the same terminal in different rules have different [`ExprId`]s. The
/// arena also holds one synthetic `Variable` node referring to the start
/// symbol; it belongs to no rule body.
#[derive(Debug, Clone)]
pub struct Grammar {
    variables: Vec<String>,
    alphabet: Vec<char>,
    rules: Vec<Rule>,
    start: VarId,
    nodes: Vec<Node>,
    bodies: Vec<ExprId>,
    start_node: ExprId,
    declared_alphabet: Vec<char>,
}

impl Grammar {
    /// Normalizes every body, validates, and compiles. The start symbol is the
    /// first rule's head unless `start` names another. `extra_alphabet` adds
    /// letters that no rule mentions.
    pub fn new(
        rules: Vec<Rule>,
        start: Option<&str>,
        extra_alphabet: &[char],
    ) -> Result<Grammar, GrammarError> {
        let rules: Vec<Rule> = rules
            .into_iter()
            .map(|r| Rule {
                body: normalize(&r.body),
                head: r.head,
            })
            .collect();
        let diags = validate(&rules, start);
        if !diags.is_empty() {
            return Err(GrammarError::Invalid(diags));
        }
        let variables: Vec<String> = rules.iter().map(|r| r.head.clone()).collect();
        let var_index: HashMap<&str, VarId> = variables
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), VarId(i as u32)))
            .collect();
        let mut letters = BTreeSet::new();
        for r in &rules {
            r.body.terminals(&mut letters);
        }
        let mut declared: Vec<char> = extra_alphabet.to_vec();
        declared.sort_unstable();
        declared.dedup();
        letters.extend(declared.iter().copied());
        let start = match start {
            Some(s) => var_index[s],
            None => VarId(0),
        };

        let mut nodes = Vec::new();
        let mut bodies = Vec::with_capacity(rules.len());
        for r in &rules {
            bodies.push(compile(&r.body, None, 0, &var_index, &mut nodes));
        }
        let start_node = ExprId(nodes.len() as u32);
        nodes.push(Node {
            kind: NodeKind::Variable(start),
            parent: None,
            slot: 0,
        });

        Ok(Grammar {
            variables,
            alphabet: letters.into_iter().collect(),
            rules,
            start,
            nodes,
            bodies,
            start_node,
            declared_alphabet: declared,
        })
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    /// Letters declared explicitly rather than found in rule bodies.
    pub fn declared_alphabet(&self) -> &[char] {
        &self.declared_alphabet
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn start(&self) -> VarId {
        self.start
    }

    pub fn start_name(&self) -> &str {
        &self.variables[self.start.0 as usize]
    }

    pub fn var_name(&self, v: VarId) -> &str {
        &self.variables[v.0 as usize]
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.variables
            .iter()
            .position(|v| v == name)
            .map(|i| VarId(i as u32))
    }

    pub fn var_ids(&self) -> impl Iterator<Item = VarId> {
        (0..self.variables.len() as u32).map(VarId)
    }

    /// Same rules with a different start symbol.
    pub fn with_start(&self, name: &str) -> Result<Grammar, GrammarError> {
        Grammar::new(self.rules.clone(), Some(name), &self.declared_alphabet)
    }

    /// The root node of the rule for `v`.
    pub fn body(&self, v: VarId) -> ExprId {
        self.bodies[v.0 as usize]
    }

    /// The synthetic `Variable` node standing for the start symbol.
    pub fn start_node(&self) -> ExprId {
        self.start_node
    }

    pub fn node(&self, id: ExprId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn kind(&self, id: ExprId) -> &NodeKind {
        &self.nodes[id.index()].kind
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = ExprId> {
        (0..self.nodes.len() as u32).map(ExprId)
    }

    /// `|Γ| = |V| + |Σ| + 1`.
    pub fn symbol_count(&self) -> usize {
        self.variables.len() + self.alphabet.len() + 1
    }

    /// True when no rule uses negation or conjunction.
    pub fn is_context_free(&self) -> bool {
        self.nodes
            .iter()
            .all(|n| !matches!(n.kind, NodeKind::Negation(_) | NodeKind::Conjunction(_)))
    }

    /// Pretty-prints a compiled node.
    pub fn display(&self, id: ExprId) -> String {
        render_expr(&self.to_expr(id))
    }

    /// Rebuilds the expression tree rooted at a node.
    pub fn to_expr(&self, id: ExprId) -> GrammarExpr {
        let map = |cs: &[ExprId]| cs.iter().map(|&c| self.to_expr(c)).collect();
        match self.kind(id) {
            NodeKind::Epsilon => GrammarExpr::Epsilon,
            NodeKind::Terminal(c) => GrammarExpr::Terminal(*c),
            NodeKind::Variable(v) => GrammarExpr::Variable(self.var_name(*v).to_string()),
            NodeKind::Negation(c) => GrammarExpr::Negation(Box::new(self.to_expr(*c))),
            NodeKind::Disjunction(cs) => GrammarExpr::Disjunction(map(cs)),
            NodeKind::Conjunction(cs) => GrammarExpr::Conjunction(map(cs)),
            NodeKind::Concatenation(cs) => GrammarExpr::Concatenation(map(cs)),
        }
    }

    /// Re-runs validation over the stored rules.
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        validate(&self.rules, Some(self.start_name()))
    }
}

fn compile(
    e: &GrammarExpr,
    parent: Option<ExprId>,
    slot: usize,
    vars: &HashMap<&str, VarId>,
    nodes: &mut Vec<Node>,
) -> ExprId {
    let id = ExprId(nodes.len() as u32);
    nodes.push(Node {
        kind: NodeKind::Epsilon,
        parent,
        slot,
    });
    let kids = |cs: &[GrammarExpr], nodes: &mut Vec<Node>| -> Vec<ExprId> {
        cs.iter()
            .enumerate()
            .map(|(i, c)| compile(c, Some(id), i, vars, nodes))
            .collect()
    };
    let kind = match e {
        GrammarExpr::Epsilon => NodeKind::Epsilon,
        GrammarExpr::Terminal(c) => NodeKind::Terminal(*c),
        GrammarExpr::Variable(v) => NodeKind::Variable(vars[v.as_str()]),
        GrammarExpr::Negation(c) => NodeKind::Negation(compile(c, Some(id), 0, vars, nodes)),
        GrammarExpr::Disjunction(cs) => NodeKind::Disjunction(kids(cs, nodes)),
        GrammarExpr::Conjunction(cs) => NodeKind::Conjunction(kids(cs, nodes)),
        GrammarExpr::Concatenation(cs) => NodeKind::Concatenation(kids(cs, nodes)),
    };
    nodes[id.index()].kind = kind;
    id
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.start.0 != 0 {
            writeln!(f, "%start {} ;", self.start_name())?;
        }
        if !self.declared_alphabet.is_empty() {
            let letters: String = self.declared_alphabet.iter().collect();
            writeln!(f, "%alphabet {} ;", syntax::quote(&letters))?;
        }
        for r in &self.rules {
            writeln!(f, "{} -> {} ;", r.head, render_expr(&r.body))?;
        }
        Ok(())
    }
}
