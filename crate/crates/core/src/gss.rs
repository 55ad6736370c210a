//! GLR-style recognizer over a graph-structured stack.
//!
//! Generation `U_j` holds at most one node per automaton state; every edge
//! points from a node in `U_j` back to a node in an earlier generation and
//! records that its label was proven over the segment between the two.
//! Nothing is ever removed from the stack.
//!
//! Per input position the shifter creates the edges for trivial matches
//! (`±c`, `-ε` and wildcards) and the reducer drains the work queue:
//!
//! * non-concatenation parents are finished directly: variables, negations,
//!   `+∨` and `-∧` from one child, `+∧` and `-∨` once every child has been
//!   recorded at the same node in the current generation;
//! * positive concatenations are traced back one edge at a time;
//! * a negative concatenation over `(i, j)` needs every split point
//!   `i ≤ k ≤ j` certified, either by a negative proof of the head part
//!   over `(i, k)` (a prefix proof, valid forever) or of the remaining parts
//!   over `(k, j)` (a suffix proof, valid for this `j` only).

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::automaton::{
    build_automaton, dot_escape, Automaton, Item, Sign, StateId, TransitionLabel,
};
use crate::grammar::{ExprId, Grammar, NodeKind};
use crate::nullability::{compute_nullability, NullabilityMap};
use crate::trivalue::TruthValue;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("symbol {symbol:?} at position {position} is not in the grammar alphabet")]
    ForeignSymbol { symbol: char, position: usize },
    #[error("internal inconsistency: no transition on {label} from state {state}")]
    MissingTransition { state: u32, label: String },
    #[error("internal inconsistency: both + and - yielded for the start symbol at position {0}")]
    ContradictoryYield(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u32);

#[derive(Debug, Clone)]
pub struct GssNode {
    pub state: StateId,
    pub generation: usize,
    /// Outgoing edges; all point to earlier generations.
    pub edges: Vec<EdgeId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GssEdge {
    pub label: TransitionLabel,
    pub source: NodeId,
    pub target: NodeId,
}

/// The append-only stack.
#[derive(Debug, Clone, Default)]
pub struct Gss {
    nodes: Vec<GssNode>,
    edges: Vec<GssEdge>,
    generations: Vec<Vec<NodeId>>,
    by_state: Vec<HashMap<StateId, NodeId>>,
    edge_index: HashSet<(NodeId, TransitionLabel, NodeId)>,
}

impl Gss {
    pub fn node(&self, id: NodeId) -> &GssNode {
        &self.nodes[id.0 as usize]
    }

    pub fn edge(&self, id: EdgeId) -> &GssEdge {
        &self.edges[id.0 as usize]
    }

    pub fn nodes(&self) -> &[GssNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[GssEdge] {
        &self.edges
    }

    pub fn generation(&self, j: usize) -> &[NodeId] {
        self.generations.get(j).map_or(&[], |g| g.as_slice())
    }

    pub fn generation_count(&self) -> usize {
        self.generations.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    fn open_generation(&mut self) {
        self.generations.push(Vec::new());
        self.by_state.push(HashMap::new());
    }

    /// Node for `state` in the newest generation, created on demand.
    fn node_in_current(&mut self, state: StateId) -> NodeId {
        let j = self.generations.len() - 1;
        if let Some(&n) = self.by_state[j].get(&state) {
            return n;
        }
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(GssNode {
            state,
            generation: j,
            edges: Vec::new(),
        });
        self.generations[j].push(id);
        self.by_state[j].insert(state, id);
        id
    }

    /// Adds `source → target` unless present. Returns the new edge.
    fn add_edge(
        &mut self,
        source: NodeId,
        label: TransitionLabel,
        target: NodeId,
    ) -> Option<EdgeId> {
        if !self.edge_index.insert((source, label, target)) {
            return None;
        }
        debug_assert!(self.node(target).generation < self.node(source).generation);
        let id = EdgeId(self.edges.len() as u32);
        self.edges.push(GssEdge {
            label,
            source,
            target,
        });
        self.nodes[source.0 as usize].edges.push(id);
        Some(id)
    }

    /// Graphviz rendering with one rank per generation.
    pub fn to_dot(&self, g: &Grammar) -> String {
        let mut out = String::from(
            "digraph gss {\n  rankdir=RL;\n  node [shape=ellipse, fontname=\"monospace\"];\n",
        );
        for (j, gen) in self.generations.iter().enumerate() {
            let _ = writeln!(out, "  subgraph gen{j} {{\n    rank=same;");
            for &n in gen {
                let node = self.node(n);
                let _ = writeln!(
                    out,
                    "    n{} [label=\"(s{}, {})\"];",
                    n.0, node.state.0, node.generation
                );
            }
            out.push_str("  }\n");
        }
        for e in &self.edges {
            let style = if matches!(e.label, TransitionLabel::Wildcard(_)) {
                ", style=dashed"
            } else {
                ""
            };
            let _ = writeln!(
                out,
                "  n{} -> n{} [label=\"{}\"{}];",
                e.source.0,
                e.target.0,
                dot_escape(&e.label.render(g)),
                style
            );
        }
        out.push_str("}\n");
        out
    }
}

/// A reducer work item.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PendingWork {
    /// A freshly created edge, processed from its source node.
    Edge(EdgeId),
    /// Parts `dot..` of a concatenation have been proven from `node` to the
    /// current position; trace the remaining parts `..dot` backwards.
    Continuation {
        node: NodeId,
        sign: Sign,
        cat: ExprId,
        dot: usize,
    },
}

/// Signs yielded for the start symbol at each position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseResult {
    yields: Vec<(bool, bool)>,
    pub stats: ParseStats,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseStats {
    pub nodes: usize,
    pub edges: usize,
    pub work_items: usize,
    /// `(nodes, edges)` after each generation.
    pub per_generation: Vec<(usize, usize)>,
}

impl ParseResult {
    /// Verdict for the prefix of length `j`.
    pub fn verdict(&self, j: usize) -> TruthValue {
        match self.yields[j] {
            (true, _) => TruthValue::True,
            (false, true) => TruthValue::False,
            (false, false) => TruthValue::Unknown,
        }
    }

    pub fn prefix_verdicts(&self) -> Vec<TruthValue> {
        (0..self.yields.len()).map(|j| self.verdict(j)).collect()
    }

    pub fn final_verdict(&self) -> TruthValue {
        self.verdict(self.yields.len() - 1)
    }

    /// Signs yielded at position `j`; at most one by construction.
    pub fn yielded(&self, j: usize) -> Vec<Sign> {
        let (p, n) = self.yields[j];
        let mut out = Vec::new();
        if p {
            out.push(Sign::Pos);
        }
        if n {
            out.push(Sign::Neg);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.yields.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Default)]
struct CompletionRecord {
    generation: usize,
    seen: Vec<bool>,
    count: usize,
}

/// Split points certified for one negative concatenation item at one node.
#[derive(Debug, Clone)]
struct MarkSet {
    origin: usize,
    permanent: Vec<bool>,
    permanent_count: usize,
    generation: usize,
    transient: Vec<bool>,
    /// Transient marks at positions without a permanent mark.
    transient_count: usize,
}

impl MarkSet {
    fn new(origin: usize) -> Self {
        MarkSet {
            origin,
            permanent: Vec::new(),
            permanent_count: 0,
            generation: usize::MAX,
            transient: Vec::new(),
            transient_count: 0,
        }
    }

    fn refresh(&mut self, j: usize) {
        if self.generation != j {
            self.generation = j;
            self.transient.clear();
            self.transient_count = 0;
        }
    }

    fn slot(v: &mut Vec<bool>, i: usize) -> &mut bool {
        if v.len() <= i {
            v.resize(i + 1, false);
        }
        &mut v[i]
    }

    /// Records a mark; returns true when the set changed.
    fn mark(&mut self, p: usize, permanent: bool) -> bool {
        let i = p - self.origin;
        let was_transient = self.transient.get(i).copied().unwrap_or(false);
        if permanent {
            let slot = Self::slot(&mut self.permanent, i);
            if *slot {
                return false;
            }
            *slot = true;
            self.permanent_count += 1;
            if was_transient {
                self.transient_count -= 1;
                return false;
            }
            true
        } else {
            if self.permanent.get(i).copied().unwrap_or(false) || was_transient {
                return false;
            }
            *Self::slot(&mut self.transient, i) = true;
            self.transient_count += 1;
            true
        }
    }

    fn complete(&self, j: usize) -> bool {
        self.permanent_count + self.transient_count == j - self.origin + 1
    }
}

/// A grammar prepared for recognition: nullability and automaton are
/// computed once and shared by every parse.
#[derive(Debug, Clone)]
pub struct Recognizer<'g> {
    grammar: &'g Grammar,
    nullability: NullabilityMap,
    automaton: Automaton,
}

impl<'g> Recognizer<'g> {
    pub fn new(grammar: &'g Grammar) -> Self {
        let nullability = compute_nullability(grammar);
        let automaton = build_automaton(grammar, &nullability);
        Recognizer {
            grammar,
            nullability,
            automaton,
        }
    }

    pub fn grammar(&self) -> &'g Grammar {
        self.grammar
    }

    pub fn automaton(&self) -> &Automaton {
        &self.automaton
    }

    pub fn nullability(&self) -> &NullabilityMap {
        &self.nullability
    }

    pub fn parse(&self, word: &str) -> Result<ParseResult, ParseError> {
        self.parse_with_stack(word).map(|(r, _)| r)
    }

    /// Parses and also returns the final stack.
    pub fn parse_with_stack(&self, word: &str) -> Result<(ParseResult, Gss), ParseError> {
        run(&self.automaton, self.grammar, &self.nullability, word)
    }
}

/// Recognizes `word`, yielding a verdict for every prefix.
pub fn parse(
    a: &Automaton,
    g: &Grammar,
    m: &NullabilityMap,
    word: &str,
) -> Result<ParseResult, ParseError> {
    run(a, g, m, word).map(|(r, _)| r)
}

fn run(
    a: &Automaton,
    g: &Grammar,
    m: &NullabilityMap,
    word: &str,
) -> Result<(ParseResult, Gss), ParseError> {
    let input: Vec<char> = word.chars().collect();
    if let Some((position, &symbol)) = input
        .iter()
        .enumerate()
        .find(|(_, c)| !g.alphabet().contains(c))
    {
        return Err(ParseError::ForeignSymbol { symbol, position });
    }
    let mut ctx = ParseContext {
        a,
        g,
        null: m,
        input,
        gss: Gss::default(),
        j: 0,
        queue: VecDeque::new(),
        seen: HashSet::new(),
        records: HashMap::new(),
        marks: HashMap::new(),
        yields: Vec::new(),
        work_items: 0,
        per_generation: Vec::new(),
    };
    ctx.gss.open_generation();
    ctx.gss.node_in_current(a.initial);
    ctx.yields.push((false, false));
    if let Some(sign) = [Sign::Pos, Sign::Neg]
        .into_iter()
        .find(|&s| m.node_matches(s, g.start_node()))
    {
        ctx.yield_sign(sign)?;
    }
    ctx.per_generation
        .push((ctx.gss.node_count(), ctx.gss.edge_count()));
    for j in 1..=ctx.input.len() {
        ctx.j = j;
        ctx.gss.open_generation();
        ctx.yields.push((false, false));
        ctx.seen.clear();
        ctx.shifter()?;
        ctx.reducer()?;
        ctx.per_generation
            .push((ctx.gss.node_count(), ctx.gss.edge_count()));
    }
    let stats = ParseStats {
        nodes: ctx.gss.node_count(),
        edges: ctx.gss.edge_count(),
        work_items: ctx.work_items,
        per_generation: ctx.per_generation,
    };
    Ok((
        ParseResult {
            yields: ctx.yields,
            stats,
        },
        ctx.gss,
    ))
}

struct ParseContext<'a> {
    a: &'a Automaton,
    g: &'a Grammar,
    null: &'a NullabilityMap,
    input: Vec<char>,
    gss: Gss,
    j: usize,
    queue: VecDeque<PendingWork>,
    seen: HashSet<PendingWork>,
    records: HashMap<(NodeId, Sign, ExprId), CompletionRecord>,
    marks: HashMap<(NodeId, ExprId, usize), MarkSet>,
    yields: Vec<(bool, bool)>,
    work_items: usize,
    per_generation: Vec<(usize, usize)>,
}

impl<'a> ParseContext<'a> {
    fn enqueue(&mut self, w: PendingWork) {
        if self.seen.insert(w) {
            self.work_items += 1;
            self.queue.push_back(w);
        }
    }

    fn yield_sign(&mut self, sign: Sign) -> Result<(), ParseError> {
        let slot = &mut self.yields[self.j];
        match sign {
            Sign::Pos => slot.0 = true,
            Sign::Neg => slot.1 = true,
        }
        if slot.0 && slot.1 {
            return Err(ParseError::ContradictoryYield(self.j));
        }
        Ok(())
    }

    fn trivially_matches(&self, sign: Sign, e: ExprId, i: usize) -> bool {
        let seg = &self.input[i..self.j];
        match (self.g.kind(e), sign) {
            (NodeKind::Terminal(c), Sign::Pos) => seg.len() == 1 && seg[0] == *c,
            (NodeKind::Terminal(c), Sign::Neg) => !(seg.len() == 1 && seg[0] == *c),
            (NodeKind::Epsilon, Sign::Neg) => !seg.is_empty(),
            _ => false,
        }
    }

    /// Creates the edges for every trivial match ending at `j`: terminals,
    /// `-ε`, and a wildcard for every optional transition.
    fn shifter(&mut self) -> Result<(), ParseError> {
        for i in 0..self.j {
            for k in 0..self.gss.generation(i).len() {
                let u = self.gss.generations[i][k];
                let state = self.a.state(self.gss.node(u).state);
                for &(sign, e) in &state.shiftable {
                    if self.trivially_matches(sign, e, i) {
                        self.create_edge(u, TransitionLabel::Formula(sign, e))?;
                    }
                }
                for &part in &state.optional {
                    self.create_edge(u, TransitionLabel::Wildcard(part))?;
                }
            }
        }
        Ok(())
    }

    /// Adds an edge from the node in `U_j` reached on `label` back to `u`,
    /// queueing it for reduction the first time it appears.
    fn create_edge(&mut self, u: NodeId, label: TransitionLabel) -> Result<(), ParseError> {
        let from = self.gss.node(u).state;
        let to = self
            .a
            .goto(from, label)
            .ok_or_else(|| ParseError::MissingTransition {
                state: from.0,
                label: label.render(self.g),
            })?;
        let v = self.gss.node_in_current(to);
        if let Some(e) = self.gss.add_edge(v, label, u) {
            self.enqueue(PendingWork::Edge(e));
        }
        Ok(())
    }

    fn reducer(&mut self) -> Result<(), ParseError> {
        while let Some(w) = self.queue.pop_front() {
            match w {
                PendingWork::Edge(e) => self.reduce_edge(e)?,
                PendingWork::Continuation {
                    node,
                    sign: Sign::Pos,
                    cat,
                    dot,
                } => self.continue_positive(node, cat, dot)?,
                PendingWork::Continuation {
                    node,
                    sign: Sign::Neg,
                    cat,
                    dot,
                } => self.continue_negative(node, cat, dot)?,
            }
        }
        Ok(())
    }

    /// The concatenation a node is a part of, with its slot.
    fn concat_parent(&self, part: ExprId) -> Option<(ExprId, usize)> {
        let node = self.g.node(part);
        let parent = node.parent?;
        matches!(self.g.kind(parent), NodeKind::Concatenation(_)).then_some((parent, node.slot))
    }

    fn parts(&self, cat: ExprId) -> &'a [ExprId] {
        self.g.kind(cat).children()
    }

    fn reduce_edge(&mut self, e: EdgeId) -> Result<(), ParseError> {
        let GssEdge { label, target, .. } = *self.gss.edge(e);
        match label {
            TransitionLabel::Formula(sign, formula) => {
                self.finish_reduction(target, sign, formula)?;
                if let Some((cat, slot)) = self.concat_parent(formula) {
                    match sign {
                        Sign::Pos => {
                            if self.null.suffix_matches(Sign::Pos, cat, slot + 1) {
                                self.extend_positive(target, cat, slot)?;
                            }
                        }
                        Sign::Neg => self.extend_negative(target, cat, slot, self.j, true)?,
                    }
                }
            }
            TransitionLabel::Wildcard(part) => {
                let (cat, slot) = self
                    .concat_parent(part)
                    .expect("wildcards only skip concatenation parts");
                if slot + 1 < self.parts(cat).len()
                    && self.null.suffix_matches(Sign::Neg, cat, slot + 1)
                {
                    self.extend_negative(target, cat, slot, self.j, false)?;
                }
            }
        }
        Ok(())
    }

    /// `±formula` has been proven from `u` to `j`: advance every
    /// non-concatenation parent of `•formula` in `u`.
    fn finish_reduction(
        &mut self,
        u: NodeId,
        sign: Sign,
        formula: ExprId,
    ) -> Result<(), ParseError> {
        let state = self.a.state(self.gss.node(u).state);
        let parents: Vec<Item> = state
            .parents_of(&Item::start(sign, formula))
            .copied()
            .collect();
        for p in parents {
            let label = TransitionLabel::Formula(p.sign, p.formula);
            let universal = match self.g.kind(p.formula) {
                NodeKind::Disjunction(_) => p.sign == Sign::Neg,
                NodeKind::Conjunction(_) => p.sign == Sign::Pos,
                _ => false,
            };
            if !universal {
                self.create_edge(u, label)?;
                if p.formula == self.a.start_node() {
                    self.yield_sign(p.sign)?;
                }
                continue;
            }
            let arity = self.g.kind(p.formula).children().len();
            let slot = self.g.node(formula).slot;
            let j = self.j;
            let rec = self.records.entry((u, p.sign, p.formula)).or_default();
            if rec.generation != j || rec.seen.len() != arity {
                *rec = CompletionRecord {
                    generation: j,
                    seen: vec![false; arity],
                    count: 0,
                };
            }
            if !rec.seen[slot] {
                rec.seen[slot] = true;
                rec.count += 1;
                if rec.count == arity {
                    self.create_edge(u, label)?;
                }
            }
        }
        Ok(())
    }

    /// Parts `dot..` of `+cat` hold from `v` to `j`.
    fn extend_positive(&mut self, v: NodeId, cat: ExprId, dot: usize) -> Result<(), ParseError> {
        if dot == 0 {
            self.finish_reduction(v, Sign::Pos, cat)
        } else {
            self.enqueue(PendingWork::Continuation {
                node: v,
                sign: Sign::Pos,
                cat,
                dot,
            });
            Ok(())
        }
    }

    /// Finds where part `dot - 1` may have started: at `v` itself when it
    /// is positively nullable, or across every `+part` edge of `v`.
    fn continue_positive(&mut self, v: NodeId, cat: ExprId, dot: usize) -> Result<(), ParseError> {
        let part = self.parts(cat)[dot - 1];
        let state = self.a.state(self.gss.node(v).state);
        if state.contains(&Item::new(Sign::Pos, cat, dot - 1))
            && self.null.node_matches(Sign::Pos, part)
        {
            self.extend_positive(v, cat, dot - 1)?;
        }
        if state.is_kernel(&Item::new(Sign::Pos, cat, dot)) {
            let want = TransitionLabel::Formula(Sign::Pos, part);
            for k in 0..self.gss.node(v).edges.len() {
                let e = *self.gss.edge(self.gss.node(v).edges[k]);
                if e.label == want {
                    self.extend_positive(e.target, cat, dot - 1)?;
                }
            }
        }
        Ok(())
    }

    /// Parts `dot..` of `-cat` are negatively proven from `v` to `j`, which
    /// is a suffix proof for split point `pos(v)` of the items one part back.
    fn continue_negative(&mut self, v: NodeId, cat: ExprId, dot: usize) -> Result<(), ParseError> {
        let part = self.parts(cat)[dot - 1];
        let i = self.gss.node(v).generation;
        let state = self.a.state(self.gss.node(v).state);
        if state.contains(&Item::new(Sign::Neg, cat, dot - 1)) {
            self.extend_negative(v, cat, dot - 1, i, false)?;
        }
        if state.is_kernel(&Item::new(Sign::Neg, cat, dot)) {
            let proven = TransitionLabel::Formula(Sign::Neg, part);
            let skipped = TransitionLabel::Wildcard(part);
            for k in 0..self.gss.node(v).edges.len() {
                let e = *self.gss.edge(self.gss.node(v).edges[k]);
                if e.label == proven || e.label == skipped {
                    self.extend_negative(e.target, cat, dot - 1, i, false)?;
                }
            }
        }
        Ok(())
    }

    /// Marks split point `p` for `-cat` with the dot at `dot` at node `v`.
    /// Once every point from `pos(v)` to `j` is marked the parts `dot..` are
    /// negatively proven over that segment. The last part alone needs no
    /// marks: its proof is the edge itself.
    fn extend_negative(
        &mut self,
        v: NodeId,
        cat: ExprId,
        dot: usize,
        p: usize,
        permanent: bool,
    ) -> Result<(), ParseError> {
        let parts = self.parts(cat);
        let proven = if dot + 1 == parts.len() {
            debug_assert_eq!(p, self.j);
            true
        } else {
            let origin = self.gss.node(v).generation;
            let j = self.j;
            let null = self.null;
            let set = self.marks.entry((v, cat, dot)).or_insert_with(|| {
                let mut s = MarkSet::new(origin);
                if null.node_matches(Sign::Neg, parts[dot]) {
                    s.mark(origin, true);
                }
                s
            });
            set.refresh(j);
            set.mark(p, permanent) && set.complete(j)
        };
        if !proven {
            return Ok(());
        }
        if dot == 0 {
            self.finish_reduction(v, Sign::Neg, cat)
        } else {
            self.enqueue(PendingWork::Continuation {
                node: v,
                sign: Sign::Neg,
                cat,
                dot,
            });
            Ok(())
        }
    }
}
