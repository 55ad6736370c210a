//! The Boolean LR automaton.
//!
//! States are sets of signed dotted items closed under the expansion rules
//! for each expression form. Items name expression *nodes*, never
//! structurally equal formulas, so every transition label identifies one
//! occurrence in the grammar. States are canonical by kernel.

use std::collections::{HashMap, VecDeque};
use std::fmt::{self, Write as _};

use indexmap::IndexMap;

use crate::grammar::{ExprId, Grammar, NodeKind};
use crate::nullability::NullabilityMap;
use crate::trivalue::TruthValue;

/// Whether a positive or a negative proof is sought.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    /// The truth value a proof of this sign establishes.
    pub fn value(self) -> TruthValue {
        match self {
            Sign::Pos => TruthValue::True,
            Sign::Neg => TruthValue::False,
        }
    }

    /// True when `v` is what this sign proves.
    pub fn accepts(self, v: TruthValue) -> bool {
        v == self.value()
    }

    pub fn glyph(self) -> char {
        self.value().glyph()
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.glyph())
    }
}

/// `(sign, formula, dot)`. For an n-ary concatenation the dot ranges over
/// `0..=n`; for anything else it is 0 or 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Item {
    pub sign: Sign,
    pub formula: ExprId,
    pub dot: usize,
}

impl Item {
    pub fn new(sign: Sign, formula: ExprId, dot: usize) -> Self {
        Item { sign, formula, dot }
    }

    pub fn start(sign: Sign, formula: ExprId) -> Self {
        Item::new(sign, formula, 0)
    }

    /// Largest dot position for this formula.
    pub fn arity(&self, g: &Grammar) -> usize {
        match g.kind(self.formula) {
            NodeKind::Concatenation(cs) => cs.len(),
            _ => 1,
        }
    }

    pub fn is_completion(&self, g: &Grammar) -> bool {
        self.dot == self.arity(g)
    }

    pub fn successor(&self) -> Item {
        Item::new(self.sign, self.formula, self.dot + 1)
    }

    pub fn render(&self, g: &Grammar) -> String {
        let mut s = String::new();
        s.push(self.sign.glyph());
        match g.kind(self.formula) {
            NodeKind::Concatenation(cs) => {
                for (i, &c) in cs.iter().enumerate() {
                    if i == self.dot {
                        s.push('•');
                    } else if i > 0 {
                        s.push(' ');
                    }
                    s.push_str(&wrap(g, c));
                }
                if self.dot == cs.len() {
                    s.push('•');
                }
            }
            _ => {
                if self.dot == 0 {
                    s.push('•');
                }
                s.push_str(&wrap(g, self.formula));
                if self.dot == 1 {
                    s.push('•');
                }
            }
        }
        s
    }
}

fn wrap(g: &Grammar, e: ExprId) -> String {
    let text = g.display(e);
    match g.kind(e) {
        NodeKind::Disjunction(_) | NodeKind::Conjunction(_) | NodeKind::Concatenation(_) => {
            format!("({text})")
        }
        _ => text,
    }
}

/// A transition label: a signed formula, or the wildcard `*` that skips an
/// arbitrary nonempty segment for one part of a negative concatenation.
/// The wildcard remembers which part it skips.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransitionLabel {
    Formula(Sign, ExprId),
    Wildcard(ExprId),
}

impl TransitionLabel {
    pub fn render(&self, g: &Grammar) -> String {
        match *self {
            TransitionLabel::Formula(s, e) => format!("{}{}", s.glyph(), wrap(g, e)),
            TransitionLabel::Wildcard(_) => "*".to_string(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
pub struct StateItem {
    pub item: Item,
    pub kernel: bool,
    /// Indices of the non-concatenation items in this state that generate it.
    pub parents: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct AutomatonState {
    pub id: StateId,
    pub items: Vec<StateItem>,
    index: HashMap<Item, usize>,
    /// Transitions on signed formulas, in the order closure discovered them.
    pub transitions: IndexMap<(Sign, ExprId), StateId>,
    /// Labels `-φr` of negative concatenation parts; each also admits `*`.
    pub optional: Vec<ExprId>,
    /// Labels a shifter may match directly against the input: `±c` and `-ε`.
    pub shiftable: Vec<(Sign, ExprId)>,
}

impl AutomatonState {
    pub fn position(&self, item: &Item) -> Option<usize> {
        self.index.get(item).copied()
    }

    pub fn contains(&self, item: &Item) -> bool {
        self.index.contains_key(item)
    }

    pub fn is_kernel(&self, item: &Item) -> bool {
        self.position(item).is_some_and(|i| self.items[i].kernel)
    }

    pub fn kernel(&self) -> impl Iterator<Item = &Item> {
        self.items.iter().filter(|i| i.kernel).map(|i| &i.item)
    }

    /// Parent items of `item` in this state.
    pub fn parents_of(&self, item: &Item) -> impl Iterator<Item = &Item> {
        self.position(item).into_iter().flat_map(move |i| {
            self.items[i]
                .parents
                .iter()
                .map(move |&p| &self.items[p].item)
        })
    }

    pub fn goto(&self, sign: Sign, formula: ExprId) -> Option<StateId> {
        self.transitions.get(&(sign, formula)).copied()
    }
}

#[derive(Debug, Clone)]
pub struct Automaton {
    pub states: Vec<AutomatonState>,
    pub initial: StateId,
    /// `(state, sign)` for every state holding a completed `±S` item.
    pub accept: Vec<(StateId, Sign)>,
    start_node: ExprId,
}

impl Automaton {
    pub fn state(&self, id: StateId) -> &AutomatonState {
        &self.states[id.index()]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn start_node(&self) -> ExprId {
        self.start_node
    }

    /// Successor on a label. A wildcard leads where the skipped part's
    /// negative transition leads, provided that transition is optional.
    pub fn goto(&self, state: StateId, label: TransitionLabel) -> Option<StateId> {
        let s = self.state(state);
        match label {
            TransitionLabel::Formula(sign, e) => s.goto(sign, e),
            TransitionLabel::Wildcard(part) => {
                if s.optional.contains(&part) {
                    s.goto(Sign::Neg, part)
                } else {
                    None
                }
            }
        }
    }

    /// Every `(label, target)` pair leaving a state, wildcards included.
    pub fn edges_from(&self, state: StateId) -> Vec<(TransitionLabel, StateId)> {
        let s = self.state(state);
        let mut out: Vec<_> = s
            .transitions
            .iter()
            .map(|(&(sign, e), &t)| (TransitionLabel::Formula(sign, e), t))
            .collect();
        for &part in &s.optional {
            out.push((
                TransitionLabel::Wildcard(part),
                s.transitions[&(Sign::Neg, part)],
            ));
        }
        out
    }

    /// Graphviz rendering: one node per state listing its items (kernel
    /// items marked `K`), one edge per transition, dashed for wildcards.
    pub fn to_dot(&self, g: &Grammar) -> String {
        let mut out = String::from(
            "digraph automaton {\n  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n",
        );
        for s in &self.states {
            let mut label = format!("s{}\\l", s.id.0);
            for it in &s.items {
                let _ = write!(
                    label,
                    "{} {}\\l",
                    if it.kernel { "K" } else { " " },
                    dot_escape(&it.item.render(g))
                );
            }
            let _ = writeln!(out, "  s{} [label=\"{}\"];", s.id.0, label);
        }
        for s in &self.states {
            for (label, t) in self.edges_from(s.id) {
                let style = if matches!(label, TransitionLabel::Wildcard(_)) {
                    ", style=dashed"
                } else {
                    ""
                };
                let _ = writeln!(
                    out,
                    "  s{} -> s{} [label=\"{}\"{}];",
                    s.id.0,
                    t.0,
                    dot_escape(&label.render(g)),
                    style
                );
            }
        }
        out.push_str("}\n");
        out
    }
}

pub(crate) fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Builder for one state's closure.
struct Closure<'a> {
    g: &'a Grammar,
    null: &'a NullabilityMap,
    items: Vec<StateItem>,
    index: HashMap<Item, usize>,
    /// Kernel items of each transition's target, keyed by label.
    targets: IndexMap<(Sign, ExprId), Vec<Item>>,
    optional: Vec<ExprId>,
    shiftable: Vec<(Sign, ExprId)>,
}

impl<'a> Closure<'a> {
    fn add(&mut self, item: Item, parent: Option<usize>, kernel: bool) {
        let idx = match self.index.get(&item) {
            Some(&i) => i,
            None => {
                self.items.push(StateItem {
                    item,
                    kernel,
                    parents: Vec::new(),
                });
                self.index.insert(item, self.items.len() - 1);
                self.items.len() - 1
            }
        };
        if let Some(p) = parent {
            if !self.items[idx].parents.contains(&p) {
                self.items[idx].parents.push(p);
            }
        }
    }

    fn target(&mut self, sign: Sign, formula: ExprId, kernel_item: Item) {
        let v = self.targets.entry((sign, formula)).or_default();
        if !v.contains(&kernel_item) {
            v.push(kernel_item);
        }
    }

    /// A kernel item of `cat` with this sign whose remainder is `+`-nullable.
    fn right_nullable_kernel(&self, sign: Sign, cat: ExprId) -> bool {
        self.items.iter().any(|it| {
            it.kernel
                && it.item.sign == sign
                && it.item.formula == cat
                && self.null.suffix_matches(Sign::Pos, cat, it.item.dot)
        })
    }

    fn has_kernel_of(&self, sign: Sign, cat: ExprId) -> bool {
        self.items
            .iter()
            .any(|it| it.kernel && it.item.sign == sign && it.item.formula == cat)
    }

    fn run(&mut self) {
        let mut next = 0;
        while next < self.items.len() {
            let idx = next;
            next += 1;
            let item = self.items[idx].item;
            if item.is_completion(self.g) {
                continue;
            }
            let Item { sign, formula, dot } = item;
            let completion = item.successor();
            match self.g.kind(formula).clone() {
                NodeKind::Epsilon if sign == Sign::Pos => {}
                NodeKind::Epsilon | NodeKind::Terminal(_) => {
                    self.target(sign, formula, completion);
                    if !self.shiftable.contains(&(sign, formula)) {
                        self.shiftable.push((sign, formula));
                    }
                }
                NodeKind::Variable(v) => {
                    self.add(Item::start(sign, self.g.body(v)), Some(idx), false);
                    self.target(sign, formula, completion);
                }
                NodeKind::Negation(child) => {
                    self.add(Item::start(sign.flip(), child), Some(idx), false);
                    self.target(sign, formula, completion);
                }
                NodeKind::Disjunction(cs) | NodeKind::Conjunction(cs) => {
                    for c in cs {
                        self.add(Item::start(sign, c), Some(idx), false);
                    }
                    self.target(sign, formula, completion);
                }
                NodeKind::Concatenation(cs) => {
                    let part = cs[dot];
                    let last = dot + 1 == cs.len();
                    self.add(Item::start(sign, part), None, false);
                    self.target(sign, part, completion);
                    match sign {
                        Sign::Pos => {
                            if self.null.node_matches(Sign::Pos, part)
                                && (!last || self.right_nullable_kernel(Sign::Pos, formula))
                            {
                                self.add(completion, None, false);
                            }
                        }
                        Sign::Neg => {
                            if !self.optional.contains(&part) {
                                self.optional.push(part);
                            }
                            if !last || self.has_kernel_of(Sign::Neg, formula) {
                                self.add(completion, None, false);
                            }
                        }
                    }
                }
            }
        }
    }
}

fn close_kernel<'a>(
    g: &'a Grammar,
    null: &'a NullabilityMap,
    kernel: &[Item],
    seeds: &[Item],
) -> Closure<'a> {
    let mut c = Closure {
        g,
        null,
        items: Vec::new(),
        index: HashMap::new(),
        targets: IndexMap::new(),
        optional: Vec::new(),
        shiftable: Vec::new(),
    };
    for &k in kernel {
        c.add(k, None, true);
    }
    for &s in seeds {
        c.add(s, None, false);
    }
    c.run();
    c
}

/// Closes a set of items: kernel items are marked as such, `seeds` are
/// added as derived items.
pub fn close(
    g: &Grammar,
    null: &NullabilityMap,
    kernel: &[Item],
    seeds: &[Item],
) -> Vec<StateItem> {
    close_kernel(g, null, kernel, seeds).items
}

/// Breadth-first construction from the initial state `{+•S, -•S}`.
pub fn build_automaton(g: &Grammar, null: &NullabilityMap) -> Automaton {
    let start = g.start_node();
    let mut states: Vec<AutomatonState> = Vec::new();
    let mut by_kernel: HashMap<Vec<Item>, StateId> = HashMap::new();
    let mut queue: VecDeque<(StateId, Vec<Item>, Vec<Item>)> = VecDeque::new();

    let seeds = vec![Item::start(Sign::Pos, start), Item::start(Sign::Neg, start)];
    by_kernel.insert(Vec::new(), StateId(0));
    queue.push_back((StateId(0), Vec::new(), seeds));
    let mut pending: Vec<Option<AutomatonState>> = vec![None];

    while let Some((id, kernel, seeds)) = queue.pop_front() {
        let c = close_kernel(g, null, &kernel, &seeds);
        let mut transitions = IndexMap::new();
        for (label, mut target_kernel) in c.targets {
            target_kernel.sort_unstable();
            let next = match by_kernel.get(&target_kernel) {
                Some(&t) => t,
                None => {
                    let t = StateId(pending.len() as u32);
                    pending.push(None);
                    by_kernel.insert(target_kernel.clone(), t);
                    queue.push_back((t, target_kernel, Vec::new()));
                    t
                }
            };
            transitions.insert(label, next);
        }
        pending[id.index()] = Some(AutomatonState {
            id,
            index: c.index,
            items: c.items,
            transitions,
            optional: c.optional,
            shiftable: c.shiftable,
        });
    }
    states.extend(
        pending
            .into_iter()
            .map(|s| s.expect("every queued state is closed")),
    );

    let mut accept = Vec::new();
    for s in &states {
        for sign in [Sign::Pos, Sign::Neg] {
            if s.is_kernel(&Item::new(sign, start, 1)) {
                accept.push((s.id, sign));
            }
        }
    }
    Automaton {
        states,
        initial: StateId(0),
        accept,
        start_node: start,
    }
}
