use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use boolglr::automaton::{close, Automaton, Item, Sign, StateId};
use boolglr::generate::{random_boolean_grammar, random_cfg, GenConfig};
use boolglr::grammar::{ExprId, NodeKind};
use boolglr::reference::{Cfg, CfgSymbol};
use boolglr::{build_automaton, compute_nullability, corpus, parse_grammar, Grammar};

fn grammars() -> Vec<Grammar> {
    let mut out: Vec<Grammar> = corpus::ALL
        .iter()
        .map(|(_, s)| parse_grammar(s).unwrap())
        .collect();
    out.extend((0..25).map(|seed| random_boolean_grammar(seed, GenConfig::default())));
    out
}

fn item_set(items: impl IntoIterator<Item = Item>) -> BTreeSet<Item> {
    items.into_iter().collect()
}

#[test]
fn closure_is_idempotent() {
    for g in grammars() {
        let m = compute_nullability(&g);
        let a = build_automaton(&g, &m);
        for s in &a.states {
            let all = item_set(s.items.iter().map(|i| i.item));
            let kernel: Vec<Item> = s.kernel().copied().collect();
            let derived: Vec<Item> = s
                .items
                .iter()
                .filter(|i| !i.kernel)
                .map(|i| i.item)
                .collect();
            let again = close(&g, &m, &kernel, &derived);
            assert_eq!(item_set(again.iter().map(|i| i.item)), all);
            if s.id != a.initial {
                let from_kernel = close(&g, &m, &kernel, &[]);
                assert_eq!(item_set(from_kernel.iter().map(|i| i.item)), all);
            }
        }
    }
}

#[test]
fn kernels_are_unique() {
    for g in grammars() {
        let a = build_automaton(&g, &compute_nullability(&g));
        let mut seen = HashSet::new();
        for s in &a.states {
            assert!(
                seen.insert(item_set(s.kernel().copied())),
                "duplicate kernel in s{}",
                s.id.0
            );
        }
        assert!(a.len() < 10_000);
    }
}

#[test]
fn parents_and_signs() {
    for g in grammars() {
        let m = compute_nullability(&g);
        let a = build_automaton(&g, &m);
        for s in &a.states {
            for it in s.items.iter().filter(|i| !i.kernel) {
                let Item { sign, formula, dot } = it.item;
                if dot > 0 {
                    // a concatenation advanced in place over a skippable part
                    let NodeKind::Concatenation(cs) = g.kind(formula) else {
                        panic!("{} is derived with a moved dot", it.item.render(&g));
                    };
                    assert!(s.contains(&Item::new(sign, formula, dot - 1)));
                    if sign == Sign::Pos {
                        assert!(m.node_matches(Sign::Pos, cs[dot - 1]));
                    }
                    continue;
                }
                let parent_node = g.node(formula).parent;
                let in_concat =
                    parent_node.is_some_and(|p| matches!(g.kind(p), NodeKind::Concatenation(_)));
                if in_concat {
                    // generated by a concatenation item with the same sign
                    let cat = parent_node.unwrap();
                    let slot = g.node(formula).slot;
                    assert!(s.contains(&Item::new(sign, cat, slot)));
                    assert!(it.parents.is_empty());
                    continue;
                }
                if formula == g.start_node() {
                    continue;
                }
                assert!(
                    !it.parents.is_empty(),
                    "{} has no parent",
                    it.item.render(&g)
                );
                for &p in &it.parents {
                    let parent = s.items[p].item;
                    assert_eq!(parent.dot, 0);
                    let (generates, flips) = match g.kind(parent.formula) {
                        NodeKind::Variable(v) => (g.body(*v) == formula, false),
                        NodeKind::Negation(c) => (*c == formula, true),
                        NodeKind::Disjunction(cs) | NodeKind::Conjunction(cs) => {
                            (cs.contains(&formula), false)
                        }
                        _ => (false, false),
                    };
                    assert!(
                        generates,
                        "{} from {}",
                        it.item.render(&g),
                        parent.render(&g)
                    );
                    let expected = if flips {
                        parent.sign.flip()
                    } else {
                        parent.sign
                    };
                    assert_eq!(
                        sign,
                        expected,
                        "{} from {}",
                        it.item.render(&g),
                        parent.render(&g)
                    );
                }
            }
        }
    }
}

/// Reference LR(0) construction with nullable symbols skipped during closure.
struct Lr0<'c> {
    cfg: &'c Cfg,
    nullable: Vec<bool>,
}

type LrItem = (usize, usize);

impl Lr0<'_> {
    fn closure(&self, kernel: &BTreeSet<LrItem>) -> BTreeSet<LrItem> {
        let mut out = kernel.clone();
        let mut work: Vec<LrItem> = kernel.iter().copied().collect();
        while let Some((p, d)) = work.pop() {
            if let Some(CfgSymbol::N(v)) = self.cfg.productions[p].1.get(d) {
                for (q, (h, _)) in self.cfg.productions.iter().enumerate() {
                    if h == v && out.insert((q, 0)) {
                        work.push((q, 0));
                    }
                }
                if self.nullable[v.0 as usize] && out.insert((p, d + 1)) {
                    work.push((p, d + 1));
                }
            }
        }
        out
    }

    fn goto(&self, closed: &BTreeSet<LrItem>, sym: CfgSymbol) -> BTreeSet<LrItem> {
        closed
            .iter()
            .filter(|&&(p, d)| self.cfg.productions[p].1.get(d) == Some(&sym))
            .map(|&(p, d)| (p, d + 1))
            .collect()
    }

    fn is_completion(&self, (p, d): LrItem) -> bool {
        d == self.cfg.productions[p].1.len()
    }
}

/// Production index for every rule alternative of a flat context-free grammar.
fn alternative_productions(g: &Grammar, cfg: &Cfg) -> HashMap<ExprId, usize> {
    let symbol = |e: ExprId| match g.kind(e) {
        NodeKind::Terminal(c) => CfgSymbol::T(*c),
        NodeKind::Variable(v) => CfgSymbol::N(*v),
        k => panic!("not flat: {k:?}"),
    };
    let mut out = HashMap::new();
    for v in g.var_ids() {
        let body = g.body(v);
        let alts: Vec<ExprId> = match g.kind(body) {
            NodeKind::Disjunction(cs) => cs.clone(),
            _ => vec![body],
        };
        for alt in alts {
            let rhs: Vec<CfgSymbol> = match g.kind(alt) {
                NodeKind::Epsilon => vec![],
                NodeKind::Concatenation(cs) => cs.iter().map(|&c| symbol(c)).collect(),
                _ => vec![symbol(alt)],
            };
            let p = cfg
                .productions
                .iter()
                .position(|(h, r)| *h == v && *r == rhs)
                .unwrap();
            out.insert(alt, p);
        }
    }
    out
}

/// Checks that the positive fragment of the automaton, with transitions
/// that read the same grammar symbol merged, is the LR(0) automaton.
fn check_positive_fragment(g: &Grammar) {
    let m = compute_nullability(g);
    let a = build_automaton(g, &m);
    let cfg = Cfg::from_grammar(g).unwrap();
    let lr = Lr0 {
        cfg: &cfg,
        nullable: cfg.nullable(),
    };
    let alt_prod = alternative_productions(g, &cfg);
    let project = |it: &Item| -> Option<LrItem> {
        (it.sign == Sign::Pos)
            .then(|| alt_prod.get(&it.formula).map(|&p| (p, it.dot)))
            .flatten()
    };
    let closure_of = |states: &[StateId]| -> BTreeSet<LrItem> {
        states
            .iter()
            .flat_map(|&s| a.state(s).items.iter().filter_map(|i| project(&i.item)))
            .filter(|&it| !lr.is_completion(it))
            .collect()
    };
    let kernel_of = |states: &[StateId]| -> BTreeSet<LrItem> {
        states
            .iter()
            .flat_map(|&s| a.state(s).kernel().filter_map(&project).collect::<Vec<_>>())
            .collect()
    };
    let symbol_of = |e: ExprId| match g.kind(e) {
        NodeKind::Terminal(c) => Some(CfgSymbol::T(*c)),
        NodeKind::Variable(v) => Some(CfgSymbol::N(*v)),
        _ => None,
    };

    let start_kernel: BTreeSet<LrItem> = cfg
        .productions
        .iter()
        .enumerate()
        .filter(|(_, (h, _))| *h == cfg.start)
        .map(|(p, _)| (p, 0))
        .collect();
    let mut queue = VecDeque::from([(vec![a.initial], lr.closure(&start_kernel))]);
    let mut seen = HashSet::new();
    while let Some((states, lr_closed)) = queue.pop_front() {
        let lr_open: BTreeSet<LrItem> = lr_closed
            .iter()
            .copied()
            .filter(|&i| !lr.is_completion(i))
            .collect();
        assert_eq!(closure_of(&states), lr_open, "{g}");
        if !seen.insert(states.clone()) {
            continue;
        }
        let mut by_symbol: HashMap<CfgSymbol, BTreeSet<StateId>> = HashMap::new();
        for &s in &states {
            for (&(sign, e), &t) in &a.state(s).transitions {
                if let (Sign::Pos, Some(sym)) = (sign, symbol_of(e)) {
                    by_symbol.entry(sym).or_default().insert(t);
                }
            }
        }
        for (sym, targets) in by_symbol {
            let targets: Vec<StateId> = targets.into_iter().collect();
            let lr_kernel = lr.goto(&lr_closed, sym);
            assert_eq!(kernel_of(&targets), lr_kernel, "{g}");
            if !lr_kernel.is_empty() {
                queue.push_back((targets, lr.closure(&lr_kernel)));
            }
        }
    }
}

#[test]
fn context_free_positive_fragment_is_lr0() {
    check_positive_fragment(&corpus::brackets());
    check_positive_fragment(&corpus::footnote());
    for seed in 0..40 {
        check_positive_fragment(&random_cfg(seed, GenConfig::default()));
    }
}

#[test]
fn accepting_states_hold_completed_start_items() {
    for g in grammars() {
        let a: Automaton = build_automaton(&g, &compute_nullability(&g));
        for &(s, sign) in &a.accept {
            assert!(a.state(s).is_kernel(&Item::new(sign, g.start_node(), 1)));
        }
        for sign in [Sign::Pos, Sign::Neg] {
            let t = a.state(a.initial).goto(sign, g.start_node()).unwrap();
            assert!(a.accept.contains(&(t, sign)));
        }
    }
}
