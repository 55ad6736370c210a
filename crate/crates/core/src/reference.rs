//! Two-valued reference recognizers for context-free grammars, written
//! without any of the three-valued machinery so they can cross-check it.

use std::collections::{BTreeSet, HashSet};

use crate::grammar::{ExprId, Grammar, NodeKind, VarId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CfgSymbol {
    T(char),
    N(VarId),
}

/// Plain productions `X → s1 … sk`.
#[derive(Debug, Clone)]
pub struct Cfg {
    pub start: VarId,
    pub variables: usize,
    pub productions: Vec<(VarId, Vec<CfgSymbol>)>,
}

fn alternatives(g: &Grammar, e: ExprId) -> Option<Vec<Vec<CfgSymbol>>> {
    Some(match g.kind(e) {
        NodeKind::Epsilon => vec![vec![]],
        NodeKind::Terminal(c) => vec![vec![CfgSymbol::T(*c)]],
        NodeKind::Variable(v) => vec![vec![CfgSymbol::N(*v)]],
        NodeKind::Disjunction(cs) => {
            let mut out = Vec::new();
            for &c in cs {
                out.extend(alternatives(g, c)?);
            }
            out
        }
        NodeKind::Concatenation(cs) => {
            let mut acc = vec![vec![]];
            for &c in cs {
                let alts = alternatives(g, c)?;
                acc = acc
                    .iter()
                    .flat_map(|pre| {
                        alts.iter().map(move |a| {
                            let mut p: Vec<CfgSymbol> = pre.clone();
                            p.extend(a);
                            p
                        })
                    })
                    .collect();
            }
            acc
        }
        NodeKind::Negation(_) | NodeKind::Conjunction(_) => return None,
    })
}

impl Cfg {
    /// `None` if the grammar uses negation or conjunction.
    pub fn from_grammar(g: &Grammar) -> Option<Cfg> {
        let mut productions = Vec::new();
        for v in g.var_ids() {
            let mut seen = HashSet::new();
            for alt in alternatives(g, g.body(v))? {
                if seen.insert(alt.clone()) {
                    productions.push((v, alt));
                }
            }
        }
        Some(Cfg {
            start: g.start(),
            variables: g.variables().len(),
            productions,
        })
    }

    /// Variables deriving the empty word.
    pub fn nullable(&self) -> Vec<bool> {
        let mut null = vec![false; self.variables];
        let mut changed = true;
        while changed {
            changed = false;
            for (head, rhs) in &self.productions {
                if !null[head.0 as usize]
                    && rhs
                        .iter()
                        .all(|s| matches!(s, CfgSymbol::N(v) if null[v.0 as usize]))
                {
                    null[head.0 as usize] = true;
                    changed = true;
                }
            }
        }
        null
    }

    /// Words of length at most `bound` derivable from each variable,
    /// assembled bottom-up from derivations of shorter or equal words until
    /// nothing new appears.
    pub fn language_up_to(&self, bound: usize) -> Vec<BTreeSet<String>> {
        let mut lang: Vec<BTreeSet<String>> = vec![BTreeSet::new(); self.variables];
        loop {
            let mut changed = false;
            for (head, rhs) in &self.productions {
                let mut words: BTreeSet<String> = BTreeSet::from([String::new()]);
                for s in rhs {
                    let mut next = BTreeSet::new();
                    for w in &words {
                        match s {
                            CfgSymbol::T(c) => {
                                if w.len() < bound {
                                    next.insert(format!("{w}{c}"));
                                }
                            }
                            CfgSymbol::N(v) => {
                                for x in &lang[v.0 as usize] {
                                    if w.len() + x.len() <= bound {
                                        next.insert(format!("{w}{x}"));
                                    }
                                }
                            }
                        }
                    }
                    words = next;
                }
                for w in words {
                    changed |= lang[head.0 as usize].insert(w);
                }
            }
            if !changed {
                return lang;
            }
        }
    }

    /// Earley recognition; entry `j` tells whether the prefix of length `j`
    /// derives from the start variable.
    pub fn earley_prefixes(&self, word: &str) -> Vec<bool> {
        let input: Vec<char> = word.chars().collect();
        let nullable = self.nullable();
        // (production, dot, origin)
        type EItem = (usize, usize, usize);
        let mut sets: Vec<Vec<EItem>> = vec![Vec::new(); input.len() + 1];
        let mut seen: Vec<HashSet<EItem>> = vec![HashSet::new(); input.len() + 1];
        let push =
            |sets: &mut Vec<Vec<EItem>>, seen: &mut Vec<HashSet<EItem>>, k: usize, it: EItem| {
                if seen[k].insert(it) {
                    sets[k].push(it);
                }
            };
        for (p, (head, _)) in self.productions.iter().enumerate() {
            if *head == self.start {
                push(&mut sets, &mut seen, 0, (p, 0, 0));
            }
        }
        for k in 0..=input.len() {
            let mut n = 0;
            while n < sets[k].len() {
                let (p, dot, origin) = sets[k][n];
                n += 1;
                let (head, rhs) = &self.productions[p];
                match rhs.get(dot) {
                    None => {
                        let waiting: Vec<EItem> = sets[origin]
                            .iter()
                            .copied()
                            .filter(|&(q, d, _)| {
                                self.productions[q].1.get(d) == Some(&CfgSymbol::N(*head))
                            })
                            .collect();
                        for (q, d, o) in waiting {
                            push(&mut sets, &mut seen, k, (q, d + 1, o));
                        }
                    }
                    Some(CfgSymbol::N(v)) => {
                        for (q, (h, _)) in self.productions.iter().enumerate() {
                            if h == v {
                                push(&mut sets, &mut seen, k, (q, 0, k));
                            }
                        }
                        if nullable[v.0 as usize] {
                            push(&mut sets, &mut seen, k, (p, dot + 1, origin));
                        }
                    }
                    Some(CfgSymbol::T(c)) => {
                        if input.get(k) == Some(c) {
                            push(&mut sets, &mut seen, k + 1, (p, dot + 1, origin));
                        }
                    }
                }
            }
        }
        (0..=input.len())
            .map(|k| {
                sets[k].iter().any(|&(p, dot, origin)| {
                    let (h, rhs) = &self.productions[p];
                    origin == 0 && *h == self.start && dot == rhs.len()
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::trivalue::words_up_to;

    fn balanced(w: &str) -> bool {
        let mut depth = 0i32;
        for c in w.chars() {
            depth += if c == '(' { 1 } else { -1 };
            if depth < 0 {
                return false;
            }
        }
        depth == 0
    }

    #[test]
    fn brackets_language() {
        let g = corpus::brackets();
        let cfg = Cfg::from_grammar(&g).unwrap();
        let lang = &cfg.language_up_to(6)[g.start().0 as usize];
        for w in words_up_to(g.alphabet(), 6) {
            assert_eq!(lang.contains(&w), balanced(&w), "{w}");
            assert_eq!(
                *cfg.earley_prefixes(&w).last().unwrap(),
                balanced(&w),
                "{w}"
            );
        }
    }

    #[test]
    fn boolean_grammars_have_no_cfg() {
        assert!(Cfg::from_grammar(&corpus::ww()).is_none());
        assert!(Cfg::from_grammar(&corpus::footnote()).is_some());
    }

    #[test]
    fn nullable_through_chains() {
        let g = corpus::footnote();
        let cfg = Cfg::from_grammar(&g).unwrap();
        assert_eq!(cfg.nullable(), vec![true, false]);
        assert_eq!(cfg.earley_prefixes("b"), vec![false, true]);
    }
}
