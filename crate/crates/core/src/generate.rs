//! Seeded random grammars for differential testing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grammar::{Grammar, GrammarExpr, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub variables: usize,
    pub max_depth: usize,
    pub max_width: usize,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            variables: 3,
            max_depth: 3,
            max_width: 3,
        }
    }
}

const ALPHABET: [char; 2] = ['a', 'b'];

fn var_names(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| ((b'S' + i as u8) as char).to_string())
        .collect()
}

fn leaf(rng: &mut ChaCha8Rng, vars: &[String]) -> GrammarExpr {
    match rng.gen_range(0..6) {
        0 => GrammarExpr::Epsilon,
        1 | 2 => GrammarExpr::Terminal(*ALPHABET.choose(rng).unwrap()),
        _ => GrammarExpr::var(vars.choose(rng).unwrap()),
    }
}

/// An arbitrary, possibly unnormalized, Boolean expression.
pub fn random_expr(
    rng: &mut ChaCha8Rng,
    vars: &[String],
    depth: usize,
    width: usize,
) -> GrammarExpr {
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng, vars);
    }
    let kids = |rng: &mut ChaCha8Rng| -> Vec<GrammarExpr> {
        let n = rng.gen_range(1..=width.max(1));
        (0..n)
            .map(|_| random_expr(rng, vars, depth - 1, width))
            .collect()
    };
    match rng.gen_range(0..4) {
        0 => GrammarExpr::negate(random_expr(rng, vars, depth - 1, width)),
        1 => GrammarExpr::Disjunction(kids(rng)),
        2 => GrammarExpr::Conjunction(kids(rng)),
        _ => GrammarExpr::Concatenation(kids(rng)),
    }
}

/// A Boolean grammar over `{a, b}` with `cfg.variables` rules.
pub fn random_boolean_grammar(seed: u64, cfg: GenConfig) -> Grammar {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars = var_names(cfg.variables.max(1));
    let rules = vars
        .iter()
        .map(|h| {
            Rule::new(
                h,
                random_expr(&mut rng, &vars, cfg.max_depth, cfg.max_width),
            )
        })
        .collect();
    Grammar::new(rules, None, &ALPHABET).expect("generated grammar is well formed")
}

/// A context-free grammar over `{a, b}`: each body is a disjunction of
/// concatenations of terminals and variables.
pub fn random_cfg(seed: u64, cfg: GenConfig) -> Grammar {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vars = var_names(cfg.variables.max(1));
    let rules = vars
        .iter()
        .map(|h| {
            let alts = rng.gen_range(1..=cfg.max_width.max(1));
            let body = (0..alts)
                .map(|_| {
                    let len = rng.gen_range(0..=cfg.max_width);
                    let parts: Vec<GrammarExpr> = (0..len)
                        .map(|_| {
                            if rng.gen_bool(0.5) {
                                GrammarExpr::Terminal(*ALPHABET.choose(&mut rng).unwrap())
                            } else {
                                GrammarExpr::var(vars.choose(&mut rng).unwrap())
                            }
                        })
                        .collect();
                    GrammarExpr::Concatenation(parts)
                })
                .collect();
            Rule::new(h, GrammarExpr::Disjunction(body))
        })
        .collect();
    Grammar::new(rules, None, &ALPHABET).expect("generated grammar is well formed")
}
