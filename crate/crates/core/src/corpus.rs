//! The reference grammars shipped in `grammars/`.

use crate::grammar::{parse_grammar, Grammar};

pub const WW: &str = include_str!("../../../grammars/ww.bg");
pub const FOOTNOTE: &str = include_str!("../../../grammars/footnote.bg");
pub const CONTRADICTORY: &str = include_str!("../../../grammars/contradictory.bg");
pub const UNDERDETERMINED: &str = include_str!("../../../grammars/underdetermined.bg");
pub const BRACKETS: &str = include_str!("../../../grammars/brackets.bg");
pub const ANBNCN: &str = include_str!("../../../grammars/anbncn.bg");
pub const NOT_ANBN: &str = include_str!("../../../grammars/not_anbn.bg");

/// `(name, source)` for every shipped grammar.
pub const ALL: [(&str, &str); 7] = [
    ("ww", WW),
    ("footnote", FOOTNOTE),
    ("contradictory", CONTRADICTORY),
    ("underdetermined", UNDERDETERMINED),
    ("brackets", BRACKETS),
    ("anbncn", ANBNCN),
    ("not_anbn", NOT_ANBN),
];

fn load(src: &str) -> Grammar {
    parse_grammar(src).expect("shipped grammar must parse")
}

/// `{ uu : u ∈ {a,b}* }`.
pub fn ww() -> Grammar {
    load(WW)
}

/// `A → ε ∨ A; S → A b`.
pub fn footnote() -> Grammar {
    load(FOOTNOTE)
}

/// `S → ¬S`.
pub fn contradictory() -> Grammar {
    load(CONTRADICTORY)
}

/// `S → S`.
pub fn underdetermined() -> Grammar {
    load(UNDERDETERMINED)
}

pub fn brackets() -> Grammar {
    load(BRACKETS)
}

pub fn anbncn() -> Grammar {
    load(ANBNCN)
}

pub fn not_anbn() -> Grammar {
    load(NOT_ANBN)
}
