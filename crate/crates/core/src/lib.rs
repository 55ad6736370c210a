//! Three-valued recognition for Boolean grammars under the entailment
//! (Fitting) semantics.
//!
//! Two independent engines decide whether a word is included (`+`),
//! excluded (`-`) or indeterminate (`~`):
//!
//! * [`oracle`] iterates the Φ operator over the atoms a word induces, and
//! * [`gss`] is a GLR-style recognizer running over a graph-structured
//!   stack, driven by the signed-item automaton from [`automaton`].
//!
//! ```
//! use boolglr::{corpus, Recognizer, TruthValue};
//!
//! let g = corpus::ww();
//! let r = Recognizer::new(&g);
//! assert_eq!(r.parse("abab").unwrap().final_verdict(), TruthValue::True);
//! assert_eq!(boolglr::oracle::classify(&g, "aba").unwrap(), TruthValue::False);
//! ```

pub mod automaton;
pub mod corpus;
pub mod generate;
pub mod grammar;
pub mod gss;
pub mod nullability;
pub mod oracle;
pub mod reference;
pub mod trivalue;

pub use automaton::{build_automaton, Automaton, Item, Sign, StateId, TransitionLabel};
pub use grammar::{parse_grammar, ExprId, Grammar, GrammarError, GrammarExpr, Rule, VarId};
pub use gss::{parse, ParseError, ParseResult, Recognizer};
pub use nullability::{compute_nullability, NullabilityMap};
pub use trivalue::TruthValue;
