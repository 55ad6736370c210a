//! Kleene's strong three-valued logic and three-valued languages.
//!
//! Truth values are ordered by *certainty*: `Unknown` lies below both `True`
//! and `False`, which are incomparable. The connectives are monotone in that
//! order, which is what makes the fixpoint iteration of the oracle converge.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// One of the three truth values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TruthValue {
    True,
    False,
    Unknown,
}

pub use TruthValue::{False, True, Unknown};

impl TruthValue {
    pub const ALL: [TruthValue; 3] = [True, False, Unknown];

    /// The glyph used in all textual output: `+`, `-` or `~`.
    pub fn glyph(self) -> char {
        match self {
            True => '+',
            False => '-',
            Unknown => '~',
        }
    }

    pub fn from_glyph(c: char) -> Option<Self> {
        match c {
            '+' => Some(True),
            '-' => Some(False),
            '~' => Some(Unknown),
            _ => None,
        }
    }

    pub fn is_determinate(self) -> bool {
        self != Unknown
    }
}

impl From<bool> for TruthValue {
    fn from(b: bool) -> Self {
        if b {
            True
        } else {
            False
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.glyph())
    }
}

impl std::ops::Not for TruthValue {
    type Output = TruthValue;

    fn not(self) -> TruthValue {
        neg(self)
    }
}

pub fn neg(v: TruthValue) -> TruthValue {
    match v {
        True => False,
        False => True,
        Unknown => Unknown,
    }
}

/// N-ary strong conjunction. `False` dominates, then `Unknown`.
pub fn conj<I: IntoIterator<Item = TruthValue>>(vs: I) -> TruthValue {
    let mut acc = True;
    for v in vs {
        match v {
            False => return False,
            Unknown => acc = Unknown,
            True => {}
        }
    }
    acc
}

/// N-ary strong disjunction. `True` dominates, then `Unknown`.
pub fn disj<I: IntoIterator<Item = TruthValue>>(vs: I) -> TruthValue {
    let mut acc = False;
    for v in vs {
        match v {
            True => return True,
            Unknown => acc = Unknown,
            False => {}
        }
    }
    acc
}

/// The certainty order: `a ≼ b` iff `a == b` or `a` is `Unknown`.
pub fn leq_certainty(a: TruthValue, b: TruthValue) -> bool {
    a == b || a == Unknown
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("inconsistent truth values {0} and {1} have no supremum")]
pub struct Inconsistent(pub TruthValue, pub TruthValue);

/// Least upper bound in the certainty order. `True` and `False` have none.
pub fn sup(a: TruthValue, b: TruthValue) -> Result<TruthValue, Inconsistent> {
    match (a, b) {
        (Unknown, x) | (x, Unknown) => Ok(x),
        (x, y) if x == y => Ok(x),
        (x, y) => Err(Inconsistent(x, y)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SampleError {
    #[error("word {word:?} is longer than the sample bound {bound}")]
    OutOfBounds { word: String, bound: usize },
    #[error("symbol {0:?} is not in the sample alphabet")]
    ForeignSymbol(char),
}

/// A three-valued language given by its characteristic function on every word
/// up to a length bound. Words not listed explicitly take the default value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageSample {
    alphabet: Vec<char>,
    bound: usize,
    explicit: BTreeMap<String, TruthValue>,
    default: TruthValue,
}

impl LanguageSample {
    pub fn new(
        alphabet: impl IntoIterator<Item = char>,
        bound: usize,
        default: TruthValue,
    ) -> Self {
        let mut alphabet: Vec<char> = alphabet.into_iter().collect();
        alphabet.sort_unstable();
        alphabet.dedup();
        LanguageSample {
            alphabet,
            bound,
            explicit: BTreeMap::new(),
            default,
        }
    }

    /// Builds a sample from `(word, value)` pairs; every other word is `default`.
    pub fn from_pairs<'a>(
        alphabet: impl IntoIterator<Item = char>,
        bound: usize,
        default: TruthValue,
        pairs: impl IntoIterator<Item = (&'a str, TruthValue)>,
    ) -> Self {
        let mut s = Self::new(alphabet, bound, default);
        for (w, v) in pairs {
            s.set(w, v);
        }
        s
    }

    /// Tabulates `f` on every word up to `bound`.
    pub fn tabulate(
        alphabet: impl IntoIterator<Item = char>,
        bound: usize,
        mut f: impl FnMut(&str) -> TruthValue,
    ) -> Self {
        let mut s = Self::new(alphabet, bound, Unknown);
        for w in words_up_to(&s.alphabet, bound) {
            let v = f(&w);
            s.explicit.insert(w, v);
        }
        s
    }

    pub fn set(&mut self, word: &str, v: TruthValue) {
        assert!(
            word.chars().count() <= self.bound,
            "word beyond sample bound"
        );
        self.explicit.insert(word.to_string(), v);
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    /// The characteristic value `L(w)`.
    pub fn value(&self, w: &str) -> Result<TruthValue, SampleError> {
        if let Some(c) = w.chars().find(|c| !self.alphabet.contains(c)) {
            return Err(SampleError::ForeignSymbol(c));
        }
        if w.chars().count() > self.bound {
            return Err(SampleError::OutOfBounds {
                word: w.to_string(),
                bound: self.bound,
            });
        }
        Ok(self.explicit.get(w).copied().unwrap_or(self.default))
    }

    /// The included words `L⊤` within the bound.
    pub fn included(&self) -> Vec<String> {
        self.words_with(True)
    }

    /// The excluded words `L⊥` within the bound.
    pub fn excluded(&self) -> Vec<String> {
        self.words_with(False)
    }

    fn words_with(&self, v: TruthValue) -> Vec<String> {
        words_up_to(&self.alphabet, self.bound)
            .filter(|w| self.value(w) == Ok(v))
            .collect()
    }
}

/// `L̄(w) = ¬L(w)`.
pub fn complement_characteristic(l: &LanguageSample, w: &str) -> Result<TruthValue, SampleError> {
    Ok(neg(l.value(w)?))
}

/// `(L1 ∪ … ∪ Ln)(w)`.
pub fn union_characteristic(langs: &[LanguageSample], w: &str) -> Result<TruthValue, SampleError> {
    let vs = langs
        .iter()
        .map(|l| l.value(w))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(disj(vs))
}

/// `(L1 ∩ … ∩ Ln)(w)`.
pub fn intersection_characteristic(
    langs: &[LanguageSample],
    w: &str,
) -> Result<TruthValue, SampleError> {
    let vs = langs
        .iter()
        .map(|l| l.value(w))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(conj(vs))
}

/// `(L1 ⋯ Ln)(w)`: disjunction over every n-partition of `w` of the
/// conjunction of the part values. Enumerates partitions explicitly.
pub fn concat_characteristic(langs: &[LanguageSample], w: &str) -> Result<TruthValue, SampleError> {
    let chars: Vec<char> = w.chars().collect();
    for l in langs {
        l.value(w)?;
    }
    if langs.is_empty() {
        return Ok((chars.is_empty()).into());
    }
    let mut acc = False;
    for cuts in partitions(chars.len(), langs.len()) {
        let mut parts = Vec::with_capacity(langs.len());
        for (i, l) in langs.iter().enumerate() {
            let part: String = chars[cuts[i]..cuts[i + 1]].iter().collect();
            parts.push(l.value(&part)?);
        }
        acc = disj([acc, conj(parts)]);
        if acc == True {
            break;
        }
    }
    Ok(acc)
}

/// All n-partitions of a length, as cut-point vectors `0 = c0 ≤ c1 ≤ … ≤ cn = len`.
pub fn partitions(len: usize, n: usize) -> Vec<Vec<usize>> {
    fn go(pos: usize, len: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 1 {
            cur.push(len);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for next in pos..=len {
            cur.push(next);
            go(next, len, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if len == 0 {
            out.push(vec![0]);
        }
        return out;
    }
    let mut cur = vec![0];
    go(0, len, n, &mut cur, &mut out);
    out
}

/// Every word over `alphabet` of length at most `bound`, shortest first.
pub fn words_up_to(alphabet: &[char], bound: usize) -> impl Iterator<Item = String> + '_ {
    (0..=bound).flat_map(move |len| words_of_len(alphabet, len))
}

/// Every word over `alphabet` of exactly `len` symbols in lexicographic order.
pub fn words_of_len(alphabet: &[char], len: usize) -> impl Iterator<Item = String> + '_ {
    let k = alphabet.len();
    let total = if k == 0 {
        usize::from(len == 0)
    } else {
        k.pow(len as u32)
    };
    (0..total).map(move |mut idx| {
        let mut buf = vec![' '; len];
        for slot in buf.iter_mut().rev() {
            *slot = alphabet[idx % k];
            idx /= k;
        }
        buf.into_iter().collect()
    })
}
