//! Surface syntax for grammar files.
//!
//! ```text
//! # the ww language
//! S -> !(A | B | A B | B A) ;
//! A -> C A C | "a" ;
//! ```
//!
//! Precedence, tightest first: `!`, juxtaposition (concatenation), `&`, `|`.
//! `eps` is the empty word, `"xy"` a run of single-letter terminals.
//! `%start NAME ;` picks the start symbol and `%alphabet "ab" ;` adds letters
//! to Σ that no rule mentions.

use super::{Grammar, GrammarError, GrammarExpr, Rule};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    Directive(String),
    Arrow,
    Semi,
    Bar,
    Amp,
    Bang,
    LParen,
    RParen,
    Eps,
    Eof,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn err(line: usize, col: usize, msg: impl Into<String>) -> GrammarError {
    GrammarError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<Spanned>, GrammarError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let bump = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => bump(1, &mut i, &mut col),
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push(Spanned {
                    tok: Tok::Arrow,
                    line: l0,
                    col: c0,
                });
                bump(2, &mut i, &mut col);
            }
            ';' | '|' | '&' | '!' | '(' | ')' => {
                let tok = match c {
                    ';' => Tok::Semi,
                    '|' => Tok::Bar,
                    '&' => Tok::Amp,
                    '!' => Tok::Bang,
                    '(' => Tok::LParen,
                    _ => Tok::RParen,
                };
                out.push(Spanned {
                    tok,
                    line: l0,
                    col: c0,
                });
                bump(1, &mut i, &mut col);
            }
            '"' => {
                let mut s = String::new();
                bump(1, &mut i, &mut col);
                loop {
                    match chars.get(i) {
                        None | Some('\n') => {
                            return Err(err(l0, c0, "unterminated string literal"))
                        }
                        Some('"') => {
                            bump(1, &mut i, &mut col);
                            break;
                        }
                        Some('\\') => match chars.get(i + 1) {
                            Some(&e @ ('"' | '\\')) => {
                                s.push(e);
                                bump(2, &mut i, &mut col);
                            }
                            Some('n') => {
                                s.push('\n');
                                bump(2, &mut i, &mut col);
                            }
                            Some('t') => {
                                s.push('\t');
                                bump(2, &mut i, &mut col);
                            }
                            _ => return Err(err(line, col, "unknown escape sequence")),
                        },
                        Some(&ch) => {
                            s.push(ch);
                            bump(1, &mut i, &mut col);
                        }
                    }
                }
                out.push(Spanned {
                    tok: Tok::Str(s),
                    line: l0,
                    col: c0,
                });
            }
            '%' => {
                let start = i + 1;
                let mut j = start;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let name: String = chars[start..j].iter().collect();
                if name.is_empty() {
                    return Err(err(l0, c0, "expected directive name after '%'"));
                }
                out.push(Spanned {
                    tok: Tok::Directive(name),
                    line: l0,
                    col: c0,
                });
                bump(j - i, &mut i, &mut col);
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'')
                {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = if word == "eps" {
                    Tok::Eps
                } else {
                    Tok::Ident(word)
                };
                out.push(Spanned {
                    tok,
                    line: l0,
                    col: c0,
                });
                bump(j - i, &mut i, &mut col);
            }
            other => return Err(err(l0, c0, format!("unexpected character {other:?}"))),
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), GrammarError> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            let (l, c) = self.here();
            Err(err(
                l,
                c,
                format!("expected {what}, found {}", describe(self.peek())),
            ))
        }
    }

    fn starts_factor(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_) | Tok::Str(_) | Tok::Eps | Tok::Bang | Tok::LParen
        )
    }

    fn disjunction(&mut self) -> Result<GrammarExpr, GrammarError> {
        let mut parts = vec![self.conjunction()?];
        while *self.peek() == Tok::Bar {
            self.next();
            parts.push(self.conjunction()?);
        }
        Ok(collapse(parts, GrammarExpr::Disjunction))
    }

    fn conjunction(&mut self) -> Result<GrammarExpr, GrammarError> {
        let mut parts = vec![self.concatenation()?];
        while *self.peek() == Tok::Amp {
            self.next();
            parts.push(self.concatenation()?);
        }
        Ok(collapse(parts, GrammarExpr::Conjunction))
    }

    fn concatenation(&mut self) -> Result<GrammarExpr, GrammarError> {
        if !self.starts_factor() {
            let (l, c) = self.here();
            return Err(err(
                l,
                c,
                format!("expected an expression, found {}", describe(self.peek())),
            ));
        }
        let mut parts = Vec::new();
        while self.starts_factor() {
            parts.push(self.unary()?);
        }
        Ok(collapse(parts, GrammarExpr::Concatenation))
    }

    fn unary(&mut self) -> Result<GrammarExpr, GrammarError> {
        if *self.peek() == Tok::Bang {
            self.next();
            return Ok(GrammarExpr::Negation(Box::new(self.unary()?)));
        }
        match self.next() {
            Tok::Ident(name) => Ok(GrammarExpr::Variable(name)),
            Tok::Eps => Ok(GrammarExpr::Epsilon),
            Tok::Str(s) => {
                let mut ts: Vec<GrammarExpr> = s.chars().map(GrammarExpr::Terminal).collect();
                Ok(match ts.len() {
                    0 => GrammarExpr::Epsilon,
                    1 => ts.pop().unwrap(),
                    _ => GrammarExpr::Concatenation(ts),
                })
            }
            Tok::LParen => {
                let e = self.disjunction()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            _ => unreachable!("guarded by starts_factor"),
        }
    }
}

fn collapse(
    mut parts: Vec<GrammarExpr>,
    build: fn(Vec<GrammarExpr>) -> GrammarExpr,
) -> GrammarExpr {
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        build(parts)
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier {s}"),
        Tok::Str(s) => format!("string {s:?}"),
        Tok::Directive(d) => format!("directive %{d}"),
        Tok::Arrow => "'->'".into(),
        Tok::Semi => "';'".into(),
        Tok::Bar => "'|'".into(),
        Tok::Amp => "'&'".into(),
        Tok::Bang => "'!'".into(),
        Tok::LParen => "'('".into(),
        Tok::RParen => "')'".into(),
        Tok::Eps => "eps".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses, normalizes and validates a grammar file.
pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut rules = Vec::new();
    let mut start: Option<String> = None;
    let mut alphabet = Vec::new();
    loop {
        let (l, c) = p.here();
        match p.next() {
            Tok::Eof => break,
            Tok::Directive(d) if d == "start" => match p.next() {
                Tok::Ident(name) => {
                    start = Some(name);
                    p.expect(Tok::Semi, "';'")?;
                }
                other => {
                    return Err(err(
                        l,
                        c,
                        format!("%start expects a variable, found {}", describe(&other)),
                    ))
                }
            },
            Tok::Directive(d) if d == "alphabet" => match p.next() {
                Tok::Str(s) => {
                    alphabet.extend(s.chars());
                    p.expect(Tok::Semi, "';'")?;
                }
                other => {
                    return Err(err(
                        l,
                        c,
                        format!("%alphabet expects a string, found {}", describe(&other)),
                    ))
                }
            },
            Tok::Directive(d) => return Err(err(l, c, format!("unknown directive %{d}"))),
            Tok::Ident(head) => {
                p.expect(Tok::Arrow, "'->'")?;
                let body = p.disjunction()?;
                p.expect(Tok::Semi, "';'")?;
                rules.push(Rule { head, body });
            }
            other => {
                return Err(err(
                    l,
                    c,
                    format!("expected a rule, found {}", describe(&other)),
                ))
            }
        }
    }
    Grammar::new(rules, start.as_deref(), &alphabet)
}

pub(super) fn quote(s: &str) -> String {
    let mut out = String::from("\"");
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn precedence(e: &GrammarExpr) -> u8 {
    match e {
        GrammarExpr::Disjunction(_) => 0,
        GrammarExpr::Conjunction(_) => 1,
        GrammarExpr::Concatenation(_) => 2,
        GrammarExpr::Negation(_) => 3,
        _ => 4,
    }
}

/// Renders an expression in the surface syntax with minimal parentheses.
pub fn render_expr(e: &GrammarExpr) -> String {
    fn go(e: &GrammarExpr, min: u8, out: &mut String) {
        let paren = precedence(e) < min;
        if paren {
            out.push('(');
        }
        let join = |cs: &[GrammarExpr], sep: &str, min: u8, out: &mut String| {
            for (i, c) in cs.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                go(c, min, out);
            }
        };
        match e {
            GrammarExpr::Epsilon => out.push_str("eps"),
            GrammarExpr::Terminal(c) => out.push_str(&quote(&c.to_string())),
            GrammarExpr::Variable(v) => out.push_str(v),
            GrammarExpr::Negation(c) => {
                out.push('!');
                go(c, 3, out);
            }
            GrammarExpr::Disjunction(cs) => join(cs, " | ", 1, out),
            GrammarExpr::Conjunction(cs) => join(cs, " & ", 2, out),
            GrammarExpr::Concatenation(cs) => join(cs, " ", 3, out),
        }
        if paren {
            out.push(')');
        }
    }
    let mut out = String::new();
    go(e, 0, &mut out);
    out
}
