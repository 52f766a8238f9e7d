//! Lexer and recursive descent parser for the concrete term grammar.
//!
//! ```text
//! term   := par
//! par    := choice ("|[" actlist "]|" choice)*
//! choice := disj ("[]" disj)*
//! disj   := conj ("\/" conj)*
//! conj   := unary ("/\" unary)*
//! unary  := "0" | "bot" | act "." unary | VAR | "<" VAR "|" bindings ">" | "(" term ")"
//! act    := "tau" | lowercase-ident
//! ```
//!
//! Operators are left-associative; precedence from tight to loose is
//! prefix, conjunction, disjunction, external choice, parallel.

use super::{Action, Alphabet, RecSpec, SyncSet, Term, VarName};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: expected {expected}, found {found}")]
    Syntax {
        pos: usize,
        expected: String,
        found: String,
    },
    #[error("unknown action `{name}` at byte {pos}: not in the declared alphabet")]
    UnknownAction { name: String, pos: usize },
    #[error("unguarded recursion: variable `{var}` has an unguarded occurrence")]
    UnguardedRecursion { var: VarName },
    #[error("duplicate bound variable `{var}` in recursive specification")]
    DuplicateBoundVariable { var: VarName },
    #[error("initial variable `{var}` is not bound by the specification")]
    InitNotBound { var: VarName },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Zero,
    Bot,
    Tau,
    Act(String),
    Var(String),
    Dot,
    ChoiceOp,  // []
    Wedge,     // /\
    Vee,       // \/
    ParOpen,   // |[
    ParClose,  // ]|
    Lt,
    Gt,
    Pipe,
    Eq,
    Comma,
    LParen,
    RParen,
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tok::Zero => "`0`",
            Tok::Bot => "`bot`",
            Tok::Tau => "`tau`",
            Tok::Act(_) => "action name",
            Tok::Var(_) => "variable",
            Tok::Dot => "`.`",
            Tok::ChoiceOp => "`[]`",
            Tok::Wedge => "`/\\`",
            Tok::Vee => "`\\/`",
            Tok::ParOpen => "`|[`",
            Tok::ParClose => "`]|`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::Pipe => "`|`",
            Tok::Eq => "`=`",
            Tok::Comma => "`,`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::Eof => "end of input",
        };
        write!(f, "{s}")
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            c if c.is_whitespace() => i += 1,
            '0' => {
                toks.push((Tok::Zero, i));
                i += 1;
            }
            '.' => {
                toks.push((Tok::Dot, i));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, i));
                i += 1;
            }
            '=' => {
                toks.push((Tok::Eq, i));
                i += 1;
            }
            '<' => {
                toks.push((Tok::Lt, i));
                i += 1;
            }
            '>' => {
                toks.push((Tok::Gt, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '[' => {
                if bytes.get(i + 1) == Some(&b']') {
                    toks.push((Tok::ChoiceOp, i));
                    i += 2;
                } else {
                    return Err(err_at(i, "`[]`", &format!("`{c}`")));
                }
            }
            ']' => {
                if bytes.get(i + 1) == Some(&b'|') {
                    toks.push((Tok::ParClose, i));
                    i += 2;
                } else {
                    return Err(err_at(i, "`]|`", &format!("`{c}`")));
                }
            }
            '|' => {
                if bytes.get(i + 1) == Some(&b'[') {
                    toks.push((Tok::ParOpen, i));
                    i += 2;
                } else {
                    toks.push((Tok::Pipe, i));
                    i += 1;
                }
            }
            '/' => {
                if bytes.get(i + 1) == Some(&b'\\') {
                    toks.push((Tok::Wedge, i));
                    i += 2;
                } else {
                    return Err(err_at(i, "`/\\`", "`/`"));
                }
            }
            '\\' => {
                if bytes.get(i + 1) == Some(&b'/') {
                    toks.push((Tok::Vee, i));
                    i += 2;
                } else {
                    return Err(err_at(i, "`\\/`", "`\\`"));
                }
            }
            c if c.is_ascii_lowercase() => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                toks.push((
                    match word {
                        "bot" => Tok::Bot,
                        "tau" => Tok::Tau,
                        _ => Tok::Act(word.to_string()),
                    },
                    start,
                ));
            }
            c if c.is_ascii_uppercase() => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Var(text[start..i].to_string()), start));
            }
            _ => return Err(err_at(i, "a token", &format!("`{c}`"))),
        }
    }
    toks.push((Tok::Eof, text.len()));
    Ok(toks)
}

fn err_at(pos: usize, expected: &str, found: &str) -> ParseError {
    ParseError::Syntax {
        pos,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    alphabet: &'a Alphabet,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(err_at(
                self.here(),
                &want.to_string(),
                &self.peek().to_string(),
            ))
        }
    }

    fn check_action(&self, name: &str, pos: usize) -> Result<(), ParseError> {
        if self.alphabet.contains(name) {
            Ok(())
        } else {
            Err(ParseError::UnknownAction {
                name: name.to_string(),
                pos,
            })
        }
    }

    fn parse_term(&mut self) -> Result<Term, ParseError> {
        let mut t = self.parse_choice()?;
        while *self.peek() == Tok::ParOpen {
            self.bump();
            let sync = self.parse_actlist()?;
            self.expect(Tok::ParClose)?;
            let r = self.parse_choice()?;
            t = Term::par(sync, t, r);
        }
        Ok(t)
    }

    fn parse_actlist(&mut self) -> Result<SyncSet, ParseError> {
        let mut sync = SyncSet::new();
        if *self.peek() == Tok::ParClose {
            return Ok(sync);
        }
        loop {
            let pos = self.here();
            match self.bump() {
                Tok::Act(name) => {
                    self.check_action(&name, pos)?;
                    sync.insert(name);
                }
                Tok::Tau => {
                    return Err(err_at(pos, "a visible action (tau cannot synchronize)", "`tau`"))
                }
                other => return Err(err_at(pos, "action name", &other.to_string())),
            }
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        Ok(sync)
    }

    fn parse_choice(&mut self) -> Result<Term, ParseError> {
        let mut t = self.parse_disj()?;
        while *self.peek() == Tok::ChoiceOp {
            self.bump();
            let r = self.parse_disj()?;
            t = Term::choice(t, r);
        }
        Ok(t)
    }

    fn parse_disj(&mut self) -> Result<Term, ParseError> {
        let mut t = self.parse_conj()?;
        while *self.peek() == Tok::Vee {
            self.bump();
            let r = self.parse_conj()?;
            t = Term::disj(t, r);
        }
        Ok(t)
    }

    fn parse_conj(&mut self) -> Result<Term, ParseError> {
        let mut t = self.parse_unary()?;
        while *self.peek() == Tok::Wedge {
            self.bump();
            let r = self.parse_unary()?;
            t = Term::conj(t, r);
        }
        Ok(t)
    }

    fn parse_unary(&mut self) -> Result<Term, ParseError> {
        let pos = self.here();
        match self.bump() {
            Tok::Zero => Ok(Term::Nil),
            Tok::Bot => Ok(Term::Bot),
            Tok::Tau => {
                self.expect(Tok::Dot)?;
                Ok(Term::prefix(Action::Tau, self.parse_unary()?))
            }
            Tok::Act(name) => {
                self.check_action(&name, pos)?;
                self.expect(Tok::Dot)?;
                Ok(Term::prefix(Action::Act(name), self.parse_unary()?))
            }
            Tok::Var(x) => Ok(Term::Var(x)),
            Tok::Lt => self.parse_rec(),
            Tok::LParen => {
                let t = self.parse_term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => Err(err_at(pos, "a term", &other.to_string())),
        }
    }

    fn parse_rec(&mut self) -> Result<Term, ParseError> {
        let pos = self.here();
        let init = match self.bump() {
            Tok::Var(x) => x,
            other => return Err(err_at(pos, "variable", &other.to_string())),
        };
        self.expect(Tok::Pipe)?;
        let mut bindings: Vec<(VarName, Term)> = Vec::new();
        loop {
            let pos = self.here();
            let var = match self.bump() {
                Tok::Var(x) => x,
                other => return Err(err_at(pos, "variable", &other.to_string())),
            };
            if bindings.iter().any(|(v, _)| *v == var) {
                return Err(ParseError::DuplicateBoundVariable { var });
            }
            self.expect(Tok::Eq)?;
            let body = self.parse_term()?;
            bindings.push((var, body));
            if *self.peek() == Tok::Comma {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::Gt)?;
        let rec = RecSpec {
            init: init.clone(),
            bindings,
        };
        if !rec.binds(&init) {
            return Err(ParseError::InitNotBound { var: init });
        }
        Ok(Term::Rec(rec))
    }
}

/// Parse a term over the given alphabet and validate the recursion
/// invariants (distinct bound variables, guardedness).
pub fn parse_term(text: &str, alphabet: &Alphabet) -> Result<Term, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
        alphabet,
    };
    let term = parser.parse_term()?;
    if *parser.peek() != Tok::Eof {
        return Err(err_at(
            parser.here(),
            "end of input",
            &parser.peek().to_string(),
        ));
    }
    super::validate_guardedness(&term)
        .map_err(|var| ParseError::UnguardedRecursion { var })?;
    Ok(term)
}

/// Parse a comma-separated alphabet declaration such as `a,b,c`.
pub fn parse_alphabet(text: &str) -> Result<Alphabet, ParseError> {
    let mut names = Vec::new();
    for part in text.split(',') {
        let name = part.trim();
        if name.is_empty() {
            continue;
        }
        let ok = name.chars().next().is_some_and(|c| c.is_ascii_lowercase())
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            && name != "tau"
            && name != "bot";
        if !ok {
            return Err(ParseError::Syntax {
                pos: 0,
                expected: "lowercase action name".to_string(),
                found: format!("`{name}`"),
            });
        }
        names.push(name.to_string());
    }
    Ok(Alphabet::new(names))
}
