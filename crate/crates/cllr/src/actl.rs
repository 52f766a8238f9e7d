//! An action-based CTL fragment: formula parsing, the encoding into CLL_R
//! terms, a direct satisfaction checker over state graphs, and the
//! refinement-based checker. The two checkers must agree; the compatibility
//! theorem says `p |= f` iff `p` refines the encoding of `f`.

use crate::refinement::{refines, weak_a_f, weak_eps_f};
use crate::semantics::{build_lts, BuildError, Lts, StateId};
use crate::syntax::{ActName, Action, Alphabet, Term};
use std::collections::BTreeSet;
use thiserror::Error;

/// Encodings are exponential in the alphabet size (one disjunct per subset),
/// so refuse alphabets beyond this many actions.
pub const ALPHABET_CAP: usize = 4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ActlError {
    #[error("syntax error at {pos}: expected {expected}, found {found}")]
    Syntax {
        pos: usize,
        expected: String,
        found: String,
    },
    #[error("action {0} is not in the alphabet")]
    UnknownAction(ActName),
    #[error("alphabet must be nonempty")]
    EmptyAlphabet,
    #[error("alphabet has {size} actions; encodings need 2^|alphabet| disjuncts, capped at {cap} actions")]
    AlphabetTooLarge { size: usize, cap: usize },
    #[error("empty general disjunction")]
    EmptyDisjunction,
    #[error("empty general conjunction")]
    EmptyConjunction,
    #[error(transparent)]
    Build(#[from] BuildError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ActlFormula {
    TT,
    FF,
    En(ActName),
    Dis(ActName),
    Or(Box<ActlFormula>, Box<ActlFormula>),
    And(Box<ActlFormula>, Box<ActlFormula>),
    Box_(ActName, Box<ActlFormula>),
    Always(Box<ActlFormula>),
    WeakUntil(Box<ActlFormula>, Box<ActlFormula>),
}

impl std::fmt::Display for ActlFormula {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // Binding powers: W < \/ < /\ < [a]/A.
        fn go(phi: &ActlFormula, f: &mut std::fmt::Formatter<'_>, level: u8) -> std::fmt::Result {
            let my = match phi {
                ActlFormula::WeakUntil(..) => 1,
                ActlFormula::Or(..) => 2,
                ActlFormula::And(..) => 3,
                ActlFormula::Box_(..) | ActlFormula::Always(..) => 4,
                _ => 5,
            };
            if my < level {
                write!(f, "(")?;
            }
            match phi {
                ActlFormula::TT => write!(f, "tt")?,
                ActlFormula::FF => write!(f, "ff")?,
                ActlFormula::En(a) => write!(f, "en({a})")?,
                ActlFormula::Dis(a) => write!(f, "dis({a})")?,
                ActlFormula::Or(l, r) => {
                    go(l, f, 2)?;
                    write!(f, " \\/ ")?;
                    go(r, f, 3)?;
                }
                ActlFormula::And(l, r) => {
                    go(l, f, 3)?;
                    write!(f, " /\\ ")?;
                    go(r, f, 4)?;
                }
                ActlFormula::Box_(a, b) => {
                    write!(f, "[{a}] ")?;
                    go(b, f, 4)?;
                }
                ActlFormula::Always(b) => {
                    write!(f, "A ")?;
                    go(b, f, 4)?;
                }
                ActlFormula::WeakUntil(l, r) => {
                    go(l, f, 2)?;
                    write!(f, " W ")?;
                    go(r, f, 1)?;
                }
            }
            if my < level {
                write!(f, ")")?;
            }
            Ok(())
        }
        go(self, f, 0)
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    TT,
    FF,
    En,
    Dis,
    AlwaysKw,
    WeakKw,
    Name(String),
    Vee,
    Wedge,
    LParen,
    RParen,
    LBrack,
    RBrack,
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ActlError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '[' => {
                toks.push((i, Tok::LBrack));
                i += 1;
            }
            ']' => {
                toks.push((i, Tok::RBrack));
                i += 1;
            }
            '\\' if bytes.get(i + 1) == Some(&b'/') => {
                toks.push((i, Tok::Vee));
                i += 2;
            }
            '/' if bytes.get(i + 1) == Some(&b'\\') => {
                toks.push((i, Tok::Wedge));
                i += 2;
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = match word {
                    "tt" => Tok::TT,
                    "ff" => Tok::FF,
                    "en" => Tok::En,
                    "dis" => Tok::Dis,
                    "A" => Tok::AlwaysKw,
                    "W" => Tok::WeakKw,
                    _ => Tok::Name(word.to_string()),
                };
                toks.push((start, tok));
            }
            other => {
                return Err(ActlError::Syntax {
                    pos: i,
                    expected: "a formula token".into(),
                    found: other.to_string(),
                })
            }
        }
    }
    Ok(toks)
}

struct FParser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    alphabet: &'a Alphabet,
    end: usize,
}

impl<'a> FParser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn err<T>(&self, expected: &str) -> Result<T, ActlError> {
        Err(ActlError::Syntax {
            pos: self.here(),
            expected: expected.into(),
            found: self
                .peek()
                .map_or("end of input".into(), |t| format!("{t:?}")),
        })
    }

    fn eat(&mut self, want: &Tok, expected: &str) -> Result<(), ActlError> {
        if self.peek() == Some(want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(expected)
        }
    }

    fn action(&mut self) -> Result<ActName, ActlError> {
        match self.peek().cloned() {
            Some(Tok::Name(name)) => {
                if !self.alphabet.contains(&name) {
                    return Err(ActlError::UnknownAction(name));
                }
                self.pos += 1;
                Ok(name)
            }
            _ => self.err("an action name"),
        }
    }

    // weak-until level, right-associative: f W g W h = f W (g W h)
    fn weak(&mut self) -> Result<ActlFormula, ActlError> {
        let left = self.or()?;
        if self.peek() == Some(&Tok::WeakKw) {
            self.pos += 1;
            let right = self.weak()?;
            Ok(ActlFormula::WeakUntil(Box::new(left), Box::new(right)))
        } else {
            Ok(left)
        }
    }

    fn or(&mut self) -> Result<ActlFormula, ActlError> {
        let mut left = self.and()?;
        while self.peek() == Some(&Tok::Vee) {
            self.pos += 1;
            let right = self.and()?;
            left = ActlFormula::Or(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn and(&mut self) -> Result<ActlFormula, ActlError> {
        let mut left = self.unary()?;
        while self.peek() == Some(&Tok::Wedge) {
            self.pos += 1;
            let right = self.unary()?;
            left = ActlFormula::And(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<ActlFormula, ActlError> {
        match self.peek().cloned() {
            Some(Tok::LBrack) => {
                self.pos += 1;
                let a = self.action()?;
                self.eat(&Tok::RBrack, "]")?;
                let body = self.unary()?;
                Ok(ActlFormula::Box_(a, Box::new(body)))
            }
            Some(Tok::AlwaysKw) => {
                self.pos += 1;
                let body = self.unary()?;
                Ok(ActlFormula::Always(Box::new(body)))
            }
            Some(Tok::TT) => {
                self.pos += 1;
                Ok(ActlFormula::TT)
            }
            Some(Tok::FF) => {
                self.pos += 1;
                Ok(ActlFormula::FF)
            }
            Some(Tok::En) | Some(Tok::Dis) => {
                let en = self.peek() == Some(&Tok::En);
                self.pos += 1;
                self.eat(&Tok::LParen, "(")?;
                let a = self.action()?;
                self.eat(&Tok::RParen, ")")?;
                Ok(if en {
                    ActlFormula::En(a)
                } else {
                    ActlFormula::Dis(a)
                })
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.weak()?;
                self.eat(&Tok::RParen, ")")?;
                Ok(f)
            }
            _ => self.err("a formula"),
        }
    }
}

pub fn parse_actl(text: &str, alphabet: &Alphabet) -> Result<ActlFormula, ActlError> {
    if alphabet.is_empty() {
        return Err(ActlError::EmptyAlphabet);
    }
    let mut p = FParser {
        toks: lex(text)?,
        pos: 0,
        alphabet,
        end: text.len(),
    };
    let f = p.weak()?;
    if p.peek().is_some() {
        return p.err("end of input");
    }
    Ok(f)
}

// ---------------------------------------------------------------------------
// Encoding
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldOp {
    Choice,
    Disj,
    Conj,
}

/// General external choice, disjunction and conjunction over a list, folded
/// left-nested in list order. The empty choice is `0`; disjunction and
/// conjunction have no unit and reject the empty list.
pub fn gen_fold(op: FoldOp, items: Vec<Term>) -> Result<Term, ActlError> {
    let mut iter = items.into_iter();
    let first = match iter.next() {
        Some(t) => t,
        None => {
            return match op {
                FoldOp::Choice => Ok(Term::Nil),
                FoldOp::Disj => Err(ActlError::EmptyDisjunction),
                FoldOp::Conj => Err(ActlError::EmptyConjunction),
            }
        }
    };
    let combine = match op {
        FoldOp::Choice => Term::choice,
        FoldOp::Disj => Term::disj,
        FoldOp::Conj => Term::conj,
    };
    Ok(iter.fold(first, combine))
}

fn check_alphabet(alphabet: &Alphabet) -> Result<(), ActlError> {
    if alphabet.is_empty() {
        return Err(ActlError::EmptyAlphabet);
    }
    if alphabet.len() > ALPHABET_CAP {
        return Err(ActlError::AlphabetTooLarge {
            size: alphabet.len(),
            cap: ALPHABET_CAP,
        });
    }
    Ok(())
}

/// `E(tt)`: the process that can exhibit any ready set and any behaviour —
/// `<X | X = \/_{A ⊆ Act} []_{a ∈ A} a.X>`.
pub fn encode_tt(alphabet: &Alphabet) -> Result<Term, ActlError> {
    check_alphabet(alphabet)?;
    let disjuncts = alphabet
        .subsets()
        .map(|set| {
            gen_fold(
                FoldOp::Choice,
                set.iter()
                    .map(|a| Term::prefix(Action::act(a), Term::var("X")))
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Term::rec1("X", gen_fold(FoldOp::Disj, disjuncts)?))
}

/// The `|a|` operator: along an `a`-transition it is necessary that `body`.
/// One disjunct per ready set: sets containing `a` commit the `a`-branch to
/// `body` and everything else to `E(tt)`; sets without `a` are unconstrained.
pub fn box_a(a: &str, body: Term, alphabet: &Alphabet) -> Result<Term, ActlError> {
    check_alphabet(alphabet)?;
    assert!(alphabet.contains(a), "{a} is not in the alphabet");
    let tt = encode_tt(alphabet)?;
    let mut with_a = Vec::new();
    let mut without_a = Vec::new();
    for set in alphabet.subsets() {
        if set.iter().any(|b| b == a) {
            let mut items: Vec<Term> = set
                .iter()
                .filter(|b| *b != a)
                .map(|b| Term::prefix(Action::act(b), tt.clone()))
                .collect();
            items.push(Term::prefix(Action::act(a), body.clone()));
            with_a.push(gen_fold(FoldOp::Choice, items)?);
        } else {
            without_a.push(gen_fold(
                FoldOp::Choice,
                set.iter()
                    .map(|b| Term::prefix(Action::act(b), tt.clone()))
                    .collect(),
            )?);
        }
    }
    with_a.extend(without_a);
    gen_fold(FoldOp::Disj, with_a)
}

/// The encoding `E(f)` of a formula as a closed CLL_R term.
pub fn encode(f: &ActlFormula, alphabet: &Alphabet) -> Result<Term, ActlError> {
    check_alphabet(alphabet)?;
    let tt = encode_tt(alphabet)?;
    let ready_disjunction = |keep: &dyn Fn(&[ActName]) -> bool| -> Result<Term, ActlError> {
        let disjuncts = alphabet
            .subsets()
            .filter(|set| keep(set))
            .map(|set| {
                gen_fold(
                    FoldOp::Choice,
                    set.iter()
                        .map(|b| Term::prefix(Action::act(b), tt.clone()))
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        gen_fold(FoldOp::Disj, disjuncts)
    };
    match f {
        ActlFormula::TT => Ok(tt),
        ActlFormula::FF => Ok(Term::Bot),
        ActlFormula::En(a) => ready_disjunction(&|set| set.iter().any(|b| b == a)),
        ActlFormula::Dis(a) => ready_disjunction(&|set| set.iter().all(|b| b != a)),
        ActlFormula::Or(l, r) => Ok(Term::disj(encode(l, alphabet)?, encode(r, alphabet)?)),
        ActlFormula::And(l, r) => Ok(Term::conj(encode(l, alphabet)?, encode(r, alphabet)?)),
        ActlFormula::Box_(a, body) => box_a(a, encode(body, alphabet)?, alphabet),
        ActlFormula::Always(body) => {
            let mut items = vec![encode(body, alphabet)?];
            for a in alphabet.iter() {
                items.push(box_a(a, Term::var("X"), alphabet)?);
            }
            Ok(Term::rec1("X", gen_fold(FoldOp::Conj, items)?))
        }
        ActlFormula::WeakUntil(hold, until) => {
            let mut items = vec![encode(hold, alphabet)?];
            for a in alphabet.iter() {
                items.push(box_a(a, Term::var("X"), alphabet)?);
            }
            let body = Term::disj(encode(until, alphabet)?, gen_fold(FoldOp::Conj, items)?);
            Ok(Term::rec1("X", body))
        }
    }
}

// ---------------------------------------------------------------------------
// Satisfaction
// ---------------------------------------------------------------------------

/// States of `lts` that stably satisfy `f` (only meaningful for stable,
/// consistent states; all others are excluded).
fn stable_sat(lts: &Lts, f: &ActlFormula) -> BTreeSet<StateId> {
    let stable: BTreeSet<StateId> = lts
        .state_ids()
        .filter(|&s| lts.state(s).stable && !lts.in_f(s))
        .collect();
    let enabled = |s: StateId, a: &str| lts.state(s).ready.contains(&Action::act(a));
    match f {
        ActlFormula::TT => stable,
        ActlFormula::FF => BTreeSet::new(),
        ActlFormula::En(a) => stable.into_iter().filter(|&s| enabled(s, a)).collect(),
        ActlFormula::Dis(a) => stable.into_iter().filter(|&s| !enabled(s, a)).collect(),
        ActlFormula::Or(l, r) => {
            let sl = stable_sat(lts, l);
            let sr = stable_sat(lts, r);
            sl.union(&sr).copied().collect()
        }
        ActlFormula::And(l, r) => {
            let sl = stable_sat(lts, l);
            let sr = stable_sat(lts, r);
            sl.intersection(&sr).copied().collect()
        }
        ActlFormula::Box_(a, body) => {
            let sat_body = stable_sat(lts, body);
            stable
                .into_iter()
                .filter(|&s| {
                    weak_a_f(lts, s, &Action::act(a))
                        .iter()
                        .all(|q| sat_body.contains(q))
                })
                .collect()
        }
        ActlFormula::Always(body) => {
            let sat_body = stable_sat(lts, body);
            gfp(lts, &stable, |s, current| {
                sat_body.contains(&s) && all_weak_successors_in(lts, s, current)
            })
        }
        ActlFormula::WeakUntil(hold, until) => {
            let sat_hold = stable_sat(lts, hold);
            let sat_until = stable_sat(lts, until);
            gfp(lts, &stable, |s, current| {
                sat_until.contains(&s)
                    || (sat_hold.contains(&s) && all_weak_successors_in(lts, s, current))
            })
        }
    }
}

fn all_weak_successors_in(lts: &Lts, s: StateId, set: &BTreeSet<StateId>) -> bool {
    lts.visible_labels()
        .iter()
        .all(|a| weak_a_f(lts, s, a).iter().all(|q| set.contains(q)))
}

/// Greatest fixpoint of a monotone one-step condition, starting from `top`
/// and shedding states until stable.
fn gfp(
    _lts: &Lts,
    top: &BTreeSet<StateId>,
    keep: impl Fn(StateId, &BTreeSet<StateId>) -> bool,
) -> BTreeSet<StateId> {
    let mut current = top.clone();
    loop {
        let next: BTreeSet<StateId> = current
            .iter()
            .copied()
            .filter(|&s| keep(s, &current))
            .collect();
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Direct satisfaction: `p |= f` iff every stable consistent state reached
/// from `p` by internal moves through consistent states stably satisfies `f`.
/// Inconsistent processes satisfy every formula vacuously.
pub fn sat_direct(
    p: &Term,
    f: &ActlFormula,
    alphabet: &Alphabet,
    bound: usize,
) -> Result<bool, ActlError> {
    if alphabet.is_empty() {
        return Err(ActlError::EmptyAlphabet);
    }
    let lts = build_lts(p, bound)?;
    let sat = stable_sat(&lts, f);
    Ok(weak_eps_f(&lts, lts.initial()).iter().all(|s| sat.contains(s)))
}

/// Refinement-based satisfaction: `p |= f` iff `p` refines `E(f)`.
pub fn sat_refine(
    p: &Term,
    f: &ActlFormula,
    alphabet: &Alphabet,
    bound: usize,
) -> Result<bool, ActlError> {
    let spec = encode(f, alphabet)?;
    Ok(refines(p, &spec, bound)?.holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_alphabet, parse_term};

    fn ab() -> Alphabet {
        parse_alphabet("a,b").unwrap()
    }

    fn just_a() -> Alphabet {
        parse_alphabet("a").unwrap()
    }

    fn t(src: &str) -> Term {
        parse_term(src, &ab()).unwrap()
    }

    fn f(src: &str) -> ActlFormula {
        parse_actl(src, &ab()).unwrap()
    }

    #[test]
    fn parses_formulas() {
        assert_eq!(f("en(a)"), ActlFormula::En("a".into()));
        assert_eq!(
            f("[a] dis(b) W ff"),
            ActlFormula::WeakUntil(
                Box::new(ActlFormula::Box_(
                    "a".into(),
                    Box::new(ActlFormula::Dis("b".into()))
                )),
                Box::new(ActlFormula::FF)
            )
        );
        assert_eq!(
            parse_actl("en(c)", &ab()),
            Err(ActlError::UnknownAction("c".into()))
        );
        // precedence: \/ binds tighter than W, /\ tighter than \/
        assert_eq!(
            f("tt \\/ ff /\\ tt"),
            ActlFormula::Or(
                Box::new(ActlFormula::TT),
                Box::new(ActlFormula::And(
                    Box::new(ActlFormula::FF),
                    Box::new(ActlFormula::TT)
                ))
            )
        );
        assert_eq!(f("A en(a) /\\ en(b)"), f("(A en(a)) /\\ en(b)"));
    }

    #[test]
    fn display_round_trips() {
        for src in [
            "en(a)",
            "[a] dis(b) W ff",
            "tt \\/ ff /\\ tt",
            "A (en(a) W dis(b))",
            "[a] [b] tt",
            "(tt W ff) W tt",
        ] {
            let parsed = f(src);
            assert_eq!(f(&parsed.to_string()), parsed, "round trip of {src}");
        }
    }

    #[test]
    fn gen_fold_examples() {
        assert_eq!(gen_fold(FoldOp::Choice, vec![]).unwrap(), Term::Nil);
        let abc = parse_alphabet("a,b,c").unwrap();
        let items: Vec<Term> = ["a.0", "b.0", "c.0"]
            .iter()
            .map(|s| parse_term(s, &abc).unwrap())
            .collect();
        assert_eq!(
            gen_fold(FoldOp::Choice, items).unwrap(),
            parse_term("(a.0 [] b.0) [] c.0", &abc).unwrap()
        );
        assert_eq!(
            gen_fold(FoldOp::Disj, vec![]),
            Err(ActlError::EmptyDisjunction)
        );
        assert_eq!(
            gen_fold(FoldOp::Conj, vec![Term::Nil]).unwrap(),
            Term::Nil
        );
    }

    #[test]
    fn encode_tt_over_one_action() {
        let tt = encode_tt(&just_a()).unwrap();
        assert_eq!(tt, parse_term("<X | X = 0 \\/ a.X>", &just_a()).unwrap());
    }

    #[test]
    fn box_a_over_one_action() {
        // subsets {a} and {}: (a.0) \/ 0
        let term = box_a("a", Term::Nil, &just_a()).unwrap();
        assert_eq!(term, parse_term("a.0 \\/ 0", &just_a()).unwrap());
    }

    #[test]
    fn box_a_disjunct_count() {
        fn disjuncts(t: &Term) -> usize {
            match t {
                Term::Disj(l, r) => disjuncts(l) + disjuncts(r),
                _ => 1,
            }
        }
        let term = box_a("a", Term::Nil, &ab()).unwrap();
        assert_eq!(disjuncts(&term), 4);
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode(&ActlFormula::FF, &ab()).unwrap(), Term::Bot);
        let tt = encode_tt(&just_a()).unwrap();
        assert_eq!(
            encode(&ActlFormula::En("a".into()), &just_a()).unwrap(),
            Term::prefix(Action::act("a"), tt)
        );
        fn disjuncts(t: &Term) -> usize {
            match t {
                Term::Disj(l, r) => disjuncts(l) + disjuncts(r),
                _ => 1,
            }
        }
        // 2^(|Act|-1) disjuncts for en and dis over {a,b}
        assert_eq!(disjuncts(&encode(&f("en(a)"), &ab()).unwrap()), 2);
        assert_eq!(disjuncts(&encode(&f("dis(a)"), &ab()).unwrap()), 2);
    }

    #[test]
    fn encode_rejects_large_alphabets() {
        let big = parse_alphabet("a,b,c,d,e").unwrap();
        assert!(matches!(
            encode(&ActlFormula::TT, &big),
            Err(ActlError::AlphabetTooLarge { size: 5, cap: 4 })
        ));
    }

    #[test]
    fn sat_direct_examples() {
        let sat = |p: &str, phi: &str| sat_direct(&t(p), &f(phi), &ab(), 5000).unwrap();
        assert!(sat("0", "tt"));
        assert!(sat("a.0", "en(a)"));
        assert!(!sat("0", "en(a)"));
        assert!(sat("bot", "ff"));
        assert!(!sat("0", "ff"));
        assert!(sat("0", "dis(a)"));
        assert!(sat("a.b.0", "[a] en(b)"));
        assert!(!sat("a.0", "[a] en(b)"));
        assert!(sat("b.0", "[a] en(b)"), "vacuous box");
        assert!(sat("<X | X = a.X>", "A en(a)"));
        assert!(!sat("a.a.0", "A en(a)"));
        assert!(sat("a.a.b.0", "en(a) W en(b)"));
        assert!(!sat("a.0", "en(a) W en(b)"), "deadlocks before b");
        assert!(sat("<X | X = a.X>", "en(a) W ff"), "W needs no release");
        // internal choice must satisfy in every resolution
        assert!(!sat("a.0 \\/ b.0", "en(a)"));
        assert!(sat("a.0 \\/ b.0", "en(a) \\/ en(b)"));
    }

    #[test]
    fn encode_tt_is_consistent_and_most_permissive() {
        let tt = encode_tt(&ab()).unwrap();
        let lts = build_lts(&tt, 5000).unwrap();
        assert!(!lts.in_f(lts.initial()));
        for p in ["0", "a.0", "a.b.0 [] b.0", "<X | X = a.X>", "a.0 \\/ b.0"] {
            assert!(
                refines(&t(p), &tt, 5000).unwrap().holds,
                "{p} should refine E(tt)"
            );
        }
    }

    #[test]
    fn checkers_agree_on_examples() {
        let formulas = [
            "tt",
            "ff",
            "en(a)",
            "dis(b)",
            "[a] en(b)",
            "A en(a)",
            "en(a) W en(b)",
            "en(a) /\\ dis(b)",
            "[a] ff",
        ];
        let processes = ["0", "a.0", "b.a.0", "a.0 \\/ b.0", "a.0 [] b.0", "<X | X = a.X>", "bot"];
        for phi in formulas {
            for p in processes {
                let direct = sat_direct(&t(p), &f(phi), &ab(), 20000).unwrap();
                let refine = sat_refine(&t(p), &f(phi), &ab(), 20000).unwrap();
                assert_eq!(direct, refine, "checkers disagree on {p} |= {phi}");
            }
        }
    }
}
