//! Pretty-printer for terms. Output re-parses to the same AST.

use super::{Action, Term};
use std::fmt;

// Binding powers, loosest to tightest: |[A]| < [] < \/ < /\ < prefix.
const LVL_PAR: u8 = 1;
const LVL_CHOICE: u8 = 2;
const LVL_DISJ: u8 = 3;
const LVL_CONJ: u8 = 4;
const LVL_PREFIX: u8 = 5;
const LVL_ATOM: u8 = 6;

fn level(t: &Term) -> u8 {
    match t {
        Term::Par(..) => LVL_PAR,
        Term::ExtChoice(..) => LVL_CHOICE,
        Term::Disj(..) => LVL_DISJ,
        Term::Conj(..) => LVL_CONJ,
        Term::Prefix(..) => LVL_PREFIX,
        Term::Nil | Term::Bot | Term::Var(_) | Term::Rec(_) => LVL_ATOM,
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, t: &Term, min_level: u8) -> fmt::Result {
    let lvl = level(t);
    if lvl < min_level {
        write!(f, "(")?;
        write_term(f, t, 0)?;
        return write!(f, ")");
    }
    match t {
        Term::Nil => write!(f, "0"),
        Term::Bot => write!(f, "bot"),
        Term::Var(x) => write!(f, "{x}"),
        Term::Prefix(a, b) => {
            match a {
                Action::Tau => write!(f, "tau.")?,
                Action::Act(n) => write!(f, "{n}.")?,
            }
            write_term(f, b, LVL_PREFIX)
        }
        Term::ExtChoice(l, r) => {
            write_term(f, l, LVL_CHOICE)?;
            write!(f, " [] ")?;
            write_term(f, r, LVL_CHOICE + 1)
        }
        Term::Disj(l, r) => {
            write_term(f, l, LVL_DISJ)?;
            write!(f, " \\/ ")?;
            write_term(f, r, LVL_DISJ + 1)
        }
        Term::Conj(l, r) => {
            write_term(f, l, LVL_CONJ)?;
            write!(f, " /\\ ")?;
            write_term(f, r, LVL_CONJ + 1)
        }
        Term::Par(sync, l, r) => {
            write_term(f, l, LVL_PAR)?;
            let acts: Vec<&str> = sync.iter().map(|s| s.as_str()).collect();
            write!(f, " |[{}]| ", acts.join(","))?;
            write_term(f, r, LVL_PAR + 1)
        }
        Term::Rec(rec) => {
            write!(f, "<{} | ", rec.init)?;
            for (i, (v, body)) in rec.bindings.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v} = ")?;
                write_term(f, body, 0)?;
            }
            write!(f, ">")
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, 0)
    }
}
