//! Seeded random generation of closed guarded terms, one-hole contexts,
//! equation bodies and formulas — the raw material for the property suites.

use crate::actl::ActlFormula;
use crate::syntax::{Action, Alphabet, SyncSet, Term, VarName};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Variable reserved for the hole of a one-hole context.
pub const HOLE: &str = "HOLE";

pub struct TermGen {
    rng: ChaCha8Rng,
    alphabet: Alphabet,
    fresh: usize,
}

impl TermGen {
    pub fn new(seed: u64, alphabet: Alphabet) -> TermGen {
        assert!(!alphabet.is_empty());
        TermGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            alphabet,
            fresh: 0,
        }
    }

    fn action(&mut self) -> Action {
        let n = self.alphabet.len();
        // tau with the same weight as each visible action
        let pick = self.rng.gen_range(0..=n);
        if pick == n {
            Action::Tau
        } else {
            Action::act(self.alphabet.iter().nth(pick).unwrap())
        }
    }

    fn visible_action(&mut self) -> Action {
        let pick = self.rng.gen_range(0..self.alphabet.len());
        Action::act(self.alphabet.iter().nth(pick).unwrap())
    }

    fn sync_set(&mut self) -> SyncSet {
        self.alphabet
            .iter()
            .filter(|_| self.rng.gen_bool(0.5))
            .cloned()
            .collect()
    }

    /// A random closed term; every recursion variable is guarded. `depth`
    /// bounds the operator nesting.
    pub fn term(&mut self, depth: usize) -> Term {
        self.fresh = 0;
        self.go(depth, &mut Vec::new())
    }

    // scope entries: (variable, usable) — usable once below a prefix
    fn go(&mut self, depth: usize, scope: &mut Vec<(VarName, bool)>) -> Term {
        let usable: Vec<VarName> = scope
            .iter()
            .filter(|(_, ok)| *ok)
            .map(|(v, _)| v.clone())
            .collect();
        if depth == 0 {
            return match self.rng.gen_range(0..4) {
                0 => Term::Nil,
                1 => Term::Bot,
                2 if !usable.is_empty() => {
                    Term::var(&usable[self.rng.gen_range(0..usable.len())])
                }
                _ => Term::prefix(self.action(), Term::Nil),
            };
        }
        match self.rng.gen_range(0..10) {
            0 => Term::Nil,
            1 => Term::Bot,
            2 | 3 => {
                let a = self.action();
                let was: Vec<bool> = scope.iter().map(|(_, ok)| *ok).collect();
                scope.iter_mut().for_each(|(_, ok)| *ok = true);
                let body = self.go(depth - 1, scope);
                scope
                    .iter_mut()
                    .zip(was)
                    .for_each(|((_, ok), old)| *ok = old);
                Term::prefix(a, body)
            }
            4 => Term::choice(self.go(depth - 1, scope), self.go(depth - 1, scope)),
            5 => Term::conj(self.go(depth - 1, scope), self.go(depth - 1, scope)),
            6 => Term::disj(self.go(depth - 1, scope), self.go(depth - 1, scope)),
            7 => {
                let sync = self.sync_set();
                Term::par(sync, self.go(depth - 1, scope), self.go(depth - 1, scope))
            }
            8 => {
                self.fresh += 1;
                let var = format!("V{}", self.fresh);
                scope.push((var.clone(), false));
                // a guarding prefix first, so the variable is usable below it
                let a = self.action();
                let was: Vec<bool> = scope.iter().map(|(_, ok)| *ok).collect();
                scope.iter_mut().for_each(|(_, ok)| *ok = true);
                let inner = self.go(depth.saturating_sub(2), scope);
                scope
                    .iter_mut()
                    .zip(was)
                    .for_each(|((_, ok), old)| *ok = old);
                scope.pop();
                Term::rec1(&var, Term::prefix(a, inner))
            }
            _ if !usable.is_empty() => Term::var(&usable[self.rng.gen_range(0..usable.len())]),
            _ => Term::prefix(self.action(), self.go(depth - 1, scope)),
        }
    }

    /// A random one-hole context: a closed-except-for-[`HOLE`] term with
    /// exactly one occurrence of the hole, outside all binders. Plug with
    /// [`plug`].
    pub fn context(&mut self, depth: usize) -> Term {
        if depth == 0 {
            return Term::var(HOLE);
        }
        let side = self.rng.gen_bool(0.5);
        let hole = self.context(depth - 1);
        let other = self.term(depth - 1);
        let pair = |l: Term, r: Term, f: fn(Term, Term) -> Term| {
            if side {
                f(l, r)
            } else {
                f(r, l)
            }
        };
        match self.rng.gen_range(0..5) {
            0 => Term::prefix(self.action(), hole),
            1 => pair(hole, other, Term::choice),
            2 => pair(hole, other, Term::conj),
            3 => pair(hole, other, Term::disj),
            _ => {
                let sync = self.sync_set();
                if side {
                    Term::par(sync, hole, other)
                } else {
                    Term::par(sync, other, hole)
                }
            }
        }
    }

    /// A random equation body in `var`: strongly guarded (the variable only
    /// under visible prefixes) and conjunction-free, as the uniqueness
    /// theorem requires.
    pub fn unique_body(&mut self, var: &str, depth: usize) -> Term {
        self.unique_go(var, depth, false)
    }

    fn unique_go(&mut self, var: &str, depth: usize, below_visible: bool) -> Term {
        if depth == 0 {
            return match self.rng.gen_range(0..3) {
                0 => Term::Nil,
                1 if below_visible => Term::var(var),
                _ => Term::prefix(self.visible_action(), Term::Nil),
            };
        }
        match self.rng.gen_range(0..8) {
            0 => Term::Nil,
            1 | 2 | 3 => {
                let a = self.visible_action();
                Term::prefix(a, self.unique_go(var, depth - 1, true))
            }
            4 => Term::choice(
                self.unique_go(var, depth - 1, below_visible),
                self.unique_go(var, depth - 1, below_visible),
            ),
            5 => Term::disj(
                self.unique_go(var, depth - 1, below_visible),
                self.unique_go(var, depth - 1, below_visible),
            ),
            _ if below_visible => Term::var(var),
            _ => Term::prefix(self.visible_action(), self.unique_go(var, depth - 1, true)),
        }
    }

    /// A random formula of the encoded CTL fragment.
    pub fn formula(&mut self, depth: usize) -> ActlFormula {
        if depth == 0 {
            return match self.rng.gen_range(0..4) {
                0 => ActlFormula::TT,
                1 => ActlFormula::FF,
                2 => ActlFormula::En(self.visible_name()),
                _ => ActlFormula::Dis(self.visible_name()),
            };
        }
        match self.rng.gen_range(0..9) {
            0 => ActlFormula::TT,
            1 => ActlFormula::FF,
            2 => ActlFormula::En(self.visible_name()),
            3 => ActlFormula::Dis(self.visible_name()),
            4 => ActlFormula::Or(
                Box::new(self.formula(depth - 1)),
                Box::new(self.formula(depth - 1)),
            ),
            5 => ActlFormula::And(
                Box::new(self.formula(depth - 1)),
                Box::new(self.formula(depth - 1)),
            ),
            6 => ActlFormula::Box_(self.visible_name(), Box::new(self.formula(depth - 1))),
            7 => ActlFormula::Always(Box::new(self.formula(depth - 1))),
            _ => ActlFormula::WeakUntil(
                Box::new(self.formula(depth - 1)),
                Box::new(self.formula(depth - 1)),
            ),
        }
    }

    fn visible_name(&mut self) -> String {
        match self.visible_action() {
            Action::Act(name) => name,
            Action::Tau => unreachable!(),
        }
    }
}

/// Replace the hole of a context with a closed term.
pub fn plug(context: &Term, p: &Term) -> Term {
    let mut subst = std::collections::HashMap::new();
    subst.insert(HOLE.to_string(), p.clone());
    crate::syntax::substitute(context, &subst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{free_vars, parse_alphabet, validate_guardedness};

    fn ab() -> Alphabet {
        parse_alphabet("a,b").unwrap()
    }

    #[test]
    fn terms_are_closed_and_guarded() {
        let mut g = TermGen::new(7, ab());
        for _ in 0..200 {
            let t = g.term(4);
            assert!(t.is_closed(), "{t} has free variables");
            assert!(validate_guardedness(&t).is_ok(), "{t} is unguarded");
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let dump = |seed| {
            let mut g = TermGen::new(seed, ab());
            (0..20).map(|_| g.term(3).to_string()).collect::<Vec<_>>()
        };
        assert_eq!(dump(42), dump(42));
        assert_ne!(dump(42), dump(43));
    }

    #[test]
    fn contexts_have_one_hole() {
        let mut g = TermGen::new(11, ab());
        for _ in 0..100 {
            let c = g.context(3);
            assert_eq!(free_vars(&c), [HOLE.to_string()].into());
            let plugged = plug(&c, &Term::Nil);
            assert!(plugged.is_closed());
            assert!(validate_guardedness(&plugged).is_ok());
        }
    }

    #[test]
    fn unique_bodies_meet_the_precondition() {
        use crate::syntax::{conj_scope_free, guard_mode, GuardMode};
        let mut g = TermGen::new(3, ab());
        let mut with_var = 0;
        for _ in 0..100 {
            let body = g.unique_body("X", 3);
            let fv = free_vars(&body);
            assert!(fv.iter().all(|v| v == "X"), "{body}");
            assert!(conj_scope_free(&body, "X"));
            if fv.contains("X") {
                assert_eq!(guard_mode(&body, "X"), GuardMode::Strong, "{body}");
                with_var += 1;
            }
        }
        assert!(with_var >= 20, "only {with_var} bodies used the variable");
    }

    #[test]
    fn formulas_stay_in_the_alphabet() {
        let mut g = TermGen::new(5, ab());
        for _ in 0..100 {
            let phi = g.formula(3);
            let text = phi.to_string();
            let reparsed = crate::actl::parse_actl(&text, &ab()).unwrap();
            assert_eq!(reparsed, phi);
        }
    }
}
