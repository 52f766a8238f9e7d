//! Abstract syntax of CLL_R terms and recursive specifications, together
//! with the usual binding machinery: free variables, capture-avoiding
//! substitution, alpha-canonicalization and guardedness classification.

mod parse;
mod print;

pub use parse::{parse_alphabet, parse_term, ParseError};

use std::collections::{BTreeSet, HashMap, HashSet};

/// A visible action name: a lowercase identifier drawn from the declared alphabet.
pub type ActName = String;
/// A process variable name: an uppercase identifier.
pub type VarName = String;

/// An action label: either the silent action or a visible action.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Action {
    Tau,
    Act(ActName),
}

impl Action {
    pub fn act(name: &str) -> Action {
        Action::Act(name.to_string())
    }

    pub fn is_visible(&self) -> bool {
        matches!(self, Action::Act(_))
    }
}

impl std::fmt::Display for Action {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Action::Tau => write!(f, "tau"),
            Action::Act(a) => write!(f, "{a}"),
        }
    }
}

/// The declared finite alphabet of visible actions, in declaration order.
///
/// The ordering matters: subset enumeration in the ACTL encoding follows it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    actions: Vec<ActName>,
}

impl Alphabet {
    pub fn new<I: IntoIterator<Item = S>, S: Into<String>>(actions: I) -> Alphabet {
        let mut seen = HashSet::new();
        let actions = actions
            .into_iter()
            .map(Into::into)
            .filter(|a| seen.insert(a.clone()))
            .collect();
        Alphabet { actions }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.actions.iter().any(|a| a == name)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ActName> {
        self.actions.iter()
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// All subsets in ascending bitmask order over the declaration ordering
    /// (bit i corresponds to the i-th declared action).
    pub fn subsets(&self) -> impl Iterator<Item = Vec<ActName>> + '_ {
        (0u32..(1u32 << self.actions.len())).map(move |mask| {
            self.actions
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, a)| a.clone())
                .collect()
        })
    }
}

impl std::fmt::Display for Alphabet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.actions.join(","))
    }
}

/// Synchronization set of a parallel composition; tau is never a member.
pub type SyncSet = BTreeSet<ActName>;

/// A recursive specification: a guarded set of equations with a designated
/// initial variable. Binding order is the source order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecSpec {
    pub init: VarName,
    pub bindings: Vec<(VarName, Term)>,
}

impl RecSpec {
    pub fn binds(&self, x: &str) -> bool {
        self.bindings.iter().any(|(v, _)| v == x)
    }

    pub fn body_of(&self, x: &str) -> Option<&Term> {
        self.bindings.iter().find(|(v, _)| v == x).map(|(_, t)| t)
    }

    pub fn bound_vars(&self) -> impl Iterator<Item = &VarName> {
        self.bindings.iter().map(|(v, _)| v)
    }
}

/// A CLL_R term. Closed terms are processes.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    /// 0, the process capable of doing no action.
    Nil,
    /// bot, the inconsistent process with empty behaviour.
    Bot,
    Prefix(Action, Box<Term>),
    /// External choice `t [] t`.
    ExtChoice(Box<Term>, Box<Term>),
    /// Conjunction `t /\ t`.
    Conj(Box<Term>, Box<Term>),
    /// Disjunction `t \/ t`.
    Disj(Box<Term>, Box<Term>),
    /// CSP-style parallel composition `t |[A]| t`.
    Par(SyncSet, Box<Term>, Box<Term>),
    Var(VarName),
    Rec(RecSpec),
}

impl Term {
    pub fn prefix(a: Action, body: Term) -> Term {
        Term::Prefix(a, Box::new(body))
    }

    pub fn choice(l: Term, r: Term) -> Term {
        Term::ExtChoice(Box::new(l), Box::new(r))
    }

    pub fn conj(l: Term, r: Term) -> Term {
        Term::Conj(Box::new(l), Box::new(r))
    }

    pub fn disj(l: Term, r: Term) -> Term {
        Term::Disj(Box::new(l), Box::new(r))
    }

    pub fn par(sync: SyncSet, l: Term, r: Term) -> Term {
        Term::Par(sync, Box::new(l), Box::new(r))
    }

    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    /// `<X | X = body>`, the single-equation recursion.
    pub fn rec1(x: &str, body: Term) -> Term {
        Term::Rec(RecSpec {
            init: x.to_string(),
            bindings: vec![(x.to_string(), body)],
        })
    }

    pub fn is_closed(&self) -> bool {
        free_vars(self).is_empty()
    }

    /// Number of syntax-tree nodes, recursion bindings included.
    pub fn node_count(&self) -> usize {
        match self {
            Term::Nil | Term::Bot | Term::Var(_) => 1,
            Term::Prefix(_, b) => 1 + b.node_count(),
            Term::ExtChoice(l, r)
            | Term::Conj(l, r)
            | Term::Disj(l, r)
            | Term::Par(_, l, r) => 1 + l.node_count() + r.node_count(),
            Term::Rec(rec) => {
                1 + rec
                    .bindings
                    .iter()
                    .map(|(_, body)| body.node_count())
                    .sum::<usize>()
            }
        }
    }
}

/// Variables with at least one free occurrence in `t`.
pub fn free_vars(t: &Term) -> BTreeSet<VarName> {
    let mut out = BTreeSet::new();
    collect_free(t, &mut Vec::new(), &mut out);
    out
}

fn collect_free(t: &Term, bound: &mut Vec<VarName>, out: &mut BTreeSet<VarName>) {
    match t {
        Term::Nil | Term::Bot => {}
        Term::Prefix(_, b) => collect_free(b, bound, out),
        Term::ExtChoice(l, r) | Term::Conj(l, r) | Term::Disj(l, r) | Term::Par(_, l, r) => {
            collect_free(l, bound, out);
            collect_free(r, bound, out);
        }
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Rec(rec) => {
            let n = bound.len();
            bound.extend(rec.bound_vars().cloned());
            for (_, body) in &rec.bindings {
                collect_free(body, bound, out);
            }
            bound.truncate(n);
        }
    }
}

/// Simultaneous capture-avoiding substitution of free variables.
pub fn substitute(t: &Term, subst: &HashMap<VarName, Term>) -> Term {
    if subst.is_empty() {
        return t.clone();
    }
    match t {
        Term::Nil => Term::Nil,
        Term::Bot => Term::Bot,
        Term::Prefix(a, b) => Term::prefix(a.clone(), substitute(b, subst)),
        Term::ExtChoice(l, r) => Term::choice(substitute(l, subst), substitute(r, subst)),
        Term::Conj(l, r) => Term::conj(substitute(l, subst), substitute(r, subst)),
        Term::Disj(l, r) => Term::disj(substitute(l, subst), substitute(r, subst)),
        Term::Par(sync, l, r) => {
            Term::par(sync.clone(), substitute(l, subst), substitute(r, subst))
        }
        Term::Var(x) => subst.get(x).cloned().unwrap_or_else(|| t.clone()),
        Term::Rec(rec) => {
            // Shadowed variables drop out of the substitution.
            let inner: HashMap<VarName, Term> = subst
                .iter()
                .filter(|(k, _)| !rec.binds(k))
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            // The substitution only acts on free occurrences; if nothing
            // relevant is free in the bodies, leave the node untouched.
            let rec_free = free_vars(&Term::Rec(rec.clone()));
            if !inner.keys().any(|k| rec_free.contains(k)) {
                return Term::Rec(rec.clone());
            }
            // Rename binders that would capture free variables of the
            // substituted terms.
            let incoming: BTreeSet<VarName> = inner
                .iter()
                .filter(|(k, _)| rec_free.contains(*k))
                .flat_map(|(_, v)| free_vars(v))
                .collect();
            let rec = if rec.bound_vars().any(|v| incoming.contains(v)) {
                let mut avoid: HashSet<VarName> = incoming.iter().cloned().collect();
                avoid.extend(rec_free.iter().cloned());
                avoid.extend(rec.bound_vars().cloned());
                let mut renaming = HashMap::new();
                for v in rec.bound_vars() {
                    if incoming.contains(v) {
                        let fresh = fresh_var(v, &avoid);
                        avoid.insert(fresh.clone());
                        renaming.insert(v.clone(), Term::Var(fresh));
                    }
                }
                rename_bound(rec, &renaming)
            } else {
                rec.clone()
            };
            Term::Rec(RecSpec {
                init: rec.init.clone(),
                bindings: rec
                    .bindings
                    .iter()
                    .map(|(v, body)| (v.clone(), substitute(body, &inner)))
                    .collect(),
            })
        }
    }
}

fn rename_bound(rec: &RecSpec, renaming: &HashMap<VarName, Term>) -> RecSpec {
    let new_name = |v: &VarName| match renaming.get(v) {
        Some(Term::Var(n)) => n.clone(),
        _ => v.clone(),
    };
    RecSpec {
        init: new_name(&rec.init),
        bindings: rec
            .bindings
            .iter()
            .map(|(v, body)| (new_name(v), substitute(body, renaming)))
            .collect(),
    }
}

fn fresh_var(base: &str, avoid: &HashSet<VarName>) -> VarName {
    let stem: String = base.trim_end_matches(|c: char| c.is_ascii_digit()).to_string();
    let stem = if stem.is_empty() { "V".to_string() } else { stem };
    for i in 0.. {
        let cand = format!("{stem}{i}");
        if !avoid.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

/// Deterministic renaming of bound variables in traversal order, so that two
/// terms get identical canonical forms exactly when they are alpha-equivalent.
pub fn alpha_canon(t: &Term) -> Term {
    let free = free_vars(t);
    let mut counter = 0usize;
    canon(t, &mut counter, &free, &HashMap::new())
}

fn canon(
    t: &Term,
    counter: &mut usize,
    free: &BTreeSet<VarName>,
    env: &HashMap<VarName, VarName>,
) -> Term {
    match t {
        Term::Nil => Term::Nil,
        Term::Bot => Term::Bot,
        Term::Prefix(a, b) => Term::prefix(a.clone(), canon(b, counter, free, env)),
        Term::ExtChoice(l, r) => Term::choice(
            canon(l, counter, free, env),
            canon(r, counter, free, env),
        ),
        Term::Conj(l, r) => Term::conj(
            canon(l, counter, free, env),
            canon(r, counter, free, env),
        ),
        Term::Disj(l, r) => Term::disj(
            canon(l, counter, free, env),
            canon(r, counter, free, env),
        ),
        Term::Par(sync, l, r) => Term::par(
            sync.clone(),
            canon(l, counter, free, env),
            canon(r, counter, free, env),
        ),
        Term::Var(x) => Term::Var(env.get(x).cloned().unwrap_or_else(|| x.clone())),
        Term::Rec(rec) => {
            let mut env = env.clone();
            let mut names = Vec::new();
            for (v, _) in &rec.bindings {
                let fresh = loop {
                    let cand = format!("X{counter}");
                    *counter += 1;
                    if !free.contains(&cand) {
                        break cand;
                    }
                };
                env.insert(v.clone(), fresh.clone());
                names.push(fresh);
            }
            Term::Rec(RecSpec {
                init: env[&rec.init].clone(),
                bindings: rec
                    .bindings
                    .iter()
                    .zip(names)
                    .map(|((_, body), name)| (name, canon(body, counter, free, &env)))
                    .collect(),
            })
        }
    }
}

/// How well the free occurrences of a variable are guarded.
///
/// Strong: every occurrence under a visible-action prefix. Weak: every
/// occurrence guarded, but some only under a tau-prefix or a disjunction arm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GuardMode {
    Unguarded,
    Weak,
    Strong,
}

/// Classify the guardedness of `x` in `t`; vacuously `Strong` when `x` has no
/// free occurrence.
pub fn guard_mode(t: &Term, x: &str) -> GuardMode {
    guard_walk(t, x, GuardMode::Unguarded)
}

fn guard_walk(t: &Term, x: &str, ceiling: GuardMode) -> GuardMode {
    match t {
        Term::Nil | Term::Bot => GuardMode::Strong,
        Term::Var(y) => {
            if y == x {
                ceiling
            } else {
                GuardMode::Strong
            }
        }
        Term::Prefix(Action::Act(_), b) => guard_walk(b, x, GuardMode::Strong),
        Term::Prefix(Action::Tau, b) => guard_walk(b, x, ceiling.max(GuardMode::Weak)),
        Term::Disj(l, r) => {
            let c = ceiling.max(GuardMode::Weak);
            guard_walk(l, x, c).min(guard_walk(r, x, c))
        }
        Term::ExtChoice(l, r) | Term::Conj(l, r) | Term::Par(_, l, r) => {
            guard_walk(l, x, ceiling).min(guard_walk(r, x, ceiling))
        }
        Term::Rec(rec) => {
            if rec.binds(x) {
                GuardMode::Strong
            } else {
                rec.bindings
                    .iter()
                    .map(|(_, body)| guard_walk(body, x, ceiling))
                    .min()
                    .unwrap_or(GuardMode::Strong)
            }
        }
    }
}

/// True iff no free occurrence of `x` lies inside an operand of a conjunction.
pub fn conj_scope_free(t: &Term, x: &str) -> bool {
    fn walk(t: &Term, x: &str, in_conj: bool) -> bool {
        match t {
            Term::Nil | Term::Bot => true,
            Term::Var(y) => !(y == x && in_conj),
            Term::Prefix(_, b) => walk(b, x, in_conj),
            Term::ExtChoice(l, r) | Term::Disj(l, r) | Term::Par(_, l, r) => {
                walk(l, x, in_conj) && walk(r, x, in_conj)
            }
            Term::Conj(l, r) => walk(l, x, true) && walk(r, x, true),
            Term::Rec(rec) => {
                rec.binds(x)
                    || rec.bindings.iter().all(|(_, body)| walk(body, x, in_conj))
            }
        }
    }
    walk(t, x, false)
}

/// Check the recursion invariants required of every accepted term: bound
/// variables guarded in every binding body.
pub fn validate_guardedness(t: &Term) -> Result<(), VarName> {
    match t {
        Term::Nil | Term::Bot | Term::Var(_) => Ok(()),
        Term::Prefix(_, b) => validate_guardedness(b),
        Term::ExtChoice(l, r) | Term::Conj(l, r) | Term::Disj(l, r) | Term::Par(_, l, r) => {
            validate_guardedness(l)?;
            validate_guardedness(r)
        }
        Term::Rec(rec) => {
            for x in rec.bound_vars() {
                for (_, body) in &rec.bindings {
                    if guard_mode(body, x) == GuardMode::Unguarded {
                        return Err(x.clone());
                    }
                }
            }
            for (_, body) in &rec.bindings {
                validate_guardedness(body)?;
            }
            Ok(())
        }
    }
}
