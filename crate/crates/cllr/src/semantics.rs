//! Operational semantics: one-step successors under the SOS rules with
//! tau-priority, bounded state-space exploration, and the least-fixpoint
//! inconsistency predicate F, plus a validator for the LLTS axioms.

use crate::syntax::{alpha_canon, substitute, Action, RecSpec, Term, VarName};
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::rc::Rc;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum BuildError {
    #[error("state bound of {0} exceeded during exploration")]
    StateBoundExceeded(usize),
}

/// Opaque dense index into an [`Lts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(transparent)]
pub struct StateId(pub u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone)]
pub struct StateInfo {
    /// Alpha-canonical closed term this state stands for.
    pub term: Term,
    /// Outgoing transitions, deduplicated and sorted.
    pub out: Vec<(Action, StateId)>,
    pub stable: bool,
    /// Enabled labels, tau included.
    pub ready: BTreeSet<Action>,
    pub inconsistent: bool,
    /// False for states added only as component obligations of the F rules.
    pub reachable: bool,
    /// Structural component states consulted by the predicative rules.
    components: Components,
}

#[derive(Debug, Clone)]
enum Components {
    None,
    Bot,
    PrefixBody(StateId),
    DisjOperands(StateId, StateId),
    /// External choice or parallel: either operand inconsistent.
    EitherOperand(StateId, StateId),
    ConjOperands(StateId, StateId),
    RecUnfold(StateId),
}

/// Explored state graph of one or more root processes.
#[derive(Debug)]
pub struct Lts {
    pub states: Vec<StateInfo>,
    pub roots: Vec<StateId>,
    pub bound: usize,
    index: HashMap<Term, StateId>,
    normalized: bool,
}

impl Lts {
    /// First root, the conventional initial state.
    pub fn initial(&self) -> StateId {
        self.roots[0]
    }

    pub fn state(&self, id: StateId) -> &StateInfo {
        &self.states[id.index()]
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn in_f(&self, id: StateId) -> bool {
        self.states[id.index()].inconsistent
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        (0..self.states.len() as u32).map(StateId)
    }

    /// Look up the state holding the canonical form of a term (under the
    /// same state identity this graph was built with).
    pub fn find(&self, term: &Term) -> Option<StateId> {
        let key = if self.normalized {
            alpha_canon(&conj_norm(term))
        } else {
            alpha_canon(term)
        };
        self.index.get(&key).copied()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, &Action, StateId)> {
        self.states.iter().enumerate().flat_map(|(i, s)| {
            s.out.iter().map(move |(a, tgt)| (StateId(i as u32), a, *tgt))
        })
    }

    /// Labels of all visible transitions present in the graph.
    pub fn visible_labels(&self) -> BTreeSet<Action> {
        self.transitions()
            .filter(|(_, a, _)| a.is_visible())
            .map(|(_, a, _)| a.clone())
            .collect()
    }

    /// Stable tau-descendants (the plain closure, no F condition); the state
    /// itself counts when stable.
    pub fn stable_tau_descendants(&self, from: StateId) -> BTreeSet<StateId> {
        let mut seen = BTreeSet::new();
        let mut out = BTreeSet::new();
        let mut queue = VecDeque::from([from]);
        seen.insert(from);
        while let Some(s) = queue.pop_front() {
            if self.state(s).stable {
                out.insert(s);
                continue;
            }
            for (a, tgt) in &self.state(s).out {
                if *a == Action::Tau && seen.insert(*tgt) {
                    queue.push_back(*tgt);
                }
            }
        }
        out
    }
}

/// One-step successors of a closed guarded term under the stripped rule
/// system: tau rules are negation-free, and the visible rules for external
/// choice and interleaving only fire when the negative premise (the other
/// operand has no tau move) holds.
pub fn successors(p: &Term) -> Vec<(Action, Term)> {
    SuccMemo::default().get(p).as_ref().clone()
}

/// Memoized successor computation. Deeply nested operator terms (as produced
/// by recursion through external choice or parallel composition) share their
/// operand subterms with earlier states, so caching the recursive
/// `successor_set` results turns an otherwise quadratic per-state cost into
/// amortized constant work per distinct subterm. The cache lives for one
/// graph construction.
/// Cache entries are evicted wholesale once the stored terms exceed this many
/// syntax-tree nodes, keeping memory bounded on graphs whose state terms grow
/// without limit before the state bound trips.
const SUCC_MEMO_NODE_CAP: usize = 30_000_000;

#[derive(Default)]
pub(crate) struct SuccMemo {
    memo: HashMap<Term, Rc<Vec<(Action, Term)>>>,
    stored_nodes: usize,
}

impl SuccMemo {
    pub(crate) fn get(&mut self, p: &Term) -> Rc<Vec<(Action, Term)>> {
        // Leaf-like cases are cheaper to recompute than to cache.
        match p {
            Term::Nil | Term::Bot => return Rc::new(Vec::new()),
            Term::Var(x) => unreachable!("successors of open term (free {x})"),
            Term::Prefix(a, body) => {
                return Rc::new(vec![(a.clone(), (**body).clone())]);
            }
            _ => {}
        }
        if let Some(v) = self.memo.get(p) {
            return v.clone();
        }
        let set = self.successor_set(p);
        let rc = Rc::new(set.into_iter().collect::<Vec<_>>());
        self.stored_nodes +=
            p.node_count() + rc.iter().map(|(_, t)| t.node_count()).sum::<usize>();
        if self.stored_nodes > SUCC_MEMO_NODE_CAP {
            self.memo.clear();
            self.stored_nodes = 0;
        }
        self.memo.insert(p.clone(), rc.clone());
        rc
    }

    fn successor_set(&mut self, p: &Term) -> BTreeSet<(Action, Term)> {
        let mut out = BTreeSet::new();
        match p {
        Term::Nil | Term::Bot | Term::Var(_) | Term::Prefix(..) => {
            unreachable!("handled in get")
        }
        Term::Disj(l, r) => {
            out.insert((Action::Tau, (**l).clone()));
            out.insert((Action::Tau, (**r).clone()));
        }
        Term::ExtChoice(l, r) => {
            let ls = self.get(l);
            let rs = self.get(r);
            let l_tau = ls.iter().any(|(a, _)| *a == Action::Tau);
            let r_tau = rs.iter().any(|(a, _)| *a == Action::Tau);
            for (a, l2) in ls.iter() {
                match a {
                    Action::Tau => {
                        out.insert((Action::Tau, Term::choice(l2.clone(), (**r).clone())));
                    }
                    Action::Act(_) if !r_tau => {
                        out.insert((a.clone(), l2.clone()));
                    }
                    _ => {}
                }
            }
            for (a, r2) in rs.iter() {
                match a {
                    Action::Tau => {
                        out.insert((Action::Tau, Term::choice((**l).clone(), r2.clone())));
                    }
                    Action::Act(_) if !l_tau => {
                        out.insert((a.clone(), r2.clone()));
                    }
                    _ => {}
                }
            }
        }
        Term::Conj(l, r) => {
            let ls = self.get(l);
            let rs = self.get(r);
            for (a, l2) in ls.iter() {
                if *a == Action::Tau {
                    out.insert((Action::Tau, Term::conj(l2.clone(), (**r).clone())));
                }
            }
            for (a, r2) in rs.iter() {
                if *a == Action::Tau {
                    out.insert((Action::Tau, Term::conj((**l).clone(), r2.clone())));
                }
            }
            // Synchronous product on visible actions.
            for (a, l2) in ls.iter() {
                if a.is_visible() {
                    for (b, r2) in rs.iter() {
                        if b == a {
                            out.insert((a.clone(), Term::conj(l2.clone(), r2.clone())));
                        }
                    }
                }
            }
        }
        Term::Par(sync, l, r) => {
            let ls = self.get(l);
            let rs = self.get(r);
            let l_tau = ls.iter().any(|(a, _)| *a == Action::Tau);
            let r_tau = rs.iter().any(|(a, _)| *a == Action::Tau);
            for (a, l2) in ls.iter() {
                match a {
                    Action::Tau => {
                        out.insert((
                            Action::Tau,
                            Term::par(sync.clone(), l2.clone(), (**r).clone()),
                        ));
                    }
                    Action::Act(name) if !sync.contains(name) && !r_tau => {
                        out.insert((a.clone(), Term::par(sync.clone(), l2.clone(), (**r).clone())));
                    }
                    _ => {}
                }
            }
            for (a, r2) in rs.iter() {
                match a {
                    Action::Tau => {
                        out.insert((
                            Action::Tau,
                            Term::par(sync.clone(), (**l).clone(), r2.clone()),
                        ));
                    }
                    Action::Act(name) if !sync.contains(name) && !l_tau => {
                        out.insert((a.clone(), Term::par(sync.clone(), (**l).clone(), r2.clone())));
                    }
                    _ => {}
                }
            }
            for (a, l2) in ls.iter() {
                if let Action::Act(name) = a {
                    if sync.contains(name) {
                        for (b, r2) in rs.iter() {
                            if b == a {
                                out.insert((
                                    a.clone(),
                                    Term::par(sync.clone(), l2.clone(), r2.clone()),
                                ));
                            }
                        }
                    }
                }
            }
        }
        Term::Rec(rec) => {
            out = self.get(&unfold(rec)).iter().cloned().collect();
        }
        }
        out
    }
}

/// `<t_X | E>`: the body of the initial variable with every bound variable
/// replaced by its own recursion.
pub fn unfold(rec: &RecSpec) -> Term {
    let body = rec
        .body_of(&rec.init)
        .expect("initial variable is bound")
        .clone();
    let subst: HashMap<VarName, Term> = rec
        .bound_vars()
        .map(|v| {
            (
                v.clone(),
                Term::Rec(RecSpec {
                    init: v.clone(),
                    bindings: rec.bindings.clone(),
                }),
            )
        })
        .collect();
    substitute(&body, &subst)
}

/// Conjunction normal form used for state identity: nested conjunctions are
/// flattened, alpha-duplicate conjuncts removed and the rest sorted, then
/// rebuilt left-nested. Conjunction is the meet of the refinement preorder
/// (idempotent, commutative and associative up to the kernel, which in turn
/// fixes membership in F), so the collapsed state is interchangeable with the
/// original. Without this collapse, recursion through conjunction stacks
/// ever-deeper copies of invariant conjuncts and the term graph of processes
/// such as `<X | X = (<Y|Y=a.Y> /\ a.X) \/ ...>` is infinite.
///
/// Applied outside binders only; unfolded recursion bodies are normalized
/// when their states are interned.
pub fn conj_norm(t: &Term) -> Term {
    match t {
        Term::Nil | Term::Bot | Term::Var(_) | Term::Rec(_) => t.clone(),
        Term::Prefix(a, b) => Term::prefix(a.clone(), conj_norm(b)),
        Term::ExtChoice(l, r) => Term::choice(conj_norm(l), conj_norm(r)),
        Term::Disj(l, r) => Term::disj(conj_norm(l), conj_norm(r)),
        Term::Par(sync, l, r) => Term::par(sync.clone(), conj_norm(l), conj_norm(r)),
        Term::Conj(..) => {
            let mut conjuncts = Vec::new();
            flatten_conj(t, &mut conjuncts);
            let mut canonical: Vec<Term> =
                conjuncts.iter().map(|c| alpha_canon(&conj_norm(c))).collect();
            canonical.sort();
            canonical.dedup();
            let mut iter = canonical.into_iter();
            let first = iter.next().expect("conjunction has at least one conjunct");
            iter.fold(first, Term::conj)
        }
    }
}

fn flatten_conj(t: &Term, out: &mut Vec<Term>) {
    match t {
        Term::Conj(l, r) => {
            flatten_conj(l, out);
            flatten_conj(r, out);
        }
        _ => out.push(t.clone()),
    }
}

struct Builder {
    states: Vec<StateInfo>,
    index: HashMap<Term, StateId>,
    queue: VecDeque<StateId>,
    bound: usize,
    normalize: bool,
    succ: SuccMemo,
}

impl Builder {
    fn intern(&mut self, term: Term) -> Result<StateId, BuildError> {
        let canonical = if self.normalize {
            alpha_canon(&conj_norm(&term))
        } else {
            alpha_canon(&term)
        };
        if let Some(&id) = self.index.get(&canonical) {
            return Ok(id);
        }
        if self.states.len() >= self.bound {
            return Err(BuildError::StateBoundExceeded(self.bound));
        }
        let id = StateId(self.states.len() as u32);
        self.index.insert(canonical.clone(), id);
        self.states.push(StateInfo {
            term: canonical,
            out: Vec::new(),
            stable: true,
            ready: BTreeSet::new(),
            inconsistent: false,
            reachable: false,
            components: Components::None,
        });
        self.queue.push_back(id);
        Ok(id)
    }
}

/// Build the state graph of one root process; `bound` caps the number of
/// distinct states (component-closure states included).
pub fn build_lts(p: &Term, bound: usize) -> Result<Lts, BuildError> {
    build_lts_multi(std::slice::from_ref(p), bound)
}

/// Build one graph holding several roots. Since state identity is the
/// alpha-canonical term and transitions are term-determined, sharing a graph
/// is equivalent to the disjoint union of the individual graphs.
pub fn build_lts_multi(roots: &[Term], bound: usize) -> Result<Lts, BuildError> {
    build_lts_inner(roots, bound, true)
}

/// As [`build_lts_multi`], but with conjunction normalization disabled so
/// states are raw alpha-canonical terms. Only useful for cross-checking the
/// normalized builder; many recursive processes have no finite raw graph.
pub fn build_lts_raw(roots: &[Term], bound: usize) -> Result<Lts, BuildError> {
    build_lts_inner(roots, bound, false)
}

fn build_lts_inner(roots: &[Term], bound: usize, normalize: bool) -> Result<Lts, BuildError> {
    assert!(bound >= 1, "state bound must be positive");
    let mut b = Builder {
        states: Vec::new(),
        index: HashMap::new(),
        queue: VecDeque::new(),
        bound,
        normalize,
        succ: SuccMemo::default(),
    };
    let root_ids = roots
        .iter()
        .map(|p| {
            debug_assert!(p.is_closed(), "roots must be processes");
            b.intern(p.clone())
        })
        .collect::<Result<Vec<_>, _>>()?;

    while let Some(id) = b.queue.pop_front() {
        let term = b.states[id.index()].term.clone();
        let mut out = Vec::new();
        let succs = b.succ.get(&term);
        for (a, tgt) in succs.iter() {
            let tgt_id = b.intern(tgt.clone())?;
            out.push((a.clone(), tgt_id));
        }
        out.sort();
        out.dedup();
        let stable = !out.iter().any(|(a, _)| *a == Action::Tau);
        let ready = out.iter().map(|(a, _)| a.clone()).collect();
        // Component obligations: the subprocesses whose F-status the
        // predicative rules consult.
        let components = match &term {
            Term::Bot => Components::Bot,
            Term::Prefix(_, body) => Components::PrefixBody(b.intern((**body).clone())?),
            Term::Disj(l, r) => {
                Components::DisjOperands(b.intern((**l).clone())?, b.intern((**r).clone())?)
            }
            Term::ExtChoice(l, r) | Term::Par(_, l, r) => {
                Components::EitherOperand(b.intern((**l).clone())?, b.intern((**r).clone())?)
            }
            Term::Conj(l, r) => {
                Components::ConjOperands(b.intern((**l).clone())?, b.intern((**r).clone())?)
            }
            Term::Rec(rec) => Components::RecUnfold(b.intern(unfold(rec))?),
            _ => Components::None,
        };
        let st = &mut b.states[id.index()];
        st.out = out;
        st.stable = stable;
        st.ready = ready;
        st.components = components;
    }

    let mut lts = Lts {
        states: b.states,
        roots: root_ids,
        bound,
        index: b.index,
        normalized: normalize,
    };
    mark_reachable(&mut lts);
    let f = compute_f(&lts);
    for id in f {
        lts.states[id.index()].inconsistent = true;
    }
    Ok(lts)
}

fn mark_reachable(lts: &mut Lts) {
    let mut queue: VecDeque<StateId> = lts.roots.clone().into();
    for &r in &lts.roots {
        lts.states[r.index()].reachable = true;
    }
    while let Some(s) = queue.pop_front() {
        let targets: Vec<StateId> = lts.states[s.index()].out.iter().map(|(_, t)| *t).collect();
        for t in targets {
            if !lts.states[t.index()].reachable {
                lts.states[t.index()].reachable = true;
                queue.push_back(t);
            }
        }
    }
}

/// Least set closed under the predicative rules, computed by iterating the
/// one-step rule consequences to a fixpoint. Depends on the transition
/// relation only, never the other way round.
pub fn compute_f(lts: &Lts) -> BTreeSet<StateId> {
    // Stable tau-descendant sets for the divergence rules; fixed by the
    // transition relation.
    let descendants: Vec<Option<BTreeSet<StateId>>> = lts
        .state_ids()
        .map(|id| match lts.state(id).components {
            Components::ConjOperands(..) | Components::RecUnfold(_) => {
                Some(lts.stable_tau_descendants(id))
            }
            _ => None,
        })
        .collect();

    let mut f: Vec<bool> = vec![false; lts.len()];
    loop {
        let mut changed = false;
        for id in lts.state_ids() {
            if f[id.index()] {
                continue;
            }
            if f_step(lts, id, &f, &descendants) {
                f[id.index()] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    lts.state_ids().filter(|id| f[id.index()]).collect()
}

/// One rule application at `id` given the current approximation of F.
fn f_step(lts: &Lts, id: StateId, f: &[bool], descendants: &[Option<BTreeSet<StateId>>]) -> bool {
    let st = lts.state(id);
    let inf = |s: StateId| f[s.index()];
    match st.components {
        Components::None => false,
        Components::Bot => true,
        Components::PrefixBody(body) => inf(body),
        Components::DisjOperands(l, r) => inf(l) && inf(r),
        Components::EitherOperand(l, r) => inf(l) || inf(r),
        Components::ConjOperands(l, r) => {
            // Either operand inconsistent.
            if inf(l) || inf(r) {
                return true;
            }
            // Stable conjunction with mismatching ready sets.
            if st.stable && lts.state(l).ready != lts.state(r).ready {
                return true;
            }
            // Some enabled label all of whose successors are inconsistent.
            if st
                .ready
                .iter()
                .any(|a| st.out.iter().filter(|(b, _)| b == a).all(|(_, t)| inf(*t)))
                && !st.ready.is_empty()
            {
                return true;
            }
            // All stable tau-descendants inconsistent (vacuously on divergence).
            descendants[id.index()]
                .as_ref()
                .is_some_and(|d| d.iter().all(|s| inf(*s)))
        }
        Components::RecUnfold(unfolded) => {
            inf(unfolded)
                || descendants[id.index()]
                    .as_ref()
                    .is_some_and(|d| d.iter().all(|s| inf(*s)))
        }
    }
}

/// Axioms checked by [`verify_llts`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axiom {
    TauPurity,
    Lts1,
    Lts2,
    /// An inconsistent state with tau enabled must have only inconsistent
    /// tau-successors.
    TauClosureOfF,
}

impl std::fmt::Display for Axiom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Axiom::TauPurity => "tau-purity",
            Axiom::Lts1 => "LTS1",
            Axiom::Lts2 => "LTS2",
            Axiom::TauClosureOfF => "tau-closure of F",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub state: StateId,
    pub axiom: Axiom,
    pub detail: String,
}

/// Check the LLTS axioms on a fully built graph. Every graph produced by
/// [`build_lts`] should yield an empty report; this is the emergent
/// correctness oracle for the rule engine.
pub fn verify_llts(lts: &Lts) -> Vec<Violation> {
    let mut report = Vec::new();
    for id in lts.state_ids() {
        let st = lts.state(id);
        let has_tau = st.ready.contains(&Action::Tau);
        if has_tau && st.ready.iter().any(|a| a.is_visible()) {
            report.push(Violation {
                state: id,
                axiom: Axiom::TauPurity,
                detail: format!("state {} has both tau and visible transitions", st.term),
            });
        }
        if !st.inconsistent {
            for a in &st.ready {
                let all_f = st
                    .out
                    .iter()
                    .filter(|(b, _)| b == a)
                    .all(|(_, t)| lts.in_f(*t));
                if all_f {
                    report.push(Violation {
                        state: id,
                        axiom: Axiom::Lts1,
                        detail: format!(
                            "state {} has every {a}-successor inconsistent but is not in F",
                            st.term
                        ),
                    });
                }
            }
        }
        if st.inconsistent && has_tau {
            for (a, t) in &st.out {
                if *a == Action::Tau && !lts.in_f(*t) {
                    report.push(Violation {
                        state: id,
                        axiom: Axiom::TauClosureOfF,
                        detail: format!(
                            "inconsistent state {} has a consistent tau-successor",
                            st.term
                        ),
                    });
                }
            }
        }
    }
    // LTS2: every consistent state has an F-free weak path to a stable
    // consistent state. Propagate backwards from the good endpoints.
    let mut ok = vec![false; lts.len()];
    let mut queue = VecDeque::new();
    for id in lts.state_ids() {
        let st = lts.state(id);
        if st.stable && !st.inconsistent {
            ok[id.index()] = true;
            queue.push_back(id);
        }
    }
    // Reverse tau edges restricted to consistent sources.
    let mut preds: Vec<Vec<StateId>> = vec![Vec::new(); lts.len()];
    for (from, a, to) in lts.transitions() {
        if *a == Action::Tau && !lts.in_f(from) {
            preds[to.index()].push(from);
        }
    }
    while let Some(s) = queue.pop_front() {
        for &p in &preds[s.index()] {
            if !ok[p.index()] {
                ok[p.index()] = true;
                queue.push_back(p);
            }
        }
    }
    for id in lts.state_ids() {
        if !lts.in_f(id) && !ok[id.index()] {
            report.push(Violation {
                state: id,
                axiom: Axiom::Lts2,
                detail: format!(
                    "state {} has no F-free path to a stable consistent state",
                    lts.state(id).term
                ),
            });
        }
    }
    report
}
