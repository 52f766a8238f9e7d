//! Ready-simulation refinement: weak F-free transition closures, the stable
//! ready simulation relation, the derived preorder, the alternative
//! formulation over arbitrary states, and the up-to checker.
//!
//! All computations run over a single built graph; comparing two processes
//! uses one graph holding both roots, which is equivalent to the disjoint
//! union of their individual graphs because transitions are term-determined.

use crate::semantics::{build_lts_multi, BuildError, Lts, StateId};
use crate::syntax::{Action, Term};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

/// All stable states reachable from `s` by an F-free tau-path (`s` included
/// when stable and consistent); empty when `s` is inconsistent.
pub fn weak_eps_f(lts: &Lts, s: StateId) -> BTreeSet<StateId> {
    if lts.in_f(s) {
        return BTreeSet::new();
    }
    let mut seen = BTreeSet::from([s]);
    let mut queue = VecDeque::from([s]);
    let mut out = BTreeSet::new();
    while let Some(cur) = queue.pop_front() {
        if lts.state(cur).stable {
            out.insert(cur);
            continue;
        }
        for (a, tgt) in &lts.state(cur).out {
            if *a == Action::Tau && !lts.in_f(*tgt) && seen.insert(*tgt) {
                queue.push_back(*tgt);
            }
        }
    }
    out
}

/// All stable states reachable as `s => a-step => stable`, every state along
/// the way outside F.
pub fn weak_a_f(lts: &Lts, s: StateId, a: &Action) -> BTreeSet<StateId> {
    debug_assert!(a.is_visible());
    let mut out = BTreeSet::new();
    for mid in eps_f_reach(lts, s) {
        for (b, tgt) in &lts.state(mid).out {
            if b == a && !lts.in_f(*tgt) {
                out.extend(weak_eps_f(lts, *tgt));
            }
        }
    }
    out
}

/// F-free tau-closure of `s` (stability not required); empty when `s` is in F.
fn eps_f_reach(lts: &Lts, s: StateId) -> Vec<StateId> {
    if lts.in_f(s) {
        return Vec::new();
    }
    let mut seen = BTreeSet::from([s]);
    let mut queue = VecDeque::from([s]);
    while let Some(cur) = queue.pop_front() {
        for (a, tgt) in &lts.state(cur).out {
            if *a == Action::Tau && !lts.in_f(*tgt) && seen.insert(*tgt) {
                queue.push_back(*tgt);
            }
        }
    }
    seen.into_iter().collect()
}

/// Which kind of relation a [`SimRelation`] holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SimKind {
    StableRS,
    Alt,
    UptoWitness,
}

/// A set of state pairs with a kind tag.
#[derive(Debug, Clone, Serialize)]
pub struct SimRelation {
    pub kind: SimKind,
    pub pairs: BTreeSet<(StateId, StateId)>,
}

impl SimRelation {
    pub fn contains(&self, l: StateId, r: StateId) -> bool {
        self.pairs.contains(&(l, r))
    }
}

/// The clause a failing pair violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Clause {
    #[serde(rename = "RS2")]
    Rs2,
    #[serde(rename = "RS3")]
    Rs3,
    #[serde(rename = "RS4")]
    Rs4,
    #[serde(rename = "eps-matching")]
    EpsMatching,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceStep {
    pub left: String,
    pub right: String,
    pub clause: Clause,
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub trace: Vec<TraceStep>,
    pub clause: Clause,
}

/// Outcome of a refinement query: a witness relation or a counterexample.
#[derive(Debug, Clone)]
pub struct RefinementVerdict {
    pub holds: bool,
    pub witness: Option<SimRelation>,
    pub counterexample: Option<Counterexample>,
}

impl RefinementVerdict {
    pub fn to_json(&self) -> serde_json::Value {
        if self.holds {
            let pairs: Vec<[u32; 2]> = self
                .witness
                .as_ref()
                .map(|w| w.pairs.iter().map(|(l, r)| [l.0, r.0]).collect())
                .unwrap_or_default();
            serde_json::json!({ "holds": true, "witness": pairs })
        } else {
            serde_json::json!({
                "holds": false,
                "counterexample": self.counterexample,
            })
        }
    }
}

/// Why a candidate pair was discarded during fixpoint shrinking.
#[derive(Debug, Clone)]
struct Removal {
    clause: Clause,
    /// For RS3 failures, a child pair whose earlier removal caused this one.
    child: Option<(StateId, StateId)>,
}

/// Shared machinery for the simulation fixpoints over one graph.
pub struct SimEngine<'a> {
    lts: &'a Lts,
    labels: Vec<Action>,
    eps_stable: Vec<Vec<StateId>>,
    a_stable: BTreeMap<Action, Vec<Vec<StateId>>>,
}

impl<'a> SimEngine<'a> {
    pub fn new(lts: &'a Lts) -> SimEngine<'a> {
        let labels: Vec<Action> = lts.visible_labels().into_iter().collect();
        let eps_stable = lts
            .state_ids()
            .map(|s| weak_eps_f(lts, s).into_iter().collect())
            .collect();
        let a_stable = labels
            .iter()
            .map(|a| {
                (
                    a.clone(),
                    lts.state_ids()
                        .map(|s| weak_a_f(lts, s, a).into_iter().collect())
                        .collect(),
                )
            })
            .collect();
        SimEngine {
            lts,
            labels,
            eps_stable,
            a_stable,
        }
    }

    pub fn lts(&self) -> &Lts {
        self.lts
    }

    fn eps(&self, s: StateId) -> &[StateId] {
        &self.eps_stable[s.index()]
    }

    fn weak_a(&self, s: StateId, a: &Action) -> &[StateId] {
        &self.a_stable[a][s.index()]
    }

    /// RS2 and RS4 hold of a stable pair regardless of the relation.
    fn local_stable_ok(&self, l: StateId, r: StateId) -> Result<(), Clause> {
        if !self.lts.in_f(l) {
            if self.lts.in_f(r) {
                return Err(Clause::Rs2);
            }
            if self.lts.state(l).ready != self.lts.state(r).ready {
                return Err(Clause::Rs4);
            }
        }
        Ok(())
    }

    /// Greatest stable ready simulation restricted to the given candidate
    /// pairs, with removal reasons.
    fn gfp_stable(
        &self,
        mut pairs: BTreeSet<(StateId, StateId)>,
        reasons: &mut HashMap<(StateId, StateId), Removal>,
    ) -> BTreeSet<(StateId, StateId)> {
        pairs.retain(|&(l, r)| match self.local_stable_ok(l, r) {
            Ok(()) => true,
            Err(clause) => {
                reasons.insert((l, r), Removal { clause, child: None });
                false
            }
        });
        loop {
            let mut removed = Vec::new();
            for &(l, r) in &pairs {
                'outer: for a in &self.labels {
                    for &l2 in self.weak_a(l, a) {
                        let matched = self
                            .weak_a(r, a)
                            .iter()
                            .any(|&r2| pairs.contains(&(l2, r2)));
                        if !matched {
                            let child = self.weak_a(r, a).first().map(|&r2| (l2, r2));
                            removed.push(((l, r), Removal { clause: Clause::Rs3, child }));
                            break 'outer;
                        }
                    }
                }
            }
            if removed.is_empty() {
                break;
            }
            for (pair, reason) in removed {
                pairs.remove(&pair);
                reasons.insert(pair, reason);
            }
        }
        pairs
    }

    /// Pairs reachable in the simulation game from the seeds via weak visible
    /// steps; membership in the largest relation only depends on these.
    fn game_closure(
        &self,
        seeds: impl IntoIterator<Item = (StateId, StateId)>,
    ) -> BTreeSet<(StateId, StateId)> {
        let mut pairs: BTreeSet<(StateId, StateId)> = seeds.into_iter().collect();
        let mut queue: VecDeque<(StateId, StateId)> = pairs.iter().copied().collect();
        while let Some((l, r)) = queue.pop_front() {
            for a in &self.labels {
                for &l2 in self.weak_a(l, a) {
                    for &r2 in self.weak_a(r, a) {
                        if pairs.insert((l2, r2)) {
                            queue.push_back((l2, r2));
                        }
                    }
                }
            }
        }
        pairs
    }

    /// The largest stable ready simulation over all stable state pairs.
    pub fn stable_rs_full(&self) -> SimRelation {
        let stable: Vec<StateId> = self
            .lts
            .state_ids()
            .filter(|&s| self.lts.state(s).stable)
            .collect();
        let mut pairs = BTreeSet::new();
        for &l in &stable {
            for &r in &stable {
                pairs.insert((l, r));
            }
        }
        let mut reasons = HashMap::new();
        SimRelation {
            kind: SimKind::StableRS,
            pairs: self.gfp_stable(pairs, &mut reasons),
        }
    }

    /// Does `l` refine `r` (the derived preorder between two states)?
    pub fn refines_states(&self, l: StateId, r: StateId) -> RefinementVerdict {
        let left: Vec<StateId> = self.eps(l).to_vec();
        let right: Vec<StateId> = self.eps(r).to_vec();
        let seeds = left
            .iter()
            .flat_map(|&p| right.iter().map(move |&q| (p, q)));
        let candidates = self.game_closure(seeds);
        let mut reasons = HashMap::new();
        let surviving = self.gfp_stable(candidates, &mut reasons);

        for &p in &left {
            let matched = right.iter().any(|&q| surviving.contains(&(p, q)));
            if !matched {
                let trace = self.build_trace(p, right.first().copied(), &reasons);
                let clause = trace.last().map(|t| t.clause).unwrap_or(Clause::EpsMatching);
                return RefinementVerdict {
                    holds: false,
                    witness: None,
                    counterexample: Some(Counterexample { trace, clause }),
                };
            }
        }
        RefinementVerdict {
            holds: true,
            witness: Some(SimRelation {
                kind: SimKind::StableRS,
                pairs: surviving,
            }),
            counterexample: None,
        }
    }

    fn build_trace(
        &self,
        p: StateId,
        q: Option<StateId>,
        reasons: &HashMap<(StateId, StateId), Removal>,
    ) -> Vec<TraceStep> {
        let term = |s: StateId| self.lts.state(s).term.to_string();
        let Some(q) = q else {
            return vec![TraceStep {
                left: term(p),
                right: "(no F-free stable descendant)".to_string(),
                clause: Clause::EpsMatching,
            }];
        };
        let mut trace = Vec::new();
        let mut cur = (p, q);
        let mut seen = BTreeSet::new();
        while seen.insert(cur) {
            match reasons.get(&cur) {
                Some(removal) => {
                    trace.push(TraceStep {
                        left: term(cur.0),
                        right: term(cur.1),
                        clause: removal.clause,
                    });
                    match removal.child {
                        Some(child) => cur = child,
                        None => break,
                    }
                }
                None => break,
            }
        }
        if trace.is_empty() {
            trace.push(TraceStep {
                left: term(p),
                right: term(q),
                clause: Clause::EpsMatching,
            });
        }
        trace
    }

    /// The alternative formulation: a relation over arbitrary (not only
    /// stable) state pairs containing the queried pair.
    pub fn refines_alt_states(&self, l: StateId, r: StateId) -> RefinementVerdict {
        // Candidate closure under both the eps- and weak-a expansions.
        let mut pairs = BTreeSet::from([(l, r)]);
        let mut queue = VecDeque::from([(l, r)]);
        while let Some((p, q)) = queue.pop_front() {
            let push = |pair: (StateId, StateId),
                            pairs: &mut BTreeSet<(StateId, StateId)>,
                            queue: &mut VecDeque<(StateId, StateId)>| {
                if pairs.insert(pair) {
                    queue.push_back(pair);
                }
            };
            for &p2 in self.eps(p) {
                for &q2 in self.eps(q) {
                    push((p2, q2), &mut pairs, &mut queue);
                }
            }
            if self.lts.state(p).stable && self.lts.state(q).stable {
                for a in &self.labels {
                    for &p2 in self.weak_a(p, a) {
                        for &q2 in self.weak_a(q, a) {
                            push((p2, q2), &mut pairs, &mut queue);
                        }
                    }
                }
            }
        }
        // Greatest fixpoint by iterated removal over the three clauses.
        loop {
            let mut removed = Vec::new();
            'pairs: for &(p, q) in &pairs {
                let both_stable = self.lts.state(p).stable && self.lts.state(q).stable;
                if both_stable && !self.lts.in_f(p) {
                    if self.lts.in_f(q) || self.lts.state(p).ready != self.lts.state(q).ready {
                        removed.push((p, q));
                        continue;
                    }
                }
                for &p2 in self.eps(p) {
                    if !self.eps(q).iter().any(|&q2| pairs.contains(&(p2, q2))) {
                        removed.push((p, q));
                        continue 'pairs;
                    }
                }
                if both_stable {
                    for a in &self.labels {
                        for &p2 in self.weak_a(p, a) {
                            if !self
                                .weak_a(q, a)
                                .iter()
                                .any(|&q2| pairs.contains(&(p2, q2)))
                            {
                                removed.push((p, q));
                                continue 'pairs;
                            }
                        }
                    }
                }
            }
            if removed.is_empty() {
                break;
            }
            for pair in removed {
                pairs.remove(&pair);
            }
        }
        if pairs.contains(&(l, r)) {
            RefinementVerdict {
                holds: true,
                witness: Some(SimRelation {
                    kind: SimKind::Alt,
                    pairs,
                }),
                counterexample: None,
            }
        } else {
            let term = |s: StateId| self.lts.state(s).term.to_string();
            RefinementVerdict {
                holds: false,
                witness: None,
                counterexample: Some(Counterexample {
                    trace: vec![TraceStep {
                        left: term(l),
                        right: term(r),
                        clause: Clause::EpsMatching,
                    }],
                    clause: Clause::EpsMatching,
                }),
            }
        }
    }

    /// Check a user-supplied relation against the up-to clauses: weak moves
    /// are matched through the composition `stable-RS ; R ; stable-RS`.
    pub fn check_upto(&self, rel: &SimRelation) -> bool {
        let srs = self.stable_rs_full();
        let composed_match = |p2: StateId, q2: StateId| {
            rel.pairs
                .iter()
                .any(|&(m, n)| srs.contains(p2, m) && srs.contains(n, q2))
        };
        for &(p, q) in &rel.pairs {
            let both_stable = self.lts.state(p).stable && self.lts.state(q).stable;
            if both_stable
                && !self.lts.in_f(p)
                && self.lts.state(p).ready != self.lts.state(q).ready
            {
                return false;
            }
            for &p2 in self.eps(p) {
                if !self
                    .eps(q)
                    .iter()
                    .any(|&q2| composed_match(p2, q2))
                {
                    return false;
                }
            }
            if both_stable {
                for a in &self.labels {
                    for &p2 in self.weak_a(p, a) {
                        if !self
                            .weak_a(q, a)
                            .iter()
                            .any(|&q2| composed_match(p2, q2))
                        {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }
}

/// The largest stable ready simulation over all stable pairs of a graph.
pub fn stable_rs(lts: &Lts) -> SimRelation {
    SimEngine::new(lts).stable_rs_full()
}

/// Does `p` refine `q` under the ready-simulation preorder?
pub fn refines(p: &Term, q: &Term, bound: usize) -> Result<RefinementVerdict, BuildError> {
    let lts = build_lts_multi(&[p.clone(), q.clone()], bound)?;
    let engine = SimEngine::new(&lts);
    Ok(engine.refines_states(lts.roots[0], lts.roots[1]))
}

/// The alternative formulation of the preorder over arbitrary states.
pub fn refines_alt(p: &Term, q: &Term, bound: usize) -> Result<RefinementVerdict, BuildError> {
    let lts = build_lts_multi(&[p.clone(), q.clone()], bound)?;
    let engine = SimEngine::new(&lts);
    Ok(engine.refines_alt_states(lts.roots[0], lts.roots[1]))
}

/// Both directions of [`refines`]: the kernel of the preorder.
pub fn equivalent(p: &Term, q: &Term, bound: usize) -> Result<bool, BuildError> {
    let lts = build_lts_multi(&[p.clone(), q.clone()], bound)?;
    let engine = SimEngine::new(&lts);
    Ok(engine.refines_states(lts.roots[0], lts.roots[1]).holds
        && engine.refines_states(lts.roots[1], lts.roots[0]).holds)
}

/// Check a user-supplied relation against the up-to clauses.
pub fn check_upto(rel: &SimRelation, lts: &Lts) -> bool {
    SimEngine::new(lts).check_upto(rel)
}
