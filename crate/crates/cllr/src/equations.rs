//! Analysis of recursive equations `X = t_X` under the refinement preorder:
//! consistency of the canonical recursion, per-candidate solution checking,
//! the uniqueness precondition, and verification of the greatest-solution
//! property on candidate sets.

use crate::refinement::{equivalent, refines};
use crate::semantics::{build_lts, BuildError};
use crate::syntax::{
    conj_scope_free, free_vars, guard_mode, parse_alphabet, parse_term, substitute, Alphabet,
    GuardMode, ParseError, Term, VarName,
};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EqError {
    #[error("equation body must be strongly guarded in {var} for greatest-solution analysis (found {found:?})")]
    PreconditionNotStronglyGuarded { var: VarName, found: GuardMode },
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error("equation file: {0}")]
    Format(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// An equation `X = t_X` with free variables of the body contained in `{X}`.
#[derive(Debug, Clone)]
pub struct EquationProblem {
    pub var: VarName,
    pub body: Term,
    pub alphabet: Alphabet,
    pub bound: usize,
}

impl EquationProblem {
    pub fn new(
        var: &str,
        body: Term,
        alphabet: Alphabet,
        bound: usize,
    ) -> Result<EquationProblem, EqError> {
        let fv = free_vars(&body);
        if fv.iter().any(|v| v != var) {
            return Err(EqError::Format(format!(
                "body has free variables other than {var}: {fv:?}"
            )));
        }
        if guard_mode(&body, var) == GuardMode::Unguarded {
            return Err(EqError::Format(format!("{var} is unguarded in the body")));
        }
        Ok(EquationProblem {
            var: var.to_string(),
            body,
            alphabet,
            bound,
        })
    }

    /// `t_X{p/X}`.
    pub fn instantiate(&self, p: &Term) -> Term {
        let mut subst = HashMap::new();
        subst.insert(self.var.clone(), p.clone());
        substitute(&self.body, &subst)
    }
}

/// The canonical candidate `<X | X = t_X>`.
pub fn canonical_solution(prob: &EquationProblem) -> Term {
    Term::rec1(&prob.var, prob.body.clone())
}

/// Verdict on one candidate solution.
#[derive(Debug, Clone)]
pub struct SolutionReport {
    pub candidate: Term,
    pub is_solution: bool,
    pub is_consistent: bool,
    /// candidate refines the canonical recursion; only evaluated for
    /// consistent solutions.
    pub refines_canonical: Option<bool>,
}

impl SolutionReport {
    pub fn is_consistent_solution(&self) -> bool {
        self.is_solution && self.is_consistent
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "candidate": self.candidate.to_string(),
            "isSolution": self.is_solution,
            "isConsistent": self.is_consistent,
            "refinesCanonical": self.refines_canonical,
        })
    }
}

/// Is `p` a solution of the equation, i.e. `p = t_X{p/X}` under the kernel of
/// the preorder?
pub fn is_solution(p: &Term, prob: &EquationProblem) -> Result<SolutionReport, EqError> {
    let instantiated = prob.instantiate(p);
    let is_solution = equivalent(p, &instantiated, prob.bound)?;
    let lts = build_lts(p, prob.bound)?;
    let is_consistent = !lts.in_f(lts.initial());
    let refines_canonical = if is_solution && is_consistent {
        let canonical = canonical_solution(prob);
        Some(refines(p, &canonical, prob.bound)?.holds)
    } else {
        None
    };
    Ok(SolutionReport {
        candidate: p.clone(),
        is_solution,
        is_consistent,
        refines_canonical,
    })
}

/// Check the greatest-solution property over a candidate set: every
/// consistent solution among the candidates must refine the canonical
/// recursion. Requires the body strongly guarded in the variable.
pub fn check_greatest(
    prob: &EquationProblem,
    candidates: &[Term],
) -> Result<Vec<SolutionReport>, EqError> {
    let mode = guard_mode(&prob.body, &prob.var);
    if mode != GuardMode::Strong {
        return Err(EqError::PreconditionNotStronglyGuarded {
            var: prob.var.clone(),
            found: mode,
        });
    }
    candidates.iter().map(|p| is_solution(p, prob)).collect()
}

/// True iff the unique-solution hypothesis holds: strongly guarded and free
/// of conjunction scopes.
pub fn uniqueness_precondition(prob: &EquationProblem) -> bool {
    guard_mode(&prob.body, &prob.var) == GuardMode::Strong
        && conj_scope_free(&prob.body, &prob.var)
}

/// A parsed equation file: alphabet header, variable, body, candidates.
#[derive(Debug, Clone)]
pub struct EquationFile {
    pub problem: EquationProblem,
    pub candidates: Vec<Term>,
}

/// Parse the line-oriented equation format:
///
/// ```text
/// alphabet a,b
/// var X
/// body (<Y | Y = a.Y> /\ a.X) \/ (<Z | Z = b.Z> /\ b.X)
/// candidate <X | X = a.X>
/// candidate <X | X = b.X>
/// ```
pub fn parse_equation_file(text: &str, bound: usize) -> Result<EquationFile, EqError> {
    let mut alphabet = None;
    let mut var = None;
    let mut body_src = None;
    let mut candidate_srcs = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, rest) = line.split_once(char::is_whitespace).ok_or_else(|| {
            EqError::Format(format!("malformed line: {line}"))
        })?;
        let rest = rest.trim();
        match key {
            "alphabet" => alphabet = Some(parse_alphabet(rest)?),
            "var" => var = Some(rest.to_string()),
            "body" => body_src = Some(rest.to_string()),
            "candidate" => candidate_srcs.push(rest.to_string()),
            _ => return Err(EqError::Format(format!("unknown directive: {key}"))),
        }
    }
    let alphabet = alphabet.ok_or_else(|| EqError::Format("missing alphabet line".into()))?;
    let var = var.ok_or_else(|| EqError::Format("missing var line".into()))?;
    let body_src = body_src.ok_or_else(|| EqError::Format("missing body line".into()))?;
    let body = parse_term(&body_src, &alphabet)?;
    let candidates = candidate_srcs
        .iter()
        .map(|src| {
            let t = parse_term(src, &alphabet)?;
            if !t.is_closed() {
                return Err(EqError::Format(format!("candidate is not closed: {src}")));
            }
            Ok(t)
        })
        .collect::<Result<Vec<_>, EqError>>()?;
    let problem = EquationProblem::new(&var, body, alphabet, bound)?;
    Ok(EquationFile {
        problem,
        candidates,
    })
}
