//! Property tests over randomly generated terms: printer/parser round
//! trips, canonicalization, substitution and normalization invariants.

use cllr::gen::TermGen;
use cllr::semantics::conj_norm;
use cllr::syntax::{
    alpha_canon, guard_mode, parse_alphabet, parse_term, substitute, GuardMode, Term,
};
use proptest::prelude::*;
use std::collections::HashMap;

fn random_term(seed: u64, depth: usize) -> Term {
    let mut g = TermGen::new(seed, parse_alphabet("a,b").unwrap());
    g.term(depth)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), depth in 0usize..4) {
        let t = random_term(seed, depth);
        let reparsed = parse_term(&t.to_string(), &parse_alphabet("a,b").unwrap()).unwrap();
        prop_assert_eq!(reparsed, t);
    }

    #[test]
    fn alpha_canon_is_idempotent(seed in any::<u64>(), depth in 0usize..4) {
        let c = alpha_canon(&random_term(seed, depth));
        prop_assert_eq!(alpha_canon(&c), c);
    }

    #[test]
    fn empty_substitution_is_identity(seed in any::<u64>(), depth in 0usize..4) {
        let t = random_term(seed, depth);
        prop_assert_eq!(substitute(&t, &HashMap::new()), t);
    }

    #[test]
    fn substituting_a_non_free_variable_is_identity(seed in any::<u64>(), depth in 0usize..4) {
        let t = random_term(seed, depth);
        let mut subst = HashMap::new();
        subst.insert("ZZZ".to_string(), Term::Bot);
        prop_assert_eq!(substitute(&t, &subst), t);
    }

    #[test]
    fn conj_norm_is_idempotent(seed in any::<u64>(), depth in 0usize..4) {
        let n = conj_norm(&random_term(seed, depth));
        prop_assert_eq!(conj_norm(&n), n);
    }

    #[test]
    fn guard_mode_is_vacuously_strong(seed in any::<u64>(), depth in 0usize..4) {
        // a variable with no free occurrence is strongly guarded by convention
        let t = random_term(seed, depth);
        prop_assert_eq!(guard_mode(&t, "ZZZ"), GuardMode::Strong);
    }

    #[test]
    fn canonical_forms_agree_for_printed_copies(seed in any::<u64>(), depth in 0usize..4) {
        // printing loses nothing that canonicalization can see
        let t = random_term(seed, depth);
        let copy = parse_term(&t.to_string(), &parse_alphabet("a,b").unwrap()).unwrap();
        prop_assert_eq!(alpha_canon(&t), alpha_canon(&copy));
    }
}
