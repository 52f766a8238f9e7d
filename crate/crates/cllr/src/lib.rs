//! A toolkit for the process calculus CLL_R over logic labelled transition
//! systems: parsing, operational semantics with the inconsistency predicate,
//! ready-simulation refinement checking, recursive-equation analysis, and an
//! encoding of an action-based CTL fragment.

pub mod actl;
pub mod cli;
pub mod equations;
pub mod export;
pub mod gen;
pub mod refinement;
pub mod semantics;
pub mod syntax;
