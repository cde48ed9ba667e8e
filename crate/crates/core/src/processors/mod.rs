//! The core ADP processors: dependency graph, usable terms, usable rules,
//! reduction pairs and probability removal.

mod graph;
mod reduction_pair;
mod removal;
mod usable;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::adp::{Adp, AdpProblem};
use crate::poly::{Interpretation, PolyError};
use crate::ptrs::{RedexIndex, Rule};
use crate::term::{cap, unify, Position, Substitution, Symbol, Term};
use crate::transforms::SideCondition;

pub use graph::{dependency_graph, proc_dependency_graph, DependencyGraph};
pub use reduction_pair::proc_reduction_pair;
pub use removal::proc_probability_removal;
pub use usable::{proc_usable_rules, proc_usable_terms, usable_rules_closure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProcError {
    #[error("condition ({which}) violated for ADP {adp}{}", .j.map(|j| format!(", support term {}", j + 1)).unwrap_or_default())]
    ConditionViolated { which: u8, adp: usize, j: Option<usize> },
    #[error("no ADP decreases strictly")]
    EmptyStrictSet,
    #[error("ADP {0} has a nontrivial distribution")]
    NontrivialDistribution(usize),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("processor not applicable: {0}")]
    NotApplicable(String),
}

/// What a processor did, with enough detail to re-run it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    DependencyGraph { edges: Vec<(usize, usize)>, sccs: Vec<Vec<usize>> },
    UsableTerms { removed: Vec<(usize, usize, Position)> },
    UsableRules { deflagged: Vec<usize> },
    ReductionPair { interpretation: Interpretation, strict: Vec<usize> },
    ProbabilityRemoval { dps: Vec<(Term, Term)>, np: Vec<Rule> },
    Rewriting { adp: usize, j: usize, pos: Position, rule: usize, condition: SideCondition },
    Instantiation { adp: usize, substitutions: Vec<Substitution> },
    ForwardInstantiation { adp: usize, substitutions: Vec<Substitution> },
    RuleOverlap { adp: usize, j: usize, pos: Position, substitutions: Vec<Substitution> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProcessorResult {
    pub children: Vec<AdpProblem>,
    pub justification: Justification,
}

/// Over-approximates whether `t#σ₁` can reach `ℓ₂#σ₂` by innermost
/// `np(P)`-steps with `ℓ₁σ₁` and `ℓ₂σ₂` in argument normal form: cap `t#`,
/// unify with a renamed `ℓ₂#`, and check both instantiated left-hand sides.
pub(crate) fn may_reach(t: &Term, l1: &Term, target: &Adp, np_defined: &BTreeSet<Symbol>, idx: &RedexIndex) -> bool {
    let capped = cap(&t.annotate_root(), np_defined, true);
    let l2 = target.lhs.rename_fresh();
    match unify(&capped, &l2.annotate_root()) {
        Some(delta) => idx.is_anf(&l1.apply(&delta)) && idx.is_anf(&l2.apply(&delta)),
        None => false,
    }
}
