//! Transformational processors: rewriting, instantiation, forward
//! instantiation and rule overlap instantiation.

mod instantiation;
mod overlap;
mod rewriting;

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::adp::{Adp, AdpProblem};
use crate::term::{unify, Position, Substitution, Term, Var};

pub use instantiation::{proc_forward_instantiation, proc_instantiation};
pub use overlap::{is_captured, narrowing_substitutions, proc_rule_overlap_instantiation, NarrowingCandidate};
pub use rewriting::{proc_rewriting, rewriting_targets};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("no side condition of the rewriting processor holds")]
    SideConditionUnmet,
    #[error("annotation at or below the rewrite position")]
    AnnotationBelowTau,
    #[error("no rule with flag true applies at the rewrite position")]
    NoRuleApplicable,
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("transformation only reproduces the original ADP")]
    NoProgress,
}

/// Which case of the rewriting soundness theorem justified a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SideCondition {
    /// Usable rules non-overlapping; the applied rule linear and non-erasing.
    LinearNonErasing,
    /// Usable rules non-overlapping with trivial distributions.
    AllTrivial,
    /// Usable rules non-overlapping; the redex ground and the step innermost.
    GroundInnermost,
}

impl std::fmt::Display for SideCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SideCondition::LinearNonErasing => "NO, L, NE",
            SideCondition::AllTrivial => "NO, trivial distributions",
            SideCondition::GroundInnermost => "NO, ground, innermost",
        })
    }
}

/// No two renamed-apart left-hand sides overlap: neither at the root of
/// distinct rules nor at a non-variable position of another (or a proper
/// one of the same) left-hand side.
pub fn is_non_overlapping<'a>(lhss: impl IntoIterator<Item = &'a Term>) -> bool {
    let lhss: Vec<Term> = lhss.into_iter().map(Term::flatten).collect();
    for (i, l1) in lhss.iter().enumerate() {
        for (k, l2) in lhss.iter().enumerate() {
            let l2 = l2.rename_fresh();
            for pos in l1.app_positions() {
                if i == k && pos.is_root() {
                    continue;
                }
                if unify(l1.subterm_at(&pos).expect("own position"), &l2).is_some() {
                    return false;
                }
            }
        }
    }
    true
}

/// Every variable occurs at most once in the left-hand side and in each
/// support term.
pub fn is_linear(adp: &Adp) -> bool {
    let lin = |t: &Term| t.var_counts().values().all(|&c| c <= 1);
    lin(&adp.lhs) && adp.rhs.terms().all(lin)
}

/// Every variable of the left-hand side occurs in every support term.
pub fn is_non_erasing(adp: &Adp) -> bool {
    let vars = adp.lhs.var_set();
    adp.rhs.terms().all(|r| vars.is_subset(&r.var_set()))
}

/// Clear every annotation except those at `keep`.
pub(crate) fn keep_annotations(t: &Term, keep: &BTreeSet<Position>) -> Term {
    let mut out = t.clone();
    for pos in t.annotated_positions() {
        if !keep.contains(&pos) {
            if let Some(Term::App { annotated, .. }) = out.subterm_at_mut(pos.path()) {
                *annotated = false;
            }
        }
    }
    out
}

/// Replace ADP `at` by `new` and dedup modulo renaming.
pub(crate) fn replace_adp(p: &AdpProblem, at: usize, new: Vec<Adp>) -> AdpProblem {
    let mut adps = Vec::with_capacity(p.len() + new.len());
    adps.extend(p.adps()[..at].iter().cloned());
    adps.extend(new);
    adps.extend(p.adps()[at + 1..].iter().cloned());
    AdpProblem::new(AdpProblem::dedup(adps)).with_classical(p.is_classical())
}

/// Substitutions restricted to `vars`, deduplicated up to renaming of the
/// introduced variables; errors when one merely renames `vars`.
pub(crate) fn collect_substitutions(
    vars: &BTreeSet<Var>,
    deltas: impl IntoIterator<Item = Substitution>,
) -> Result<Vec<Substitution>, TransformError> {
    let order: Vec<Var> = vars.iter().cloned().collect();
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for d in deltas {
        let d = d.restrict(vars);
        if d.is_renaming_on(vars) {
            return Err(TransformError::NoProgress);
        }
        if seen.insert(tuple_of(&order, &d).rename_canonical()) {
            out.push(d);
        }
    }
    Ok(out)
}

/// `(x₁δ, …, x_nδ)` as a term, for instance checks between substitutions.
pub(crate) fn tuple_of(vars: &[Var], d: &Substitution) -> Term {
    let sym = crate::term::Symbol::new("(tuple)", vars.len());
    Term::app(sym, vars.iter().map(|v| Term::Var(v.clone()).apply(d)).collect())
}

trait RenameCanonical {
    fn rename_canonical(&self) -> Term;
}

impl RenameCanonical for Term {
    fn rename_canonical(&self) -> Term {
        let sigma = Substitution::from_pairs(
            self.vars().into_iter().enumerate().map(|(i, v)| (v, Term::var(&format!("_c{i}")))),
        );
        self.apply(&sigma)
    }
}
