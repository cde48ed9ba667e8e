use std::collections::BTreeSet;

use super::{collect_substitutions, keep_annotations, replace_adp, tuple_of, TransformError};
use crate::adp::{Adp, AdpProblem};
use crate::processors::{Justification, ProcessorResult};
use crate::term::{match_term, unify, Position, Substitution, Term, Var};

/// A narrowing substitution of `t`: `t|τ` unifies with the renamed
/// left-hand side of ADP `adp` with both instantiated left-hand sides in ANF.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NarrowingCandidate {
    pub position: Position,
    pub adp: usize,
    pub substitution: Substitution,
}

/// All narrowing substitutions of the annotation-free term `t`, which
/// occurs in the right-hand side of an ADP with left-hand side `lhs`.
pub fn narrowing_substitutions(t: &Term, lhs: &Term, p: &AdpProblem) -> Vec<NarrowingCandidate> {
    let idx = p.redex_index();
    let t = t.flatten();
    let mut out = Vec::new();
    for position in t.app_positions() {
        let sub = t.subterm_at(&position).expect("own position");
        for (i, b) in p.adps().iter().enumerate() {
            let l2 = b.lhs.rename_fresh();
            let Some(d) = unify(sub, &l2) else { continue };
            if idx.is_anf(&lhs.apply(&d)) && idx.is_anf(&l2.apply(&d)) {
                out.push(NarrowingCandidate { position: position.clone(), adp: i, substitution: d });
            }
        }
    }
    out
}

/// Every narrowing substitution of `t2` is an instance of some `deltas`
/// entry on the variables of `lhs`.
pub fn is_captured(t2: &Term, deltas: &[Substitution], lhs: &Term, p: &AdpProblem) -> bool {
    let vars: Vec<Var> = lhs.vars();
    let general: Vec<Term> = deltas.iter().map(|d| tuple_of(&vars, d)).collect();
    narrowing_substitutions(t2, lhs, p).iter().all(|c| {
        let specific = tuple_of(&vars, &c.substitution);
        general.iter().any(|g| match_term(&g.rename_fresh(), &specific).is_some())
    })
}

/// Instantiate ADP `adp` by all narrowing substitutions of the annotated
/// subterm at `pos` of its `j`-th support term, keeping a residual copy
/// annotated only at subterms those substitutions do not capture.
pub fn proc_rule_overlap_instantiation(
    p: &AdpProblem,
    adp: usize,
    j: usize,
    pos: &Position,
) -> Result<ProcessorResult, TransformError> {
    let a = p.adps().get(adp).ok_or_else(|| TransformError::InvalidTarget(format!("no ADP {}", adp + 1)))?;
    let (_, r) = a
        .rhs
        .entries()
        .get(j)
        .ok_or_else(|| TransformError::InvalidTarget(format!("no support term {}", j + 1)))?;
    let t = r.subterm_at(pos).map_err(|e| TransformError::InvalidTarget(e.to_string()))?;
    if !t.is_root_annotated() {
        return Err(TransformError::InvalidTarget(format!("no annotation at {pos}")));
    }
    let deltas = collect_substitutions(
        &a.vars(),
        narrowing_substitutions(t, &a.lhs, p).into_iter().map(|c| c.substitution),
    )?;
    let residual = a.rhs.map_terms(|ri| {
        let keep: BTreeSet<Position> = ri
            .annotated_subterms()
            .into_iter()
            .filter(|(_, t2)| !is_captured(t2, &deltas, &a.lhs, p))
            .map(|(q, _)| q)
            .collect();
        keep_annotations(ri, &keep)
    });
    let mut new: Vec<Adp> = deltas.iter().map(|d| a.apply(d)).collect();
    new.push(Adp { lhs: a.lhs.clone(), rhs: residual, flag: a.flag });
    Ok(ProcessorResult {
        children: vec![replace_adp(p, adp, new)],
        justification: Justification::RuleOverlap { adp, j, pos: pos.clone(), substitutions: deltas },
    })
}
