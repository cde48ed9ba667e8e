use std::collections::BTreeSet;

use super::{may_reach, Justification, ProcessorResult};
use crate::adp::{Adp, AdpProblem};
use crate::term::Term;

/// Remove the annotation of every annotated subterm that cannot reach the
/// left-hand side of an ADP whose right-hand side still has annotations.
pub fn proc_usable_terms(p: &AdpProblem) -> ProcessorResult {
    let np_defined = p.np_defined_symbols();
    let defined = p.defined_symbols();
    let idx = p.redex_index();
    let targets: Vec<&Adp> = p.adps().iter().filter(|a| a.has_annotation()).collect();
    let mut removed = Vec::new();
    let mut adps = Vec::new();
    for (i, a) in p.adps().iter().enumerate() {
        let mut entries = Vec::new();
        for (j, (prob, r)) in a.rhs.entries().iter().enumerate() {
            let mut keep = BTreeSet::new();
            for (pos, t) in r.annotated_subterms() {
                if targets.iter().any(|b| may_reach(&t, &a.lhs, b, &np_defined, &idx)) {
                    keep.insert(pos);
                } else {
                    removed.push((i, j, pos));
                }
            }
            entries.push((prob.clone(), r.annotate(&keep, &defined).expect("positions were annotated")));
        }
        let rhs = crate::ptrs::MultiDistribution::new(entries).expect("same probabilities");
        adps.push(Adp { lhs: a.lhs.clone(), rhs, flag: a.flag });
    }
    ProcessorResult {
        children: vec![AdpProblem::new(adps).with_classical(p.is_classical())],
        justification: Justification::UsableTerms { removed },
    }
}

/// `U_P(t)`: indices of the flag-true ADPs usable for rewriting below `t`'s
/// root when `t`'s root is annotated, and at the root otherwise.
pub fn usable_rules_closure(t: &Term, p: &AdpProblem) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    let mut stack = vec![t.clone()];
    while let Some(t) = stack.pop() {
        let Term::App { sym, annotated, args } = &t else { continue };
        if !annotated {
            for (i, a) in p.adps().iter().enumerate() {
                if a.flag && a.lhs.root() == Some(sym) && out.insert(i) {
                    stack.extend(a.rhs.terms().map(Term::flatten));
                }
            }
        }
        stack.extend(args.iter().cloned());
    }
    out
}

/// Set the flag of every ADP outside `U(P)` to false.
pub fn proc_usable_rules(p: &AdpProblem) -> ProcessorResult {
    let mut usable = BTreeSet::new();
    for a in p.adps() {
        for (_, _, t) in a.annotated_subterms() {
            usable.extend(usable_rules_closure(&t.annotate_root(), p));
        }
    }
    let mut deflagged = Vec::new();
    let adps = p
        .adps()
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if a.flag && !usable.contains(&i) {
                deflagged.push(i);
                a.with_flag(false)
            } else {
                a.clone()
            }
        })
        .collect();
    ProcessorResult {
        children: vec![AdpProblem::new(adps).with_classical(p.is_classical())],
        justification: Justification::UsableRules { deflagged },
    }
}
