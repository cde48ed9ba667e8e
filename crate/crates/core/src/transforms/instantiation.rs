use std::collections::BTreeSet;

use super::{collect_substitutions, replace_adp, TransformError};
use crate::adp::{Adp, AdpProblem};
use crate::processors::{usable_rules_closure, Justification, ProcessorResult};
use crate::term::{cap, cap_everything_below_root, unify, Substitution, Symbol, Term, Var};

/// Instantiate ADP `adp` by every way a renamed predecessor's annotated
/// subterm can reach its left-hand side.
pub fn proc_instantiation(p: &AdpProblem, adp: usize) -> Result<ProcessorResult, TransformError> {
    let a = target(p, adp)?;
    let defined = p.defined_symbols();
    let idx = p.redex_index();
    let lsharp = a.lhs.annotate_root();
    let mut deltas = Vec::new();
    for b in p.adps() {
        let b = b.rename_fresh();
        for (_, _, t) in b.annotated_subterms() {
            let capped = cap(&t.annotate_root(), &defined, true);
            if let Some(d) = unify(&capped, &lsharp) {
                if idx.is_anf(&b.lhs.apply(&d)) && idx.is_anf(&a.lhs.apply(&d)) {
                    deltas.push(d);
                }
            }
        }
    }
    let substitutions = collect_substitutions(&a.vars(), deltas)?;
    Ok(result(p, adp, a, substitutions, |adp, substitutions| Justification::Instantiation { adp, substitutions }))
}

/// Instantiate ADP `adp` by every way one of its annotated subterms can
/// reach a renamed successor's left-hand side, following reversed usable
/// rules.
pub fn proc_forward_instantiation(p: &AdpProblem, adp: usize) -> Result<ProcessorResult, TransformError> {
    let a = target(p, adp)?;
    let idx = p.redex_index();
    let mut deltas = Vec::new();
    for (_, _, t) in a.annotated_subterms() {
        let tsharp = t.annotate_root();
        let reversed = ReversedRules::new(p, &tsharp);
        for b in p.adps() {
            let b = b.rename_fresh();
            let capped = reversed.cap(&b.lhs.annotate_root());
            if let Some(d) = unify(&tsharp, &capped) {
                if idx.is_anf(&a.lhs.apply(&d)) && idx.is_anf(&b.lhs.apply(&d)) {
                    deltas.push(d);
                }
            }
        }
    }
    let substitutions = collect_substitutions(&a.vars(), deltas)?;
    Ok(result(p, adp, a, substitutions, |adp, substitutions| Justification::ForwardInstantiation {
        adp,
        substitutions,
    }))
}

fn target(p: &AdpProblem, adp: usize) -> Result<&Adp, TransformError> {
    p.adps().get(adp).ok_or_else(|| TransformError::InvalidTarget(format!("no ADP {}", adp + 1)))
}

fn result(
    p: &AdpProblem,
    adp: usize,
    a: &Adp,
    substitutions: Vec<Substitution>,
    justify: impl FnOnce(usize, Vec<Substitution>) -> Justification,
) -> ProcessorResult {
    let mut new: Vec<Adp> = substitutions.iter().map(|d| a.apply(d)).collect();
    new.push(a.flatten());
    ProcessorResult { children: vec![replace_adp(p, adp, new)], justification: justify(adp, substitutions) }
}

/// `Cap_Q` for `Q` the reversed `np`-rules usable below the root of `t#`.
struct ReversedRules {
    /// Roots of reversed left-hand sides.
    defined: BTreeSet<Symbol>,
    /// Some reversed rule has a variable left-hand side or extra variables.
    wild: bool,
}

impl ReversedRules {
    fn new(p: &AdpProblem, tsharp: &Term) -> Self {
        let mut defined = BTreeSet::new();
        let mut wild = false;
        for i in usable_rules_closure(tsharp, p) {
            let b = &p.adps()[i];
            for r in b.rhs.terms() {
                match r.root() {
                    Some(f) => {
                        defined.insert(f.clone());
                    }
                    None => wild = true,
                }
                if !b.lhs.var_set().is_subset(&r.var_set()) {
                    wild = true;
                }
            }
        }
        ReversedRules { defined, wild }
    }

    fn cap(&self, t: &Term) -> Term {
        if self.wild {
            cap_everything_below_root(t)
        } else if self.defined.is_empty() {
            t.clone()
        } else {
            linearize(&cap(t, &self.defined, true))
        }
    }
}

/// Replace every variable occurrence by a distinct fresh variable.
fn linearize(t: &Term) -> Term {
    match t {
        Term::Var(_) => Term::Var(Var::fresh()),
        Term::App { sym, annotated, args } => {
            Term::App { sym: sym.clone(), annotated: *annotated, args: args.iter().map(linearize).collect() }
        }
    }
}
