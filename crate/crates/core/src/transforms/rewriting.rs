use super::{is_linear, is_non_erasing, is_non_overlapping, replace_adp, SideCondition, TransformError};
use crate::adp::{Adp, AdpProblem};
use crate::processors::{usable_rules_closure, Justification, ProcessorResult};
use crate::term::{match_term, Position};

/// Candidate rewrite positions of ADP `adp`: per support term in order,
/// unannotated defined positions with no annotation below, innermost first
/// and left to right.
pub fn rewriting_targets(p: &AdpProblem, adp: usize) -> Vec<(usize, Position)> {
    let defined = p.defined_symbols();
    let mut out = Vec::new();
    for (j, r) in p.adps()[adp].rhs.terms().enumerate() {
        let mut positions: Vec<Position> = r
            .app_positions()
            .into_iter()
            .filter(|pos| {
                let s = r.subterm_at(pos).expect("own position");
                !s.has_annotation() && s.root().is_some_and(|f| defined.contains(f))
            })
            .collect();
        // Post-order: deeper positions before their prefixes.
        positions.sort_by(|a, b| {
            if a.is_proper_prefix_of(b) {
                std::cmp::Ordering::Greater
            } else if b.is_proper_prefix_of(a) {
                std::cmp::Ordering::Less
            } else {
                a.cmp(b)
            }
        });
        out.extend(positions.into_iter().map(|pos| (j, pos)));
    }
    out
}

/// Rewrite `r_j|τ` of ADP `adp` with the unique applicable flag-true ADP,
/// provided one of the three soundness cases holds.
pub fn proc_rewriting(p: &AdpProblem, adp: usize, j: usize, tau: &Position) -> Result<ProcessorResult, TransformError> {
    let a = p.adps().get(adp).ok_or_else(|| TransformError::InvalidTarget(format!("no ADP {}", adp + 1)))?;
    let (_, r) = a
        .rhs
        .entries()
        .get(j)
        .ok_or_else(|| TransformError::InvalidTarget(format!("no support term {}", j + 1)))?;
    let s = r.subterm_at(tau).map_err(|e| TransformError::InvalidTarget(e.to_string()))?;
    if s.has_annotation() {
        return Err(TransformError::AnnotationBelowTau);
    }
    if s.is_var() {
        return Err(TransformError::InvalidTarget(format!("variable at {tau}")));
    }
    let applicable: Vec<usize> = p
        .adps()
        .iter()
        .enumerate()
        .filter(|(_, b)| b.flag && match_term(&b.lhs, s).is_some())
        .map(|(i, _)| i)
        .collect();
    let Some(&rule) = applicable.first() else { return Err(TransformError::NoRuleApplicable) };
    let usable = usable_rules_closure(s, p);
    if !is_non_overlapping(usable.iter().map(|&i| &p.adps()[i].lhs)) {
        return Err(TransformError::SideConditionUnmet);
    }
    let b = &p.adps()[rule];
    let condition = if is_linear(b) && is_non_erasing(b) {
        SideCondition::LinearNonErasing
    } else if usable.iter().all(|&i| p.adps()[i].rhs.is_trivial()) {
        SideCondition::AllTrivial
    } else if s.is_ground() && p.redex_index().is_anf(s) {
        SideCondition::GroundInnermost
    } else {
        return Err(TransformError::SideConditionUnmet);
    };
    let sigma = match_term(&b.lhs, s).expect("matched above");
    let inner = b.rhs.map_terms(|e| r.replace_at(tau, e.flatten().apply(&sigma)).expect("own position"));
    let rewritten = Adp { lhs: a.lhs.clone(), rhs: a.rhs.splice(j, &inner), flag: a.flag };
    debug_assert_eq!(rewritten.rhs.total(), a.rhs.total());
    Ok(ProcessorResult {
        children: vec![replace_adp(p, adp, vec![rewritten, a.flatten()])],
        justification: Justification::Rewriting { adp, j, pos: tau.clone(), rule, condition },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_ptrs, parse_term_annotated};
    use crate::processors::{proc_usable_rules, proc_usable_terms};
    use crate::ptrs::MultiDistribution;
    use num_rational::BigRational;

    const INCPL: &str = "(VAR x) (RULES a -> f(h(g),g)  g -> {1/2:b1, 1/2:b2}  h(b1) -> a  f(x,b2) -> a)";

    fn adp(l: &str, r: &str, vars: &[&str]) -> Adp {
        let t = |s| parse_term_annotated(s, vars).unwrap();
        Adp::new(t(l), MultiDistribution::singleton(t(r)), true).unwrap()
    }

    fn rewrite_all(mut p: AdpProblem, at: usize) -> AdpProblem {
        while let Some(res) =
            rewriting_targets(&p, at).into_iter().find_map(|(j, pos)| proc_rewriting(&p, at, j, &pos).ok())
        {
            p = res.children.into_iter().next().unwrap();
        }
        p
    }

    #[test]
    fn incpl_rewrites_both_gs() {
        let p = AdpProblem::canonical(&parse_ptrs(INCPL).unwrap());
        let p = proc_usable_terms(&p).children.remove(0);
        let p = proc_usable_rules(&p).children.remove(0);
        let first = proc_rewriting(&p, 0, 0, &Position::new(vec![1, 1])).unwrap();
        let Justification::Rewriting { condition, rule, .. } = first.justification else { panic!() };
        assert_eq!((condition, rule), (SideCondition::LinearNonErasing, 1));
        assert_eq!(first.children[0].adps()[0].to_string(), "a -> {1/2:f#(h#(b1),g), 1/2:f#(h#(b2),g)}^true");
        let done = rewrite_all(p, 0);
        let mut terms: Vec<String> = done.adps()[0].rhs.entries().iter().map(|(q, t)| format!("{q}:{t}")).collect();
        terms.sort();
        assert_eq!(
            terms,
            vec!["1/4:f#(h#(b1),b1)", "1/4:f#(h#(b1),b2)", "1/4:f#(h#(b2),b1)", "1/4:f#(h#(b2),b2)"]
        );
        assert_eq!(done.adps()[0].rhs.total(), BigRational::from_integer(1.into()));
        // Flattened copies of every intermediate a-ADP were added.
        assert_eq!(done.adps().iter().filter(|a| a.lhs.to_string() == "a").count(), 4);
        let cleaned = proc_usable_terms(&done).children.remove(0);
        let mut terms: Vec<String> = cleaned.adps()[0].rhs.terms().map(|t| t.to_string()).collect();
        terms.sort();
        assert_eq!(terms, vec!["f#(h#(b1),b2)", "f#(h(b2),b2)", "f(h#(b1),b1)", "f(h(b2),b1)"]);
    }

    #[test]
    fn annotation_below_tau_rejected() {
        let p = AdpProblem::canonical(&parse_ptrs(INCPL).unwrap());
        assert_eq!(proc_rewriting(&p, 0, 0, &Position::new(vec![1])), Err(TransformError::AnnotationBelowTau));
    }

    #[test]
    fn no_rule_applicable() {
        let p = AdpProblem::new(vec![adp("f(x)", "f#(h(x))", &["x"]), adp("h(a)", "a", &[])]);
        assert_eq!(proc_rewriting(&p, 0, 0, &Position::new(vec![1])), Err(TransformError::NoRuleApplicable));
    }

    #[test]
    fn left_linearity_counterexample_refused() {
        let half = BigRational::new(1.into(), 2.into());
        let t = |s| parse_term_annotated(s, &["x", "y"]).unwrap();
        let p = AdpProblem::new(vec![
            adp("g(f(x,y))", "d(g#(f(a,a)),g#(f(a,a)),g#(f(a,a)))", &["x", "y"]),
            adp("f(x,x)", "e(f#(a,a))", &["x"]),
            Adp::new(t("a"), MultiDistribution::new(vec![(half.clone(), t("b1")), (half, t("b2"))]).unwrap(), true)
                .unwrap(),
        ]);
        assert_eq!(proc_rewriting(&p, 0, 0, &Position::new(vec![1, 1])), Err(TransformError::SideConditionUnmet));
    }

    #[test]
    fn right_linearity_counterexample_refused() {
        let half = BigRational::new(1.into(), 2.into());
        let t = |s| parse_term_annotated(s, &["x"]).unwrap();
        let p = AdpProblem::new(vec![
            adp("f(e(b1,b1))", "h(f#(d(g)),f#(d(g)),f#(d(g)),f#(d(g)))", &[]),
            adp("d(x)", "e(x,x)", &["x"]),
            Adp::new(t("g"), MultiDistribution::new(vec![(half.clone(), t("b1")), (half, t("b2"))]).unwrap(), true)
                .unwrap(),
        ]);
        assert_eq!(proc_rewriting(&p, 0, 0, &Position::new(vec![1, 1])), Err(TransformError::SideConditionUnmet));
        // Rewriting the inner g first is fine: its rule is linear and non-erasing.
        assert!(proc_rewriting(&p, 0, 0, &Position::new(vec![1, 1, 1])).is_ok());
    }

    #[test]
    fn ground_innermost_case() {
        let p = AdpProblem::new(vec![
            adp("f(x)", "f#(d(b))", &["x"]),
            adp("d(x)", "e(x,x)", &["x"]),
        ]);
        let res = proc_rewriting(&p, 0, 0, &Position::new(vec![1])).unwrap();
        let Justification::Rewriting { condition, .. } = res.justification else { panic!() };
        assert_eq!(condition, SideCondition::AllTrivial);
        assert_eq!(res.children[0].adps()[0].to_string(), "f(x) -> {1:f#(e(b,b))}^true");
        let half = BigRational::new(1.into(), 2.into());
        let t = |s| parse_term_annotated(s, &["x"]).unwrap();
        let p = AdpProblem::new(vec![
            adp("f(x)", "f#(d(b))", &["x"]),
            Adp::new(t("d(x)"), MultiDistribution::new(vec![(half.clone(), t("e(x,x)")), (half, t("b"))]).unwrap(), true)
                .unwrap(),
        ]);
        let res = proc_rewriting(&p, 0, 0, &Position::new(vec![1])).unwrap();
        let Justification::Rewriting { condition, .. } = res.justification else { panic!() };
        assert_eq!(condition, SideCondition::GroundInnermost);
    }
}
