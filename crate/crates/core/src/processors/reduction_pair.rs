use super::{Justification, ProcError, ProcessorResult};
use crate::adp::{Adp, AdpProblem};
use crate::poly::{annotated_sum, check_geq, check_gt, expected_value, Interpretation, ValueMode};

/// Check the three reduction pair conditions under `pol` and flatten every
/// strictly decreasing ADP.
pub fn proc_reduction_pair(p: &AdpProblem, pol: &Interpretation) -> Result<ProcessorResult, ProcError> {
    let mut strict = Vec::new();
    for (i, a) in p.adps().iter().enumerate() {
        let l = pol.interpret(&a.lhs)?;
        if a.flag {
            let ev = expected_value(&a.rhs, pol, ValueMode::Plain)?;
            if !check_geq(&l, &ev) {
                return Err(ProcError::ConditionViolated { which: 1, adp: i, j: None });
            }
        }
        if !a.has_annotation() {
            continue;
        }
        let lsharp = pol.interpret(&a.lhs.annotate_root())?;
        let ev = expected_value(&a.rhs, pol, ValueMode::AnnotatedSum)?;
        if !check_geq(&lsharp, &ev) {
            return Err(ProcError::ConditionViolated { which: 2, adp: i, j: None });
        }
        let mut decreasing = false;
        for (_, r) in a.rhs.entries() {
            if !check_gt(&lsharp, &annotated_sum(r, pol)?) {
                continue;
            }
            if a.flag && !check_geq(&l, &pol.interpret(&r.flatten())?) {
                continue;
            }
            decreasing = true;
            break;
        }
        if decreasing {
            strict.push(i);
        }
    }
    if strict.is_empty() {
        return Err(ProcError::EmptyStrictSet);
    }
    let adps: Vec<Adp> =
        p.adps().iter().enumerate().map(|(i, a)| if strict.contains(&i) { a.flatten() } else { a.clone() }).collect();
    Ok(ProcessorResult {
        children: vec![AdpProblem::new(adps).with_classical(p.is_classical())],
        justification: Justification::ReductionPair { interpretation: pol.clone(), strict },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_ptrs, parse_term_annotated};
    use crate::poly::SymbolPoly;
    use crate::ptrs::MultiDistribution;
    use crate::term::Symbol;
    use num_rational::BigRational;

    fn rw() -> AdpProblem {
        AdpProblem::canonical(&parse_ptrs("(VAR x) (RULES g(x) -> {1/2 : g(g(x)), 1/2 : x})").unwrap())
    }

    #[test]
    fn random_walk_witness() {
        let mut pol = Interpretation::new();
        pol.set(Symbol::new("g", 1), true, SymbolPoly::constant(1));
        pol.set(Symbol::new("g", 1), false, SymbolPoly::linear(0, &[1]));
        let res = proc_reduction_pair(&rw(), &pol).unwrap();
        assert!(res.children[0].is_solved());
        assert_eq!(res.children[0], rw().flatten());
    }

    #[test]
    fn zero_interpretation_is_not_strict() {
        let mut pol = Interpretation::new();
        pol.set(Symbol::new("g", 1), true, SymbolPoly::constant(0));
        pol.set(Symbol::new("g", 1), false, SymbolPoly::constant(0));
        assert_eq!(
            proc_reduction_pair(&rw(), &pol),
            Err(ProcError::ConditionViolated { which: 1, adp: 0, j: None })
        );
        let mut pol = Interpretation::new();
        pol.set(Symbol::new("g", 1), true, SymbolPoly::constant(0));
        pol.set(Symbol::new("g", 1), false, SymbolPoly::linear(0, &[1]));
        assert_eq!(proc_reduction_pair(&rw(), &pol), Err(ProcError::EmptyStrictSet));
    }

    #[test]
    fn incpl_after_rewriting() {
        let t = |s| parse_term_annotated(s, &["x"]).unwrap();
        let q = BigRational::new(1.into(), 4.into());
        let nine = Adp::new(
            t("a"),
            MultiDistribution::new(vec![
                (q.clone(), t("f(h#(b1),b1)")),
                (q.clone(), t("f(h(b2),b1)")),
                (q.clone(), t("f#(h#(b1),b2)")),
                (q, t("f#(h(b2),b2)")),
            ])
            .unwrap(),
            true,
        )
        .unwrap();
        let half = BigRational::new(1.into(), 2.into());
        let ten = Adp::new(t("g"), MultiDistribution::new(vec![(half.clone(), t("b1")), (half, t("b2"))]).unwrap(), true)
            .unwrap();
        let eleven = Adp::new(t("h(b1)"), MultiDistribution::singleton(t("a#")), true).unwrap();
        let twelve = Adp::new(t("f(x,b2)"), MultiDistribution::singleton(t("a#")), false).unwrap();
        let p = AdpProblem::new(vec![nine, ten, eleven, twelve]);
        let mut pol = Interpretation::new();
        for (s, n) in [("a", 0), ("f", 2), ("h", 1), ("g", 0), ("b1", 0), ("b2", 0)] {
            let one = ["a", "f", "h"].contains(&s);
            pol.set(Symbol::new(s, n), true, SymbolPoly::constant(one as u64));
            pol.set(Symbol::new(s, n), false, SymbolPoly::constant(0));
        }
        let res = proc_reduction_pair(&p, &pol).unwrap();
        assert_eq!(res.justification, Justification::ReductionPair { interpretation: pol, strict: vec![0] });
        assert!(!res.children[0].adps()[0].has_annotation());
    }
}
