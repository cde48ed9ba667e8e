//! Probabilistic rewrite rules, multi-distributions, normal forms and the
//! innermost rewrite relation on plain terms.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::term::{matches_flat, Position, Substitution, Symbol, Term};

pub type Probability = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PtrsError {
    #[error("empty distribution")]
    EmptyDistribution,
    #[error("probability {0} outside (0,1]")]
    ProbabilityRange(String),
    #[error("probabilities sum to {0}, not 1")]
    ProbabilitySum(String),
    #[error("left-hand side {0} is a variable")]
    VariableLhs(String),
    #[error("rule side {0} carries annotations")]
    Annotated(String),
    #[error("right-hand side {rhs} has variables not in {lhs}")]
    ExtraVariable { lhs: String, rhs: String },
    #[error("{0} is not an innermost redex of {1}")]
    NotInnermostRedex(String, String),
}

/// A finite multiset of `(p, t)` pairs with `Σ p = 1`; order and duplicates
/// are kept.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct MultiDistribution {
    entries: Vec<(Probability, Term)>,
}

impl MultiDistribution {
    pub fn new(entries: Vec<(Probability, Term)>) -> Result<Self, PtrsError> {
        if entries.is_empty() {
            return Err(PtrsError::EmptyDistribution);
        }
        let mut sum = BigRational::zero();
        for (p, _) in &entries {
            if *p <= BigRational::zero() || *p > BigRational::one() {
                return Err(PtrsError::ProbabilityRange(p.to_string()));
            }
            sum += p;
        }
        if !sum.is_one() {
            return Err(PtrsError::ProbabilitySum(sum.to_string()));
        }
        Ok(MultiDistribution { entries })
    }

    pub fn singleton(t: Term) -> Self {
        MultiDistribution { entries: vec![(BigRational::one(), t)] }
    }

    pub fn entries(&self) -> &[(Probability, Term)] {
        &self.entries
    }

    pub fn terms(&self) -> impl Iterator<Item = &Term> {
        self.entries.iter().map(|(_, t)| t)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.entries.len() == 1
    }

    pub fn total(&self) -> Probability {
        self.entries.iter().map(|(p, _)| p.clone()).fold(BigRational::zero(), |a, b| a + b)
    }

    /// Apply `f` to every support term; probabilities are unchanged.
    pub fn map_terms(&self, mut f: impl FnMut(&Term) -> Term) -> Self {
        MultiDistribution { entries: self.entries.iter().map(|(p, t)| (p.clone(), f(t))).collect() }
    }

    pub fn flatten(&self) -> Self {
        self.map_terms(Term::flatten)
    }

    /// Replace entry `j` by `p_j · q_e : e_e` for every entry of `inner`.
    pub fn splice(&self, j: usize, inner: &MultiDistribution) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len() + inner.len());
        for (i, (p, t)) in self.entries.iter().enumerate() {
            if i == j {
                entries.extend(inner.entries.iter().map(|(q, e)| (p * q, e.clone())));
            } else {
                entries.push((p.clone(), t.clone()));
            }
        }
        MultiDistribution { entries }
    }
}

impl fmt::Display for MultiDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (p, t)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}:{t}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Rule {
    lhs: Term,
    rhs: MultiDistribution,
}

impl Rule {
    pub fn new(lhs: Term, rhs: MultiDistribution) -> Result<Self, PtrsError> {
        check_rule_shape(&lhs, &rhs)?;
        if rhs.terms().any(Term::has_annotation) {
            return Err(PtrsError::Annotated(rhs.to_string()));
        }
        Ok(Rule { lhs, rhs })
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &MultiDistribution {
        &self.rhs
    }
}

pub(crate) fn check_rule_shape(lhs: &Term, rhs: &MultiDistribution) -> Result<(), PtrsError> {
    if lhs.is_var() {
        return Err(PtrsError::VariableLhs(lhs.to_string()));
    }
    if lhs.has_annotation() {
        return Err(PtrsError::Annotated(lhs.to_string()));
    }
    let lv = lhs.var_set();
    for r in rhs.terms() {
        if !r.var_set().is_subset(&lv) {
            return Err(PtrsError::ExtraVariable { lhs: lhs.to_string(), rhs: r.to_string() });
        }
    }
    Ok(())
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Ptrs {
    rules: Vec<Rule>,
}

impl Ptrs {
    pub fn new(rules: Vec<Rule>) -> Self {
        Ptrs { rules }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn defined_symbols(&self) -> BTreeSet<Symbol> {
        self.rules.iter().filter_map(|r| r.lhs.root().cloned()).collect()
    }

    pub fn redex_index(&self) -> RedexIndex {
        RedexIndex::new(self.rules.iter().map(|r| r.lhs.clone()))
    }

    pub fn is_nf(&self, t: &Term) -> bool {
        self.redex_index().is_nf(t)
    }

    pub fn is_anf(&self, t: &Term) -> bool {
        self.redex_index().is_anf(t)
    }

    /// Every innermost redex of `flatten(t)` as `(π, rule index, σ)`, in
    /// pre-order over positions, then declaration order over rules.
    pub fn innermost_redexes(&self, t: &Term) -> Vec<(Position, usize, Substitution)> {
        let idx = self.redex_index();
        let flat = t.flatten();
        let mut out = Vec::new();
        for pos in flat.app_positions() {
            let sub = flat.subterm_at(&pos).expect("own position");
            if !sub.args().iter().all(|a| idx.is_nf(a)) {
                continue;
            }
            for (ri, sigma) in idx.matches(sub) {
                out.push((pos.clone(), ri, sigma));
            }
        }
        out
    }

    /// `t → {p_j : t[r_j σ]_π}` for an innermost redex at `π`.
    pub fn rewrite_innermost(&self, t: &Term, pos: &Position, rule: usize) -> Result<MultiDistribution, PtrsError> {
        let flat = t.flatten();
        let not_redex = || PtrsError::NotInnermostRedex(pos.to_string(), t.to_string());
        let sub = flat.subterm_at(pos).map_err(|_| not_redex())?;
        let r = self.rules.get(rule).ok_or_else(not_redex)?;
        let idx = self.redex_index();
        if !idx.is_anf(sub) {
            return Err(not_redex());
        }
        let sigma = crate::term::match_term(&r.lhs, sub).ok_or_else(not_redex)?;
        Ok(r.rhs.map_terms(|rj| flat.replace_at(pos, rj.apply(&sigma)).expect("valid position")))
    }
}

impl fmt::Display for Ptrs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// Left-hand sides bucketed by root symbol, for normal-form checks and redex
/// search. Annotations on the subject are ignored.
#[derive(Clone, Debug, Default)]
pub struct RedexIndex {
    by_root: HashMap<Symbol, Vec<(usize, Term)>>,
}

impl RedexIndex {
    pub fn new(lhss: impl IntoIterator<Item = Term>) -> Self {
        let mut by_root: HashMap<Symbol, Vec<(usize, Term)>> = HashMap::new();
        for (i, l) in lhss.into_iter().enumerate() {
            if let Some(f) = l.root().cloned() {
                by_root.entry(f).or_default().push((i, l.flatten()));
            }
        }
        RedexIndex { by_root }
    }

    /// Some left-hand side matches `t` at the root.
    pub fn is_redex(&self, t: &Term) -> bool {
        let Some(f) = t.root() else { return false };
        let Some(cands) = self.by_root.get(f) else { return false };
        cands.iter().any(|(_, l)| matches_flat(l, t))
    }

    /// Indices and matchers of all left-hand sides matching `flatten(t)`.
    pub fn matches(&self, t: &Term) -> Vec<(usize, Substitution)> {
        let Some(f) = t.root() else { return Vec::new() };
        let Some(cands) = self.by_root.get(f) else { return Vec::new() };
        let flat = t.flatten();
        cands
            .iter()
            .filter_map(|(i, l)| crate::term::match_term(l, &flat).map(|s| (*i, s)))
            .collect()
    }

    /// Like `matches` for an annotation-free `t`, without copying it.
    pub fn matches_plain(&self, t: &Term) -> Vec<(usize, Substitution)> {
        let Some(f) = t.root() else { return Vec::new() };
        let Some(cands) = self.by_root.get(f) else { return Vec::new() };
        cands.iter().filter_map(|(i, l)| crate::term::match_term(l, t).map(|s| (*i, s))).collect()
    }

    pub fn is_nf(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App { args, .. } => args.iter().all(|a| self.is_nf(a)) && !self.is_redex(t),
        }
    }

    pub fn is_anf(&self, t: &Term) -> bool {
        t.args().iter().all(|a| self.is_nf(a))
    }
}
