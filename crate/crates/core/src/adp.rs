//! Annotated dependency pairs, ADP problems and the annotated rewrite
//! relation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::ptrs::{check_rule_shape, MultiDistribution, Ptrs, PtrsError, RedexIndex, Rule};
use crate::term::{match_term, Position, Substitution, Symbol, Term, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdpError {
    #[error("ADP {0} has a nontrivial distribution")]
    NontrivialDistribution(String),
    #[error(transparent)]
    Shape(#[from] PtrsError),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Adp {
    pub lhs: Term,
    pub rhs: MultiDistribution,
    pub flag: bool,
}

impl Adp {
    pub fn new(lhs: Term, rhs: MultiDistribution, flag: bool) -> Result<Self, AdpError> {
        check_rule_shape(&lhs, &rhs)?;
        Ok(Adp { lhs, rhs, flag })
    }

    pub fn has_annotation(&self) -> bool {
        self.rhs.terms().any(Term::has_annotation)
    }

    pub fn flatten(&self) -> Adp {
        Adp { lhs: self.lhs.clone(), rhs: self.rhs.flatten(), flag: self.flag }
    }

    pub fn with_flag(&self, flag: bool) -> Adp {
        Adp { flag, ..self.clone() }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.lhs.var_set()
    }

    pub fn apply(&self, sigma: &Substitution) -> Adp {
        Adp { lhs: self.lhs.apply(sigma), rhs: self.rhs.map_terms(|t| t.apply(sigma)), flag: self.flag }
    }

    /// A copy with every variable renamed to a fresh one.
    pub fn rename_fresh(&self) -> Adp {
        self.apply(&Substitution::fresh_renaming(self.lhs.vars()))
    }

    /// Every annotated subterm of every support term as `(j, π, ♭(r_j|π))`.
    pub fn annotated_subterms(&self) -> Vec<(usize, Position, Term)> {
        let mut out = Vec::new();
        for (j, r) in self.rhs.terms().enumerate() {
            for (p, t) in r.annotated_subterms() {
                out.push((j, p, t));
            }
        }
        out
    }

    /// Rename variables: user-named ones are kept, fresh ones get the first
    /// unused names from `y1, y2, …`.
    pub fn tidy(&self) -> Adp {
        let vars = self.lhs.vars();
        let used: BTreeSet<String> = vars.iter().filter(|v| !v.is_fresh()).map(|v| v.name().to_string()).collect();
        let mut sigma = Substitution::new();
        let mut n = 0;
        for v in vars.iter().filter(|v| v.is_fresh()) {
            let name = loop {
                n += 1;
                let cand = format!("y{n}");
                if !used.contains(&cand) {
                    break cand;
                }
            };
            sigma.insert(v.clone(), Term::var(&name));
        }
        if sigma.is_empty() {
            self.clone()
        } else {
            self.apply(&sigma)
        }
    }

    /// Variables renamed positionally; equal for ADPs equal up to renaming.
    pub fn normalized(&self) -> Adp {
        let sigma = Substitution::from_pairs(
            self.lhs.vars().into_iter().enumerate().map(|(i, v)| (v, Term::var(&format!("_c{i}")))),
        );
        self.apply(&sigma)
    }
}

impl fmt::Display for Adp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}^{}", self.lhs, self.rhs, self.flag)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
pub enum StepCase {
    PR,
    P,
    R,
    IRR,
}

impl StepCase {
    pub fn of(annotated: bool, flag: bool) -> StepCase {
        match (annotated, flag) {
            (true, true) => StepCase::PR,
            (true, false) => StepCase::P,
            (false, true) => StepCase::R,
            (false, false) => StepCase::IRR,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdpStep {
    pub pos: Position,
    pub adp: usize,
    pub sigma: Substitution,
    pub case: StepCase,
    pub result: MultiDistribution,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct AdpProblem {
    adps: Vec<Adp>,
    classical: bool,
}

impl AdpProblem {
    pub fn new(adps: Vec<Adp>) -> Self {
        AdpProblem { adps, classical: false }
    }

    pub fn adps(&self) -> &[Adp] {
        &self.adps
    }

    pub fn len(&self) -> usize {
        self.adps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adps.is_empty()
    }

    pub fn is_classical(&self) -> bool {
        self.classical
    }

    pub fn with_classical(mut self, on: bool) -> Self {
        self.classical = on;
        self
    }

    /// `DP(R)`: annotate every defined symbol of every right-hand side.
    pub fn canonical(r: &Ptrs) -> Self {
        let defined = r.defined_symbols();
        AdpProblem::new(
            r.rules()
                .iter()
                .map(|rule| Adp {
                    lhs: rule.lhs().clone(),
                    rhs: rule.rhs().map_terms(|t| t.annotate_defined(&defined)),
                    flag: true,
                })
                .collect(),
        )
    }

    pub fn defined_symbols(&self) -> BTreeSet<Symbol> {
        self.adps.iter().filter_map(|a| a.lhs.root().cloned()).collect()
    }

    /// Roots of left-hand sides of ADPs with flag true.
    pub fn np_defined_symbols(&self) -> BTreeSet<Symbol> {
        self.adps.iter().filter(|a| a.flag).filter_map(|a| a.lhs.root().cloned()).collect()
    }

    /// Normal-form index over all left-hand sides.
    pub fn redex_index(&self) -> RedexIndex {
        RedexIndex::new(self.adps.iter().map(|a| a.lhs.clone()))
    }

    pub fn np(&self) -> Ptrs {
        let mut rules = Vec::new();
        for a in self.adps.iter().filter(|a| a.flag) {
            for r in a.rhs.terms() {
                rules.push(Rule::new(a.lhs.clone(), MultiDistribution::singleton(r.flatten())).expect("ADP shape"));
            }
        }
        Ptrs::new(rules)
    }

    /// Classical dependency pairs `ℓ# → t#`; every distribution must be
    /// trivial.
    pub fn dp(&self) -> Result<Vec<(Term, Term)>, AdpError> {
        let mut out = Vec::new();
        for a in &self.adps {
            if !a.rhs.is_trivial() {
                return Err(AdpError::NontrivialDistribution(a.to_string()));
            }
            for (_, _, t) in a.annotated_subterms() {
                out.push((a.lhs.annotate_root(), t.annotate_root()));
            }
        }
        Ok(out)
    }

    pub fn is_solved(&self) -> bool {
        !self.adps.iter().any(Adp::has_annotation)
    }

    pub fn all_trivial(&self) -> bool {
        self.adps.iter().all(|a| a.rhs.is_trivial())
    }

    pub fn flatten(&self) -> AdpProblem {
        AdpProblem { adps: self.adps.iter().map(Adp::flatten).collect(), classical: self.classical }
    }

    pub fn flatten_ptrs(&self) -> Ptrs {
        Ptrs::new(
            self.adps
                .iter()
                .map(|a| Rule::new(a.lhs.clone(), a.rhs.flatten()).expect("ADP shape"))
                .collect(),
        )
    }

    /// Deduplicated up to variable renaming, keeping the first occurrence.
    pub fn dedup(adps: Vec<Adp>) -> Vec<Adp> {
        let mut seen = BTreeSet::new();
        adps.into_iter().filter(|a| seen.insert(a.normalized())).collect()
    }

    /// Canonical form modulo variable renaming and ADP order.
    pub fn key(&self) -> (Vec<Adp>, bool) {
        let mut v: Vec<Adp> = self.adps.iter().map(Adp::normalized).collect();
        v.sort();
        v.dedup();
        (v, self.classical)
    }

    /// All annotated rewrite steps from `s`.
    pub fn adp_steps(&self, s: &Term) -> Vec<AdpStep> {
        let defined = self.defined_symbols();
        let idx = self.redex_index();
        let mut out = Vec::new();
        for pos in s.app_positions() {
            let sub = s.subterm_at(&pos).expect("own position");
            let (sym, annotated) = match sub {
                Term::App { sym, annotated, .. } => (sym, *annotated),
                Term::Var(_) => continue,
            };
            if !defined.contains(sym) {
                continue;
            }
            let flat = sub.flatten();
            if !idx.is_anf(&flat) {
                continue;
            }
            for (i, a) in self.adps.iter().enumerate() {
                let Some(sigma) = match_term(&a.lhs, &flat) else { continue };
                let case = StepCase::of(annotated, a.flag);
                let result = a.rhs.map_terms(|r| {
                    let r = if annotated { r.apply(&sigma) } else { r.flatten().apply(&sigma) };
                    let t = s.replace_at(&pos, r).expect("own position");
                    if a.flag {
                        t
                    } else {
                        t.strip_above(&pos).expect("own position")
                    }
                });
                out.push(AdpStep { pos: pos.clone(), adp: i, sigma, case, result });
            }
        }
        out
    }

    /// Symbols with arities, for interpretation templates.
    pub fn signature(&self) -> BTreeSet<(Symbol, bool)> {
        let mut out = BTreeSet::new();
        for a in &self.adps {
            a.lhs.symbols(&mut out);
            for r in a.rhs.terms() {
                r.symbols(&mut out);
            }
        }
        out
    }

    /// Replace the variable names of every ADP by readable ones.
    pub fn tidy(&self) -> AdpProblem {
        AdpProblem { adps: self.adps.iter().map(Adp::tidy).collect(), classical: self.classical }
    }

    /// Index of every ADP in `self`, keyed by normalized form.
    pub fn index_by_key(&self) -> BTreeMap<Adp, usize> {
        let mut out = BTreeMap::new();
        for (i, a) in self.adps.iter().enumerate() {
            out.entry(a.normalized()).or_insert(i);
        }
        out
    }
}

impl fmt::Display for AdpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.adps.iter().enumerate() {
            writeln!(f, "  ({}) {a}", i + 1)?;
        }
        Ok(())
    }
}
