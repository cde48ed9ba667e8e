//! Proof search over ADP problems, proof trees and their re-verification.

mod render;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::adp::{Adp, AdpProblem};
use crate::exec::Exec;
use crate::poly::{search_interpretation, SearchConfig, Template};
use crate::processors::{
    proc_dependency_graph, proc_probability_removal, proc_reduction_pair, proc_usable_rules, proc_usable_terms,
    Justification, ProcessorResult,
};
use crate::ptrs::Ptrs;
use crate::term::{Position, Substitution, Term, Var};
use crate::transforms::{
    proc_forward_instantiation, proc_instantiation, proc_rewriting, proc_rule_overlap_instantiation, rewriting_targets,
};

pub use render::{render_machine, render_text};

#[derive(Clone, Debug)]
pub struct Config {
    pub max_coeff: u64,
    /// Transformations allowed along one branch of the proof.
    pub transform_depth: usize,
    pub timeout: Duration,
    pub enable_transforms: bool,
    /// Successful transformations tried per problem before giving up on it.
    pub transform_breadth: usize,
    pub exec: Exec,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_coeff: 2,
            transform_depth: 8,
            timeout: Duration::from_secs(300),
            enable_transforms: true,
            transform_breadth: 1,
            exec: Exec::Sequential,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "MAYBE")]
    Maybe,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Yes => "YES",
            Verdict::Maybe => "MAYBE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Processor {
    DependencyGraph,
    UsableTerms,
    UsableRules,
    ReductionPair,
    ProbabilityRemoval,
    RuleOverlapInstantiation,
    Rewriting,
    Instantiation,
    ForwardInstantiation,
}

impl fmt::Display for Processor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Processor::DependencyGraph => "dependency graph processor",
            Processor::UsableTerms => "usable terms processor",
            Processor::UsableRules => "usable rules processor",
            Processor::ReductionPair => "reduction pair processor",
            Processor::ProbabilityRemoval => "probability removal processor",
            Processor::RuleOverlapInstantiation => "rule overlap instantiation processor",
            Processor::Rewriting => "rewriting processor",
            Processor::Instantiation => "instantiation processor",
            Processor::ForwardInstantiation => "forward instantiation processor",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    /// No annotations left.
    Solved,
    Step { processor: Processor, justification: Justification, children: Vec<ProofNode> },
    /// Proof search gave up on this problem.
    Open { last_attempted: Option<Processor>, timed_out: bool },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProofNode {
    pub problem: AdpProblem,
    pub outcome: Outcome,
}

impl ProofNode {
    pub fn is_proved(&self) -> bool {
        match &self.outcome {
            Outcome::Solved => true,
            Outcome::Step { children, .. } => children.iter().all(ProofNode::is_proved),
            Outcome::Open { .. } => false,
        }
    }

    /// Every step in pre-order.
    pub fn steps(&self) -> Vec<(&AdpProblem, Processor, &Justification)> {
        let mut out = Vec::new();
        self.collect_steps(&mut out);
        out
    }

    fn collect_steps<'a>(&'a self, out: &mut Vec<(&'a AdpProblem, Processor, &'a Justification)>) {
        if let Outcome::Step { processor, justification, children } = &self.outcome {
            out.push((&self.problem, *processor, justification));
            for c in children {
                c.collect_steps(out);
            }
        }
    }

    fn timed_out(&self) -> bool {
        match &self.outcome {
            Outcome::Solved => false,
            Outcome::Step { children, .. } => children.iter().any(ProofNode::timed_out),
            Outcome::Open { timed_out, .. } => *timed_out,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Proof {
    pub verdict: Verdict,
    pub root: ProofNode,
    pub timed_out: bool,
    /// Why a complete proof tree was rejected by re-verification.
    pub verification_error: Option<String>,
}

type Key = (Vec<Adp>, bool);

struct Search<'a> {
    cfg: &'a Config,
    deadline: Instant,
}

/// Prove iAST of `r` starting from its canonical ADP problem.
pub fn prove(r: &Ptrs, cfg: &Config) -> Proof {
    prove_problem(AdpProblem::canonical(r), cfg)
}

pub fn prove_problem(p: AdpProblem, cfg: &Config) -> Proof {
    let search = Search { cfg, deadline: Instant::now() + cfg.timeout };
    let mut seen = BTreeSet::from([p.key()]);
    let root = search.solve(p, 0, &mut seen);
    let timed_out = root.timed_out();
    let (verdict, verification_error) = if root.is_proved() {
        match verify(&root) {
            Ok(()) => (Verdict::Yes, None),
            Err(e) => (Verdict::Maybe, Some(e)),
        }
    } else {
        (Verdict::Maybe, None)
    };
    Proof { verdict, root, timed_out, verification_error }
}

/// A transformation application: ADP index, support index, position.
#[derive(Clone, Debug)]
enum Candidate {
    Overlap(usize, usize, Position),
    Rewrite(usize, usize, Position),
    Instantiate(usize),
    Forward(usize),
}

impl Search<'_> {
    fn expired(&self) -> bool {
        Instant::now() >= self.deadline
    }

    fn open(p: AdpProblem, last: Option<Processor>, timed_out: bool) -> ProofNode {
        ProofNode { problem: p, outcome: Outcome::Open { last_attempted: last, timed_out } }
    }

    fn step(&self, p: AdpProblem, processor: Processor, res: ProcessorResult, used: usize, seen: &mut BTreeSet<Key>) -> ProofNode {
        let problems: Vec<AdpProblem> = res.children.into_iter().map(|c| c.tidy()).collect();
        let base: &BTreeSet<Key> = seen;
        let outs = self.cfg.exec.map(&problems, |child| {
            let mut s = base.clone();
            let node = self.solve(child.clone(), used, &mut s);
            (node, s)
        });
        let mut children = Vec::with_capacity(outs.len());
        for (node, s) in outs {
            seen.extend(s);
            children.push(node);
        }
        let justification = tidy_justification(res.justification);
        ProofNode { problem: p, outcome: Outcome::Step { processor, justification, children } }
    }

    fn solve(&self, p: AdpProblem, used: usize, seen: &mut BTreeSet<Key>) -> ProofNode {
        if p.is_solved() {
            return ProofNode { problem: p, outcome: Outcome::Solved };
        }
        if self.expired() {
            return Self::open(p, None, true);
        }
        let key = p.key();
        let changed = |res: &ProcessorResult| res.children.len() != 1 || res.children[0].key() != key;
        if p.all_trivial() && !p.is_classical() {
            if let Ok(res) = proc_probability_removal(&p) {
                return self.step(p, Processor::ProbabilityRemoval, res, used, seen);
            }
        }
        let res = proc_dependency_graph(&p);
        if changed(&res) {
            return self.step(p, Processor::DependencyGraph, res, used, seen);
        }
        let res = proc_usable_terms(&p);
        if changed(&res) {
            return self.step(p, Processor::UsableTerms, res, used, seen);
        }
        let res = proc_usable_rules(&p);
        if changed(&res) {
            return self.step(p, Processor::UsableRules, res, used, seen);
        }
        if self.expired() {
            return Self::open(p, Some(Processor::ReductionPair), true);
        }
        for template in [Template::Linear, Template::Multilinear] {
            let scfg = SearchConfig { max_coeff: self.cfg.max_coeff, template, exec: self.cfg.exec, ..SearchConfig::default() };
            if let Some(pol) = search_interpretation(&p, &scfg) {
                let res = proc_reduction_pair(&p, &pol).expect("witness verified by search");
                return self.step(p, Processor::ReductionPair, res, used, seen);
            }
            if self.expired() {
                return Self::open(p, Some(Processor::ReductionPair), true);
            }
        }
        if !self.cfg.enable_transforms || used >= self.cfg.transform_depth {
            return Self::open(p, Some(Processor::ReductionPair), false);
        }
        let mut last = Processor::ReductionPair;
        let mut tried = 0;
        let mut first_failure = None;
        for cand in candidates(&p) {
            if self.expired() {
                return Self::open(p, Some(last), true);
            }
            let (processor, res) = match &cand {
                Candidate::Overlap(i, j, pos) => {
                    (Processor::RuleOverlapInstantiation, proc_rule_overlap_instantiation(&p, *i, *j, pos))
                }
                Candidate::Rewrite(i, j, pos) => (Processor::Rewriting, proc_rewriting(&p, *i, *j, pos)),
                Candidate::Instantiate(i) => (Processor::Instantiation, proc_instantiation(&p, *i)),
                Candidate::Forward(i) => (Processor::ForwardInstantiation, proc_forward_instantiation(&p, *i)),
            };
            last = processor;
            let Ok(res) = res else { continue };
            let child = res.children[0].tidy();
            if !seen.insert(child.key()) {
                continue;
            }
            if tried == self.cfg.transform_breadth {
                break;
            }
            tried += 1;
            let node = self.step(p.clone(), processor, res, used + 1, seen);
            if node.is_proved() || node.timed_out() {
                return node;
            }
            first_failure.get_or_insert(node);
        }
        first_failure.unwrap_or_else(|| Self::open(p, Some(last), false))
    }
}

/// Rename fresh variables in recorded substitutions to `z1, z2, …` so that
/// proofs do not depend on the global fresh-variable counter.
fn tidy_justification(j: Justification) -> Justification {
    let tidy = |subs: Vec<Substitution>| -> Vec<Substitution> {
        subs.iter()
            .map(|d| {
                let mut names = BTreeMap::new();
                let mut fresh = Vec::new();
                for (_, t) in d.iter() {
                    fresh.extend(t.vars().into_iter().filter(Var::is_fresh));
                }
                for v in fresh {
                    let n = names.len() + 1;
                    names.entry(v).or_insert_with(|| Term::Var(Var::new(&format!("z{n}"))));
                }
                let rename = Substitution::from_pairs(names);
                Substitution::from_pairs(d.iter().map(|(v, t)| (v.clone(), t.apply(&rename))))
            })
            .collect()
    };
    match j {
        Justification::Instantiation { adp, substitutions } => {
            Justification::Instantiation { adp, substitutions: tidy(substitutions) }
        }
        Justification::ForwardInstantiation { adp, substitutions } => {
            Justification::ForwardInstantiation { adp, substitutions: tidy(substitutions) }
        }
        Justification::RuleOverlap { adp, j, pos, substitutions } => {
            Justification::RuleOverlap { adp, j, pos, substitutions: tidy(substitutions) }
        }
        other => other,
    }
}

/// Transformation candidates in application order: rule overlap
/// instantiation, rewriting, instantiation, forward instantiation; only
/// ADPs with annotations are targeted.
fn candidates(p: &AdpProblem) -> Vec<Candidate> {
    let annotated: Vec<usize> = (0..p.len()).filter(|&i| p.adps()[i].has_annotation()).collect();
    let mut out = Vec::new();
    for &i in &annotated {
        for (j, r) in p.adps()[i].rhs.terms().enumerate() {
            out.extend(r.annotated_positions().into_iter().map(|pos| Candidate::Overlap(i, j, pos)));
        }
    }
    for &i in &annotated {
        out.extend(rewriting_targets(p, i).into_iter().map(|(j, pos)| Candidate::Rewrite(i, j, pos)));
    }
    out.extend(annotated.iter().map(|&i| Candidate::Instantiate(i)));
    out.extend(annotated.iter().map(|&i| Candidate::Forward(i)));
    out
}

/// Re-run the processor of every step and compare the recorded children
/// modulo variable renaming and ADP order.
pub fn verify(node: &ProofNode) -> Result<(), String> {
    match &node.outcome {
        Outcome::Solved => {
            if node.problem.is_solved() {
                Ok(())
            } else {
                Err("leaf marked solved still has annotations".to_string())
            }
        }
        Outcome::Open { .. } => Err("open leaf".to_string()),
        Outcome::Step { processor, justification, children } => {
            let p = &node.problem;
            let res = rerun(p, *processor, justification).map_err(|e| format!("{processor}: {e}"))?;
            let got: Vec<Key> = res.children.iter().map(AdpProblem::key).collect();
            let want: Vec<Key> = children.iter().map(|c| c.problem.key()).collect();
            if got != want {
                return Err(format!("{processor}: children differ on re-run"));
            }
            children.iter().try_for_each(verify)
        }
    }
}

fn rerun(p: &AdpProblem, processor: Processor, j: &Justification) -> Result<ProcessorResult, String> {
    match (processor, j) {
        (Processor::DependencyGraph, _) => Ok(proc_dependency_graph(p)),
        (Processor::UsableTerms, _) => Ok(proc_usable_terms(p)),
        (Processor::UsableRules, _) => Ok(proc_usable_rules(p)),
        (Processor::ReductionPair, Justification::ReductionPair { interpretation, .. }) => {
            proc_reduction_pair(p, interpretation).map_err(|e| e.to_string())
        }
        (Processor::ProbabilityRemoval, _) => proc_probability_removal(p).map_err(|e| e.to_string()),
        (Processor::Rewriting, Justification::Rewriting { adp, j, pos, .. }) => {
            proc_rewriting(p, *adp, *j, pos).map_err(|e| e.to_string())
        }
        (Processor::Instantiation, Justification::Instantiation { adp, .. }) => {
            proc_instantiation(p, *adp).map_err(|e| e.to_string())
        }
        (Processor::ForwardInstantiation, Justification::ForwardInstantiation { adp, .. }) => {
            proc_forward_instantiation(p, *adp).map_err(|e| e.to_string())
        }
        (Processor::RuleOverlapInstantiation, Justification::RuleOverlap { adp, j, pos, .. }) => {
            proc_rule_overlap_instantiation(p, *adp, *j, pos).map_err(|e| e.to_string())
        }
        _ => Err("justification does not match processor".to_string()),
    }
}
