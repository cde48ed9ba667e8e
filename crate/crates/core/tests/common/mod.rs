//! Corpus access, generators and property checks shared by the property
//! suites and the acceptance report.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use num_rational::BigRational;
use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, TestCaseError, TestRunner};

use piast::adp::AdpProblem;
use piast::engine::{self, verify, Verdict};
use piast::parse::{parse_program, Program};
use piast::poly::{Interpretation, SymbolPoly};
use piast::processors::{
    dependency_graph, proc_dependency_graph, proc_reduction_pair, proc_usable_rules, proc_usable_terms,
};
use piast::ptrs::{MultiDistribution, Ptrs, Rule};
use piast::term::{match_term, unify, Position, Substitution, Symbol, Term, Var};
use piast::transforms::{proc_rewriting, rewriting_targets};

pub const CASES: u32 = 500;

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(format!("{name}.trs"))
}

pub fn corpus(name: &str) -> Program {
    let text = std::fs::read_to_string(corpus_path(name)).expect("corpus file");
    parse_program(&text).expect("corpus parses")
}

fn sym(name: &str, arity: usize) -> Symbol {
    Symbol::new(name, arity)
}

fn app(name: &str, args: Vec<Term>) -> Term {
    Term::app(sym(name, args.len()), args)
}

/// Terms of depth at most `depth` over `f/2, g/1, a, b` and `vars`.
pub fn unif_term(depth: u32, vars: &'static [&'static str]) -> BoxedStrategy<Term> {
    let leaf = prop_oneof![
        Just(Term::constant("a")),
        Just(Term::constant("b")),
        proptest::sample::select(vars.to_vec()).prop_map(Term::var),
    ];
    leaf.prop_recursive(depth, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(l, r)| app("f", vec![l, r])),
            inner.prop_map(|t| app("g", vec![t])),
        ]
    })
    .boxed()
}

const UNIF_VARS: &[&str] = &["x", "y", "z"];

fn ground_depth1() -> Vec<Term> {
    let base = [Term::constant("a"), Term::constant("b")];
    let mut out = base.to_vec();
    for s in &base {
        out.push(app("g", vec![s.clone()]));
        for t in &base {
            out.push(app("f", vec![s.clone(), t.clone()]));
        }
    }
    out
}

fn tuple(vars: &[Var], sub: &Substitution) -> Term {
    let args: Vec<Term> = vars.iter().map(|v| sub.get(v).cloned().unwrap_or_else(|| Term::Var(v.clone()))).collect();
    Term::app(Symbol::new("(tuple)", args.len()), args)
}

/// The mgu is a unifier, every small ground unifier is an instance of it,
/// and no small ground unifier exists when unification fails.
pub fn check_mgu(s: &Term, t: &Term) -> Result<(), TestCaseError> {
    let vars: Vec<Var> = UNIF_VARS.iter().map(|v| Var::new(v)).collect();
    let mgu = unify(s, t);
    if let Some(m) = &mgu {
        prop_assert_eq!(s.apply(m), t.apply(m));
    }
    let ground = ground_depth1();
    for a in &ground {
        for b in &ground {
            for c in &ground {
                let theta = Substitution::from_pairs(vars.iter().cloned().zip([a.clone(), b.clone(), c.clone()]));
                if s.apply(&theta) != t.apply(&theta) {
                    continue;
                }
                let m = mgu.as_ref().ok_or_else(|| TestCaseError::fail(format!("{s} and {t} have unifier {theta}")))?;
                prop_assert!(
                    match_term(&tuple(&vars, m), &tuple(&vars, &theta)).is_some(),
                    "{} is not more general than {}",
                    m,
                    theta
                );
            }
        }
    }
    Ok(())
}

const DEFINED: &[(&str, usize)] = &[("f", 1), ("g", 2), ("h", 1)];
const CONSTRUCTORS: &[(&str, usize)] = &[("a", 0), ("b", 0), ("c", 1)];
const SYS_VARS: &[&str] = &["x", "y"];

fn sys_term(depth: u32, symbols: Vec<(&'static str, usize)>) -> BoxedStrategy<Term> {
    let leaf = prop_oneof![
        Just(Term::constant("a")),
        Just(Term::constant("b")),
        proptest::sample::select(SYS_VARS.to_vec()).prop_map(Term::var),
    ];
    leaf.prop_recursive(depth, 12, 2, move |inner| {
        let symbols = symbols.clone();
        (proptest::sample::select(symbols), proptest::collection::vec(inner, 2))
            .prop_map(|((name, arity), args)| app(name, args.into_iter().take(arity).collect()))
    })
    .boxed()
}

/// Replace variables outside `allowed` by `a`.
fn restrict_vars(t: &Term, allowed: &BTreeSet<Var>) -> Term {
    match t {
        Term::Var(v) if allowed.contains(v) => t.clone(),
        Term::Var(_) => Term::constant("a"),
        Term::App { sym, args, .. } => Term::app(sym.clone(), args.iter().map(|x| restrict_vars(x, allowed)).collect()),
    }
}

fn rule_strategy() -> impl Strategy<Value = Rule> {
    let all: Vec<(&str, usize)> = DEFINED.iter().chain(CONSTRUCTORS).copied().collect();
    let lhs_args = sys_term(2, CONSTRUCTORS.to_vec());
    (
        proptest::sample::select(DEFINED.to_vec()),
        proptest::collection::vec(lhs_args, 2),
        proptest::collection::vec(sys_term(3, all), 1..=3),
    )
        .prop_map(|((name, arity), args, rhs)| {
            let lhs = app(name, args.into_iter().take(arity).collect());
            let vars = lhs.var_set();
            let rhs: Vec<Term> = rhs.iter().map(|r| restrict_vars(r, &vars)).collect();
            let n = rhs.len() as i64;
            let mut probs: Vec<BigRational> = vec![BigRational::new(1.into(), (2 * n).into()); rhs.len()];
            probs[0] += BigRational::new(1.into(), 2.into());
            let mu = MultiDistribution::new(probs.into_iter().zip(rhs).collect()).expect("sums to one");
            Rule::new(lhs, mu).expect("well-formed rule")
        })
}

/// Systems of one to three rules with terms of depth at most three.
pub fn system() -> impl Strategy<Value = Ptrs> {
    proptest::collection::vec(rule_strategy(), 1..=3).prop_map(Ptrs::new)
}

/// A plain term over the system signature plus a set of its positions.
pub fn term_with_positions() -> impl Strategy<Value = (Term, Vec<usize>)> {
    let all: Vec<(&str, usize)> = DEFINED.iter().chain(CONSTRUCTORS).copied().collect();
    (sys_term(3, all), proptest::collection::vec(0usize..64, 0..6))
}

fn defined_set() -> BTreeSet<Symbol> {
    DEFINED.iter().map(|(n, a)| sym(n, *a)).collect()
}

/// Annotating defined positions and flattening again is the identity, and
/// exactly the requested positions end up annotated.
pub fn check_annotate_roundtrip(t: &Term, picks: &[usize]) -> Result<(), TestCaseError> {
    let defined = defined_set();
    let candidates: Vec<Position> = t
        .app_positions()
        .into_iter()
        .filter(|p| t.subterm_at(p).ok().and_then(Term::root).is_some_and(|s| defined.contains(s)))
        .collect();
    let phi: BTreeSet<Position> =
        if candidates.is_empty() { BTreeSet::new() } else { picks.iter().map(|i| candidates[i % candidates.len()].clone()).collect() };
    let annotated = t.annotate(&phi, &defined).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(annotated.flatten(), t.clone());
    prop_assert_eq!(annotated.annotated_positions(), phi);
    let all = t.annotate_defined(&defined);
    prop_assert_eq!(all.flatten(), t.clone());
    prop_assert_eq!(all.annotated_positions(), candidates.into_iter().collect::<BTreeSet<_>>());
    Ok(())
}

fn ground_constructor_terms() -> Vec<Term> {
    let mut out = vec![Term::constant("a"), Term::constant("b")];
    for _ in 0..2 {
        let next: Vec<Term> = out.iter().map(|t| app("c", vec![t.clone()])).collect();
        for t in next {
            if !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}

/// Terms reachable from `t` by at most `steps` innermost `r`-steps strictly
/// below the root.
fn reach_below_root(r: &Ptrs, t: &Term, steps: usize) -> Vec<Term> {
    let mut seen = vec![t.flatten()];
    let mut frontier = vec![t.flatten()];
    for _ in 0..steps {
        let mut next = Vec::new();
        for s in &frontier {
            for (pos, rule, _) in r.innermost_redexes(s) {
                if pos.is_root() {
                    continue;
                }
                let Ok(mu) = r.rewrite_innermost(s, &pos, rule) else { continue };
                for u in mu.terms() {
                    if !seen.contains(u) && u.size() <= 60 {
                        seen.push(u.clone());
                        next.push(u.clone());
                    }
                }
            }
        }
        frontier = next;
    }
    seen
}

/// Every edge witnessed by brute force over small constructor
/// instantiations and up to three innermost steps is in the graph.
pub fn check_dg_overapproximation(r: &Ptrs) -> Result<(), TestCaseError> {
    let p = AdpProblem::canonical(r);
    let g = dependency_graph(&p);
    let np = p.np();
    let idx = p.redex_index();
    let ground = ground_constructor_terms();
    for (i, a) in p.adps().iter().enumerate() {
        let vars: Vec<Var> = a.lhs.vars();
        let mut sigmas = vec![Substitution::new()];
        for v in &vars {
            sigmas = sigmas
                .into_iter()
                .flat_map(|s| {
                    ground.iter().map(move |gt| {
                        let mut s2 = s.clone();
                        s2.insert(v.clone(), gt.clone());
                        s2
                    })
                })
                .collect();
        }
        for sigma in &sigmas {
            if !idx.is_anf(&a.lhs.apply(sigma)) {
                continue;
            }
            for (_, _, t) in a.annotated_subterms() {
                for s in reach_below_root(&np, &t.apply(sigma), 3) {
                    for (k, b) in p.adps().iter().enumerate() {
                        if match_term(&b.lhs, &s).is_some() && idx.is_anf(&s) {
                            prop_assert!(
                                g.edges.contains(&(i, k)),
                                "missing edge {} -> {} via {} in\n{}",
                                i + 1,
                                k + 1,
                                s,
                                p
                            );
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn rule_shapes(p: &AdpProblem) -> Vec<(Term, MultiDistribution)> {
    let mut v: Vec<(Term, MultiDistribution)> = p.adps().iter().map(|a| (a.lhs.clone(), a.rhs.flatten())).collect();
    v.sort();
    v
}

fn random_interpretation(p: &AdpProblem, coeffs: &[u64]) -> Interpretation {
    let mut pol = Interpretation::new();
    let mut k = 0;
    let mut next = || {
        k += 1;
        coeffs[k % coeffs.len()]
    };
    for (s, annotated) in p.signature() {
        let cs: Vec<u64> = (0..s.arity()).map(|_| next()).collect();
        pol.set(s.clone(), annotated, SymbolPoly::linear(next(), &cs));
        if !annotated {
            let cs: Vec<u64> = (0..s.arity()).map(|_| next()).collect();
            pol.set(s, true, SymbolPoly::linear(next(), &cs));
        }
    }
    pol
}

/// DG, UT, UR and RP only change annotations and flags: every child has the
/// same rules as its parent once flattened.
pub fn check_processors_preserve_flattening(r: &Ptrs, coeffs: &[u64]) -> Result<(), TestCaseError> {
    let p0 = AdpProblem::canonical(r);
    let p1 = proc_usable_terms(&p0).children.remove(0);
    for p in [&p0, &p1] {
        let shape = rule_shapes(p);
        let mut children = proc_dependency_graph(p).children;
        children.extend(proc_usable_terms(p).children);
        children.extend(proc_usable_rules(p).children);
        if let Ok(res) = proc_reduction_pair(p, &random_interpretation(p, coeffs)) {
            children.extend(res.children);
        }
        for c in &children {
            prop_assert_eq!(rule_shapes(c), shape.clone());
        }
    }
    Ok(())
}

fn check_totals(p: &AdpProblem) -> Result<(), TestCaseError> {
    for a in p.adps() {
        prop_assert!(a.rhs.total() == BigRational::from_integer(1.into()), "{} does not sum to 1", a);
    }
    Ok(())
}

/// Parsed rules, canonical ADPs, processor children and rewriting results
/// all carry distributions that sum to one; the printed system parses back.
pub fn check_distribution_sums(r: &Ptrs) -> Result<(), TestCaseError> {
    for rule in r.rules() {
        prop_assert!(rule.rhs().total() == BigRational::from_integer(1.into()));
    }
    let text = format!("(VAR x y) (RULES {})", r.rules().iter().map(Rule::to_string).collect::<Vec<_>>().join(" "));
    let back = parse_program(&text).map_err(|e| TestCaseError::fail(format!("{text}: {e}")))?;
    prop_assert_eq!(back.ptrs.rules(), r.rules());
    let p = AdpProblem::canonical(r);
    check_totals(&p)?;
    for c in proc_dependency_graph(&p).children.iter().chain(&proc_usable_terms(&p).children) {
        check_totals(c)?;
    }
    for i in 0..p.len() {
        for (j, pos) in rewriting_targets(&p, i) {
            if let Ok(res) = proc_rewriting(&p, i, j, &pos) {
                for c in &res.children {
                    check_totals(c)?;
                }
            }
        }
    }
    Ok(())
}

/// Systems of the positive acceptance criteria.
pub const POSITIVE: &[&str] = &["rw", "caa", "incpl", "ffg"];

/// `r` with rules permuted by `perm` and every variable renamed.
pub fn shuffle_and_rename(r: &Ptrs, perm: &[usize], suffix: u32) -> Ptrs {
    let mut rules: Vec<Rule> = r.rules().to_vec();
    for (i, k) in perm.iter().enumerate() {
        let j = k % rules.len();
        let n = rules.len();
        rules.swap(i % n, j);
    }
    let renamed = rules
        .iter()
        .map(|rule| {
            let ren: BTreeMap<Var, Term> = rule
                .lhs()
                .vars()
                .into_iter()
                .map(|v| {
                    let name = format!("{}{suffix}", v.name());
                    (v, Term::var(&name))
                })
                .collect();
            let s = Substitution::from_pairs(ren);
            Rule::new(rule.lhs().apply(&s), rule.rhs().map_terms(|t| t.apply(&s))).expect("renaming keeps shape")
        })
        .collect();
    Ptrs::new(renamed)
}

/// Every YES proof re-verifies.
pub fn check_yes_reverifies(r: &Ptrs) -> Result<bool, TestCaseError> {
    let proof = engine::prove(r, &engine::Config::default());
    if proof.verdict == Verdict::Yes {
        prop_assert!(verify(&proof.root).is_ok());
        Ok(true)
    } else {
        Ok(false)
    }
}

pub fn positive_variant() -> impl Strategy<Value = (usize, Vec<usize>, u32)> {
    (0..POSITIVE.len(), proptest::collection::vec(0usize..8, 0..4), 0u32..100)
}

pub fn run_yes_reverification((k, perm, suffix): &(usize, Vec<usize>, u32)) -> Result<(), TestCaseError> {
    let r = shuffle_and_rename(&corpus(POSITIVE[*k]).ptrs, perm, *suffix);
    check_yes_reverifies(&r).map(|_| ())
}

/// Run `check` on `CASES` generated inputs; `Err` carries the minimal
/// failing case.
pub fn run_suite<S: Strategy>(strategy: S, check: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String> {
    let mut runner = TestRunner::new(RunnerConfig { cases: CASES, failure_persistence: None, ..RunnerConfig::default() });
    runner.run(&strategy, check).map_err(|e| e.to_string())
}
