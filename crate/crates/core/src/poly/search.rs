//! Search for interpretations satisfying the reduction pair conditions.
//!
//! Every template coefficient is an unknown ranging over `0..=max_coeff`.
//! Interpreting terms with symbolic coefficients turns each condition into
//! one polynomial constraint over the unknowns per term monomial. A
//! depth-first search assigns unknowns one at a time and prunes as soon as
//! some constraint cannot become non-negative any more.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Interpretation, Monomial, SymbolPoly};
use crate::adp::AdpProblem;
use crate::exec::Exec;
use crate::processors::proc_reduction_pair;
use crate::term::{Symbol, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Template {
    /// `c0 + Σ c_i·x_i`
    Linear,
    /// Linear plus `c_ij·x_i·x_j` for every pair of arguments.
    Multilinear,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    pub max_coeff: u64,
    pub template: Template,
    /// Search nodes allowed per strictness candidate.
    pub node_budget: u64,
    pub exec: Exec,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_coeff: 2, template: Template::Linear, node_budget: 200_000, exec: Exec::default() }
    }
}

/// Product of unknowns, as sorted unknown ids.
type UMono = Vec<u32>;

#[derive(Clone, Debug, Default, PartialEq)]
struct CoefPoly(BTreeMap<UMono, BigRational>);

impl CoefPoly {
    fn add_term(&mut self, m: UMono, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(m.clone()).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&m);
        }
    }

    fn mul(&self, other: &CoefPoly) -> CoefPoly {
        let mut out = CoefPoly::default();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                let mut m = m1.clone();
                m.extend_from_slice(m2);
                m.sort_unstable();
                out.add_term(m, c1 * c2);
            }
        }
        out
    }
}

/// Polynomial over term variables whose coefficients are polynomials over
/// the unknowns.
#[derive(Clone, Debug, Default, PartialEq)]
struct ParamPoly(BTreeMap<Monomial, CoefPoly>);

impl ParamPoly {
    fn unknown(u: u32) -> ParamPoly {
        let mut c = CoefPoly::default();
        c.add_term(vec![u], BigRational::one());
        ParamPoly(BTreeMap::from([(Monomial::new(), c)]))
    }

    #[cfg(test)]
    fn one() -> ParamPoly {
        let mut c = CoefPoly::default();
        c.add_term(Vec::new(), BigRational::one());
        ParamPoly(BTreeMap::from([(Monomial::new(), c)]))
    }

    fn var(v: &crate::term::Var) -> ParamPoly {
        let mut c = CoefPoly::default();
        c.add_term(Vec::new(), BigRational::one());
        ParamPoly(BTreeMap::from([(Monomial::from([(v.clone(), 1)]), c)]))
    }

    fn add_scaled(&mut self, other: &ParamPoly, k: &BigRational) {
        for (m, cp) in &other.0 {
            let e = self.0.entry(m.clone()).or_default();
            for (um, c) in &cp.0 {
                e.add_term(um.clone(), c * k);
            }
            if e.0.is_empty() {
                self.0.remove(m);
            }
        }
    }

    fn mul(&self, other: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::default();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &other.0 {
                let mut m = m1.clone();
                for (v, e) in m2 {
                    *m.entry(v.clone()).or_insert(0) += e;
                }
                let prod = c1.mul(c2);
                let e = out.0.entry(m.clone()).or_default();
                for (um, c) in prod.0 {
                    e.add_term(um, c);
                }
                if e.0.is_empty() {
                    out.0.remove(&m);
                }
            }
        }
        out
    }
}

/// The unknowns of every symbol template.
struct Templates {
    slots: BTreeMap<(Symbol, bool), Vec<(BTreeSet<usize>, u32)>>,
    count: u32,
}

impl Templates {
    fn new(symbols: &BTreeSet<(Symbol, bool)>, template: Template) -> Self {
        let mut slots = BTreeMap::new();
        let mut count = 0;
        for key in symbols {
            let n = key.0.arity();
            let mut monos: Vec<BTreeSet<usize>> = vec![BTreeSet::new()];
            monos.extend((1..=n).map(|i| BTreeSet::from([i])));
            if template == Template::Multilinear {
                for i in 1..=n {
                    for j in i + 1..=n {
                        monos.push(BTreeSet::from([i, j]));
                    }
                }
            }
            let v = monos
                .into_iter()
                .map(|m| {
                    count += 1;
                    (m, count - 1)
                })
                .collect();
            slots.insert(key.clone(), v);
        }
        Templates { slots, count }
    }

    fn interpret(&self, t: &Term, cache: &mut HashMap<Term, ParamPoly>) -> ParamPoly {
        if let Some(p) = cache.get(t) {
            return p.clone();
        }
        let out = match t {
            Term::Var(v) => ParamPoly::var(v),
            Term::App { sym, annotated, args } => {
                let argp: Vec<ParamPoly> = args.iter().map(|a| self.interpret(a, cache)).collect();
                let mut out = ParamPoly::default();
                for (mono, u) in &self.slots[&(sym.clone(), *annotated)] {
                    let mut term = ParamPoly::unknown(*u);
                    for i in mono {
                        term = term.mul(&argp[i - 1]);
                    }
                    out.add_scaled(&term, &BigRational::one());
                }
                out
            }
        };
        cache.insert(t.clone(), out.clone());
        out
    }

    fn build(&self, values: &[u64]) -> Interpretation {
        let mut pol = Interpretation::new();
        for ((s, a), slots) in &self.slots {
            pol.set(s.clone(), *a, SymbolPoly::new(slots.iter().map(|(m, u)| (m.clone(), values[*u as usize]))));
        }
        pol
    }
}

/// `Σ c·Π unknowns ≥ 0` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Constraint {
    terms: Vec<(UMono, i128)>,
}

/// Constraints saying every coefficient of `diff` is non-negative, and with
/// `strict` that the constant part is at least 1. `None` when some
/// coefficient overflows.
fn constraints_of(diff: &ParamPoly, strict: bool) -> Option<Vec<Constraint>> {
    let mut out = Vec::new();
    let mut polys: Vec<CoefPoly> =
        diff.0.iter().filter(|(m, _)| !(strict && m.is_empty())).map(|(_, c)| c.clone()).collect();
    if strict {
        let mut c = diff.0.get(&Monomial::new()).cloned().unwrap_or_default();
        c.add_term(Vec::new(), -BigRational::one());
        polys.push(c);
    }
    for cp in polys {
        if cp.0.values().all(|c| !c.is_negative()) {
            continue;
        }
        let lcm = cp.0.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut terms = Vec::new();
        for (m, c) in &cp.0 {
            let scaled = (c * BigRational::from_integer(lcm.clone())).to_integer();
            terms.push((m.clone(), scaled.to_i128()?));
        }
        out.push(Constraint { terms });
    }
    Some(out)
}

struct Csp<'a> {
    max: i128,
    cons: &'a [Constraint],
    occurs: Vec<Vec<usize>>,
    order: Vec<u32>,
    budget: u64,
}

impl<'a> Csp<'a> {
    fn new(n: u32, max: u64, cons: &'a [Constraint], budget: u64) -> Self {
        let mut occurs = vec![Vec::new(); n as usize];
        let mut by_size: Vec<usize> = (0..cons.len()).collect();
        by_size.sort_by_key(|&i| (distinct_unknowns(&cons[i]).len(), i));
        let mut order = Vec::new();
        let mut seen = BTreeSet::new();
        for &ci in &by_size {
            for u in distinct_unknowns(&cons[ci]) {
                occurs[u as usize].push(ci);
                if seen.insert(u) {
                    order.push(u);
                }
            }
        }
        for u in 0..n {
            if seen.insert(u) {
                order.push(u);
            }
        }
        Csp { max: max as i128, cons, occurs, order, budget }
    }

    fn upper(&self, c: &Constraint, lo: &[i128], hi: &[i128]) -> i128 {
        let mut sum: i128 = 0;
        for (m, k) in &c.terms {
            let bounds = if *k > 0 { hi } else { lo };
            let mut prod = *k;
            for u in m {
                prod = prod.saturating_mul(bounds[*u as usize]);
                if prod == 0 {
                    break;
                }
            }
            sum = sum.saturating_add(prod);
        }
        sum
    }

    fn solve(&self) -> Option<Vec<u64>> {
        let n = self.occurs.len();
        let mut lo = vec![0i128; n];
        let mut hi = vec![self.max; n];
        if self.cons.iter().any(|c| self.upper(c, &lo, &hi) < 0) {
            return None;
        }
        let mut nodes = 0u64;
        if self.dfs(0, &mut lo, &mut hi, &mut nodes) {
            Some(lo.iter().map(|v| *v as u64).collect())
        } else {
            None
        }
    }

    fn dfs(&self, k: usize, lo: &mut [i128], hi: &mut [i128], nodes: &mut u64) -> bool {
        if k == self.order.len() {
            return true;
        }
        let u = self.order[k] as usize;
        for val in 0..=self.max {
            *nodes += 1;
            if *nodes > self.budget {
                return false;
            }
            lo[u] = val;
            hi[u] = val;
            if self.occurs[u].iter().all(|&ci| self.upper(&self.cons[ci], lo, hi) >= 0)
                && self.dfs(k + 1, lo, hi, nodes)
            {
                return true;
            }
        }
        lo[u] = 0;
        hi[u] = self.max;
        false
    }
}

fn distinct_unknowns(c: &Constraint) -> Vec<u32> {
    let set: BTreeSet<u32> = c.terms.iter().flat_map(|(m, _)| m.iter().copied()).collect();
    set.into_iter().collect()
}

/// Symbols needing an interpretation: every symbol of the problem plus the
/// annotated roots of left-hand sides.
fn signature(p: &AdpProblem) -> BTreeSet<(Symbol, bool)> {
    let mut sig = p.signature();
    let plain: Vec<(Symbol, bool)> = sig.iter().map(|(s, _)| (s.clone(), false)).collect();
    sig.extend(plain);
    for a in p.adps() {
        if let Some(f) = a.lhs.root() {
            sig.insert((f.clone(), true));
        }
    }
    sig
}

/// Find an interpretation that makes the reduction pair processor remove at
/// least one annotation. The witness is re-checked before it is returned.
pub fn search_interpretation(p: &AdpProblem, cfg: &SearchConfig) -> Option<Interpretation> {
    let templates = Templates::new(&signature(p), cfg.template);
    let mut cache = HashMap::new();
    let mut base = Vec::new();
    let mut candidates = Vec::new();
    for (i, a) in p.adps().iter().enumerate() {
        let l = templates.interpret(&a.lhs, &mut cache);
        if a.flag {
            let mut diff = l.clone();
            for (prob, r) in a.rhs.entries() {
                let rp = templates.interpret(&r.flatten(), &mut cache);
                diff.add_scaled(&rp, &-prob.clone());
            }
            base.extend(constraints_of(&diff, false)?);
        }
        if !a.has_annotation() {
            continue;
        }
        let lsharp = templates.interpret(&a.lhs.annotate_root(), &mut cache);
        let mut diff = lsharp.clone();
        for (j, (prob, r)) in a.rhs.entries().iter().enumerate() {
            let mut sum = ParamPoly::default();
            let subs = r.annotated_subterms();
            for (_, t) in &subs {
                sum.add_scaled(&templates.interpret(&t.annotate_root(), &mut cache), &BigRational::one());
            }
            diff.add_scaled(&sum, &-prob.clone());
            let mut strict = lsharp.clone();
            strict.add_scaled(&sum, &-BigRational::one());
            let mut cons = constraints_of(&strict, true)?;
            if a.flag {
                let mut weak = l.clone();
                weak.add_scaled(&templates.interpret(&r.flatten(), &mut cache), &-BigRational::one());
                cons.extend(constraints_of(&weak, false)?);
            }
            candidates.push(((subs.len(), i, j), cons));
        }
        base.extend(constraints_of(&diff, false)?);
    }
    base.sort();
    base.dedup();
    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    let (n, max, budget) = (templates.count, cfg.max_coeff, cfg.node_budget);
    cfg.exec.find_map_first(&candidates, |(_, extra)| {
        let mut cons = base.clone();
        cons.extend(extra.iter().cloned());
        let values = Csp::new(n, max, &cons, budget).solve()?;
        let pol = templates.build(&values);
        proc_reduction_pair(p, &pol).ok().map(|_| pol)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_ptrs;

    fn canonical(text: &str) -> AdpProblem {
        AdpProblem::canonical(&parse_ptrs(text).unwrap())
    }

    #[test]
    fn random_walk_has_witness() {
        let p = canonical("(VAR x) (RULES g(x) -> {1/2 : g(g(x)), 1/2 : x})");
        let pol = search_interpretation(&p, &SearchConfig::default()).expect("witness");
        assert!(proc_reduction_pair(&p, &pol).is_ok());
    }

    #[test]
    fn binary_branching_has_witness() {
        let p = canonical("(RULES a -> {1/2 : b, 1/2 : c(a,a)})");
        assert!(search_interpretation(&p, &SearchConfig::default()).is_some());
    }

    #[test]
    fn ternary_branching_has_none() {
        let p = canonical("(RULES a -> {1/2 : b, 1/2 : c(a,a,a)})");
        assert!(search_interpretation(&p, &SearchConfig::default()).is_none());
        let wide = SearchConfig { max_coeff: 3, template: Template::Multilinear, ..SearchConfig::default() };
        assert!(search_interpretation(&p, &wide).is_none());
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let p = canonical("(VAR x) (RULES g(x) -> {1/2 : g(g(x)), 1/2 : x})");
        let seq = SearchConfig { exec: Exec::Sequential, ..SearchConfig::default() };
        let par = SearchConfig { exec: Exec::Parallel, ..SearchConfig::default() };
        assert_eq!(search_interpretation(&p, &seq), search_interpretation(&p, &par));
    }

    #[test]
    fn constraint_scaling() {
        let mut d = ParamPoly::unknown(0);
        d.add_scaled(&ParamPoly::unknown(1), &BigRational::new((-1).into(), 2.into()));
        let cons = constraints_of(&d, false).unwrap();
        assert_eq!(cons, vec![Constraint { terms: vec![(vec![0], 2), (vec![1], -1)] }]);
        let strict = constraints_of(&ParamPoly::one(), true).unwrap();
        assert!(strict.is_empty());
    }
}
