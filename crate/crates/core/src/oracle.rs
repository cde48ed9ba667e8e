//! Executable semantics: Monte-Carlo sampling of innermost rewrite sequences
//! and exact leaf mass of depth-bounded rewrite sequence trees.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exec::Exec;
use crate::ptrs::{Ptrs, RedexIndex};
use crate::term::{Substitution, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("more than {0} tree nodes explored")]
    ExplosionGuard(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RulePolicy {
    /// The first matching rule in declaration order.
    DeclarationOrder,
    /// A uniformly chosen matching rule.
    UniformRandom,
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub trials: u64,
    pub step_cap: u64,
    /// Runs whose term grows beyond this many symbols are censored.
    pub size_cap: usize,
    pub seed: u64,
    pub rule_policy: RulePolicy,
    pub exec: Exec,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            trials: 1000,
            step_cap: 10_000,
            size_cap: 100_000,
            seed: 0,
            rule_policy: RulePolicy::DeclarationOrder,
            exec: Exec::Sequential,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum RunOutcome {
    Terminated { steps: u64 },
    Censored { steps: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub trials: u64,
    pub terminated: u64,
    pub point: f64,
    /// Wilson 95% interval.
    pub low: f64,
    pub high: f64,
}

/// Compiled left-hand side or right-hand side over interned symbols.
enum Pattern {
    Var(usize),
    App(u32, Vec<Pattern>),
}

/// A term node. Nodes marked `nf` are normal forms and never change, so
/// they may be shared.
#[derive(Clone)]
struct Node {
    sym: u32,
    args: Vec<u32>,
    size: usize,
    nf: bool,
}

struct CompiledRule {
    lhs: Pattern,
    vars: usize,
    rhs: Vec<Pattern>,
    cumulative: Vec<f64>,
}

struct Sampler {
    symbols: HashMap<(String, usize), u32>,
    rules: Vec<CompiledRule>,
    by_root: HashMap<u32, Vec<usize>>,
}

impl Sampler {
    fn new(rules: &Ptrs) -> Self {
        let mut s = Sampler { symbols: HashMap::new(), rules: Vec::new(), by_root: HashMap::new() };
        for (i, r) in rules.rules().iter().enumerate() {
            let mut vars = HashMap::new();
            let lhs = s.compile(r.lhs(), &mut vars);
            let rhs = r.rhs().terms().map(|t| s.compile(t, &mut vars)).collect();
            let mut acc = 0.0;
            let cumulative = r
                .rhs()
                .entries()
                .iter()
                .map(|(p, _)| {
                    acc += p.to_f64().unwrap_or(0.0);
                    acc
                })
                .collect();
            if let Pattern::App(f, _) = lhs {
                s.by_root.entry(f).or_default().push(i);
            }
            s.rules.push(CompiledRule { lhs, vars: vars.len(), rhs, cumulative });
        }
        s
    }

    fn intern(&mut self, name: String, arity: usize) -> u32 {
        let n = self.symbols.len() as u32;
        *self.symbols.entry((name, arity)).or_insert(n)
    }

    fn compile(&mut self, t: &Term, vars: &mut HashMap<crate::term::Var, usize>) -> Pattern {
        match t {
            Term::Var(v) => {
                let n = vars.len();
                Pattern::Var(*vars.entry(v.clone()).or_insert(n))
            }
            Term::App { sym, args, .. } => {
                let f = self.intern(sym.name().to_string(), sym.arity());
                Pattern::App(f, args.iter().map(|a| self.compile(a, vars)).collect())
            }
        }
    }

    /// Load `t` into `arena`; variables become constants no rule matches.
    fn load(&self, t: &Term, arena: &mut Vec<Node>, consts: &mut HashMap<String, u32>) -> u32 {
        let (sym, args) = match t {
            Term::Var(v) => {
                let n = (self.symbols.len() + consts.len()) as u32;
                (*consts.entry(v.name().to_string()).or_insert(n), Vec::new())
            }
            Term::App { sym, args, .. } => {
                let f = self.symbols.get(&(sym.name().to_string(), sym.arity())).copied();
                let f = f.unwrap_or_else(|| {
                    let n = (self.symbols.len() + consts.len()) as u32;
                    *consts.entry(format!("{}/{}", sym.name(), sym.arity())).or_insert(n)
                });
                (f, args.iter().map(|a| self.load(a, arena, consts)).collect())
            }
        };
        push_node(arena, sym, args)
    }

    fn matches(&self, p: &Pattern, n: u32, arena: &[Node], binding: &mut [Option<u32>]) -> bool {
        match p {
            Pattern::Var(v) => match binding[*v] {
                None => {
                    binding[*v] = Some(n);
                    true
                }
                Some(m) => same(arena, m, n),
            },
            Pattern::App(f, ps) => {
                let node = &arena[n as usize];
                node.sym == *f && ps.iter().zip(&node.args).all(|(p, &a)| self.matches(p, a, arena, binding))
            }
        }
    }

    fn build(&self, p: &Pattern, arena: &mut Vec<Node>, binding: &[Option<u32>]) -> u32 {
        match p {
            Pattern::Var(v) => binding[*v].expect("rhs variables occur in lhs"),
            Pattern::App(f, ps) => {
                let args = ps.iter().map(|q| self.build(q, arena, binding)).collect();
                push_node(arena, *f, args)
            }
        }
    }

    fn run<R: Rng>(&self, start: &Term, cfg: &SimConfig, rng: &mut R) -> RunOutcome {
        let mut arena = Vec::new();
        let root = self.load(&start.flatten(), &mut arena, &mut HashMap::new());
        let mut size = arena[root as usize].size;
        let mut steps = 0;
        // Post-order traversal: (node, next child to visit).
        let mut stack: Vec<(u32, usize)> = vec![(root, 0)];
        let mut matching = Vec::new();
        while let Some(&mut (n, ref mut next)) = stack.last_mut() {
            let node = &arena[n as usize];
            if *next < node.args.len() {
                let child = node.args[*next];
                *next += 1;
                if !arena[child as usize].nf {
                    stack.push((child, 0));
                }
                continue;
            }
            let size_now = 1 + node.args.iter().map(|&a| arena[a as usize].size).sum::<usize>();
            arena[n as usize].size = size_now;
            matching.clear();
            let mut found = None;
            for &ri in self.by_root.get(&arena[n as usize].sym).into_iter().flatten() {
                let mut binding = vec![None; self.rules[ri].vars];
                if self.matches(&self.rules[ri].lhs, n, &arena, &mut binding) {
                    if cfg.rule_policy == RulePolicy::DeclarationOrder {
                        found = Some((ri, binding));
                        break;
                    }
                    matching.push((ri, binding));
                }
            }
            if found.is_none() && !matching.is_empty() {
                let k = rng.gen_range(0..matching.len());
                found = Some(matching.swap_remove(k));
            }
            let Some((ri, binding)) = found else {
                arena[n as usize].nf = true;
                stack.pop();
                continue;
            };
            if steps >= cfg.step_cap || size > cfg.size_cap {
                return RunOutcome::Censored { steps };
            }
            let rule = &self.rules[ri];
            let u: f64 = rng.gen();
            let j = rule.cumulative.iter().position(|&c| u < c).unwrap_or(rule.cumulative.len() - 1);
            let new = self.build(&rule.rhs[j], &mut arena, &binding);
            let replacement = arena[new as usize].clone();
            size = size + replacement.size - size_now;
            arena[n as usize] = replacement;
            *stack.last_mut().expect("current node") = (n, 0);
            steps += 1;
        }
        RunOutcome::Terminated { steps }
    }
}

fn push_node(arena: &mut Vec<Node>, sym: u32, args: Vec<u32>) -> u32 {
    let size = 1 + args.iter().map(|&a| arena[a as usize].size).sum::<usize>();
    arena.push(Node { sym, args, size, nf: false });
    (arena.len() - 1) as u32
}

/// Structural equality of two arena subterms.
fn same(arena: &[Node], a: u32, b: u32) -> bool {
    let (x, y) = (&arena[a as usize], &arena[b as usize]);
    a == b || (x.sym == y.sym && x.args.iter().zip(&y.args).all(|(&p, &q)| same(arena, p, q)))
}

/// One innermost run from `start`, leftmost-innermost position first.
pub fn simulate_run<R: Rng>(rules: &Ptrs, start: &Term, cfg: &SimConfig, rng: &mut R) -> RunOutcome {
    Sampler::new(rules).run(start, cfg, rng)
}

/// Fraction of terminated runs over `cfg.trials` runs, trial `i` seeded
/// with `seed + i`. Censored runs count as non-terminating.
pub fn estimate_termination(rules: &Ptrs, start: &Term, cfg: &SimConfig) -> Estimate {
    let sampler = Sampler::new(rules);
    let terminated = cfg.exec.sum_range(cfg.trials, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(i));
        matches!(sampler.run(start, cfg, &mut rng), RunOutcome::Terminated { .. }) as u64
    });
    let (low, high) = wilson(terminated, cfg.trials);
    Estimate { trials: cfg.trials, terminated, point: terminated as f64 / cfg.trials.max(1) as f64, low, high }
}

fn wilson(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n, z) = (k as f64, n as f64, 1.96_f64);
    let p = k / n;
    let denom = 1.0 + z * z / n;
    let center = (p + z * z / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

pub const DEFAULT_NODE_GUARD: u64 = 1_000_000;

/// Exact probability of reaching a normal form within `depth` innermost
/// steps from `start`. Without `adversarial` the leftmost-innermost redex
/// and first matching rule are used; with it, the minimum over all choices.
pub fn bounded_mass(rules: &Ptrs, start: &Term, depth: usize, adversarial: bool) -> Result<BigRational, OracleError> {
    bounded_mass_with_guard(rules, start, depth, adversarial, DEFAULT_NODE_GUARD)
}

pub fn bounded_mass_with_guard(
    rules: &Ptrs,
    start: &Term,
    depth: usize,
    adversarial: bool,
    guard: u64,
) -> Result<BigRational, OracleError> {
    let mut m = Mass { rules, idx: rules.redex_index(), adversarial, memo: HashMap::new(), nodes: 0, guard };
    m.mass(&start.flatten(), depth)
}

struct Mass<'a> {
    rules: &'a Ptrs,
    idx: RedexIndex,
    adversarial: bool,
    memo: HashMap<(Term, usize), BigRational>,
    nodes: u64,
    guard: u64,
}

impl Mass<'_> {
    fn mass(&mut self, t: &Term, depth: usize) -> Result<BigRational, OracleError> {
        let redexes = self.innermost(t);
        if redexes.is_empty() {
            return Ok(BigRational::one());
        }
        if depth == 0 {
            return Ok(BigRational::zero());
        }
        let key = (t.clone(), depth);
        if let Some(v) = self.memo.get(&key) {
            return Ok(v.clone());
        }
        self.nodes += 1;
        if self.nodes > self.guard {
            return Err(OracleError::ExplosionGuard(self.guard));
        }
        let choices = if self.adversarial { &redexes[..] } else { &redexes[..1] };
        let mut best: Option<BigRational> = None;
        for (pos, rule, sigma) in choices {
            let mut v = BigRational::zero();
            for (p, r) in self.rules.rules()[*rule].rhs().entries() {
                let next = t.replace_at(pos, r.apply(sigma)).expect("own position");
                v += p * self.mass(&next, depth - 1)?;
            }
            if best.as_ref().is_none_or(|b| v < *b) {
                best = Some(v);
            }
        }
        let v = best.expect("at least one redex");
        self.memo.insert(key, v.clone());
        Ok(v)
    }

    /// Innermost redexes in pre-order, rules in declaration order.
    fn innermost(&self, t: &Term) -> Vec<(crate::term::Position, usize, Substitution)> {
        let mut out = Vec::new();
        for pos in t.app_positions() {
            let sub = t.subterm_at(&pos).expect("own position");
            if sub.args().iter().all(|a| self.idx.is_nf(a)) {
                for (rule, sigma) in self.idx.matches_plain(sub) {
                    out.push((pos.clone(), rule, sigma));
                }
            }
        }
        out
    }
}
