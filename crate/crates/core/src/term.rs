//! First-order terms with annotation bits, positions, substitutions,
//! matching, unification, renaming and the `Cap` abstraction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("invalid position {0} in term {1}")]
    InvalidPosition(Position, String),
    #[error("position {0} of {1} does not root a defined symbol")]
    NotDefinedSymbol(Position, String),
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Symbol {
    name: Arc<str>,
    arity: usize,
}

impl Symbol {
    pub fn new(name: &str, arity: usize) -> Self {
        Symbol { name: Arc::from(name), arity }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// A variable identifier. Names starting with `_` are reserved for fresh
/// variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var(Arc<str>);

static FRESH: AtomicU64 = AtomicU64::new(0);

impl Var {
    pub fn new(name: &str) -> Self {
        Var(Arc::from(name))
    }

    /// A variable that no previous call has returned.
    pub fn fresh() -> Self {
        let n = FRESH.fetch_add(1, Ordering::Relaxed);
        Var(Arc::from(format!("_v{n}").as_str()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_fresh(&self) -> bool {
        self.0.starts_with('_')
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A path of 1-based argument indices; the empty path is the root.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn new(path: Vec<usize>) -> Self {
        Position(path)
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Self {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    pub fn concat(&self, other: &Position) -> Self {
        let mut p = self.0.clone();
        p.extend_from_slice(&other.0);
        Position(p)
    }

    /// `self` is a prefix of `other` (including equality).
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_proper_prefix_of(&self, other: &Position) -> bool {
        self.0.len() < other.0.len() && self.is_prefix_of(other)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Var),
    App {
        sym: Symbol,
        annotated: bool,
        args: Vec<Term>,
    },
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Var::new(name))
    }

    pub fn app(sym: Symbol, args: Vec<Term>) -> Term {
        debug_assert_eq!(sym.arity(), args.len());
        Term::App { sym, annotated: false, args }
    }

    pub fn constant(name: &str) -> Term {
        Term::app(Symbol::new(name, 0), Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::App { .. } => None,
        }
    }

    pub fn root(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App { sym, .. } => Some(sym),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App { args, .. } => args,
        }
    }

    pub fn is_root_annotated(&self) -> bool {
        matches!(self, Term::App { annotated: true, .. })
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App { args, .. } => args.iter().all(Term::is_ground),
        }
    }

    pub fn has_annotation(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App { annotated, args, .. } => *annotated || args.iter().any(Term::has_annotation),
        }
    }

    /// Variables in order of first occurrence, left to right.
    pub fn vars(&self) -> Vec<Var> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        self.visit_vars(&mut |v| {
            if seen.insert(v.clone()) {
                out.push(v.clone());
            }
        });
        out
    }

    pub fn var_set(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit_vars(&mut |v| {
            out.insert(v.clone());
        });
        out
    }

    /// Number of occurrences of each variable.
    pub fn var_counts(&self) -> BTreeMap<Var, usize> {
        let mut out = BTreeMap::new();
        self.visit_vars(&mut |v| *out.entry(v.clone()).or_insert(0) += 1);
        out
    }

    fn visit_vars(&self, f: &mut impl FnMut(&Var)) {
        match self {
            Term::Var(v) => f(v),
            Term::App { args, .. } => args.iter().for_each(|a| a.visit_vars(f)),
        }
    }

    pub fn symbols(&self, out: &mut BTreeSet<(Symbol, bool)>) {
        if let Term::App { sym, annotated, args } = self {
            out.insert((sym.clone(), *annotated));
            args.iter().for_each(|a| a.symbols(out));
        }
    }

    /// All positions in pre-order (leftmost-outermost first).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_positions(&mut Vec::new(), &mut out, &|_| true);
        out
    }

    /// Positions of function applications, in pre-order.
    pub fn app_positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.collect_positions(&mut Vec::new(), &mut out, &|t| !t.is_var());
        out
    }

    fn collect_positions(&self, path: &mut Vec<usize>, out: &mut Vec<Position>, keep: &dyn Fn(&Term) -> bool) {
        if keep(self) {
            out.push(Position(path.clone()));
        }
        for (i, a) in self.args().iter().enumerate() {
            path.push(i + 1);
            a.collect_positions(path, out, keep);
            path.pop();
        }
    }

    pub fn subterm_at(&self, pos: &Position) -> Result<&Term, TermError> {
        let mut t = self;
        for &i in &pos.0 {
            t = match t {
                Term::App { args, .. } if i >= 1 && i <= args.len() => &args[i - 1],
                _ => return Err(TermError::InvalidPosition(pos.clone(), self.to_string())),
            };
        }
        Ok(t)
    }

    pub fn replace_at(&self, pos: &Position, s: Term) -> Result<Term, TermError> {
        let mut out = self.clone();
        {
            let slot = out
                .subterm_at_mut(&pos.0)
                .ok_or_else(|| TermError::InvalidPosition(pos.clone(), self.to_string()))?;
            *slot = s;
        }
        Ok(out)
    }

    pub(crate) fn subterm_at_mut(&mut self, path: &[usize]) -> Option<&mut Term> {
        let mut t = self;
        for &i in path {
            t = match t {
                Term::App { args, .. } if i >= 1 && i <= args.len() => &mut args[i - 1],
                _ => return None,
            };
        }
        Some(t)
    }

    pub fn annotated_positions(&self) -> BTreeSet<Position> {
        let mut out = Vec::new();
        self.collect_positions(&mut Vec::new(), &mut out, &Term::is_root_annotated);
        out.into_iter().collect()
    }

    /// `anno_Φ`: annotate exactly the positions in `phi`, which must root
    /// defined symbols.
    pub fn annotate(&self, phi: &BTreeSet<Position>, defined: &BTreeSet<Symbol>) -> Result<Term, TermError> {
        let mut out = self.flatten();
        for pos in phi {
            match out.subterm_at_mut(&pos.0) {
                Some(Term::App { sym, annotated, .. }) if defined.contains(sym) => *annotated = true,
                Some(_) => return Err(TermError::NotDefinedSymbol(pos.clone(), self.to_string())),
                None => return Err(TermError::InvalidPosition(pos.clone(), self.to_string())),
            }
        }
        Ok(out)
    }

    /// `♭`: remove every annotation.
    pub fn flatten(&self) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App { sym, args, .. } => Term::App {
                sym: sym.clone(),
                annotated: false,
                args: args.iter().map(Term::flatten).collect(),
            },
        }
    }

    /// `anno_D`: annotate every defined symbol.
    pub fn annotate_defined(&self, defined: &BTreeSet<Symbol>) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App { sym, args, .. } => Term::App {
                sym: sym.clone(),
                annotated: defined.contains(sym),
                args: args.iter().map(|a| a.annotate_defined(defined)).collect(),
            },
        }
    }

    /// `anno_ε`: flatten and annotate the root.
    pub fn annotate_root(&self) -> Term {
        match self.flatten() {
            Term::App { sym, args, .. } => Term::App { sym, annotated: true, args },
            v => v,
        }
    }

    /// Set or clear the annotation bit at the root only.
    pub fn with_root_annotation(&self, on: bool) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App { sym, args, .. } => Term::App { sym: sym.clone(), annotated: on, args: args.clone() },
        }
    }

    /// Remove annotations strictly above `pos`.
    pub fn strip_above(&self, pos: &Position) -> Result<Term, TermError> {
        self.subterm_at(pos)?;
        let mut out = self.clone();
        let mut t = &mut out;
        for &i in &pos.0 {
            match t {
                Term::App { annotated, args, .. } => {
                    *annotated = false;
                    t = &mut args[i - 1];
                }
                Term::Var(_) => unreachable!(),
            }
        }
        Ok(out)
    }

    /// The `⊴_#` relation: every annotated position with its flattened
    /// subterm, in pre-order.
    pub fn annotated_subterms(&self) -> Vec<(Position, Term)> {
        self.annotated_positions()
            .into_iter()
            .map(|p| {
                let t = self.subterm_at(&p).expect("own position").flatten();
                (p, t)
            })
            .collect()
    }

    pub fn apply(&self, sigma: &Substitution) -> Term {
        self.apply_map(&sigma.0)
    }

    fn apply_map(&self, sigma: &BTreeMap<Var, Term>) -> Term {
        match self {
            Term::Var(v) => sigma.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App { sym, annotated, args } => Term::App {
                sym: sym.clone(),
                annotated: *annotated,
                args: args.iter().map(|a| a.apply_map(sigma)).collect(),
            },
        }
    }

    pub fn occurs(&self, v: &Var) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::App { args, .. } => args.iter().any(|a| a.occurs(v)),
        }
    }

    /// Rename every variable to a fresh one.
    pub fn rename_fresh(&self) -> Term {
        self.apply(&Substitution::fresh_renaming(self.vars()))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App { sym, annotated, args } => {
                write!(f, "{sym}")?;
                if *annotated {
                    f.write_str("#")?;
                }
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Substitution(BTreeMap<Var, Term>);

impl Substitution {
    pub fn new() -> Self {
        Substitution(BTreeMap::new())
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Var, Term)>) -> Self {
        Substitution(pairs.into_iter().collect())
    }

    pub fn fresh_renaming(vars: impl IntoIterator<Item = Var>) -> Self {
        Substitution(vars.into_iter().map(|v| (v, Term::Var(Var::fresh()))).collect())
    }

    pub fn get(&self, v: &Var) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: Var, t: Term) {
        self.0.insert(v, t);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Var, &Term)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The substitution `self` followed by `other`: `t(self∘other) = (t self) other`.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut out: BTreeMap<Var, Term> = self.0.iter().map(|(v, t)| (v.clone(), t.apply(other))).collect();
        for (v, t) in &other.0 {
            out.entry(v.clone()).or_insert_with(|| t.clone());
        }
        out.retain(|v, t| t.as_var() != Some(v));
        Substitution(out)
    }

    /// Restrict to the given variables.
    pub fn restrict(&self, vars: &BTreeSet<Var>) -> Substitution {
        Substitution(self.0.iter().filter(|(v, _)| vars.contains(*v)).map(|(v, t)| (v.clone(), t.clone())).collect())
    }

    /// True when the substitution maps `vars` injectively to variables.
    pub fn is_renaming_on(&self, vars: &BTreeSet<Var>) -> bool {
        let mut images = BTreeSet::new();
        vars.iter().all(|v| match self.get(v) {
            None => images.insert(v.clone()),
            Some(Term::Var(w)) => images.insert(w.clone()),
            Some(_) => false,
        })
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}/{t}")?;
        }
        f.write_str("}")
    }
}

/// Syntactic matching: `σ` with `pattern σ = subject`. Annotation bits must
/// agree exactly.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut sigma = BTreeMap::new();
    if match_into(pattern, subject, &mut sigma) {
        Some(Substitution(sigma))
    } else {
        None
    }
}

pub(crate) fn match_into(pattern: &Term, subject: &Term, sigma: &mut BTreeMap<Var, Term>) -> bool {
    match (pattern, subject) {
        (Term::Var(v), _) => match sigma.get(v) {
            Some(bound) => bound == subject,
            None => {
                sigma.insert(v.clone(), subject.clone());
                true
            }
        },
        (
            Term::App { sym: f, annotated: a, args: ps },
            Term::App { sym: g, annotated: b, args: ss },
        ) => f == g && a == b && ps.iter().zip(ss).all(|(p, s)| match_into(p, s, sigma)),
        _ => false,
    }
}

/// Like [`match_term`] but ignoring annotation bits of the subject; no
/// bindings are built.
pub fn matches_flat(pattern: &Term, subject: &Term) -> bool {
    let mut sigma: Vec<(&Var, &Term)> = Vec::new();
    matches_flat_into(pattern, subject, &mut sigma)
}

fn matches_flat_into<'a>(pattern: &'a Term, subject: &'a Term, sigma: &mut Vec<(&'a Var, &'a Term)>) -> bool {
    match (pattern, subject) {
        (Term::Var(v), _) => match sigma.iter().find(|(w, _)| *w == v) {
            Some((_, bound)) => eq_flat(bound, subject),
            None => {
                sigma.push((v, subject));
                true
            }
        },
        (Term::App { sym: f, args: ps, .. }, Term::App { sym: g, args: ss, .. }) => {
            f == g && ps.iter().zip(ss).all(|(p, s)| matches_flat_into(p, s, sigma))
        }
        _ => false,
    }
}

/// Equality after flattening both sides.
pub fn eq_flat(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => x == y,
        (Term::App { sym: f, args: xs, .. }, Term::App { sym: g, args: ys, .. }) => {
            f == g && xs.iter().zip(ys).all(|(x, y)| eq_flat(x, y))
        }
        _ => false,
    }
}

/// Most general unifier with occurs check; annotation bits must agree.
pub fn unify(s: &Term, t: &Term) -> Option<Substitution> {
    unify_all(&[(s.clone(), t.clone())])
}

/// Simultaneous mgu of a list of equations.
pub fn unify_all(eqs: &[(Term, Term)]) -> Option<Substitution> {
    let mut sigma: BTreeMap<Var, Term> = BTreeMap::new();
    let mut stack: Vec<(Term, Term)> = eqs.to_vec();
    while let Some((a, b)) = stack.pop() {
        let a = resolve(&a, &sigma);
        let b = resolve(&b, &sigma);
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if other.occurs(x) {
                    return None;
                }
                let single = Substitution(BTreeMap::from([(x.clone(), other.clone())]));
                for img in sigma.values_mut() {
                    *img = img.apply(&single);
                }
                sigma.insert(x.clone(), other.clone());
            }
            (
                Term::App { sym: f, annotated: p, args: xs },
                Term::App { sym: g, annotated: q, args: ys },
            ) => {
                if f != g || p != q {
                    return None;
                }
                for (x, y) in xs.iter().zip(ys) {
                    stack.push((x.clone(), y.clone()));
                }
            }
        }
    }
    Some(Substitution(sigma))
}

fn resolve(t: &Term, sigma: &BTreeMap<Var, Term>) -> Term {
    if sigma.is_empty() {
        t.clone()
    } else {
        t.apply_map(sigma)
    }
}

/// `Cap`: replace every maximal subterm rooted by a symbol in `defined` by a
/// distinct fresh variable. With `protect_root` the root symbol is kept.
pub fn cap(t: &Term, defined: &BTreeSet<Symbol>, protect_root: bool) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App { sym, annotated, args } => {
            if !protect_root && defined.contains(sym) {
                return Term::Var(Var::fresh());
            }
            Term::App {
                sym: sym.clone(),
                annotated: *annotated,
                args: args.iter().map(|a| cap(a, defined, false)).collect(),
            }
        }
    }
}

/// Rename every variable of `t` (root kept) to a fresh one and replace every
/// proper subterm by a fresh variable: the most conservative cap.
pub fn cap_everything_below_root(t: &Term) -> Term {
    match t {
        Term::Var(_) => Term::Var(Var::fresh()),
        Term::App { sym, annotated, args } => Term::App {
            sym: sym.clone(),
            annotated: *annotated,
            args: args.iter().map(|_| Term::Var(Var::fresh())).collect(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(name: &str, args: Vec<Term>) -> Term {
        Term::app(Symbol::new(name, args.len()), args)
    }

    fn ann(t: Term) -> Term {
        t.with_root_annotation(true)
    }

    fn x() -> Term {
        Term::var("x")
    }

    fn defined(names: &[(&str, usize)]) -> BTreeSet<Symbol> {
        names.iter().map(|(n, a)| Symbol::new(n, *a)).collect()
    }

    fn pos(p: &[usize]) -> Position {
        Position::new(p.to_vec())
    }

    #[test]
    fn subterm_and_replace() {
        let ggx = f("g", vec![f("g", vec![x()])]);
        assert_eq!(ggx.subterm_at(&Position::root()).unwrap(), &ggx);
        let t = f("g", vec![ann(f("g", vec![x()]))]);
        assert_eq!(t.subterm_at(&pos(&[1])).unwrap(), &ann(f("g", vec![x()])));
        let g = Term::constant("g");
        let fhg = f("f", vec![f("h", vec![g.clone()]), g.clone()]);
        assert_eq!(fhg.subterm_at(&pos(&[1, 1])).unwrap(), &g);
        assert!(fhg.subterm_at(&pos(&[3])).is_err());

        assert_eq!(f("g", vec![x()]).replace_at(&Position::root(), x()).unwrap(), x());
        let b = Term::constant("b");
        let a = Term::constant("a");
        let s = ann(f("g", vec![ann(f("f", vec![b.clone()])), f("f", vec![a])]));
        let r = s.replace_at(&pos(&[2]), f("f", vec![b.clone()])).unwrap();
        assert_eq!(r, ann(f("g", vec![ann(f("f", vec![b.clone()])), f("f", vec![b])])));
        let r = fhg.replace_at(&pos(&[2]), Term::constant("b1")).unwrap();
        assert_eq!(r.to_string(), "f(h(g),b1)");
    }

    #[test]
    fn annotation_operations() {
        let d = defined(&[("g", 1)]);
        let ggx = f("g", vec![f("g", vec![x()])]);
        let gg_ann = ann(f("g", vec![ann(f("g", vec![x()]))]));
        assert!(ggx.annotated_positions().is_empty());
        assert_eq!(gg_ann.annotated_positions(), BTreeSet::from([Position::root(), pos(&[1])]));
        let g_inner = f("g", vec![ann(f("g", vec![x()]))]);
        assert_eq!(g_inner.annotated_positions(), BTreeSet::from([pos(&[1])]));

        assert_eq!(gg_ann.annotate(&BTreeSet::new(), &d).unwrap(), ggx);
        assert_eq!(ggx.annotate(&BTreeSet::from([Position::root(), pos(&[1])]), &d).unwrap(), gg_ann);
        assert_eq!(gg_ann.annotate(&BTreeSet::from([pos(&[1])]), &d).unwrap(), g_inner);
        assert_eq!(ggx.annotate_defined(&d), gg_ann);
        assert!(matches!(
            ggx.annotate(&BTreeSet::from([pos(&[1, 1])]), &d),
            Err(TermError::NotDefinedSymbol(..))
        ));
    }

    #[test]
    fn strip_above_examples() {
        let gg_ann = ann(f("g", vec![ann(f("g", vec![x()]))]));
        assert_eq!(gg_ann.strip_above(&pos(&[1])).unwrap().to_string(), "g(g#(x))");
        assert_eq!(gg_ann.strip_above(&Position::root()).unwrap(), gg_ann);
        let t = ann(f("g", vec![f("c", vec![ann(f("g", vec![x()])), ann(f("g", vec![Term::var("y")]))])]));
        assert_eq!(t.strip_above(&pos(&[1, 1])).unwrap().to_string(), "g(c(g#(x),g#(y)))");
    }

    #[test]
    fn annotated_subterm_examples() {
        let g = Term::constant("g");
        assert!(f("g", vec![f("g", vec![x()])]).annotated_subterms().is_empty());
        let t = f("g", vec![ann(f("g", vec![x()]))]);
        assert_eq!(t.annotated_subterms(), vec![(pos(&[1]), f("g", vec![x()]))]);
        let t = ann(f("f", vec![ann(f("h", vec![g.clone()])), g.clone()]));
        let subs: Vec<String> = t.annotated_subterms().iter().map(|(p, s)| format!("{p}:{s}")).collect();
        assert_eq!(subs, vec!["ε:f(h(g),g)", "1:h(g)"]);
    }

    #[test]
    fn matching_examples() {
        let b = Term::constant("b");
        let sigma = match_term(&f("g", vec![x()]), &f("g", vec![f("f", vec![b.clone()])])).unwrap();
        assert_eq!(sigma.get(&Var::new("x")), Some(&f("f", vec![b])));
        assert!(match_term(&f("f", vec![x(), x()]), &f("f", vec![Term::constant("a"), Term::constant("b")])).is_none());
    }

    #[test]
    fn unification_examples() {
        let u = Term::var("u");
        let s = ann(f("f", vec![u.clone(), u.clone(), u.clone()]));
        let t = ann(f("f", vec![x(), Term::var("y"), Term::var("z")]));
        let sigma = unify(&s, &t).unwrap();
        assert_eq!(s.apply(&sigma), t.apply(&sigma));
        assert_eq!(sigma.len(), 3);
        assert!(unify(&x(), &x()).unwrap().is_empty());
        assert!(unify(&f("g", vec![x()]), &x()).is_none());
        assert!(unify(&ann(f("g", vec![x()])), &f("g", vec![x()])).is_none());
    }

    #[test]
    fn renaming_is_fresh() {
        let t = f("g", vec![x()]);
        let r1 = t.rename_fresh();
        let r2 = t.rename_fresh();
        assert!(r1.var_set().is_disjoint(&r2.var_set()));
        assert!(r1.vars().iter().all(Var::is_fresh));
        let ground = f("g", vec![Term::constant("a")]);
        assert_eq!(ground.rename_fresh(), ground);
    }

    #[test]
    fn cap_examples() {
        let d = defined(&[("g", 1), ("q", 1)]);
        let t = f("c", vec![f("g", vec![x()]), f("g", vec![x()])]);
        let c = cap(&t, &d, false);
        let vs = c.vars();
        assert_eq!(vs.len(), 2);
        assert!(vs.iter().all(Var::is_fresh));
        let fq = ann(f("f", vec![f("q", vec![Term::constant("a")])]));
        let c = cap(&fq, &d, true);
        assert!(c.is_root_annotated());
        assert!(c.args()[0].is_var());
        let cxb = f("c", vec![x(), Term::constant("b")]);
        assert_eq!(cap(&cxb, &d, false), cxb);
        assert!(cap(&f("g", vec![x()]), &d, false).is_var());
    }

    #[test]
    fn substitution_composition() {
        let s1 = Substitution::from_pairs([(Var::new("x"), f("g", vec![Term::var("y")]))]);
        let s2 = Substitution::from_pairs([(Var::new("y"), Term::constant("a"))]);
        let t = f("h", vec![x(), Term::var("y")]);
        assert_eq!(t.apply(&s1.then(&s2)), t.apply(&s1).apply(&s2));
    }
}
