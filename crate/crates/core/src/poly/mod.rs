//! Polynomials over naturals, polynomial interpretations of terms, and the
//! absolute-positiveness checks used by the reduction pair processor.

mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::ptrs::MultiDistribution;
use crate::term::{Symbol, Term, Var};

pub use search::{search_interpretation, SearchConfig, Template};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("interpretation has no entry for {0}")]
    MissingSymbol(String),
}

/// A monomial as variable exponents.
pub type Monomial = BTreeMap<Var, u32>;

/// Polynomial with rational coefficients over term variables.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::new(), c);
        p
    }

    pub fn var(v: &Var) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::from([(v.clone(), 1)]), BigRational::one());
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_part(&self) -> BigRational {
        self.terms.get(&Monomial::new()).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, k: &BigRational) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m = m1.clone();
                for (v, e) in m2 {
                    *m.entry(v.clone()).or_insert(0) += e;
                }
                out.add_term(m, c1 * c2);
            }
        }
        out
    }

    pub fn eval(&self, env: &BTreeMap<Var, u64>) -> BigRational {
        let mut sum = BigRational::zero();
        for (m, c) in &self.terms {
            let mut v = c.clone();
            for (x, e) in m {
                let val = BigRational::from_integer((*env.get(x).unwrap_or(&0)).into());
                for _ in 0..*e {
                    v *= &val;
                }
            }
            sum += v;
        }
        sum
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.keys().cloned()).collect()
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        let mut ordered: Vec<_> = self.terms.iter().filter(|(m, _)| !m.is_empty()).collect();
        ordered.extend(self.terms.iter().filter(|(m, _)| m.is_empty()));
        for (m, c) in ordered {
            let mut factors: Vec<String> = Vec::new();
            for (v, e) in m {
                factors.extend(std::iter::repeat(v.to_string()).take(*e as usize));
            }
            let s = if factors.is_empty() {
                c.to_string()
            } else if c.is_one() {
                factors.join("·")
            } else {
                format!("{c}·{}", factors.join("·"))
            };
            parts.push(s);
        }
        f.write_str(&parts.join(" + ").replace("+ -", "- "))
    }
}

/// A multilinear polynomial with natural coefficients over argument
/// placeholders `x1..xn`; monomials are sets of 1-based argument indices.
#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct SymbolPoly {
    coeffs: BTreeMap<BTreeSet<usize>, u64>,
}

impl SymbolPoly {
    pub fn new(coeffs: impl IntoIterator<Item = (BTreeSet<usize>, u64)>) -> Self {
        SymbolPoly { coeffs: coeffs.into_iter().filter(|(_, c)| *c != 0).collect() }
    }

    pub fn constant(c: u64) -> Self {
        SymbolPoly::new([(BTreeSet::new(), c)])
    }

    /// `c0 + Σ c_i·x_i`.
    pub fn linear(c0: u64, cs: &[u64]) -> Self {
        let mut terms = vec![(BTreeSet::new(), c0)];
        for (i, c) in cs.iter().enumerate() {
            terms.push((BTreeSet::from([i + 1]), *c));
        }
        SymbolPoly::new(terms)
    }

    pub fn coeffs(&self) -> &BTreeMap<BTreeSet<usize>, u64> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

impl fmt::Display for SymbolPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        let mut ordered: Vec<_> = self.coeffs.iter().filter(|(m, _)| !m.is_empty()).collect();
        ordered.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(b.0)));
        ordered.extend(self.coeffs.iter().filter(|(m, _)| m.is_empty()));
        for (m, c) in ordered {
            let vars: Vec<String> = m.iter().map(|i| format!("x{i}")).collect();
            parts.push(match (vars.is_empty(), *c) {
                (true, c) => c.to_string(),
                (false, 1) => vars.join("·"),
                (false, c) => format!("{c}·{}", vars.join("·")),
            });
        }
        f.write_str(&parts.join(" + "))
    }
}

/// Polynomial interpretation of plain and annotated symbols.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Interpretation {
    map: BTreeMap<(Symbol, bool), SymbolPoly>,
}

impl Interpretation {
    pub fn new() -> Self {
        Interpretation::default()
    }

    pub fn set(&mut self, sym: Symbol, annotated: bool, p: SymbolPoly) {
        self.map.insert((sym, annotated), p);
    }

    pub fn get(&self, sym: &Symbol, annotated: bool) -> Option<&SymbolPoly> {
        self.map.get(&(sym.clone(), annotated))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(Symbol, bool), &SymbolPoly)> {
        self.map.iter()
    }

    /// `Pol(t)`.
    pub fn interpret(&self, t: &Term) -> Result<Polynomial, PolyError> {
        match t {
            Term::Var(v) => Ok(Polynomial::var(v)),
            Term::App { sym, annotated, args } => {
                let p = self.get(sym, *annotated).ok_or_else(|| {
                    PolyError::MissingSymbol(format!("{sym}{}", if *annotated { "#" } else { "" }))
                })?;
                let argp = args.iter().map(|a| self.interpret(a)).collect::<Result<Vec<_>, _>>()?;
                let mut out = Polynomial::zero();
                for (mono, c) in &p.coeffs {
                    let mut term = Polynomial::constant(BigRational::from_integer((*c).into()));
                    for i in mono {
                        term = term.mul(&argp[i - 1]);
                    }
                    out = out.add(&term);
                }
                Ok(out)
            }
        }
    }

    /// Render as `Pol(f#(x1,x2)) = x1 + 1` lines, in symbol order.
    pub fn lines(&self) -> Vec<String> {
        self.map
            .iter()
            .map(|((s, a), p)| {
                let mark = if *a { "#" } else { "" };
                let args: Vec<String> = (1..=s.arity()).map(|i| format!("x{i}")).collect();
                if args.is_empty() {
                    format!("Pol({s}{mark}) = {p}")
                } else {
                    format!("Pol({s}{mark}({})) = {p}", args.join(","))
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ValueMode {
    Plain,
    AnnotatedSum,
}

/// `Σ p_j · Pol(♭ r_j)` or `Σ p_j · Σ_{t ⊴_# r_j} Pol(t#)`.
pub fn expected_value(mu: &MultiDistribution, pol: &Interpretation, mode: ValueMode) -> Result<Polynomial, PolyError> {
    let mut out = Polynomial::zero();
    for (p, r) in mu.entries() {
        let v = match mode {
            ValueMode::Plain => pol.interpret(&r.flatten())?,
            ValueMode::AnnotatedSum => annotated_sum(r, pol)?,
        };
        out = out.add(&v.scale(p));
    }
    Ok(out)
}

/// `Σ_{t ⊴_# r} Pol(t#)`.
pub fn annotated_sum(r: &Term, pol: &Interpretation) -> Result<Polynomial, PolyError> {
    let mut out = Polynomial::zero();
    for (_, t) in r.annotated_subterms() {
        out = out.add(&pol.interpret(&t.annotate_root())?);
    }
    Ok(out)
}

/// Every coefficient of `p − q` is non-negative.
pub fn check_geq(p: &Polynomial, q: &Polynomial) -> bool {
    p.sub(q).terms().all(|(_, c)| !c.is_negative())
}

/// `check_geq` and the constant part of `p − q` is at least 1.
pub fn check_gt(p: &Polynomial, q: &Polynomial) -> bool {
    let d = p.sub(q);
    d.terms().all(|(_, c)| !c.is_negative()) && d.constant_part() >= BigRational::one()
}
