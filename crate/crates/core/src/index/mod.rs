//! Index terms: natural-number arithmetic over index variables.
//!
//! Indices decorate types with sizes and width bounds. This module holds the
//! syntax, its semantics over naturals, substitution and the decision layer
//! for `I <= J` / `I = J` judgments.

mod normalize;
mod poly;
mod solver;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use normalize::normalize;
pub use solver::{check_eq, check_leq, ExternalSolver, Relation, Solver, Verdict, DEFAULT_BUDGET};

/// Hard cap on the number of iterations a single bounded maximum may take
/// during interpretation.
pub const MAX_RANGE: u64 = 1 << 22;

/// An index term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Index {
    Const(u64),
    Var(String),
    Plus(Box<Index>, Box<Index>),
    /// Truncated subtraction.
    Monus(Box<Index>, Box<Index>),
    Times(Box<Index>, Box<Index>),
    Max(Box<Index>, Box<Index>),
    /// `max[binder < bound] body`; the empty maximum is 0.
    BoundedMax(String, Box<Index>, Box<Index>),
}

/// Assignment of naturals to index variables.
pub type Env = BTreeMap<String, u64>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("unbound index variable `{0}`")]
    Unbound(String),
    #[error("arithmetic overflow while interpreting index")]
    Overflow,
    #[error("bounded maximum over {0} elements exceeds the interpretation limit")]
    RangeTooLarge(u64),
    #[error("index `{index}` is not well formed: `{var}` is not in scope")]
    IllFormed { index: String, var: String },
}

impl Index {
    pub fn var(name: impl Into<String>) -> Index {
        Index::Var(name.into())
    }

    pub fn plus(a: Index, b: Index) -> Index {
        Index::Plus(Box::new(a), Box::new(b))
    }

    pub fn monus(a: Index, b: Index) -> Index {
        Index::Monus(Box::new(a), Box::new(b))
    }

    pub fn times(a: Index, b: Index) -> Index {
        Index::Times(Box::new(a), Box::new(b))
    }

    pub fn max(a: Index, b: Index) -> Index {
        Index::Max(Box::new(a), Box::new(b))
    }

    pub fn bounded_max(binder: impl Into<String>, bound: Index, body: Index) -> Index {
        Index::BoundedMax(binder.into(), Box::new(bound), Box::new(body))
    }

    pub fn zero() -> Index {
        Index::Const(0)
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Variables occurring free; a bounded maximum's binder is excluded
    /// within its body but not within its bound.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Index::Const(_) => {}
            Index::Var(v) => {
                if !bound.contains(&v.as_str()) {
                    out.insert(v.clone());
                }
            }
            Index::Plus(a, b) | Index::Monus(a, b) | Index::Times(a, b) | Index::Max(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Index::BoundedMax(x, bnd, body) => {
                bnd.collect_free(bound, out);
                bound.push(x);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn occurs_free(&self, name: &str) -> bool {
        match self {
            Index::Const(_) => false,
            Index::Var(v) => v == name,
            Index::Plus(a, b) | Index::Monus(a, b) | Index::Times(a, b) | Index::Max(a, b) => {
                a.occurs_free(name) || b.occurs_free(name)
            }
            Index::BoundedMax(x, bnd, body) => bnd.occurs_free(name) || (x != name && body.occurs_free(name)),
        }
    }

    /// All variable names mentioned, free or bound.
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Index::Const(_) => {}
            Index::Var(v) => {
                out.insert(v.clone());
            }
            Index::Plus(a, b) | Index::Monus(a, b) | Index::Times(a, b) | Index::Max(a, b) => {
                a.all_names(out);
                b.all_names(out);
            }
            Index::BoundedMax(x, bnd, body) => {
                out.insert(x.clone());
                bnd.all_names(out);
                body.all_names(out);
            }
        }
    }

    /// Evaluates the index under `env`. Overflow is an error, never a wrap.
    pub fn eval(&self, env: &Env) -> Result<u64, IndexError> {
        match self {
            Index::Const(n) => Ok(*n),
            Index::Var(v) => env.get(v).copied().ok_or_else(|| IndexError::Unbound(v.clone())),
            Index::Plus(a, b) => a.eval(env)?.checked_add(b.eval(env)?).ok_or(IndexError::Overflow),
            Index::Monus(a, b) => Ok(a.eval(env)?.saturating_sub(b.eval(env)?)),
            Index::Times(a, b) => {
                let x = a.eval(env)?;
                if x == 0 {
                    // still evaluate b so unbound variables surface
                    b.eval(env)?;
                    return Ok(0);
                }
                x.checked_mul(b.eval(env)?).ok_or(IndexError::Overflow)
            }
            Index::Max(a, b) => Ok(a.eval(env)?.max(b.eval(env)?)),
            Index::BoundedMax(x, bnd, body) => {
                let n = bnd.eval(env)?;
                if n > MAX_RANGE {
                    return Err(IndexError::RangeTooLarge(n));
                }
                let mut inner = env.clone();
                let mut best = 0;
                for k in 0..n {
                    inner.insert(x.clone(), k);
                    best = best.max(body.eval(&inner)?);
                }
                Ok(best)
            }
        }
    }

    /// Capture-avoiding substitution of `repl` for the free variable `var`.
    pub fn subst(&self, var: &str, repl: &Index) -> Index {
        if !self.occurs_free(var) {
            return self.clone();
        }
        match self {
            Index::Const(_) => self.clone(),
            Index::Var(v) => {
                if v == var {
                    repl.clone()
                } else {
                    self.clone()
                }
            }
            Index::Plus(a, b) => Index::plus(a.subst(var, repl), b.subst(var, repl)),
            Index::Monus(a, b) => Index::monus(a.subst(var, repl), b.subst(var, repl)),
            Index::Times(a, b) => Index::times(a.subst(var, repl), b.subst(var, repl)),
            Index::Max(a, b) => Index::max(a.subst(var, repl), b.subst(var, repl)),
            Index::BoundedMax(x, bnd, body) => {
                let bnd = bnd.subst(var, repl);
                if x == var {
                    return Index::BoundedMax(x.clone(), Box::new(bnd), body.clone());
                }
                let repl_fv = repl.free_vars();
                if repl_fv.contains(x) {
                    let mut avoid = repl_fv;
                    self.all_names(&mut avoid);
                    avoid.insert(var.to_string());
                    let fresh = fresh_name(x, &avoid);
                    let body = body.subst(x, &Index::Var(fresh.clone()));
                    Index::BoundedMax(fresh, Box::new(bnd), Box::new(body.subst(var, repl)))
                } else {
                    Index::BoundedMax(x.clone(), Box::new(bnd), Box::new(body.subst(var, repl)))
                }
            }
        }
    }

    /// Number of nodes; used to bound generated terms.
    pub fn size(&self) -> usize {
        match self {
            Index::Const(_) | Index::Var(_) => 1,
            Index::Plus(a, b) | Index::Monus(a, b) | Index::Times(a, b) | Index::Max(a, b) => 1 + a.size() + b.size(),
            Index::BoundedMax(_, a, b) => 1 + a.size() + b.size(),
        }
    }
}

impl From<u64> for Index {
    fn from(n: u64) -> Self {
        Index::Const(n)
    }
}

/// Returns `base` primed until it avoids every name in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while avoid.contains(&name) {
        name.push('\'');
    }
    name
}

/// An ordered set of distinct index variables in scope.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IndexCtx {
    vars: Vec<String>,
}

impl IndexCtx {
    pub fn new() -> Self {
        IndexCtx::default()
    }

    /// Builds a context, dropping repeated names.
    pub fn from_names<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut ctx = IndexCtx::new();
        for n in names {
            ctx.push(n);
        }
        ctx
    }

    /// Adds a variable; returns false if it was already present.
    pub fn push(&mut self, name: impl Into<String>) -> bool {
        let name = name.into();
        if self.contains(&name) {
            false
        } else {
            self.vars.push(name);
            true
        }
    }

    pub fn pop(&mut self) -> Option<String> {
        self.vars.pop()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v == name)
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn with(&self, name: impl Into<String>) -> IndexCtx {
        let mut c = self.clone();
        c.push(name);
        c
    }
}

impl fmt::Display for IndexCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.vars.join(", "))
    }
}

pub fn free_vars(i: &Index) -> BTreeSet<String> {
    i.free_vars()
}

pub fn well_formed(ctx: &IndexCtx, i: &Index) -> bool {
    i.free_vars().iter().all(|v| ctx.contains(v))
}

/// Interprets `i` under `env`, first checking it is well formed in `ctx`.
pub fn interpret(ctx: &IndexCtx, i: &Index, env: &Env) -> Result<u64, IndexError> {
    if let Some(v) = i.free_vars().into_iter().find(|v| !ctx.contains(v)) {
        return Err(IndexError::IllFormed { index: i.to_string(), var: v });
    }
    i.eval(env)
}

pub fn subst_index(target: &Index, var: &str, repl: &Index) -> Index {
    target.subst(var, repl)
}

// Printing. Sums and products are left-associative; a bounded maximum is
// wrapped whenever it is an operand, since its body extends to the right.

const PREC_SUM: u8 = 1;
const PREC_PROD: u8 = 2;

impl Index {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            Index::Const(n) => write!(f, "{n}"),
            Index::Var(v) => write!(f, "{v}"),
            Index::Plus(a, b) | Index::Monus(a, b) => {
                let op = if matches!(self, Index::Plus(..)) { "+" } else { "-" };
                let paren = prec > PREC_SUM;
                if paren {
                    write!(f, "(")?;
                }
                a.fmt_operand(f, PREC_SUM)?;
                write!(f, " {op} ")?;
                b.fmt_operand(f, PREC_PROD)?;
                if paren {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Index::Times(a, b) => {
                let paren = prec > PREC_PROD;
                if paren {
                    write!(f, "(")?;
                }
                a.fmt_operand(f, PREC_PROD)?;
                write!(f, "*")?;
                b.fmt_operand(f, PREC_PROD + 1)?;
                if paren {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Index::Max(a, b) => write!(f, "max({a}, {b})"),
            Index::BoundedMax(x, bnd, body) => write!(f, "max[{x} < {bnd}] {body}"),
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        if let Index::BoundedMax(..) = self {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            write!(f, ")")
        } else {
            self.fmt_prec(f, prec)
        }
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Index {
        Index::var(s)
    }
    fn c(n: u64) -> Index {
        Index::Const(n)
    }

    #[test]
    fn free_vars_respects_binder() {
        assert_eq!(v("i").free_vars(), BTreeSet::from(["i".to_string()]));
        let bm = Index::bounded_max("i", v("j"), Index::plus(v("i"), c(1)));
        assert_eq!(bm.free_vars(), BTreeSet::from(["j".to_string()]));
        assert!(c(5).free_vars().is_empty());
    }

    #[test]
    fn well_formedness() {
        let ctx = IndexCtx::from_names(["i"]);
        assert!(well_formed(&ctx, &Index::plus(v("i"), c(1))));
        assert!(!well_formed(&IndexCtx::new(), &v("i")));
        let bm = Index::bounded_max("j", v("i"), Index::times(v("j"), c(2)));
        assert!(well_formed(&ctx, &bm));
    }

    #[test]
    fn interpretation_cases() {
        let empty = IndexCtx::new();
        let env = Env::new();
        assert_eq!(interpret(&empty, &Index::monus(c(5), c(7)), &env), Ok(0));
        assert_eq!(interpret(&empty, &Index::max(c(2), c(3)), &env), Ok(3));
        let sq = Index::bounded_max("j", c(3), Index::times(v("j"), v("j")));
        // j ranges over 0, 1, 2
        let expected = (0..3u64).map(|j| j * j).max().unwrap();
        assert_eq!(interpret(&empty, &sq, &env), Ok(expected));
        let empty_range = Index::bounded_max("j", c(0), Index::plus(v("j"), c(9)));
        assert_eq!(interpret(&empty, &empty_range, &env), Ok(0));
    }

    #[test]
    fn interpretation_errors() {
        assert_eq!(v("k").eval(&Env::new()), Err(IndexError::Unbound("k".into())));
        let big = Index::times(c(u64::MAX), c(2));
        assert_eq!(big.eval(&Env::new()), Err(IndexError::Overflow));
        assert!(matches!(interpret(&IndexCtx::new(), &v("i"), &Env::new()), Err(IndexError::IllFormed { .. })));
    }

    #[test]
    fn substitution() {
        let t = Index::plus(v("i"), c(1));
        assert_eq!(t.subst("i", &c(3)), Index::plus(c(3), c(1)));
        let shadow = Index::bounded_max("i", c(2), v("i"));
        assert_eq!(shadow.subst("i", &c(5)), shadow);
        let capt = Index::bounded_max("j", v("i"), Index::plus(v("j"), v("k")));
        let out = capt.subst("k", &v("j"));
        assert_eq!(out, Index::bounded_max("j'", v("i"), Index::plus(v("j'"), v("j"))));
    }

    #[test]
    fn printing() {
        let t = Index::times(Index::plus(v("i"), c(1)), v("j"));
        assert_eq!(t.to_string(), "(i + 1)*j");
        let m = Index::monus(v("a"), Index::monus(v("b"), v("c")));
        assert_eq!(m.to_string(), "a - (b - c)");
        let bm = Index::plus(Index::bounded_max("j", v("i"), Index::plus(v("j"), c(1))), c(2));
        assert_eq!(bm.to_string(), "(max[j < i] j + 1) + 2");
    }
}
