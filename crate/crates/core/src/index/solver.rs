//! Three-valued decision layer for `I <= J` and `I = J` over all naturals.
//!
//! `Valid` is only returned when the judgment is established symbolically
//! (normal forms, dominance) or by evaluating a closed goal. Bounded search
//! can only refute. Everything else is `Unknown`.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::normalize::{normalize, to_poly};
use super::{Env, Index, IndexCtx, IndexError};

pub const DEFAULT_BUDGET: u64 = 8;

/// Upper limit on assignments tried by the counterexample search.
const SEARCH_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "detail")]
pub enum Verdict {
    Valid,
    /// A falsifying assignment for every context variable.
    Refuted(Env),
    /// Neither proved nor refuted with variables in `0..=budget`.
    Unknown(u64),
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Valid => write!(f, "Valid"),
            Verdict::Refuted(env) => {
                let parts: Vec<String> = env.iter().map(|(k, v)| format!("{k}={v}")).collect();
                write!(f, "Refuted({{{}}})", parts.join(", "))
            }
            Verdict::Unknown(b) => write!(f, "Unknown({b})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Leq,
    #[serde(rename = "=")]
    Eq,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Leq => write!(f, "<="),
            Relation::Eq => write!(f, "="),
        }
    }
}

/// Adapter for an external decision procedure. It receives the goal in the
/// concrete judgment syntax (`forall i j. I <= J`) and may answer `None`
/// when it cannot decide.
pub trait ExternalSolver: Send + Sync {
    fn solve(&self, goal: &str) -> Option<Verdict>;
}

#[derive(Clone)]
pub struct Solver {
    pub budget: u64,
    external: Option<Arc<dyn ExternalSolver>>,
}

impl fmt::Debug for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Solver").field("budget", &self.budget).field("external", &self.external.is_some()).finish()
    }
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new(DEFAULT_BUDGET)
    }
}

impl Solver {
    pub fn new(budget: u64) -> Self {
        Solver { budget, external: None }
    }

    /// Default budget, overridden by the `PQR_BUDGET` environment variable.
    pub fn from_env() -> Self {
        let budget = std::env::var("PQR_BUDGET").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(DEFAULT_BUDGET);
        Solver::new(budget)
    }

    pub fn with_external(mut self, ext: Arc<dyn ExternalSolver>) -> Self {
        self.external = Some(ext);
        self
    }

    pub fn check(&self, ctx: &IndexCtx, rel: Relation, lhs: &Index, rhs: &Index) -> Result<Verdict, IndexError> {
        match rel {
            Relation::Leq => self.check_leq(ctx, lhs, rhs),
            Relation::Eq => self.check_eq(ctx, lhs, rhs),
        }
    }

    pub fn check_leq(&self, ctx: &IndexCtx, lhs: &Index, rhs: &Index) -> Result<Verdict, IndexError> {
        self.decide(ctx, Relation::Leq, lhs, rhs)
    }

    pub fn check_eq(&self, ctx: &IndexCtx, lhs: &Index, rhs: &Index) -> Result<Verdict, IndexError> {
        self.decide(ctx, Relation::Eq, lhs, rhs)
    }

    fn decide(&self, ctx: &IndexCtx, rel: Relation, lhs: &Index, rhs: &Index) -> Result<Verdict, IndexError> {
        ensure_well_formed(ctx, lhs)?;
        ensure_well_formed(ctx, rhs)?;
        let nl = normalize(lhs);
        let nr = normalize(rhs);
        let proved = match rel {
            Relation::Leq => dominated(&nl, &nr),
            Relation::Eq => nl == nr || (dominated(&nl, &nr) && dominated(&nr, &nl)),
        };
        if proved {
            return Ok(Verdict::Valid);
        }
        if lhs.is_closed() && rhs.is_closed() {
            // any assignment falsifies a false closed goal; report all zeros
            let zeros: Env = ctx.vars().iter().map(|v| (v.clone(), 0)).collect();
            if let (Ok(a), Ok(b)) = (lhs.eval(&zeros), rhs.eval(&zeros)) {
                return Ok(if holds(rel, a, b) { Verdict::Valid } else { Verdict::Refuted(zeros) });
            }
        }
        if let Some(w) = self.search(ctx, rel, lhs, rhs) {
            return Ok(Verdict::Refuted(w));
        }
        if let Some(ext) = &self.external {
            let goal = format_goal(ctx, rel, lhs, rhs);
            match ext.solve(&goal) {
                Some(Verdict::Refuted(mut w)) => {
                    for v in ctx.vars() {
                        w.entry(v.clone()).or_insert(0);
                    }
                    if falsifies(rel, lhs, rhs, &w) {
                        return Ok(Verdict::Refuted(w));
                    }
                }
                Some(Verdict::Valid) => return Ok(Verdict::Valid),
                _ => {}
            }
        }
        Ok(Verdict::Unknown(self.budget))
    }

    /// Enumerates assignments with each variable in `0..=budget`, varying
    /// the first context variable fastest.
    fn search(&self, ctx: &IndexCtx, rel: Relation, lhs: &Index, rhs: &Index) -> Option<Env> {
        let mut fv = lhs.free_vars();
        fv.extend(rhs.free_vars());
        let vars: Vec<&String> = ctx.vars().iter().filter(|v| fv.contains(*v)).collect();
        let mut env: Env = ctx.vars().iter().map(|v| (v.clone(), 0)).collect();
        let mut digits = vec![0u64; vars.len()];
        let mut tried = 0u64;
        loop {
            for (v, d) in vars.iter().zip(&digits) {
                env.insert((*v).clone(), *d);
            }
            if falsifies(rel, lhs, rhs, &env) {
                return Some(env);
            }
            tried += 1;
            if tried >= SEARCH_LIMIT {
                return None;
            }
            let mut pos = 0;
            loop {
                if pos == digits.len() {
                    return None;
                }
                if digits[pos] < self.budget {
                    digits[pos] += 1;
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    }
}

pub fn check_leq(ctx: &IndexCtx, lhs: &Index, rhs: &Index, budget: u64) -> Result<Verdict, IndexError> {
    Solver::new(budget).check_leq(ctx, lhs, rhs)
}

pub fn check_eq(ctx: &IndexCtx, lhs: &Index, rhs: &Index, budget: u64) -> Result<Verdict, IndexError> {
    Solver::new(budget).check_eq(ctx, lhs, rhs)
}

fn ensure_well_formed(ctx: &IndexCtx, i: &Index) -> Result<(), IndexError> {
    match i.free_vars().into_iter().find(|v| !ctx.contains(v)) {
        Some(var) => Err(IndexError::IllFormed { index: i.to_string(), var }),
        None => Ok(()),
    }
}

fn holds(rel: Relation, a: u64, b: u64) -> bool {
    match rel {
        Relation::Leq => a <= b,
        Relation::Eq => a == b,
    }
}

fn falsifies(rel: Relation, lhs: &Index, rhs: &Index, env: &Env) -> bool {
    match (lhs.eval(env), rhs.eval(env)) {
        (Ok(a), Ok(b)) => !holds(rel, a, b),
        _ => false,
    }
}

fn format_goal(ctx: &IndexCtx, rel: Relation, lhs: &Index, rhs: &Index) -> String {
    if ctx.is_empty() {
        format!("{lhs} {rel} {rhs}")
    } else {
        format!("forall {}. {lhs} {rel} {rhs}", ctx.vars().join(" "))
    }
}

/// Sound syntactic test for `a <= b` on normalized indices.
fn dominated(a: &Index, b: &Index) -> bool {
    if a == b || *a == Index::Const(0) {
        return true;
    }
    if let (Some(pa), Some(pb)) = (to_poly(a), to_poly(b)) {
        if pb.sub(&pa).map(|d| d.is_nonneg()).unwrap_or(false) {
            return true;
        }
    }
    match (a, b) {
        (Index::Max(x, y), _) => dominated(x, b) && dominated(y, b),
        (_, Index::Max(x, y)) => dominated(a, x) || dominated(a, y),
        (Index::Monus(p, _), _) => dominated(p, b),
        (Index::BoundedMax(x, _, body), _) if !b.occurs_free(x) => dominated(body, b),
        _ => false,
    }
}
