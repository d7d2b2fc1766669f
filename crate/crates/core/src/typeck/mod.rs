//! Bidirectional type and effect checking.
//!
//! Every value gets a type and every term a type plus an effect: an index
//! bounding the width of the circuit the term builds. Linear variables and
//! labels are tracked through a consumption log, so the resources a subterm
//! used can be read off after checking it. Index side conditions from
//! subtyping and folds are handed to the [`Solver`] and recorded as
//! [`Obligation`]s.

mod report;
mod subtype;

use std::collections::{BTreeMap, BTreeSet};

use crate::circuit::{check_bundle, Label, LabelContext};
use crate::index::{normalize, Index, IndexCtx, Relation, Solver, Verdict};
use crate::syntax::{BundleType, DefBody, Prim, Program, Span, Term, Type, Value, WireKind};

pub use report::{CheckReport, DefReport, ObligationReport};
pub use subtype::{subtype_constraints, Constraint};

/// How `Unknown` verdicts are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Unknown obligations are errors.
    #[default]
    Strict,
    /// Unknown obligations are reported and accepted.
    Permissive,
}

/// A decided index side condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Obligation {
    pub ctx: IndexCtx,
    pub relation: Relation,
    pub lhs: Index,
    pub rhs: Index,
    pub verdict: Verdict,
    /// Rule that produced it.
    pub rule: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{}:{}: {}[{rule}] {message}", span.line, span.col, def.as_ref().map(|d| format!("in `{d}`: ")).unwrap_or_default())]
pub struct TypeError {
    pub rule: String,
    pub message: String,
    pub def: Option<String>,
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Type(#[from] TypeError),
    /// A refuted obligation, or an undecided one in strict mode.
    #[error("{}:{}: in `{def}`: obligation {ctx} |- {lhs} {relation} {rhs} is {verdict} [{rule}]",
        span.line, span.col, ctx = obligation.ctx, lhs = obligation.lhs, relation = obligation.relation,
        rhs = obligation.rhs, verdict = obligation.verdict, rule = obligation.rule)]
    Obligation { def: String, span: Span, obligation: Box<Obligation> },
}

type R<T> = Result<T, CheckError>;

/// Result of checking one definition or `main`.
#[derive(Debug, Clone)]
pub struct CheckedDef {
    pub name: String,
    /// Declared signature when there is one, otherwise the synthesized type.
    pub ty: Type,
    /// Normalized synthesized type.
    pub synthesized: Type,
    /// Effect of a term definition; 0 for values.
    pub effect: Index,
    pub obligations: Vec<Obligation>,
}

#[derive(Debug, Clone)]
pub struct CheckedProgram {
    pub index_params: Vec<String>,
    pub defs: Vec<CheckedDef>,
    pub main: Option<CheckedDef>,
}

impl CheckedProgram {
    pub fn def(&self, name: &str) -> Option<&CheckedDef> {
        self.defs.iter().find(|d| d.name == name).or(self.main.as_ref().filter(|m| m.name == name))
    }

    pub fn obligations(&self) -> impl Iterator<Item = &Obligation> {
        self.defs.iter().chain(self.main.iter()).flat_map(|d| d.obligations.iter())
    }
}

/// Wire count of a type: the number of wires a value of the type holds.
pub fn wire_count(t: &Type) -> Index {
    match t {
        Type::Unit | Type::Nat | Type::Bang(_) | Type::Circ(..) => Index::zero(),
        Type::Wire(_) => Index::Const(1),
        Type::Tensor(a, b) => add(wire_count(a), wire_count(b)),
        Type::List(i, a) => match wire_count(a) {
            Index::Const(0) => Index::zero(),
            Index::Const(1) => i.clone(),
            w => Index::times(i.clone(), w),
        },
        Type::Arrow { capture, .. } => capture.clone(),
    }
}

fn add(a: Index, b: Index) -> Index {
    match (a, b) {
        (Index::Const(0), x) | (x, Index::Const(0)) => x,
        (Index::Const(x), Index::Const(y)) if x.checked_add(y).is_some() => Index::Const(x + y),
        (x, y) => Index::plus(x, y),
    }
}

/// Type of the rotation-gate constructor.
pub fn make_rgate_type() -> Type {
    let qq =
        BundleType::Tensor(Box::new(BundleType::Wire(WireKind::Qubit)), Box::new(BundleType::Wire(WireKind::Qubit)));
    Type::arrow(Type::Nat, Type::Circ(Index::Const(2), qq.clone(), qq), Index::zero(), Index::zero())
}

#[derive(Debug, Clone)]
struct Binding {
    name: String,
    ty: Type,
    id: usize,
    linear: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Resource {
    Var(usize),
    Label(Label),
}

/// Types of earlier definitions, by name: parameters and type.
type DefTypes = BTreeMap<String, (Vec<String>, Option<Type>)>;

struct Checker<'a> {
    solver: &'a Solver,
    defs: &'a DefTypes,
    phi: IndexCtx,
    vars: Vec<Binding>,
    types: Vec<Type>,
    used: BTreeSet<usize>,
    labels: LabelContext,
    used_labels: BTreeSet<Label>,
    consumed: Vec<Resource>,
    obligations: Vec<Obligation>,
    def: Option<String>,
    span: Span,
}

impl<'a> Checker<'a> {
    fn new(solver: &'a Solver, defs: &'a DefTypes, phi: IndexCtx) -> Self {
        Checker {
            solver,
            defs,
            phi,
            vars: Vec::new(),
            types: Vec::new(),
            used: BTreeSet::new(),
            labels: LabelContext::new(),
            used_labels: BTreeSet::new(),
            consumed: Vec::new(),
            obligations: Vec::new(),
            def: None,
            span: Span::default(),
        }
    }

    fn err<T>(&self, rule: &str, message: impl Into<String>) -> R<T> {
        Err(CheckError::Type(TypeError {
            rule: rule.to_string(),
            message: message.into(),
            def: self.def.clone(),
            span: self.span,
        }))
    }

    // ---- resources ----

    fn bind(&mut self, name: &str, ty: Type) -> usize {
        let id = self.types.len();
        self.types.push(ty.clone());
        let linear = !ty.is_param();
        self.vars.push(Binding { name: name.to_string(), ty, id, linear });
        id
    }

    fn unbind(&mut self, rule: &str) -> R<()> {
        let b = self.vars.pop().expect("balanced binders");
        if b.linear && !self.used.contains(&b.id) {
            return self.err(rule, format!("linear variable `{}` of type `{}` is never used", b.name, b.ty));
        }
        Ok(())
    }

    fn use_var(&mut self, x: &str) -> R<Type> {
        let Some(b) = self.vars.iter().rev().find(|b| b.name == x).cloned() else {
            return self.err("var", format!("unbound variable `{x}`"));
        };
        if b.linear {
            if !self.used.insert(b.id) {
                return self.err("var", format!("linear variable `{x}` is used more than once"));
            }
            self.consumed.push(Resource::Var(b.id));
        }
        Ok(b.ty)
    }

    fn use_label(&mut self, l: Label) -> R<Type> {
        let Some(k) = self.labels.get(l) else {
            return self.err("label", format!("label `{l}` is not available"));
        };
        if !self.used_labels.insert(l) {
            return self.err("label", format!("label `{l}` is used more than once"));
        }
        self.consumed.push(Resource::Label(l));
        Ok(Type::Wire(k))
    }

    /// Wire count of the resources consumed since `mark` that were bound
    /// before variable `first_local`; later bindings are internal.
    fn consumed_since(&self, mark: usize, first_local: usize) -> Index {
        self.consumed[mark..].iter().fold(Index::zero(), |acc, r| match r {
            Resource::Var(id) if *id >= first_local => acc,
            Resource::Var(id) => add(acc, wire_count(&self.types[*id])),
            Resource::Label(_) => add(acc, Index::Const(1)),
        })
    }

    /// Runs `f` and fails if it consumed any linear resource.
    fn no_linear<T>(&mut self, rule: &str, f: impl FnOnce(&mut Self) -> R<T>) -> R<T> {
        let (mark, first) = (self.consumed.len(), self.types.len());
        let out = f(self)?;
        let outer = self.consumed[mark..].iter().find(|r| match r {
            Resource::Var(id) => *id < first,
            Resource::Label(_) => true,
        });
        if let Some(r) = outer {
            let what = match r {
                Resource::Var(id) => {
                    let name = self.vars.iter().find(|b| b.id == *id).map(|b| b.name.clone()).unwrap_or_default();
                    format!("linear variable `{name}`")
                }
                Resource::Label(l) => format!("label `{l}`"),
            };
            return self.err(rule, format!("{what} cannot be used here: only parameters may be captured"));
        }
        Ok(out)
    }

    // ---- obligations ----

    fn oblige(&mut self, rule: &str, relation: Relation, lhs: &Index, rhs: &Index) -> R<()> {
        let (nl, nr) = (normalize(lhs), normalize(rhs));
        if nl == nr || (relation == Relation::Leq && nl == Index::zero()) {
            return Ok(());
        }
        self.record(rule, relation, lhs, rhs)
    }

    /// Decides and records an obligation, even a syntactically trivial one.
    fn record(&mut self, rule: &str, relation: Relation, lhs: &Index, rhs: &Index) -> R<()> {
        let verdict = match self.solver.check(&self.phi, relation, lhs, rhs) {
            Ok(v) => v,
            Err(e) => return self.err(rule, e.to_string()),
        };
        let ob = Obligation {
            ctx: self.phi.clone(),
            relation,
            lhs: lhs.clone(),
            rhs: rhs.clone(),
            verdict: verdict.clone(),
            rule: rule.to_string(),
        };
        self.obligations.push(ob.clone());
        if verdict.is_refuted() {
            return Err(CheckError::Obligation {
                def: self.def.clone().unwrap_or_default(),
                span: self.span,
                obligation: Box::new(ob),
            });
        }
        Ok(())
    }

    fn subtype(&mut self, rule: &str, a: &Type, b: &Type) -> R<()> {
        match subtype_constraints(a, b) {
            Ok(cs) => {
                for c in cs {
                    self.oblige(rule, c.relation, &c.lhs, &c.rhs)?;
                }
                Ok(())
            }
            Err(m) => self.err(rule, m),
        }
    }

    /// Subtyping that only succeeds when every side condition is valid, and
    /// leaves no trace.
    fn try_subtype(&self, a: &Type, b: &Type) -> bool {
        match subtype_constraints(a, b) {
            Ok(cs) => cs.iter().all(|c| {
                normalize(&c.lhs) == normalize(&c.rhs)
                    || matches!(self.solver.check(&self.phi, c.relation, &c.lhs, &c.rhs), Ok(Verdict::Valid))
            }),
            Err(_) => false,
        }
    }

    // ---- values ----

    fn check_value(&mut self, v: &Value, expected: &Type, rule: &str) -> R<()> {
        let t = self.infer_value(v, Some(expected))?;
        self.subtype(rule, &t, expected)
    }

    fn infer_value(&mut self, v: &Value, hint: Option<&Type>) -> R<Type> {
        match v {
            Value::Unit => Ok(Type::Unit),
            Value::Nat(_) => Ok(Type::Nat),
            Value::Var(x) => self.use_var(x),
            Value::Label(l) => self.use_label(*l),
            Value::Lambda(x, a, m) => {
                let cod_hint = match hint {
                    Some(Type::Arrow { cod, .. }) => Some((**cod).clone()),
                    _ => None,
                };
                let mark = self.consumed.len();
                let id = self.bind(x, a.clone());
                let (b, width) = self.infer_term(m, cod_hint.as_ref())?;
                self.unbind("abs")?;
                let capture = self.consumed_since(mark, id);
                Ok(Type::arrow(a.clone(), b, normalize(&width), normalize(&capture)))
            }
            Value::Lift(m) => {
                let inner = match hint {
                    Some(Type::Bang(a)) => Some((**a).clone()),
                    _ => None,
                };
                let (a, eff) = self.no_linear("lift", |s| s.infer_term(m, inner.as_ref()))?;
                self.oblige("lift", Relation::Leq, &eff, &Index::zero())?;
                Ok(Type::bang(a))
            }
            Value::Boxed(b) => {
                let (t, u) = match b.interface() {
                    Ok(iface) => iface,
                    Err(e) => return self.err("circ", format!("ill-formed boxed circuit: {e}")),
                };
                let (mut t, mut u) = (t, u);
                if let Some(Type::Circ(_, t2, u2)) = hint {
                    if check_bundle(b.circuit.input(), &b.input, t2).is_ok() {
                        t = t2.clone();
                    }
                    if check_bundle(b.circuit.outputs(), &b.output, u2).is_ok() {
                        u = u2.clone();
                    }
                }
                Ok(Type::Circ(Index::Const(b.circuit.width()), t, u))
            }
            Value::Pair(a, b) => {
                let (ha, hb) = match hint {
                    Some(Type::Tensor(x, y)) => (Some(&**x), Some(&**y)),
                    _ => (None, None),
                };
                let ta = self.infer_value(a, ha)?;
                let tb = self.infer_value(b, hb)?;
                Ok(Type::tensor(ta, tb))
            }
            Value::Nil => match hint {
                Some(Type::List(_, a)) => Ok(Type::list(Index::zero(), (**a).clone())),
                _ => self.err("nil", "cannot infer the element type of `[]`; add a type ascription"),
            },
            Value::Cons(h, t) => self.infer_cons(h, t, hint),
            Value::Fold(i, step, base) => self.infer_fold(i, step, base, hint),
            Value::Ref { name, indices } => {
                let Some((params, ty)) = self.defs.get(name) else {
                    return self.err("ref", format!("unknown definition `{name}`"));
                };
                let Some(ty) = ty else {
                    return self.err("ref", format!("`{name}` is a term definition and cannot be referenced"));
                };
                if params.len() != indices.len() {
                    return self.err("ref", format!("`{name}` expects {} index argument(s)", params.len()));
                }
                let def = crate::syntax::Def {
                    name: name.clone(),
                    params: params.clone(),
                    sig: Some(ty.clone()),
                    body: DefBody::Value(Value::Unit),
                    span: Span::default(),
                };
                let (_, ty) = crate::syntax::instantiate(&def, indices);
                Ok(ty.expect("signature kept"))
            }
            Value::Ascribe(w, t) => {
                self.check_value(w, t, "ascribe")?;
                Ok(t.clone())
            }
            Value::Prim(Prim::MakeRGate) => Ok(make_rgate_type()),
        }
    }

    fn infer_cons(&mut self, h: &Value, t: &Value, hint: Option<&Type>) -> R<Type> {
        if let Some(Type::List(len, a)) = hint {
            self.check_value(h, a, "cons")?;
            let tail_hint = Type::list(Index::monus(len.clone(), Index::Const(1)), (**a).clone());
            let tt = self.infer_value(t, Some(&tail_hint))?;
            let Type::List(n, at) = tt else {
                return self.err("cons", format!("the tail of a list has type `{tt}`"));
            };
            self.subtype("cons", &at, a)?;
            return Ok(Type::list(add(n, Index::Const(1)), (**a).clone()));
        }
        let th = self.infer_value(h, None)?;
        let tail_hint = Type::list(Index::zero(), th.clone());
        let tt = self.infer_value(t, Some(&tail_hint))?;
        let Type::List(n, at) = tt else {
            return self.err("cons", format!("the tail of a list has type `{tt}`"));
        };
        let elem = if self.try_subtype(&th, &at) {
            (*at).clone()
        } else if self.try_subtype(&at, &th) {
            th
        } else {
            return self.err("cons", format!("list head of type `{th}` does not fit a tail of `{at}`"));
        };
        Ok(Type::list(add(n, Index::Const(1)), elem))
    }

    fn infer_fold(&mut self, i: &str, step: &Value, base: &Value, hint: Option<&Type>) -> R<Type> {
        let Some(Type::Arrow { dom, .. }) = hint else {
            return self
                .err("fold", "the length of the folded list is unknown; apply the fold to a list or ascribe it");
        };
        let Type::List(len, _) = &**dom else {
            return self.err("fold", format!("a fold consumes a list, not `{dom}`"));
        };
        let len = len.clone();
        let (i, step) = if self.phi.contains(i) || len.occurs_free(i) {
            let mut avoid: BTreeSet<String> = self.phi.vars().iter().cloned().collect();
            len.all_names(&mut avoid);
            step.for_each_index(&mut |x| x.all_names(&mut avoid));
            let fresh = crate::index::fresh_name(i, &avoid);
            let step = step.subst_index(i, &Index::var(fresh.clone()));
            (fresh, step)
        } else {
            (i.to_string(), step.clone())
        };
        self.phi.push(i.clone());
        let st = self.no_linear("fold", |s| s.infer_value(&step, None));
        let st = match st {
            Ok(t) => t,
            Err(e) => {
                self.phi.pop();
                return Err(e);
            }
        };
        let parts = match &st {
            Type::Bang(inner) => match &**inner {
                Type::Arrow { dom, cod, width, .. } => match &**dom {
                    Type::Tensor(b, a) => Some(((**b).clone(), (**a).clone(), (**cod).clone(), width.clone())),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        };
        let Some((b, a, cod, step_width)) = parts else {
            self.phi.pop();
            return self.err("fold", format!("a fold step must have type `!((B * A) -o[J,K] B')`, found `{st}`"));
        };
        let next = Index::plus(Index::var(i.clone()), Index::Const(1));
        let res = self.subtype("fold", &cod, &b.subst_index(&i, &next));
        self.phi.pop();
        res?;
        if a.free_index_vars().contains(&i) {
            return self.err("fold", format!("the element type `{a}` may not depend on `{i}`"));
        }
        let (mark, first) = (self.consumed.len(), self.types.len());
        self.check_value(base, &b.subst_index(&i, &Index::zero()), "fold")?;
        let capture = normalize(&self.consumed_since(mark, first));
        let per_step = Index::plus(
            step_width,
            Index::times(
                Index::monus(Index::monus(len.clone(), Index::Const(1)), Index::var(i.clone())),
                wire_count(&a),
            ),
        );
        let raw = Index::max(capture.clone(), Index::bounded_max(i.clone(), len.clone(), per_step));
        let effect = normalize(&raw);
        if effect != raw {
            self.record("fold", Relation::Eq, &raw, &effect)?;
        }
        Ok(Type::arrow(Type::list(len.clone(), a), b.subst_index(&i, &len), effect, capture))
    }

    // ---- terms ----

    fn infer_term(&mut self, m: &Term, hint: Option<&Type>) -> R<(Type, Index)> {
        match m {
            Term::Return(v) => {
                let (mark, first) = (self.consumed.len(), self.types.len());
                let t = self.infer_value(v, hint)?;
                Ok((t, normalize(&self.consumed_since(mark, first))))
            }
            Term::App(f, a) => {
                let (tf, ta) = if matches!(f, Value::Fold(..)) {
                    let ta = self.infer_value(a, None)?;
                    let cod = hint.cloned().unwrap_or(Type::Unit);
                    let fake = Type::arrow(ta.clone(), cod, Index::zero(), Index::zero());
                    (self.infer_value(f, Some(&fake))?, Some(ta))
                } else {
                    (self.infer_value(f, None)?, None)
                };
                let Type::Arrow { dom, cod, width, .. } = tf else {
                    return self.err("app", format!("applied value has type `{tf}`, which is not a function"));
                };
                match ta {
                    Some(ta) => self.subtype("app", &ta, &dom)?,
                    None => self.check_value(a, &dom, "app")?,
                }
                Ok((*cod, width))
            }
            Term::Apply(c, w) => {
                let tc = self.infer_value(c, None)?;
                let Type::Circ(i, t, u) = tc else {
                    return self.err("apply", format!("`apply` needs a circuit, found `{tc}`"));
                };
                self.check_value(w, &t.to_type(), "apply")?;
                Ok((u.to_type(), i))
            }
            Term::Box(t, v) => {
                let cod = match hint {
                    Some(Type::Circ(_, _, u)) => u.to_type(),
                    _ => Type::Unit,
                };
                let h = Type::bang(Type::arrow(t.to_type(), cod, Index::zero(), Index::zero()));
                let tv = self.no_linear("box", |s| s.infer_value(v, Some(&h)))?;
                let Type::Bang(inner) = &tv else {
                    return self.err("box", format!("`box` needs a lifted function, found `{tv}`"));
                };
                let Type::Arrow { dom, cod, width, .. } = &**inner else {
                    return self.err("box", format!("`box` needs a lifted function, found `{tv}`"));
                };
                self.subtype("box", &t.to_type(), dom)?;
                let Some(u) = cod.as_bundle() else {
                    return self.err("box", format!("boxed function returns `{cod}`, which is not a bundle type"));
                };
                Ok((Type::Circ(width.clone(), t.clone(), u), Index::zero()))
            }
            Term::Force(v) => {
                let h = hint.map(|t| Type::bang(t.clone()));
                let tv = self.infer_value(v, h.as_ref())?;
                let Type::Bang(a) = tv else {
                    return self.err("force", format!("`force` needs a lifted value, found `{tv}`"));
                };
                Ok((*a, Index::zero()))
            }
            Term::Let(x, m, n) => {
                let (a, i) = self.infer_term(m, None)?;
                let id = self.bind(x, a);
                let mark = self.consumed.len();
                let (c, j) = self.infer_term(n, hint)?;
                self.unbind("let")?;
                let rest = self.consumed_since(mark, id);
                Ok((c, normalize(&Index::max(add(i, rest), j))))
            }
            Term::Dest(x, y, v, m) => {
                let tv = self.infer_value(v, None)?;
                let Type::Tensor(a, b) = tv else {
                    return self.err("dest", format!("only pairs can be destructured, found `{tv}`"));
                };
                self.bind(x, *a);
                self.bind(y, *b);
                let out = self.infer_term(m, hint)?;
                self.unbind("dest")?;
                self.unbind("dest")?;
                Ok(out)
            }
            Term::NatOp(_, a, b) => {
                self.check_value(a, &Type::Nat, "natop")?;
                self.check_value(b, &Type::Nat, "natop")?;
                Ok((Type::Nat, Index::zero()))
            }
        }
    }
}

fn base_ctx(names: &[String]) -> IndexCtx {
    IndexCtx::from_names(names.iter().cloned())
}

/// Checks every definition and `main`.
pub fn check_program(prog: &Program, solver: &Solver, mode: Mode) -> Result<CheckedProgram, CheckError> {
    let mut types: DefTypes = BTreeMap::new();
    let mut out = CheckedProgram { index_params: prog.index_params.clone(), defs: Vec::new(), main: None };
    for d in &prog.defs {
        let mut phi = base_ctx(&prog.index_params);
        for p in &d.params {
            phi.push(p.clone());
        }
        let mut ck = Checker::new(solver, &types, phi);
        ck.def = Some(d.name.clone());
        ck.span = d.span;
        let (synth, effect) = match &d.body {
            DefBody::Value(v) => (ck.infer_value(v, d.sig.as_ref())?, Index::zero()),
            DefBody::Term(t) => ck.infer_term(t, d.sig.as_ref())?,
        };
        if let Some(sig) = &d.sig {
            ck.subtype("sig", &synth, sig)?;
        }
        let synthesized = synth.normalized();
        let ty = d.sig.clone().unwrap_or_else(|| synthesized.clone());
        let checked = CheckedDef {
            name: d.name.clone(),
            ty: ty.clone(),
            synthesized,
            effect: normalize(&effect),
            obligations: ck.obligations,
        };
        strict_gate(mode, &checked, d.span)?;
        let ref_ty = matches!(d.body, DefBody::Value(_)).then_some(ty);
        types.insert(d.name.clone(), (d.params.clone(), ref_ty));
        out.defs.push(checked);
    }
    if let Some(m) = &prog.main {
        let mut ck = Checker::new(solver, &types, base_ctx(&prog.index_params));
        ck.def = Some("main".into());
        ck.span = prog.main_span;
        let (t, e) = ck.infer_term(m, None)?;
        let t = t.normalized();
        let checked = CheckedDef {
            name: "main".into(),
            ty: t.clone(),
            synthesized: t,
            effect: normalize(&e),
            obligations: ck.obligations,
        };
        strict_gate(mode, &checked, prog.main_span)?;
        out.main = Some(checked);
    }
    Ok(out)
}

fn strict_gate(mode: Mode, d: &CheckedDef, span: Span) -> R<()> {
    if mode == Mode::Strict {
        if let Some(ob) = d.obligations.iter().find(|o| matches!(o.verdict, Verdict::Unknown(_))) {
            return Err(CheckError::Obligation { def: d.name.clone(), span, obligation: Box::new(ob.clone()) });
        }
    }
    Ok(())
}

/// Checks a closed value against a type where the labels of `q` are the
/// only linear resources, each of which must be used exactly once.
pub fn check_closed_value(
    v: &Value,
    ty: &Type,
    q: &LabelContext,
    solver: &Solver,
) -> Result<Vec<Obligation>, CheckError> {
    let defs = DefTypes::new();
    let mut ck = Checker::new(solver, &defs, IndexCtx::new());
    ck.def = Some("result".into());
    ck.labels = q.clone();
    ck.check_value(v, ty, "result")?;
    if let Some(l) = q.labels().into_iter().find(|l| !ck.used_labels.contains(l)) {
        return ck.err("result", format!("label `{l}` is never used"));
    }
    if let Some(ob) = ck.obligations.iter().find(|o| !o.verdict.is_valid()) {
        return Err(CheckError::Obligation {
            def: "result".into(),
            span: Span::default(),
            obligation: Box::new(ob.clone()),
        });
    }
    Ok(ck.obligations)
}

/// Synthesizes the type of a closed term with no free resources.
pub fn infer_closed_term(m: &Term, solver: &Solver) -> Result<(Type, Index), CheckError> {
    let defs = DefTypes::new();
    let mut ck = Checker::new(solver, &defs, IndexCtx::new());
    let (t, e) = ck.infer_term(m, None)?;
    Ok((t.normalized(), normalize(&e)))
}

/// The subtyping judgment as a stand-alone verdict: `Valid` when every side
/// condition is valid, the first non-valid verdict otherwise. Shape
/// mismatches are errors.
pub fn check_subtype(ctx: &IndexCtx, a: &Type, b: &Type, solver: &Solver) -> Result<Verdict, String> {
    for c in subtype_constraints(a, b)? {
        let v = solver.check(ctx, c.relation, &c.lhs, &c.rhs).map_err(|e| e.to_string())?;
        if !v.is_valid() {
            return Ok(v);
        }
    }
    Ok(Verdict::Valid)
}
