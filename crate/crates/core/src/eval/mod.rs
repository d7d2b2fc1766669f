//! Big-step evaluation of terms into values, building a circuit as a side
//! effect.

use std::sync::Arc;

use serde::Serialize;

use crate::circuit::{
    append_boxed, freshlabels, rotation, BoxedCircuit, Circuit, CircuitError, LabelContext, LabelSupply,
};
use crate::index::{normalize, Env, IndexError, Solver};
use crate::syntax::{BundleType, Prim, Program, Term, Type, Value};
use crate::typeck::{check_closed_value, check_program, CheckError, CheckedProgram, Mode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("evaluation is stuck at rule `{rule}`: {message}")]
    Stuck { rule: &'static str, message: String },
    #[error("circuit error in rule `{rule}`: {source}")]
    Circuit { rule: &'static str, source: CircuitError },
    #[error("`{rule}` must not build circuit, but its body appended {ops} operation(s)")]
    CircuitChanged { rule: &'static str, ops: usize },
    #[error("natural number overflow in `{0}`")]
    Overflow(String),
    #[error(transparent)]
    Index(#[from] IndexError),
}

/// One evaluation step, reported to a tracer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceEvent {
    pub rule: &'static str,
    pub payload: String,
    /// Width of the ambient circuit after the step.
    pub width: u64,
}

/// Longest payload summary kept in a trace event.
const PAYLOAD_CHARS: usize = 60;

fn summarize(s: String) -> String {
    if s.chars().count() <= PAYLOAD_CHARS {
        s
    } else {
        let mut t: String = s.chars().take(PAYLOAD_CHARS - 3).collect();
        t.push_str("...");
        t
    }
}

pub struct Evaluator<'t> {
    pub supply: LabelSupply,
    tracer: Option<&'t mut dyn FnMut(&TraceEvent)>,
}

type E<T> = Result<T, EvalError>;

fn stuck<T>(rule: &'static str, message: impl Into<String>) -> E<T> {
    Err(EvalError::Stuck { rule, message: message.into() })
}

impl<'t> Evaluator<'t> {
    pub fn new(supply: LabelSupply) -> Self {
        Evaluator { supply, tracer: None }
    }

    pub fn with_tracer(mut self, tracer: &'t mut dyn FnMut(&TraceEvent)) -> Self {
        self.tracer = Some(tracer);
        self
    }

    fn emit(&mut self, rule: &'static str, c: &Circuit, payload: impl FnOnce() -> String) {
        if let Some(t) = self.tracer.as_mut() {
            t(&TraceEvent { rule, payload: summarize(payload()), width: c.width() });
        }
    }

    /// Evaluates `m` against the circuit `c`, extending it in place.
    pub fn eval(&mut self, c: &mut Circuit, m: &Term) -> E<Value> {
        match m {
            Term::Return(v) => {
                self.emit("return", c, || v.to_string());
                Ok(v.clone())
            }
            Term::App(f, a) => self.apply_fn(c, f, a),
            Term::Apply(f, a) => {
                let Value::Boxed(b) = f.strip() else {
                    return stuck("apply", format!("`{f}` is not a boxed circuit"));
                };
                let Some(at) = a.strip().to_bundle() else {
                    return stuck("apply", format!("`{a}` is not a wire bundle"));
                };
                let (next, out) = append_boxed(c, &at, b, &mut self.supply)
                    .map_err(|source| EvalError::Circuit { rule: "apply", source })?;
                *c = next;
                self.emit("apply", c, || {
                    b.gate.clone().unwrap_or_else(|| format!("circuit of {} op(s)", b.circuit.ops().len()))
                });
                Ok(Value::from_bundle(&out))
            }
            Term::Box(t, v) => {
                let Value::Lift(body) = v.strip() else {
                    return stuck("box", format!("`{v}` is not a lifted term"));
                };
                let t = t.map_indices(&mut normalize);
                let (q, input) =
                    freshlabels(&t, &mut self.supply).map_err(|source| EvalError::Circuit { rule: "box", source })?;
                let mut sandbox = Circuit::identity(q);
                let f = self.eval_pure(&mut sandbox, body, "box")?;
                let output = self.apply_value(&mut sandbox, &f, &Value::from_bundle(&input))?;
                let Some(output) = output.strip().to_bundle() else {
                    return stuck("box", format!("boxed function returned `{output}`, not a wire bundle"));
                };
                let boxed = BoxedCircuit { input, circuit: sandbox, output, gate: None };
                self.emit("box", c, || format!("circuit of {} op(s)", boxed.circuit.ops().len()));
                Ok(Value::Boxed(Arc::new(boxed)))
            }
            Term::Force(v) => {
                let Value::Lift(body) = v.strip() else {
                    return stuck("force", format!("`{v}` is not a lifted term"));
                };
                self.emit("force", c, String::new);
                self.eval(c, body)
            }
            Term::Let(x, m, n) => {
                let v = self.eval(c, m)?;
                self.emit("let", c, || x.clone());
                self.eval(c, &n.subst(x, &v))
            }
            Term::Dest(x, y, v, m) => {
                let Value::Pair(a, b) = v.strip() else {
                    return stuck("dest", format!("`{v}` is not a pair"));
                };
                self.emit("dest", c, || format!("{x}, {y}"));
                self.eval(c, &m.subst(x, a).subst(y, b))
            }
            Term::NatOp(op, a, b) => {
                let (Value::Nat(x), Value::Nat(y)) = (a.strip(), b.strip()) else {
                    return stuck("natop", format!("`{a} {} {b}` needs two naturals", op.symbol()));
                };
                let r = op.apply(*x, *y).ok_or_else(|| EvalError::Overflow(format!("{x} {} {y}", op.symbol())))?;
                self.emit("natop", c, || r.to_string());
                Ok(Value::Nat(r))
            }
        }
    }

    /// Evaluates a term that must leave the circuit untouched.
    fn eval_pure(&mut self, c: &mut Circuit, m: &Term, rule: &'static str) -> E<Value> {
        let before = c.ops().len();
        let v = self.eval(c, m)?;
        let after = c.ops().len();
        if after != before {
            return Err(EvalError::CircuitChanged { rule, ops: after - before });
        }
        Ok(v)
    }

    fn apply_fn(&mut self, c: &mut Circuit, f: &Value, a: &Value) -> E<Value> {
        self.apply_value(c, f, a)
    }

    fn apply_value(&mut self, c: &mut Circuit, f: &Value, a: &Value) -> E<Value> {
        match f.strip() {
            Value::Lambda(x, _, body) => {
                self.emit("app", c, || format!("\\{x}"));
                self.eval(c, &body.subst(x, a))
            }
            Value::Fold(i, step, base) => match a.strip() {
                Value::Nil => {
                    self.emit("fold-end", c, String::new);
                    Ok((**base).clone())
                }
                Value::Cons(h, t) => {
                    let Value::Lift(m) = step.strip() else {
                        return stuck("fold-step", format!("step `{step}` is not a lifted term"));
                    };
                    let m0 = m.subst_index(i, &crate::index::Index::zero()).map_indices(&mut normalize);
                    self.emit("fold-step", c, || format!("fold[{i}]"));
                    let y = self.eval_pure(c, &m0, "fold-step")?;
                    let z = self.apply_value(c, &y, &Value::pair((**base).clone(), (**h).clone()))?;
                    let next =
                        crate::index::Index::plus(crate::index::Index::var(i.clone()), crate::index::Index::Const(1));
                    let m1 = m.subst_index(i, &next).map_indices(&mut normalize);
                    let rest = Value::fold(i.clone(), Value::lift(m1), z);
                    self.apply_value(c, &rest, t)
                }
                other => stuck("fold-step", format!("a fold is applied to `{other}`, which is not a list")),
            },
            Value::Prim(Prim::MakeRGate) => match a.strip() {
                Value::Nat(n) => {
                    self.emit("app", c, || format!("makeRGate {n}"));
                    Ok(Value::Boxed(Arc::new(BoxedCircuit::of_gate(&rotation(*n)))))
                }
                other => stuck("app", format!("makeRGate expects a natural, got `{other}`")),
            },
            other => stuck("app", format!("`{other}` is not a function")),
        }
    }
}

/// Evaluates a closed term from the identity circuit on `q`.
pub fn eval(m: &Term, q: LabelContext, supply: &mut LabelSupply) -> Result<(Circuit, Value), EvalError> {
    let mut c = Circuit::identity(q);
    let mut ev = Evaluator::new(supply.clone());
    let v = ev.eval(&mut c, m)?;
    *supply = ev.supply;
    Ok((c, v))
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("no value given for index variable `{0}`")]
    MissingIndex(String),
    #[error("`{0}` is not an index variable of the program")]
    UnknownIndex(String),
    #[error("the program has no `main`")]
    NoMain,
    #[error("main takes `{0}`, which is not a wire bundle")]
    NotABundle(String),
    #[error(transparent)]
    Check(#[from] CheckError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("circuit width {width} exceeds the static bound {bound}")]
    WidthViolation { width: u64, bound: u64 },
    /// The result failed to re-check at the synthesized type.
    #[error("result does not have the expected type: {0}")]
    SubjectReduction(CheckError),
}

/// Outcome of [`run_program`].
#[derive(Debug, Clone)]
pub struct RunResult {
    pub value: Value,
    pub circuit: Circuit,
    /// Static width bound for the run.
    pub bound: u64,
    /// Type of `main` after instantiation.
    pub main_type: Type,
    pub checked: CheckedProgram,
}

/// Checks and runs `main` with the program's index variables set by `args`.
///
/// When `main` is a function taking a bundle of type `T`, it is applied to
/// fresh labels for `T` and the bound is `max(I0 + |T|, I)` where `I0` is the
/// effect of `main` and `I` the arrow's width. Otherwise the bound is `I0`.
pub fn run_program(
    prog: &Program,
    args: &Env,
    solver: &Solver,
    mode: Mode,
    tracer: Option<&mut dyn FnMut(&TraceEvent)>,
) -> Result<RunResult, RunError> {
    for v in &prog.index_params {
        if !args.contains_key(v) {
            return Err(RunError::MissingIndex(v.clone()));
        }
    }
    if let Some(k) = args.keys().find(|k| !prog.index_params.contains(k)) {
        return Err(RunError::UnknownIndex(k.clone()));
    }
    let inst = prog.instantiate_indices(args);
    let checked = check_program(&inst, solver, mode)?;
    let main = inst.main.as_ref().ok_or(RunError::NoMain)?;
    let main_checked = checked.main.clone().expect("main was checked");
    let term = inst.expand_term(main).map_indices(&mut normalize);
    let empty = Env::new();
    let i0 = main_checked.effect.eval(&empty).map_err(EvalError::from)?;
    let mut ev = Evaluator::new(LabelSupply::new());
    if let Some(t) = tracer {
        ev = ev.with_tracer(t);
    }
    let (circuit, value, bound, result_ty) = match &main_checked.ty {
        Type::Arrow { dom, cod, width, .. } => {
            let bundle: BundleType = dom.as_bundle().ok_or_else(|| RunError::NotABundle(dom.to_string()))?;
            let (q, input) =
                freshlabels(&bundle, &mut ev.supply).map_err(|source| EvalError::Circuit { rule: "run", source })?;
            let n_in = q.len() as u64;
            let mut c = Circuit::identity(q);
            let f = ev.eval(&mut c, &term)?;
            let v = ev.apply_value(&mut c, &f, &Value::from_bundle(&input))?;
            let w = width.eval(&empty).map_err(EvalError::from)?;
            (c, v, (i0.saturating_add(n_in)).max(w), (**cod).clone())
        }
        t => {
            let mut c = Circuit::identity(LabelContext::new());
            let v = ev.eval(&mut c, &term)?;
            (c, v, i0, t.clone())
        }
    };
    if circuit.width() > bound {
        return Err(RunError::WidthViolation { width: circuit.width(), bound });
    }
    check_closed_value(&value, &result_ty, circuit.outputs(), solver).map_err(RunError::SubjectReduction)?;
    Ok(RunResult { value, circuit, bound, main_type: main_checked.ty, checked })
}
