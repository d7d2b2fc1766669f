//! Terms, values and programs.

use std::sync::Arc;

use crate::circuit::{BoxedCircuit, Bundle, Label};
use crate::index::Index;

use super::{BundleType, Type};

pub type Name = String;

/// Built-in functions that are not boxed circuits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Prim {
    /// `Nat -o[0,0] Circ[2](Qubit * Qubit, Qubit * Qubit)`: the rotation `R{n}`.
    MakeRGate,
}

impl Prim {
    pub fn name(self) -> &'static str {
        match self {
            Prim::MakeRGate => "makeRGate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NatOp {
    Add,
    /// Truncated subtraction.
    Sub,
    Mul,
}

impl NatOp {
    pub fn symbol(self) -> &'static str {
        match self {
            NatOp::Add => "+",
            NatOp::Sub => "-",
            NatOp::Mul => "*",
        }
    }

    pub fn apply(self, a: u64, b: u64) -> Option<u64> {
        match self {
            NatOp::Add => a.checked_add(b),
            NatOp::Sub => Some(a.saturating_sub(b)),
            NatOp::Mul => a.checked_mul(b),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Unit,
    Var(Name),
    Label(Label),
    Lambda(Name, Type, Box<Term>),
    Lift(Box<Term>),
    Boxed(Arc<BoxedCircuit>),
    Pair(Box<Value>, Box<Value>),
    Nil,
    Cons(Box<Value>, Box<Value>),
    /// `fold[i] step base`; `i` is bound in `step` only.
    Fold(String, Box<Value>, Box<Value>),
    Nat(u64),
    /// Reference to an earlier value definition, instantiated at `indices`.
    Ref {
        name: Name,
        indices: Vec<Index>,
    },
    Ascribe(Box<Value>, Type),
    Prim(Prim),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    App(Value, Value),
    Dest(Name, Name, Value, Box<Term>),
    Force(Value),
    Box(BundleType, Value),
    Apply(Value, Value),
    Return(Value),
    Let(Name, Box<Term>, Box<Term>),
    NatOp(NatOp, Value, Value),
}

impl Value {
    pub fn var(x: impl Into<String>) -> Value {
        Value::Var(x.into())
    }

    pub fn pair(a: Value, b: Value) -> Value {
        Value::Pair(Box::new(a), Box::new(b))
    }

    pub fn cons(a: Value, b: Value) -> Value {
        Value::Cons(Box::new(a), Box::new(b))
    }

    pub fn lambda(x: impl Into<String>, t: Type, body: Term) -> Value {
        Value::Lambda(x.into(), t, Box::new(body))
    }

    pub fn lift(m: Term) -> Value {
        Value::Lift(Box::new(m))
    }

    pub fn fold(i: impl Into<String>, step: Value, base: Value) -> Value {
        Value::Fold(i.into(), Box::new(step), Box::new(base))
    }

    pub fn gate(name: &str) -> Option<Value> {
        crate::circuit::gate(name).map(|g| Value::Boxed(Arc::new(BoxedCircuit::of_gate(&g))))
    }

    pub fn from_bundle(b: &Bundle) -> Value {
        match b {
            Bundle::Unit => Value::Unit,
            Bundle::Label(l) => Value::Label(*l),
            Bundle::Pair(a, c) => Value::pair(Value::from_bundle(a), Value::from_bundle(c)),
            Bundle::Nil => Value::Nil,
            Bundle::Cons(a, c) => Value::cons(Value::from_bundle(a), Value::from_bundle(c)),
        }
    }

    /// The wire bundle this value denotes, if it is made only of labels.
    pub fn to_bundle(&self) -> Option<Bundle> {
        Some(match self {
            Value::Unit => Bundle::Unit,
            Value::Label(l) => Bundle::Label(*l),
            Value::Pair(a, b) => Bundle::pair(a.to_bundle()?, b.to_bundle()?),
            Value::Nil => Bundle::Nil,
            Value::Cons(a, b) => Bundle::cons(a.to_bundle()?, b.to_bundle()?),
            Value::Ascribe(v, _) => v.to_bundle()?,
            _ => return None,
        })
    }

    /// Labels occurring in the value, outside boxed circuits.
    pub fn labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        self.collect_labels(&mut out);
        out
    }

    pub(crate) fn collect_labels(&self, out: &mut Vec<Label>) {
        match self {
            Value::Label(l) => out.push(*l),
            Value::Lambda(_, _, m) | Value::Lift(m) => m.collect_labels(out),
            Value::Pair(a, b) | Value::Cons(a, b) | Value::Fold(_, a, b) => {
                a.collect_labels(out);
                b.collect_labels(out);
            }
            Value::Ascribe(v, _) => v.collect_labels(out),
            Value::Unit
            | Value::Var(_)
            | Value::Boxed(_)
            | Value::Nil
            | Value::Nat(_)
            | Value::Ref { .. }
            | Value::Prim(_) => {}
        }
    }

    /// Removes ascriptions at the head of the value.
    pub fn strip(&self) -> &Value {
        match self {
            Value::Ascribe(v, _) => v.strip(),
            other => other,
        }
    }
}

impl Term {
    pub fn let_(x: impl Into<String>, m: Term, n: Term) -> Term {
        Term::Let(x.into(), Box::new(m), Box::new(n))
    }

    pub fn dest(x: impl Into<String>, y: impl Into<String>, v: Value, m: Term) -> Term {
        Term::Dest(x.into(), y.into(), v, Box::new(m))
    }

    pub(crate) fn collect_labels(&self, out: &mut Vec<Label>) {
        match self {
            Term::App(a, b) | Term::Apply(a, b) | Term::NatOp(_, a, b) => {
                a.collect_labels(out);
                b.collect_labels(out);
            }
            Term::Dest(_, _, v, m) => {
                v.collect_labels(out);
                m.collect_labels(out);
            }
            Term::Force(v) | Term::Box(_, v) | Term::Return(v) => v.collect_labels(out),
            Term::Let(_, m, n) => {
                m.collect_labels(out);
                n.collect_labels(out);
            }
        }
    }
}

/// Source position of a definition.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone)]
pub enum DefBody {
    /// Value definitions may be referenced by later definitions.
    Value(Value),
    Term(Term),
}

#[derive(Debug, Clone)]
pub struct Def {
    pub name: Name,
    /// Index parameters local to the definition.
    pub params: Vec<String>,
    pub sig: Option<Type>,
    pub body: DefBody,
    pub span: Span,
}

/// Structural equality, ignoring source positions.
impl PartialEq for Def {
    fn eq(&self, other: &Def) -> bool {
        let body_eq = match (&self.body, &other.body) {
            (DefBody::Value(a), DefBody::Value(b)) => a == b,
            (DefBody::Term(a), DefBody::Term(b)) => a == b,
            _ => false,
        };
        self.name == other.name && self.params == other.params && self.sig == other.sig && body_eq
    }
}

impl Eq for Def {}

#[derive(Debug, Clone, Default)]
pub struct Program {
    /// Index variables quantified over the whole program.
    pub index_params: Vec<String>,
    pub defs: Vec<Def>,
    pub main: Option<Term>,
    pub main_span: Span,
}

impl PartialEq for Program {
    fn eq(&self, other: &Program) -> bool {
        self.index_params == other.index_params && self.defs == other.defs && self.main == other.main
    }
}

impl Eq for Program {}

impl Program {
    pub fn def(&self, name: &str) -> Option<&Def> {
        self.defs.iter().find(|d| d.name == name)
    }
}
