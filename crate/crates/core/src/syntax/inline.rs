//! Expansion of definition references.

use crate::index::Index;

use super::ast::{Def, DefBody, Program, Term, Value};
use super::Type;

/// Instantiates the index parameters of `def` with `args`, substituting
/// simultaneously. Returns the body and the signature.
pub fn instantiate(def: &Def, args: &[Index]) -> (DefBody, Option<Type>) {
    assert_eq!(def.params.len(), args.len(), "arity checked by the parser");
    // Two passes through names that cannot occur in source, so an argument
    // mentioning another parameter is not substituted again.
    let tmp: Vec<String> = (0..args.len()).map(|k| format!("%{k}")).collect();
    let mut body = def.body.clone();
    let mut sig = def.sig.clone();
    for pass in 0..2 {
        for (k, p) in def.params.iter().enumerate() {
            let (var, repl) =
                if pass == 0 { (p.as_str(), Index::Var(tmp[k].clone())) } else { (tmp[k].as_str(), args[k].clone()) };
            body = match body {
                DefBody::Value(v) => DefBody::Value(v.subst_index(var, &repl)),
                DefBody::Term(t) => DefBody::Term(t.subst_index(var, &repl)),
            };
            sig = sig.map(|t| t.subst_index(var, &repl));
        }
    }
    (body, sig)
}

impl Program {
    /// Replaces the program-wide index variables by constants.
    pub fn instantiate_indices(&self, env: &crate::index::Env) -> Program {
        let mut p = self.clone();
        for (var, n) in env {
            let n = Index::Const(*n);
            for d in &mut p.defs {
                d.body = match &d.body {
                    DefBody::Value(v) => DefBody::Value(v.subst_index(var, &n)),
                    DefBody::Term(t) => DefBody::Term(t.subst_index(var, &n)),
                };
                d.sig = d.sig.as_ref().map(|t| t.subst_index(var, &n));
            }
            p.main = p.main.as_ref().map(|m| m.subst_index(var, &n));
        }
        p.index_params.retain(|v| !env.contains_key(v));
        p
    }

    /// The value a reference stands for, fully expanded and ascribed with
    /// the instantiated signature when there is one.
    pub fn expand_ref(&self, name: &str, args: &[Index]) -> Option<Value> {
        let def = self.def(name)?;
        let (body, sig) = instantiate(def, args);
        let DefBody::Value(v) = body else { return None };
        let v = self.expand_value(&v);
        Some(match sig {
            Some(t) => Value::Ascribe(Box::new(v), t),
            None => v,
        })
    }

    /// Replaces every reference in `v` with its expansion.
    pub fn expand_value(&self, v: &Value) -> Value {
        match v {
            Value::Ref { name, indices } => self.expand_ref(name, indices).unwrap_or_else(|| v.clone()),
            Value::Lambda(x, t, m) => Value::lambda(x.clone(), t.clone(), self.expand_term(m)),
            Value::Lift(m) => Value::lift(self.expand_term(m)),
            Value::Pair(a, b) => Value::pair(self.expand_value(a), self.expand_value(b)),
            Value::Cons(a, b) => Value::cons(self.expand_value(a), self.expand_value(b)),
            Value::Fold(i, a, b) => Value::fold(i.clone(), self.expand_value(a), self.expand_value(b)),
            Value::Ascribe(w, t) => Value::Ascribe(Box::new(self.expand_value(w)), t.clone()),
            _ => v.clone(),
        }
    }

    pub fn expand_term(&self, t: &Term) -> Term {
        let ev = |v: &Value| self.expand_value(v);
        match t {
            Term::App(a, b) => Term::App(ev(a), ev(b)),
            Term::Apply(a, b) => Term::Apply(ev(a), ev(b)),
            Term::NatOp(op, a, b) => Term::NatOp(*op, ev(a), ev(b)),
            Term::Force(v) => Term::Force(ev(v)),
            Term::Box(ty, v) => Term::Box(ty.clone(), ev(v)),
            Term::Return(v) => Term::Return(ev(v)),
            Term::Let(x, m, n) => Term::let_(x.clone(), self.expand_term(m), self.expand_term(n)),
            Term::Dest(x, y, v, m) => Term::dest(x.clone(), y.clone(), ev(v), self.expand_term(m)),
        }
    }
}
