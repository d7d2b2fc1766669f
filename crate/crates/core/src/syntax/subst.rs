//! Free variables and capture-avoiding substitution on terms and values,
//! for both term variables and index variables.

use std::collections::BTreeSet;

use crate::index::{fresh_name, Index};

use super::ast::{Term, Value};

impl Value {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Value::Var(x) => {
                out.insert(x.clone());
            }
            Value::Lambda(x, _, m) => {
                let mut inner = m.free_vars();
                inner.remove(x);
                out.extend(inner);
            }
            Value::Lift(m) => m.collect_free(out),
            Value::Pair(a, b) | Value::Cons(a, b) | Value::Fold(_, a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Value::Ascribe(v, _) => v.collect_free(out),
            Value::Unit
            | Value::Label(_)
            | Value::Boxed(_)
            | Value::Nil
            | Value::Nat(_)
            | Value::Ref { .. }
            | Value::Prim(_) => {}
        }
    }

    /// Every variable name mentioned, bound or free.
    fn all_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Value::Var(x) => {
                out.insert(x.clone());
            }
            Value::Lambda(x, _, m) => {
                out.insert(x.clone());
                m.all_vars(out);
            }
            Value::Lift(m) => m.all_vars(out),
            Value::Pair(a, b) | Value::Cons(a, b) | Value::Fold(_, a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            Value::Ascribe(v, _) => v.all_vars(out),
            _ => {}
        }
    }

    /// `self[v/x]`.
    pub fn subst(&self, x: &str, v: &Value) -> Value {
        self.subst_with(x, v, &v.free_vars())
    }

    fn subst_with(&self, x: &str, v: &Value, fv: &BTreeSet<String>) -> Value {
        match self {
            Value::Var(y) if y == x => v.clone(),
            Value::Lambda(y, t, m) => {
                if y == x {
                    return self.clone();
                }
                if fv.contains(y) && m.free_vars().contains(x) {
                    let mut avoid = fv.clone();
                    m.all_vars(&mut avoid);
                    avoid.insert(x.to_string());
                    let y2 = fresh_name(y, &avoid);
                    let m = m.subst(y, &Value::Var(y2.clone()));
                    return Value::Lambda(y2, t.clone(), Box::new(m.subst_with(x, v, fv)));
                }
                Value::Lambda(y.clone(), t.clone(), Box::new(m.subst_with(x, v, fv)))
            }
            Value::Lift(m) => Value::Lift(Box::new(m.subst_with(x, v, fv))),
            Value::Pair(a, b) => Value::pair(a.subst_with(x, v, fv), b.subst_with(x, v, fv)),
            Value::Cons(a, b) => Value::cons(a.subst_with(x, v, fv), b.subst_with(x, v, fv)),
            Value::Fold(i, a, b) => Value::fold(i.clone(), a.subst_with(x, v, fv), b.subst_with(x, v, fv)),
            Value::Ascribe(w, t) => Value::Ascribe(Box::new(w.subst_with(x, v, fv)), t.clone()),
            _ => self.clone(),
        }
    }

    /// Capture-avoiding index substitution `self{repl/var}`.
    pub fn subst_index(&self, var: &str, repl: &Index) -> Value {
        match self {
            Value::Lambda(x, t, m) => {
                Value::Lambda(x.clone(), t.subst_index(var, repl), Box::new(m.subst_index(var, repl)))
            }
            Value::Lift(m) => Value::Lift(Box::new(m.subst_index(var, repl))),
            Value::Pair(a, b) => Value::pair(a.subst_index(var, repl), b.subst_index(var, repl)),
            Value::Cons(a, b) => Value::cons(a.subst_index(var, repl), b.subst_index(var, repl)),
            Value::Fold(i, step, base) => {
                let base = base.subst_index(var, repl);
                if i == var {
                    return Value::Fold(i.clone(), step.clone(), Box::new(base));
                }
                let fv = repl.free_vars();
                if fv.contains(i) && step.free_index_vars().contains(var) {
                    let mut avoid = fv;
                    step.index_names(&mut avoid);
                    avoid.insert(var.to_string());
                    let i2 = fresh_name(i, &avoid);
                    let step = step.subst_index(i, &Index::Var(i2.clone()));
                    return Value::fold(i2, step.subst_index(var, repl), base);
                }
                Value::fold(i.clone(), step.subst_index(var, repl), base)
            }
            Value::Ref { name, indices } => {
                Value::Ref { name: name.clone(), indices: indices.iter().map(|i| i.subst(var, repl)).collect() }
            }
            Value::Ascribe(v, t) => Value::Ascribe(Box::new(v.subst_index(var, repl)), t.subst_index(var, repl)),
            _ => self.clone(),
        }
    }

    /// Free index variables, respecting fold binders.
    pub fn free_index_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match self {
            Value::Lambda(_, t, m) => {
                out.extend(t.free_index_vars());
                out.extend(m.free_index_vars());
            }
            Value::Lift(m) => out.extend(m.free_index_vars()),
            Value::Pair(a, b) | Value::Cons(a, b) => {
                out.extend(a.free_index_vars());
                out.extend(b.free_index_vars());
            }
            Value::Fold(i, step, base) => {
                let mut s = step.free_index_vars();
                s.remove(i);
                out.extend(s);
                out.extend(base.free_index_vars());
            }
            Value::Ref { indices, .. } => {
                for i in indices {
                    out.extend(i.free_vars());
                }
            }
            Value::Ascribe(v, t) => {
                out.extend(v.free_index_vars());
                out.extend(t.free_index_vars());
            }
            _ => {}
        }
        out
    }

    fn index_names(&self, out: &mut BTreeSet<String>) {
        self.for_each_index(&mut |i| i.all_names(out));
        self.for_each_fold_binder(&mut |b| {
            out.insert(b.to_string());
        });
    }

    fn for_each_fold_binder(&self, f: &mut dyn FnMut(&str)) {
        match self {
            Value::Lambda(_, _, m) | Value::Lift(m) => m.for_each_fold_binder(f),
            Value::Pair(a, b) | Value::Cons(a, b) => {
                a.for_each_fold_binder(f);
                b.for_each_fold_binder(f);
            }
            Value::Fold(i, a, b) => {
                f(i);
                a.for_each_fold_binder(f);
                b.for_each_fold_binder(f);
            }
            Value::Ascribe(v, _) => v.for_each_fold_binder(f),
            _ => {}
        }
    }

    /// Visits every embedded index, ignoring binding structure.
    pub fn for_each_index(&self, f: &mut dyn FnMut(&Index)) {
        match self {
            Value::Lambda(_, t, m) => {
                t.for_each_index(f);
                m.for_each_index(f);
            }
            Value::Lift(m) => m.for_each_index(f),
            Value::Pair(a, b) | Value::Cons(a, b) | Value::Fold(_, a, b) => {
                a.for_each_index(f);
                b.for_each_index(f);
            }
            Value::Ref { indices, .. } => indices.iter().for_each(&mut *f),
            Value::Ascribe(v, t) => {
                v.for_each_index(f);
                t.for_each_index(f);
            }
            _ => {}
        }
    }

    /// Rewrites every embedded index with `f`, ignoring binding structure.
    /// Only meant for binder-insensitive maps such as normalization.
    pub fn map_indices(&self, f: &mut dyn FnMut(&Index) -> Index) -> Value {
        match self {
            Value::Lambda(x, t, m) => {
                let t = t.map_indices(f);
                Value::Lambda(x.clone(), t, Box::new(m.map_indices(f)))
            }
            Value::Lift(m) => Value::Lift(Box::new(m.map_indices(f))),
            Value::Pair(a, b) => {
                let a = a.map_indices(f);
                Value::pair(a, b.map_indices(f))
            }
            Value::Cons(a, b) => {
                let a = a.map_indices(f);
                Value::cons(a, b.map_indices(f))
            }
            Value::Fold(i, a, b) => {
                let a = a.map_indices(f);
                Value::fold(i.clone(), a, b.map_indices(f))
            }
            Value::Ref { name, indices } => {
                Value::Ref { name: name.clone(), indices: indices.iter().map(&mut *f).collect() }
            }
            Value::Ascribe(v, t) => {
                let v = v.map_indices(f);
                Value::Ascribe(Box::new(v), t.map_indices(f))
            }
            _ => self.clone(),
        }
    }
}

impl Term {
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::App(a, b) | Term::Apply(a, b) | Term::NatOp(_, a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Term::Dest(x, y, v, m) => {
                v.collect_free(out);
                let mut inner = m.free_vars();
                inner.remove(x);
                inner.remove(y);
                out.extend(inner);
            }
            Term::Force(v) | Term::Box(_, v) | Term::Return(v) => v.collect_free(out),
            Term::Let(x, m, n) => {
                m.collect_free(out);
                let mut inner = n.free_vars();
                inner.remove(x);
                out.extend(inner);
            }
        }
    }

    fn all_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::App(a, b) | Term::Apply(a, b) | Term::NatOp(_, a, b) => {
                a.all_vars(out);
                b.all_vars(out);
            }
            Term::Dest(x, y, v, m) => {
                out.insert(x.clone());
                out.insert(y.clone());
                v.all_vars(out);
                m.all_vars(out);
            }
            Term::Force(v) | Term::Box(_, v) | Term::Return(v) => v.all_vars(out),
            Term::Let(x, m, n) => {
                out.insert(x.clone());
                m.all_vars(out);
                n.all_vars(out);
            }
        }
    }

    /// `self[v/x]`.
    pub fn subst(&self, x: &str, v: &Value) -> Term {
        self.subst_with(x, v, &v.free_vars())
    }

    fn subst_with(&self, x: &str, v: &Value, fv: &BTreeSet<String>) -> Term {
        match self {
            Term::App(a, b) => Term::App(a.subst_with(x, v, fv), b.subst_with(x, v, fv)),
            Term::Apply(a, b) => Term::Apply(a.subst_with(x, v, fv), b.subst_with(x, v, fv)),
            Term::NatOp(op, a, b) => Term::NatOp(*op, a.subst_with(x, v, fv), b.subst_with(x, v, fv)),
            Term::Force(w) => Term::Force(w.subst_with(x, v, fv)),
            Term::Box(t, w) => Term::Box(t.clone(), w.subst_with(x, v, fv)),
            Term::Return(w) => Term::Return(w.subst_with(x, v, fv)),
            Term::Let(y, m, n) => {
                let m = m.subst_with(x, v, fv);
                if y == x {
                    return Term::Let(y.clone(), Box::new(m), n.clone());
                }
                let (y, n) = self.avoid_capture(&[y], n, x, fv);
                Term::Let(y[0].clone(), Box::new(m), Box::new(n.subst_with(x, v, fv)))
            }
            Term::Dest(y, z, w, m) => {
                let w = w.subst_with(x, v, fv);
                if y == x || z == x {
                    return Term::Dest(y.clone(), z.clone(), w, m.clone());
                }
                let (names, m) = self.avoid_capture(&[y, z], m, x, fv);
                Term::Dest(names[0].clone(), names[1].clone(), w, Box::new(m.subst_with(x, v, fv)))
            }
        }
    }

    /// Renames binders in `body` that would capture free variables of the
    /// substituted value.
    fn avoid_capture(&self, binders: &[&String], body: &Term, x: &str, fv: &BTreeSet<String>) -> (Vec<String>, Term) {
        let mut names: Vec<String> = binders.iter().map(|b| (*b).clone()).collect();
        let mut body = body.clone();
        if !body.free_vars().contains(x) {
            return (names, body);
        }
        for k in 0..names.len() {
            if fv.contains(&names[k]) {
                let mut avoid = fv.clone();
                body.all_vars(&mut avoid);
                avoid.extend(names.iter().cloned());
                avoid.insert(x.to_string());
                let fresh = fresh_name(&names[k], &avoid);
                body = body.subst(&names[k], &Value::Var(fresh.clone()));
                names[k] = fresh;
            }
        }
        (names, body)
    }

    /// Capture-avoiding index substitution `self{repl/var}`.
    pub fn subst_index(&self, var: &str, repl: &Index) -> Term {
        match self {
            Term::App(a, b) => Term::App(a.subst_index(var, repl), b.subst_index(var, repl)),
            Term::Apply(a, b) => Term::Apply(a.subst_index(var, repl), b.subst_index(var, repl)),
            Term::NatOp(op, a, b) => Term::NatOp(*op, a.subst_index(var, repl), b.subst_index(var, repl)),
            Term::Force(v) => Term::Force(v.subst_index(var, repl)),
            Term::Box(t, v) => Term::Box(t.map_indices(&mut |i| i.subst(var, repl)), v.subst_index(var, repl)),
            Term::Return(v) => Term::Return(v.subst_index(var, repl)),
            Term::Let(x, m, n) => Term::let_(x.clone(), m.subst_index(var, repl), n.subst_index(var, repl)),
            Term::Dest(x, y, v, m) => {
                Term::dest(x.clone(), y.clone(), v.subst_index(var, repl), m.subst_index(var, repl))
            }
        }
    }

    pub fn free_index_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        match self {
            Term::App(a, b) | Term::Apply(a, b) | Term::NatOp(_, a, b) => {
                out.extend(a.free_index_vars());
                out.extend(b.free_index_vars());
            }
            Term::Force(v) | Term::Return(v) => out.extend(v.free_index_vars()),
            Term::Box(t, v) => {
                t.for_each_index(&mut |i| out.extend(i.free_vars()));
                out.extend(v.free_index_vars());
            }
            Term::Let(_, m, n) => {
                out.extend(m.free_index_vars());
                out.extend(n.free_index_vars());
            }
            Term::Dest(_, _, v, m) => {
                out.extend(v.free_index_vars());
                out.extend(m.free_index_vars());
            }
        }
        out
    }

    fn for_each_fold_binder(&self, f: &mut dyn FnMut(&str)) {
        match self {
            Term::App(a, b) | Term::Apply(a, b) | Term::NatOp(_, a, b) => {
                a.for_each_fold_binder(f);
                b.for_each_fold_binder(f);
            }
            Term::Force(v) | Term::Return(v) | Term::Box(_, v) => v.for_each_fold_binder(f),
            Term::Let(_, m, n) => {
                m.for_each_fold_binder(f);
                n.for_each_fold_binder(f);
            }
            Term::Dest(_, _, v, m) => {
                v.for_each_fold_binder(f);
                m.for_each_fold_binder(f);
            }
        }
    }

    pub fn for_each_index(&self, f: &mut dyn FnMut(&Index)) {
        match self {
            Term::App(a, b) | Term::Apply(a, b) | Term::NatOp(_, a, b) => {
                a.for_each_index(f);
                b.for_each_index(f);
            }
            Term::Force(v) | Term::Return(v) => v.for_each_index(f),
            Term::Box(t, v) => {
                t.for_each_index(f);
                v.for_each_index(f);
            }
            Term::Let(_, m, n) => {
                m.for_each_index(f);
                n.for_each_index(f);
            }
            Term::Dest(_, _, v, m) => {
                v.for_each_index(f);
                m.for_each_index(f);
            }
        }
    }

    pub fn map_indices(&self, f: &mut dyn FnMut(&Index) -> Index) -> Term {
        match self {
            Term::App(a, b) => {
                let a = a.map_indices(f);
                Term::App(a, b.map_indices(f))
            }
            Term::Apply(a, b) => {
                let a = a.map_indices(f);
                Term::Apply(a, b.map_indices(f))
            }
            Term::NatOp(op, a, b) => {
                let a = a.map_indices(f);
                Term::NatOp(*op, a, b.map_indices(f))
            }
            Term::Force(v) => Term::Force(v.map_indices(f)),
            Term::Box(t, v) => {
                let t = t.map_indices(f);
                Term::Box(t, v.map_indices(f))
            }
            Term::Return(v) => Term::Return(v.map_indices(f)),
            Term::Let(x, m, n) => {
                let m = m.map_indices(f);
                Term::let_(x.clone(), m, n.map_indices(f))
            }
            Term::Dest(x, y, v, m) => {
                let v = v.map_indices(f);
                Term::dest(x.clone(), y.clone(), v, m.map_indices(f))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Label;
    use crate::syntax::Type;

    fn var(x: &str) -> Value {
        Value::var(x)
    }

    #[test]
    fn value_substitution() {
        let l = Value::Label(Label(0));
        assert_eq!(Term::Return(var("x")).subst("x", &l), Term::Return(l.clone()));
        let id = Value::lambda("x", Type::qubit(), Term::Return(var("x")));
        assert_eq!(id.subst("x", &l), id);
        let t = Term::let_("y", Term::App(var("f"), var("x")), Term::Return(var("y")));
        let expected = Term::let_("y", Term::App(var("f"), l.clone()), Term::Return(var("y")));
        assert_eq!(t.subst("x", &l), expected);
    }

    #[test]
    fn value_substitution_avoids_capture() {
        // (\y. return (x, y))[y/x] renames the binder
        let lam = Value::lambda("y", Type::Unit, Term::Return(Value::pair(var("x"), var("y"))));
        let out = lam.subst("x", &var("y"));
        let Value::Lambda(b, _, body) = &out else { panic!() };
        assert_ne!(b, "y");
        assert_eq!(**body, Term::Return(Value::pair(var("y"), var(b))));
        assert_eq!(out.free_vars(), BTreeSet::from(["y".to_string()]));
    }

    #[test]
    fn index_substitution_respects_fold_binder() {
        let step = Value::lambda("x", Type::list(Index::var("i"), Type::qubit()), Term::Return(var("x")));
        let f = Value::fold("i", Value::lift(Term::Return(step.clone())), Value::Nil);
        assert_eq!(f.subst_index("i", &Index::Const(2)), f);
        let ty = Type::list(Index::var("i"), Type::qubit());
        assert_eq!(ty.subst_index("i", &Index::Const(3)), Type::list(Index::Const(3), Type::qubit()));
    }

    #[test]
    fn index_substitution_renames_fold_binder() {
        // fold[j] (lift return \x :: List[i + j] Qubit . return x) [] {j/i}
        let ann = Type::list(Index::plus(Index::var("i"), Index::var("j")), Type::qubit());
        let step = Value::lift(Term::Return(Value::lambda("x", ann, Term::Return(var("x")))));
        let f = Value::fold("j", step, Value::Nil);
        let out = f.subst_index("i", &Index::var("j"));
        let Value::Fold(b, _, _) = &out else { panic!() };
        assert_ne!(b, "j");
        assert_eq!(out.free_index_vars(), BTreeSet::from(["j".to_string()]));
    }
}
