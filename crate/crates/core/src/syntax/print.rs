//! Printing terms and programs back to concrete syntax.
//!
//! `Display` gives a single line. [`pretty_program`] breaks `let` chains over
//! lines. Either output parses back to the same tree, except for boxed
//! circuits that are not gate literals and for labels, which have no source
//! syntax.

use std::fmt::{self, Write};

use super::ast::{Def, DefBody, Program, Term, Value};

struct Printer {
    out: String,
    pretty: bool,
    indent: usize,
}

impl Printer {
    fn new(pretty: bool) -> Printer {
        Printer { out: String::new(), pretty, indent: 0 }
    }

    fn s(&mut self, text: &str) {
        self.out.push_str(text);
    }

    fn newline(&mut self) {
        self.out.push('\n');
        for _ in 0..self.indent {
            self.out.push(' ');
        }
    }

    fn is_atom(v: &Value) -> bool {
        !matches!(v, Value::Lambda(..) | Value::Lift(_) | Value::Fold(..) | Value::Cons(..))
    }

    fn atom(&mut self, v: &Value) {
        if Self::is_atom(v) {
            self.value(v);
        } else {
            self.s("(");
            self.value(v);
            self.s(")");
        }
    }

    /// A value followed by an argument or operator: lambdas and lifts would
    /// swallow what follows, folds would take it as another argument.
    fn head(&mut self, v: &Value) {
        self.atom(v)
    }

    fn value(&mut self, v: &Value) {
        match v {
            Value::Unit => self.s("()"),
            Value::Var(x) => self.s(x),
            Value::Label(l) => {
                let _ = write!(self.out, "{l}");
            }
            Value::Lambda(x, t, m) => {
                let _ = write!(self.out, "\\{x} :: {t} . ");
                if self.pretty && matches!(**m, Term::Let(..) | Term::Dest(..)) {
                    self.indent += 2;
                    self.newline();
                    self.term(m);
                    self.indent -= 2;
                } else {
                    self.term(m);
                }
            }
            Value::Lift(m) => {
                self.s("lift ");
                self.term(m);
            }
            Value::Boxed(b) => match &b.gate {
                Some(g) => self.s(g),
                None => {
                    let _ = write!(self.out, "<circuit {}>", b.circuit.to_json());
                }
            },
            Value::Pair(a, b) => {
                self.s("(");
                self.value(a);
                self.s(", ");
                self.value(b);
                self.s(")");
            }
            Value::Nil => self.s("[]"),
            Value::Cons(h, t) => {
                if matches!(**h, Value::Lambda(..) | Value::Lift(_) | Value::Cons(..)) {
                    self.s("(");
                    self.value(h);
                    self.s(")");
                } else {
                    self.value(h);
                }
                self.s(" : ");
                self.value(t);
            }
            Value::Fold(i, step, base) => {
                let _ = write!(self.out, "fold[{i}] ");
                self.atom(step);
                self.s(" ");
                self.atom(base);
            }
            Value::Nat(n) => {
                let _ = write!(self.out, "{n}");
            }
            Value::Ref { name, indices } => {
                self.s(name);
                if !indices.is_empty() {
                    let list: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
                    let _ = write!(self.out, "{{{}}}", list.join(", "));
                }
            }
            Value::Ascribe(v, t) => {
                self.s("(");
                self.value(v);
                let _ = write!(self.out, " :: {t})");
            }
            Value::Prim(p) => self.s(p.name()),
        }
    }

    fn term(&mut self, t: &Term) {
        match t {
            Term::App(f, a) => {
                self.head(f);
                self.s(" ");
                self.atom(a);
            }
            Term::NatOp(op, a, b) => {
                self.head(a);
                let _ = write!(self.out, " {} ", op.symbol());
                self.atom(b);
            }
            Term::Dest(x, y, v, m) => {
                let _ = write!(self.out, "let ({x}, {y}) = ");
                self.value(v);
                self.s(" in");
                self.body(m);
            }
            Term::Force(v) => {
                self.s("force ");
                self.atom(v);
            }
            Term::Box(ty, v) => {
                let _ = write!(self.out, "box[{ty}] ");
                self.atom(v);
            }
            Term::Apply(c, v) => {
                self.s("apply(");
                self.value(c);
                self.s(", ");
                self.value(v);
                self.s(")");
            }
            Term::Return(v) => {
                self.s("return ");
                self.value(v);
            }
            Term::Let(x, m, n) => {
                let _ = write!(self.out, "let {x} = ");
                self.term(m);
                self.s(" in");
                self.body(n);
            }
        }
    }

    fn body(&mut self, t: &Term) {
        if self.pretty {
            self.newline();
        } else {
            self.s(" ");
        }
        self.term(t);
    }

    fn def(&mut self, d: &Def) {
        let _ = write!(self.out, "def {}", d.name);
        if !d.params.is_empty() {
            let _ = write!(self.out, "{{{}}}", d.params.join(", "));
        }
        if let Some(t) = &d.sig {
            let _ = write!(self.out, " :: {t}");
        }
        self.s(" =");
        self.indent = 2;
        if self.pretty {
            self.newline();
        } else {
            self.s(" ");
        }
        match &d.body {
            DefBody::Value(v) => self.value(v),
            DefBody::Term(t) => self.term(t),
        }
        self.indent = 0;
        self.s(";");
    }

    fn program(&mut self, p: &Program) {
        if !p.index_params.is_empty() {
            let _ = write!(self.out, "forall {}.", p.index_params.join(" "));
            self.newline();
            if self.pretty {
                self.newline();
            }
        }
        for (k, d) in p.defs.iter().enumerate() {
            if k > 0 && self.pretty {
                self.newline();
            }
            self.def(d);
            self.newline();
        }
        if let Some(m) = &p.main {
            if self.pretty && !p.defs.is_empty() {
                self.newline();
            }
            self.s("main =");
            self.indent = 2;
            self.body(m);
            self.indent = 0;
            self.s(";");
            self.newline();
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = Printer::new(false);
        p.value(self);
        f.write_str(&p.out)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = Printer::new(false);
        p.term(self);
        f.write_str(&p.out)
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut p = Printer::new(false);
        p.program(self);
        f.write_str(&p.out)
    }
}

/// The layout used by `pqr fmt`.
pub fn pretty_program(p: &Program) -> String {
    let mut pr = Printer::new(true);
    pr.program(p);
    pr.out
}

pub fn pretty_term(t: &Term) -> String {
    let mut pr = Printer::new(true);
    pr.term(t);
    pr.out
}
