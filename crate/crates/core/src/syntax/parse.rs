//! Lexer and recursive-descent parser for the surface language.
//!
//! Name resolution happens during parsing: local variables, earlier value
//! definitions, gate names and primitives are told apart here, and index
//! variables must be bound by a `forall`, a definition parameter or an
//! enclosing `fold`.

use crate::index::{Index, IndexCtx, Relation};

use super::ast::{Def, DefBody, NatOp, Prim, Program, Span, Term, Value};
use super::{BundleType, Type};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

type PResult<T> = Result<T, ParseError>;

const KEYWORDS: &[&str] = &[
    "let", "in", "force", "box", "apply", "return", "lift", "fold", "def", "main", "forall", "max", "List", "Circ",
    "Unit", "Bit", "Qubit", "Nat",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    /// `-o[`, the opening of an annotated arrow.
    Lolli,
    Sym(&'static str),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: &[&str] =
    &["::", "<=", "(", ")", "[", "]", "{", "}", ",", ".", ":", "*", "+", "-", "!", "\\", "=", "<", ";"];

fn lex(src: &str) -> PResult<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, message: String| ParseError { line, col, message };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'o') && chars.get(i + 2) == Some(&'[') {
            out.push(Token { tok: Tok::Lolli, line: tl, col: tc });
            i += 3;
            col += 3;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let n = text.parse().map_err(|_| err(tl, tc, format!("number `{text}` is too large")))?;
            col += i - start;
            out.push(Token { tok: Tok::Num(n), line: tl, col: tc });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            col += i - start;
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), line: tl, col: tc });
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
        match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
            Some(s) => {
                i += s.len();
                col += s.len();
                out.push(Token { tok: Tok::Sym(s), line: tl, col: tc });
            }
            None => return Err(err(tl, tc, format!("unexpected character `{c}`"))),
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// What the definitions seen so far look like, for resolving references.
#[derive(Debug, Clone)]
struct DefInfo {
    name: String,
    params: usize,
    is_value: bool,
}

enum TermOrValue {
    Term(Term),
    Value(Value),
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Term variables in scope, innermost last.
    locals: Vec<String>,
    /// Index variables in scope.
    indices: IndexCtx,
    /// When set, index variables are not scope checked.
    open_indices: bool,
    defs: Vec<DefInfo>,
    fresh: usize,
}

impl Parser {
    fn new(src: &str) -> PResult<Parser> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
            locals: Vec::new(),
            indices: IndexCtx::new(),
            open_indices: false,
            defs: Vec::new(),
            fresh: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        let t = &self.toks[self.pos];
        Span { line: t.line, col: t.col }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let t = &self.toks[self.pos];
        Err(ParseError { line: t.line, col: t.col, message: message.into() })
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Num(n) => format!("`{n}`"),
            Tok::Lolli => "`-o[`".into(),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(t) if *t == s)
    }

    fn is_kw(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(t) if t == s)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", self.describe()))
        }
    }

    fn expect_kw(&mut self, s: &str) -> PResult<()> {
        if self.is_kw(s) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", self.describe()))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !is_keyword(&s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(format!("expected an identifier, found {}", self.describe())),
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error(format!("unexpected {} after end of input", self.describe()))
        }
    }

    // ---- indices ----

    fn index(&mut self) -> PResult<Index> {
        let mut acc = self.index_prod()?;
        loop {
            if self.eat_sym("+") {
                acc = Index::plus(acc, self.index_prod()?);
            } else if self.eat_sym("-") {
                acc = Index::monus(acc, self.index_prod()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn index_prod(&mut self) -> PResult<Index> {
        let mut acc = self.index_atom()?;
        while self.eat_sym("*") {
            acc = Index::times(acc, self.index_atom()?);
        }
        Ok(acc)
    }

    fn index_atom(&mut self) -> PResult<Index> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Index::Const(n))
            }
            Tok::Sym("(") => {
                self.bump();
                let i = self.index()?;
                self.expect_sym(")")?;
                Ok(i)
            }
            Tok::Ident(s) if s == "max" => {
                self.bump();
                if self.eat_sym("(") {
                    let a = self.index()?;
                    self.expect_sym(",")?;
                    let b = self.index()?;
                    self.expect_sym(")")?;
                    return Ok(Index::max(a, b));
                }
                self.expect_sym("[")?;
                let x = self.ident()?;
                self.expect_sym("<")?;
                let bound = self.index()?;
                self.expect_sym("]")?;
                let fresh = self.indices.push(x.clone());
                let body = self.index();
                if fresh {
                    self.indices.pop();
                }
                Ok(Index::bounded_max(x, bound, body?))
            }
            Tok::Ident(s) if !is_keyword(&s) => {
                if !self.open_indices && !self.indices.contains(&s) {
                    return self.error(format!("index variable `{s}` is not in scope"));
                }
                self.bump();
                Ok(Index::Var(s))
            }
            _ => self.error(format!("expected an index, found {}", self.describe())),
        }
    }

    // ---- types ----

    fn ty(&mut self) -> PResult<Type> {
        let dom = self.ty_tensor()?;
        if let Tok::Lolli = self.peek() {
            self.bump();
            let width = self.index()?;
            self.expect_sym(",")?;
            let capture = self.index()?;
            self.expect_sym("]")?;
            let cod = self.ty()?;
            return Ok(Type::arrow(dom, cod, width, capture));
        }
        Ok(dom)
    }

    fn ty_tensor(&mut self) -> PResult<Type> {
        let mut acc = self.ty_prefix()?;
        while self.eat_sym("*") {
            acc = Type::tensor(acc, self.ty_prefix()?);
        }
        Ok(acc)
    }

    fn ty_prefix(&mut self) -> PResult<Type> {
        if self.eat_sym("!") {
            return Ok(Type::bang(self.ty_prefix()?));
        }
        if self.is_kw("List") {
            self.bump();
            self.expect_sym("[")?;
            let i = self.index()?;
            self.expect_sym("]")?;
            return Ok(Type::list(i, self.ty_prefix()?));
        }
        self.ty_atom()
    }

    fn ty_atom(&mut self) -> PResult<Type> {
        let t = match self.peek().clone() {
            Tok::Ident(s) => match s.as_str() {
                "Unit" => Type::Unit,
                "Bit" => Type::bit(),
                "Qubit" => Type::qubit(),
                "Nat" => Type::Nat,
                "Circ" => {
                    self.bump();
                    self.expect_sym("[")?;
                    let i = self.index()?;
                    self.expect_sym("]")?;
                    self.expect_sym("(")?;
                    let t = self.bundle_type()?;
                    self.expect_sym(",")?;
                    let u = self.bundle_type()?;
                    self.expect_sym(")")?;
                    return Ok(Type::Circ(i, t, u));
                }
                _ => return self.error(format!("expected a type, found {}", self.describe())),
            },
            Tok::Sym("(") => {
                self.bump();
                let t = self.ty()?;
                self.expect_sym(")")?;
                return Ok(t);
            }
            _ => return self.error(format!("expected a type, found {}", self.describe())),
        };
        self.bump();
        Ok(t)
    }

    fn bundle_type(&mut self) -> PResult<BundleType> {
        let span = self.span();
        let t = self.ty()?;
        t.as_bundle().ok_or_else(|| ParseError {
            line: span.line,
            col: span.col,
            message: format!("`{t}` is not a bundle type"),
        })
    }

    // ---- terms and values ----

    fn term(&mut self) -> PResult<Term> {
        Ok(match self.term_or_value()? {
            TermOrValue::Term(t) => t,
            TermOrValue::Value(v) => Term::Return(v),
        })
    }

    fn term_or_value(&mut self) -> PResult<TermOrValue> {
        let kw = match self.peek() {
            Tok::Ident(s) => s.clone(),
            _ => String::new(),
        };
        let t = match kw.as_str() {
            "let" => return self.let_term().map(TermOrValue::Term),
            "force" => {
                self.bump();
                Term::Force(self.atom()?)
            }
            "box" => {
                self.bump();
                self.expect_sym("[")?;
                let t = self.bundle_type()?;
                self.expect_sym("]")?;
                Term::Box(t, self.atom()?)
            }
            "apply" => {
                self.bump();
                self.expect_sym("(")?;
                let c = self.value()?;
                self.expect_sym(",")?;
                let v = self.value()?;
                self.expect_sym(")")?;
                Term::Apply(c, v)
            }
            "return" => {
                self.bump();
                Term::Return(self.value()?)
            }
            _ if self.is_sym("(") => return self.paren_term_or_value(),
            _ => {
                let v = self.value()?;
                return self.after_value(v);
            }
        };
        Ok(TermOrValue::Term(t))
    }

    /// A term starting with `(`: usually a value, but a parenthesized term
    /// is accepted too. The value reading is tried first.
    fn paren_term_or_value(&mut self) -> PResult<TermOrValue> {
        let (pos, fresh) = (self.pos, self.fresh);
        let as_value = self.value().and_then(|v| self.after_value(v));
        let first_err = match as_value {
            Ok(tv) => return Ok(tv),
            Err(e) => e,
        };
        self.pos = pos;
        self.fresh = fresh;
        self.bump();
        let inner = self.term().and_then(|t| self.expect_sym(")").map(|_| t));
        match inner {
            Ok(t) => Ok(TermOrValue::Term(t)),
            Err(e) if (e.line, e.col) > (first_err.line, first_err.col) => Err(e),
            Err(_) => Err(first_err),
        }
    }

    fn after_value(&mut self, v: Value) -> PResult<TermOrValue> {
        Ok(TermOrValue::Term(if self.starts_atom() {
            Term::App(v, self.atom()?)
        } else if let Some(op) = self.nat_op() {
            self.bump();
            Term::NatOp(op, v, self.atom()?)
        } else {
            return Ok(TermOrValue::Value(v));
        }))
    }

    fn nat_op(&self) -> Option<NatOp> {
        match self.peek() {
            Tok::Sym("+") => Some(NatOp::Add),
            Tok::Sym("-") => Some(NatOp::Sub),
            Tok::Sym("*") => Some(NatOp::Mul),
            _ => None,
        }
    }

    fn let_term(&mut self) -> PResult<Term> {
        self.expect_kw("let")?;
        if self.eat_sym("(") {
            let x = self.ident()?;
            self.expect_sym(",")?;
            let y = self.ident()?;
            self.expect_sym(")")?;
            if x == y {
                return self.error(format!("`{x}` is bound twice in the same pattern"));
            }
            self.expect_sym("=")?;
            let rhs = self.term_or_value()?;
            self.expect_kw("in")?;
            let body = self.with_locals(&[&x, &y], |p| p.term())?;
            return Ok(match rhs {
                TermOrValue::Value(v) => Term::dest(x, y, v, body),
                TermOrValue::Term(m) => {
                    let z = self.fresh_local(&[&x, &y]);
                    Term::let_(z.clone(), m, Term::dest(x, y, Value::Var(z), body))
                }
            });
        }
        let x = self.ident()?;
        self.expect_sym("=")?;
        let m = self.term()?;
        self.expect_kw("in")?;
        let n = self.with_locals(&[&x], |p| p.term())?;
        Ok(Term::let_(x, m, n))
    }

    fn with_locals<T>(&mut self, names: &[&String], f: impl FnOnce(&mut Parser) -> PResult<T>) -> PResult<T> {
        let depth = self.locals.len();
        self.locals.extend(names.iter().map(|n| (*n).clone()));
        let out = f(self);
        self.locals.truncate(depth);
        out
    }

    fn fresh_local(&mut self, avoid: &[&String]) -> String {
        loop {
            let z = format!("_t{}", self.fresh);
            self.fresh += 1;
            if !self.locals.contains(&z) && !avoid.iter().any(|a| **a == z) {
                return z;
            }
        }
    }

    fn value(&mut self) -> PResult<Value> {
        let head = self.prim_value()?;
        if self.eat_sym(":") {
            let tail = self.value()?;
            return Ok(Value::cons(head, tail));
        }
        Ok(head)
    }

    fn prim_value(&mut self) -> PResult<Value> {
        if self.eat_sym("\\") {
            return self.lambda();
        }
        if self.is_kw("lift") {
            self.bump();
            return Ok(Value::lift(self.term()?));
        }
        if self.is_kw("fold") {
            self.bump();
            self.expect_sym("[")?;
            let i = self.ident()?;
            self.expect_sym("]")?;
            if self.indices.contains(&i) {
                return self.error(format!("fold binder `{i}` shadows an index variable in scope"));
            }
            self.indices.push(i.clone());
            let step = self.atom();
            self.indices.pop();
            let step = step?;
            let base = self.atom()?;
            return Ok(Value::fold(i, step, base));
        }
        self.atom()
    }

    fn lambda(&mut self) -> PResult<Value> {
        if self.eat_sym("(") {
            let x = self.ident()?;
            self.expect_sym(",")?;
            let y = self.ident()?;
            self.expect_sym(")")?;
            if x == y {
                return self.error(format!("`{x}` is bound twice in the same pattern"));
            }
            self.expect_sym("::")?;
            let t = self.ty()?;
            self.expect_sym(".")?;
            let body = self.with_locals(&[&x, &y], |p| p.term())?;
            let z = self.fresh_local(&[&x, &y]);
            return Ok(Value::lambda(z.clone(), t, Term::dest(x, y, Value::Var(z), body)));
        }
        let x = self.ident()?;
        self.expect_sym("::")?;
        let t = self.ty()?;
        self.expect_sym(".")?;
        let body = self.with_locals(&[&x], |p| p.term())?;
        Ok(Value::lambda(x, t, body))
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Tok::Num(_) => true,
            Tok::Sym(s) => *s == "(" || *s == "[",
            Tok::Ident(s) => !is_keyword(s),
            _ => false,
        }
    }

    fn atom(&mut self) -> PResult<Value> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(Value::Nat(n))
            }
            Tok::Sym("[") => {
                self.bump();
                self.expect_sym("]")?;
                Ok(Value::Nil)
            }
            Tok::Sym("(") => {
                self.bump();
                if self.eat_sym(")") {
                    return Ok(Value::Unit);
                }
                let v = self.value()?;
                let out = if self.eat_sym(",") {
                    Value::pair(v, self.value()?)
                } else if self.eat_sym("::") {
                    Value::Ascribe(Box::new(v), self.ty()?)
                } else {
                    v
                };
                self.expect_sym(")")?;
                Ok(out)
            }
            Tok::Ident(s) if !is_keyword(&s) => self.resolve(s),
            _ => self.error(format!("expected a value, found {}", self.describe())),
        }
    }

    fn resolve(&mut self, name: String) -> PResult<Value> {
        if self.locals.contains(&name) {
            self.bump();
            return Ok(Value::Var(name));
        }
        if let Some(info) = self.defs.iter().rev().find(|d| d.name == name).cloned() {
            if !info.is_value {
                return self.error(format!("`{name}` is a term definition and cannot be referenced"));
            }
            self.bump();
            let mut indices = Vec::new();
            if self.eat_sym("{") {
                loop {
                    indices.push(self.index()?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym("}")?;
            }
            if indices.len() != info.params {
                return self.error(format!(
                    "`{name}` takes {} index argument(s), {} given",
                    info.params,
                    indices.len()
                ));
            }
            return Ok(Value::Ref { name, indices });
        }
        if let Some(g) = Value::gate(&name) {
            self.bump();
            return Ok(g);
        }
        if name == Prim::MakeRGate.name() {
            self.bump();
            return Ok(Value::Prim(Prim::MakeRGate));
        }
        self.error(format!("unbound identifier `{name}`"))
    }

    // ---- programs ----

    fn forall(&mut self) -> PResult<Vec<String>> {
        let mut vars = Vec::new();
        if self.is_kw("forall") {
            self.bump();
            while !self.is_sym(".") {
                let v = self.ident()?;
                if vars.contains(&v) {
                    return self.error(format!("index variable `{v}` is quantified twice"));
                }
                vars.push(v);
            }
            self.expect_sym(".")?;
        }
        Ok(vars)
    }

    fn program(&mut self) -> PResult<Program> {
        let index_params = self.forall()?;
        let base = IndexCtx::from_names(index_params.iter().cloned());
        let mut prog = Program { index_params, ..Program::default() };
        loop {
            if *self.peek() == Tok::Eof {
                break;
            }
            let span = self.span();
            if self.is_kw("main") {
                if prog.main.is_some() {
                    return self.error("`main` is defined twice");
                }
                self.bump();
                self.expect_sym("=")?;
                self.indices = base.clone();
                prog.main = Some(self.term()?);
                prog.main_span = span;
                self.expect_sym(";")?;
                continue;
            }
            if !self.is_kw("def") {
                return self.error(format!("expected `def` or `main`, found {}", self.describe()));
            }
            self.bump();
            let name = self.ident()?;
            if self.defs.iter().any(|d| d.name == name) {
                return Err(ParseError {
                    line: span.line,
                    col: span.col,
                    message: format!("`{name}` is defined twice"),
                });
            }
            self.indices = base.clone();
            let mut params = Vec::new();
            if self.eat_sym("{") {
                loop {
                    let p = self.ident()?;
                    if !self.indices.push(p.clone()) {
                        return self.error(format!("index parameter `{p}` is already in scope"));
                    }
                    params.push(p);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym("}")?;
            }
            let sig = if self.eat_sym("::") { Some(self.ty()?) } else { None };
            self.expect_sym("=")?;
            let body = match self.term_or_value()? {
                TermOrValue::Value(v) => DefBody::Value(v),
                TermOrValue::Term(t) => DefBody::Term(t),
            };
            self.expect_sym(";")?;
            self.defs.push(DefInfo {
                name: name.clone(),
                params: params.len(),
                is_value: matches!(body, DefBody::Value(_)),
            });
            prog.defs.push(Def { name, params, sig, body, span });
        }
        Ok(prog)
    }
}

/// Parses a whole program.
pub fn parse_program(src: &str) -> Result<Program, ParseError> {
    let mut p = Parser::new(src)?;
    let prog = p.program()?;
    p.expect_eof()?;
    Ok(prog)
}

/// Parses a closed term. Index variables in `indices` are in scope.
pub fn parse_term(src: &str, indices: &[&str]) -> Result<Term, ParseError> {
    let mut p = Parser::new(src)?;
    p.indices = IndexCtx::from_names(indices.iter().copied());
    let t = p.term()?;
    p.expect_eof()?;
    Ok(t)
}

/// Parses a standalone index; its variables are not scope checked.
pub fn parse_index(src: &str) -> Result<Index, ParseError> {
    let mut p = Parser::new(src)?;
    p.open_indices = true;
    let i = p.index()?;
    p.expect_eof()?;
    Ok(i)
}

/// Parses a standalone type; its index variables are not scope checked.
pub fn parse_type(src: &str) -> Result<Type, ParseError> {
    let mut p = Parser::new(src)?;
    p.open_indices = true;
    let t = p.ty()?;
    p.expect_eof()?;
    Ok(t)
}

/// A relational judgment `forall i j. I <= J` or `forall i. I = J`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub ctx: IndexCtx,
    pub relation: Relation,
    pub lhs: Index,
    pub rhs: Index,
}

pub fn parse_judgment(src: &str) -> Result<Judgment, ParseError> {
    let mut p = Parser::new(src)?;
    let vars = p.forall()?;
    p.indices = IndexCtx::from_names(vars);
    let lhs = p.index()?;
    let relation = if p.eat_sym("<=") {
        Relation::Leq
    } else if p.eat_sym("=") {
        Relation::Eq
    } else {
        return p.error(format!("expected `<=` or `=`, found {}", p.describe()));
    };
    let rhs = p.index()?;
    p.expect_eof()?;
    Ok(Judgment { ctx: p.indices, relation, lhs, rhs })
}
