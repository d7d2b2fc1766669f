//! Random generators shared by the acceptance suite and the property tests.
//! Each takes an explicit RNG so runs are reproducible from a seed.

#![allow(dead_code)]

use pqr_core::circuit::{gate_registry, rotation, Bundle, Circuit, GateDecl, LabelContext, LabelSupply};
use pqr_core::index::Index;
use pqr_core::syntax::{BundleType, Def, DefBody, NatOp, Prim, Program, Span, Term, Type, Value, WireKind};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---- indices ----

/// A random index over `vars`. Bounded-max binders are named `b0`, `b1`, ...
/// and never clash with `vars`.
pub fn index(r: &mut impl Rng, vars: &[String], depth: u32, binders: &mut u32) -> Index {
    if depth == 0 || r.gen_ratio(1, 3) {
        return if !vars.is_empty() && r.gen_bool(0.6) {
            Index::Var(vars.choose(r).unwrap().clone())
        } else {
            Index::Const(r.gen_range(0..6))
        };
    }
    let d = depth - 1;
    match r.gen_range(0..5) {
        0 => Index::plus(index(r, vars, d, binders), index(r, vars, d, binders)),
        1 => Index::monus(index(r, vars, d, binders), index(r, vars, d, binders)),
        2 => Index::times(index(r, vars, d, binders), index(r, vars, d, binders)),
        3 => Index::max(index(r, vars, d, binders), index(r, vars, d, binders)),
        _ => {
            let b = format!("b{binders}");
            *binders += 1;
            // keep ranges small: a constant, a variable, or a variable plus one
            let bound = match (r.gen_range(0..3), vars.choose(r)) {
                (0, _) | (_, None) => Index::Const(r.gen_range(0..5)),
                (1, Some(v)) => Index::var(v.clone()),
                (_, Some(v)) => Index::plus(Index::var(v.clone()), Index::Const(1)),
            };
            let mut inner = vars.to_vec();
            inner.push(b.clone());
            let body = index(r, &inner, d, binders);
            Index::bounded_max(b, bound, body)
        }
    }
}

// ---- circuits ----

fn pick_bundle(
    r: &mut impl Rng,
    t: &BundleType,
    live: &mut Vec<(pqr_core::circuit::Label, WireKind)>,
) -> Option<Bundle> {
    match t {
        BundleType::Unit => Some(Bundle::Unit),
        BundleType::Wire(k) => {
            let candidates: Vec<usize> = (0..live.len()).filter(|&i| live[i].1 == *k).collect();
            let &i = candidates.choose(r)?;
            Some(Bundle::Label(live.remove(i).0))
        }
        BundleType::Tensor(a, b) => {
            let x = pick_bundle(r, a, live)?;
            let y = pick_bundle(r, b, live)?;
            Some(Bundle::pair(x, y))
        }
        BundleType::List(..) => None,
    }
}

fn random_gate(r: &mut impl Rng) -> GateDecl {
    if r.gen_ratio(1, 6) {
        rotation(r.gen_range(1..6))
    } else {
        gate_registry().choose(r).unwrap().clone()
    }
}

/// Extends `c` with `n` random well-typed gate applications.
pub fn extend_circuit(r: &mut impl Rng, c: Circuit, n: usize, supply: &mut LabelSupply) -> Circuit {
    let mut c = c;
    let mut added = 0;
    while added < n {
        let g = random_gate(r);
        let mut live: Vec<_> = c.outputs().iter().collect();
        let Some(b) = pick_bundle(r, &g.input, &mut live) else { continue };
        let (next, _) = c.apply_gate(&g, &b, supply).expect("consumed labels are live outputs");
        c = next;
        added += 1;
    }
    c
}

/// A random label context of up to `max` wires.
pub fn label_context(r: &mut impl Rng, max: usize, supply: &mut LabelSupply) -> LabelContext {
    let n = r.gen_range(0..=max);
    (0..n).map(|_| (supply.fresh(), if r.gen_ratio(3, 4) { WireKind::Qubit } else { WireKind::Bit })).collect()
}

/// A composable pair `(C, D)`: `D` starts from a random subset of the
/// outputs of `C`, and its fresh labels are disjoint from those of `C`.
pub fn circuit_pair(r: &mut impl Rng) -> (Circuit, Circuit) {
    let mut supply = LabelSupply::new();
    let q = label_context(r, 5, &mut supply);
    let n = r.gen_range(0..10);
    let c = extend_circuit(r, Circuit::identity(q), n, &mut supply);
    let h: LabelContext = c.outputs().iter().filter(|_| r.gen_bool(0.6)).collect();
    let n = r.gen_range(0..10);
    let d = extend_circuit(r, Circuit::identity(h), n, &mut supply);
    (c, d)
}

// ---- abstract syntax ----

const LOCALS: [&str; 6] = ["x", "y", "z", "u", "w", "acc"];
const GATES: [&str; 5] = ["H", "CNOT", "INIT0", "DISCARD", "MEAS"];

/// Scope for generating syntax the parser accepts: bound variables only,
/// references to earlier value definitions with the right arity, and fold
/// binders that do not shadow index variables.
#[derive(Clone, Default)]
struct Scope {
    locals: Vec<String>,
    indices: Vec<String>,
    value_defs: Vec<(String, usize)>,
}

struct AstGen<'r, R: Rng> {
    r: &'r mut R,
    fresh: u32,
}

impl<R: Rng> AstGen<'_, R> {
    fn index(&mut self, s: &Scope) -> Index {
        let mut b = self.fresh;
        let i = index(self.r, &s.indices, 2, &mut b);
        self.fresh = b;
        i
    }

    fn bundle_type(&mut self, s: &Scope, depth: u32) -> BundleType {
        match if depth == 0 { self.r.gen_range(0..3) } else { self.r.gen_range(0..5) } {
            0 => BundleType::Unit,
            1 => BundleType::Wire(WireKind::Qubit),
            2 => BundleType::Wire(WireKind::Bit),
            3 => BundleType::Tensor(Box::new(self.bundle_type(s, depth - 1)), Box::new(self.bundle_type(s, depth - 1))),
            _ => BundleType::List(self.index(s), Box::new(self.bundle_type(s, depth - 1))),
        }
    }

    fn ty(&mut self, s: &Scope, depth: u32) -> Type {
        match if depth == 0 { self.r.gen_range(0..4) } else { self.r.gen_range(0..9) } {
            0 => Type::Unit,
            1 => Type::qubit(),
            2 => Type::bit(),
            3 => Type::Nat,
            4 => Type::bang(self.ty(s, depth - 1)),
            5 => Type::tensor(self.ty(s, depth - 1), self.ty(s, depth - 1)),
            6 => {
                let (w, c) = (self.index(s), self.index(s));
                Type::arrow(self.ty(s, depth - 1), self.ty(s, depth - 1), w, c)
            }
            7 => Type::list(self.index(s), self.ty(s, depth - 1)),
            _ => Type::Circ(self.index(s), self.bundle_type(s, 1), self.bundle_type(s, 1)),
        }
    }

    fn value(&mut self, s: &Scope, depth: u32) -> Value {
        let leaf = depth == 0 || self.r.gen_ratio(1, 3);
        if leaf {
            return match self.r.gen_range(0..7) {
                0 => Value::Unit,
                1 => Value::Nat(self.r.gen_range(0..20)),
                2 => Value::Nil,
                3 => Value::gate(GATES.choose(self.r).unwrap()).unwrap(),
                4 => Value::Prim(Prim::MakeRGate),
                5 if !s.value_defs.is_empty() => {
                    let (name, arity) = s.value_defs.choose(self.r).unwrap().clone();
                    Value::Ref { name, indices: (0..arity).map(|_| self.index(s)).collect() }
                }
                _ => match s.locals.choose(self.r) {
                    Some(x) => Value::var(x.clone()),
                    None => Value::Unit,
                },
            };
        }
        let d = depth - 1;
        match self.r.gen_range(0..6) {
            0 => {
                let x = LOCALS.choose(self.r).unwrap().to_string();
                let t = self.ty(s, 2);
                let mut inner = s.clone();
                inner.locals.push(x.clone());
                Value::lambda(x, t, self.term(&inner, d))
            }
            1 => Value::lift(self.term(s, d)),
            2 => Value::pair(self.value(s, d), self.value(s, d)),
            3 => Value::cons(self.value(s, d), self.value(s, d)),
            4 => {
                let i = format!("f{}", self.fresh);
                self.fresh += 1;
                let mut inner = s.clone();
                inner.indices.push(i.clone());
                let step = self.value(&inner, d);
                Value::fold(i, step, self.value(s, d))
            }
            _ => {
                let t = self.ty(s, 2);
                Value::Ascribe(Box::new(self.value(s, d)), t)
            }
        }
    }

    fn term(&mut self, s: &Scope, depth: u32) -> Term {
        if depth == 0 {
            return Term::Return(self.value(s, 0));
        }
        let d = depth - 1;
        match self.r.gen_range(0..8) {
            0 => Term::Return(self.value(s, d)),
            1 => Term::App(self.value(s, d), self.value(s, d)),
            2 => Term::Apply(self.value(s, d), self.value(s, d)),
            3 => Term::Force(self.value(s, d)),
            4 => {
                let t = self.bundle_type(s, 2);
                Term::Box(t, self.value(s, d))
            }
            5 => {
                let x = LOCALS.choose(self.r).unwrap().to_string();
                let m = self.term(s, d);
                let mut inner = s.clone();
                inner.locals.push(x.clone());
                Term::let_(x, m, self.term(&inner, d))
            }
            6 => {
                let mut names = LOCALS.to_vec();
                names.shuffle(self.r);
                let (x, y) = (names[0].to_string(), names[1].to_string());
                let v = self.value(s, d);
                let mut inner = s.clone();
                inner.locals.extend([x.clone(), y.clone()]);
                Term::dest(x, y, v, self.term(&inner, d))
            }
            _ => {
                let op = *[NatOp::Add, NatOp::Sub, NatOp::Mul].choose(self.r).unwrap();
                Term::NatOp(op, self.value(s, d), self.value(s, d))
            }
        }
    }
}

/// A random program the parser accepts. It need not type check.
pub fn program_ast(r: &mut impl Rng) -> Program {
    let mut g = AstGen { r, fresh: 0 };
    let params: Vec<String> = ["i", "j"].iter().take(g.r.gen_range(0..3)).map(|s| s.to_string()).collect();
    let mut scope = Scope { indices: params.clone(), ..Scope::default() };
    let mut defs = Vec::new();
    for k in 0..g.r.gen_range(0..4) {
        let name = format!("d{k}");
        let dparams: Vec<String> = (0..g.r.gen_range(0..3)).map(|p| format!("p{k}_{p}")).collect();
        let mut inner = scope.clone();
        inner.indices.extend(dparams.iter().cloned());
        let sig = g.r.gen_bool(0.5).then(|| g.ty(&inner, 2));
        // a term body that prints as a bare value would parse back as a value
        let body = match g.r.gen_bool(0.6) {
            true => DefBody::Value(g.value(&inner, 3)),
            false => match g.term(&inner, 3) {
                Term::Return(v) if g.r.gen_bool(0.5) => DefBody::Value(v),
                t => DefBody::Term(t),
            },
        };
        if matches!(body, DefBody::Value(_)) {
            scope.value_defs.push((name.clone(), dparams.len()));
        }
        defs.push(Def { name, params: dparams, sig, body, span: Span::default() });
    }
    let main = g.r.gen_bool(0.8).then(|| g.term(&scope, 3));
    Program { index_params: params, defs, main, main_span: Span::default() }
}

// ---- well-typed programs ----

/// Helpers every generated program may use. All are folds over a list of
/// `k` qubits: `rev` reverses, `had` applies H to each element, and `anc`
/// borrows an ancilla per element.
const PRELUDE: &str = r"forall n.

def revStep{m} = lift return \x :: List[m] Qubit * Qubit .
  let (qs, q) = x in return (q : qs);
def rev{k} :: List[k] Qubit -o[k,0] List[k] Qubit = fold[m] revStep{m} [];

def hadStep{m} = lift return \x :: List[m] Qubit * Qubit .
  let (qs, q) = x in let q = apply(H, q) in return (q : qs);
def had{k} :: List[k] Qubit -o[k,0] List[k] Qubit = fold[m] hadStep{m} [];

def ancStep{m} = lift return \x :: List[m] Qubit * Qubit .
  let (qs, q) = x in
  let b = apply(INIT0, ()) in
  let (q, b) = apply(CNOT, (q, b)) in
  let _ = apply(DISCARD, b) in
  return (q : qs);
def anc{k} :: List[k] Qubit -o[k + 1,0] List[k] Qubit = fold[m] ancStep{m} [];

def dumbNot :: Qubit -o[2,0] Qubit = \q :: Qubit .
  let a = apply(INIT1, ()) in
  let (a, q) = apply(CNOT, (a, q)) in
  let _ = apply(DISCARD, a) in
  q;
";

/// One random statement over the live qubit `a` and the list `qs`.
fn statement(r: &mut impl Rng, t: usize) -> String {
    match r.gen_range(0..11) {
        0 => "let a = apply(H, a) in".into(),
        1 => format!("let b{t} = apply(INIT0, ()) in let (a, b{t}) = apply(CNOT, (a, b{t})) in let _ = apply(DISCARD, b{t}) in"),
        2 => "let qs = rev{n} qs in".into(),
        3 => "let qs = had{n} qs in".into(),
        4 => "let qs = anc{n} qs in".into(),
        5 => "let a = dumbNot a in".into(),
        6 => format!(
            "let c{t} = box[Qubit] (lift return \\q :: Qubit . let q = apply(H, q) in apply(H, q)) in let a = apply(c{t}, a) in"
        ),
        7 => format!("let m{t} = apply(MEAS, a) in let _ = apply(CDISCARD, m{t}) in let a = apply(INIT1, ()) in"),
        8 => "let (a, qs) = (\\y :: Qubit * List[n] Qubit . let (a, qs) = y in let qs = rev{n} qs in return (a, qs)) (a, qs) in".into(),
        9 => format!("let e{t} = apply(INIT0, ()) in let qs = had{{n}} qs in let _ = apply(DISCARD, e{t}) in"),
        _ => format!("let g{t} = lift (return dumbNot) in let h{t} = force g{t} in let a = h{t} a in"),
    }
}

/// Source of a random well-typed program over the index `n`. `main` is a
/// function from `List[n] Qubit * Qubit`, or a closed term allocating its
/// own qubit.
pub fn program_source(r: &mut impl Rng) -> String {
    let body: Vec<String> = (0..r.gen_range(1..9)).map(|t| statement(r, t)).collect();
    let body = body.join("\n  ");
    let main = if r.gen_ratio(3, 4) {
        let ret = if r.gen_bool(0.5) { "(qs, a)" } else { "(a, qs)" };
        format!("main = \\x :: List[n] Qubit * Qubit . let (qs, a) = x in\n  {body}\n  return {ret};\n")
    } else {
        // no input list: operate on the empty list and a fresh qubit
        let body = body.replace("{n}", "{0}").replace("List[n]", "List[0]");
        format!("main = let a = apply(INIT0, ()) in let qs = ([] :: List[0] Qubit) in\n  {body}\n  let _ = apply(DISCARD, a) in return qs;\n")
    };
    format!("{PRELUDE}\n{main}")
}
