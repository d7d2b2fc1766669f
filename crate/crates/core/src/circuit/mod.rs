//! Circuits: label contexts, wire bundles, the width metric, concatenation
//! and the renaming-based append used by the evaluator.

mod gates;
mod json;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::index::Env;
use crate::syntax::{BundleType, WireKind};

pub use gates::{gate, gate_registry, gate_width, rotation, GateDecl, GATE_NAMES};

/// A wire reference. Printed as `l<n>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub u32);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l{}", self.0)
    }
}

/// Monotone source of fresh labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelSupply {
    next: u32,
}

impl LabelSupply {
    pub fn new() -> Self {
        LabelSupply::default()
    }

    pub fn starting_at(next: u32) -> Self {
        LabelSupply { next }
    }

    pub fn fresh(&mut self) -> Label {
        let l = Label(self.next);
        self.next += 1;
        l
    }

    pub fn peek(&self) -> u32 {
        self.next
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CircuitError {
    #[error("label {0} is not available")]
    MissingLabel(Label),
    #[error("label {0} is used more than once")]
    DuplicateLabel(Label),
    #[error("label {0} is not accounted for by the bundle")]
    UnusedLabel(Label),
    #[error("label {0} clashes with a live wire")]
    LabelClash(Label),
    #[error("label {label} has kind {found}, expected {expected}")]
    KindMismatch { label: Label, expected: WireKind, found: WireKind },
    #[error("bundle `{bundle}` does not have type {expected}")]
    ShapeMismatch { bundle: String, expected: String },
    #[error("list elements have different types: {0} and {1}")]
    HeterogeneousList(String, String),
    #[error("cannot box a circuit family: bundle type {0} has an open index")]
    OpenIndex(String),
    #[error("renaming is not injective: two labels map to {0}")]
    NotInjective(Label),
    #[error("operation {index}: {source}")]
    AtOp { index: usize, source: Box<CircuitError> },
}

/// Finite map from labels to wire kinds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LabelContext(BTreeMap<Label, WireKind>);

impl LabelContext {
    pub fn new() -> Self {
        LabelContext::default()
    }

    pub fn insert(&mut self, l: Label, k: WireKind) -> Result<(), CircuitError> {
        if self.0.contains_key(&l) {
            return Err(CircuitError::DuplicateLabel(l));
        }
        self.0.insert(l, k);
        Ok(())
    }

    pub fn get(&self, l: Label) -> Option<WireKind> {
        self.0.get(&l).copied()
    }

    pub fn contains(&self, l: Label) -> bool {
        self.0.contains_key(&l)
    }

    pub fn remove(&mut self, l: Label) -> Option<WireKind> {
        self.0.remove(&l)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, WireKind)> + '_ {
        self.0.iter().map(|(l, k)| (*l, *k))
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.0.keys().copied().collect()
    }

    /// Union of two contexts with disjoint domains.
    pub fn union(&self, other: &LabelContext) -> Result<LabelContext, CircuitError> {
        let mut out = self.clone();
        for (l, k) in other.iter() {
            out.insert(l, k)?;
        }
        Ok(out)
    }

    /// The sub-context on the given labels.
    pub fn restrict(&self, labels: &[Label]) -> Result<LabelContext, CircuitError> {
        let mut out = LabelContext::new();
        for l in labels {
            let k = self.get(*l).ok_or(CircuitError::MissingLabel(*l))?;
            out.insert(*l, k)?;
        }
        Ok(out)
    }
}

impl FromIterator<(Label, WireKind)> for LabelContext {
    fn from_iter<T: IntoIterator<Item = (Label, WireKind)>>(iter: T) -> Self {
        LabelContext(iter.into_iter().collect())
    }
}

impl fmt::Display for LabelContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|(l, k)| format!("{l}: {k}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// A structured value made only of labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Bundle {
    Unit,
    Label(Label),
    Pair(Box<Bundle>, Box<Bundle>),
    Nil,
    Cons(Box<Bundle>, Box<Bundle>),
}

impl Bundle {
    pub fn pair(a: Bundle, b: Bundle) -> Bundle {
        Bundle::Pair(Box::new(a), Box::new(b))
    }

    pub fn cons(a: Bundle, b: Bundle) -> Bundle {
        Bundle::Cons(Box::new(a), Box::new(b))
    }

    pub fn list(items: Vec<Bundle>) -> Bundle {
        items.into_iter().rev().fold(Bundle::Nil, |acc, x| Bundle::cons(x, acc))
    }

    /// Labels in left-to-right order, repetitions included.
    pub fn labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<Label>) {
        match self {
            Bundle::Unit | Bundle::Nil => {}
            Bundle::Label(l) => out.push(*l),
            Bundle::Pair(a, b) | Bundle::Cons(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    pub fn rename(&self, map: &BTreeMap<Label, Label>) -> Bundle {
        match self {
            Bundle::Unit | Bundle::Nil => self.clone(),
            Bundle::Label(l) => Bundle::Label(*map.get(l).unwrap_or(l)),
            Bundle::Pair(a, b) => Bundle::pair(a.rename(map), b.rename(map)),
            Bundle::Cons(a, b) => Bundle::cons(a.rename(map), b.rename(map)),
        }
    }
}

impl fmt::Display for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bundle::Unit => write!(f, "()"),
            Bundle::Label(l) => write!(f, "{l}"),
            Bundle::Pair(a, b) => write!(f, "({a}, {b})"),
            Bundle::Nil => write!(f, "[]"),
            Bundle::Cons(a, b) => match a.as_ref() {
                Bundle::Cons(..) => write!(f, "({a}) : {b}"),
                _ => write!(f, "{a} : {b}"),
            },
        }
    }
}

/// Infers the type of `b` under `q`: `b` must use every label of `q`
/// exactly once. The element type of an empty list defaults to `Unit`; use
/// [`check_bundle`] to check against a requested type instead.
pub fn wire_judgment(q: &LabelContext, b: &Bundle) -> Result<BundleType, CircuitError> {
    exact_use(q, b)?;
    infer_shape(q, b)
}

/// Checks `b` against the closed bundle type `t` under `q`, with every label
/// of `q` used exactly once.
pub fn check_bundle(q: &LabelContext, b: &Bundle, t: &BundleType) -> Result<(), CircuitError> {
    exact_use(q, b)?;
    check_shape(q, b, t, &Env::new())
}

fn exact_use(q: &LabelContext, b: &Bundle) -> Result<(), CircuitError> {
    let mut seen = BTreeSet::new();
    for l in b.labels() {
        if !q.contains(l) {
            return Err(CircuitError::MissingLabel(l));
        }
        if !seen.insert(l) {
            return Err(CircuitError::DuplicateLabel(l));
        }
    }
    if let Some(l) = q.labels().into_iter().find(|l| !seen.contains(l)) {
        return Err(CircuitError::UnusedLabel(l));
    }
    Ok(())
}

fn infer_shape(q: &LabelContext, b: &Bundle) -> Result<BundleType, CircuitError> {
    Ok(match b {
        Bundle::Unit => BundleType::Unit,
        Bundle::Label(l) => BundleType::Wire(q.get(*l).ok_or(CircuitError::MissingLabel(*l))?),
        Bundle::Pair(a, c) => BundleType::Tensor(Box::new(infer_shape(q, a)?), Box::new(infer_shape(q, c)?)),
        Bundle::Nil => BundleType::List(0.into(), Box::new(BundleType::Unit)),
        Bundle::Cons(..) => {
            let mut elem: Option<BundleType> = None;
            let mut len = 0u64;
            let mut cur = b;
            loop {
                match cur {
                    Bundle::Nil => break,
                    Bundle::Cons(h, t) => {
                        let ht = infer_shape(q, h)?;
                        elem = Some(match elem {
                            None => ht,
                            Some(prev) => unify(&prev, &ht)
                                .ok_or_else(|| CircuitError::HeterogeneousList(prev.to_string(), ht.to_string()))?,
                        });
                        len += 1;
                        cur = t;
                    }
                    other => {
                        return Err(CircuitError::ShapeMismatch {
                            bundle: other.to_string(),
                            expected: "a list".into(),
                        })
                    }
                }
            }
            BundleType::List(len.into(), Box::new(elem.expect("non-empty list")))
        }
    })
}

/// Joins two inferred element types; empty lists match any element type.
fn unify(a: &BundleType, b: &BundleType) -> Option<BundleType> {
    use crate::index::Index;
    match (a, b) {
        _ if a == b => Some(a.clone()),
        (BundleType::Tensor(a1, a2), BundleType::Tensor(b1, b2)) => {
            Some(BundleType::Tensor(Box::new(unify(a1, b1)?), Box::new(unify(a2, b2)?)))
        }
        (BundleType::List(n, x), BundleType::List(m, y)) if n == m => {
            if *n == Index::Const(0) {
                Some(a.clone())
            } else {
                Some(BundleType::List(n.clone(), Box::new(unify(x, y)?)))
            }
        }
        _ => None,
    }
}

fn check_shape(q: &LabelContext, b: &Bundle, t: &BundleType, env: &Env) -> Result<(), CircuitError> {
    let mismatch = || CircuitError::ShapeMismatch { bundle: b.to_string(), expected: t.to_string() };
    match (b, t) {
        (Bundle::Unit, BundleType::Unit) => Ok(()),
        (Bundle::Label(l), BundleType::Wire(k)) => {
            let found = q.get(*l).ok_or(CircuitError::MissingLabel(*l))?;
            if found == *k {
                Ok(())
            } else {
                Err(CircuitError::KindMismatch { label: *l, expected: *k, found })
            }
        }
        (Bundle::Pair(a, c), BundleType::Tensor(ta, tc)) => {
            check_shape(q, a, ta, env)?;
            check_shape(q, c, tc, env)
        }
        (Bundle::Nil | Bundle::Cons(..), BundleType::List(n, elem)) => {
            let n = n.eval(env).map_err(|_| CircuitError::OpenIndex(t.to_string()))?;
            let mut cur = b;
            for _ in 0..n {
                match cur {
                    Bundle::Cons(h, rest) => {
                        check_shape(q, h, elem, env)?;
                        cur = rest;
                    }
                    _ => return Err(mismatch()),
                }
            }
            if *cur == Bundle::Nil {
                Ok(())
            } else {
                Err(mismatch())
            }
        }
        _ => Err(mismatch()),
    }
}

/// Fresh labels for a closed bundle type, as a context and a bundle.
pub fn freshlabels(t: &BundleType, supply: &mut LabelSupply) -> Result<(LabelContext, Bundle), CircuitError> {
    let mut q = LabelContext::new();
    let b = fresh_bundle(t, supply, &mut q, &Env::new()).map_err(|_| CircuitError::OpenIndex(t.to_string()))?;
    Ok((q, b))
}

fn fresh_bundle(
    t: &BundleType,
    supply: &mut LabelSupply,
    q: &mut LabelContext,
    env: &Env,
) -> Result<Bundle, crate::index::IndexError> {
    Ok(match t {
        BundleType::Unit => Bundle::Unit,
        BundleType::Wire(k) => {
            let l = supply.fresh();
            q.insert(l, *k).expect("fresh label");
            Bundle::Label(l)
        }
        BundleType::Tensor(a, b) => {
            let a = fresh_bundle(a, supply, q, env)?;
            Bundle::pair(a, fresh_bundle(b, supply, q, env)?)
        }
        BundleType::List(n, elem) => {
            let n = n.eval(env)?;
            let mut items = Vec::new();
            for _ in 0..n {
                items.push(fresh_bundle(elem, supply, q, env)?);
            }
            Bundle::list(items)
        }
    })
}

/// One gate application: `consumed` wires in, `produced` wires out.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Op {
    pub gate: GateDecl,
    pub consumed: Bundle,
    pub produced: Bundle,
}

/// An input context followed by a sequence of gate applications. The output
/// context and width are maintained as operations are added.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Circuit {
    input: LabelContext,
    ops: Vec<Op>,
    outputs: LabelContext,
    width: u64,
}

impl Circuit {
    pub fn identity(q: LabelContext) -> Circuit {
        let width = q.len() as u64;
        Circuit { outputs: q.clone(), input: q, ops: Vec::new(), width }
    }

    /// Replays `ops` from `input`, validating each step.
    pub fn from_ops(input: LabelContext, ops: Vec<Op>) -> Result<Circuit, CircuitError> {
        let mut c = Circuit::identity(input);
        for (index, op) in ops.into_iter().enumerate() {
            c.push(op).map_err(|e| CircuitError::AtOp { index, source: Box::new(e) })?;
        }
        Ok(c)
    }

    pub fn input(&self) -> &LabelContext {
        &self.input
    }

    pub fn outputs(&self) -> &LabelContext {
        &self.outputs
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Maximum number of simultaneously live wires, counting reuse of
    /// discarded wires.
    pub fn width(&self) -> u64 {
        self.width
    }

    pub fn outputs_count(&self) -> u64 {
        self.outputs.len() as u64
    }

    /// Wires that were live at some point but are no longer outputs.
    pub fn discarded(&self) -> u64 {
        self.width - self.outputs_count()
    }

    /// Appends one operation after checking it against the live wires.
    pub fn push(&mut self, op: Op) -> Result<(), CircuitError> {
        let consumed = op.consumed.labels();
        let sub = self.outputs.restrict(&consumed)?;
        check_shape(&sub, &op.consumed, &op.gate.input, &Env::new())?;
        let mut remaining = self.outputs.clone();
        for l in &consumed {
            remaining.remove(*l);
        }
        let mut produced = LabelContext::new();
        assign_kinds(&op.produced, &op.gate.output, &mut produced)?;
        for (l, k) in produced.iter() {
            if remaining.contains(l) {
                return Err(CircuitError::LabelClash(l));
            }
            remaining.insert(l, k)?;
        }
        let before = self.outputs_count() as i64;
        let discarded = self.width as i64 - before;
        let inits = produced.len() as i64 - consumed.len() as i64;
        self.width += (inits - discarded).max(0) as u64;
        self.outputs = remaining;
        self.ops.push(op);
        Ok(())
    }

    /// Applies gate `g` to `consumed`, producing fresh labels.
    pub fn apply_gate(
        &self,
        g: &GateDecl,
        consumed: &Bundle,
        supply: &mut LabelSupply,
    ) -> Result<(Circuit, Bundle), CircuitError> {
        let (_, produced) = freshlabels(&g.output, supply)?;
        let mut c = self.clone();
        c.push(Op { gate: g.clone(), consumed: consumed.clone(), produced: produced.clone() })?;
        Ok((c, produced))
    }

    /// Every label mentioned, in order of first appearance.
    pub fn mentioned_labels(&self) -> Vec<Label> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        let mut note = |l: Label| {
            if seen.insert(l) {
                out.push(l);
            }
        };
        for (l, _) in self.input.iter() {
            note(l);
        }
        for op in &self.ops {
            for l in op.consumed.labels().into_iter().chain(op.produced.labels()) {
                note(l);
            }
        }
        out
    }
}

fn assign_kinds(b: &Bundle, t: &BundleType, out: &mut LabelContext) -> Result<(), CircuitError> {
    let mismatch = || CircuitError::ShapeMismatch { bundle: b.to_string(), expected: t.to_string() };
    match (b, t) {
        (Bundle::Unit, BundleType::Unit) => Ok(()),
        (Bundle::Label(l), BundleType::Wire(k)) => out.insert(*l, *k),
        (Bundle::Pair(a, c), BundleType::Tensor(ta, tc)) => {
            assign_kinds(a, ta, out)?;
            assign_kinds(c, tc, out)
        }
        (Bundle::Nil, BundleType::List(..)) => Ok(()),
        (Bundle::Cons(h, rest), BundleType::List(_, elem)) => {
            assign_kinds(h, elem, out)?;
            assign_kinds(rest, t, out)
        }
        _ => Err(mismatch()),
    }
}

/// Replays `ops` from `input` and returns the input and output contexts.
pub fn typecheck_circuit(input: &LabelContext, ops: &[Op]) -> Result<(LabelContext, LabelContext), CircuitError> {
    let c = Circuit::from_ops(input.clone(), ops.to_vec())?;
    Ok((c.input, c.outputs))
}

pub fn identity(q: LabelContext) -> Circuit {
    Circuit::identity(q)
}

pub fn width(c: &Circuit) -> u64 {
    c.width()
}

/// `c :: d`: the operations of `d` replayed after `c`. The inputs of `d`
/// must be live outputs of `c`.
pub fn concat(c: &Circuit, d: &Circuit) -> Result<Circuit, CircuitError> {
    for (l, k) in d.input.iter() {
        match c.outputs.get(l) {
            None => return Err(CircuitError::MissingLabel(l)),
            Some(found) if found != k => return Err(CircuitError::KindMismatch { label: l, expected: k, found }),
            Some(_) => {}
        }
    }
    let mut out = c.clone();
    let offset = c.ops.len();
    for (i, op) in d.ops.iter().enumerate() {
        out.push(op.clone()).map_err(|e| CircuitError::AtOp { index: offset + i, source: Box::new(e) })?;
    }
    Ok(out)
}

/// Renames labels; labels absent from `map` are kept. The induced map on
/// mentioned labels must be injective.
pub fn rename(c: &Circuit, map: &BTreeMap<Label, Label>) -> Result<Circuit, CircuitError> {
    let mut image = BTreeSet::new();
    for l in c.mentioned_labels() {
        let m = *map.get(&l).unwrap_or(&l);
        if !image.insert(m) {
            return Err(CircuitError::NotInjective(m));
        }
    }
    let input = c.input.iter().map(|(l, k)| (*map.get(&l).unwrap_or(&l), k)).collect();
    let ops = c
        .ops
        .iter()
        .map(|op| Op { gate: op.gate.clone(), consumed: op.consumed.rename(map), produced: op.produced.rename(map) })
        .collect();
    Circuit::from_ops(input, ops)
}

/// A completed circuit with its input and output interfaces.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoxedCircuit {
    pub input: Bundle,
    pub circuit: Circuit,
    pub output: Bundle,
    /// Set when this is the canonical literal of a named gate.
    pub gate: Option<String>,
}

impl BoxedCircuit {
    /// The one-operation circuit for `g`, with labels from `l0`.
    pub fn of_gate(g: &GateDecl) -> BoxedCircuit {
        let mut supply = LabelSupply::new();
        let (q, input) = freshlabels(&g.input, &mut supply).expect("closed gate signature");
        let (circuit, output) =
            Circuit::identity(q).apply_gate(g, &input, &mut supply).expect("gate applies to its own interface");
        BoxedCircuit { input, circuit, output, gate: Some(g.name.clone()) }
    }

    /// Interface types, checked against the circuit's contexts.
    pub fn interface(&self) -> Result<(BundleType, BundleType), CircuitError> {
        let t = wire_judgment(self.circuit.input(), &self.input)?;
        let u = wire_judgment(self.circuit.outputs(), &self.output)?;
        Ok((t, u))
    }
}

/// Appends `boxed` to `c` on the wires `at`. The boxed circuit is renamed so
/// that its inputs become `at` and every other label is fresh, then
/// concatenated. Returns the new circuit and the renamed outputs.
pub fn append_boxed(
    c: &Circuit,
    at: &Bundle,
    boxed: &BoxedCircuit,
    supply: &mut LabelSupply,
) -> Result<(Circuit, Bundle), CircuitError> {
    let at_labels = at.labels();
    let sub = c.outputs.restrict(&at_labels)?;
    let (t, _) = boxed.interface()?;
    check_bundle(&sub, at, &t)?;
    let mut map = BTreeMap::new();
    for (from, to) in boxed.input.labels().into_iter().zip(at_labels) {
        map.insert(from, to);
    }
    for l in boxed.circuit.mentioned_labels() {
        map.entry(l).or_insert_with(|| supply.fresh());
    }
    let renamed = rename(&boxed.circuit, &map)?;
    let out = boxed.output.rename(&map);
    Ok((concat(c, &renamed)?, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(labels: &[(u32, WireKind)]) -> LabelContext {
        labels.iter().map(|(l, k)| (Label(*l), *k)).collect()
    }

    const Q: WireKind = WireKind::Qubit;

    #[test]
    fn identity_width_is_context_size() {
        assert_eq!(Circuit::identity(LabelContext::new()).width(), 0);
        assert_eq!(Circuit::identity(ctx(&[(0, Q)])).width(), 1);
        let four = ctx(&[(0, Q), (1, Q), (2, Q), (3, Q)]);
        assert_eq!(Circuit::identity(four).width(), 4);
    }

    #[test]
    fn wire_judgments() {
        let q = ctx(&[(0, Q), (1, Q)]);
        let b = Bundle::pair(Bundle::Label(Label(0)), Bundle::Label(Label(1)));
        let qq = BundleType::Tensor(Box::new(BundleType::Wire(Q)), Box::new(BundleType::Wire(Q)));
        assert_eq!(wire_judgment(&q, &b), Ok(qq));
        let nil_t = BundleType::List(0.into(), Box::new(BundleType::Wire(Q)));
        assert_eq!(check_bundle(&LabelContext::new(), &Bundle::Nil, &nil_t), Ok(()));
        let one = ctx(&[(0, Q)]);
        let dup = Bundle::pair(Bundle::Label(Label(0)), Bundle::Label(Label(0)));
        assert_eq!(wire_judgment(&one, &dup), Err(CircuitError::DuplicateLabel(Label(0))));
    }

    #[test]
    fn dumb_not_has_width_two() {
        let mut s = LabelSupply::starting_at(1);
        let c = Circuit::identity(ctx(&[(0, Q)]));
        let (c, a) = c.apply_gate(&gate("INIT1").unwrap(), &Bundle::Unit, &mut s).unwrap();
        let pair = Bundle::pair(Bundle::Label(Label(0)), a);
        let (c, out) = c.apply_gate(&gate("CNOT").unwrap(), &pair, &mut s).unwrap();
        let Bundle::Pair(_, a) = out else { panic!() };
        let (c, _) = c.apply_gate(&gate("DISCARD").unwrap(), &a, &mut s).unwrap();
        assert_eq!(c.ops().len(), 3);
        assert_eq!(c.width(), 2);
        assert_eq!(c.outputs_count(), 1);
    }

    #[test]
    fn discard_then_init_reuses_wire() {
        let mut s = LabelSupply::starting_at(1);
        let c = Circuit::identity(ctx(&[(0, Q)]));
        let (c, _) = c.apply_gate(&gate("DISCARD").unwrap(), &Bundle::Label(Label(0)), &mut s).unwrap();
        assert_eq!(c.outputs_count(), 0);
        let (c, _) = c.apply_gate(&gate("INIT1").unwrap(), &Bundle::Unit, &mut s).unwrap();
        assert_eq!(c.width(), 1);
    }

    #[test]
    fn measurement_keeps_output_count() {
        let mut s = LabelSupply::starting_at(1);
        let c = Circuit::identity(ctx(&[(0, Q)]));
        let (c, b) = c.apply_gate(&gate("MEAS").unwrap(), &Bundle::Label(Label(0)), &mut s).unwrap();
        assert_eq!(c.outputs_count(), 1);
        assert_eq!(c.outputs().get(b.labels()[0]), Some(WireKind::Bit));
    }

    #[test]
    fn replay_reports_bad_ops() {
        let h = gate("H").unwrap();
        let missing = Op { gate: h.clone(), consumed: Bundle::Label(Label(5)), produced: Bundle::Label(Label(6)) };
        let err = typecheck_circuit(&ctx(&[(0, Q)]), &[missing]).unwrap_err();
        assert!(matches!(err, CircuitError::AtOp { index: 0, .. }));
        let cnot = gate("CNOT").unwrap();
        let cloning = Op {
            gate: cnot,
            consumed: Bundle::pair(Bundle::Label(Label(0)), Bundle::Label(Label(0))),
            produced: Bundle::pair(Bundle::Label(Label(1)), Bundle::Label(Label(2))),
        };
        assert!(typecheck_circuit(&ctx(&[(0, Q)]), &[cloning]).is_err());
        let ok = Op { gate: h, consumed: Bundle::Label(Label(0)), produced: Bundle::Label(Label(1)) };
        let (i, o) = typecheck_circuit(&ctx(&[(0, Q)]), &[ok]).unwrap();
        assert_eq!((i, o), (ctx(&[(0, Q)]), ctx(&[(1, Q)])));
    }

    #[test]
    fn concat_with_identity_is_neutral() {
        let mut s = LabelSupply::starting_at(2);
        let c = Circuit::identity(ctx(&[(0, Q), (1, Q)]));
        let (c, _) = c.apply_gate(&gate("H").unwrap(), &Bundle::Label(Label(0)), &mut s).unwrap();
        let id = Circuit::identity(c.outputs().clone());
        assert_eq!(concat(&c, &id).unwrap(), c);
    }

    #[test]
    fn concat_shares_one_wire() {
        let h = gate("H").unwrap();
        let c = Circuit::from_ops(
            ctx(&[(0, Q)]),
            vec![Op { gate: h.clone(), consumed: Bundle::Label(Label(0)), produced: Bundle::Label(Label(1)) }],
        )
        .unwrap();
        let d = Circuit::from_ops(
            ctx(&[(1, Q)]),
            vec![Op { gate: h, consumed: Bundle::Label(Label(1)), produced: Bundle::Label(Label(2)) }],
        )
        .unwrap();
        let cd = concat(&c, &d).unwrap();
        assert_eq!(cd.ops().len(), 2);
        assert_eq!(cd.outputs(), &ctx(&[(2, Q)]));
    }

    #[test]
    fn rename_round_trips() {
        let c = Circuit::identity(ctx(&[(0, Q)]));
        let fwd = BTreeMap::from([(Label(0), Label(7))]);
        let r = rename(&c, &fwd).unwrap();
        assert_eq!(r, Circuit::identity(ctx(&[(7, Q)])));
        let back = BTreeMap::from([(Label(7), Label(0))]);
        assert_eq!(rename(&r, &back).unwrap(), c);
        let two = Circuit::identity(ctx(&[(0, Q), (1, Q)]));
        let clash = BTreeMap::from([(Label(0), Label(1))]);
        assert!(matches!(rename(&two, &clash), Err(CircuitError::NotInjective(_))));
    }

    #[test]
    fn append_renames_and_concatenates() {
        let mut s = LabelSupply::starting_at(1);
        let c = Circuit::identity(ctx(&[(0, Q)]));
        let hbox = BoxedCircuit::of_gate(&gate("H").unwrap());
        let (c2, out) = append_boxed(&c, &Bundle::Label(Label(0)), &hbox, &mut s).unwrap();
        assert_eq!(c2.width(), 1);
        assert_eq!(c2.ops().len(), 1);
        assert_eq!(out, Bundle::Label(Label(1)));

        let init = BoxedCircuit::of_gate(&gate("INIT1").unwrap());
        let (c3, _) = append_boxed(&c2, &Bundle::Unit, &init, &mut s).unwrap();
        assert_eq!(c3.width(), 2);

        let q2 = ctx(&[(0, Q), (1, Q)]);
        let mut s = LabelSupply::starting_at(2);
        let cnot = BoxedCircuit::of_gate(&gate("CNOT").unwrap());
        let at = Bundle::pair(Bundle::Label(Label(0)), Bundle::Label(Label(1)));
        let (_, out) = append_boxed(&Circuit::identity(q2), &at, &cnot, &mut s).unwrap();
        assert_eq!(out, Bundle::pair(Bundle::Label(Label(2)), Bundle::Label(Label(3))));
    }

    #[test]
    fn freshlabels_for_lists() {
        let mut s = LabelSupply::new();
        let t = BundleType::List(3.into(), Box::new(BundleType::Wire(Q)));
        let (q, b) = freshlabels(&t, &mut s).unwrap();
        assert_eq!(q.len(), 3);
        assert_eq!(check_bundle(&q, &b, &t), Ok(()));
        let open = BundleType::List(crate::index::Index::var("i"), Box::new(BundleType::Wire(Q)));
        assert!(matches!(freshlabels(&open, &mut s), Err(CircuitError::OpenIndex(_))));
    }
}
