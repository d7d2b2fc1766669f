//! Structural subtyping. Index side conditions are returned as constraints
//! for the caller to decide.

use crate::index::{Index, Relation};
use crate::syntax::{BundleType, Type};

/// An index side condition `lhs rel rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub relation: Relation,
    pub lhs: Index,
    pub rhs: Index,
}

/// Collects the constraints under which `a <: b`, or explains the shape
/// mismatch.
pub fn subtype_constraints(a: &Type, b: &Type) -> Result<Vec<Constraint>, String> {
    let mut out = Vec::new();
    sub(a, b, &mut out)?;
    Ok(out)
}

fn leq(out: &mut Vec<Constraint>, lhs: &Index, rhs: &Index) {
    out.push(Constraint { relation: Relation::Leq, lhs: lhs.clone(), rhs: rhs.clone() });
}

fn eq(out: &mut Vec<Constraint>, lhs: &Index, rhs: &Index) {
    out.push(Constraint { relation: Relation::Eq, lhs: lhs.clone(), rhs: rhs.clone() });
}

fn sub(a: &Type, b: &Type, out: &mut Vec<Constraint>) -> Result<(), String> {
    match (a, b) {
        (Type::Unit, Type::Unit) | (Type::Nat, Type::Nat) => Ok(()),
        (Type::Wire(x), Type::Wire(y)) if x == y => Ok(()),
        (Type::Bang(x), Type::Bang(y)) => sub(x, y, out),
        (Type::Tensor(a1, a2), Type::Tensor(b1, b2)) => {
            sub(a1, b1, out)?;
            sub(a2, b2, out)
        }
        (
            Type::Arrow { dom: d1, cod: c1, width: w1, capture: k1 },
            Type::Arrow { dom: d2, cod: c2, width: w2, capture: k2 },
        ) => {
            sub(d2, d1, out)?;
            sub(c1, c2, out)?;
            leq(out, w1, w2);
            eq(out, k1, k2);
            Ok(())
        }
        (Type::List(i, x), Type::List(j, y)) => {
            eq(out, i, j);
            sub(x, y, out)
        }
        (Type::Circ(i, t1, u1), Type::Circ(j, t2, u2)) => {
            leq(out, i, j);
            bundle_equiv(t1, t2, out)?;
            bundle_equiv(u1, u2, out)
        }
        _ => Err(format!("`{a}` is not a subtype of `{b}`")),
    }
}

fn bundle_equiv(t: &BundleType, u: &BundleType, out: &mut Vec<Constraint>) -> Result<(), String> {
    let (t, u) = (t.to_type(), u.to_type());
    sub(&t, &u, out)?;
    sub(&u, &t, out)
}
