//! Types and bundle types.

use std::fmt;

use crate::index::{Env, Index, IndexError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum WireKind {
    Bit,
    Qubit,
}

impl fmt::Display for WireKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WireKind::Bit => write!(f, "Bit"),
            WireKind::Qubit => write!(f, "Qubit"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Type {
    Unit,
    Wire(WireKind),
    Bang(Box<Type>),
    Tensor(Box<Type>, Box<Type>),
    /// `A -o[width, capture] B`.
    Arrow {
        dom: Box<Type>,
        cod: Box<Type>,
        width: Index,
        capture: Index,
    },
    List(Index, Box<Type>),
    Circ(Index, BundleType, BundleType),
    Nat,
}

/// The types of wire bundles: the interfaces of circuits.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BundleType {
    Unit,
    Wire(WireKind),
    Tensor(Box<BundleType>, Box<BundleType>),
    List(Index, Box<BundleType>),
}

impl Type {
    pub fn qubit() -> Type {
        Type::Wire(WireKind::Qubit)
    }

    pub fn bit() -> Type {
        Type::Wire(WireKind::Bit)
    }

    pub fn bang(a: Type) -> Type {
        Type::Bang(Box::new(a))
    }

    pub fn tensor(a: Type, b: Type) -> Type {
        Type::Tensor(Box::new(a), Box::new(b))
    }

    pub fn list(len: Index, a: Type) -> Type {
        Type::List(len, Box::new(a))
    }

    pub fn arrow(dom: Type, cod: Type, width: Index, capture: Index) -> Type {
        Type::Arrow { dom: Box::new(dom), cod: Box::new(cod), width, capture }
    }

    /// Parameter types may be freely duplicated and discarded.
    pub fn is_param(&self) -> bool {
        match self {
            Type::Unit | Type::Bang(_) | Type::Circ(..) | Type::Nat => true,
            Type::Wire(_) | Type::Arrow { .. } => false,
            Type::Tensor(a, b) => a.is_param() && b.is_param(),
            Type::List(_, a) => a.is_param(),
        }
    }

    pub fn as_bundle(&self) -> Option<BundleType> {
        Some(match self {
            Type::Unit => BundleType::Unit,
            Type::Wire(k) => BundleType::Wire(*k),
            Type::Tensor(a, b) => BundleType::Tensor(Box::new(a.as_bundle()?), Box::new(b.as_bundle()?)),
            Type::List(i, a) => BundleType::List(i.clone(), Box::new(a.as_bundle()?)),
            _ => return None,
        })
    }

    /// Applies `f` to every index in the type.
    pub fn map_indices(&self, f: &mut dyn FnMut(&Index) -> Index) -> Type {
        match self {
            Type::Unit | Type::Wire(_) | Type::Nat => self.clone(),
            Type::Bang(a) => Type::bang(a.map_indices(f)),
            Type::Tensor(a, b) => Type::tensor(a.map_indices(f), b.map_indices(f)),
            Type::Arrow { dom, cod, width, capture } => {
                let dom = dom.map_indices(f);
                let cod = cod.map_indices(f);
                Type::arrow(dom, cod, f(width), f(capture))
            }
            Type::List(i, a) => {
                let i = f(i);
                Type::list(i, a.map_indices(f))
            }
            Type::Circ(i, t, u) => {
                let i = f(i);
                Type::Circ(i, t.map_indices(f), u.map_indices(f))
            }
        }
    }

    pub fn for_each_index(&self, f: &mut dyn FnMut(&Index)) {
        match self {
            Type::Unit | Type::Wire(_) | Type::Nat => {}
            Type::Bang(a) => a.for_each_index(f),
            Type::Tensor(a, b) => {
                a.for_each_index(f);
                b.for_each_index(f);
            }
            Type::Arrow { dom, cod, width, capture } => {
                dom.for_each_index(f);
                cod.for_each_index(f);
                f(width);
                f(capture);
            }
            Type::List(i, a) => {
                f(i);
                a.for_each_index(f);
            }
            Type::Circ(i, t, u) => {
                f(i);
                t.for_each_index(f);
                u.for_each_index(f);
            }
        }
    }

    /// Capture-avoiding index substitution `A{repl/var}`.
    pub fn subst_index(&self, var: &str, repl: &Index) -> Type {
        self.map_indices(&mut |i| i.subst(var, repl))
    }

    pub fn free_index_vars(&self) -> std::collections::BTreeSet<String> {
        let mut out = std::collections::BTreeSet::new();
        self.for_each_index(&mut |i| out.extend(i.free_vars()));
        out
    }

    pub fn normalized(&self) -> Type {
        self.map_indices(&mut crate::index::normalize)
    }
}

impl BundleType {
    pub fn to_type(&self) -> Type {
        match self {
            BundleType::Unit => Type::Unit,
            BundleType::Wire(k) => Type::Wire(*k),
            BundleType::Tensor(a, b) => Type::tensor(a.to_type(), b.to_type()),
            BundleType::List(i, a) => Type::list(i.clone(), a.to_type()),
        }
    }

    pub fn map_indices(&self, f: &mut dyn FnMut(&Index) -> Index) -> BundleType {
        match self {
            BundleType::Unit | BundleType::Wire(_) => self.clone(),
            BundleType::Tensor(a, b) => BundleType::Tensor(Box::new(a.map_indices(f)), Box::new(b.map_indices(f))),
            BundleType::List(i, a) => {
                let i = f(i);
                BundleType::List(i, Box::new(a.map_indices(f)))
            }
        }
    }

    pub fn for_each_index(&self, f: &mut dyn FnMut(&Index)) {
        match self {
            BundleType::Unit | BundleType::Wire(_) => {}
            BundleType::Tensor(a, b) => {
                a.for_each_index(f);
                b.for_each_index(f);
            }
            BundleType::List(i, a) => {
                f(i);
                a.for_each_index(f);
            }
        }
    }

    /// Number of wires in a bundle of this type, for closed indices.
    pub fn wire_count(&self, env: &Env) -> Result<u64, IndexError> {
        Ok(match self {
            BundleType::Unit => 0,
            BundleType::Wire(_) => 1,
            BundleType::Tensor(a, b) => {
                a.wire_count(env)?.checked_add(b.wire_count(env)?).ok_or(IndexError::Overflow)?
            }
            BundleType::List(i, a) => i.eval(env)?.checked_mul(a.wire_count(env)?).ok_or(IndexError::Overflow)?,
        })
    }
}

// Printing: arrows are lowest and right-associative, tensors are
// left-associative, `!` and `List[I]` are tight prefixes.

const P_ARROW: u8 = 0;
const P_TENSOR: u8 = 1;
const P_PREFIX: u8 = 2;

impl Type {
    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
        match self {
            Type::Unit => write!(f, "Unit"),
            Type::Nat => write!(f, "Nat"),
            Type::Wire(k) => write!(f, "{k}"),
            Type::Bang(a) => {
                write!(f, "!")?;
                a.fmt_prec(f, P_PREFIX)
            }
            Type::List(i, a) => {
                write!(f, "List[{i}] ")?;
                a.fmt_prec(f, P_PREFIX)
            }
            Type::Circ(i, t, u) => write!(f, "Circ[{i}]({t}, {u})"),
            Type::Tensor(a, b) => {
                let paren = prec > P_TENSOR;
                if paren {
                    write!(f, "(")?;
                }
                a.fmt_prec(f, P_TENSOR)?;
                write!(f, " * ")?;
                b.fmt_prec(f, P_PREFIX)?;
                if paren {
                    write!(f, ")")?;
                }
                Ok(())
            }
            Type::Arrow { dom, cod, width, capture } => {
                let paren = prec > P_ARROW;
                if paren {
                    write!(f, "(")?;
                }
                dom.fmt_prec(f, P_TENSOR)?;
                write!(f, " -o[{width},{capture}] ")?;
                cod.fmt_prec(f, P_ARROW)?;
                if paren {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, P_ARROW)
    }
}

impl fmt::Display for BundleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_type().fmt(f)
    }
}
