//! Integer polynomials over opaque atoms.
//!
//! Atoms are variables or normalized non-polynomial nodes (monus, max,
//! bounded max). Every atom denotes a natural, so a polynomial whose
//! coefficients are all non-negative is non-negative everywhere.

use std::collections::BTreeMap;

use super::Index;

/// A product of atoms with multiplicities, sorted by atom.
pub(crate) type Monomial = Vec<(Index, u32)>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub(crate) struct Poly {
    terms: BTreeMap<Monomial, i128>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly::default()
    }

    pub fn constant(n: i128) -> Poly {
        let mut p = Poly::zero();
        if n != 0 {
            p.terms.insert(Vec::new(), n);
        }
        p
    }

    pub fn atom(a: Index) -> Poly {
        let mut p = Poly::zero();
        p.terms.insert(vec![(a, 1)], 1);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_const(&self) -> Option<i128> {
        match self.terms.len() {
            0 => Some(0),
            1 => self.terms.get(&Vec::new()).copied(),
            _ => None,
        }
    }

    /// The single atom of a polynomial equal to exactly one atom.
    pub fn as_atom(&self) -> Option<&Index> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next()?;
        if *c == 1 && m.len() == 1 && m[0].1 == 1 {
            Some(&m[0].0)
        } else {
            None
        }
    }

    pub fn is_nonneg(&self) -> bool {
        self.terms.values().all(|c| *c >= 0)
    }

    pub fn is_nonpos(&self) -> bool {
        self.terms.values().all(|c| *c <= 0)
    }

    pub fn add(&self, other: &Poly) -> Option<Poly> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            let e = out.terms.entry(m.clone()).or_insert(0);
            *e = e.checked_add(*c)?;
            if *e == 0 {
                out.terms.remove(m);
            }
        }
        Some(out)
    }

    pub fn neg(&self) -> Option<Poly> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.checked_neg()?);
        }
        Some(out)
    }

    pub fn sub(&self, other: &Poly) -> Option<Poly> {
        self.add(&other.neg()?)
    }

    pub fn scale(&self, k: i128) -> Option<Poly> {
        let mut out = Poly::zero();
        if k == 0 {
            return Some(out);
        }
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.checked_mul(k)?);
        }
        Some(out)
    }

    pub fn mul(&self, other: &Poly) -> Option<Poly> {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = mul_monomials(m1, m2);
                let c = c1.checked_mul(*c2)?;
                let e = out.terms.entry(m.clone()).or_insert(0);
                *e = e.checked_add(c)?;
                if *e == 0 {
                    out.terms.remove(&m);
                }
            }
        }
        Some(out)
    }

    /// Splits into non-negative parts `(P, N)` with `self = P - N`.
    pub fn split(&self) -> (Poly, Poly) {
        let mut pos = Poly::zero();
        let mut neg = Poly::zero();
        for (m, c) in &self.terms {
            if *c > 0 {
                pos.terms.insert(m.clone(), *c);
            } else {
                neg.terms.insert(m.clone(), -*c);
            }
        }
        (pos, neg)
    }

    /// Whether the polynomial is nondecreasing in the variable `x`: `x` occurs
    /// only as a bare factor, and only in monomials with positive
    /// coefficients.
    pub fn nondecreasing_in(&self, x: &str) -> bool {
        self.terms.iter().all(|(m, c)| {
            let bare = m.iter().any(|(a, _)| matches!(a, Index::Var(v) if v == x));
            let hidden = m.iter().any(|(a, _)| !matches!(a, Index::Var(_)) && a.occurs_free(x));
            !hidden && (!bare || *c > 0)
        })
    }

    /// Replaces the variable atom `x` by `repl`.
    pub fn subst_var(&self, x: &str, repl: &Poly) -> Option<Poly> {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut term = Poly::constant(*c);
            for (a, e) in m {
                let factor = if matches!(a, Index::Var(v) if v == x) { repl.clone() } else { Poly::atom(a.clone()) };
                for _ in 0..*e {
                    term = term.mul(&factor)?;
                }
            }
            out = out.add(&term)?;
        }
        Some(out)
    }

    /// Converts a polynomial with non-negative coefficients into an index.
    /// Higher-degree monomials come first and the constant comes last.
    pub fn to_index_nonneg(&self) -> Index {
        let mut ordered: Vec<(&Monomial, &i128)> = self.terms.iter().collect();
        ordered.sort_by(|(ma, _), (mb, _)| {
            let da: u32 = ma.iter().map(|(_, e)| e).sum();
            let db: u32 = mb.iter().map(|(_, e)| e).sum();
            db.cmp(&da).then_with(|| ma.cmp(mb))
        });
        let mut acc: Option<Index> = None;
        for (m, c) in ordered {
            let c = u64::try_from(*c).expect("non-negative coefficient");
            let term = monomial_index(m, c);
            acc = Some(match acc {
                None => term,
                Some(prev) => Index::plus(prev, term),
            });
        }
        acc.unwrap_or(Index::Const(0))
    }

    /// Converts any polynomial, rendering negative parts as `P - N`. The
    /// result equals the polynomial wherever the polynomial is non-negative.
    pub fn to_index(&self) -> Index {
        if self.is_nonneg() {
            return self.to_index_nonneg();
        }
        let (p, n) = self.split();
        if p.is_zero() {
            return Index::Const(0);
        }
        Index::monus(p.to_index_nonneg(), n.to_index_nonneg())
    }
}

fn mul_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut map: BTreeMap<Index, u32> = BTreeMap::new();
    for (x, e) in a.iter().chain(b.iter()) {
        *map.entry(x.clone()).or_insert(0) += e;
    }
    map.into_iter().collect()
}

fn monomial_index(m: &Monomial, c: u64) -> Index {
    let mut factors: Vec<Index> = Vec::new();
    if c != 1 || m.is_empty() {
        factors.push(Index::Const(c));
    }
    for (a, e) in m {
        for _ in 0..*e {
            factors.push(a.clone());
        }
    }
    let mut it = factors.into_iter();
    let first = it.next().expect("at least one factor");
    it.fold(first, Index::times)
}
