//! Semantics-preserving simplification of index terms.
//!
//! Terms are brought into a polynomial canonical form over atoms. Monus is
//! resolved when the sign of the difference is known, `max` entries are
//! flattened and pruned by dominance, and bounded maxima over constant
//! ranges are unrolled.

use super::poly::Poly;
use super::Index;

/// Largest constant range that is unrolled into binary maxima.
const UNROLL_LIMIT: i128 = 16;

/// Simplifies `i`. For every environment, `normalize(i)` and `i` evaluate
/// to the same natural.
pub fn normalize(i: &Index) -> Index {
    let mut n = Normalizer { binders: Vec::new() };
    match n.poly(i) {
        Some(p) => p.to_index(),
        None => i.clone(),
    }
}

/// Polynomial form of an index outside any binder; `None` on overflow.
pub(crate) fn to_poly(i: &Index) -> Option<Poly> {
    Normalizer { binders: Vec::new() }.poly(i)
}

struct Normalizer {
    /// Enclosing bounded-max binders with their bounds, innermost last.
    /// Inside the body of `max[x < I] J` we know `x + 1 <= I`.
    binders: Vec<(String, Poly)>,
}

impl Normalizer {
    fn poly(&mut self, i: &Index) -> Option<Poly> {
        match i {
            Index::Const(n) => Some(Poly::constant(i128::from(*n))),
            Index::Var(v) => Some(Poly::atom(Index::Var(v.clone()))),
            Index::Plus(a, b) => self.poly(a)?.add(&self.poly(b)?),
            Index::Times(a, b) => self.poly(a)?.mul(&self.poly(b)?),
            Index::Monus(a, b) => self.monus(a, b),
            Index::Max(..) => {
                let mut entries = Vec::new();
                self.collect_max(i, &mut entries)?;
                self.max_of(entries)
            }
            Index::BoundedMax(x, bound, body) => self.bounded_max(x, bound, body),
        }
    }

    fn monus(&mut self, a: &Index, b: &Index) -> Option<Poly> {
        let pa = self.poly(a)?;
        if let Some(Index::Monus(p, n)) = pa.as_atom() {
            // (p - n) - b  ==  p - (n + b)
            let merged = Index::monus((**p).clone(), Index::plus((**n).clone(), b.clone()));
            return self.poly(&merged);
        }
        let pb = self.poly(b)?;
        let d = pa.sub(&pb)?;
        if d.is_nonneg() {
            return Some(d);
        }
        if d.is_nonpos() {
            return Some(Poly::zero());
        }
        if self.exact_in_binder(&d) {
            return Some(d);
        }
        let (p, n) = d.split();
        Some(Poly::atom(Index::monus(p.to_index_nonneg(), n.to_index_nonneg())))
    }

    /// Whether `d >= 0` follows from some binder's range constraint, i.e.
    /// `d - k*(I - 1 - x)` has non-negative coefficients for a small `k`.
    fn exact_in_binder(&self, d: &Poly) -> bool {
        for (x, bound) in self.binders.iter().rev() {
            let Some(slack) = bound.sub(&Poly::constant(1)).and_then(|p| p.sub(&Poly::atom(Index::Var(x.clone()))))
            else {
                continue;
            };
            for k in 1..=3 {
                if let Some(rest) = slack.scale(k).and_then(|s| d.sub(&s)) {
                    if rest.is_nonneg() {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn collect_max(&mut self, i: &Index, out: &mut Vec<Poly>) -> Option<()> {
        match i {
            Index::Max(a, b) => {
                self.collect_max(a, out)?;
                self.collect_max(b, out)
            }
            other => {
                let p = self.poly(other)?;
                if let Some(atom @ Index::Max(..)) = p.as_atom() {
                    let atom = atom.clone();
                    self.collect_max(&atom, out)
                } else {
                    out.push(p);
                    Some(())
                }
            }
        }
    }

    fn max_of(&mut self, entries: Vec<Poly>) -> Option<Poly> {
        let mut entries = prune(entries);
        // max(K, max[x < v] B) with B nondecreasing in x: the bounded max is
        // B{v-1/x} when v >= 1 and 0 otherwise, so it may be replaced by
        // B{v-1/x} whenever that term at v = 0 is covered by another entry.
        let mut changed = false;
        for k in 0..entries.len() {
            let Some(Index::BoundedMax(x, bound, body)) = entries[k].as_atom().cloned() else {
                continue;
            };
            let Index::Var(v) = bound.as_ref() else { continue };
            let Some(top) = self.monotone_top(&x, &Poly::atom((*bound).clone()), &body) else {
                continue;
            };
            let Some(at_zero) = self.poly(&top.subst(v, &Index::Const(0))) else { continue };
            let covered = at_zero.is_zero()
                || entries
                    .iter()
                    .enumerate()
                    .any(|(j, other)| j != k && other.sub(&at_zero).map(|d| d.is_nonneg()).unwrap_or(false));
            if covered {
                entries[k] = self.poly(&top)?;
                changed = true;
            }
        }
        if changed {
            entries = prune(entries);
        }
        match entries.len() {
            0 => Some(Poly::zero()),
            1 => entries.pop(),
            _ => {
                let mut idx: Vec<Index> = entries.iter().map(Poly::to_index).collect();
                idx.sort();
                idx.dedup();
                let mut it = idx.into_iter().rev();
                let last = it.next()?;
                let folded = it.fold(last, |acc, e| Index::max(e, acc));
                Some(Poly::atom(folded))
            }
        }
    }

    fn bounded_max(&mut self, x: &str, bound: &Index, body: &Index) -> Option<Poly> {
        let pb = self.poly(bound)?;
        if let Some(k) = pb.as_const() {
            if k <= 0 {
                return Some(Poly::zero());
            }
            if k <= UNROLL_LIMIT {
                let mut entries = Vec::new();
                for j in 0..k {
                    let inst = body.subst(x, &Index::Const(j as u64));
                    self.collect_max(&inst, &mut entries)?;
                }
                return self.max_of(entries);
            }
        }
        self.binders.push((x.to_string(), pb.clone()));
        let body_p = self.poly(body);
        self.binders.pop();
        let body_p = body_p?;
        // Leaving the binder: re-normalize through an index so that signed
        // forms only valid inside the range do not escape.
        let body_i = body_p.to_index();
        if let Some(top) = self.monotone_top(x, &pb, &body_i) {
            if pb.sub(&Poly::constant(1)).is_some_and(|p| p.is_nonneg()) {
                return self.poly(&top);
            }
            if let Some(Index::Var(v)) = pb.as_atom() {
                if self.poly(&top.subst(v, &Index::Const(0)))?.is_zero() {
                    return self.poly(&top);
                }
            }
        }
        let atom = Index::bounded_max(x, pb.to_index(), body_i);
        if atom.is_closed() {
            if let Ok(n) = atom.eval(&Default::default()) {
                return Some(Poly::constant(i128::from(n)));
            }
        }
        Some(Poly::atom(atom))
    }
}

impl Normalizer {
    /// For `max[x < I] body` with a body nondecreasing in `x` over the range,
    /// the value of the bounded max whenever `I >= 1`, namely the body at
    /// `x = I - 1`.
    fn monotone_top(&mut self, x: &str, bound: &Poly, body: &Index) -> Option<Index> {
        self.binders.push((x.to_string(), bound.clone()));
        let body_p = self.poly(body);
        self.binders.pop();
        let body_p = body_p?;
        if !body_p.nondecreasing_in(x) {
            return None;
        }
        let last = bound.sub(&Poly::constant(1))?;
        // Exact at x = I - 1, which lies in the range.
        Some(body_p.subst_var(x, &last)?.to_index())
    }
}

/// Drops zero entries, duplicates and entries dominated by another entry.
fn prune(entries: Vec<Poly>) -> Vec<Poly> {
    let mut uniq: Vec<Poly> = Vec::new();
    for e in entries {
        if e.as_const() == Some(0) || uniq.contains(&e) {
            continue;
        }
        uniq.push(e);
    }
    let mut keep = Vec::new();
    for (k, p) in uniq.iter().enumerate() {
        let dominated =
            uniq.iter().enumerate().any(|(j, q)| j != k && q.sub(p).map(|d| d.is_nonneg()).unwrap_or(false));
        if !dominated {
            keep.push(p.clone());
        }
    }
    keep
}
