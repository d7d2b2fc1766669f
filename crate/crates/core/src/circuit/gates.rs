//! The elementary operations circuits are built from.

use crate::syntax::{BundleType, WireKind};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GateDecl {
    pub name: String,
    pub input: BundleType,
    pub output: BundleType,
    /// Net number of wires created: outputs minus inputs.
    pub inits: i64,
}

fn q() -> BundleType {
    BundleType::Wire(WireKind::Qubit)
}

fn b() -> BundleType {
    BundleType::Wire(WireKind::Bit)
}

fn qq() -> BundleType {
    BundleType::Tensor(Box::new(q()), Box::new(q()))
}

fn decl(name: &str, input: BundleType, output: BundleType) -> GateDecl {
    let env = Default::default();
    let ins = input.wire_count(&env).expect("closed gate signature") as i64;
    let outs = output.wire_count(&env).expect("closed gate signature") as i64;
    GateDecl { name: name.to_string(), input, output, inits: outs - ins }
}

/// Names of the fixed gates, in registry order.
pub const GATE_NAMES: [&str; 9] = ["H", "CNOT", "INIT0", "INIT1", "DISCARD", "MEAS", "CINIT0", "CINIT1", "CDISCARD"];

/// Looks up a fixed gate or an `R{n}` rotation by name.
pub fn gate(name: &str) -> Option<GateDecl> {
    Some(match name {
        "H" => decl(name, q(), q()),
        "CNOT" => decl(name, qq(), qq()),
        "INIT0" | "INIT1" => decl(name, BundleType::Unit, q()),
        "DISCARD" => decl(name, q(), BundleType::Unit),
        "MEAS" => decl(name, q(), b()),
        "CINIT0" | "CINIT1" => decl(name, BundleType::Unit, b()),
        "CDISCARD" => decl(name, b(), BundleType::Unit),
        _ => {
            let n: u64 = name.strip_prefix('R')?.parse().ok()?;
            rotation(n)
        }
    })
}

/// The controlled rotation `R{n}` on two qubits.
pub fn rotation(n: u64) -> GateDecl {
    decl(&format!("R{n}"), qq(), qq())
}

/// Every fixed gate. Rotations form an open family and are built on demand.
pub fn gate_registry() -> Vec<GateDecl> {
    GATE_NAMES.iter().filter_map(|n| gate(n)).collect()
}

/// Width of the one-gate circuit: the larger of its two interfaces.
pub fn gate_width(g: &GateDecl) -> u64 {
    let env = Default::default();
    let i = g.input.wire_count(&env).unwrap_or(0);
    let o = g.output.wire_count(&env).unwrap_or(0);
    i.max(o)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signatures() {
        let h = gate("H").unwrap();
        assert_eq!((h.input.clone(), h.output.clone()), (q(), q()));
        let m = gate("MEAS").unwrap();
        assert_eq!((m.input, m.output), (q(), b()));
        assert_eq!(gate("INIT1").unwrap().inits, 1);
        assert_eq!(gate("DISCARD").unwrap().inits, -1);
        assert_eq!(gate("CNOT").unwrap().inits, 0);
        assert_eq!(gate("R7").unwrap().name, "R7");
        assert!(gate("R").is_none());
        assert!(gate("TOFFOLI").is_none());
        assert_eq!(gate_registry().len(), GATE_NAMES.len());
    }

    #[test]
    fn one_gate_widths() {
        assert_eq!(gate_width(&gate("CNOT").unwrap()), 2);
        assert_eq!(gate_width(&gate("INIT0").unwrap()), 1);
        assert_eq!(gate_width(&gate("DISCARD").unwrap()), 1);
    }
}
