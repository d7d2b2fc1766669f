//! Example programs shipped with the crate.

/// `(name, source)` for every bundled program.
pub const PROGRAMS: &[(&str, &str)] = &[
    ("dumbnot", include_str!("../../../stdlib/dumbnot.pqr")),
    ("rev", include_str!("../../../stdlib/rev.pqr")),
    ("qlen", include_str!("../../../stdlib/qlen.pqr")),
    ("hadamardn", include_str!("../../../stdlib/hadamardn.pqr")),
    ("iter", include_str!("../../../stdlib/iter.pqr")),
    ("qft", include_str!("../../../stdlib/qft.pqr")),
];

pub fn source(name: &str) -> Option<&'static str> {
    PROGRAMS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}
