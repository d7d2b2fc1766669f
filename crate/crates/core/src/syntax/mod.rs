//! Surface syntax: types, terms, programs, parsing and printing.

pub mod ast;
mod inline;
mod parse;
mod print;
mod subst;
mod types;

pub use ast::{Def, DefBody, Name, NatOp, Prim, Program, Span, Term, Value};
pub use inline::instantiate;
pub use parse::{is_keyword, parse_index, parse_judgment, parse_program, parse_term, parse_type, Judgment, ParseError};
pub use print::{pretty_program, pretty_term};
pub use types::{BundleType, Type, WireKind};
