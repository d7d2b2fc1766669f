//! Type checking and evaluation for a quantum circuit description language
//! whose types carry static upper bounds on circuit width.

pub mod circuit;
pub mod eval;
pub mod index;
pub mod stdlib;
pub mod syntax;
pub mod typeck;

pub use eval::{run_program, RunError, RunResult};
pub use index::{Index, Solver, Verdict};
pub use syntax::{parse_program, Program, Type};
pub use typeck::{check_program, CheckError, CheckedProgram, Mode};
