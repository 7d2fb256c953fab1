//! Solver engine for Diophantine equations and systems.
//!
//! The pipeline classifies each problem, applies obstruction checks and
//! specialized solvers, and returns either a machine-checkable
//! non-solvability certificate, a provably complete finite solution set,
//! a parametric solution family, or an inconclusive report with a trace.

pub mod algebraic;
pub mod cli;
pub mod engine;
pub mod expr;
pub mod linear;
pub mod modular;
pub mod parse;
pub mod pell;
pub mod search;
pub mod verdict;

pub use engine::{solve, solve_problem, Config};
pub use expr::{Domain, NormalizedEquation, Problem};
pub use parse::parse_problem;
pub use verdict::Verdict;
