//! Minimum-cost Herbrand models of first-order clause sets by
//! branch-price-and-cut.
//!
//! Ground atoms become 0/1 variables and ground clauses become clausal
//! inequalities `Σ_neg (1 − x) + Σ_pos x ≥ 1`. Neither is enumerated up front:
//! a depth-first search over the support of the current LP solution finds
//! violated ground clauses, and the atoms of each cut's positive literals are
//! given columns as the cut is added.
//!
//! The crate is `no_std` with `alloc`. Parsing, clocks and IO live in the
//! `hbpc` crate; time limits reach the solver through [`solver::Monitor`].

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod guard;
pub mod intern;
pub mod lp;
pub mod mln;
pub mod problem;
pub mod separation;
pub mod solver;
pub mod term;

pub use error::{CostError, GuardError, LpError, MlnError, NothingToBranch, ProblemError, SolveError, TermError};
pub use intern::{AtomId, AtomTable};
pub use problem::{Problem, ProblemBuilder};
pub use term::{AtomPattern, GroundAtom, Pattern, Substitution, Symbol, Term};
