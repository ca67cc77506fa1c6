use alloc::string::String;

use thiserror::Error;

use crate::term::Symbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("non-ground atom")]
    NonGround,
    #[error("non-matchable pattern")]
    NonMatchable,
    #[error("unbound variable {}", .0.as_str())]
    Unbound(Symbol),
    #[error("arithmetic fault: {0}")]
    ArithFault(&'static str),
    #[error("arithmetic overflow")]
    Overflow,
}

/// Problems found while validating a [`Problem`](crate::problem::Problem).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("positive literal before negative literal")]
    PosBeforeNeg,
    #[error("ungrounded positive literal {literal}: variable {var} is never bound")]
    UngroundedPositive { literal: String, var: String },
    #[error("ungrounded test literal {literal}: variable {var} is never bound")]
    UngroundedTest { literal: String, var: String },
    #[error("non-matchable pattern {0}: arithmetic over unbound variables")]
    NonMatchable(String),
    #[error("recursive guard {0}")]
    RecursiveGuard(String),
    #[error("insufficiently instantiated guard {0}")]
    Insufficient(String),
    #[error("unknown guard predicate {0}")]
    UnknownGuard(String),
    #[error("undeclared predicate {0}")]
    Undeclared(String),
    #[error("type error in {atom}: argument {position} is not {expected}")]
    Type { atom: String, position: usize, expected: String },
    #[error("cost expression uses variable {0} not bound by its pattern")]
    CostVariable(String),
    #[error("duplicate type declaration for {0}")]
    DuplicateSignature(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuardError {
    #[error("insufficiently instantiated guard {0}")]
    Insufficient(String),
    #[error("unknown guard predicate {0}")]
    Unknown(String),
    #[error("recursive guard {0}")]
    Recursive(String),
    #[error("comparison of non-integers in {0}")]
    NotComparable(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CostError {
    #[error("negative cost {value} for {atom}")]
    Negative { atom: String, value: f64 },
    #[error("non-finite cost for {0}")]
    NonFinite(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("unknown column {0}")]
    UnknownColumn(usize),
    #[error("unknown row {0}")]
    UnknownRow(usize),
    #[error("invalid column data: {0}")]
    InvalidColumn(&'static str),
    #[error("LP numerical failure: {0}")]
    Numerical(&'static str),
    #[error("reduced costs need an optimal solution")]
    NotOptimal,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("nothing to branch on")]
pub struct NothingToBranch;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Guard(#[from] GuardError),
    #[error(transparent)]
    Cost(#[from] CostError),
    #[error(transparent)]
    Lp(#[from] LpError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MlnError {
    #[error("not function-free: {0}")]
    NotFunctionFree(String),
    #[error("unsupported weight {0}: only positive soft weights and HARD are accepted")]
    UnsupportedWeight(String),
    #[error("hard clause unsatisfiable given evidence: clause {0}")]
    HardUnsatisfiable(usize),
    #[error("unknown predicate {0}")]
    UnknownPredicate(String),
    #[error("unknown domain {0}")]
    UnknownDomain(String),
    #[error("duplicate declaration of {0}")]
    Duplicate(String),
    #[error("{atom} has {found} arguments, declared with {expected}")]
    Arity { atom: String, expected: usize, found: usize },
    #[error("variable {var} used with domains {first} and {second}")]
    DomainMismatch { var: String, first: String, second: String },
    #[error("evidence atom {0} is not ground")]
    NonGroundEvidence(String),
    #[error("contradictory evidence for {0}")]
    ContradictoryEvidence(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}
