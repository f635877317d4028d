//! Package upgradeability for CUDF documents.
//!
//! A document is parsed into a [`CudfDocument`], its relevant packages are
//! collected by [`compute_closure`], and the result is either rendered as
//! logical facts with [`generate`] or solved directly under a lexicographic
//! sequence of criteria with [`solve`]. [`validate_solution`] checks any
//! proposed installation without going through the solver.

pub mod cli;
pub mod criteria;
pub mod facts;
pub mod generator;
pub mod model;
pub mod parser;
pub mod preprocess;
pub mod semantics;
pub mod solver;

pub use criteria::{parse_criteria, CriteriaSeq, Criterion, Polarity, SignedCriterion};
pub use facts::{generate, render_facts, FactSet};
pub use model::{Clause, Constraint, CudfDocument, Formula, Op, PackageDesc, PackageId, Request};
pub use parser::{parse_document, render_document, render_solution, ParseError};
pub use preprocess::{compute_closure, compute_out, full_scope, ClosureResult};
pub use semantics::{evaluate, validate_solution, ObjectiveVector, ValidationReport, Violation};
pub use solver::{solve, Limits, Solution, SolveOutcome};
