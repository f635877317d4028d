//! Lexicographic optimization of follow-up installations.
//!
//! [`solve`] runs the full pipeline: closure, facts, then a CDCL search that
//! tightens one criterion at a time, most significant first.
//! [`branch_and_bound`] and [`brute_force`] are independent reference
//! solvers over the same problem.

mod bnb;
mod brute;
mod cdcl;
mod problem;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::criteria::{CriteriaSeq, Polarity};
use crate::model::{CudfDocument, PackageId};
use crate::preprocess::{compute_closure, full_scope, ClosureResult};
use crate::semantics::ObjectiveVector;

pub use bnb::branch_and_bound;
pub use brute::{brute_force, BRUTE_FORCE_LIMIT};
pub use problem::{build_problem, Problem};

use cdcl::{Budget, Lit, SatResult, Solver};
use problem::Objective;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("the request cannot be satisfied")]
    InfeasibleInput,
    #[error("scope of {0} packages is too large for exhaustive search")]
    ScopeTooLarge(usize),
}

/// Search allowance. `max_steps` counts conflicts for the CDCL search and
/// nodes for branch and bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_steps: Option<u64>,
    pub timeout: Option<Duration>,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_steps: None,
            timeout: Some(Duration::from_secs(300)),
        }
    }
}

impl Limits {
    pub fn unlimited() -> Self {
        Self {
            max_steps: None,
            timeout: None,
        }
    }

    fn budget(&self) -> Budget {
        Budget {
            steps_left: self.max_steps,
            deadline: self.timeout.map(|t| Instant::now() + t),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub installed: BTreeSet<PackageId>,
    pub objective: ObjectiveVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Optimal(Solution),
    Unsat,
    /// The allowance ran out; carries the best installation found, if any.
    TimedOut(Option<Solution>),
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&Solution> {
        match self {
            SolveOutcome::Optimal(s) | SolveOutcome::TimedOut(Some(s)) => Some(s),
            _ => None,
        }
    }
}

/// Solves over the closure computed for `criteria`.
pub fn solve(doc: &CudfDocument, criteria: &CriteriaSeq, limits: &Limits) -> SolveOutcome {
    solve_in(doc, criteria, &compute_closure(doc, criteria), limits)
}

/// Solves over every package not excluded by the request.
pub fn solve_without_closure(
    doc: &CudfDocument,
    criteria: &CriteriaSeq,
    limits: &Limits,
) -> SolveOutcome {
    solve_in(doc, criteria, &full_scope(doc), limits)
}

/// Solves over an already computed candidate space.
pub fn solve_in(
    doc: &CudfDocument,
    criteria: &CriteriaSeq,
    scope: &ClosureResult,
    limits: &Limits,
) -> SolveOutcome {
    match build_problem(doc, criteria, scope) {
        Ok(problem) => solve_problem(&problem, limits),
        Err(_) => SolveOutcome::Unsat,
    }
}

/// Number of propositional variables and clauses in the encoding.
pub fn encoding_size(problem: &Problem) -> (usize, usize) {
    let enc = Encoding::new(problem);
    (enc.num_vars, enc.clauses.len())
}

/// Finds a lexicographically optimal installation with the CDCL engine.
pub fn solve_problem(problem: &Problem, limits: &Limits) -> SolveOutcome {
    let enc = Encoding::new(problem);
    let mut budget = limits.budget();
    let mut frozen: Vec<(usize, u64)> = Vec::new();
    let keep_existing: Vec<bool> = problem
        .candidates
        .iter()
        .map(|p| problem.existing.contains(p))
        .collect();
    let mut sat = enc.solver(&frozen, Some(&keep_existing));
    let mut best = match sat.solve(&mut budget) {
        SatResult::Sat => enc.assignment(&sat),
        SatResult::Unsat => return SolveOutcome::Unsat,
        SatResult::Unknown => return SolveOutcome::TimedOut(None),
    };
    for k in 0..enc.objectives.len() {
        let mut value = enc.objectives[k].eval(&best);
        while let Some(bound) = enc.strictly_better(k, value) {
            if !sat.add_at_most(&enc.terms[k], bound) {
                break;
            }
            match sat.solve(&mut budget) {
                SatResult::Sat => {
                    best = enc.assignment(&sat);
                    value = enc.objectives[k].eval(&best);
                }
                SatResult::Unsat => break,
                SatResult::Unknown => {
                    return SolveOutcome::TimedOut(Some(enc.solution(problem, &best)))
                }
            }
        }
        frozen.push((k, value));
        if k + 1 < enc.objectives.len() {
            sat = enc.solver(&frozen, Some(&best));
        }
    }
    SolveOutcome::Optimal(enc.solution(problem, &best))
}

/// Propositional form of a problem: candidate variables first, then
/// auxiliaries standing for objective indicators.
struct Encoding {
    candidates: usize,
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
    objectives: Vec<Objective>,
    /// Per objective, weighted literals whose true count is to be bounded.
    terms: Vec<Vec<(Lit, u64)>>,
}

impl Encoding {
    fn new(problem: &Problem) -> Self {
        let to_lit = |l: problem::Lit| Lit::new(l.var, l.positive);
        let mut enc = Encoding {
            candidates: problem.len(),
            num_vars: problem.len(),
            clauses: problem
                .hard_clauses()
                .into_iter()
                .map(|c| c.into_iter().map(to_lit).collect())
                .collect(),
            objectives: problem.objectives(),
            terms: Vec::new(),
        };
        let objectives = std::mem::take(&mut enc.objectives);
        for obj in &objectives {
            let mut lits = Vec::with_capacity(obj.terms.len());
            for term in &obj.terms {
                let parts: Vec<Lit> = term
                    .clauses
                    .iter()
                    .map(|c| {
                        let c: Vec<Lit> = c.iter().copied().map(to_lit).collect();
                        enc.define_or(&c)
                    })
                    .collect();
                let lit = enc.define_and(&parts);
                lits.push(match obj.polarity {
                    Polarity::Minus => (lit, term.weight),
                    Polarity::Plus => (!lit, term.weight),
                });
            }
            enc.terms.push(lits);
        }
        enc.objectives = objectives;
        enc
    }

    fn fresh(&mut self) -> Lit {
        self.num_vars += 1;
        Lit::new(self.num_vars - 1, true)
    }

    fn define_or(&mut self, lits: &[Lit]) -> Lit {
        if let [only] = lits {
            return *only;
        }
        let a = self.fresh();
        let mut long = vec![!a];
        long.extend_from_slice(lits);
        self.clauses.push(long);
        for &l in lits {
            self.clauses.push(vec![a, !l]);
        }
        a
    }

    fn define_and(&mut self, lits: &[Lit]) -> Lit {
        if let [only] = lits {
            return *only;
        }
        let a = self.fresh();
        let mut long = vec![a];
        long.extend(lits.iter().map(|&l| !l));
        self.clauses.push(long);
        for &l in lits {
            self.clauses.push(vec![!a, l]);
        }
        a
    }

    /// Bound on objective `k`'s literal sum that keeps its value at least as
    /// good as `value`.
    fn bound(&self, k: usize, value: u64) -> u64 {
        let obj = &self.objectives[k];
        match obj.polarity {
            Polarity::Minus => value - obj.offset,
            Polarity::Plus => obj.total_weight() - (value - obj.offset),
        }
    }

    fn strictly_better(&self, k: usize, value: u64) -> Option<u64> {
        self.bound(k, value).checked_sub(1)
    }

    fn solver(&self, frozen: &[(usize, u64)], phases: Option<&[bool]>) -> Solver {
        let mut s = Solver::new();
        for _ in 0..self.num_vars {
            s.new_var();
        }
        if let Some(phases) = phases {
            for (v, &on) in phases.iter().enumerate() {
                s.set_phase(v, on);
            }
        }
        for c in &self.clauses {
            s.add_clause(c);
        }
        for &(k, value) in frozen {
            s.add_at_most(&self.terms[k], self.bound(k, value));
        }
        s
    }

    fn assignment(&self, s: &Solver) -> Vec<bool> {
        (0..self.candidates).map(|v| s.model_value(v)).collect()
    }

    fn solution(&self, problem: &Problem, assignment: &[bool]) -> Solution {
        Solution {
            installed: problem.installed_ids(assignment),
            objective: problem::objective_vector(&self.objectives, assignment),
        }
    }
}
