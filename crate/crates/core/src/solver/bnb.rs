//! Depth-first branch and bound over candidate decisions, pruning on a
//! lexicographic lower bound of the objective.

use std::time::Instant;

use super::problem::{objective_vector, Lit, Objective, Problem};
use super::{Limits, Solution, SolveOutcome};

struct Search<'a> {
    problem: &'a Problem,
    clauses: Vec<Vec<Lit>>,
    /// Clauses containing a literal false when the variable takes a value,
    /// indexed by `2 * var + value`.
    watch: Vec<Vec<usize>>,
    objectives: Vec<Objective>,
    assignment: Vec<Option<bool>>,
    best: Option<(Vec<i128>, Vec<bool>)>,
    nodes: u64,
    limits: Limits,
    deadline: Option<Instant>,
    exhausted: bool,
}

/// Finds a lexicographically optimal installation by exhaustive search with
/// unit propagation and bounding.
pub fn branch_and_bound(problem: &Problem, limits: &Limits) -> SolveOutcome {
    let clauses = problem.hard_clauses();
    let mut watch = vec![Vec::new(); 2 * problem.len()];
    for (i, clause) in clauses.iter().enumerate() {
        for l in clause {
            watch[2 * l.var + usize::from(!l.positive)].push(i);
        }
    }
    let mut search = Search {
        problem,
        clauses,
        watch,
        objectives: problem.objectives(),
        assignment: vec![None; problem.len()],
        best: None,
        nodes: 0,
        limits: *limits,
        deadline: limits.timeout.map(|t| Instant::now() + t),
        exhausted: false,
    };
    if search.clauses.iter().any(Vec::is_empty) {
        return SolveOutcome::Unsat;
    }
    let mut trail = Vec::new();
    if search.propagate_all(&mut trail) {
        search.visit(0);
    }
    let solution = search.best.take().map(|(_, a)| Solution {
        installed: problem.installed_ids(&a),
        objective: objective_vector(&search.objectives, &a),
    });
    match (search.exhausted, solution) {
        (true, s) => SolveOutcome::TimedOut(s),
        (false, Some(s)) => SolveOutcome::Optimal(s),
        (false, None) => SolveOutcome::Unsat,
    }
}

impl Search<'_> {
    fn clause_state(&self, c: usize) -> (bool, Option<Lit>, usize) {
        let mut unassigned = None;
        let mut open = 0;
        for &l in &self.clauses[c] {
            match l.eval_partial(&self.assignment) {
                Some(true) => return (true, None, 0),
                Some(false) => {}
                None => {
                    open += 1;
                    unassigned = Some(l);
                }
            }
        }
        (false, unassigned, open)
    }

    fn assign(&mut self, var: usize, value: bool, trail: &mut Vec<usize>) -> bool {
        self.assignment[var] = Some(value);
        trail.push(var);
        let mut queue = vec![(var, value)];
        while let Some((v, val)) = queue.pop() {
            // Literals of `v` that just became false sit in the opposite slot.
            let slot = 2 * v + usize::from(val);
            for i in 0..self.watch[slot].len() {
                let c = self.watch[slot][i];
                match self.clause_state(c) {
                    (true, _, _) => {}
                    (false, _, 0) => return false,
                    (false, Some(l), 1) => {
                        self.assignment[l.var] = Some(l.positive);
                        trail.push(l.var);
                        queue.push((l.var, l.positive));
                    }
                    _ => {}
                }
            }
        }
        true
    }

    fn propagate_all(&mut self, trail: &mut Vec<usize>) -> bool {
        loop {
            let mut forced = None;
            for c in 0..self.clauses.len() {
                match self.clause_state(c) {
                    (false, _, 0) => return false,
                    (false, Some(l), 1) => {
                        forced = Some(l);
                        break;
                    }
                    _ => {}
                }
            }
            match forced {
                Some(l) => {
                    if !self.assign(l.var, l.positive, trail) {
                        return false;
                    }
                }
                None => return true,
            }
        }
    }

    fn undo(&mut self, trail: &mut Vec<usize>) {
        for v in trail.drain(..) {
            self.assignment[v] = None;
        }
    }

    fn out_of_budget(&mut self) -> bool {
        self.nodes += 1;
        let steps = self.limits.max_steps.is_some_and(|m| self.nodes > m);
        let clock = self.nodes.is_multiple_of(256) && self.deadline.is_some_and(|d| Instant::now() >= d);
        if steps || clock {
            self.exhausted = true;
        }
        self.exhausted
    }

    fn pruned(&self) -> bool {
        let Some((best, _)) = &self.best else {
            return false;
        };
        let bound: Vec<i128> = self
            .objectives
            .iter()
            .map(|o| o.key_bound(&self.assignment))
            .collect();
        bound >= *best
    }

    fn visit(&mut self, from: usize) {
        if self.exhausted || self.out_of_budget() || self.pruned() {
            return;
        }
        let Some(var) = (from..self.problem.len()).find(|&v| self.assignment[v].is_none()) else {
            let full: Vec<bool> = self.assignment.iter().map(|v| v == &Some(true)).collect();
            let key: Vec<i128> = self
                .objectives
                .iter()
                .map(|o| o.key(o.eval(&full)))
                .collect();
            if self.best.as_ref().is_none_or(|(b, _)| key < *b) {
                self.best = Some((key, full));
            }
            return;
        };
        for value in [false, true] {
            let mut trail = Vec::new();
            if self.assign(var, value, &mut trail) {
                self.visit(var + 1);
            }
            self.undo(&mut trail);
        }
    }
}
