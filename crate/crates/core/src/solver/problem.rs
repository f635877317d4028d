//! The installation problem over closure packages, and its objective
//! indicators.

use std::collections::{BTreeMap, BTreeSet};

use crate::criteria::{CriteriaSeq, Criterion, Polarity};
use crate::facts::{generate, FactSet};
use crate::model::{CudfDocument, PackageId};
use crate::preprocess::ClosureResult;
use crate::semantics::{ObjectiveValue, ObjectiveVector};

use super::SolveError;

/// Candidate packages and the sets constraining them, indexed by position
/// in `candidates`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    /// Sorted candidate packages; one decision per candidate.
    pub candidates: Vec<PackageId>,
    /// Each request set needs at least one installed member.
    pub requests: Vec<Vec<usize>>,
    /// Per candidate: dependency provider sets.
    pub depends: Vec<Vec<Vec<usize>>>,
    /// Per candidate: sets none of whose members may be installed alongside.
    pub conflicts: Vec<Vec<Vec<usize>>>,
    /// Per candidate: recommendation provider sets with multiplicity.
    pub recommends: Vec<Vec<(Vec<usize>, u32)>>,
    pub criteria: CriteriaSeq,
    /// The existing installation, including packages outside the candidates.
    pub existing: BTreeSet<PackageId>,
    /// Newest version in the universe for every candidate name.
    pub newest: BTreeMap<String, u64>,
}

/// Builds the problem from the facts of a feasible closure.
pub fn build_problem(
    doc: &CudfDocument,
    criteria: &CriteriaSeq,
    closure: &ClosureResult,
) -> Result<Problem, SolveError> {
    let facts = generate(doc, criteria, closure).map_err(|_| SolveError::InfeasibleInput)?;
    Ok(Problem::from_facts(&facts, criteria))
}

impl Problem {
    pub fn from_facts(facts: &FactSet, criteria: &CriteriaSeq) -> Self {
        let candidates: Vec<PackageId> = facts.units.iter().cloned().collect();
        let position: BTreeMap<&PackageId, usize> =
            candidates.iter().enumerate().map(|(i, p)| (p, i)).collect();
        let resolve = |id| -> Vec<usize> {
            facts
                .set(id)
                .iter()
                .filter_map(|p| position.get(p).copied())
                .collect()
        };
        let n = candidates.len();
        let mut depends = vec![Vec::new(); n];
        let mut conflicts = vec![Vec::new(); n];
        let mut recommends = vec![Vec::new(); n];
        for (pkg, id) in &facts.depends {
            depends[position[pkg]].push(resolve(*id));
        }
        for (pkg, id) in &facts.conflicts {
            conflicts[position[pkg]].push(resolve(*id));
        }
        for (pkg, id, r) in &facts.recommends {
            recommends[position[pkg]].push((resolve(*id), *r));
        }
        Problem {
            requests: facts.requests.iter().map(|&id| resolve(id)).collect(),
            candidates,
            depends,
            conflicts,
            recommends,
            criteria: criteria.clone(),
            existing: facts.installed.clone(),
            newest: facts.newest.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Hard constraints as clauses over candidate literals.
    pub(crate) fn hard_clauses(&self) -> Vec<Vec<Lit>> {
        let mut clauses = Vec::new();
        for set in &self.requests {
            clauses.push(set.iter().map(|&q| Lit::pos(q)).collect());
        }
        for (p, sets) in self.depends.iter().enumerate() {
            for set in sets {
                let mut clause = vec![Lit::neg(p)];
                clause.extend(set.iter().map(|&q| Lit::pos(q)));
                clauses.push(clause);
            }
        }
        for (p, sets) in self.conflicts.iter().enumerate() {
            for set in sets {
                for &q in set {
                    if q != p {
                        clauses.push(vec![Lit::neg(p), Lit::neg(q)]);
                    }
                }
            }
        }
        clauses
    }

    /// Objectives, most significant first.
    pub(crate) fn objectives(&self) -> Vec<Objective> {
        let mut by_name: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, p) in self.candidates.iter().enumerate() {
            by_name.entry(p.name.as_str()).or_default().push(i);
        }
        let existing_names: BTreeSet<&str> =
            self.existing.iter().map(|p| p.name.as_str()).collect();
        let is_existing = |i: usize| self.existing.contains(&self.candidates[i]);
        let any_of = |name: &str| -> Vec<Lit> {
            by_name
                .get(name)
                .map(|v| v.iter().map(|&i| Lit::pos(i)).collect())
                .unwrap_or_default()
        };

        self.criteria
            .most_significant_first()
            .map(|signed| {
                let mut terms = Vec::new();
                match signed.criterion {
                    Criterion::NewPackage => {
                        for name in by_name.keys().filter(|n| !existing_names.contains(*n)) {
                            terms.push(Indicator::new(vec![any_of(name)], 1));
                        }
                    }
                    Criterion::Removed => {
                        for name in &existing_names {
                            let clauses = by_name
                                .get(name)
                                .map(|v| v.iter().map(|&i| vec![Lit::neg(i)]).collect())
                                .unwrap_or_default();
                            terms.push(Indicator::new(clauses, 1));
                        }
                    }
                    Criterion::Changed => {
                        let names: BTreeSet<&str> = by_name
                            .keys()
                            .copied()
                            .chain(existing_names.iter().copied())
                            .collect();
                        for name in names {
                            let missing_existing = self
                                .existing
                                .iter()
                                .any(|p| p.name == name && !self.candidates.contains(p));
                            if missing_existing {
                                terms.push(Indicator::new(vec![], 1));
                                continue;
                            }
                            let clause = by_name[name]
                                .iter()
                                .map(|&i| {
                                    if is_existing(i) {
                                        Lit::neg(i)
                                    } else {
                                        Lit::pos(i)
                                    }
                                })
                                .collect();
                            terms.push(Indicator::new(vec![clause], 1));
                        }
                    }
                    Criterion::NotUpToDate => {
                        for (name, versions) in &by_name {
                            let newest = self.newest.get(*name).copied();
                            let newest_var = versions
                                .iter()
                                .copied()
                                .find(|&i| Some(self.candidates[i].version) == newest);
                            let mut clauses = vec![any_of(name)];
                            if let Some(v) = newest_var {
                                clauses.push(vec![Lit::neg(v)]);
                            }
                            terms.push(Indicator::new(clauses, 1));
                        }
                    }
                    Criterion::UnsatRecommends => {
                        for (p, recs) in self.recommends.iter().enumerate() {
                            for (set, r) in recs {
                                let mut clauses = vec![vec![Lit::pos(p)]];
                                clauses.extend(set.iter().map(|&q| vec![Lit::neg(q)]));
                                terms.push(Indicator::new(clauses, u64::from(*r)));
                            }
                        }
                    }
                }
                Objective::new(signed.criterion, signed.polarity, terms)
            })
            .collect()
    }

    /// Objective vector of an assignment to the candidates.
    pub fn objective_of(&self, assignment: &[bool]) -> ObjectiveVector {
        objective_vector(&self.objectives(), assignment)
    }

    /// Is the assignment admissible?
    pub fn is_feasible(&self, assignment: &[bool]) -> bool {
        self.hard_clauses()
            .iter()
            .all(|c| c.iter().any(|l| l.eval(assignment)))
    }

    pub(crate) fn installed_ids(&self, assignment: &[bool]) -> BTreeSet<PackageId> {
        self.candidates
            .iter()
            .zip(assignment)
            .filter(|(_, &on)| on)
            .map(|(p, _)| p.clone())
            .collect()
    }
}

pub(crate) fn objective_vector(objectives: &[Objective], assignment: &[bool]) -> ObjectiveVector {
    ObjectiveVector {
        values: objectives
            .iter()
            .map(|o| ObjectiveValue {
                criterion: o.criterion,
                polarity: o.polarity,
                count: o.eval(assignment),
            })
            .collect(),
    }
}

/// A literal over candidate decisions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct Lit {
    pub var: usize,
    pub positive: bool,
}

impl Lit {
    pub fn pos(var: usize) -> Self {
        Self {
            var,
            positive: true,
        }
    }

    pub fn neg(var: usize) -> Self {
        Self {
            var,
            positive: false,
        }
    }

    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }

    pub fn eval_partial(self, assignment: &[Option<bool>]) -> Option<bool> {
        assignment[self.var].map(|v| v == self.positive)
    }
}

/// A weighted violation: holds iff every clause holds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Indicator {
    pub clauses: Vec<Vec<Lit>>,
    pub weight: u64,
}

impl Indicator {
    fn new(clauses: Vec<Vec<Lit>>, weight: u64) -> Self {
        Self { clauses, weight }
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.eval(assignment)))
    }

    /// Three-valued evaluation under a partial assignment.
    pub fn eval_partial(&self, assignment: &[Option<bool>]) -> Option<bool> {
        let mut all_true = true;
        for clause in &self.clauses {
            let mut unknown = false;
            let mut sat = false;
            for l in clause {
                match l.eval_partial(assignment) {
                    Some(true) => {
                        sat = true;
                        break;
                    }
                    Some(false) => {}
                    None => unknown = true,
                }
            }
            if !sat {
                if !unknown {
                    return Some(false);
                }
                all_true = false;
            }
        }
        if all_true {
            Some(true)
        } else {
            None
        }
    }
}

/// One criterion as a weighted count of indicators plus a constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Objective {
    pub criterion: Criterion,
    pub polarity: Polarity,
    /// Weight of indicators that hold whatever is installed.
    pub offset: u64,
    pub terms: Vec<Indicator>,
}

impl Objective {
    fn new(criterion: Criterion, polarity: Polarity, indicators: Vec<Indicator>) -> Self {
        let mut offset = 0;
        let mut terms = Vec::new();
        for ind in indicators {
            if ind.clauses.iter().any(Vec::is_empty) {
                continue;
            }
            if ind.clauses.is_empty() {
                offset += ind.weight;
            } else {
                terms.push(ind);
            }
        }
        Self {
            criterion,
            polarity,
            offset,
            terms,
        }
    }

    pub fn eval(&self, assignment: &[bool]) -> u64 {
        self.offset
            + self
                .terms
                .iter()
                .filter(|t| t.eval(assignment))
                .map(|t| t.weight)
                .sum::<u64>()
    }

    pub fn total_weight(&self) -> u64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    /// Key where smaller is better.
    pub fn key(&self, value: u64) -> i128 {
        match self.polarity {
            Polarity::Minus => value as i128,
            Polarity::Plus => -(value as i128),
        }
    }

    /// Lower bound on the key of any completion of a partial assignment.
    pub fn key_bound(&self, assignment: &[Option<bool>]) -> i128 {
        let (mut sure, mut maybe) = (self.offset, self.offset);
        for t in &self.terms {
            match t.eval_partial(assignment) {
                Some(true) => {
                    sure += t.weight;
                    maybe += t.weight;
                }
                None => maybe += t.weight,
                Some(false) => {}
            }
        }
        match self.polarity {
            Polarity::Minus => sure as i128,
            Polarity::Plus => -(maybe as i128),
        }
    }
}
