//! Exhaustive reference solver over small scopes, built only on the
//! validator and the criteria definitions.

use std::collections::BTreeSet;

use crate::criteria::CriteriaSeq;
use crate::model::{CudfDocument, PackageId};
use crate::semantics::{evaluate, validate_solution};

use super::{Solution, SolveError, SolveOutcome};

/// Largest scope [`brute_force`] accepts.
pub const BRUTE_FORCE_LIMIT: usize = 20;

/// Enumerates every subset of `scope` and keeps the best valid one.
///
/// Ties are broken towards fewer packages, then lexicographically smaller
/// sorted package lists.
pub fn brute_force(
    doc: &CudfDocument,
    criteria: &CriteriaSeq,
    scope: &BTreeSet<PackageId>,
) -> Result<SolveOutcome, SolveError> {
    if scope.len() > BRUTE_FORCE_LIMIT {
        return Err(SolveError::ScopeTooLarge(scope.len()));
    }
    let items: Vec<&PackageId> = scope.iter().collect();
    let mut best: Option<Solution> = None;
    for mask in 0u32..(1u32 << items.len()) {
        let installed: BTreeSet<PackageId> = items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, p)| (*p).clone())
            .collect();
        if !validate_solution(doc, &installed).ok {
            continue;
        }
        let objective = evaluate(doc, &installed, criteria);
        let better = match &best {
            None => true,
            Some(b) => objective
                .compare(&b.objective)
                .then(installed.len().cmp(&b.installed.len()))
                .then_with(|| installed.iter().cmp(b.installed.iter()))
                .is_lt(),
        };
        if better {
            best = Some(Solution {
                installed,
                objective,
            });
        }
    }
    Ok(best.map_or(SolveOutcome::Unsat, SolveOutcome::Optimal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_document;

    #[test]
    fn prefers_smaller_on_ties() {
        let doc = parse_document(
            "package: a\nversion: 1\n\npackage: b\nversion: 1\n\nrequest: \ninstall: a\n",
        )
        .unwrap();
        let scope = doc.universe();
        let SolveOutcome::Optimal(sol) =
            brute_force(&doc, &CriteriaSeq::default(), &scope).unwrap()
        else {
            panic!("expected an optimum");
        };
        assert_eq!(sol.installed, BTreeSet::from([PackageId::new("a", 1)]));
    }

    #[test]
    fn rejects_large_scopes() {
        let scope: BTreeSet<PackageId> = (1..=21).map(|v| PackageId::new("p", v)).collect();
        assert_eq!(
            brute_force(&CudfDocument::empty(), &CriteriaSeq::default(), &scope),
            Err(SolveError::ScopeTooLarge(21))
        );
    }
}
