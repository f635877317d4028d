mod common;

use std::collections::BTreeSet;

use common::golden::{expected_facts, resolve, Members};
use common::{id, ids, oracle_scope, sample};
use cudf_upgrade::semantics::{compute_sets, Violation};
use cudf_upgrade::solver::brute_force;
use cudf_upgrade::{
    compute_closure, evaluate, generate, parse_criteria, render_facts, solve, validate_solution,
    CriteriaSeq, Limits, SolveOutcome,
};

#[test]
fn facts_match_the_published_listing() {
    let doc = sample();
    let criteria = parse_criteria("-removed,-changed").unwrap();
    let facts = generate(&doc, &criteria, &compute_closure(&doc, &criteria)).unwrap();
    assert_eq!(resolve(&facts), expected_facts());
    // Distinct identifiers name distinct sets.
    let named: BTreeSet<&Members> = facts.members.values().collect();
    assert_eq!(named.len(), facts.members.len());
    assert_eq!(facts.satisfies.len(), 13);

    let text = render_facts(&facts);
    assert!(text.contains("criterion(change,-1).\n"));
    assert!(text.contains("criterion(remove,-2).\n"));
    assert!(text.contains("installed(conf,1).\n"));
    assert!(!text.contains("recommends("));
}

#[test]
fn closure_and_out() {
    let doc = sample();
    let base = compute_closure(&doc, &parse_criteria("-removed,-changed").unwrap());
    assert!(base.feasible);
    assert_eq!(base.out, ids(&[("conf", 1)]));
    let nine = ids(&[
        ("inst", 3),
        ("inst", 2),
        ("inst", 1),
        ("conf", 2),
        ("feat", 1),
        ("dep", 3),
        ("dep", 2),
        ("dep", 1),
        ("avail", 1),
    ]);
    assert_eq!(base.closure, nine);

    let with_recommends = compute_closure(
        &doc,
        &parse_criteria("-removed,-changed,-unsat_recommends").unwrap(),
    );
    let added: Members = with_recommends.closure.difference(&nine).cloned().collect();
    assert_eq!(added, ids(&[("recomm", 1)]));
    assert!(!with_recommends.closure.contains(&id("option", 1)));
}

#[test]
fn paranoid_optimum() {
    let doc = sample();
    let criteria = CriteriaSeq::paranoid();
    let SolveOutcome::Optimal(sol) = solve(&doc, &criteria, &Limits::unlimited()) else {
        panic!("sample is solvable");
    };
    assert_eq!(sol.objective.counts(), [0, 2]);
    assert!(validate_solution(&doc, &sol.installed).ok);
    let oracle = brute_force(&doc, &criteria, &oracle_scope(&doc)).unwrap();
    assert_eq!(oracle.solution().unwrap().objective, sol.objective);
}

#[test]
fn trendy_matches_exhaustive_search() {
    let doc = sample();
    let criteria = CriteriaSeq::trendy();
    let solved = solve(&doc, &criteria, &Limits::unlimited());
    let oracle = brute_force(&doc, &criteria, &oracle_scope(&doc)).unwrap();
    let (SolveOutcome::Optimal(a), SolveOutcome::Optimal(b)) = (&solved, &oracle) else {
        panic!("both searches should find an optimum: {solved:?} {oracle:?}");
    };
    assert_eq!(a.objective, b.objective);
    assert_eq!(evaluate(&doc, &a.installed, &criteria), a.objective);
}

#[test]
fn criteria_sets_by_hand() {
    let doc = sample();
    let p = ids(&[("inst", 1), ("conf", 2), ("dep", 1), ("avail", 1)]);
    let sets = compute_sets(&doc, &p);
    assert!(sets.removed.is_empty());
    assert_eq!(sets.changed, ["conf", "inst"].map(String::from).into());
    assert_eq!(sets.new, BTreeSet::from(["inst".to_string()]));

    let with_dep3 = ids(&[("inst", 1), ("conf", 2), ("dep", 3), ("avail", 1)]);
    assert!(compute_sets(&doc, &with_dep3)
        .unsat_recommends
        .contains(&("dep".to_string(), 3, 1)));

    let everything_removed = evaluate(&doc, &BTreeSet::new(), &CriteriaSeq::trendy());
    assert_eq!(everything_removed.values[0].count, 3);
}

#[test]
fn validator_examples() {
    let doc = sample();
    assert!(
        validate_solution(
            &doc,
            &ids(&[("inst", 1), ("conf", 2), ("dep", 1), ("avail", 1)])
        )
        .ok
    );

    let clash = validate_solution(
        &doc,
        &ids(&[("inst", 3), ("conf", 2), ("dep", 1), ("avail", 1)]),
    );
    assert!(clash
        .violations
        .contains(&Violation::ConflictViolated(id("inst", 3), id("conf", 2))));

    let both = validate_solution(
        &doc,
        &ids(&[
            ("inst", 1),
            ("conf", 2),
            ("feat", 1),
            ("dep", 1),
            ("avail", 1),
        ]),
    );
    assert!(both
        .violations
        .contains(&Violation::UpgradeMultiVersion("conf".into())));
}
