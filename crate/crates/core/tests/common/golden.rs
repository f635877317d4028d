//! The published fact listing for the sample document.

use std::collections::{BTreeMap, BTreeSet};

use cudf_upgrade::{FactSet, PackageId};

use super::{id, ids};

pub type Members = BTreeSet<PackageId>;

/// Facts with every set identifier replaced by the set it names.
#[derive(Debug, PartialEq, Eq)]
pub struct Resolved {
    units: Members,
    installed: Members,
    newest: BTreeMap<String, u64>,
    depends: Vec<(PackageId, Members)>,
    conflicts: Vec<(PackageId, Members)>,
    recommends: Vec<(PackageId, Members, u32)>,
    requests: Vec<Members>,
    satisfies: Vec<(PackageId, Members)>,
    criteria: Vec<(String, i64)>,
}

pub fn resolve(facts: &FactSet) -> Resolved {
    let set = |sid| facts.set(sid).clone();
    let mut r = Resolved {
        units: facts.units.clone(),
        installed: facts.installed.clone(),
        newest: facts.newest.clone(),
        depends: facts
            .depends
            .iter()
            .map(|(p, s)| (p.clone(), set(*s)))
            .collect(),
        conflicts: facts
            .conflicts
            .iter()
            .map(|(p, s)| (p.clone(), set(*s)))
            .collect(),
        recommends: facts
            .recommends
            .iter()
            .map(|(p, s, n)| (p.clone(), set(*s), *n))
            .collect(),
        requests: facts.requests.iter().map(|s| set(*s)).collect(),
        satisfies: facts
            .satisfies
            .iter()
            .map(|(p, s)| (p.clone(), set(*s)))
            .collect(),
        criteria: facts.criteria.clone(),
    };
    r.depends.sort();
    r.conflicts.sort();
    r.recommends.sort();
    r.requests.sort();
    r.satisfies.sort();
    r.criteria.sort();
    r
}

/// The published fact listing for the sample under `-removed,-changed`,
/// written out by hand.
pub fn expected_facts() -> Resolved {
    let inst = ids(&[("inst", 1), ("inst", 2), ("inst", 3)]);
    let deps = ids(&[("dep", 1), ("dep", 2), ("dep", 3)]);
    let dep12 = ids(&[("dep", 1), ("dep", 2)]);
    let dep1 = ids(&[("dep", 1)]);
    let conf2 = ids(&[("conf", 2)]);
    let feat1 = ids(&[("feat", 1)]);
    let upgrade = ids(&[("conf", 2), ("feat", 1)]);
    let mut r = Resolved {
        units: ids(&[
            ("inst", 3),
            ("inst", 2),
            ("inst", 1),
            ("conf", 2),
            ("feat", 1),
            ("dep", 3),
            ("dep", 2),
            ("dep", 1),
            ("avail", 1),
        ]),
        installed: ids(&[("conf", 1), ("dep", 1), ("avail", 1)]),
        newest: [
            ("inst", 3),
            ("conf", 2),
            ("feat", 1),
            ("dep", 3),
            ("avail", 1),
        ]
        .into_iter()
        .map(|(n, v)| (n.to_string(), v))
        .collect(),
        depends: vec![(id("inst", 2), dep1.clone()), (id("inst", 1), deps.clone())],
        conflicts: vec![
            (id("inst", 3), conf2.clone()),
            (id("conf", 2), feat1.clone()),
            (id("feat", 1), conf2.clone()),
            (id("dep", 3), dep12.clone()),
            (id("dep", 2), dep1.clone()),
        ],
        recommends: vec![],
        requests: vec![inst.clone(), upgrade.clone()],
        satisfies: vec![
            (id("conf", 2), conf2),
            (id("dep", 1), dep1),
            (id("dep", 3), deps.clone()),
            (id("dep", 2), deps.clone()),
            (id("dep", 1), deps),
            (id("feat", 1), feat1),
            (id("dep", 2), dep12.clone()),
            (id("dep", 1), dep12),
            (id("inst", 3), inst.clone()),
            (id("inst", 2), inst.clone()),
            (id("inst", 1), inst),
            (id("conf", 2), upgrade.clone()),
            (id("feat", 1), upgrade),
        ],
        criteria: vec![("change".into(), -1), ("remove".into(), -2)],
    };
    r.depends.sort();
    r.conflicts.sort();
    r.requests.sort();
    r.satisfies.sort();
    r.criteria.sort();
    r
}
