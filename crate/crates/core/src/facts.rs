//! Logic-program facts describing a document restricted to its closure.
//!
//! Every set of provider packages referenced by a `depends`, `recommends`,
//! `conflict` or `request` fact is named by an interned [`SetId`]; the
//! `satisfies` facts spell out its members. The same [`FactSet`] feeds the
//! native solver directly and renders to text for external tooling.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::criteria::{CriteriaSeq, Criterion, Polarity};
use crate::model::{CudfDocument, PackageId};
use crate::preprocess::{ClosureResult, ProviderIndex};
use crate::semantics::{match_set, provide, same_match, target_names, MatchSet};

/// Interned name of a package set, rendered `s<k>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetId(pub usize);

impl fmt::Display for SetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// Assigns tokens to package sets in first-seen order; equal sets share a
/// token regardless of insertion order.
#[derive(Clone, Debug, Default)]
pub struct SetInterner {
    ids: HashMap<BTreeSet<PackageId>, SetId>,
    members: BTreeMap<SetId, BTreeSet<PackageId>>,
}

impl SetInterner {
    pub fn intern(&mut self, members: &BTreeSet<PackageId>) -> SetId {
        if let Some(&id) = self.ids.get(members) {
            return id;
        }
        let id = SetId(self.members.len());
        self.ids.insert(members.clone(), id);
        self.members.insert(id, members.clone());
        id
    }

    pub fn members(&self) -> &BTreeMap<SetId, BTreeSet<PackageId>> {
        &self.members
    }

    pub fn into_members(self) -> BTreeMap<SetId, BTreeSet<PackageId>> {
        self.members
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FactsError {
    #[error("the request cannot be satisfied; no facts to generate")]
    InfeasibleInput,
}

/// Facts for a document, a criteria sequence and a closure.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FactSet {
    pub depends: Vec<(PackageId, SetId)>,
    pub recommends: Vec<(PackageId, SetId, u32)>,
    pub conflicts: Vec<(PackageId, SetId)>,
    pub requests: Vec<SetId>,
    pub satisfies: Vec<(PackageId, SetId)>,
    pub units: BTreeSet<PackageId>,
    pub installed: BTreeSet<PackageId>,
    pub newest: BTreeMap<String, u64>,
    /// `(constant, ±position)`, positions counted in increasing significance.
    pub criteria: Vec<(String, i64)>,
    pub members: BTreeMap<SetId, BTreeSet<PackageId>>,
}

impl FactSet {
    pub fn is_empty(&self) -> bool {
        self.depends.is_empty()
            && self.recommends.is_empty()
            && self.conflicts.is_empty()
            && self.requests.is_empty()
            && self.satisfies.is_empty()
            && self.units.is_empty()
            && self.installed.is_empty()
            && self.newest.is_empty()
            && self.criteria.is_empty()
    }

    pub fn set(&self, id: SetId) -> &BTreeSet<PackageId> {
        &self.members[&id]
    }
}

fn push_unique<T: PartialEq>(list: &mut Vec<T>, item: T) {
    if !list.contains(&item) {
        list.push(item);
    }
}

/// Builds the facts. Set tokens are numbered in scan order: closure packages
/// in document order (their depends, recommends, conflicts, then upgrade
/// conflicts), then request clauses.
pub fn generate(
    doc: &CudfDocument,
    criteria: &CriteriaSeq,
    closure: &ClosureResult,
) -> Result<FactSet, FactsError> {
    if !closure.feasible {
        return Err(FactsError::InfeasibleInput);
    }
    let packages = doc.packages();
    let index = ProviderIndex::new(doc);
    let in_closure: Vec<bool> = packages
        .iter()
        .map(|p| closure.closure.contains(&p.id))
        .collect();
    let providers = |clause| -> BTreeSet<PackageId> {
        index
            .clause_providers(clause)
            .into_iter()
            .filter(|&i| in_closure[i])
            .map(|i| packages[i].id.clone())
            .collect()
    };
    let request = doc.effective_request();
    let with_recommends = criteria.mentions(Criterion::UnsatRecommends);

    // per upgrade clause: match sets of the closure packages that serve it
    let upgrade_matches: Vec<BTreeMap<usize, MatchSet>> = request
        .upgrade
        .iter()
        .map(|clause| {
            let mut by_pkg = BTreeMap::new();
            for name in target_names(clause) {
                for &(idx, _) in index.providers_of(name) {
                    if in_closure[idx] && !by_pkg.contains_key(&idx) {
                        let m = match_set(clause, &provide(&packages[idx]));
                        if !m.is_empty() {
                            by_pkg.insert(idx, m);
                        }
                    }
                }
            }
            by_pkg
        })
        .collect();

    let mut interner = SetInterner::default();
    let mut facts = FactSet::default();
    for (idx, pkg) in packages.iter().enumerate().filter(|(i, _)| in_closure[*i]) {
        for clause in pkg.depends.iter() {
            let id = interner.intern(&providers(clause));
            push_unique(&mut facts.depends, (pkg.id.clone(), id));
        }
        if with_recommends {
            let mut groups: Vec<(BTreeSet<PackageId>, u32)> = Vec::new();
            for clause in pkg.recommends.iter() {
                let set = providers(clause);
                match groups.iter_mut().find(|(s, _)| *s == set) {
                    Some((_, r)) => *r += 1,
                    None => groups.push((set, 1)),
                }
            }
            for (set, r) in groups {
                let id = interner.intern(&set);
                facts.recommends.push((pkg.id.clone(), id, r));
            }
        }
        let mut forbidden: BTreeSet<PackageId> = pkg
            .conflicts
            .iter()
            .flat_map(&providers)
            .collect();
        forbidden.remove(&pkg.id);
        if !forbidden.is_empty() {
            let id = interner.intern(&forbidden);
            push_unique(&mut facts.conflicts, (pkg.id.clone(), id));
        }
        for (clause, matches) in request.upgrade.iter().zip(&upgrade_matches) {
            let Some(mine) = matches.get(&idx) else {
                continue;
            };
            let others: BTreeSet<PackageId> = matches
                .iter()
                .filter(|(_, theirs)| !same_match(clause, mine, theirs))
                .map(|(&j, _)| packages[j].id.clone())
                .collect();
            if !others.is_empty() {
                let id = interner.intern(&others);
                push_unique(&mut facts.conflicts, (pkg.id.clone(), id));
            }
        }
    }
    for clause in request.positive_clauses() {
        let id = interner.intern(&providers(clause));
        push_unique(&mut facts.requests, id);
    }

    let referenced: BTreeSet<SetId> = facts
        .depends
        .iter()
        .map(|(_, id)| *id)
        .chain(facts.recommends.iter().map(|(_, id, _)| *id))
        .chain(facts.conflicts.iter().map(|(_, id)| *id))
        .chain(facts.requests.iter().copied())
        .collect();
    let members = interner.into_members();
    for id in referenced {
        for member in &members[&id] {
            facts.satisfies.push((member.clone(), id));
        }
    }

    facts.units = closure.closure.clone();
    facts.installed = doc.installed();
    for id in &facts.units {
        if let Ok(max) = doc.max_version(&id.name) {
            facts.newest.insert(id.name.clone(), max);
        }
    }
    for (i, c) in criteria.increasing().iter().enumerate() {
        let position = i as i64 + 1;
        let signed = match c.polarity {
            Polarity::Minus => -position,
            Polarity::Plus => position,
        };
        facts
            .criteria
            .push((c.criterion.fact_constant().to_string(), signed));
    }
    facts.members = members;
    Ok(facts)
}

/// Renders a name as a logic-program term, quoting it unless it is a plain
/// lowercase identifier.
pub fn render_term(name: &str) -> String {
    let mut chars = name.chars();
    let plain = chars.next().is_some_and(|c| c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_');
    if plain {
        return name.to_string();
    }
    let mut out = String::with_capacity(name.len() + 2);
    out.push('"');
    for c in name.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn pkg_args(id: &PackageId) -> String {
    format!("{},{}", render_term(&id.name), id.version)
}

/// One fact per line, grouped by predicate (units, installed, newest
/// versions, depends, recommends, conflicts, requests, satisfies, criteria)
/// and sorted within each group.
pub fn render_facts(facts: &FactSet) -> String {
    let groups: Vec<Vec<String>> = vec![
        facts
            .units
            .iter()
            .map(|p| format!("unit({}).", pkg_args(p)))
            .collect(),
        facts
            .installed
            .iter()
            .map(|p| format!("installed({}).", pkg_args(p)))
            .collect(),
        facts
            .newest
            .iter()
            .map(|(n, v)| format!("newestversion({},{v}).", render_term(n)))
            .collect(),
        facts
            .depends
            .iter()
            .map(|(p, id)| format!("depends({},{id}).", pkg_args(p)))
            .collect(),
        facts
            .recommends
            .iter()
            .map(|(p, id, r)| format!("recommends({},{id},{r}).", pkg_args(p)))
            .collect(),
        facts
            .conflicts
            .iter()
            .map(|(p, id)| format!("conflict({},{id}).", pkg_args(p)))
            .collect(),
        facts
            .requests
            .iter()
            .map(|id| format!("request({id})."))
            .collect(),
        facts
            .satisfies
            .iter()
            .map(|(p, id)| format!("satisfies({},{id}).", pkg_args(p)))
            .collect(),
        facts
            .criteria
            .iter()
            .map(|(c, i)| format!("criterion({c},{i})."))
            .collect(),
    ];
    let mut out = String::new();
    for mut group in groups {
        group.sort();
        for line in group {
            let _ = writeln!(out, "{line}");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[(&str, u64)]) -> BTreeSet<PackageId> {
        items.iter().map(|&(n, v)| PackageId::new(n, v)).collect()
    }

    #[test]
    fn interning() {
        let mut interner = SetInterner::default();
        let a = interner.intern(&set(&[("dep", 1)]));
        assert_eq!(interner.intern(&set(&[("dep", 1)])), a);
        let b = interner.intern(&set(&[("dep", 2)]));
        assert_ne!(a, b);
        let fwd = interner.intern(&set(&[("inst", 3), ("inst", 2), ("inst", 1)]));
        let rev = interner.intern(&set(&[("inst", 1), ("inst", 2), ("inst", 3)]));
        assert_eq!(fwd, rev);
        assert_eq!(
            (a.to_string(), b.to_string(), fwd.to_string()),
            ("s0".into(), "s1".into(), "s2".into())
        );
    }

    #[test]
    fn quoting() {
        assert_eq!(render_term("conf"), "conf");
        assert_eq!(render_term("lib_2"), "lib_2");
        assert_eq!(render_term("Lib.A"), "\"Lib.A\"");
        assert_eq!(render_term("2x"), "\"2x\"");
        assert_eq!(render_term("a\"b"), "\"a\\\"b\"");
    }

    #[test]
    fn rendering_lines() {
        let facts = FactSet {
            installed: set(&[("conf", 1)]),
            units: set(&[("Lib.A", 1)]),
            criteria: vec![("change".into(), -1)],
            ..FactSet::default()
        };
        let text = render_facts(&facts);
        assert_eq!(
            text,
            "unit(\"Lib.A\",1).\ninstalled(conf,1).\ncriterion(change,-1).\n"
        );
    }

    #[test]
    fn empty_input_gives_empty_facts() {
        let doc = CudfDocument::empty();
        let closure = crate::preprocess::compute_closure(&doc, &CriteriaSeq::default());
        let facts = generate(&doc, &CriteriaSeq::default(), &closure).unwrap();
        assert!(facts.is_empty());
        assert_eq!(render_facts(&facts), "");
    }

    #[test]
    fn infeasible_closure_is_rejected() {
        let closure = ClosureResult {
            out: BTreeSet::new(),
            closure: BTreeSet::new(),
            feasible: false,
            iterations: 0,
        };
        assert_eq!(
            generate(&CudfDocument::empty(), &CriteriaSeq::default(), &closure),
            Err(FactsError::InfeasibleInput)
        );
    }
}
