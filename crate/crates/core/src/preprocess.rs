//! Relevance closure: which packages can matter for an optimal follow-up
//! installation.
//!
//! The closure starts from the providers of install and upgrade clauses,
//! is widened according to the chosen criteria, then saturated along
//! `depends` (and `recommends` / newest versions when those criteria are
//! minimized). Packages that the request rules out are collected in the
//! out set first and never enter the closure.

use std::collections::{BTreeMap, BTreeSet};

use crate::criteria::{CriteriaSeq, Criterion, Polarity};
use crate::model::{Clause, CudfDocument, PackageId};
use crate::semantics::{
    bound_satisfiable, provide, provided_entries, spec_matches, target_names, VersionSpec,
};

/// For every name, the packages providing some version of it.
#[derive(Clone, Debug, Default)]
pub struct ProviderIndex {
    by_name: BTreeMap<String, Vec<(usize, VersionSpec)>>,
}

impl ProviderIndex {
    pub fn new(doc: &CudfDocument) -> Self {
        let mut by_name: BTreeMap<String, Vec<(usize, VersionSpec)>> = BTreeMap::new();
        for (idx, pkg) in doc.packages().iter().enumerate() {
            for (name, versions) in provide(pkg).iter() {
                let entries = by_name.entry(name.to_string()).or_default();
                entries.extend(versions.specs().into_iter().map(|spec| (idx, spec)));
            }
        }
        Self { by_name }
    }

    /// Providers of `name`, with the version each one provides.
    pub fn providers_of(&self, name: &str) -> &[(usize, VersionSpec)] {
        self.by_name.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Indices of packages providing some target of the clause, ascending.
    pub fn clause_providers(&self, clause: &Clause) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for atom in clause.atoms() {
            for &(idx, spec) in self.providers_of(&atom.name) {
                if spec_matches(atom, &atom.name, spec) {
                    out.insert(idx);
                }
            }
        }
        out
    }
}

/// Outcome of the closure computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureResult {
    pub out: BTreeSet<PackageId>,
    pub closure: BTreeSet<PackageId>,
    pub feasible: bool,
    /// Number of saturation passes that added packages.
    pub iterations: usize,
}

fn ids(doc: &CudfDocument, indices: impl IntoIterator<Item = usize>) -> BTreeSet<PackageId> {
    indices
        .into_iter()
        .map(|idx| doc.packages()[idx].id.clone())
        .collect()
}

fn out_flags(doc: &CudfDocument, index: &ProviderIndex) -> Vec<bool> {
    let request = doc.request();
    let mut out = vec![false; doc.packages().len()];

    for clause in request.remove.iter() {
        for idx in index.clause_providers(clause) {
            out[idx] = true;
        }
    }

    // highest version of each name provided by the existing installation;
    // `None` when some installed package provides every version
    let mut existing_top: BTreeMap<&str, Option<u64>> = BTreeMap::new();
    for pkg in doc.packages().iter().filter(|p| p.installed) {
        for (name, spec) in provided_entries(pkg) {
            let entry = existing_top.entry(name).or_insert(Some(0));
            *entry = match (*entry, spec) {
                (None, _) | (_, VersionSpec::All) => None,
                (Some(top), VersionSpec::Exactly(v)) => Some(top.max(v)),
            };
        }
    }

    for upgrade in request.upgrade.iter() {
        // per package: (pairs under upgraded names, smallest such version, any match)
        let mut seen: BTreeMap<usize, (u64, u64, bool)> = BTreeMap::new();
        for name in target_names(upgrade) {
            let atoms: Vec<_> = upgrade
                .atoms()
                .iter()
                .filter(|a| a.name == name && bound_satisfiable(a.bound))
                .collect();
            for &(idx, spec) in index.providers_of(name) {
                let entry = seen.entry(idx).or_insert((0, u64::MAX, false));
                let (count, low) = match spec {
                    VersionSpec::All => (u64::MAX, 1),
                    VersionSpec::Exactly(v) => (1, v),
                };
                entry.0 = entry.0.saturating_add(count);
                entry.1 = entry.1.min(low);
                entry.2 |= atoms.iter().any(|a| spec_matches(a, name, spec));
                let below_existing = match existing_top.get(name) {
                    None => false,
                    Some(None) => true,
                    Some(Some(top)) => low < *top,
                };
                if below_existing {
                    out[idx] = true;
                }
            }
        }
        for (idx, (count, _, matches)) in seen {
            if count > 1 || !matches {
                out[idx] = true;
            }
        }
    }
    out
}

/// Packages that no follow-up installation may contain.
pub fn compute_out(doc: &CudfDocument) -> BTreeSet<PackageId> {
    let index = ProviderIndex::new(doc);
    let flags = out_flags(doc, &index);
    ids(
        doc,
        flags.iter().enumerate().filter(|(_, &o)| o).map(|(i, _)| i),
    )
}

/// False iff some install or upgrade clause has no provider outside `out`.
pub fn check_feasible(doc: &CudfDocument, out: &BTreeSet<PackageId>) -> bool {
    let index = ProviderIndex::new(doc);
    let request = doc.effective_request();
    let is_out: Vec<bool> = doc.packages().iter().map(|p| out.contains(&p.id)).collect();
    let feasible = request.positive_clauses().all(|clause| {
        index
            .clause_providers(clause)
            .into_iter()
            .any(|idx| !is_out[idx])
    });
    feasible
}

/// Computes the out set, the feasibility test and the relevance closure.
pub fn compute_closure(doc: &CudfDocument, criteria: &CriteriaSeq) -> ClosureResult {
    let index = ProviderIndex::new(doc);
    let is_out = out_flags(doc, &index);
    let out = ids(
        doc,
        is_out
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .map(|(i, _)| i),
    );
    let request = doc.effective_request();

    let feasible = request.positive_clauses().all(|clause| {
        index
            .clause_providers(clause)
            .into_iter()
            .any(|idx| !is_out[idx])
    });
    if !feasible {
        return ClosureResult {
            out,
            closure: BTreeSet::new(),
            feasible: false,
            iterations: 0,
        };
    }

    let packages = doc.packages();
    let mut in_closure = vec![false; packages.len()];
    let mut frontier = Vec::new();
    let add = |idx: usize, in_closure: &mut Vec<bool>, frontier: &mut Vec<usize>| {
        if !is_out[idx] && !in_closure[idx] {
            in_closure[idx] = true;
            frontier.push(idx);
        }
    };

    for clause in request.positive_clauses() {
        for idx in index.clause_providers(clause) {
            add(idx, &mut in_closure, &mut frontier);
        }
    }

    let installed_names: BTreeSet<&str> = packages
        .iter()
        .filter(|p| p.installed)
        .map(|p| p.name())
        .collect();
    let has = |c: Criterion, p: Polarity| criteria.contains(c, p);
    for (idx, pkg) in packages.iter().enumerate() {
        let name_installed = installed_names.contains(pkg.name());
        let seed = (has(Criterion::NewPackage, Polarity::Plus) && !name_installed)
            || (has(Criterion::Removed, Polarity::Minus) && name_installed)
            || (has(Criterion::Changed, Polarity::Plus) && !pkg.installed)
            || (has(Criterion::Changed, Polarity::Minus) && pkg.installed)
            || (has(Criterion::NotUpToDate, Polarity::Plus)
                && doc
                    .max_version(pkg.name())
                    .is_ok_and(|max| pkg.version() < max))
            || (has(Criterion::UnsatRecommends, Polarity::Plus) && !pkg.recommends.is_empty());
        if seed {
            add(idx, &mut in_closure, &mut frontier);
        }
    }

    let follow_recommends = has(Criterion::UnsatRecommends, Polarity::Minus);
    let follow_newest = has(Criterion::NotUpToDate, Polarity::Minus);
    let mut iterations = 0;
    loop {
        // members added in the previous pass; older members are saturated
        let snapshot = std::mem::take(&mut frontier);
        let mut next = Vec::new();
        for &idx in &snapshot {
            let pkg = &packages[idx];
            let mut clauses: Vec<&Clause> = pkg.depends.iter().collect();
            if follow_recommends {
                clauses.extend(pkg.recommends.iter());
            }
            for clause in clauses {
                for target in index.clause_providers(clause) {
                    add(target, &mut in_closure, &mut next);
                }
            }
            if follow_newest {
                let newest = doc
                    .indices_of(pkg.name())
                    .iter()
                    .copied()
                    .max_by_key(|&i| packages[i].version())
                    .expect("package has its own name");
                add(newest, &mut in_closure, &mut next);
            }
        }
        if next.is_empty() {
            break;
        }
        iterations += 1;
        frontier = next;
    }

    ClosureResult {
        out,
        closure: ids(
            doc,
            in_closure
                .iter()
                .enumerate()
                .filter(|(_, &c)| c)
                .map(|(i, _)| i),
        ),
        feasible: true,
        iterations,
    }
}

/// The unrestricted candidate space `universe \ out`, used to compare
/// solving with and without the closure.
pub fn full_scope(doc: &CudfDocument) -> ClosureResult {
    let out = compute_out(doc);
    let feasible = check_feasible(doc, &out);
    let closure = if feasible {
        doc.universe().difference(&out).cloned().collect()
    } else {
        BTreeSet::new()
    };
    ClosureResult {
        out,
        closure,
        feasible,
        iterations: 0,
    }
}
