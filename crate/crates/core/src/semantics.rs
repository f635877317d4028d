//! Meaning of package formulas over (possibly infinite) provided version
//! sets, the five optimization sets, and an independent solution validator.
//!
//! Unbounded `provides` entries stand for every positive version of a name.
//! They are never materialized: every operation is phrased as a constraint
//! tested against a [`VersionSpec`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::criteria::{CriteriaSeq, Criterion, Polarity};
use crate::model::{Clause, Constraint, CudfDocument, Op, PackageDesc, PackageId};

/// One provided version entry: a concrete version or all versions of a name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VersionSpec {
    Exactly(u64),
    All,
}

/// Versions provided under one name. `All` absorbs concrete entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProvidedVersions {
    Exactly(BTreeSet<u64>),
    All,
}

impl ProvidedVersions {
    fn add(&mut self, spec: VersionSpec) {
        match (self, spec) {
            (this @ ProvidedVersions::Exactly(_), VersionSpec::All) => {
                *this = ProvidedVersions::All
            }
            (ProvidedVersions::Exactly(set), VersionSpec::Exactly(v)) => {
                set.insert(v);
            }
            (ProvidedVersions::All, _) => {}
        }
    }

    pub fn specs(&self) -> Vec<VersionSpec> {
        match self {
            ProvidedVersions::All => vec![VersionSpec::All],
            ProvidedVersions::Exactly(set) => {
                set.iter().map(|&v| VersionSpec::Exactly(v)).collect()
            }
        }
    }
}

/// The pairs a package, or a set of packages, makes available.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProvideSet {
    entries: BTreeMap<String, ProvidedVersions>,
}

impl ProvideSet {
    pub fn insert(&mut self, name: &str, spec: VersionSpec) {
        match self.entries.get_mut(name) {
            Some(versions) => versions.add(spec),
            None => {
                let versions = match spec {
                    VersionSpec::All => ProvidedVersions::All,
                    VersionSpec::Exactly(v) => ProvidedVersions::Exactly(BTreeSet::from([v])),
                };
                self.entries.insert(name.to_string(), versions);
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&ProvidedVersions> {
        self.entries.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ProvidedVersions)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Does some provided pair satisfy the constraint?
    pub fn satisfies(&self, constraint: &Constraint) -> bool {
        match self.entries.get(&constraint.name) {
            None => false,
            Some(ProvidedVersions::All) => bound_satisfiable(constraint.bound),
            Some(ProvidedVersions::Exactly(set)) => {
                set.iter().any(|&v| version_matches(constraint.bound, v))
            }
        }
    }

    /// Does some provided pair fall into the clause's targets?
    pub fn serves(&self, clause: &Clause) -> bool {
        clause.atoms().iter().any(|atom| self.satisfies(atom))
    }
}

/// Union of the provide sets of `packages`.
pub fn provide_all<'a>(packages: impl IntoIterator<Item = &'a PackageDesc>) -> ProvideSet {
    let mut set = ProvideSet::default();
    for pkg in packages {
        for (name, spec) in provided_entries(pkg) {
            set.insert(name, spec);
        }
    }
    set
}

/// The package's own pair plus everything its `provides` names.
pub fn provide(pkg: &PackageDesc) -> ProvideSet {
    provide_all(std::iter::once(pkg))
}

/// Raw provide entries of a package, own pair first.
pub fn provided_entries(pkg: &PackageDesc) -> impl Iterator<Item = (&str, VersionSpec)> {
    let own = std::iter::once((pkg.id.name.as_str(), VersionSpec::Exactly(pkg.id.version)));
    let provided = pkg.provides.iter().filter_map(|clause| {
        let atom = clause.atoms().first()?;
        let spec = match atom.bound {
            Some((Op::Eq, n)) => VersionSpec::Exactly(n),
            // validated documents only carry `=` bounds in provides
            Some(_) => return None,
            None => VersionSpec::All,
        };
        Some((atom.name.as_str(), spec))
    });
    own.chain(provided)
}

/// Is there a positive version `v` with `v op n`?
pub fn bound_satisfiable(bound: Option<(Op, u64)>) -> bool {
    match bound {
        None => true,
        Some((Op::Lt, n)) => n > 1,
        Some((Op::Le, n)) | Some((Op::Eq, n)) => n >= 1,
        Some(_) => true,
    }
}

fn version_matches(bound: Option<(Op, u64)>, v: u64) -> bool {
    bound.is_none_or(|(op, n)| op.holds(v, n))
}

/// Does `(name, v)` belong to the targets of `c`?
pub fn constraint_matches(c: &Constraint, name: &str, v: u64) -> bool {
    c.name == name && version_matches(c.bound, v)
}

/// Does `(name, spec)` intersect the targets of `c`?
pub fn spec_matches(c: &Constraint, name: &str, spec: VersionSpec) -> bool {
    if c.name != name {
        return false;
    }
    match spec {
        VersionSpec::Exactly(v) => version_matches(c.bound, v),
        VersionSpec::All => bound_satisfiable(c.bound),
    }
}

/// Does the package provide some target of the clause?
pub fn serves(clause: &Clause, pkg: &PackageDesc) -> bool {
    provided_entries(pkg).any(|(name, spec)| {
        clause
            .atoms()
            .iter()
            .any(|atom| spec_matches(atom, name, spec))
    })
}

/// Ids of the candidates that provide some target of the clause.
pub fn clause_providers<'a>(
    clause: &Clause,
    candidates: impl IntoIterator<Item = &'a PackageDesc>,
) -> BTreeSet<PackageId> {
    candidates
        .into_iter()
        .filter(|pkg| serves(clause, pkg))
        .map(|pkg| pkg.id.clone())
        .collect()
}

/// Names that occur in the targets of the clause. Atoms whose bound no
/// positive version satisfies contribute nothing.
pub fn target_names(clause: &Clause) -> BTreeSet<&str> {
    clause
        .atoms()
        .iter()
        .filter(|a| bound_satisfiable(a.bound))
        .map(|a| a.name.as_str())
        .collect()
}

/// Number of versions of `name` in the clause's targets; `None` if infinite.
pub fn target_cardinality(clause: &Clause, name: &str) -> Option<u64> {
    let mut prefix = 0u64; // every v in 1..=prefix is a target
    let mut points = BTreeSet::new();
    for atom in clause.atoms().iter().filter(|a| a.name == name) {
        match atom.bound {
            None | Some((Op::Neq, _)) | Some((Op::Gt, _)) | Some((Op::Ge, _)) => return None,
            Some((Op::Lt, n)) => prefix = prefix.max(n - 1),
            Some((Op::Le, n)) => prefix = prefix.max(n),
            Some((Op::Eq, n)) => {
                points.insert(n);
            }
        }
    }
    Some(prefix + points.into_iter().filter(|&p| p > prefix).count() as u64)
}

/// Versions of one name that a package provides inside a clause's targets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NameMatch {
    Versions(BTreeSet<u64>),
    /// Every target version of the name.
    All,
}

/// `targets(clause) ∩ Provide(p)`, grouped by name.
pub type MatchSet = BTreeMap<String, NameMatch>;

/// Computes the part of the clause's targets that `provides` covers.
pub fn match_set(clause: &Clause, provides: &ProvideSet) -> MatchSet {
    let mut out = MatchSet::new();
    for name in target_names(clause) {
        let atoms: Vec<&Constraint> = clause.atoms().iter().filter(|a| a.name == name).collect();
        match provides.get(name) {
            None => {}
            Some(ProvidedVersions::All) => {
                out.insert(name.to_string(), NameMatch::All);
            }
            Some(ProvidedVersions::Exactly(set)) => {
                let hits: BTreeSet<u64> = set
                    .iter()
                    .copied()
                    .filter(|&v| atoms.iter().any(|a| version_matches(a.bound, v)))
                    .collect();
                if !hits.is_empty() {
                    out.insert(name.to_string(), NameMatch::Versions(hits));
                }
            }
        }
    }
    out
}

/// Set equality of two match sets of the same clause.
pub fn same_match(clause: &Clause, a: &MatchSet, b: &MatchSet) -> bool {
    if a.len() != b.len() {
        return false;
    }
    a.iter().all(|(name, ma)| match (ma, b.get(name)) {
        (_, None) => false,
        (NameMatch::All, Some(NameMatch::All)) => true,
        (NameMatch::Versions(x), Some(NameMatch::Versions(y))) => x == y,
        // concrete matches are a subset of the targets; equal iff same size
        (NameMatch::All, Some(NameMatch::Versions(v)))
        | (NameMatch::Versions(v), Some(NameMatch::All)) => {
            target_cardinality(clause, name) == Some(v.len() as u64)
        }
    })
}

/// Number of distinct pairs in a match set; `None` if infinite.
pub fn match_cardinality(clause: &Clause, set: &MatchSet) -> Option<u64> {
    set.iter().try_fold(0u64, |acc, (name, m)| {
        let n = match m {
            NameMatch::All => target_cardinality(clause, name)?,
            NameMatch::Versions(v) => v.len() as u64,
        };
        Some(acc.saturating_add(n))
    })
}

/// The five criterion sets of a follow-up installation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CriteriaSets {
    pub new: BTreeSet<String>,
    pub removed: BTreeSet<String>,
    pub changed: BTreeSet<String>,
    pub not_up_to_date: BTreeSet<String>,
    /// `(name, version, i)` for each unserved recommends clause `i` (1-based).
    pub unsat_recommends: BTreeSet<(String, u64, usize)>,
}

impl CriteriaSets {
    pub fn count(&self, criterion: Criterion) -> u64 {
        (match criterion {
            Criterion::NewPackage => self.new.len(),
            Criterion::Removed => self.removed.len(),
            Criterion::Changed => self.changed.len(),
            Criterion::NotUpToDate => self.not_up_to_date.len(),
            Criterion::UnsatRecommends => self.unsat_recommends.len(),
        }) as u64
    }
}

/// Evaluates the criterion sets of `installation` against the document's
/// existing installation and universe.
pub fn compute_sets(doc: &CudfDocument, installation: &BTreeSet<PackageId>) -> CriteriaSets {
    let existing = doc.installed();
    let names_of = |set: &BTreeSet<PackageId>| -> BTreeSet<String> {
        set.iter().map(|id| id.name.clone()).collect()
    };
    let existing_names = names_of(&existing);
    let new_names = names_of(installation);

    let new = new_names.difference(&existing_names).cloned().collect();
    let removed = existing_names.difference(&new_names).cloned().collect();
    let changed = installation
        .symmetric_difference(&existing)
        .map(|id| id.name.clone())
        .collect();
    let not_up_to_date = new_names
        .iter()
        .filter(|name| match doc.max_version(name) {
            Ok(max) => !installation.contains(&PackageId::new(name.as_str(), max)),
            Err(_) => false,
        })
        .cloned()
        .collect();

    let members: Vec<&PackageDesc> = installation
        .iter()
        .filter_map(|id| doc.package(id))
        .collect();
    let provided = provide_all(members.iter().copied());
    let mut unsat_recommends = BTreeSet::new();
    for pkg in &members {
        for (i, clause) in pkg.recommends.iter().enumerate() {
            if !provided.serves(clause) {
                unsat_recommends.insert((pkg.id.name.clone(), pkg.id.version, i + 1));
            }
        }
    }
    CriteriaSets {
        new,
        removed,
        changed,
        not_up_to_date,
        unsat_recommends,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ObjectiveValue {
    pub criterion: Criterion,
    pub polarity: Polarity,
    pub count: u64,
}

/// Criterion values of an installation, most significant first.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ObjectiveVector {
    pub values: Vec<ObjectiveValue>,
}

impl ObjectiveVector {
    /// Lexicographic comparison where `Less` means `self` is better.
    pub fn compare(&self, other: &Self) -> Ordering {
        for (a, b) in self.values.iter().zip(&other.values) {
            let ord = match a.polarity {
                Polarity::Minus => a.count.cmp(&b.count),
                Polarity::Plus => b.count.cmp(&a.count),
            };
            if ord != Ordering::Equal {
                return ord;
            }
        }
        Ordering::Equal
    }

    pub fn is_better_than(&self, other: &Self) -> bool {
        self.compare(other) == Ordering::Less
    }

    pub fn count(&self, criterion: Criterion) -> Option<u64> {
        self.values
            .iter()
            .find(|v| v.criterion == criterion)
            .map(|v| v.count)
    }

    pub fn counts(&self) -> Vec<u64> {
        self.values.iter().map(|v| v.count).collect()
    }
}

impl fmt::Display for ObjectiveVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(
                f,
                "{}{}={}",
                v.polarity.sign(),
                v.criterion.cli_name(),
                v.count
            )?;
        }
        Ok(())
    }
}

pub fn evaluate(
    doc: &CudfDocument,
    installation: &BTreeSet<PackageId>,
    criteria: &CriteriaSeq,
) -> ObjectiveVector {
    let sets = compute_sets(doc, installation);
    ObjectiveVector {
        values: criteria
            .most_significant_first()
            .map(|c| ObjectiveValue {
                criterion: c.criterion,
                polarity: c.polarity,
                count: sets.count(c.criterion),
            })
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnsatisfiedRequest(Clause),
    UnsatisfiedDependency(PackageId, Clause),
    ConflictViolated(PackageId, PackageId),
    /// Installed although a `remove` or `upgrade` request rules it out.
    OutPackageInstalled(PackageId),
    /// An upgrade clause is served by more than one version; carries the
    /// names involved.
    UpgradeMultiVersion(String),
    NotInUniverse(PackageId),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnsatisfiedRequest(c) => write!(f, "unsatisfied request: {c}"),
            Violation::UnsatisfiedDependency(p, c) => write!(f, "{p}: unsatisfied dependency {c}"),
            Violation::ConflictViolated(p, q) => write!(f, "{p} conflicts with {q}"),
            Violation::OutPackageInstalled(p) => write!(f, "{p} is excluded by the request"),
            Violation::UpgradeMultiVersion(n) => {
                write!(f, "upgrade of {n} yields several versions")
            }
            Violation::NotInUniverse(p) => write!(f, "{p} is not in the universe"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Is `pkg` ruled out by the request on its own, independent of the rest of
/// an installation? Covers `remove` targets, downgrades below the existing
/// installation, packages providing several versions of an upgraded name,
/// and packages providing only non-matching versions of one.
pub fn excluded_by_request(doc: &CudfDocument, pkg: &PackageDesc) -> bool {
    let request = doc.request();
    let own = provide(pkg);
    if request.remove.iter().any(|d| own.serves(d)) {
        return true;
    }
    let existing = provide_all(doc.packages().iter().filter(|p| p.installed));
    for upgrade in request.upgrade.iter() {
        let names = target_names(upgrade);
        let mut mentioned = 0u64;
        for name in &names {
            let Some(mine) = own.get(name) else { continue };
            // smallest version this package provides under `name`
            let lowest = match mine {
                ProvidedVersions::All => {
                    mentioned = u64::MAX;
                    1
                }
                ProvidedVersions::Exactly(set) => {
                    mentioned = mentioned.saturating_add(set.len() as u64);
                    *set.first().expect("non-empty")
                }
            };
            let downgrade = match existing.get(name) {
                None => false,
                Some(ProvidedVersions::All) => true,
                Some(ProvidedVersions::Exactly(set)) => set.last().is_some_and(|&top| lowest < top),
            };
            if downgrade {
                return true;
            }
        }
        if mentioned > 1 {
            return true;
        }
        if mentioned == 1 && !own.serves(upgrade) {
            return true;
        }
    }
    false
}

/// Checks an installation against the request and the package relations,
/// without using the preprocessor or the solver.
pub fn validate_solution(
    doc: &CudfDocument,
    installation: &BTreeSet<PackageId>,
) -> ValidationReport {
    let mut violations = Vec::new();
    let mut members = Vec::new();
    for id in installation {
        match doc.package(id) {
            Some(pkg) => members.push(pkg),
            None => violations.push(Violation::NotInUniverse(id.clone())),
        }
    }
    let provided = provide_all(members.iter().copied());
    let request = doc.effective_request();

    for clause in request.positive_clauses() {
        if !provided.serves(clause) {
            violations.push(Violation::UnsatisfiedRequest(clause.clone()));
        }
    }
    for pkg in &members {
        if excluded_by_request(doc, pkg) {
            violations.push(Violation::OutPackageInstalled(pkg.id.clone()));
        }
    }
    for pkg in &members {
        for clause in pkg.depends.iter() {
            if !provided.serves(clause) {
                violations.push(Violation::UnsatisfiedDependency(
                    pkg.id.clone(),
                    clause.clone(),
                ));
            }
        }
        for clause in pkg.conflicts.iter() {
            for other in &members {
                if other.id != pkg.id && serves(clause, other) {
                    let v = Violation::ConflictViolated(pkg.id.clone(), other.id.clone());
                    if !violations.contains(&v) {
                        violations.push(v);
                    }
                }
            }
        }
    }
    for upgrade in request.upgrade.iter() {
        let matched = match_set(upgrade, &provided);
        if match_cardinality(upgrade, &matched).is_none_or(|n| n > 1) {
            let names: Vec<&str> = matched.keys().map(String::as_str).collect();
            violations.push(Violation::UpgradeMultiVersion(names.join("|")));
        }
    }
    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_formula;

    fn clause(text: &str) -> Clause {
        parse_formula(text).unwrap().clauses.remove(0)
    }

    #[test]
    fn constraint_matching() {
        let gt1 = Constraint::bounded("conf", Op::Gt, 1);
        assert!(constraint_matches(&gt1, "conf", 2));
        assert!(!constraint_matches(&gt1, "conf", 1));
        assert!(!constraint_matches(&gt1, "dep", 5));
        assert!(constraint_matches(&Constraint::any("dep"), "dep", 9));
    }

    #[test]
    fn all_matches_every_satisfiable_bound() {
        for (op, n, expect) in [
            (Op::Lt, 1, false),
            (Op::Lt, 2, true),
            (Op::Le, 1, true),
            (Op::Eq, 4, true),
            (Op::Neq, 1, true),
            (Op::Gt, 7, true),
            (Op::Ge, 1, true),
        ] {
            let c = Constraint::bounded("x", op, n);
            assert_eq!(spec_matches(&c, "x", VersionSpec::All), expect, "{c}");
        }
    }

    #[test]
    fn provide_sets() {
        let mut feat = PackageDesc::new("feat", 1);
        feat.provides = parse_formula("conf = 3").unwrap();
        let set = provide(&feat);
        assert_eq!(
            set.get("feat"),
            Some(&ProvidedVersions::Exactly(BTreeSet::from([1])))
        );
        assert_eq!(
            set.get("conf"),
            Some(&ProvidedVersions::Exactly(BTreeSet::from([3])))
        );

        let mut x = PackageDesc::new("x", 1);
        x.provides = parse_formula("y, y = 2").unwrap();
        let set = provide(&x);
        assert_eq!(set.get("y"), Some(&ProvidedVersions::All));
        assert_eq!(set.names().collect::<Vec<_>>(), ["x", "y"]);

        let avail = PackageDesc::new("avail", 1);
        assert_eq!(provide(&avail).names().count(), 1);
    }

    #[test]
    fn cardinalities() {
        assert_eq!(
            target_cardinality(&clause("a < 4 | a = 3 | a = 9"), "a"),
            Some(4)
        );
        assert_eq!(target_cardinality(&clause("a <= 2 | b"), "a"), Some(2));
        assert_eq!(target_cardinality(&clause("a > 2"), "a"), None);
        assert_eq!(target_cardinality(&clause("a < 1"), "a"), Some(0));
        assert!(target_names(&clause("a < 1 | b")).into_iter().eq(["b"]));
    }

    #[test]
    fn match_set_equality_across_representations() {
        let u = clause("conf = 3");
        let mut all = ProvideSet::default();
        all.insert("conf", VersionSpec::All);
        let mut three = ProvideSet::default();
        three.insert("conf", VersionSpec::Exactly(3));
        let a = match_set(&u, &all);
        let b = match_set(&u, &three);
        assert_eq!(a.get("conf"), Some(&NameMatch::All));
        assert!(same_match(&u, &a, &b));
        assert_eq!(match_cardinality(&u, &a), Some(1));
        let wide = clause("conf > 1");
        assert!(!same_match(
            &wide,
            &match_set(&wide, &all),
            &match_set(&wide, &three)
        ));
        assert_eq!(match_cardinality(&wide, &match_set(&wide, &all)), None);
    }

    #[test]
    fn objective_order() {
        let v = |counts: &[u64], pol: Polarity| ObjectiveVector {
            values: counts
                .iter()
                .map(|&count| ObjectiveValue {
                    criterion: Criterion::Changed,
                    polarity: pol,
                    count,
                })
                .collect(),
        };
        assert!(v(&[0, 5], Polarity::Minus).is_better_than(&v(&[1, 0], Polarity::Minus)));
        assert!(v(&[1, 0], Polarity::Plus).is_better_than(&v(&[0, 5], Polarity::Plus)));
        assert_eq!(
            v(&[2, 2], Polarity::Minus).compare(&v(&[2, 2], Polarity::Minus)),
            Ordering::Equal
        );
    }
}
