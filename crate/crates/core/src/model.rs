//! Domain types for CUDF documents: versioned packages, package formulas and
//! the user request.
//!
//! A [`CudfDocument`] is immutable once built through [`CudfDocument::new`],
//! which enforces the structural rules every later stage relies on: versions
//! are positive, `(name, version)` pairs are distinct, and `provides` only
//! names exact versions or whole packages.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

/// A versioned package `(name, version)`; ordered by name, then version.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PackageId {
    pub name: String,
    pub version: u64,
}

impl PackageId {
    pub fn new(name: impl Into<String>, version: u64) -> Self {
        Self {
            name: name.into(),
            version,
        }
    }
}

impl fmt::Display for PackageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.name, self.version)
    }
}

/// Comparison operator of a version bound.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    Eq,
    Neq,
    Lt,
    Le,
    Gt,
    Ge,
}

impl Op {
    pub fn holds(self, lhs: u64, rhs: u64) -> bool {
        match self {
            Op::Eq => lhs == rhs,
            Op::Neq => lhs != rhs,
            Op::Lt => lhs < rhs,
            Op::Le => lhs <= rhs,
            Op::Gt => lhs > rhs,
            Op::Ge => lhs >= rhs,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Op::Eq => "=",
            Op::Neq => "!=",
            Op::Lt => "<",
            Op::Le => "<=",
            Op::Gt => ">",
            Op::Ge => ">=",
        }
    }
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// A package constraint `name [op n]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Constraint {
    pub name: String,
    pub bound: Option<(Op, u64)>,
}

impl Constraint {
    /// Constraint matching every version of `name`.
    pub fn any(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            bound: None,
        }
    }

    pub fn bounded(name: impl Into<String>, op: Op, version: u64) -> Self {
        Self {
            name: name.into(),
            bound: Some((op, version)),
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bound {
            None => f.write_str(&self.name),
            Some((op, n)) => write!(f, "{} {} {}", self.name, op, n),
        }
    }
}

/// A disjunction of constraints.
///
/// A clause with no atoms is the `false!` literal: nothing satisfies it.
/// It can only be built through [`Clause::never`].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    atoms: Vec<Constraint>,
}

impl Clause {
    /// Builds a clause from its atoms; returns `None` for an empty list.
    pub fn new(atoms: Vec<Constraint>) -> Option<Self> {
        if atoms.is_empty() {
            None
        } else {
            Some(Self { atoms })
        }
    }

    pub fn single(atom: Constraint) -> Self {
        Self { atoms: vec![atom] }
    }

    /// The unsatisfiable clause written `false!`.
    pub fn never() -> Self {
        Self { atoms: Vec::new() }
    }

    pub fn atoms(&self) -> &[Constraint] {
        &self.atoms
    }

    pub fn is_never(&self) -> bool {
        self.atoms.is_empty()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.atoms.is_empty() {
            return f.write_str("false!");
        }
        for (i, atom) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{atom}")?;
        }
        Ok(())
    }
}

/// A conjunction of clauses in source order; the empty formula is true.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Formula {
    pub clauses: Vec<Clause>,
}

impl Formula {
    pub fn new(clauses: Vec<Clause>) -> Self {
        Self { clauses }
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Clause> {
        self.clauses.iter()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("true!");
        }
        for (i, clause) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{clause}")?;
        }
        Ok(())
    }
}

/// The CUDF `keep` property.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Keep {
    Version,
    Package,
    Feature,
    None,
}

impl Keep {
    pub fn as_str(self) -> &'static str {
        match self {
            Keep::Version => "version",
            Keep::Package => "package",
            Keep::Feature => "feature",
            Keep::None => "none",
        }
    }
}

/// One `package:` stanza.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackageDesc {
    pub id: PackageId,
    pub depends: Formula,
    pub conflicts: Formula,
    pub provides: Formula,
    pub recommends: Formula,
    pub installed: bool,
    pub keep: Option<Keep>,
}

impl PackageDesc {
    /// A package with no relationships, not installed.
    pub fn new(name: impl Into<String>, version: u64) -> Self {
        Self {
            id: PackageId::new(name, version),
            depends: Formula::default(),
            conflicts: Formula::default(),
            provides: Formula::default(),
            recommends: Formula::default(),
            installed: false,
            keep: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.id.name
    }

    pub fn version(&self) -> u64 {
        self.id.version
    }
}

/// The `request:` stanza.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Request {
    pub install: Formula,
    pub remove: Formula,
    pub upgrade: Formula,
}

impl Request {
    pub fn is_empty(&self) -> bool {
        self.install.is_empty() && self.remove.is_empty() && self.upgrade.is_empty()
    }

    /// Install clauses followed by upgrade clauses: every clause that must be
    /// served by some package of a follow-up installation.
    pub fn positive_clauses(&self) -> impl Iterator<Item = &Clause> {
        self.install.iter().chain(self.upgrade.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("duplicate package ({0}, {1})")]
    DuplicatePackage(String, u64),
    #[error("invalid version {1} for package {0}: versions start at 1")]
    InvalidVersion(String, u64),
    #[error("invalid provides on ({0}, {1}): {2}")]
    InvalidProvides(String, u64, String),
    #[error("unknown package name {0}")]
    UnknownName(String),
}

/// A validated CUDF document: the universe of packages plus a request.
#[derive(Clone, Debug)]
pub struct CudfDocument {
    packages: Vec<PackageDesc>,
    request: Request,
    by_name: BTreeMap<String, Vec<usize>>,
}

impl PartialEq for CudfDocument {
    fn eq(&self, other: &Self) -> bool {
        self.packages == other.packages && self.request == other.request
    }
}

impl Eq for CudfDocument {}

impl CudfDocument {
    /// Validates and builds a document. Package order is preserved.
    pub fn new(packages: Vec<PackageDesc>, request: Request) -> Result<Self, ModelError> {
        let mut seen = BTreeSet::new();
        let mut by_name: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (idx, pkg) in packages.iter().enumerate() {
            if pkg.id.version == 0 {
                return Err(ModelError::InvalidVersion(pkg.id.name.clone(), 0));
            }
            if !seen.insert(&pkg.id) {
                return Err(ModelError::DuplicatePackage(
                    pkg.id.name.clone(),
                    pkg.id.version,
                ));
            }
            check_provides(pkg)?;
            by_name.entry(pkg.id.name.clone()).or_default().push(idx);
        }
        Ok(Self {
            packages,
            request,
            by_name,
        })
    }

    pub fn empty() -> Self {
        Self {
            packages: Vec::new(),
            request: Request::default(),
            by_name: BTreeMap::new(),
        }
    }

    pub fn packages(&self) -> &[PackageDesc] {
        &self.packages
    }

    pub fn request(&self) -> &Request {
        &self.request
    }

    /// Looks a package up by `(name, version)`.
    pub fn package(&self, id: &PackageId) -> Option<&PackageDesc> {
        self.index_of(id).map(|idx| &self.packages[idx])
    }

    pub fn index_of(&self, id: &PackageId) -> Option<usize> {
        self.by_name
            .get(&id.name)?
            .iter()
            .copied()
            .find(|&idx| self.packages[idx].id.version == id.version)
    }

    /// Indices of all packages called `name`, in document order.
    pub fn indices_of(&self, name: &str) -> &[usize] {
        self.by_name.get(name).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Distinct package names in the universe.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.by_name.keys().map(String::as_str)
    }

    /// The universe as a set of ids.
    pub fn universe(&self) -> BTreeSet<PackageId> {
        self.packages.iter().map(|p| p.id.clone()).collect()
    }

    /// The existing installation: packages flagged `installed: true`.
    pub fn installed(&self) -> BTreeSet<PackageId> {
        self.packages
            .iter()
            .filter(|p| p.installed)
            .map(|p| p.id.clone())
            .collect()
    }

    pub fn versions_of(&self, name: &str) -> BTreeSet<u64> {
        self.indices_of(name)
            .iter()
            .map(|&idx| self.packages[idx].id.version)
            .collect()
    }

    pub fn max_version(&self, name: &str) -> Result<u64, ModelError> {
        self.indices_of(name)
            .iter()
            .map(|&idx| self.packages[idx].id.version)
            .max()
            .ok_or_else(|| ModelError::UnknownName(name.to_string()))
    }

    /// The request with `keep` properties of installed packages folded in as
    /// extra install clauses: `keep: version` pins `name = version`,
    /// `keep: package` requires some version of the name, `keep: feature`
    /// requires each provided feature.
    pub fn effective_request(&self) -> Request {
        let mut request = self.request.clone();
        for pkg in self.packages.iter().filter(|p| p.installed) {
            match pkg.keep {
                Some(Keep::Version) => {
                    request
                        .install
                        .clauses
                        .push(Clause::single(Constraint::bounded(
                            pkg.id.name.clone(),
                            Op::Eq,
                            pkg.id.version,
                        )))
                }
                Some(Keep::Package) => request
                    .install
                    .clauses
                    .push(Clause::single(Constraint::any(pkg.id.name.clone()))),
                Some(Keep::Feature) => request
                    .install
                    .clauses
                    .extend(pkg.provides.clauses.iter().cloned()),
                Some(Keep::None) | None => {}
            }
        }
        request
    }
}

fn check_provides(pkg: &PackageDesc) -> Result<(), ModelError> {
    let bad = |why: &str| {
        ModelError::InvalidProvides(pkg.id.name.clone(), pkg.id.version, why.to_string())
    };
    for clause in pkg.provides.iter() {
        match clause.atoms() {
            [atom] => match atom.bound {
                None | Some((Op::Eq, _)) => {}
                Some((op, _)) => return Err(bad(&format!("operator {op} not allowed"))),
            },
            [] => return Err(bad("false! not allowed")),
            _ => return Err(bad("disjunction not allowed")),
        }
    }
    Ok(())
}
