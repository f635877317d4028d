//! Seeded pseudo-random CUDF instances.
//!
//! Packages are named `p<i>` with versions drawn from 1 to 3. Relationships
//! point mostly at existing names with an occasional bound, and a few
//! provides introduce virtual names `v<i>`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{Clause, Constraint, CudfDocument, Formula, Keep, Op, PackageDesc, Request};

#[derive(Clone, Debug, PartialEq)]
pub struct GenParams {
    pub seed: u64,
    pub packages: usize,
    /// Expected depends clauses per package.
    pub dep_density: f64,
    /// Expected conflicts clauses per package.
    pub conflict_density: f64,
    /// Probability that a package carries a provides entry.
    pub provide_density: f64,
    /// Probability that a package is installed.
    pub install_ratio: f64,
    /// Maximum install clauses in the request.
    pub request_size: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        Self {
            seed: 0,
            packages: 10,
            dep_density: 0.6,
            conflict_density: 0.3,
            provide_density: 0.15,
            install_ratio: 0.3,
            request_size: 2,
        }
    }
}

/// Builds a document from `params`; equal parameters give equal documents.
pub fn generate_instance(params: &GenParams) -> CudfDocument {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut ids: Vec<(String, u64)> = Vec::with_capacity(params.packages);
    let mut name_index = 0;
    while ids.len() < params.packages {
        let mut versions = [1u64, 2, 3];
        versions.shuffle(&mut rng);
        let count = rng.gen_range(1..=3).min(params.packages - ids.len());
        let mut chosen = versions[..count].to_vec();
        chosen.sort_unstable();
        for v in chosen {
            ids.push((format!("p{name_index}"), v));
        }
        name_index += 1;
    }
    let names: Vec<String> = (0..name_index).map(|i| format!("p{i}")).collect();
    let virtuals: Vec<String> = (0..(name_index / 4).max(1))
        .map(|i| format!("v{i}"))
        .collect();

    let mut packages = Vec::with_capacity(ids.len());
    for (name, version) in &ids {
        let mut pkg = PackageDesc::new(name.as_str(), *version);
        let others: Vec<&String> = names.iter().filter(|n| *n != name).collect();
        pkg.depends = random_formula(&mut rng, params.dep_density, &others, &virtuals, 2);
        pkg.conflicts = random_formula(&mut rng, params.conflict_density, &others, &virtuals, 1);
        pkg.recommends = random_formula(&mut rng, params.dep_density / 3.0, &others, &[], 1);
        if rng.gen_bool(params.provide_density.clamp(0.0, 1.0)) {
            let target = virtuals
                .choose(&mut rng)
                .expect("at least one virtual name");
            let atom = if rng.gen_bool(0.8) {
                Constraint::bounded(target.as_str(), Op::Eq, rng.gen_range(1..=3))
            } else {
                Constraint::any(target.as_str())
            };
            pkg.provides = Formula::new(vec![Clause::single(atom)]);
        }
        pkg.installed = rng.gen_bool(params.install_ratio.clamp(0.0, 1.0));
        if pkg.installed && rng.gen_bool(0.05) {
            pkg.keep = Some(
                *[Keep::Version, Keep::Package, Keep::Feature]
                    .choose(&mut rng)
                    .expect("nonempty"),
            );
        }
        packages.push(pkg);
    }

    let mut request = Request::default();
    let installs = rng.gen_range(0..=params.request_size);
    let mut install = Vec::new();
    for _ in 0..installs {
        install.push(Clause::single(random_atom(&mut rng, &names, &[])));
    }
    request.install = Formula::new(install);
    let installed_names: Vec<&String> = packages
        .iter()
        .filter(|p| p.installed)
        .map(|p| &p.id.name)
        .collect();
    if !installed_names.is_empty() && rng.gen_bool(0.15) {
        let name = *installed_names.choose(&mut rng).expect("nonempty");
        request.remove = Formula::new(vec![Clause::single(Constraint::any(name.as_str()))]);
    }
    if !installed_names.is_empty() && rng.gen_bool(0.15) {
        let name = *installed_names.choose(&mut rng).expect("nonempty");
        let atom = if rng.gen_bool(0.5) {
            Constraint::any(name.as_str())
        } else {
            Constraint::bounded(name.as_str(), Op::Ge, rng.gen_range(1..=3))
        };
        request.upgrade = Formula::new(vec![Clause::single(atom)]);
    }

    CudfDocument::new(packages, request).expect("generated packages are distinct")
}

fn random_formula(
    rng: &mut ChaCha8Rng,
    density: f64,
    names: &[&String],
    virtuals: &[String],
    max_atoms: usize,
) -> Formula {
    if names.is_empty() {
        return Formula::default();
    }
    let mut clauses = Vec::new();
    let mut left = density.max(0.0);
    while left > 0.0 {
        if rng.gen_bool(left.min(1.0)) {
            let atoms = (0..rng.gen_range(1..=max_atoms))
                .map(|_| random_atom(rng, names, virtuals))
                .collect();
            clauses.extend(Clause::new(atoms));
        }
        left -= 1.0;
    }
    Formula::new(clauses)
}

fn random_atom<S: AsRef<str>>(
    rng: &mut ChaCha8Rng,
    names: &[S],
    virtuals: &[String],
) -> Constraint {
    let name: &str = if !virtuals.is_empty() && rng.gen_bool(0.1) {
        virtuals.choose(rng).expect("nonempty").as_str()
    } else {
        names.choose(rng).expect("nonempty name pool").as_ref()
    };
    if rng.gen_bool(0.6) {
        return Constraint::any(name);
    }
    let op = *[Op::Eq, Op::Neq, Op::Lt, Op::Le, Op::Gt, Op::Ge]
        .choose(rng)
        .expect("nonempty");
    Constraint::bounded(name, op, rng.gen_range(1..=3))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_document, render_document};

    #[test]
    fn equal_seeds_equal_documents() {
        let params = GenParams {
            seed: 7,
            packages: 40,
            ..GenParams::default()
        };
        let a = render_document(&generate_instance(&params));
        let b = render_document(&generate_instance(&params));
        assert_eq!(a, b);
        let other = GenParams { seed: 8, ..params };
        assert_ne!(a, render_document(&generate_instance(&other)));
    }

    #[test]
    fn sizes_and_round_trip() {
        for seed in 0..20 {
            let params = GenParams {
                seed,
                packages: 12,
                ..GenParams::default()
            };
            let doc = generate_instance(&params);
            assert_eq!(doc.universe().len(), 12);
            assert!(doc
                .packages()
                .iter()
                .all(|p| (1..=3).contains(&p.id.version)));
            assert_eq!(parse_document(&render_document(&doc)).unwrap(), doc);
        }
    }
}
