#![allow(dead_code)]

pub mod golden;

use std::collections::BTreeSet;

use cudf_upgrade::generator::{generate_instance, GenParams};
use cudf_upgrade::model::{Keep, Op};
use cudf_upgrade::semantics::excluded_by_request;
use cudf_upgrade::{
    parse_document, Clause, Constraint, CudfDocument, Formula, PackageDesc, PackageId, Request,
};
use proptest::prelude::*;

pub const SAMPLE: &str = include_str!("../../data/sample.cudf");

pub fn sample() -> CudfDocument {
    parse_document(SAMPLE).expect("sample parses")
}

pub fn id(name: &str, version: u64) -> PackageId {
    PackageId::new(name, version)
}

pub fn ids(pairs: &[(&str, u64)]) -> BTreeSet<PackageId> {
    pairs.iter().map(|&(n, v)| id(n, v)).collect()
}

/// Small instance `i` of the oracle corpus: 4 to 12 packages with densities
/// cycling through sparse and dense settings.
pub fn small_instance(i: u64) -> CudfDocument {
    let pick = |options: &[f64], salt: u64| options[((i / salt) % options.len() as u64) as usize];
    generate_instance(&GenParams {
        seed: i,
        packages: 4 + (i % 9) as usize,
        dep_density: pick(&[0.3, 0.7, 1.2, 1.8], 1),
        conflict_density: pick(&[0.1, 0.4, 0.8], 3),
        provide_density: pick(&[0.0, 0.2, 0.4], 7),
        install_ratio: pick(&[0.2, 0.4, 0.6], 2),
        request_size: 1 + (i % 3) as usize,
    })
}

/// Large sparse instance for measuring the closure's reduction.
pub fn large_instance(seed: u64) -> CudfDocument {
    generate_instance(&GenParams {
        seed,
        packages: 1000,
        dep_density: 0.3,
        conflict_density: 0.3,
        provide_density: 0.1,
        install_ratio: 0.05,
        request_size: 5,
    })
}

/// Packages a follow-up installation may contain, decided by the validator's
/// own request check rather than the preprocessor.
pub fn oracle_scope(doc: &CudfDocument) -> BTreeSet<PackageId> {
    doc.packages()
        .iter()
        .filter(|p| !excluded_by_request(doc, p))
        .map(|p| p.id.clone())
        .collect()
}

const NAMES: &[&str] = &["a", "b", "c", "lib-x", "Lib.Y", "z_3", "p+q", "v@1/alt"];

fn arb_op() -> impl Strategy<Value = Op> {
    prop::sample::select(vec![Op::Eq, Op::Neq, Op::Lt, Op::Le, Op::Gt, Op::Ge])
}

fn arb_constraint() -> impl Strategy<Value = Constraint> {
    (
        prop::sample::select(NAMES),
        prop::option::of((arb_op(), 1u64..6)),
    )
        .prop_map(|(name, bound)| Constraint {
            name: name.to_string(),
            bound,
        })
}

fn arb_clause() -> impl Strategy<Value = Clause> {
    prop_oneof![
        9 => prop::collection::vec(arb_constraint(), 1..4)
            .prop_map(|atoms| Clause::new(atoms).expect("nonempty")),
        1 => Just(Clause::never()),
    ]
}

fn arb_formula() -> impl Strategy<Value = Formula> {
    prop::collection::vec(arb_clause(), 0..3).prop_map(Formula::new)
}

fn arb_provides() -> impl Strategy<Value = Formula> {
    prop::collection::vec(
        (prop::sample::select(NAMES), prop::option::of(1u64..6)).prop_map(|(name, v)| {
            Clause::single(match v {
                Some(v) => Constraint::bounded(name, Op::Eq, v),
                None => Constraint::any(name),
            })
        }),
        0..3,
    )
    .prop_map(Formula::new)
}

fn arb_keep() -> impl Strategy<Value = Option<Keep>> {
    prop::option::of(prop::sample::select(vec![
        Keep::Version,
        Keep::Package,
        Keep::Feature,
        Keep::None,
    ]))
}

fn arb_package() -> impl Strategy<Value = PackageDesc> {
    (
        prop::sample::select(NAMES),
        1u64..6,
        arb_formula(),
        arb_formula(),
        arb_provides(),
        arb_formula(),
        any::<bool>(),
        arb_keep(),
    )
        .prop_map(
            |(name, version, depends, conflicts, provides, recommends, installed, keep)| {
                PackageDesc {
                    depends,
                    conflicts,
                    provides,
                    recommends,
                    installed,
                    keep,
                    ..PackageDesc::new(name, version)
                }
            },
        )
}

/// Arbitrary valid documents, including unusual names, `false!` clauses,
/// unbounded provides and keep flags.
pub fn arb_document() -> impl Strategy<Value = CudfDocument> {
    (
        prop::collection::vec(arb_package(), 0..8),
        arb_formula(),
        arb_formula(),
        arb_formula(),
    )
        .prop_map(|(packages, install, remove, upgrade)| {
            let mut seen = BTreeSet::new();
            let packages = packages
                .into_iter()
                .filter(|p| seen.insert(p.id.clone()))
                .collect();
            CudfDocument::new(
                packages,
                Request {
                    install,
                    remove,
                    upgrade,
                },
            )
            .expect("distinct packages with single-atom provides")
        })
}
