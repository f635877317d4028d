//! Optimization criteria and their significance order.

use std::fmt;

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    /// Names installed in the follow-up installation but not before.
    NewPackage,
    /// Names installed before but absent afterwards.
    Removed,
    /// Names with some version added or dropped.
    Changed,
    /// Names installed without their newest version.
    NotUpToDate,
    /// Recommendation clauses left unserved.
    UnsatRecommends,
}

impl Criterion {
    pub const ALL: [Criterion; 5] = [
        Criterion::NewPackage,
        Criterion::Removed,
        Criterion::Changed,
        Criterion::NotUpToDate,
        Criterion::UnsatRecommends,
    ];

    /// Constant used for this criterion in generated facts.
    pub fn fact_constant(self) -> &'static str {
        match self {
            Criterion::NewPackage => "newpackage",
            Criterion::Removed => "remove",
            Criterion::Changed => "change",
            Criterion::NotUpToDate => "uptodate",
            Criterion::UnsatRecommends => "recommend",
        }
    }

    /// Name used on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            Criterion::NewPackage => "new",
            Criterion::Removed => "removed",
            Criterion::Changed => "changed",
            Criterion::NotUpToDate => "notuptodate",
            Criterion::UnsatRecommends => "unsat_recommends",
        }
    }

    fn from_cli_name(name: &str) -> Option<Self> {
        Criterion::ALL.into_iter().find(|c| c.cli_name() == name)
    }
}

/// `Minus` minimizes the criterion's cardinality, `Plus` maximizes it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    Plus,
    Minus,
}

impl Polarity {
    pub fn sign(self) -> char {
        match self {
            Polarity::Plus => '+',
            Polarity::Minus => '-',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignedCriterion {
    pub criterion: Criterion,
    pub polarity: Polarity,
}

impl SignedCriterion {
    pub const fn minus(criterion: Criterion) -> Self {
        Self {
            criterion,
            polarity: Polarity::Minus,
        }
    }

    pub const fn plus(criterion: Criterion) -> Self {
        Self {
            criterion,
            polarity: Polarity::Plus,
        }
    }
}

impl fmt::Display for SignedCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.polarity.sign(), self.criterion.cli_name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CriteriaError {
    #[error("bad criteria: {0}")]
    BadCriteria(String),
}

/// A sequence of signed criteria stored in increasing order of significance:
/// the last item is the most significant one.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CriteriaSeq {
    items: Vec<SignedCriterion>,
}

impl CriteriaSeq {
    /// Builds a sequence from items listed least significant first.
    pub fn from_increasing(items: Vec<SignedCriterion>) -> Result<Self, CriteriaError> {
        for (i, item) in items.iter().enumerate() {
            if items[..i].iter().any(|o| o.criterion == item.criterion) {
                return Err(CriteriaError::BadCriteria(format!(
                    "criterion {} given twice",
                    item.criterion.cli_name()
                )));
            }
        }
        Ok(Self { items })
    }

    /// Builds a sequence from items listed most significant first.
    pub fn from_most_significant_first(
        mut items: Vec<SignedCriterion>,
    ) -> Result<Self, CriteriaError> {
        items.reverse();
        Self::from_increasing(items)
    }

    /// `(-changed, -removed)`: removals matter most, then changes.
    pub fn paranoid() -> Self {
        Self {
            items: vec![
                SignedCriterion::minus(Criterion::Changed),
                SignedCriterion::minus(Criterion::Removed),
            ],
        }
    }

    /// `(-new, -unsat_recommends, -notuptodate, -removed)`.
    pub fn trendy() -> Self {
        Self {
            items: vec![
                SignedCriterion::minus(Criterion::NewPackage),
                SignedCriterion::minus(Criterion::UnsatRecommends),
                SignedCriterion::minus(Criterion::NotUpToDate),
                SignedCriterion::minus(Criterion::Removed),
            ],
        }
    }

    /// Items, least significant first.
    pub fn increasing(&self) -> &[SignedCriterion] {
        &self.items
    }

    /// Items, most significant first.
    pub fn most_significant_first(&self) -> impl Iterator<Item = SignedCriterion> + '_ {
        self.items.iter().rev().copied()
    }

    pub fn contains(&self, criterion: Criterion, polarity: Polarity) -> bool {
        self.items
            .iter()
            .any(|c| c.criterion == criterion && c.polarity == polarity)
    }

    pub fn mentions(&self, criterion: Criterion) -> bool {
        self.items.iter().any(|c| c.criterion == criterion)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }
}

impl fmt::Display for CriteriaSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.most_significant_first().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Parses `paranoid`, `trendy`, or a comma-separated list of signed
/// criterion names given most significant first, e.g. `-removed,-changed`.
pub fn parse_criteria(text: &str) -> Result<CriteriaSeq, CriteriaError> {
    match text.trim() {
        "paranoid" => return Ok(CriteriaSeq::paranoid()),
        "trendy" => return Ok(CriteriaSeq::trendy()),
        "" => return Ok(CriteriaSeq::default()),
        _ => {}
    }
    let mut items = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        let (polarity, name) = if let Some(rest) = part.strip_prefix('-') {
            (Polarity::Minus, rest)
        } else if let Some(rest) = part.strip_prefix('+') {
            (Polarity::Plus, rest)
        } else {
            return Err(CriteriaError::BadCriteria(format!(
                "{part:?} lacks a leading + or -"
            )));
        };
        let criterion = Criterion::from_cli_name(name.trim()).ok_or_else(|| {
            CriteriaError::BadCriteria(format!("unknown criterion {:?}", name.trim()))
        })?;
        items.push(SignedCriterion {
            criterion,
            polarity,
        });
    }
    CriteriaSeq::from_most_significant_first(items)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets() {
        let paranoid = parse_criteria("paranoid").unwrap();
        let order: Vec<_> = paranoid.most_significant_first().collect();
        assert_eq!(
            order,
            [
                SignedCriterion::minus(Criterion::Removed),
                SignedCriterion::minus(Criterion::Changed)
            ]
        );
        assert_eq!(parse_criteria("-removed,-changed").unwrap(), paranoid);

        let trendy: Vec<_> = parse_criteria("trendy")
            .unwrap()
            .most_significant_first()
            .map(|c| c.criterion)
            .collect();
        assert_eq!(
            trendy,
            [
                Criterion::Removed,
                Criterion::NotUpToDate,
                Criterion::UnsatRecommends,
                Criterion::NewPackage
            ]
        );
        assert_eq!(
            parse_criteria("-removed,-notuptodate,-unsat_recommends,-new").unwrap(),
            CriteriaSeq::trendy()
        );
    }

    #[test]
    fn signed_names() {
        let plus = parse_criteria("+new").unwrap();
        assert_eq!(
            plus.increasing(),
            &[SignedCriterion::plus(Criterion::NewPackage)]
        );
        assert!(matches!(
            parse_criteria("new"),
            Err(CriteriaError::BadCriteria(_))
        ));
        assert!(matches!(
            parse_criteria("-bogus"),
            Err(CriteriaError::BadCriteria(_))
        ));
        assert!(matches!(
            parse_criteria("-new,+new"),
            Err(CriteriaError::BadCriteria(_))
        ));
        assert_eq!(
            CriteriaSeq::trendy().to_string(),
            "-removed,-notuptodate,-unsat_recommends,-new"
        );
    }
}
