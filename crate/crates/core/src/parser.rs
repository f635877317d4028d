//! CUDF text reader and writer.
//!
//! The reader accepts the subset of CUDF needed for upgrade problems:
//! `preamble:` stanzas are skipped, `package:` stanzas become
//! [`PackageDesc`]s and the single `request:` stanza becomes the
//! [`Request`]. A stanza starts at a `package:`, `request:` or `preamble:`
//! line; blank lines between stanzas are optional. Lines starting with
//! whitespace continue the previous property value.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::model::{
    Clause, Constraint, CudfDocument, Formula, Keep, ModelError, Op, PackageDesc, PackageId,
    Request,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownProperty,
    DuplicateProperty,
    BadVersion,
    BadOperator,
}

/// A parse failure, tagged with the 1-based source line.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, kind: ParseErrorKind, message: impl Into<String>) -> Self {
        Self {
            line,
            kind,
            message: message.into(),
        }
    }
}

/// Non-fatal diagnostic emitted while reading a document.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

struct Property {
    line: usize,
    key: String,
    value: String,
}

#[derive(PartialEq)]
enum StanzaKind {
    Preamble,
    Package,
    Request,
}

struct Stanza {
    kind: StanzaKind,
    line: usize,
    props: Vec<Property>,
}

/// Parses a document, discarding warnings.
pub fn parse_document(text: &str) -> Result<CudfDocument, ParseError> {
    parse_document_with(text, |_| {})
}

/// Parses raw bytes; invalid UTF-8 is reported as a syntax error.
pub fn parse_bytes(bytes: &[u8]) -> Result<CudfDocument, ParseError> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_document(text),
        Err(err) => {
            let line = 1 + bytes[..err.valid_up_to()]
                .iter()
                .filter(|&&b| b == b'\n')
                .count();
            Err(ParseError::new(
                line,
                ParseErrorKind::Syntax,
                "invalid UTF-8",
            ))
        }
    }
}

/// Parses a document, reporting unknown package properties to `warn`.
pub fn parse_document_with(
    text: &str,
    mut warn: impl FnMut(Warning),
) -> Result<CudfDocument, ParseError> {
    let stanzas = split_stanzas(text)?;
    let mut packages = Vec::new();
    let mut package_lines = Vec::new();
    let mut request: Option<Request> = None;
    for stanza in stanzas {
        match stanza.kind {
            StanzaKind::Preamble => {}
            StanzaKind::Package => {
                package_lines.push(stanza.line);
                packages.push(package_from(&stanza, &mut warn)?);
            }
            StanzaKind::Request => {
                if request.is_some() {
                    return Err(ParseError::new(
                        stanza.line,
                        ParseErrorKind::Syntax,
                        "more than one request stanza",
                    ));
                }
                request = Some(request_from(&stanza)?);
            }
        }
    }
    CudfDocument::new(packages, request.unwrap_or_default())
        .map_err(|err| model_error(err, &package_lines, text))
}

fn model_error(err: ModelError, package_lines: &[usize], text: &str) -> ParseError {
    // locate the offending stanza; the duplicate is the second occurrence
    let find = |name: &str, version: u64, nth: usize| {
        let doc_lines: Vec<&str> = text.lines().collect();
        package_lines
            .iter()
            .copied()
            .filter(|&line| {
                let header = doc_lines[line - 1];
                header.split_once(':').map(|(_, v)| v.trim()) == Some(name)
                    && stanza_version(&doc_lines, line) == Some(version)
            })
            .nth(nth)
            .unwrap_or(1)
    };
    match err {
        ModelError::DuplicatePackage(name, version) => ParseError::new(
            find(&name, version, 1),
            ParseErrorKind::Syntax,
            format!("duplicate package ({name}, {version})"),
        ),
        ModelError::InvalidProvides(name, version, why) => ParseError::new(
            find(&name, version, 0),
            ParseErrorKind::BadOperator,
            format!("provides of ({name}, {version}): {why}"),
        ),
        other => ParseError::new(1, ParseErrorKind::Syntax, other.to_string()),
    }
}

fn stanza_version(lines: &[&str], header: usize) -> Option<u64> {
    lines[header..]
        .iter()
        .take_while(|l| {
            let key = l.split(':').next().unwrap_or("").trim();
            !matches!(key, "package" | "request" | "preamble")
        })
        .find_map(|l| {
            let (k, v) = l.split_once(':')?;
            (k.trim() == "version").then(|| v.trim().parse().ok())?
        })
}

fn split_stanzas(text: &str) -> Result<Vec<Stanza>, ParseError> {
    let mut stanzas: Vec<Stanza> = Vec::new();
    let mut open = false;
    for (idx, raw) in text.split('\n').enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.trim().is_empty() {
            open = false;
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        if line.starts_with(' ') || line.starts_with('\t') {
            let prop = open
                .then(|| stanzas.last_mut().and_then(|s| s.props.last_mut()))
                .flatten()
                .ok_or_else(|| {
                    ParseError::new(
                        line_no,
                        ParseErrorKind::Syntax,
                        "dangling continuation line",
                    )
                })?;
            if !prop.value.is_empty() {
                prop.value.push(' ');
            }
            prop.value.push_str(line.trim());
            continue;
        }
        let (key, value) = line.split_once(':').ok_or_else(|| {
            ParseError::new(line_no, ParseErrorKind::Syntax, "expected `key: value`")
        })?;
        if key.is_empty()
            || !key
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(ParseError::new(
                line_no,
                ParseErrorKind::Syntax,
                format!("malformed property name {key:?}"),
            ));
        }
        let kind = match key {
            "package" => Some(StanzaKind::Package),
            "request" => Some(StanzaKind::Request),
            "preamble" => Some(StanzaKind::Preamble),
            _ => None,
        };
        let prop = Property {
            line: line_no,
            key: key.to_string(),
            value: value.trim().to_string(),
        };
        match kind {
            Some(kind) => stanzas.push(Stanza {
                kind,
                line: line_no,
                props: vec![prop],
            }),
            None if stanzas.is_empty() => {
                return Err(ParseError::new(
                    line_no,
                    ParseErrorKind::Syntax,
                    "property outside of a stanza",
                ))
            }
            None => stanzas.last_mut().unwrap().props.push(prop),
        }
        open = true;
    }
    Ok(stanzas)
}

fn check_unique(stanza: &Stanza) -> Result<(), ParseError> {
    let mut seen = BTreeSet::new();
    for prop in &stanza.props {
        if !seen.insert(prop.key.as_str()) {
            return Err(ParseError::new(
                prop.line,
                ParseErrorKind::DuplicateProperty,
                format!("property {} given twice", prop.key),
            ));
        }
    }
    Ok(())
}

fn package_from(
    stanza: &Stanza,
    warn: &mut impl FnMut(Warning),
) -> Result<PackageDesc, ParseError> {
    check_unique(stanza)?;
    let header = &stanza.props[0];
    if !valid_name(&header.value) {
        return Err(ParseError::new(
            header.line,
            ParseErrorKind::Syntax,
            format!("invalid package name {:?}", header.value),
        ));
    }
    let mut version = None;
    let mut pkg = PackageDesc::new(header.value.clone(), 1);
    for prop in &stanza.props[1..] {
        match prop.key.as_str() {
            "version" => version = Some(parse_version(&prop.value, prop.line)?),
            "depends" => pkg.depends = formula_at(&prop.value, prop.line)?,
            "conflicts" => pkg.conflicts = formula_at(&prop.value, prop.line)?,
            "provides" => pkg.provides = formula_at(&prop.value, prop.line)?,
            "recommends" => pkg.recommends = formula_at(&prop.value, prop.line)?,
            "installed" => {
                pkg.installed = match prop.value.as_str() {
                    "true" => true,
                    "false" => false,
                    other => {
                        return Err(ParseError::new(
                            prop.line,
                            ParseErrorKind::Syntax,
                            format!("installed must be true or false, got {other:?}"),
                        ))
                    }
                }
            }
            "keep" => {
                pkg.keep = Some(match prop.value.as_str() {
                    "version" => Keep::Version,
                    "package" => Keep::Package,
                    "feature" => Keep::Feature,
                    "none" => Keep::None,
                    other => {
                        return Err(ParseError::new(
                            prop.line,
                            ParseErrorKind::Syntax,
                            format!("unknown keep value {other:?}"),
                        ))
                    }
                })
            }
            other => warn(Warning {
                line: prop.line,
                message: format!("ignoring unknown property {other:?}"),
            }),
        }
    }
    pkg.id.version = version.ok_or_else(|| {
        ParseError::new(
            stanza.line,
            ParseErrorKind::BadVersion,
            format!("package {} has no version", pkg.id.name),
        )
    })?;
    Ok(pkg)
}

fn request_from(stanza: &Stanza) -> Result<Request, ParseError> {
    check_unique(stanza)?;
    let mut request = Request::default();
    for prop in &stanza.props[1..] {
        let formula = formula_at(&prop.value, prop.line)?;
        match prop.key.as_str() {
            "install" => request.install = formula,
            "remove" => request.remove = formula,
            "upgrade" => request.upgrade = formula,
            other => {
                return Err(ParseError::new(
                    prop.line,
                    ParseErrorKind::UnknownProperty,
                    format!("unknown request property {other:?}"),
                ))
            }
        }
    }
    Ok(request)
}

fn parse_version(text: &str, line: usize) -> Result<u64, ParseError> {
    match text.parse::<u64>() {
        Ok(v) if v >= 1 && text.bytes().all(|b| b.is_ascii_digit()) => Ok(v),
        _ => Err(ParseError::new(
            line,
            ParseErrorKind::BadVersion,
            format!("version must be a positive integer, got {text:?}"),
        )),
    }
}

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(is_name_char)
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '.' | '+' | '-' | '_' | '%' | '@' | '/')
}

fn formula_at(text: &str, line: usize) -> Result<Formula, ParseError> {
    parse_formula(text).map_err(|mut err| {
        err.line = line;
        err
    })
}

/// Parses a package formula: `,` separates clauses, `|` separates atoms.
/// Errors carry line 1; the document reader rewrites it to the property line.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Formula::default());
    }
    let mut clauses = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        match part {
            "true!" => continue,
            "false!" => {
                clauses.push(Clause::never());
                continue;
            }
            "" => {
                return Err(ParseError::new(1, ParseErrorKind::Syntax, "empty clause"));
            }
            _ => {}
        }
        let atoms = part
            .split('|')
            .map(parse_atom)
            .collect::<Result<Vec<_>, _>>()?;
        clauses.push(Clause::new(atoms).expect("split yields at least one atom"));
    }
    Ok(Formula::new(clauses))
}

fn parse_atom(text: &str) -> Result<Constraint, ParseError> {
    let syntax = |msg: String| ParseError::new(1, ParseErrorKind::Syntax, msg);
    let text = text.trim();
    if text.is_empty() {
        return Err(syntax("empty atom".into()));
    }
    let name_end = text.find(|c: char| !is_name_char(c)).unwrap_or(text.len());
    let (name, rest) = text.split_at(name_end);
    if name.is_empty() {
        return Err(syntax(format!(
            "atom {text:?} does not start with a package name"
        )));
    }
    let rest = rest.trim_start();
    if rest.is_empty() {
        return Ok(Constraint::any(name));
    }
    let op_len = rest
        .find(|c: char| !matches!(c, '=' | '!' | '<' | '>'))
        .unwrap_or(rest.len());
    let (op_text, number) = rest.split_at(op_len);
    let op = match op_text {
        "=" => Op::Eq,
        "!=" => Op::Neq,
        "<" => Op::Lt,
        "<=" => Op::Le,
        ">" => Op::Gt,
        ">=" => Op::Ge,
        "" => return Err(syntax(format!("unexpected text {rest:?} after {name}"))),
        other => {
            return Err(ParseError::new(
                1,
                ParseErrorKind::BadOperator,
                format!("unknown operator {other:?}"),
            ))
        }
    };
    let version = parse_version(number.trim(), 1)?;
    Ok(Constraint::bounded(name, op, version))
}

/// Canonical text form; [`parse_document`] reads it back to an equal document.
pub fn render_document(doc: &CudfDocument) -> String {
    let mut out = String::new();
    for pkg in doc.packages() {
        let _ = writeln!(out, "package: {}", pkg.id.name);
        let _ = writeln!(out, "version: {}", pkg.id.version);
        for (key, formula) in [
            ("depends", &pkg.depends),
            ("conflicts", &pkg.conflicts),
            ("provides", &pkg.provides),
            ("recommends", &pkg.recommends),
        ] {
            if !formula.is_empty() {
                let _ = writeln!(out, "{key}: {formula}");
            }
        }
        if pkg.installed {
            out.push_str("installed: true\n");
        }
        if let Some(keep) = pkg.keep {
            let _ = writeln!(out, "keep: {}", keep.as_str());
        }
        out.push('\n');
    }
    out.push_str("request: \n");
    let request = doc.request();
    for (key, formula) in [
        ("install", &request.install),
        ("remove", &request.remove),
        ("upgrade", &request.upgrade),
    ] {
        if !formula.is_empty() {
            let _ = writeln!(out, "{key}: {formula}");
        }
    }
    out
}

/// Renders a follow-up installation as `installed: true` stanzas sorted by
/// `(name, version)`.
pub fn render_solution<'a>(pairs: impl IntoIterator<Item = &'a PackageId>) -> String {
    let sorted: BTreeSet<&PackageId> = pairs.into_iter().collect();
    let mut out = String::new();
    for (i, id) in sorted.into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = write!(
            out,
            "package: {}\nversion: {}\ninstalled: true\n",
            id.name, id.version
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_grammar() {
        let f = parse_formula("a | b >= 2, c").unwrap();
        assert_eq!(f.clauses.len(), 2);
        assert_eq!(
            f.clauses[0].atoms(),
            &[Constraint::any("a"), Constraint::bounded("b", Op::Ge, 2)]
        );
        assert_eq!(f.clauses[1].atoms(), &[Constraint::any("c")]);
        assert_eq!(
            parse_formula("dep < 2").unwrap().clauses[0].atoms(),
            &[Constraint::bounded("dep", Op::Lt, 2)]
        );
        assert_eq!(
            parse_formula("conf>1").unwrap().clauses[0].atoms(),
            &[Constraint::bounded("conf", Op::Gt, 1)]
        );
        assert!(parse_formula("").unwrap().is_empty());
        assert!(parse_formula("true!").unwrap().is_empty());
        assert!(parse_formula("false!").unwrap().clauses[0].is_never());
    }

    #[test]
    fn formula_errors() {
        let kind = |t: &str| parse_formula(t).unwrap_err().kind;
        assert_eq!(kind("a,,b"), ParseErrorKind::Syntax);
        assert_eq!(kind("a |"), ParseErrorKind::Syntax);
        assert_eq!(kind("a => 2"), ParseErrorKind::BadOperator);
        assert_eq!(kind("a = x"), ParseErrorKind::BadVersion);
        assert_eq!(kind("a = 0"), ParseErrorKind::BadVersion);
        assert_eq!(
            kind("a = 99999999999999999999999"),
            ParseErrorKind::BadVersion
        );
        assert_eq!(kind("= 2"), ParseErrorKind::Syntax);
        assert_eq!(kind("a b"), ParseErrorKind::Syntax);
    }

    #[test]
    fn minimal_document() {
        let doc = parse_document("request:\n").unwrap();
        assert!(doc.packages().is_empty());
        assert!(doc.request().is_empty());
        assert_eq!(render_document(&doc), "request: \n");
        assert_eq!(parse_document("").unwrap(), CudfDocument::empty());
    }

    #[test]
    fn version_is_mandatory() {
        let err = parse_document("package: a\npackage: b\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::BadVersion);
        assert_eq!(err.line, 1);
    }

    #[test]
    fn stanza_errors() {
        let kind = |t: &str| parse_document(t).unwrap_err().kind;
        assert_eq!(
            kind("package: a\nversion: 1\ndepends: b\ndepends: c\n"),
            ParseErrorKind::DuplicateProperty
        );
        assert_eq!(kind("package: a\nversion: 0\n"), ParseErrorKind::BadVersion);
        assert_eq!(
            kind("package: a\nversion: 1\ninstalled: yes\n"),
            ParseErrorKind::Syntax
        );
        assert_eq!(
            kind("request:\nfrobnicate: a\n"),
            ParseErrorKind::UnknownProperty
        );
        assert_eq!(kind("version: 1\n"), ParseErrorKind::Syntax);
        assert_eq!(kind(" depends: a\n"), ParseErrorKind::Syntax);
        assert_eq!(kind("request:\nrequest:\n"), ParseErrorKind::Syntax);
        assert_eq!(
            kind("package: a\nversion: 1\nprovides: b > 1\n"),
            ParseErrorKind::BadOperator
        );
        let dup = parse_document("package: a\nversion: 1\n\npackage: a\nversion: 1\n").unwrap_err();
        assert_eq!((dup.kind, dup.line), (ParseErrorKind::Syntax, 4));
    }

    #[test]
    fn continuation_crlf_and_preamble() {
        let text = "preamble: \nproperty: foo: int\n  = [1]\n\npackage: a\r\nversion: 2\r\ndepends: b,\r\n  c | d\r\n\r\nrequest: x\r\ninstall: a\r\n";
        let doc = parse_document(text).unwrap();
        let a = &doc.packages()[0];
        assert_eq!(a.id, PackageId::new("a", 2));
        assert_eq!(a.depends.to_string(), "b, c | d");
        assert_eq!(doc.request().install.to_string(), "a");
    }

    #[test]
    fn unknown_package_property_warns() {
        let mut warnings = Vec::new();
        let doc = parse_document_with("package: a\nversion: 1\nsize: 42\n", |w| warnings.push(w))
            .unwrap();
        assert_eq!(doc.packages().len(), 1);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].line, 3);
    }

    #[test]
    fn renders_installed_flag_and_keep() {
        let doc =
            parse_document("package: a\nversion: 1\ninstalled: true\nkeep: version\n").unwrap();
        let text = render_document(&doc);
        assert!(text.contains("installed: true\n"));
        assert!(text.contains("keep: version\n"));
        assert_eq!(parse_document(&text).unwrap(), doc);
    }

    #[test]
    fn solution_rendering() {
        assert_eq!(render_solution(&[]), "");
        assert_eq!(
            render_solution(&[PackageId::new("conf", 2)]),
            "package: conf\nversion: 2\ninstalled: true\n"
        );
        let two = render_solution(&[PackageId::new("a", 2), PackageId::new("a", 1)]);
        assert_eq!(
            two,
            "package: a\nversion: 1\ninstalled: true\n\npackage: a\nversion: 2\ninstalled: true\n"
        );
    }

    #[test]
    fn invalid_utf8_is_an_error() {
        let err = parse_bytes(b"package: a\nversion: \xff\n").unwrap_err();
        assert_eq!(err.line, 2);
    }
}
