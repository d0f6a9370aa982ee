//! Closed-form identities as data, and the runner that checks them.
//!
//! The file format is TOML with one `[[entry]]` table per identity; see
//! `docs/catalog.md` for the field list.

mod report;
mod spot;
mod verify;

pub use report::{Candidate, ReportConfig, ReportRow, Route, Summary, VerificationReport};
pub use spot::spot_checks;
pub use verify::{verify_catalog, verify_entry, verify_matrix_relations, Mode, VerifyConfig};

use std::collections::HashSet;
use std::fmt;
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::constexpr::{ConstExpr, ConstMonomial};
use crate::error::{Error, Result};
use crate::rational::parse_rational;
use crate::series::{Family, FamilySpec};
use crate::weight::WeightFn;

pub const CATALOG_TOML: &str = include_str!("../../data/catalog.toml");

/// Marks an entry whose printed form is known to be doubtful. The runner
/// evaluates both candidate readings and requires exactly one to pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flag {
    /// The printed right-hand side is doubtful; `rhs_alternate` holds the other candidate.
    RhsMisprint,
    /// `G_oddline` kernel argument `mπ/a` as printed, or `mπ/(2a)`.
    OddlineArgument,
    /// The explicit cubic `F_oddline` formula with `a^2` as printed, or `a^3`.
    OddlineCubicDenominator,
}

impl FromStr for Flag {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "rhs_misprint" => Ok(Flag::RhsMisprint),
            "oddline_argument" => Ok(Flag::OddlineArgument),
            "oddline_cubic_denominator" => Ok(Flag::OddlineCubicDenominator),
            _ => Err(format!(
                "unknown flag `{s}` (rhs_misprint, oddline_argument, oddline_cubic_denominator)"
            )),
        }
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::RhsMisprint => "rhs_misprint",
            Flag::OddlineArgument => "oddline_argument",
            Flag::OddlineCubicDenominator => "oddline_cubic_denominator",
        })
    }
}

/// Which series-engine route evaluates a double-series entry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Method {
    #[default]
    Theorem,
    Corollary,
}

#[derive(Clone, Debug, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum Lhs {
    /// `Σ_{m>=1} w(m)`.
    Single { weight: WeightFn },
    Double {
        spec: FamilySpec,
        weight: WeightFn,
        method: Method,
    },
}

impl Lhs {
    pub fn weight(&self) -> &WeightFn {
        match self {
            Lhs::Single { weight } | Lhs::Double { weight, .. } => weight,
        }
    }

    pub fn is_double(&self) -> bool {
        matches!(self, Lhs::Double { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityEntry {
    pub id: String,
    pub locus: String,
    pub lhs: Lhs,
    pub rhs: ConstExpr,
    pub rhs_alternate: Option<ConstExpr>,
    /// The identity reads `lhs = i · rhs`.
    pub expected_pure_imaginary: bool,
    pub flag: Option<Flag>,
    /// Line of the entry header in the source file.
    pub line: usize,
}

type RawMonomial = (String, i32, i32, u32);

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCatalog {
    entry: Vec<Spanned<RawEntry>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    id: Spanned<String>,
    #[serde(default)]
    locus: String,
    kind: Spanned<String>,
    weight: Spanned<String>,
    family: Option<Spanned<String>>,
    exponent: Option<Spanned<u32>>,
    a: Option<Spanned<String>>,
    b: Option<Spanned<String>>,
    c: Option<Spanned<String>>,
    rhs: Spanned<Vec<RawMonomial>>,
    rhs_alternate: Option<Spanned<Vec<RawMonomial>>>,
    #[serde(default)]
    imaginary: bool,
    method: Option<Spanned<String>>,
    flag: Option<Spanned<String>>,
}

struct Lines<'a>(&'a str);

impl Lines<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        let end = span.start.min(self.0.len());
        self.0[..end].matches('\n').count() + 1
    }

    fn err<T>(&self, span: Range<usize>, field: &str, msg: impl fmt::Display) -> Result<T> {
        Err(Error::Parse {
            line: self.line(span),
            field: field.to_string(),
            msg: msg.to_string(),
        })
    }
}

fn parse_monomials(lines: &Lines, raw: &Spanned<Vec<RawMonomial>>, field: &str) -> Result<ConstExpr> {
    let mut out = Vec::new();
    for (coeff, s2, ph, g) in raw.get_ref() {
        let c = match parse_rational(coeff) {
            Ok(c) => c,
            Err(e) => return lines.err(raw.span(), field, e),
        };
        out.push(ConstMonomial::new(c, *s2, *ph, *g));
    }
    Ok(ConstExpr::from_monomials(out).canonicalize())
}

fn rational_field(lines: &Lines, v: &Spanned<String>, field: &str) -> Result<crate::rational::ExactRational> {
    parse_rational(v.get_ref()).or_else(|e| lines.err(v.span(), field, e))
}

fn convert(lines: &Lines, raw: &Spanned<RawEntry>) -> Result<IdentityEntry> {
    let span = raw.span();
    let r = raw.get_ref();
    let id = r.id.get_ref().trim().to_string();
    if id.is_empty() {
        return lines.err(r.id.span(), "id", "empty id");
    }
    let weight: WeightFn = match r.weight.get_ref().parse() {
        Ok(w) => w,
        Err(e) => return lines.err(r.weight.span(), "weight", e),
    };
    let flag = match &r.flag {
        Some(f) => Some(f.get_ref().parse::<Flag>().or_else(|e| lines.err(f.span(), "flag", e))?),
        None => None,
    };
    let rhs = parse_monomials(lines, &r.rhs, "rhs")?;
    let rhs_alternate = match &r.rhs_alternate {
        Some(alt) => Some(parse_monomials(lines, alt, "rhs_alternate")?),
        None => None,
    };
    if (flag == Some(Flag::RhsMisprint)) != rhs_alternate.is_some() {
        return lines.err(span, "rhs_alternate", "required exactly when flag = \"rhs_misprint\"");
    }
    let lhs = match r.kind.get_ref().as_str() {
        "single" => {
            for (present, name) in [
                (r.family.is_some(), "family"),
                (r.exponent.is_some(), "exponent"),
                (r.a.is_some(), "a"),
                (r.b.is_some() || r.c.is_some(), "b"),
                (r.method.is_some(), "method"),
            ] {
                if present {
                    return lines.err(span, name, "not allowed for kind = \"single\"");
                }
            }
            if matches!(flag, Some(Flag::OddlineArgument | Flag::OddlineCubicDenominator)) {
                return lines.err(span, "flag", "reading flags need a double-series entry");
            }
            Lhs::Single { weight }
        }
        "double" => {
            let family = match &r.family {
                Some(f) => f.get_ref().parse::<Family>().or_else(|e| lines.err(f.span(), "family", e))?,
                None => return lines.err(span, "family", "missing for kind = \"double\""),
            };
            let Some(exponent) = &r.exponent else {
                return lines.err(span, "exponent", "missing for kind = \"double\"");
            };
            let Some(a) = &r.a else {
                return lines.err(span, "a", "missing for kind = \"double\"");
            };
            let mut spec = FamilySpec::new(family, *exponent.get_ref(), rational_field(lines, a, "a")?);
            match (&r.b, &r.c) {
                (Some(b), Some(c)) => {
                    spec = spec.shifted(rational_field(lines, b, "b")?, rational_field(lines, c, "c")?);
                }
                (None, None) => {}
                _ => return lines.err(span, "b", "b and c must be given together"),
            }
            if let Err(e) = spec.validate() {
                return lines.err(exponent.span(), "exponent", e);
            }
            let method = match r.method.as_ref().map(|m| (m.get_ref().as_str(), m.span())) {
                None | Some(("theorem", _)) => Method::Theorem,
                Some(("corollary", _)) => Method::Corollary,
                Some((other, s)) => {
                    return lines.err(s, "method", format!("unknown method `{other}` (theorem, corollary)"))
                }
            };
            match flag {
                Some(Flag::OddlineArgument) if family != Family::GOddline => {
                    return lines.err(span, "flag", "oddline_argument applies to G_oddline only");
                }
                Some(Flag::OddlineCubicDenominator)
                    if !(family == Family::FOddline && spec.exponent == 3 && method == Method::Corollary) =>
                {
                    return lines.err(
                        span,
                        "flag",
                        "oddline_cubic_denominator needs F_oddline, exponent 3 and method = \"corollary\"",
                    );
                }
                _ => {}
            }
            Lhs::Double { spec, weight, method }
        }
        other => return lines.err(r.kind.span(), "kind", format!("unknown kind `{other}` (single, double)")),
    };
    Ok(IdentityEntry {
        id,
        locus: r.locus.clone(),
        lhs,
        rhs,
        rhs_alternate,
        expected_pure_imaginary: r.imaginary,
        flag,
        line: lines.line(span),
    })
}

pub fn parse_catalog(text: &str) -> Result<Vec<IdentityEntry>> {
    let lines = Lines(text);
    let raw: RawCatalog = match toml::from_str(text) {
        Ok(r) => r,
        Err(e) => {
            let line = e.span().map(|s| lines.line(s)).unwrap_or(0);
            return Err(Error::Parse {
                line,
                field: String::new(),
                msg: e.message().to_string(),
            });
        }
    };
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(raw.entry.len());
    for e in &raw.entry {
        let entry = convert(&lines, e)?;
        if !seen.insert(entry.id.clone()) {
            return lines.err(e.get_ref().id.span(), "id", format!("duplicate id `{}`", entry.id));
        }
        out.push(entry);
    }
    Ok(out)
}

pub fn load_catalog(path: impl AsRef<Path>) -> Result<Vec<IdentityEntry>> {
    parse_catalog(&std::fs::read_to_string(path)?)
}

/// The catalog shipped with the crate.
pub fn default_catalog() -> Vec<IdentityEntry> {
    parse_catalog(CATALOG_TOML).expect("bundled catalog parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_catalog() {
        let c = default_catalog();
        assert_eq!(c.len(), 30);
        let single = c.iter().filter(|e| !e.lhs.is_double()).count();
        assert_eq!(single, 9);
        let sinh2 = c.iter().find(|e| e.id == "sinh2").unwrap();
        assert_eq!(sinh2.rhs, ConstExpr::parse("1/6 - 1/2*pi^-1").unwrap());
        let k3 = c.iter().find(|e| e.id == "cosh_oddline_k3").unwrap();
        assert!(k3.expected_pure_imaginary);
        assert!(matches!(k3.lhs, Lhs::Double { method: Method::Corollary, .. }));
    }

    fn parse_err(text: &str) -> (usize, String) {
        match parse_catalog(text) {
            Err(Error::Parse { line, field, .. }) => (line, field),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn diagnostics() {
        let base = "[[entry]]\nid = \"x\"\nkind = \"single\"\nweight = \"csch(1)\"\nrhs = [[\"1\", 0, 0, 0]]\n";
        assert!(parse_catalog(base).is_ok());
        assert_eq!(parse_err(&base.replace("csch(1)", "cosh(1)")), (4, "weight".into()));
        assert_eq!(parse_err(&base.replace("\"1\", 0", "\"1/0\", 0")), (5, "rhs".into()));
        assert_eq!(parse_err(&format!("{base}{base}")), (7, "id".into()));
        assert_eq!(parse_err(&base.replace("single", "double")).1, "family");
        assert_eq!(parse_err(&format!("{base}flag = \"bogus\"\n")), (6, "flag".into()));
        let (line, _) = parse_err("[[entry]]\nid = \n");
        assert_eq!(line, 2);
    }
}
