//! Problem files: a field, an algebra and a complex over it, plus run
//! options. The format is documented in `docs/format.md`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{Algebra, RMatrix};
use crate::complexes::ChainComplex;
use crate::error::Error;
use crate::field::Field;

pub const SCHEMA_VERSION: u32 = 1;

/// A scalar as written in the file: an integer or a string such as `"-3/4"`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coeff(pub String);

impl Serialize for Coeff {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Coeff {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        Ok(match Raw::deserialize(d)? {
            Raw::Int(n) => Coeff(n.to_string()),
            Raw::Str(s) => Coeff(s),
        })
    }
}

impl From<&str> for Coeff {
    fn from(s: &str) -> Self {
        Coeff(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AlgebraSpec {
    /// `k[x]/(x^m)`
    TruncatedPoly { m: usize },
    /// Structure constants: `table[i][j]` is `e_i·e_j` in the basis.
    Table { labels: Vec<String>, unit: Vec<Coeff>, table: Vec<Vec<Vec<Coeff>>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferentialSpec {
    /// Source degree `i` of `d: F_i → F_{i-1}`.
    pub from: i32,
    /// `rank F_i` rows of `rank F_{i-1}` entries, each a coefficient vector.
    pub matrix: Vec<Vec<Vec<Coeff>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub lo: i32,
    pub ranks: Vec<usize>,
    #[serde(default)]
    pub differentials: Vec<DifferentialSpec>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<usize>,
    /// Source degree of the presentation map used by `family`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub presentation_degree: Option<i32>,
}

impl OptionsSpec {
    fn is_empty(&self) -> bool {
        self == &OptionsSpec::default()
    }
}

fn default_field() -> String {
    "q".to_string()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default = "default_field")]
    pub field: String,
    pub algebra: AlgebraSpec,
    pub complex: ComplexSpec,
    #[serde(default, skip_serializing_if = "OptionsSpec::is_empty")]
    pub options: OptionsSpec,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorCode {
    Io,
    MalformedJson,
    UnsupportedSchema,
    UnsupportedField,
    BadCoefficient,
    Shape,
    AlgebraNotAssociative,
    AlgebraUnitLaw,
    ComplexNotDg,
}

impl ErrorCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ErrorCode::Io => "IO_ERROR",
            ErrorCode::MalformedJson => "MALFORMED_JSON",
            ErrorCode::UnsupportedSchema => "UNSUPPORTED_SCHEMA",
            ErrorCode::UnsupportedField => "UNSUPPORTED_FIELD",
            ErrorCode::BadCoefficient => "BAD_COEFFICIENT",
            ErrorCode::Shape => "SHAPE_MISMATCH",
            ErrorCode::AlgebraNotAssociative => "ALGEBRA_NOT_ASSOCIATIVE",
            ErrorCode::AlgebraUnitLaw => "ALGEBRA_UNIT_LAW",
            ErrorCode::ComplexNotDg => "COMPLEX_NOT_DG",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A problem-file error with its code and where it was found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemError {
    pub code: ErrorCode,
    pub location: String,
    pub message: String,
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.location, self.message)
    }
}

impl std::error::Error for ProblemError {}

fn perr(code: ErrorCode, location: impl Into<String>, message: impl Into<String>) -> ProblemError {
    ProblemError { code, location: location.into(), message: message.into() }
}

/// Ground fields selectable by name: `q` or `gfP` for a supported prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldSpec {
    Rational,
    Prime(u32),
}

/// Primes with a compiled field implementation.
pub const SUPPORTED_PRIMES: &[u32] = &[
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 1009, 10007, 32003, 65521,
    1000003, 2147483647,
];

impl FieldSpec {
    pub fn parse(s: &str) -> Result<Self, ProblemError> {
        let t = s.trim().to_ascii_lowercase();
        if t == "q" {
            return Ok(FieldSpec::Rational);
        }
        let p = t
            .strip_prefix("gf")
            .map(|r| r.trim_start_matches('(').trim_end_matches(')'))
            .and_then(|r| r.parse::<u32>().ok())
            .ok_or_else(|| perr(ErrorCode::UnsupportedField, "field", format!("expected q or gfP, got {s:?}")))?;
        if !SUPPORTED_PRIMES.contains(&p) {
            return Err(perr(
                ErrorCode::UnsupportedField,
                "field",
                format!("GF({p}) is not available; supported primes: {SUPPORTED_PRIMES:?}"),
            ));
        }
        Ok(FieldSpec::Prime(p))
    }

    pub fn name(&self) -> String {
        match self {
            FieldSpec::Rational => "q".to_string(),
            FieldSpec::Prime(p) => format!("gf{p}"),
        }
    }
}

/// Runs `$body` with `$F` bound to the field type named by `$spec`.
#[macro_export]
macro_rules! with_field {
    ($spec:expr, $F:ident => $body:expr) => {{
        use $crate::problem::FieldSpec;
        match $spec {
            FieldSpec::Rational => {
                type $F = $crate::Rational;
                $body
            }
            FieldSpec::Prime(p) => $crate::with_field!(@primes p, $F => $body;
                2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
                101, 1009, 10007, 32003, 65521, 1000003, 2147483647),
        }
    }};
    (@primes $p:ident, $F:ident => $body:expr; $($q:literal),*) => {{
        match $p {
            $($q => {
                type $F = $crate::Fp<$q>;
                $body
            })*
            other => unreachable!("prime {other} passed FieldSpec::parse"),
        }
    }};
}

impl Problem {
    /// Parses and checks the schema version; semantic checks happen in
    /// [`build`](Self::build).
    pub fn from_json(text: &str) -> Result<Self, ProblemError> {
        let p: Problem = serde_json::from_str(text)
            .map_err(|e| perr(ErrorCode::MalformedJson, format!("line {}, column {}", e.line(), e.column()), e.to_string()))?;
        if p.schema != SCHEMA_VERSION {
            return Err(perr(
                ErrorCode::UnsupportedSchema,
                "schema",
                format!("schema {} is not supported, expected {SCHEMA_VERSION}", p.schema),
            ));
        }
        FieldSpec::parse(&p.field)?;
        Ok(p)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ProblemError> {
        let text = std::fs::read_to_string(path).map_err(|e| perr(ErrorCode::Io, path.display().to_string(), e.to_string()))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("problem serializes")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem serializes")
    }

    pub fn field_spec(&self) -> Result<FieldSpec, ProblemError> {
        FieldSpec::parse(&self.field)
    }

    /// The validated algebra and complex over `F`.
    pub fn build<F: Field>(&self) -> Result<(Arc<Algebra<F>>, ChainComplex<F>), ProblemError> {
        let alg = Arc::new(self.build_algebra::<F>()?);
        let c = &self.complex;
        let n = c.ranks.len();
        let hi = c.lo + n as i32 - 1;
        let mut diffs: Vec<Option<RMatrix<F>>> = vec![None; n.saturating_sub(1)];
        for (k, d) in c.differentials.iter().enumerate() {
            let loc = format!("complex.differentials[{k}]");
            if d.from <= c.lo || d.from > hi {
                return Err(perr(
                    ErrorCode::Shape,
                    format!("{loc}.from"),
                    format!("degree {} has no target inside {}..={hi}", d.from, c.lo),
                ));
            }
            let slot = (d.from - c.lo - 1) as usize;
            if diffs[slot].is_some() {
                return Err(perr(ErrorCode::Shape, format!("{loc}.from"), format!("second differential out of degree {}", d.from)));
            }
            let rows = c.ranks[slot + 1];
            let cols = c.ranks[slot];
            diffs[slot] = Some(matrix::<F>(&d.matrix, rows, cols, alg.dim(), &format!("{loc}.matrix"))?);
        }
        let diffs = diffs
            .into_iter()
            .enumerate()
            .map(|(s, m)| m.unwrap_or_else(|| RMatrix::zeros(c.ranks[s + 1], c.ranks[s], alg.dim())))
            .collect();
        let complex = ChainComplex::new(alg.clone(), c.lo, c.ranks.clone(), diffs).map_err(|e| match e {
            Error::NotDg(m) => perr(ErrorCode::ComplexNotDg, "complex.differentials", m),
            other => perr(ErrorCode::Shape, "complex", other.to_string()),
        })?;
        Ok((alg, complex))
    }

    fn build_algebra<F: Field>(&self) -> Result<Algebra<F>, ProblemError> {
        match &self.algebra {
            AlgebraSpec::TruncatedPoly { m } => Algebra::truncated_poly(*m).map_err(|e| perr(ErrorCode::Shape, "algebra.m", e.to_string())),
            AlgebraSpec::Table { labels, unit, table } => {
                let dim = labels.len();
                let unit = vector::<F>(unit, dim, "algebra.unit")?;
                if table.len() != dim {
                    return Err(perr(ErrorCode::Shape, "algebra.table", format!("{} rows, expected {dim}", table.len())));
                }
                let mut flat = Vec::with_capacity(dim * dim);
                for (i, row) in table.iter().enumerate() {
                    if row.len() != dim {
                        return Err(perr(
                            ErrorCode::Shape,
                            format!("algebra.table[{i}]"),
                            format!("{} entries, expected {dim}", row.len()),
                        ));
                    }
                    for (j, v) in row.iter().enumerate() {
                        flat.push(vector::<F>(v, dim, &format!("algebra.table[{i}][{j}]"))?);
                    }
                }
                Algebra::new(labels.clone(), unit, flat).map_err(|e| match e {
                    Error::Algebra(m) if m.starts_with("associativity") => perr(ErrorCode::AlgebraNotAssociative, "algebra.table", m),
                    Error::Algebra(m) => perr(ErrorCode::AlgebraUnitLaw, "algebra", m),
                    other => perr(ErrorCode::Shape, "algebra", other.to_string()),
                })
            }
        }
    }
}

fn scalar<F: Field>(c: &Coeff, loc: &str) -> Result<F, ProblemError> {
    F::parse(&c.0).ok_or_else(|| perr(ErrorCode::BadCoefficient, loc, format!("{:?} is not a scalar of {}", c.0, F::name())))
}

fn vector<F: Field>(v: &[Coeff], dim: usize, loc: &str) -> Result<Vec<F>, ProblemError> {
    if v.len() != dim {
        return Err(perr(ErrorCode::Shape, loc, format!("{} coefficients, expected {dim}", v.len())));
    }
    v.iter().enumerate().map(|(k, c)| scalar(c, &format!("{loc}[{k}]"))).collect()
}

fn matrix<F: Field>(m: &[Vec<Vec<Coeff>>], rows: usize, cols: usize, dim: usize, loc: &str) -> Result<RMatrix<F>, ProblemError> {
    if m.len() != rows {
        return Err(perr(ErrorCode::Shape, loc, format!("{} rows, expected {rows}", m.len())));
    }
    let mut entries = Vec::with_capacity(rows * cols);
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(perr(ErrorCode::Shape, format!("{loc}[{i}]"), format!("{} entries, expected {cols}", row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            entries.push(vector::<F>(e, dim, &format!("{loc}[{i}][{j}]"))?);
        }
    }
    RMatrix::from_entries(rows, cols, dim, entries).map_err(|e| perr(ErrorCode::Shape, loc, e.to_string()))
}

/// The problem describing an existing complex, coefficients written with
/// the field's display form.
pub fn problem_from_complex<F: Field>(name: &str, complex: &ChainComplex<F>) -> Problem {
    let alg = complex.algebra();
    let d = alg.dim();
    let coeffs = |v: &[F]| v.iter().map(|x| Coeff(x.to_string())).collect::<Vec<_>>();
    let algebra = AlgebraSpec::Table {
        labels: alg.labels().to_vec(),
        unit: coeffs(alg.unit()),
        table: (0..d).map(|i| (0..d).map(|j| coeffs(alg.product(i, j))).collect()).collect(),
    };
    let differentials = (complex.lo() + 1..=complex.hi())
        .filter_map(|i| {
            let m = complex.differential(i)?;
            Some(DifferentialSpec {
                from: i,
                matrix: (0..m.rows()).map(|a| (0..m.cols()).map(|b| coeffs(m.entry(a, b))).collect()).collect(),
            })
        })
        .collect();
    Problem {
        schema: SCHEMA_VERSION,
        name: Some(name.to_string()),
        field: F::name(),
        algebra,
        complex: ComplexSpec { lo: complex.lo(), ranks: complex.ranks().to_vec(), differentials },
        options: OptionsSpec::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Fp;
    use crate::fixtures;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    const JORDAN: &str = r#"{
        "schema": 1,
        "name": "jordan",
        "field": "q",
        "algebra": {"kind": "truncated_poly", "m": 4},
        "complex": {"lo": 0, "ranks": [1, 1],
                    "differentials": [{"from": 1, "matrix": [[[0, 0, 1, 0]]]}]},
        "options": {"order": 4, "presentation_degree": 1}
    }"#;

    #[test]
    fn parses_jordan() {
        let p = Problem::from_json(JORDAN).unwrap();
        let (_, c) = p.build::<Q>().unwrap();
        let j = fixtures::jordan::<Q>(2, 4);
        assert_eq!(c.differential(1), j.differential(1));
        assert_eq!(p.options.order, Some(4));
    }

    #[test]
    fn error_codes() {
        let code = |s: &str| Problem::from_json(s).and_then(|p| p.build::<Q>().map(|_| ())).unwrap_err().code;
        assert_eq!(code("{ not json"), ErrorCode::MalformedJson);
        assert_eq!(code(&JORDAN.replace("\"schema\": 1", "\"schema\": 7")), ErrorCode::UnsupportedSchema);
        assert_eq!(code(&JORDAN.replace("\"q\"", "\"gf4\"")), ErrorCode::UnsupportedField);
        assert_eq!(code(&JORDAN.replace("[0, 0, 1, 0]", "[0, 0, \"a\", 0]")), ErrorCode::BadCoefficient);
        assert_eq!(code(&JORDAN.replace("[0, 0, 1, 0]", "[0, 1, 0]")), ErrorCode::Shape);
        let not_dg = r#"{"schema": 1, "algebra": {"kind": "truncated_poly", "m": 2},
            "complex": {"lo": 0, "ranks": [1, 1, 1], "differentials": [
                {"from": 1, "matrix": [[[0, 1]]]}, {"from": 2, "matrix": [[[1, 0]]]}]}}"#;
        assert_eq!(code(not_dg), ErrorCode::ComplexNotDg);
        // e1·e1 = e2, e2·e1 = e1: (e1 e1) e1 = e1 but e1 (e1 e1) = e1 e2 = 0
        let non_assoc = r#"{"schema": 1, "algebra": {"kind": "table", "labels": ["1", "a", "b"],
            "unit": [1, 0, 0],
            "table": [[[1,0,0],[0,1,0],[0,0,1]],
                      [[0,1,0],[0,0,1],[0,0,0]],
                      [[0,0,1],[0,1,0],[0,0,0]]]},
            "complex": {"lo": 0, "ranks": [1]}}"#;
        assert_eq!(code(non_assoc), ErrorCode::AlgebraNotAssociative);
    }

    #[test]
    fn error_location_is_reported() {
        let e = Problem::from_json(&JORDAN.replace("[0, 0, 1, 0]", "[0, 0, \"a\", 0]")).unwrap().build::<Q>().unwrap_err();
        assert_eq!(e.location, "complex.differentials[0].matrix[0][0][2]");
        let e = Problem::from_json("{\n \"schema\": 1,\n \"oops\"").unwrap_err();
        assert!(e.location.starts_with("line 3"));
    }

    #[test]
    fn echo_round_trips() {
        let p = Problem::from_json(JORDAN).unwrap();
        assert_eq!(Problem::from_json(&p.to_json_string()).unwrap(), p);
        let k = problem_from_complex("k", &fixtures::obstructed_k::<Fp<5>>());
        let back = Problem::from_json(&k.to_json_string()).unwrap();
        assert_eq!(back, k);
        let (_, c) = back.build::<Fp<5>>().unwrap();
        assert_eq!(c.differential(2), fixtures::obstructed_k::<Fp<5>>().differential(2));
    }

    #[test]
    fn field_names() {
        assert_eq!(FieldSpec::parse("Q").unwrap(), FieldSpec::Rational);
        assert_eq!(FieldSpec::parse("gf10007").unwrap(), FieldSpec::Prime(10007));
        assert_eq!(FieldSpec::parse("GF(5)").unwrap(), FieldSpec::Prime(5));
        assert!(FieldSpec::parse("gf6").is_err());
        let name = crate::with_field!(FieldSpec::parse("gf7").unwrap(), F => <F as Field>::name());
        assert_eq!(name, "gf7");
    }

    proptest! {
        #[test]
        fn coefficients_round_trip(v in proptest::collection::vec(-50i64..50, 4), den in 1i64..9) {
            let entry: Vec<Coeff> = v.iter().map(|n| Coeff(format!("{n}/{den}"))).collect();
            let mut p = Problem::from_json(JORDAN).unwrap();
            p.complex.differentials[0].matrix = vec![vec![entry]];
            prop_assert_eq!(Problem::from_json(&p.to_json_string()).unwrap(), p);
        }
    }
}
