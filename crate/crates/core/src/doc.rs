//! JSON documents shared with the command line: parameter arrays (with an
//! optional block of expected intersection numbers), realizations,
//! intersection data and family specs. Scalars are strings in the field's
//! textual grammar.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::families::{Family, FamilySpec};
use crate::field::{Elem, Field, FieldError};
use crate::intersection::IntersectionData;
use crate::matrix::Matrix;
use crate::parray::ParameterArray;
use crate::system::Realization;

#[derive(Debug, thiserror::Error)]
pub enum DocError {
    #[error("line {line}, column {column}: {msg}")]
    Json { line: usize, column: usize, msg: String },
    #[error("line {line}: {path}: {msg}")]
    Entry { line: usize, path: String, msg: String },
    #[error("{0}")]
    Structure(String),
}

type Result<T> = std::result::Result<T, DocError>;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct MatrixDoc {
    pub order: usize,
    pub rows: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct IntersectionDoc {
    pub a: Vec<String>,
    pub b: Vec<String>,
    pub c: Vec<String>,
    pub a_star: Vec<String>,
    pub b_star: Vec<String>,
    pub c_star: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ParrayDoc {
    pub field: String,
    pub d: usize,
    pub theta: Vec<String>,
    pub theta_star: Vec<String>,
    pub varphi: Vec<String>,
    pub phi: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_intersections: Option<IntersectionDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct IdempotentsDoc {
    #[serde(rename = "E")]
    pub e: Vec<MatrixDoc>,
    #[serde(rename = "E_star")]
    pub e_star: Vec<MatrixDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RealizationDoc {
    pub field: String,
    pub d: usize,
    #[serde(rename = "A")]
    pub a: MatrixDoc,
    #[serde(rename = "A_star")]
    pub a_star: MatrixDoc,
    pub idempotents: IdempotentsDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct FamilySpecDoc {
    pub family: String,
    pub d: usize,
    pub field: String,
    pub params: BTreeMap<String, String>,
}

/// A parsed input file of either kind.
#[derive(Debug, Clone)]
pub enum Document {
    Parray { pa: ParameterArray, expected: Option<IntersectionData> },
    Realization(Realization),
}

fn strs(v: &[Elem]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

/// Line of the first `"key":` in the source, or 1 when absent.
fn line_of(text: &str, key: &str) -> usize {
    let pat = format!("\"{key}\"");
    let mut from = 0;
    while let Some(pos) = text[from..].find(&pat) {
        let at = from + pos;
        let rest = text[at + pat.len()..].trim_start();
        if rest.starts_with(':') {
            return text[..at].matches('\n').count() + 1;
        }
        from = at + pat.len();
    }
    1
}

struct Ctx<'a> {
    text: &'a str,
    field: &'a Field,
}

impl Ctx<'_> {
    fn err(&self, key: &str, path: String, e: impl ToString) -> DocError {
        DocError::Entry { line: line_of(self.text, key), path, msg: e.to_string() }
    }

    fn elems(&self, key: &str, prefix: &str, v: &[String]) -> Result<Vec<Elem>> {
        v.iter()
            .enumerate()
            .map(|(i, s)| self.field.parse(s).map_err(|e| self.err(key, format!("{prefix}{key}[{i}]"), e)))
            .collect()
    }

    fn len(&self, key: &str, prefix: &str, v: &[String], want: usize) -> Result<()> {
        if v.len() != want {
            return Err(self.err(key, format!("{prefix}{key}"), format!("expected {want} entries, found {}", v.len())));
        }
        Ok(())
    }

    fn matrix(&self, key: &str, path: String, m: &MatrixDoc, n: usize) -> Result<Matrix> {
        if m.order != n || m.rows.len() != n || m.rows.iter().any(|r| r.len() != n) {
            return Err(self.err(key, path, format!("expected a {n}x{n} matrix")));
        }
        let rows = m
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| self.elems(key, &format!("{path}.rows[{i}]."), r))
            .collect::<Result<Vec<_>>>()?;
        Matrix::from_rows(self.field, rows).map_err(|e| self.err(key, path, e))
    }
}

fn json_err(e: serde_json::Error) -> DocError {
    DocError::Json { line: e.line(), column: e.column(), msg: e.to_string() }
}

fn field_of(text: &str, desc: &str) -> Result<Field> {
    Field::from_descriptor(desc).map_err(|e| DocError::Entry { line: line_of(text, "field"), path: "field".into(), msg: e.to_string() })
}

pub fn intersection_to_doc(x: &IntersectionData) -> IntersectionDoc {
    IntersectionDoc {
        a: strs(&x.a),
        b: strs(&x.b),
        c: strs(&x.c),
        a_star: strs(&x.a_star),
        b_star: strs(&x.b_star),
        c_star: strs(&x.c_star),
    }
}

fn intersection_from(ctx: &Ctx, doc: &IntersectionDoc, d: usize, prefix: &str) -> Result<IntersectionData> {
    for (k, v, n) in [
        ("a", &doc.a, d + 1),
        ("b", &doc.b, d),
        ("c", &doc.c, d),
        ("a_star", &doc.a_star, d + 1),
        ("b_star", &doc.b_star, d),
        ("c_star", &doc.c_star, d),
    ] {
        ctx.len(k, prefix, v, n)?;
    }
    Ok(IntersectionData {
        a: ctx.elems("a", prefix, &doc.a)?,
        b: ctx.elems("b", prefix, &doc.b)?,
        c: ctx.elems("c", prefix, &doc.c)?,
        a_star: ctx.elems("a_star", prefix, &doc.a_star)?,
        b_star: ctx.elems("b_star", prefix, &doc.b_star)?,
        c_star: ctx.elems("c_star", prefix, &doc.c_star)?,
    })
}

pub fn parray_to_doc(pa: &ParameterArray, expected: Option<&IntersectionData>) -> ParrayDoc {
    ParrayDoc {
        field: pa.field.descriptor(),
        d: pa.d(),
        theta: strs(&pa.theta),
        theta_star: strs(&pa.theta_star),
        varphi: strs(&pa.varphi),
        phi: strs(&pa.phi),
        expected_intersections: expected.map(intersection_to_doc),
    }
}

fn parray_from(text: &str, doc: &ParrayDoc) -> Result<(ParameterArray, Option<IntersectionData>)> {
    let field = field_of(text, &doc.field)?;
    let ctx = Ctx { text, field: &field };
    let d = doc.d;
    for (k, v, n) in [
        ("theta", &doc.theta, d + 1),
        ("theta_star", &doc.theta_star, d + 1),
        ("varphi", &doc.varphi, d),
        ("phi", &doc.phi, d),
    ] {
        ctx.len(k, "", v, n)?;
    }
    let pa = ParameterArray::new(
        &field,
        ctx.elems("theta", "", &doc.theta)?,
        ctx.elems("theta_star", "", &doc.theta_star)?,
        ctx.elems("varphi", "", &doc.varphi)?,
        ctx.elems("phi", "", &doc.phi)?,
    )
    .map_err(|e| DocError::Structure(e.to_string()))?;
    let expected = match &doc.expected_intersections {
        Some(x) => Some(intersection_from(&ctx, x, d, "expected_intersections.")?),
        None => None,
    };
    Ok((pa, expected))
}

fn matrix_to_doc(m: &Matrix) -> MatrixDoc {
    MatrixDoc { order: m.order(), rows: m.rows().iter().map(|r| strs(r)).collect() }
}

pub fn realization_to_doc(real: &Realization) -> RealizationDoc {
    RealizationDoc {
        field: real.field.descriptor(),
        d: real.d(),
        a: matrix_to_doc(&real.a),
        a_star: matrix_to_doc(&real.a_star),
        idempotents: IdempotentsDoc {
            e: real.e.iter().map(matrix_to_doc).collect(),
            e_star: real.e_star.iter().map(matrix_to_doc).collect(),
        },
    }
}

fn realization_from(text: &str, doc: &RealizationDoc) -> Result<Realization> {
    let field = field_of(text, &doc.field)?;
    let ctx = Ctx { text, field: &field };
    let n = doc.d + 1;
    let a = ctx.matrix("A", "A".into(), &doc.a, n)?;
    let a_star = ctx.matrix("A_star", "A_star".into(), &doc.a_star, n)?;
    let list = |key: &str, ms: &[MatrixDoc]| -> Result<Vec<Matrix>> {
        if ms.len() != n {
            return Err(ctx.err(key, key.into(), format!("expected {n} idempotents, found {}", ms.len())));
        }
        ms.iter().enumerate().map(|(i, m)| ctx.matrix(key, format!("{key}[{i}]"), m, n)).collect()
    };
    let e = list("E", &doc.idempotents.e)?;
    let e_star = list("E_star", &doc.idempotents.e_star)?;
    Realization::from_parts(a, a_star, e, e_star).map_err(|e| DocError::Structure(e.to_string()))
}

/// Reads a parameter array or a realization, telling them apart by the
/// presence of the key "A".
pub fn parse_document(text: &str) -> Result<Document> {
    let v: Value = serde_json::from_str(text).map_err(json_err)?;
    if v.get("A").is_some() {
        let doc: RealizationDoc = serde_json::from_value(v).map_err(|e| DocError::Structure(e.to_string()))?;
        Ok(Document::Realization(realization_from(text, &doc)?))
    } else {
        let doc: ParrayDoc = serde_json::from_value(v).map_err(|e| DocError::Structure(e.to_string()))?;
        let (pa, expected) = parray_from(text, &doc)?;
        Ok(Document::Parray { pa, expected })
    }
}

pub fn parse_parray(text: &str) -> Result<(ParameterArray, Option<IntersectionData>)> {
    match parse_document(text)? {
        Document::Parray { pa, expected } => Ok((pa, expected)),
        Document::Realization(_) => Err(DocError::Structure("expected a parameter array document".into())),
    }
}

pub fn family_spec_to_doc(spec: &FamilySpec) -> FamilySpecDoc {
    FamilySpecDoc {
        family: spec.family.name().to_string(),
        d: spec.d,
        field: spec.field.descriptor(),
        params: spec.params.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
    }
}

/// Parameters given as strings in the spec's field.
pub fn family_params(field: &Field, params: &BTreeMap<String, String>) -> std::result::Result<BTreeMap<String, Elem>, FieldError> {
    params.iter().map(|(k, v)| Ok((k.clone(), field.parse(v)?))).collect()
}

pub fn parse_family_spec(text: &str) -> Result<FamilySpec> {
    let doc: FamilySpecDoc = serde_json::from_str(text).map_err(json_err)?;
    let field = field_of(text, &doc.field)?;
    let family: Family = doc.family.parse().map_err(|e: crate::families::FamilyError| DocError::Entry {
        line: line_of(text, "family"),
        path: "family".into(),
        msg: e.to_string(),
    })?;
    let params = family_params(&field, &doc.params)
        .map_err(|e| DocError::Entry { line: line_of(text, "params"), path: "params".into(), msg: e.to_string() })?;
    Ok(FamilySpec::new(family, doc.d, &field, params))
}

pub fn to_pretty<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}
