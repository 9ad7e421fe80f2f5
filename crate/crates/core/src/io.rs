//! JSON documents for manifolds, bundles and gluings, and deterministic
//! text/JSON report rendering.
//!
//! Rationals are written as JSON integers when integral and as `"p/q"`
//! strings otherwise. Object keys in JSON output are sorted.

use std::path::Path;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::classes::ChernData;
use crate::flags::{FlagDescriptor, GluingDescriptor};
use crate::ring::{GradedClass, K3Vector, ThreefoldRing};
use crate::{Error, Result, Q};

/// Parses `"7"`, `"-5/6"` or `" 3 / 4 "`.
pub fn parse_rational(s: &str) -> Result<Q> {
    let bad = || Error::Parse(format!("`{s}` is not a rational number"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(Error::Parse(format!("`{s}` has zero denominator")));
    }
    Ok(Q::new(num, den))
}

pub fn parse_rational_list(s: &str) -> Result<Vec<Q>> {
    s.split(',').map(parse_rational).collect()
}

/// A rational in a document: a JSON integer or a `"p/q"` string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalValue {
    Int(i64),
    Text(String),
}

impl RationalValue {
    pub fn to_q(&self) -> Result<Q> {
        match self {
            RationalValue::Int(i) => Ok(crate::q(*i)),
            RationalValue::Text(s) => parse_rational(s),
        }
    }

    pub fn from_q(x: &Q) -> Self {
        match x.is_integer().then(|| x.to_integer().to_i64()).flatten() {
            Some(i) => RationalValue::Int(i),
            None => RationalValue::Text(x.to_string()),
        }
    }
}

fn to_qs(v: &[RationalValue]) -> Result<Vec<Q>> {
    v.iter().map(RationalValue::to_q).collect()
}

/// JSON form of a rational.
pub fn q_json(x: &Q) -> Value {
    match x.is_integer().then(|| x.to_integer().to_i64()).flatten() {
        Some(i) => Value::from(i),
        None => Value::from(x.to_string()),
    }
}

pub fn qvec_json(xs: &[Q]) -> Value {
    Value::Array(xs.iter().map(q_json).collect())
}

pub fn graded_json(x: &GradedClass) -> Value {
    let mut m = Map::new();
    m.insert("a0".into(), q_json(&x.a0));
    m.insert("a2".into(), qvec_json(&x.a2));
    m.insert("a4".into(), qvec_json(&x.a4));
    m.insert("a6".into(), q_json(&x.a6));
    Value::Object(m)
}

pub fn k3_json(v: &K3Vector) -> Value {
    let mut m = Map::new();
    m.insert("v0".into(), q_json(&v.v0));
    m.insert("v2".into(), qvec_json(&v.v2));
    m.insert("v4".into(), q_json(&v.v4));
    Value::Object(m)
}

pub fn matrix_json(a: &[Vec<Q>]) -> Value {
    Value::Array(a.iter().map(|r| qvec_json(r)).collect())
}

pub fn fmt_qvec(xs: &[Q]) -> String {
    let parts: Vec<String> = xs.iter().map(ToString::to_string).collect();
    format!("[{}]", parts.join(", "))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifoldKind {
    Cy3,
    Fano3,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManifoldDocument {
    pub name: String,
    pub kind: ManifoldKind,
    pub rho: usize,
    pub basis: Vec<String>,
    pub triple: Vec<Vec<Vec<i64>>>,
    pub c1: Vec<i64>,
    pub c2_values: Vec<i64>,
    pub chi_top: i64,
    pub h12: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_coords: Option<Vec<i64>>,
    #[serde(default, rename = "h1_TY", skip_serializing_if = "Option::is_none")]
    pub h1_ty: Option<u64>,
    #[serde(default, rename = "h0_N", skip_serializing_if = "Option::is_none")]
    pub h0_n: Option<u64>,
}

/// A loaded manifold document: a bare ring, or a ring with a K3 surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Manifold {
    Ring(ThreefoldRing),
    Flag(FlagDescriptor),
}

impl Manifold {
    pub fn ring(&self) -> &ThreefoldRing {
        match self {
            Manifold::Ring(r) => r,
            Manifold::Flag(f) => f.ring(),
        }
    }

    pub fn flag(&self) -> Option<&FlagDescriptor> {
        match self {
            Manifold::Ring(_) => None,
            Manifold::Flag(f) => Some(f),
        }
    }
}

fn json_error(e: serde_json::Error) -> Error {
    let full = e.to_string();
    let suffix = format!(" at line {} column {}", e.line(), e.column());
    let msg = full.strip_suffix(&suffix).unwrap_or(&full);
    Error::Parse(format!("line {}, column {}: {msg}", e.line(), e.column()))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

impl ManifoldDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(json_error)
    }

    pub fn from_ring(ring: &ThreefoldRing) -> Self {
        Self {
            name: ring.name().to_string(),
            kind: if ring.is_calabi_yau() {
                ManifoldKind::Cy3
            } else {
                ManifoldKind::Fano3
            },
            rho: ring.rho(),
            basis: ring.basis_labels().to_vec(),
            triple: ring.triple().to_vec(),
            c1: ring.c1_coords().to_vec(),
            c2_values: ring.c2_values().to_vec(),
            chi_top: ring.chi_top(),
            h12: ring.h12(),
            description: None,
            s_coords: None,
            h1_ty: None,
            h0_n: None,
        }
    }

    pub fn from_flag(flag: &FlagDescriptor) -> Self {
        Self {
            s_coords: Some(flag.s_coords().to_vec()),
            h1_ty: flag.h1_ty,
            h0_n: flag.h0_n,
            ..Self::from_ring(flag.ring())
        }
    }

    /// The ring with structural and Hodge checks, ignoring `s_coords`.
    pub fn to_ring(&self) -> Result<ThreefoldRing> {
        if self.rho != self.basis.len() {
            return Err(Error::DimensionMismatch {
                expected: self.rho,
                found: self.basis.len(),
                what: "basis labels",
            });
        }
        let ring = ThreefoldRing::new(
            self.name.clone(),
            self.basis.clone(),
            self.triple.clone(),
            self.c1.clone(),
            self.c2_values.clone(),
            self.chi_top,
            self.h12,
        )?;
        match (self.kind, ring.is_calabi_yau()) {
            (ManifoldKind::Cy3, false) => {
                return Err(Error::InvalidRing("kind is cy3 but c1 ≠ 0".into()))
            }
            (ManifoldKind::Fano3, true) => {
                return Err(Error::InvalidRing("kind is fano3 but c1 = 0".into()))
            }
            _ => {}
        }
        ring.validate()?;
        Ok(ring)
    }

    /// Full load: a flag when `s_coords` is present, with every flag check.
    pub fn to_manifold(&self) -> Result<Manifold> {
        let ring = self.to_ring()?;
        match &self.s_coords {
            None => Ok(Manifold::Ring(ring)),
            Some(s) => {
                let mut flag = FlagDescriptor::new(ring, s.clone())?;
                flag.h1_ty = self.h1_ty;
                flag.h0_n = self.h0_n;
                Ok(Manifold::Flag(flag))
            }
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }
}

pub fn parse_manifold(text: &str) -> Result<Manifold> {
    ManifoldDocument::parse(text)?.to_manifold()
}

pub fn load_manifold(path: &Path) -> Result<Manifold> {
    parse_manifold(&read(path)?)
}

pub fn read_manifold_document(path: &Path) -> Result<ManifoldDocument> {
    ManifoldDocument::parse(&read(path)?)
}

/// Emits a ring as a document that [`parse_manifold`] reads back exactly.
pub fn emit_ring(ring: &ThreefoldRing) -> String {
    ManifoldDocument::from_ring(ring).to_json()
}

pub fn emit_flag(flag: &FlagDescriptor) -> String {
    ManifoldDocument::from_flag(flag).to_json()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleLabels {
    #[serde(default)]
    pub stable: Option<bool>,
    #[serde(default)]
    pub exceptional: Option<bool>,
    #[serde(default)]
    pub instanton: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleDocument {
    #[serde(default)]
    pub manifold: Option<String>,
    #[serde(default)]
    pub description: Option<String>,
    pub rank: u32,
    pub c1: Vec<RationalValue>,
    pub c2: Vec<RationalValue>,
    pub c3: RationalValue,
    #[serde(default)]
    pub labels: BundleLabels,
}

impl BundleDocument {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(json_error)
    }

    pub fn to_chern(&self) -> Result<ChernData> {
        ChernData::new(self.rank, to_qs(&self.c1)?, to_qs(&self.c2)?, self.c3.to_q()?)
    }

    pub fn from_chern(e: &ChernData) -> Self {
        Self {
            manifold: None,
            description: None,
            rank: e.rank,
            c1: e.c1.iter().map(RationalValue::from_q).collect(),
            c2: e.c2.iter().map(RationalValue::from_q).collect(),
            c3: RationalValue::from_q(&e.c3),
            labels: BundleLabels::default(),
        }
    }
}

pub fn load_bundle(path: &Path) -> Result<BundleDocument> {
    BundleDocument::parse(&read(path)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GluingDocument {
    #[serde(default)]
    pub description: Option<String>,
    /// Paths of the two flag documents, relative to this document.
    pub plus: String,
    pub minus: String,
    #[serde(rename = "A")]
    pub a: Vec<Vec<RationalValue>>,
    #[serde(default, rename = "section_class_D")]
    pub section_class_d: Option<Vec<RationalValue>>,
    #[serde(default)]
    pub one_extension_asserted: Option<bool>,
}

fn flag_at(path: &Path) -> Result<FlagDescriptor> {
    match load_manifold(path)? {
        Manifold::Flag(f) => Ok(f),
        Manifold::Ring(r) => Err(Error::InvalidFlag(vec![format!(
            "{} has no s_coords",
            r.name()
        )])),
    }
}

/// Loads a gluing document, or a single flag document as its plain double.
pub fn load_gluing(path: &Path) -> Result<GluingDescriptor> {
    let text = read(path)?;
    let value: Value = serde_json::from_str(&text).map_err(json_error)?;
    if value.get("plus").is_none() {
        return Ok(crate::flags::build_double(&flag_at(path)?));
    }
    let doc: GluingDocument = serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let plus = flag_at(&base.join(&doc.plus))?;
    let minus = flag_at(&base.join(&doc.minus))?;
    let a = doc.a.iter().map(|r| to_qs(r)).collect::<Result<Vec<_>>>()?;
    let mut gd = GluingDescriptor::new(plus, minus, a)?;
    if let Some(d) = &doc.section_class_d {
        gd = gd.with_section_class(to_qs(d)?)?;
    }
    gd.one_extension_asserted = doc.one_extension_asserted;
    Ok(gd)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

/// Named result fields, each with a JSON value and a text rendering.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    fields: Vec<(String, Value, String)>,
}

fn text_of(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(xs) => {
            let parts: Vec<String> = xs.iter().map(text_of).collect();
            format!("[{}]", parts.join(", "))
        }
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(mut self, key: &str, json: Value, text: impl Into<String>) -> Self {
        self.fields.push((key.to_string(), json, text.into()));
        self
    }

    /// Field whose text is derived from the JSON value.
    pub fn value(self, key: &str, json: Value) -> Self {
        let text = text_of(&json);
        self.field(key, json, text)
    }

    pub fn rational(self, key: &str, x: &Q) -> Self {
        self.field(key, q_json(x), x.to_string())
    }

    pub fn graded(self, key: &str, x: &GradedClass) -> Self {
        self.field(key, graded_json(x), x.to_string())
    }

    pub fn k3(self, key: &str, v: &K3Vector) -> Self {
        self.field(key, k3_json(v), v.to_string())
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.iter().find(|f| f.0 == key).map(|f| &f.1)
    }

    pub fn to_json_value(&self) -> Value {
        Value::Object(
            self.fields
                .iter()
                .map(|(k, v, _)| (k.clone(), v.clone()))
                .collect(),
        )
    }

    /// Deterministic rendering; JSON keys are sorted.
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json_value().to_string(),
            Format::Text => {
                let width = self.fields.iter().map(|f| f.0.chars().count()).max().unwrap_or(0);
                self.fields
                    .iter()
                    .map(|(k, _, t)| format!("{k:<width$}  {t}"))
                    .collect::<Vec<_>>()
                    .join("\n")
            }
        }
    }
}
