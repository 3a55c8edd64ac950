//! JSON interchange.
//!
//! Complex files: `{ "d": int, "vertices": [{"id": str, "type": int}],
//! "chambers": [[str, ...]] }`. The loader rejects any validation violation.
//!
//! Embedding files: `{ "d": int, "points": { "vertex-id": [coord, ...] } }`.
//! Coordinates may be strings (`"0.1"`, `"-3/4"`, `"2.5e-3"`), parsed
//! digit-exactly, or JSON numbers, taken at their exact binary value.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::{ComplexError, TypedComplex, ValidationReport, VertexId};
use crate::geometry::{CoordMode, Embedding, GeometryError};
use crate::numeric::{f64_to_rat, parse_rational, rat_string, ParseRationalError, Rat};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("{path}:{line}:{column}: {message}")]
    Json {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Shape(#[from] ComplexError),
    #[error("complex fails validation: {0}")]
    Invalid(ValidationReport),
    #[error("bad coordinate `{value}` for vertex `{id}`: {source}")]
    Coordinate {
        id: VertexId,
        value: String,
        #[source]
        source: ParseRationalError,
    },
    #[error(transparent)]
    Embedding(#[from] GeometryError),
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: String,
    #[serde(rename = "type")]
    vtype: usize,
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    d: usize,
    vertices: Vec<VertexJson>,
    chambers: Vec<Vec<String>>,
}

fn json_error(path: &str, err: &serde_json::Error) -> LoadError {
    LoadError::Json {
        path: path.to_owned(),
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

pub fn complex_from_str(s: &str) -> Result<TypedComplex, LoadError> {
    complex_from_str_at(s, "<input>")
}

fn complex_from_str_at(s: &str, path: &str) -> Result<TypedComplex, LoadError> {
    let raw: ComplexJson = serde_json::from_str(s).map_err(|e| json_error(path, &e))?;
    let vertices = raw
        .vertices
        .into_iter()
        .map(|v| (VertexId(v.id), v.vtype))
        .collect();
    let chambers = raw
        .chambers
        .into_iter()
        .map(|ch| ch.into_iter().map(VertexId).collect())
        .collect();
    let cx = TypedComplex::from_parts(raw.d, vertices, chambers)?;
    let report = cx.validate();
    if !report.is_valid() {
        return Err(LoadError::Invalid(report));
    }
    Ok(cx)
}

pub fn load_complex(path: &Path) -> Result<TypedComplex, LoadError> {
    let display = path.display().to_string();
    let s = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: display.clone(),
        source,
    })?;
    complex_from_str_at(&s, &display)
}

pub fn complex_to_string(cx: &TypedComplex) -> String {
    let raw = ComplexJson {
        d: cx.d(),
        vertices: cx
            .vertices()
            .iter()
            .map(|v| VertexJson {
                id: v.id.0.clone(),
                vtype: v.vtype,
            })
            .collect(),
        chambers: cx
            .chambers()
            .iter()
            .map(|ch| ch.iter().map(|&ix| cx.vertex(ix).id.0.clone()).collect())
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("complex serializes");
    s.push('\n');
    s
}

pub fn save_complex(cx: &TypedComplex, path: &Path) -> Result<(), LoadError> {
    std::fs::write(path, complex_to_string(cx)).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[derive(Serialize, Deserialize)]
struct EmbeddingJson {
    d: usize,
    points: BTreeMap<String, Vec<serde_json::Value>>,
}

fn coord_from_value(id: &str, v: &serde_json::Value) -> Result<Rat, LoadError> {
    match v {
        serde_json::Value::String(s) => parse_rational(s).map_err(|source| LoadError::Coordinate {
            id: VertexId::from(id),
            value: s.clone(),
            source,
        }),
        serde_json::Value::Number(n) => {
            let x = n.as_f64().and_then(f64_to_rat);
            x.ok_or_else(|| LoadError::Coordinate {
                id: VertexId::from(id),
                value: n.to_string(),
                source: ParseRationalError::Malformed(n.to_string()),
            })
        }
        other => Err(LoadError::Coordinate {
            id: VertexId::from(id),
            value: other.to_string(),
            source: ParseRationalError::Malformed(other.to_string()),
        }),
    }
}

pub fn embedding_from_str(s: &str, mode: CoordMode) -> Result<Embedding, LoadError> {
    embedding_from_str_at(s, "<input>", mode)
}

fn embedding_from_str_at(s: &str, path: &str, mode: CoordMode) -> Result<Embedding, LoadError> {
    let raw: EmbeddingJson = serde_json::from_str(s).map_err(|e| json_error(path, &e))?;
    let mut points = BTreeMap::new();
    for (id, coords) in &raw.points {
        let p = coords
            .iter()
            .map(|v| coord_from_value(id, v))
            .collect::<Result<Vec<Rat>, LoadError>>()?;
        points.insert(VertexId::from(id.as_str()), p);
    }
    Ok(Embedding::new(raw.d, points, mode)?)
}

pub fn load_embedding(path: &Path, mode: CoordMode) -> Result<Embedding, LoadError> {
    let display = path.display().to_string();
    let s = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
        path: display.clone(),
        source,
    })?;
    embedding_from_str_at(&s, &display, mode)
}

/// Coordinates serialize as exact `num/den` strings.
pub fn embedding_to_string(emb: &Embedding) -> String {
    let raw = EmbeddingJson {
        d: emb.d(),
        points: emb
            .points()
            .iter()
            .map(|(id, p)| {
                (
                    id.0.clone(),
                    p.iter()
                        .map(|c| serde_json::Value::String(rat_string(c)))
                        .collect(),
                )
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&raw).expect("embedding serializes");
    s.push('\n');
    s
}

impl fmt::Display for CoordMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoordMode::ExactRational => write!(f, "exact"),
            CoordMode::Float => write!(f, "float"),
        }
    }
}
