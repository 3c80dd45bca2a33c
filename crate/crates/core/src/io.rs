//! JSON documents for frameworks and triangulations.
//!
//! A framework document is `{"circles": [{"x", "y", "r"}, …]}` with exactly
//! one of `"edges": [[i, j], …]` or `"faces": [[i, j, k], …]`. A
//! triangulation document is `{"num_vertices": n, "faces": [[i, j, k], …]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circle::Circle;
use crate::error::{Error, Result};
use crate::framework::{CFramework, Triangulation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameworkDocument {
    pub circles: Vec<Circle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[usize; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub faces: Option<Vec<[usize; 3]>>,
}

impl FrameworkDocument {
    /// Faces when the framework came from a triangulation, edges otherwise.
    pub fn from_framework(f: &CFramework) -> Self {
        match f.source() {
            Some(t) => FrameworkDocument {
                circles: f.circles().to_vec(),
                edges: None,
                faces: Some(t.faces.clone()),
            },
            None => FrameworkDocument {
                circles: f.circles().to_vec(),
                edges: Some(f.edges().iter().map(|&(i, j)| [i, j]).collect()),
                faces: None,
            },
        }
    }

    pub fn to_framework(&self) -> Result<CFramework> {
        let built = match (&self.edges, &self.faces) {
            (Some(edges), None) => {
                CFramework::new(self.circles.clone(), edges.iter().map(|e| (e[0], e[1])))
            }
            (None, Some(faces)) => Triangulation::new(self.circles.len(), faces.clone())
                .and_then(|t| CFramework::from_triangulation(&t, self.circles.clone())),
            (Some(_), Some(_)) => {
                return Err(Error::Validation(
                    "framework document has both edges and faces".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Validation(
                    "framework document needs edges or faces".into(),
                ))
            }
        };
        built.map_err(into_validation)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TriangulationDocument {
    pub num_vertices: usize,
    pub faces: Vec<[usize; 3]>,
}

impl TriangulationDocument {
    pub fn to_triangulation(&self) -> Result<Triangulation> {
        Triangulation::new(self.num_vertices, self.faces.clone()).map_err(into_validation)
    }
}

impl From<&Triangulation> for TriangulationDocument {
    fn from(t: &Triangulation) -> Self {
        TriangulationDocument {
            num_vertices: t.num_vertices,
            faces: t.faces.clone(),
        }
    }
}

/// Either kind of document, told apart by the `circles` key.
#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Framework(CFramework),
    Triangulation(Triangulation),
}

fn into_validation(e: Error) -> Error {
    match e {
        Error::Validation(_) => e,
        other => Error::Validation(other.to_string()),
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn parse_framework(text: &str) -> Result<CFramework> {
    serde_json::from_str::<FrameworkDocument>(text)
        .map_err(parse_error)?
        .to_framework()
}

pub fn parse_triangulation(text: &str) -> Result<Triangulation> {
    serde_json::from_str::<TriangulationDocument>(text)
        .map_err(parse_error)?
        .to_triangulation()
}

pub fn parse_document(text: &str) -> Result<Document> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(parse_error)?;
    if value.get("circles").is_some() {
        parse_framework(text).map(Document::Framework)
    } else {
        parse_triangulation(text).map(Document::Triangulation)
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn load_framework(path: impl AsRef<Path>) -> Result<CFramework> {
    parse_framework(&read(path.as_ref())?)
}

pub fn load_triangulation(path: impl AsRef<Path>) -> Result<Triangulation> {
    parse_triangulation(&read(path.as_ref())?)
}

pub fn load_document(path: impl AsRef<Path>) -> Result<Document> {
    parse_document(&read(path.as_ref())?)
}

/// Pretty JSON. Floats are written in their shortest round-trip form, so
/// loading the text back yields identical values.
pub fn framework_to_json(f: &CFramework) -> String {
    serde_json::to_string_pretty(&FrameworkDocument::from_framework(f))
        .expect("framework serializes")
}

pub fn triangulation_to_json(t: &Triangulation) -> String {
    serde_json::to_string_pretty(&TriangulationDocument::from(t)).expect("triangulation serializes")
}

pub fn save_framework(f: &CFramework, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, framework_to_json(f) + "\n")
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn save_triangulation(t: &Triangulation, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, triangulation_to_json(t) + "\n")
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}
