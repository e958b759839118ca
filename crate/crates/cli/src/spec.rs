//! JSON input documents. Complex entries are `[re, im]` pairs and matrices
//! are lists of rows.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SPEC_VERSION: &str = "cstarcat/1";

pub type MatrixSpec = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecDocument {
    pub version: String,
    pub category: CategorySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tasks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategorySpec {
    pub objects: Vec<ObjectSpec>,
    #[serde(default)]
    pub homs: Vec<HomSpec>,
    /// Close the given matrices under composition, adjoints and identities
    /// instead of reading them as complete bases.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub generate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub id: String,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomSpec {
    pub source: String,
    pub target: String,
    pub basis: Vec<MatrixSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub order: usize,
    /// `table[a][b]` is the index of `a b`; element 0 need not be the identity.
    pub table: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub names: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionSpec {
    /// One entry per group element, in table order.
    pub elements: Vec<ActionElementSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionElementSpec {
    /// Image of each object, in object order.
    pub objects: Vec<String>,
    /// Unitary `V_{g,C}: H_C -> H_{gC}` per object; identities when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intertwiners: Option<Vec<MatrixSpec>>,
}

/// A functor out of a spec's category, for `morita --functor`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctorSpec {
    pub version: String,
    pub target: CategorySpec,
    /// Source object id to target object id.
    pub objects: std::collections::BTreeMap<String, String>,
    /// Images of spanning morphisms; when empty every matrix is sent to itself.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub images: Vec<ImageSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImageSpec {
    pub source: String,
    pub target: String,
    pub from: MatrixSpec,
    pub to: MatrixSpec,
}

fn parse_str<T: for<'de> Deserialize<'de>>(text: &str, origin: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let inner = e.inner();
        CliError::Parse {
            origin: origin.to_string(),
            line: inner.line(),
            column: inner.column(),
            path: e.path().to_string(),
            message: inner.to_string(),
        }
    })
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

impl SpecDocument {
    pub fn parse_str(text: &str, origin: &str) -> Result<Self, CliError> {
        let doc: SpecDocument = parse_str(text, origin)?;
        doc.check_version(origin)?;
        Ok(doc)
    }

    pub fn parse(path: &Path) -> Result<Self, CliError> {
        Self::parse_str(&read(path)?, &path.display().to_string())
    }

    fn check_version(&self, origin: &str) -> Result<(), CliError> {
        if self.version != SPEC_VERSION {
            return Err(CliError::Parse {
                origin: origin.to_string(),
                line: 0,
                column: 0,
                path: "version".into(),
                message: format!("unsupported version `{}`, expected `{SPEC_VERSION}`", self.version),
            });
        }
        Ok(())
    }

    /// Canonical re-emission: sorted keys, two-space indentation, trailing newline.
    pub fn to_canonical_json(&self) -> String {
        crate::output::canonical(&serde_json::to_value(self).expect("spec serializes"))
    }
}

impl FunctorSpec {
    pub fn parse(path: &Path) -> Result<Self, CliError> {
        let origin = path.display().to_string();
        let f: FunctorSpec = parse_str(&read(path)?, &origin)?;
        if f.version != SPEC_VERSION {
            return Err(CliError::Parse {
                origin,
                line: 0,
                column: 0,
                path: "version".into(),
                message: format!("unsupported version `{}`, expected `{SPEC_VERSION}`", f.version),
            });
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCALAR: &str = r#"{
        "version": "cstarcat/1",
        "category": {
            "objects": [{"id": "c", "dim": 1}],
            "homs": [{"source": "c", "target": "c", "basis": [[[[1.0, 0.0]]]]}]
        }
    }"#;

    #[test]
    fn parses_minimal_document() {
        let doc = SpecDocument::parse_str(SCALAR, "inline").unwrap();
        assert_eq!(doc.category.objects.len(), 1);
        assert!(doc.group.is_none());
        let again = SpecDocument::parse_str(&doc.to_canonical_json(), "re-emitted").unwrap();
        assert_eq!(doc, again);
    }

    #[test]
    fn errors_carry_field_paths() {
        let bad = SCALAR.replace("\"dim\": 1", "\"dim\": \"one\"");
        match SpecDocument::parse_str(&bad, "inline") {
            Err(CliError::Parse { path, line, .. }) => {
                assert_eq!(path, "category.objects[0].dim");
                assert!(line > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
        let unknown = SCALAR.replace("\"version\"", "\"colour\": 1, \"version\"");
        assert!(matches!(SpecDocument::parse_str(&unknown, "inline"), Err(CliError::Parse { .. })));
    }
}
