use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::Value;

use super::{Diagnostic, Parsed, ANNOTATION_DIR};
use crate::error::{Error, Result};
use crate::model::Diagram;

const TOP_LEVEL_KEYS: &[&str] = &[
    "id",
    "image",
    "size",
    "elements",
    "dpg",
    "grouping",
    "connectivity",
    "rst",
    "categories",
];
const ELEMENT_KEYS: &[&str] = &["id", "kind", "region", "text"];

/// Converts serde_json's 1-based line/column into a byte offset.
pub(crate) fn byte_offset(raw: &[u8], line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut offset = 0;
    for (i, l) in raw.split(|b| *b == b'\n').enumerate() {
        if i + 1 == line {
            return (offset + column.saturating_sub(1)).min(raw.len());
        }
        offset += l.len() + 1;
    }
    raw.len()
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

/// Parses one canonical document. Unknown fields are reported as warnings.
pub(crate) fn parse_document(path: &Path, raw: &[u8]) -> Result<(Diagram, Vec<Diagnostic>)> {
    let value: Value = serde_json::from_slice(raw).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        offset: byte_offset(raw, e.line(), e.column()),
        pointer: String::new(),
        message: e.to_string(),
    })?;

    let mut de = serde_json::Deserializer::from_slice(raw);
    let diagram: Diagram = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let pointer = pointer_of(e.path());
        let inner = e.into_inner();
        Error::Parse {
            path: path.to_path_buf(),
            offset: byte_offset(raw, inner.line(), inner.column()),
            pointer,
            message: inner.to_string(),
        }
    })?;

    let mut warnings = Vec::new();
    let mut unknown = |pointer: String, key: &str| {
        warnings.push(Diagnostic {
            file: path.to_path_buf(),
            pointer,
            message: format!("unknown field `{key}` dropped"),
        })
    };
    if let Value::Object(map) = &value {
        for key in map.keys().filter(|k| !TOP_LEVEL_KEYS.contains(&k.as_str())) {
            unknown(format!("/{key}"), key);
        }
        if let Some(Value::Array(elements)) = map.get("elements") {
            for (i, el) in elements.iter().enumerate() {
                if let Value::Object(el) = el {
                    for key in el.keys().filter(|k| !ELEMENT_KEYS.contains(&k.as_str())) {
                        unknown(format!("/elements/{i}/{key}"), key);
                    }
                }
            }
        }
    }
    Ok((diagram, warnings))
}

pub(crate) fn list_json(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "json") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub(crate) fn read_dir(root: &Path) -> Result<(Vec<Parsed>, Vec<Diagnostic>)> {
    let files = list_json(&root.join(ANNOTATION_DIR))?;
    let results: Vec<std::result::Result<Parsed, Diagnostic>> = files
        .par_iter()
        .map(|path| {
            let raw = fs::read(path).map_err(|e| Diagnostic {
                file: path.clone(),
                pointer: String::new(),
                message: e.to_string(),
            })?;
            match parse_document(path, &raw) {
                Ok((diagram, warnings)) => Ok(Parsed {
                    image: diagram.image_path.as_ref().map(|p| root.join(p)),
                    diagram,
                    annotation: path.clone(),
                    warnings,
                }),
                Err(Error::Parse {
                    offset,
                    pointer,
                    message,
                    ..
                }) => Err(Diagnostic {
                    file: path.clone(),
                    pointer,
                    message: format!("parse error at byte {offset}: {message}"),
                }),
                Err(other) => Err(Diagnostic {
                    file: path.clone(),
                    pointer: String::new(),
                    message: other.to_string(),
                }),
            }
        })
        .collect();

    let mut parsed = Vec::new();
    let mut skipped = Vec::new();
    for r in results {
        match r {
            Ok(p) => parsed.push(p),
            Err(d) => skipped.push(d),
        }
    }
    Ok((parsed, skipped))
}
