//! Translators from upstream AI2D-style layouts into the canonical model.
//!
//! Assumed layout (field names follow the public AI2D release as far as it
//! is known; anything else is ignored with a warning):
//!
//! ```text
//! <root>/annotations/<id>.png.json   element inventory and relationships
//! <root>/images/<id>.png
//! <root>/categories.json             {"<id>.png": "<semantic code>", ...}
//! <root>/ai2d-rst/<id>.json          grouping, connectivity, rst, category
//! ```
//!
//! Element dictionaries are `arrowHeads`, `arrows`, `blobs` and `text`, each
//! mapping an id to an object with either `rectangle: [[x0,y0],[x1,y1]]` or
//! `polygon: [[x,y],...]`. Relationships carry `category`, `origin`,
//! `destination` and an optional `connector` (the mediating arrow).
//!
//! An AI2D-RST file has `grouping` and `connectivity` graphs whose edges use
//! `source`/`target` (connectivity edges may add `directed` and `via`), an
//! `rst` graph whose relation nodes carry `rel_name` and whose edges carry
//! `nuclearity`, and a `category` naming the structural class.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;
use serde_json::Value;

use super::{canonical::list_json, Diagnostic, Parsed, ANNOTATION_DIR, IMAGE_DIR};
use crate::error::{Error, Result};
use crate::model::{
    CategoryLabels, ConnectivityEdge, ConnectivityGraph, Diagram, DiagramElement,
    DiagramParseGraph, DpgEdge, ElementKind, GroupEdge, GroupingGraph, Nuclearity, Region,
    RstEdge, RstGraph, RstNode,
};

pub const RST_DIR: &str = "ai2d-rst";
pub const CATEGORIES_FILE: &str = "categories.json";

/// Upstream semantic codes and the category names they map to. Codes not
/// listed pass through unchanged.
pub const SEMANTIC_CODES: &[(&str, &str)] = &[
    ("carbonCycle", "carbon cycle"),
    ("foodChainsWebs", "food webs"),
    ("humanPhysiology", "human physiology"),
    ("lifeCycles", "life cycles"),
    ("moonPhaseEquinox", "moon phases"),
    ("partsOfA", "parts of"),
    ("rockCycle", "rock cycle"),
    ("rockStrata", "rock strata"),
    ("volcano", "volcano"),
    ("waterCNPCycle", "water cycle"),
];

pub fn semantic_name(code: &str) -> String {
    SEMANTIC_CODES
        .iter()
        .find(|(c, _)| *c == code)
        .map(|(_, n)| n.to_string())
        .unwrap_or_else(|| code.to_string())
}

const ELEMENT_GROUPS: &[(&str, ElementKind)] = &[
    ("arrowHeads", ElementKind::Arrowhead),
    ("arrows", ElementKind::Arrow),
    ("blobs", ElementKind::Blob),
    ("text", ElementKind::Text),
];
const KNOWN_KEYS: &[&str] = &["arrowHeads", "arrows", "blobs", "text", "relationships", "imageConsts"];

#[derive(Deserialize)]
struct RawElement {
    rectangle: Option<[[f64; 2]; 2]>,
    polygon: Option<Vec<[f64; 2]>>,
    value: Option<String>,
}

#[derive(Deserialize)]
struct RawRelationship {
    category: String,
    origin: String,
    destination: String,
    connector: Option<String>,
}

#[derive(Deserialize)]
struct RawEdge {
    source: String,
    target: String,
    #[serde(default)]
    directed: Option<bool>,
    #[serde(default)]
    via: Option<String>,
    #[serde(default)]
    nuclearity: Option<String>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawNode {
    Id(String),
    Full {
        id: String,
        #[serde(default)]
        rel_name: Option<String>,
    },
}

impl RawNode {
    fn id(&self) -> &str {
        match self {
            RawNode::Id(id) | RawNode::Full { id, .. } => id,
        }
    }
}

#[derive(Deserialize)]
struct RawGraph {
    #[serde(default)]
    nodes: Vec<RawNode>,
    #[serde(default)]
    edges: Vec<RawEdge>,
}

#[derive(Deserialize)]
struct RawRst {
    grouping: Option<RawGraph>,
    connectivity: Option<RawGraph>,
    rst: Option<RawGraph>,
    category: Option<String>,
}

fn diag(file: &Path, pointer: impl Into<String>, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        file: file.to_path_buf(),
        pointer: pointer.into(),
        message: message.into(),
    }
}

fn parse_error(path: &Path, raw: &[u8], e: serde_json::Error) -> Diagnostic {
    let offset = super::canonical::byte_offset(raw, e.line(), e.column());
    diag(path, "", format!("parse error at byte {offset}: {e}"))
}

/// Diagram id of an upstream annotation file: `4210.png.json` → `4210`.
fn id_of(path: &Path) -> String {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = name.strip_suffix(".json").unwrap_or(&name);
    stem.strip_suffix(".png").unwrap_or(stem).to_string()
}

fn read_categories(root: &Path) -> Result<BTreeMap<String, String>> {
    let path = root.join(CATEGORIES_FILE);
    if !path.is_file() {
        return Ok(BTreeMap::new());
    }
    let raw = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    let map: BTreeMap<String, String> = serde_json::from_slice(&raw).map_err(|e| Error::Parse {
        offset: super::canonical::byte_offset(&raw, e.line(), e.column()),
        path: path.clone(),
        pointer: String::new(),
        message: e.to_string(),
    })?;
    Ok(map
        .into_iter()
        .map(|(k, v)| {
            let id = k.strip_suffix(".png").unwrap_or(&k).to_string();
            (id, semantic_name(&v))
        })
        .collect())
}

fn convert_elements(
    path: &Path,
    doc: &serde_json::Map<String, Value>,
    warnings: &mut Vec<Diagnostic>,
) -> std::result::Result<Vec<DiagramElement>, Diagnostic> {
    let mut elements = Vec::new();
    for (group, kind) in ELEMENT_GROUPS {
        let Some(entries) = doc.get(*group) else { continue };
        let Value::Object(entries) = entries else {
            return Err(diag(path, format!("/{group}"), "expected an object"));
        };
        for (id, value) in entries {
            let pointer = format!("/{group}/{id}");
            let raw: RawElement = serde_json::from_value(value.clone())
                .map_err(|e| diag(path, pointer.clone(), e.to_string()))?;
            let region = match (raw.polygon, raw.rectangle) {
                (Some(p), _) => Region::Polygon(p),
                (None, Some([[x0, y0], [x1, y1]])) => {
                    Region::bbox(x0.min(x1), y0.min(y1), x0.max(x1), y0.max(y1))
                }
                (None, None) => {
                    warnings.push(diag(path, pointer, "element without geometry dropped"));
                    continue;
                }
            };
            let mut el = DiagramElement::new(id.clone(), *kind, region);
            if *kind == ElementKind::Text {
                el.text = raw.value;
            }
            elements.push(el);
        }
    }
    elements.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(elements)
}

fn convert_relationships(
    path: &Path,
    doc: &serde_json::Map<String, Value>,
) -> std::result::Result<Vec<DpgEdge>, Diagnostic> {
    let Some(rels) = doc.get("relationships") else {
        return Ok(Vec::new());
    };
    let Value::Object(rels) = rels else {
        return Err(diag(path, "/relationships", "expected an object"));
    };
    let mut edges = Vec::with_capacity(rels.len());
    for (key, value) in rels {
        let r: RawRelationship = serde_json::from_value(value.clone())
            .map_err(|e| diag(path, format!("/relationships/{key}"), e.to_string()))?;
        // some upstream records repeat the origin as connector
        let via = r.connector.filter(|c| c != &r.origin && c != &r.destination);
        edges.push(DpgEdge {
            src: r.origin,
            dst: r.destination,
            relation: r.category,
            via,
        });
    }
    Ok(edges)
}

/// Image size from the PNG header, else the element extents.
fn image_size(
    image: &Path,
    elements: &[DiagramElement],
    ann: &Path,
    warnings: &mut Vec<Diagnostic>,
) -> [u32; 2] {
    if let Ok((w, h)) = image::image_dimensions(image) {
        return [w, h];
    }
    let (mut w, mut h) = (1.0f64, 1.0f64);
    for e in elements {
        let (_, _, x1, y1) = e.region.bounds();
        if x1.is_finite() && y1.is_finite() {
            w = w.max(x1);
            h = h.max(y1);
        }
    }
    warnings.push(diag(
        ann,
        "/size",
        format!("image size unavailable; using element extents {}x{}", w.ceil(), h.ceil()),
    ));
    [w.ceil() as u32, h.ceil() as u32]
}

fn convert_annotation(
    root: &Path,
    path: &Path,
    categories: &BTreeMap<String, String>,
) -> std::result::Result<Parsed, Diagnostic> {
    let raw = fs::read(path).map_err(|e| diag(path, "", e.to_string()))?;
    let value: Value = serde_json::from_slice(&raw).map_err(|e| parse_error(path, &raw, e))?;
    let Value::Object(doc) = value else {
        return Err(diag(path, "", "expected a JSON object"));
    };
    let mut warnings = Vec::new();
    for key in doc.keys().filter(|k| !KNOWN_KEYS.contains(&k.as_str())) {
        warnings.push(diag(path, format!("/{key}"), format!("unknown field `{key}` dropped")));
    }
    let id = id_of(path);
    let elements = convert_elements(path, &doc, &mut warnings)?;
    let edges = convert_relationships(path, &doc)?;
    let image = root.join(IMAGE_DIR).join(format!("{id}.png"));
    let size = image_size(&image, &elements, path, &mut warnings);
    let semantic = categories.get(&id).cloned();
    if semantic.is_none() {
        warnings.push(diag(path, "/categories", format!("no semantic category for {id}")));
    }

    let diagram = Diagram {
        image_path: Some(format!("{IMAGE_DIR}/{id}.png")),
        image_size: size.into(),
        dpg: DiagramParseGraph {
            nodes: elements.iter().map(|e| e.id.clone()).collect(),
            edges,
        },
        grouping: None,
        connectivity: None,
        rst: None,
        categories: CategoryLabels {
            semantic,
            structural: None,
        },
        elements,
        id,
    };
    Ok(Parsed {
        diagram,
        annotation: path.to_path_buf(),
        image: Some(image),
        warnings,
    })
}

fn plain_graph(g: RawGraph) -> (Vec<String>, Vec<RawEdge>) {
    (g.nodes.iter().map(|n| n.id().to_string()).collect(), g.edges)
}

fn attach_rst(parsed: &mut Parsed, path: &Path) -> std::result::Result<(), Diagnostic> {
    let raw = fs::read(path).map_err(|e| diag(path, "", e.to_string()))?;
    let mut de = serde_json::Deserializer::from_slice(&raw);
    let doc: RawRst = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let pointer = e.path().to_string();
        let inner = e.into_inner();
        let offset = super::canonical::byte_offset(&raw, inner.line(), inner.column());
        diag(path, format!("/{}", pointer.replace('.', "/")), format!("parse error at byte {offset}: {inner}"))
    })?;
    let d = &mut parsed.diagram;
    if let Some(g) = doc.grouping {
        let (nodes, edges) = plain_graph(g);
        d.grouping = Some(GroupingGraph {
            nodes,
            edges: edges
                .into_iter()
                .map(|e| GroupEdge {
                    parent: e.source,
                    child: e.target,
                })
                .collect(),
        });
    }
    if let Some(g) = doc.connectivity {
        let (nodes, edges) = plain_graph(g);
        d.connectivity = Some(ConnectivityGraph {
            nodes,
            edges: edges
                .into_iter()
                .map(|e| ConnectivityEdge {
                    src: e.source,
                    dst: e.target,
                    directed: e.directed.unwrap_or(true),
                    via: e.via,
                })
                .collect(),
        });
    }
    if let Some(g) = doc.rst {
        let nodes = g
            .nodes
            .into_iter()
            .map(|n| match n {
                RawNode::Id(id) | RawNode::Full { id, rel_name: None } => RstNode::unit(id),
                RawNode::Full {
                    id,
                    rel_name: Some(name),
                } => RstNode::relation(id, name),
            })
            .collect();
        let mut edges = Vec::with_capacity(g.edges.len());
        for (i, e) in g.edges.into_iter().enumerate() {
            let role = match e.nuclearity.as_deref() {
                None => None,
                Some("nucleus") => Some(Nuclearity::Nucleus),
                Some("satellite") => Some(Nuclearity::Satellite),
                Some(other) => {
                    return Err(diag(
                        path,
                        format!("/rst/edges/{i}/nuclearity"),
                        format!("unknown nuclearity `{other}`"),
                    ))
                }
            };
            edges.push(RstEdge {
                src: e.source,
                dst: e.target,
                role,
            });
        }
        d.rst = Some(RstGraph { nodes, edges });
    }
    d.categories.structural = doc.category;
    Ok(())
}

/// Reads an AI2D-style corpus. With `rst`, only diagrams that have an
/// AI2D-RST file are loaded and their three graphs are attached.
pub(crate) fn read_ai2d(root: &Path, rst: bool) -> Result<(Vec<Parsed>, Vec<Diagnostic>)> {
    let categories = read_categories(root)?;
    let ann_dir = root.join(ANNOTATION_DIR);
    let mut annotations: BTreeMap<String, PathBuf> = BTreeMap::new();
    for path in list_json(&ann_dir)? {
        annotations.insert(id_of(&path), path);
    }

    let mut skipped = Vec::new();
    let jobs: Vec<(PathBuf, Option<PathBuf>)> = if rst {
        let mut jobs = Vec::new();
        for rst_path in list_json(&root.join(RST_DIR))? {
            let id = id_of(&rst_path);
            match annotations.get(&id) {
                Some(ann) => jobs.push((ann.clone(), Some(rst_path))),
                None => skipped.push(diag(
                    &rst_path,
                    "",
                    format!("no AI2D annotation for diagram {id}"),
                )),
            }
        }
        jobs
    } else {
        annotations.into_values().map(|p| (p, None)).collect()
    };

    let results: Vec<std::result::Result<Parsed, Diagnostic>> = jobs
        .par_iter()
        .map(|(ann, rst_path)| {
            let mut parsed = convert_annotation(root, ann, &categories)?;
            if let Some(rp) = rst_path {
                attach_rst(&mut parsed, rp)?;
            }
            Ok(parsed)
        })
        .collect();
    let mut parsed = Vec::new();
    for r in results {
        match r {
            Ok(p) => parsed.push(p),
            Err(d) => skipped.push(d),
        }
    }
    Ok((parsed, skipped))
}
