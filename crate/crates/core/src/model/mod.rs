//! Domain types for annotated diagrams and their four graph layers.
//!
//! The serde derives here define the canonical interchange format written
//! by [`crate::corpus`]: one JSON object per diagram, regions encoded as
//! `{"bbox": [x0, y0, x1, y1]}` or `{"polygon": [[x, y], ...]}`.

mod validate;
mod vocab;

pub use validate::{validate, Rule, Severity, ValidationOptions, ValidationReport, Violation};
pub use vocab::{CategorySchemes, RelationVocabulary, MIXED};

use serde::{Deserialize, Serialize};

use crate::geometry::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Text,
    Arrow,
    Arrowhead,
    Blob,
}

impl ElementKind {
    pub const ALL: [ElementKind; 4] = [
        ElementKind::Text,
        ElementKind::Arrow,
        ElementKind::Arrowhead,
        ElementKind::Blob,
    ];

    /// Identifier prefix letter used by the AI2D layout segmentation.
    pub fn prefix(self) -> char {
        match self {
            ElementKind::Text => 'T',
            ElementKind::Arrow => 'A',
            ElementKind::Arrowhead => 'H',
            ElementKind::Blob => 'B',
        }
    }

    pub fn from_prefix(c: char) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.prefix() == c)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::Text => "text",
            ElementKind::Arrow => "arrow",
            ElementKind::Arrowhead => "arrowhead",
            ElementKind::Blob => "blob",
        }
    }
}

impl std::str::FromStr for ElementKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown element kind `{s}`"))
    }
}

impl std::fmt::Display for ElementKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Spatial extent of an element in pixel coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Region {
    #[serde(rename = "bbox")]
    BBox([f64; 4]),
    #[serde(rename = "polygon")]
    Polygon(Vec<[f64; 2]>),
}

impl Region {
    pub fn bbox(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Region::BBox([x0, y0, x1, y1])
    }

    pub fn polygon<P: Into<Point>>(vertices: impl IntoIterator<Item = P>) -> Self {
        Region::Polygon(
            vertices
                .into_iter()
                .map(|p| {
                    let p = p.into();
                    [p.x, p.y]
                })
                .collect(),
        )
    }

    /// Vertices as points; a bounding box yields its four corners.
    pub fn vertices(&self) -> Vec<Point> {
        match self {
            Region::BBox([x0, y0, x1, y1]) => vec![
                Point::new(*x0, *y0),
                Point::new(*x1, *y0),
                Point::new(*x1, *y1),
                Point::new(*x0, *y1),
            ],
            Region::Polygon(v) => v.iter().copied().map(Point::from).collect(),
        }
    }

    /// `(min_x, min_y, max_x, max_y)` over all coordinates.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        match self {
            Region::BBox([x0, y0, x1, y1]) => (*x0, *y0, *x1, *y1),
            Region::Polygon(v) => v.iter().fold(
                (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
                |(a, b, c, d), [x, y]| (a.min(*x), b.min(*y), c.max(*x), d.max(*y)),
            ),
        }
    }

    pub fn coordinates(&self) -> impl Iterator<Item = f64> + '_ {
        let slice: Box<dyn Iterator<Item = f64>> = match self {
            Region::BBox(c) => Box::new(c.iter().copied()),
            Region::Polygon(v) => Box::new(v.iter().flat_map(|p| p.iter().copied())),
        };
        slice
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramElement {
    pub id: String,
    pub kind: ElementKind,
    pub region: Region,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
}

impl DiagramElement {
    pub fn new(id: impl Into<String>, kind: ElementKind, region: Region) -> Self {
        Self {
            id: id.into(),
            kind,
            region,
            text: None,
        }
    }

    pub fn with_text(mut self, text: impl Into<String>) -> Self {
        self.text = Some(text.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpgEdge {
    pub src: String,
    pub dst: String,
    pub relation: String,
    /// Connector element (usually an arrow) carrying the relation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub via: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagramParseGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<DpgEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupEdge {
    pub parent: String,
    pub child: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GroupingGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<GroupEdge>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityEdge {
    pub src: String,
    pub dst: String,
    /// Arrows yield directed edges, plain lines undirected ones.
    pub directed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub via: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConnectivityGraph {
    pub nodes: Vec<String>,
    pub edges: Vec<ConnectivityEdge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Nuclearity {
    Nucleus,
    Satellite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RstNode {
    pub id: String,
    /// Relation name; present exactly on `R` nodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relation: Option<String>,
}

impl RstNode {
    pub fn unit(id: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            relation: None,
        }
    }

    pub fn relation(id: impl Into<String>, name: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            relation: Some(name.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RstEdge {
    pub src: String,
    pub dst: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Nuclearity>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RstGraph {
    pub nodes: Vec<RstNode>,
    pub edges: Vec<RstEdge>,
}

impl RstGraph {
    /// Relation nodes with their names, in declaration order.
    pub fn relations(&self) -> impl Iterator<Item = (&str, &str)> {
        self.nodes
            .iter()
            .filter_map(|n| n.relation.as_deref().map(|r| (n.id.as_str(), r)))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CategoryLabels {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub semantic: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub structural: Option<String>,
}

impl CategoryLabels {
    pub fn new(semantic: impl Into<String>, structural: impl Into<String>) -> Self {
        Self {
            semantic: Some(semantic.into()),
            structural: Some(structural.into()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "[u32; 2]", into = "[u32; 2]")]
pub struct ImageSize {
    pub width: u32,
    pub height: u32,
}

impl From<[u32; 2]> for ImageSize {
    fn from([width, height]: [u32; 2]) -> Self {
        Self { width, height }
    }
}

impl From<ImageSize> for [u32; 2] {
    fn from(s: ImageSize) -> Self {
        [s.width, s.height]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagram {
    pub id: String,
    /// Image file relative to the corpus root.
    #[serde(rename = "image")]
    pub image_path: Option<String>,
    #[serde(rename = "size")]
    pub image_size: ImageSize,
    pub elements: Vec<DiagramElement>,
    #[serde(default)]
    pub dpg: DiagramParseGraph,
    #[serde(default)]
    pub grouping: Option<GroupingGraph>,
    #[serde(default)]
    pub connectivity: Option<ConnectivityGraph>,
    #[serde(default)]
    pub rst: Option<RstGraph>,
    #[serde(default)]
    pub categories: CategoryLabels,
}

impl Diagram {
    pub fn element(&self, id: &str) -> Option<&DiagramElement> {
        self.elements.iter().find(|e| e.id == id)
    }

    pub fn elements_of(&self, kind: ElementKind) -> impl Iterator<Item = &DiagramElement> {
        self.elements.iter().filter(move |e| e.kind == kind)
    }
}

/// Classification of a graph node identifier by its prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeId {
    Element(ElementKind),
    Group,
    Relation,
}

impl NodeId {
    /// Parses `[TBAH]\d+`, `G\d+` or `R\d+`.
    pub fn classify(id: &str) -> Option<NodeId> {
        let mut chars = id.chars();
        let head = chars.next()?;
        let rest = chars.as_str();
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        match head {
            'G' => Some(NodeId::Group),
            'R' => Some(NodeId::Relation),
            c => ElementKind::from_prefix(c).map(NodeId::Element),
        }
    }
}
