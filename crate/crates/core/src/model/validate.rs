use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;

use super::{
    CategorySchemes, Diagram, ElementKind, NodeId, Nuclearity, Region, RelationVocabulary,
};
use crate::geometry::{first_self_intersection, signed_area, DEGENERATE_AREA};
use crate::graph::{tree_check, TreeViolation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    /// Fatal: the diagram cannot enter analysis.
    Error,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    ImageSize,
    ElementId,
    KindPrefix,
    DuplicateElement,
    TextOnNonText,
    InvalidBBox,
    TooFewVertices,
    DegeneratePolygon,
    SelfIntersectingPolygon,
    NonFiniteCoordinate,
    NegativeCoordinate,
    OutOfBounds,
    DuplicateNode,
    UnresolvedNode,
    UndeclaredEndpoint,
    GroupInDpg,
    UnknownRelation,
    GroupingNotTree,
    GroupingNotAcyclic,
    GroupingLeaf,
    GroupingInternal,
    ElementNotGrouped,
    UnknownGroup,
    ConnectorNotArrow,
    RstNotTree,
    RstNodeId,
    RstRelationName,
    RstMissingNucleus,
    RstRoleOnNonRelation,
    RstMissingRole,
    MissingCategory,
    UnknownCategory,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub severity: Severity,
    pub rule: Rule,
    /// JSON pointer into the canonical document.
    pub path: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev} {}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.violations.iter().any(|v| v.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(|v| v.severity == Severity::Error)
    }

    pub fn with_rule(&self, rule: Rule) -> impl Iterator<Item = &Violation> {
        self.violations.iter().filter(move |v| v.rule == rule)
    }
}

#[derive(Debug, Clone, Default)]
pub struct ValidationOptions {
    pub vocabulary: RelationVocabulary,
    pub categories: CategorySchemes,
    /// Adds polygon self-intersection checks.
    pub strict: bool,
    /// Require arrowheads to be covered by the grouping layer too.
    pub include_arrowheads: bool,
}

struct Collector {
    out: Vec<Violation>,
}

impl Collector {
    fn push(&mut self, severity: Severity, rule: Rule, path: impl Into<String>, message: impl Into<String>) {
        self.out.push(Violation {
            severity,
            rule,
            path: path.into(),
            message: message.into(),
        });
    }

    fn error(&mut self, rule: Rule, path: impl Into<String>, message: impl Into<String>) {
        self.push(Severity::Error, rule, path, message);
    }

    fn warn(&mut self, rule: Rule, path: impl Into<String>, message: impl Into<String>) {
        self.push(Severity::Warning, rule, path, message);
    }
}

/// Checks every structural invariant of a diagram. Violations are data;
/// the report is empty iff the diagram is well formed.
pub fn validate(diagram: &Diagram, opts: &ValidationOptions) -> ValidationReport {
    let mut c = Collector { out: Vec::new() };
    let size = diagram.image_size;
    if size.width == 0 || size.height == 0 {
        c.error(Rule::ImageSize, "/size", format!("image size {}x{} must be positive", size.width, size.height));
    }

    let elements = check_elements(diagram, opts, &mut c);
    check_dpg(diagram, &elements, opts, &mut c);
    let groups = check_grouping(diagram, &elements, opts, &mut c);
    check_connectivity(diagram, &elements, &groups, &mut c);
    check_rst(diagram, &elements, &groups, &mut c);
    check_categories(diagram, opts, &mut c);

    ValidationReport { violations: c.out }
}

fn check_elements(
    diagram: &Diagram,
    opts: &ValidationOptions,
    c: &mut Collector,
) -> BTreeMap<String, ElementKind> {
    let mut seen = BTreeMap::new();
    let (w, h) = (diagram.image_size.width as f64, diagram.image_size.height as f64);
    for (i, el) in diagram.elements.iter().enumerate() {
        let path = format!("/elements/{i}");
        match NodeId::classify(&el.id) {
            Some(NodeId::Element(kind)) if kind == el.kind => {}
            Some(NodeId::Element(kind)) => c.error(
                Rule::KindPrefix,
                format!("{path}/id"),
                format!("element {} has prefix for {kind} but kind {}", el.id, el.kind),
            ),
            _ => c.error(
                Rule::ElementId,
                format!("{path}/id"),
                format!("element id `{}` does not match [TBAH]<digits>", el.id),
            ),
        }
        if seen.insert(el.id.clone(), el.kind).is_some() {
            c.error(Rule::DuplicateElement, format!("{path}/id"), format!("duplicate element id {}", el.id));
        }
        if el.text.is_some() && el.kind != ElementKind::Text {
            c.warn(Rule::TextOnNonText, format!("{path}/text"), format!("{} carries text but is a {}", el.id, el.kind));
        }
        check_region(&el.id, &el.region, &format!("{path}/region"), (w, h), opts.strict, c);
    }
    seen
}

fn check_region(id: &str, region: &Region, path: &str, (w, h): (f64, f64), strict: bool, c: &mut Collector) {
    if region.coordinates().any(|v| !v.is_finite()) {
        c.error(Rule::NonFiniteCoordinate, path, format!("{id} has non-finite coordinates"));
        return;
    }
    if region.coordinates().any(|v| v < 0.0) {
        c.error(Rule::NegativeCoordinate, path, format!("{id} has negative coordinates"));
    }
    match region {
        Region::BBox([x0, y0, x1, y1]) => {
            if !(x0 < x1 && y0 < y1) {
                c.error(Rule::InvalidBBox, path, format!("{id} bbox requires x0<x1 and y0<y1"));
            }
        }
        Region::Polygon(v) => {
            if v.len() < 3 {
                c.error(Rule::TooFewVertices, path, format!("{id} polygon has {} vertices", v.len()));
                return;
            }
            let verts = region.vertices();
            if signed_area(&verts).abs() < DEGENERATE_AREA {
                c.warn(Rule::DegeneratePolygon, path, format!("{id} polygon has zero area"));
            }
            if strict {
                if let Some((a, b)) = first_self_intersection(&verts) {
                    c.error(
                        Rule::SelfIntersectingPolygon,
                        path,
                        format!("{id} polygon edges {a} and {b} cross"),
                    );
                }
            }
        }
    }
    let (x0, y0, x1, y1) = region.bounds();
    if w > 0.0 && h > 0.0 && (x0 < 0.0 || y0 < 0.0 || x1 > w || y1 > h) {
        c.warn(Rule::OutOfBounds, path, format!("{id} extends outside the {w}x{h} image"));
    }
}

fn declared_nodes<'a>(
    nodes: impl Iterator<Item = &'a str>,
    path: &str,
    c: &mut Collector,
) -> BTreeSet<&'a str> {
    let mut set = BTreeSet::new();
    for (i, n) in nodes.enumerate() {
        if !set.insert(n) {
            c.error(Rule::DuplicateNode, format!("{path}/nodes/{i}"), format!("node {n} declared twice"));
        }
    }
    set
}

fn check_dpg(
    diagram: &Diagram,
    elements: &BTreeMap<String, ElementKind>,
    opts: &ValidationOptions,
    c: &mut Collector,
) {
    let dpg = &diagram.dpg;
    let nodes = declared_nodes(dpg.nodes.iter().map(String::as_str), "/dpg", c);
    for (i, n) in dpg.nodes.iter().enumerate() {
        let path = format!("/dpg/nodes/{i}");
        if NodeId::classify(n) == Some(NodeId::Group) {
            c.error(Rule::GroupInDpg, path, format!("group node {n} is not allowed in the parse graph"));
        } else if !elements.contains_key(n) {
            c.error(Rule::UnresolvedNode, path, format!("parse graph node {n} is not a diagram element"));
        }
    }
    for (i, e) in dpg.edges.iter().enumerate() {
        let path = format!("/dpg/edges/{i}");
        for end in std::iter::once(&e.src).chain([&e.dst]).chain(e.via.as_ref()) {
            if !nodes.contains(end.as_str()) {
                c.error(Rule::UndeclaredEndpoint, &path, format!("edge endpoint {end} is not a declared node"));
            }
        }
        if !opts.vocabulary.contains(&e.relation) {
            c.error(Rule::UnknownRelation, format!("{path}/relation"), format!("relation `{}` is not in the vocabulary", e.relation));
        }
    }
}

fn check_grouping<'a>(
    diagram: &'a Diagram,
    elements: &BTreeMap<String, ElementKind>,
    opts: &ValidationOptions,
    c: &mut Collector,
) -> BTreeSet<&'a str> {
    let Some(g) = &diagram.grouping else {
        return BTreeSet::new();
    };
    let nodes = declared_nodes(g.nodes.iter().map(String::as_str), "/grouping", c);
    let mut groups = BTreeSet::new();
    for (i, n) in g.nodes.iter().enumerate() {
        match NodeId::classify(n) {
            Some(NodeId::Group) => {
                groups.insert(n.as_str());
            }
            Some(NodeId::Element(_)) if elements.contains_key(n) => {}
            _ => c.error(
                Rule::UnresolvedNode,
                format!("/grouping/nodes/{i}"),
                format!("grouping node {n} is neither a group nor a diagram element"),
            ),
        }
    }

    for v in tree_check(g).violations {
        let (rule, message) = match &v {
            TreeViolation::Cycle(_) => (Rule::GroupingNotAcyclic, format!("grouping graph not acyclic: {v}")),
            TreeViolation::UnknownEndpoint { .. } => (Rule::UndeclaredEndpoint, v.to_string()),
            _ => (Rule::GroupingNotTree, format!("grouping graph is not a tree: {v}")),
        };
        c.error(rule, "/grouping", message);
    }

    let mut has_children = BTreeSet::new();
    for e in &g.edges {
        has_children.insert(e.parent.as_str());
    }
    for n in &nodes {
        let is_group = groups.contains(n);
        if is_group && !has_children.contains(n) {
            c.error(Rule::GroupingInternal, "/grouping", format!("group {n} has no children"));
        }
        if !is_group && has_children.contains(n) {
            c.error(Rule::GroupingLeaf, "/grouping", format!("element {n} has children; only groups may"));
        }
    }

    for (id, kind) in elements {
        if *kind == ElementKind::Arrowhead && !opts.include_arrowheads {
            continue;
        }
        if !nodes.contains(id.as_str()) {
            c.warn(Rule::ElementNotGrouped, "/grouping", format!("element {id} does not appear in the grouping graph"));
        }
    }
    groups
}

fn check_connectivity(
    diagram: &Diagram,
    elements: &BTreeMap<String, ElementKind>,
    groups: &BTreeSet<&str>,
    c: &mut Collector,
) {
    let Some(g) = &diagram.connectivity else {
        return;
    };
    let nodes = declared_nodes(g.nodes.iter().map(String::as_str), "/connectivity", c);
    for (i, n) in g.nodes.iter().enumerate() {
        let path = format!("/connectivity/nodes/{i}");
        match NodeId::classify(n) {
            Some(NodeId::Group) if groups.contains(n.as_str()) => {}
            Some(NodeId::Group) => c.error(Rule::UnknownGroup, path, format!("group {n} is not defined by the grouping graph")),
            Some(NodeId::Element(_)) if elements.contains_key(n) => {}
            _ => c.error(Rule::UnresolvedNode, path, format!("connectivity node {n} does not resolve")),
        }
    }
    for (i, e) in g.edges.iter().enumerate() {
        let path = format!("/connectivity/edges/{i}");
        for end in [&e.src, &e.dst] {
            if !nodes.contains(end.as_str()) {
                c.error(Rule::UndeclaredEndpoint, &path, format!("edge endpoint {end} is not a declared node"));
            }
        }
        if let Some(via) = &e.via {
            match elements.get(via) {
                Some(ElementKind::Arrow) => {}
                Some(kind) => c.warn(Rule::ConnectorNotArrow, format!("{path}/via"), format!("connector {via} is a {kind}")),
                None => c.error(Rule::UnresolvedNode, format!("{path}/via"), format!("connector {via} is not a diagram element")),
            }
        }
    }
}

fn check_rst(
    diagram: &Diagram,
    elements: &BTreeMap<String, ElementKind>,
    groups: &BTreeSet<&str>,
    c: &mut Collector,
) {
    let Some(g) = &diagram.rst else {
        return;
    };
    declared_nodes(g.nodes.iter().map(|n| n.id.as_str()), "/rst", c);
    let mut relation_nodes = BTreeSet::new();
    for (i, n) in g.nodes.iter().enumerate() {
        let path = format!("/rst/nodes/{i}");
        match (NodeId::classify(&n.id), n.relation.as_deref()) {
            (Some(NodeId::Relation), Some(name)) if !name.trim().is_empty() => {
                relation_nodes.insert(n.id.as_str());
            }
            (Some(NodeId::Relation), _) => {
                relation_nodes.insert(n.id.as_str());
                c.error(Rule::RstRelationName, path, format!("relation node {} has no relation name", n.id));
            }
            (_, Some(_)) => c.error(Rule::RstNodeId, path, format!("node {} carries a relation name but is not an R node", n.id)),
            (Some(NodeId::Group), None) if groups.contains(n.id.as_str()) => {}
            (Some(NodeId::Group), None) => c.error(Rule::UnknownGroup, path, format!("group {} is not defined by the grouping graph", n.id)),
            (Some(NodeId::Element(_)), None) if elements.contains_key(&n.id) => {}
            _ => c.error(Rule::UnresolvedNode, path, format!("discourse node {} does not resolve", n.id)),
        }
    }

    for v in tree_check(g).violations {
        let rule = match v {
            TreeViolation::UnknownEndpoint { .. } => Rule::UndeclaredEndpoint,
            _ => Rule::RstNotTree,
        };
        c.error(rule, "/rst", format!("discourse graph is not a tree: {v}"));
    }

    let mut nuclei: BTreeMap<&str, usize> = relation_nodes.iter().map(|r| (*r, 0)).collect();
    for (i, e) in g.edges.iter().enumerate() {
        let path = format!("/rst/edges/{i}");
        let from_relation = relation_nodes.contains(e.src.as_str());
        match (from_relation, e.role) {
            (true, Some(Nuclearity::Nucleus)) => *nuclei.get_mut(e.src.as_str()).unwrap() += 1,
            (true, Some(Nuclearity::Satellite)) => {}
            (true, None) => c.error(Rule::RstMissingRole, path, format!("edge {}->{} lacks a nucleus/satellite role", e.src, e.dst)),
            (false, Some(_)) => c.error(Rule::RstRoleOnNonRelation, path, format!("edge {}->{} carries a role but {} is not a relation node", e.src, e.dst, e.src)),
            (false, None) => {}
        }
    }
    for (r, n) in nuclei {
        if n == 0 {
            c.error(Rule::RstMissingNucleus, "/rst", format!("relation node without nucleus ({r})"));
        }
    }
}

fn check_categories(diagram: &Diagram, opts: &ValidationOptions, c: &mut Collector) {
    let cats = &diagram.categories;
    match &cats.semantic {
        None => c.warn(Rule::MissingCategory, "/categories/semantic", "diagram has no semantic category"),
        Some(s) if !opts.categories.is_semantic(s) => {
            c.error(Rule::UnknownCategory, "/categories/semantic", format!("unknown semantic category `{s}`"))
        }
        _ => {}
    }
    match &cats.structural {
        None => c.warn(Rule::MissingCategory, "/categories/structural", "diagram has no structural category"),
        Some(s) if !opts.categories.is_structural(s) => {
            c.error(Rule::UnknownCategory, "/categories/structural", format!("unknown structural category `{s}`"))
        }
        _ => {}
    }
}
