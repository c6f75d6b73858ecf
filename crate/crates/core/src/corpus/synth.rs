//! Deterministic synthetic corpora with known ground truth.
//!
//! Each structural category plants a layout signature: `cycle` places four
//! blobs at the top, right, bottom and left of the layout; `illustration`,
//! `cut-out` and `cross-section` place one large blob in the middle with
//! labels along the outer edges; `network` scatters labelled blobs linked by
//! arrows. Blob rasters are flat colour, banded colour or monochrome line
//! drawings depending on the category.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::raster::{DrawOp, RasterRecipe};
use super::{Corpus, ImageSource};
use crate::error::{Error, Result};
use crate::geometry::{polygon_centroid, Point};
use crate::model::{
    CategoryLabels, ConnectivityEdge, ConnectivityGraph, Diagram, DiagramElement,
    DiagramParseGraph, DpgEdge, ElementKind, GroupEdge, GroupingGraph, Nuclearity, Region,
    RstEdge, RstGraph, RstNode,
};

pub const ARROW_HEAD_TAIL: &str = "arrowHeadTail";
pub const INTER_OBJECT_LINKAGE: &str = "interObjectLinkage";
pub const INTRA_OBJECT_REGION_LABEL: &str = "intraObjectRegionLabel";

/// Normalized blob positions planted by the `cycle` layout (top, right, bottom, left).
pub const CYCLE_ANCHORS: [(f64, f64); 4] = [(0.5, 0.1), (0.9, 0.5), (0.5, 0.9), (0.1, 0.5)];
/// Maximum per-axis jitter around a planted position.
pub const ANCHOR_JITTER: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub n_diagrams: usize,
    /// Structural category → proportion of diagrams.
    pub category_mix: BTreeMap<String, f64>,
    /// Inclusive range of elements per diagram; layouts may exceed the
    /// upper bound when their fixed inventory is larger.
    pub elements_per_diagram: (usize, usize),
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        let mix = [
            ("cycle", 0.3),
            ("illustration", 0.3),
            ("cross-section", 0.2),
            ("cut-out", 0.2),
        ];
        Self {
            seed: 1,
            n_diagrams: 20,
            category_mix: mix.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            elements_per_diagram: (8, 16),
        }
    }
}

impl SyntheticSpec {
    pub fn single(category: &str, n: usize, seed: u64) -> Self {
        Self {
            seed,
            n_diagrams: n,
            category_mix: [(category.to_string(), 1.0)].into_iter().collect(),
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        if self.n_diagrams == 0 {
            return Err(Error::usage("synthetic corpus needs at least one diagram"));
        }
        if self.category_mix.is_empty() {
            return Err(Error::usage("category mix is empty"));
        }
        if let Some((k, v)) = self.category_mix.iter().find(|(_, v)| !(**v >= 0.0 && v.is_finite())) {
            return Err(Error::usage(format!("proportion for `{k}` is invalid: {v}")));
        }
        let total: f64 = self.category_mix.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::usage(format!("category proportions sum to {total}, expected 1")));
        }
        let (lo, hi) = self.elements_per_diagram;
        if lo == 0 || lo > hi {
            return Err(Error::usage(format!("invalid elements-per-diagram range {lo}..={hi}")));
        }
        Ok(())
    }

    /// Diagram count per category by largest remainder; ties go to the
    /// lexicographically smaller name.
    pub fn allocation(&self) -> BTreeMap<String, usize> {
        let n = self.n_diagrams as f64;
        let mut out: BTreeMap<String, usize> = BTreeMap::new();
        let mut rema: Vec<(f64, &String)> = Vec::new();
        let mut assigned = 0;
        for (k, p) in &self.category_mix {
            let exact = n * p;
            let base = exact.floor() as usize;
            out.insert(k.clone(), base);
            assigned += base;
            rema.push((exact - base as f64, k));
        }
        rema.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        for (_, k) in rema.into_iter().take(self.n_diagrams.saturating_sub(assigned)) {
            *out.get_mut(k).unwrap() += 1;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlobStyle {
    /// Single saturated colour.
    Flat,
    /// Horizontal colour bands.
    Strata,
    /// Black outline and hatching on white.
    LineDrawing,
}

/// Bookkeeping recorded while generating.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SyntheticTruth {
    pub dpg_relations: BTreeMap<String, usize>,
    pub rst_relations: BTreeMap<String, usize>,
    /// (structural, semantic) → diagram count.
    pub categories: BTreeMap<(String, String), usize>,
    /// (diagram id, element id) → raster style.
    pub blob_styles: BTreeMap<(String, String), BlobStyle>,
    /// (diagram id, element id) → planted normalized centroid.
    pub blob_centroids: BTreeMap<(String, String), Point>,
}

impl SyntheticTruth {
    pub fn blob_count(&self) -> usize {
        self.blob_styles.len()
    }
}

#[derive(Debug, Clone)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    pub truth: SyntheticTruth,
}

const FLAT_COLORS: [[u8; 3]; 6] = [
    [220, 60, 50],
    [60, 140, 220],
    [240, 180, 40],
    [80, 180, 90],
    [160, 90, 200],
    [250, 130, 60],
];
const EARTH_COLORS: [[u8; 3]; 5] = [
    [150, 110, 70],
    [200, 160, 100],
    [120, 90, 60],
    [230, 200, 140],
    [170, 60, 40],
];
const SEMANTIC_POOL: [&str; 10] = [
    "carbon cycle",
    "food webs",
    "human physiology",
    "life cycles",
    "moon phases",
    "parts of",
    "rock cycle",
    "rock strata",
    "volcano",
    "water cycle",
];

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticCorpus> {
    spec.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut truth = SyntheticTruth::default();
    let mut diagrams = Vec::with_capacity(spec.n_diagrams);
    let mut images = BTreeMap::new();
    let width = spec.n_diagrams.to_string().len().max(4);

    let mut index = 0;
    for (category, count) in spec.allocation() {
        for _ in 0..count {
            let id = format!("synth-{index:0width$}");
            index += 1;
            let (diagram, recipe, styles, planted) =
                generate_one(&id, &category, spec.elements_per_diagram, &mut rng);
            record_truth(&mut truth, &diagram, styles, planted);
            images.insert(id.clone(), ImageSource::Procedural(Arc::new(recipe)));
            diagrams.push(diagram);
        }
    }

    let mut corpus = Corpus::new(diagrams);
    corpus.images = images;
    Ok(SyntheticCorpus { corpus, truth })
}

fn record_truth(
    truth: &mut SyntheticTruth,
    d: &Diagram,
    styles: Vec<(String, BlobStyle)>,
    planted: Vec<(String, Point)>,
) {
    for e in &d.dpg.edges {
        *truth.dpg_relations.entry(e.relation.clone()).or_insert(0) += 1;
    }
    if let Some(rst) = &d.rst {
        for (_, name) in rst.relations() {
            *truth.rst_relations.entry(name.to_string()).or_insert(0) += 1;
        }
    }
    let key = (
        d.categories.structural.clone().unwrap_or_default(),
        d.categories.semantic.clone().unwrap_or_default(),
    );
    *truth.categories.entry(key).or_insert(0) += 1;
    for (el, style) in styles {
        truth.blob_styles.insert((d.id.clone(), el), style);
    }
    for (el, p) in planted {
        truth.blob_centroids.insert((d.id.clone(), el), p);
    }
}

struct Builder {
    w: f64,
    h: f64,
    elements: Vec<DiagramElement>,
    counters: [usize; 4],
    dpg: Vec<DpgEdge>,
    groups: usize,
    grouping: Vec<GroupEdge>,
    connectivity: Vec<ConnectivityEdge>,
    rst_nodes: Vec<RstNode>,
    rst_edges: Vec<RstEdge>,
    relations: usize,
    recipe: RasterRecipe,
    styles: Vec<(String, BlobStyle)>,
    planted: Vec<(String, Point)>,
}

fn kind_slot(kind: ElementKind) -> usize {
    match kind {
        ElementKind::Text => 0,
        ElementKind::Arrow => 1,
        ElementKind::Arrowhead => 2,
        ElementKind::Blob => 3,
    }
}

impl Builder {
    fn new(width: u32, height: u32) -> Self {
        Self {
            w: width as f64,
            h: height as f64,
            elements: Vec::new(),
            counters: [0; 4],
            dpg: Vec::new(),
            groups: 0,
            grouping: Vec::new(),
            connectivity: Vec::new(),
            rst_nodes: Vec::new(),
            rst_edges: Vec::new(),
            relations: 0,
            recipe: RasterRecipe::new(width, height),
            styles: Vec::new(),
            planted: Vec::new(),
        }
    }

    fn min_side(&self) -> f64 {
        self.w.min(self.h)
    }

    fn px(&self, x: f64, y: f64) -> Point {
        Point::new(x * self.w, y * self.h)
    }

    fn push(&mut self, kind: ElementKind, region: Region) -> String {
        let slot = kind_slot(kind);
        let id = format!("{}{}", kind.prefix(), self.counters[slot]);
        self.counters[slot] += 1;
        self.elements.push(DiagramElement::new(id.clone(), kind, region));
        id
    }

    fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(0.0, self.w), p.y.clamp(0.0, self.h))
    }

    /// Irregular blob whose area centroid sits exactly at `center` (normalized).
    fn blob(&mut self, center: Point, radius: f64, style: BlobStyle, rng: &mut ChaCha8Rng) -> String {
        let n = rng.random_range(7..=12);
        let phase = rng.random::<f64>() * std::f64::consts::TAU;
        let mut verts: Vec<Point> = (0..n)
            .map(|i| {
                let t = phase + std::f64::consts::TAU * (i as f64 + rng.random_range(-0.2..0.2)) / n as f64;
                let r = radius * rng.random_range(0.85..1.1);
                Point::new(r * t.cos(), r * t.sin())
            })
            .collect();
        let c = polygon_centroid(&verts).unwrap_or(Point::new(0.0, 0.0));
        let target = self.px(center.x, center.y);
        for v in &mut verts {
            *v = self.clamp(Point::new(v.x - c.x + target.x, v.y - c.y + target.y));
        }
        let id = self.push(ElementKind::Blob, Region::polygon(verts.iter().copied()));
        self.paint_blob(&verts, style, rng);
        self.styles.push((id.clone(), style));
        self.planted.push((id.clone(), center));
        id
    }

    fn paint_blob(&mut self, verts: &[Point], style: BlobStyle, rng: &mut ChaCha8Rng) {
        match style {
            BlobStyle::Flat => {
                let color = FLAT_COLORS[rng.random_range(0..FLAT_COLORS.len())];
                self.recipe.ops.push(DrawOp::Fill {
                    polygon: verts.to_vec(),
                    color,
                });
                let dark = color.map(|c| c / 2);
                self.recipe.ops.push(DrawOp::Stroke {
                    points: verts.to_vec(),
                    closed: true,
                    width: 1.5,
                    color: dark,
                });
            }
            BlobStyle::Strata => {
                let k = rng.random_range(3..=5);
                let start = rng.random_range(0..EARTH_COLORS.len());
                let colors = (0..k).map(|i| EARTH_COLORS[(start + i) % EARTH_COLORS.len()]).collect();
                self.recipe.ops.push(DrawOp::Bands {
                    polygon: verts.to_vec(),
                    colors,
                });
                self.recipe.ops.push(DrawOp::Stroke {
                    points: verts.to_vec(),
                    closed: true,
                    width: 1.5,
                    color: [60, 40, 20],
                });
            }
            BlobStyle::LineDrawing => {
                self.recipe.ops.push(DrawOp::Stroke {
                    points: verts.to_vec(),
                    closed: true,
                    width: 2.0,
                    color: [0, 0, 0],
                });
                let n = verts.len();
                for _ in 0..rng.random_range(3..=6) {
                    let a = verts[rng.random_range(0..n)];
                    let b = verts[rng.random_range(0..n)];
                    let c = polygon_centroid(verts).unwrap_or(a);
                    // chords pulled towards the centroid stay inside the outline
                    let pull = |p: Point| Point::new(c.x + 0.7 * (p.x - c.x), c.y + 0.7 * (p.y - c.y));
                    self.recipe.ops.push(DrawOp::Stroke {
                        points: vec![pull(a), pull(b)],
                        closed: false,
                        width: 1.5,
                        color: [0, 0, 0],
                    });
                }
            }
        }
    }

    /// Text block centred at a normalized position.
    fn text(&mut self, center: Point, rng: &mut ChaCha8Rng) -> String {
        let (tw, th) = (self.w * rng.random_range(0.1..0.18), self.h * rng.random_range(0.035..0.06));
        let c = self.px(center.x, center.y);
        let x0 = (c.x - tw / 2.0).clamp(0.0, self.w - tw);
        let y0 = (c.y - th / 2.0).clamp(0.0, self.h - th);
        let (x0, y0) = (x0.round(), y0.round());
        let (x1, y1) = ((x0 + tw).round().min(self.w), (y0 + th).round().min(self.h));
        let id = self.push(ElementKind::Text, Region::bbox(x0, y0, x1, y1));
        let n = self.counters[0];
        self.elements.last_mut().unwrap().text = Some(format!("label {n}"));
        let lines = ((y1 - y0) / 6.0).floor().max(1.0) as usize;
        for i in 0..lines {
            let y = y0 + 3.0 + 6.0 * i as f64;
            let len = (x1 - x0 - 4.0) * rng.random_range(0.6..1.0);
            self.recipe.ops.push(DrawOp::Stroke {
                points: vec![Point::new(x0 + 2.0, y), Point::new(x0 + 2.0 + len, y)],
                closed: false,
                width: 2.0,
                color: [40, 40, 40],
            });
        }
        id
    }

    /// Arrow (or plain line) from `from` to `to` in pixels; returns the
    /// arrow id and the head id when one is drawn.
    fn arrow(&mut self, from: Point, to: Point, head: bool) -> (String, Option<String>) {
        let (dx, dy) = (to.x - from.x, to.y - from.y);
        let len = (dx * dx + dy * dy).sqrt().max(1e-9);
        let (nx, ny) = (-dy / len * 1.5, dx / len * 1.5);
        let quad: Vec<Point> = [
            Point::new(from.x + nx, from.y + ny),
            Point::new(to.x + nx, to.y + ny),
            Point::new(to.x - nx, to.y - ny),
            Point::new(from.x - nx, from.y - ny),
        ]
        .into_iter()
        .map(|p| self.clamp(p))
        .collect();
        let arrow = self.push(ElementKind::Arrow, Region::polygon(quad.iter().copied()));
        self.recipe.ops.push(DrawOp::Fill {
            polygon: quad,
            color: [0, 0, 0],
        });
        let head_id = head.then(|| {
            let s = 5.0;
            let x0 = (to.x - s).clamp(0.0, self.w - 2.0 * s).round();
            let y0 = (to.y - s).clamp(0.0, self.h - 2.0 * s).round();
            let id = self.push(ElementKind::Arrowhead, Region::bbox(x0, y0, x0 + 2.0 * s, y0 + 2.0 * s));
            let (ux, uy) = (dx / len, dy / len);
            let tip = Point::new(x0 + s + ux * s, y0 + s + uy * s);
            let back = Point::new(x0 + s - ux * s, y0 + s - uy * s);
            self.recipe.ops.push(DrawOp::Fill {
                polygon: vec![
                    tip,
                    Point::new(back.x - uy * s, back.y + ux * s),
                    Point::new(back.x + uy * s, back.y - ux * s),
                ],
                color: [0, 0, 0],
            });
            id
        });
        (arrow, head_id)
    }

    fn dpg_edge(&mut self, src: &str, dst: &str, relation: &str, via: Option<&str>) {
        self.dpg.push(DpgEdge {
            src: src.into(),
            dst: dst.into(),
            relation: relation.into(),
            via: via.map(Into::into),
        });
    }

    fn group(&mut self, children: &[String]) -> String {
        self.groups += 1;
        let id = format!("G{}", self.groups);
        for c in children {
            self.grouping.push(GroupEdge {
                parent: id.clone(),
                child: c.clone(),
            });
        }
        id
    }

    fn relation(&mut self, name: &str, nuclei: &[String], satellites: &[String]) -> String {
        self.relations += 1;
        let id = format!("R{}", self.relations);
        self.rst_nodes.push(RstNode::relation(id.clone(), name));
        for (children, role) in [(nuclei, Nuclearity::Nucleus), (satellites, Nuclearity::Satellite)] {
            for c in children {
                if !c.starts_with('R') {
                    self.rst_nodes.push(RstNode::unit(c.clone()));
                }
                self.rst_edges.push(RstEdge {
                    src: id.clone(),
                    dst: c.clone(),
                    role: Some(role),
                });
            }
        }
        id
    }

    fn connect(&mut self, src: &str, dst: &str, directed: bool, via: &str) {
        self.connectivity.push(ConnectivityEdge {
            src: src.into(),
            dst: dst.into(),
            directed,
            via: Some(via.into()),
        });
    }
}

fn jitter(p: (f64, f64), amount: f64, rng: &mut ChaCha8Rng) -> Point {
    Point::new(
        p.0 + rng.random_range(-amount..=amount),
        p.1 + rng.random_range(-amount..=amount),
    )
}

fn toward(a: Point, b: Point, dist: f64) -> Point {
    let (dx, dy) = (b.x - a.x, b.y - a.y);
    let len = (dx * dx + dy * dy).sqrt().max(1e-9);
    Point::new(a.x + dx / len * dist, a.y + dy / len * dist)
}

fn semantic_for(structural: &str, rng: &mut ChaCha8Rng) -> String {
    let pool: &[&str] = match structural {
        "cycle" => &["life cycles", "moon phases", "rock cycle", "water cycle"],
        "illustration" | "cut-out" => &["parts of"],
        "cross-section" => &["rock strata", "volcano"],
        "network" => &["food webs"],
        _ => &SEMANTIC_POOL,
    };
    pool[rng.random_range(0..pool.len())].to_string()
}

fn style_for(structural: &str, rng: &mut ChaCha8Rng) -> BlobStyle {
    match structural {
        "cycle" | "cut-out" => BlobStyle::Flat,
        "cross-section" => BlobStyle::Strata,
        "illustration" | "network" => BlobStyle::LineDrawing,
        _ => [BlobStyle::Flat, BlobStyle::Strata, BlobStyle::LineDrawing][rng.random_range(0..3)],
    }
}

type Generated = (Diagram, RasterRecipe, Vec<(String, BlobStyle)>, Vec<(String, Point)>);

fn generate_one(
    id: &str,
    structural: &str,
    (lo, hi): (usize, usize),
    rng: &mut ChaCha8Rng,
) -> Generated {
    let width = rng.random_range(320..=480);
    let height = rng.random_range(260..=400);
    let semantic = semantic_for(structural, rng);
    let style = style_for(structural, rng);
    let mut b = Builder::new(width, height);

    let mut root_children: Vec<String> = Vec::new();
    match structural {
        "cycle" => {
            let r = 0.065 * b.min_side();
            let mut blobs = Vec::new();
            let mut labels = Vec::new();
            let mut centers = Vec::new();
            for anchor in CYCLE_ANCHORS {
                let c = jitter(anchor, ANCHOR_JITTER, rng);
                blobs.push(b.blob(c, r, style, rng));
                centers.push(b.px(c.x, c.y));
                let label_pos = Point::new(c.x + (0.5 - c.x) * 0.4, c.y + (0.5 - c.y) * 0.4);
                labels.push(b.text(label_pos, rng));
            }
            let mut groups = Vec::new();
            for i in 0..4 {
                b.dpg_edge(&labels[i], &blobs[i], INTRA_OBJECT_REGION_LABEL, None);
                groups.push(b.group(&[blobs[i].clone(), labels[i].clone()]));
            }
            let mut idents = Vec::new();
            for i in 0..4 {
                let j = (i + 1) % 4;
                let from = toward(centers[i], centers[j], r + 6.0);
                let to = toward(centers[j], centers[i], r + 6.0);
                let (a, h) = b.arrow(from, to, true);
                b.dpg_edge(&a, h.as_deref().unwrap(), ARROW_HEAD_TAIL, None);
                b.dpg_edge(&blobs[i], &blobs[j], INTER_OBJECT_LINKAGE, Some(&a));
                b.connect(&groups[i], &groups[j], true, &a);
                root_children.push(a);
            }
            for i in 0..4 {
                idents.push(b.relation("identification", &[blobs[i].clone()], &[labels[i].clone()]));
            }
            b.relation("cyclic sequence", &idents, &[]);
            root_children.splice(0..0, groups);
        }
        "illustration" | "cut-out" | "cross-section" => {
            let c = jitter((0.5, 0.5), 0.03, rng);
            let r = 0.2 * b.min_side();
            let blob = b.blob(c, r, style, rng);
            let center_px = b.px(c.x, c.y);
            let k = rng.random_range(2..=4);
            let mut members = vec![blob.clone()];
            let mut labels = Vec::new();
            for i in 0..k {
                let x = if i % 2 == 0 { rng.random_range(0.06..0.14) } else { rng.random_range(0.86..0.94) };
                let y = 0.2 + 0.6 * (i / 2) as f64 + rng.random_range(-0.05..0.05);
                let t = b.text(Point::new(x, y), rng);
                let tp = b.px(x, y);
                let from = toward(tp, center_px, b.w * 0.09);
                let to = toward(center_px, tp, r * 0.6);
                let (line, _) = b.arrow(from, to, false);
                b.dpg_edge(&t, &blob, INTRA_OBJECT_REGION_LABEL, Some(&line));
                b.connect(&t, &blob, false, &line);
                members.push(t.clone());
                members.push(line);
                labels.push(t);
            }
            root_children.push(b.group(&members));
            b.relation("elaboration", &[blob.clone()], &labels);
            if structural == "illustration" && rng.random_bool(0.3) {
                let side = if rng.random_bool(0.5) { 0.2 } else { 0.8 };
                let extra = b.blob(jitter((side, 0.85), 0.03, rng), 0.06 * b.min_side(), style, rng);
                root_children.push(extra);
            }
        }
        other => {
            let with_arrows = other == "network";
            let nb = rng.random_range(4..=6);
            let r = 0.06 * b.min_side();
            let mut centers: Vec<Point> = Vec::new();
            let mut attempts = 0;
            while centers.len() < nb && attempts < 500 {
                attempts += 1;
                let c = Point::new(rng.random_range(0.15..0.85), rng.random_range(0.15..0.75));
                if centers.iter().all(|o| ((o.x - c.x).powi(2) + (o.y - c.y).powi(2)).sqrt() > 0.22) {
                    centers.push(c);
                }
            }
            let mut blobs = Vec::new();
            let mut groups = Vec::new();
            let mut idents = Vec::new();
            for c in &centers {
                let blob = b.blob(*c, r, style, rng);
                let label = b.text(Point::new(c.x, c.y + 0.12), rng);
                b.dpg_edge(&label, &blob, INTRA_OBJECT_REGION_LABEL, None);
                groups.push(b.group(&[blob.clone(), label.clone()]));
                idents.push(b.relation("identification", &[blob.clone()], &[label]));
                blobs.push(blob);
            }
            if with_arrows {
                for i in 1..blobs.len() {
                    let j = rng.random_range(0..i);
                    let (pi, pj) = (b.px(centers[j].x, centers[j].y), b.px(centers[i].x, centers[i].y));
                    let (a, h) = b.arrow(toward(pi, pj, r + 5.0), toward(pj, pi, r + 5.0), true);
                    b.dpg_edge(&a, h.as_deref().unwrap(), ARROW_HEAD_TAIL, None);
                    b.dpg_edge(&blobs[j], &blobs[i], INTER_OBJECT_LINKAGE, Some(&a));
                    b.connect(&groups[j], &groups[i], true, &a);
                    root_children.push(a);
                }
            }
            b.relation("joint", &idents, &[]);
            root_children.splice(0..0, groups);
        }
    }

    let target = rng.random_range(lo..=hi);
    while b.elements.len() < target {
        let p = Point::new(rng.random_range(0.1..0.9), rng.random_range(0.05..0.95));
        root_children.push(b.text(p, rng));
    }

    let root = b.group(&root_children);
    let mut group_nodes: Vec<String> = (1..=b.groups).map(|g| format!("G{g}")).collect();
    group_nodes.sort();
    let mut grouping_nodes: Vec<String> = b
        .elements
        .iter()
        .filter(|e| e.kind != ElementKind::Arrowhead)
        .map(|e| e.id.clone())
        .collect();
    grouping_nodes.extend(group_nodes);
    debug_assert!(grouping_nodes.contains(&root));

    let mut conn_nodes: Vec<String> = b
        .connectivity
        .iter()
        .flat_map(|e| [e.src.clone(), e.dst.clone()])
        .collect();
    conn_nodes.sort();
    conn_nodes.dedup();

    let diagram = Diagram {
        id: id.to_string(),
        image_path: Some(format!("{}/{id}.png", super::IMAGE_DIR)),
        image_size: [width, height].into(),
        dpg: DiagramParseGraph {
            nodes: b.elements.iter().map(|e| e.id.clone()).collect(),
            edges: std::mem::take(&mut b.dpg),
        },
        grouping: Some(GroupingGraph {
            nodes: grouping_nodes,
            edges: std::mem::take(&mut b.grouping),
        }),
        connectivity: Some(ConnectivityGraph {
            nodes: conn_nodes,
            edges: std::mem::take(&mut b.connectivity),
        }),
        rst: Some(RstGraph {
            nodes: std::mem::take(&mut b.rst_nodes),
            edges: std::mem::take(&mut b.rst_edges),
        }),
        categories: CategoryLabels::new(semantic, structural),
        elements: std::mem::take(&mut b.elements),
    };
    (diagram, b.recipe, b.styles, b.planted)
}
