//! Resolution-independent drawing list shared by the SVG writer and the
//! rasterizer.

use image::RgbaImage;

pub type Rgba = [u8; 4];

pub fn rgb(c: [u8; 3]) -> Rgba {
    [c[0], c[1], c[2], 255]
}

pub fn with_alpha(c: [u8; 3], alpha: f64) -> Rgba {
    [c[0], c[1], c[2], (alpha.clamp(0.0, 1.0) * 255.0).round() as u8]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Anchor {
    Start,
    Middle,
    End,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Item {
    Rect {
        x: f64,
        y: f64,
        w: f64,
        h: f64,
        fill: Rgba,
    },
    Polygon {
        points: Vec<[f64; 2]>,
        fill: Rgba,
        stroke: Option<(Rgba, f64)>,
    },
    Circle {
        cx: f64,
        cy: f64,
        r: f64,
        fill: Rgba,
    },
    Polyline {
        points: Vec<[f64; 2]>,
        stroke: Rgba,
        width: f64,
    },
    Text {
        x: f64,
        y: f64,
        size: f64,
        anchor: Anchor,
        content: String,
    },
    /// Raster drawn into the box with nearest-neighbour scaling.
    Image {
        x: f64,
        y: f64,
        w: f64,
        h: f64,
        pixels: RgbaImage,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub width: u32,
    pub height: u32,
    pub background: Rgba,
    pub items: Vec<Item>,
}

impl Scene {
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            background: [255, 255, 255, 255],
            items: Vec::new(),
        }
    }

    pub fn push(&mut self, item: Item) {
        self.items.push(item);
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: Anchor, content: impl Into<String>) {
        self.items.push(Item::Text {
            x,
            y,
            size,
            anchor,
            content: content.into(),
        });
    }

    pub fn count(&self, pred: impl Fn(&Item) -> bool) -> usize {
        self.items.iter().filter(|i| pred(i)).count()
    }
}

/// Fixed-width estimate of rendered text width.
pub fn text_width(content: &str, size: f64) -> f64 {
    content.chars().count() as f64 * size * 0.6
}
