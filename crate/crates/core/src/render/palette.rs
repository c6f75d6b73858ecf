//! Colour ramps and categorical colours.

use crate::error::{Error, Result};
use crate::layout::LayoutKind;

pub type Rgb = [u8; 3];

const VIRIDIS: [Rgb; 10] = [
    [0x44, 0x01, 0x54],
    [0x48, 0x28, 0x78],
    [0x3e, 0x49, 0x89],
    [0x31, 0x68, 0x8e],
    [0x26, 0x82, 0x8e],
    [0x1f, 0x9e, 0x89],
    [0x35, 0xb7, 0x79],
    [0x6e, 0xce, 0x58],
    [0xb5, 0xde, 0x2b],
    [0xfd, 0xe7, 0x25],
];
const MAGMA: [Rgb; 9] = [
    [0x00, 0x00, 0x04],
    [0x1c, 0x10, 0x44],
    [0x4f, 0x12, 0x7b],
    [0x81, 0x25, 0x81],
    [0xb5, 0x36, 0x7a],
    [0xe5, 0x50, 0x64],
    [0xfb, 0x87, 0x61],
    [0xfe, 0xc2, 0x87],
    [0xfc, 0xfd, 0xbf],
];

/// Categorical colours for scatter labels.
pub const CATEGORICAL: [Rgb; 10] = [
    [0x1f, 0x77, 0xb4],
    [0xff, 0x7f, 0x0e],
    [0x2c, 0xa0, 0x2c],
    [0xd6, 0x27, 0x28],
    [0x94, 0x67, 0xbd],
    [0x8c, 0x56, 0x4b],
    [0xe3, 0x77, 0xc2],
    [0x7f, 0x7f, 0x7f],
    [0xbc, 0xbd, 0x22],
    [0x17, 0xbe, 0xcf],
];

/// Overlay colour per element kind: text blue, arrow/line green, blob red.
pub fn kind_color(kind: LayoutKind) -> Rgb {
    match kind {
        LayoutKind::Text => [0x1f, 0x4e, 0xd8],
        LayoutKind::ArrowLine => [0x1a, 0x9e, 0x3a],
        LayoutKind::Blob => [0xd7, 0x26, 0x26],
        LayoutKind::Arrowhead => [0x80, 0x80, 0x80],
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Palette {
    pub name: String,
    stops: Vec<Rgb>,
}

impl Palette {
    pub fn named(name: &str) -> Result<Self> {
        let stops: Vec<Rgb> = match name {
            "viridis" => VIRIDIS.to_vec(),
            "magma" => MAGMA.to_vec(),
            "gray" | "grey" => vec![[0, 0, 0], [255, 255, 255]],
            "blues" => vec![[255, 255, 255], kind_color(LayoutKind::Text)],
            "greens" => vec![[255, 255, 255], kind_color(LayoutKind::ArrowLine)],
            "reds" => vec![[255, 255, 255], kind_color(LayoutKind::Blob)],
            other => {
                return Err(Error::usage(format!(
                    "unknown palette `{other}` (viridis, magma, gray, blues, greens, reds)"
                )))
            }
        };
        Ok(Self {
            name: name.to_string(),
            stops,
        })
    }

    /// Linear interpolation along the ramp, `t` clamped to [0, 1].
    pub fn color(&self, t: f64) -> Rgb {
        let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
        let pos = t * (self.stops.len() - 1) as f64;
        let i = (pos.floor() as usize).min(self.stops.len() - 2);
        let f = pos - i as f64;
        let (a, b) = (self.stops[i], self.stops[i + 1]);
        std::array::from_fn(|c| (a[c] as f64 + f * (b[c] as f64 - a[c] as f64)).round() as u8)
    }
}

impl Default for Palette {
    fn default() -> Self {
        Self::named("viridis").expect("built-in palette")
    }
}

/// Relative luminance proxy used to check ramp monotonicity.
pub fn luminance(c: Rgb) -> f64 {
    0.2126 * c[0] as f64 + 0.7152 * c[1] as f64 + 0.0722 * c[2] as f64
}
