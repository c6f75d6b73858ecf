use std::fmt::Write;

use base64::Engine;

use super::scene::{Anchor, Item, Rgba, Scene};

fn num(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn color(c: Rgba) -> String {
    format!("#{:02x}{:02x}{:02x}", c[0], c[1], c[2])
}

fn paint(attr: &str, c: Rgba) -> String {
    if c[3] == 255 {
        format!(r#"{attr}="{}""#, color(c))
    } else {
        format!(r#"{attr}="{}" {attr}-opacity="{:.3}""#, color(c), c[3] as f64 / 255.0)
    }
}

pub(crate) fn encode_rgba(img: &image::RgbaImage) -> image::ImageResult<Vec<u8>> {
    let mut buf = std::io::Cursor::new(Vec::new());
    img.write_to(&mut buf, image::ImageFormat::Png)?;
    Ok(buf.into_inner())
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn points(pts: &[[f64; 2]]) -> String {
    pts.iter().map(|p| format!("{},{}", num(p[0]), num(p[1]))).collect::<Vec<_>>().join(" ")
}

/// SVG 1.1 document for a scene. Numbers carry at most two decimals.
pub fn to_svg(scene: &Scene) -> String {
    let mut out = String::new();
    let (w, h) = (scene.width, scene.height);
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" xmlns:xlink="http://www.w3.org/1999/xlink" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect x="0" y="0" width="{w}" height="{h}" {}/>"#, paint("fill", scene.background)).unwrap();
    for item in &scene.items {
        match item {
            Item::Rect { x, y, w, h, fill } => writeln!(
                out,
                r#"<rect x="{}" y="{}" width="{}" height="{}" {}/>"#,
                num(*x),
                num(*y),
                num(*w),
                num(*h),
                paint("fill", *fill)
            ),
            Item::Polygon { points: p, fill, stroke } => {
                let stroke = match stroke {
                    Some((c, width)) => format!(r#" {} stroke-width="{}""#, paint("stroke", *c), num(*width)),
                    None => String::new(),
                };
                writeln!(out, r#"<polygon points="{}" {}{stroke}/>"#, points(p), paint("fill", *fill))
            }
            Item::Circle { cx, cy, r, fill } => writeln!(
                out,
                r#"<circle cx="{}" cy="{}" r="{}" {}/>"#,
                num(*cx),
                num(*cy),
                num(*r),
                paint("fill", *fill)
            ),
            Item::Polyline { points: p, stroke, width } => writeln!(
                out,
                r#"<polyline points="{}" fill="none" {} stroke-width="{}"/>"#,
                points(p),
                paint("stroke", *stroke),
                num(*width)
            ),
            Item::Text { x, y, size, anchor, content } => {
                let anchor = match anchor {
                    Anchor::Start => "start",
                    Anchor::Middle => "middle",
                    Anchor::End => "end",
                };
                writeln!(
                    out,
                    r#"<text x="{}" y="{}" font-family="monospace" font-size="{}" text-anchor="{anchor}">{}</text>"#,
                    num(*x),
                    num(*y),
                    num(*size),
                    escape(content)
                )
            }
            Item::Image { x, y, w, h, pixels } => {
                let data = encode_rgba(pixels)
                    .map(|b| base64::engine::general_purpose::STANDARD.encode(b))
                    .unwrap_or_default();
                writeln!(
                    out,
                    r#"<image x="{}" y="{}" width="{}" height="{}" preserveAspectRatio="none" style="image-rendering:pixelated" xlink:href="data:image/png;base64,{data}"/>"#,
                    num(*x),
                    num(*y),
                    num(*w),
                    num(*h)
                )
            }
        }
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}
