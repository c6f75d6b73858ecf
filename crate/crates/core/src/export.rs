//! CSV tables. Every table has a header row and LF line endings.
//!
//! The readers accept what the writers produce.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use std::collections::BTreeMap;

use crate::corpus::Diagnostic;
use crate::embedding::HexSummary;
use crate::error::{Error, Result};
use crate::features::{FeatureTable, SkippedBlob};
use crate::graph::{ComponentSummary, Crosstab};
use crate::layout::{CentroidRecord, DensityGrid, SparseCell};
use crate::model::{Severity, Violation};

/// `printf("%.{digits}g")`.
pub fn format_sig(v: f64, digits: usize) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent format");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Shortest round-trip representation, in exponent form when very small or large.
pub fn format_exact(v: f64) -> String {
    let a = v.abs();
    if v != 0.0 && !(1e-5..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

fn finish<W: Write>(mut w: csv::Writer<W>) -> Result<()> {
    w.flush().map_err(|e| Error::data(format!("write failed: {e}")))
}

fn row<W: Write, I, T>(w: &mut csv::Writer<W>, fields: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: AsRef<[u8]>,
{
    w.write_record(fields).map_err(|e| Error::data(format!("write failed: {e}")))
}

/// Creates `path` and hands a buffered writer to `body`.
pub fn to_file(path: &Path, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out)?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_centroids<W: Write>(out: W, records: &[CentroidRecord]) -> Result<()> {
    let mut w = writer(out);
    row(&mut w, ["diagram_id", "element_id", "kind", "x", "y"])?;
    for r in records {
        row(
            &mut w,
            [
                r.diagram_id.clone(),
                r.element_id.clone(),
                r.kind.as_str().to_string(),
                format_exact(r.x),
                format_exact(r.y),
            ],
        )?;
    }
    finish(w)
}

/// One line per cell in row-major order; row 0 is the top of the image.
pub fn write_density<W: Write>(out: W, grid: &DensityGrid) -> Result<()> {
    let mut w = writer(out);
    row(&mut w, ["row", "col", "x", "y", "density"])?;
    for r in 0..grid.ny {
        for c in 0..grid.nx {
            let p = grid.cell_center(c, r);
            row(
                &mut w,
                [
                    r.to_string(),
                    c.to_string(),
                    format_exact(p.x),
                    format_exact(p.y),
                    format_exact(grid.get(c, r)),
                ],
            )?;
        }
    }
    finish(w)
}

/// Brightness columns `b00..`, texture columns `t00..`, nine significant digits.
pub fn write_features<W: Write>(out: W, table: &FeatureTable) -> Result<()> {
    let mut w = writer(out);
    let (nb, nt) = table
        .rows
        .first()
        .map(|r| (r.brightness.len(), r.texture.len()))
        .unwrap_or((64, 26));
    let mut header = vec!["diagram_id".to_string(), "element_id".to_string()];
    header.extend((0..nb).map(|i| format!("b{i:02}")));
    header.extend((0..nt).map(|i| format!("t{i:02}")));
    row(&mut w, &header)?;
    for r in &table.rows {
        let mut fields = vec![r.diagram_id.clone(), r.element_id.clone()];
        fields.extend(r.brightness.iter().chain(&r.texture).map(|v| format_sig(*v, 9)));
        row(&mut w, fields)?;
    }
    finish(w)
}

pub fn write_embedding<W: Write>(out: W, ids: &[(String, String)], points: &[[f64; 2]]) -> Result<()> {
    if ids.len() != points.len() {
        return Err(Error::usage(format!("{} ids but {} points", ids.len(), points.len())));
    }
    let mut w = writer(out);
    row(&mut w, ["diagram_id", "element_id", "u1", "u2"])?;
    for ((d, e), p) in ids.iter().zip(points) {
        row(&mut w, [d.clone(), e.clone(), format_exact(p[0]), format_exact(p[1])])?;
    }
    finish(w)
}

pub fn write_hexbin<W: Write>(out: W, summary: &HexSummary) -> Result<()> {
    let mut w = writer(out);
    row(&mut w, ["hex_q", "hex_r", "count"])?;
    for ((q, r), n) in &summary.counts {
        row(&mut w, [q.to_string(), r.to_string(), n.to_string()])?;
    }
    finish(w)
}

pub fn write_components<W: Write>(out: W, rows: &[ComponentSummary]) -> Result<()> {
    let mut w = writer(out);
    row(&mut w, ["diagram_id", "layer", "n_components", "n_isolates"])?;
    for r in rows {
        row(
            &mut w,
            [
                r.diagram_id.clone(),
                r.layer.to_string(),
                r.n_components.to_string(),
                r.n_isolates.to_string(),
            ],
        )?;
    }
    finish(w)
}

/// `(layer, histogram)` pairs as `layer, relation, count`.
pub fn write_relations<W: Write>(out: W, layers: &[(&str, &BTreeMap<String, usize>)]) -> Result<()> {
    let mut w = writer(out);
    row(&mut w, ["layer", "relation", "count"])?;
    for (layer, hist) in layers {
        for (name, n) in *hist {
            row(&mut w, [layer.to_string(), name.clone(), n.to_string()])?;
        }
    }
    finish(w)
}

/// Structural categories as rows, semantic as columns, plus totals.
pub fn write_crosstab<W: Write>(out: W, table: &Crosstab) -> Result<()> {
    let mut w = writer(out);
    let mut header = vec!["structural".to_string()];
    header.extend(table.cols.iter().cloned());
    header.push("total".into());
    row(&mut w, &header)?;
    for (i, name) in table.rows.iter().enumerate() {
        let mut fields = vec![name.clone()];
        fields.extend(table.counts[i].iter().map(|n| n.to_string()));
        fields.push(table.row_totals[i].to_string());
        row(&mut w, fields)?;
    }
    let mut totals = vec!["total".to_string()];
    totals.extend(table.col_totals.iter().map(|n| n.to_string()));
    totals.push(table.total.to_string());
    row(&mut w, totals)?;
    finish(w)
}

/// Input files that could not be loaded.
pub fn write_diagnostics<W: Write>(out: W, items: &[Diagnostic]) -> Result<()> {
    let mut w = writer(out);
    row(&mut w, ["file", "pointer", "message"])?;
    for d in items {
        row(&mut w, [d.file.to_string_lossy().replace('\\', "/"), d.pointer.clone(), d.message.clone()])?;
    }
    finish(w)
}

pub fn write_violations<W: Write>(out: W, items: &[(String, Violation)]) -> Result<()> {
    let mut w = writer(out);
    row(&mut w, ["diagram_id", "severity", "rule", "path", "message"])?;
    for (id, v) in items {
        let severity = match v.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        let rule = serde_json::to_value(v.rule).expect("rule serializes");
        row(
            &mut w,
            [id.as_str(), severity, rule.as_str().unwrap_or_default(), v.path.as_str(), v.message.as_str()],
        )?;
    }
    finish(w)
}

pub fn write_skipped_blobs<W: Write>(out: W, items: &[SkippedBlob]) -> Result<()> {
    let mut w = writer(out);
    row(&mut w, ["diagram_id", "element_id", "reason"])?;
    for s in items {
        row(&mut w, [s.diagram_id.as_str(), s.element_id.as_str(), s.reason.as_str()])?;
    }
    finish(w)
}

pub fn write_sparse<W: Write>(out: W, items: &[SparseCell]) -> Result<()> {
    let mut w = writer(out);
    row(&mut w, ["category", "kind", "n_points"])?;
    for s in items {
        row(&mut w, [s.category.clone(), s.kind.as_str().to_string(), s.n_points.to_string()])?;
    }
    finish(w)
}

/// Rows of `(diagram_id, element_id)` keys with their numeric columns.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct NumericTable {
    pub columns: Vec<String>,
    pub ids: Vec<(String, String)>,
    pub rows: Vec<Vec<f64>>,
}

/// Reads a table whose first two columns are `diagram_id, element_id` and
/// whose remaining columns are numbers.
pub fn read_numeric_table(path: &Path) -> Result<NumericTable> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().from_reader(std::io::BufReader::new(file));
    let bad = |line: u64, msg: String| Error::Parse {
        path: path.to_path_buf(),
        offset: 0,
        pointer: format!("line {line}"),
        message: msg,
    };
    let header = rdr.headers().map_err(|e| bad(1, e.to_string()))?.clone();
    if header.len() < 3 || &header[0] != "diagram_id" || &header[1] != "element_id" {
        return Err(bad(1, "expected columns diagram_id, element_id, then values".into()));
    }
    let mut table = NumericTable {
        columns: header.iter().skip(2).map(str::to_string).collect(),
        ..Default::default()
    };
    for (i, rec) in rdr.records().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| bad(line, e.to_string()))?;
        let values = rec
            .iter()
            .skip(2)
            .map(|v| v.parse::<f64>().map_err(|e| bad(line, format!("`{v}`: {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        table.ids.push((rec[0].to_string(), rec[1].to_string()));
        table.rows.push(values);
    }
    Ok(table)
}
