//! Subcommand bodies. The pipeline reuses the individual steps.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use diagscope::corpus::synth::generate_synthetic;
use diagscope::corpus::{load_corpus, write_corpus, Corpus};
use diagscope::embedding::{embed, hexbin, Embedding, EmbeddingConfig, Method};
use diagscope::export::{self, to_file};
use diagscope::features::{extract_features, FeatureOptions};
use diagscope::graph::{category_crosstab, component_summaries, relation_histogram, RelationLayer, UNLABELED};
use diagscope::layout::{centroids, layout_profile, GroupBy, LayoutKind, LayoutOptions};
use diagscope::model::{validate, CategorySchemes, Violation};
use diagscope::render::{self, crop_rgb, render_density, render_hex_panel, render_scatter, Palette, Scene, ScatterMarks};
use diagscope::{Error, Result};

use crate::meta::RunMeta;
use crate::options::{
    EmbedOpts, FeatureOpts, InputOpts, LayoutOpts, Marks, OutputOpts, PlotOpts, ScatterOpts, SynthOpts,
};

/// How a successful command ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Clean,
    /// Outputs were written but some inputs were skipped or invalid.
    Skipped,
}

impl Status {
    fn from_skips(n: usize) -> Self {
        if n == 0 {
            Status::Clean
        } else {
            Status::Skipped
        }
    }
}

/// What every command needs besides its own options.
pub struct Context {
    pub command: String,
    pub command_line: Vec<String>,
    /// Effective options, recorded in `run.meta.json`.
    pub config: Value,
}

impl Context {
    fn meta(&self, out: &Path, inputs: &[&Path], seed: Option<u64>) -> Result<()> {
        RunMeta::new(&self.command, self.command_line.clone(), self.config.clone(), inputs, seed)?.write(out)
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct IngestArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct ValidateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputOpts,
    /// Write violations.csv here
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputOpts,
    /// Require arrowheads to be covered by the grouping layer
    #[arg(long)]
    #[serde(rename = "include-arrowheads")]
    pub include_arrowheads: bool,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct StatsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub plot: PlotOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub layout: LayoutOpts,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct FeaturesArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub features: FeatureOpts,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbedArgs {
    /// features.csv to project
    #[arg(long, value_name = "FILE")]
    pub features: Option<PathBuf>,
    /// Corpus for category labels; without it one hexbin covers every point
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub plot: PlotOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub embed: EmbedOpts,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderArgs {
    /// embedding.csv to plot
    #[arg(long, value_name = "FILE")]
    pub embedding: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub plot: PlotOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub scatter: ScatterOpts,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub synth: SynthOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub input: InputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: OutputOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub plot: PlotOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub layout: LayoutOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub features: FeatureOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub embed: EmbedOpts,
    #[command(flatten)]
    #[serde(flatten)]
    pub scatter: ScatterOpts,
}

/// File-name form of a category: lowercase, runs of other characters as `-`.
pub fn slug(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    let trimmed = out.trim_matches('-');
    if trimmed.is_empty() {
        "unnamed".into()
    } else {
        trimmed.to_string()
    }
}

fn absolute(p: &Path) -> Result<PathBuf> {
    let abs = std::path::absolute(p).map_err(|e| Error::io(p, e))?;
    // resolve the longest existing prefix so symlinks compare equal
    let mut existing = abs.as_path();
    let mut rest = Vec::new();
    while !existing.exists() {
        match (existing.parent(), existing.file_name()) {
            (Some(parent), Some(name)) => {
                rest.push(name.to_os_string());
                existing = parent;
            }
            _ => break,
        }
    }
    let mut resolved = existing.canonicalize().unwrap_or_else(|_| existing.to_path_buf());
    for part in rest.into_iter().rev() {
        resolved.push(part);
    }
    Ok(resolved)
}

/// Creates the output directory, refusing to write inside an input directory.
fn prepare_out(out: &Path, inputs: &[&Path]) -> Result<()> {
    let target = absolute(out)?;
    for input in inputs.iter().filter(|p| p.is_dir()) {
        let src = absolute(input)?;
        if target.starts_with(&src) {
            return Err(Error::usage(format!(
                "output directory {} lies inside input {}",
                out.display(),
                input.display()
            )));
        }
    }
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))
}

fn load(input: &InputOpts, include_arrowheads: bool) -> Result<Corpus> {
    let root = input.input()?;
    let corpus = load_corpus(root, &input.load_options(include_arrowheads)?)?;
    for w in &corpus.warnings {
        warn!("{w}");
    }
    for s in &corpus.skipped {
        warn!("skipped {s}");
    }
    info!("loaded {} diagram(s), skipped {}", corpus.diagrams.len(), corpus.skipped.len());
    Ok(corpus)
}

fn write_skipped(out: &Path, corpus: &Corpus) -> Result<()> {
    to_file(&out.join("skipped.csv"), |w| export::write_diagnostics(w, &corpus.skipped))
}

fn category_of<'a>(group_by: GroupBy, corpus: &'a Corpus, diagram_id: &str) -> &'a str {
    corpus
        .diagram(diagram_id)
        .and_then(|d| group_by.label(d))
        .unwrap_or(UNLABELED)
}

/// Writes each scene as SVG and PNG, one job per scene.
fn write_scenes(out: &Path, scenes: Vec<(String, Scene)>) -> Result<()> {
    scenes.par_iter().try_for_each(|(name, scene)| {
        render::write_svg(scene, &out.join(format!("{name}.svg")))?;
        render::write_png(scene, &out.join(format!("{name}.png")))
    })
}

pub fn synth(args: &SynthArgs, ctx: &Context) -> Result<Status> {
    let out = args.output.out()?;
    let spec = args.synth.spec()?;
    let generated = generate_synthetic(&spec)?;
    prepare_out(out, &[])?;
    let written = write_corpus(&generated.corpus, out)?;
    ctx.meta(out, &[], Some(spec.seed))?;
    println!(
        "wrote {} synthetic diagram(s) with {} blob(s) to {}",
        generated.corpus.diagrams.len(),
        generated.truth.blob_count(),
        out.display()
    );
    info!("{} file(s) written", written.files.len());
    Ok(Status::Clean)
}

pub fn ingest(args: &IngestArgs, ctx: &Context) -> Result<Status> {
    let out = args.output.out()?;
    let input = args.input.input()?;
    let corpus = load(&args.input, false)?;
    prepare_out(out, &[input])?;
    let written = write_corpus(&corpus, out)?;
    for id in &written.missing_images {
        warn!("{id}: no image available; written without one");
    }
    write_skipped(out, &corpus)?;
    ctx.meta(out, &[input], None)?;
    println!(
        "ingested {} diagram(s), skipped {}",
        corpus.diagrams.len(),
        corpus.skipped.len()
    );
    Ok(Status::from_skips(corpus.skipped.len()))
}

fn violations(corpus: &Corpus, input: &InputOpts, include_arrowheads: bool) -> Result<Vec<(String, Violation)>> {
    let opts = input.load_options(include_arrowheads)?.validation;
    Ok(corpus
        .diagrams
        .iter()
        .flat_map(|d| validate(d, &opts).violations.into_iter().map(|v| (d.id.clone(), v)))
        .collect())
}

pub fn validate_cmd(args: &ValidateArgs, ctx: &Context) -> Result<Status> {
    let input = args.input.input()?;
    let mut opts = args.input.load_options(args.include_arrowheads)?;
    opts.skip_invalid = false;
    let corpus = load_corpus(input, &opts)?;
    let found = violations(&corpus, &args.input, args.include_arrowheads)?;
    for s in &corpus.skipped {
        eprintln!("unreadable {s}");
    }
    for (id, v) in &found {
        eprintln!("{id}: {v}");
    }
    let errors = found.iter().filter(|(_, v)| v.severity == diagscope::model::Severity::Error).count();
    let bad_diagrams = {
        let mut ids: Vec<&str> = found
            .iter()
            .filter(|(_, v)| v.severity == diagscope::model::Severity::Error)
            .map(|(id, _)| id.as_str())
            .collect();
        ids.dedup();
        ids.len()
    };
    if let Some(out) = &args.output.out {
        prepare_out(out, &[input])?;
        to_file(&out.join("violations.csv"), |w| export::write_violations(w, &found))?;
        write_skipped(out, &corpus)?;
        ctx.meta(out, &[input], None)?;
    }
    println!(
        "{} diagram(s): {} invalid, {} error(s), {} warning(s), {} unreadable file(s)",
        corpus.diagrams.len(),
        bad_diagrams,
        errors,
        found.len() - errors,
        corpus.skipped.len()
    );
    Ok(Status::from_skips(errors + corpus.skipped.len()))
}

fn stats_step(corpus: &Corpus, out: &Path) -> Result<()> {
    let components = component_summaries(&corpus.diagrams);
    to_file(&out.join("components.csv"), |w| export::write_components(w, &components))?;
    let dpg = relation_histogram(&corpus.diagrams, RelationLayer::Dpg);
    let rst = relation_histogram(&corpus.diagrams, RelationLayer::Rst);
    to_file(&out.join("relations.csv"), |w| {
        export::write_relations(w, &[(RelationLayer::Dpg.as_str(), &dpg), (RelationLayer::Rst.as_str(), &rst)])
    })?;
    let crosstab = category_crosstab(&corpus.diagrams);
    to_file(&out.join("crosstab.csv"), |w| export::write_crosstab(w, &crosstab))
}

pub fn stats(args: &StatsArgs, ctx: &Context) -> Result<Status> {
    let out = args.output.out()?;
    let input = args.input.input()?;
    let corpus = load(&args.input, false)?;
    prepare_out(out, &[input])?;
    stats_step(&corpus, out)?;
    write_skipped(out, &corpus)?;
    ctx.meta(out, &[input], None)?;
    println!("{} diagram(s) summarised", corpus.diagrams.len());
    Ok(Status::from_skips(corpus.skipped.len()))
}

fn layout_step(
    corpus: &Corpus,
    schemes: &CategorySchemes,
    opts: &LayoutOptions,
    palette: &Palette,
    out: &Path,
) -> Result<()> {
    let include_arrowheads = opts.kinds.contains(&LayoutKind::Arrowhead);
    let records = centroids(&corpus.diagrams, include_arrowheads);
    to_file(&out.join("centroids.csv"), |w| export::write_centroids(w, &records))?;
    let profile = layout_profile(&corpus.diagrams, schemes, opts)?;
    for s in &profile.sparse {
        warn!(
            "{} / {}: {} centroid(s), below the minimum of {}",
            s.category, s.kind, s.n_points, opts.min_points
        );
    }
    to_file(&out.join("sparse.csv"), |w| export::write_sparse(w, &profile.sparse))?;
    let mut scenes = Vec::new();
    for (category, grids) in &profile.grids {
        let base = format!("density_{}", slug(category));
        for (kind, grid) in grids {
            let name = format!("{base}_{kind}");
            to_file(&out.join(format!("{name}.csv")), |w| export::write_density(w, grid))?;
            scenes.push((name, render_density(&[(*kind, grid)], palette, &format!("{category}: {kind}"))?));
        }
        if grids.len() > 1 {
            let layers: Vec<(LayoutKind, &_)> = grids.iter().map(|(k, g)| (*k, g)).collect();
            scenes.push((format!("{base}_overlay"), render_density(&layers, palette, category)?));
        }
    }
    write_scenes(out, scenes)
}

pub fn layout(args: &LayoutArgs, ctx: &Context) -> Result<Status> {
    let out = args.output.out()?;
    let input = args.input.input()?;
    let opts = args.layout.options(args.plot.group_by()?)?;
    let palette = args.plot.palette()?;
    let schemes = args.input.schemes()?;
    let corpus = load(&args.input, false)?;
    prepare_out(out, &[input])?;
    layout_step(&corpus, &schemes, &opts, &palette, out)?;
    write_skipped(out, &corpus)?;
    ctx.meta(out, &[input], None)?;
    println!("layout profiles written to {}", out.display());
    Ok(Status::from_skips(corpus.skipped.len()))
}

fn features_step(corpus: &Corpus, opts: &FeatureOptions, out: &Path) -> Result<diagscope::features::FeatureTable> {
    let table = extract_features(corpus, opts)?;
    for s in &table.skipped {
        warn!("{} {}: {}", s.diagram_id, s.element_id, s.reason);
    }
    to_file(&out.join("features.csv"), |w| export::write_features(w, &table))?;
    to_file(&out.join("skipped_blobs.csv"), |w| export::write_skipped_blobs(w, &table.skipped))?;
    Ok(table)
}

pub fn features(args: &FeaturesArgs, ctx: &Context) -> Result<Status> {
    let out = args.output.out()?;
    let input = args.input.input()?;
    let opts = args.features.options()?;
    let corpus = load(&args.input, false)?;
    prepare_out(out, &[input])?;
    let table = features_step(&corpus, &opts, out)?;
    write_skipped(out, &corpus)?;
    ctx.meta(out, &[input], None)?;
    println!("{} blob(s) described, {} skipped", table.rows.len(), table.skipped.len());
    Ok(Status::from_skips(table.skipped.len() + corpus.skipped.len()))
}

/// Clamps the neighbourhood size to what the point count allows.
pub fn effective_config(mut config: EmbeddingConfig, n: usize) -> Result<EmbeddingConfig> {
    if config.method == Method::Umap {
        if n < 3 {
            return Err(Error::data(format!("{n} feature row(s); at least 3 are needed to embed")));
        }
        if config.n_neighbors >= n {
            warn!("n_neighbors {} exceeds the {n} points; using {}", config.n_neighbors, n - 1);
            config.n_neighbors = n - 1;
        }
    } else if n < 2 {
        return Err(Error::data(format!("{n} feature row(s); at least 2 are needed to embed")));
    }
    config.check(n)?;
    Ok(config)
}

#[derive(Serialize)]
struct EmbeddingMeta<'a> {
    config: &'a EmbeddingConfig,
    n_points: usize,
    dimensions: usize,
    input_hash: &'a str,
    init: Option<&'a str>,
    curve: Option<CurveParams>,
}

#[derive(Serialize)]
struct CurveParams {
    a: f64,
    b: f64,
}

fn embed_step(
    ids: &[(String, String)],
    matrix: &[Vec<f64>],
    config: &EmbeddingConfig,
    labels: &[String],
    gridsize: usize,
    out: &Path,
) -> Result<Embedding> {
    let config = effective_config(config.clone(), matrix.len())?;
    let embedding = embed(matrix, &config)?;
    to_file(&out.join("embedding.csv"), |w| export::write_embedding(w, ids, &embedding.points))?;
    let meta = EmbeddingMeta {
        config: &embedding.config,
        n_points: matrix.len(),
        dimensions: matrix.first().map_or(0, Vec::len),
        input_hash: &embedding.provenance,
        init: embedding.init.as_deref(),
        curve: embedding.curve.map(|(a, b)| CurveParams { a, b }),
    };
    let path = out.join("embedding.meta.json");
    let mut text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    for (category, selected) in selections(labels) {
        let summary = hexbin(&embedding.points, &selected, gridsize)?;
        to_file(&out.join(format!("hexbin_{}.csv", slug(&category))), |w| export::write_hexbin(w, &summary))?;
    }
    Ok(embedding)
}

/// Category → membership mask, categories in name order.
fn selections(labels: &[String]) -> BTreeMap<String, Vec<bool>> {
    let mut out: BTreeMap<String, Vec<bool>> = BTreeMap::new();
    for l in labels {
        out.entry(l.clone()).or_insert_with(|| labels.iter().map(|x| x == l).collect());
    }
    out
}

fn row_labels(ids: &[(String, String)], corpus: Option<&Corpus>, group_by: GroupBy) -> Vec<String> {
    ids.iter()
        .map(|(d, _)| match corpus {
            Some(c) => category_of(group_by, c, d).to_string(),
            None => "all".to_string(),
        })
        .collect()
}

pub fn embed_cmd(args: &EmbedArgs, ctx: &Context) -> Result<Status> {
    let out = args.output.out()?;
    let features = args.features.as_deref().ok_or_else(|| Error::usage("missing --features FILE"))?;
    let config = args.embed.config()?;
    let gridsize = args.plot.gridsize()?;
    let group_by = args.plot.group_by()?;
    let table = export::read_numeric_table(features)?;
    let corpus = match &args.input.input {
        Some(_) => Some(load(&args.input, false)?),
        None => None,
    };
    let labels = row_labels(&table.ids, corpus.as_ref(), group_by);
    let mut inputs = vec![features];
    if let Some(p) = &args.input.input {
        inputs.push(p);
    }
    prepare_out(out, &inputs)?;
    let embedding = embed_step(&table.ids, &table.rows, &config, &labels, gridsize, out)?;
    ctx.meta(out, &inputs, Some(embedding.config.seed))?;
    println!("{} point(s) embedded", embedding.points.len());
    Ok(Status::Clean)
}

fn thumbnails(ids: &[(String, String)], corpus: &Corpus) -> Vec<Option<render::Thumbnail>> {
    let mut out = Vec::with_capacity(ids.len());
    let mut current = None;
    for (diagram_id, element_id) in ids {
        if current.as_ref().is_none_or(|(id, _)| id != diagram_id) {
            let img = match corpus.load_image(diagram_id) {
                Ok(img) => img,
                Err(e) => {
                    warn!("{diagram_id}: {e}");
                    None
                }
            };
            current = Some((diagram_id.clone(), img));
        }
        let img = current.as_ref().and_then(|(_, img)| img.as_ref());
        let region = corpus
            .diagram(diagram_id)
            .and_then(|d| d.element(element_id))
            .map(|e| &e.region);
        out.push(match (img, region) {
            (Some(img), Some(region)) => crop_rgb(img, region),
            _ => None,
        });
    }
    out
}

fn render_step(
    ids: &[(String, String)],
    points: &[[f64; 2]],
    labels: &[String],
    corpus: Option<&Corpus>,
    marks: Marks,
    palette: &Palette,
    gridsize: usize,
    out: &Path,
) -> Result<()> {
    let mut scenes = Vec::new();
    if marks.labels {
        scenes.push((
            "scatter_labels".to_string(),
            render_scatter(points, ScatterMarks::Labels(labels), "embedding by category")?,
        ));
    }
    if marks.thumbnails {
        match corpus {
            Some(c) => {
                let thumbs = thumbnails(ids, c);
                scenes.push((
                    "scatter_thumbnails".to_string(),
                    render_scatter(points, ScatterMarks::Thumbnails(&thumbs), "embedding with blob thumbnails")?,
                ));
            }
            None => warn!("thumbnail scatter needs --in CORPUS; skipped"),
        }
    }
    for (category, selected) in selections(labels) {
        let summary = hexbin(points, &selected, gridsize)?;
        let (xs, ys): (Vec<f64>, Vec<f64>) = points
            .iter()
            .zip(&selected)
            .filter(|(_, s)| **s)
            .map(|(p, _)| (p[0], p[1]))
            .unzip();
        scenes.push((
            format!("hex_{}", slug(&category)),
            render_hex_panel(&summary, &xs, &ys, palette, &category)?,
        ));
    }
    write_scenes(out, scenes)
}

pub fn render_cmd(args: &RenderArgs, ctx: &Context) -> Result<Status> {
    let out = args.output.out()?;
    let path = args.embedding.as_deref().ok_or_else(|| Error::usage("missing --embedding FILE"))?;
    let marks = args.scatter.marks()?;
    let palette = args.plot.palette()?;
    let gridsize = args.plot.gridsize()?;
    let group_by = args.plot.group_by()?;
    let table = export::read_numeric_table(path)?;
    if table.columns != ["u1", "u2"] {
        return Err(Error::usage(format!("{} is not an embedding table (u1, u2)", path.display())));
    }
    let points: Vec<[f64; 2]> = table.rows.iter().map(|r| [r[0], r[1]]).collect();
    let corpus = match &args.input.input {
        Some(_) => Some(load(&args.input, false)?),
        None => None,
    };
    let labels = row_labels(&table.ids, corpus.as_ref(), group_by);
    let mut inputs = vec![path];
    if let Some(p) = &args.input.input {
        inputs.push(p);
    }
    prepare_out(out, &inputs)?;
    if points.is_empty() {
        return Err(Error::data(format!("{} has no rows", path.display())));
    }
    render_step(&table.ids, &points, &labels, corpus.as_ref(), marks, &palette, gridsize, out)?;
    ctx.meta(out, &inputs, None)?;
    println!("plots written to {}", out.display());
    Ok(Status::Clean)
}

pub fn pipeline(args: &PipelineArgs, ctx: &Context) -> Result<Status> {
    let out = args.output.out()?;
    let input = args.input.input()?;
    let group_by = args.plot.group_by()?;
    let layout_opts = args.layout.options(group_by)?;
    let feature_opts = args.features.options()?;
    let config = args.embed.config()?;
    let palette = args.plot.palette()?;
    let gridsize = args.plot.gridsize()?;
    let marks = args.scatter.marks()?;
    let schemes = args.input.schemes()?;

    let corpus = load(&args.input, args.layout.include_arrowheads)?;
    prepare_out(out, &[input])?;
    write_skipped(out, &corpus)?;
    let found = violations(&corpus, &args.input, args.layout.include_arrowheads)?;
    to_file(&out.join("violations.csv"), |w| export::write_violations(w, &found))?;
    stats_step(&corpus, out)?;
    layout_step(&corpus, &schemes, &layout_opts, &palette, out)?;
    let table = features_step(&corpus, &feature_opts, out)?;

    let ids: Vec<(String, String)> = table
        .rows
        .iter()
        .map(|r| (r.diagram_id.clone(), r.element_id.clone()))
        .collect();
    let labels = row_labels(&ids, Some(&corpus), group_by);
    let embedding = embed_step(&ids, &table.matrix(), &config, &labels, gridsize, out)?;
    render_step(&ids, &embedding.points, &labels, Some(&corpus), marks, &palette, gridsize, out)?;
    ctx.meta(out, &[input], Some(embedding.config.seed))?;
    println!(
        "pipeline: {} diagram(s), {} blob(s) embedded, {} diagram(s) and {} blob(s) skipped",
        corpus.diagrams.len(),
        embedding.points.len(),
        corpus.skipped.len(),
        table.skipped.len()
    );
    Ok(Status::from_skips(corpus.skipped.len() + table.skipped.len()))
}
