//! Corpus ingestion and emission.
//!
//! On-disk layout of a canonical corpus:
//!
//! ```text
//! <root>/corpus.json            manifest
//! <root>/annotations/<id>.json  one canonical document per diagram
//! <root>/images/<id>.png        optional raster
//! ```
//!
//! Upstream dataset layouts are translated by the adapters in [`ai2d`].

pub mod ai2d;
mod canonical;
pub mod raster;
pub mod synth;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use image::RgbImage;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate, Diagram, Severity, ValidationOptions};
pub use raster::RasterRecipe;

pub const SCHEMA_VERSION: &str = "1";
pub const MANIFEST_FILE: &str = "corpus.json";
pub const ANNOTATION_DIR: &str = "annotations";
pub const IMAGE_DIR: &str = "images";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    Canonical,
    Ai2d,
    Ai2dRst,
}

impl std::str::FromStr for Schema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(Schema::Canonical),
            "ai2d" => Ok(Schema::Ai2d),
            "ai2d-rst" => Ok(Schema::Ai2dRst),
            other => Err(Error::usage(format!(
                "unknown schema `{other}` (expected canonical, ai2d or ai2d-rst)"
            ))),
        }
    }
}

/// Where a diagram's raster comes from.
#[derive(Debug, Clone)]
pub enum ImageSource {
    File(PathBuf),
    Raster(Arc<RgbImage>),
    /// Rendered on demand; used by the synthetic generator.
    Procedural(Arc<RasterRecipe>),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceFiles {
    pub annotation: Option<PathBuf>,
    pub image: Option<PathBuf>,
}

/// A problem tied to an input file, reported with a JSON pointer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub file: PathBuf,
    pub pointer: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.pointer.is_empty() {
            write!(f, "{}: {}", self.file.display(), self.message)
        } else {
            write!(f, "{} {}: {}", self.file.display(), self.pointer, self.message)
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub schema_version: String,
    /// Sorted by id.
    pub diagrams: Vec<Diagram>,
    pub source_manifest: BTreeMap<String, SourceFiles>,
    pub images: BTreeMap<String, ImageSource>,
    /// Input files that could not enter the corpus.
    pub skipped: Vec<Diagnostic>,
    pub warnings: Vec<Diagnostic>,
}

impl Corpus {
    pub fn new(mut diagrams: Vec<Diagram>) -> Self {
        diagrams.sort_by(|a, b| a.id.cmp(&b.id));
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            diagrams,
            ..Default::default()
        }
    }

    pub fn len(&self) -> usize {
        self.diagrams.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diagrams.is_empty()
    }

    pub fn diagram(&self, id: &str) -> Option<&Diagram> {
        self.diagrams
            .binary_search_by(|d| d.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.diagrams[i])
    }

    pub fn has_image(&self, id: &str) -> bool {
        match self.images.get(id) {
            Some(ImageSource::File(p)) => p.is_file(),
            Some(_) => true,
            None => false,
        }
    }

    /// Decoded RGB raster for a diagram, or `None` for image-less diagrams.
    pub fn load_image(&self, id: &str) -> Result<Option<RgbImage>> {
        match self.images.get(id) {
            None => Ok(None),
            Some(ImageSource::Raster(img)) => Ok(Some((**img).clone())),
            Some(ImageSource::Procedural(recipe)) => Ok(Some(recipe.render())),
            Some(ImageSource::File(path)) if !path.is_file() => Ok(None),
            Some(ImageSource::File(path)) => decode_png(path).map(Some),
        }
    }
}

pub fn decode_png(path: &Path) -> Result<RgbImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if image::guess_format(&bytes).ok() != Some(image::ImageFormat::Png) {
        return Err(Error::Image {
            path: path.to_path_buf(),
            message: "only PNG images are supported".into(),
        });
    }
    image::load_from_memory_with_format(&bytes, image::ImageFormat::Png)
        .map(|img| img.to_rgb8())
        .map_err(|e| Error::Image {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ManifestEntry {
    id: String,
    annotation: String,
    image: Option<String>,
    image_missing: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Manifest {
    schema_version: String,
    diagrams: Vec<ManifestEntry>,
}

#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub schema: Schema,
    pub validation: ValidationOptions,
    /// Skip diagrams whose validation report contains errors.
    pub skip_invalid: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            schema: Schema::Canonical,
            validation: ValidationOptions::default(),
            skip_invalid: true,
        }
    }
}

impl LoadOptions {
    pub fn with_schema(schema: Schema) -> Self {
        Self {
            schema,
            ..Self::default()
        }
    }
}

/// One parsed input file before corpus-level checks.
pub(crate) struct Parsed {
    pub diagram: Diagram,
    pub annotation: PathBuf,
    pub image: Option<PathBuf>,
    pub warnings: Vec<Diagnostic>,
}

pub fn load_corpus(root: &Path, opts: &LoadOptions) -> Result<Corpus> {
    let meta = fs::metadata(root).map_err(|e| Error::io(root, e))?;
    if !meta.is_dir() {
        return Err(Error::io(
            root,
            std::io::Error::new(std::io::ErrorKind::NotADirectory, "corpus root is not a directory"),
        ));
    }
    let (parsed, skipped, schema_version) = match opts.schema {
        Schema::Canonical => {
            let (p, s) = canonical::read_dir(root)?;
            let version = read_manifest_version(root)?;
            (p, s, version)
        }
        Schema::Ai2d => {
            let (p, s) = ai2d::read_ai2d(root, false)?;
            (p, s, SCHEMA_VERSION.to_string())
        }
        Schema::Ai2dRst => {
            let (p, s) = ai2d::read_ai2d(root, true)?;
            (p, s, SCHEMA_VERSION.to_string())
        }
    };
    Ok(assemble(parsed, skipped, schema_version, opts))
}

fn read_manifest_version(root: &Path) -> Result<String> {
    let path = root.join(MANIFEST_FILE);
    if !path.is_file() {
        return Ok(SCHEMA_VERSION.to_string());
    }
    let raw = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    let manifest: Manifest = serde_json::from_slice(&raw).map_err(|e| Error::Parse {
        offset: canonical::byte_offset(&raw, e.line(), e.column()),
        path: path.clone(),
        pointer: String::new(),
        message: e.to_string(),
    })?;
    Ok(manifest.schema_version)
}

fn assemble(
    mut parsed: Vec<Parsed>,
    mut skipped: Vec<Diagnostic>,
    schema_version: String,
    opts: &LoadOptions,
) -> Corpus {
    parsed.sort_by(|a, b| {
        (a.diagram.id.as_str(), &a.annotation).cmp(&(b.diagram.id.as_str(), &b.annotation))
    });
    let mut corpus = Corpus {
        schema_version,
        ..Default::default()
    };
    for p in parsed {
        if corpus.source_manifest.contains_key(&p.diagram.id) {
            skipped.push(Diagnostic {
                file: p.annotation,
                pointer: "/id".into(),
                message: format!("duplicate diagram id {}", p.diagram.id),
            });
            continue;
        }
        let report = validate(&p.diagram, &opts.validation);
        if opts.skip_invalid && report.has_errors() {
            let first = report.errors().next().expect("has errors");
            skipped.push(Diagnostic {
                file: p.annotation,
                pointer: first.path.clone(),
                message: format!(
                    "{} ({} validation error(s))",
                    first.message,
                    report.errors().count()
                ),
            });
            continue;
        }
        corpus.warnings.extend(p.warnings);
        for v in report.violations.iter().filter(|v| v.severity == Severity::Warning) {
            corpus.warnings.push(Diagnostic {
                file: p.annotation.clone(),
                pointer: v.path.clone(),
                message: v.message.clone(),
            });
        }
        if let Some(img) = &p.image {
            if !img.is_file() {
                corpus.warnings.push(Diagnostic {
                    file: p.annotation.clone(),
                    pointer: "/image".into(),
                    message: format!("image {} not found; diagram is image-less", img.display()),
                });
            }
            corpus
                .images
                .insert(p.diagram.id.clone(), ImageSource::File(img.clone()));
        }
        corpus.source_manifest.insert(
            p.diagram.id.clone(),
            SourceFiles {
                annotation: Some(p.annotation),
                image: p.image,
            },
        );
        corpus.diagrams.push(p.diagram);
    }
    skipped.sort_by(|a, b| a.file.cmp(&b.file));
    corpus.skipped = skipped;
    corpus
}

/// Paths written by [`write_corpus`], relative to the corpus root.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WrittenManifest {
    pub files: Vec<PathBuf>,
    /// Ids of diagrams written without an image.
    pub missing_images: Vec<String>,
}

fn check_id(id: &str) -> Result<()> {
    if id.is_empty()
        || id.starts_with('.')
        || id.chars().any(|c| matches!(c, '/' | '\\' | '\0'))
    {
        return Err(Error::usage(format!("diagram id `{id}` cannot be used as a file name")));
    }
    Ok(())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Canonical JSON text of one diagram (pretty-printed, LF terminated).
pub fn to_canonical_json(diagram: &Diagram) -> String {
    let mut s = serde_json::to_string_pretty(diagram).expect("diagram serializes");
    s.push('\n');
    s
}

pub fn write_corpus(corpus: &Corpus, root: &Path) -> Result<WrittenManifest> {
    fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let mut written = WrittenManifest::default();
    let mut entries = Vec::with_capacity(corpus.diagrams.len());
    let mut diagrams: Vec<&Diagram> = corpus.diagrams.iter().collect();
    diagrams.sort_by(|a, b| a.id.cmp(&b.id));

    for d in diagrams {
        check_id(&d.id)?;
        let ann_dir = root.join(ANNOTATION_DIR);
        fs::create_dir_all(&ann_dir).map_err(|e| Error::io(&ann_dir, e))?;

        let image_rel = format!("{IMAGE_DIR}/{}.png", d.id);
        let image_bytes = match corpus.images.get(&d.id) {
            Some(ImageSource::File(p)) if p.is_file() => {
                Some(fs::read(p).map_err(|e| Error::io(p, e))?)
            }
            Some(ImageSource::File(_)) | None => None,
            Some(ImageSource::Raster(img)) => Some(encode_png(img)?),
            Some(ImageSource::Procedural(recipe)) => Some(encode_png(&recipe.render())?),
        };

        let mut doc = d.clone();
        let image_missing = image_bytes.is_none();
        if let Some(bytes) = image_bytes {
            let img_dir = root.join(IMAGE_DIR);
            fs::create_dir_all(&img_dir).map_err(|e| Error::io(&img_dir, e))?;
            write_file(&root.join(&image_rel), &bytes)?;
            written.files.push(PathBuf::from(&image_rel));
            doc.image_path = Some(image_rel.clone());
        } else {
            written.missing_images.push(d.id.clone());
        }

        let ann_rel = format!("{ANNOTATION_DIR}/{}.json", d.id);
        write_file(&root.join(&ann_rel), to_canonical_json(&doc).as_bytes())?;
        written.files.push(PathBuf::from(&ann_rel));
        entries.push(ManifestEntry {
            id: d.id.clone(),
            annotation: ann_rel,
            image: doc.image_path.clone(),
            image_missing,
        });
    }

    let manifest = Manifest {
        schema_version: if corpus.schema_version.is_empty() {
            SCHEMA_VERSION.to_string()
        } else {
            corpus.schema_version.clone()
        },
        diagrams: entries,
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_file(&root.join(MANIFEST_FILE), text.as_bytes())?;
    written.files.push(PathBuf::from(MANIFEST_FILE));
    written.files.sort();
    Ok(written)
}

pub fn encode_png(img: &RgbImage) -> Result<Vec<u8>> {
    let mut buf = std::io::Cursor::new(Vec::new());
    img.write_to(&mut buf, image::ImageFormat::Png)
        .map_err(|e| Error::data(format!("png encoding failed: {e}")))?;
    Ok(buf.into_inner())
}
