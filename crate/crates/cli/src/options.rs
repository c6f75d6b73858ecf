//! Flag groups shared by the subcommands, and their JSON config mirror.
//!
//! A config file is a flat JSON object whose keys are the long flag names.
//! Flags given on the command line win over the file.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use diagscope::corpus::synth::SyntheticSpec;
use diagscope::corpus::{LoadOptions, Schema};
use diagscope::embedding::{EmbeddingConfig, Method};
use diagscope::features::FeatureOptions;
use diagscope::layout::{GroupBy, LayoutKind, LayoutOptions, DEFAULT_MIN_POINTS, DEFAULT_RESOLUTION};
use diagscope::model::{CategorySchemes, RelationVocabulary, ValidationOptions};
use diagscope::render::Palette;
use diagscope::{Error, Result};

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct InputOpts {
    /// Corpus directory
    #[arg(long = "in", value_name = "DIR")]
    #[serde(rename = "in")]
    pub input: Option<PathBuf>,
    /// Input layout: canonical, ai2d or ai2d-rst
    #[arg(long, value_name = "FORMAT")]
    pub schema: Option<String>,
    /// Also reject self-intersecting polygons
    #[arg(long)]
    pub strict: bool,
    /// Relation vocabulary file (JSON with a `relations` list)
    #[arg(long, value_name = "FILE")]
    pub vocabulary: Option<PathBuf>,
    /// Category schemes file (JSON with `semantic` and `structural` lists)
    #[arg(long, value_name = "FILE")]
    pub category_schemes: Option<PathBuf>,
}

impl InputOpts {
    pub fn input(&self) -> Result<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| Error::usage("missing --in DIR"))
    }

    pub fn schemes(&self) -> Result<CategorySchemes> {
        match &self.category_schemes {
            Some(p) => CategorySchemes::from_file(p),
            None => Ok(CategorySchemes::default()),
        }
    }

    pub fn load_options(&self, include_arrowheads: bool) -> Result<LoadOptions> {
        let schema = match &self.schema {
            Some(s) => s.parse::<Schema>()?,
            None => Schema::Canonical,
        };
        let vocabulary = match &self.vocabulary {
            Some(p) => RelationVocabulary::from_file(p)?,
            None => RelationVocabulary::default(),
        };
        Ok(LoadOptions {
            schema,
            validation: ValidationOptions {
                vocabulary,
                categories: self.schemes()?,
                strict: self.strict,
                include_arrowheads,
            },
            skip_invalid: true,
        })
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct OutputOpts {
    /// Output directory (created if missing)
    #[arg(long, value_name = "DIR")]
    pub out: Option<PathBuf>,
}

impl OutputOpts {
    pub fn out(&self) -> Result<&Path> {
        self.out.as_deref().ok_or_else(|| Error::usage("missing --out DIR"))
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct PlotOpts {
    /// Category scheme for grouping: semantic or structural
    #[arg(long, value_name = "SCHEME")]
    pub group_by: Option<String>,
    /// Colour ramp: viridis, magma, gray, blues, greens, reds
    #[arg(long, value_name = "NAME")]
    pub palette: Option<String>,
    /// Hexagons across the embedding's x range
    #[arg(long, value_name = "N")]
    pub gridsize: Option<usize>,
}

impl PlotOpts {
    pub fn group_by(&self) -> Result<GroupBy> {
        self.group_by.as_deref().map_or(Ok(GroupBy::Semantic), str::parse)
    }

    pub fn palette(&self) -> Result<Palette> {
        self.palette.as_deref().map_or(Ok(Palette::default()), Palette::named)
    }

    pub fn gridsize(&self) -> Result<usize> {
        match self.gridsize {
            Some(0) => Err(Error::usage("--gridsize must be positive")),
            Some(g) => Ok(g),
            None => Ok(diagscope::embedding::hexbin::DEFAULT_GRIDSIZE),
        }
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct LayoutOpts {
    /// Element kinds to profile, comma separated (text, arrow-line, blob, arrowhead)
    #[arg(long, value_name = "LIST")]
    pub kinds: Option<String>,
    /// Keep arrowheads in centroids and density grids
    #[arg(long)]
    pub include_arrowheads: bool,
    /// Restrict to these categories, comma separated
    #[arg(long, value_name = "LIST")]
    pub categories: Option<String>,
    /// Grid cells per axis
    #[arg(long, value_name = "N")]
    pub resolution: Option<usize>,
    /// Fixed kernel bandwidth in normalized units, `hx,hy`
    #[arg(long, value_name = "HX,HY")]
    pub bandwidth: Option<String>,
    /// Minimum centroids per category and kind
    #[arg(long, value_name = "N")]
    pub min_points: Option<usize>,
}

fn split_list(s: &str) -> impl Iterator<Item = &str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty())
}

impl LayoutOpts {
    pub fn options(&self, group_by: GroupBy) -> Result<LayoutOptions> {
        let mut kinds: BTreeSet<LayoutKind> = match &self.kinds {
            Some(list) => split_list(list).map(str::parse).collect::<Result<_>>()?,
            None => LayoutKind::DEFAULT.into_iter().collect(),
        };
        if kinds.is_empty() {
            return Err(Error::usage("--kinds selects no element kind"));
        }
        if self.include_arrowheads {
            kinds.insert(LayoutKind::Arrowhead);
        }
        let bandwidth = match &self.bandwidth {
            None => None,
            Some(s) => {
                let parts: Vec<f64> = split_list(s)
                    .map(|v| v.parse::<f64>().map_err(|_| Error::usage(format!("invalid bandwidth `{s}`"))))
                    .collect::<Result<_>>()?;
                match parts[..] {
                    [hx, hy] if hx > 0.0 && hy > 0.0 && hx.is_finite() && hy.is_finite() => Some((hx, hy)),
                    _ => return Err(Error::usage(format!("--bandwidth expects two positive numbers, got `{s}`"))),
                }
            }
        };
        let res = self.resolution.unwrap_or(DEFAULT_RESOLUTION.0);
        if res == 0 {
            return Err(Error::usage("--resolution must be positive"));
        }
        Ok(LayoutOptions {
            group_by,
            kinds,
            categories: self.categories.as_deref().map(|c| split_list(c).map(str::to_string).collect()),
            resolution: (res, res),
            bandwidth,
            min_points: self.min_points.unwrap_or(DEFAULT_MIN_POINTS),
        })
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct FeatureOpts {
    /// Sampling points on the texture circle
    #[arg(long, value_name = "P")]
    pub lbp_neighbors: Option<usize>,
    /// Radius of the texture circle in pixels
    #[arg(long, value_name = "R")]
    pub lbp_radius: Option<f64>,
    /// Use raw bounding-box crops instead of polygon masks
    #[arg(long)]
    pub no_mask: bool,
}

impl FeatureOpts {
    pub fn options(&self) -> Result<FeatureOptions> {
        let d = FeatureOptions::default();
        let opts = FeatureOptions {
            lbp_neighbors: self.lbp_neighbors.unwrap_or(d.lbp_neighbors),
            lbp_radius: self.lbp_radius.unwrap_or(d.lbp_radius),
            mask: !self.no_mask,
        };
        if opts.lbp_neighbors < 1 || opts.lbp_neighbors > 32 {
            return Err(Error::usage("--lbp-neighbors must be in 1..=32"));
        }
        if !(opts.lbp_radius > 0.0 && opts.lbp_radius.is_finite()) {
            return Err(Error::usage("--lbp-radius must be positive"));
        }
        Ok(opts)
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct EmbedOpts {
    /// Projection: umap or pca
    #[arg(long, value_name = "NAME")]
    pub method: Option<String>,
    /// Neighbourhood size of the UMAP graph (default 200)
    #[arg(long, value_name = "K")]
    pub n_neighbors: Option<usize>,
    /// Minimum spacing of embedded points (default 0.99)
    #[arg(long, value_name = "D")]
    pub min_dist: Option<f64>,
    /// Optimisation epochs (default 500)
    #[arg(long, value_name = "N")]
    pub n_epochs: Option<usize>,
    /// Negative samples per positive edge (default 5)
    #[arg(long, value_name = "N")]
    pub negative_sample_rate: Option<usize>,
    /// Initial SGD step size (default 1.0)
    #[arg(long, value_name = "RATE")]
    pub learning_rate: Option<f64>,
    /// Random seed for initialisation and sampling (default 42)
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
    /// Lock-free multi-threaded optimisation; output is then run-dependent
    #[arg(long)]
    pub parallel_sgd: bool,
}

impl EmbedOpts {
    pub fn config(&self) -> Result<EmbeddingConfig> {
        let d = EmbeddingConfig::default();
        Ok(EmbeddingConfig {
            method: self.method.as_deref().map_or(Ok(Method::Umap), str::parse)?,
            n_neighbors: self.n_neighbors.unwrap_or(d.n_neighbors),
            min_dist: self.min_dist.unwrap_or(d.min_dist),
            n_epochs: self.n_epochs.unwrap_or(d.n_epochs),
            negative_sample_rate: self.negative_sample_rate.unwrap_or(d.negative_sample_rate),
            learning_rate: self.learning_rate.unwrap_or(d.learning_rate),
            seed: self.seed.unwrap_or(d.seed),
            parallel_sgd: self.parallel_sgd,
            ..d
        })
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ScatterOpts {
    /// Scatter marks: labels, thumbnails or both
    #[arg(long, value_name = "MODE")]
    pub marks: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Marks {
    pub labels: bool,
    pub thumbnails: bool,
}

impl ScatterOpts {
    pub fn marks(&self) -> Result<Marks> {
        match self.marks.as_deref().unwrap_or("both") {
            "labels" => Ok(Marks { labels: true, thumbnails: false }),
            "thumbnails" => Ok(Marks { labels: false, thumbnails: true }),
            "both" => Ok(Marks { labels: true, thumbnails: true }),
            other => Err(Error::usage(format!("unknown marks `{other}` (labels, thumbnails or both)"))),
        }
    }
}

#[derive(Args, Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct SynthOpts {
    /// Random seed (default 1)
    #[arg(long, value_name = "SEED")]
    pub seed: Option<u64>,
    /// Number of diagrams (default 20)
    #[arg(long, value_name = "N")]
    pub n: Option<usize>,
    /// Structural category proportions, e.g. `cycle=0.5,network=0.5`
    #[arg(long, value_name = "LIST")]
    pub mix: Option<String>,
    /// Elements per diagram, `min,max`
    #[arg(long, value_name = "MIN,MAX")]
    pub elements: Option<String>,
}

impl SynthOpts {
    pub fn spec(&self) -> Result<SyntheticSpec> {
        let mut spec = SyntheticSpec::default();
        if let Some(s) = self.seed {
            spec.seed = s;
        }
        if let Some(n) = self.n {
            spec.n_diagrams = n;
        }
        if let Some(mix) = &self.mix {
            spec.category_mix = split_list(mix)
                .map(|kv| {
                    let (k, v) = kv
                        .split_once('=')
                        .ok_or_else(|| Error::usage(format!("mix entry `{kv}` is not name=proportion")))?;
                    let v: f64 = v.trim().parse().map_err(|_| Error::usage(format!("invalid proportion in `{kv}`")))?;
                    Ok((k.trim().to_string(), v))
                })
                .collect::<Result<_>>()?;
        }
        if let Some(e) = &self.elements {
            let parts: Vec<usize> = split_list(e)
                .map(|v| v.parse().map_err(|_| Error::usage(format!("invalid element range `{e}`"))))
                .collect::<Result<_>>()?;
            spec.elements_per_diagram = match parts[..] {
                [lo, hi] => (lo, hi),
                _ => return Err(Error::usage(format!("--elements expects `min,max`, got `{e}`"))),
            };
        }
        spec.check()?;
        Ok(spec)
    }
}

/// Reads a config file into a flat JSON object.
pub fn read_config(path: &Path) -> Result<Map<String, Value>> {
    let raw = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    match serde_json::from_slice::<Value>(&raw) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(Error::usage(format!("{}: config must be a JSON object", path.display()))),
        Err(e) => Err(Error::usage(format!("{}: {e}", path.display()))),
    }
}

/// Config values overlaid with every flag that was actually given.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, config: &Map<String, Value>) -> Result<T> {
    let Value::Object(given) = serde_json::to_value(flags).expect("options serialize") else {
        unreachable!("option groups serialize to objects")
    };
    let mut merged = config.clone();
    for (k, v) in given {
        if !(v.is_null() || v == Value::Bool(false)) {
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| Error::usage(format!("config: {e}")))
}

/// Keys a subcommand's option struct understands.
pub fn keys_of<T: Serialize + Default>() -> BTreeSet<String> {
    match serde_json::to_value(T::default()).expect("options serialize") {
        Value::Object(m) => m.into_iter().map(|(k, _)| k).collect(),
        _ => BTreeSet::new(),
    }
}
