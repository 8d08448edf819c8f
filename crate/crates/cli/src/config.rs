//! Flag, environment, and file configuration, merged in that order of
//! precedence and validated before any computation starts.

use std::path::PathBuf;
use std::sync::Arc;

use clap::Args;
use serde::{Deserialize, Serialize};

use semibrick_core::{preset_quiver, Arrow, ExactStructure, Limits, Prime, Quiver};

use crate::CliError;

pub const CEILING_ENV: &str = "SEMIBRICK_LAB_CEILING";

#[derive(Args, Clone, Debug, Default)]
pub struct ConfigFlags {
    /// Named quiver: a1, a2, or a3
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,

    /// Vertex ids of a custom quiver
    #[arg(long, value_delimiter = ',', value_name = "ID,...")]
    pub vertices: Option<Vec<u32>>,

    /// Arrows of a custom quiver, each as id:source:target
    #[arg(long, value_delimiter = ',', value_name = "ID:SRC:TGT,...")]
    pub arrows: Option<Vec<String>>,

    /// Field characteristic, a prime
    #[arg(long)]
    pub p: Option<u32>,

    /// Per-vertex dimension bound
    #[arg(long, value_delimiter = ',', value_name = "N,...")]
    pub bound: Option<Vec<usize>>,

    /// Exact structure: standard or split
    #[arg(long)]
    pub structure: Option<String>,

    /// Cap on elements scanned per hom space
    #[arg(long)]
    pub ceiling: Option<u64>,

    /// Worker threads; defaults to all available
    #[arg(long)]
    pub workers: Option<usize>,

    /// Report destination: a path, or - for standard output
    #[arg(long)]
    pub out: Option<String>,

    /// JSON config file; explicit flags win on conflict
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
pub struct FiltArgs {
    #[command(flatten)]
    pub common: ConfigFlags,

    /// Generator classes by id
    #[arg(long, value_delimiter = ',', value_name = "ID,...")]
    pub gens: Option<Vec<usize>>,
}

#[derive(Args, Clone, Debug)]
pub struct WideArgs {
    #[command(flatten)]
    pub common: ConfigFlags,

    /// Candidate member classes by id
    #[arg(long, value_delimiter = ',', value_name = "ID,...")]
    pub members: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Deserialize)]
struct ArrowSpec {
    id: u32,
    source: u32,
    target: u32,
}

/// On-disk config. Every field optional; flags override.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    preset: Option<String>,
    vertices: Option<Vec<u32>>,
    arrows: Option<Vec<ArrowSpec>>,
    p: Option<u32>,
    bound: Option<Vec<usize>>,
    structure: Option<String>,
    ceiling: Option<u64>,
    workers: Option<usize>,
    out: Option<String>,
    gens: Option<Vec<usize>>,
    members: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ArrowEcho {
    pub id: u32,
    pub source: u32,
    pub target: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct QuiverEcho {
    pub vertices: Vec<u32>,
    pub arrows: Vec<ArrowEcho>,
}

/// The configuration a report echoes. Workers and output path are
/// execution details, deliberately excluded: reports must be byte-identical
/// across worker counts and destinations.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub quiver: Option<QuiverEcho>,
    pub p: Option<u32>,
    pub bound: Option<Vec<usize>>,
    pub structure: Option<String>,
    pub ceiling: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gens: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub members: Option<Vec<usize>>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub quiver: Arc<Quiver>,
    pub p: Prime,
    pub bound: Vec<usize>,
    pub structure: ExactStructure,
    pub limits: Limits,
    pub workers: Option<usize>,
    pub out: String,
    pub gens: Option<Vec<usize>>,
    pub members: Option<Vec<usize>>,
}

impl RunConfig {
    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            quiver: Some(QuiverEcho {
                vertices: self.quiver.vertices().to_vec(),
                arrows: self
                    .quiver
                    .arrows()
                    .iter()
                    .map(|a| ArrowEcho {
                        id: a.id,
                        source: a.source,
                        target: a.target,
                    })
                    .collect(),
            }),
            p: Some(self.p.get()),
            bound: Some(self.bound.clone()),
            structure: Some(structure_name(self.structure).into()),
            ceiling: Some(self.limits.enumeration_ceiling),
            gens: self.gens.clone(),
            members: self.members.clone(),
        }
    }
}

pub fn structure_name(s: ExactStructure) -> &'static str {
    match s {
        ExactStructure::Standard => "standard",
        ExactStructure::Split => "split",
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_structure(name: &str) -> Result<ExactStructure, CliError> {
    match name.to_ascii_lowercase().as_str() {
        "standard" => Ok(ExactStructure::Standard),
        "split" => Ok(ExactStructure::Split),
        other => Err(config_err(format!(
            "unknown structure {other:?}; expected standard or split"
        ))),
    }
}

fn parse_arrow(text: &str) -> Result<Arrow, CliError> {
    let parts: Vec<&str> = text.split(':').collect();
    let [id, source, target] = parts.as_slice() else {
        return Err(config_err(format!(
            "bad arrow {text:?}; expected id:source:target"
        )));
    };
    let num = |s: &str, what: &str| {
        s.parse::<u32>()
            .map_err(|_| config_err(format!("bad arrow {what} {s:?} in {text:?}")))
    };
    Ok(Arrow {
        id: num(id, "id")?,
        source: num(source, "source")?,
        target: num(target, "target")?,
    })
}

fn load_file(path: &PathBuf) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_err(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| config_err(format!("bad config {}: {e}", path.display())))
}

fn ceiling_from_env() -> Result<Option<u64>, CliError> {
    match std::env::var(CEILING_ENV) {
        Ok(v) => v
            .parse::<u64>()
            .map(Some)
            .map_err(|_| config_err(format!("{CEILING_ENV} must be an integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

/// Merges flags over the optional config file (ceiling additionally
/// consults the environment between the two) and validates everything.
/// `extra_gens`/`extra_members` come from command-specific flags.
pub fn resolve(
    flags: &ConfigFlags,
    extra_gens: Option<Vec<usize>>,
    extra_members: Option<Vec<usize>>,
) -> Result<RunConfig, CliError> {
    let file = match &flags.config {
        Some(path) => load_file(path)?,
        None => FileConfig::default(),
    };

    let preset = flags.preset.clone().or(file.preset);
    let vertices = flags.vertices.clone().or(file.vertices);
    let arrows: Option<Vec<Arrow>> = match (&flags.arrows, file.arrows) {
        (Some(list), _) => Some(list.iter().map(|t| parse_arrow(t)).collect::<Result<_, _>>()?),
        (None, Some(list)) => Some(
            list.into_iter()
                .map(|a| Arrow {
                    id: a.id,
                    source: a.source,
                    target: a.target,
                })
                .collect(),
        ),
        (None, None) => None,
    };

    let quiver = match (preset, vertices) {
        (Some(name), None) => {
            if arrows.is_some() {
                return Err(config_err("--arrows cannot accompany --preset"));
            }
            preset_quiver(&name)
                .ok_or_else(|| config_err(format!("unknown preset {name:?}; try a1, a2, or a3")))?
        }
        (None, Some(vs)) => {
            let arrows = arrows.unwrap_or_default();
            Arc::new(Quiver::new(vs, arrows).map_err(|e| config_err(e.to_string()))?)
        }
        (Some(_), Some(_)) => {
            return Err(config_err("give either --preset or --vertices, not both"));
        }
        (None, None) => {
            return Err(config_err(
                "no quiver: give --preset or --vertices/--arrows, or put one in --config",
            ));
        }
    };

    let p = Prime::new(flags.p.or(file.p).unwrap_or(2))
        .map_err(|e| config_err(e.to_string()))?;

    let nv = quiver.vertices().len();
    let bound = flags
        .bound
        .clone()
        .or(file.bound)
        .unwrap_or_else(|| vec![2; nv]);
    if bound.len() != nv {
        return Err(config_err(format!(
            "bound names {} vertices, quiver has {nv}",
            bound.len()
        )));
    }
    if bound.iter().any(|&b| b == 0) {
        return Err(config_err("dimension bound must be positive at every vertex"));
    }

    let structure = match flags.structure.clone().or(file.structure) {
        Some(name) => parse_structure(&name)?,
        None => ExactStructure::Standard,
    };

    let mut limits = Limits::default();
    if let Some(c) = flags
        .ceiling
        .or(ceiling_from_env()?)
        .or(file.ceiling)
    {
        limits.enumeration_ceiling = c;
    }

    Ok(RunConfig {
        quiver,
        p,
        bound,
        structure,
        limits,
        workers: flags.workers.or(file.workers),
        out: flags.out.clone().or(file.out).unwrap_or_else(|| "-".into()),
        gens: extra_gens.or(file.gens),
        members: extra_members.or(file.members),
    })
}
