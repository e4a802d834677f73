//! Experiment configuration: a TOML (or JSON) file, overridden by
//! `REFCLASS_*` environment variables and then by command-line flags.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classifier::{default_grid, Method};
use crate::error::{Error, Result};
use crate::synthgen::SynthParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridEntry {
    /// A method label such as `M3-AWC-0.8` or `ASJC-0.5`.
    Label(String),
    Method(Method),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    /// `"default"`, a grid file path, or comma-separated labels.
    Named(String),
    Entries(Vec<GridEntry>),
}

/// File form of the configuration. Relative paths are taken relative to the
/// file's directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Directory holding `papers.csv`, `journals.csv`, `edges.csv` and,
    /// unless `scheme` is set, `scheme.csv`.
    pub corpus: Option<PathBuf>,
    pub papers: Option<PathBuf>,
    pub journals: Option<PathBuf>,
    pub edges: Option<PathBuf>,
    pub scheme: Option<PathBuf>,
    pub gold: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub grid: Option<GridSpec>,
    pub synth: SynthParams,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: ExperimentConfig = if is_json(path) {
            serde_json::from_str(&raw)?
        } else {
            toml::from_str(&raw)
                .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut cfg.corpus,
            &mut cfg.papers,
            &mut cfg.journals,
            &mut cfg.edges,
            &mut cfg.scheme,
            &mut cfg.gold,
            &mut cfg.out,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if let Some(GridSpec::Named(name)) = &cfg.grid {
            let candidate = base.join(name);
            if name != "default" && candidate.is_file() {
                cfg.grid = Some(GridSpec::Named(candidate.to_string_lossy().into_owned()));
            }
        }
        Ok(cfg)
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridFile {
    grid: Vec<GridEntry>,
}

fn entries_to_methods(entries: &[GridEntry]) -> Result<Vec<Method>> {
    entries
        .iter()
        .map(|e| match e {
            GridEntry::Label(l) => Method::parse_label(l),
            GridEntry::Method(m) => m.validate().map(|_| m.clone()),
        })
        .collect()
}

/// Resolves a grid: `default`, a TOML/JSON file with a `grid` list, a text
/// file with one label per line, or comma-separated labels.
pub fn resolve_grid(spec: Option<&GridSpec>) -> Result<Vec<Method>> {
    let grid = match spec {
        None => default_grid(),
        Some(GridSpec::Entries(entries)) => entries_to_methods(entries)?,
        Some(GridSpec::Named(name)) if name == "default" => default_grid(),
        Some(GridSpec::Named(name)) => {
            let path = Path::new(name);
            if path.is_file() {
                let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
                if ext.eq_ignore_ascii_case("json") {
                    entries_to_methods(&serde_json::from_str::<GridFile>(&raw)?.grid)?
                } else if ext.eq_ignore_ascii_case("toml") {
                    let file: GridFile = toml::from_str(&raw)
                        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                    entries_to_methods(&file.grid)?
                } else {
                    raw.lines()
                        .map(str::trim)
                        .filter(|l| !l.is_empty() && !l.starts_with('#'))
                        .map(Method::parse_label)
                        .collect::<Result<_>>()?
                }
            } else {
                name.split(',')
                    .map(Method::parse_label)
                    .collect::<Result<_>>()?
            }
        }
    };
    if grid.is_empty() {
        return Err(Error::Config("grid is empty".into()));
    }
    let mut labels: Vec<String> = grid.iter().map(Method::label).collect();
    labels.sort();
    if let Some(w) = labels.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::Config(format!("grid lists `{}` twice", w[0])));
    }
    Ok(grid)
}
