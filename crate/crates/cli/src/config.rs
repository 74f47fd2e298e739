use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;
use zext::enumeration::GENERATOR_CAP;
use zext::search::{Direction, SearchConfig};
use zext::Precision;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

/// Inclusive range of tree orders, written `A..B` or just `A`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NRange {
    pub lo: usize,
    pub hi: usize,
}

impl FromStr for NRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |x: &str| {
            x.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{x}` is not a vertex count"))
        };
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (num(a)?, num(b.trim_start_matches('='))?),
            None => {
                let n = num(s)?;
                (n, n)
            }
        };
        if lo > hi {
            return Err(format!("empty range {lo}..{hi}"));
        }
        Ok(NRange { lo, hi })
    }
}

impl fmt::Display for NRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// Settings read from `--config`. Every key is optional; flags win.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub workers: Option<usize>,
    pub precision_start: Option<u32>,
    pub precision_cap: Option<u32>,
    pub cache_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub n: Option<String>,
    pub index: Option<Vec<String>>,
    pub direction: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

/// Validated settings shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub workers: usize,
    pub precision: Precision,
    pub cache_dir: Option<PathBuf>,
    pub format: OutputFormat,
    pub n: Option<NRange>,
    pub index: Vec<String>,
    pub direction: Option<Direction>,
}

pub struct Overrides {
    pub workers: Option<usize>,
    pub precision_start: Option<u32>,
    pub precision_cap: Option<u32>,
    pub cache_dir: Option<PathBuf>,
    pub format: Option<OutputFormat>,
}

impl RunConfig {
    pub fn resolve(file: FileConfig, flags: Overrides) -> Result<Self, String> {
        let defaults = Precision::default();
        let workers = flags
            .workers
            .or(file.workers)
            .unwrap_or_else(|| SearchConfig::default().workers);
        let start = flags
            .precision_start
            .or(file.precision_start)
            .unwrap_or(defaults.start_bits);
        let cap = flags
            .precision_cap
            .or(file.precision_cap)
            .unwrap_or(defaults.cap_bits);
        if workers == 0 {
            return Err("worker count must be at least 1".into());
        }
        if start < 32 || start > cap {
            return Err(format!(
                "precision start {start} must be at least 32 and at most cap {cap}"
            ));
        }
        let n = file.n.as_deref().map(NRange::from_str).transpose()?;
        let direction = file
            .direction
            .as_deref()
            .map(|d| d.parse::<Direction>().map_err(|e| e.to_string()))
            .transpose()?;
        Ok(RunConfig {
            workers,
            precision: Precision {
                start_bits: start,
                cap_bits: cap,
            },
            cache_dir: flags.cache_dir.or(file.cache_dir),
            format: flags.format.or(file.format).unwrap_or_default(),
            n,
            index: file.index.unwrap_or_default(),
            direction,
        })
    }

    pub fn search(&self) -> SearchConfig {
        SearchConfig {
            workers: self.workers,
            precision: self.precision,
            cap: GENERATOR_CAP,
            ..SearchConfig::default()
        }
    }
}
