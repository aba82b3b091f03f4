//! `key = value` experiment files.
//!
//! ```text
//! # comments start with '#'
//! channel = bsc:0.02          # shorthand or a channel spec file
//! alist = ldpc60.alist
//! eps_grid = 0, 0.05, 0.1
//! trials = 200
//! seed = 7
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use crate::channel::MsbChannel;
use crate::error::{Error, Result};
use crate::linear_code::ParityCheckMatrix;
use crate::rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub channel: Option<String>,
    pub alist: Option<PathBuf>,
    pub eps_grid: Vec<f64>,
    pub eps: f64,
    pub alpha: Option<Rational>,
    pub trials: usize,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub sigma: Option<f64>,
    pub sigma2: Option<f64>,
    pub k: Option<usize>,
    base_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            channel: None,
            alist: None,
            eps_grid: vec![],
            eps: 0.0,
            alpha: None,
            trials: 1000,
            seed: 0,
            output: None,
            sigma: None,
            sigma2: None,
            k: None,
            base_dir: PathBuf::from("."),
        }
    }
}

fn bad(line: usize, msg: impl Into<String>) -> Error {
    Error::MalformedConfig { line, msg: msg.into() }
}

fn number<T: std::str::FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| bad(line, format!("bad value for {key}: {value:?}")))
}

impl ExperimentConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig { base_dir: base_dir.to_path_buf(), ..Default::default() };
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap().trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) =
                content.split_once('=').ok_or_else(|| bad(line, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "channel" => cfg.channel = Some(value.to_string()),
                "alist" => cfg.alist = Some(PathBuf::from(value)),
                "eps_grid" => {
                    cfg.eps_grid = value
                        .split(',')
                        .map(|v| number(line, key, v.trim()))
                        .collect::<Result<_>>()?;
                    if cfg.eps_grid.windows(2).any(|w| w[0].partial_cmp(&w[1]).is_none_or(|o| o.is_gt())) {
                        return Err(bad(line, "eps_grid must be sorted ascending"));
                    }
                }
                "eps" => cfg.eps = number(line, key, value)?,
                "alpha" => {
                    cfg.alpha = Some(parse_rational(value).map_err(|_| bad(line, "bad alpha"))?)
                }
                "trials" => {
                    cfg.trials = number(line, key, value)?;
                    if cfg.trials == 0 {
                        return Err(bad(line, "trials must be at least 1"));
                    }
                }
                "seed" => cfg.seed = number(line, key, value)?,
                "output" => cfg.output = Some(PathBuf::from(value)),
                "sigma" => cfg.sigma = Some(number(line, key, value)?),
                "sigma2" => cfg.sigma2 = Some(number(line, key, value)?),
                "k" => cfg.k = Some(number(line, key, value)?),
                _ => return Err(bad(line, format!("unknown key {key:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        ExperimentConfig::parse(&text, &dir)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    /// The `eps` grid, or `[eps]` when no grid was given.
    pub fn grid(&self) -> Vec<f64> {
        if self.eps_grid.is_empty() {
            vec![self.eps]
        } else {
            self.eps_grid.clone()
        }
    }

    pub fn load_channel(&self) -> Result<MsbChannel> {
        let spec = self.channel.as_deref().ok_or_else(|| missing("channel"))?;
        load_channel(spec, &self.base_dir)
    }

    pub fn load_code(&self) -> Result<ParityCheckMatrix> {
        let path = self.alist.as_deref().ok_or_else(|| missing("alist"))?;
        ParityCheckMatrix::from_alist(&std::fs::read_to_string(self.resolve(path))?)
    }

    pub fn output_path(&self) -> Option<PathBuf> {
        self.output.as_deref().map(|p| self.resolve(p))
    }
}

fn missing(key: &str) -> Error {
    Error::MalformedConfig { line: 0, msg: format!("missing key {key:?}") }
}

/// A shorthand (`bsc:0.1`, `qawgn:0.8:4:2`) or a channel spec file.
pub fn load_channel(spec: &str, base_dir: &Path) -> Result<MsbChannel> {
    if let Some(ch) = MsbChannel::from_shorthand(spec) {
        return ch;
    }
    let path = Path::new(spec);
    let path = if path.is_absolute() { path.to_path_buf() } else { base_dir.join(path) };
    MsbChannel::from_spec(&std::fs::read_to_string(path)?)
}
