//! Key-value campaign configuration.
//!
//! One `key = value` pair per line, `#` starts a comment. Ranges are written
//! `lo..hi` (inclusive) and lists are comma separated. Unknown keys are
//! rejected.
//!
//! ```text
//! seed_start = 0
//! instances = 1000
//! source = msp
//! stages = 4..12
//! max_width = 6
//! edge_density = 0.5
//! eset_density = 0.3, 0.5, 0.8
//! threads = 4
//! archive = findings
//! ```

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use super::generate::ShapeRange;
use super::LabError;
use crate::oracle::Budget;

#[derive(Clone, Debug, PartialEq)]
pub enum InstanceSource {
    /// Random labeled multistage graphs.
    Msp(ShapeRange),
    /// Reductions of random undirected graphs, pivot 1.
    Hamilton { min_n: u32, max_n: u32, edge_prob: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CampaignConfig {
    pub seed_start: u64,
    pub instances: u64,
    pub source: InstanceSource,
    pub oracle_nodes: u64,
    /// Wall-clock cap per oracle call. Makes verdicts machine dependent.
    pub oracle_millis: Option<u64>,
    pub max_sweeps: Option<usize>,
    pub threads: usize,
    /// Seeds handed to the worker pool at a time; also the checkpoint period.
    pub chunk: usize,
    pub archive: Option<PathBuf>,
    pub minimize_budget: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed_start: 0,
            instances: 1_000,
            source: InstanceSource::Msp(ShapeRange {
                min_stages: 4,
                max_stages: 12,
                max_width: 6,
                edge_density: 0.5,
                eset_densities: vec![0.3, 0.5, 0.8],
            }),
            oracle_nodes: Budget::DEFAULT_NODES,
            oracle_millis: None,
            max_sweeps: None,
            threads: 1,
            chunk: 256,
            archive: None,
            minimize_budget: 2_000,
        }
    }
}

fn err(line: usize, message: impl Into<String>) -> LabError {
    LabError::Config {
        line,
        message: message.into(),
    }
}

fn num<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T, LabError> {
    v.parse().map_err(|_| err(line, format!("{key}: cannot parse {v:?}")))
}

fn optional<T: FromStr>(line: usize, key: &str, v: &str) -> Result<Option<T>, LabError> {
    match v {
        "none" | "auto" => Ok(None),
        _ => num(line, key, v).map(Some),
    }
}

fn range<T: FromStr + PartialOrd + Copy>(line: usize, key: &str, v: &str) -> Result<(T, T), LabError> {
    let (lo, hi) = match v.split_once("..") {
        Some((lo, hi)) => (num(line, key, lo.trim())?, num(line, key, hi.trim())?),
        None => {
            let x = num(line, key, v)?;
            (x, x)
        }
    };
    if lo > hi {
        return Err(err(line, format!("{key}: empty range {v}")));
    }
    Ok((lo, hi))
}

fn probability(line: usize, key: &str, v: &str) -> Result<f64, LabError> {
    let p: f64 = num(line, key, v)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(err(line, format!("{key}: {p} outside [0, 1]")));
    }
    Ok(p)
}

fn show_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "none".to_string(), T::to_string)
}

impl CampaignConfig {
    pub fn parse(text: &str) -> Result<Self, LabError> {
        let mut cfg = CampaignConfig::default();
        let mut source = "msp".to_string();
        let mut shape = match &cfg.source {
            InstanceSource::Msp(s) => s.clone(),
            InstanceSource::Hamilton { .. } => unreachable!(),
        };
        let (mut ham_n, mut ham_q) = ((4u32, 7u32), 0.5f64);
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected key = value, got {content:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "seed_start" => cfg.seed_start = num(line, key, value)?,
                "instances" => cfg.instances = num(line, key, value)?,
                "source" => match value {
                    "msp" | "hamilton" => source = value.to_string(),
                    _ => return Err(err(line, format!("source must be msp or hamilton, got {value:?}"))),
                },
                "stages" => (shape.min_stages, shape.max_stages) = range(line, key, value)?,
                "max_width" => shape.max_width = num(line, key, value)?,
                "edge_density" => shape.edge_density = probability(line, key, value)?,
                "eset_density" => {
                    shape.eset_densities = value
                        .split(',')
                        .map(|p| probability(line, key, p.trim()))
                        .collect::<Result<_, _>>()?
                }
                "hamilton_n" => ham_n = range(line, key, value)?,
                "hamilton_q" => ham_q = probability(line, key, value)?,
                "oracle_nodes" => cfg.oracle_nodes = num(line, key, value)?,
                "oracle_millis" => cfg.oracle_millis = optional(line, key, value)?,
                "max_sweeps" => cfg.max_sweeps = optional(line, key, value)?,
                "threads" => cfg.threads = num(line, key, value)?,
                "chunk" => cfg.chunk = num(line, key, value)?,
                "archive" => cfg.archive = (value != "none").then(|| PathBuf::from(value)),
                "minimize_budget" => cfg.minimize_budget = num(line, key, value)?,
                _ => return Err(err(line, format!("unknown key {key:?}"))),
            }
        }
        cfg.source = if source == "msp" {
            if shape.min_stages == 0 || shape.max_width == 0 {
                return Err(err(0, "stages and max_width must be positive"));
            }
            InstanceSource::Msp(shape)
        } else {
            if ham_n.0 < 3 {
                return Err(err(0, "hamilton_n must be at least 3"));
            }
            InstanceSource::Hamilton {
                min_n: ham_n.0,
                max_n: ham_n.1,
                edge_prob: ham_q,
            }
        };
        if cfg.threads == 0 || cfg.chunk == 0 {
            return Err(err(0, "threads and chunk must be positive"));
        }
        Ok(cfg)
    }

    /// The keys that decide verdicts, in canonical form. Two campaigns with
    /// the same fingerprint produce the same verdicts seed by seed.
    pub fn fingerprint(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "seed_start = {}", self.seed_start);
        let _ = writeln!(out, "instances = {}", self.instances);
        match &self.source {
            InstanceSource::Msp(s) => {
                let ps: Vec<String> = s.eset_densities.iter().map(f64::to_string).collect();
                let _ = writeln!(out, "source = msp");
                let _ = writeln!(out, "stages = {}..{}", s.min_stages, s.max_stages);
                let _ = writeln!(out, "max_width = {}", s.max_width);
                let _ = writeln!(out, "edge_density = {}", s.edge_density);
                let _ = writeln!(out, "eset_density = {}", ps.join(", "));
            }
            InstanceSource::Hamilton { min_n, max_n, edge_prob } => {
                let _ = writeln!(out, "source = hamilton");
                let _ = writeln!(out, "hamilton_n = {min_n}..{max_n}");
                let _ = writeln!(out, "hamilton_q = {edge_prob}");
            }
        }
        let _ = writeln!(out, "oracle_nodes = {}", self.oracle_nodes);
        let _ = writeln!(out, "oracle_millis = {}", show_opt(&self.oracle_millis));
        let _ = writeln!(out, "max_sweeps = {}", show_opt(&self.max_sweeps));
        out
    }

    /// Every key in canonical form; parses back to an equal config.
    pub fn echo(&self) -> String {
        let mut out = self.fingerprint();
        let _ = writeln!(out, "threads = {}", self.threads);
        let _ = writeln!(out, "chunk = {}", self.chunk);
        let archive = self.archive.as_ref().map(|p| p.display().to_string());
        let _ = writeln!(out, "archive = {}", show_opt(&archive));
        let _ = writeln!(out, "minimize_budget = {}", self.minimize_budget);
        out
    }

    pub fn budget(&self) -> Budget {
        Budget {
            max_nodes: self.oracle_nodes,
            max_time: self.oracle_millis.map(std::time::Duration::from_millis),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn echo_round_trips() {
        let text = "# small\nsource = msp\nstages = 8..8 # fixed\nmax_width = 4\neset_density = 0.5\n\
                    instances = 1000\nthreads = 2\narchive = out/x\n";
        let cfg = CampaignConfig::parse(text).unwrap();
        assert_eq!(cfg.instances, 1000);
        assert_eq!(cfg.archive, Some(PathBuf::from("out/x")));
        match &cfg.source {
            InstanceSource::Msp(s) => {
                assert_eq!((s.min_stages, s.max_stages, s.max_width), (8, 8, 4));
                assert_eq!(s.eset_densities, vec![0.5]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(CampaignConfig::parse(&cfg.echo()).unwrap(), cfg);
        let ham = CampaignConfig::parse("source = hamilton\nhamilton_n = 4..7\n").unwrap();
        assert_eq!(CampaignConfig::parse(&ham.echo()).unwrap(), ham);
        assert_eq!(CampaignConfig::parse("").unwrap(), CampaignConfig::default());
    }

    #[test]
    fn errors_carry_lines() {
        for (text, line) in [
            ("instances = 5\nbogus = 1\n", 2),
            ("stages = 9..3\n", 1),
            ("\n\nedge_density = 1.5\n", 3),
            ("source = sat\n", 1),
            ("no equals sign\n", 1),
            ("threads = x\n", 1),
        ] {
            match CampaignConfig::parse(text) {
                Err(LabError::Config { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(CampaignConfig::parse("threads = 0\n").is_err());
        assert!(CampaignConfig::parse("source = hamilton\nhamilton_n = 2..5\n").is_err());
    }
}
