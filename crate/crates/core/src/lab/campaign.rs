//! Differential campaigns: generate, solve both ways, classify, archive.
//!
//! Seeds are processed in ordered chunks on a worker pool and aggregated in
//! seed order on the calling thread, so the report depends only on the
//! configuration fingerprint and not on the thread count. The calling thread
//! is also the only archive writer.
//!
//! Archive layout, one directory per non-agreeing seed:
//!
//! ```text
//! <archive>/<verdict>-<seed as 16 hex digits>/
//!     instance.msp     the generated instance
//!     source.graph     the undirected graph, for reduction sources
//!     zh.json          solver answer, final set and metrics
//!     oracle.json      oracle answer, witness and node count
//!     minimized.msp    candidate counterexamples only
//!     meta.json        seed, verdict, vectors and configuration
//! <archive>/checkpoint.json
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::config::{CampaignConfig, InstanceSource};
use super::generate::{gen_msp, gen_ugraph, stream};
use super::metric::vec_metric;
use super::minimize::{minimize, MinimizeBudget};
use super::verdict::{classify, Verdict, VerdictKind};
use super::LabError;
use crate::format::{parse_instance, serialize_instance, serialize_ugraph};
use crate::model::MultistageGraph;
use crate::oracle::{oracle_simple_path, Budget, OracleResult};
use crate::reduction::{reduce_hc_to_msp, UndirectedGraph};
use crate::zh::{zh_solve, SolveOptions, ZhResult};
use crate::VertexId;

const HAMILTON_ORDER: u64 = 5;
const HAMILTON_KEY: u64 = 1;
const CHECKPOINT: &str = "checkpoint.json";

/// One seed's instance, with the undirected source graph when reduced.
pub fn instance_for(cfg: &CampaignConfig, seed: u64) -> Result<(MultistageGraph, Option<UndirectedGraph>), LabError> {
    match &cfg.source {
        InstanceSource::Msp(range) => Ok((gen_msp(&range.sample(seed)?)?, None)),
        InstanceSource::Hamilton { min_n, max_n, edge_prob } => {
            let n = stream(seed, HAMILTON_ORDER, HAMILTON_KEY).random_range(*min_n..=*max_n);
            let ug = gen_ugraph(n, *edge_prob, seed)?;
            let (g, _) = reduce_hc_to_msp(&ug, 1).map_err(|e| LabError::Shape(e.to_string()))?;
            Ok((g, Some(ug)))
        }
    }
}

/// Runs both solvers on `g` and classifies the pair.
pub fn judge(
    g: &MultistageGraph,
    budget: Budget,
    max_sweeps: Option<usize>,
) -> Result<(Verdict, ZhResult, OracleResult<Vec<VertexId>>), crate::zh::ZhError> {
    let zh = zh_solve(g, SolveOptions { max_sweeps })?;
    let orc = oracle_simple_path(g, budget);
    Ok((classify(&zh, &orc), zh, orc))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FindingRecord {
    pub seed: u64,
    pub verdict: VerdictKind,
    /// Archive directory name, when archived.
    pub id: Option<String>,
    pub vec_in: Vec<i64>,
    /// Vector of the minimized instance (candidate counterexamples).
    pub vec_out: Option<Vec<i64>>,
    pub minimize_evaluations: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CampaignReport {
    pub totals: BTreeMap<VerdictKind, u64>,
    pub instances: u64,
    pub seed_start: u64,
    /// First seed not yet processed.
    pub next_seed: u64,
    pub config: String,
    pub findings: Vec<FindingRecord>,
    pub io_errors: Vec<String>,
    pub completed: bool,
    pub elapsed_secs: f64,
}

impl PartialEq for CampaignReport {
    fn eq(&self, other: &Self) -> bool {
        self.totals == other.totals
            && self.instances == other.instances
            && self.seed_start == other.seed_start
            && self.next_seed == other.next_seed
            && self.config == other.config
            && self.findings == other.findings
            && self.io_errors == other.io_errors
            && self.completed == other.completed
    }
}

impl CampaignReport {
    fn new(cfg: &CampaignConfig) -> Self {
        CampaignReport {
            totals: VerdictKind::ALL.iter().map(|&k| (k, 0)).collect(),
            instances: 0,
            seed_start: cfg.seed_start,
            next_seed: cfg.seed_start,
            config: cfg.fingerprint(),
            findings: Vec::new(),
            io_errors: Vec::new(),
            completed: false,
            elapsed_secs: 0.0,
        }
    }

    pub fn count(&self, kind: VerdictKind) -> u64 {
        self.totals.get(&kind).copied().unwrap_or(0)
    }

    pub fn archived(&self) -> impl Iterator<Item = &str> {
        self.findings.iter().filter_map(|f| f.id.as_deref())
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:<26} {:>10}", "verdict", "count");
        for (kind, n) in &self.totals {
            let _ = writeln!(out, "{:<26} {:>10}", kind.as_str(), n);
        }
        let _ = writeln!(out, "{:<26} {:>10}", "total", self.instances);
        let _ = writeln!(
            out,
            "seeds {}..{}  findings {}  archived {}  io errors {}  {}  {:.1}s",
            self.seed_start,
            self.next_seed,
            self.findings.len(),
            self.archived().count(),
            self.io_errors.len(),
            if self.completed { "completed" } else { "interrupted" },
            self.elapsed_secs
        );
        out
    }

    /// A summary record followed by one record per finding.
    pub fn to_jsonl(&self) -> String {
        let totals: BTreeMap<&str, u64> = self.totals.iter().map(|(k, &n)| (k.as_str(), n)).collect();
        let mut out = json!({
            "record": "summary",
            "totals": totals,
            "instances": self.instances,
            "seed_start": self.seed_start,
            "next_seed": self.next_seed,
            "completed": self.completed,
            "io_errors": self.io_errors,
            "elapsed_secs": self.elapsed_secs,
            "config": self.config,
        })
        .to_string();
        out.push('\n');
        for f in &self.findings {
            let mut v = serde_json::to_value(f).expect("finding serializes");
            v["record"] = json!("finding");
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }
}

/// Stop flag and resume switch for a running campaign.
#[derive(Clone, Debug, Default)]
pub struct CampaignControl {
    pub stop: Arc<AtomicBool>,
    /// Continue from `<archive>/checkpoint.json` if it matches the config.
    pub resume: bool,
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    fingerprint: String,
    report: CampaignReport,
}

struct Outcome {
    seed: u64,
    verdict: Verdict,
    detail: Option<Detail>,
}

struct Detail {
    instance: MultistageGraph,
    source: Option<UndirectedGraph>,
    zh: ZhResult,
    oracle: OracleResult<Vec<VertexId>>,
}

fn evaluate(cfg: &CampaignConfig, seed: u64) -> Result<Outcome, LabError> {
    let (g, source) = instance_for(cfg, seed)?;
    let (verdict, zh, oracle) = judge(&g, cfg.budget(), cfg.max_sweeps).map_err(|e| LabError::Solver { seed, source: e })?;
    let detail = (!verdict.kind.is_agreement()).then_some(Detail {
        instance: g,
        source,
        zh,
        oracle,
    });
    Ok(Outcome { seed, verdict, detail })
}

pub fn zh_json(g: &MultistageGraph, zh: &ZhResult) -> serde_json::Value {
    json!({
        "answer": zh.answer,
        "final_comp_ed": zh.final_comp_ed.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
        "final_comp_ed_size": zh.final_comp_ed.len(),
        "metrics": zh.metrics,
        "edges": g.edge_count(),
    })
}

pub fn oracle_json(g: &MultistageGraph, orc: &OracleResult<Vec<VertexId>>) -> serde_json::Value {
    json!({
        "answer": orc.answer,
        "witness": orc.witness.as_ref().map(|w| w.iter().map(|&v| g.name(v)).collect::<Vec<_>>()),
        "nodes_expanded": orc.nodes_expanded,
        "elapsed_secs": orc.elapsed.as_secs_f64(),
    })
}

/// Writes `bytes`, retrying once; a second failure is recorded.
fn write_retry(path: &Path, bytes: &[u8], errors: &mut Vec<String>) -> bool {
    let attempt = || -> std::io::Result<()> {
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, bytes)
    };
    match attempt().or_else(|_| attempt()) {
        Ok(()) => true,
        Err(e) => {
            errors.push(format!("{}: {e}", path.display()));
            false
        }
    }
}

struct Aggregator<'a> {
    cfg: &'a CampaignConfig,
    report: CampaignReport,
}

impl Aggregator<'_> {
    fn absorb(&mut self, out: Outcome) {
        *self.report.totals.entry(out.verdict.kind).or_insert(0) += 1;
        self.report.instances += 1;
        let Some(d) = out.detail else {
            return;
        };
        let mut record = FindingRecord {
            seed: out.seed,
            verdict: out.verdict.kind,
            id: None,
            vec_in: vec_metric(&d.instance).0,
            vec_out: None,
            minimize_evaluations: None,
        };
        let mut minimized = None;
        if out.verdict.kind == VerdictKind::CandidateCounterexample {
            let (budget, sweeps) = (self.cfg.budget(), self.cfg.max_sweeps);
            let pred = |h: &MultistageGraph| {
                judge(h, budget, sweeps).is_ok_and(|(v, _, _)| v.kind == VerdictKind::CandidateCounterexample)
            };
            let shrink = MinimizeBudget {
                max_evaluations: self.cfg.minimize_budget,
            };
            if let Ok(m) = minimize(&d.instance, pred, shrink) {
                record.vec_out = Some(vec_metric(&m.graph).0);
                record.minimize_evaluations = Some(m.evaluations);
                minimized = Some(m.graph);
            }
        }
        if let Some(root) = &self.cfg.archive {
            let id = format!("{}-{:016x}", out.verdict.kind.as_str().to_lowercase(), out.seed);
            let dir = root.join(&id);
            let meta = json!({
                "seed": out.seed,
                "verdict": out.verdict,
                "vec_in": record.vec_in,
                "vec_out": record.vec_out,
                "minimize_evaluations": record.minimize_evaluations,
                "config": self.cfg.fingerprint(),
            });
            let mut files: Vec<(&str, String)> = vec![
                ("instance.msp", serialize_instance(&d.instance)),
                ("zh.json", zh_json(&d.instance, &d.zh).to_string()),
                ("oracle.json", oracle_json(&d.instance, &d.oracle).to_string()),
                ("meta.json", meta.to_string()),
            ];
            if let Some(ug) = &d.source {
                files.push(("source.graph", serialize_ugraph(ug)));
            }
            if let Some(m) = &minimized {
                files.push(("minimized.msp", serialize_instance(m)));
            }
            let mut ok = true;
            for (name, text) in files {
                ok &= write_retry(&dir.join(name), text.as_bytes(), &mut self.report.io_errors);
            }
            if ok {
                record.id = Some(id);
            }
        }
        self.report.findings.push(record);
    }

    fn checkpoint(&mut self) {
        let Some(root) = &self.cfg.archive else {
            return;
        };
        let cp = Checkpoint {
            fingerprint: self.cfg.fingerprint(),
            report: self.report.clone(),
        };
        let text = serde_json::to_string(&cp).expect("checkpoint serializes");
        write_retry(&root.join(CHECKPOINT), text.as_bytes(), &mut self.report.io_errors);
    }
}

fn load_checkpoint(cfg: &CampaignConfig) -> Option<CampaignReport> {
    let path = cfg.archive.as_ref()?.join(CHECKPOINT);
    let text = fs::read_to_string(&path).ok()?;
    let cp: Checkpoint = match serde_json::from_str(&text) {
        Ok(cp) => cp,
        Err(e) => {
            log::warn!("ignoring unreadable checkpoint {}: {e}", path.display());
            return None;
        }
    };
    if cp.fingerprint != cfg.fingerprint() {
        log::warn!("checkpoint {} belongs to a different config; starting over", path.display());
        return None;
    }
    Some(cp.report)
}

pub fn run_differential(cfg: &CampaignConfig) -> Result<CampaignReport, LabError> {
    run_differential_with(cfg, &CampaignControl::default(), |_| {})
}

/// Runs a campaign, calling `progress` after every chunk.
pub fn run_differential_with(
    cfg: &CampaignConfig,
    control: &CampaignControl,
    mut progress: impl FnMut(&CampaignReport),
) -> Result<CampaignReport, LabError> {
    let started = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| LabError::Pool(e.to_string()))?;
    let end = cfg.seed_start.saturating_add(cfg.instances);
    let report = control
        .resume
        .then(|| load_checkpoint(cfg))
        .flatten()
        .unwrap_or_else(|| CampaignReport::new(cfg));
    let prior_secs = report.elapsed_secs;
    let mut agg = Aggregator { cfg, report };
    agg.report.completed = false;
    let mut seed = agg.report.next_seed;
    while seed < end && !control.stop.load(Ordering::Relaxed) {
        let hi = seed.saturating_add(cfg.chunk as u64).min(end);
        let outcomes: Vec<Result<Outcome, LabError>> =
            pool.install(|| (seed..hi).into_par_iter().map(|s| evaluate(cfg, s)).collect());
        for out in outcomes {
            agg.absorb(out?);
        }
        seed = hi;
        agg.report.next_seed = hi;
        agg.report.completed = hi >= end;
        agg.report.elapsed_secs = prior_secs + started.elapsed().as_secs_f64();
        agg.checkpoint();
        log::info!(
            "seeds {}..{}: {} findings",
            agg.report.seed_start,
            hi,
            agg.report.findings.len()
        );
        progress(&agg.report);
    }
    agg.report.completed = seed >= end;
    agg.report.elapsed_secs = prior_secs + started.elapsed().as_secs_f64();
    Ok(agg.report)
}

/// Re-solves an archived finding from its serialized instance.
pub fn rerun_archived(dir: &Path, budget: Budget, max_sweeps: Option<usize>) -> Result<Verdict, LabError> {
    let path: PathBuf = dir.join("instance.msp");
    let text = fs::read_to_string(&path).map_err(|source| LabError::Io {
        path: path.clone(),
        source,
    })?;
    let g = parse_instance(&text).map_err(|e| LabError::Parse {
        path: path.clone(),
        message: e.to_string(),
    })?;
    let (v, _, _) = judge(&g, budget, max_sweeps).map_err(|source| LabError::Solver { seed: 0, source })?;
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::generate::ShapeRange;

    fn small(instances: u64) -> CampaignConfig {
        CampaignConfig {
            instances,
            source: InstanceSource::Msp(ShapeRange {
                min_stages: 8,
                max_stages: 8,
                max_width: 4,
                edge_density: 0.5,
                eset_densities: vec![0.5],
            }),
            chunk: 64,
            ..CampaignConfig::default()
        }
    }

    #[test]
    fn totals_sum_to_instances() {
        let r = run_differential(&small(1000)).unwrap();
        assert_eq!(r.instances, 1000);
        assert_eq!(r.totals.values().sum::<u64>(), 1000);
        assert_eq!(r.count(VerdictKind::BugNecessity), 0);
        assert!(r.completed);
        assert_eq!(r.next_seed, 1000);
    }

    #[test]
    fn rerun_is_identical() {
        let a = run_differential(&small(300)).unwrap();
        let b = run_differential(&CampaignConfig { threads: 3, chunk: 7, ..small(300) }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hamilton_source_has_no_necessity_bugs() {
        let cfg = CampaignConfig {
            instances: 150,
            source: InstanceSource::Hamilton {
                min_n: 3,
                max_n: 7,
                edge_prob: 0.6,
            },
            ..CampaignConfig::default()
        };
        let r = run_differential(&cfg).unwrap();
        assert_eq!(r.instances, 150);
        assert_eq!(r.count(VerdictKind::BugNecessity), 0);
        assert!(r.count(VerdictKind::AgreeYes) > 0);
    }

    #[test]
    fn stop_and_resume() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = CampaignConfig {
            archive: Some(dir.path().to_path_buf()),
            ..small(400)
        };
        let control = CampaignControl::default();
        let stop = control.stop.clone();
        let mut chunks = 0;
        let partial = run_differential_with(&cfg, &control, |_| {
            chunks += 1;
            if chunks == 2 {
                stop.store(true, Ordering::Relaxed);
            }
        })
        .unwrap();
        assert!(!partial.completed);
        assert_eq!(partial.next_seed, 128);
        let resumed = run_differential_with(
            &cfg,
            &CampaignControl {
                resume: true,
                ..CampaignControl::default()
            },
            |_| {},
        )
        .unwrap();
        let whole = run_differential(&cfg).unwrap();
        assert!(resumed.completed);
        assert_eq!(resumed, whole);
    }

    #[test]
    fn findings_are_archived() {
        // Cut the oracle short so that some instances come back UNKNOWN.
        let dir = tempfile::tempdir().unwrap();
        let cfg = CampaignConfig {
            oracle_nodes: 3,
            archive: Some(dir.path().to_path_buf()),
            ..small(50)
        };
        let r = run_differential(&cfg).unwrap();
        assert!(r.count(VerdictKind::Unknown) > 0);
        assert!(r.io_errors.is_empty());
        for f in &r.findings {
            let id = f.id.as_ref().unwrap();
            let d = dir.path().join(id);
            for file in ["instance.msp", "zh.json", "oracle.json", "meta.json"] {
                assert!(d.join(file).is_file(), "{id}/{file}");
            }
            assert_eq!(rerun_archived(&d, cfg.budget(), None).unwrap().kind, f.verdict);
        }
    }

    #[test]
    fn candidate_outcome_is_archived() {
        // No generated instance has produced a candidate so far; feed one in
        // by hand. Re-judging disagrees, so minimization is skipped.
        let dir = tempfile::tempdir().unwrap();
        let cfg = CampaignConfig {
            archive: Some(dir.path().to_path_buf()),
            ..small(1)
        };
        let g = crate::model::fixtures::chain_c_prime();
        let (_, zh, oracle) = judge(&g, cfg.budget(), None).unwrap();
        let verdict = crate::lab::classify_answers(crate::zh::Answer::Yes, crate::oracle::OracleAnswer::No);
        let mut agg = Aggregator {
            cfg: &cfg,
            report: CampaignReport::new(&cfg),
        };
        agg.absorb(Outcome {
            seed: 77,
            verdict,
            detail: Some(Detail {
                instance: g.clone(),
                source: Some(UndirectedGraph::complete(3)),
                zh,
                oracle,
            }),
        });
        let f = &agg.report.findings[0];
        assert_eq!(f.id.as_deref(), Some("candidate_counterexample-000000000000004d"));
        assert_eq!(f.vec_out, None);
        let d = dir.path().join(f.id.as_ref().unwrap());
        assert_eq!(fs::read_to_string(d.join("instance.msp")).unwrap(), serialize_instance(&g));
        assert!(d.join("source.graph").is_file());
        assert!(!d.join("minimized.msp").exists());
        let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("meta.json")).unwrap()).unwrap();
        assert_eq!(meta["seed"], 77);
    }

    #[test]
    fn report_renders() {
        let r = run_differential(&small(20)).unwrap();
        let table = r.to_table();
        assert!(table.contains("AGREE_NO"));
        assert!(table.contains("total"));
        let first = r.to_jsonl().lines().next().unwrap().to_string();
        let v: serde_json::Value = serde_json::from_str(&first).unwrap();
        assert_eq!(v["instances"], 20);
    }
}
