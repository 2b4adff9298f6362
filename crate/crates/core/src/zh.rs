//! The Z-H decision procedure for the multistage simple path problem.
//!
//! One outer sweep runs, for every stage `l = 1 ..= L-1`:
//!
//! 1. `change` on every reachable set of a stage-`l` edge,
//! 2. `E(v) <- comp(E(v), v, R)` for every stage-`l` vertex,
//! 3. for every edge `<a, b, k>` with `k <= l`, replace the stage `k+1..=l`
//!    part of `R(a, b, k)` by the union over `v` in stage `l` of
//!    `tidy(R(a, b, k) ∩ comp(E(v), v, R), b, v)`, then tidy it towards `D`.
//!
//! Sweeps repeat until a whole sweep leaves every reachable set unchanged.
//! The answer is YES iff `comp(E(D), D, R)` is non-empty, with `E(D)` as
//! given (stage `L` is never visited by the sweep).

use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::dense::Idx;
use crate::model::{EdgeId, EdgeSet, MultistageGraph, ValidationReport, VertexId};
use crate::operators::{EdgeLabels, OpCounts, Operators, ReachMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Answer {
    Yes,
    No,
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Answer::Yes => "YES",
            Answer::No => "NO",
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct SolveOptions {
    /// Hard cap on outer sweeps. Defaults to the monotone-shrinking bound
    /// `1 + Σ |R(e)|` measured after initialisation.
    pub max_sweeps: Option<usize>,
}

#[derive(Debug, Error)]
pub enum ZhError {
    #[error("invalid input graph: {0}")]
    InvalidGraph(ValidationReport),
    #[error("outer sweep limit {limit} exceeded without reaching a fixpoint")]
    SweepLimit { limit: usize },
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct ZhMetrics {
    pub outer_sweeps: usize,
    pub operator_calls: OpCounts,
    /// Total shrinkage of all reachable sets from initialisation to the end.
    pub edges_deleted: u64,
    /// Total shrinkage of all vertex edge sets.
    pub label_edges_deleted: u64,
    /// `1 + Σ |R(e)|` right after initialisation.
    pub sweep_bound: usize,
    #[serde(serialize_with = "ser_duration")]
    pub wall_time: Duration,
}

fn ser_duration<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

#[derive(Clone, Debug)]
pub struct ZhResult {
    pub answer: Answer,
    /// `comp(E(D), D, R)` at the fixpoint.
    pub final_comp_ed: EdgeSet,
    pub metrics: ZhMetrics,
    pub final_reach: ReachMap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    Change,
    Limit,
}

/// One structured trace record.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceRecord {
    /// `R(edge)` right after initialisation.
    Init { edge: u32, reach: Vec<u32> },
    /// Edges removed from `R(edge)`.
    Reach {
        sweep: usize,
        stage: usize,
        step: Step,
        edge: u32,
        removed: Vec<u32>,
    },
    /// Edges removed from `E(vertex)`.
    Label {
        sweep: usize,
        stage: usize,
        vertex: String,
        removed: Vec<u32>,
    },
}

#[derive(Clone, Debug, Default)]
pub struct TraceLog {
    pub records: Vec<TraceRecord>,
}

impl TraceLog {
    /// Reach deletions recorded after initialisation.
    pub fn deletions(&self) -> impl Iterator<Item = &TraceRecord> {
        self.records
            .iter()
            .filter(|r| matches!(r, TraceRecord::Reach { .. }))
    }

    /// Rebuilds the final reachable sets from the initial entries and the
    /// recorded deletions.
    pub fn replay(&self, g: &MultistageGraph) -> ReachMap {
        let mut entries = vec![g.empty_edge_set(); g.edge_count()];
        for rec in &self.records {
            match rec {
                TraceRecord::Init { edge, reach } => {
                    entries[*edge as usize] =
                        EdgeSet::from_indices(g.edge_count(), reach.iter().map(|&i| EdgeId::new(i as usize)));
                }
                TraceRecord::Reach { edge, removed, .. } => {
                    for &x in removed {
                        entries[*edge as usize].remove(EdgeId::new(x as usize));
                    }
                }
                TraceRecord::Label { .. } => {}
            }
        }
        ReachMap::from_entries(entries)
    }

    /// Line-delimited JSON, one record per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for rec in &self.records {
            out.push_str(&serde_json::to_string(rec).expect("trace records serialize"));
            out.push('\n');
        }
        out
    }
}

fn id_list(es: &EdgeSet) -> Vec<u32> {
    es.iter().map(|e| e.index() as u32).collect()
}

pub fn zh_solve(g: &MultistageGraph, opts: SolveOptions) -> Result<ZhResult, ZhError> {
    run(g, opts, None)
}

pub fn zh_trace(g: &MultistageGraph, opts: SolveOptions) -> Result<(ZhResult, TraceLog), ZhError> {
    let mut log = TraceLog::default();
    let result = run(g, opts, Some(&mut log))?;
    Ok((result, log))
}

struct Run<'a, 'g> {
    g: &'g MultistageGraph,
    ops: Operators<'g>,
    reach: ReachMap,
    labels: EdgeLabels,
    trace: Option<&'a mut TraceLog>,
    sweep: usize,
}

impl Run<'_, '_> {
    fn record_reach(&mut self, stage: usize, step: Step, edge: EdgeId, before: &EdgeSet) {
        if let Some(log) = self.trace.as_deref_mut() {
            let removed = before.difference(self.reach.get(edge));
            if !removed.is_empty() {
                log.records.push(TraceRecord::Reach {
                    sweep: self.sweep,
                    stage,
                    step,
                    edge: edge.index() as u32,
                    removed: id_list(&removed),
                });
            }
        }
    }

    fn sweep_stage(&mut self, l: usize) {
        let g = self.g;

        for e in g.stage_edges(l) {
            let before = self.trace.is_some().then(|| self.reach.get(e).clone());
            self.ops.change_in_place(e, &self.labels, &mut self.reach);
            if let Some(before) = before {
                self.record_reach(l, Step::Change, e, &before);
            }
        }

        for v in g.stage_vertices(l) {
            let shrunk = self.ops.comp_label(v, &self.labels, &self.reach);
            let before = self.labels.get(v).clone();
            if self.labels.set(v, shrunk.clone()) {
                // comp is idempotent for a fixed R.
                self.ops.remember(v, &self.labels, &self.reach, shrunk);
                if let Some(log) = self.trace.as_deref_mut() {
                    log.records.push(TraceRecord::Label {
                        sweep: self.sweep,
                        stage: l,
                        vertex: g.name(v).to_string(),
                        removed: id_list(&before.difference(self.labels.get(v))),
                    });
                }
            }
        }

        let stage_l: Vec<VertexId> = g.stage_vertices(l).collect();
        for f in g.edge_range(1, l).map(EdgeId::new) {
            let fe = *g.edge(f);
            let current = self.reach.get(f).clone();
            let mut limited = current.clone();
            let slice = g.edge_range(fe.stage + 1, l);
            for i in slice.clone() {
                limited.remove(EdgeId::new(i));
            }
            // For k = l the slice is empty and every tidy(., b, v) with b, v
            // on the same stage is empty as well.
            if !slice.is_empty() {
                for &v in &stage_l {
                    let cv = self.ops.comp_label(v, &self.labels, &self.reach);
                    let part = self.ops.tidy(&current.intersection(&cv), fe.to, v);
                    limited.union_with(&part);
                }
            }
            let limited = self.ops.tidy(&limited, fe.to, g.sink());
            self.reach.set(f, limited);
            if self.trace.is_some() {
                self.record_reach(l, Step::Limit, f, &current);
            }
        }
    }
}

fn run(g: &MultistageGraph, opts: SolveOptions, trace: Option<&mut TraceLog>) -> Result<ZhResult, ZhError> {
    let report = g.validate();
    if !report.ok() {
        return Err(ZhError::InvalidGraph(report));
    }
    let start = Instant::now();
    let mut ops = Operators::new(g);
    let reach = ops.init_all();
    let mut trace = trace;
    if let Some(log) = trace.as_deref_mut() {
        for e in g.edge_ids() {
            log.records.push(TraceRecord::Init {
                edge: e.index() as u32,
                reach: id_list(reach.get(e)),
            });
        }
    }
    let initial_reach = reach.total_size();
    let sweep_bound = 1 + initial_reach;
    let limit = opts.max_sweeps.unwrap_or(sweep_bound);

    let mut run = Run {
        g,
        ops,
        reach,
        labels: EdgeLabels::from_graph(g),
        trace,
        sweep: 0,
    };
    loop {
        if run.sweep == limit {
            return Err(ZhError::SweepLimit { limit });
        }
        run.sweep += 1;
        let before = run.reach.version();
        for l in 1..g.stages() {
            run.sweep_stage(l);
        }
        if run.reach.version() == before {
            break;
        }
    }

    let sink = g.sink();
    let final_comp_ed = run.ops.comp(g.eset(sink), sink, &run.reach).set;
    let answer = if final_comp_ed.is_empty() { Answer::No } else { Answer::Yes };

    let initial_labels: usize = g.esets().iter().map(EdgeSet::len).sum();
    let final_labels: usize = g.vertex_ids().map(|v| run.labels.get(v).len()).sum();
    let metrics = ZhMetrics {
        outer_sweeps: run.sweep,
        operator_calls: run.ops.counts(),
        edges_deleted: (initial_reach - run.reach.total_size()) as u64,
        label_edges_deleted: (initial_labels - final_labels) as u64,
        sweep_bound,
        wall_time: start.elapsed(),
    };
    Ok(ZhResult {
        answer,
        final_comp_ed,
        metrics,
        final_reach: run.reach,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;

    #[test]
    fn chain_c_yes() {
        let g = chain_c();
        let res = zh_solve(&g, SolveOptions::default()).unwrap();
        assert_eq!(res.answer, Answer::Yes);
        assert_eq!(res.final_comp_ed, ids(&[0, 1, 2]));
        assert_eq!(res.metrics.outer_sweeps, 1);
        assert_eq!(res.metrics.edges_deleted, 0);
    }

    #[test]
    fn chain_c_prime_no() {
        let g = chain_c_prime();
        let res = zh_solve(&g, SolveOptions::default()).unwrap();
        assert_eq!(res.answer, Answer::No);
        assert!(res.final_comp_ed.is_empty());
    }

    #[test]
    fn traces_of_chains() {
        let (res, log) = zh_trace(&chain_c(), SolveOptions::default()).unwrap();
        assert_eq!(res.answer, Answer::Yes);
        assert_eq!(log.deletions().count(), 0);

        let (_, log) = zh_trace(&chain_c_prime(), SolveOptions::default()).unwrap();
        assert!(log
            .records
            .contains(&TraceRecord::Init { edge: 0, reach: vec![] }));
        assert!(log.to_jsonl().lines().all(|l| l.starts_with("{\"kind\":")));
    }

    #[test]
    fn sweep_limit_reported() {
        let err = zh_solve(&chain_c(), SolveOptions { max_sweeps: Some(0) }).unwrap_err();
        assert!(matches!(err, ZhError::SweepLimit { limit: 0 }));
    }
}
