//! Exhaustive reference searchers.
//!
//! [`oracle_simple_path`] decides the multistage simple path problem by
//! depth-first search with prefix-containment pruning, [`oracle_hamilton`]
//! decides Hamiltonicity of an undirected graph by plain backtracking.
//! Both are budgeted by node expansions and, optionally, wall time.

use std::fmt;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::dense::Idx;
use crate::model::{EdgeSet, MultistageGraph, VertexId};
use crate::reduction::UndirectedGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum OracleAnswer {
    Yes,
    No,
    Timeout,
}

impl fmt::Display for OracleAnswer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OracleAnswer::Yes => "YES",
            OracleAnswer::No => "NO",
            OracleAnswer::Timeout => "TIMEOUT",
        })
    }
}

/// Node-expansion cap and optional wall-clock cap; whichever trips first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub const DEFAULT_NODES: u64 = 10_000_000;

    pub fn nodes(max_nodes: u64) -> Self {
        Budget {
            max_nodes,
            max_time: None,
        }
    }

    pub fn unlimited() -> Self {
        Budget::nodes(u64::MAX)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::nodes(Budget::DEFAULT_NODES)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult<W> {
    pub answer: OracleAnswer,
    pub witness: Option<W>,
    pub nodes_expanded: u64,
    pub elapsed: Duration,
}

struct Meter {
    budget: Budget,
    nodes: u64,
    start: Instant,
}

impl Meter {
    fn new(budget: Budget) -> Self {
        Meter {
            budget,
            nodes: 0,
            start: Instant::now(),
        }
    }

    /// Counts one expansion; `false` once the budget is exhausted.
    #[inline]
    fn tick(&mut self) -> bool {
        if self.nodes >= self.budget.max_nodes {
            return false;
        }
        self.nodes += 1;
        if let Some(limit) = self.budget.max_time {
            if self.nodes.is_multiple_of(1024) && self.start.elapsed() >= limit {
                return false;
            }
        }
        true
    }

    fn finish<W>(self, answer: OracleAnswer, witness: Option<W>) -> OracleResult<W> {
        OracleResult {
            answer,
            witness,
            nodes_expanded: self.nodes,
            elapsed: self.start.elapsed(),
        }
    }
}

/// Searches for a simple path. The witness lists the path's vertices from
/// `S` to `D`; the first one found in ascending edge-id order is returned.
pub fn oracle_simple_path(g: &MultistageGraph, budget: Budget) -> OracleResult<Vec<VertexId>> {
    let mut meter = Meter::new(budget);
    let l = g.stages();
    let mut path = vec![g.source()];
    // prefix[i] holds the edges of the path up to vertex i.
    let mut prefix: Vec<EdgeSet> = vec![g.empty_edge_set()];
    // cursor[i] is the next out-edge of path[i] to try.
    let mut cursor = vec![0usize];
    if !meter.tick() {
        return meter.finish(OracleAnswer::Timeout, None);
    }
    while let Some(&u) = path.last() {
        let depth = path.len() - 1;
        if depth == l {
            return meter.finish(OracleAnswer::Yes, Some(path));
        }
        let outs = g.out_edges(u);
        let c = cursor[depth];
        if c == outs.len() {
            path.pop();
            prefix.pop();
            cursor.pop();
            continue;
        }
        cursor[depth] += 1;
        let e = outs[c];
        let w = g.edge(e).to;
        let label = g.eset(w);
        if !label.contains(e) || !prefix[depth].is_subset(label) {
            continue;
        }
        if !meter.tick() {
            return meter.finish(OracleAnswer::Timeout, None);
        }
        let mut next = prefix[depth].clone();
        next.insert(e);
        path.push(w);
        prefix.push(next);
        cursor.push(0);
    }
    meter.finish(OracleAnswer::No, None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PathCondition {
    /// Containment required at every stage `1..=L`.
    #[default]
    Simple,
    /// Containment required only up to stage `L - 2`.
    PreSimple,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("path has {got} vertices, expected {expected}")]
    Length { got: usize, expected: usize },
    #[error("path must start at the source")]
    NotFromSource,
    #[error("path must end at the sink")]
    NotToSink,
    #[error("vertex at position {position} is on stage {stage}")]
    StageMismatch { position: usize, stage: usize },
    #[error("no edge between positions {position} and {}", position + 1)]
    MissingEdge { position: usize },
}

/// Checks a vertex sequence against the simple path definition.
///
/// Structural defects are errors; a well-formed path that fails the
/// containment condition yields `Ok(false)`.
pub fn verify_simple_path(g: &MultistageGraph, path: &[VertexId]) -> Result<bool, PathError> {
    verify_path(g, path, PathCondition::Simple)
}

pub fn verify_path(g: &MultistageGraph, path: &[VertexId], condition: PathCondition) -> Result<bool, PathError> {
    let l = g.stages();
    if path.len() != l + 1 {
        return Err(PathError::Length {
            got: path.len(),
            expected: l + 1,
        });
    }
    if path[0] != g.source() {
        return Err(PathError::NotFromSource);
    }
    if path[l] != g.sink() {
        return Err(PathError::NotToSink);
    }
    for (i, &v) in path.iter().enumerate() {
        if v.index() >= g.vertex_count() || g.stage_of(v) != i {
            let stage = if v.index() < g.vertex_count() { g.stage_of(v) } else { usize::MAX };
            return Err(PathError::StageMismatch { position: i, stage });
        }
    }
    let mut edges = Vec::with_capacity(l);
    for i in 0..l {
        match g.find_edge(path[i], path[i + 1]) {
            Some(e) => edges.push(e),
            None => return Err(PathError::MissingEdge { position: i }),
        }
    }
    let checked = match condition {
        PathCondition::Simple => l,
        PathCondition::PreSimple => l.saturating_sub(2),
    };
    for stage in 1..=checked {
        let label = g.eset(path[stage]);
        if !edges[..stage].iter().all(|&e| label.contains(e)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Searches for a Hamilton circuit anchored at vertex 1. The witness is a
/// closed walk `1, u_1, ..., u_{n-1}, 1`.
pub fn oracle_hamilton(ug: &UndirectedGraph, budget: Budget) -> OracleResult<Vec<u32>> {
    let mut meter = Meter::new(budget);
    let n = ug.order() as usize;
    if n < 3 {
        return meter.finish(OracleAnswer::No, None);
    }
    let adj = ug.adjacency();
    let mut visited = vec![false; n];
    let mut path = vec![0usize];
    let mut cursor = vec![0usize];
    visited[0] = true;
    if !meter.tick() {
        return meter.finish(OracleAnswer::Timeout, None);
    }
    while let Some(&u) = path.last() {
        if path.len() == n {
            if adj[u][0] {
                let mut circuit: Vec<u32> = path.iter().map(|&x| x as u32 + 1).collect();
                circuit.push(1);
                return meter.finish(OracleAnswer::Yes, Some(circuit));
            }
            visited[u] = false;
            path.pop();
            cursor.pop();
            continue;
        }
        let depth = path.len() - 1;
        let mut next = None;
        while cursor[depth] < n {
            let w = cursor[depth];
            cursor[depth] += 1;
            if adj[u][w] && !visited[w] {
                next = Some(w);
                break;
            }
        }
        match next {
            Some(w) => {
                if !meter.tick() {
                    return meter.finish(OracleAnswer::Timeout, None);
                }
                visited[w] = true;
                path.push(w);
                cursor.push(0);
            }
            None => {
                visited[u] = false;
                path.pop();
                cursor.pop();
            }
        }
    }
    meter.finish(OracleAnswer::No, None)
}

/// Whether `circuit` is a closed walk visiting every vertex exactly once
/// along edges of `ug`.
pub fn verify_circuit(ug: &UndirectedGraph, circuit: &[u32]) -> bool {
    let n = ug.order() as usize;
    if n < 3 || circuit.len() != n + 1 || circuit.first() != circuit.last() {
        return false;
    }
    let mut seen = vec![false; n + 1];
    for &v in &circuit[..n] {
        if v == 0 || v as usize > n || std::mem::replace(&mut seen[v as usize], true) {
            return false;
        }
    }
    circuit.windows(2).all(|w| ug.has_edge(w[0], w[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::*;
    use crate::model::{GraphDraft, MultistageGraph};

    fn names(g: &MultistageGraph, path: &[VertexId]) -> Vec<String> {
        path.iter().map(|&v| g.name(v).to_string()).collect()
    }

    #[test]
    fn chain_witness() {
        let g = chain_c();
        let res = oracle_simple_path(&g, Budget::default());
        assert_eq!(res.answer, OracleAnswer::Yes);
        let w = res.witness.unwrap();
        assert_eq!(names(&g, &w), ["S", "a", "b", "D"]);
        assert_eq!(verify_simple_path(&g, &w), Ok(true));
    }

    #[test]
    fn chain_prime_has_none() {
        let g = chain_c_prime();
        assert_eq!(oracle_simple_path(&g, Budget::default()).answer, OracleAnswer::No);
        let path: Vec<VertexId> = g.vertex_ids().collect();
        assert_eq!(verify_simple_path(&g, &path), Ok(false));
        // Only D's containment fails, which the pre-simple variant skips.
        assert_eq!(verify_path(&g, &path, PathCondition::PreSimple), Ok(true));
    }

    #[test]
    fn empty_stage_means_no() {
        let d = GraphDraft::new(3)
            .vertex("S", 0)
            .vertex("a", 1)
            .vertex("b", 2)
            .vertex("D", 3)
            .edge("S", "a")
            .edge("b", "D");
        let g = MultistageGraph::from_draft(&d).unwrap();
        assert_eq!(oracle_simple_path(&g, Budget::default()).answer, OracleAnswer::No);
    }

    #[test]
    fn structural_errors() {
        let g = chain_c();
        let s = g.source();
        let a = g.find_vertex("a").unwrap();
        let d = g.sink();
        assert_eq!(
            verify_simple_path(&g, &[s, a, d]),
            Err(PathError::Length { got: 3, expected: 4 })
        );
        let b = g.find_vertex("b").unwrap();
        assert_eq!(verify_simple_path(&g, &[a, a, b, d]), Err(PathError::NotFromSource));
        assert!(matches!(
            verify_simple_path(&g, &[s, b, b, d]),
            Err(PathError::StageMismatch { position: 1, .. })
        ));
    }

    #[test]
    fn tiny_budget_times_out() {
        let g = chain_c();
        let res = oracle_simple_path(&g, Budget::nodes(2));
        assert_eq!(res.answer, OracleAnswer::Timeout);
        assert!(res.witness.is_none());
    }

    #[test]
    fn hamilton_examples() {
        let k3 = UndirectedGraph::complete(3);
        let res = oracle_hamilton(&k3, Budget::default());
        assert_eq!(res.answer, OracleAnswer::Yes);
        assert_eq!(res.witness.as_deref(), Some(&[1, 2, 3, 1][..]));

        let p3 = UndirectedGraph::new(3, [(1, 2), (2, 3)]).unwrap();
        assert_eq!(oracle_hamilton(&p3, Budget::default()).answer, OracleAnswer::No);

        let k4 = UndirectedGraph::complete(4);
        let res = oracle_hamilton(&k4, Budget::default());
        assert_eq!(res.answer, OracleAnswer::Yes);
        assert!(verify_circuit(&k4, res.witness.as_ref().unwrap()));
        assert!(!verify_circuit(&k4, &[1, 2, 3, 1]));
    }
}
