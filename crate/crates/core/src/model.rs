//! Labeled multistage graphs.
//!
//! A graph has stages `0..=L`; stage 0 holds only the source `S` and stage `L`
//! only the sink `D`. Every edge `<u, v, l>` runs from stage `l - 1` to stage
//! `l`, and every vertex other than `S` carries an edge set `E(v)`.
//!
//! Graphs are assembled from a [`GraphDraft`], which can describe arbitrary
//! (possibly malformed) structure; [`validate`] reports everything wrong with
//! a draft and [`MultistageGraph::from_draft`] only succeeds on a clean report.
//! Vertices get dense ids in `(stage, name)` order and edges in
//! `(stage, from-name, to-name)` order, so two structurally equal drafts
//! always yield identical graphs.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::dense::{DenseSet, Idx};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct VertexId(u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct EdgeId(u32);

impl Idx for VertexId {
    #[inline]
    fn new(index: usize) -> Self {
        VertexId(index as u32)
    }
    #[inline]
    fn index(self) -> usize {
        self.0 as usize
    }
}

impl Idx for EdgeId {
    #[inline]
    fn new(index: usize) -> Self {
        EdgeId(index as u32)
    }
    #[inline]
    fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

pub type EdgeSet = DenseSet<EdgeId>;
pub type VertexSet = DenseSet<VertexId>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub name: String,
    pub stage: usize,
}

/// The edge `<from, to, stage>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    pub stage: usize,
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid multistage graph: {0}")]
    Invalid(ValidationReport),
    #[error("stage range [{i}:{j}] outside 1..={stages}")]
    StageRange { i: usize, j: usize, stages: usize },
}

// ---------------------------------------------------------------------------
// Drafts and validation

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DraftVertex {
    pub name: String,
    pub stage: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DraftEdge {
    pub from: String,
    pub to: String,
    pub stage: usize,
}

/// `E(vertex)`; members index into [`GraphDraft::edges`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DraftEset {
    pub vertex: String,
    pub members: Vec<usize>,
}

/// Unchecked description of a labeled multistage graph.
///
/// Vertices without an eset entry get `E(v) = ∅`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GraphDraft {
    pub stages: usize,
    pub vertices: Vec<DraftVertex>,
    pub edges: Vec<DraftEdge>,
    pub esets: Vec<DraftEset>,
}

impl GraphDraft {
    pub fn new(stages: usize) -> Self {
        GraphDraft {
            stages,
            ..Default::default()
        }
    }

    pub fn vertex(mut self, name: &str, stage: usize) -> Self {
        self.vertices.push(DraftVertex {
            name: name.to_string(),
            stage,
        });
        self
    }

    /// Adds `<from, to, l>` with `l` taken from the stage of `to`.
    pub fn edge(self, from: &str, to: &str) -> Self {
        let stage = self
            .vertices
            .iter()
            .find(|v| v.name == to)
            .map(|v| v.stage)
            .unwrap_or(0);
        self.edge_at(from, to, stage)
    }

    pub fn edge_at(mut self, from: &str, to: &str, stage: usize) -> Self {
        self.edges.push(DraftEdge {
            from: from.to_string(),
            to: to.to_string(),
            stage,
        });
        self
    }

    /// Sets `E(vertex)` from `(from, to)` name pairs of edges already added.
    ///
    /// Panics if a pair names no edge; meant for building fixtures.
    pub fn eset(mut self, vertex: &str, members: &[(&str, &str)]) -> Self {
        let members = members
            .iter()
            .map(|(a, b)| {
                self.edges
                    .iter()
                    .position(|e| e.from == *a && e.to == *b)
                    .unwrap_or_else(|| panic!("no edge {a}->{b} in draft"))
            })
            .collect();
        self.esets.push(DraftEset {
            vertex: vertex.to_string(),
            members,
        });
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationCode {
    NoStages,
    BadName,
    DuplicateVertex,
    VertexStageRange,
    MissingSource,
    MultiSource,
    MissingSink,
    MultiSink,
    UnknownVertex,
    EdgeStageRange,
    StageSkew,
    ParallelEdge,
    SourceEset,
    UnknownEsetVertex,
    DuplicateEset,
    EsetUnknownEdge,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::NoStages => "NO_STAGES",
            ViolationCode::BadName => "BAD_NAME",
            ViolationCode::DuplicateVertex => "DUPLICATE_VERTEX",
            ViolationCode::VertexStageRange => "VERTEX_STAGE_RANGE",
            ViolationCode::MissingSource => "MISSING_SOURCE",
            ViolationCode::MultiSource => "MULTI_SOURCE",
            ViolationCode::MissingSink => "MISSING_SINK",
            ViolationCode::MultiSink => "MULTI_SINK",
            ViolationCode::UnknownVertex => "UNKNOWN_VERTEX",
            ViolationCode::EdgeStageRange => "EDGE_STAGE_RANGE",
            ViolationCode::StageSkew => "STAGE_SKEW",
            ViolationCode::ParallelEdge => "PARALLEL_EDGE",
            ViolationCode::SourceEset => "SOURCE_ESET",
            ViolationCode::UnknownEsetVertex => "UNKNOWN_ESET_VERTEX",
            ViolationCode::DuplicateEset => "DUPLICATE_ESET",
            ViolationCode::EsetUnknownEdge => "ESET_UNKNOWN_EDGE",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub code: ViolationCode,
    pub location: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    fn push(&mut self, code: ViolationCode, location: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            code,
            location: location.into(),
            message: message.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{} at {}: {}", v.code, v.location, v.message)?;
        }
        Ok(())
    }
}

pub(crate) fn valid_name(name: &str) -> bool {
    !name.is_empty() && !name.chars().any(|c| c.is_whitespace() || c == '#')
}

/// Checks a draft against the structural rules of a labeled multistage graph.
pub fn validate(draft: &GraphDraft) -> ValidationReport {
    use ViolationCode::*;

    let mut report = ValidationReport::default();
    let l = draft.stages;
    if l == 0 {
        report.push(NoStages, "stages", "a multistage graph needs at least one stage");
    }

    let mut stage_of: HashMap<&str, usize> = HashMap::new();
    let mut per_stage = vec![0usize; l + 1];
    for (i, v) in draft.vertices.iter().enumerate() {
        let loc = format!("vertex #{i} '{}'", v.name);
        if !valid_name(&v.name) {
            report.push(BadName, &loc, "vertex names must be non-empty without whitespace or '#'");
        }
        if stage_of.insert(&v.name, v.stage).is_some() {
            report.push(DuplicateVertex, &loc, "vertex name used twice");
            continue;
        }
        if v.stage > l {
            report.push(VertexStageRange, &loc, format!("stage {} exceeds L = {l}", v.stage));
        } else {
            per_stage[v.stage] += 1;
        }
    }
    if l > 0 {
        match per_stage[0] {
            0 => report.push(MissingSource, "stage 0", "stage 0 has no vertex"),
            1 => {}
            n => report.push(MultiSource, "stage 0", format!("stage 0 has {n} vertices")),
        }
        match per_stage[l] {
            0 => report.push(MissingSink, format!("stage {l}"), "last stage has no vertex"),
            1 => {}
            n => report.push(MultiSink, format!("stage {l}"), format!("last stage has {n} vertices")),
        }
    }

    let mut pairs: HashSet<(&str, &str)> = HashSet::new();
    for (i, e) in draft.edges.iter().enumerate() {
        let loc = format!("edge #{i} <{},{},{}>", e.from, e.to, e.stage);
        if e.stage == 0 || e.stage > l {
            report.push(EdgeStageRange, &loc, format!("edge stage must lie in 1..={l}"));
        }
        let from = stage_of.get(e.from.as_str());
        let to = stage_of.get(e.to.as_str());
        if from.is_none() {
            report.push(UnknownVertex, &loc, format!("unknown vertex '{}'", e.from));
        }
        if to.is_none() {
            report.push(UnknownVertex, &loc, format!("unknown vertex '{}'", e.to));
        }
        if let (Some(&a), Some(&b)) = (from, to) {
            if e.stage == 0 || a + 1 != e.stage || b != e.stage {
                report.push(
                    StageSkew,
                    &loc,
                    format!("endpoints at stages {a} and {b} do not fit edge stage {}", e.stage),
                );
            }
        }
        if !pairs.insert((&e.from, &e.to)) {
            report.push(ParallelEdge, &loc, "second edge between the same vertex pair");
        }
    }

    let mut seen: HashSet<&str> = HashSet::new();
    for es in &draft.esets {
        let loc = format!("eset '{}'", es.vertex);
        match stage_of.get(es.vertex.as_str()) {
            None => report.push(UnknownEsetVertex, &loc, "edge set for an unknown vertex"),
            Some(0) => report.push(SourceEset, &loc, "the source carries no edge set"),
            Some(_) => {}
        }
        if !seen.insert(&es.vertex) {
            report.push(DuplicateEset, &loc, "vertex has more than one edge set");
        }
        for &m in &es.members {
            if m >= draft.edges.len() {
                report.push(EsetUnknownEdge, &loc, format!("member #{m} is not an edge"));
            }
        }
    }
    report
}

// ---------------------------------------------------------------------------
// The graph

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultistageGraph {
    stages: usize,
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    esets: Vec<EdgeSet>,
    stage_vertex_start: Vec<usize>,
    stage_edge_start: Vec<usize>,
    in_edges: Vec<Vec<EdgeId>>,
    out_edges: Vec<Vec<EdgeId>>,
}

impl MultistageGraph {
    pub fn from_draft(draft: &GraphDraft) -> Result<Self, ModelError> {
        let report = validate(draft);
        if !report.ok() {
            return Err(ModelError::Invalid(report));
        }
        let l = draft.stages;

        let mut order: Vec<usize> = (0..draft.vertices.len()).collect();
        order.sort_by(|&a, &b| {
            let (va, vb) = (&draft.vertices[a], &draft.vertices[b]);
            (va.stage, &va.name).cmp(&(vb.stage, &vb.name))
        });
        let vertices: Vec<Vertex> = order
            .iter()
            .map(|&i| Vertex {
                name: draft.vertices[i].name.clone(),
                stage: draft.vertices[i].stage,
            })
            .collect();
        let id_of: HashMap<&str, VertexId> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.name.as_str(), VertexId::new(i)))
            .collect();

        let mut edge_order: Vec<usize> = (0..draft.edges.len()).collect();
        edge_order.sort_by(|&a, &b| {
            let (ea, eb) = (&draft.edges[a], &draft.edges[b]);
            (ea.stage, &ea.from, &ea.to).cmp(&(eb.stage, &eb.from, &eb.to))
        });
        let mut draft_to_id = vec![EdgeId::new(0); draft.edges.len()];
        let edges: Vec<Edge> = edge_order
            .iter()
            .enumerate()
            .map(|(id, &i)| {
                draft_to_id[i] = EdgeId::new(id);
                let e = &draft.edges[i];
                Edge {
                    from: id_of[e.from.as_str()],
                    to: id_of[e.to.as_str()],
                    stage: e.stage,
                }
            })
            .collect();

        let m = edges.len();
        let mut esets = vec![EdgeSet::new_empty(m); vertices.len()];
        for es in &draft.esets {
            let v = id_of[es.vertex.as_str()];
            for &member in &es.members {
                esets[v.index()].insert(draft_to_id[member]);
            }
        }

        let mut stage_vertex_start = vec![0; l + 2];
        for v in &vertices {
            stage_vertex_start[v.stage + 1] += 1;
        }
        let mut stage_edge_start = vec![0; l + 2];
        for e in &edges {
            stage_edge_start[e.stage + 1] += 1;
        }
        for s in 1..l + 2 {
            stage_vertex_start[s] += stage_vertex_start[s - 1];
            stage_edge_start[s] += stage_edge_start[s - 1];
        }

        let mut in_edges = vec![Vec::new(); vertices.len()];
        let mut out_edges = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            out_edges[e.from.index()].push(EdgeId::new(i));
            in_edges[e.to.index()].push(EdgeId::new(i));
        }

        Ok(MultistageGraph {
            stages: l,
            vertices,
            edges,
            esets,
            stage_vertex_start,
            stage_edge_start,
            in_edges,
            out_edges,
        })
    }

    /// Canonical draft: vertices by `(stage, name)`, edges by id.
    pub fn to_draft(&self) -> GraphDraft {
        let vertices = self
            .vertices
            .iter()
            .map(|v| DraftVertex {
                name: v.name.clone(),
                stage: v.stage,
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| DraftEdge {
                from: self.name(e.from).to_string(),
                to: self.name(e.to).to_string(),
                stage: e.stage,
            })
            .collect();
        let esets = self
            .vertex_ids()
            .filter(|&v| v != self.source())
            .map(|v| DraftEset {
                vertex: self.name(v).to_string(),
                members: self.esets[v.index()].iter().map(|e| e.index()).collect(),
            })
            .collect();
        GraphDraft {
            stages: self.stages,
            vertices,
            edges,
            esets,
        }
    }

    pub fn validate(&self) -> ValidationReport {
        validate(&self.to_draft())
    }

    /// `L`, the index of the last stage.
    #[inline]
    pub fn stages(&self) -> usize {
        self.stages
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn source(&self) -> VertexId {
        VertexId::new(0)
    }

    #[inline]
    pub fn sink(&self) -> VertexId {
        VertexId::new(self.vertices.len() - 1)
    }

    #[inline]
    pub fn vertex(&self, v: VertexId) -> &Vertex {
        &self.vertices[v.index()]
    }

    #[inline]
    pub fn name(&self, v: VertexId) -> &str {
        &self.vertices[v.index()].name
    }

    #[inline]
    pub fn stage_of(&self, v: VertexId) -> usize {
        self.vertices[v.index()].stage
    }

    #[inline]
    pub fn edge(&self, e: EdgeId) -> &Edge {
        &self.edges[e.index()]
    }

    pub fn find_vertex(&self, name: &str) -> Option<VertexId> {
        self.vertices
            .iter()
            .position(|v| v.name == name)
            .map(VertexId::new)
    }

    pub fn find_edge(&self, from: VertexId, to: VertexId) -> Option<EdgeId> {
        self.out_edges[from.index()]
            .iter()
            .copied()
            .find(|&e| self.edges[e.index()].to == to)
    }

    pub fn vertex_ids(&self) -> impl DoubleEndedIterator<Item = VertexId> + ExactSizeIterator {
        (0..self.vertices.len()).map(VertexId::new)
    }

    pub fn edge_ids(&self) -> impl DoubleEndedIterator<Item = EdgeId> + ExactSizeIterator {
        (0..self.edges.len()).map(EdgeId::new)
    }

    pub fn stage_vertices(&self, stage: usize) -> impl DoubleEndedIterator<Item = VertexId> {
        (self.stage_vertex_start[stage]..self.stage_vertex_start[stage + 1]).map(VertexId::new)
    }

    /// Id range of the edges of stages `lo..=hi`; edge ids are stage-sorted.
    #[inline]
    pub fn edge_range(&self, lo: usize, hi: usize) -> std::ops::Range<usize> {
        let lo = lo.min(self.stages + 1);
        let hi = hi.min(self.stages);
        if lo > hi {
            return 0..0;
        }
        self.stage_edge_start[lo]..self.stage_edge_start[hi + 1]
    }

    pub fn stage_edges(&self, stage: usize) -> impl DoubleEndedIterator<Item = EdgeId> {
        self.edge_range(stage, stage).map(EdgeId::new)
    }

    #[inline]
    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_edges[v.index()]
    }

    #[inline]
    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_edges[v.index()]
    }

    /// `E(v)` as given in the input. The source's entry is always empty.
    #[inline]
    pub fn eset(&self, v: VertexId) -> &EdgeSet {
        &self.esets[v.index()]
    }

    pub fn esets(&self) -> &[EdgeSet] {
        &self.esets
    }

    pub fn empty_edge_set(&self) -> EdgeSet {
        EdgeSet::new_empty(self.edges.len())
    }

    pub fn all_edges(&self) -> EdgeSet {
        EdgeSet::new_filled(self.edges.len())
    }

    pub fn empty_vertex_set(&self) -> VertexSet {
        VertexSet::new_empty(self.vertices.len())
    }

    /// `ES[i:j]`: the members of `es` with stage in `i..=j`.
    pub fn stage_slice(&self, es: &EdgeSet, i: usize, j: usize) -> Result<EdgeSet, ModelError> {
        let l = self.stages;
        if i < 1 || j < 1 || i > l || j > l {
            return Err(ModelError::StageRange { i, j, stages: l });
        }
        let mut out = es.clone();
        let range = self.edge_range(i, j);
        out.retain_range(range.start, range.end);
        Ok(out)
    }

    pub fn in_degree(&self, v: VertexId) -> usize {
        self.in_edges[v.index()].len()
    }

    /// Renders an edge set as `{<S,a,1>, ...}` for diagnostics.
    pub fn describe(&self, es: &EdgeSet) -> String {
        let parts: Vec<String> = es
            .iter()
            .map(|e| {
                let ed = self.edge(e);
                format!("<{},{},{}>", self.name(ed.from), self.name(ed.to), ed.stage)
            })
            .collect();
        format!("{{{}}}", parts.join(", "))
    }
}

/// Free-function form of [`MultistageGraph::stage_slice`].
pub fn stage_slice(es: &EdgeSet, i: usize, j: usize, g: &MultistageGraph) -> Result<EdgeSet, ModelError> {
    g.stage_slice(es, i, j)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// `S -> a -> b -> D` with `E(a) = {e1}`, `E(b) = {e1, e2}`, and `E(D)`
    /// as given by `sink_eset` over the edge names `e1, e2, e3`.
    pub fn chain(sink_eset: &[&str]) -> MultistageGraph {
        let pair = |n: &str| match n {
            "e1" => ("S", "a"),
            "e2" => ("a", "b"),
            "e3" => ("b", "D"),
            _ => panic!("unknown chain edge {n}"),
        };
        let sink: Vec<(&str, &str)> = sink_eset.iter().map(|n| pair(n)).collect();
        let draft = GraphDraft::new(3)
            .vertex("S", 0)
            .vertex("a", 1)
            .vertex("b", 2)
            .vertex("D", 3)
            .edge("S", "a")
            .edge("a", "b")
            .edge("b", "D")
            .eset("a", &[("S", "a")])
            .eset("b", &[("S", "a"), ("a", "b")])
            .eset("D", &sink);
        MultistageGraph::from_draft(&draft).unwrap()
    }

    pub fn chain_c() -> MultistageGraph {
        chain(&["e1", "e2", "e3"])
    }

    pub fn chain_c_prime() -> MultistageGraph {
        chain(&["e2", "e3"])
    }

    pub fn ids(v: &[usize]) -> EdgeSet {
        EdgeSet::from_indices(3, v.iter().map(|&i| EdgeId::new(i)))
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    fn chain_draft() -> GraphDraft {
        GraphDraft::new(3)
            .vertex("S", 0)
            .vertex("a", 1)
            .vertex("b", 2)
            .vertex("D", 3)
            .edge("S", "a")
            .edge("a", "b")
            .edge("b", "D")
            .eset("a", &[("S", "a")])
    }

    #[test]
    fn minimal_chain_is_valid() {
        let report = validate(&chain_draft());
        assert!(report.ok(), "{report}");
        let g = chain_c();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.name(g.source()), "S");
        assert_eq!(g.name(g.sink()), "D");
        assert!(g.validate().ok());
    }

    #[test]
    fn two_sources_flagged() {
        let report = validate(&chain_draft().vertex("S2", 0));
        assert!(report.has(ViolationCode::MultiSource));
        assert!(!report.ok());
    }

    #[test]
    fn stage_skew_flagged() {
        // <S, b, 2> starts at stage 0
        let report = validate(&chain_draft().edge_at("S", "b", 2));
        assert!(report.has(ViolationCode::StageSkew));
    }

    #[test]
    fn other_violations() {
        let d = chain_draft().edge("a", "b");
        assert!(validate(&d).has(ViolationCode::ParallelEdge));
        let d = chain_draft().edge("a", "zz");
        assert!(validate(&d).has(ViolationCode::UnknownVertex));
        let mut d = chain_draft();
        d.esets.push(DraftEset {
            vertex: "S".into(),
            members: vec![],
        });
        assert!(validate(&d).has(ViolationCode::SourceEset));
        let mut d = chain_draft();
        d.esets.push(DraftEset {
            vertex: "b".into(),
            members: vec![7],
        });
        assert!(validate(&d).has(ViolationCode::EsetUnknownEdge));
        let d = chain_draft().vertex("x y", 1);
        assert!(validate(&d).has(ViolationCode::BadName));
        let d = chain_draft().vertex("D2", 3);
        assert!(validate(&d).has(ViolationCode::MultiSink));
        assert!(validate(&GraphDraft::new(0)).has(ViolationCode::NoStages));
        assert!(MultistageGraph::from_draft(&chain_draft().vertex("S2", 0)).is_err());
    }

    #[test]
    fn validation_is_pure() {
        let d = chain_draft().vertex("S2", 0).edge_at("S", "b", 2);
        assert_eq!(validate(&d), validate(&d));
    }

    #[test]
    fn ids_follow_stage_then_names() {
        let d = GraphDraft::new(2)
            .vertex("D", 2)
            .vertex("y", 1)
            .vertex("x", 1)
            .vertex("S", 0)
            .edge("y", "D")
            .edge("S", "y")
            .edge("x", "D")
            .edge("S", "x");
        let g = MultistageGraph::from_draft(&d).unwrap();
        let names: Vec<_> = g.vertex_ids().map(|v| g.name(v).to_string()).collect();
        assert_eq!(names, ["S", "x", "y", "D"]);
        let pairs: Vec<_> = g
            .edge_ids()
            .map(|e| (g.name(g.edge(e).from).to_string(), g.name(g.edge(e).to).to_string()))
            .collect();
        assert_eq!(
            pairs,
            [("S", "x"), ("S", "y"), ("x", "D"), ("y", "D")].map(|(a, b)| (a.to_string(), b.to_string()))
        );
    }

    #[test]
    fn slice_examples() {
        let g = chain_c();
        let all = ids(&[0, 1, 2]);
        assert_eq!(g.stage_slice(&all, 2, 3).unwrap(), ids(&[1, 2]));
        assert!(g.stage_slice(&all, 3, 2).unwrap().is_empty());
        assert!(g.stage_slice(&ids(&[]), 1, 3).unwrap().is_empty());
        assert!(matches!(g.stage_slice(&all, 0, 2), Err(ModelError::StageRange { .. })));
        assert!(g.stage_slice(&all, 1, 4).is_err());
    }

    #[test]
    fn slices_compose() {
        let g = chain_c();
        for mask in 0u8..8 {
            let es = EdgeSet::from_indices(3, (0..3).filter(|b| mask >> b & 1 == 1).map(EdgeId::new));
            for i in 1..=3 {
                for j in i..=3 {
                    for k in j + 1..=3 {
                        let left = g.stage_slice(&es, i, j).unwrap();
                        let right = g.stage_slice(&es, j + 1, k).unwrap();
                        assert_eq!(left.union(&right), g.stage_slice(&es, i, k).unwrap());
                        assert!(left.is_subset(&es));
                    }
                }
            }
        }
    }
}
