//! Hamilton circuit to multistage simple path reduction.
//!
//! For an undirected graph of order `n` and a pivot `p` the reduced graph has
//! `L = n` stages, `S = (p, 0)`, `D = (p, n)` and a copy `(u, l)` of every
//! other vertex on each inner stage `1..=n-1`. Every non-pivot edge `{a, b}`
//! becomes the arcs `(a, l-1) -> (b, l)` and `(b, l-1) -> (a, l)` on stages
//! `2..=n-1`; every pivot edge `{p, b}` becomes `S -> (b, 1)` and
//! `(b, n-1) -> D`. The copy `(u, l)` is labeled with every arc except those
//! touching `(u, 1), ..., (u, l-1)`, and `D` with every arc, so a simple path
//! can never visit the same source vertex twice.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::dense::Idx;
use crate::model::{DraftEset, GraphDraft, MultistageGraph, VertexId};
use crate::oracle::{verify_circuit, verify_simple_path};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on vertex {0}")]
    SelfLoop(u32),
    #[error("vertex {vertex} outside 1..={n}")]
    VertexRange { vertex: u32, n: u32 },
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(u32, u32),
}

/// A simple undirected graph on the vertices `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UndirectedGraph {
    n: u32,
    edges: BTreeSet<(u32, u32)>,
}

impl UndirectedGraph {
    pub fn new(n: u32, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self, GraphError> {
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            for v in [a, b] {
                if v == 0 || v > n {
                    return Err(GraphError::VertexRange { vertex: v, n });
                }
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(GraphError::DuplicateEdge(a.min(b), a.max(b)));
            }
        }
        Ok(UndirectedGraph { n, edges: set })
    }

    pub fn complete(n: u32) -> Self {
        let edges = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b)));
        UndirectedGraph::new(n, edges).expect("complete graph is simple")
    }

    /// The graph whose edges are the set bits of `mask` over the pairs
    /// `(1,2), (1,3), ..., (n-1,n)` in that order.
    pub fn from_mask(n: u32, mask: u64) -> Self {
        let pairs = (1..=n).flat_map(|a| (a + 1..=n).map(move |b| (a, b)));
        let edges = pairs.enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, p)| p);
        UndirectedGraph::new(n, edges).expect("mask graph is simple")
    }

    pub fn order(&self) -> u32 {
        self.n
    }

    /// Edges as `(min, max)` pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }

    /// `adj[a-1][b-1]`.
    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let n = self.n as usize;
        let mut adj = vec![vec![false; n]; n];
        for &(a, b) in &self.edges {
            adj[a as usize - 1][b as usize - 1] = true;
            adj[b as usize - 1][a as usize - 1] = true;
        }
        adj
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n as usize;
        if n == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for w in 0..n {
                if adj[u][w] && !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("graph of order {0} has no Hamilton circuit to encode (need n >= 3)")]
    TooSmall(u32),
    #[error("pivot {pivot} is not a vertex of a graph of order {n}")]
    BadPivot { pivot: u32, n: u32 },
    #[error("path is not a simple path of the reduced graph")]
    NotSimplePath,
    #[error("lifted walk is not a Hamilton circuit")]
    NotCircuit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductionStats {
    pub internal_vertices: usize,
    pub vertices: usize,
    pub edges: usize,
}

#[derive(Clone, Debug)]
pub struct ReductionMap {
    pub pivot: u32,
    pub n: u32,
    /// `(source vertex, stage)` to multistage vertex.
    pub forward: BTreeMap<(u32, usize), VertexId>,
    backward: Vec<(u32, usize)>,
    pub stats: ReductionStats,
}

impl ReductionMap {
    pub fn origin(&self, v: VertexId) -> (u32, usize) {
        self.backward[v.index()]
    }
}

fn copy_name(u: u32, stage: usize) -> String {
    format!("{u}.{stage}")
}

pub fn reduce_hc_to_msp(ug: &UndirectedGraph, pivot: u32) -> Result<(MultistageGraph, ReductionMap), ReductionError> {
    let n = ug.order();
    if n < 3 {
        return Err(ReductionError::TooSmall(n));
    }
    if pivot == 0 || pivot > n {
        return Err(ReductionError::BadPivot { pivot, n });
    }
    let l = n as usize;
    let mut draft = GraphDraft::new(l);
    draft = draft.vertex(&copy_name(pivot, 0), 0).vertex(&copy_name(pivot, l), l);
    let others: Vec<u32> = (1..=n).filter(|&u| u != pivot).collect();
    for &u in &others {
        for stage in 1..l {
            draft = draft.vertex(&copy_name(u, stage), stage);
        }
    }

    // Draft edge list plus the source vertices of its endpoints' copies.
    let mut touches: Vec<[(u32, usize); 2]> = Vec::new();
    let mut arc = |draft: GraphDraft, a: (u32, usize), b: (u32, usize)| {
        touches.push([a, b]);
        draft.edge_at(&copy_name(a.0, a.1), &copy_name(b.0, b.1), b.1)
    };
    for (a, b) in ug.edges() {
        if a == pivot || b == pivot {
            let other = if a == pivot { b } else { a };
            draft = arc(draft, (pivot, 0), (other, 1));
            draft = arc(draft, (other, l - 1), (pivot, l));
        } else {
            for stage in 2..l {
                draft = arc(draft, (a, stage - 1), (b, stage));
                draft = arc(draft, (b, stage - 1), (a, stage));
            }
        }
    }

    let all: Vec<usize> = (0..draft.edges.len()).collect();
    for &u in &others {
        for stage in 1..l {
            // Arcs touching (u, 1), ..., (u, stage - 1) are forbidden at (u, stage).
            let members = all
                .iter()
                .copied()
                .filter(|&i| {
                    !touches[i]
                        .iter()
                        .any(|&(x, s)| x == u && (1..stage).contains(&s))
                })
                .collect();
            draft.esets.push(DraftEset {
                vertex: copy_name(u, stage),
                members,
            });
        }
    }
    draft.esets.push(DraftEset {
        vertex: copy_name(pivot, l),
        members: all,
    });

    let g = MultistageGraph::from_draft(&draft).expect("reduction output is a valid multistage graph");
    let mut forward = BTreeMap::new();
    let mut backward = vec![(0, 0); g.vertex_count()];
    for v in g.vertex_ids() {
        let (u, s) = g.name(v).split_once('.').expect("reduction vertex names are u.l");
        let key = (u.parse().unwrap(), s.parse().unwrap());
        forward.insert(key, v);
        backward[v.index()] = key;
    }
    let stats = ReductionStats {
        internal_vertices: g.vertex_count() - 2,
        vertices: g.vertex_count(),
        edges: g.edge_count(),
    };
    Ok((
        g,
        ReductionMap {
            pivot,
            n,
            forward,
            backward,
            stats,
        },
    ))
}

/// Turns a simple path of the reduced graph into a Hamilton circuit
/// `pivot, u_1, ..., u_{n-1}, pivot` of the source graph.
pub fn lift_path(
    map: &ReductionMap,
    reduced: &MultistageGraph,
    ug: &UndirectedGraph,
    path: &[VertexId],
) -> Result<Vec<u32>, ReductionError> {
    if !matches!(verify_simple_path(reduced, path), Ok(true)) {
        return Err(ReductionError::NotSimplePath);
    }
    let circuit: Vec<u32> = path.iter().map(|&v| map.origin(v).0).collect();
    if !verify_circuit(ug, &circuit) {
        return Err(ReductionError::NotCircuit);
    }
    Ok(circuit)
}
