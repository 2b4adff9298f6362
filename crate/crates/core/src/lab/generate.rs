//! Seeded instance generators.
//!
//! Randomness comes from ChaCha8 streams selected by `(seed, domain, key)`;
//! every random decision is addressed by its own stream and position, so an
//! instance depends only on its shape and seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::LabError;
use crate::dense::Idx;
use crate::model::{DraftEset, GraphDraft, MultistageGraph};
use crate::operators::Operators;
use crate::reduction::UndirectedGraph;

const CANDIDATE: u64 = 1;
const REPAIR_IN: u64 = 2;
const REPAIR_OUT: u64 = 3;
const LABEL: u64 = 4;
const SHAPE: u64 = 5;
const UGRAPH: u64 = 6;

pub(crate) fn stream(seed: u64, domain: u64, key: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(domain << 56 | (key & ((1 << 56) - 1)));
    rng
}

/// Layout of a random multistage instance.
#[derive(Clone, Debug, PartialEq)]
pub struct GenShape {
    /// `L`.
    pub stages: usize,
    /// Vertex count per stage `0..=L`; the first and last must be 1.
    pub widths: Vec<usize>,
    /// Probability that a candidate edge between adjacent stages exists.
    pub edge_density: f64,
    /// Probability that an edge joins a given `E(v)`.
    pub eset_density: f64,
    pub seed: u64,
}

impl GenShape {
    pub fn check(&self) -> Result<(), LabError> {
        let bad = |m: String| Err(LabError::Shape(m));
        if self.stages == 0 {
            return bad("at least one stage is required".into());
        }
        if self.widths.len() != self.stages + 1 {
            return bad(format!("{} widths for {} stages", self.widths.len(), self.stages));
        }
        if self.widths[0] != 1 || self.widths[self.stages] != 1 {
            return bad("first and last stage must have width 1".into());
        }
        if let Some(l) = self.widths.iter().position(|&w| w == 0) {
            return bad(format!("stage {l} has zero width"));
        }
        for (what, p) in [("edge density", self.edge_density), ("eset density", self.eset_density)] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{what} {p} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

fn vertex_name(shape: &GenShape, stage: usize, i: usize) -> String {
    if stage == 0 {
        "S".into()
    } else if stage == shape.stages {
        "D".into()
    } else {
        format!("v{stage}_{i}")
    }
}

/// Draws a random labeled multistage graph.
///
/// Each candidate edge is kept with `edge_density`; vertices left without an
/// incoming or outgoing edge then get one to a uniformly chosen neighbour
/// stage vertex, and a final tidy from `S` to `D` drops anything off an
/// `S -> D` path. Each `E(v)` takes every edge independently with
/// `eset_density`.
pub fn gen_msp(shape: &GenShape) -> Result<MultistageGraph, LabError> {
    shape.check()?;
    let l = shape.stages;
    let w = &shape.widths;
    let seed = shape.seed;

    let mut adj: Vec<Vec<Vec<bool>>> = Vec::with_capacity(l + 1);
    adj.push(Vec::new());
    for stage in 1..=l {
        let mut rng = stream(seed, CANDIDATE, stage as u64);
        let m = (0..w[stage - 1])
            .map(|_| (0..w[stage]).map(|_| rng.random::<f64>() < shape.edge_density).collect())
            .collect();
        adj.push(m);
    }
    for stage in 1..=l {
        for j in 0..w[stage] {
            if !(0..w[stage - 1]).any(|i| adj[stage][i][j]) {
                let i = stream(seed, REPAIR_IN, (stage as u64) << 32 | j as u64).random_range(0..w[stage - 1]);
                adj[stage][i][j] = true;
            }
        }
    }
    for stage in 0..l {
        for i in 0..w[stage] {
            if !(0..w[stage + 1]).any(|j| adj[stage + 1][i][j]) {
                let j = stream(seed, REPAIR_OUT, (stage as u64) << 32 | i as u64).random_range(0..w[stage + 1]);
                adj[stage + 1][i][j] = true;
            }
        }
    }

    let mut draft = GraphDraft::new(l);
    for (stage, &width) in w.iter().enumerate() {
        for i in 0..width {
            draft = draft.vertex(&vertex_name(shape, stage, i), stage);
        }
    }
    for stage in 1..=l {
        for i in 0..w[stage - 1] {
            for j in 0..w[stage] {
                if adj[stage][i][j] {
                    let (a, b) = (vertex_name(shape, stage - 1, i), vertex_name(shape, stage, j));
                    draft = draft.edge_at(&a, &b, stage);
                }
            }
        }
    }
    let skeleton = MultistageGraph::from_draft(&draft).map_err(|e| LabError::Shape(e.to_string()))?;
    let skeleton = prune_to_paths(&skeleton);

    let mut draft = skeleton.to_draft();
    draft.esets = skeleton
        .vertex_ids()
        .skip(1)
        .map(|v| {
            let mut rng = stream(seed, LABEL, v.index() as u64);
            let members = (0..skeleton.edge_count())
                .filter(|_| rng.random::<f64>() < shape.eset_density)
                .collect();
            DraftEset {
                vertex: skeleton.name(v).to_string(),
                members,
            }
        })
        .collect();
    MultistageGraph::from_draft(&draft).map_err(|e| LabError::Shape(e.to_string()))
}

/// Drops edges (and then inner vertices) not on any `S -> D` path.
fn prune_to_paths(g: &MultistageGraph) -> MultistageGraph {
    let kept = Operators::new(g).tidy(&g.all_edges(), g.source(), g.sink());
    if kept.len() == g.edge_count() {
        return g.clone();
    }
    let mut draft = g.to_draft();
    draft.edges = kept.iter().map(|e| draft.edges[e.index()].clone()).collect();
    draft.esets.clear();
    let used: std::collections::HashSet<&str> = draft
        .edges
        .iter()
        .flat_map(|e| [e.from.as_str(), e.to.as_str()])
        .collect();
    let vertices = draft
        .vertices
        .iter()
        .filter(|v| v.stage == 0 || v.stage == g.stages() || used.contains(v.name.as_str()))
        .cloned()
        .collect();
    draft.vertices = vertices;
    MultistageGraph::from_draft(&draft).expect("pruning keeps the graph valid")
}

/// Each pair `{a, b}` of `1..=n` is an edge with probability `q`.
pub fn gen_ugraph(n: u32, q: f64, seed: u64) -> Result<UndirectedGraph, LabError> {
    if !(0.0..=1.0).contains(&q) {
        return Err(LabError::Shape(format!("edge probability {q} outside [0, 1]")));
    }
    let mut rng = stream(seed, UGRAPH, n as u64);
    let mut edges = Vec::new();
    for a in 1..=n {
        for b in a + 1..=n {
            if rng.random::<f64>() < q {
                edges.push((a, b));
            }
        }
    }
    Ok(UndirectedGraph::new(n, edges).expect("generated pairs are simple"))
}

/// Ranges from which per-seed shapes are drawn.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeRange {
    pub min_stages: usize,
    pub max_stages: usize,
    pub max_width: usize,
    pub edge_density: f64,
    pub eset_densities: Vec<f64>,
}

impl ShapeRange {
    /// The shape used for `seed`: `L` uniform in the stage range, every inner
    /// width uniform in `1..=max_width`, eset density uniform over the list.
    pub fn sample(&self, seed: u64) -> Result<GenShape, LabError> {
        if self.min_stages == 0 || self.min_stages > self.max_stages || self.max_width == 0 {
            return Err(LabError::Shape("empty stage or width range".into()));
        }
        if self.eset_densities.is_empty() {
            return Err(LabError::Shape("no eset density given".into()));
        }
        let mut rng = stream(seed, SHAPE, 0);
        let stages = rng.random_range(self.min_stages..=self.max_stages);
        let widths = (0..=stages)
            .map(|s| {
                if s == 0 || s == stages {
                    1
                } else {
                    rng.random_range(1..=self.max_width)
                }
            })
            .collect();
        let p = self.eset_densities[rng.random_range(0..self.eset_densities.len())];
        Ok(GenShape {
            stages,
            widths,
            edge_density: self.edge_density,
            eset_density: p,
            seed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::serialize_instance;
    use crate::oracle::{oracle_simple_path, Budget, OracleAnswer};
    use crate::zh::{zh_solve, Answer, SolveOptions};

    fn shape(p: f64, seed: u64) -> GenShape {
        GenShape {
            stages: 6,
            widths: vec![1, 3, 4, 2, 4, 3, 1],
            edge_density: 0.5,
            eset_density: p,
            seed,
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a = serialize_instance(&gen_msp(&shape(0.5, 42)).unwrap());
        let b = serialize_instance(&gen_msp(&shape(0.5, 42)).unwrap());
        let c = serialize_instance(&gen_msp(&shape(0.5, 43)).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn every_vertex_on_a_path() {
        for seed in 0..50 {
            let g = gen_msp(&GenShape {
                edge_density: 0.1,
                ..shape(0.5, seed)
            })
            .unwrap();
            let kept = crate::operators::tidy(&g.all_edges(), g.source(), g.sink(), &g);
            assert_eq!(kept.len(), g.edge_count());
            assert_eq!(g.vertex_count(), 1 + 3 + 4 + 2 + 4 + 3 + 1);
            assert!(g.vertex_ids().skip(1).all(|v| g.in_degree(v) >= 1));
        }
    }

    #[test]
    fn empty_labels_mean_no() {
        let g = gen_msp(&shape(0.0, 7)).unwrap();
        assert!(g.esets().iter().all(|s| s.is_empty()));
        assert_eq!(zh_solve(&g, SolveOptions::default()).unwrap().answer, Answer::No);
        assert_eq!(oracle_simple_path(&g, Budget::default()).answer, OracleAnswer::No);
    }

    #[test]
    fn full_labels_mean_yes() {
        let g = gen_msp(&shape(1.0, 7)).unwrap();
        assert!(g.vertex_ids().skip(1).all(|v| g.eset(v).len() == g.edge_count()));
        assert_eq!(oracle_simple_path(&g, Budget::default()).answer, OracleAnswer::Yes);
    }

    #[test]
    fn rejects_bad_shapes() {
        let mut s = shape(0.5, 1);
        s.widths[2] = 0;
        assert!(matches!(gen_msp(&s), Err(LabError::Shape(_))));
        let mut s = shape(0.5, 1);
        s.widths[0] = 2;
        assert!(gen_msp(&s).is_err());
        assert!(gen_msp(&GenShape { eset_density: 1.5, ..shape(0.5, 1) }).is_err());
    }

    #[test]
    fn ugraph_examples() {
        let k = gen_ugraph(5, 1.0, 3).unwrap();
        assert_eq!(k, UndirectedGraph::complete(5));
        let e = gen_ugraph(5, 0.0, 3).unwrap();
        assert_eq!(e.edge_count(), 0);
        assert_eq!(
            crate::oracle::oracle_hamilton(&e, Budget::default()).answer,
            OracleAnswer::No
        );
        assert_eq!(gen_ugraph(7, 0.5, 9).unwrap(), gen_ugraph(7, 0.5, 9).unwrap());
    }

    #[test]
    fn sampled_shapes_stay_in_range() {
        let range = ShapeRange {
            min_stages: 4,
            max_stages: 12,
            max_width: 6,
            edge_density: 0.5,
            eset_densities: vec![0.3, 0.5, 0.8],
        };
        for seed in 0..200 {
            let s = range.sample(seed).unwrap();
            assert!((4..=12).contains(&s.stages));
            assert!(s.widths.iter().all(|&w| (1..=6).contains(&w)));
            assert!(s.check().is_ok());
            assert_eq!(range.sample(seed).unwrap(), s);
        }
    }
}
