#![allow(dead_code)]

use msplab::lab::{gen_msp, ShapeRange};
use msplab::{GraphDraft, MultistageGraph};

/// `S -> a -> b -> D` with `E(a) = {S-a}`, `E(b) = {S-a, a-b}` and `E(D)`
/// holding the listed chain edges (1 = S-a, 2 = a-b, 3 = b-D).
pub fn chain(sink: &[usize]) -> MultistageGraph {
    let pairs = [("S", "a"), ("a", "b"), ("b", "D")];
    let sink: Vec<(&str, &str)> = sink.iter().map(|&i| pairs[i - 1]).collect();
    let draft = GraphDraft::new(3)
        .vertex("S", 0)
        .vertex("a", 1)
        .vertex("b", 2)
        .vertex("D", 3)
        .edge("S", "a")
        .edge("a", "b")
        .edge("b", "D")
        .eset("a", &pairs[..1])
        .eset("b", &pairs[..2])
        .eset("D", &sink);
    MultistageGraph::from_draft(&draft).unwrap()
}

pub fn chain_c() -> MultistageGraph {
    chain(&[1, 2, 3])
}

pub fn chain_c_prime() -> MultistageGraph {
    chain(&[2, 3])
}

/// Named families of generator shapes used by the property suites.
pub fn shape_classes() -> Vec<(&'static str, ShapeRange)> {
    let class = |min_stages, max_stages, max_width| ShapeRange {
        min_stages,
        max_stages,
        max_width,
        edge_density: 0.5,
        eset_densities: vec![0.3, 0.5, 0.8],
    };
    vec![
        ("narrow", class(2, 5, 2)),
        ("medium", class(5, 9, 4)),
        ("wide", class(8, 12, 6)),
    ]
}

pub fn sample(range: &ShapeRange, seed: u64) -> MultistageGraph {
    gen_msp(&range.sample(seed).unwrap()).unwrap()
}
