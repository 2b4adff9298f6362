//! The per-stage in-degree vector of a multistage graph and its
//! lexicographic order.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use super::LabError;
use crate::model::MultistageGraph;

/// `(x_1, ..., x_L)` with `x_l = Σ_{v in stage l} (d(v) - 1)` for
/// `l < L` and `x_L = 0`, where `d(v)` is the in-degree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct GraphVector(pub Vec<i64>);

impl fmt::Display for GraphVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

pub fn vec_metric(g: &MultistageGraph) -> GraphVector {
    let l = g.stages();
    let mut x = vec![0i64; l];
    for stage in 1..l {
        x[stage - 1] = g
            .stage_vertices(stage)
            .map(|v| g.in_degree(v) as i64 - 1)
            .sum();
    }
    GraphVector(x)
}

pub fn lex_compare(a: &GraphVector, b: &GraphVector) -> Result<Ordering, LabError> {
    if a.0.len() != b.0.len() {
        return Err(LabError::DimensionMismatch {
            left: a.0.len(),
            right: b.0.len(),
        });
    }
    for (x, y) in a.0.iter().zip(&b.0) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            other => return Ok(other),
        }
    }
    Ok(Ordering::Equal)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::chain_c;
    use crate::model::GraphDraft;

    fn v(x: &[i64]) -> GraphVector {
        GraphVector(x.to_vec())
    }

    #[test]
    fn compare_examples() {
        assert_eq!(lex_compare(&v(&[0, 1, 0]), &v(&[1, 0, 0])).unwrap(), Ordering::Less);
        assert_eq!(lex_compare(&v(&[3, 3]), &v(&[3, 3])).unwrap(), Ordering::Equal);
        assert_eq!(lex_compare(&v(&[2, 0]), &v(&[1, 9])).unwrap(), Ordering::Greater);
        assert!(matches!(
            lex_compare(&v(&[1]), &v(&[1, 2])),
            Err(LabError::DimensionMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn chain_vectors() {
        assert_eq!(vec_metric(&chain_c()), v(&[0, 0, 0]));
        let d = GraphDraft::new(3)
            .vertex("S", 0)
            .vertex("a", 1)
            .vertex("a2", 1)
            .vertex("b", 2)
            .vertex("D", 3)
            .edge("S", "a")
            .edge("S", "a2")
            .edge("a", "b")
            .edge("a2", "b")
            .edge("b", "D");
        let g = MultistageGraph::from_draft(&d).unwrap();
        assert_eq!(vec_metric(&g), v(&[0, 1, 0]));
    }
}
