mod common;

use common::{sample, shape_classes};
use msplab::dense::Idx;
use msplab::operators::{change, init_all, Deletion, Operators, Schedule, SweepOrder};
use msplab::{EdgeId, EdgeSet, MultistageGraph, ReachMap, VertexId};
use proptest::prelude::*;

fn subset(g: &MultistageGraph, mask: &[bool]) -> EdgeSet {
    EdgeSet::from_indices(g.edge_count(), g.edge_ids().filter(|e| mask[e.index() % mask.len()]))
}

fn thinned(r: &ReachMap, mask: &[bool]) -> ReachMap {
    let mut k = 0;
    let entries = r
        .entries()
        .iter()
        .map(|s| {
            let mut s = s.clone();
            for e in s.to_vec() {
                k += 1;
                if !mask[k % mask.len()] {
                    s.remove(e);
                }
            }
            s
        })
        .collect();
    ReachMap::from_entries(entries)
}

fn graph_and_mask() -> impl Strategy<Value = (MultistageGraph, Vec<bool>, usize, usize, usize)> {
    (0usize..3, any::<u64>(), prop::collection::vec(any::<bool>(), 1..64), any::<usize>(), any::<usize>(), any::<usize>())
        .prop_map(|(class, seed, mask, a, b, c)| (sample(&shape_classes()[class].1, seed), mask, a, b, c))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tidy_contracts_and_is_idempotent((g, mask, a, b, _) in graph_and_mask()) {
        let es = subset(&g, &mask);
        let (u, v) = (VertexId::new(a % g.vertex_count()), VertexId::new(b % g.vertex_count()));
        let mut ops = Operators::new(&g);
        let t = ops.tidy(&es, u, v);
        prop_assert!(t.is_subset(&es));
        prop_assert_eq!(ops.tidy(&t, u, v), t.clone());
        if g.stage_of(u) >= g.stage_of(v) {
            prop_assert!(t.is_empty());
        }
        for e in t.iter() {
            let ed = g.edge(e);
            prop_assert!(ed.stage > g.stage_of(u) && ed.stage <= g.stage_of(v));
        }
    }

    #[test]
    fn comp_contracts_and_is_idempotent((g, mask, a, _, _) in graph_and_mask()) {
        let es = subset(&g, &mask);
        let v = VertexId::new(1 + a % (g.vertex_count() - 1));
        let r = thinned(&init_all(&g), &mask);
        let mut ops = Operators::new(&g);
        let c = ops.comp(&es, v, &r);
        prop_assert!(c.set.is_subset(&es));
        prop_assert!(c.sweeps <= es.len() + 1);
        prop_assert_eq!(ops.comp(&c.set, v, &r).set, c.set.clone());
    }

    #[test]
    fn comp_ignores_schedule((g, mask, a, _, _) in graph_and_mask()) {
        let es = subset(&g, &mask);
        let v = VertexId::new(1 + a % (g.vertex_count() - 1));
        let r = thinned(&init_all(&g), &mask);
        let mut ops = Operators::new(&g);
        let base = ops.comp(&es, v, &r).set;
        for order in [SweepOrder::Ascending, SweepOrder::Descending] {
            for deletion in [Deletion::Deferred, Deletion::Immediate] {
                let other = ops.comp_scheduled(&es, v, &r, Schedule { order, deletion });
                prop_assert_eq!(&other.set, &base);
            }
        }
    }

    #[test]
    fn change_only_shrinks((g, mask, _, _, c) in graph_and_mask()) {
        let e = EdgeId::new(c % g.edge_count());
        for r in [init_all(&g), thinned(&init_all(&g), &mask)] {
            let out = change(&r, e, &g);
            prop_assert!(out.is_subset(r.get(e)));
        }
    }
}
