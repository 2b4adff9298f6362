//! The four edge-set operators the Z-H fixpoint is built from.
//!
//! * [`tidy`] keeps the edges of a set that lie on some `u -> v` path
//!   running entirely inside the set.
//! * [`init_reachable`] computes the initial reachable set `R(e)` of an edge.
//! * [`comp`] contracts an edge set against the reachable sets until every
//!   surviving edge can still be continued to `v` inside its own `R`.
//! * [`change`] contracts one reachable set `R(u, v, l)` using the sets of
//!   earlier stages.
//!
//! All fixpoints sweep candidates in ascending edge-id order, collect the
//! deletions and apply them at the end of the sweep.

use serde::Serialize;

use crate::dense::Idx;
use crate::model::{EdgeId, EdgeSet, MultistageGraph, VertexId};

/// `R(e)` for every edge `e`, with change tracking.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReachMap {
    entries: Vec<EdgeSet>,
    entry_versions: Vec<u64>,
    version: u64,
}

impl ReachMap {
    pub fn from_entries(entries: Vec<EdgeSet>) -> Self {
        let n = entries.len();
        ReachMap {
            entries,
            entry_versions: vec![0; n],
            version: 0,
        }
    }

    #[inline]
    pub fn get(&self, e: EdgeId) -> &EdgeSet {
        &self.entries[e.index()]
    }

    /// Replaces `R(e)`; the new value must be a subset of the old one.
    /// Returns `true` if the entry changed.
    pub fn set(&mut self, e: EdgeId, value: EdgeSet) -> bool {
        let slot = &mut self.entries[e.index()];
        debug_assert!(value.is_subset(slot), "R({e}) may only shrink");
        // Monotone updates: equal cardinality means equal content.
        if value.len() == slot.len() {
            return false;
        }
        *slot = value;
        self.entry_versions[e.index()] += 1;
        self.version += 1;
        true
    }

    pub fn entries(&self) -> &[EdgeSet] {
        &self.entries
    }

    /// Incremented on every effective update of any entry.
    #[inline]
    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn entry_version(&self, e: EdgeId) -> u64 {
        self.entry_versions[e.index()]
    }

    pub fn total_size(&self) -> usize {
        self.entries.iter().map(EdgeSet::len).sum()
    }

    /// Content equality, ignoring version counters.
    pub fn same_sets(&self, other: &ReachMap) -> bool {
        self.entries == other.entries
    }
}

/// The current `E(v)` of every vertex, with change tracking.
#[derive(Clone, Debug)]
pub struct EdgeLabels {
    sets: Vec<EdgeSet>,
    versions: Vec<u64>,
}

impl EdgeLabels {
    pub fn from_graph(g: &MultistageGraph) -> Self {
        EdgeLabels {
            sets: g.esets().to_vec(),
            versions: vec![0; g.vertex_count()],
        }
    }

    #[inline]
    pub fn get(&self, v: VertexId) -> &EdgeSet {
        &self.sets[v.index()]
    }

    #[inline]
    pub fn version(&self, v: VertexId) -> u64 {
        self.versions[v.index()]
    }

    /// Replaces `E(v)` by a subset of itself. Returns `true` on change.
    pub fn set(&mut self, v: VertexId, value: EdgeSet) -> bool {
        let slot = &mut self.sets[v.index()];
        debug_assert!(value.is_subset(slot), "E(v) may only shrink");
        if value.len() == slot.len() {
            return false;
        }
        *slot = value;
        self.versions[v.index()] += 1;
        true
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OpCounts {
    pub tidy: u64,
    pub init: u64,
    pub comp: u64,
    pub change: u64,
}

/// Final set of a fixpoint operator plus the number of sweeps it took,
/// the last (non-changing) sweep included.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixpoint {
    pub set: EdgeSet,
    pub sweeps: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SweepOrder {
    #[default]
    Ascending,
    Descending,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Deletion {
    /// Deletions found in a sweep are applied when the sweep ends.
    #[default]
    Deferred,
    /// Each deletion is visible to the rest of the sweep.
    Immediate,
}

/// Scheduling of the deletion test inside [`comp`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Schedule {
    pub order: SweepOrder,
    pub deletion: Deletion,
}

#[derive(Clone, Debug)]
struct MemoEntry {
    reach_version: u64,
    label_version: u64,
    set: EdgeSet,
}

/// Operator evaluation context over one graph: call counters plus the
/// `comp(E(v), v, R)` memo keyed by the versions of `R` and `E(v)`.
pub struct Operators<'g> {
    g: &'g MultistageGraph,
    counts: OpCounts,
    memo: Vec<Option<MemoEntry>>,
}

impl<'g> Operators<'g> {
    pub fn new(g: &'g MultistageGraph) -> Self {
        Operators {
            g,
            counts: OpCounts::default(),
            memo: vec![None; g.vertex_count()],
        }
    }

    pub fn counts(&self) -> OpCounts {
        self.counts
    }

    pub fn graph(&self) -> &'g MultistageGraph {
        self.g
    }

    pub fn tidy(&mut self, es: &EdgeSet, u: VertexId, v: VertexId) -> EdgeSet {
        self.counts.tidy += 1;
        let g = self.g;
        let (su, sv) = (g.stage_of(u), g.stage_of(v));
        let mut out = g.empty_edge_set();
        if su >= sv || es.is_empty() {
            return out;
        }
        let range = g.edge_range(su + 1, sv);

        let mut fwd = g.empty_vertex_set();
        fwd.insert(u);
        for e in es.iter() {
            let i = e.index();
            if i < range.start {
                continue;
            }
            if i >= range.end {
                break;
            }
            let ed = g.edge(e);
            if fwd.contains(ed.from) {
                fwd.insert(ed.to);
            }
        }
        if !fwd.contains(v) {
            return out;
        }
        let mut bwd = g.empty_vertex_set();
        bwd.insert(v);
        for e in es.iter_rev() {
            let i = e.index();
            if i >= range.end {
                continue;
            }
            if i < range.start {
                break;
            }
            let ed = g.edge(e);
            if bwd.contains(ed.to) && fwd.contains(ed.from) {
                bwd.insert(ed.from);
                out.insert(e);
            }
        }
        debug_assert!(out.is_subset(es));
        out
    }

    /// Whether `to` is reachable from `from` using only edges of `es`.
    fn reaches(&self, es: &EdgeSet, from: VertexId, to: VertexId) -> bool {
        let g = self.g;
        let (sf, st) = (g.stage_of(from), g.stage_of(to));
        if sf >= st {
            return from == to;
        }
        let range = g.edge_range(sf + 1, st);
        let mut fwd = g.empty_vertex_set();
        fwd.insert(from);
        for e in es.iter() {
            let i = e.index();
            if i < range.start {
                continue;
            }
            if i >= range.end {
                break;
            }
            let ed = g.edge(e);
            if fwd.contains(ed.from) {
                if ed.to == to {
                    return true;
                }
                fwd.insert(ed.to);
            }
        }
        false
    }

    pub fn init_reachable(&mut self, e: EdgeId) -> EdgeSet {
        self.counts.init += 1;
        let g = self.g;
        let mut holders = g.empty_vertex_set();
        for w in g.vertex_ids().skip(1) {
            if g.eset(w).contains(e) {
                holders.insert(w);
            }
        }
        let mut es = g.empty_edge_set();
        for f in g.edge_range(2, g.stages()).map(EdgeId::new) {
            let fe = g.edge(f);
            if holders.contains(fe.from) && holders.contains(fe.to) {
                es.insert(f);
            }
        }
        let out = self.tidy(&es, g.edge(e).to, g.sink());
        debug_assert!(out.iter().all(|f| g.edge(f).stage > g.edge(e).stage));
        out
    }

    pub fn init_all(&mut self) -> ReachMap {
        let entries = self.g.edge_ids().map(|e| self.init_reachable(e)).collect();
        ReachMap::from_entries(entries)
    }

    pub fn comp(&mut self, es: &EdgeSet, v: VertexId, r: &ReachMap) -> Fixpoint {
        self.comp_scheduled(es, v, r, Schedule::default())
    }

    pub fn comp_scheduled(&mut self, es: &EdgeSet, v: VertexId, r: &ReachMap, schedule: Schedule) -> Fixpoint {
        assert_ne!(v, self.g.source(), "comp is undefined at the source");
        self.counts.comp += 1;
        let g = self.g;
        let s = g.source();
        let mut cur = es.clone();
        let mut sweeps = 0;
        loop {
            sweeps += 1;
            let mut next = cur.clone();
            let members: Vec<EdgeId> = match schedule.order {
                SweepOrder::Ascending => cur.iter().collect(),
                SweepOrder::Descending => cur.iter_rev().collect(),
            };
            for e in members {
                let ed = g.edge(e);
                if ed.to == v {
                    continue;
                }
                let live = match schedule.deletion {
                    Deletion::Deferred => &cur,
                    Deletion::Immediate => &next,
                };
                let through = r.get(e).intersection(live);
                if !self.reaches(&through, ed.to, v) {
                    next.remove(e);
                }
            }
            let next = self.tidy(&next, s, v);
            if next == cur {
                break;
            }
            cur = next;
        }
        debug_assert!(cur.is_subset(es));
        debug_assert!(sweeps <= es.len() + 1);
        Fixpoint { set: cur, sweeps }
    }

    /// `comp(E(v), v, R)` for the current labels, memoized.
    pub fn comp_label(&mut self, v: VertexId, labels: &EdgeLabels, r: &ReachMap) -> EdgeSet {
        let (rv, lv) = (r.version(), labels.version(v));
        if let Some(m) = &self.memo[v.index()] {
            if m.reach_version == rv && m.label_version == lv {
                return m.set.clone();
            }
        }
        let set = self.comp(labels.get(v), v, r).set;
        self.remember(v, labels, r, set.clone());
        set
    }

    /// Records `set` as the value of `comp(E(v), v, R)` for the current
    /// versions.
    pub(crate) fn remember(&mut self, v: VertexId, labels: &EdgeLabels, r: &ReachMap, set: EdgeSet) {
        self.memo[v.index()] = Some(MemoEntry {
            reach_version: r.version(),
            label_version: labels.version(v),
            set,
        });
    }

    /// Runs the change fixpoint on `R(e)` in place and returns its sweep count.
    pub fn change_in_place(&mut self, e: EdgeId, labels: &EdgeLabels, r: &mut ReachMap) -> usize {
        self.counts.change += 1;
        let g = self.g;
        let ed = *g.edge(e);
        let initial = r.get(e).len();
        let mut sweeps = 0;
        loop {
            sweeps += 1;
            let cur = r.get(e).clone();
            let mut next = cur.clone();
            // No stage precedes stage 1, so the guard holds vacuously there.
            if ed.stage > 1 {
                for cand in cur.iter() {
                    if g.edge(cand).stage <= ed.stage {
                        continue;
                    }
                    if !self.change_guard(e, cand, labels, r) {
                        next.remove(cand);
                    }
                }
            }
            let next = self.tidy(&next, ed.to, g.sink());
            if !r.set(e, next) {
                break;
            }
        }
        debug_assert!(sweeps <= initial + 1);
        sweeps
    }

    /// Decides whether `cand = <a, b, k>` stays in `R(e)`.
    fn change_guard(&mut self, e: EdgeId, cand: EdgeId, labels: &EdgeLabels, r: &ReachMap) -> bool {
        let g = self.g;
        let ed = *g.edge(e);
        let b = g.edge(cand).to;
        let cb = self.comp_label(b, labels, r);
        if !cb.contains(e) || !cb.contains(cand) {
            return false;
        }
        let mut carriers = g.empty_edge_set();
        for f in g.edge_range(1, ed.stage - 1).map(EdgeId::new) {
            let rf = r.get(f);
            if !rf.contains(e) || !rf.contains(cand) {
                continue;
            }
            let through = rf.intersection(&cb);
            let kept = self.tidy(&through, g.edge(f).to, b);
            if kept.contains(e) && kept.contains(cand) {
                carriers.insert(f);
            }
        }
        if carriers.is_empty() {
            return false;
        }
        let bound = self.tidy(&carriers, g.source(), ed.from);
        !self.comp(&bound, ed.from, r).set.is_empty()
    }
}

pub fn tidy(es: &EdgeSet, u: VertexId, v: VertexId, g: &MultistageGraph) -> EdgeSet {
    Operators::new(g).tidy(es, u, v)
}

pub fn init_reachable(g: &MultistageGraph, e: EdgeId) -> EdgeSet {
    Operators::new(g).init_reachable(e)
}

pub fn init_all(g: &MultistageGraph) -> ReachMap {
    Operators::new(g).init_all()
}

pub fn comp(es: &EdgeSet, v: VertexId, r: &ReachMap, g: &MultistageGraph) -> EdgeSet {
    Operators::new(g).comp(es, v, r).set
}

/// One change fixpoint on `R(e)` against the input edge sets of `g`;
/// returns the new `R(e)` without touching `r`.
pub fn change(r: &ReachMap, e: EdgeId, g: &MultistageGraph) -> EdgeSet {
    let labels = EdgeLabels::from_graph(g);
    let mut work = r.clone();
    Operators::new(g).change_in_place(e, &labels, &mut work);
    work.get(e).clone()
}
