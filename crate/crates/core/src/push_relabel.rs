//! Weighted push-relabel with levels capped at 9h.
//!
//! Every alive vertex that is not an unsaturated sink keeps an admissible
//! out-arc, so a source can always walk downhill to a sink and push a whole
//! path at once. The returned flow has residual source-to-sink w-distance
//! above 3h and average w-length at most 9h.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::dynforest::DynForest;
use crate::graph::{arc_ends, DiGraph, Flow, FlowInstance};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PushRelabelError {
    #[error("edge {0} has weight zero")]
    WeightZero(usize),
    #[error("total source exceeds total sink")]
    BadInstance,
    #[error("weight vector has length {got}, expected {expected}")]
    WeightLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Paths are walked arc by arc.
    Unit,
    /// Paths live in a link-cut forest; augmentation is a path update.
    Capacitated,
}

#[derive(Debug, Clone)]
pub struct PrConfig {
    pub mode: Mode,
    /// Scan every arc for the three level invariants after each relabel and
    /// augmentation. Meant for m up to a few hundred.
    pub debug_invariants: bool,
    pub record_paths: bool,
    /// Keep a copy of all levels taken just before each augmentation.
    pub record_labels: bool,
    /// Kill, in one step, every vertex that can no longer reach an
    /// unsaturated sink in the residual graph. Those vertices would climb to
    /// 9h+1 anyway; doing it at once keeps the level invariants.
    pub prune_unreachable: bool,
}

impl Default for PrConfig {
    fn default() -> Self {
        PrConfig {
            mode: Mode::Capacitated,
            debug_invariants: false,
            record_paths: false,
            record_labels: false,
            prune_unreachable: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AugmentRecord {
    pub source: usize,
    pub sink: usize,
    /// Residual arcs in path order (2e forward, 2e+1 backward).
    pub arcs: Vec<usize>,
    pub amount: i64,
    pub w_length: i64,
    pub labels: Option<Vec<i64>>,
}

#[derive(Debug, Clone)]
pub struct PushRelabelResult {
    pub flow: Flow,
    pub labels: Vec<i64>,
    pub dead: Vec<bool>,
    pub h: i64,
    pub value: i64,
    pub augmentations: Vec<AugmentRecord>,
    pub augment_count: u64,
    /// Times an arc of the edge was saturated by an augmentation.
    pub saturations: Vec<u64>,
    /// Times an arc of the edge changed between admissible and inadmissible.
    pub flips: Vec<u64>,
    /// Distinct levels each vertex was raised to.
    pub level_visits: Vec<u64>,
    pub relabels: u64,
    pub pruned: u64,
    pub invariant_checks: u64,
    pub violations: Vec<String>,
}

/// ℓ(s) − ℓ(t) under the final labels.
pub fn label_gap_certificate(result: &PushRelabelResult, s: usize, t: usize) -> i64 {
    result.labels[s] - result.labels[t]
}

pub fn push_relabel(
    inst: &FlowInstance,
    w: &[i64],
    h: i64,
    cfg: &PrConfig,
) -> Result<PushRelabelResult, PushRelabelError> {
    if w.len() != inst.m() {
        return Err(PushRelabelError::WeightLength {
            expected: inst.m(),
            got: w.len(),
        });
    }
    if let Some(e) = w.iter().position(|&x| x <= 0) {
        return Err(PushRelabelError::WeightZero(e));
    }
    if inst.source.iter().sum::<i64>() > inst.sink.iter().sum::<i64>() {
        return Err(PushRelabelError::BadInstance);
    }
    let mut s = Solver::new(inst, w, h.max(0), cfg);
    s.run();
    Ok(s.finish())
}

struct Solver<'a> {
    g: &'a DiGraph,
    cap: &'a [i64],
    w: &'a [i64],
    h: i64,
    limit: i64,
    cfg: &'a PrConfig,
    f: Vec<i64>,
    src_rem: Vec<i64>,
    snk_rem: Vec<i64>,
    level: Vec<i64>,
    dead: Vec<bool>,
    adm: Vec<bool>,
    adm_out: Vec<BTreeSet<usize>>,
    // incident edges grouped by weight, with the next level each weight divides
    groups: Vec<Vec<(i64, Vec<usize>)>>,
    next: Vec<BinaryHeap<Reverse<(i64, usize)>>>,
    todo: Vec<usize>,
    queued: Vec<bool>,
    sources: Vec<usize>,
    forest: Option<DynForest>,
    tree_arc: Vec<usize>,
    value: i64,
    augmentations: Vec<AugmentRecord>,
    augment_count: u64,
    saturations: Vec<u64>,
    flips: Vec<u64>,
    level_visits: Vec<u64>,
    relabels: u64,
    pruned: u64,
    invariant_checks: u64,
    violations: Vec<String>,
    reach_dirty: bool,
}

const NONE: usize = usize::MAX;

impl<'a> Solver<'a> {
    fn new(inst: &'a FlowInstance, w: &'a [i64], h: i64, cfg: &'a PrConfig) -> Self {
        let g = &inst.graph;
        let n = g.n();
        let m = g.m();
        let mut src_rem = inst.source.clone();
        let mut snk_rem = inst.sink.clone();
        let mut value = 0;
        for v in 0..n {
            let a = src_rem[v].min(snk_rem[v]);
            src_rem[v] -= a;
            snk_rem[v] -= a;
            value += a;
        }
        let mut groups = Vec::with_capacity(n);
        let mut next = Vec::with_capacity(n);
        for v in 0..n {
            let mut inc: Vec<(i64, usize)> = g
                .out_edges(v)
                .iter()
                .chain(g.in_edges(v))
                .map(|&e| (w[e], e))
                .collect();
            inc.sort_unstable();
            let mut gv: Vec<(i64, Vec<usize>)> = Vec::new();
            for (wt, e) in inc {
                match gv.last_mut() {
                    Some((lw, es)) if *lw == wt => es.push(e),
                    _ => gv.push((wt, vec![e])),
                }
            }
            let heap = gv
                .iter()
                .enumerate()
                .map(|(i, (wt, _))| Reverse((*wt, i)))
                .collect();
            groups.push(gv);
            next.push(heap);
        }
        let mut sources: Vec<usize> = (0..n).filter(|&v| src_rem[v] > 0).collect();
        sources.reverse();
        let forest = match cfg.mode {
            Mode::Capacitated => Some(DynForest::new(n)),
            Mode::Unit => None,
        };
        let mut s = Solver {
            g,
            cap: &inst.cap,
            w,
            h,
            limit: 9 * h,
            cfg,
            f: vec![0; m],
            src_rem,
            snk_rem,
            level: vec![0; n],
            dead: vec![false; n],
            adm: vec![false; 2 * m],
            adm_out: vec![BTreeSet::new(); n],
            groups,
            next,
            todo: Vec::new(),
            queued: vec![false; n],
            sources,
            forest,
            tree_arc: vec![NONE; n],
            value,
            augmentations: Vec::new(),
            augment_count: 0,
            saturations: vec![0; m],
            flips: vec![0; m],
            level_visits: vec![0; n],
            relabels: 0,
            pruned: 0,
            invariant_checks: 0,
            violations: Vec::new(),
            reach_dirty: true,
        };
        for v in (0..n).rev() {
            s.enqueue(v);
        }
        s
    }

    fn needs_relabel(&self, v: usize) -> bool {
        !self.dead[v] && self.snk_rem[v] == 0 && self.adm_out[v].is_empty()
    }

    fn enqueue(&mut self, v: usize) {
        if !self.queued[v] && self.needs_relabel(v) {
            self.queued[v] = true;
            self.todo.push(v);
        }
    }

    /// Current residual capacity of arc `a`.
    fn cf(&mut self, a: usize) -> i64 {
        let e = a >> 1;
        let (x, y) = arc_ends(self.g, a);
        if self.tree_arc[x] == a {
            return self.forest.as_mut().unwrap().value(x).unwrap();
        }
        if self.tree_arc[y] == (a ^ 1) {
            let r = self.forest.as_mut().unwrap().value(y).unwrap();
            return self.cap[e] - r;
        }
        if a & 1 == 0 {
            self.cap[e] - self.f[e]
        } else {
            self.f[e]
        }
    }

    fn write_back(&mut self, a: usize, residual: i64) {
        let e = a >> 1;
        self.f[e] = if a & 1 == 0 {
            self.cap[e] - residual
        } else {
            residual
        };
    }

    fn detach(&mut self, x: usize) {
        let a = self.tree_arc[x];
        if a != NONE {
            let r = self.forest.as_mut().unwrap().cut(x).unwrap();
            self.tree_arc[x] = NONE;
            self.write_back(a, r);
        }
    }

    fn set_adm(&mut self, a: usize, on: bool) {
        if self.adm[a] == on {
            return;
        }
        self.adm[a] = on;
        self.flips[a >> 1] += 1;
        let (x, _) = arc_ends(self.g, a);
        if on {
            self.adm_out[x].insert(a);
        } else {
            self.adm_out[x].remove(&a);
            if self.tree_arc[x] == a {
                self.detach(x);
            }
            self.enqueue(x);
        }
    }

    fn relabel(&mut self, v: usize) {
        let target = match self.next[v].peek() {
            Some(&Reverse((l, _))) => l.min(self.limit + 1),
            None => self.limit + 1,
        };
        self.relabels += 1;
        self.level_visits[v] += 1;
        self.level[v] = target;
        if target > self.limit {
            self.dead[v] = true;
            return;
        }
        while let Some(&Reverse((l, gi))) = self.next[v].peek() {
            if l != target {
                break;
            }
            self.next[v].pop();
            let (wt, len) = (self.groups[v][gi].0, self.groups[v][gi].1.len());
            for k in 0..len {
                let e = self.groups[v][gi].1[k];
                for a in [2 * e, 2 * e + 1] {
                    let (x, y) = arc_ends(self.g, a);
                    let ok = self.level[x] - self.level[y] >= 2 * wt && self.cf(a) > 0;
                    self.set_adm(a, ok);
                }
            }
            self.next[v].push(Reverse((l + wt, gi)));
        }
    }

    fn drain(&mut self) {
        while let Some(v) = self.todo.pop() {
            self.queued[v] = false;
            while self.needs_relabel(v) {
                self.relabel(v);
                if self.cfg.debug_invariants {
                    self.check_invariants("relabel");
                }
            }
        }
    }

    /// Kills alive vertices with no residual path to an unsaturated sink.
    fn prune(&mut self) {
        let n = self.g.n();
        let mut reach = vec![false; n];
        let mut queue: Vec<usize> = (0..n).filter(|&v| self.snk_rem[v] > 0).collect();
        for &t in &queue {
            reach[t] = true;
        }
        while let Some(v) = queue.pop() {
            // arcs entering v: forward arcs of in-edges, backward arcs of out-edges
            let g = self.g;
            for &e in g.in_edges(v) {
                let u = g.tail(e);
                if !reach[u] && self.cf(2 * e) > 0 {
                    reach[u] = true;
                    queue.push(u);
                }
            }
            for &e in g.out_edges(v) {
                let u = g.head(e);
                if !reach[u] && self.cf(2 * e + 1) > 0 {
                    reach[u] = true;
                    queue.push(u);
                }
            }
        }
        for v in 0..n {
            if reach[v] || self.dead[v] {
                continue;
            }
            self.pruned += 1;
            self.level_visits[v] += 1;
            self.level[v] = self.limit + 1;
            self.dead[v] = true;
            let g = self.g;
            let incident: Vec<usize> = g.out_edges(v).iter().chain(g.in_edges(v)).copied().collect();
            for e in incident {
                self.set_adm(2 * e, false);
                self.set_adm(2 * e + 1, false);
            }
        }
        if self.cfg.debug_invariants {
            self.check_invariants("prune");
        }
    }

    fn next_source(&mut self) -> Option<usize> {
        while let Some(&s) = self.sources.last() {
            if self.dead[s] || self.src_rem[s] == 0 {
                self.sources.pop();
            } else {
                return Some(s);
            }
        }
        None
    }

    fn run(&mut self) {
        loop {
            if self.next_source().is_none() {
                break;
            }
            if self.cfg.prune_unreachable && self.reach_dirty {
                self.reach_dirty = false;
                self.prune();
            }
            self.drain();
            let Some(s) = self.next_source() else { break };
            match self.cfg.mode {
                Mode::Unit => self.augment_walk(s),
                Mode::Capacitated => self.augment_tree(s),
            }
            if self.cfg.debug_invariants {
                self.check_invariants("augment");
            }
        }
        // flush every arc still held by the forest
        for v in 0..self.g.n() {
            self.detach(v);
        }
    }

    fn record(&mut self, s: usize, t: usize, arcs: Vec<usize>, amount: i64, labels: Option<Vec<i64>>) {
        self.augment_count += 1;
        if self.cfg.record_paths {
            let w_length = arcs.iter().map(|&a| self.w[a >> 1]).sum();
            self.augmentations.push(AugmentRecord {
                source: s,
                sink: t,
                arcs,
                amount,
                w_length,
                labels,
            });
        }
    }

    fn finish_augment(&mut self, s: usize, t: usize, amount: i64, saturated_any: bool) {
        self.src_rem[s] -= amount;
        self.snk_rem[t] -= amount;
        self.value += amount;
        if self.snk_rem[t] == 0 {
            self.enqueue(t);
        }
        if saturated_any || self.snk_rem[t] == 0 {
            self.reach_dirty = true;
        }
    }

    fn augment_walk(&mut self, s: usize) {
        let labels = self.cfg.record_labels.then(|| self.level.clone());
        let mut arcs = Vec::new();
        let mut v = s;
        while self.snk_rem[v] == 0 {
            let a = *self.adm_out[v].first().expect("admissible out-arc after relabel loop");
            arcs.push(a);
            v = arc_ends(self.g, a).1;
        }
        let t = v;
        let mut amount = self.src_rem[s].min(self.snk_rem[t]);
        for &a in &arcs {
            amount = amount.min(self.cf(a));
        }
        let mut saturated_any = false;
        for &a in &arcs {
            let e = a >> 1;
            if a & 1 == 0 {
                self.f[e] += amount;
            } else {
                self.f[e] -= amount;
            }
            if self.cf(a) == 0 {
                self.saturations[e] += 1;
                saturated_any = true;
                self.set_adm(a, false);
            }
        }
        self.finish_augment(s, t, amount, saturated_any);
        self.record(s, t, arcs, amount, labels);
    }

    fn augment_tree(&mut self, s: usize) {
        let labels = self.cfg.record_labels.then(|| self.level.clone());
        let t = loop {
            let r = self.forest.as_mut().unwrap().find_root(s);
            if self.snk_rem[r] > 0 {
                break r;
            }
            let a = *self.adm_out[r].first().expect("admissible out-arc after relabel loop");
            let (_, y) = arc_ends(self.g, a);
            let c = self.cf(a);
            self.forest.as_mut().unwrap().link(r, y, c).unwrap();
            self.tree_arc[r] = a;
        };
        let mut arcs = Vec::new();
        if self.cfg.record_paths {
            let mut v = s;
            while v != t {
                let a = self.tree_arc[v];
                arcs.push(a);
                v = arc_ends(self.g, a).1;
            }
        }
        let forest = self.forest.as_mut().unwrap();
        let bottleneck = forest.find_min(s).map(|(_, c)| c).unwrap_or(i64::MAX);
        let amount = self.src_rem[s].min(self.snk_rem[t]).min(bottleneck);
        forest.add_path(s, -amount);
        let mut saturated_any = false;
        loop {
            let forest = self.forest.as_mut().unwrap();
            let Ok((u, c)) = forest.find_min(s) else { break };
            if c != 0 {
                break;
            }
            let a = self.tree_arc[u];
            self.saturations[a >> 1] += 1;
            saturated_any = true;
            self.set_adm(a, false);
        }
        self.finish_augment(s, t, amount, saturated_any);
        self.record(s, t, arcs, amount, labels);
    }

    fn check_invariants(&mut self, when: &str) {
        self.invariant_checks += 1;
        let m = self.g.m();
        for a in 0..2 * m {
            let (x, y) = arc_ends(self.g, a);
            let wt = self.w[a >> 1];
            let gap = self.level[x] - self.level[y];
            if self.cf(a) > 0 && gap >= 3 * wt {
                self.violation(format!("steep residual arc after {when}: arc {a} gap {gap} w {wt}"));
            }
            if self.adm[a] && gap <= wt {
                self.violation(format!("stale admissible arc after {when}: arc {a} gap {gap} w {wt}"));
            }
        }
        for v in 0..self.g.n() {
            if self.dead[v] != (self.level[v] > self.limit) {
                self.violation(format!("dead flag mismatch after {when}: vertex {v} level {}", self.level[v]));
            }
            if self.snk_rem[v] > 0 && self.level[v] != 0 {
                self.violation(format!("sink off level 0 after {when}: sink {v} level {}", self.level[v]));
            }
        }
    }

    fn violation(&mut self, msg: String) {
        if self.violations.len() < 32 {
            self.violations.push(msg);
        }
    }

    fn finish(self) -> PushRelabelResult {
        PushRelabelResult {
            flow: Flow::from_edges(self.g, self.f),
            labels: self.level,
            dead: self.dead,
            h: self.h,
            value: self.value,
            augmentations: self.augmentations,
            augment_count: self.augment_count,
            saturations: self.saturations,
            flips: self.flips,
            level_visits: self.level_visits,
            relabels: self.relabels,
            pruned: self.pruned,
            invariant_checks: self.invariant_checks,
            violations: self.violations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;

    fn single(c: i64, w: i64, h: i64, mode: Mode) -> PushRelabelResult {
        let (g, cap) = build_graph(2, &[(0, 1, c)]).unwrap();
        let inst = FlowInstance::st(g, cap, 0, 1, 1);
        let cfg = PrConfig {
            mode,
            debug_invariants: true,
            ..PrConfig::default()
        };
        push_relabel(&inst, &[w], h, &cfg).unwrap()
    }

    #[test]
    fn single_edge_routes() {
        for mode in [Mode::Unit, Mode::Capacitated] {
            let r = single(1, 1, 2, mode);
            assert_eq!(r.value, 1);
            assert!(r.violations.is_empty());
        }
    }

    #[test]
    fn heavy_edge_is_out_of_reach() {
        for mode in [Mode::Unit, Mode::Capacitated] {
            let r = single(1, 100, 10, mode);
            assert_eq!(r.value, 0);
            assert!(r.dead[0]);
        }
    }

    #[test]
    fn heavy_edge_without_pruning_climbs() {
        let (g, cap) = build_graph(2, &[(0, 1, 1)]).unwrap();
        let inst = FlowInstance::st(g, cap, 0, 1, 1);
        let cfg = PrConfig {
            prune_unreachable: false,
            ..PrConfig::default()
        };
        let r = push_relabel(&inst, &[100], 10, &cfg).unwrap();
        assert_eq!(r.value, 0);
        // no multiple of 100 below 91, so the first relabel kills it
        assert_eq!(r.labels[0], 91);
        assert_eq!(r.level_visits[0], 1);
    }

    #[test]
    fn relabel_jumps_to_next_multiple() {
        // 0 -> 1 with weight 4; vertex 1 is a saturated-free sink at level 0
        let (g, cap) = build_graph(3, &[(0, 1, 1), (2, 0, 1)]).unwrap();
        let inst = FlowInstance::new(g, cap, vec![0, 0, 0], vec![0, 1, 0]).unwrap();
        let cfg = PrConfig {
            prune_unreachable: false,
            ..PrConfig::default()
        };
        let r = push_relabel(&inst, &[4, 1000], 1000, &cfg).unwrap();
        // no sources, so nothing runs
        assert_eq!(r.relabels, 0);

        let (g, cap) = build_graph(2, &[(0, 1, 1)]).unwrap();
        let inst = FlowInstance::st(g, cap, 0, 1, 1);
        let cfg = PrConfig {
            record_paths: true,
            record_labels: true,
            ..PrConfig::default()
        };
        let r = push_relabel(&inst, &[4], 100, &cfg).unwrap();
        // 4 then 8: admissible needs a gap of 2w
        let rec = &r.augmentations[0];
        assert_eq!(rec.labels.as_ref().unwrap()[0], 8);
        assert_eq!(r.level_visits[0], 2);
    }

    #[test]
    fn bottleneck_of_capacitated_path() {
        let (g, cap) = build_graph(4, &[(0, 1, 5), (1, 2, 3), (2, 3, 7)]).unwrap();
        let inst = FlowInstance::st(g, cap, 0, 3, 10);
        for mode in [Mode::Unit, Mode::Capacitated] {
            let cfg = PrConfig {
                mode,
                record_paths: true,
                debug_invariants: true,
                ..PrConfig::default()
            };
            let r = push_relabel(&inst, &[1, 1, 1], 10, &cfg).unwrap();
            assert_eq!(r.augmentations[0].amount, 3);
            assert_eq!(r.value, 3);
            assert!(r.violations.is_empty(), "{:?}", r.violations);
        }
    }

    #[test]
    fn unit_path_saturates_every_arc() {
        let (g, cap) = build_graph(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let inst = FlowInstance::st(g, cap, 0, 3, 1);
        let cfg = PrConfig {
            mode: Mode::Unit,
            ..PrConfig::default()
        };
        let r = push_relabel(&inst, &[1, 1, 1], 10, &cfg).unwrap();
        assert_eq!(r.value, 1);
        assert_eq!(r.saturations, vec![1, 1, 1]);
    }

    #[test]
    fn dead_source_gap_exceeds_nine_h() {
        let r = single(1, 100, 10, Mode::Unit);
        assert!(label_gap_certificate(&r, 0, 1) > 90);
    }

    #[test]
    fn rejects_zero_weight_and_bad_instance() {
        let (g, cap) = build_graph(2, &[(0, 1, 1)]).unwrap();
        let inst = FlowInstance::st(g.clone(), cap.clone(), 0, 1, 1);
        assert_eq!(
            push_relabel(&inst, &[0], 1, &PrConfig::default()).unwrap_err(),
            PushRelabelError::WeightZero(0)
        );
        let bad = FlowInstance {
            graph: g,
            cap,
            source: vec![2, 0],
            sink: vec![0, 1],
        };
        assert_eq!(
            push_relabel(&bad, &[1], 1, &PrConfig::default()).unwrap_err(),
            PushRelabelError::BadInstance
        );
    }
}
