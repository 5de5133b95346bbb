//! Exact maximum flow by repeated hierarchy-guided push-relabel, the DAG
//! approximation, capacity scaling and an Edmonds-Karp reference solver.

use std::collections::VecDeque;

use thiserror::Error;

use crate::builder::{build_hierarchy, default_phi, BuildConfig, BuildError, BuildValidation};
use crate::graph::{flow_stats, topo_order, DiGraph, Flow, FlowInstance};
use crate::hierarchy::{validate_hierarchy_with, Hierarchy, Ratio, ValidateConfig};
use crate::push_relabel::{push_relabel, Mode, PrConfig, PushRelabelError, PushRelabelResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MaxFlowError {
    #[error("graph has a cycle")]
    NotADag,
    #[error(transparent)]
    PushRelabel(#[from] PushRelabelError),
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// Maximum (Δ,∇)-flow by shortest augmenting paths through a virtual
/// super-source and super-sink.
pub fn edmonds_karp(inst: &FlowInstance) -> Flow {
    let g = &inst.graph;
    let n = g.n();
    let m = g.m();
    let mut f = vec![0i64; m];
    let mut src_used = vec![0i64; n];
    let mut snk_used = vec![0i64; n];
    // self-absorption first
    for v in 0..n {
        let a = inst.source[v].min(inst.sink[v]);
        src_used[v] = a;
        snk_used[v] = a;
    }
    // parent arc: usize::MAX - 1 marks a source root
    const ROOT: usize = usize::MAX - 1;
    loop {
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for v in 0..n {
            if inst.source[v] - src_used[v] > 0 {
                parent[v] = ROOT;
                queue.push_back(v);
            }
        }
        let mut end = None;
        while let Some(v) = queue.pop_front() {
            if inst.sink[v] - snk_used[v] > 0 {
                end = Some(v);
                break;
            }
            for &e in g.out_edges(v) {
                let w = g.head(e);
                if parent[w] == usize::MAX && inst.cap[e] - f[e] > 0 {
                    parent[w] = 2 * e;
                    queue.push_back(w);
                }
            }
            for &e in g.in_edges(v) {
                let w = g.tail(e);
                if parent[w] == usize::MAX && f[e] > 0 {
                    parent[w] = 2 * e + 1;
                    queue.push_back(w);
                }
            }
        }
        let Some(t) = end else { break };
        let mut amount = inst.sink[t] - snk_used[t];
        let mut v = t;
        while parent[v] != ROOT {
            let a = parent[v];
            let e = a / 2;
            if a % 2 == 0 {
                amount = amount.min(inst.cap[e] - f[e]);
                v = g.tail(e);
            } else {
                amount = amount.min(f[e]);
                v = g.head(e);
            }
        }
        let s = v;
        amount = amount.min(inst.source[s] - src_used[s]);
        let mut v = t;
        while parent[v] != ROOT {
            let a = parent[v];
            let e = a / 2;
            if a % 2 == 0 {
                f[e] += amount;
                v = g.tail(e);
            } else {
                f[e] -= amount;
                v = g.head(e);
            }
        }
        src_used[s] += amount;
        snk_used[t] += amount;
    }
    Flow::from_edges(g, f)
}

/// Push-relabel on a DAG with w(e) = |τ_v − τ_u| for a topological τ and
/// h = n. Returns at least a sixth of the maximum.
pub fn dag_approx_flow(inst: &FlowInstance) -> Result<(Flow, PushRelabelResult), MaxFlowError> {
    dag_approx_flow_with(inst, &PrConfig::default())
}

pub fn dag_approx_flow_with(
    inst: &FlowInstance,
    cfg: &PrConfig,
) -> Result<(Flow, PushRelabelResult), MaxFlowError> {
    let g = &inst.graph;
    let order = topo_order(g).ok_or(MaxFlowError::NotADag)?;
    let mut tau = vec![0i64; g.n()];
    for (p, &v) in order.iter().enumerate() {
        tau[v] = p as i64;
    }
    let w: Vec<i64> = g.edges().map(|(_, u, v)| (tau[v] - tau[u]).abs()).collect();
    let r = push_relabel(inst, &w, g.n() as i64, cfg)?;
    Ok((r.flow.clone(), r))
}

/// The residual graph as an instance: every residual arc with positive
/// capacity becomes an edge; `arcs[i]` is the residual arc of new edge i.
#[derive(Debug, Clone)]
pub struct ResidualInstance {
    pub inst: FlowInstance,
    pub arcs: Vec<usize>,
}

/// Residual instance of `f`. With `keep_all`, zero-capacity arcs stay as
/// edges so the edge set does not depend on `f`. Capacities are capped at
/// `cap_limit`.
pub fn residual_instance(inst: &FlowInstance, f: &Flow, keep_all: bool, cap_limit: i64) -> ResidualInstance {
    let g = &inst.graph;
    let stats = flow_stats(inst, f);
    let mut pairs = Vec::new();
    let mut caps = Vec::new();
    let mut arcs = Vec::new();
    for (e, u, v) in g.edges() {
        let fwd = inst.cap[e] - f.get(e);
        let bwd = f.get(e);
        if fwd > 0 || keep_all {
            pairs.push((u, v));
            caps.push(fwd.min(cap_limit));
            arcs.push(2 * e);
        }
        if bwd > 0 || keep_all {
            pairs.push((v, u));
            caps.push(bwd.min(cap_limit));
            arcs.push(2 * e + 1);
        }
    }
    let rg = DiGraph::new(g.n(), &pairs).expect("residual arcs are well formed");
    let sink: Vec<i64> = (0..g.n()).map(|v| inst.sink[v] - stats.absorption[v]).collect();
    ResidualInstance {
        inst: FlowInstance {
            graph: rg,
            cap: caps,
            source: stats.excess,
            sink,
        },
        arcs,
    }
}

/// Adds a flow of the residual instance back onto `f`.
pub fn apply_residual_flow(inst: &FlowInstance, f: &mut Flow, ri: &ResidualInstance, rf: &Flow) {
    for (i, &a) in ri.arcs.iter().enumerate() {
        let x = rf.get(i);
        if x == 0 {
            continue;
        }
        let e = a / 2;
        if a % 2 == 0 {
            f.add(&inst.graph, e, x);
        } else {
            f.add(&inst.graph, e, -x);
        }
    }
}

/// One shortest augmenting path in the residual graph; returns the amount
/// pushed (0 if none exists).
pub fn bfs_augment(inst: &FlowInstance, f: &mut Flow) -> i64 {
    let ri = residual_instance(inst, f, false, i64::MAX);
    let g = &ri.inst.graph;
    let n = g.n();
    let mut parent = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if ri.inst.source[v] > 0 {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    let mut end = None;
    while let Some(v) = queue.pop_front() {
        if ri.inst.sink[v] > 0 {
            end = Some(v);
            break;
        }
        for &e in g.out_edges(v) {
            let w = g.head(e);
            if !seen[w] {
                seen[w] = true;
                parent[w] = e;
                queue.push_back(w);
            }
        }
    }
    let Some(t) = end else { return 0 };
    let mut path = Vec::new();
    let mut v = t;
    while parent[v] != usize::MAX {
        path.push(parent[v]);
        v = g.tail(parent[v]);
    }
    let s = v;
    let mut amount = ri.inst.source[s].min(ri.inst.sink[t]);
    for &e in &path {
        amount = amount.min(ri.inst.cap[e]);
    }
    let mut rf = Flow::zero(g);
    for &e in &path {
        rf.add(g, e, amount);
    }
    apply_residual_flow(inst, f, &ri, &rf);
    amount
}

/// True if some residual path joins a remaining source to a remaining sink.
pub fn has_augmenting_path(inst: &FlowInstance, f: &Flow) -> bool {
    let mut probe = f.clone();
    // cheap enough at the sizes this runs on
    bfs_augment(inst, &mut probe) > 0
}

#[derive(Debug, Clone)]
pub struct ExactConfig {
    pub phi: Option<Ratio>,
    pub c_h: f64,
    pub build: BuildConfig,
    pub mode: Mode,
    pub debug_invariants: bool,
    /// Keep the previous hierarchy while it still validates on the current
    /// residual capacities (experimental).
    pub reuse_hierarchy: bool,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            phi: None,
            c_h: 8.0,
            // exactness never depends on the hierarchy, so skip the final
            // sampled re-validation inside the loop
            build: BuildConfig {
                validation: BuildValidation::Structural,
                ..BuildConfig::default()
            },
            mode: Mode::Capacitated,
            debug_invariants: false,
            reuse_hierarchy: false,
        }
    }
}

/// h = ⌈c_h · n · η² · ln n / φ⌉ with η taken as at least 1, never below n.
pub fn exact_height(n: usize, eta: usize, phi: Ratio, c_h: f64) -> i64 {
    let nf = n.max(2) as f64;
    let e = eta.max(1) as f64;
    let raw = (c_h * nf * e * e * nf.ln() / phi.as_f64()).ceil();
    let h = if raw.is_finite() && raw < 1e15 { raw as i64 } else { 1_000_000_000_000_000 };
    h.max(n as i64).max(1)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationStat {
    pub added: i64,
    pub eta: usize,
    pub h: i64,
    pub augmentations: u64,
    pub relabels: u64,
    pub safety_net: bool,
}

#[derive(Debug, Clone)]
pub struct ExactResult {
    pub flow: Flow,
    pub value: i64,
    pub iterations: Vec<IterationStat>,
    pub safety_net_uses: usize,
    /// Level-invariant failures reported by push-relabel in debug mode.
    pub violations: Vec<String>,
}

pub fn max_flow_exact(inst: &FlowInstance, seed: u64, cfg: &ExactConfig) -> Result<ExactResult, MaxFlowError> {
    let n = inst.n();
    let phi = cfg.phi.unwrap_or_else(|| default_phi(n));
    let mut f = Flow::zero(&inst.graph);
    let mut iterations = Vec::new();
    let mut safety = 0;
    let mut kept: Option<Hierarchy> = None;
    let mut violations = Vec::new();
    let pr_cfg = PrConfig {
        mode: cfg.mode,
        debug_invariants: cfg.debug_invariants,
        ..PrConfig::default()
    };
    for it in 0u64.. {
        let ri = residual_instance(inst, &f, cfg.reuse_hierarchy, i64::MAX);
        if !has_augmenting_path(inst, &f) {
            break;
        }
        let rg = &ri.inst.graph;
        let reuse = kept.as_ref().filter(|h| {
            cfg.reuse_hierarchy
                && validate_hierarchy_with(rg, &ri.inst.cap, h, phi, &ValidateConfig::default()).is_valid()
        });
        let h = match reuse {
            Some(h) => h.clone(),
            None => build_hierarchy(rg, &ri.inst.cap, phi, seed.wrapping_add(it), &cfg.build)?.hierarchy,
        };
        let w = h.weights(rg);
        let height = exact_height(n, h.eta, phi, cfg.c_h);
        let run = push_relabel(&ri.inst, &w, height, &pr_cfg)?;
        violations.extend(run.violations.iter().cloned());
        let before = flow_stats(inst, &f).value;
        apply_residual_flow(inst, &mut f, &ri, &run.flow);
        let mut added = flow_stats(inst, &f).value - before;
        let mut net = false;
        if added == 0 {
            added = bfs_augment(inst, &mut f);
            safety += 1;
            net = true;
        }
        iterations.push(IterationStat {
            added,
            eta: h.eta,
            h: height,
            augmentations: run.augment_count,
            relabels: run.relabels,
            safety_net: net,
        });
        if cfg.reuse_hierarchy {
            kept = Some(h);
        }
    }
    let value = flow_stats(inst, &f).value;
    Ok(ExactResult {
        flow: f,
        value,
        iterations,
        safety_net_uses: safety,
        violations,
    })
}

#[derive(Debug, Clone)]
pub struct ScaledResult {
    pub flow: Flow,
    pub phases: usize,
    /// Value added by the inner solver in each phase.
    pub phase_values: Vec<i64>,
}

/// Number of bit phases for capacities up to `u`: ⌈log₂ u⌉ + 1.
pub fn phase_count(u: i64) -> usize {
    let u = u.max(1) as u64;
    (64 - (u - 1).leading_zeros()) as usize + 1
}

/// Solves bit by bit from the most significant capacity bit. Each phase
/// doubles the previous flow, which stays feasible, and lets `inner` finish
/// on the residual instance. Rounding loses at most one unit per edge and
/// per terminal, so a phase never has more than m + n left to route and
/// residual capacities can be capped at max(n², m + n).
pub fn capacity_scaled_max_flow<E>(
    inst: &FlowInstance,
    mut inner: impl FnMut(&FlowInstance) -> Result<Flow, E>,
) -> Result<ScaledResult, E> {
    let g = &inst.graph;
    let n = g.n() as i64;
    let limit = (n * n).max(g.m() as i64 + n).max(1);
    let u = inst.cap.iter().copied().max().unwrap_or(0).max(1);
    let k = phase_count(u);
    let mut f = Flow::zero(g);
    let mut phase_values = Vec::with_capacity(k);
    for p in (0..k).rev() {
        let scaled = FlowInstance {
            graph: g.clone(),
            cap: inst.cap.iter().map(|&c| c >> p).collect(),
            source: inst.source.iter().map(|&c| c >> p).collect(),
            sink: inst.sink.iter().map(|&c| c >> p).collect(),
        };
        let doubled: Vec<i64> = f.values().iter().map(|&x| 2 * x).collect();
        f = Flow::from_edges(g, doubled);
        let ri = residual_instance(&scaled, &f, false, limit);
        let rf = inner(&ri.inst)?;
        phase_values.push(flow_stats(&ri.inst, &rf).value);
        apply_residual_flow(&scaled, &mut f, &ri, &rf);
    }
    Ok(ScaledResult {
        flow: f,
        phases: k,
        phase_values,
    })
}
