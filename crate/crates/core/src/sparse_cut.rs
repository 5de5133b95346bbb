//! Route a diffusion demand with congestion κ, or find a level cut that is
//! sparse with respect to a terminal edge set F.

use thiserror::Error;

use crate::graph::{flow_stats, is_strongly_connected, residual, DiGraph, Flow, FlowInstance};
use crate::hierarchy::{Hierarchy, Ratio};
use crate::push_relabel::{push_relabel, Mode, PrConfig, PushRelabelError, PushRelabelResult};
use crate::shortest::{residual_dijkstra, INF};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SparseCutError {
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("hierarchy does not fit G minus F: {0}")]
    InvalidHierarchy(String),
    #[error("no level cut excludes every unsaturated sink")]
    NoValidLevelCut,
    #[error(transparent)]
    PushRelabel(#[from] PushRelabelError),
}

#[derive(Debug, Clone)]
pub struct SparseCutConfig {
    pub c6: f64,
    pub max_h: i64,
    pub mode: Mode,
    pub debug_invariants: bool,
}

impl Default for SparseCutConfig {
    fn default() -> Self {
        SparseCutConfig {
            c6: 1.0,
            max_h: 1_000_000,
            mode: Mode::Capacitated,
            debug_invariants: false,
        }
    }
}

/// h = ⌈c6 · η⁴ · (ln n)⁷ · κ · n / φ²⌉ with η taken as at least 1, clamped
/// to [n, max_h].
pub fn sparse_cut_height(n: usize, eta: usize, kappa: i64, phi: Ratio, c6: f64, max_h: i64) -> i64 {
    let nf = n.max(2) as f64;
    let e = eta.max(1) as f64;
    let inv = 1.0 / phi.as_f64();
    let raw = c6 * e.powi(4) * nf.ln().powi(7) * kappa as f64 * nf * inv * inv;
    let h = if raw.is_finite() { raw.ceil().min(max_h as f64) as i64 } else { max_h };
    h.min(max_h).max(n as i64).max(1)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelCut {
    pub side: Vec<bool>,
    /// Largest label inside S.
    pub threshold: i64,
    /// Residual κ-capacity out of S minus min{vol_F(S), vol_F(S̄)}.
    pub objective: i64,
    pub out_cap: i64,
    pub in_cap: i64,
    pub vol_s: i64,
    pub vol_rest: i64,
    pub abs_s: i64,
    pub sink_s: i64,
    pub ex_s: i64,
    pub ex_total: i64,
}

#[derive(Debug, Clone)]
pub struct SparseCutOutcome {
    /// Flow on the κ-scaled capacities.
    pub flow: Flow,
    pub value: i64,
    pub demand: i64,
    pub h: i64,
    pub cut: Option<LevelCut>,
    pub labels: Option<Vec<i64>>,
    pub run: PushRelabelResult,
}

/// Residual arc weights for the level scan: the arc inherits w_G except that
/// forward arcs of D edges (level 0, outside F) cost nothing.
pub fn level_weights(g: &DiGraph, w_g: &[i64], f_mask: &[bool], h: &Hierarchy) -> Vec<i64> {
    (0..2 * g.m())
        .map(|a| {
            let e = a / 2;
            if a % 2 == 0 && !f_mask[e] && h.level[e] == 0 {
                0
            } else {
                w_g[e]
            }
        })
        .collect()
}

/// Residual w_f-distance from `s0`; saturated arcs are skipped and
/// unreachable vertices get `INF`.
pub fn level_labels(g: &DiGraph, rcap: &[i64], wf: &[i64], s0: &[usize]) -> Vec<i64> {
    residual_dijkstra(g, rcap, |a| wf[a], s0)
}

pub fn sparse_cut(
    inst: &FlowInstance,
    kappa: i64,
    f_mask: &[bool],
    h: &Hierarchy,
    phi: Ratio,
    cfg: &SparseCutConfig,
) -> Result<SparseCutOutcome, SparseCutError> {
    let g = &inst.graph;
    let n = g.n();
    if !is_strongly_connected(g) {
        return Err(SparseCutError::NotStronglyConnected);
    }
    check_fit(g, f_mask, h)?;
    let w_h = h.weights(g);
    let w_g: Vec<i64> = (0..g.m())
        .map(|e| if f_mask[e] { n as i64 } else { w_h[e] })
        .collect();
    let height = sparse_cut_height(n, h.eta, kappa, phi, cfg.c6, cfg.max_h);
    let scaled = FlowInstance {
        graph: g.clone(),
        cap: inst.cap.iter().map(|&c| c * kappa).collect(),
        source: inst.source.clone(),
        sink: inst.sink.clone(),
    };
    let pr_cfg = PrConfig {
        mode: cfg.mode,
        debug_invariants: cfg.debug_invariants,
        ..PrConfig::default()
    };
    let run = push_relabel(&scaled, &w_g, height, &pr_cfg)?;
    let demand = inst.source_total();
    let flow = run.flow.clone();
    let stats = flow_stats(&scaled, &flow);
    let value = stats.value;
    if value >= demand {
        return Ok(SparseCutOutcome {
            flow,
            value,
            demand,
            h: height,
            cut: None,
            labels: None,
            run,
        });
    }
    let res = residual(&scaled, &flow).expect("push-relabel keeps the flow feasible");
    let s0: Vec<usize> = (0..n).filter(|&v| stats.excess[v] > 0).collect();
    let wf = level_weights(g, &w_g, f_mask, h);
    let labels = level_labels(g, &res.cap, &wf, &s0);
    let cut = best_level_cut(inst, kappa, f_mask, &flow, &labels)?;
    Ok(SparseCutOutcome {
        flow,
        value,
        demand,
        h: height,
        cut: Some(cut),
        labels: Some(labels),
        run,
    })
}

fn check_fit(g: &DiGraph, f_mask: &[bool], h: &Hierarchy) -> Result<(), SparseCutError> {
    let bad = |s: String| Err(SparseCutError::InvalidHierarchy(s));
    if h.level.len() != g.m() || f_mask.len() != g.m() || h.tau.len() != g.n() {
        return bad("length mismatch".into());
    }
    let mut seen = vec![false; g.n()];
    for &t in &h.tau {
        if t >= g.n() || seen[t] {
            return bad("τ is not a permutation".into());
        }
        seen[t] = true;
    }
    for (e, u, v) in g.edges() {
        if !f_mask[e] && h.level[e] == 0 && h.tau[u] > h.tau[v] {
            return bad(format!("D edge {e} points backward in τ"));
        }
    }
    Ok(())
}

/// Every level cut S_{≤i} of `labels` that keeps all unsaturated sinks
/// outside and is not all of V, with its objective, in label order.
pub fn level_cuts(
    inst: &FlowInstance,
    kappa: i64,
    f_mask: &[bool],
    flow: &Flow,
    labels: &[i64],
) -> Vec<LevelCut> {
    let g = &inst.graph;
    let n = g.n();
    let scaled_cap: Vec<i64> = inst.cap.iter().map(|&c| c * kappa).collect();
    let scaled = FlowInstance {
        graph: g.clone(),
        cap: scaled_cap,
        source: inst.source.clone(),
        sink: inst.sink.clone(),
    };
    let stats = flow_stats(&scaled, flow);
    let rcap = residual(&scaled, flow).expect("feasible flow").cap;
    let mut values: Vec<i64> = labels.iter().copied().filter(|&l| l != INF).collect();
    values.sort_unstable();
    values.dedup();
    let ex_total: i64 = stats.excess.iter().sum();
    let mut out = Vec::new();
    for &lv in &values {
        let side: Vec<bool> = labels.iter().map(|&l| l <= lv).collect();
        if side.iter().all(|&b| b) {
            break;
        }
        if (0..n).any(|v| side[v] && inst.sink[v] - stats.absorption[v] > 0) {
            continue;
        }
        let mut c = LevelCut {
            side: side.clone(),
            threshold: lv,
            objective: 0,
            out_cap: 0,
            in_cap: 0,
            vol_s: 0,
            vol_rest: 0,
            abs_s: 0,
            sink_s: 0,
            ex_s: 0,
            ex_total,
        };
        let mut res_out = 0;
        for (e, u, v) in g.edges() {
            if side[u] && !side[v] {
                c.out_cap += inst.cap[e];
                res_out += rcap[2 * e];
            } else if !side[u] && side[v] {
                c.in_cap += inst.cap[e];
                res_out += rcap[2 * e + 1];
            }
            if f_mask[e] {
                for x in [u, v] {
                    if side[x] {
                        c.vol_s += inst.cap[e];
                    } else {
                        c.vol_rest += inst.cap[e];
                    }
                }
            }
        }
        for v in 0..n {
            if side[v] {
                c.abs_s += stats.absorption[v];
                c.sink_s += inst.sink[v];
                c.ex_s += stats.excess[v];
            }
        }
        c.objective = res_out - c.vol_s.min(c.vol_rest);
        out.push(c);
    }
    out
}

fn best_level_cut(
    inst: &FlowInstance,
    kappa: i64,
    f_mask: &[bool],
    flow: &Flow,
    labels: &[i64],
) -> Result<LevelCut, SparseCutError> {
    let mut best: Option<LevelCut> = None;
    for c in level_cuts(inst, kappa, f_mask, flow, labels) {
        // strict: ties keep the smaller side
        if best.as_ref().is_none_or(|b| c.objective < b.objective) {
            best = Some(c);
        }
    }
    best.ok_or(SparseCutError::NoValidLevelCut)
}
