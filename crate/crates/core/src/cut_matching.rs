//! Cut-matching game with the sparse-cut routine as matching player: either
//! a balanced sparse cut with respect to F, or evidence that F expands.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{
    decompose_paths, degree_in, flow_stats, is_strongly_connected, residual, residual_reach, DiGraph,
    FlowInstance,
};
use crate::hierarchy::{cut_metrics, Hierarchy, Ratio};
use crate::sparse_cut::{level_cuts, sparse_cut, SparseCutConfig, SparseCutError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CutMatchingError {
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("round {round}: routing failed but no candidate cut is sparse and balanced")]
    NoSparseCut { round: usize },
    #[error(transparent)]
    SparseCut(#[from] SparseCutError),
}

#[derive(Debug, Clone)]
pub struct CmConfig {
    pub c_t: f64,
    pub c_kappa: u64,
    pub z_factor: f64,
    /// Random cuts tried when measuring ψ̃ on graphs too large to enumerate.
    pub psi_samples: usize,
    pub sparse: SparseCutConfig,
}

impl Default for CmConfig {
    fn default() -> Self {
        CmConfig {
            c_t: 2.0,
            c_kappa: 1,
            z_factor: 20.0,
            psi_samples: 2000,
            sparse: SparseCutConfig::default(),
        }
    }
}

/// Round budget ⌈c_t · (ln(n·U))²⌉, at least 1.
pub fn round_budget(n: usize, u: i64, c_t: f64) -> usize {
    let x = (n.max(2) as f64 * u.max(1) as f64).ln();
    ((c_t * x * x).ceil() as usize).max(1)
}

/// κ = ⌈2 c_κ / φ⌉
pub fn congestion_bound(phi: Ratio, c_kappa: u64) -> i64 {
    ((2 * c_kappa as u128 * phi.den as u128).div_ceil(phi.num as u128)) as i64
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bisection {
    pub a: Vec<i64>,
    pub b: Vec<i64>,
}

#[derive(Debug, Clone)]
pub struct CmgCut {
    pub side: Vec<bool>,
    pub out_cap: i64,
    pub in_cap: i64,
    pub vol_s: i64,
    pub vol_total: i64,
    pub round: usize,
    pub t_cmg: usize,
}

impl CmgCut {
    pub fn min_dir(&self) -> i64 {
        self.out_cap.min(self.in_cap)
    }
}

#[derive(Debug, Clone)]
pub struct Certificate {
    pub phi: Ratio,
    /// Measured worst cut ratio of the matching union, exact rational.
    pub psi: Option<Ratio>,
    pub psi_exact: bool,
    /// True when ψ̃ is zero: some cut of the matching union has no edge in
    /// one direction.
    pub psi_zero: bool,
    pub rounds: usize,
    pub t_cmg: usize,
    pub r_used: i64,
    /// Max over edges of total routed flow over capacity.
    pub congestion: f64,
    /// Certified only because vol_F(V) < 1/φ.
    pub small_volume: bool,
}

#[derive(Debug, Clone)]
pub enum CutOrEmbedOutcome {
    Cut(CmgCut),
    Certificate(Certificate),
}

#[derive(Debug, Clone, Default)]
pub struct CmStats {
    pub sparse_cut_calls: usize,
    pub bisections: Vec<Bisection>,
    /// Matching of each round as (a, b, amount).
    pub matchings: Vec<Vec<(usize, usize, i64)>>,
}

/// Cut player state: one k-dimensional sketch per vertex.
#[derive(Debug, Clone)]
pub struct CutPlayer {
    nu: Vec<i64>,
    x: Vec<Vec<f64>>,
}

impl CutPlayer {
    pub fn new(nu: Vec<i64>, rng: &mut ChaCha8Rng) -> Self {
        let n = nu.len();
        let k = (n.max(2) as f64).ln().ceil().max(1.0) as usize;
        let x = nu
            .iter()
            .map(|&w| {
                (0..k)
                    .map(|_| if w > 0 { rng.gen_range(-1.0..1.0) } else { 0.0 })
                    .collect()
            })
            .collect();
        CutPlayer { nu, x }
    }

    /// Sorts by projection on a random direction and gives the first half
    /// of the ν-mass to A, splitting the boundary vertex if needed.
    pub fn bisect(&self, rng: &mut ChaCha8Rng) -> Bisection {
        let n = self.nu.len();
        let k = self.x.first().map_or(1, |r| r.len());
        let mut dir: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|d| d * d).sum::<f64>().sqrt().max(1e-12);
        dir.iter_mut().for_each(|d| *d /= norm);
        let mut order: Vec<(f64, usize)> = (0..n)
            .filter(|&v| self.nu[v] > 0)
            .map(|v| (self.x[v].iter().zip(&dir).map(|(a, b)| a * b).sum(), v))
            .collect();
        order.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
        let total: i64 = self.nu.iter().sum();
        let mut left = total / 2;
        let mut a = vec![0; n];
        let mut b = vec![0; n];
        for (_, v) in order {
            let take = left.min(self.nu[v]);
            a[v] = take;
            b[v] = self.nu[v] - take;
            left -= take;
        }
        Bisection { a, b }
    }

    /// Each unit of ν keeps half its sketch and averages the other half over
    /// its matched partners; unmatched mass stays put.
    pub fn absorb(&mut self, matching: &[(usize, usize, i64)]) {
        let n = self.nu.len();
        let k = self.x.first().map_or(0, |r| r.len());
        let mut acc = vec![vec![0.0; k]; n];
        let mut matched = vec![0i64; n];
        for &(a, b, amt) in matching {
            let w = amt as f64;
            for j in 0..k {
                acc[a][j] += w * self.x[b][j];
                acc[b][j] += w * self.x[a][j];
            }
            matched[a] += amt;
            matched[b] += amt;
        }
        for v in 0..n {
            if self.nu[v] == 0 {
                continue;
            }
            let nv = self.nu[v] as f64;
            let stay = (self.nu[v] - matched[v]).max(0) as f64;
            for j in 0..k {
                let mix = (acc[v][j] + stay * self.x[v][j]) / nv;
                self.x[v][j] = 0.5 * self.x[v][j] + 0.5 * mix;
            }
        }
    }
}

/// Runs the game on `g` with terminal edges `f_mask`. `h_below` must be a
/// hierarchy of G ∖ F (levels of F edges are ignored).
#[allow(clippy::too_many_arguments)]
pub fn cut_or_embed(
    g: &DiGraph,
    cap: &[i64],
    f_mask: &[bool],
    phi: Ratio,
    r_budget: i64,
    h_below: &Hierarchy,
    rng: &mut ChaCha8Rng,
    cfg: &CmConfig,
) -> Result<(CutOrEmbedOutcome, CmStats), CutMatchingError> {
    let n = g.n();
    let mut stats = CmStats::default();
    let nu = degree_in(g, cap, f_mask);
    let vol_total: i64 = nu.iter().sum();
    let u = nu.iter().copied().max().unwrap_or(1);
    let t_cmg = round_budget(n, u, cfg.c_t);
    if (vol_total as u128) * (phi.num as u128) < phi.den as u128 {
        return Ok((
            CutOrEmbedOutcome::Certificate(Certificate {
                phi,
                psi: None,
                psi_exact: true,
                psi_zero: false,
                rounds: 0,
                t_cmg,
                r_used: 0,
                congestion: 0.0,
                small_volume: true,
            }),
            stats,
        ));
    }
    if !is_strongly_connected(g) {
        return Err(CutMatchingError::NotStronglyConnected);
    }
    let kappa = congestion_bound(phi, cfg.c_kappa);
    let z = ((cfg.z_factor * (n.max(2) as f64).ln()).ceil() as usize).max(1);
    let mut player = CutPlayer::new(nu.clone(), rng);
    let mut total_flow = vec![0i64; g.m()];
    let mut fake = vec![0i64; n];
    let mut r_used = 0i64;
    let mut union: Vec<(usize, usize, i64)> = Vec::new();
    for round in 0..t_cmg {
        let bis = player.bisect(rng);
        stats.bisections.push(bis.clone());
        let mut src = bis.a.clone();
        let mut snk = bis.b.clone();
        let mut matching: Vec<(usize, usize, i64)> = Vec::new();
        for _ in 0..z {
            let demand: i64 = src.iter().sum();
            if demand * 2 * t_cmg as i64 <= r_budget || demand == 0 {
                break;
            }
            let inst = FlowInstance {
                graph: g.clone(),
                cap: cap.to_vec(),
                source: src.clone(),
                sink: snk.clone(),
            };
            stats.sparse_cut_calls += 1;
            let out = sparse_cut(&inst, kappa, f_mask, h_below, phi, &cfg.sparse)?;
            if out.value * 2 < demand {
                let cut = choose_cut(&inst, kappa, f_mask, &out, phi, r_budget, t_cmg, &nu)
                    .ok_or(CutMatchingError::NoSparseCut { round })?;
                let mut cut = cut;
                cut.round = round;
                return Ok((CutOrEmbedOutcome::Cut(cut), stats));
            }
            let scaled = FlowInstance {
                cap: cap.iter().map(|&c| c * kappa).collect(),
                ..inst
            };
            let fs = flow_stats(&scaled, &out.flow);
            for v in 0..n {
                let self_abs = src[v].min(snk[v]);
                if self_abs > 0 {
                    matching.push((v, v, self_abs));
                }
            }
            for (path, amt) in decompose_paths(&scaled, &out.flow).paths {
                let a = g.tail(path[0]);
                let b = g.head(*path.last().unwrap());
                matching.push((a, b, amt));
            }
            for (e, t) in total_flow.iter_mut().enumerate() {
                *t += out.flow.get(e);
            }
            for v in 0..n {
                src[v] = fs.excess[v];
                snk[v] -= fs.absorption[v];
            }
        }
        let left: i64 = src.iter().sum();
        r_used += left;
        for v in 0..n {
            fake[v] += src[v];
        }
        player.absorb(&matching);
        union.extend(matching.iter().filter(|&&(a, b, _)| a != b).copied());
        stats.matchings.push(matching);
    }
    let congestion = total_flow
        .iter()
        .zip(cap)
        .filter(|&(_, &c)| c > 0)
        .map(|(&f, &c)| f as f64 / c as f64)
        .fold(0.0, f64::max);
    let (psi, psi_exact) = measure_psi(n, &union, &fake, cfg.psi_samples, rng);
    Ok((
        CutOrEmbedOutcome::Certificate(Certificate {
            phi,
            psi_zero: psi.is_none(),
            psi,
            psi_exact,
            rounds: t_cmg,
            t_cmg,
            r_used,
            congestion,
            small_volume: false,
        }),
        stats,
    ))
}

/// Acceptance checks on a candidate side: min-direction sparsity below
/// φ·vol_F(S) and R/(4t) ≤ vol_F(S) ≤ vol_F(V)/2.
pub fn cut_branch_ok(c: &CmgCut, phi: Ratio, r_budget: i64) -> bool {
    let lo = (r_budget as i128) <= 4 * c.t_cmg as i128 * c.vol_s as i128;
    let hi = 2 * c.vol_s <= c.vol_total;
    lo && hi && phi.below(c.min_dir(), c.vol_s)
}

#[allow(clippy::too_many_arguments)]
fn choose_cut(
    inst: &FlowInstance,
    kappa: i64,
    f_mask: &[bool],
    out: &crate::sparse_cut::SparseCutOutcome,
    phi: Ratio,
    r_budget: i64,
    t_cmg: usize,
    nu: &[i64],
) -> Option<CmgCut> {
    let g = &inst.graph;
    let n = g.n();
    let vol_total: i64 = nu.iter().sum();
    let all: Vec<usize> = (0..n).collect();
    let orient = |side: &[bool]| -> CmgCut {
        let m = cut_metrics(g, &inst.cap, &all, side, |_| true, |e| f_mask[e]);
        // keep the side of smaller F-volume
        if m.vol_rest < m.vol_s {
            CmgCut {
                side: side.iter().map(|&b| !b).collect(),
                out_cap: m.in_cap,
                in_cap: m.out_cap,
                vol_s: m.vol_rest,
                vol_total,
                round: 0,
                t_cmg,
            }
        } else {
            CmgCut {
                side: side.to_vec(),
                out_cap: m.out_cap,
                in_cap: m.in_cap,
                vol_s: m.vol_s,
                vol_total,
                round: 0,
                t_cmg,
            }
        }
    };
    let mut candidates: Vec<Vec<bool>> = Vec::new();
    if let Some(c) = &out.cut {
        candidates.push(c.side.clone());
    }
    if let Some(labels) = &out.labels {
        for c in level_cuts(inst, kappa, f_mask, &out.flow, labels) {
            candidates.push(c.side);
        }
    }
    let scaled = FlowInstance {
        graph: g.clone(),
        cap: inst.cap.iter().map(|&c| c * kappa).collect(),
        source: inst.source.clone(),
        sink: inst.sink.clone(),
    };
    if let Ok(res) = residual(&scaled, &out.flow) {
        let fs = flow_stats(&scaled, &out.flow);
        let s0: Vec<usize> = (0..n).filter(|&v| fs.excess[v] > 0).collect();
        let reach = residual_reach(g, &res.cap, &s0);
        if reach.iter().any(|&b| b) && !reach.iter().all(|&b| b) {
            candidates.push(reach);
        }
    }
    candidates
        .iter()
        .map(|s| orient(s))
        .find(|c| cut_branch_ok(c, phi, r_budget))
}

/// ψ̃: minimum over S with 0 < γ(S) ≤ γ(S̄) of
/// min{c_W(S,S̄), c_W(S̄,S)} / γ(S), where γ = vol_W plus fake mass.
/// `None` when that minimum is zero. Exhaustive up to 16 vertices,
/// otherwise an upper bound from sampled cuts.
pub fn measure_psi(
    n: usize,
    union: &[(usize, usize, i64)],
    fake: &[i64],
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> (Option<Ratio>, bool) {
    let mut out_adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    let mut in_adj: Vec<Vec<(usize, i64)>> = vec![Vec::new(); n];
    let mut gamma = fake.to_vec();
    for &(a, b, w) in union {
        out_adj[a].push((b, w));
        in_adj[b].push((a, w));
        gamma[a] += w;
        gamma[b] += w;
    }
    let g_total: i64 = gamma.iter().sum();
    let mut best: Option<(i64, i64)> = None;
    let mut consider = |o: i64, i: i64, gs: i64| {
        let gs_small = gs.min(g_total - gs);
        if gs_small <= 0 {
            return;
        }
        let num = o.min(i);
        if best.is_none_or(|(bn, bd)| (num as i128) * (bd as i128) < (bn as i128) * (gs_small as i128)) {
            best = Some((num, gs_small));
        }
    };
    let exact = n <= 16;
    if exact {
        let mut in_s = vec![false; n];
        let (mut o, mut i, mut gs) = (0i64, 0i64, 0i64);
        for step in 1..(1u64 << n.saturating_sub(1)) {
            let v = step.trailing_zeros() as usize;
            let sign = if in_s[v] { -1 } else { 1 };
            for &(x, w) in &out_adj[v] {
                if x == v {
                    continue;
                }
                if in_s[x] {
                    i -= sign * w;
                } else {
                    o += sign * w;
                }
            }
            for &(x, w) in &in_adj[v] {
                if x == v {
                    continue;
                }
                if in_s[x] {
                    o -= sign * w;
                } else {
                    i += sign * w;
                }
            }
            gs += sign * gamma[v];
            in_s[v] = !in_s[v];
            consider(o, i, gs);
        }
    } else {
        for _ in 0..samples {
            let in_s: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            let (mut o, mut i, mut gs) = (0, 0, 0);
            for v in 0..n {
                if in_s[v] {
                    gs += gamma[v];
                }
                for &(x, w) in &out_adj[v] {
                    if in_s[v] && !in_s[x] {
                        o += w;
                    } else if !in_s[v] && in_s[x] {
                        i += w;
                    }
                }
            }
            consider(o, i, gs);
        }
    }
    match best {
        Some((num, den)) if num > 0 => (Ratio::new(num as u64, den as u64).ok(), exact),
        Some(_) => (None, exact),
        None => (None, exact),
    }
}
