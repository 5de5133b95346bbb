//! Expander hierarchies: the edge partition (D, X_1..X_η), the respecting
//! topological order τ, the weights it induces and a brute-force validator.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{scc_sub, topo_order_sub, DiGraph, EdgeId};
use crate::shortest::{residual_dijkstra, INF};

/// Exact positive rational, used for φ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad ratio `{0}`: expected p/q with 0 < p and 0 < q")]
pub struct RatioError(pub String);

impl Ratio {
    pub fn new(num: u64, den: u64) -> Result<Self, RatioError> {
        if num == 0 || den == 0 {
            return Err(RatioError(format!("{num}/{den}")));
        }
        Ok(Ratio { num, den })
    }

    pub fn as_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// ⌈1/φ⌉
    pub fn inv_ceil(self) -> u64 {
        self.den.div_ceil(self.num)
    }

    /// `cut < φ · vol`, exactly.
    pub fn below(self, cut: i64, vol: i64) -> bool {
        (cut as i128) * (self.den as i128) < (self.num as i128) * (vol as i128)
    }

    pub fn mul(self, other: Ratio) -> Ratio {
        let num = self.num as u128 * other.num as u128;
        let den = self.den as u128 * other.den as u128;
        let g = gcd(num, den);
        let (mut num, mut den) = (num / g, den / g);
        // keep it representable; rounding toward a smaller value only makes
        // "is sparse" checks stricter
        while den > u64::MAX as u128 || num > u64::MAX as u128 {
            num = num.div_ceil(2).max(1);
            den /= 2;
        }
        Ratio {
            num: num as u64,
            den: den.max(1) as u64,
        }
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Ratio {
    type Err = RatioError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || RatioError(s.to_string());
        let (p, q) = s.trim().split_once('/').ok_or_else(bad)?;
        let p: u64 = p.trim().parse().map_err(|_| bad())?;
        let q: u64 = q.trim().parse().map_err(|_| bad())?;
        Ratio::new(p, q).map_err(|_| bad())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HierarchyError {
    #[error("D contains a cycle")]
    NotAcyclic,
    #[error("edge {edge} of level {level} crosses components of its level")]
    LevelViolation { edge: EdgeId, level: usize },
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Level 0 is D; levels 1..=eta are X_1..X_η. `tau` is a 0-based
/// permutation of the vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hierarchy {
    pub level: Vec<usize>,
    pub eta: usize,
    pub tau: Vec<usize>,
}

impl Hierarchy {
    /// Hierarchy for the given edge levels, with τ computed.
    pub fn from_levels(g: &DiGraph, level: Vec<usize>) -> Result<Self, HierarchyError> {
        if level.len() != g.m() {
            return Err(HierarchyError::LengthMismatch {
                expected: g.m(),
                got: level.len(),
            });
        }
        let eta = level.iter().copied().max().unwrap_or(0);
        let tau = respecting_topo_order(g, &level)?;
        Ok(Hierarchy { level, eta, tau })
    }

    pub fn weights(&self, g: &DiGraph) -> Vec<i64> {
        induced_weights(g, &self.tau)
    }

    pub fn edges_at(&self, i: usize) -> impl Iterator<Item = EdgeId> + '_ {
        self.level
            .iter()
            .enumerate()
            .filter(move |&(_, &l)| l == i)
            .map(|(e, _)| e)
    }

    /// `<edge-id> <level>` per edge (ids from 0), then `t <v> <τ_v>` per
    /// vertex with v and τ counted from 1.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (e, l) in self.level.iter().enumerate() {
            s.push_str(&format!("{e} {l}\n"));
        }
        for (v, t) in self.tau.iter().enumerate() {
            s.push_str(&format!("t {} {}\n", v + 1, t + 1));
        }
        s
    }

    pub fn parse_text(text: &str, n: usize, m: usize) -> Result<Self, HierarchyError> {
        let mut level = vec![usize::MAX; m];
        let mut tau = vec![usize::MAX; n];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |reason: &str| HierarchyError::Parse {
                line,
                reason: reason.to_string(),
            };
            let toks: Vec<&str> = raw.split_whitespace().collect();
            match toks.as_slice() {
                [] => {}
                ["c", ..] => {}
                ["t", v, t] => {
                    let v: usize = v.parse().map_err(|_| err("bad vertex"))?;
                    let t: usize = t.parse().map_err(|_| err("bad order value"))?;
                    if v == 0 || v > n || t == 0 || t > n {
                        return Err(err("vertex or order value out of range"));
                    }
                    tau[v - 1] = t - 1;
                }
                [e, l] => {
                    let e: usize = e.parse().map_err(|_| err("bad edge id"))?;
                    let l: usize = l.parse().map_err(|_| err("bad level"))?;
                    if e >= m {
                        return Err(err("edge id out of range"));
                    }
                    level[e] = l;
                }
                _ => return Err(err("unrecognized line")),
            }
        }
        if let Some(e) = level.iter().position(|&l| l == usize::MAX) {
            return Err(HierarchyError::Parse {
                line: 0,
                reason: format!("edge {e} has no level"),
            });
        }
        if let Some(v) = tau.iter().position(|&t| t == usize::MAX) {
            return Err(HierarchyError::Parse {
                line: 0,
                reason: format!("vertex {} has no order value", v + 1),
            });
        }
        let eta = level.iter().copied().max().unwrap_or(0);
        Ok(Hierarchy { level, eta, tau })
    }
}

/// τ that is forward on D and contiguous on every SCC of every G ∖ X_{>i}.
///
/// Works top down: split the current block into SCCs under the edges of
/// level ≤ i, lay them out in condensation order, recurse one level lower.
/// At level 0 only D remains, which must be acyclic.
pub fn respecting_topo_order(g: &DiGraph, level: &[usize]) -> Result<Vec<usize>, HierarchyError> {
    let n = g.n();
    let eta = level.iter().copied().max().unwrap_or(0);
    let mut comp = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    let mut stack: Vec<(Vec<usize>, usize)> = vec![((0..n).collect(), eta)];
    while let Some((verts, i)) = stack.pop() {
        if i == 0 {
            let t = topo_order_sub(g, &verts, |e| level[e] == 0).ok_or(HierarchyError::NotAcyclic)?;
            order.extend(t);
            continue;
        }
        let comps = scc_sub(g, &verts, |e| level[e] <= i);
        for (k, c) in comps.iter().enumerate() {
            for &v in c {
                comp[v] = k;
            }
        }
        for &v in &verts {
            for &e in g.out_edges(v) {
                let l = level[e];
                if l >= 1 && l <= i && comp[g.head(e)] != comp[v] && contains(&verts, g.head(e)) {
                    return Err(HierarchyError::LevelViolation { edge: e, level: l });
                }
            }
        }
        for c in comps.into_iter().rev() {
            stack.push((c, i - 1));
        }
    }
    let mut tau = vec![0; n];
    for (p, v) in order.into_iter().enumerate() {
        tau[v] = p;
    }
    Ok(tau)
}

fn contains(sorted: &[usize], v: usize) -> bool {
    sorted.binary_search(&v).is_ok()
}

/// w_H(e) = |τ_v − τ_u|.
pub fn induced_weights(g: &DiGraph, tau: &[usize]) -> Vec<i64> {
    g.edges()
        .map(|(_, u, v)| (tau[v] as i64 - tau[u] as i64).abs())
        .collect()
}

/// Capacity-weighted directed boundary and F-volumes of a cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutMetrics {
    pub out_cap: i64,
    pub in_cap: i64,
    pub vol_s: i64,
    pub vol_rest: i64,
}

impl CutMetrics {
    pub fn min_dir(&self) -> i64 {
        self.out_cap.min(self.in_cap)
    }

    pub fn min_vol(&self) -> i64 {
        self.vol_s.min(self.vol_rest)
    }

    /// min{c(S,S̄), c(S̄,S)} < φ · min{vol_F(S), vol_F(S̄)}
    pub fn is_sparse(&self, phi: Ratio) -> bool {
        phi.below(self.min_dir(), self.min_vol())
    }
}

/// Metrics of `in_s` inside the vertex set `verts`, counting only edges
/// accepted by `host` for the boundary and edges in `f` for volume.
pub fn cut_metrics(
    g: &DiGraph,
    cap: &[i64],
    verts: &[usize],
    in_s: &[bool],
    host: impl Fn(EdgeId) -> bool,
    f: impl Fn(EdgeId) -> bool,
) -> CutMetrics {
    let mut inside = vec![false; g.n()];
    for &v in verts {
        inside[v] = true;
    }
    let mut m = CutMetrics {
        out_cap: 0,
        in_cap: 0,
        vol_s: 0,
        vol_rest: 0,
    };
    for &u in verts {
        for &e in g.out_edges(u) {
            let v = g.head(e);
            if !inside[v] {
                continue;
            }
            if host(e) {
                if in_s[u] && !in_s[v] {
                    m.out_cap += cap[e];
                } else if !in_s[u] && in_s[v] {
                    m.in_cap += cap[e];
                }
            }
            if f(e) {
                for x in [u, v] {
                    if in_s[x] {
                        m.vol_s += cap[e];
                    } else {
                        m.vol_rest += cap[e];
                    }
                }
            }
        }
    }
    m
}

pub const EXACT_LIMIT: usize = 16;

#[derive(Debug, Clone)]
pub struct ComponentCheck {
    pub level: usize,
    pub vertices: Vec<usize>,
    /// All cuts enumerated; otherwise only sampled.
    pub exact: bool,
    pub cuts_checked: u64,
    pub witness: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub partition_ok: bool,
    pub dag_ok: bool,
    pub containment_ok: bool,
    pub order_ok: bool,
    pub components: Vec<ComponentCheck>,
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.partition_ok
            && self.dag_ok
            && self.containment_ok
            && self.order_ok
            && self.components.iter().all(|c| c.witness.is_none())
    }

    /// Whether every expansion check was exhaustive.
    pub fn all_exact(&self) -> bool {
        self.components.iter().all(|c| c.exact)
    }

    pub fn first_witness(&self) -> Option<&ComponentCheck> {
        self.components.iter().find(|c| c.witness.is_some())
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ValidateConfig {
    pub random_cuts: usize,
    pub dijkstra_runs: usize,
    pub seed: u64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            random_cuts: 10_000,
            dijkstra_runs: 32,
            seed: 0x5eed,
        }
    }
}

pub fn validate_hierarchy(g: &DiGraph, cap: &[i64], h: &Hierarchy, phi: Ratio) -> ValidationReport {
    validate_hierarchy_with(g, cap, h, phi, &ValidateConfig::default())
}

pub fn validate_hierarchy_with(
    g: &DiGraph,
    cap: &[i64],
    h: &Hierarchy,
    phi: Ratio,
    cfg: &ValidateConfig,
) -> ValidationReport {
    let n = g.n();
    let mut rep = ValidationReport::default();
    rep.partition_ok = h.level.len() == g.m() && h.level.iter().all(|&l| l <= h.eta);
    if !rep.partition_ok {
        rep.failures.push("levels do not partition the edges".into());
        return rep;
    }
    let all: Vec<usize> = (0..n).collect();
    rep.dag_ok = topo_order_sub(g, &all, |e| h.level[e] == 0).is_some();
    if !rep.dag_ok {
        rep.failures.push("D has a cycle".into());
    }
    let mut perm = h.tau.clone();
    perm.sort_unstable();
    rep.order_ok = h.tau.len() == n && perm.iter().enumerate().all(|(i, &t)| i == t);
    if !rep.order_ok {
        rep.failures.push("τ is not a permutation".into());
    }
    if rep.order_ok {
        for (e, u, v) in g.edges() {
            if h.level[e] == 0 && h.tau[u] > h.tau[v] {
                rep.order_ok = false;
                rep.failures.push(format!("D edge {e} points backward in τ"));
                break;
            }
        }
    }
    rep.containment_ok = true;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 1..=h.eta {
        let comps = scc_sub(g, &all, |e| h.level[e] <= i);
        let mut id = vec![0; n];
        for (k, c) in comps.iter().enumerate() {
            for &v in c {
                id[v] = k;
            }
        }
        for (e, u, v) in g.edges() {
            if h.level[e] == i && id[u] != id[v] {
                rep.containment_ok = false;
                rep.failures.push(format!("edge {e} of level {i} crosses components"));
            }
        }
        for c in comps {
            if rep.order_ok {
                let lo = c.iter().map(|&v| h.tau[v]).min().unwrap();
                let hi = c.iter().map(|&v| h.tau[v]).max().unwrap();
                if hi - lo + 1 != c.len() {
                    rep.order_ok = false;
                    rep.failures.push(format!("τ not contiguous on a level-{i} component"));
                }
            }
            if c.len() < 2 {
                continue;
            }
            let host = |e: EdgeId| h.level[e] <= i;
            let in_f = |e: EdgeId| h.level[e] == i;
            let check = check_component(g, cap, &c, host, in_f, phi, cfg, &mut rng, i);
            if let Some(w) = &check.witness {
                rep.failures
                    .push(format!("level {i}: φ-sparse cut of {} vertices", w.len()));
            }
            rep.components.push(check);
        }
    }
    rep
}

/// Looks for a φ-sparse cut of the component `verts`: exhaustive up to
/// `EXACT_LIMIT` vertices, sampled beyond.
#[allow(clippy::too_many_arguments)]
pub fn check_component(
    g: &DiGraph,
    cap: &[i64],
    verts: &[usize],
    host: impl Fn(EdgeId) -> bool,
    in_f: impl Fn(EdgeId) -> bool,
    phi: Ratio,
    cfg: &ValidateConfig,
    rng: &mut ChaCha8Rng,
    level: usize,
) -> ComponentCheck {
    let (sub, emap, _) = g.induced(verts, |e| host(e) || in_f(e));
    let k = verts.len();
    let scap: Vec<i64> = emap.iter().map(|&e| cap[e]).collect();
    let shost: Vec<bool> = emap.iter().map(|&e| host(e)).collect();
    let sf: Vec<bool> = emap.iter().map(|&e| in_f(e)).collect();
    let total_vol: i64 = (0..sub.m()).filter(|&e| sf[e]).map(|e| 2 * scap[e]).sum();
    let mut check = ComponentCheck {
        level,
        vertices: verts.to_vec(),
        exact: k <= EXACT_LIMIT,
        cuts_checked: 0,
        witness: None,
    };
    if total_vol == 0 {
        return check;
    }
    let to_orig = |in_s: &[bool]| -> Vec<usize> {
        (0..k).filter(|&v| in_s[v]).map(|v| verts[v]).collect()
    };
    if k <= EXACT_LIMIT {
        let mut en = GrayCuts::new(&sub, &scap, &shost, &sf);
        // vertex k-1 stays outside S; every cut is seen once up to swapping
        let count = 1u64 << (k - 1);
        for step in 1..count {
            let v = step.trailing_zeros() as usize;
            en.toggle(v);
            check.cuts_checked += 1;
            if en.metrics(total_vol).is_sparse(phi) {
                check.witness = Some(to_orig(&en.in_s));
                return check;
            }
        }
        return check;
    }
    let all: Vec<usize> = (0..k).collect();
    let eval = |in_s: &[bool]| {
        let m = cut_metrics(&sub, &scap, &all, in_s, |e| shost[e], |e| sf[e]);
        m.is_sparse(phi)
    };
    let mut in_s = vec![false; k];
    for _ in 0..cfg.random_cuts {
        for x in in_s.iter_mut() {
            *x = rng.gen_bool(0.5);
        }
        if in_s.iter().all(|&b| b) || in_s.iter().all(|&b| !b) {
            continue;
        }
        check.cuts_checked += 1;
        if eval(&in_s) {
            check.witness = Some(to_orig(&in_s));
            return check;
        }
    }
    let rcap: Vec<i64> = (0..2 * sub.m())
        .map(|a| if a % 2 == 0 && shost[a / 2] { 1 } else { 0 })
        .collect();
    for _ in 0..cfg.dijkstra_runs {
        let wts: Vec<i64> = (0..sub.m()).map(|_| rng.gen_range(1..=k as i64)).collect();
        let src = rng.gen_range(0..k);
        let d = residual_dijkstra(&sub, &rcap, |a| wts[a / 2], &[src]);
        let mut levels: Vec<i64> = d.clone();
        levels.sort_unstable();
        levels.dedup();
        for &lv in &levels {
            if lv == INF {
                break;
            }
            for v in 0..k {
                in_s[v] = d[v] <= lv;
            }
            if in_s.iter().all(|&b| b) {
                break;
            }
            check.cuts_checked += 1;
            if eval(&in_s) {
                check.witness = Some(to_orig(&in_s));
                return check;
            }
        }
    }
    check
}

/// Incremental cut metrics for Gray-code enumeration.
struct GrayCuts<'a> {
    g: &'a DiGraph,
    cap: &'a [i64],
    host: &'a [bool],
    f: &'a [bool],
    in_s: Vec<bool>,
    out_cap: i64,
    in_cap: i64,
    vol_s: i64,
}

impl<'a> GrayCuts<'a> {
    fn new(g: &'a DiGraph, cap: &'a [i64], host: &'a [bool], f: &'a [bool]) -> Self {
        GrayCuts {
            g,
            cap,
            host,
            f,
            in_s: vec![false; g.n()],
            out_cap: 0,
            in_cap: 0,
            vol_s: 0,
        }
    }

    fn toggle(&mut self, v: usize) {
        let sign = if self.in_s[v] { -1 } else { 1 };
        for &e in self.g.out_edges(v) {
            let x = self.g.head(e);
            if self.f[e] {
                self.vol_s += sign * self.cap[e];
            }
            if !self.host[e] {
                continue;
            }
            // v entering S: an S̄→S edge becomes internal, or a new S→S̄ edge
            if self.in_s[x] {
                self.in_cap -= sign * self.cap[e];
            } else {
                self.out_cap += sign * self.cap[e];
            }
        }
        for &e in self.g.in_edges(v) {
            let x = self.g.tail(e);
            if self.f[e] {
                self.vol_s += sign * self.cap[e];
            }
            if !self.host[e] {
                continue;
            }
            if self.in_s[x] {
                self.out_cap -= sign * self.cap[e];
            } else {
                self.in_cap += sign * self.cap[e];
            }
        }
        self.in_s[v] = !self.in_s[v];
    }

    fn metrics(&self, total_vol: i64) -> CutMetrics {
        CutMetrics {
            out_cap: self.out_cap,
            in_cap: self.in_cap,
            vol_s: self.vol_s,
            vol_rest: total_vol - self.vol_s,
        }
    }
}

/// Exhaustive minimum of min{c(S,S̄),c(S̄,S)} / min{vol(S),vol(S̄)} over
/// cuts of the whole graph with both volumes positive, as (num, den).
/// Meant for n ≤ 20.
pub fn exhaustive_sparsity(g: &DiGraph, cap: &[i64], f: &[bool]) -> Option<(i64, i64)> {
    let n = g.n();
    assert!(n <= 20, "exhaustive sparsity is for tiny graphs");
    if n < 2 {
        return None;
    }
    let host = vec![true; g.m()];
    let total_vol: i64 = (0..g.m()).filter(|&e| f[e]).map(|e| 2 * cap[e]).sum();
    let mut en = GrayCuts::new(g, cap, &host, f);
    let mut best: Option<(i64, i64)> = None;
    for step in 1..(1u64 << (n - 1)) {
        en.toggle(step.trailing_zeros() as usize);
        let m = en.metrics(total_vol);
        let vol = m.min_vol();
        if vol <= 0 {
            continue;
        }
        let val = (m.min_dir(), vol);
        best = match best {
            Some(b) if (b.0 as i128) * (val.1 as i128) <= (val.0 as i128) * (b.1 as i128) => Some(b),
            _ => Some(val),
        };
    }
    best
}
