//! Brute-force oracles shared by the integration tests. None of them call
//! into the solver code they check.
#![allow(dead_code)]

use hiflow::{build_graph, build_hierarchy, BuildConfig, DiGraph, FlowInstance, Hierarchy, Ratio};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub const INF: i64 = i64::MAX;

/// reach[u][v]: v reachable from u (reflexive).
pub fn transitive_closure(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut r = vec![vec![false; n]; n];
    for (v, row) in r.iter_mut().enumerate() {
        row[v] = true;
    }
    for &(u, v) in edges {
        r[u][v] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// min over S of c(E(S,S̄)) + Δ(S̄) + ∇(S), S being the source side.
pub fn exhaustive_min_cut(inst: &FlowInstance) -> i64 {
    let g = &inst.graph;
    let n = g.n();
    assert!(n <= 20);
    let mut best = INF;
    for mask in 0u32..(1u32 << n) {
        let ins = |v: usize| mask >> v & 1 == 1;
        let mut c = 0;
        for (e, u, v) in g.edges() {
            if ins(u) && !ins(v) {
                c += inst.cap[e];
            }
        }
        for v in 0..n {
            if ins(v) {
                c += inst.sink[v];
            } else {
                c += inst.source[v];
            }
        }
        best = best.min(c);
    }
    best
}

/// Multi-source shortest distances over residual arcs (2e forward, 2e+1
/// backward) with positive capacity.
pub fn bellman_ford(g: &DiGraph, rcap: &[i64], w: &[i64], sources: &[usize]) -> Vec<i64> {
    let n = g.n();
    let mut d = vec![INF; n];
    for &s in sources {
        d[s] = 0;
    }
    for _ in 0..n {
        let mut changed = false;
        for a in 0..rcap.len() {
            if rcap[a] <= 0 {
                continue;
            }
            let e = a / 2;
            let (x, y) = if a % 2 == 0 { (g.tail(e), g.head(e)) } else { (g.head(e), g.tail(e)) };
            if d[x] != INF && d[x] + w[a] < d[y] {
                d[y] = d[x] + w[a];
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    d
}

/// Residual capacities of `f` in arc numbering.
pub fn residual_caps(cap: &[i64], f: &[i64]) -> Vec<i64> {
    let mut r = Vec::with_capacity(2 * cap.len());
    for e in 0..cap.len() {
        r.push(cap[e] - f[e]);
        r.push(f[e]);
    }
    r
}

/// Forest kept as a parent array with the edge value at the child.
pub struct NaiveForest {
    pub parent: Vec<Option<usize>>,
    pub val: Vec<i64>,
}

impl NaiveForest {
    pub fn new(n: usize) -> Self {
        NaiveForest {
            parent: vec![None; n],
            val: vec![0; n],
        }
    }

    pub fn root(&self, mut u: usize) -> usize {
        while let Some(p) = self.parent[u] {
            u = p;
        }
        u
    }

    /// Child endpoint and value of the minimum edge on the path to the root,
    /// first one from u on ties.
    pub fn find_min(&self, mut u: usize) -> Option<(usize, i64)> {
        let mut best: Option<(usize, i64)> = None;
        while let Some(p) = self.parent[u] {
            if best.is_none_or(|b| self.val[u] < b.1) {
                best = Some((u, self.val[u]));
            }
            u = p;
        }
        best
    }

    pub fn add_path(&mut self, mut u: usize, x: i64) {
        while let Some(p) = self.parent[u] {
            self.val[u] += x;
            u = p;
        }
    }
}

pub fn random_arcs(rng: &mut ChaCha8Rng, n: usize, m: usize, max_cap: i64) -> Vec<(usize, usize, i64)> {
    (0..m)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            (u, v, rng.gen_range(1..=max_cap))
        })
        .collect()
}

/// Arcs from lower to higher index under a random relabeling.
pub fn random_dag_arcs(rng: &mut ChaCha8Rng, n: usize, m: usize, max_cap: i64) -> Vec<(usize, usize, i64)> {
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    (0..m)
        .map(|_| {
            let i = rng.gen_range(0..n - 1);
            let j = rng.gen_range(i + 1..n);
            (perm[i], perm[j], rng.gen_range(1..=max_cap))
        })
        .collect()
}

pub fn random_st(rng: &mut ChaCha8Rng, n: usize, m: usize, max_cap: i64) -> FlowInstance {
    let arcs = random_arcs(rng, n, m, max_cap);
    let (g, c) = build_graph(n, &arcs).unwrap();
    let big = c.iter().sum::<i64>() + 1;
    let s = rng.gen_range(0..n);
    let mut t = rng.gen_range(0..n - 1);
    if t >= s {
        t += 1;
    }
    FlowInstance::st(g, c, s, t, big)
}

/// Random diffusion instance with ‖Δ‖ ≤ ‖∇‖.
pub fn random_diffusion(rng: &mut ChaCha8Rng, g: DiGraph, cap: Vec<i64>, max_amt: i64) -> FlowInstance {
    let n = g.n();
    let mut source = vec![0; n];
    let mut sink = vec![0; n];
    for v in 0..n {
        match rng.gen_range(0..3) {
            0 => source[v] = rng.gen_range(1..=max_amt),
            1 => sink[v] = rng.gen_range(1..=max_amt),
            _ => {}
        }
    }
    let (a, b): (i64, i64) = (source.iter().sum(), sink.iter().sum());
    if a > b {
        sink[rng.gen_range(0..n)] += a - b;
    }
    FlowInstance::new(g, cap, source, sink).unwrap()
}

/// Strongly connected random graph: a Hamiltonian cycle plus extra arcs.
pub fn random_strong(rng: &mut ChaCha8Rng, n: usize, extra: usize, max_cap: i64) -> Vec<(usize, usize, i64)> {
    let mut arcs: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, rng.gen_range(1..=max_cap))).collect();
    arcs.extend(random_arcs(rng, n, extra, max_cap));
    arcs
}

/// k-cliques (unit arcs) joined by one arc each way of capacity `bridge`.
pub fn dumbbell_arcs(k: usize, bridge: i64) -> Vec<(usize, usize, i64)> {
    let mut arcs = Vec::new();
    for base in [0, k] {
        for u in 0..k {
            for v in 0..k {
                if u != v {
                    arcs.push((base + u, base + v, 1));
                }
            }
        }
    }
    arcs.push((k - 1, k, bridge));
    arcs.push((k, k - 1, bridge));
    arcs
}

/// Every cut of `verts` (as a bitmask over positions in `verts`) evaluated
/// from scratch; returns a cut with
/// min{c(S,S̄),c(S̄,S)} · den < num · min{vol_F(S), vol_F(S̄)}.
pub fn find_sparse_cut(
    g: &DiGraph,
    cap: &[i64],
    verts: &[usize],
    host: &dyn Fn(usize) -> bool,
    in_f: &dyn Fn(usize) -> bool,
    num: u128,
    den: u128,
) -> Option<Vec<usize>> {
    let k = verts.len();
    assert!(k <= 20);
    let mut pos = vec![usize::MAX; g.n()];
    for (i, &v) in verts.iter().enumerate() {
        pos[v] = i;
    }
    for mask in 1u32..(1u32 << k) - 1 {
        let ins = |v: usize| pos[v] != usize::MAX && mask >> pos[v] & 1 == 1;
        let (mut o, mut i, mut vs, mut vr) = (0i64, 0i64, 0i64, 0i64);
        for (e, u, v) in g.edges() {
            if pos[u] == usize::MAX || pos[v] == usize::MAX {
                continue;
            }
            if host(e) {
                if ins(u) && !ins(v) {
                    o += cap[e];
                }
                if !ins(u) && ins(v) {
                    i += cap[e];
                }
            }
            if in_f(e) {
                for x in [u, v] {
                    if ins(x) {
                        vs += cap[e];
                    } else {
                        vr += cap[e];
                    }
                }
            }
        }
        let lhs = o.min(i) as u128 * den;
        let rhs = num * vs.min(vr) as u128;
        if lhs < rhs {
            return Some((0..k).filter(|&p| mask >> p & 1 == 1).map(|p| verts[p]).collect());
        }
    }
    None
}

/// Independent scan of level cuts: for each finite label value L, the set
/// {label ≤ L} unless it contains an unsaturated sink or is everything.
/// Returns (objective, side) for every admissible level.
pub fn scan_level_cuts(
    inst: &FlowInstance,
    kappa: i64,
    f_mask: &[bool],
    flow: &[i64],
    labels: &[i64],
) -> Vec<(i64, Vec<bool>)> {
    let g = &inst.graph;
    let n = g.n();
    let mut inflow = inst.source.clone();
    for (e, u, v) in g.edges() {
        inflow[u] -= flow[e];
        inflow[v] += flow[e];
    }
    let mut vals: Vec<i64> = labels.iter().copied().filter(|&l| l != INF).collect();
    vals.sort();
    vals.dedup();
    let mut out = Vec::new();
    for l in vals {
        let side: Vec<bool> = labels.iter().map(|&x| x <= l).collect();
        if side.iter().all(|&b| b) {
            continue;
        }
        let bad = (0..n).any(|v| side[v] && inst.sink[v] > inflow[v].min(inst.sink[v]));
        if bad {
            continue;
        }
        let mut res = 0;
        let (mut vs, mut vr) = (0, 0);
        for (e, u, v) in g.edges() {
            if side[u] && !side[v] {
                res += kappa * inst.cap[e] - flow[e];
            }
            if side[v] && !side[u] {
                res += flow[e];
            }
            if f_mask[e] {
                for x in [u, v] {
                    if side[x] {
                        vs += inst.cap[e];
                    } else {
                        vr += inst.cap[e];
                    }
                }
            }
        }
        out.push((res - vs.min(vr), side));
    }
    out
}

/// Full expander-hierarchy check from scratch: D acyclic, every level-i
/// edge inside an SCC of the level-≤i graph, and no φ-sparse cut of any
/// such SCC with respect to its level-i edges.
pub fn hierarchy_valid(g: &DiGraph, cap: &[i64], level: &[usize], num: u128, den: u128) -> bool {
    let n = g.n();
    let eta = level.iter().copied().max().unwrap_or(0);
    let pairs_upto = |i: usize| -> Vec<(usize, usize)> {
        g.edges().filter(|&(e, _, _)| level[e] <= i).map(|(_, u, v)| (u, v)).collect()
    };
    let d = transitive_closure(n, &pairs_upto(0));
    if g.edges().any(|(e, u, v)| level[e] == 0 && d[v][u]) {
        return false;
    }
    for i in 1..=eta {
        let r = transitive_closure(n, &pairs_upto(i));
        let same = |u: usize, v: usize| r[u][v] && r[v][u];
        if g.edges().any(|(e, u, v)| level[e] == i && !same(u, v)) {
            return false;
        }
        let mut done = vec![false; n];
        for v in 0..n {
            if done[v] {
                continue;
            }
            let comp: Vec<usize> = (0..n).filter(|&u| same(u, v)).collect();
            for &u in &comp {
                done[u] = true;
            }
            if comp.len() < 2 {
                continue;
            }
            let host = |e: usize| level[e] <= i;
            let in_f = |e: usize| level[e] == i;
            if find_sparse_cut(g, cap, &comp, &host, &in_f, num, den).is_some() {
                return false;
            }
        }
    }
    true
}

/// Simple digraph: no loops, no parallel arcs in the same direction.
pub fn random_simple(rng: &mut ChaCha8Rng, n: usize, m: usize, max_cap: i64) -> Vec<(usize, usize, i64)> {
    let m = m.min(n * (n - 1));
    let mut seen = std::collections::BTreeSet::new();
    let mut arcs = Vec::new();
    while arcs.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && seen.insert((u, v)) {
            arcs.push((u, v, rng.gen_range(1..=max_cap)));
        }
    }
    arcs
}

/// Fixed corpus of 50 graphs on at most 14 vertices: strongly connected
/// random graphs, dumbbells, cycles, DAGs and unstructured random graphs.
pub fn small_corpus() -> Vec<(usize, Vec<(usize, usize, i64)>)> {
    use rand::SeedableRng;
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    let mut out = Vec::new();
    for i in 0..50 {
        let g = match i % 5 {
            0 => {
                let n = rng.gen_range(4..=14);
                (n, random_strong(&mut rng, n, 2 * n, 5))
            }
            1 => {
                let k = rng.gen_range(3..=7);
                (2 * k, dumbbell_arcs(k, rng.gen_range(1..=3)))
            }
            2 => {
                let n = rng.gen_range(3..=14);
                (n, (0..n).map(|v| (v, (v + 1) % n, 1)).collect())
            }
            3 => {
                let n = rng.gen_range(3..=14);
                (n, random_dag_arcs(&mut rng, n, 2 * n, 5))
            }
            _ => {
                let n = rng.gen_range(3..=14);
                (n, random_arcs(&mut rng, n, 3 * n, 5))
            }
        };
        out.push(g);
    }
    out
}

/// Hierarchy of G ∖ F built on the subgraph and lifted back; F edges get
/// level 1, which the sparse-cut routine ignores.
pub fn hierarchy_without(g: &DiGraph, cap: &[i64], f_mask: &[bool], phi: Ratio, seed: u64) -> Hierarchy {
    let keep: Vec<usize> = (0..g.m()).filter(|&e| !f_mask[e]).collect();
    let arcs: Vec<_> = keep.iter().map(|&e| (g.tail(e), g.head(e), cap[e])).collect();
    let (sub, sub_cap) = build_graph(g.n(), &arcs).unwrap();
    let built = build_hierarchy(&sub, &sub_cap, phi, seed, &BuildConfig::default()).unwrap();
    let mut level = vec![1; g.m()];
    for (i, &e) in keep.iter().enumerate() {
        level[e] = built.hierarchy.level[i];
    }
    Hierarchy {
        eta: level.iter().copied().max().unwrap_or(0),
        level,
        tau: built.hierarchy.tau,
    }
}
