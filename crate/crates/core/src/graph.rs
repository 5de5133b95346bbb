//! Directed capacitated multigraphs, flow instances, residual views and
//! the component/order helpers the solvers are built on.

use std::collections::VecDeque;

use thiserror::Error;

pub type EdgeId = usize;
pub type Capacities = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex out of range: {0}")]
    VertexOutOfRange(usize),
    #[error("negative capacity on edge {0}")]
    NegativeCapacity(usize),
    #[error("total source {source_total} exceeds total sink {sink_total}")]
    NotDiffusion { source_total: i64, sink_total: i64 },
    #[error("flow on edge {0} exceeds its capacity or is negative")]
    InfeasibleFlow(EdgeId),
    #[error("vector length {got} does not match {expected}")]
    LengthMismatch { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiGraph {
    n: usize,
    tail: Vec<usize>,
    head: Vec<usize>,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
}

impl DiGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut tail = Vec::with_capacity(edges.len());
        let mut head = Vec::with_capacity(edges.len());
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            if u >= n {
                return Err(GraphError::VertexOutOfRange(u));
            }
            if v >= n {
                return Err(GraphError::VertexOutOfRange(v));
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            tail.push(u);
            head.push(v);
            out_adj[u].push(id);
            in_adj[v].push(id);
        }
        Ok(DiGraph {
            n,
            tail,
            head,
            out_adj,
            in_adj,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.tail.len()
    }

    pub fn tail(&self, e: EdgeId) -> usize {
        self.tail[e]
    }

    pub fn head(&self, e: EdgeId) -> usize {
        self.head[e]
    }

    pub fn ends(&self, e: EdgeId) -> (usize, usize) {
        (self.tail[e], self.head[e])
    }

    pub fn out_edges(&self, v: usize) -> &[EdgeId] {
        &self.out_adj[v]
    }

    pub fn in_edges(&self, v: usize) -> &[EdgeId] {
        &self.in_adj[v]
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, usize, usize)> + '_ {
        (0..self.m()).map(move |e| (e, self.tail[e], self.head[e]))
    }

    /// Subgraph on `verts` keeping edges accepted by `keep` with both ends
    /// inside. Returns the graph, the original id of every new edge and the
    /// original vertex of every new vertex.
    pub fn induced(
        &self,
        verts: &[usize],
        keep: impl Fn(EdgeId) -> bool,
    ) -> (DiGraph, Vec<EdgeId>, Vec<usize>) {
        let mut local = vec![usize::MAX; self.n];
        for (i, &v) in verts.iter().enumerate() {
            local[v] = i;
        }
        let mut edges = Vec::new();
        let mut emap = Vec::new();
        for &v in verts {
            for &e in &self.out_adj[v] {
                let h = self.head[e];
                if local[h] != usize::MAX && keep(e) {
                    edges.push((local[v], local[h]));
                    emap.push(e);
                }
            }
        }
        let g = DiGraph::new(verts.len(), &edges).expect("induced subgraph is well formed");
        (g, emap, verts.to_vec())
    }
}

pub fn build_graph(
    n: usize,
    arcs: &[(usize, usize, i64)],
) -> Result<(DiGraph, Capacities), GraphError> {
    let pairs: Vec<(usize, usize)> = arcs.iter().map(|&(u, v, _)| (u, v)).collect();
    let g = DiGraph::new(n, &pairs)?;
    let mut caps = Vec::with_capacity(arcs.len());
    for (e, &(_, _, c)) in arcs.iter().enumerate() {
        if c < 0 {
            return Err(GraphError::NegativeCapacity(e));
        }
        caps.push(c);
    }
    Ok((g, caps))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowInstance {
    pub graph: DiGraph,
    pub cap: Capacities,
    pub source: Vec<i64>,
    pub sink: Vec<i64>,
}

impl FlowInstance {
    pub fn new(
        graph: DiGraph,
        cap: Capacities,
        source: Vec<i64>,
        sink: Vec<i64>,
    ) -> Result<Self, GraphError> {
        if cap.len() != graph.m() {
            return Err(GraphError::LengthMismatch {
                expected: graph.m(),
                got: cap.len(),
            });
        }
        for v in [&source, &sink] {
            if v.len() != graph.n() {
                return Err(GraphError::LengthMismatch {
                    expected: graph.n(),
                    got: v.len(),
                });
            }
        }
        if let Some(e) = cap.iter().position(|&c| c < 0) {
            return Err(GraphError::NegativeCapacity(e));
        }
        let source_total: i64 = source.iter().sum();
        let sink_total: i64 = sink.iter().sum();
        if source_total > sink_total || source.iter().chain(&sink).any(|&x| x < 0) {
            return Err(GraphError::NotDiffusion {
                source_total,
                sink_total,
            });
        }
        Ok(FlowInstance {
            graph,
            cap,
            source,
            sink,
        })
    }

    /// Single-source single-sink instance with the given amount on both ends.
    pub fn st(graph: DiGraph, cap: Capacities, s: usize, t: usize, amount: i64) -> Self {
        let n = graph.n();
        let mut source = vec![0; n];
        let mut sink = vec![0; n];
        source[s] = amount;
        sink[t] = amount;
        FlowInstance {
            graph,
            cap,
            source,
            sink,
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn source_total(&self) -> i64 {
        self.source.iter().sum()
    }
}

/// Per-edge flow with the net outflow of every vertex kept in sync.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flow {
    f: Vec<i64>,
    out: Vec<i64>,
}

impl Flow {
    pub fn zero(g: &DiGraph) -> Self {
        Flow {
            f: vec![0; g.m()],
            out: vec![0; g.n()],
        }
    }

    pub fn from_edges(g: &DiGraph, f: Vec<i64>) -> Self {
        assert_eq!(f.len(), g.m());
        let mut out = vec![0; g.n()];
        for (e, u, v) in g.edges() {
            out[u] += f[e];
            out[v] -= f[e];
        }
        Flow { f, out }
    }

    pub fn add(&mut self, g: &DiGraph, e: EdgeId, amount: i64) {
        self.f[e] += amount;
        self.out[g.tail(e)] += amount;
        self.out[g.head(e)] -= amount;
    }

    pub fn get(&self, e: EdgeId) -> i64 {
        self.f[e]
    }

    pub fn values(&self) -> &[i64] {
        &self.f
    }

    /// Net outflow f_out(v) of every vertex.
    pub fn net_out(&self) -> &[i64] {
        &self.out
    }

    pub fn is_feasible(&self, cap: &[i64]) -> bool {
        self.f.iter().zip(cap).all(|(&f, &c)| f >= 0 && f <= c)
    }

    /// w(f) = sum of w(e) f(e).
    pub fn weighted_length(&self, w: &[i64]) -> i64 {
        self.f.iter().zip(w).map(|(&f, &w)| f * w).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowStats {
    pub value: i64,
    pub excess: Vec<i64>,
    pub absorption: Vec<i64>,
}

pub fn flow_stats(inst: &FlowInstance, f: &Flow) -> FlowStats {
    let n = inst.n();
    let mut excess = vec![0; n];
    let mut absorption = vec![0; n];
    for v in 0..n {
        let inflow = inst.source[v] - f.out[v];
        absorption[v] = inflow.min(inst.sink[v]);
        excess[v] = inflow - absorption[v];
    }
    FlowStats {
        value: absorption.iter().sum(),
        excess,
        absorption,
    }
}

/// Residual arcs are numbered 2e (forward) and 2e+1 (backward).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualView {
    pub cap: Vec<i64>,
    pub sources: Vec<i64>,
    pub sinks: Vec<i64>,
}

pub fn arc_edge(a: usize) -> EdgeId {
    a >> 1
}

pub fn arc_is_forward(a: usize) -> bool {
    a & 1 == 0
}

pub fn arc_reverse(a: usize) -> usize {
    a ^ 1
}

pub fn arc_ends(g: &DiGraph, a: usize) -> (usize, usize) {
    let (u, v) = g.ends(a >> 1);
    if a & 1 == 0 {
        (u, v)
    } else {
        (v, u)
    }
}

impl ResidualView {
    pub fn arcs(&self) -> usize {
        self.cap.len()
    }

    pub fn usable(&self, a: usize) -> bool {
        self.cap[a] > 0
    }
}

pub fn residual(inst: &FlowInstance, f: &Flow) -> Result<ResidualView, GraphError> {
    let m = inst.m();
    let mut cap = vec![0; 2 * m];
    for e in 0..m {
        let fe = f.f[e];
        if fe < 0 || fe > inst.cap[e] {
            return Err(GraphError::InfeasibleFlow(e));
        }
        cap[2 * e] = inst.cap[e] - fe;
        cap[2 * e + 1] = fe;
    }
    let st = flow_stats(inst, f);
    let sinks = inst
        .sink
        .iter()
        .zip(&st.absorption)
        .map(|(&t, &a)| t - a)
        .collect();
    Ok(ResidualView {
        cap,
        sources: st.excess,
        sinks,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PathDecomposition {
    pub paths: Vec<(Vec<EdgeId>, i64)>,
    pub cycles: Vec<(Vec<EdgeId>, i64)>,
}

impl PathDecomposition {
    /// Sum of all path amounts placed back on the edges.
    pub fn recompose(&self, g: &DiGraph) -> Flow {
        let mut f = Flow::zero(g);
        for (p, a) in &self.paths {
            for &e in p {
                f.add(g, e, *a);
            }
        }
        f
    }
}

/// Splits `f` into grouped source-to-sink paths plus leftover cycles.
pub fn decompose_paths(inst: &FlowInstance, f: &Flow) -> PathDecomposition {
    let g = &inst.graph;
    let n = g.n();
    let mut rem = f.f.clone();
    let mut surplus = f.out.clone();
    let mut next_out = vec![0usize; n];
    let mut out = PathDecomposition::default();

    // Walk forward along positive remaining flow from a vertex with surplus
    // until a vertex with deficit is reached, peeling cycles on the way.
    for s in 0..n {
        while surplus[s] > 0 {
            let mut stack: Vec<EdgeId> = Vec::new();
            let mut pos = vec![usize::MAX; n];
            pos[s] = 0;
            let mut v = s;
            loop {
                if v != s && surplus[v] < 0 {
                    break;
                }
                let e = loop {
                    let adj = g.out_edges(v);
                    let i = next_out[v];
                    if i >= adj.len() {
                        unreachable!("conservation guarantees an outgoing edge");
                    }
                    if rem[adj[i]] > 0 {
                        break adj[i];
                    }
                    next_out[v] += 1;
                };
                let w = g.head(e);
                stack.push(e);
                if pos[w] != usize::MAX {
                    let start = pos[w];
                    let cyc: Vec<EdgeId> = stack.split_off(start);
                    let amt = cyc.iter().map(|&e| rem[e]).min().unwrap();
                    for &c in &cyc {
                        rem[c] -= amt;
                    }
                    for &c in &cyc {
                        let h = g.head(c);
                        if h != w {
                            pos[h] = usize::MAX;
                        }
                    }
                    out.cycles.push((cyc, amt));
                    v = w;
                    continue;
                }
                pos[w] = stack.len();
                v = w;
            }
            let mut amt = surplus[s].min(-surplus[v]);
            for &e in &stack {
                amt = amt.min(rem[e]);
            }
            for &e in &stack {
                rem[e] -= amt;
            }
            surplus[s] -= amt;
            surplus[v] += amt;
            out.paths.push((stack, amt));
        }
    }
    // Whatever remains is a circulation.
    for s in 0..n {
        loop {
            let Some(&e0) = g.out_edges(s).iter().find(|&&e| rem[e] > 0) else {
                break;
            };
            let mut stack = vec![e0];
            let mut pos = vec![usize::MAX; n];
            pos[s] = 0;
            let mut v = g.head(e0);
            while pos[v] == usize::MAX {
                pos[v] = stack.len();
                let e = *g
                    .out_edges(v)
                    .iter()
                    .find(|&&e| rem[e] > 0)
                    .expect("circulation has an outgoing edge");
                stack.push(e);
                v = g.head(e);
            }
            let cyc: Vec<EdgeId> = stack.split_off(pos[v]);
            let amt = cyc.iter().map(|&e| rem[e]).min().unwrap();
            for &c in &cyc {
                rem[c] -= amt;
            }
            out.cycles.push((cyc, amt));
        }
    }
    out
}

/// Strongly connected components of the subgraph on `verts` using the edges
/// accepted by `keep`. Components come out in topological order of the
/// condensation (sources first).
pub fn scc_sub(g: &DiGraph, verts: &[usize], keep: impl Fn(EdgeId) -> bool) -> Vec<Vec<usize>> {
    let n = g.n();
    let mut inside = vec![false; n];
    for &v in verts {
        inside[v] = true;
    }
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for &root in verts {
        if index[root] != usize::MAX {
            continue;
        }
        call.push((root, 0));
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            let adj = g.out_edges(v);
            if *i < adj.len() {
                let e = adj[*i];
                *i += 1;
                let w = g.head(e);
                if !inside[w] || !keep(e) {
                    continue;
                }
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    // Tarjan emits sinks of the condensation first.
    comps.reverse();
    comps
}

/// Components in reverse topological discovery order (Tarjan's order).
pub fn scc(g: &DiGraph) -> Vec<Vec<usize>> {
    let all: Vec<usize> = (0..g.n()).collect();
    let mut c = scc_sub(g, &all, |_| true);
    c.reverse();
    c
}

/// Components ordered so that every inter-component edge points forward.
pub fn condensation_topo_order(g: &DiGraph) -> Vec<Vec<usize>> {
    let all: Vec<usize> = (0..g.n()).collect();
    scc_sub(g, &all, |_| true)
}

/// Component index of every vertex, numbered in topological order.
pub fn component_ids(comps: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut id = vec![usize::MAX; n];
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            id[v] = i;
        }
    }
    id
}

/// Kahn topological order of the subgraph on `verts` with edges accepted by
/// `keep`; `None` if that subgraph has a cycle. Ties go to the smallest vertex.
pub fn topo_order_sub(
    g: &DiGraph,
    verts: &[usize],
    keep: impl Fn(EdgeId) -> bool,
) -> Option<Vec<usize>> {
    let n = g.n();
    let mut inside = vec![false; n];
    for &v in verts {
        inside[v] = true;
    }
    let mut indeg = vec![0usize; n];
    for &v in verts {
        for &e in g.out_edges(v) {
            let w = g.head(e);
            if inside[w] && keep(e) {
                indeg[w] += 1;
            }
        }
    }
    let mut ready: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = verts
        .iter()
        .filter(|&&v| indeg[v] == 0)
        .map(|&v| std::cmp::Reverse(v))
        .collect();
    let mut order = Vec::with_capacity(verts.len());
    while let Some(std::cmp::Reverse(v)) = ready.pop() {
        order.push(v);
        for &e in g.out_edges(v) {
            let w = g.head(e);
            if inside[w] && keep(e) {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    ready.push(std::cmp::Reverse(w));
                }
            }
        }
    }
    (order.len() == verts.len()).then_some(order)
}

pub fn topo_order(g: &DiGraph) -> Option<Vec<usize>> {
    let all: Vec<usize> = (0..g.n()).collect();
    topo_order_sub(g, &all, |_| true)
}

pub fn is_acyclic(g: &DiGraph) -> bool {
    topo_order(g).is_some()
}

pub fn is_strongly_connected(g: &DiGraph) -> bool {
    g.n() <= 1 || scc(g).len() == 1
}

/// Vertices reachable from `from` over residual arcs with positive capacity.
pub fn residual_reach(g: &DiGraph, rcap: &[i64], from: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &s in from {
        if !seen[s] {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &e in g.out_edges(v) {
            let w = g.head(e);
            if rcap[2 * e] > 0 && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
        for &e in g.in_edges(v) {
            let w = g.tail(e);
            if rcap[2 * e + 1] > 0 && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Capacity-weighted degree over the edges in `mask` (in plus out).
pub fn degree_in(g: &DiGraph, cap: &[i64], mask: &[bool]) -> Vec<i64> {
    let mut d = vec![0; g.n()];
    for (e, u, v) in g.edges() {
        if mask[e] {
            d[u] += cap[e];
            d[v] += cap[e];
        }
    }
    d
}
