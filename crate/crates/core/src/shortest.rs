//! Multi-source Dijkstra over residual arcs.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::DiGraph;

pub const INF: i64 = i64::MAX;

/// Distances from `sources` over arcs with positive residual capacity.
/// `arc_weight(a)` gives the non-negative length of residual arc `a`
/// (2e forward, 2e+1 backward). Unreachable vertices get `INF`.
pub fn residual_dijkstra(
    g: &DiGraph,
    rcap: &[i64],
    arc_weight: impl Fn(usize) -> i64,
    sources: &[usize],
) -> Vec<i64> {
    let mut dist = vec![INF; g.n()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        if dist[s] != 0 {
            dist[s] = 0;
            heap.push(Reverse((0i64, s)));
        }
    }
    while let Some(Reverse((d, v))) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        let relax = |a: usize, w: usize, dist: &mut Vec<i64>, heap: &mut BinaryHeap<_>| {
            if rcap[a] > 0 {
                let nd = d + arc_weight(a);
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(Reverse((nd, w)));
                }
            }
        };
        for &e in g.out_edges(v) {
            relax(2 * e, g.head(e), &mut dist, &mut heap);
        }
        for &e in g.in_edges(v) {
            relax(2 * e + 1, g.tail(e), &mut dist, &mut heap);
        }
    }
    dist
}
