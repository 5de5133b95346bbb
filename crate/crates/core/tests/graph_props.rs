mod common;

use common::{random_arcs, random_diffusion, transitive_closure};
use hiflow::{
    build_graph, condensation_topo_order, decompose_paths, edmonds_karp, flow_stats, residual, scc, DiGraph,
    Flow,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn scc_matches_closure() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..400 {
        let n = rng.gen_range(2..10);
        let m = rng.gen_range(0..3 * n);
        let arcs = random_arcs(&mut rng, n, m, 1);
        let pairs: Vec<(usize, usize)> = arcs.iter().map(|a| (a.0, a.1)).collect();
        let g = DiGraph::new(n, &pairs).unwrap();
        let r = transitive_closure(n, &pairs);
        let comps = scc(&g);
        let mut id = vec![usize::MAX; n];
        for (i, c) in comps.iter().enumerate() {
            for &v in c {
                assert_eq!(id[v], usize::MAX, "vertex in two components");
                id[v] = i;
            }
        }
        for u in 0..n {
            for v in 0..n {
                assert_eq!(id[u] == id[v], r[u][v] && r[v][u]);
            }
        }
    }
}

#[test]
fn condensation_order_points_forward() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let n = rng.gen_range(2..12);
        let arcs = random_arcs(&mut rng, n, 2 * n, 1);
        let pairs: Vec<(usize, usize)> = arcs.iter().map(|a| (a.0, a.1)).collect();
        let g = DiGraph::new(n, &pairs).unwrap();
        let order = condensation_topo_order(&g);
        let mut pos = vec![0; n];
        for (i, c) in order.iter().enumerate() {
            for &v in c {
                pos[v] = i;
            }
        }
        for (_, u, v) in g.edges() {
            assert!(pos[u] <= pos[v]);
        }
    }
}

/// |f| equals out-minus-in across every cut S, adjusted by the source and
/// sink amounts on each side.
#[test]
fn flow_value_identity_on_every_cut() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..60 {
        let n = rng.gen_range(2..9);
        let arcs = random_arcs(&mut rng, n, 3 * n, 6);
        let (g, cap) = build_graph(n, &arcs).unwrap();
        let inst = random_diffusion(&mut rng, g, cap, 8);
        let f = edmonds_karp(&inst);
        assert!(f.is_feasible(&inst.cap));
        let st = flow_stats(&inst, &f);
        for mask in 0u32..(1 << n) {
            let ins = |v: usize| mask >> v & 1 == 1;
            let mut lhs = 0i64;
            for (e, u, v) in inst.graph.edges() {
                if ins(u) && !ins(v) {
                    lhs += f.get(e);
                }
                if !ins(u) && ins(v) {
                    lhs -= f.get(e);
                }
            }
            let mut rhs = 0i64;
            for v in 0..n {
                if ins(v) {
                    rhs += inst.source[v] - st.excess[v] - st.absorption[v];
                }
            }
            assert_eq!(lhs, rhs);
        }
        let abs: i64 = st.absorption.iter().sum();
        let ex: i64 = st.excess.iter().sum();
        assert_eq!(st.value, abs);
        assert_eq!(inst.source_total(), abs + ex);
    }
}

#[test]
fn decomposition_recomposes() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..200 {
        let n = rng.gen_range(2..12);
        let arcs = random_arcs(&mut rng, n, 3 * n, 9);
        let (g, cap) = build_graph(n, &arcs).unwrap();
        let inst = random_diffusion(&mut rng, g, cap, 10);
        let f = edmonds_karp(&inst);
        let d = decompose_paths(&inst, &f);
        assert_eq!(d.recompose(&inst.graph).values(), f.values());
        let routed: i64 = d.paths.iter().map(|p| p.1).sum();
        let surplus: i64 = f.net_out().iter().map(|&x| x.max(0)).sum();
        assert_eq!(routed, surplus);
        // a vertex that is both source and sink absorbs its own mass with no path
        let local: i64 = (0..n).map(|v| inst.source[v].min(inst.sink[v])).sum();
        let value = flow_stats(&inst, &f).value;
        assert!(routed <= value && value <= routed + local);
        if local == 0 {
            assert_eq!(routed, value);
        }
        for (path, amt) in &d.paths {
            assert!(*amt > 0);
            for w in path.windows(2) {
                assert_eq!(inst.graph.head(w[0]), inst.graph.tail(w[1]));
            }
        }
    }
}

#[test]
fn residual_arc_capacities() {
    let (g, cap) = build_graph(3, &[(0, 1, 4), (1, 2, 2)]).unwrap();
    let inst = hiflow::FlowInstance::st(g.clone(), cap, 0, 2, 10);
    let f = Flow::from_edges(&g, vec![2, 2]);
    let r = residual(&inst, &f).unwrap();
    assert_eq!(r.cap, vec![2, 2, 0, 2]);
}
