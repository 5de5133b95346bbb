mod common;

use common::{exhaustive_min_cut, random_arcs, random_diffusion, random_simple, random_st};
use hiflow::{
    build_graph, capacity_scaled_max_flow, edmonds_karp, flow_stats, generate, max_flow_exact, ExactConfig,
    Flow, FlowInstance, GenParams, Model,
};
use hiflow::maxflow::phase_count;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Capacity, conservation and the source/sink bookkeeping, vertex by vertex.
fn assert_valid_flow(inst: &FlowInstance, f: &Flow) {
    assert!(f.is_feasible(&inst.cap));
    let st = flow_stats(inst, f);
    let mut net_in = inst.source.clone();
    for (e, u, v) in inst.graph.edges() {
        net_in[u] -= f.get(e);
        net_in[v] += f.get(e);
    }
    for v in 0..inst.graph.n() {
        assert!(st.absorption[v] >= 0 && st.absorption[v] <= inst.sink[v]);
        assert!(st.excess[v] >= 0);
        assert_eq!(net_in[v], st.absorption[v] + st.excess[v]);
    }
    assert_eq!(st.value, st.absorption.iter().sum::<i64>());
}

fn ek_value(inst: &FlowInstance) -> i64 {
    flow_stats(inst, &edmonds_karp(inst)).value
}

#[test]
fn edmonds_karp_meets_min_cut() {
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    for i in 0..300 {
        let n = rng.gen_range(2..=10);
        let inst = if i % 2 == 0 {
            random_st(&mut rng, n, 3 * n, 20)
        } else {
            let arcs = random_arcs(&mut rng, n, 3 * n, 20);
            let (g, cap) = build_graph(n, &arcs).unwrap();
            random_diffusion(&mut rng, g, cap, 25)
        };
        let f = edmonds_karp(&inst);
        assert_valid_flow(&inst, &f);
        assert_eq!(flow_stats(&inst, &f).value, exhaustive_min_cut(&inst));
    }
}

#[test]
fn exact_matches_oracle_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let cfg = ExactConfig::default();
    for i in 0..120u64 {
        let n = rng.gen_range(2..=20);
        let m = rng.gen_range(1..=4 * n);
        let inst = if i % 3 == 0 {
            let arcs = random_arcs(&mut rng, n, m, 20);
            let (g, cap) = build_graph(n, &arcs).unwrap();
            random_diffusion(&mut rng, g, cap, 30)
        } else {
            random_st(&mut rng, n, m, 20)
        };
        let r = max_flow_exact(&inst, i, &cfg).unwrap();
        assert_valid_flow(&inst, &r.flow);
        assert_eq!(r.value, ek_value(&inst), "instance {i}");
    }
}

#[test]
fn exact_matches_oracle_on_families() {
    let cfg = ExactConfig::default();
    let cases = [
        (Model::Dumbbell, GenParams { n: 5, bridge: 3, ..Default::default() }),
        (Model::Dumbbell, GenParams { n: 7, bridge: 1, ..Default::default() }),
        (Model::Grid, GenParams { n: 4, m: 5, max_cap: 9, ..Default::default() }),
        (Model::Cycle, GenParams { n: 12, ..Default::default() }),
        (Model::Dag, GenParams { n: 15, m: 50, ..Default::default() }),
    ];
    for (seed, (model, p)) in cases.iter().enumerate() {
        let inst = generate(*model, p, seed as u64).unwrap().instance().unwrap();
        let r = max_flow_exact(&inst, 7, &cfg).unwrap();
        assert_valid_flow(&inst, &r.flow);
        assert_eq!(r.value, ek_value(&inst));
    }
}

#[test]
fn exact_with_debug_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    let cfg = ExactConfig { debug_invariants: true, ..ExactConfig::default() };
    for i in 0..20 {
        let inst = random_st(&mut rng, 10, 30, 10);
        let r = max_flow_exact(&inst, i, &cfg).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert_eq!(r.value, ek_value(&inst));
    }
}

#[test]
fn exact_is_seed_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let inst = random_st(&mut rng, 15, 50, 20);
    let a = max_flow_exact(&inst, 3, &ExactConfig::default()).unwrap();
    let b = max_flow_exact(&inst, 3, &ExactConfig::default()).unwrap();
    assert_eq!(a.flow.values(), b.flow.values());
    assert_eq!(a.iterations, b.iterations);
}

#[test]
fn phase_count_for_every_capacity_up_to_a_million() {
    let mut k = 0usize;
    for u in 1..=1_000_000i64 {
        while (1i64 << k) < u {
            k += 1;
        }
        assert_eq!(phase_count(u), k + 1, "U = {u}");
    }
}

#[test]
fn scaled_solver_matches_direct() {
    let mut rng = ChaCha8Rng::seed_from_u64(65);
    for i in 0..100 {
        let n = rng.gen_range(2..=12);
        let max_m = n * (n - 1);
        let m = rng.gen_range(1..=max_m.min(4 * n));
        let u = [1i64, 7, 1000, 1_000_000][i % 4];
        let arcs = random_simple(&mut rng, n, m, u);
        let (g, cap) = build_graph(n, &arcs).unwrap();
        let inst = if i % 2 == 0 {
            let s = rng.gen_range(0..n);
            let t = (s + rng.gen_range(1..n)) % n;
            FlowInstance::st(g, cap, s, t, u * m as i64 + 1)
        } else {
            random_diffusion(&mut rng, g, cap, 3 * u)
        };
        let res = capacity_scaled_max_flow(&inst, |ri| Ok::<_, ()>(edmonds_karp(ri))).unwrap();
        let top = inst.cap.iter().copied().max().unwrap();
        assert_eq!(res.phases, phase_count(top));
        for &v in &res.phase_values {
            assert!(v <= (n * n) as i64, "phase value {v} above n² for n = {n}");
        }
        assert_valid_flow(&inst, &res.flow);
        assert_eq!(flow_stats(&inst, &res.flow).value, ek_value(&inst));
    }
}

#[test]
fn scaled_exact_solver() {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for i in 0..10u64 {
        let arcs = random_simple(&mut rng, 8, 24, 1_000_000);
        let (g, cap) = build_graph(8, &arcs).unwrap();
        let inst = FlowInstance::st(g, cap, 0, 7, 30_000_000);
        let cfg = ExactConfig::default();
        let res = capacity_scaled_max_flow(&inst, |ri| max_flow_exact(ri, i, &cfg).map(|r| r.flow)).unwrap();
        assert_eq!(flow_stats(&inst, &res.flow).value, ek_value(&inst));
    }
}
