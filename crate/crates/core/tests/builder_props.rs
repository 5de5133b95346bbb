mod common;

use common::{hierarchy_valid, random_simple, small_corpus};
use hiflow::{build_graph, build_hierarchy, BuildConfig, Ratio};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn corpus_builds_pass_enumeration() {
    let cfg = BuildConfig::default();
    for (i, (n, arcs)) in small_corpus().into_iter().enumerate().step_by(3) {
        let (g, cap) = build_graph(n, &arcs).unwrap();
        for den in [8u64, 16] {
            let phi = Ratio::new(1, den).unwrap();
            for seed in 0..2 {
                let res = build_hierarchy(&g, &cap, phi, seed, &cfg)
                    .unwrap_or_else(|e| panic!("graph {i} φ 1/{den} seed {seed}: {e}"));
                let rep = res.validation.as_ref().unwrap();
                assert!(rep.is_valid() && rep.all_exact());
                assert!(hierarchy_valid(&g, &cap, &res.hierarchy.level, 1, den as u128), "graph {i}");
            }
        }
    }
}

#[test]
fn weight_sum_bound_on_built_hierarchies() {
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    for &n in &[10usize, 30, 60, 120, 200] {
        let m = rng.gen_range(n..=3 * n);
        let arcs = random_simple(&mut rng, n, m, 5);
        let (g, cap) = build_graph(n, &arcs).unwrap();
        let phi = hiflow::default_phi(n);
        let res = build_hierarchy(&g, &cap, phi, n as u64, &BuildConfig::default()).unwrap();
        let sum: f64 = res.hierarchy.weights(&g).iter().map(|&w| 1.0 / w as f64).sum();
        let nf = n as f64;
        assert!(sum <= 2.0 * nf * (nf.ln() + 1.0), "n {n}: {sum}");
    }
}

#[test]
fn same_seed_same_hierarchy() {
    let (n, arcs) = small_corpus().swap_remove(0);
    let (g, cap) = build_graph(n, &arcs).unwrap();
    let phi = Ratio::new(1, 8).unwrap();
    let a = build_hierarchy(&g, &cap, phi, 5, &BuildConfig::default()).unwrap();
    let b = build_hierarchy(&g, &cap, phi, 5, &BuildConfig::default()).unwrap();
    assert_eq!(a.hierarchy, b.hierarchy);
    assert_eq!(a.log, b.log);
}
