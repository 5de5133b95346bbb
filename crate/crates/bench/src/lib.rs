//! Shared instance corpus for the benches.

use hiflow::{generate, FlowInstance, GenParams, Model};

/// Seeded instances per family, named like the generator names them.
pub fn corpus(seeds: u64) -> Vec<(String, FlowInstance)> {
    let families = [
        (Model::Random, GenParams { n: 30, m: 120, max_cap: 20, bridge: 0 }),
        (Model::Dag, GenParams { n: 30, m: 120, max_cap: 20, bridge: 0 }),
        (Model::Grid, GenParams { n: 5, m: 6, max_cap: 20, bridge: 0 }),
        (Model::Dumbbell, GenParams { n: 8, m: 0, max_cap: 1, bridge: 3 }),
    ];
    let mut out = Vec::new();
    for (model, p) in families {
        for seed in 0..seeds {
            let f = generate(model, &p, seed).expect("valid parameters");
            out.push((f.name.clone(), f.instance().expect("generated instances are well formed")));
        }
    }
    out
}
