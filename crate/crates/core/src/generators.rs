//! Seeded instance families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::formats::{InstanceFile, Terminals};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad parameters: {0}")]
pub struct BadParams(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Dag,
    Random,
    Dumbbell,
    Cycle,
    Grid,
}

impl std::str::FromStr for Model {
    type Err = BadParams;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "dag" => Model::Dag,
            "random" => Model::Random,
            "dumbbell" => Model::Dumbbell,
            "cycle" => Model::Cycle,
            "grid" => Model::Grid,
            _ => return Err(BadParams(format!("unknown model `{s}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    /// Vertices; for dumbbell the clique size, for grid the row count.
    pub n: usize,
    /// Arcs; for grid the column count.
    pub m: usize,
    pub max_cap: i64,
    /// Capacity of each bridge arc in a dumbbell.
    pub bridge: i64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 10,
            m: 30,
            max_cap: 10,
            bridge: 3,
        }
    }
}

pub fn generate(model: Model, p: &GenParams, seed: u64) -> Result<InstanceFile, BadParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if p.max_cap < 1 {
        return Err(BadParams("max_cap must be at least 1".into()));
    }
    let f = match model {
        Model::Random => random(p.n, p.m, p.max_cap, &mut rng)?,
        Model::Dag => dag(p.n, p.m, p.max_cap, &mut rng)?,
        Model::Dumbbell => dumbbell(p.n, p.bridge)?,
        Model::Cycle => cycle(p.n)?,
        Model::Grid => grid(p.n, p.m, p.max_cap, &mut rng)?,
    };
    Ok(InstanceFile {
        name: format!("{}-{}-{}-{}", model_name(model), p.n, p.m, seed),
        ..f
    })
}

fn model_name(m: Model) -> &'static str {
    match m {
        Model::Dag => "dag",
        Model::Random => "random",
        Model::Dumbbell => "dumbbell",
        Model::Cycle => "cycle",
        Model::Grid => "grid",
    }
}

fn st(n: usize, arcs: Vec<(usize, usize, i64)>, s: usize, t: usize) -> InstanceFile {
    InstanceFile {
        name: String::new(),
        n,
        arcs,
        terminals: Terminals::St { s, t },
    }
}

/// m arcs between uniformly random distinct endpoints; s = 0, t = n − 1.
pub fn random(n: usize, m: usize, max_cap: i64, rng: &mut ChaCha8Rng) -> Result<InstanceFile, BadParams> {
    if n < 2 {
        return Err(BadParams("random needs n ≥ 2".into()));
    }
    let arcs = (0..m)
        .map(|_| {
            let u = rng.gen_range(0..n);
            let mut v = rng.gen_range(0..n - 1);
            if v >= u {
                v += 1;
            }
            (u, v, rng.gen_range(1..=max_cap))
        })
        .collect();
    Ok(st(n, arcs, 0, n - 1))
}

/// Arcs go forward in a random vertex order; s and t are its ends.
pub fn dag(n: usize, m: usize, max_cap: i64, rng: &mut ChaCha8Rng) -> Result<InstanceFile, BadParams> {
    if n < 2 {
        return Err(BadParams("dag needs n ≥ 2".into()));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let arcs = (0..m)
        .map(|_| {
            let i = rng.gen_range(0..n - 1);
            let j = rng.gen_range(i + 1..n);
            (order[i], order[j], rng.gen_range(1..=max_cap))
        })
        .collect();
    Ok(st(n, arcs, order[0], order[n - 1]))
}

/// Two unit-capacity complete digraphs on k vertices joined by one arc each
/// way of capacity `bridge`; s in the first clique, t in the second.
pub fn dumbbell(k: usize, bridge: i64) -> Result<InstanceFile, BadParams> {
    if k < 2 || bridge < 1 {
        return Err(BadParams("dumbbell needs k ≥ 2 and bridge ≥ 1".into()));
    }
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
    Ok(st(2 * k, arcs, 0, 2 * k - 1))
}

/// Unit directed cycle; t sits halfway round.
pub fn cycle(n: usize) -> Result<InstanceFile, BadParams> {
    if n < 2 {
        return Err(BadParams("cycle needs n ≥ 2".into()));
    }
    let arcs = (0..n).map(|i| (i, (i + 1) % n, 1)).collect();
    Ok(st(n, arcs, 0, n / 2))
}

/// rows × cols grid with arcs both ways between neighbours.
pub fn grid(rows: usize, cols: usize, max_cap: i64, rng: &mut ChaCha8Rng) -> Result<InstanceFile, BadParams> {
    if rows == 0 || cols == 0 || rows * cols < 2 {
        return Err(BadParams("grid needs at least two cells".into()));
    }
    let id = |r: usize, c: usize| r * cols + c;
    let mut arcs = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            if c + 1 < cols {
                arcs.push((id(r, c), id(r, c + 1), rng.gen_range(1..=max_cap)));
                arcs.push((id(r, c + 1), id(r, c), rng.gen_range(1..=max_cap)));
            }
            if r + 1 < rows {
                arcs.push((id(r, c), id(r + 1, c), rng.gen_range(1..=max_cap)));
                arcs.push((id(r + 1, c), id(r, c), rng.gen_range(1..=max_cap)));
            }
        }
    }
    Ok(st(rows * cols, arcs, 0, rows * cols - 1))
}
