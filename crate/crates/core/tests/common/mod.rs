//! Deterministic graph corpus shared by the integration tests.

#![allow(dead_code)]

use isoreach::graph::{gen_diamond_stack, gen_grid, gen_random, Graph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct Instance {
    pub name: String,
    pub graph: Graph,
}

const CORPUS_SEED: u64 = 0x150_4eac;
const SMALL_RANDOM: usize = 60;
const LARGE_RANDOM: usize = 110;

fn random_instance(rng: &mut ChaCha8Rng, n: usize, idx: usize) -> Instance {
    let density: f64 = rng.gen_range(0.05..=0.9);
    let pairs = n * (n - 1);
    let m = ((density * pairs as f64).round() as usize).clamp(1, pairs);
    let seed = rng.gen();
    Instance {
        name: format!("random#{idx}(n={n},m={m},seed={seed})"),
        graph: gen_random(n, m, seed).expect("feasible edge count"),
    }
}

/// 170 random graphs (n in 4..=64, density 0.05..0.9, a third of them with
/// n <= 8), every grid up to 8x8 with rows <= cols, and diamond stacks of 1
/// to 5 layers: 211 graphs in all.
pub fn corpus() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    let mut out = Vec::new();
    for idx in 0..SMALL_RANDOM {
        let n = rng.gen_range(4..=8);
        out.push(random_instance(&mut rng, n, idx));
    }
    for idx in SMALL_RANDOM..SMALL_RANDOM + LARGE_RANDOM {
        let n = rng.gen_range(9..=64);
        out.push(random_instance(&mut rng, n, idx));
    }
    for rows in 1..=8 {
        for cols in rows..=8 {
            out.push(Instance {
                name: format!("grid{rows}x{cols}"),
                graph: gen_grid(rows, cols).unwrap(),
            });
        }
    }
    for layers in 1..=5 {
        out.push(Instance {
            name: format!("diamond{layers}"),
            graph: gen_diamond_stack(layers).unwrap(),
        });
    }
    out
}

/// `count` query pairs drawn uniformly from the vertex range.
pub fn query_pairs(g: &Graph, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (g.n() as u64) << 32 ^ g.m() as u64);
    (0..count)
        .map(|_| (rng.gen_range(1..=g.n()), rng.gen_range(1..=g.n())))
        .collect()
}
