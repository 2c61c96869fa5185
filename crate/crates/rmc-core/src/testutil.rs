//! Shared fixtures for the unit tests.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::instance::Instance;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Two locations, three regions in a path pattern, demand box [0,2] each,
/// budget 4, q = 3. Small enough to reason about by hand.
pub fn inst_a() -> Instance {
    Instance::with_gamma(
        3,
        2,
        vec![(0, 2), (0, 2), (0, 2)],
        &[(0, 0), (0, 1), (1, 1), (1, 2)],
        4,
    )
    .unwrap()
    .validate_and_normalize()
    .unwrap()
}

/// A random normalized instance where every region has at least one
/// neighbor. Unlike the production generator this may produce degenerate
/// boxes (`a_j = b_j`), which is useful coverage for the kernels.
pub fn random_small_instance(
    rng: &mut ChaCha8Rng,
    max_locations: usize,
    max_regions: usize,
    k1: u64,
    k2: u64,
) -> Instance {
    let ni = rng.random_range(1..=max_locations);
    let nj = rng.random_range(1..=max_regions);
    let q = rng.random_range(1..=3);
    let mut edges = Vec::new();
    for j in 0..nj {
        let anchor = rng.random_range(0..ni);
        edges.push((anchor, j));
        for i in 0..ni {
            if i != anchor && rng.random_bool(0.35) {
                edges.push((i, j));
            }
        }
    }
    let mut demands = Vec::with_capacity(nj);
    let mut sum_lower = 0;
    let mut sum_upper = 0;
    for _ in 0..nj {
        let a = rng.random_range(0..=k1);
        let b = a + rng.random_range(0..=k2);
        sum_lower += a;
        sum_upper += b;
        demands.push((a, b));
    }
    let gamma = rng.random_range(sum_lower..=sum_upper);
    Instance::with_gamma(q, ni, demands, &edges, gamma)
        .unwrap()
        .validate_and_normalize()
        .unwrap()
}

/// A random demand vector with entries in `[0, max_demand]`.
pub fn random_demand(rng: &mut ChaCha8Rng, regions: usize, max_demand: u64) -> Vec<u64> {
    (0..regions)
        .map(|_| rng.random_range(0..=max_demand))
        .collect()
}

/// A random supplier vector with entries in `[0, max_count]`.
pub fn random_suppliers(rng: &mut ChaCha8Rng, locations: usize, max_count: u64) -> Vec<u64> {
    (0..locations)
        .map(|_| rng.random_range(0..=max_count))
        .collect()
}
