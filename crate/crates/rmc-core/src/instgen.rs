//! Instance factories: seeded random instances, uniform extreme-scenario
//! sampling, the dominating-set reduction and travel-time geographic
//! instances.
//!
//! All randomness flows through seeded ChaCha8 streams so that instances
//! are bit-reproducible from `(params, seed)` across platforms. The
//! generator uses one child stream per phase: stream 0 draws the anchor
//! location of every region, stream 1 the remaining edge coin flips and
//! stream 2 the demand bounds. The graph phases never consume
//! demand-dependent randomness, so instances sharing `(seed, |I|, |J|, p)`
//! share their underlying graph across demand configurations.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{Instance, Scenario};
use crate::matching::GeneralGraph;

/// Parameters of the random generator.
#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub num_locations: usize,
    pub num_regions: usize,
    /// Target edge density `p`; the expected edge count is `|I| * |J| * p`.
    pub edge_density: f64,
    /// Lower demands are uniform on `[0, k1]`.
    pub k1: u64,
    /// Upper demands add a uniform increment from `[1, k2]`.
    pub k2: u64,
    /// Places the budget between `sum(a)` (0.0) and `sum(b)` (1.0).
    pub gamma_factor: f64,
    pub q: u64,
    pub seed: u64,
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        if self.num_locations == 0 || self.num_regions == 0 {
            return Err(Error::BadParams("empty location or region set".into()));
        }
        if self.q == 0 {
            return Err(Error::BadParams("q must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.edge_density) || self.edge_density <= 0.0 {
            return Err(Error::BadParams("edge density must be in (0, 1]".into()));
        }
        if self.num_locations as f64 * self.edge_density < 1.0 - 1e-9 {
            return Err(Error::BadParams(
                "need |I| * p >= 1 so the anchor edges do not exceed the target density".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.gamma_factor) {
            return Err(Error::BadParams("gamma factor must be in [0, 1]".into()));
        }
        if self.k2 == 0 {
            return Err(Error::BadParams("k2 must be at least 1".into()));
        }
        Ok(())
    }
}

fn phase_rng(seed: u64, phase: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(phase);
    rng
}

/// Draws a random instance: every region first gets one uniform anchor
/// location (so no region is uncoverable), then each remaining pair is
/// added independently with probability `(|I|p - 1) / (|I| - 1)`, making
/// the expected edge count exactly `|I| * |J| * p`. Demands are uniform
/// in the configured ranges and the budget interpolates between `sum(a)`
/// and `sum(b)` by the gamma factor, rounding half to even.
pub fn random_instance(params: &GenParams) -> Result<Instance> {
    params.validate()?;
    let ni = params.num_locations;
    let nj = params.num_regions;

    let mut anchor_rng = phase_rng(params.seed, 0);
    let anchors: Vec<usize> = (0..nj).map(|_| anchor_rng.random_range(0..ni)).collect();

    let extra_probability = if ni == 1 {
        0.0
    } else {
        ((ni as f64 * params.edge_density - 1.0) / (ni as f64 - 1.0)).max(0.0)
    };
    let mut edge_rng = phase_rng(params.seed, 1);
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (j, &anchor) in anchors.iter().enumerate() {
        edges.push((anchor, j));
        for i in 0..ni {
            if i != anchor && edge_rng.random::<f64>() < extra_probability {
                edges.push((i, j));
            }
        }
    }

    let mut demand_rng = phase_rng(params.seed, 2);
    let mut demands = Vec::with_capacity(nj);
    let mut sum_lower = 0u64;
    let mut sum_upper = 0u64;
    for _ in 0..nj {
        let a = demand_rng.random_range(0..=params.k1);
        let b = a + demand_rng.random_range(1..=params.k2);
        sum_lower += a;
        sum_upper += b;
        demands.push((a, b));
    }
    let spread = (sum_upper - sum_lower) as f64;
    let gamma = sum_lower + (params.gamma_factor * spread).round_ties_even() as u64;

    Instance::with_gamma(params.q, ni, demands, &edges, gamma)?.validate_and_normalize()
}

/// Uniform sampler over the extreme scenarios of a normalized instance,
/// i.e. the integral points of the demand box whose total meets the
/// budget exactly.
///
/// A suffix dynamic program counts the lattice points, then each region's
/// demand is drawn from its exact conditional distribution. Counts are
/// held in `f64`; relative rounding error around 1e-16 is far below any
/// statistical resolution.
#[derive(Debug, Clone)]
pub struct ExtremeSampler {
    lower: Vec<u64>,
    widths: Vec<u64>,
    target: u64,
    /// `ways[r][t]` = number of choices for regions `r..` summing to `t`
    ways: Vec<Vec<f64>>,
}

impl ExtremeSampler {
    pub fn new(inst: &Instance) -> Self {
        let lower = inst.lower_demands().to_vec();
        let widths: Vec<u64> = inst
            .upper_demands()
            .iter()
            .zip(&lower)
            .map(|(&b, &a)| b - a)
            .collect();
        let target = inst.gamma() - inst.sum_lower();
        let nj = lower.len();
        let t_max = target as usize;
        let mut ways = vec![vec![0.0f64; t_max + 1]; nj + 1];
        ways[nj][0] = 1.0;
        // plain convolution of non-negative terms; a sliding-window or
        // prefix-sum formulation would subtract near-equal huge counts
        // and cancel small entries to zero
        for r in (0..nj).rev() {
            let w = widths[r] as usize;
            for t in 0..=t_max {
                let mut total = 0.0;
                for v in 0..=w.min(t) {
                    total += ways[r + 1][t - v];
                }
                ways[r][t] = total;
            }
        }
        debug_assert!(
            ways[0][t_max] > 0.0,
            "no extreme scenario exists; instance unnormalized?"
        );
        ExtremeSampler {
            lower,
            widths,
            target,
            ways,
        }
    }

    /// Number of extreme scenarios (up to float rounding).
    pub fn count(&self) -> f64 {
        self.ways[0][self.target as usize]
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<u64> {
        let nj = self.lower.len();
        let mut xi = self.lower.clone();
        let mut remaining = self.target as usize;
        for r in 0..nj {
            let top = (self.widths[r] as usize).min(remaining);
            // accumulate the conditional weights the same way twice so
            // the draw can never fall past the last positive entry
            let total: f64 = (0..=top).map(|v| self.ways[r + 1][remaining - v]).sum();
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for v in 0..=top {
                let w = self.ways[r + 1][remaining - v];
                if w > 0.0 {
                    acc += w;
                    chosen = Some(v);
                    if u < acc {
                        break;
                    }
                }
            }
            let v = chosen.expect("positive count guarantees a valid choice");
            xi[r] += v as u64;
            remaining -= v;
        }
        debug_assert_eq!(remaining, 0);
        xi
    }

    pub fn sample_scenario(&self, inst: &Instance, rng: &mut impl Rng) -> Scenario {
        Scenario::for_instance(inst, self.sample(rng)).expect("sampler output is in the box")
    }
}

/// One extreme scenario drawn uniformly at random from the given seed.
pub fn random_extreme_scenario(inst: &Instance, seed: u64) -> Scenario {
    let sampler = ExtremeSampler::new(inst);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sampler.sample_scenario(inst, &mut rng)
}

/// The dominating-set reduction, used as a test-instance factory with a
/// known robust optimum: locations and regions both mirror the graph's
/// vertices, every vertex sees its own region and its graph neighbors'
/// regions, demands are `[0, 1]` and the budget is 1. The robust optimum
/// of the result equals the domination number of `g` for any `q`.
pub fn from_dominating_set(g: &GeneralGraph, q: u64) -> Instance {
    let n = g.num_vertices();
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n + 2 * g.edges().len());
    for v in 0..n {
        edges.push((v, v));
    }
    for &(u, v) in g.edges() {
        edges.push((u, v));
        edges.push((v, u));
    }
    Instance::with_gamma(q, n, vec![(0, 1); n], &edges, 1)
        .expect("reduction output is structurally valid")
        .validate_and_normalize()
        .expect("budget 1 satisfies the box assumption for n >= 1")
}

/// An undirected street network with travel-time weights and a designated
/// facility subset.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    num_nodes: usize,
    edges: Vec<(usize, usize, f64)>,
    facilities: Vec<usize>,
}

impl WeightedGraph {
    pub fn new(
        num_nodes: usize,
        edges: Vec<(usize, usize, f64)>,
        facilities: Vec<usize>,
    ) -> Result<Self> {
        for &(u, v, w) in &edges {
            if u >= num_nodes || v >= num_nodes {
                return Err(Error::BadParams(format!("edge ({u}, {v}) out of range")));
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::BadParams(format!(
                    "edge ({u}, {v}) has invalid weight {w}"
                )));
            }
        }
        let mut seen = vec![false; num_nodes];
        for &f in &facilities {
            if f >= num_nodes {
                return Err(Error::BadParams(format!("facility {f} out of range")));
            }
            if seen[f] {
                return Err(Error::BadParams(format!("duplicate facility {f}")));
            }
            seen[f] = true;
        }
        Ok(WeightedGraph {
            num_nodes,
            edges,
            facilities,
        })
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn facilities(&self) -> &[usize] {
        &self.facilities
    }

    fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.num_nodes];
        for &(u, v, w) in &self.edges {
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        adj
    }
}

/// Shortest travel times from one source over the street network.
fn dijkstra(adj: &[Vec<(usize, f64)>], source: usize) -> Vec<f64> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    #[derive(PartialEq)]
    struct Key(f64);
    impl Eq for Key {}
    impl PartialOrd for Key {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Key {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0)
        }
    }

    let mut dist = vec![f64::INFINITY; adj.len()];
    dist[source] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Key(0.0), source)));
    while let Some(Reverse((Key(d), u))) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        for &(v, w) in &adj[u] {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(Reverse((Key(nd), v)));
            }
        }
    }
    dist
}

/// One region of a geographic instance: the street nodes sharing a
/// facility list, adjacent to exactly those facilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeoRegion {
    /// Facility indices (positions in the graph's facility list).
    pub facilities: Vec<usize>,
    pub nodes: Vec<usize>,
}

/// A geographic instance plus the grouping that produced it. Street nodes
/// unreachable from every facility are reported, not silently dropped.
#[derive(Debug, Clone)]
pub struct GeoInstance {
    pub instance: Instance,
    pub regions: Vec<GeoRegion>,
    pub uncovered_nodes: Vec<usize>,
}

/// Builds a geographic instance with the default `[0, 1]` demand box per
/// region (an incident may or may not occur there).
pub fn geo_instance(g: &WeightedGraph, threshold: f64, q: u64, gamma: u64) -> Result<GeoInstance> {
    geo_instance_with(g, threshold, q, gamma, |_| (0, 1))
}

/// Geographic instance construction with a caller-supplied demand rule
/// mapping each region's street nodes to its demand box.
///
/// Each facility floods the network by travel time; street nodes with an
/// identical list of facilities within the threshold form one region,
/// adjacent to exactly that list. Locations are the facilities.
pub fn geo_instance_with(
    g: &WeightedGraph,
    threshold: f64,
    q: u64,
    gamma: u64,
    demand_rule: impl Fn(&[usize]) -> (u64, u64),
) -> Result<GeoInstance> {
    if threshold < 0.0 || !threshold.is_finite() {
        return Err(Error::BadParams("threshold must be non-negative".into()));
    }
    let adj = g.adjacency();
    let reach: Vec<Vec<f64>> = g.facilities().iter().map(|&f| dijkstra(&adj, f)).collect();

    let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    let mut uncovered = Vec::new();
    for node in 0..g.num_nodes() {
        let list: Vec<usize> = (0..g.facilities().len())
            .filter(|&fi| reach[fi][node] <= threshold)
            .collect();
        if list.is_empty() {
            uncovered.push(node);
        } else {
            groups.entry(list).or_default().push(node);
        }
    }

    let mut regions = Vec::with_capacity(groups.len());
    let mut demands = Vec::with_capacity(groups.len());
    let mut edges = Vec::new();
    for (j, (facilities, nodes)) in groups.into_iter().enumerate() {
        demands.push(demand_rule(&nodes));
        for &fi in &facilities {
            edges.push((fi, j));
        }
        regions.push(GeoRegion { facilities, nodes });
    }

    let instance = Instance::with_gamma(q, g.facilities().len(), demands, &edges, gamma)?
        .validate_and_normalize()?;
    Ok(GeoInstance {
        instance,
        regions,
        uncovered_nodes: uncovered,
    })
}
