//! Domain model: instances of the covering problem, demand scenarios and
//! supplier solutions.
//!
//! An instance is a bipartite graph between locations and regions. Each
//! region carries an integral demand interval `[a_j, b_j]`, the total demand
//! over all regions is capped by the budget `gamma`, and every supplier
//! placed at a location can serve up to `q` demand units among adjacent
//! regions.

use crate::error::{Error, Result};

/// A problem instance over dense 0-based location and region indices.
///
/// String identifiers, if any, live in the I/O layer; the solver kernels
/// only ever see indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    q: u64,
    num_locations: usize,
    lower: Vec<u64>,
    upper: Vec<u64>,
    gamma: u64,
    region_neighbors: Vec<Vec<usize>>,
    location_neighbors: Vec<Vec<usize>>,
}

impl Instance {
    /// Builds a raw (not yet normalized) instance and checks structural
    /// sanity: index ranges, `a_j <= b_j`, no duplicate edges.
    pub fn new(
        q: u64,
        num_locations: usize,
        demands: Vec<(u64, u64)>,
        edges: &[(usize, usize)],
    ) -> Result<Self> {
        if q == 0 {
            return Err(Error::BadParams("q must be positive".into()));
        }
        let num_regions = demands.len();
        for (j, &(a, b)) in demands.iter().enumerate() {
            if a > b {
                return Err(Error::BadParams(format!(
                    "region {j}: lower demand {a} exceeds upper demand {b}"
                )));
            }
        }
        let mut region_neighbors = vec![Vec::new(); num_regions];
        let mut location_neighbors = vec![Vec::new(); num_locations];
        for &(i, j) in edges {
            if i >= num_locations {
                return Err(Error::BadParams(format!("location index {i} out of range")));
            }
            if j >= num_regions {
                return Err(Error::BadParams(format!("region index {j} out of range")));
            }
            if region_neighbors[j].contains(&i) {
                return Err(Error::BadParams(format!("duplicate edge ({i}, {j})")));
            }
            region_neighbors[j].push(i);
            location_neighbors[i].push(j);
        }
        for adj in &mut region_neighbors {
            adj.sort_unstable();
        }
        for adj in &mut location_neighbors {
            adj.sort_unstable();
        }
        let (lower, upper) = demands.into_iter().unzip();
        Ok(Instance {
            q,
            num_locations,
            lower,
            upper,
            gamma: 0,
            region_neighbors,
            location_neighbors,
        })
    }

    /// Like [`Instance::new`] but with an explicit budget.
    pub fn with_gamma(
        q: u64,
        num_locations: usize,
        demands: Vec<(u64, u64)>,
        edges: &[(usize, usize)],
        gamma: u64,
    ) -> Result<Self> {
        let mut inst = Instance::new(q, num_locations, demands, edges)?;
        inst.gamma = gamma;
        Ok(inst)
    }

    /// Tightens the upper demands so that every region can attain its upper
    /// bound in some scenario, and checks that the uncertainty set is
    /// nonempty and every demand-carrying region is coverable.
    ///
    /// Each `b_j` is replaced by `min(b_j, gamma - sum_{k != j} a_k)`.
    /// Rejects with [`Error::BoundViolation`] when `sum(a) > gamma` or
    /// `gamma > sum(b)`, and with [`Error::UncoverableRegion`] when a region
    /// with positive upper demand has no neighbor.
    pub fn validate_and_normalize(mut self) -> Result<Self> {
        let sum_lower: u64 = self.lower.iter().sum();
        let sum_upper: u64 = self.upper.iter().sum();
        if sum_lower > self.gamma || self.gamma > sum_upper {
            return Err(Error::BoundViolation {
                sum_lower,
                sum_upper,
                gamma: self.gamma,
            });
        }
        for j in 0..self.num_regions() {
            // gamma - sum_{k != j} a_k >= a_j because sum(a) <= gamma.
            let slack = self.gamma - (sum_lower - self.lower[j]);
            self.upper[j] = self.upper[j].min(slack);
        }
        for j in 0..self.num_regions() {
            if self.upper[j] > 0 && self.region_neighbors[j].is_empty() {
                return Err(Error::UncoverableRegion { region: j });
            }
        }
        Ok(self)
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn gamma(&self) -> u64 {
        self.gamma
    }

    pub fn num_locations(&self) -> usize {
        self.num_locations
    }

    pub fn num_regions(&self) -> usize {
        self.lower.len()
    }

    /// Lower demand bounds `a`, indexed by region.
    pub fn lower_demands(&self) -> &[u64] {
        &self.lower
    }

    /// Upper demand bounds `b`, indexed by region.
    pub fn upper_demands(&self) -> &[u64] {
        &self.upper
    }

    /// Locations adjacent to region `j`, sorted ascending.
    pub fn region_neighbors(&self, j: usize) -> &[usize] {
        &self.region_neighbors[j]
    }

    /// Regions adjacent to location `i`, sorted ascending.
    pub fn location_neighbors(&self, i: usize) -> &[usize] {
        &self.location_neighbors[i]
    }

    pub fn sum_lower(&self) -> u64 {
        self.lower.iter().sum()
    }

    pub fn sum_upper(&self) -> u64 {
        self.upper.iter().sum()
    }

    /// Maximum number of regions any single location can serve.
    pub fn max_location_degree(&self) -> usize {
        self.location_neighbors
            .iter()
            .map(|adj| adj.len())
            .max()
            .unwrap_or(0)
    }

    /// All edges `(location, region)` in deterministic (location, region)
    /// order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.num_locations {
            for &j in &self.location_neighbors[i] {
                out.push((i, j));
            }
        }
        out
    }

    /// The neighborhood `N(S)` of a region subset, sorted ascending.
    pub fn subset_neighborhood(&self, subset: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.num_locations];
        let mut out = Vec::new();
        for &j in subset {
            for &i in &self.region_neighbors[j] {
                if !seen[i] {
                    seen[i] = true;
                    out.push(i);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Total supplier count adjacent to a region subset: `x(N(S))`.
    pub fn suppliers_near_subset(&self, x: &[u64], subset: &[usize]) -> u64 {
        let mut seen = vec![false; self.num_locations];
        let mut total = 0;
        for &j in subset {
            for &i in &self.region_neighbors[j] {
                if !seen[i] {
                    seen[i] = true;
                    total += x[i];
                }
            }
        }
        total
    }
}

/// Worst-case total demand of a region subset over the uncertainty set:
/// `min(b(S), gamma - a(J \ S))`.
///
/// For the empty subset this is 0 on normalized instances (the associated
/// covering constraint is vacuous).
pub fn tilde_d(inst: &Instance, subset: &[usize]) -> u64 {
    let in_subset_upper: u64 = subset.iter().map(|&j| inst.upper[j]).sum();
    let in_subset_lower: u64 = subset.iter().map(|&j| inst.lower[j]).sum();
    let outside_lower = inst.sum_lower() - in_subset_lower;
    let budget_cap = inst.gamma.saturating_sub(outside_lower);
    in_subset_upper.min(budget_cap)
}

/// Trivial bounds on the robust optimum: `ceil(gamma / q)` from the total
/// budget and `sum_j ceil(b_j / q)` from covering every region at its upper
/// bound independently.
pub fn trivial_bounds(inst: &Instance) -> (u64, u64) {
    let lower = inst.gamma.div_ceil(inst.q);
    let upper = inst.upper.iter().map(|&b| b.div_ceil(inst.q)).sum();
    (lower, upper)
}

/// The feasible solution behind the trivial upper bound: for every region,
/// `ceil(b_j / q)` suppliers at its first neighbor.
pub fn trivial_upper_solution(inst: &Instance) -> Result<Solution> {
    let mut x = vec![0u64; inst.num_locations()];
    for j in 0..inst.num_regions() {
        if inst.upper[j] == 0 {
            continue;
        }
        let i = *inst
            .region_neighbors(j)
            .first()
            .ok_or(Error::UncoverableRegion { region: j })?;
        x[i] += inst.upper[j].div_ceil(inst.q);
    }
    Ok(Solution::new(x))
}

/// An integral demand vector inside the uncertainty box.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    xi: Vec<u64>,
}

impl Scenario {
    /// Wraps a demand vector after checking it lies in the box and under
    /// the budget.
    pub fn for_instance(inst: &Instance, xi: Vec<u64>) -> Result<Self> {
        if xi.len() != inst.num_regions() {
            return Err(Error::BadParams(format!(
                "scenario has {} entries, instance has {} regions",
                xi.len(),
                inst.num_regions()
            )));
        }
        for (j, &v) in xi.iter().enumerate() {
            if v < inst.lower[j] || v > inst.upper[j] {
                return Err(Error::BadParams(format!(
                    "scenario demand {v} for region {j} outside [{}, {}]",
                    inst.lower[j], inst.upper[j]
                )));
            }
        }
        if xi.iter().sum::<u64>() > inst.gamma {
            return Err(Error::BadParams(
                "scenario total demand exceeds the budget".into(),
            ));
        }
        Ok(Scenario { xi })
    }

    pub fn demands(&self) -> &[u64] {
        &self.xi
    }

    pub fn total(&self) -> u64 {
        self.xi.iter().sum()
    }

    /// A scenario is extreme when its total demand meets the budget exactly.
    pub fn is_extreme(&self, inst: &Instance) -> bool {
        self.total() == inst.gamma()
    }
}

/// An integral assignment of demand units to suppliers for one fixed demand
/// vector: `served[i][j]` units of region `j` handled from location `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub demand: Vec<u64>,
    pub served: Vec<Vec<u64>>,
}

/// Integer supplier counts per location, with an optional assignment
/// certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    x: Vec<u64>,
    assignment: Option<Assignment>,
}

impl Solution {
    pub fn new(x: Vec<u64>) -> Self {
        Solution {
            x,
            assignment: None,
        }
    }

    pub fn with_assignment(x: Vec<u64>, assignment: Assignment) -> Self {
        Solution {
            x,
            assignment: Some(assignment),
        }
    }

    pub fn suppliers(&self) -> &[u64] {
        &self.x
    }

    pub fn objective(&self) -> u64 {
        self.x.iter().sum()
    }

    pub fn assignment(&self) -> Option<&Assignment> {
        self.assignment.as_ref()
    }
}
