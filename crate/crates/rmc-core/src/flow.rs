//! Max-flow feasibility certificates for fixed demand vectors.
//!
//! Whether supplier counts `x` can serve a demand vector `d` is equivalent
//! to a max-flow question on a four-layer network: source -> location arcs
//! with capacity `q * x_i`, location -> region arcs with unbounded capacity
//! along the instance edges, and region -> sink arcs with capacity `d_j`.
//! The vector `x` is feasible if and only if the maximum flow saturates all
//! sink arcs, and an integral maximum flow doubles as an explicit
//! assignment. When infeasible, the minimum cut yields a region subset `S`
//! with `q * x(N(S)) < d(S)`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::instance::{Assignment, Instance};

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    /// residual capacity; pushes move capacity onto the reverse arc
    residual: u64,
    original: u64,
    rev: usize,
}

impl Arc {
    fn flow(&self) -> u64 {
        self.original - self.residual
    }
}

/// A unit-structured flow network over source, locations, regions and sink.
///
/// Unbounded location->region arcs carry the saturating sentinel
/// `sum(d) + 1`, which no s-t flow can reach, so all arithmetic stays in
/// plain integers.
#[derive(Debug, Clone)]
pub struct FlowNetwork {
    graph: Vec<Vec<Arc>>,
    num_locations: usize,
    num_regions: usize,
    total_demand: u64,
    solved: bool,
}

impl FlowNetwork {
    /// Lays out the network for suppliers `x` and demands `d`.
    pub fn build(inst: &Instance, x: &[u64], d: &[u64]) -> Self {
        assert_eq!(x.len(), inst.num_locations());
        assert_eq!(d.len(), inst.num_regions());
        let ni = inst.num_locations();
        let nj = inst.num_regions();
        let total_demand: u64 = d.iter().sum();
        let infinite = total_demand + 1;
        let mut net = FlowNetwork {
            graph: vec![Vec::new(); ni + nj + 2],
            num_locations: ni,
            num_regions: nj,
            total_demand,
            solved: false,
        };
        for (i, &xi) in x.iter().enumerate() {
            net.add_arc(net.source(), net.location_node(i), inst.q() * xi);
        }
        for i in 0..ni {
            for &j in inst.location_neighbors(i) {
                net.add_arc(net.location_node(i), net.region_node(j), infinite);
            }
        }
        for (j, &dj) in d.iter().enumerate() {
            net.add_arc(net.region_node(j), net.sink(), dj);
        }
        net
    }

    fn source(&self) -> usize {
        0
    }

    fn location_node(&self, i: usize) -> usize {
        1 + i
    }

    fn region_node(&self, j: usize) -> usize {
        1 + self.num_locations + j
    }

    fn sink(&self) -> usize {
        1 + self.num_locations + self.num_regions
    }

    fn add_arc(&mut self, from: usize, to: usize, capacity: u64) {
        let rev_from = self.graph[to].len();
        let rev_to = self.graph[from].len();
        self.graph[from].push(Arc {
            to,
            residual: capacity,
            original: capacity,
            rev: rev_from,
        });
        self.graph[to].push(Arc {
            to: from,
            residual: 0,
            original: 0,
            rev: rev_to,
        });
    }

    fn bfs_levels(&self, levels: &mut [i32]) -> bool {
        levels.fill(-1);
        levels[self.source()] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(self.source());
        while let Some(u) = queue.pop_front() {
            for arc in &self.graph[u] {
                if arc.residual > 0 && levels[arc.to] == -1 {
                    levels[arc.to] = levels[u] + 1;
                    queue.push_back(arc.to);
                }
            }
        }
        levels[self.sink()] != -1
    }

    fn dfs_push(&mut self, u: usize, pushed: u64, levels: &[i32], iter: &mut [usize]) -> u64 {
        if u == self.sink() {
            return pushed;
        }
        while iter[u] < self.graph[u].len() {
            let k = iter[u];
            let (to, residual, rev) = {
                let arc = &self.graph[u][k];
                (arc.to, arc.residual, arc.rev)
            };
            if residual > 0 && levels[to] == levels[u] + 1 {
                let sent = self.dfs_push(to, pushed.min(residual), levels, iter);
                if sent > 0 {
                    self.graph[u][k].residual -= sent;
                    self.graph[to][rev].residual += sent;
                    return sent;
                }
            }
            iter[u] += 1;
        }
        0
    }

    /// Runs the blocking-flow phases until no augmenting path remains and
    /// returns the maximum flow value. Idempotent.
    pub fn max_flow(&mut self) -> u64 {
        if !self.solved {
            let n = self.graph.len();
            let mut levels = vec![-1; n];
            while self.bfs_levels(&mut levels) {
                let mut iter = vec![0; n];
                loop {
                    let pushed = self.dfs_push(self.source(), u64::MAX, &levels, &mut iter);
                    if pushed == 0 {
                        break;
                    }
                }
            }
            self.solved = true;
        }
        self.graph[self.source()].iter().map(|arc| arc.flow()).sum()
    }

    /// Flow on every location->region arc, as `(location, region, units)`.
    pub fn assignment_flows(&self) -> Vec<(usize, usize, u64)> {
        let mut out = Vec::new();
        for i in 0..self.num_locations {
            let node = self.location_node(i);
            for arc in &self.graph[node] {
                let lo = self.region_node(0);
                if arc.to >= lo && arc.to < self.sink() && arc.original > 0 {
                    out.push((i, arc.to - lo, arc.flow()));
                }
            }
        }
        out
    }

    /// Regions *not* reachable from the source in the residual graph after
    /// the max flow, i.e. the sink side of the canonical minimum cut.
    fn sink_side_regions(&self) -> Vec<usize> {
        let mut seen = vec![false; self.graph.len()];
        let mut queue = VecDeque::new();
        seen[self.source()] = true;
        queue.push_back(self.source());
        while let Some(u) = queue.pop_front() {
            for arc in &self.graph[u] {
                if arc.residual > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    queue.push_back(arc.to);
                }
            }
        }
        (0..self.num_regions)
            .filter(|&j| !seen[self.region_node(j)])
            .collect()
    }
}

/// Maximum flow value plus the per-edge flows of one integral maximum flow.
pub fn max_flow(inst: &Instance, x: &[u64], d: &[u64]) -> (u64, Vec<(usize, usize, u64)>) {
    let mut net = FlowNetwork::build(inst, x, d);
    let value = net.max_flow();
    (value, net.assignment_flows())
}

/// True iff `x` can serve the whole demand vector `d`, i.e. the maximum
/// flow equals `sum(d)`.
pub fn check_feasible(inst: &Instance, x: &[u64], d: &[u64]) -> bool {
    let mut net = FlowNetwork::build(inst, x, d);
    let total = net.total_demand;
    net.max_flow() == total
}

/// Reads an integral assignment off a saturating maximum flow.
///
/// Errors with [`Error::InfeasibleAssignment`] when `x` cannot serve `d`.
pub fn recover_assignment(inst: &Instance, x: &[u64], d: &[u64]) -> Result<Assignment> {
    let mut net = FlowNetwork::build(inst, x, d);
    let total = net.total_demand;
    if net.max_flow() != total {
        return Err(Error::InfeasibleAssignment);
    }
    let mut served = vec![vec![0u64; inst.num_regions()]; inst.num_locations()];
    for (i, j, units) in net.assignment_flows() {
        served[i][j] = units;
    }
    Ok(Assignment {
        demand: d.to_vec(),
        served,
    })
}

/// If `x` cannot serve `d`, returns the region subset on the sink side of
/// the canonical minimum cut; it satisfies `q * x(N(S)) < d(S)` exactly.
/// Returns `None` when feasible.
pub fn violated_subset_from_cut(inst: &Instance, x: &[u64], d: &[u64]) -> Option<Vec<usize>> {
    let mut net = FlowNetwork::build(inst, x, d);
    let total = net.total_demand;
    if net.max_flow() == total {
        return None;
    }
    let subset = net.sink_side_regions();
    debug_assert!(!subset.is_empty());
    Some(subset)
}
