//! Branch-and-bound mixed-integer solver over LP relaxations.
//!
//! Node selection is best-bound with depth-first tie-breaking, branching
//! picks the most fractional integer variable (ties toward the smallest
//! index) and explores the floor branch first. Models whose optimal value
//! is known to be integral opt into a stronger rounding prune. The solver
//! is single-threaded and deterministic under fixed limits.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::lp::{solve_lp_with_bounds, LpModel, LpStatus};

/// Integer feasibility tolerance.
pub const INT_EPS: f64 = 1e-6;

/// An [`LpModel`] plus an integrality mark per variable.
#[derive(Debug, Clone)]
pub struct MilpModel {
    pub lp: LpModel,
    pub is_integer: Vec<bool>,
    /// Set when the optimal objective value is integral by problem
    /// structure; enables pruning at `incumbent - 1 + eps`.
    pub integral_objective: bool,
}

impl MilpModel {
    pub fn new(lp: LpModel, is_integer: Vec<bool>) -> Self {
        assert_eq!(is_integer.len(), lp.num_vars());
        MilpModel {
            lp,
            is_integer,
            integral_objective: false,
        }
    }

    pub fn with_integral_objective(mut self) -> Self {
        self.integral_objective = true;
        self
    }

    /// Objective of `x` if it satisfies rows, bounds and integrality.
    fn candidate_value(&self, x: &[f64]) -> Option<f64> {
        if x.len() != self.lp.num_vars() {
            return None;
        }
        for (j, &v) in x.iter().enumerate() {
            if self.is_integer[j] && (v - v.round()).abs() > INT_EPS {
                return None;
            }
        }
        if self.lp.max_violation(x) > 1e-6 {
            return None;
        }
        Some(self.lp.objective_value(x))
    }
}

/// Wall-clock, node and gap limits mirroring the experimental protocol.
#[derive(Debug, Clone, Default)]
pub struct SolveLimits {
    pub time_limit: Option<Duration>,
    pub node_limit: Option<u64>,
    /// Absolute gap under which an incumbent counts as proven optimal.
    pub abs_gap: f64,
}

impl SolveLimits {
    pub fn with_time_limit(seconds: f64) -> Self {
        SolveLimits {
            time_limit: Some(Duration::from_secs_f64(seconds)),
            ..SolveLimits::default()
        }
    }

    /// Remaining budget after `elapsed`; `None` means the limit expired.
    pub fn remaining(&self, elapsed: Duration) -> Option<SolveLimits> {
        match self.time_limit {
            None => Some(self.clone()),
            Some(total) => {
                if elapsed >= total {
                    None
                } else {
                    Some(SolveLimits {
                        time_limit: Some(total - elapsed),
                        node_limit: self.node_limit,
                        abs_gap: self.abs_gap,
                    })
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    TimeLimit,
}

/// Outcome of a branch-and-bound run. On `TimeLimit` the incumbent (if
/// any) is feasible and `best_bound` is a valid lower bound.
#[derive(Debug, Clone)]
pub struct MilpOutcome {
    pub status: MilpStatus,
    pub objective: Option<f64>,
    pub solution: Option<Vec<f64>>,
    pub best_bound: f64,
    pub nodes: u64,
}

impl MilpOutcome {
    fn no_solution(status: MilpStatus, bound: f64, nodes: u64) -> Self {
        MilpOutcome {
            status,
            objective: None,
            solution: None,
            best_bound: bound,
            nodes,
        }
    }
}

/// Optional search aids supplied by callers who know the model structure.
#[derive(Default)]
pub struct SearchAids<'a> {
    /// Candidate integral solutions; feasible ones seed the incumbent.
    pub warm_starts: &'a [Vec<f64>],
    /// Rounds a node's LP solution into a candidate integral solution.
    pub round_hook: Option<&'a dyn Fn(&[f64]) -> Option<Vec<f64>>>,
    /// Per-variable branching priority (higher classes branch first);
    /// fractionality breaks ties within a class.
    pub branch_priority: Option<&'a [u8]>,
}

struct Node {
    bound: f64,
    depth: u32,
    /// overrides for integer variables, aligned with `int_vars`
    lower: Vec<f64>,
    upper: Vec<f64>,
}

struct NodeKey {
    bound: f64,
    depth: u32,
    seq: u64,
    index: usize,
}

impl PartialEq for NodeKey {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for NodeKey {}
impl PartialOrd for NodeKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for NodeKey {
    // BinaryHeap is a max-heap; invert so the smallest bound pops first,
    // then prefer deeper nodes, then earlier sequence numbers.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then(self.depth.cmp(&other.depth))
            .then(other.seq.cmp(&self.seq))
    }
}

pub fn solve_milp(model: &MilpModel, limits: &SolveLimits) -> Result<MilpOutcome> {
    solve_milp_with(model, limits, &SearchAids::default())
}

pub fn solve_milp_with(
    model: &MilpModel,
    limits: &SolveLimits,
    aids: &SearchAids<'_>,
) -> Result<MilpOutcome> {
    let start = Instant::now();
    let deadline = limits.time_limit.map(|d| start + d);
    let n = model.lp.num_vars();
    let int_vars: Vec<usize> = (0..n).filter(|&j| model.is_integer[j]).collect();
    let mut int_pos: Vec<Option<usize>> = vec![None; n];
    for (k, &j) in int_vars.iter().enumerate() {
        int_pos[j] = Some(k);
    }

    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    for cand in aids.warm_starts {
        if let Some(value) = model.candidate_value(cand) {
            if incumbent.as_ref().map_or(true, |(best, _)| value < *best) {
                incumbent = Some((value, cand.clone()));
            }
        }
    }

    let out_of_time = |deadline: Option<Instant>| deadline.is_some_and(|d| Instant::now() >= d);
    if out_of_time(deadline) {
        return Ok(match incumbent {
            Some((value, x)) => MilpOutcome {
                status: MilpStatus::TimeLimit,
                objective: Some(value),
                solution: Some(x),
                best_bound: f64::NEG_INFINITY,
                nodes: 0,
            },
            None => MilpOutcome::no_solution(MilpStatus::TimeLimit, f64::NEG_INFINITY, 0),
        });
    }

    // bounds of the integer variables are the only thing nodes override
    let root_lower: Vec<f64> = int_vars
        .iter()
        .map(|&j| model.lp.lower_bounds()[j])
        .collect();
    let root_upper: Vec<f64> = int_vars
        .iter()
        .map(|&j| model.lp.upper_bounds()[j])
        .collect();

    let mut nodes: Vec<Node> = vec![Node {
        bound: f64::NEG_INFINITY,
        depth: 0,
        lower: root_lower,
        upper: root_upper,
    }];
    let mut heap = BinaryHeap::new();
    heap.push(NodeKey {
        bound: f64::NEG_INFINITY,
        depth: 0,
        seq: 0,
        index: 0,
    });

    let mut full_lower = model.lp.lower_bounds().to_vec();
    let mut full_upper = model.lp.upper_bounds().to_vec();
    let mut explored: u64 = 0;
    let mut seq: u64 = 0;
    let mut at_root = true;
    let mut hit_limit = false;

    let prune_margin = |inc: f64| {
        if model.integral_objective {
            inc - 1.0 + INT_EPS
        } else {
            inc - limits.abs_gap.max(1e-9)
        }
    };

    while let Some(key) = heap.pop() {
        let node = &nodes[key.index];
        if let Some((best, _)) = &incumbent {
            if node.bound >= prune_margin(*best) {
                continue;
            }
        }
        if out_of_time(deadline) || limits.node_limit.is_some_and(|cap| explored >= cap) {
            hit_limit = true;
            // the popped node still counts toward the remaining bound
            heap.push(key);
            break;
        }
        explored += 1;

        for (k, &j) in int_vars.iter().enumerate() {
            full_lower[j] = node.lower[k];
            full_upper[j] = node.upper[k];
        }
        let relax = solve_lp_with_bounds(&model.lp, &full_lower, &full_upper)?;
        let node_depth = node.depth;
        match relax.status {
            LpStatus::Infeasible => {
                at_root = false;
                continue;
            }
            LpStatus::Unbounded => {
                if at_root {
                    return Ok(MilpOutcome::no_solution(
                        MilpStatus::Unbounded,
                        f64::NEG_INFINITY,
                        explored,
                    ));
                }
                // a bounded parent cannot spawn an unbounded child
                return Err(Error::NumericalFailure("unbounded branch-and-bound node"));
            }
            LpStatus::Optimal => {}
        }

        at_root = false;
        // rounding hook: applied at every node, incumbents verified
        if let Some(hook) = aids.round_hook {
            if let Some(cand) = hook(&relax.solution) {
                if let Some(value) = model.candidate_value(&cand) {
                    if incumbent.as_ref().map_or(true, |(best, _)| value < *best) {
                        incumbent = Some((value, cand));
                    }
                }
            }
        }

        if let Some((best, _)) = &incumbent {
            if relax.objective >= prune_margin(*best) {
                continue;
            }
        }

        // most fractional integer variable, within the highest priority
        // class that still has fractional variables
        let mut branch: Option<(usize, f64, f64)> = None;
        let mut branch_class = 0u8;
        for &j in &int_vars {
            let v = relax.solution[j];
            let dist = (v - v.round()).abs();
            if dist > INT_EPS {
                let class = aids.branch_priority.map_or(0, |p| p[j]);
                let frac = v - v.floor();
                let score = frac.min(1.0 - frac);
                let better = match branch {
                    None => true,
                    Some((_, _, s)) => class > branch_class || (class == branch_class && score > s),
                };
                if better {
                    branch = Some((j, v, score));
                    branch_class = class;
                }
            }
        }

        match branch {
            None => {
                // integral: snap the integer components before accepting
                let mut x = relax.solution.clone();
                for &j in &int_vars {
                    x[j] = x[j].round();
                }
                let (value, x) = match model.candidate_value(&x) {
                    Some(v) => (v, x),
                    // rounding drift: keep the raw LP point instead
                    None => (relax.objective, relax.solution.clone()),
                };
                if incumbent.as_ref().map_or(true, |(best, _)| value < *best) {
                    incumbent = Some((value, x));
                }
            }
            Some((j, v, _)) => {
                let k = int_vars.iter().position(|&jj| jj == j).unwrap();
                let mut node_lower = nodes[key.index].lower.clone();
                let mut node_upper = nodes[key.index].upper.clone();
                // reduced-cost fixing: an integer variable nonbasic at a
                // bound whose reduced cost alone closes the gap to the
                // incumbent can be pinned for the whole subtree
                if let Some((best, _)) = &incumbent {
                    let slack = prune_margin(*best) - relax.objective;
                    let mut rc: Vec<f64> = int_vars
                        .iter()
                        .map(|&jj| model.lp.objective_coeffs()[jj])
                        .collect();
                    for (r, row) in model.lp.rows().iter().enumerate() {
                        let dual = relax.duals[r];
                        if dual != 0.0 {
                            for &(jj, c) in &row.coeffs {
                                if let Some(kk) = int_pos[jj] {
                                    rc[kk] -= dual * c;
                                }
                            }
                        }
                    }
                    for (kk, &jj) in int_vars.iter().enumerate() {
                        let v = relax.solution[jj];
                        if (v - node_lower[kk]).abs() < 1e-7 && rc[kk] > slack + 1e-6 {
                            node_upper[kk] = node_lower[kk];
                        } else if (v - node_upper[kk]).abs() < 1e-7 && -rc[kk] > slack + 1e-6 {
                            node_lower[kk] = node_upper[kk];
                        }
                    }
                }
                // floor child first
                if v.floor() >= node_lower[k] - INT_EPS {
                    let mut upper = node_upper.clone();
                    upper[k] = v.floor();
                    seq += 1;
                    nodes.push(Node {
                        bound: relax.objective,
                        depth: node_depth + 1,
                        lower: node_lower.clone(),
                        upper,
                    });
                    heap.push(NodeKey {
                        bound: relax.objective,
                        depth: node_depth + 1,
                        seq,
                        index: nodes.len() - 1,
                    });
                }
                if v.ceil() <= node_upper[k] + INT_EPS {
                    let mut lower = node_lower;
                    lower[k] = v.ceil();
                    seq += 1;
                    nodes.push(Node {
                        bound: relax.objective,
                        depth: node_depth + 1,
                        lower,
                        upper: node_upper,
                    });
                    heap.push(NodeKey {
                        bound: relax.objective,
                        depth: node_depth + 1,
                        seq,
                        index: nodes.len() - 1,
                    });
                }
            }
        }
    }

    let open_bound = heap.iter().map(|k| k.bound).fold(f64::INFINITY, f64::min);

    let outcome = match (&incumbent, hit_limit) {
        (Some((value, x)), false) => MilpOutcome {
            status: MilpStatus::Optimal,
            objective: Some(*value),
            solution: Some(x.clone()),
            best_bound: if open_bound.is_finite() {
                open_bound.min(*value)
            } else {
                *value
            },
            nodes: explored,
        },
        (Some((value, x)), true) => MilpOutcome {
            status: MilpStatus::TimeLimit,
            objective: Some(*value),
            solution: Some(x.clone()),
            best_bound: open_bound.min(*value),
            nodes: explored,
        },
        (None, true) => MilpOutcome::no_solution(MilpStatus::TimeLimit, open_bound, explored),
        (None, false) => MilpOutcome::no_solution(MilpStatus::Infeasible, f64::INFINITY, explored),
    };
    log::debug!(
        "milp: status {:?} objective {:?} nodes {}",
        outcome.status,
        outcome.objective,
        outcome.nodes
    );
    Ok(outcome)
}
