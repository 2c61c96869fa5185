//! Solvers for the fixed-demand covering problem.
//!
//! For `q = 1` every demand unit needs its own supplier, so any neighbor
//! assignment is optimal. For `q = 2` the problem reduces to a minimum
//! edge cover of a unit graph whose vertices are demand units and whose
//! edges join units servable from a common location; demands above `|I|`
//! are first peeled off two at a time. General `q` goes through the
//! allocation MILP. A greedy heuristic rounds out the family.

use crate::error::{Error, Result};
use crate::flow;
use crate::instance::{Instance, Solution};
use crate::lp::{LpModel, Relation};
use crate::matching::{max_matching, GeneralGraph};
use crate::milp::{solve_milp, MilpModel, MilpStatus, SolveLimits};

fn check_coverable(inst: &Instance, d: &[u64]) -> Result<()> {
    for (j, &dj) in d.iter().enumerate() {
        if dj > 0 && inst.region_neighbors(j).is_empty() {
            return Err(Error::UncoverableRegion { region: j });
        }
    }
    Ok(())
}

/// `q = 1`: every client gets a dedicated supplier at the region's first
/// neighbor; the objective `sum(d)` is trivially optimal.
pub fn solve_q1(inst: &Instance, d: &[u64]) -> Result<Solution> {
    assert_eq!(inst.q(), 1, "solve_q1 requires q = 1");
    check_coverable(inst, d)?;
    let mut x = vec![0u64; inst.num_locations()];
    for (j, &dj) in d.iter().enumerate() {
        if dj > 0 {
            x[inst.region_neighbors(j)[0]] += dj;
        }
    }
    Ok(Solution::new(x))
}

/// Caps every demand at `|I|` by pre-placing suppliers that each absorb
/// two excess units. Returns the reduced demands, the number of pre-placed
/// suppliers, and the per-region placement counts. The optimum of the
/// original instance equals the optimum of the reduced one plus `extra`.
pub fn reduce_demands(inst: &Instance, d: &[u64]) -> (Vec<u64>, u64, Vec<u64>) {
    assert_eq!(inst.q(), 2, "demand reduction applies to q = 2");
    let cap = inst.num_locations() as u64;
    let mut reduced = d.to_vec();
    let mut placement = vec![0u64; d.len()];
    let mut extra = 0;
    for (j, dj) in reduced.iter_mut().enumerate() {
        if *dj > cap {
            let peel = (*dj - cap).div_ceil(2);
            placement[j] = peel;
            extra += peel;
            *dj -= 2 * peel;
        }
    }
    (reduced, extra, placement)
}

/// The unit graph of the q = 2 reduction: one vertex per demand unit,
/// edges between units whose regions share a neighbor (regions with
/// several units induce cliques).
fn unit_graph(inst: &Instance, d: &[u64]) -> (GeneralGraph, Vec<usize>) {
    let nj = inst.num_regions();
    let mut region_of = Vec::new();
    let mut first_unit = vec![0usize; nj];
    for (j, &dj) in d.iter().enumerate() {
        first_unit[j] = region_of.len();
        region_of.extend(std::iter::repeat_n(j, dj as usize));
    }
    let mut g = GeneralGraph::new(region_of.len());
    let share = |j1: usize, j2: usize| {
        let (mut p, mut q) = (0, 0);
        let (n1, n2) = (inst.region_neighbors(j1), inst.region_neighbors(j2));
        while p < n1.len() && q < n2.len() {
            match n1[p].cmp(&n2[q]) {
                std::cmp::Ordering::Equal => return true,
                std::cmp::Ordering::Less => p += 1,
                std::cmp::Ordering::Greater => q += 1,
            }
        }
        false
    };
    for j1 in 0..nj {
        if d[j1] == 0 {
            continue;
        }
        // intra-region clique
        for u in first_unit[j1]..first_unit[j1] + d[j1] as usize {
            for v in (u + 1)..first_unit[j1] + d[j1] as usize {
                g.add_edge(u, v);
            }
        }
        for j2 in (j1 + 1)..nj {
            if d[j2] == 0 || !share(j1, j2) {
                continue;
            }
            for u in first_unit[j1]..first_unit[j1] + d[j1] as usize {
                for v in first_unit[j2]..first_unit[j2] + d[j2] as usize {
                    g.add_edge(u, v);
                }
            }
        }
    }
    (g, region_of)
}

fn smallest_common_neighbor(inst: &Instance, j1: usize, j2: usize) -> usize {
    let (n1, n2) = (inst.region_neighbors(j1), inst.region_neighbors(j2));
    let (mut p, mut q) = (0, 0);
    while p < n1.len() && q < n2.len() {
        match n1[p].cmp(&n2[q]) {
            std::cmp::Ordering::Equal => return n1[p],
            std::cmp::Ordering::Less => p += 1,
            std::cmp::Ordering::Greater => q += 1,
        }
    }
    unreachable!("regions {j1} and {j2} share no neighbor")
}

/// `q = 2` via minimum edge cover of the unit graph. Each cover edge
/// becomes one supplier at the smallest common neighbor of the two
/// regions involved; units that can pair with nothing get a supplier of
/// their own. Matches the exact MILP optimum.
pub fn solve_q2(inst: &Instance, d: &[u64]) -> Result<Solution> {
    assert_eq!(inst.q(), 2, "solve_q2 requires q = 2");
    check_coverable(inst, d)?;
    let (reduced, _extra, placement) = reduce_demands(inst, d);
    let mut x = vec![0u64; inst.num_locations()];
    for (j, &count) in placement.iter().enumerate() {
        if count > 0 {
            x[inst.region_neighbors(j)[0]] += count;
        }
    }

    let (g, region_of) = unit_graph(inst, &reduced);
    // maximum matching plus one edge (or a lone supplier) per exposed unit
    // realizes the minimum edge cover even when isolated units exist
    let matching = max_matching(&g);
    for (u, v) in matching.edges() {
        x[smallest_common_neighbor(inst, region_of[u], region_of[v])] += 1;
    }
    for u in 0..g.num_vertices() {
        if matching.mate(u).is_some() {
            continue;
        }
        let j1 = region_of[u];
        match g.neighbors(u).iter().min() {
            Some(&v) => x[smallest_common_neighbor(inst, j1, region_of[v])] += 1,
            None => x[inst.region_neighbors(j1)[0]] += 1,
        }
    }
    Ok(Solution::new(x))
}

/// The allocation model: minimize total suppliers subject to region
/// coverage and per-location capacity, with integral supplier counts and
/// continuous assignment variables (one per instance edge).
pub fn build_allocation_model(inst: &Instance, d: &[u64]) -> MilpModel {
    let ni = inst.num_locations();
    let edges = inst.edges();
    let total_ub: f64 = d.iter().map(|&dj| dj.div_ceil(inst.q())).sum::<u64>() as f64;
    let mut lp = LpModel::new(ni + edges.len());
    let mut is_integer = vec![false; ni + edges.len()];
    for i in 0..ni {
        lp.set_objective(i, 1.0);
        lp.set_bounds(i, 0.0, total_ub);
        is_integer[i] = true;
    }
    // coverage: sum_{i in N(j)} y_ij >= d_j
    for (j, &dj) in d.iter().enumerate() {
        let coeffs: Vec<(usize, f64)> = edges
            .iter()
            .enumerate()
            .filter(|(_, &(_, ej))| ej == j)
            .map(|(k, _)| (ni + k, 1.0))
            .collect();
        lp.add_row(coeffs, Relation::Ge, dj as f64);
    }
    // capacity: sum_{j in N(i)} y_ij <= q * x_i
    for i in 0..ni {
        let mut coeffs: Vec<(usize, f64)> = edges
            .iter()
            .enumerate()
            .filter(|(_, &(ei, _))| ei == i)
            .map(|(k, _)| (ni + k, 1.0))
            .collect();
        coeffs.push((i, -(inst.q() as f64)));
        lp.add_row(coeffs, Relation::Le, 0.0);
    }
    MilpModel::new(lp, is_integer).with_integral_objective()
}

/// Exact solver for any `q >= 1` through the allocation MILP; the
/// assignment certificate is recovered from a max flow.
pub fn solve_exact(inst: &Instance, d: &[u64], limits: &SolveLimits) -> Result<Solution> {
    check_coverable(inst, d)?;
    let model = build_allocation_model(inst, d);
    let out = solve_milp(&model, limits)?;
    match out.status {
        MilpStatus::Optimal => {
            let x: Vec<u64> = out.solution.unwrap()[..inst.num_locations()]
                .iter()
                .map(|&v| v.round() as u64)
                .collect();
            let assignment = flow::recover_assignment(inst, &x, d)?;
            Ok(Solution::with_assignment(x, assignment))
        }
        MilpStatus::Infeasible => Err(Error::Infeasible),
        _ => Err(Error::SolverLimit),
    }
}

/// Greedy cover: repeatedly add one supplier at the location whose
/// neighborhood carries the largest residual demand (capped at `q`), ties
/// toward the smallest index. Feasible but not necessarily optimal.
pub fn greedy_cover(inst: &Instance, d: &[u64]) -> Result<Solution> {
    check_coverable(inst, d)?;
    let mut residual = d.to_vec();
    let mut x = vec![0u64; inst.num_locations()];
    let mut remaining: u64 = residual.iter().sum();
    while remaining > 0 {
        let mut best: Option<(u64, usize)> = None;
        for i in 0..inst.num_locations() {
            let nearby: u64 = inst
                .location_neighbors(i)
                .iter()
                .map(|&j| residual[j])
                .sum();
            let score = nearby.min(inst.q());
            if score > 0 && best.map_or(true, |(s, _)| score > s) {
                best = Some((score, i));
            }
        }
        // coverable instances always leave a positive-score location
        let (_, i) = best.expect("residual demand left with no serving location");
        x[i] += 1;
        let mut capacity = inst.q();
        // serve neighbors in descending residual order, index as tie-break
        let mut order: Vec<usize> = inst.location_neighbors(i).to_vec();
        order.sort_by(|&a, &b| residual[b].cmp(&residual[a]).then(a.cmp(&b)));
        for j in order {
            if capacity == 0 {
                break;
            }
            let served = residual[j].min(capacity);
            residual[j] -= served;
            capacity -= served;
            remaining -= served;
        }
    }
    Ok(Solution::new(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{inst_a, random_demand, rng};

    fn line_instance(q: u64, ni: usize, nj: usize, edges: &[(usize, usize)]) -> Instance {
        Instance::new(q, ni, vec![(0, 1); nj], edges).unwrap()
    }

    #[test]
    fn q1_assigns_each_units_first_neighbor() {
        let inst = line_instance(1, 1, 2, &[(0, 0), (0, 1)]);
        let sol = solve_q1(&inst, &[2, 3]).unwrap();
        assert_eq!(sol.suppliers(), &[5]);
        assert_eq!(sol.objective(), 5);

        assert_eq!(solve_q1(&inst, &[0, 0]).unwrap().objective(), 0);

        let disjoint = line_instance(1, 2, 2, &[(0, 0), (1, 1)]);
        assert_eq!(solve_q1(&disjoint, &[1, 1]).unwrap().suppliers(), &[1, 1]);
    }

    #[test]
    fn q1_rejects_uncoverable_demand() {
        let inst = line_instance(1, 1, 2, &[(0, 0)]);
        assert_eq!(
            solve_q1(&inst, &[1, 1]).unwrap_err(),
            Error::UncoverableRegion { region: 1 }
        );
    }

    #[test]
    fn demand_reduction_examples() {
        let three = line_instance(2, 3, 1, &[(0, 0), (1, 0), (2, 0)]);
        let (d, extra, placement) = reduce_demands(&three, &[7]);
        assert_eq!((d.as_slice(), extra), ([3].as_slice(), 2));
        assert_eq!(placement, vec![2]);

        let (d, extra, _) = reduce_demands(&three, &[2]);
        assert_eq!((d.as_slice(), extra), ([2].as_slice(), 0));

        let two = line_instance(2, 2, 2, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        let (d, extra, placement) = reduce_demands(&two, &[5, 6]);
        assert_eq!(d, vec![1, 2]);
        assert_eq!(extra, 4);
        assert_eq!(placement, vec![2, 2]);
    }

    #[test]
    fn q2_shares_a_common_neighbor() {
        let inst = line_instance(2, 1, 2, &[(0, 0), (0, 1)]);
        let sol = solve_q2(&inst, &[1, 1]).unwrap();
        assert_eq!(sol.suppliers(), &[1]);
    }

    #[test]
    fn q2_pairs_units_inside_one_region() {
        let inst = line_instance(2, 1, 1, &[(0, 0)]);
        let sol = solve_q2(&inst, &[2]).unwrap();
        assert_eq!(sol.suppliers(), &[1]);
    }

    #[test]
    fn q2_disjoint_neighborhoods_need_two() {
        let inst = line_instance(2, 2, 2, &[(0, 0), (1, 1)]);
        let sol = solve_q2(&inst, &[1, 1]).unwrap();
        assert_eq!(sol.suppliers(), &[1, 1]);
    }

    #[test]
    fn exact_solver_on_inst_a() {
        let sol = solve_exact(&inst_a(), &[2, 0, 2], &SolveLimits::default()).unwrap();
        assert_eq!(sol.objective(), 2);
        assert_eq!(
            solve_exact(&inst_a(), &[0, 0, 0], &SolveLimits::default())
                .unwrap()
                .objective(),
            0
        );
    }

    #[test]
    fn exact_solver_ceils_single_region() {
        let inst = line_instance(3, 1, 1, &[(0, 0)]);
        let sol = solve_exact(&inst, &[7], &SolveLimits::default()).unwrap();
        assert_eq!(sol.objective(), 3);
        let a = sol.assignment().unwrap();
        assert_eq!(a.served[0][0], 7);
    }

    #[test]
    fn greedy_examples() {
        let single = line_instance(3, 1, 3, &[(0, 0), (0, 1), (0, 2)]);
        assert_eq!(greedy_cover(&single, &[3, 3, 1]).unwrap().objective(), 3);
        assert_eq!(greedy_cover(&single, &[0, 0, 0]).unwrap().objective(), 0);
        assert_eq!(greedy_cover(&inst_a(), &[2, 0, 2]).unwrap().objective(), 2);
    }

    #[test]
    fn greedy_output_is_feasible_and_bounded() {
        let mut rng = rng(51);
        for _ in 0..40 {
            let inst = crate::testutil::random_small_instance(&mut rng, 4, 5, 2, 3);
            let d = random_demand(&mut rng, inst.num_regions(), 4);
            if d.iter()
                .enumerate()
                .any(|(j, &dj)| dj > 0 && inst.region_neighbors(j).is_empty())
            {
                continue;
            }
            let greedy = greedy_cover(&inst, &d).unwrap();
            assert!(flow::check_feasible(&inst, greedy.suppliers(), &d));
            let exact = solve_exact(&inst, &d, &SolveLimits::default()).unwrap();
            assert!(greedy.objective() >= exact.objective());
            // classical multicover guarantee, checked empirically
            let harmonic: f64 = (1..=inst.q()).map(|k| 1.0 / k as f64).sum();
            assert!(greedy.objective() as f64 <= harmonic * exact.objective() as f64 + 1e-9);
        }
    }

    #[test]
    fn q1_matches_exact() {
        let mut rng = rng(52);
        for _ in 0..20 {
            let inst = loop {
                let inst = crate::testutil::random_small_instance(&mut rng, 4, 5, 2, 3);
                if inst.q() == 1 {
                    break inst;
                }
            };
            let d = random_demand(&mut rng, inst.num_regions(), 3);
            let q1 = solve_q1(&inst, &d).unwrap();
            let exact = solve_exact(&inst, &d, &SolveLimits::default()).unwrap();
            assert_eq!(q1.objective(), exact.objective());
            assert_eq!(q1.objective(), d.iter().sum::<u64>());
        }
    }

    #[test]
    fn q2_matches_exact_and_reduction_preserves_optimum() {
        let mut rng = rng(53);
        for _ in 0..25 {
            let inst = loop {
                let inst = crate::testutil::random_small_instance(&mut rng, 4, 4, 1, 2);
                if inst.q() == 2 {
                    break inst;
                }
            };
            let d = random_demand(&mut rng, inst.num_regions(), 7);
            let q2 = solve_q2(&inst, &d).unwrap();
            assert!(flow::check_feasible(&inst, q2.suppliers(), &d));
            let exact = solve_exact(&inst, &d, &SolveLimits::default()).unwrap();
            assert_eq!(q2.objective(), exact.objective());

            let (reduced, extra, _) = reduce_demands(&inst, &d);
            let exact_reduced = solve_exact(&inst, &reduced, &SolveLimits::default()).unwrap();
            assert_eq!(exact.objective(), exact_reduced.objective() + extra);
        }
    }
}
