//! Separation of violated covering constraints for candidate supplier
//! vectors.
//!
//! A region subset `S` is violating for `x` when `q * x(N(S)) < d~(S)`,
//! where `d~(S) = min(b(S), gamma - a(J \ S))` is the worst-case demand of
//! `S`. Three routes find the most violated subset: exhaustive enumeration
//! (the oracle, guarded to 25 regions), a compact set-separation MIP, and
//! a Big-M scenario IP whose optimum provably coincides with the MIP's.
//! Violating subsets and violating extreme scenarios are interconvertible;
//! both directions are implemented.

use crate::error::{Error, Result};
use crate::flow;
use crate::instance::{tilde_d, Instance, Scenario};
use crate::lp::{LpModel, Relation};
use crate::milp::{solve_milp_with, MilpModel, MilpStatus, SearchAids, SolveLimits};

/// Region-count guard for the exhaustive route.
pub const BRUTE_FORCE_MAX_REGIONS: usize = 25;

/// A violated covering constraint: `amount = d~(S) - q * x(N(S)) >= 1`,
/// with an extreme witness scenario attaining `d~(S)` on `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub subset: Vec<usize>,
    pub amount: u64,
    pub witness: Option<Scenario>,
}

/// Compares subsets encoded as bitmasks lexicographically as sorted index
/// lists. Below the smallest differing index `d` both lists agree. If `d`
/// belongs to `a`, then `a` is smaller exactly when `b` goes on with some
/// larger element; if `d` belongs to `b`, then `a` is smaller exactly
/// when it is exhausted there (a proper prefix).
fn mask_lex_less(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    if diff == 0 {
        return false;
    }
    let low = diff & diff.wrapping_neg();
    let above = !(low | (low - 1));
    if a & low != 0 {
        b & above != 0
    } else {
        a & above == 0
    }
}

/// Exhaustive separation over all region subsets via Gray-code stepping,
/// maintaining `b(S)`, `a(S)` and `x(N(S))` incrementally. Returns the
/// maximally violated subset (lexicographically smallest among ties), or
/// `None` when `x` is robust-feasible.
pub fn separate_brute(inst: &Instance, x: &[u64]) -> Result<Option<Violation>> {
    let nj = inst.num_regions();
    if nj > BRUTE_FORCE_MAX_REGIONS {
        return Err(Error::TooLarge {
            regions: nj,
            max: BRUTE_FORCE_MAX_REGIONS,
        });
    }
    let sum_lower = inst.sum_lower();
    let q = inst.q() as i128;

    // incremental state for the current subset
    let mut in_subset = vec![false; nj];
    let mut neighbor_count = vec![0u32; inst.num_locations()];
    let mut upper_in: i128 = 0; // b(S)
    let mut lower_in: u64 = 0; // a(S)
    let mut suppliers_near: i128 = 0; // x(N(S))

    let mut best: Option<(i128, u64)> = None; // (amount, mask)
    let mut mask: u64 = 0;
    for step in 1u64..(1 << nj) {
        let j = step.trailing_zeros() as usize;
        mask ^= 1 << j;
        if !in_subset[j] {
            in_subset[j] = true;
            upper_in += inst.upper_demands()[j] as i128;
            lower_in += inst.lower_demands()[j];
            for &i in inst.region_neighbors(j) {
                if neighbor_count[i] == 0 {
                    suppliers_near += x[i] as i128;
                }
                neighbor_count[i] += 1;
            }
        } else {
            in_subset[j] = false;
            upper_in -= inst.upper_demands()[j] as i128;
            lower_in -= inst.lower_demands()[j];
            for &i in inst.region_neighbors(j) {
                neighbor_count[i] -= 1;
                if neighbor_count[i] == 0 {
                    suppliers_near -= x[i] as i128;
                }
            }
        }
        let budget_cap = inst.gamma() as i128 - (sum_lower - lower_in) as i128;
        let worst_demand = upper_in.min(budget_cap);
        let amount = worst_demand - q * suppliers_near;
        if amount > 0 {
            let better = match best {
                None => true,
                Some((best_amount, best_mask)) => {
                    amount > best_amount
                        || (amount == best_amount && mask_lex_less(mask, best_mask))
                }
            };
            if better {
                best = Some((amount, mask));
            }
        }
    }

    Ok(best.map(|(amount, mask)| {
        let subset: Vec<usize> = (0..nj).filter(|j| mask >> j & 1 == 1).collect();
        let witness = scenario_from_subset(inst, &subset).ok();
        Violation {
            subset,
            amount: amount as u64,
            witness,
        }
    }))
}

/// The compact set-separation model. Binary `y_i` marks `i in N(S)`,
/// binary `z_j` marks `j in S`, continuous `d` is the worst-case demand:
///
/// ```text
/// min  sum_i q * x_i * y_i - d
/// s.t. d <= sum_j b_j z_j
///      d <= gamma' + sum_j a_j z_j        gamma' = gamma - sum_j a_j
///      k * y_i >= sum_{j in N(i)} z_j     k = max location degree
/// ```
///
/// `x` is robust-feasible iff the optimum is 0; otherwise the optimum is
/// the negated maximal violation.
pub fn build_set_separation_model(inst: &Instance, x: &[u64]) -> MilpModel {
    let ni = inst.num_locations();
    let nj = inst.num_regions();
    let k = inst.max_location_degree() as f64;
    let gamma_prime = (inst.gamma() - inst.sum_lower()) as f64;

    let mut lp = LpModel::new(ni + nj + 1);
    let d_var = ni + nj;
    let mut is_integer = vec![false; ni + nj + 1];
    for i in 0..ni {
        lp.set_objective(i, (inst.q() * x[i]) as f64);
        lp.set_bounds(i, 0.0, 1.0);
        is_integer[i] = true;
    }
    for j in 0..nj {
        lp.set_bounds(ni + j, 0.0, 1.0);
        is_integer[ni + j] = true;
    }
    lp.set_objective(d_var, -1.0);
    lp.set_bounds(d_var, 0.0, inst.gamma() as f64);

    let mut upper_row: Vec<(usize, f64)> = vec![(d_var, 1.0)];
    for j in 0..nj {
        upper_row.push((ni + j, -(inst.upper_demands()[j] as f64)));
    }
    lp.add_row(upper_row, Relation::Le, 0.0);

    let mut budget_row: Vec<(usize, f64)> = vec![(d_var, 1.0)];
    for j in 0..nj {
        budget_row.push((ni + j, -(inst.lower_demands()[j] as f64)));
    }
    lp.add_row(budget_row, Relation::Le, gamma_prime);

    for i in 0..ni {
        let mut row: Vec<(usize, f64)> = vec![(i, k)];
        for &j in inst.location_neighbors(i) {
            row.push((ni + j, -1.0));
        }
        lp.add_row(row, Relation::Ge, 0.0);
    }
    MilpModel::new(lp, is_integer).with_integral_objective()
}

/// Rounds an LP point of the set-separation model into a feasible
/// incumbent: threshold `z`, derive the forced `y` and the optimal `d`.
fn round_set_separation(inst: &Instance, lp_x: &[f64]) -> Option<Vec<f64>> {
    let ni = inst.num_locations();
    let nj = inst.num_regions();
    let mut out = vec![0.0; ni + nj + 1];
    let mut upper = 0u64;
    let mut lower = 0u64;
    for j in 0..nj {
        if lp_x[ni + j] > 0.5 {
            out[ni + j] = 1.0;
            upper += inst.upper_demands()[j];
            lower += inst.lower_demands()[j];
            for &i in inst.region_neighbors(j) {
                out[i] = 1.0;
            }
        }
    }
    let gamma_prime = inst.gamma() - inst.sum_lower();
    out[ni + nj] = upper.min(gamma_prime + lower) as f64;
    Some(out)
}

/// Solves the set-separation model. An optimum `theta < 0` yields the
/// most violated subset `S = {j : z_j = 1}` with `amount = -theta`.
pub fn separate_set(inst: &Instance, x: &[u64], limits: &SolveLimits) -> Result<Option<Violation>> {
    let model = build_set_separation_model(inst, x);
    let hook = |lp_x: &[f64]| round_set_separation(inst, lp_x);
    // fixing the location indicators first lets the region choices and
    // the demand variable settle integrally on their own
    let mut priority = vec![0u8; model.lp.num_vars()];
    priority[..inst.num_locations()].fill(1);
    let aids = SearchAids {
        warm_starts: &[],
        round_hook: Some(&hook),
        branch_priority: Some(&priority),
    };
    let out = solve_milp_with(&model, limits, &aids)?;
    if out.status != MilpStatus::Optimal {
        return Err(Error::SolverLimit);
    }
    let theta = out.objective.unwrap();
    if theta >= -0.5 {
        return Ok(None);
    }
    let amount = (-theta).round();
    debug_assert!(
        (amount + theta).abs() < 1e-5,
        "separation optimum {theta} is not integral"
    );
    let ni = inst.num_locations();
    let solution = out.solution.unwrap();
    let subset: Vec<usize> = (0..inst.num_regions())
        .filter(|j| solution[ni + j] > 0.5)
        .collect();
    let witness = scenario_from_subset(inst, &subset)?;
    Ok(Some(Violation {
        subset,
        amount: amount as u64,
        witness: Some(witness),
    }))
}

/// The Big-M scenario separation model. Binary `mu_i`, `nu_j` play the
/// roles of `y_i`, `z_j`; the integral scenario `xi` lives in the demand
/// box and meets the budget exactly, and `omega_j = min(xi_j, gamma *
/// nu_j)` linearizes the product `xi_j * nu_j`:
///
/// ```text
/// min  sum_i q * x_i * mu_i - sum_j omega_j
/// s.t. k * mu_i >= sum_{j in N(i)} nu_j
///      omega_j <= xi_j
///      omega_j <= gamma * nu_j
///      a_j <= xi_j <= b_j,  sum_j xi_j = gamma
/// ```
pub fn build_bigm_separation_model(inst: &Instance, x: &[u64]) -> MilpModel {
    let ni = inst.num_locations();
    let nj = inst.num_regions();
    let k = inst.max_location_degree() as f64;
    let gamma = inst.gamma() as f64;

    // layout: mu | nu | omega | xi
    let mu0 = 0;
    let nu0 = ni;
    let om0 = ni + nj;
    let xi0 = ni + 2 * nj;
    let mut lp = LpModel::new(ni + 3 * nj);
    let mut is_integer = vec![false; ni + 3 * nj];
    for i in 0..ni {
        lp.set_objective(mu0 + i, (inst.q() * x[i]) as f64);
        lp.set_bounds(mu0 + i, 0.0, 1.0);
        is_integer[mu0 + i] = true;
    }
    for j in 0..nj {
        lp.set_bounds(nu0 + j, 0.0, 1.0);
        is_integer[nu0 + j] = true;
        lp.set_objective(om0 + j, -1.0);
        lp.set_bounds(om0 + j, 0.0, inst.upper_demands()[j] as f64);
        lp.set_bounds(
            xi0 + j,
            inst.lower_demands()[j] as f64,
            inst.upper_demands()[j] as f64,
        );
        is_integer[xi0 + j] = true;
    }
    for i in 0..ni {
        let mut row: Vec<(usize, f64)> = vec![(mu0 + i, k)];
        for &j in inst.location_neighbors(i) {
            row.push((nu0 + j, -1.0));
        }
        lp.add_row(row, Relation::Ge, 0.0);
    }
    for j in 0..nj {
        lp.add_row(vec![(om0 + j, 1.0), (xi0 + j, -1.0)], Relation::Le, 0.0);
        lp.add_row(vec![(om0 + j, 1.0), (nu0 + j, -gamma)], Relation::Le, 0.0);
    }
    let budget_row: Vec<(usize, f64)> = (0..nj).map(|j| (xi0 + j, 1.0)).collect();
    lp.add_row(budget_row, Relation::Eq, gamma);
    MilpModel::new(lp, is_integer).with_integral_objective()
}

/// Rounds an LP point of the Big-M model: threshold `nu`, derive `mu`,
/// pick the witness scenario for `S(nu)` and set `omega` accordingly.
fn round_bigm_separation(inst: &Instance, lp_x: &[f64]) -> Option<Vec<f64>> {
    let ni = inst.num_locations();
    let nj = inst.num_regions();
    let subset: Vec<usize> = (0..nj).filter(|&j| lp_x[ni + j] > 0.5).collect();
    let scenario = if subset.is_empty() {
        // any extreme scenario works when nothing is selected
        let full: Vec<usize> = (0..nj).collect();
        scenario_from_subset(inst, &full).ok()?
    } else {
        scenario_from_subset(inst, &subset).ok()?
    };
    let mut out = vec![0.0; ni + 3 * nj];
    for &j in &subset {
        out[ni + j] = 1.0;
        for &i in inst.region_neighbors(j) {
            out[i] = 1.0;
        }
    }
    for j in 0..nj {
        let xi = scenario.demands()[j] as f64;
        out[ni + 2 * nj + j] = xi;
        if subset.contains(&j) {
            out[ni + nj + j] = xi.min(inst.gamma() as f64);
        }
    }
    Some(out)
}

/// Solves the Big-M scenario model and reports its optimal value together
/// with the selected subset `{j : nu_j = 1}`. Used to cross-check the
/// set-separation route; the two optima coincide.
pub fn separate_bigm(
    inst: &Instance,
    x: &[u64],
    limits: &SolveLimits,
) -> Result<Option<Violation>> {
    let model = build_bigm_separation_model(inst, x);
    let hook = |lp_x: &[f64]| round_bigm_separation(inst, lp_x);
    let mut priority = vec![0u8; model.lp.num_vars()];
    priority[..inst.num_locations()].fill(1);
    let aids = SearchAids {
        warm_starts: &[],
        round_hook: Some(&hook),
        branch_priority: Some(&priority),
    };
    let out = solve_milp_with(&model, limits, &aids)?;
    if out.status != MilpStatus::Optimal {
        return Err(Error::SolverLimit);
    }
    let theta = out.objective.unwrap();
    if theta >= -0.5 {
        return Ok(None);
    }
    let amount = (-theta).round();
    debug_assert!((amount + theta).abs() < 1e-5);
    let ni = inst.num_locations();
    let solution = out.solution.unwrap();
    let subset: Vec<usize> = (0..inst.num_regions())
        .filter(|j| solution[ni + j] > 0.5)
        .collect();
    let witness = scenario_from_subset(inst, &subset)?;
    Ok(Some(Violation {
        subset,
        amount: amount as u64,
        witness: Some(witness),
    }))
}

/// Builds an extreme scenario whose demand on `S` attains `d~(S)`.
///
/// If `b(S) + a(J \ S) <= gamma`, the subset is pinned at its upper
/// bounds and the complement is topped up from the lower bounds in
/// ascending region order until the budget is met; otherwise the
/// complement is pinned at its lower bounds and the subset is topped up.
pub fn scenario_from_subset(inst: &Instance, subset: &[usize]) -> Result<Scenario> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let nj = inst.num_regions();
    let mut in_subset = vec![false; nj];
    for &j in subset {
        in_subset[j] = true;
    }
    let upper_in: u64 = subset.iter().map(|&j| inst.upper_demands()[j]).sum();
    let lower_out: u64 = (0..nj)
        .filter(|&j| !in_subset[j])
        .map(|j| inst.lower_demands()[j])
        .sum();

    let mut xi: Vec<u64> = inst.lower_demands().to_vec();
    let top_up_complement = upper_in + lower_out <= inst.gamma();
    if top_up_complement {
        for &j in subset {
            xi[j] = inst.upper_demands()[j];
        }
    }
    let mut remaining = inst.gamma() - xi.iter().sum::<u64>();
    for j in 0..nj {
        if remaining == 0 {
            break;
        }
        // top-up side: complement in case 1, subset in case 2
        if in_subset[j] == top_up_complement {
            continue;
        }
        let room = inst.upper_demands()[j] - xi[j];
        let add = room.min(remaining);
        xi[j] += add;
        remaining -= add;
    }
    debug_assert_eq!(remaining, 0, "budget not reachable; instance unnormalized?");
    let scenario = Scenario::for_instance(inst, xi)?;
    debug_assert!(scenario.is_extreme(inst));
    debug_assert_eq!(
        subset.iter().map(|&j| scenario.demands()[j]).sum::<u64>(),
        tilde_d(inst, subset)
    );
    Ok(scenario)
}

/// Extracts a violating subset from a scenario that `x` cannot serve, via
/// the minimum cut of the assignment network. The violation amount is
/// recomputed against `d~(S)`, which dominates the scenario's own demand
/// on `S`.
pub fn subset_from_scenario(
    inst: &Instance,
    x: &[u64],
    scenario: &Scenario,
) -> Result<Option<Violation>> {
    let Some(subset) = flow::violated_subset_from_cut(inst, x, scenario.demands()) else {
        return Ok(None);
    };
    let amount = tilde_d(inst, &subset) - inst.q() * inst.suppliers_near_subset(x, &subset);
    let witness = scenario_from_subset(inst, &subset)?;
    Ok(Some(Violation {
        subset,
        amount,
        witness: Some(witness),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{inst_a, random_suppliers, rng};

    fn unlimited() -> SolveLimits {
        SolveLimits::default()
    }

    #[test]
    fn brute_on_inst_a() {
        let inst = inst_a();
        let v = separate_brute(&inst, &[0, 0]).unwrap().unwrap();
        assert_eq!(v.amount, 4);
        assert_eq!(tilde_d(&inst, &v.subset), 4);

        assert!(separate_brute(&inst, &[1, 1]).unwrap().is_none());

        let v = separate_brute(&inst, &[1, 0]).unwrap().unwrap();
        assert_eq!(v.subset, vec![2]);
        assert_eq!(v.amount, 2);
    }

    #[test]
    fn brute_respects_the_region_guard() {
        let nj = BRUTE_FORCE_MAX_REGIONS + 1;
        let edges: Vec<(usize, usize)> = (0..nj).map(|j| (0, j)).collect();
        let inst = Instance::with_gamma(1, 1, vec![(0, 1); nj], &edges, 1)
            .unwrap()
            .validate_and_normalize()
            .unwrap();
        let err = separate_brute(&inst, &[0]).unwrap_err();
        assert!(matches!(err, Error::TooLarge { .. }));
    }

    #[test]
    fn brute_ties_break_lexicographically() {
        let disjoint = |gamma| {
            Instance::with_gamma(1, 2, vec![(0, 1), (0, 1)], &[(0, 0), (1, 1)], gamma)
                .unwrap()
                .validate_and_normalize()
                .unwrap()
        };
        // budget 2: the pair dominates the singletons (amount 2 vs 1)
        let v = separate_brute(&disjoint(2), &[0, 0]).unwrap().unwrap();
        assert_eq!(v.subset, vec![0, 1]);
        // budget 1: {0}, {1} and {0,1} all violate by 1; {0} is smallest
        let v = separate_brute(&disjoint(1), &[0, 0]).unwrap().unwrap();
        assert_eq!(v.subset, vec![0]);
        assert_eq!(v.amount, 1);
        assert!(separate_brute(&disjoint(2), &[1, 1]).unwrap().is_none());
    }

    #[test]
    fn mask_order_matches_sorted_list_order() {
        // {0,2} < {1}, prefixes are smaller, disjoint sets compare heads
        assert!(mask_lex_less(0b101, 0b010));
        assert!(mask_lex_less(0b011, 0b111));
        assert!(!mask_lex_less(0b111, 0b011));
        assert!(mask_lex_less(0b001, 0b110));
        assert!(!mask_lex_less(0b100, 0b001));
        assert!(!mask_lex_less(0b101, 0b101));
    }

    #[test]
    fn set_separation_model_shape_on_inst_a() {
        let inst = inst_a();
        assert_eq!(inst.max_location_degree(), 2);
        assert_eq!(inst.gamma() - inst.sum_lower(), 4);
        let model = build_set_separation_model(&inst, &[1, 0]);
        assert_eq!(model.lp.num_vars(), 2 + 3 + 1);
        assert_eq!(model.lp.num_rows(), 2 + 2);
        assert_eq!(model.is_integer.iter().filter(|&&b| b).count(), 5);
    }

    #[test]
    fn set_separation_matches_brute_on_inst_a() {
        let inst = inst_a();
        let v = separate_set(&inst, &[1, 0], &unlimited()).unwrap().unwrap();
        assert_eq!(v.subset, vec![2]);
        assert_eq!(v.amount, 2);
        assert!(separate_set(&inst, &[1, 1], &unlimited())
            .unwrap()
            .is_none());
        assert!(separate_set(&inst, &[10, 10], &unlimited())
            .unwrap()
            .is_none());
    }

    #[test]
    fn zero_suppliers_lose_the_whole_budget() {
        let inst = inst_a();
        let model = build_set_separation_model(&inst, &[0, 0]);
        let out = crate::milp::solve_milp(&model, &unlimited()).unwrap();
        assert!((out.objective.unwrap() - (-(inst.gamma() as f64))).abs() < 1e-6);
    }

    #[test]
    fn no_violation_on_covered_single_region() {
        let inst = Instance::with_gamma(3, 1, vec![(0, 1)], &[(0, 0)], 1)
            .unwrap()
            .validate_and_normalize()
            .unwrap();
        assert!(separate_set(&inst, &[1], &unlimited()).unwrap().is_none());
    }

    #[test]
    fn bigm_model_shape_on_inst_a() {
        let inst = inst_a();
        let model = build_bigm_separation_model(&inst, &[1, 0]);
        assert_eq!(model.lp.num_vars(), 2 + 3 + 3 + 3);
        assert_eq!(model.lp.num_rows(), 2 + 3 + 3 + 1);
    }

    #[test]
    fn bigm_agrees_with_set_separation_on_inst_a() {
        let inst = inst_a();
        let v = separate_bigm(&inst, &[1, 0], &unlimited())
            .unwrap()
            .unwrap();
        assert_eq!(v.amount, 2);
        assert_eq!(v.subset, vec![2]);
        // the trivial upper-bound placement admits no violating scenario
        let trivial = crate::instance::trivial_upper_solution(&inst).unwrap();
        assert!(separate_bigm(&inst, trivial.suppliers(), &unlimited())
            .unwrap()
            .is_none());
    }

    #[test]
    fn witness_scenarios_match_the_proof_cases() {
        let inst = inst_a();
        let s = scenario_from_subset(&inst, &[2]).unwrap();
        assert_eq!(s.demands(), &[2, 0, 2]);

        let tight = Instance::with_gamma(1, 1, vec![(1, 3), (1, 3)], &[(0, 0), (0, 1)], 4)
            .unwrap()
            .validate_and_normalize()
            .unwrap();
        let s = scenario_from_subset(&tight, &[0]).unwrap();
        assert_eq!(s.demands(), &[3, 1]);

        let s = scenario_from_subset(&inst, &[0, 1, 2]).unwrap();
        assert_eq!(s.demands(), &[2, 2, 0]);

        assert_eq!(
            scenario_from_subset(&inst, &[]).unwrap_err(),
            Error::EmptySubset
        );
    }

    #[test]
    fn subsets_from_scenarios_via_min_cut() {
        let inst = inst_a();
        let xi = Scenario::for_instance(&inst, vec![2, 0, 2]).unwrap();
        let v = subset_from_scenario(&inst, &[1, 0], &xi).unwrap().unwrap();
        assert_eq!(v.subset, vec![2]);
        assert!(v.amount >= 1);

        assert!(subset_from_scenario(&inst, &[1, 1], &xi).unwrap().is_none());

        let v = subset_from_scenario(&inst, &[0, 0], &xi).unwrap().unwrap();
        assert!(!v.subset.is_empty());
    }

    #[test]
    fn three_routes_agree_on_random_instances() {
        let mut rng = rng(61);
        for _ in 0..25 {
            let inst = crate::testutil::random_small_instance(&mut rng, 4, 6, 2, 3);
            let x = random_suppliers(&mut rng, inst.num_locations(), 2);
            let brute = separate_brute(&inst, &x).unwrap();
            let set = separate_set(&inst, &x, &unlimited()).unwrap();
            let bigm = separate_bigm(&inst, &x, &unlimited()).unwrap();
            match brute {
                None => {
                    assert!(set.is_none());
                    assert!(bigm.is_none());
                }
                Some(vb) => {
                    assert_eq!(set.as_ref().unwrap().amount, vb.amount);
                    assert_eq!(bigm.as_ref().unwrap().amount, vb.amount);
                }
            }
        }
    }

    #[test]
    fn violating_round_trips() {
        let mut rng = rng(62);
        for _ in 0..30 {
            let inst = crate::testutil::random_small_instance(&mut rng, 4, 6, 2, 3);
            let x = random_suppliers(&mut rng, inst.num_locations(), 1);
            let Some(v) = separate_brute(&inst, &x).unwrap() else {
                continue;
            };
            // subset -> scenario: the witness defeats x
            let witness = v.witness.as_ref().unwrap();
            assert!(witness.is_extreme(&inst));
            assert!(!flow::check_feasible(&inst, &x, witness.demands()));
            // scenario -> subset: a positively violated subset comes back
            let back = subset_from_scenario(&inst, &x, witness).unwrap().unwrap();
            assert!(back.amount >= 1);
            assert!(
                inst.q() * inst.suppliers_near_subset(&x, &back.subset)
                    < tilde_d(&inst, &back.subset)
            );
        }
    }
}
