//! Constraint-generation drivers for the robust problem.
//!
//! Both drivers start from an empty restricted master problem (so the
//! first master solution is all zeros), solve it to integer optimality,
//! and ask the separation engine for a violated constraint. `setf` grows a
//! covering master over region subsets with worst-case right-hand sides;
//! `asf` grows an adjustable master that carries one continuous assignment
//! block per covered extreme scenario. On termination without violation
//! the master solution is the robust optimum; the two drivers agree.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::instance::{
    tilde_d, trivial_bounds, trivial_upper_solution, Instance, Scenario, Solution,
};
use crate::instgen::ExtremeSampler;
use crate::lp::{LpModel, Relation};
use crate::milp::{solve_milp_with, MilpModel, MilpStatus, SearchAids, SolveLimits};
use crate::nonrobust::solve_exact;
use crate::separation::{separate_set, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Formulation {
    /// Covering master over region subsets.
    Setf,
    /// Adjustable master over extreme scenarios.
    Asf,
}

impl std::fmt::Display for Formulation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Formulation::Setf => write!(f, "setf"),
            Formulation::Asf => write!(f, "asf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Optimal,
    TimeLimit,
    Infeasible,
}

/// The constraints accumulated by a driver run.
#[derive(Debug, Clone)]
pub enum CutPool {
    Subsets(Vec<Vec<usize>>),
    Scenarios(Vec<Scenario>),
}

impl CutPool {
    pub fn len(&self) -> usize {
        match self {
            CutPool::Subsets(v) => v.len(),
            CutPool::Scenarios(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// One separation event: the master solution under test and the violation
/// the separation engine returned for it.
#[derive(Debug, Clone)]
pub struct SeparationRecord {
    pub x: Vec<u64>,
    pub violation: Violation,
}

/// Result of a constraint-generation run.
///
/// On `TimeLimit` the reported solution is the trivial upper-bound
/// placement (always robust-feasible); the master bound reached so far is
/// not a feasibility certificate.
#[derive(Debug, Clone)]
pub struct RobustRun {
    pub formulation: Formulation,
    pub solution: Solution,
    pub cuts: CutPool,
    pub iterations: u64,
    pub status: RunStatus,
    pub elapsed: Duration,
    pub lower_bound: u64,
    pub upper_bound: u64,
    pub separations: Vec<SeparationRecord>,
}

/// Driver options beyond the solve limits.
#[derive(Debug, Clone)]
pub struct DriverOptions {
    /// Cuts added per round. The default of one most-violated cut follows
    /// the plain constraint-generation scheme; higher values probe
    /// deficit-patched copies of the master solution for further cuts.
    pub max_cuts_per_round: usize,
}

impl Default for DriverOptions {
    fn default() -> Self {
        DriverOptions {
            max_cuts_per_round: 1,
        }
    }
}

fn check_instance(inst: &Instance) -> Result<()> {
    for j in 0..inst.num_regions() {
        if inst.upper_demands()[j] > 0 && inst.region_neighbors(j).is_empty() {
            return Err(Error::UncoverableRegion { region: j });
        }
    }
    Ok(())
}

/// `x` plus enough suppliers at the smallest-index location covering the
/// violated subset to absorb the deficit.
fn patch_with_cut(inst: &Instance, x: &[u64], violation: &Violation) -> Vec<u64> {
    let mut patched = x.to_vec();
    let location = *inst
        .subset_neighborhood(&violation.subset)
        .first()
        .expect("violating subsets have demand, hence neighbors");
    patched[location] += violation.amount.div_ceil(inst.q());
    patched
}

fn timed_out(run_start: Instant, limits: &SolveLimits) -> Option<SolveLimits> {
    limits.remaining(run_start.elapsed())
}

struct DriverState {
    start: Instant,
    iterations: u64,
    separations: Vec<SeparationRecord>,
}

impl DriverState {
    fn finish(
        self,
        inst: &Instance,
        formulation: Formulation,
        status: RunStatus,
        solution: Solution,
        cuts: CutPool,
    ) -> RobustRun {
        let (lower_bound, upper_bound) = trivial_bounds(inst);
        RobustRun {
            formulation,
            solution,
            cuts,
            iterations: self.iterations,
            status,
            elapsed: self.start.elapsed(),
            lower_bound,
            upper_bound,
            separations: self.separations,
        }
    }
}

/// Covering master over the accumulated subsets: minimize total suppliers
/// subject to `q * x(N(S)) >= d~(S)` for every cut `S`. The rows are
/// stated in the integer-equivalent form `x(N(S)) >= ceil(d~(S) / q)`,
/// which has the same integral solutions and a tighter relaxation.
fn build_setf_master(inst: &Instance, cuts: &[Vec<usize>]) -> MilpModel {
    let ni = inst.num_locations();
    let (_, upper) = trivial_bounds(inst);
    let mut lp = LpModel::new(ni);
    for i in 0..ni {
        lp.set_objective(i, 1.0);
        lp.set_bounds(i, 0.0, upper as f64);
    }
    for subset in cuts {
        let coeffs: Vec<(usize, f64)> = inst
            .subset_neighborhood(subset)
            .into_iter()
            .map(|i| (i, 1.0))
            .collect();
        let need = tilde_d(inst, subset).div_ceil(inst.q());
        lp.add_row(coeffs, Relation::Ge, need as f64);
    }
    MilpModel::new(lp, vec![true; ni]).with_integral_objective()
}

/// Adjustable master over the accumulated extreme scenarios: the supplier
/// variables are shared, and each scenario carries a full `|I| * |J|`
/// block of continuous assignment variables with its own coverage and
/// capacity rows.
fn build_asf_master(inst: &Instance, scenarios: &[Scenario]) -> MilpModel {
    let ni = inst.num_locations();
    let nj = inst.num_regions();
    let (_, upper) = trivial_bounds(inst);
    let block = ni * nj;
    let mut lp = LpModel::new(ni + scenarios.len() * block);
    let mut is_integer = vec![false; lp.num_vars()];
    for i in 0..ni {
        lp.set_objective(i, 1.0);
        lp.set_bounds(i, 0.0, upper as f64);
        is_integer[i] = true;
    }
    let q = inst.q() as f64;
    for (s, scenario) in scenarios.iter().enumerate() {
        let y = |i: usize, j: usize| ni + s * block + i * nj + j;
        for j in 0..nj {
            let coeffs: Vec<(usize, f64)> = inst
                .region_neighbors(j)
                .iter()
                .map(|&i| (y(i, j), 1.0))
                .collect();
            lp.add_row(coeffs, Relation::Ge, scenario.demands()[j] as f64);
        }
        for i in 0..ni {
            let mut coeffs: Vec<(usize, f64)> = inst
                .location_neighbors(i)
                .iter()
                .map(|&j| (y(i, j), 1.0))
                .collect();
            coeffs.push((i, -q));
            lp.add_row(coeffs, Relation::Le, 0.0);
        }
    }
    MilpModel::new(lp, is_integer).with_integral_objective()
}

fn master_suppliers(solution: &[f64], ni: usize) -> Vec<u64> {
    solution[..ni].iter().map(|&v| v.round() as u64).collect()
}

/// Constraint generation on the set formulation.
pub fn solve_setf(inst: &Instance, limits: &SolveLimits) -> Result<RobustRun> {
    solve_setf_with(inst, limits, &DriverOptions::default())
}

pub fn solve_setf_with(
    inst: &Instance,
    limits: &SolveLimits,
    options: &DriverOptions,
) -> Result<RobustRun> {
    check_instance(inst)?;
    let mut state = DriverState {
        start: Instant::now(),
        iterations: 0,
        separations: Vec::new(),
    };
    let ni = inst.num_locations();
    let mut cuts: Vec<Vec<usize>> = Vec::new();
    // previous master solution, plus a copy patched to satisfy the newest
    // cut (the patched one passes the whole master by construction)
    let mut warm_pool: Vec<Vec<u64>> = Vec::new();

    loop {
        let Some(remaining) = timed_out(state.start, limits) else {
            let fallback = trivial_upper_solution(inst)?;
            return Ok(state.finish(
                inst,
                Formulation::Setf,
                RunStatus::TimeLimit,
                fallback,
                CutPool::Subsets(cuts),
            ));
        };

        let master = build_setf_master(inst, &cuts);
        let warm_starts: Vec<Vec<f64>> = warm_pool
            .iter()
            .map(|x| x.iter().map(|&v| v as f64).collect())
            .collect();
        // rounding hook, tried in order of quality: keep the relaxation's
        // total and distribute the leftover units onto the largest
        // fractional parts (optimal-valued when it satisfies the cuts),
        // else floor plus greedy repair of deficient cuts, else plain ceil
        let satisfies_cuts = |x: &[u64]| {
            cuts.iter()
                .all(|s| inst.q() * inst.suppliers_near_subset(x, s) >= tilde_d(inst, s))
        };
        let round_hook = |lp_x: &[f64]| -> Option<Vec<f64>> {
            let floored: Vec<u64> = lp_x.iter().map(|&v| v.floor().max(0.0) as u64).collect();
            let total = lp_x.iter().sum::<f64>().round() as u64;
            let leftover = (total.saturating_sub(floored.iter().sum::<u64>())) as usize;
            let mut order: Vec<usize> = (0..lp_x.len()).collect();
            order.sort_by(|&a, &b| {
                let fa = lp_x[a] - lp_x[a].floor();
                let fb = lp_x[b] - lp_x[b].floor();
                fb.total_cmp(&fa).then(a.cmp(&b))
            });
            let mut same_total = floored.clone();
            for &i in order.iter().take(leftover.min(same_total.len())) {
                same_total[i] += 1;
            }
            let best = if satisfies_cuts(&same_total) {
                same_total
            } else {
                let mut repaired = floored;
                for subset in &cuts {
                    let need = tilde_d(inst, subset);
                    let have = inst.q() * inst.suppliers_near_subset(&repaired, subset);
                    if have < need {
                        let location = inst.subset_neighborhood(subset)[0];
                        repaired[location] += (need - have).div_ceil(inst.q());
                    }
                }
                let ceiled: Vec<u64> = lp_x.iter().map(|&v| v.ceil().max(0.0) as u64).collect();
                if repaired.iter().sum::<u64>() <= ceiled.iter().sum::<u64>() {
                    repaired
                } else {
                    ceiled
                }
            };
            Some(best.into_iter().map(|v| v as f64).collect())
        };
        let aids = SearchAids {
            warm_starts: &warm_starts,
            round_hook: Some(&round_hook),
            branch_priority: None,
        };
        let master_clock = Instant::now();
        let out = solve_milp_with(&master, &remaining, &aids)?;
        log::debug!(
            "setf master: {} cuts, {} nodes, {:?}",
            cuts.len(),
            out.nodes,
            master_clock.elapsed()
        );
        let x = match out.status {
            MilpStatus::Optimal => master_suppliers(&out.solution.unwrap(), ni),
            MilpStatus::TimeLimit => {
                let fallback = trivial_upper_solution(inst)?;
                return Ok(state.finish(
                    inst,
                    Formulation::Setf,
                    RunStatus::TimeLimit,
                    fallback,
                    CutPool::Subsets(cuts),
                ));
            }
            // the trivial placement satisfies every cut, so the master
            // cannot be infeasible on a normalized instance
            _ => {
                return Ok(state.finish(
                    inst,
                    Formulation::Setf,
                    RunStatus::Infeasible,
                    Solution::new(vec![0; ni]),
                    CutPool::Subsets(cuts),
                ))
            }
        };
        state.iterations += 1;
        log::debug!(
            "setf iteration {}: master objective {} with {} cuts",
            state.iterations,
            x.iter().sum::<u64>(),
            cuts.len()
        );

        let Some(remaining) = timed_out(state.start, limits) else {
            let fallback = trivial_upper_solution(inst)?;
            return Ok(state.finish(
                inst,
                Formulation::Setf,
                RunStatus::TimeLimit,
                fallback,
                CutPool::Subsets(cuts),
            ));
        };
        let separation_clock = Instant::now();
        let separated = separate_set(inst, &x, &remaining);
        log::debug!("setf separation: {:?}", separation_clock.elapsed());
        match separated {
            Err(Error::SolverLimit) => {
                let fallback = trivial_upper_solution(inst)?;
                return Ok(state.finish(
                    inst,
                    Formulation::Setf,
                    RunStatus::TimeLimit,
                    fallback,
                    CutPool::Subsets(cuts),
                ));
            }
            Err(other) => return Err(other),
            Ok(None) => {
                return Ok(state.finish(
                    inst,
                    Formulation::Setf,
                    RunStatus::Optimal,
                    Solution::new(x),
                    CutPool::Subsets(cuts),
                ));
            }
            Ok(Some(violation)) => {
                assert!(
                    !cuts.contains(&violation.subset),
                    "separation returned an already-covered subset"
                );
                let mut probe = patch_with_cut(inst, &x, &violation);
                state.separations.push(SeparationRecord {
                    x: x.clone(),
                    violation: violation.clone(),
                });
                cuts.push(violation.subset.clone());

                // optional extra cuts from deficit-patched probes
                for _ in 1..options.max_cuts_per_round {
                    let Some(remaining) = timed_out(state.start, limits) else {
                        break;
                    };
                    match separate_set(inst, &probe, &remaining) {
                        Ok(Some(v)) if !cuts.contains(&v.subset) => {
                            state.separations.push(SeparationRecord {
                                x: probe.clone(),
                                violation: v.clone(),
                            });
                            probe = patch_with_cut(inst, &probe, &v);
                            cuts.push(v.subset);
                        }
                        _ => break,
                    }
                }
                // the chained probe covers every cut added this round
                warm_pool = vec![x, probe];
            }
        }
    }
}

/// Constraint generation on the adjustable assignment formulation.
pub fn solve_asf(inst: &Instance, limits: &SolveLimits) -> Result<RobustRun> {
    solve_asf_with(inst, limits, &DriverOptions::default())
}

pub fn solve_asf_with(
    inst: &Instance,
    limits: &SolveLimits,
    options: &DriverOptions,
) -> Result<RobustRun> {
    check_instance(inst)?;
    let mut state = DriverState {
        start: Instant::now(),
        iterations: 0,
        separations: Vec::new(),
    };
    let ni = inst.num_locations();
    let mut scenarios: Vec<Scenario> = Vec::new();

    loop {
        let Some(remaining) = timed_out(state.start, limits) else {
            let fallback = trivial_upper_solution(inst)?;
            return Ok(state.finish(
                inst,
                Formulation::Asf,
                RunStatus::TimeLimit,
                fallback,
                CutPool::Scenarios(scenarios),
            ));
        };

        let master = build_asf_master(inst, &scenarios);
        let out = solve_milp_with(&master, &remaining, &SearchAids::default())?;
        let x = match out.status {
            MilpStatus::Optimal => master_suppliers(&out.solution.unwrap(), ni),
            MilpStatus::TimeLimit => {
                let fallback = trivial_upper_solution(inst)?;
                return Ok(state.finish(
                    inst,
                    Formulation::Asf,
                    RunStatus::TimeLimit,
                    fallback,
                    CutPool::Scenarios(scenarios),
                ));
            }
            _ => {
                return Ok(state.finish(
                    inst,
                    Formulation::Asf,
                    RunStatus::Infeasible,
                    Solution::new(vec![0; ni]),
                    CutPool::Scenarios(scenarios),
                ))
            }
        };
        state.iterations += 1;
        log::debug!(
            "asf iteration {}: master objective {} with {} scenarios",
            state.iterations,
            x.iter().sum::<u64>(),
            scenarios.len()
        );

        let Some(remaining) = timed_out(state.start, limits) else {
            let fallback = trivial_upper_solution(inst)?;
            return Ok(state.finish(
                inst,
                Formulation::Asf,
                RunStatus::TimeLimit,
                fallback,
                CutPool::Scenarios(scenarios),
            ));
        };
        match separate_set(inst, &x, &remaining) {
            Err(Error::SolverLimit) => {
                let fallback = trivial_upper_solution(inst)?;
                return Ok(state.finish(
                    inst,
                    Formulation::Asf,
                    RunStatus::TimeLimit,
                    fallback,
                    CutPool::Scenarios(scenarios),
                ));
            }
            Err(other) => return Err(other),
            Ok(None) => {
                return Ok(state.finish(
                    inst,
                    Formulation::Asf,
                    RunStatus::Optimal,
                    Solution::new(x),
                    CutPool::Scenarios(scenarios),
                ));
            }
            Ok(Some(violation)) => {
                let scenario = violation
                    .witness
                    .clone()
                    .expect("set separation always attaches a witness");
                assert!(
                    !scenarios.contains(&scenario),
                    "separation returned an already-covered scenario"
                );
                let mut probe = patch_with_cut(inst, &x, &violation);
                state.separations.push(SeparationRecord {
                    x: x.clone(),
                    violation,
                });
                scenarios.push(scenario);

                for _ in 1..options.max_cuts_per_round {
                    let Some(remaining) = timed_out(state.start, limits) else {
                        break;
                    };
                    match separate_set(inst, &probe, &remaining) {
                        Ok(Some(v)) => {
                            let sc = v.witness.clone().unwrap();
                            if scenarios.contains(&sc) {
                                break;
                            }
                            state.separations.push(SeparationRecord {
                                x: probe.clone(),
                                violation: v.clone(),
                            });
                            probe = patch_with_cut(inst, &probe, &v);
                            scenarios.push(sc);
                        }
                        _ => break,
                    }
                }
            }
        }
    }
}

/// Robust feasibility of a candidate supplier vector, by separation.
pub fn is_robust_feasible(inst: &Instance, x: &[u64], limits: &SolveLimits) -> Result<bool> {
    Ok(separate_set(inst, x, limits)?.is_none())
}

/// Objective of the solution covering every region at its upper demand.
pub fn worst_case_value(inst: &Instance, limits: &SolveLimits) -> Result<u64> {
    Ok(solve_exact(inst, inst.upper_demands(), limits)?.objective())
}

/// Median objective over `count` uniformly random extreme scenarios, each
/// solved non-robustly (lower median for even counts).
pub fn average_case_value(
    inst: &Instance,
    count: usize,
    seed: u64,
    limits: &SolveLimits,
) -> Result<u64> {
    if count == 0 {
        return Err(Error::BadParams("need at least one scenario".into()));
    }
    let sampler = ExtremeSampler::new(inst);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        let scenario = sampler.sample_scenario(inst, &mut rng);
        values.push(solve_exact(inst, scenario.demands(), limits)?.objective());
    }
    values.sort_unstable();
    Ok(values[(count - 1) / 2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instgen::{from_dominating_set, GenParams};
    use crate::separation::separate_brute;
    use crate::testutil::inst_a;

    fn unlimited() -> SolveLimits {
        SolveLimits::default()
    }

    #[test]
    fn inst_a_optimum_via_both_drivers() {
        let inst = inst_a();
        let setf = solve_setf(&inst, &unlimited()).unwrap();
        assert_eq!(setf.status, RunStatus::Optimal);
        assert_eq!(setf.solution.objective(), 2);
        assert!(separate_brute(&inst, setf.solution.suppliers())
            .unwrap()
            .is_none());

        let asf = solve_asf(&inst, &unlimited()).unwrap();
        assert_eq!(asf.status, RunStatus::Optimal);
        assert_eq!(asf.solution.objective(), 2);
        assert_eq!(asf.cuts.len(), asf.separations.len());
    }

    #[test]
    fn empty_budget_solves_in_one_round() {
        let inst = Instance::with_gamma(2, 1, vec![(0, 3)], &[(0, 0)], 0)
            .unwrap()
            .validate_and_normalize()
            .unwrap();
        let run = solve_setf(&inst, &unlimited()).unwrap();
        assert_eq!(run.solution.objective(), 0);
        assert_eq!(run.iterations, 1);
        assert!(run.cuts.is_empty());
    }

    #[test]
    fn domination_number_of_p3_is_one() {
        let inst = from_dominating_set(&crate::matching::tests::path(3), 3);
        let run = solve_setf(&inst, &unlimited()).unwrap();
        assert_eq!(run.solution.objective(), 1);
    }

    #[test]
    fn zero_time_limit_reports_bounds_and_feasible_fallback() {
        let inst = inst_a();
        let run = solve_setf(&inst, &SolveLimits::with_time_limit(0.0)).unwrap();
        assert_eq!(run.status, RunStatus::TimeLimit);
        assert_eq!((run.lower_bound, run.upper_bound), (2, 3));
        assert!(separate_brute(&inst, run.solution.suppliers())
            .unwrap()
            .is_none());
    }

    #[test]
    fn feasibility_checks() {
        let inst = inst_a();
        assert!(is_robust_feasible(&inst, &[1, 1], &unlimited()).unwrap());
        assert!(!is_robust_feasible(&inst, &[1, 0], &unlimited()).unwrap());
        let trivial = trivial_upper_solution(&inst).unwrap();
        assert!(is_robust_feasible(&inst, trivial.suppliers(), &unlimited()).unwrap());
    }

    #[test]
    fn worst_and_average_values_on_inst_a() {
        let inst = inst_a();
        assert_eq!(worst_case_value(&inst, &unlimited()).unwrap(), 2);
        for seed in [1, 2, 3] {
            assert_eq!(average_case_value(&inst, 4, seed, &unlimited()).unwrap(), 2);
        }
    }

    #[test]
    fn degenerate_box_average_equals_worst() {
        let inst = Instance::with_gamma(2, 1, vec![(2, 2), (1, 1)], &[(0, 0), (0, 1)], 3)
            .unwrap()
            .validate_and_normalize()
            .unwrap();
        let avg = average_case_value(&inst, 1, 5, &unlimited()).unwrap();
        assert_eq!(avg, worst_case_value(&inst, &unlimited()).unwrap());
    }

    #[test]
    fn gamma_endpoints_collapse_to_pure_demand_solves() {
        for seed in 0..4 {
            for (factor, pick_upper) in [(0.0, false), (1.0, true)] {
                let params = GenParams {
                    num_locations: 3,
                    num_regions: 5,
                    edge_density: 0.5,
                    k1: 2,
                    k2: 2,
                    gamma_factor: factor,
                    q: 3,
                    seed,
                };
                let inst = crate::instgen::random_instance(&params).unwrap();
                let run = solve_setf(&inst, &unlimited()).unwrap();
                let demands = if pick_upper {
                    inst.upper_demands()
                } else {
                    inst.lower_demands()
                };
                let fixed = solve_exact(&inst, demands, &unlimited()).unwrap();
                assert_eq!(run.solution.objective(), fixed.objective());
            }
        }
    }

    #[test]
    fn disjoint_neighborhoods_collapse_to_worst_case() {
        // three locations, six regions, disjoint pairs, a = 0, b = 2
        let edges = [(0, 0), (0, 1), (1, 2), (1, 3), (2, 4), (2, 5)];
        let inst = Instance::with_gamma(3, 3, vec![(0, 2); 6], &edges, 12)
            .unwrap()
            .validate_and_normalize()
            .unwrap();
        // gamma = sum(b) here, which dominates every neighborhood total
        let run = solve_setf(&inst, &unlimited()).unwrap();
        let worst = worst_case_value(&inst, &unlimited()).unwrap();
        assert_eq!(run.solution.objective(), worst);
    }

    #[test]
    fn multi_cut_rounds_reach_the_same_optimum() {
        let inst = inst_a();
        let options = DriverOptions {
            max_cuts_per_round: 4,
        };
        let run = solve_setf_with(&inst, &unlimited(), &options).unwrap();
        assert_eq!(run.solution.objective(), 2);
    }
}
