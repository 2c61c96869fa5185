//! Exact solvers for the min-q-multiset multicover problem and its robust
//! counterpart under budgeted demand uncertainty.
//!
//! The covering problem places integer numbers of suppliers on the locations
//! of a bipartite location/region graph so that every region's demand is
//! met, where each supplier serves at most `q` demand units among its
//! adjacent regions. In the robust variant the demand of region `j` varies
//! in an integral interval `[a_j, b_j]` and the total demand is capped by a
//! budget `gamma`; a solution must admit a feasible assignment for every
//! admissible demand vector.
//!
//! The crate provides:
//!
//! - [`instance`]: the domain model, instance normalization, the worst-case
//!   subset demand and trivial bounds;
//! - [`flow`]: max-flow feasibility certificates and violated-subset
//!   extraction from minimum cuts;
//! - [`matching`]: blossom maximum matching and minimum edge covers on
//!   general graphs;
//! - [`nonrobust`]: solvers for the fixed-demand problem (`q = 1` closed
//!   form, `q = 2` via edge cover, exact MILP for general `q`, and a greedy
//!   approximation);
//! - [`lp`] and [`milp`]: the self-contained simplex and branch-and-bound
//!   engines behind every relaxation solved in this crate;
//! - [`separation`]: the three separation routes for robust feasibility and
//!   the transformations between violating subsets and violating scenarios;
//! - [`robust`]: the constraint-generation drivers over the set and the
//!   adjustable assignment formulation, plus worst-case and average-case
//!   reference values;
//! - [`instgen`]: reproducible random instances, uniform extreme-scenario
//!   sampling, the dominating-set reduction and travel-time geographic
//!   instances.

pub mod error;
pub mod flow;
pub mod instance;
pub mod instgen;
pub mod lp;
pub mod matching;
pub mod milp;
pub mod nonrobust;
pub mod robust;
pub mod separation;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use instance::{tilde_d, trivial_bounds, trivial_upper_solution};
pub use instance::{Assignment, Instance, Scenario, Solution};
