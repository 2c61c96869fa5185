use std::fmt;

/// Errors shared across the solver library.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The demand box and budget cannot form a nonempty uncertainty set:
    /// either the lower demands already exceed the budget or the budget
    /// exceeds the total upper demand.
    BoundViolation {
        sum_lower: u64,
        sum_upper: u64,
        gamma: u64,
    },
    /// A region can see positive demand but is adjacent to no location.
    UncoverableRegion { region: usize },
    /// No integral assignment exists for the given suppliers and demands.
    InfeasibleAssignment,
    /// Edge covers are undefined on graphs with isolated vertices.
    IsolatedVertex { vertex: usize },
    /// Brute-force subset enumeration refused because the region count
    /// exceeds the guard.
    TooLarge { regions: usize, max: usize },
    /// The requested operation needs a nonempty region subset.
    EmptySubset,
    /// A time or node limit expired before the solve finished.
    SolverLimit,
    /// The model admits no feasible solution.
    Infeasible,
    /// Pivoting stalled beyond the anti-cycling iteration cap, or the
    /// computed solution failed the final feasibility check.
    NumericalFailure(&'static str),
    /// Malformed input (bad index, duplicate edge, out-of-range parameter).
    BadParams(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::BoundViolation {
                sum_lower,
                sum_upper,
                gamma,
            } => write!(
                f,
                "budget {gamma} outside demand bounds [{sum_lower}, {sum_upper}]"
            ),
            Error::UncoverableRegion { region } => {
                write!(f, "region {region} has positive demand but no neighbor")
            }
            Error::InfeasibleAssignment => write!(f, "no feasible assignment exists"),
            Error::IsolatedVertex { vertex } => {
                write!(f, "vertex {vertex} is isolated; no edge cover exists")
            }
            Error::TooLarge { regions, max } => {
                write!(f, "{regions} regions exceed the enumeration guard of {max}")
            }
            Error::EmptySubset => write!(f, "operation requires a nonempty subset"),
            Error::SolverLimit => write!(f, "solver limit reached"),
            Error::Infeasible => write!(f, "model is infeasible"),
            Error::NumericalFailure(what) => write!(f, "numerical failure: {what}"),
            Error::BadParams(what) => write!(f, "bad parameters: {what}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
