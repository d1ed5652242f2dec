//! Tight bounds on random-walk maxima and queue waiting times when only the
//! support, mean, and mean absolute deviation of the increments are known.
//!
//! The crate provides:
//! - validated ambiguity sets and the extremal distributions they induce
//!   ([`ambiguity`], [`extremal`]),
//! - finite-horizon bounds through Spitzer-type composition sums
//!   ([`transient`]),
//! - steady-state cumulant bounds through contour integration
//!   ([`steady_state`]) with an independent lattice oracle
//!   ([`lattice_oracle`]),
//! - classical moment-based bounds for comparison ([`classical`]),
//! - Monte Carlo verification ([`simulate`]) and data-driven parameter
//!   estimation ([`estimate`]).

pub mod ambiguity;
pub mod classical;
pub mod error;
pub mod estimate;
pub mod extremal;
pub mod lattice_oracle;
pub mod simulate;
pub mod steady_state;
pub mod transient;

pub use ambiguity::{AmbiguitySet, Family, QueueSpec};
pub use error::{Error, Result};
pub use extremal::{
    best_case_two_point, heavy_tail_family, worst_case_three_point, DiscreteDistribution,
};
pub use steady_state::{cumulant_lower, cumulant_upper, ContourConfig, CumulantBound};
pub use transient::{
    gg1_transient_upper, lower_bound_spitzer, upper_bound_spitzer, Direction, TransientBound,
};
