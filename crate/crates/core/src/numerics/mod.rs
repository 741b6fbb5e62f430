//! Deterministic numerical kernels shared by the solvers and simulators.

pub mod interp;
pub mod quadrature;
pub mod rng;
pub mod root;
pub mod stats;

pub use interp::{monotone_interpolate, uniform_nodes, MonotoneGrid};
pub use quadrature::{integrate_1d, integrate_adaptive, GaussLegendre};
pub use rng::RandomStream;
pub use root::{bisect_decreasing, solve_monotone_root, Bracket, RootOptions, DEFAULT_ABS_TOL};
pub use stats::RunningStats;
