//! Forward problem: slit maps, point evolution, traces and driver symmetries.

pub mod driver;
pub mod ode;
pub mod slit;
pub mod trace;

pub use driver::{
    concat_driving, sample_uniform, transform_driving, ClosedForm, Driver, DrivingFunction, FnDriver, Interpolation,
};
pub use ode::{evolve_point, Evolution};
pub use slit::{inverse_vertical_slit_map, vertical_slit_map, SlitSide};
pub use trace::{
    chain_on_grid, chain_on_substeps, solve_trace, solve_trace_on_grid, solve_trace_on_substeps, Grading, Sampling, SlitMapChain, SlitStep, StepPolicy,
    Substep, Trace,
};
