//! Transient behaviour of the M|M|m|m Erlang loss system.
//!
//! The crate computes `P[N(t) = j | N(0) = i]` for a loss system with Poisson
//! arrivals (rate `lambda0`), exponential service (mean `alpha`) and `m`
//! servers, along several independent routes that check each other:
//!
//! * [`exact`]: closed forms for one and two servers.
//! * [`series`]: the truncated Taylor series of `exp(tA)` with a-priori
//!   column-norm error bounds and operation counts.
//! * [`oracle`]: adaptive Dormand–Prince integration of the forward
//!   Kolmogorov equations, sharing no code with the series route.
//! * [`asymptotics`]: large-`m` approximations for initial occupancy 0 and 1,
//!   including the transient blocking probability.
//! * [`infinite`]: M|M|∞ transients and the maps relating them to M|M|m|m.
//!
//! Everything is `no_std` with `alloc`; enable the `std` feature to get
//! `std::error::Error` on [`Error`].
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod asymptotics;
pub mod exact;
pub mod infinite;
pub mod matrix;
pub mod model;
pub mod oracle;
pub mod series;
pub mod special;

mod error;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use model::{
    build_generator, erlang_b, matrix_norm, norm_upper_bound, stationary, GeneratorMatrix, Method,
    StationaryDistribution, SystemParams, TransientDistribution, TransitionMatrix,
};
