use core::fmt;

use crate::asymptotics::RegimeTag;

pub type Result<T> = core::result::Result<T, Error>;

/// Everything that can go wrong in the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A model or method parameter violates its precondition.
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
    /// A closed form was requested for the wrong number of servers.
    ServerCount { expected: usize, found: usize },
    /// An occupancy outside `0..=m`.
    StateOutOfRange { state: usize, m: usize },
    /// The asymptotic formulas assume per-server load below one.
    LoadNotBelowOne { rho: f64 },
    /// A regime/formula that does not apply to the query.
    Inapplicable {
        regime: RegimeTag,
        reason: &'static str,
    },
    /// No truncation order up to the cap satisfies the requested tolerance.
    TruncationCap { cap: usize, tol: f64 },
    /// The ODE integrator ran out of steps.
    StepLimit {
        max_steps: usize,
        lambda0: f64,
        alpha: f64,
        m: usize,
        t: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter {
                name,
                value,
                requirement,
            } => write!(f, "invalid {name} = {value}: must be {requirement}"),
            Error::ServerCount { expected, found } => {
                write!(f, "closed form needs m = {expected}, got m = {found}")
            }
            Error::StateOutOfRange { state, m } => {
                write!(f, "state {state} outside 0..={m}")
            }
            Error::LoadNotBelowOne { rho } => {
                write!(f, "asymptotic formulas need rho = rho0/m < 1, got {rho}")
            }
            Error::Inapplicable { regime, reason } => {
                write!(f, "regime {regime} does not apply: {reason}")
            }
            Error::TruncationCap { cap, tol } => {
                write!(f, "no truncation order <= {cap} reaches tolerance {tol}")
            }
            Error::StepLimit {
                max_steps,
                lambda0,
                alpha,
                m,
                t,
            } => write!(
                f,
                "ODE integration exhausted {max_steps} steps (lambda0 = {lambda0}, alpha = {alpha}, m = {m}, t = {t})"
            ),
        }
    }
}

#[cfg(any(feature = "std", test))]
impl std::error::Error for Error {}
