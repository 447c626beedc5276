//! System parameters, the infinitesimal generator and stationary quantities.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::matrix::Matrix;
use crate::{Error, Result};

/// Parameters of an M|M|m|m loss system.
///
/// `alpha` is the mean service time, so each busy server completes at rate
/// `1/alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    lambda0: f64,
    alpha: f64,
    m: usize,
}

impl SystemParams {
    pub fn new(lambda0: f64, alpha: f64, m: usize) -> Result<Self> {
        if !(lambda0.is_finite() && lambda0 > 0.0) {
            return Err(Error::InvalidParameter {
                name: "lambda0",
                value: lambda0,
                requirement: "finite and > 0",
            });
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                requirement: "finite and > 0",
            });
        }
        if m == 0 {
            return Err(Error::InvalidParameter {
                name: "m",
                value: 0.0,
                requirement: ">= 1",
            });
        }
        Ok(SystemParams { lambda0, alpha, m })
    }

    /// Same as [`SystemParams::new`] but takes the service rate `mu = 1/alpha`.
    pub fn with_service_rate(lambda0: f64, mu: f64, m: usize) -> Result<Self> {
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParameter {
                name: "mu",
                value: mu,
                requirement: "finite and > 0",
            });
        }
        Self::new(lambda0, 1.0 / mu, m)
    }

    /// Arrival rate.
    pub fn lambda0(&self) -> f64 {
        self.lambda0
    }

    /// Mean service time.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Service rate `1/alpha`.
    pub fn mu(&self) -> f64 {
        1.0 / self.alpha
    }

    /// Number of servers.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Number of states, `m + 1`.
    pub fn states(&self) -> usize {
        self.m + 1
    }

    /// Offered load `lambda0 * alpha`.
    pub fn rho0(&self) -> f64 {
        self.lambda0 * self.alpha
    }

    /// Load per server `rho0 / m`.
    pub fn rho(&self) -> f64 {
        self.rho0() / self.m as f64
    }

    /// Small parameter `1/m` of the large-`m` expansions.
    pub fn epsilon(&self) -> f64 {
        1.0 / self.m as f64
    }

    /// Scaled arrival rate `lambda0 / m`.
    pub fn lambda(&self) -> f64 {
        self.lambda0 / self.m as f64
    }

    pub(crate) fn check_state(&self, n: usize) -> Result<()> {
        if n > self.m {
            Err(Error::StateOutOfRange {
                state: n,
                m: self.m,
            })
        } else {
            Ok(())
        }
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "t",
            value: t,
            requirement: "finite and >= 0",
        })
    }
}

/// The generator `A` (or `B = alpha * A` when `scaled`).
///
/// Acts on column vectors of state probabilities: `p(t) = exp(tA) p(0)`, so
/// entry `(n + 1, n)` is the arrival rate out of state `n` and every column
/// sums to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    matrix: Matrix,
    scaled: bool,
}

impl GeneratorMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn is_scaled(&self) -> bool {
        self.scaled
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }
}

/// Builds the tridiagonal birth–death generator.
///
/// The scaled form uses `rho0` and the integers `n` directly rather than
/// multiplying the rates by `alpha`.
pub fn build_generator(params: &SystemParams, scaled: bool) -> GeneratorMatrix {
    let m = params.m();
    let (birth, death) = if scaled {
        (params.rho0(), 1.0)
    } else {
        (params.lambda0(), params.mu())
    };
    let mut a = Matrix::zeros(m + 1);
    for n in 0..=m {
        let departure = n as f64 * death;
        if n < m {
            a[(n + 1, n)] = birth;
            a[(n, n)] = -(birth + departure);
        } else {
            a[(n, n)] = -departure;
        }
        if n >= 1 {
            a[(n - 1, n)] = departure;
        }
    }
    GeneratorMatrix { matrix: a, scaled }
}

/// Greatest absolute column sum of a square matrix.
pub fn matrix_norm(m: &Matrix) -> f64 {
    m.norm()
}

/// A-priori bound `2(lambda0 + m/alpha)` on the generator's norm.
pub fn norm_upper_bound(params: &SystemParams) -> f64 {
    2.0 * (params.lambda0() + params.m() as f64 / params.alpha())
}

/// Equilibrium distribution, proportional to `rho0^n / n!`.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryDistribution {
    probabilities: Vec<f64>,
}

impl StationaryDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probabilities
    }
}

// Running terms are rescaled by this factor whenever they exceed it.
const RESCALE: f64 = 1e200;

pub fn stationary(params: &SystemParams) -> StationaryDistribution {
    let rho0 = params.rho0();
    let mut terms = Vec::with_capacity(params.states());
    let mut term = 1.0_f64;
    terms.push(term);
    for n in 1..=params.m() {
        term *= rho0 / n as f64;
        if term > RESCALE {
            for v in terms.iter_mut() {
                *v /= RESCALE;
            }
            term /= RESCALE;
        }
        terms.push(term);
    }
    let total: f64 = terms.iter().sum();
    for v in terms.iter_mut() {
        *v /= total;
    }
    StationaryDistribution {
        probabilities: terms,
    }
}

/// Erlang loss formula via `B(k) = rho0 B(k-1) / (k + rho0 B(k-1))`.
pub fn erlang_b(params: &SystemParams) -> f64 {
    let rho0 = params.rho0();
    (1..=params.m()).fold(1.0, |b, k| {
        let x = rho0 * b;
        x / (k as f64 + x)
    })
}

/// Which route produced a distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Series,
    Oracle,
    Asymptotic,
    InfiniteServer,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Series => "series",
            Method::Oracle => "oracle",
            Method::Asymptotic => "asymptotic",
            Method::InfiniteServer => "infinite-server",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Occupancy distribution at time `t` from a fixed initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct TransientDistribution {
    pub t: f64,
    pub n0: usize,
    pub probabilities: Vec<f64>,
    pub method: Method,
    pub error_bound: Option<f64>,
}

impl TransientDistribution {
    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// `P_ij(t) = P[N(t) = j | N(0) = i]`; rows are initial states.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    t: f64,
    matrix: Matrix,
}

impl TransitionMatrix {
    pub fn new(t: f64, matrix: Matrix) -> Self {
        TransitionMatrix { t, matrix }
    }

    /// Converts a propagator acting on column vectors (`exp(tA)`) into the
    /// row-per-initial-state layout.
    pub fn from_propagator(t: f64, propagator: &Matrix) -> Self {
        TransitionMatrix {
            t,
            matrix: propagator.transpose(),
        }
    }

    pub fn identity(states: usize) -> Self {
        TransitionMatrix {
            t: 0.0,
            matrix: Matrix::identity(states),
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn states(&self) -> usize {
        self.matrix.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.matrix.row(i)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.states()).map(|i| self.matrix.row_sum(i)).collect()
    }

    /// `P(t) P(s)`, the transition matrix at `t + s`.
    pub fn compose(&self, other: &TransitionMatrix) -> TransitionMatrix {
        TransitionMatrix {
            t: self.t + other.t,
            matrix: self.matrix.mul(&other.matrix),
        }
    }

    /// Largest entrywise deviation from another transition matrix.
    pub fn max_abs_diff(&self, other: &TransitionMatrix) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }

    pub fn distribution(
        &self,
        n0: usize,
        method: Method,
        error_bound: Option<f64>,
    ) -> TransientDistribution {
        TransientDistribution {
            t: self.t,
            n0,
            probabilities: self.row(n0).to_vec(),
            method,
            error_bound,
        }
    }

    /// Every row replaced by the same vector.
    pub fn repeated_row(t: f64, row: &[f64]) -> Self {
        let n = row.len();
        let mut matrix = Matrix::zeros(n);
        for i in 0..n {
            for (j, v) in row.iter().enumerate() {
                matrix[(i, j)] = *v;
            }
        }
        TransitionMatrix { t, matrix }
    }
}

/// Unit vector at `n` over `states` entries.
pub(crate) fn unit_vector(states: usize, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; states];
    v[n] = 1.0;
    v
}
