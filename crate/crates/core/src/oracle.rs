//! Reference solution of the forward Kolmogorov equations.
//!
//! Integrates `dP_n/dt` for the birth–death chain with an adaptive
//! Dormand–Prince 5(4) pair. The right-hand side is written out from the
//! balance equations directly and never touches [`crate::Matrix`] or the
//! series code, so agreement between the two routes is meaningful.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::Matrix;
use crate::model::{
    check_time, unit_vector, Method, SystemParams, TransientDistribution, TransitionMatrix,
};
use crate::{Error, Result};

/// Tolerances and step budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_steps: 10_000_000,
        }
    }
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "rel_tol",
                value: self.rel_tol,
                requirement: "> 0",
            });
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "abs_tol",
                value: self.abs_tol,
                requirement: "> 0",
            });
        }
        if self.max_steps == 0 {
            return Err(Error::InvalidParameter {
                name: "max_steps",
                value: 0.0,
                requirement: ">= 1",
            });
        }
        Ok(())
    }
}

/// Integration result with bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    pub distribution: TransientDistribution,
    /// Largest `|sum(P) - 1|` seen at a renormalisation point, before
    /// renormalising.
    pub drift: f64,
    /// Whether the output vector was rescaled to unit mass.
    pub renormalized: bool,
    pub steps: usize,
}

// Mass drift tolerated before the vector is rescaled.
const DRIFT_TOLERANCE: f64 = 1e-13;

// Beyond this many service-time units (m t / alpha) the integration is split
// into windows of length alpha, renormalising between windows.
const WINDOW_THRESHOLD: f64 = 1e3;

// Dormand–Prince 5(4) tableau. The system is autonomous, so the nodes are
// not needed.
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
// Difference between the 5th and embedded 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Right-hand side of the balance equations for `P_0 .. P_m`.
fn kolmogorov_rhs(lambda0: f64, mu: f64, p: &[f64], out: &mut [f64]) {
    let m = p.len() - 1;
    if m == 0 {
        out[0] = 0.0;
        return;
    }
    out[0] = mu * p[1] - lambda0 * p[0];
    for n in 1..m {
        let nf = n as f64;
        out[n] = lambda0 * p[n - 1] + mu * (nf + 1.0) * p[n + 1] - (lambda0 + mu * nf) * p[n];
    }
    out[m] = lambda0 * p[m - 1] - mu * m as f64 * p[m];
}

struct Integrator {
    lambda0: f64,
    mu: f64,
    config: OracleConfig,
    k: [Vec<f64>; 7],
    stage: Vec<f64>,
    next: Vec<f64>,
    steps: usize,
    h: f64,
}

impl Integrator {
    fn new(params: &SystemParams, config: OracleConfig) -> Self {
        let n = params.states();
        let fastest = 2.0 * (params.lambda0() + params.m() as f64 * params.mu());
        Integrator {
            lambda0: params.lambda0(),
            mu: params.mu(),
            config,
            k: core::array::from_fn(|_| vec![0.0; n]),
            stage: vec![0.0; n],
            next: vec![0.0; n],
            steps: 0,
            h: 0.01 / fastest,
        }
    }

    /// Advances `y` over `[0, span]`; returns false when the step budget runs out.
    // Stage sums read more clearly with explicit stage and state indices.
    #[allow(clippy::needless_range_loop)]
    fn advance(&mut self, y: &mut Vec<f64>, span: f64) -> bool {
        let n = y.len();
        let mut t = 0.0;
        kolmogorov_rhs(self.lambda0, self.mu, y, &mut self.k[0]);
        while t < span {
            if self.steps >= self.config.max_steps {
                return false;
            }
            let last = t + self.h >= span;
            let h = if last { span - t } else { self.h };
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, a) in A[s].iter().enumerate().take(s) {
                        acc += a * self.k[j][i];
                    }
                    self.stage[i] = y[i] + h * acc;
                }
                kolmogorov_rhs(self.lambda0, self.mu, &self.stage, &mut self.k[s]);
            }
            // Stage 7 is evaluated at the 5th-order solution (FSAL).
            let mut err = 0.0_f64;
            for i in 0..n {
                let mut acc = 0.0;
                let mut e = 0.0;
                for s in 0..7 {
                    acc += B[s] * self.k[s][i];
                    e += E[s] * self.k[s][i];
                }
                self.next[i] = y[i] + h * acc;
                let scale =
                    self.config.abs_tol + self.config.rel_tol * y[i].abs().max(self.next[i].abs());
                err = err.max((h * e).abs() / scale);
            }
            self.steps += 1;
            if err <= 1.0 {
                t = if last { span } else { t + h };
                core::mem::swap(y, &mut self.next);
                let (first, rest) = self.k.split_at_mut(1);
                first[0].copy_from_slice(&rest[5]);
                let grow = if err == 0.0 {
                    5.0
                } else {
                    (0.9 * libm::pow(err, -0.2)).clamp(0.2, 5.0)
                };
                if !last {
                    self.h = h * grow;
                }
            } else {
                self.h = h * (0.9 * libm::pow(err, -0.2)).clamp(0.2, 1.0);
            }
        }
        true
    }
}

fn renormalize(y: &mut [f64], drift: &mut f64) -> bool {
    let total: f64 = y.iter().sum();
    let d = (total - 1.0).abs();
    *drift = drift.max(d);
    if d > DRIFT_TOLERANCE {
        for v in y.iter_mut() {
            *v /= total;
        }
        true
    } else {
        false
    }
}

/// Integrates from the unit vector at `n0` to time `t`, returning the
/// distribution along with drift and step counts.
pub fn integrate_detailed(
    params: &SystemParams,
    n0: usize,
    t: f64,
    config: &OracleConfig,
) -> Result<OracleSolution> {
    params.check_state(n0)?;
    check_time(t)?;
    config.validate()?;
    let mut y = unit_vector(params.states(), n0);
    let mut drift = 0.0;
    let mut renormalized = false;
    let mut integrator = Integrator::new(params, *config);
    let exhausted = || Error::StepLimit {
        max_steps: config.max_steps,
        lambda0: params.lambda0(),
        alpha: params.alpha(),
        m: params.m(),
        t,
    };
    if t > 0.0 {
        let windowed = params.m() as f64 * t / params.alpha() > WINDOW_THRESHOLD;
        if windowed {
            let window = params.alpha();
            let mut done = 0.0;
            while done < t {
                let span = window.min(t - done);
                if !integrator.advance(&mut y, span) {
                    return Err(exhausted());
                }
                done = if t - done <= window { t } else { done + window };
                renormalized |= renormalize(&mut y, &mut drift);
            }
        } else {
            if !integrator.advance(&mut y, t) {
                return Err(exhausted());
            }
            renormalized |= renormalize(&mut y, &mut drift);
        }
    }
    Ok(OracleSolution {
        distribution: TransientDistribution {
            t,
            n0,
            probabilities: y,
            method: Method::Oracle,
            error_bound: None,
        },
        drift,
        renormalized,
        steps: integrator.steps,
    })
}

/// Distribution of `N(t)` given `N(0) = n0`.
pub fn integrate(
    params: &SystemParams,
    n0: usize,
    t: f64,
    config: &OracleConfig,
) -> Result<TransientDistribution> {
    integrate_detailed(params, n0, t, config).map(|s| s.distribution)
}

/// Full transition matrix, one integration per initial state.
pub fn integrate_matrix(
    params: &SystemParams,
    t: f64,
    config: &OracleConfig,
) -> Result<TransitionMatrix> {
    let states = params.states();
    let mut matrix = Matrix::zeros(states);
    for i in 0..states {
        let row = integrate(params, i, t, config)?;
        for (j, p) in row.probabilities.iter().enumerate() {
            matrix[(i, j)] = *p;
        }
    }
    Ok(TransitionMatrix::new(t, matrix))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::stationary;

    fn params(l: f64, a: f64, m: usize) -> SystemParams {
        SystemParams::new(l, a, m).unwrap()
    }

    #[test]
    fn experiment_d_case_three() {
        let d = integrate(&params(0.9, 10.0, 1), 0, 2.5, &OracleConfig::default()).unwrap();
        assert!((d.probabilities[0] - 0.173876).abs() < 1e-6);
    }

    #[test]
    fn time_zero_is_unit_vector() {
        let d = integrate(&params(3.0, 0.5, 6), 4, 0.0, &OracleConfig::default()).unwrap();
        assert_eq!(d.probabilities, unit_vector(7, 4));
        let m = integrate_matrix(&params(3.0, 0.5, 6), 0.0, &OracleConfig::default()).unwrap();
        assert_eq!(m.matrix(), &Matrix::identity(7));
    }

    #[test]
    fn rows_conserve_mass() {
        let m = integrate_matrix(&params(2.0, 1.0, 10), 1.0, &OracleConfig::default()).unwrap();
        for s in m.row_sums() {
            assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn drift_stays_within_tolerance() {
        let cfg = OracleConfig::default();
        let s = integrate_detailed(&params(5.0, 0.3, 20), 3, 4.0, &cfg).unwrap();
        assert!(s.drift <= 10.0 * cfg.rel_tol, "drift {}", s.drift);
        assert!(s
            .distribution
            .probabilities
            .iter()
            .all(|p| *p >= -10.0 * cfg.abs_tol));
    }

    #[test]
    fn reaches_equilibrium() {
        let p = params(0.8, 2.0, 6);
        let t = 50.0 * p.alpha().max(1.0 / p.lambda0());
        let d = integrate(&p, 0, t, &OracleConfig::default()).unwrap();
        let s = stationary(&p);
        for (a, b) in d.probabilities.iter().zip(s.probabilities()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn windowed_long_horizon() {
        let p = params(30.0, 1.0, 40);
        let d = integrate(&p, 0, 40.0, &OracleConfig::default()).unwrap();
        let s = stationary(&p);
        for (a, b) in d.probabilities.iter().zip(s.probabilities()) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn step_exhaustion_is_reported() {
        let cfg = OracleConfig {
            max_steps: 3,
            ..OracleConfig::default()
        };
        let err = integrate(&params(2.0, 1.0, 10), 0, 5.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::StepLimit { m: 10, .. }));
    }

    #[test]
    fn rejects_bad_inputs() {
        let p = params(1.0, 1.0, 3);
        assert!(integrate(&p, 4, 1.0, &OracleConfig::default()).is_err());
        assert!(integrate(&p, 0, -1.0, &OracleConfig::default()).is_err());
        let cfg = OracleConfig {
            rel_tol: 0.0,
            ..OracleConfig::default()
        };
        assert!(integrate(&p, 0, 1.0, &cfg).is_err());
    }
}
