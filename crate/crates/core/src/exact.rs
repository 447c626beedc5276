//! Closed-form transition matrices for one and two servers.
//!
//! For `m = 2` the generator's non-zero eigenvalues are the roots of
//! `x^2 + (2 lambda0 + 3 mu) x + (lambda0^2 + 2 lambda0 mu + 2 mu^2)`, with
//! discriminant `mu^2 + 4 lambda0 mu > 0`. `exp(tA)` is then the sum of the
//! three spectral projectors weighted by `exp(t x_k)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::matrix::Matrix;
use crate::model::{build_generator, check_time, stationary, SystemParams, TransitionMatrix};
use crate::oracle::{integrate_matrix, OracleConfig};
use crate::{Error, Result};

/// Eigenvalues and spectral projectors of a generator.
///
/// Projectors act on column vectors like the generator does, so
/// `exp(tA) = sum_k exp(t * eigenvalues[k]) * modes[k]` and the columns of
/// `modes[0]` are the stationary distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    /// `[0, slow, fast]`: zero first, then the non-zero roots in decreasing order.
    pub eigenvalues: Vec<f64>,
    pub modes: Vec<Matrix>,
}

impl SpectralDecomposition {
    /// `exp(tA)` in the column (propagator) layout.
    pub fn propagator(&self, t: f64) -> Matrix {
        let dim = self.modes[0].dim();
        self.eigenvalues
            .iter()
            .zip(&self.modes)
            .fold(Matrix::zeros(dim), |acc, (x, mode)| {
                acc.add(&mode.scaled(libm::exp(t * x)))
            })
    }
}

// Roots closer than this are treated as a repeated eigenvalue.
const DEGENERATE_GAP: f64 = 1e-12;

// exp(t x) below this for every non-zero eigenvalue means the transient part
// has vanished.
const UNDERFLOW: f64 = 1e-300;

fn require_servers(params: &SystemParams, m: usize) -> Result<()> {
    if params.m() == m {
        Ok(())
    } else {
        Err(Error::ServerCount {
            expected: m,
            found: params.m(),
        })
    }
}

/// Two-state closed form with decay rate `lambda0 + 1/alpha`.
pub fn exact_m1(params: &SystemParams, t: f64) -> Result<TransitionMatrix> {
    require_servers(params, 1)?;
    check_time(t)?;
    let rho0 = params.rho0();
    let decay = libm::exp(-(params.lambda0() + params.mu()) * t);
    let busy = rho0 / (1.0 + rho0);
    let idle = 1.0 / (1.0 + rho0);
    let p00 = busy * decay + idle;
    let p01 = -busy * decay + busy;
    let p10 = -idle * decay + idle;
    let p11 = idle * decay + busy;
    Ok(TransitionMatrix::new(
        t,
        Matrix::from_rows(&[&[p00, p01], &[p10, p11]]),
    ))
}

/// Eigen-decomposition of the three-state generator.
///
/// Returns `None` when the two non-zero roots are closer than `1e-12`.
fn decompose_m2(params: &SystemParams) -> Option<SpectralDecomposition> {
    let l = params.lambda0();
    let mu = params.mu();
    let trace = 2.0 * l + 3.0 * mu;
    let product = l * l + 2.0 * l * mu + 2.0 * mu * mu;
    let root = libm::sqrt(mu * mu + 4.0 * l * mu);
    if root < DEGENERATE_GAP {
        return None;
    }
    let fast = -(trace + root) / 2.0;
    // Vieta keeps the slow root free of cancellation.
    let slow = product / fast;

    let a = build_generator(params, false).into_matrix();
    let id = Matrix::identity(3);
    let a_minus = |x: f64| a.sub(&id.scaled(x));
    let mode0 = a_minus(slow)
        .mul(&a_minus(fast))
        .scaled(1.0 / (slow * fast));
    let mode_slow = a.mul(&a_minus(fast)).scaled(1.0 / (slow * (slow - fast)));
    let mode_fast = a.mul(&a_minus(slow)).scaled(1.0 / (fast * (fast - slow)));
    Some(SpectralDecomposition {
        eigenvalues: vec![0.0, slow, fast],
        modes: vec![mode0, mode_slow, mode_fast],
    })
}

/// Spectral data of the `m = 2` generator.
pub fn spectral_decompose_m2(params: &SystemParams) -> Result<SpectralDecomposition> {
    require_servers(params, 2)?;
    decompose_m2(params).ok_or(Error::InvalidParameter {
        name: "mu",
        value: params.mu(),
        requirement: "large enough that the non-zero eigenvalues are distinct",
    })
}

/// Three-state transition matrix from the spectral decomposition.
///
/// Falls back to the ODE reference when the eigenvalues coincide.
pub fn exact_m2(params: &SystemParams, t: f64) -> Result<TransitionMatrix> {
    require_servers(params, 2)?;
    check_time(t)?;
    let Some(spectral) = decompose_m2(params) else {
        let config = OracleConfig {
            rel_tol: 1e-12,
            abs_tol: 1e-14,
            ..OracleConfig::default()
        };
        return integrate_matrix(params, t, &config);
    };
    if t == 0.0 {
        return Ok(TransitionMatrix::identity(3));
    }
    let vanished = spectral.eigenvalues[1..]
        .iter()
        .all(|x| libm::exp(t * x) < UNDERFLOW);
    if vanished {
        return Ok(TransitionMatrix::repeated_row(
            t,
            stationary(params).probabilities(),
        ));
    }
    Ok(TransitionMatrix::from_propagator(
        t,
        &spectral.propagator(t),
    ))
}

/// Dispatches to [`exact_m1`] or [`exact_m2`].
pub fn exact(params: &SystemParams, t: f64) -> Result<TransitionMatrix> {
    match params.m() {
        1 => exact_m1(params, t),
        2 => exact_m2(params, t),
        found => Err(Error::ServerCount { expected: 2, found }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(l: f64, a: f64, m: usize) -> SystemParams {
        SystemParams::new(l, a, m).unwrap()
    }

    fn assert_close(got: f64, want: f64, tol: f64) {
        assert!((got - want).abs() <= tol, "got {got}, want {want}");
    }

    #[test]
    fn m1_experiment_d_values() {
        let p = exact_m1(&params(0.4, 10.0, 1), 0.5).unwrap();
        assert_close(p.get(0, 0), 0.823041, 5e-7);
        assert_close(p.get(0, 1), 0.176959, 5e-7);
        assert_close(p.get(1, 0), 0.044240, 5e-7);
        assert_close(p.get(1, 1), 0.955760, 5e-7);
        let p = exact_m1(&params(0.9, 10.0, 1), 0.5).unwrap();
        assert_close(p.get(0, 0), 0.645878, 5e-7);
    }

    #[test]
    fn identity_at_zero() {
        assert_eq!(
            exact_m1(&params(1.3, 0.2, 1), 0.0).unwrap().matrix(),
            &Matrix::identity(2)
        );
        assert_eq!(
            exact_m2(&params(1.3, 0.2, 2), 0.0).unwrap().matrix(),
            &Matrix::identity(3)
        );
    }

    #[test]
    fn wrong_server_count() {
        assert_eq!(
            exact_m1(&params(1.0, 1.0, 2), 1.0).unwrap_err(),
            Error::ServerCount {
                expected: 1,
                found: 2
            }
        );
        assert!(exact_m2(&params(1.0, 1.0, 1), 1.0).is_err());
        assert!(spectral_decompose_m2(&params(1.0, 1.0, 3)).is_err());
        assert!(exact(&params(1.0, 1.0, 3), 1.0).is_err());
    }

    #[test]
    fn m2_eigenvalues() {
        let s = spectral_decompose_m2(&params(0.4, 10.0, 2)).unwrap();
        assert_eq!(s.eigenvalues[0], 0.0);
        assert_close(s.eigenvalues[1], -0.343845, 5e-7);
        assert_close(s.eigenvalues[2], -0.756155, 5e-7);
        let sum: f64 = s.eigenvalues.iter().sum();
        assert_close(sum, -1.1, 1e-12);
        let total = s.modes.iter().fold(Matrix::zeros(3), |acc, m| acc.add(m));
        assert!(total.max_abs_diff(&Matrix::identity(3)) < 1e-10);
    }

    #[test]
    fn m2_mode_zero_is_stationary() {
        let p = params(0.4, 10.0, 2);
        let s = spectral_decompose_m2(&p).unwrap();
        let pi = stationary(&p);
        for j in 0..3 {
            for (i, want) in pi.probabilities().iter().enumerate() {
                assert_close(s.modes[0][(i, j)], *want, 1e-12);
            }
        }
    }

    #[test]
    fn m2_long_run_is_stationary() {
        let p = exact_m2(&params(0.4, 10.0, 2), 1e6).unwrap();
        for i in 0..3 {
            assert_close(p.get(i, 0), 1.0 / 13.0, 1e-9);
            assert_close(p.get(i, 1), 4.0 / 13.0, 1e-9);
            assert_close(p.get(i, 2), 8.0 / 13.0, 1e-9);
        }
    }

    #[test]
    fn m2_rows_sum_to_one() {
        let p = exact_m2(&params(2.5, 0.7, 2), 1.7).unwrap();
        for s in p.row_sums() {
            assert_close(s, 1.0, 1e-12);
        }
    }

    #[test]
    fn m2_degenerate_roots_fall_back() {
        let p = params(1e-13, 1e13, 2);
        assert!(spectral_decompose_m2(&p).is_err());
        let m = exact_m2(&p, 1.0).unwrap();
        assert!(m.max_abs_diff(&TransitionMatrix::identity(3)) < 1e-9);
    }
}
