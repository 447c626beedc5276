//! Truncated Taylor series of `exp(tA)` with a-priori error bounds.
//!
//! Keeping `F + 1` terms leaves a remainder whose column norm is at most
//! `z^F / F! * (F + 1) / (F + 1 - z)` with `z = 2t(lambda0 + m/alpha)`,
//! provided `F >= floor(z) + 1`. The bound holds for every entry of the
//! transition matrix because the initial vector has unit norm.

use alloc::vec::Vec;
use core::fmt;

use crate::matrix::Matrix;
use crate::model::{
    build_generator, check_time, unit_vector, Method, SystemParams, TransientDistribution,
    TransitionMatrix,
};
use crate::special::ln_factorial;
use crate::{Error, Result};

/// Algebraically equivalent ways of writing the bound argument `z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundForm {
    /// `2t(lambda0 + m/alpha)`.
    Rates,
    /// `(2t/alpha)(rho0 + m)`.
    OfferedLoad,
    /// `(2t/alpha) m (rho + 1)`.
    PerServerLoad,
}

impl BoundForm {
    pub const ALL: [BoundForm; 3] = [
        BoundForm::Rates,
        BoundForm::OfferedLoad,
        BoundForm::PerServerLoad,
    ];

    /// The bound argument `z` in this form.
    pub fn argument(&self, params: &SystemParams, t: f64) -> f64 {
        let m = params.m() as f64;
        match self {
            BoundForm::Rates => 2.0 * t * (params.lambda0() + m / params.alpha()),
            BoundForm::OfferedLoad => 2.0 * t / params.alpha() * (params.rho0() + m),
            BoundForm::PerServerLoad => 2.0 * t / params.alpha() * m * (params.rho() + 1.0),
        }
    }
}

impl fmt::Display for BoundForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundForm::Rates => "rates",
            BoundForm::OfferedLoad => "offered-load",
            BoundForm::PerServerLoad => "per-server-load",
        })
    }
}

/// Chosen truncation order with its bound and operation counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationReport {
    pub order: usize,
    pub error_bound: f64,
    /// Multiplications, `(F-1)(m+1)^3 + (m+1)^2 + F^2`.
    pub phi: u64,
    /// Additions, `(F-1)(m+1)^3 + m(m-1)`.
    pub theta: u64,
    pub form: BoundForm,
}

/// Smallest order for which the bound is defined: `floor(z) + 1`.
pub fn minimum_order(z: f64) -> usize {
    libm::floor(z) as usize + 1
}

/// Remainder bound after `order + 1` terms, or `None` when `order` is below
/// the validity threshold.
pub fn error_bound(params: &SystemParams, t: f64, order: usize, form: BoundForm) -> Option<f64> {
    let z = form.argument(params, t);
    bound_from_argument(z, order)
}

fn bound_from_argument(z: f64, order: usize) -> Option<f64> {
    if order < minimum_order(z) {
        return None;
    }
    if z == 0.0 {
        return Some(0.0);
    }
    let f = order as f64;
    let ln = f * libm::log(z) - ln_factorial(order) + libm::log(f + 1.0) - libm::log(f + 1.0 - z);
    Some(libm::exp(ln))
}

/// Exact operation counts `(phi, theta)` for an order-`order` expansion.
pub fn op_counts(order: usize, m: usize) -> (u64, u64) {
    assert!(
        order >= 1 && m >= 1,
        "operation counts need F >= 1 and m >= 1"
    );
    let f = order as u64;
    let m = m as u64;
    let cube = (m + 1).pow(3);
    let phi = (f - 1) * cube + (m + 1).pow(2) + f * f;
    let theta = (f - 1) * cube + m * (m - 1);
    (phi, theta)
}

/// Default ceiling on the truncation order.
pub const DEFAULT_ORDER_CAP: usize = 1_000_000;

/// First order whose bound is defined and at most `tol`.
pub fn choose_truncation(params: &SystemParams, t: f64, tol: f64) -> Result<TruncationReport> {
    choose_truncation_capped(params, t, tol, DEFAULT_ORDER_CAP)
}

pub fn choose_truncation_capped(
    params: &SystemParams,
    t: f64,
    tol: f64,
    cap: usize,
) -> Result<TruncationReport> {
    check_time(t)?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            requirement: "finite and > 0",
        });
    }
    let form = BoundForm::Rates;
    let z = form.argument(params, t);
    let mut order = minimum_order(z);
    loop {
        if order > cap {
            return Err(Error::TruncationCap { cap, tol });
        }
        // Defined for every order from the minimum on.
        let bound = bound_from_argument(z, order).unwrap_or(f64::INFINITY);
        if bound <= tol {
            let (phi, theta) = op_counts(order, params.m());
            return Ok(TruncationReport {
                order,
                error_bound: bound,
                phi,
                theta,
                form,
            });
        }
        order += 1;
    }
}

/// Truncated expansion together with its bound (absent when the order is
/// too low for the bound to apply).
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    pub transition: TransitionMatrix,
    pub order: usize,
    pub error_bound: Option<f64>,
}

impl TruncatedSeries {
    pub fn bound_available(&self) -> bool {
        self.error_bound.is_some()
    }
}

// term <- term * A for tridiagonal A, touching only the band.
fn times_generator(term: &Matrix, a: &Matrix, factor: f64) -> Matrix {
    let n = term.dim();
    let mut out = Matrix::zeros(n);
    for i in 0..n {
        let row = term.row(i);
        for k in 0..n {
            let lo = k.saturating_sub(1);
            let hi = (k + 1).min(n - 1);
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += row[j] * a[(j, k)];
            }
            out[(i, k)] = acc * factor;
        }
    }
    out
}

fn check_order(order: i64) -> Result<usize> {
    usize::try_from(order).map_err(|_| Error::InvalidParameter {
        name: "F",
        value: order as f64,
        requirement: ">= 0",
    })
}

/// `sum_{j=0}^{F} (t^j / j!) A^j`, returned as a transition matrix.
///
/// The running term is multiplied by `(t/j) A` at step `j`; no factorial or
/// separate matrix power is formed. Rows may miss unit mass by up to the
/// bound.
pub fn truncated_expm(params: &SystemParams, t: f64, order: usize) -> Result<TruncatedSeries> {
    check_time(t)?;
    let a = build_generator(params, false).into_matrix();
    let n = params.states();
    let mut term = Matrix::identity(n);
    let mut sum = Matrix::identity(n);
    for j in 1..=order {
        term = times_generator(&term, &a, t / j as f64);
        sum = sum.add(&term);
    }
    Ok(TruncatedSeries {
        transition: TransitionMatrix::from_propagator(t, &sum),
        order,
        error_bound: error_bound(params, t, order, BoundForm::Rates),
    })
}

/// Signed-order entry point for callers that take the order from user input.
pub fn truncated_expm_checked(
    params: &SystemParams,
    t: f64,
    order: i64,
) -> Result<TruncatedSeries> {
    truncated_expm(params, t, check_order(order)?)
}

/// One row of the truncated expansion, computed with matrix–vector products.
pub fn truncated_distribution(
    params: &SystemParams,
    n0: usize,
    t: f64,
    order: usize,
) -> Result<TransientDistribution> {
    params.check_state(n0)?;
    check_time(t)?;
    let a = build_generator(params, false).into_matrix();
    let mut term = unit_vector(params.states(), n0);
    let mut sum = term.clone();
    for j in 1..=order {
        let factor = t / j as f64;
        term = a
            .mul_vec(&term)
            .into_iter()
            .map(|v| v * factor)
            .collect::<Vec<_>>();
        for (s, v) in sum.iter_mut().zip(&term) {
            *s += v;
        }
    }
    Ok(TransientDistribution {
        t,
        n0,
        probabilities: sum,
        method: Method::Series,
        error_bound: error_bound(params, t, order, BoundForm::Rates),
    })
}

/// Replaces negative entries by zero.
pub fn clamp_negative(probabilities: &mut [f64]) {
    for p in probabilities.iter_mut() {
        if *p < 0.0 {
            *p = 0.0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::exact_m1;

    fn params(l: f64, a: f64, m: usize) -> SystemParams {
        SystemParams::new(l, a, m).unwrap()
    }

    #[test]
    fn op_count_examples() {
        assert_eq!(op_counts(11, 10), (13552, 13400));
        assert_eq!(op_counts(16, 10), (20342, 20055));
        assert_eq!(op_counts(70, 20), (644350, 639389));
    }

    #[test]
    fn bound_examples() {
        let b = error_bound(&params(2.0, 1.0, 10), 0.1, 11, BoundForm::Rates).unwrap();
        assert!((b - 4.77e-4).abs() < 5e-6, "{b}");
        let b = error_bound(&params(10.0, 1.0, 10), 0.1, 16, BoundForm::Rates).unwrap();
        assert!((b - 2.7e-4).abs() < 5e-6, "{b}");
    }

    #[test]
    fn bound_invalid_below_threshold() {
        let p = params(2.0, 1.0, 10);
        // z = 2.4, threshold 3
        assert_eq!(error_bound(&p, 0.1, 2, BoundForm::Rates), None);
        assert!(error_bound(&p, 0.1, 3, BoundForm::Rates).is_some());
        assert_eq!(error_bound(&p, 0.0, 0, BoundForm::Rates), None);
        assert_eq!(error_bound(&p, 0.0, 1, BoundForm::Rates), Some(0.0));
    }

    #[test]
    fn bound_survives_large_orders() {
        let b = error_bound(&params(2.0, 1.0, 10), 2.4, 161, BoundForm::Rates).unwrap();
        assert!(b.is_finite() && b > 0.0 && b < 1e-3);
    }

    #[test]
    fn choose_examples() {
        let r = choose_truncation(&params(2.0, 1.0, 10), 0.1, 1e-3).unwrap();
        assert_eq!((r.order, r.phi, r.theta), (11, 13552, 13400));
        assert_eq!(
            choose_truncation(&params(2.0, 1.0, 10), 2.4, 1e-3)
                .unwrap()
                .order,
            161
        );
        let r = choose_truncation(&params(0.1, 1.0, 20), 0.1, 1e-3).unwrap();
        assert_eq!((r.order, r.phi, r.theta), (16, 139612, 139295));
    }

    #[test]
    fn choose_respects_cap_and_tol() {
        let p = params(2.0, 1.0, 10);
        assert!(matches!(
            choose_truncation_capped(&p, 2.4, 1e-3, 100),
            Err(Error::TruncationCap { cap: 100, .. })
        ));
        assert!(choose_truncation(&p, 1.0, 0.0).is_err());
        assert!(choose_truncation(&p, -1.0, 1e-3).is_err());
    }

    #[test]
    fn order_zero_is_identity() {
        let s = truncated_expm(&params(3.0, 0.5, 4), 7.0, 0).unwrap();
        assert_eq!(s.transition.matrix(), &Matrix::identity(5));
        assert!(!s.bound_available());
        assert!(truncated_expm_checked(&params(3.0, 0.5, 4), 1.0, -1).is_err());
    }

    #[test]
    fn matches_two_state_closed_form() {
        let p = params(0.4, 10.0, 1);
        let s = truncated_expm(&p, 0.5, 10).unwrap();
        let e = exact_m1(&p, 0.5).unwrap();
        assert!(s.transition.max_abs_diff(&e) < 5e-7);
        assert!((s.transition.get(0, 0) - 0.823041).abs() < 5e-7);
    }

    #[test]
    fn row_form_matches_matrix_form() {
        let p = params(1.5, 0.8, 6);
        let s = truncated_expm(&p, 0.7, 25).unwrap();
        for n0 in 0..=6 {
            let d = truncated_distribution(&p, n0, 0.7, 25).unwrap();
            for (j, v) in d.probabilities.iter().enumerate() {
                assert!((v - s.transition.get(n0, j)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn clamping() {
        let mut v = [0.5, -1e-9, 0.5];
        clamp_negative(&mut v);
        assert_eq!(v, [0.5, 0.0, 0.5]);
    }
}
