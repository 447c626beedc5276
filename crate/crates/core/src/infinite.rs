//! M|M|∞ transient probabilities and their use as M|M|m|m approximations.

use alloc::vec::Vec;

use crate::asymptotics::{classify_regime, stirling_factor, RegimeTag, RegimeThresholds};
use crate::model::{check_time, SystemParams};
use crate::special::{one_minus_exp_neg, poisson_pmf};
use crate::{Error, Result};

/// Below `SMALL_TIME * alpha` the `n0 = 1` formula is replaced by its limit.
pub const SMALL_TIME: f64 = 1e-12;

// Vector queries stop once past mean + TAIL_SIGMAS sd and the mass is below
// TAIL_MASS.
const TAIL_SIGMAS: f64 = 12.0;
const TAIL_MASS: f64 = 1e-18;

fn mean_busy(params: &SystemParams, t: f64) -> f64 {
    params.rho0() * one_minus_exp_neg(t / params.alpha())
}

/// `P[N(t) = n | N(0) = 0]` for infinitely many servers: Poisson with mean
/// `rho0 (1 - exp(-t/alpha))`. The server count in `params` is ignored.
pub fn p0n_inf(params: &SystemParams, n: usize, t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(poisson_pmf(mean_busy(params, t), n))
}

/// `P[N(t) = n | N(0) = 1]` for infinitely many servers.
///
/// The bracket `1 - exp(-t/alpha) + n / (rho0 (exp(t/alpha) - 1))` multiplies
/// the `n0 = 0` probability. `t = 0` is rejected; `0 < t < 1e-12 alpha`
/// returns the limiting unit mass at `n = 1`.
pub fn p1n_inf(params: &SystemParams, n: usize, t: f64) -> Result<f64> {
    check_time(t)?;
    if t == 0.0 {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            requirement: "> 0 (formula divides by exp(t/alpha) - 1)",
        });
    }
    let alpha = params.alpha();
    if t < SMALL_TIME * alpha {
        return Ok(if n == 1 { 1.0 } else { 0.0 });
    }
    let beta = one_minus_exp_neg(t / alpha);
    let bracket = beta + n as f64 / (params.rho0() * libm::expm1(t / alpha));
    Ok(bracket * poisson_pmf(params.rho0() * beta, n))
}

fn support_end(mean: f64) -> usize {
    libm::ceil(mean + TAIL_SIGMAS * libm::sqrt(mean)) as usize + 1
}

fn collect(mean: f64, mut f: impl FnMut(usize) -> Result<f64>) -> Result<Vec<f64>> {
    let end = support_end(mean);
    let mut out = Vec::with_capacity(end + 1);
    let mut n = 0;
    loop {
        let v = f(n)?;
        out.push(v);
        if n >= end && v < TAIL_MASS {
            break;
        }
        n += 1;
    }
    Ok(out)
}

/// [`p0n_inf`] over `n = 0, 1, ...` until the tail is negligible.
pub fn p0n_inf_vector(params: &SystemParams, t: f64) -> Result<Vec<f64>> {
    check_time(t)?;
    collect(mean_busy(params, t), |n| p0n_inf(params, n, t))
}

/// [`p1n_inf`] over `n = 0, 1, ...` until the tail is negligible.
pub fn p1n_inf_vector(params: &SystemParams, t: f64) -> Result<Vec<f64>> {
    check_time(t)?;
    collect(mean_busy(params, t), |n| p1n_inf(params, n, t))
}

/// Approximation of an M|M|m|m probability through the M|M|∞ one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfiniteServerApproximation {
    pub value: f64,
    /// Multiplier applied to the M|M|∞ probability.
    pub factor: f64,
    pub regime: RegimeTag,
}

/// Maps `P[N(t) = n | N(0) = n0]` of the loss system onto M|M|∞.
///
/// Bulk states use the Stirling factor of `n`; small states use the M|M|∞
/// value as is; for `n = m` the factor is the upper bound
/// `m! / (sqrt(2 pi m) (m/e)^m)`, so the value is an upper envelope. The
/// near-full and `R2C` cases have no such map and are rejected.
pub fn approx_mmm_via_inf(
    params: &SystemParams,
    n: usize,
    t: f64,
    n0: usize,
) -> Result<InfiniteServerApproximation> {
    approx_mmm_via_inf_with(params, n, t, n0, &RegimeThresholds::default())
}

pub fn approx_mmm_via_inf_with(
    params: &SystemParams,
    n: usize,
    t: f64,
    n0: usize,
    thresholds: &RegimeThresholds,
) -> Result<InfiniteServerApproximation> {
    check_time(t)?;
    if params.rho() >= 1.0 {
        return Err(Error::LoadNotBelowOne { rho: params.rho() });
    }
    let regime = classify_regime(params, n, t, n0, thresholds)?;
    let base = |n: usize| {
        if n0 == 0 {
            p0n_inf(params, n, t)
        } else {
            p1n_inf(params, n, t)
        }
    };
    let factor = match regime {
        RegimeTag::R1B | RegimeTag::R2B => stirling_factor(n)?,
        RegimeTag::R1A | RegimeTag::R1C | RegimeTag::R2A | RegimeTag::R2D => 1.0,
        RegimeTag::Block0 | RegimeTag::Block1 => stirling_factor(params.m())?,
        RegimeTag::R1D | RegimeTag::R2C | RegimeTag::R2E => {
            return Err(Error::Inapplicable {
                regime,
                reason: "no M|M|inf correspondence for this case",
            })
        }
    };
    Ok(InfiniteServerApproximation {
        value: factor * base(n)?,
        factor,
        regime,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::{knessl_p0, knessl_p1};

    fn params(l: f64, a: f64, m: usize) -> SystemParams {
        SystemParams::new(l, a, m).unwrap()
    }

    #[test]
    fn p0_examples() {
        let p = params(4.0, 1.0, 10);
        let v = p0n_inf(&p, 4, 100.0).unwrap();
        assert!((v - 0.195_366_814_813_165_2).abs() < 1e-12);
        assert_eq!(p0n_inf(&p, 0, 0.0).unwrap(), 1.0);
        assert_eq!(p0n_inf(&p, 3, 0.0).unwrap(), 0.0);
        let v = p0n_inf(&p, 0, 1.0).unwrap();
        let want = (-4.0 * (1.0 - (-1.0f64).exp())).exp();
        assert!((v - want).abs() < 1e-15);
        assert!((v - 0.079780).abs() < 5e-7);
    }

    #[test]
    fn p1_small_time_and_zero() {
        let p = params(4.0, 1.0, 10);
        assert!(p1n_inf(&p, 1, 0.0).is_err());
        assert_eq!(p1n_inf(&p, 1, 1e-13).unwrap(), 1.0);
        assert_eq!(p1n_inf(&p, 0, 1e-13).unwrap(), 0.0);
        let near = p1n_inf(&p, 1, 1e-9).unwrap();
        assert!((near - 1.0).abs() < 1e-8);
    }

    #[test]
    fn vectors_normalise() {
        let p = params(4.0, 1.0, 10);
        let s0: f64 = p0n_inf_vector(&p, 1.0).unwrap().iter().sum();
        let s1: f64 = p1n_inf_vector(&p, 1.0).unwrap().iter().sum();
        assert!((s0 - 1.0).abs() < 1e-12);
        assert!((s1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn p1_long_run_is_poisson() {
        let p = params(4.0, 1.0, 10);
        for n in 0..20 {
            let a = p1n_inf(&p, n, 100.0).unwrap();
            assert!((a - poisson_pmf(4.0, n)).abs() < 1e-10);
        }
    }

    #[test]
    fn maps_by_regime() {
        let p = params(25.0, 1.0, 50);
        let bulk = approx_mmm_via_inf(&p, 25, 1.0, 0).unwrap();
        assert_eq!(bulk.regime, RegimeTag::R1B);
        let r1b = knessl_p0(&p, 25, 1.0, RegimeTag::R1B).unwrap();
        assert!((bulk.value - r1b).abs() / r1b < 1e-12);
        let bulk1 = approx_mmm_via_inf(&p, 25, 1.0, 1).unwrap();
        let r2b = knessl_p1(&p, 25, 1.0, RegimeTag::R2B).unwrap();
        assert!((bulk1.value - r2b).abs() / r2b < 1e-12);

        let small = approx_mmm_via_inf(&p, 2, 1.0, 0).unwrap();
        assert_eq!(small.regime, RegimeTag::R1C);
        assert_eq!(small.factor, 1.0);
        assert_eq!(small.value, p0n_inf(&p, 2, 1.0).unwrap());

        let block = approx_mmm_via_inf(&p, 50, 1.0, 0).unwrap();
        assert_eq!(block.regime, RegimeTag::Block0);
        assert_eq!(block.factor, stirling_factor(50).unwrap());

        assert!(approx_mmm_via_inf(&p, 47, 1.0, 0).is_err());
        assert!(approx_mmm_via_inf(&p, 2, 0.3, 1).is_err());
        assert!(approx_mmm_via_inf(&params(60.0, 1.0, 50), 25, 1.0, 0).is_err());
    }
}
