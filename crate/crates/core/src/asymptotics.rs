//! Large-`m` approximations of the transient probabilities.
//!
//! Formulas assume `rho = rho0/m < 1` and `lambda0 = O(m)` and are pointwise
//! approximations: they are not normalised over `n`. Everything involving
//! `(e/m)^m rho0^m` is assembled in log space.
//!
//! Writing `beta = 1 - exp(-t/alpha)`, the cases for initial occupancy 0 are
//!
//! * `R1A` (`n = O(1)`, `t = O(1/m)`): Poisson pmf with mean `lambda0 t`.
//! * `R1B` (bulk): `exp[n ln(rho0 beta / n) + n - rho0 beta] / sqrt(2 pi n)`.
//! * `R1C` (`n = O(1)`, `t = O(1)`): Poisson pmf with mean `rho0 beta`.
//! * `R1D` (`m - n = l = O(1)`): the near-full expansion, `l = 0` giving the
//!   blocking probability.
//!
//! and for initial occupancy 1 they are `R2A` to `R2E`.
//!
//! Three of the published expressions are inconsistent with limits stated
//! alongside them and are corrected by default; [`FormulaVariant::AsPrinted`]
//! evaluates them verbatim:
//!
//! * `R1C` has a stray `exp(1)` factor; without it the case equals the M|M|∞
//!   probability, as the comparison theorems require.
//! * `R1D` and the `n0 = 0` blocking formula carry `ln(rho beta)` outside the
//!   `1/epsilon` factor; inside it the large-`t` limit reproduces the Erlang
//!   loss formula.
//! * `R1D` raises `rho beta` to the power `-1` where `-l` is needed for
//!   `l = 0` to reduce to the blocking formula.

use core::fmt;

use crate::model::SystemParams;
use crate::special::{
    ln_factorial, ln_poisson_pmf, ln_stirling_remainder, one_minus_exp_neg, poisson_pmf,
};
use crate::{Error, Result};

/// Which asymptotic case a query falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeTag {
    R1A,
    R1B,
    R1C,
    R1D,
    R2A,
    R2B,
    R2C,
    R2D,
    R2E,
    Block0,
    Block1,
}

impl RegimeTag {
    pub const ALL: [RegimeTag; 11] = [
        RegimeTag::R1A,
        RegimeTag::R1B,
        RegimeTag::R1C,
        RegimeTag::R1D,
        RegimeTag::R2A,
        RegimeTag::R2B,
        RegimeTag::R2C,
        RegimeTag::R2D,
        RegimeTag::R2E,
        RegimeTag::Block0,
        RegimeTag::Block1,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeTag::R1A => "R1A",
            RegimeTag::R1B => "R1B",
            RegimeTag::R1C => "R1C",
            RegimeTag::R1D => "R1D",
            RegimeTag::R2A => "R2A",
            RegimeTag::R2B => "R2B",
            RegimeTag::R2C => "R2C",
            RegimeTag::R2D => "R2D",
            RegimeTag::R2E => "R2E",
            RegimeTag::Block0 => "BLOCK0",
            RegimeTag::Block1 => "BLOCK1",
        }
    }

    /// Initial occupancy the case is stated for.
    pub fn initial_state(&self) -> usize {
        match self {
            RegimeTag::R1A
            | RegimeTag::R1B
            | RegimeTag::R1C
            | RegimeTag::R1D
            | RegimeTag::Block0 => 0,
            _ => 1,
        }
    }

    pub fn parse(s: &str) -> Option<RegimeTag> {
        let upper = s.trim().to_ascii_uppercase();
        RegimeTag::ALL.into_iter().find(|r| r.as_str() == upper)
    }
}

impl fmt::Display for RegimeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Selects corrected or verbatim published formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormulaVariant {
    #[default]
    Corrected,
    AsPrinted,
}

/// Dimensionless coordinates of a query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledState {
    /// Occupancy fraction `n/m`.
    pub x: f64,
    /// Stretched time `m t`.
    pub tau: f64,
    /// `1 - exp(-t/alpha)`.
    pub beta: f64,
}

impl ScaledState {
    pub fn new(params: &SystemParams, n: usize, t: f64) -> Result<Self> {
        params.check_state(n)?;
        check_time(t)?;
        Ok(ScaledState {
            x: n as f64 * params.epsilon(),
            tau: t * params.m() as f64,
            beta: one_minus_exp_neg(t / params.alpha()),
        })
    }
}

fn check_time(t: f64) -> Result<()> {
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

/// Thresholds turning order-of-magnitude case domains into a classifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeThresholds {
    /// `n <= small` (or `m - n <= small`) counts as `O(1)`.
    pub small: usize,
    /// `t m <= stretched_time` selects the `t = O(1/m)` cases.
    pub stretched_time: f64,
    /// `t sqrt(m) <= half_time` selects `R2C`.
    pub half_time: f64,
}

impl Default for RegimeThresholds {
    fn default() -> Self {
        RegimeThresholds {
            small: 5,
            stretched_time: 10.0,
            half_time: 3.0,
        }
    }
}

/// Assigns a case to `(n, t)` for initial occupancy `n0` in `{0, 1}`.
///
/// Checked in order: `n = m` gives the blocking case; small `n` with
/// `t m <= stretched_time` the stretched-time case; for `n0 = 1`, small `n`
/// with `t sqrt(m) <= half_time` gives `R2C`; `m - n <= small` the near-full
/// case; small `n` the `t = O(1)` case; anything else the bulk case.
pub fn classify_regime(
    params: &SystemParams,
    n: usize,
    t: f64,
    n0: usize,
    thresholds: &RegimeThresholds,
) -> Result<RegimeTag> {
    params.check_state(n)?;
    let first = match n0 {
        0 => true,
        1 => false,
        _ => {
            return Err(Error::InvalidParameter {
                name: "n0",
                value: n0 as f64,
                requirement: "0 or 1",
            })
        }
    };
    let m = params.m();
    let small_n = n <= thresholds.small;
    let tag = if n == m {
        if first {
            RegimeTag::Block0
        } else {
            RegimeTag::Block1
        }
    } else if small_n && t * m as f64 <= thresholds.stretched_time {
        if first {
            RegimeTag::R1A
        } else {
            RegimeTag::R2A
        }
    } else if !first && small_n && t * libm::sqrt(m as f64) <= thresholds.half_time {
        RegimeTag::R2C
    } else if m - n <= thresholds.small {
        if first {
            RegimeTag::R1D
        } else {
            RegimeTag::R2E
        }
    } else if small_n {
        if first {
            RegimeTag::R1C
        } else {
            RegimeTag::R2D
        }
    } else if first {
        RegimeTag::R1B
    } else {
        RegimeTag::R2B
    };
    Ok(tag)
}

/// `n! / (sqrt(2 pi n) (n/e)^n)`: decreasing in `n`, tends to 1.
pub fn stirling_factor(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "n",
            value: 0.0,
            requirement: ">= 1",
        });
    }
    Ok(libm::exp(ln_stirling_remainder(n)))
}

fn check_load(params: &SystemParams) -> Result<()> {
    if params.rho() < 1.0 {
        Ok(())
    } else {
        Err(Error::LoadNotBelowOne { rho: params.rho() })
    }
}

fn need_positive_time(t: f64, regime: RegimeTag) -> Result<()> {
    if t > 0.0 {
        Ok(())
    } else {
        Err(Error::Inapplicable {
            regime,
            reason: "formula divides by 1 - exp(-t/alpha); needs t > 0",
        })
    }
}

fn need_positive_state(n: usize, regime: RegimeTag) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(Error::Inapplicable {
            regime,
            reason: "formula needs n >= 1",
        })
    }
}

fn wrong_family(regime: RegimeTag) -> Error {
    Error::Inapplicable {
        regime,
        reason: "case belongs to the other initial state",
    }
}

/// Approximates `P[N(t) = n | N(0) = 0]` in the given case.
pub fn knessl_p0(params: &SystemParams, n: usize, t: f64, case: RegimeTag) -> Result<f64> {
    knessl_p0_variant(params, n, t, case, FormulaVariant::Corrected)
}

pub fn knessl_p0_variant(
    params: &SystemParams,
    n: usize,
    t: f64,
    case: RegimeTag,
    variant: FormulaVariant,
) -> Result<f64> {
    check_load(params)?;
    let s = ScaledState::new(params, n, t)?;
    let rho0 = params.rho0();
    let m = params.m();
    match case {
        RegimeTag::R1A => Ok(poisson_pmf(params.lambda() * s.tau, n)),
        RegimeTag::R1B => {
            need_positive_state(n, case)?;
            need_positive_time(t, case)?;
            let nf = n as f64;
            let mean = rho0 * s.beta;
            let ln =
                -0.5 * libm::log(2.0 * core::f64::consts::PI * nf) + nf * libm::log(mean / nf) + nf
                    - mean;
            Ok(libm::exp(ln))
        }
        RegimeTag::R1C => {
            let mean = rho0 * s.beta;
            let shift = match variant {
                FormulaVariant::Corrected => 0.0,
                FormulaVariant::AsPrinted => 1.0,
            };
            if mean == 0.0 {
                return Ok(if n == 0 { libm::exp(shift) } else { 0.0 });
            }
            Ok(libm::exp(ln_poisson_pmf(mean, n) + shift))
        }
        RegimeTag::R1D => {
            need_positive_time(t, case)?;
            Ok(near_full_p0(params, m - n, t, s.beta, variant))
        }
        RegimeTag::Block0 => {
            if n != m {
                return Err(Error::Inapplicable {
                    regime: case,
                    reason: "blocking case needs n = m",
                });
            }
            need_positive_time(t, case)?;
            Ok(near_full_p0(params, 0, t, s.beta, variant))
        }
        other => Err(wrong_family(other)),
    }
}

// R1D for l = m - n; l = 0 is the blocking probability.
fn near_full_p0(
    params: &SystemParams,
    l: usize,
    t: f64,
    beta: f64,
    variant: FormulaVariant,
) -> f64 {
    let rho = params.rho();
    let eps = params.epsilon();
    let rb = rho * beta;
    let decay = libm::exp(-t / params.alpha());
    let denominator = rho - 1.0 / beta;
    let lead = match variant {
        FormulaVariant::Corrected => libm::pow(rb, -(l as f64)),
        FormulaVariant::AsPrinted => 1.0 / rb,
    };
    let bracket = if l == 0 && variant == FormulaVariant::Corrected {
        // Same value written as in the blocking formula.
        (rb - 1.0 / beta) / denominator
    } else {
        lead - rho * decay / denominator * libm::pow(beta, l as f64)
    };
    let exponent = match variant {
        FormulaVariant::Corrected => (1.0 - rb + libm::log(rb)) / eps,
        FormulaVariant::AsPrinted => (1.0 - rb) / eps + libm::log(rb),
    };
    let ln = 0.5 * libm::log(eps / (2.0 * core::f64::consts::PI)) + libm::log(bracket) + exponent;
    libm::exp(ln)
}

/// Approximates `P[N(t) = n | N(0) = 1]` in the given case.
pub fn knessl_p1(params: &SystemParams, n: usize, t: f64, case: RegimeTag) -> Result<f64> {
    check_load(params)?;
    let s = ScaledState::new(params, n, t)?;
    let rho0 = params.rho0();
    let alpha = params.alpha();
    let m = params.m();
    match case {
        RegimeTag::R2A => {
            if n >= 1 {
                Ok(poisson_pmf(params.lambda0() * t, n - 1))
            } else {
                // n = 0 branch as published: exp(-lambda t) (t/alpha)^(1-n).
                Ok(libm::exp(-params.lambda() * t) * (t / alpha))
            }
        }
        RegimeTag::R2B => {
            need_positive_state(n, case)?;
            need_positive_time(t, case)?;
            let nf = n as f64;
            let mean = rho0 * s.beta;
            let bracket = s.beta + nf / (rho0 * libm::expm1(t / alpha));
            let ln = -0.5 * libm::log(2.0 * core::f64::consts::PI * nf)
                + libm::log(bracket)
                + nf * (1.0 - libm::log(nf))
                - mean
                + nf * libm::log(mean);
            Ok(libm::exp(ln))
        }
        RegimeTag::R2C => {
            need_positive_state(n, case)?;
            need_positive_time(t, case)?;
            let lambda0 = params.lambda0();
            let mf = m as f64;
            let nf = n as f64;
            let root_m = libm::sqrt(mf);
            let ln_prefix = -mf * lambda0 * t + 0.5 * lambda0 / alpha * t * t
                - 0.5 * (1.0 - nf) * libm::log(mf)
                - ln_factorial(n - 1);
            let sum: f64 = (0..=n)
                .map(|l| {
                    nf * libm::pow(rho0 / mf, (n - l) as f64)
                        * libm::pow(t / alpha * root_m, nf + 1.0 - 2.0 * l as f64)
                })
                .sum();
            Ok(libm::exp(ln_prefix) * sum)
        }
        RegimeTag::R2D => {
            let mean = rho0 * s.beta;
            Ok(s.beta * poisson_pmf(mean, n))
        }
        RegimeTag::R2E => {
            need_positive_time(t, case)?;
            Ok(near_full_p1(params, m - n, t, s.beta))
        }
        RegimeTag::Block1 => {
            if n != m {
                return Err(Error::Inapplicable {
                    regime: case,
                    reason: "blocking case needs n = m",
                });
            }
            need_positive_time(t, case)?;
            Ok(near_full_p1(params, 0, t, s.beta))
        }
        other => Err(wrong_family(other)),
    }
}

// R2E for l = m - n; l = 0 is the blocking probability.
fn near_full_p1(params: &SystemParams, l: usize, t: f64, beta: f64) -> f64 {
    let rho0 = params.rho0();
    let alpha = params.alpha();
    let mf = params.m() as f64;
    let mean = rho0 * beta;
    let prefactor = beta + mf / (rho0 * libm::expm1(t / alpha));
    let denominator = rho0 - mf / beta;
    let bracket = if l == 0 {
        (mean - mf / beta) / denominator
    } else {
        libm::pow(mean / mf, -(l as f64))
            - rho0 * libm::exp(-t / alpha) / denominator * libm::pow(beta, l as f64)
    };
    let ln = -0.5 * libm::log(2.0 * core::f64::consts::PI * mf)
        + libm::log(prefactor)
        + libm::log(bracket)
        + mf * (1.0 - libm::log(mf))
        + mf * libm::log(mean)
        - mean;
    libm::exp(ln)
}

/// Transient blocking probability `P[N(t) = m]` for `n0` in `{0, 1}`.
pub fn blocking_probability(params: &SystemParams, n0: usize, t: f64) -> Result<f64> {
    match n0 {
        0 => knessl_p0(params, params.m(), t, RegimeTag::Block0),
        1 => knessl_p1(params, params.m(), t, RegimeTag::Block1),
        _ => Err(Error::InvalidParameter {
            name: "n0",
            value: n0 as f64,
            requirement: "0 or 1",
        }),
    }
}

/// Stirling-matched Erlang value `(e/m)^m rho0^m exp(-rho0) / sqrt(2 pi m)`,
/// the common large-`t` limit of both blocking formulas.
pub fn stirling_erlang_limit(params: &SystemParams) -> f64 {
    let mf = params.m() as f64;
    let rho0 = params.rho0();
    libm::exp(
        -0.5 * libm::log(2.0 * core::f64::consts::PI * mf)
            + mf * (1.0 - libm::log(mf))
            + mf * libm::log(rho0)
            - rho0,
    )
}

/// Evaluates the case picked by [`classify_regime`] (or `forced`).
pub fn approximate(
    params: &SystemParams,
    n: usize,
    t: f64,
    n0: usize,
    forced: Option<RegimeTag>,
    thresholds: &RegimeThresholds,
) -> Result<(RegimeTag, f64)> {
    let tag = match forced {
        Some(tag) => tag,
        None => classify_regime(params, n, t, n0, thresholds)?,
    };
    if tag.initial_state() != n0 {
        return Err(wrong_family(tag));
    }
    let value = if n0 == 0 {
        knessl_p0(params, n, t, tag)?
    } else {
        knessl_p1(params, n, t, tag)?
    };
    Ok((tag, value))
}
