//! Log-space helpers for factorials and Poisson weights.

/// `ln(n!)`.
pub fn ln_factorial(n: usize) -> f64 {
    libm::lgamma(n as f64 + 1.0)
}

/// `ln(n! / (sqrt(2 pi n) (n/e)^n))`, the Stirling remainder.
///
/// Small `n` go through log-gamma; from 20 on the asymptotic series is
/// accurate to rounding and keeps the value monotone where log-gamma's
/// absolute error would swamp the differences.
pub fn ln_stirling_remainder(n: usize) -> f64 {
    debug_assert!(n >= 1);
    let x = n as f64;
    if n < 20 {
        ln_factorial(n) - 0.5 * libm::log(2.0 * core::f64::consts::PI * x) - x * libm::log(x) + x
    } else {
        let inv = 1.0 / x;
        let inv2 = inv * inv;
        inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
    }
}

/// Poisson probability mass at `n` for the given mean.
pub fn poisson_pmf(mean: f64, n: usize) -> f64 {
    if mean == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    libm::exp(ln_poisson_pmf(mean, n))
}

/// Natural log of the Poisson mass, `n ln(mean) - mean - ln(n!)`.
pub fn ln_poisson_pmf(mean: f64, n: usize) -> f64 {
    if n == 0 {
        return -mean;
    }
    n as f64 * libm::log(mean) - mean - ln_factorial(n)
}

/// `1 - exp(-x)` without cancellation for small `x`.
pub fn one_minus_exp_neg(x: f64) -> f64 {
    -libm::expm1(-x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials() {
        assert!((ln_factorial(0)).abs() < 1e-15);
        assert!((ln_factorial(5) - 120f64.ln()).abs() < 1e-13);
        assert!((ln_factorial(20) - 2_432_902_008_176_640_000f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn stirling_remainder_branches_meet() {
        let n = 20usize;
        let x = n as f64;
        let via_gamma =
            ln_factorial(n) - 0.5 * (2.0 * core::f64::consts::PI * x).ln() - x * x.ln() + x;
        assert!((via_gamma - ln_stirling_remainder(n)).abs() < 1e-13);
    }

    #[test]
    fn poisson_mass() {
        assert!((poisson_pmf(4.0, 4) - 0.195_366_814_813_165_2).abs() < 1e-15);
        assert_eq!(poisson_pmf(0.0, 0), 1.0);
        assert_eq!(poisson_pmf(0.0, 3), 0.0);
        let total: f64 = (0..80).map(|n| poisson_pmf(7.5, n)).sum();
        assert!((total - 1.0).abs() < 1e-14);
    }
}
