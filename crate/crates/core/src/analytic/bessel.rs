//! Modified Bessel function of the second kind, order one.
//!
//! Two regimes:
//! - `x <= 2`: the ascending series
//!   `K1(x) = 1/x + (x/2) * sum_k t^k/(k!(k+1)!) * [ln(x/2) - (psi(k+1) + psi(k+2))/2]`
//!   with `t = x^2/4`. The same sum gives `1 - x K1(x)` with no cancellation.
//! - `x > 2`: Steed's continued fraction (Temme's CF2) for `K0` and `K1`,
//!   which yields `e^x sqrt(x) K1(x)` to full precision.

use std::f64::consts::PI;

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 2.0;
const MAX_TERMS: usize = 200;

/// `K1(x)` for `x > 0`. Underflows to 0 for `x` beyond roughly 745.
pub fn bessel_k1(x: f64) -> Result<f64> {
    check_domain(x)?;
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    if x <= SERIES_LIMIT {
        Ok(1.0 / x - 0.5 * x * series_tail(x))
    } else {
        let (scale, ratio) = steed_cf2(x);
        // K1 = sqrt(pi/2x) e^-x / s * (x + 1/2 - h) / x
        Ok((PI / (2.0 * x)).sqrt() * ratio / x * (-x).exp() / scale)
    }
}

/// `x K1(x)`, which tends to 1 as `x -> 0+` and lies in (0, 1) for `x > 0`.
pub fn x_bessel_k1(x: f64) -> Result<f64> {
    check_domain(x)?;
    if x <= SERIES_LIMIT {
        Ok(1.0 - one_minus_x_k1_series(x))
    } else {
        Ok(x * bessel_k1(x)?)
    }
}

/// `1 - x K1(x)`, accurate (in the relative sense) down to tiny `x` where the
/// direct difference would cancel completely.
pub fn one_minus_x_k1(x: f64) -> Result<f64> {
    check_domain(x)?;
    if x <= SERIES_LIMIT {
        Ok(one_minus_x_k1_series(x))
    } else {
        Ok(1.0 - x * bessel_k1(x)?)
    }
}

fn check_domain(x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        // also catches NaN
        Err(Error::Domain {
            function: "bessel_k1",
            value: x,
        })
    }
}

fn one_minus_x_k1_series(x: f64) -> f64 {
    0.5 * x * x * series_tail(x)
}

/// `-sum_k c_k [ln(x/2) - (psi(k+1) + psi(k+2))/2]` with
/// `c_k = t^k / (k!(k+1)!)`, `t = x^2/4`. Positive for `0 < x <= 2`.
fn series_tail(x: f64) -> f64 {
    let log_half = (0.5 * x).ln();
    let t = 0.25 * x * x;
    let mut coeff = 1.0;
    // (psi(k+1) + psi(k+2)) / 2 at k = 0
    let mut harmonic_k = 0.0;
    let mut sum = 0.0;
    for k in 0..MAX_TERMS {
        let harmonic_k1 = harmonic_k + 1.0 / (k as f64 + 1.0);
        let psi_mean = -EULER_GAMMA + 0.5 * (harmonic_k + harmonic_k1);
        let term = coeff * (psi_mean - log_half);
        sum += term;
        if term.abs() <= f64::EPSILON * 0.25 * sum.abs() {
            break;
        }
        harmonic_k = harmonic_k1;
        let k = k as f64;
        coeff *= t / ((k + 1.0) * (k + 2.0));
    }
    sum
}

/// Steed's algorithm for order zero. Returns `(s, x + 1/2 - h)` such that
/// `K0 = sqrt(pi/2x) e^-x / s` and `K1 = K0 (x + 1/2 - h) / x`.
fn steed_cf2(x: f64) -> (f64, f64) {
    let a1 = 0.25;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 1..MAX_TERMS {
        let fi = i as f64;
        a -= 2.0 * fi;
        c = -a * c / (fi + 1.0);
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < f64::EPSILON * 0.5 {
            break;
        }
    }
    h *= a1;
    (s, x + 0.5 - h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        // mpmath besselk(1, x), 40 digits
        assert_relative_eq!(
            bessel_k1(1.0).unwrap(),
            0.601_907_230_197_234_6,
            max_relative = 1e-14
        );
        assert_relative_eq!(
            bessel_k1(0.1).unwrap(),
            9.853_844_780_870_606,
            max_relative = 1e-14
        );
        assert!((bessel_k1(1.0).unwrap() - 0.601_907_230_2).abs() < 1e-9);
        assert!((bessel_k1(0.1).unwrap() - 9.853_845).abs() < 1e-5);
    }

    #[test]
    fn continuous_across_branch_switch() {
        let below = bessel_k1(2.0).unwrap();
        let above = bessel_k1(2.0 + 4.0 * f64::EPSILON).unwrap();
        assert_relative_eq!(below, above, max_relative = 1e-14);
        // mpmath besselk(1, 2)
        assert_relative_eq!(below, 0.139_865_881_816_522_43, max_relative = 1e-14);
    }

    #[test]
    fn domain_errors() {
        assert!(bessel_k1(0.0).is_err());
        assert!(bessel_k1(-1.0).is_err());
        assert!(bessel_k1(f64::NAN).is_err());
        assert!(one_minus_x_k1(0.0).is_err());
    }

    #[test]
    fn underflow_is_zero() {
        assert_eq!(bessel_k1(800.0).unwrap(), 0.0);
        assert_eq!(bessel_k1(f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn small_argument_limit() {
        for &x in &[1e-12, 1e-9, 1e-6] {
            assert_relative_eq!(x_bessel_k1(x).unwrap(), 1.0, max_relative = 1e-10);
        }
    }

    #[test]
    fn one_minus_matches_leading_term() {
        // 1 - x K1(x) = (x^2/2) (-ln(x/2) - gamma + 1/2) + O(x^4 ln x)
        for &x in &[1e-6f64, 1e-4, 1e-3] {
            let lead = 0.5 * x * x * (-(0.5 * x).ln() - EULER_GAMMA + 0.5);
            assert_relative_eq!(
                one_minus_x_k1(x).unwrap(),
                lead,
                max_relative = 10.0 * x * x
            );
        }
    }

    proptest! {
        #[test]
        fn x_k1_in_unit_interval(x in 1e-10f64..600.0) {
            let v = x_bessel_k1(x).unwrap();
            prop_assert!(v > 0.0 && v < 1.0, "x K1(x) = {} at {}", v, x);
        }

        #[test]
        fn k1_decreasing(a in 1e-6f64..300.0, b in 1e-6f64..300.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(lo < hi);
            prop_assert!(bessel_k1(lo).unwrap() >= bessel_k1(hi).unwrap());
        }
    }
}
