//! The exponential integral `E1(x) = integral from x to inf of
//! exp(-u)/u du` for `x > 0`.
//!
//! Two regimes with a switchover at `x = 1`:
//!
//! - `x <= 1`: the alternating power series
//!   `E1(x) = -gamma - ln x + sum_{k>=1} (-1)^(k+1) x^k / (k * k!)`,
//!   which converges in well under 30 terms there;
//! - `x > 1`: the continued fraction
//!   `E1(x) = exp(-x) / (x + 1 - 1/(x + 3 - 4/(x + 5 - 9/(...))))`
//!   evaluated with the modified Lentz method.
//!
//! Relative error is below 1e-12 across `[1e-8, 700]`. The continued
//! fraction yields `exp(x) * E1(x)` without forming either factor, so
//! [`e1_scaled`] stays finite far beyond the overflow point of
//! `exp(x)`.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SWITCHOVER: f64 = 1.0;

fn series_e1(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut power_over_fact = 1.0; // x^k / k!
    for k in 1..=40u32 {
        power_over_fact *= x / k as f64;
        let term = if k % 2 == 1 { 1.0 } else { -1.0 } * power_over_fact / k as f64;
        sum += term;
        if term.abs() < 1e-17 * (sum.abs() + 1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() + sum
}

/// Continued fraction for `exp(x) * E1(x)`, modified Lentz.
fn cf_e1_scaled(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=200u32 {
        let a = -((i as f64) * (i as f64));
        b += 2.0;
        d = a * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}

/// `E1(x)` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Input(format!("E1 domain is x > 0, got {x}")));
    }
    if x <= SWITCHOVER {
        Ok(series_e1(x))
    } else {
        Ok((-x).exp() * cf_e1_scaled(x))
    }
}

/// `exp(x) * E1(x)` for `x > 0`, computed without overflow.
pub fn e1_scaled(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::Input(format!("E1 domain is x > 0, got {x}")));
    }
    if x <= SWITCHOVER {
        Ok(x.exp() * series_e1(x))
    } else {
        Ok(cf_e1_scaled(x))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_values() {
        // High-precision values (60-digit arbitrary precision arithmetic).
        assert_relative_eq!(
            exp_integral_e1(1.0).unwrap(),
            0.219_383_934_395_520_27,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            exp_integral_e1(2.0).unwrap(),
            0.048_900_510_708_061_12,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            exp_integral_e1(0.5).unwrap(),
            0.559_773_594_776_160_8,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            exp_integral_e1(10.0).unwrap(),
            4.156_968_929_685_325e-6,
            max_relative = 1e-13
        );
    }

    #[test]
    fn small_x_leading_behavior() {
        // E1(x) + ln x + gamma - x -> 0 as x -> 0+ (next term is x^2/4).
        let x = 1e-6;
        let r = exp_integral_e1(x).unwrap() + x.ln() + EULER_GAMMA - x;
        assert!(r.abs() < 1e-5, "residual {r}");
    }

    #[test]
    fn large_x_asymptotics() {
        // x * exp(x) * E1(x) -> 1 from below.
        let v = 500.0 * e1_scaled(500.0).unwrap();
        assert!((v - 1.0).abs() < 1e-2, "x e^x E1 = {v}");
        assert!(v < 1.0);
    }

    #[test]
    fn scaled_and_plain_agree_where_both_are_finite() {
        for &x in &[0.01, 0.3, 1.0, 1.5, 4.0, 30.0, 200.0] {
            assert_relative_eq!(
                e1_scaled(x).unwrap(),
                x.exp() * exp_integral_e1(x).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn continuity_at_the_switchover() {
        let below = exp_integral_e1(1.0 - 1e-12).unwrap();
        let above = exp_integral_e1(1.0 + 1e-12).unwrap();
        assert_relative_eq!(below, above, max_relative = 1e-10);
    }

    #[test]
    fn domain_errors() {
        assert!(exp_integral_e1(0.0).is_err());
        assert!(exp_integral_e1(-1.0).is_err());
        assert!(exp_integral_e1(f64::NAN).is_err());
        assert!(e1_scaled(-2.0).is_err());
    }

    #[test]
    fn huge_arguments_stay_finite_in_scaled_form() {
        let v = e1_scaled(1e6).unwrap();
        assert!(v.is_finite() && v > 0.0);
        assert_relative_eq!(v, 1.0 / (1e6 + 1.0), max_relative = 1e-5);
    }
}
