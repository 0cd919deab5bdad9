//! Overflow-free scalar helpers for natural-log arithmetic.

use std::f64::consts::LN_2;

/// `ln(1 + e^x)` without overflow for large `x`.
#[inline]
pub fn softplus(x: f64) -> f64 {
    x.max(0.0) + (-x.abs()).exp().ln_1p()
}

/// `ln cosh x`, valid for every finite `x`.
#[inline]
pub fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - LN_2
}

/// `ln sinh x` for `x > 0`.
#[inline]
pub fn log_sinh(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x > 1.0 {
        x - LN_2 + (-(-2.0 * x).exp()).ln_1p()
    } else {
        x.sinh().ln()
    }
}

/// `ln(1 + cosh x)`, using `1 + cosh x = 2 cosh²(x/2)`.
#[inline]
pub fn log_one_plus_cosh(x: f64) -> f64 {
    LN_2 + 2.0 * log_cosh(0.5 * x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softplus_matches_naive_in_safe_range() {
        for &x in &[-30.0, -2.0, 0.0, 0.5, 3.0, 30.0] {
            let naive = f64::exp(x).ln_1p();
            assert!((softplus(x) - naive).abs() <= 1e-14 * naive.abs().max(1e-300));
        }
        assert_eq!(softplus(1000.0), 1000.0);
    }

    #[test]
    fn log_cosh_and_sinh_do_not_overflow() {
        assert!((log_cosh(1000.0) - (1000.0 - LN_2)).abs() < 1e-12);
        assert!((log_sinh(1000.0) - (1000.0 - LN_2)).abs() < 1e-12);
        for &x in &[0.01, 0.7, 1.0, 1.5, 20.0] {
            assert!((log_cosh(x) - x.cosh().ln()).abs() < 1e-14);
            assert!((log_sinh(x) - x.sinh().ln()).abs() < 1e-13);
            assert!((log_one_plus_cosh(x) - (1.0 + x.cosh()).ln()).abs() < 1e-14);
        }
    }
}
