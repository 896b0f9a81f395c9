//! Numerical building blocks shared by the solvers.

pub mod interp;
pub mod linalg;
pub mod ode;
pub mod quadrature;

/// `(1 - e^s) / s`, continuous at `s = 0` where it equals `-1`.
pub fn one_minus_exp_over(s: f64) -> f64 {
    if s.abs() < 1e-8 {
        -(1.0 + 0.5 * s)
    } else {
        -s.exp_m1() / s
    }
}

/// Bernoulli function `x / (e^x - 1)`.
#[inline]
pub fn bernoulli(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        let x2 = x * x;
        1.0 - 0.5 * x + x2 / 12.0 - x2 * x2 / 720.0
    } else {
        x / x.exp_m1()
    }
}

/// Derivative of [`bernoulli`].
#[inline]
pub fn bernoulli_derivative(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        -0.5 + x / 6.0 - x * x * x / 180.0
    } else if x > 700.0 {
        // e^x overflows; B'(x) ~ (1 - x) e^{-x}
        (1.0 - x) * (-x).exp()
    } else {
        let em1 = x.exp_m1();
        (em1 - x * (em1 + 1.0)) / (em1 * em1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_branches_agree() {
        for x in [-1e-3, -9.99e-4, 9.99e-4, 1e-3] {
            let direct = x / f64::exp_m1(x);
            assert!((bernoulli(x) - direct).abs() < 1e-14);
        }
        assert!((bernoulli(2.0) - bernoulli(-2.0) + 2.0).abs() < 1e-14);
    }

    #[test]
    fn bernoulli_derivative_matches_differences() {
        for x in [-30.0, -3.0, -0.2, -5e-4, 0.0, 5e-4, 0.7, 4.0, 40.0] {
            let h = 1e-6;
            let fd = (bernoulli(x + h) - bernoulli(x - h)) / (2.0 * h);
            assert!((bernoulli_derivative(x) - fd).abs() < 1e-7, "x = {x}");
        }
    }

    #[test]
    fn removable_point_is_continuous() {
        assert_eq!(one_minus_exp_over(0.0), -1.0);
        let s = 2e-8;
        assert!((one_minus_exp_over(s) - (1.0 - s.exp()) / s).abs() < 1e-7);
        assert!((one_minus_exp_over(1.0) - (1.0 - 1f64.exp())).abs() < 1e-15);
    }
}
