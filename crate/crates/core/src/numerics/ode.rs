//! Dormand–Prince 5(4) integrator with embedded error control.
//!
//! Works on fixed-size states `[f64; N]`. The observer sees every accepted
//! step and may stop the integration early by returning `false`.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_initial: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Dopri5 {
    pub fn new(tol: f64) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            h_initial: 1e-3,
            h_max: f64::INFINITY,
            max_steps: 200_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOutcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub accepted: usize,
    pub rejected: usize,
    pub stopped_early: bool,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

impl Dopri5 {
    /// Integrates `y' = f(t, y)` from `t0` to `t_end` (which may be below `t0`).
    pub fn integrate<const N: usize, F, O>(
        &self,
        f: F,
        t0: f64,
        y0: [f64; N],
        t_end: f64,
        mut observer: O,
    ) -> Result<OdeOutcome<N>>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
        O: FnMut(f64, &[f64; N], &[f64; N]) -> bool,
    {
        let dir = if t_end >= t0 { 1.0 } else { -1.0 };
        let span = (t_end - t0).abs();
        let mut t = t0;
        let mut y = y0;
        let mut k1 = f(t, &y);
        if !observer(t, &y, &k1) || span == 0.0 {
            return Ok(OdeOutcome {
                t,
                y,
                accepted: 0,
                rejected: 0,
                stopped_early: span != 0.0,
            });
        }
        let mut h = self.h_initial.min(span).min(self.h_max);
        let mut accepted = 0;
        let mut rejected = 0;
        let mut last_err = 1e-4_f64;
        while (t_end - t) * dir > 0.0 {
            if accepted + rejected >= self.max_steps {
                return Err(Error::IntegrationFailure {
                    t,
                    reason: format!("step budget of {} exhausted", self.max_steps),
                });
            }
            let remaining = (t_end - t).abs();
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let hs = h * dir;
            let k2 = f(t + C2 * hs, &axpy(&y, hs, &[(A21, &k1)]));
            let k3 = f(t + C3 * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
            let k4 = f(
                t + C4 * hs,
                &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
            );
            let k5 = f(
                t + C5 * hs,
                &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f(
                t + hs,
                &axpy(
                    &y,
                    hs,
                    &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                ),
            );
            let y_new = axpy(
                &y,
                hs,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(t + hs, &y_new);

            let mut err = 0.0_f64;
            for i in 0..N {
                let e = hs
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max((e / sc).abs());
            }
            if !err.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
                h *= 0.25;
                rejected += 1;
                if h < 1e-14 * (1.0 + t.abs()) {
                    return Err(Error::IntegrationFailure {
                        t,
                        reason: "non-finite state".into(),
                    });
                }
                continue;
            }
            if err <= 1.0 {
                t = if last { t_end } else { t + hs };
                y = y_new;
                k1 = k7;
                accepted += 1;
                if !observer(t, &y, &k1) {
                    return Ok(OdeOutcome {
                        t,
                        y,
                        accepted,
                        rejected,
                        stopped_early: true,
                    });
                }
                // PI step-size controller.
                let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * last_err.powf(0.4 / 5.0);
                h *= fac.clamp(0.2, 5.0);
                h = h.min(self.h_max);
                last_err = err.max(1e-4);
            } else {
                rejected += 1;
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                if h < 1e-14 * (1.0 + t.abs()) {
                    return Err(Error::IntegrationFailure {
                        t,
                        reason: "step size underflow".into(),
                    });
                }
            }
        }
        Ok(OdeOutcome {
            t,
            y,
            accepted,
            rejected,
            stopped_early: false,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let solver = Dopri5::new(1e-11);
        let out = solver
            .integrate(|_, y: &[f64; 1]| [-2.0 * y[0]], 0.0, [1.0], 3.0, |_, _, _| true)
            .unwrap();
        assert!((out.y[0] - (-6.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn backward_harmonic_oscillator() {
        let solver = Dopri5::new(1e-11);
        let out = solver
            .integrate(
                |_, y: &[f64; 2]| [y[1], -y[0]],
                1.0,
                [1.0f64.cos(), -1.0f64.sin()],
                -2.0,
                |_, _, _| true,
            )
            .unwrap();
        assert!((out.y[0] - (-2.0f64).cos()).abs() < 1e-9);
        assert!((out.y[1] + (-2.0f64).sin()).abs() < 1e-9);
    }

    #[test]
    fn observer_can_stop() {
        let solver = Dopri5::new(1e-8);
        let out = solver
            .integrate(|_, _: &[f64; 1]| [1.0], 0.0, [0.0], 10.0, |t, _, _| t < 2.0)
            .unwrap();
        assert!(out.stopped_early);
        assert!(out.t >= 2.0 && out.t < 10.0);
    }
}
