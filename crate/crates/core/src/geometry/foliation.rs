//! Extension of a boundary function into the 3D channel with zero normal
//! derivative on the wall, built from the characteristics of
//! `dX/dt = -t g'(X) / g(X)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::ode::Dopri5;

type WallEval = dyn Fn(f64, f64) -> (f64, f64) + Send + Sync;

/// Wall radius `g(X, eps)` together with `∂g/∂X`.
#[derive(Clone)]
pub struct WallFunction {
    eps: f64,
    eval: Arc<WallEval>,
}

impl fmt::Debug for WallFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WallFunction").field("eps", &self.eps).finish_non_exhaustive()
    }
}

const WALL_SAMPLES: usize = 1001;
const END_SLOPE_TOL: f64 = 1e-12;

impl WallFunction {
    /// `eval(X, eps)` returns `(g, ∂g/∂X)`. Requires `g > 0` on `[0, 1]` and
    /// vanishing slope at both ends.
    pub fn new<F>(eps: f64, eval: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
    {
        let wall = Self::new_unchecked_ends(eps, eval)?;
        for x in [0.0, 1.0] {
            let (g, gx) = wall.eval(x);
            if gx.abs() > END_SLOPE_TOL * g.abs().max(1.0) {
                return Err(Error::InvalidWall(format!("dg/dX({x}) = {gx} must vanish")));
            }
        }
        Ok(wall)
    }

    /// Like [`WallFunction::new`] but only checks positivity; used to probe
    /// what happens when the end-slope condition is violated.
    pub fn new_unchecked_ends<F>(eps: f64, eval: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> (f64, f64) + Send + Sync + 'static,
    {
        if !(eps > 0.0) {
            return Err(Error::InvalidWall(format!("eps = {eps} must be positive")));
        }
        let wall = Self {
            eps,
            eval: Arc::new(eval),
        };
        for k in 0..WALL_SAMPLES {
            let x = k as f64 / (WALL_SAMPLES - 1) as f64;
            let g = wall.eval(x).0;
            if !(g > 0.0) {
                return Err(Error::InvalidWall(format!("g({x}) = {g} is not positive")));
            }
        }
        Ok(wall)
    }

    /// Straight cylinder of radius `eps * radius`.
    pub fn cylinder(eps: f64, radius: f64) -> Result<Self> {
        Self::new(eps, move |_, e| (e * radius, 0.0))
    }

    /// `g = eps (1 + amplitude sin^2(pi X))`; flat at both ends.
    pub fn sine_bulge(eps: f64, amplitude: f64) -> Result<Self> {
        use std::f64::consts::PI;
        Self::new(eps, move |x, e| {
            let s = (PI * x).sin();
            (e * (1.0 + amplitude * s * s), e * amplitude * PI * (2.0 * PI * x).sin())
        })
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    #[inline]
    pub fn eval(&self, x: f64) -> (f64, f64) {
        (self.eval)(x, self.eps)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoliationOptions {
    pub ode_tol: f64,
    pub root_tol: f64,
}

impl Default for FoliationOptions {
    fn default() -> Self {
        Self {
            ode_tol: 1e-10,
            root_tol: 1e-10,
        }
    }
}

/// Evaluator `H(X, Y, Z)` of the extended function.
#[derive(Clone)]
pub struct Foliation {
    boundary: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    wall: WallFunction,
    options: FoliationOptions,
}

pub fn build_foliation<F>(h_boundary: F, wall: WallFunction) -> Foliation
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    Foliation {
        boundary: Arc::new(h_boundary),
        wall,
        options: FoliationOptions::default(),
    }
}

impl Foliation {
    pub fn with_options(mut self, options: FoliationOptions) -> Self {
        self.options = options;
        self
    }

    pub fn wall(&self) -> &WallFunction {
        &self.wall
    }

    /// Characteristic through `(0, x0)` evaluated at `t`.
    pub fn characteristic(&self, t: f64, x0: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(x0);
        }
        let wall = &self.wall;
        let mut ode = Dopri5::new(self.options.ode_tol);
        ode.h_initial = (t.abs() * 0.1).max(1e-8);
        let out = ode.integrate(
            |s, x: &[f64; 1]| {
                let (g, gx) = wall.eval(x[0]);
                [-s * gx / g]
            },
            0.0,
            [x0],
            t,
            |_, _, _| true,
        )?;
        Ok(out.y[0])
    }

    /// Foot point `X0` with `characteristic(sqrt(Y^2 + Z^2), X0) = X`.
    pub fn foot_point(&self, x: f64, y: f64, z: f64) -> Result<f64> {
        let r = y.hypot(z);
        if r == 0.0 {
            return Ok(x);
        }
        if (0.0..=1.0).contains(&x) && self.characteristic(r, x)? == x {
            return Ok(x);
        }
        let mut lo = 0.0;
        let mut hi = 1.0;
        let f_lo = self.characteristic(r, lo)? - x;
        let f_hi = self.characteristic(r, hi)? - x;
        if f_lo > 0.0 || f_hi < 0.0 {
            return Err(Error::RootFindFailure(format!(
                "X = {x} at radius {r} is not bracketed by the characteristics from X0 = 0 ({:.3e}) and X0 = 1 ({:.3e})",
                f_lo + x,
                f_hi + x
            )));
        }
        if f_lo == 0.0 {
            return Ok(lo);
        }
        if f_hi == 0.0 {
            return Ok(hi);
        }
        while hi - lo > self.options.root_tol {
            let mid = 0.5 * (lo + hi);
            if self.characteristic(r, mid)? - x > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    pub fn eval(&self, x: f64, y: f64, z: f64) -> Result<f64> {
        let x0 = self.foot_point(x, y, z)?;
        Ok((self.boundary)(x0))
    }
}
