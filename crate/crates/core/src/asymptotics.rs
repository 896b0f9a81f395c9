//! Zero-Debye-length (`mu -> 0`) solution: closed-form fluxes, boundary-layer
//! endpoints, the electroneutral regular layer and the assembled singular
//! orbit with a composite approximation for small `mu > 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fast::{integrate_layer, DEFAULT_LAYER_TOL, FastState, LayerOrbit};
use crate::geometry::{ChannelProfile, DEFAULT_QUADRATURE_TOL};
use crate::numerics::one_minus_exp_over;
use crate::problem::{IonSpecies, Side, SteadyProblem};

/// Relative size of `alpha1 alpha2 (J1 + J2) rho0 / w0` below which the
/// potential uses its linear (equal-flux-sum) limit.
const LINEAR_BRANCH_THRESHOLD: f64 = 1e-10;
const ENDPOINT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogRatioData {
    pub a: f64,
    pub b: f64,
    pub s: f64,
    pub gm_left: f64,
    pub gm_right: f64,
}

/// `(alpha1 c1)^(alpha2/(alpha1+alpha2)) (alpha2 c2)^(alpha1/(alpha1+alpha2))`
pub fn weighted_geometric_mean(species: &IonSpecies, c1: f64, c2: f64) -> f64 {
    let (a1, a2) = (species.alpha1, species.alpha2);
    let sum = a1 + a2;
    ((a2 / sum) * (a1 * c1).ln() + (a1 / sum) * (a2 * c2).ln()).exp()
}

pub fn log_ratios(problem: &SteadyProblem) -> LogRatioData {
    let sp = &problem.species;
    let bd = &problem.boundary;
    let a = (bd.r1 / bd.l1).ln();
    let b = (bd.r2 / bd.l2).ln();
    let s = (sp.alpha2 * a + sp.alpha1 * b) / sp.alpha_sum();
    let out = LogRatioData {
        a,
        b,
        s,
        gm_left: weighted_geometric_mean(sp, bd.l1, bd.l2),
        gm_right: weighted_geometric_mean(sp, bd.r1, bd.r2),
    };
    debug_assert!((out.gm_right - out.gm_left * s.exp()).abs() <= 1e-12 * out.gm_right.max(1e-300));
    out
}

/// Scaled fluxes `J` and physical fluxes `Jbar = D J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxPair {
    pub j1: f64,
    pub j2: f64,
    pub jbar1: f64,
    pub jbar2: f64,
}

impl FluxPair {
    pub fn from_scaled(j1: f64, j2: f64, species: &IonSpecies) -> Self {
        Self {
            j1,
            j2,
            jbar1: species.d1 * j1,
            jbar2: species.d2 * j2,
        }
    }
}

pub fn limiting_fluxes(problem: &SteadyProblem) -> Result<FluxPair> {
    let rho0 = problem
        .profile
        .inverse_area_integral(0.0, 1.0, DEFAULT_QUADRATURE_TOL)?;
    Ok(limiting_fluxes_with_rho0(problem, rho0))
}

/// Flux formulas in the form `(a - alpha1 phi0) gm_left Phi(s) / (alpha1 rho0)`
/// with `Phi(s) = (1 - e^s)/s`, which stays finite at `s = 0`.
pub fn limiting_fluxes_with_rho0(problem: &SteadyProblem, rho0: f64) -> FluxPair {
    let sp = &problem.species;
    let phi0 = problem.boundary.phi0;
    let lr = log_ratios(problem);
    let common = lr.gm_left * one_minus_exp_over(lr.s) / rho0;
    let j1 = (lr.a - sp.alpha1 * phi0) * common / sp.alpha1;
    let j2 = (lr.b + sp.alpha2 * phi0) * common / sp.alpha2;
    FluxPair::from_scaled(j1, j2, sp)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryLayerEndpoint {
    pub side: Side,
    pub u_amplitude: f64,
    pub phi_limit: f64,
    pub w_limit: f64,
    pub has_layer: bool,
}

pub fn boundary_layer_endpoint(problem: &SteadyProblem, side: Side) -> BoundaryLayerEndpoint {
    let sp = &problem.species;
    let (a1, a2) = (sp.alpha1, sp.alpha2);
    let (c1, c2) = problem.boundary.concentrations(side);
    let h = problem.profile.h(side.position());
    let (q1, q2) = (a1 * c1, a2 * c2);
    let gm = weighted_geometric_mean(sp, c1, c2);
    let w_limit = (a1 + a2) * gm;
    let phi_limit = problem.boundary.potential(side) + (q1 / q2).ln() / (a1 + a2);
    let has_layer = (q1 - q2).abs() > 1e-12 * q1.max(q2);
    let u_amplitude = if has_layer {
        let radicand = (c1 + c2 - w_limit / (a1 * a2)).max(0.0);
        let magnitude = std::f64::consts::SQRT_2 * h * radicand.sqrt();
        let sign = (q2 - q1).signum();
        match side {
            Side::Left => -sign * magnitude,
            Side::Right => sign * magnitude,
        }
    } else {
        0.0
    };
    BoundaryLayerEndpoint {
        side,
        u_amplitude,
        phi_limit,
        w_limit,
        has_layer,
    }
}

/// Outer fields at one position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularState {
    pub phi: f64,
    pub w: f64,
    pub p: f64,
    pub c1: f64,
    pub c2: f64,
}

/// Electroneutral outer solution on the slow manifold.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularLayer {
    pub nu0: f64,
    pub w0: f64,
    pub tau0: f64,
    pub fluxes: FluxPair,
    pub rho0: f64,
    profile: ChannelProfile,
    species: IonSpecies,
}

impl RegularLayer {
    /// `∫_0^x 1/h`.
    pub fn inverse_area(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfDomain { x });
        }
        if let crate::geometry::ProfileKind::Constant { value } = self.profile.kind() {
            return Ok(x / value);
        }
        if x == 1.0 {
            return Ok(self.rho0);
        }
        self.profile.inverse_area_integral(0.0, x, DEFAULT_QUADRATURE_TOL)
    }

    fn flux_sum(&self) -> f64 {
        self.species.alpha1 * self.species.alpha2 * (self.fluxes.j1 + self.fluxes.j2)
    }

    fn drift(&self) -> f64 {
        self.species.alpha2 * self.fluxes.j2 - self.species.alpha1 * self.fluxes.j1
    }

    pub fn state(&self, x: f64) -> Result<RegularState> {
        let i = self.inverse_area(x)?;
        let w = self.w0 - self.flux_sum() * i;
        if !(w > 0.0) {
            return Err(Error::NonpositiveW { x, w });
        }
        let k = self.flux_sum() / self.w0;
        let phi = if (k * self.rho0).abs() < LINEAR_BRANCH_THRESHOLD {
            self.nu0 + self.drift() * i / self.w0
        } else {
            self.nu0 - self.drift() / self.flux_sum() * (-k * i).ln_1p()
        };
        let (a1, a2) = (self.species.alpha1, self.species.alpha2);
        Ok(RegularState {
            phi,
            w,
            p: self.drift() / w,
            c1: w / (a1 * (a1 + a2)),
            c2: w / (a2 * (a1 + a2)),
        })
    }

    pub fn w(&self, x: f64) -> Result<f64> {
        Ok(self.state(x)?.w)
    }

    pub fn phi(&self, x: f64) -> Result<f64> {
        Ok(self.state(x)?.phi)
    }

    pub fn p(&self, x: f64) -> Result<f64> {
        Ok(self.state(x)?.p)
    }

    pub fn c1(&self, x: f64) -> Result<f64> {
        Ok(self.state(x)?.c1)
    }

    pub fn c2(&self, x: f64) -> Result<f64> {
        Ok(self.state(x)?.c2)
    }
}

pub fn regular_layer(problem: &SteadyProblem) -> Result<RegularLayer> {
    let rho0 = problem
        .profile
        .inverse_area_integral(0.0, 1.0, DEFAULT_QUADRATURE_TOL)?;
    let fluxes = limiting_fluxes_with_rho0(problem, rho0);
    let left = boundary_layer_endpoint(problem, Side::Left);
    let right = boundary_layer_endpoint(problem, Side::Right);
    let layer = RegularLayer {
        nu0: left.phi_limit,
        w0: left.w_limit,
        tau0: 0.0,
        fluxes,
        rho0,
        profile: problem.profile.clone(),
        species: problem.species,
    };
    // w is monotone in x, so positivity at both ends covers the interval.
    let end = layer.state(1.0)?;
    let mismatch = ((end.w - right.w_limit).abs() / right.w_limit.max(1.0))
        .max((end.phi - right.phi_limit).abs());
    if mismatch > ENDPOINT_TOL {
        return Err(Error::InconsistentRegularLayer { mismatch });
    }
    Ok(layer)
}

/// Composite approximation at one position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CompositeValue {
    pub phi: f64,
    pub c1: f64,
    pub c2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SingularOrbit {
    pub left: BoundaryLayerEndpoint,
    pub right: BoundaryLayerEndpoint,
    pub left_orbit: LayerOrbit,
    pub right_orbit: LayerOrbit,
    pub regular: RegularLayer,
    pub fluxes: FluxPair,
    pub mu: f64,
    h_left: f64,
    h_right: f64,
}

impl SingularOrbit {
    /// Outer value plus both inner corrections minus their matching limits,
    /// at the `mu` of the problem.
    pub fn composite(&self, x: f64) -> Result<CompositeValue> {
        self.composite_with_mu(x, self.mu)
    }

    pub fn composite_with_mu(&self, x: f64, mu: f64) -> Result<CompositeValue> {
        let outer = self.regular.state(x)?;
        let mut out = CompositeValue {
            phi: outer.phi,
            c1: outer.c1,
            c2: outer.c2,
        };
        if mu <= 0.0 {
            return Ok(out);
        }
        let sp = &self.regular.species;
        for (orbit, xi, h) in [
            (&self.left_orbit, x / mu, self.h_left),
            (&self.right_orbit, (1.0 - x) / mu, self.h_right),
        ] {
            if !orbit.has_layer {
                continue;
            }
            let inner = orbit.state_at(xi);
            let (c1, c2) = inner.concentrations(h, sp);
            let (l1, l2) = orbit.landing.concentrations(h, sp);
            out.phi += inner.phi - orbit.landing.phi;
            out.c1 += c1 - l1;
            out.c2 += c2 - l2;
        }
        Ok(out)
    }

    /// Left and right landing points on the slow manifold.
    pub fn landing_points(&self) -> (FastState, FastState) {
        (self.left_orbit.landing, self.right_orbit.landing)
    }
}

pub fn singular_orbit(problem: &SteadyProblem) -> Result<SingularOrbit> {
    let regular = regular_layer(problem)?;
    let left_orbit = integrate_layer(problem, Side::Left, None, DEFAULT_LAYER_TOL)?;
    let right_orbit = integrate_layer(problem, Side::Right, None, DEFAULT_LAYER_TOL)?;
    Ok(SingularOrbit {
        left: boundary_layer_endpoint(problem, Side::Left),
        right: boundary_layer_endpoint(problem, Side::Right),
        left_orbit,
        right_orbit,
        fluxes: regular.fluxes,
        regular,
        mu: problem.mu,
        h_left: problem.profile.h(0.0),
        h_right: problem.profile.h(1.0),
    })
}
