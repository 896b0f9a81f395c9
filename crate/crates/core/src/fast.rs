//! Layer (fast) dynamics in the stretched variable `xi = x / mu`.
//!
//! Phase space is `(phi, u, v, w, J1, J2, tau)` with `u = mu h phi'`,
//! `v = -h (alpha1 c1 - alpha2 c2)` and `w = alpha1^2 c1 + alpha2^2 c2`.
//! At `mu = 0` the set `u = v = 0` consists of equilibria and the flow has
//! three nontrivial first integrals, which pin down the boundary-layer
//! orbits completely.

use serde::Serialize;

use crate::asymptotics::{boundary_layer_endpoint, limiting_fluxes};
use crate::error::{Error, Result};
use crate::geometry::ChannelProfile;
use crate::numerics::ode::Dopri5;
use crate::problem::{BoundaryData, IonSpecies, Side, SteadyProblem};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct FastState {
    pub phi: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub j1: f64,
    pub j2: f64,
    pub tau: f64,
}

impl FastState {
    pub fn to_array(&self) -> [f64; 7] {
        [self.phi, self.u, self.v, self.w, self.j1, self.j2, self.tau]
    }

    pub fn from_array(a: [f64; 7]) -> Self {
        Self {
            phi: a[0],
            u: a[1],
            v: a[2],
            w: a[3],
            j1: a[4],
            j2: a[5],
            tau: a[6],
        }
    }

    pub fn on_slow_manifold(&self) -> bool {
        self.u == 0.0 && self.v == 0.0
    }

    /// `|(u, v)|`, the distance from the slow manifold.
    pub fn normal_amplitude(&self) -> f64 {
        self.u.hypot(self.v)
    }

    /// Recovers `(c1, c2)` from `v` and `w` at cross-section `h`.
    pub fn concentrations(&self, h: f64, species: &IonSpecies) -> (f64, f64) {
        let (a1, a2) = (species.alpha1, species.alpha2);
        let sum = a1 + a2;
        (
            (self.w - a2 * self.v / h) / (a1 * sum),
            (self.w + a1 * self.v / h) / (a2 * sum),
        )
    }
}

fn cross_section(profile: &ChannelProfile, tau: f64) -> Result<(f64, f64)> {
    let (h, dh) = profile.value_and_slope(tau.clamp(0.0, 1.0));
    if !(h > 0.0) {
        return Err(Error::DegenerateGeometry { value: h });
    }
    Ok((h, dh))
}

/// Right-hand side of the fast system; `mu = 0` gives the layer problem.
pub fn fast_field(
    state: &FastState,
    profile: &ChannelProfile,
    species: &IonSpecies,
    mu: f64,
) -> Result<FastState> {
    let (h, dh) = cross_section(profile, state.tau)?;
    Ok(field_with_h(state, h, dh, species, mu))
}

#[inline]
fn field_with_h(s: &FastState, h: f64, dh: f64, species: &IonSpecies, mu: f64) -> FastState {
    let (a1, a2) = (species.alpha1, species.alpha2);
    FastState {
        phi: s.u / h,
        u: s.v,
        v: s.u * s.w + mu * (dh / h) * s.v + mu * (a1 * s.j1 - a2 * s.j2),
        w: a1 * a2 * s.u * s.v / (h * h) + (a2 - a1) * s.u * s.w / h
            - mu * (a1 * a1 * s.j1 + a2 * a2 * s.j2) / h,
        j1: 0.0,
        j2: 0.0,
        tau: mu,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralVector {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h4: f64,
    pub h5: f64,
    pub h6: f64,
}

impl IntegralVector {
    pub fn nontrivial(&self) -> [f64; 3] {
        [self.h1, self.h2, self.h3]
    }
}

/// The six first integrals of the `mu = 0` fast system.
pub fn integrals(
    state: &FastState,
    profile: &ChannelProfile,
    species: &IonSpecies,
) -> Result<IntegralVector> {
    let (h, _) = cross_section(profile, state.tau)?;
    integrals_with_h(state, h, species)
}

fn integrals_with_h(s: &FastState, h: f64, species: &IonSpecies) -> Result<IntegralVector> {
    let (a1, a2) = (species.alpha1, species.alpha2);
    let arg2 = a1 * s.v / h + s.w;
    let arg3 = a2 * s.v / h - s.w;
    if arg2 == 0.0 {
        return Err(Error::LogSingularity { which: "H2" });
    }
    if arg3 == 0.0 {
        return Err(Error::LogSingularity { which: "H3" });
    }
    Ok(IntegralVector {
        h1: s.w - (a2 - a1) * s.v / h - a1 * a2 * s.u * s.u / (2.0 * h * h),
        h2: s.phi - arg2.abs().ln() / a2,
        h3: s.phi + arg3.abs().ln() / a1,
        h4: s.j1,
        h5: s.j2,
        h6: s.tau,
    })
}

/// Normal eigenvalues `±sqrt(w)` and eigenvectors at an equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenData {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub n_plus: [f64; 7],
    pub n_minus: [f64; 7],
}

/// Eigen-data in the unit-cross-section normalisation (`h(tau) = 1`).
pub fn eigen_normal(equilibrium: &FastState, species: &IonSpecies) -> Result<EigenData> {
    eigen_normal_at(equilibrium, species, 1.0)
}

/// Eigen-data at an equilibrium whose cross-section is `h`; the `phi` and
/// `w` components pick up factors `1/h`.
pub fn eigen_normal_at(equilibrium: &FastState, species: &IonSpecies, h: f64) -> Result<EigenData> {
    if !(equilibrium.u == 0.0 && equilibrium.v == 0.0) {
        return Err(Error::BadParameters(
            "eigen data requires an equilibrium with u = v = 0".into(),
        ));
    }
    let w = equilibrium.w;
    if !(w > 0.0) {
        return Err(Error::NonHyperbolic { w });
    }
    let r = w.sqrt();
    let da = species.alpha2 - species.alpha1;
    let vec = |l: f64| [1.0 / (l * h), 1.0, l, da * l / h, 0.0, 0.0, 0.0];
    Ok(EigenData {
        lambda_plus: r,
        lambda_minus: -r,
        n_plus: vec(r),
        n_minus: vec(-r),
    })
}

/// Point of the boundary manifold `B_L` or `B_R` with a chosen `u`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryManifoldPoint {
    pub side: Side,
    pub state: FastState,
}

pub fn boundary_point(
    boundary: &BoundaryData,
    profile: &ChannelProfile,
    species: &IonSpecies,
    side: Side,
    u_value: f64,
    j1: f64,
    j2: f64,
) -> BoundaryManifoldPoint {
    let (a1, a2) = (species.alpha1, species.alpha2);
    let tau = side.position();
    let h = profile.h(tau);
    let (c1, c2) = boundary.concentrations(side);
    BoundaryManifoldPoint {
        side,
        state: FastState {
            phi: boundary.potential(side),
            u: u_value,
            v: -h * (a1 * c1 - a2 * c2),
            w: a1 * a1 * c1 + a2 * a2 * c2,
            j1,
            j2,
            tau,
        },
    }
}

/// One accepted integrator step of a layer orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitSample {
    /// Stretched distance from the boundary (`x/mu` on the left, `(1-x)/mu`
    /// on the right).
    pub xi: f64,
    pub state: FastState,
    /// `d state / d xi` along the integration direction.
    pub slope: FastState,
    pub integrals: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerOrbit {
    pub side: Side,
    pub samples: Vec<OrbitSample>,
    pub terminal: FastState,
    /// Predicted slow-manifold landing point.
    pub landing: FastState,
    pub initial_integrals: [f64; 3],
    /// Largest excursion of `H1, H2, H3` from their initial values.
    pub max_drift: [f64; 3],
    /// Max-norm distance of the terminal state from the landing point.
    pub terminal_error: f64,
    pub tol: f64,
    pub has_layer: bool,
}

impl LayerOrbit {
    pub fn xi_end(&self) -> f64 {
        self.samples.last().map_or(0.0, |s| s.xi)
    }

    pub fn max_integral_drift(&self) -> f64 {
        self.max_drift.iter().copied().fold(0.0, f64::max)
    }

    /// State at stretched distance `xi` (cubic Hermite between samples,
    /// landing point beyond the integrated span).
    pub fn state_at(&self, xi: f64) -> FastState {
        let n = self.samples.len();
        if !self.has_layer || n < 2 || xi >= self.samples[n - 1].xi {
            return self.landing;
        }
        if xi <= 0.0 {
            return self.samples[0].state;
        }
        let k = self.samples.partition_point(|s| s.xi <= xi).max(1) - 1;
        let (a, b) = (&self.samples[k], &self.samples[k + 1]);
        let dxi = b.xi - a.xi;
        let t = (xi - a.xi) / dxi;
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let (ya, yb) = (a.state.to_array(), b.state.to_array());
        let (da, db) = (a.slope.to_array(), b.slope.to_array());
        let mut out = [0.0; 7];
        for i in 0..7 {
            out[i] = h00 * ya[i] + h10 * dxi * da[i] + h01 * yb[i] + h11 * dxi * db[i];
        }
        FastState::from_array(out)
    }

    /// Least-squares slope of `ln |(u, v)|` against `xi` over the tail of the
    /// orbit: from where the amplitude first drops below 1% of its initial
    /// value down to 100x the closest approach to the slow manifold.
    pub fn tail_decay_slope(&self) -> Option<f64> {
        let first = self.samples.first()?.state.normal_amplitude();
        let closest = self.terminal.normal_amplitude();
        if first == 0.0 {
            return None;
        }
        let upper = 1e-2 * first;
        let lower = (100.0 * closest).max(1e-300);
        let pts: Vec<(f64, f64)> = self
            .samples
            .iter()
            .map(|s| (s.xi, s.state.normal_amplitude()))
            .filter(|&(_, a)| a <= upper && a >= lower)
            .map(|(x, a)| (x, a.ln()))
            .collect();
        if pts.len() < 3 {
            return None;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        Some(sxy / sxx)
    }
}

/// Integrator tolerance for layer orbits. At `1e-10` the closest approach
/// to the slow manifold stays about `1e-6` away.
pub const DEFAULT_LAYER_TOL: f64 = 1e-12;

/// Default stretched length: amplitude shrinks by about `e^-40`.
pub fn default_xi_max(w_limit: f64) -> f64 {
    40.0 / w_limit.sqrt()
}

/// Integrates the `mu = 0` layer orbit leaving `B_L` (forward in `xi`) or
/// `B_R` (backward in `xi`).
///
/// Numerical error excites the unstable normal direction, so the orbit is
/// followed until its closest approach to the slow manifold (or `xi_max`)
/// and truncated there.
pub fn integrate_layer(
    problem: &SteadyProblem,
    side: Side,
    xi_max: Option<f64>,
    tol: f64,
) -> Result<LayerOrbit> {
    let species = &problem.species;
    let endpoint = boundary_layer_endpoint(problem, side);
    let fluxes = limiting_fluxes(problem)?;
    let start = boundary_point(
        &problem.boundary,
        &problem.profile,
        species,
        side,
        endpoint.u_amplitude,
        fluxes.j1,
        fluxes.j2,
    )
    .state;
    let landing = FastState {
        phi: endpoint.phi_limit,
        u: 0.0,
        v: 0.0,
        w: endpoint.w_limit,
        ..start
    };
    let h = problem.profile.h(start.tau);
    let dh = problem.profile.value_and_slope(start.tau).1;
    let initial_integrals = integrals_with_h(&start, h, species)?.nontrivial();
    let xi_max = xi_max.unwrap_or_else(|| default_xi_max(endpoint.w_limit));
    let sign = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    let rhs = |s: &FastState| -> FastState {
        let f = field_with_h(s, h, dh, species, 0.0);
        FastState::from_array(f.to_array().map(|v| sign * v))
    };
    let sample = |xi: f64, state: FastState| -> Result<OrbitSample> {
        Ok(OrbitSample {
            xi,
            state,
            slope: rhs(&state),
            integrals: integrals_with_h(&state, h, species)?.nontrivial(),
        })
    };

    if !endpoint.has_layer {
        let s = sample(0.0, start)?;
        return Ok(LayerOrbit {
            side,
            samples: vec![s],
            terminal: start,
            landing,
            initial_integrals,
            max_drift: [0.0; 3],
            terminal_error: distance(&start, &landing),
            tol,
            has_layer: false,
        });
    }

    let initial_amp = start.normal_amplitude();
    let mut ode = Dopri5::new(tol);
    ode.h_initial = 1e-3 / endpoint.w_limit.sqrt();
    let pack = |s: &FastState| [s.phi, s.u, s.v, s.w];
    let unpack = |y: &[f64; 4]| FastState {
        phi: y[0],
        u: y[1],
        v: y[2],
        w: y[3],
        ..start
    };
    let mut raw: Vec<(f64, FastState)> = Vec::new();
    let mut min_amp = f64::INFINITY;
    let mut diverged: Option<(f64, f64)> = None;
    ode.integrate(
        |_, y: &[f64; 4]| pack(&rhs(&unpack(y))),
        0.0,
        pack(&start),
        xi_max,
        |xi, y, _| {
            let s = unpack(y);
            let amp = s.normal_amplitude();
            raw.push((xi, s));
            if amp > 10.0 * initial_amp {
                diverged = Some((xi, amp));
                return false;
            }
            min_amp = min_amp.min(amp);
            // Past the closest approach: the unstable direction has taken over.
            !(min_amp < 1e-3 * initial_amp && amp > 4.0 * min_amp)
        },
    )?;
    if let Some((xi, norm)) = diverged {
        return Err(Error::DivergentOrbit {
            xi,
            norm,
            initial: initial_amp,
        });
    }
    let best = raw
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .1.normal_amplitude().total_cmp(&b.1 .1.normal_amplitude()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    raw.truncate(best + 1);
    let samples = raw
        .into_iter()
        .map(|(xi, s)| sample(xi, s))
        .collect::<Result<Vec<_>>>()?;
    let mut max_drift = [0.0f64; 3];
    for s in &samples {
        for k in 0..3 {
            max_drift[k] = max_drift[k].max((s.integrals[k] - initial_integrals[k]).abs());
        }
    }
    let terminal = samples.last().expect("at least the initial sample").state;
    Ok(LayerOrbit {
        side,
        samples,
        terminal,
        landing,
        initial_integrals,
        max_drift,
        terminal_error: distance(&terminal, &landing),
        tol,
        has_layer: true,
    })
}

fn distance(a: &FastState, b: &FastState) -> f64 {
    [a.phi - b.phi, a.u - b.u, a.v - b.v, a.w - b.w]
        .iter()
        .fold(0.0, |m, d| m.max(d.abs()))
}

/// Membership in `W^s(z*) ∪ W^u(z*)` via the level sets of the integrals.
pub fn manifold_membership(
    state: &FastState,
    equilibrium: &FastState,
    profile: &ChannelProfile,
    species: &IonSpecies,
    tol: f64,
) -> bool {
    let w = equilibrium.w;
    if !(w > 0.0) {
        return false;
    }
    let Ok(hv) = integrals(state, profile, species) else {
        return false;
    };
    let targets = [
        (hv.h1, w),
        (hv.h2, equilibrium.phi - w.ln() / species.alpha2),
        (hv.h3, equilibrium.phi + w.ln() / species.alpha1),
        (hv.h4, equilibrium.j1),
        (hv.h5, equilibrium.j2),
        (hv.h6, equilibrium.tau),
    ];
    targets.iter().all(|(a, b)| (a - b).abs() <= tol)
}
