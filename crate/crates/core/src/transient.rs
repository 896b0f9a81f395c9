//! Time-dependent one-dimensional system
//!
//! ```text
//! (h phi')' / h = -lambda (alpha1 c1 - alpha2 c2)
//! h d_t c1 = D1 (h (c1' + alpha1 c1 phi'))'
//! h d_t c2 = D2 (h (c2' - alpha2 c2 phi'))'
//! ```
//!
//! with Dirichlet data. Each implicit-Euler step starts from a semi-implicit
//! predictor (Poisson at the old concentrations, exponentially fitted
//! transport at frozen potential) and is then corrected by Newton on the
//! coupled implicit system.

use serde::{Deserialize, Serialize};

use crate::bvp::{newton, Discretization, Fields, NewtonSettings, TimeTerm};
use crate::discretization::{
    build_layer_mesh, cell_geometry, tail_inverse_area, valences, CellGeometry, GradingKind, Mesh,
};
use crate::error::{Error, Result};
use crate::geometry::ChannelProfile;
use crate::numerics::bernoulli;
use crate::numerics::linalg::solve_tridiagonal;
use crate::problem::{BoundaryData, IonSpecies, SteadyProblem};

const REGION_TOL: f64 = 1e-10;
const MIN_DT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransientOptions {
    /// Number of mesh intervals.
    pub n: usize,
    pub grading: GradingKind,
    pub dt_initial: f64,
    pub dt_max: f64,
    pub growth: f64,
    /// Tolerance on the row-scaled residual of the coupled implicit system.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Keep every `record_every`-th accepted step in the trajectory.
    pub record_every: usize,
}

impl Default for TransientOptions {
    fn default() -> Self {
        Self {
            n: 201,
            grading: GradingKind::Tanh,
            dt_initial: 1e-4,
            dt_max: 1e-2,
            growth: 1.2,
            newton_tol: 1e-12,
            max_newton: 30,
            record_every: 10,
        }
    }
}

impl TransientOptions {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::BadParameters(format!("N = {} is too small", self.n)));
        }
        if !(self.dt_initial > 0.0 && self.dt_max >= self.dt_initial) {
            return Err(Error::BadParameters(
                "need 0 < dt_initial <= dt_max".into(),
            ));
        }
        if !(self.growth >= 1.0) {
            return Err(Error::BadParameters("growth must be at least 1".into()));
        }
        if !(self.newton_tol > 0.0) || self.max_newton == 0 || self.record_every == 0 {
            return Err(Error::BadParameters(
                "newton_tol, max_newton and record_every must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransientState {
    pub t: f64,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    pub phi: Vec<f64>,
}

/// `M = max(alpha1 l1, alpha1 r1, alpha2 l2, alpha2 r2)`.
pub fn invariant_region_bound(boundary: &BoundaryData, species: &IonSpecies) -> f64 {
    [
        species.alpha1 * boundary.l1,
        species.alpha1 * boundary.r1,
        species.alpha2 * boundary.l2,
        species.alpha2 * boundary.r2,
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InvariantRegionMonitor {
    pub m: f64,
    pub tol: f64,
    /// Smallest `alpha_i c_i` seen over the run.
    pub min_charge: f64,
    /// Largest `alpha_i c_i` seen over the run.
    pub max_charge: f64,
    pub violated: bool,
}

impl InvariantRegionMonitor {
    pub fn new(m: f64) -> Self {
        Self {
            m,
            tol: REGION_TOL,
            min_charge: f64::INFINITY,
            max_charge: f64::NEG_INFINITY,
            violated: false,
        }
    }

    pub fn observe(&mut self, state: &TransientState, species: &IonSpecies) {
        for (c, a) in [(&state.c1, species.alpha1), (&state.c2, species.alpha2)] {
            for v in c {
                self.min_charge = self.min_charge.min(a * v);
                self.max_charge = self.max_charge.max(a * v);
            }
        }
        self.violated = self.min_charge < -self.tol || self.max_charge > self.m + self.tol;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LyapunovTrace {
    pub k: f64,
    pub reference_c1: f64,
    pub reference_c2: f64,
    pub reference_phi: Vec<f64>,
    pub points: Vec<(f64, f64)>,
}

impl LyapunovTrace {
    /// Largest single-step increase of `L`.
    pub fn max_increase(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1].1 - w[0].1)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Slope and `R^2` of a least-squares fit of `ln L` against `t` over the
    /// second half of the run (points with `L > 0`).
    pub fn tail_log_fit(&self) -> Option<(f64, f64)> {
        let t_end = self.points.last()?.0;
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .filter(|(t, l)| *t >= 0.5 * t_end && *l > 0.0)
            .map(|(t, l)| (*t, l.ln()))
            .collect();
        linear_fit(&pts)
    }
}

/// Least-squares line through `pts`: `(slope, R^2)`.
pub fn linear_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((sxy / sxx, r2))
}

/// `L = sum_j (1/D_j) sum_i m_i (c_j - c_j0) ln(c_j / c_j0)`, trapezoidal in `x`.
pub fn lyapunov(
    state: &TransientState,
    k: f64,
    mesh: &Mesh,
    profile: &ChannelProfile,
    species: &IonSpecies,
) -> Result<f64> {
    let geom = cell_geometry(mesh, profile)?;
    lyapunov_with_mass(state, k, &geom.mass, species)
}

fn lyapunov_with_mass(state: &TransientState, k: f64, mass: &[f64], species: &IonSpecies) -> Result<f64> {
    let mut total = 0.0;
    for (c, c0, d) in [
        (&state.c1, k / species.alpha1, species.d1),
        (&state.c2, k / species.alpha2, species.d2),
    ] {
        let mut part = 0.0;
        for (node, (v, m)) in c.iter().zip(mass).enumerate() {
            if !(*v > 0.0) {
                return Err(Error::NonpositiveConcentration { node, value: *v });
            }
            part += m * (v - c0) * (v / c0).ln();
        }
        total += part / d;
    }
    Ok(total)
}

/// Mesh, geometry and coefficients for one transient problem.
#[derive(Debug, Clone)]
pub struct TransientSolver {
    pub problem: SteadyProblem,
    pub lambda: f64,
    pub mesh: Mesh,
    pub options: TransientOptions,
    geom: CellGeometry,
}

impl TransientSolver {
    /// Uses `lambda = 1 / mu^2` from the problem; the mesh is graded for that `mu`.
    pub fn new(problem: &SteadyProblem, options: TransientOptions) -> Result<Self> {
        options.validate()?;
        problem.species.validate()?;
        problem.boundary.validate()?;
        let mu = problem.mu;
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::BadParameters(format!("lambda needs mu > 0, got {mu}")));
        }
        let mesh = build_layer_mesh(options.n, mu, options.grading)?;
        Self::with_mesh(problem, mesh, options)
    }

    pub fn with_mesh(problem: &SteadyProblem, mesh: Mesh, options: TransientOptions) -> Result<Self> {
        let geom = cell_geometry(&mesh, &problem.profile)?;
        Ok(Self {
            lambda: problem.lambda(),
            problem: problem.clone(),
            mesh,
            options,
            geom,
        })
    }

    pub fn geometry(&self) -> &CellGeometry {
        &self.geom
    }

    /// Largest `dt` for which one explicit drift update could not leave the
    /// invariant region; the implicit scheme does not need it, it is reported
    /// as a time-scale reference.
    pub fn stability_bound(&self) -> f64 {
        let s = &self.problem.species;
        let m = invariant_region_bound(&self.problem.boundary, s);
        0.5 / (self.lambda * m * (s.d1 * s.alpha1 + s.d2 * s.alpha2))
    }

    /// Builds a state from interior data, pinning boundary values and
    /// solving for the potential.
    pub fn state_from(&self, t: f64, mut c1: Vec<f64>, mut c2: Vec<f64>) -> Result<TransientState> {
        let n = self.mesh.intervals();
        if c1.len() != n + 1 || c2.len() != n + 1 {
            return Err(Error::BadParameters(format!(
                "initial data must have {} nodal values",
                n + 1
            )));
        }
        let b = &self.problem.boundary;
        c1[0] = b.l1;
        c1[n] = b.r1;
        c2[0] = b.l2;
        c2[n] = b.r2;
        let phi = self.poisson(&c1, &c2)?;
        Ok(TransientState { t, c1, c2, phi })
    }

    /// Linear Poisson solve for given concentrations.
    pub fn poisson(&self, c1: &[f64], c2: &[f64]) -> Result<Vec<f64>> {
        poisson_with_geometry(
            c1,
            c2,
            &self.geom,
            &self.problem.species,
            self.problem.boundary.phi0,
            self.lambda,
        )
    }

    /// Implicit Euler for one species at frozen potential.
    fn transport(&self, c_old: &[f64], phi: &[f64], z: f64, d: f64, dt: f64) -> Result<Vec<f64>> {
        let g = &self.geom.conductance;
        let m = &self.geom.mass;
        let n = g.len();
        let mut lower = vec![0.0; n - 1];
        let mut diag = vec![0.0; n - 1];
        let mut upper = vec![0.0; n - 1];
        let mut rhs = vec![0.0; n - 1];
        for i in 1..n {
            let k = i - 1;
            let dr = z * (phi[i + 1] - phi[i]);
            let dl = z * (phi[i] - phi[i - 1]);
            diag[k] = m[i] / dt + d * (g[i] * bernoulli(dr) + g[i - 1] * bernoulli(-dl));
            let up = -d * g[i] * bernoulli(-dr);
            let lo = -d * g[i - 1] * bernoulli(dl);
            rhs[k] = m[i] * c_old[i] / dt;
            if i + 1 < n {
                upper[k] = up;
            } else {
                rhs[k] -= up * c_old[n];
            }
            if i > 1 {
                lower[k] = lo;
            } else {
                rhs[k] -= lo * c_old[0];
            }
        }
        let inner = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
        let mut out = c_old.to_vec();
        out[1..n].copy_from_slice(&inner);
        Ok(out)
    }

    /// One implicit step of size `dt`.
    pub fn step(&self, state: &TransientState, dt: f64) -> Result<TransientState> {
        if !(dt > 0.0) {
            return Err(Error::BadParameters(format!("dt = {dt} must be positive")));
        }
        let s = &self.problem.species;
        let z = valences(s);
        let mut fields = Fields {
            phi: state.phi.clone(),
            c1: self.transport(&state.c1, &state.phi, z[0], s.d1, dt)?,
            c2: self.transport(&state.c2, &state.phi, z[1], s.d2, dt)?,
        };
        let disc = Discretization {
            geom: &self.geom,
            species: s,
            mu: 1.0 / self.lambda.sqrt(),
            time: Some(TimeTerm {
                c_old: [&state.c1, &state.c2],
                rate: [1.0 / (s.d1 * dt), 1.0 / (s.d2 * dt)],
            }),
        };
        let settings = NewtonSettings {
            tol: self.options.newton_tol,
            max_iter: self.options.max_newton,
            min_damping: 2f64.powi(-20),
        };
        match newton(&disc, &mut fields, settings) {
            Ok(_) => {}
            Err(Error::NonConvergence { residual, .. }) => {
                return Err(Error::StepRejected(format!(
                    "implicit system not solved (scaled residual {residual:e})"
                )))
            }
            Err(Error::SingularSystem { row }) => {
                return Err(Error::StepRejected(format!("singular Jacobian at row {row}")))
            }
            Err(e) => return Err(e),
        }
        if let Some((node, v)) = fields
            .c1
            .iter()
            .chain(&fields.c2)
            .enumerate()
            .find(|(_, v)| !(**v > 0.0))
        {
            return Err(Error::StepRejected(format!(
                "concentration {v} at node {}",
                node % fields.c1.len()
            )));
        }
        Ok(TransientState {
            t: state.t + dt,
            c1: fields.c1,
            c2: fields.c2,
            phi: fields.phi,
        })
    }

    /// Reference steady state for equal boundary charges `k`:
    /// constant concentrations and `phi0 ∫_x^1 1/h / rho0`.
    pub fn reference_state(&self, k: f64) -> TransientState {
        let s = &self.problem.species;
        let tail = tail_inverse_area(&self.geom);
        let rho0 = tail[0];
        let n = tail.len();
        TransientState {
            t: 0.0,
            c1: vec![k / s.alpha1; n],
            c2: vec![k / s.alpha2; n],
            phi: tail.iter().map(|v| self.problem.boundary.phi0 * v / rho0).collect(),
        }
    }

    pub fn lyapunov(&self, state: &TransientState, k: f64) -> Result<f64> {
        lyapunov_with_mass(state, k, &self.geom.mass, &self.problem.species)
    }
}

fn poisson_with_geometry(
    c1: &[f64],
    c2: &[f64],
    geom: &CellGeometry,
    species: &IonSpecies,
    phi0: f64,
    lambda: f64,
) -> Result<Vec<f64>> {
    let g = &geom.conductance;
    let m = &geom.mass;
    let n = g.len();
    let mut lower = vec![0.0; n - 1];
    let mut diag = vec![0.0; n - 1];
    let mut upper = vec![0.0; n - 1];
    let mut rhs = vec![0.0; n - 1];
    for i in 1..n {
        let k = i - 1;
        diag[k] = g[i] + g[i - 1];
        rhs[k] = lambda * m[i] * (species.alpha1 * c1[i] - species.alpha2 * c2[i]);
        if i > 1 {
            lower[k] = -g[i - 1];
        } else {
            rhs[k] += g[0] * phi0;
        }
        if i + 1 < n {
            upper[k] = -g[i];
        }
    }
    let inner = solve_tridiagonal(&lower, &diag, &upper, &rhs)?;
    let mut phi = Vec::with_capacity(n + 1);
    phi.push(phi0);
    phi.extend(inner);
    phi.push(0.0);
    Ok(phi)
}

/// Solves `-(h phi')' = lambda h (alpha1 c1 - alpha2 c2)` with
/// `phi(0) = phi0`, `phi(1) = 0`.
pub fn poisson_solve(
    c1: &[f64],
    c2: &[f64],
    mesh: &Mesh,
    profile: &ChannelProfile,
    species: &IonSpecies,
    phi0: f64,
    lambda: f64,
) -> Result<Vec<f64>> {
    if !(lambda > 0.0) {
        return Err(Error::BadParameters(format!("lambda = {lambda} must be positive")));
    }
    let geom = cell_geometry(mesh, profile)?;
    poisson_with_geometry(c1, c2, &geom, species, phi0, lambda)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransientRun {
    pub trajectory: Vec<TransientState>,
    pub final_state: TransientState,
    pub monitor: InvariantRegionMonitor,
    pub lyapunov: Option<LyapunovTrace>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Integrates from `initial` to time `t_end` with adaptive steps.
pub fn run_transient(solver: &TransientSolver, initial: TransientState, t_end: f64) -> Result<TransientRun> {
    let species = &solver.problem.species;
    let boundary = &solver.problem.boundary;
    let opts = &solver.options;
    let m = invariant_region_bound(boundary, species);
    for (c, a) in [(&initial.c1, species.alpha1), (&initial.c2, species.alpha2)] {
        if c.iter().any(|v| !(a * v >= 0.0 && a * v <= m)) {
            return Err(Error::BadParameters(
                "initial data must satisfy 0 <= alpha_i c_i <= M".into(),
            ));
        }
    }
    let mut monitor = InvariantRegionMonitor::new(m);
    monitor.observe(&initial, species);
    let mut lyap = match boundary.common_charge(species) {
        Some(k) => {
            let reference = solver.reference_state(k);
            let l0 = solver.lyapunov(&initial, k)?;
            Some(LyapunovTrace {
                k,
                reference_c1: reference.c1[0],
                reference_c2: reference.c2[0],
                reference_phi: reference.phi,
                points: vec![(initial.t, l0)],
            })
        }
        None => None,
    };

    let mut trajectory = vec![initial.clone()];
    let mut state = initial;
    let mut dt = opts.dt_initial;
    let (mut accepted, mut rejected) = (0, 0);
    while state.t < t_end * (1.0 - 1e-14) {
        let h = dt.min(t_end - state.t);
        match solver.step(&state, h) {
            Ok(next) => {
                state = next;
                accepted += 1;
                monitor.observe(&state, species);
                if let Some(tr) = lyap.as_mut() {
                    let l = solver.lyapunov(&state, tr.k)?;
                    tr.points.push((state.t, l));
                }
                if accepted % opts.record_every == 0 {
                    trajectory.push(state.clone());
                }
                dt = (dt * opts.growth).min(opts.dt_max);
            }
            Err(Error::StepRejected(_)) => {
                rejected += 1;
                dt = 0.5 * h;
                if dt < MIN_DT {
                    return Err(Error::StagnantStep { t: state.t, dt });
                }
            }
            Err(e) => return Err(e),
        }
    }
    if trajectory.last().map(|s| s.t) != Some(state.t) {
        trajectory.push(state.clone());
    }
    Ok(TransientRun {
        trajectory,
        final_state: state,
        monitor,
        lyapunov: lyap,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}
