//! Finite-`mu` steady states: exponentially fitted finite volumes on a
//! layer-graded mesh, solved by damped Newton with continuation in `mu`.

use serde::{Deserialize, Serialize};

use crate::asymptotics::{limiting_fluxes, singular_orbit, FluxPair};
use crate::discretization::{
    build_layer_mesh, cell_fluxes, cell_geometry, sg_flux, sg_flux_partials, valences,
    CellGeometry, GradingKind, Mesh,
};
use crate::error::{Error, Result};
use crate::numerics::linalg::BandMatrix;
use crate::problem::{IonSpecies, SteadyProblem};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitialGuess {
    /// Linear interpolation of the boundary data, with continuation in `mu`.
    #[default]
    Linear,
    /// Composite singular-orbit approximation at the target `mu`, no continuation.
    SingularOrbitComposite,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Number of mesh intervals.
    pub n: usize,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub min_damping: f64,
    pub mu_start: f64,
    pub continuation_ratio: f64,
    pub initial_guess: InitialGuess,
    pub grading: GradingKind,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            n: 801,
            newton_tol: 1e-10,
            max_newton: 50,
            min_damping: 2f64.powi(-20),
            mu_start: 0.5,
            continuation_ratio: 0.5,
            initial_guess: InitialGuess::Linear,
            grading: GradingKind::Tanh,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.n < 11 {
            return Err(Error::BadParameters(format!("N = {} must be at least 11", self.n)));
        }
        for (name, v) in [
            ("newton_tol", self.newton_tol),
            ("min_damping", self.min_damping),
            ("mu_start", self.mu_start),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::BadParameters(format!("{name} = {v} must be positive")));
            }
        }
        if self.max_newton == 0 {
            return Err(Error::BadParameters("max_newton must be positive".into()));
        }
        if !(self.continuation_ratio > 0.0 && self.continuation_ratio < 1.0) {
            return Err(Error::BadParameters(format!(
                "continuation_ratio = {} must lie in (0, 1)",
                self.continuation_ratio
            )));
        }
        Ok(())
    }

    /// Continuation values ending at `target`.
    pub fn schedule(&self, target: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if self.initial_guess == InitialGuess::Linear {
            let mut mu = self.mu_start;
            while mu > target * (1.0 + 1e-12) {
                out.push(mu);
                mu *= self.continuation_ratio;
            }
        }
        out.push(target);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageReport {
    pub mu: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteSolution {
    pub mesh: Mesh,
    pub mu: f64,
    pub phi: Vec<f64>,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    pub j1_cell: Vec<f64>,
    pub j2_cell: Vec<f64>,
    pub converged: bool,
    /// Max-norm of the row-scaled residual.
    pub residual: f64,
    /// Newton iterations summed over all continuation stages.
    pub iterations: usize,
    pub stages: Vec<StageReport>,
    pub species: IonSpecies,
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

impl DiscreteSolution {
    /// Largest relative deviation of a cellwise flux from its mean.
    pub fn flux_spread(&self) -> f64 {
        [&self.j1_cell, &self.j2_cell]
            .iter()
            .map(|j| {
                let m = mean(j);
                let dev = j.iter().fold(0.0f64, |a, v| a.max((v - m).abs()));
                if m == 0.0 {
                    dev
                } else {
                    dev / m.abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

pub fn extract_fluxes(solution: &DiscreteSolution) -> Result<FluxPair> {
    if !solution.converged {
        return Err(Error::NotConverged);
    }
    Ok(FluxPair::from_scaled(
        mean(&solution.j1_cell),
        mean(&solution.j2_cell),
        &solution.species,
    ))
}

/// Nodal fields with boundary values in place.
#[derive(Debug, Clone)]
pub(crate) struct Fields {
    pub phi: Vec<f64>,
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
}

impl Fields {
    fn get(&self, var: usize) -> &[f64] {
        match var {
            0 => &self.phi,
            1 => &self.c1,
            _ => &self.c2,
        }
    }

    fn get_mut(&mut self, var: usize) -> &mut Vec<f64> {
        match var {
            0 => &mut self.phi,
            1 => &mut self.c1,
            _ => &mut self.c2,
        }
    }
}

/// Implicit-Euler mass term `m_i (c_i - c_i_old) / (D dt)` on the transport rows.
pub(crate) struct TimeTerm<'a> {
    pub c_old: [&'a [f64]; 2],
    /// `1 / (D_k dt)`
    pub rate: [f64; 2],
}

pub(crate) struct Discretization<'a> {
    pub geom: &'a CellGeometry,
    pub species: &'a IonSpecies,
    pub mu: f64,
    pub time: Option<TimeTerm<'a>>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct NewtonSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub min_damping: f64,
}

impl From<&SolverOptions> for NewtonSettings {
    fn from(o: &SolverOptions) -> Self {
        Self {
            tol: o.newton_tol,
            max_iter: o.max_newton,
            min_damping: o.min_damping,
        }
    }
}

/// Unknown index of variable `var` at interior node `node`.
#[inline]
fn col(node: usize, var: usize) -> usize {
    3 * (node - 1) + var
}

impl Discretization<'_> {
    fn nodes(&self) -> usize {
        self.geom.mass.len()
    }

    /// Unscaled residual and per-row scale.
    fn residual(&self, f: &Fields) -> (Vec<f64>, Vec<f64>) {
        let n = self.nodes() - 1;
        let g = &self.geom.conductance;
        let m = &self.geom.mass;
        let (a1, a2) = (self.species.alpha1, self.species.alpha2);
        let mu2 = self.mu * self.mu;
        let z = valences(self.species);
        let mut r = vec![0.0; 3 * (n - 1)];
        let mut s = vec![0.0; 3 * (n - 1)];
        for i in 1..n {
            let row = col(i, 0);
            let right = g[i] * (f.phi[i + 1] - f.phi[i]);
            let left = g[i - 1] * (f.phi[i] - f.phi[i - 1]);
            r[row] = mu2 * (right - left) + m[i] * (a1 * f.c1[i] - a2 * f.c2[i]);
            s[row] = mu2 * (right.abs() + left.abs()) + m[i] * (a1 * f.c1[i] + a2 * f.c2[i]);
            for k in 0..2 {
                let c = f.get(k + 1);
                let (fr, sr) = flux_terms(g[i], z[k], f.phi[i], f.phi[i + 1], c[i], c[i + 1]);
                let (fl, sl) =
                    flux_terms(g[i - 1], z[k], f.phi[i - 1], f.phi[i], c[i - 1], c[i]);
                r[row + 1 + k] = fr - fl;
                s[row + 1 + k] = sr + sl;
                if let Some(tt) = &self.time {
                    let w = m[i] * tt.rate[k];
                    r[row + 1 + k] += w * (c[i] - tt.c_old[k][i]);
                    s[row + 1 + k] += w * (c[i].abs() + tt.c_old[k][i].abs());
                }
            }
        }
        for v in &mut s {
            if !(*v > 0.0) {
                *v = 1.0;
            }
        }
        (r, s)
    }

    fn jacobian(&self, f: &Fields) -> BandMatrix {
        let n = self.nodes() - 1;
        let g = &self.geom.conductance;
        let m = &self.geom.mass;
        let (a1, a2) = (self.species.alpha1, self.species.alpha2);
        let mu2 = self.mu * self.mu;
        let z = valences(self.species);
        let mut jac = BandMatrix::zeros(3 * (n - 1), 5, 5);
        let interior = |j: usize| j >= 1 && j < n;
        for i in 1..n {
            let row = col(i, 0);
            if interior(i - 1) {
                jac.add(row, col(i - 1, 0), mu2 * g[i - 1]);
            }
            jac.add(row, col(i, 0), -mu2 * (g[i] + g[i - 1]));
            if interior(i + 1) {
                jac.add(row, col(i + 1, 0), mu2 * g[i]);
            }
            jac.add(row, col(i, 1), m[i] * a1);
            jac.add(row, col(i, 2), -m[i] * a2);
            for k in 0..2 {
                let c = f.get(k + 1);
                let var = k + 1;
                let r = row + var;
                let p = sg_flux_partials(g[i], z[k], f.phi[i], f.phi[i + 1], c[i], c[i + 1]);
                let q = sg_flux_partials(g[i - 1], z[k], f.phi[i - 1], f.phi[i], c[i - 1], c[i]);
                jac.add(r, col(i, 0), p[0] - q[1]);
                let mass = self.time.as_ref().map_or(0.0, |tt| m[i] * tt.rate[k]);
                jac.add(r, col(i, var), p[2] - q[3] + mass);
                if interior(i + 1) {
                    jac.add(r, col(i + 1, 0), p[1]);
                    jac.add(r, col(i + 1, var), p[3]);
                }
                if interior(i - 1) {
                    jac.add(r, col(i - 1, 0), -q[0]);
                    jac.add(r, col(i - 1, var), -q[2]);
                }
            }
        }
        jac
    }
}

/// Flux value and the magnitude of its two terms.
#[inline]
fn flux_terms(g: f64, z: f64, pl: f64, pr: f64, cl: f64, cr: f64) -> (f64, f64) {
    let value = sg_flux(g, z, pl, pr, cl, cr);
    let d = z * (pr - pl);
    let size = g * (crate::numerics::bernoulli(d) * cl.abs() + crate::numerics::bernoulli(-d) * cr.abs());
    (value, size)
}

fn scaled_norms(r: &[f64], s: &[f64]) -> (f64, f64) {
    let mut max = 0.0f64;
    let mut sq = 0.0;
    for (a, b) in r.iter().zip(s) {
        let v = a / b;
        max = max.max(v.abs());
        sq += v * v;
    }
    (max, sq.sqrt())
}

/// Damped Newton at one `mu`; returns `(iterations, scaled residual)`.
pub(crate) fn newton(d: &Discretization, f: &mut Fields, opts: NewtonSettings) -> Result<(usize, f64)> {
    let n = d.nodes() - 1;
    let mut iterations = 0;
    loop {
        let (r, s) = d.residual(f);
        let (res_max, res_l2) = scaled_norms(&r, &s);
        if !res_max.is_finite() {
            return Err(Error::NonConvergence {
                mu: d.mu,
                residual: res_max,
            });
        }
        if res_max < opts.tol {
            return Ok((iterations, res_max));
        }
        if iterations == opts.max_iter {
            return Err(Error::NonConvergence {
                mu: d.mu,
                residual: res_max,
            });
        }
        iterations += 1;
        let mut jac = d.jacobian(f);
        let mut step: Vec<f64> = r.iter().zip(&s).map(|(a, b)| -a / b).collect();
        for (i, scale) in s.iter().enumerate() {
            jac.scale_row(i, 1.0 / scale);
        }
        jac.solve_in_place(&mut step)?;

        let mut t = 1.0;
        let accepted = loop {
            let mut trial = f.clone();
            let mut positive = true;
            for i in 1..n {
                for var in 0..3 {
                    let v = &mut trial.get_mut(var)[i];
                    *v += t * step[col(i, var)];
                    if var > 0 && !(*v > 0.0) {
                        positive = false;
                    }
                }
            }
            if positive {
                let (rt, _) = d.residual(&trial);
                let (_, trial_l2) = scaled_norms(&rt, &s);
                if trial_l2 < (1.0 - 1e-4 * t) * res_l2 {
                    break Some(trial);
                }
            }
            t *= 0.5;
            if t < opts.min_damping {
                break None;
            }
        };
        match accepted {
            Some(next) => *f = next,
            None => {
                return Err(Error::NonConvergence {
                    mu: d.mu,
                    residual: res_max,
                })
            }
        }
    }
}

fn linear_guess(problem: &SteadyProblem, mesh: &Mesh) -> Fields {
    let b = &problem.boundary;
    let x = mesh.nodes();
    Fields {
        phi: x.iter().map(|x| b.phi0 * (1.0 - x)).collect(),
        c1: x.iter().map(|x| b.l1 + (b.r1 - b.l1) * x).collect(),
        c2: x.iter().map(|x| b.l2 + (b.r2 - b.l2) * x).collect(),
    }
}

fn composite_guess(problem: &SteadyProblem, mesh: &Mesh) -> Result<Fields> {
    let orbit = singular_orbit(problem)?;
    let mut f = linear_guess(problem, mesh);
    let x = mesh.nodes();
    let n = x.len() - 1;
    for i in 1..n {
        let v = orbit.composite(x[i])?;
        f.phi[i] = v.phi;
        // Keep the guess strictly positive even where the composite undershoots.
        f.c1[i] = v.c1.max(1e-3 * f.c1[i]);
        f.c2[i] = v.c2.max(1e-3 * f.c2[i]);
    }
    Ok(f)
}

/// Extra stages inserted between two failed neighbours.
const MAX_STAGE_REFINEMENTS: usize = 8;

pub fn solve_steady_bvp(problem: &SteadyProblem, options: &SolverOptions) -> Result<DiscreteSolution> {
    options.validate()?;
    problem.species.validate()?;
    problem.boundary.validate()?;
    let mu = problem.mu;
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidProblem(format!(
            "finite-mu solver needs mu > 0, got {mu}"
        )));
    }
    let mesh = build_layer_mesh(options.n, mu, options.grading)?;
    let geom = cell_geometry(&mesh, &problem.profile)?;
    let mut fields = match options.initial_guess {
        InitialGuess::Linear => linear_guess(problem, &mesh),
        InitialGuess::SingularOrbitComposite => composite_guess(problem, &mesh)?,
    };

    let mut pending: Vec<f64> = options.schedule(mu);
    pending.reverse();
    let mut stages = Vec::new();
    let mut last_mu: Option<f64> = None;
    let mut refinements = 0;
    let mut residual = f64::INFINITY;
    while let Some(stage_mu) = pending.pop() {
        let disc = Discretization {
            geom: &geom,
            species: &problem.species,
            mu: stage_mu,
            time: None,
        };
        let mut trial = fields.clone();
        match newton(&disc, &mut trial, options.into()) {
            Ok((iterations, res)) => {
                fields = trial;
                residual = res;
                last_mu = Some(stage_mu);
                stages.push(StageReport {
                    mu: stage_mu,
                    iterations,
                    residual: res,
                });
            }
            Err(err @ Error::NonConvergence { .. }) => {
                let Some(prev) = last_mu else { return Err(err) };
                if refinements == MAX_STAGE_REFINEMENTS {
                    return Err(err);
                }
                refinements += 1;
                pending.push(stage_mu);
                pending.push((prev * stage_mu).sqrt());
            }
            Err(e) => return Err(e),
        }
    }

    let (j1_cell, j2_cell) = cell_fluxes(&geom, &problem.species, &fields.phi, &fields.c1, &fields.c2);
    Ok(DiscreteSolution {
        mesh,
        mu,
        phi: fields.phi,
        c1: fields.c1,
        c2: fields.c2,
        j1_cell,
        j2_cell,
        converged: true,
        residual,
        iterations: stages.iter().map(|s| s.iterations).sum(),
        stages,
        species: problem.species,
    })
}

/// Relative distance between two flux pairs (absolute where the reference vanishes).
pub fn flux_relative_error(numeric: &FluxPair, reference: &FluxPair) -> f64 {
    let rel = |a: f64, b: f64| {
        if b == 0.0 {
            a.abs()
        } else {
            ((a - b) / b).abs()
        }
    };
    rel(numeric.j1, reference.j1).max(rel(numeric.j2, reference.j2))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRow {
    pub mu: f64,
    pub j1: Option<f64>,
    pub j2: Option<f64>,
    pub rel_err: Option<f64>,
    pub iterations: Option<usize>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub limiting: FluxPair,
    pub rows: Vec<StudyRow>,
    /// `ln(e_k / e_{k+1}) / ln(mu_k / mu_{k+1})` for consecutive solved rows.
    pub orders: Vec<Option<f64>>,
}

impl ConvergenceStudy {
    pub fn errors_decrease(&self) -> bool {
        let errs: Vec<Option<f64>> = self.rows.iter().map(|r| r.rel_err).collect();
        errs.windows(2).all(|w| matches!(w, [Some(a), Some(b)] if b < a))
    }
}

pub fn mu_convergence_study(
    problem: &SteadyProblem,
    mu_list: &[f64],
    options: &SolverOptions,
) -> Result<ConvergenceStudy> {
    if mu_list.is_empty() || mu_list.iter().any(|m| !(*m > 0.0)) {
        return Err(Error::BadParameters("mu list must be non-empty and positive".into()));
    }
    if mu_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::BadParameters("mu list must decrease".into()));
    }
    let limiting = limiting_fluxes(problem)?;
    let rows: Vec<StudyRow> = mu_list
        .iter()
        .map(|&mu| match solve_steady_bvp(&problem.with_mu(mu), options) {
            Ok(sol) => {
                let f = extract_fluxes(&sol).expect("solver returns converged solutions");
                StudyRow {
                    mu,
                    j1: Some(f.j1),
                    j2: Some(f.j2),
                    rel_err: Some(flux_relative_error(&f, &limiting)),
                    iterations: Some(sol.iterations),
                    error: None,
                }
            }
            Err(e) => StudyRow {
                mu,
                j1: None,
                j2: None,
                rel_err: None,
                iterations: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let orders = rows
        .windows(2)
        .map(|w| match (w[0].rel_err, w[1].rel_err) {
            (Some(a), Some(b)) if a > 0.0 && b > 0.0 => Some((a / b).ln() / (w[0].mu / w[1].mu).ln()),
            _ => None,
        })
        .collect();
    Ok(ConvergenceStudy {
        limiting,
        rows,
        orders,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ChannelProfile;
    use crate::problem::BoundaryData;

    fn opts(n: usize) -> SolverOptions {
        SolverOptions {
            n,
            ..Default::default()
        }
    }

    #[test]
    fn schedule_is_geometric_then_target() {
        let s = SolverOptions::default().schedule(0.1);
        assert_eq!(s, vec![0.5, 0.25, 0.125, 0.1]);
        let s = SolverOptions {
            initial_guess: InitialGuess::SingularOrbitComposite,
            ..Default::default()
        }
        .schedule(0.1);
        assert_eq!(s, vec![0.1]);
    }

    #[test]
    fn standard_problem_is_linear_exact() {
        // c = 1 + x, phi = 0 solves the standard problem for every mu.
        let sol = solve_steady_bvp(&SteadyProblem::standard(0.02), &opts(201)).unwrap();
        for (x, c) in sol.mesh.nodes().iter().zip(&sol.c1) {
            assert!((c - (1.0 + x)).abs() < 1e-9);
        }
        let f = extract_fluxes(&sol).unwrap();
        assert!((f.j1 + 1.0).abs() < 1e-9 && (f.j2 + 1.0).abs() < 1e-9);
    }

    #[test]
    fn zero_bias_symmetric_has_no_flux() {
        let p = SteadyProblem::new(
            ChannelProfile::constant(1.0).unwrap(),
            IonSpecies::symmetric(),
            BoundaryData::new(0.0, 2.0, 3.0, 2.0, 3.0).unwrap(),
            0.05,
        )
        .unwrap();
        let sol = solve_steady_bvp(&p, &opts(101)).unwrap();
        let f = extract_fluxes(&sol).unwrap();
        assert!(f.j1.abs() < 1e-8 && f.j2.abs() < 1e-8);
    }

    #[test]
    fn layered_problem_converges_with_constant_flux() {
        let p = SteadyProblem::new(
            ChannelProfile::constant(1.0).unwrap(),
            IonSpecies::symmetric(),
            BoundaryData::new(1.0, 4.0, 1.0, 2.0, 2.0).unwrap(),
            0.02,
        )
        .unwrap();
        let sol = solve_steady_bvp(&p, &opts(401)).unwrap();
        assert!(sol.flux_spread() < 1e-6);
        assert!(sol.c1.iter().chain(&sol.c2).all(|c| *c > 0.0));
        assert_eq!(sol.phi[0], 1.0);
        assert_eq!(*sol.phi.last().unwrap(), 0.0);
    }

    #[test]
    fn unconverged_solution_has_no_fluxes() {
        let mut sol = solve_steady_bvp(&SteadyProblem::standard(0.1), &opts(21)).unwrap();
        sol.converged = false;
        assert_eq!(extract_fluxes(&sol), Err(Error::NotConverged));
    }
}
