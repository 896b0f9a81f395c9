//! Command implementations. Each returns JSON results plus the CSV tables
//! to write; nothing here touches the file system.

use std::f64::consts::PI;

use clap::ValueEnum;
use pnp_core::asymptotics::{
    boundary_layer_endpoint, limiting_fluxes, log_ratios, regular_layer, singular_orbit, FluxPair,
};
use pnp_core::bvp::{extract_fluxes, flux_relative_error, solve_steady_bvp};
use pnp_core::fast::{integrate_layer, LayerOrbit};
use pnp_core::transient::{
    invariant_region_bound, run_transient, TransientRun, TransientSolver, TransientState,
};
use pnp_core::{ChannelProfile, ProfileKind, Side, SteadyProblem};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{InitialCondition, RunConfig, SweepAxis, SweepMethod};
use crate::error::{CliError, Result};
use crate::output::{num, Table};
use crate::validate::run_suite;

/// Environment variable capping sweep parallelism.
pub const THREADS_ENV: &str = "PNP_NUM_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    SteadyAsymptotic,
    SteadyBvp,
    Layers,
    Transient,
    Sweep,
    Validate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SteadyAsymptotic => "steady-asymptotic",
            Command::SteadyBvp => "steady-bvp",
            Command::Layers => "layers",
            Command::Transient => "transient",
            Command::Sweep => "sweep",
            Command::Validate => "validate",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub results: Value,
    pub tables: Vec<Table>,
    /// Set when the command ran but its checks did not all pass.
    pub failure: Option<(usize, usize)>,
}

impl Outcome {
    fn ok(results: Value, tables: Vec<Table>) -> Self {
        Self {
            results,
            tables,
            failure: None,
        }
    }
}

pub fn dispatch(command: Command, cfg: &RunConfig) -> Result<Outcome> {
    match command {
        Command::SteadyAsymptotic => steady_asymptotic(cfg),
        Command::SteadyBvp => steady_bvp(cfg),
        Command::Layers => layers(cfg),
        Command::Transient => transient(cfg),
        Command::Sweep => sweep(cfg),
        Command::Validate => {
            let checks = run_suite(&cfg.validate, cfg.seed);
            let failed = checks.iter().filter(|c| !c.passed).count();
            let total = checks.len();
            let results = json!({ "checks": checks, "passed": total - failed, "failed": failed });
            Ok(Outcome {
                results,
                tables: Vec::new(),
                failure: (failed > 0).then_some((failed, total)),
            })
        }
    }
}

fn flux_json(f: &FluxPair) -> Value {
    json!({ "j1": f.j1, "j2": f.j2, "jbar1": f.jbar1, "jbar2": f.jbar2 })
}

fn steady_asymptotic(cfg: &RunConfig) -> Result<Outcome> {
    let problem = cfg.steady_problem()?;
    let mu = problem.mu;
    let lr = log_ratios(&problem);
    let reg = regular_layer(&problem)?;
    let left = boundary_layer_endpoint(&problem, Side::Left);
    let right = boundary_layer_endpoint(&problem, Side::Right);
    let n = cfg.asymptotic.samples;
    let grid: Vec<f64> = (0..=n).map(|k| k as f64 / n as f64).collect();

    let mut outer = Table::new("regular_layer.csv", &["x", "phi", "w", "c1", "c2"]);
    for &x in &grid {
        let s = reg.state(x)?;
        outer.push(&[x, s.phi, s.w, s.c1, s.c2]);
    }
    let mut tables = vec![outer];
    if mu > 0.0 {
        let orbit = singular_orbit(&problem)?;
        let mut comp = Table::new("composite.csv", &["x", "phi", "c1", "c2"]);
        for &x in &grid {
            let c = orbit.composite(x)?;
            comp.push(&[x, c.phi, c.c1, c.c2]);
        }
        tables.push(comp);
    }
    let results = json!({
        "mu": mu,
        "rho0": reg.rho0,
        "log_ratios": lr,
        "fluxes": flux_json(&reg.fluxes),
        "left_endpoint": left,
        "right_endpoint": right,
        "regular_layer": { "nu0": reg.nu0, "w0": reg.w0, "tau0": reg.tau0 },
    });
    Ok(Outcome::ok(results, tables))
}

fn steady_bvp(cfg: &RunConfig) -> Result<Outcome> {
    let problem = cfg.steady_problem()?;
    let mu = problem.mu;
    if !(mu > 0.0) {
        return Err(CliError::Validation("steady-bvp needs mu > 0".into()));
    }
    let sol = solve_steady_bvp(&problem, &cfg.bvp)?;
    let numeric = extract_fluxes(&sol)?;
    let limiting = limiting_fluxes(&problem)?;
    let rel = flux_relative_error(&numeric, &limiting);
    let mut table = Table::new("solution.csv", &["x", "phi", "c1", "c2"]);
    for (i, &x) in sol.mesh.nodes().iter().enumerate() {
        table.push(&[x, sol.phi[i], sol.c1[i], sol.c2[i]]);
    }
    let results = json!({
        "mu": mu,
        "lambda": problem.lambda(),
        "n": sol.mesh.intervals(),
        "grading": sol.mesh.grading(),
        "converged": sol.converged,
        "residual": sol.residual,
        "iterations": sol.iterations,
        "stages": sol.stages,
        "flux_spread": sol.flux_spread(),
        "fluxes": flux_json(&numeric),
        "limiting_fluxes": flux_json(&limiting),
        "relative_error": rel,
        "comparison_tolerance": 5.0 * mu,
        "within_tolerance": rel < 5.0 * mu,
    });
    Ok(Outcome::ok(results, vec![table]))
}

fn layer_table(orbit: &LayerOrbit, file: &str) -> Table {
    let mut t = Table::new(file, &["xi", "phi", "u", "v", "w", "H1", "H2", "H3"]);
    for s in &orbit.samples {
        let z = &s.state;
        let h = s.integrals;
        t.push(&[s.xi, z.phi, z.u, z.v, z.w, h[0], h[1], h[2]]);
    }
    t
}

fn layer_json(orbit: &LayerOrbit) -> Value {
    let l = &orbit.landing;
    let z = &orbit.terminal;
    json!({
        "has_layer": orbit.has_layer,
        "samples": orbit.samples.len(),
        "xi_end": orbit.xi_end(),
        "terminal": [z.phi, z.u, z.v, z.w],
        "landing": [l.phi, l.u, l.v, l.w],
        "terminal_error": orbit.terminal_error,
        "integral_drift": orbit.max_drift,
        "tail_decay_slope": orbit.tail_decay_slope(),
        "expected_slope": -l.w.sqrt(),
        "tol": orbit.tol,
    })
}

fn layers(cfg: &RunConfig) -> Result<Outcome> {
    let problem = cfg.steady_problem()?;
    let tol = cfg.layers.tol;
    let left = integrate_layer(&problem, Side::Left, cfg.layers.xi_max, tol)?;
    let right = integrate_layer(&problem, Side::Right, cfg.layers.xi_max, tol)?;
    let results = json!({ "left": layer_json(&left), "right": layer_json(&right) });
    let tables = vec![
        layer_table(&left, "left_layer.csv"),
        layer_table(&right, "right_layer.csv"),
    ];
    Ok(Outcome::ok(results, tables))
}

/// Initial concentrations on the solver mesh.
pub fn initial_state(
    solver: &TransientSolver,
    initial: &InitialCondition,
    seed: u64,
) -> Result<TransientState> {
    let b = solver.problem.boundary;
    let sp = solver.problem.species;
    let x = solver.mesh.nodes();
    let (c1, c2): (Vec<f64>, Vec<f64>) = match *initial {
        InitialCondition::PerturbedLinear {
            amplitude1,
            amplitude2,
            mode,
        } => x
            .iter()
            .map(|&x| {
                let bump = (mode as f64 * PI * x).sin();
                (
                    (b.l1 + (b.r1 - b.l1) * x) * (1.0 + amplitude1 * bump),
                    (b.l2 + (b.r2 - b.l2) * x) * (1.0 + amplitude2 * bump),
                )
            })
            .unzip(),
        InitialCondition::Random => {
            let m = invariant_region_bound(&b, &sp);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            x.iter()
                .map(|_| {
                    let q1 = (1.0 - rng.gen::<f64>()) * m;
                    let q2 = (1.0 - rng.gen::<f64>()) * m;
                    (q1 / sp.alpha1, q2 / sp.alpha2)
                })
                .unzip()
        }
    };
    Ok(solver.state_from(0.0, c1, c2)?)
}

fn transient_run(cfg: &RunConfig, problem: &SteadyProblem, seed: u64) -> Result<(TransientSolver, TransientRun)> {
    if !(problem.mu > 0.0) {
        return Err(CliError::Validation("transient runs need mu > 0".into()));
    }
    let solver = TransientSolver::new(problem, cfg.transient.options)?;
    let init = initial_state(&solver, &cfg.transient.initial, seed)?;
    let run = run_transient(&solver, init, cfg.transient.t_end)?;
    Ok((solver, run))
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn transient_summary(solver: &TransientSolver, run: &TransientRun) -> Value {
    let lyap = run.lyapunov.as_ref().map(|tr| {
        let fit = tr.tail_log_fit();
        let reference = solver.reference_state(tr.k);
        let fs = &run.final_state;
        let err = sup_diff(&fs.c1, &reference.c1)
            .max(sup_diff(&fs.c2, &reference.c2))
            .max(sup_diff(&fs.phi, &reference.phi));
        json!({
            "k": tr.k,
            "initial": tr.points.first().map(|p| p.1),
            "final": tr.points.last().map(|p| p.1),
            "max_increase": tr.max_increase(),
            "tail_slope": fit.map(|f| f.0),
            "tail_r2": fit.map(|f| f.1),
            "final_sup_error": err,
        })
    });
    json!({
        "t_end": run.final_state.t,
        "lambda": solver.lambda,
        "n": solver.mesh.intervals(),
        "accepted_steps": run.accepted_steps,
        "rejected_steps": run.rejected_steps,
        "stability_bound": solver.stability_bound(),
        "monitor": run.monitor,
        "lyapunov": lyap,
    })
}

fn transient(cfg: &RunConfig) -> Result<Outcome> {
    let problem = cfg.steady_problem()?;
    let (solver, run) = transient_run(cfg, &problem, cfg.seed)?;
    let mut traj = Table::new("trajectory.csv", &["t", "x", "c1", "c2", "phi"]);
    for st in &run.trajectory {
        for (i, &x) in solver.mesh.nodes().iter().enumerate() {
            traj.push(&[st.t, x, st.c1[i], st.c2[i], st.phi[i]]);
        }
    }
    let mut tables = vec![traj];
    if let Some(tr) = &run.lyapunov {
        let mut t = Table::new("lyapunov.csv", &["t", "L"]);
        for &(time, l) in &tr.points {
            t.push(&[time, l]);
        }
        tables.push(t);
    }
    Ok(Outcome::ok(transient_summary(&solver, &run), tables))
}

/// Seed for sweep point `index`, independent of scheduling.
pub fn point_seed(base: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index as u64 + 1);
    rng.next_u64()
}

fn sweep_point_problem(cfg: &RunConfig, axis: &SweepAxis, value: f64) -> Result<SteadyProblem> {
    let base = cfg.steady_problem()?;
    let normalized = |kind: ProfileKind| -> Result<ChannelProfile> {
        Ok(ChannelProfile::new(kind)?.normalize_volume()?)
    };
    Ok(match axis {
        SweepAxis::Mu { .. } => base.with_mu(value),
        SweepAxis::Phi0 { .. } => {
            let mut b = base.boundary;
            b.phi0 = value;
            SteadyProblem::new(base.profile, base.species, b, base.mu)?
        }
        SweepAxis::BumpAmplitude { width, .. } => {
            let p = normalized(ProfileKind::Bump {
                base: 1.0,
                amplitude: value,
                width: *width,
            })?;
            SteadyProblem::new(p, base.species, base.boundary, base.mu)?
        }
        SweepAxis::AffineSlope { .. } => {
            let p = normalized(ProfileKind::AffineArea { a: 1.0, b: value })?;
            SteadyProblem::new(p, base.species, base.boundary, base.mu)?
        }
    })
}

fn sweep_point(cfg: &RunConfig, method: SweepMethod, problem: &SteadyProblem, seed: u64) -> Result<Vec<String>> {
    let limiting = limiting_fluxes(problem)?;
    let rho0 = problem.profile.inverse_area_integral(0.0, 1.0, 1e-12)?;
    let mut cells = vec![num(rho0)];
    match method {
        SweepMethod::Asymptotic => {
            for v in [limiting.j1, limiting.j2, limiting.jbar1, limiting.jbar2] {
                cells.push(num(v));
            }
        }
        SweepMethod::Bvp => {
            let sol = solve_steady_bvp(problem, &cfg.bvp)?;
            let f = extract_fluxes(&sol)?;
            for v in [f.j1, f.j2, f.jbar1, f.jbar2, flux_relative_error(&f, &limiting)] {
                cells.push(num(v));
            }
            cells.push(sol.iterations.to_string());
        }
        SweepMethod::Transient => {
            let (solver, run) = transient_run(cfg, problem, seed)?;
            let m = &run.monitor;
            cells.push(num(m.min_charge));
            cells.push(num(m.max_charge));
            cells.push(m.violated.to_string());
            let l = run
                .lyapunov
                .as_ref()
                .and_then(|tr| tr.points.last().map(|p| num(p.1)))
                .unwrap_or_default();
            cells.push(l);
            cells.push(num(solver.stability_bound()));
        }
    }
    Ok(cells)
}

fn sweep_header(method: SweepMethod) -> Vec<&'static str> {
    let mut h = vec!["value", "seed", "status", "rho0"];
    h.extend_from_slice(match method {
        SweepMethod::Asymptotic => &["j1", "j2", "jbar1", "jbar2"][..],
        SweepMethod::Bvp => &["j1", "j2", "jbar1", "jbar2", "rel_err", "iterations"][..],
        SweepMethod::Transient => {
            &["min_charge", "max_charge", "violated", "final_L", "stability_bound"][..]
        }
    });
    h
}

/// Pool size from `PNP_NUM_THREADS`, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|n| *n > 0)
}

fn sweep(cfg: &RunConfig) -> Result<Outcome> {
    let sc = cfg
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Validation("sweep command needs a `sweep` block".into()))?;
    let values = sc.axis.values().to_vec();
    let header = sweep_header(sc.method);
    let width = header.len();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start worker pool: {e}")))?;
    let rows: Vec<(Vec<String>, Option<String>)> = pool.install(|| {
        values
            .par_iter()
            .enumerate()
            .map(|(i, &v)| {
                let seed = point_seed(cfg.seed, i);
                let mut row = vec![num(v), seed.to_string()];
                let outcome = sweep_point_problem(cfg, &sc.axis, v)
                    .and_then(|p| sweep_point(cfg, sc.method, &p, seed));
                match outcome {
                    Ok(cells) => {
                        row.push("ok".into());
                        row.extend(cells);
                        (row, None)
                    }
                    Err(e) => {
                        row.push("failed".into());
                        row.resize(width, String::new());
                        (row, Some(e.to_string()))
                    }
                }
            })
            .collect()
    });
    let mut table = Table::new("sweep.csv", &header);
    let mut errors = Vec::new();
    for (i, (row, err)) in rows.into_iter().enumerate() {
        if let Some(e) = err {
            errors.push(json!({ "index": i, "value": values[i], "error": e }));
        }
        table.push_cells(row);
    }
    let results = json!({
        "axis": sc.axis.name(),
        "method": sc.method,
        "points": values.len(),
        "failed_points": errors,
    });
    Ok(Outcome::ok(results, vec![table]))
}
