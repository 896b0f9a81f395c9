use std::f64::consts::PI;

use pnp_core::bvp::{solve_steady_bvp, SolverOptions};
use pnp_core::discretization::Mesh;
use pnp_core::transient::{
    invariant_region_bound, lyapunov, run_transient, TransientOptions, TransientSolver,
    TransientState,
};
use pnp_core::{BoundaryData, ChannelProfile, IonSpecies, SteadyProblem};
use proptest::prelude::*;

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn lyapunov_of_single_bump_matches_quadrature() {
    let n = 4000;
    let mesh = Mesh::uniform(n).unwrap();
    let x = mesh.nodes();
    let state = TransientState {
        t: 0.0,
        c1: x.iter().map(|x| 1.0 + 0.1 * (PI * x).sin()).collect(),
        c2: vec![1.0; n + 1],
        phi: vec![0.0; n + 1],
    };
    let p = ChannelProfile::constant(1.0).unwrap();
    let l = lyapunov(&state, 1.0, &mesh, &p, &IonSpecies::symmetric()).unwrap();
    // Composite Simpson with 2^16 panels.
    let f = |x: f64| {
        let s = 0.1 * (PI * x).sin();
        s * s.ln_1p()
    };
    let m = 1 << 16;
    let h = 1.0 / m as f64;
    let oracle = (0..=m)
        .map(|k| {
            let w = if k == 0 || k == m { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
            w * f(k as f64 * h)
        })
        .sum::<f64>()
        * h
        / 3.0;
    assert!((oracle - 0.004799502593218095).abs() < 1e-15);
    assert!((l - oracle).abs() < 1e-8, "{l} vs {oracle}");
}

#[test]
fn steady_solution_is_a_fixed_point() {
    let p = SteadyProblem::new(
        ChannelProfile::affine(1.0, 0.5).unwrap(),
        IonSpecies::new(1.0, 2.0, 1.0, 0.7).unwrap(),
        BoundaryData::new(0.6, 1.0, 1.5, 2.0, 0.5).unwrap(),
        0.1,
    )
    .unwrap();
    let sol = solve_steady_bvp(
        &p,
        &SolverOptions {
            n: 200,
            newton_tol: 1e-12,
            ..Default::default()
        },
    )
    .unwrap();
    let solver = TransientSolver::with_mesh(&p, sol.mesh.clone(), TransientOptions::default()).unwrap();
    let start = solver.state_from(0.0, sol.c1.clone(), sol.c2.clone()).unwrap();
    assert!(sup(&start.phi, &sol.phi) < 1e-9);
    let mut st = start.clone();
    for _ in 0..5 {
        let next = solver.step(&st, 1e-2).unwrap();
        let change = sup(&next.c1, &st.c1).max(sup(&next.c2, &st.c2)).max(sup(&next.phi, &st.phi));
        assert!(change < 1e-9, "{change}");
        st = next;
    }
}

#[test]
fn special_case_decays_to_reference() {
    let p = SteadyProblem::new(
        ChannelProfile::constant(1.0).unwrap(),
        IonSpecies::symmetric(),
        BoundaryData::new(1.0, 1.0, 1.0, 1.0, 1.0).unwrap(),
        0.01,
    )
    .unwrap();
    let solver = TransientSolver::new(&p, TransientOptions::default()).unwrap();
    let x = solver.mesh.nodes().to_vec();
    let c1 = x.iter().map(|x| 1.0 - 0.3 * (PI * x).sin()).collect();
    let c2 = x.iter().map(|x| 1.0 - 0.2 * (2.0 * PI * x).sin().abs()).collect();
    let init = solver.state_from(0.0, c1, c2).unwrap();
    let run = run_transient(&solver, init, 1.5).unwrap();
    let trace = run.lyapunov.as_ref().unwrap();
    assert!(trace.max_increase() <= 1e-12);
    assert!(trace.points.last().unwrap().1 < 1e-10);
    let (slope, r2) = trace.tail_log_fit().unwrap();
    assert!(slope < 0.0 && r2 > 0.99);
    let reference = solver.reference_state(1.0);
    let fs = &run.final_state;
    let err = sup(&fs.c1, &reference.c1)
        .max(sup(&fs.c2, &reference.c2))
        .max(sup(&fs.phi, &reference.phi));
    assert!(err < 1e-5, "{err}");
}

#[test]
fn resting_state_stays_put() {
    let p = SteadyProblem::new(
        ChannelProfile::bump(1.0, 0.4, 0.2).unwrap(),
        IonSpecies::new(2.0, 1.0, 1.0, 1.0).unwrap(),
        BoundaryData::new(0.5, 0.5, 1.0, 0.5, 1.0).unwrap(),
        0.05,
    )
    .unwrap();
    let solver = TransientSolver::new(&p, TransientOptions { n: 101, ..Default::default() }).unwrap();
    let r = solver.reference_state(1.0);
    let run = run_transient(&solver, r.clone(), 0.2).unwrap();
    for (_, l) in &run.lyapunov.as_ref().unwrap().points {
        assert!(*l < 1e-12);
    }
    assert!(sup(&run.final_state.phi, &r.phi) < 1e-9);
}

fn random_problem() -> impl Strategy<Value = (SteadyProblem, u64)> {
    (
        prop::sample::select(vec![1.0, 2.0]),
        prop::sample::select(vec![1.0, 2.0]),
        0.5f64..2.0,
        0.5f64..2.0,
        -2.0f64..2.0,
        prop::array::uniform4(0.2f64..2.0),
        any::<bool>(),
        any::<u64>(),
    )
        .prop_map(|(a1, a2, d1, d2, phi0, c, affine, seed)| {
            let profile = if affine {
                ChannelProfile::affine(1.0, 1.0).unwrap()
            } else {
                ChannelProfile::constant(1.0).unwrap()
            };
            let p = SteadyProblem::new(
                profile,
                IonSpecies::new(a1, a2, d1, d2).unwrap(),
                BoundaryData::new(phi0, c[0], c[1], c[2], c[3]).unwrap(),
                0.1,
            )
            .unwrap();
            (p, seed)
        })
}

fn random_interior(n: usize, m: f64, alpha: f64, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(1e-3..=1.0) * m / alpha).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]
    #[test]
    fn charge_box_is_invariant((p, seed) in random_problem()) {
        let solver = TransientSolver::new(&p, TransientOptions { n: 101, ..Default::default() }).unwrap();
        let m = invariant_region_bound(&p.boundary, &p.species);
        let c1 = random_interior(102, m, p.species.alpha1, seed);
        let c2 = random_interior(102, m, p.species.alpha2, seed ^ 0x5555);
        let init = solver.state_from(0.0, c1, c2).unwrap();
        let run = run_transient(&solver, init, 0.3).unwrap();
        prop_assert!(!run.monitor.violated, "{:?}", run.monitor);
        prop_assert!(run.monitor.min_charge >= -1e-10);
        prop_assert!(run.monitor.max_charge <= m + 1e-10);
    }

    #[test]
    fn step_below_stability_bound_keeps_positivity((p, seed) in random_problem()) {
        let solver = TransientSolver::new(&p, TransientOptions { n: 51, ..Default::default() }).unwrap();
        let level = 0.2 + (seed % 1000) as f64 / 1000.0;
        let st = solver.state_from(0.0, vec![level; 52], vec![level; 52]).unwrap();
        let next = solver.step(&st, 0.9 * solver.stability_bound()).unwrap();
        prop_assert!(next.c1.iter().chain(&next.c2).all(|c| *c > 0.0));
    }
}
