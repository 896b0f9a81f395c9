use pnp_core::asymptotics::singular_orbit;
use pnp_core::bvp::{extract_fluxes, solve_steady_bvp, SolverOptions};
use pnp_core::transient::invariant_region_bound;
use pnp_core::{BoundaryData, ChannelProfile, IonSpecies, SteadyProblem};
use proptest::prelude::*;

fn opts(n: usize) -> SolverOptions {
    SolverOptions {
        n,
        ..Default::default()
    }
}

fn layered(mu: f64) -> SteadyProblem {
    SteadyProblem::new(
        ChannelProfile::constant(1.0).unwrap(),
        IonSpecies::symmetric(),
        BoundaryData::new(1.0, 4.0, 1.0, 2.0, 2.0).unwrap(),
        mu,
    )
    .unwrap()
}

#[test]
fn equal_charge_data_is_reproduced_exactly() {
    let species = IonSpecies::new(1.0, 2.0, 1.5, 0.5).unwrap();
    let (k, phi0) = (1.2, 0.8);
    let bd = BoundaryData::new(phi0, k, k / 2.0, k, k / 2.0).unwrap();
    let profiles = [
        ChannelProfile::constant(1.0).unwrap(),
        ChannelProfile::affine(1.0, 1.0).unwrap(),
        ChannelProfile::bump(1.0, 0.5, 0.15).unwrap(),
    ];
    for profile in profiles {
        let rho0 = profile.inverse_area_integral(0.0, 1.0, 1e-13).unwrap();
        for mu in [0.1, 0.01] {
            let p = SteadyProblem::new(profile.clone(), species, bd, mu).unwrap();
            let sol = solve_steady_bvp(&p, &opts(401)).unwrap();
            for (i, &x) in sol.mesh.nodes().iter().enumerate() {
                let tail = profile.inverse_area_integral(x, 1.0, 1e-13).unwrap();
                assert!((sol.phi[i] - phi0 * tail / rho0).abs() < 1e-6);
                assert!((sol.c1[i] - k).abs() < 1e-6);
                assert!((sol.c2[i] - k / 2.0).abs() < 1e-6);
            }
            let f = extract_fluxes(&sol).unwrap();
            assert!((f.jbar1 - species.d1 * k * phi0 / rho0).abs() < 1e-6);
            assert!((f.jbar2 + species.d2 * k * phi0 / rho0).abs() < 1e-6);
        }
    }
}

#[test]
fn doubling_the_mesh_barely_moves_the_flux() {
    for p in [SteadyProblem::standard(0.01), layered(0.01)] {
        let coarse = extract_fluxes(&solve_steady_bvp(&p, &opts(401)).unwrap()).unwrap();
        let fine = extract_fluxes(&solve_steady_bvp(&p, &opts(801)).unwrap()).unwrap();
        for (a, b) in [(coarse.j1, fine.j1), (coarse.j2, fine.j2)] {
            assert!((a - b).abs() < 1e-3 * b.abs(), "{a} vs {b}");
        }
    }
}

#[test]
fn standard_problem_needs_few_newton_steps_per_stage() {
    for mu in [0.04, 0.01, 0.005] {
        let sol = solve_steady_bvp(&SteadyProblem::standard(mu), &opts(801)).unwrap();
        assert!(sol.stages.iter().all(|s| s.iterations <= 50));
    }
}

#[test]
fn flux_error_shrinks_linearly_in_mu() {
    let mut errs = Vec::new();
    for mu in [0.04, 0.02, 0.01] {
        let p = layered(mu);
        let limiting = pnp_core::asymptotics::limiting_fluxes(&p).unwrap();
        let f = extract_fluxes(&solve_steady_bvp(&p, &opts(801)).unwrap()).unwrap();
        errs.push(((f.j1 - limiting.j1) / limiting.j1).abs());
    }
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((0.7..=1.3).contains(&order), "{errs:?}");
    }
}

#[test]
fn composite_tracks_discrete_solution() {
    let mu = 0.01;
    let p = layered(mu);
    let sol = solve_steady_bvp(&p, &opts(801)).unwrap();
    let orbit = singular_orbit(&p).unwrap();
    let mut err = 0.0f64;
    for (i, &x) in sol.mesh.nodes().iter().enumerate() {
        let c = orbit.composite(x).unwrap();
        err = err
            .max((c.phi - sol.phi[i]).abs())
            .max((c.c1 - sol.c1[i]).abs())
            .max((c.c2 - sol.c2[i]).abs());
    }
    assert!(err < 5.0 * mu, "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]
    #[test]
    fn converged_solutions_respect_the_charge_box(
        a1 in prop::sample::select(vec![1.0, 2.0]),
        a2 in prop::sample::select(vec![1.0, 2.0]),
        phi0 in -1.5f64..1.5,
        l1 in 0.3f64..3.0, l2 in 0.3f64..3.0, r1 in 0.3f64..3.0, r2 in 0.3f64..3.0,
    ) {
        let species = IonSpecies::new(a1, a2, 1.0, 1.0).unwrap();
        let bd = BoundaryData::new(phi0, l1, l2, r1, r2).unwrap();
        let p = SteadyProblem::new(ChannelProfile::constant(1.0).unwrap(), species, bd, 0.05).unwrap();
        let sol = solve_steady_bvp(&p, &opts(201)).unwrap();
        let m = invariant_region_bound(&bd, &species);
        for (c1, c2) in sol.c1.iter().zip(&sol.c2) {
            prop_assert!(*c1 >= 0.0 && *c2 >= 0.0);
            prop_assert!(a1 * c1 <= m + 1e-8 && a2 * c2 <= m + 1e-8);
        }
    }
}
