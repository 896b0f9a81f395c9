use pnp_core::asymptotics::{
    boundary_layer_endpoint, limiting_fluxes, limiting_fluxes_with_rho0, regular_layer,
};
use pnp_core::{BoundaryData, ChannelProfile, IonSpecies, Side, SteadyProblem};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn species() -> impl Strategy<Value = IonSpecies> {
    (0.5f64..3.0, 0.5f64..3.0, 0.2f64..4.0, 0.2f64..4.0)
        .prop_map(|(a1, a2, d1, d2)| IonSpecies::new(a1, a2, d1, d2).unwrap())
}

fn boundary() -> impl Strategy<Value = BoundaryData> {
    (-2.0f64..2.0, 0.1f64..5.0, 0.1f64..5.0, 0.1f64..5.0, 0.1f64..5.0)
        .prop_map(|(p, l1, l2, r1, r2)| BoundaryData::new(p, l1, l2, r1, r2).unwrap())
}

fn profile() -> impl Strategy<Value = ChannelProfile> {
    prop_oneof![
        (0.3f64..3.0).prop_map(|v| ChannelProfile::constant(v).unwrap()),
        (0.3f64..2.0, -0.25f64..2.0).prop_map(|(a, b)| ChannelProfile::affine(a, b).unwrap()),
        (0.5f64..2.0, -0.4f64..1.0, 0.05f64..0.4)
            .prop_map(|(b, a, w)| ChannelProfile::bump(b, a, w).unwrap()),
    ]
}

fn problem(p: ChannelProfile, s: IonSpecies, b: BoundaryData) -> SteadyProblem {
    SteadyProblem::new(p, s, b, 0.01).unwrap()
}

/// The quotient form with `gm` computed from powers rather than logs.
fn displayed_quotient(s: &IonSpecies, b: &BoundaryData, rho0: f64) -> (f64, f64) {
    let (a1, a2) = (s.alpha1, s.alpha2);
    let sum = a1 + a2;
    let gm = |c1: f64, c2: f64| (a1 * c1).powf(a2 / sum) * (a2 * c2).powf(a1 / sum);
    let (gl, gr) = (gm(b.l1, b.l2), gm(b.r1, b.r2));
    let a = (b.r1 / b.l1).ln();
    let bb = (b.r2 / b.l2).ln();
    let j1 = s.d1 * (a - a1 * b.phi0) * (gl - gr) / ((a1 * a2 * a + a1 * a1 * bb) / sum * rho0);
    let j2 = s.d2 * (bb + a2 * b.phi0) * (gl - gr) / ((a2 * a2 * a + a1 * a2 * bb) / sum * rho0);
    (j1, j2)
}

#[test]
fn stable_form_matches_displayed_quotient() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut checked = 0;
    while checked < 10_000 {
        let s = IonSpecies::new(
            rng.gen_range(0.5..3.0),
            rng.gen_range(0.5..3.0),
            rng.gen_range(0.2..4.0),
            rng.gen_range(0.2..4.0),
        )
        .unwrap();
        let b = BoundaryData::new(
            rng.gen_range(-2.0..2.0),
            rng.gen_range(0.1..5.0),
            rng.gen_range(0.1..5.0),
            rng.gen_range(0.1..5.0),
            rng.gen_range(0.1..5.0),
        )
        .unwrap();
        let p = SteadyProblem::new(ChannelProfile::constant(1.0).unwrap(), s, b, 0.01).unwrap();
        let a = (b.r1 / b.l1).ln();
        let bb = (b.r2 / b.l2).ln();
        let sv = (s.alpha2 * a + s.alpha1 * bb) / (s.alpha1 + s.alpha2);
        if sv.abs() <= 1e-3 {
            continue;
        }
        let rho0 = rng.gen_range(1.0..3.0);
        let f = limiting_fluxes_with_rho0(&p, rho0);
        let (q1, q2) = displayed_quotient(&s, &b, rho0);
        for (x, y) in [(f.jbar1, q1), (f.jbar2, q2)] {
            assert!((x - y).abs() <= 1e-10 * y.abs().max(1e-300), "{x} vs {y}");
        }
        checked += 1;
    }
}

proptest! {
    #[test]
    fn diffusion_scaling(s in species(), b in boundary(), k in 0.1f64..10.0) {
        let p = ChannelProfile::constant(1.0).unwrap();
        let f = limiting_fluxes(&problem(p.clone(), s, b)).unwrap();
        let scaled = IonSpecies::new(s.alpha1, s.alpha2, k * s.d1, k * s.d2).unwrap();
        let g = limiting_fluxes(&problem(p, scaled, b)).unwrap();
        prop_assert_eq!(f.j1, g.j1);
        prop_assert_eq!(f.j2, g.j2);
        prop_assert!((g.jbar1 - k * f.jbar1).abs() <= 1e-13 * g.jbar1.abs());
        prop_assert!((g.jbar2 - k * f.jbar2).abs() <= 1e-13 * g.jbar2.abs());
    }

    #[test]
    fn fluxes_scale_inversely_with_rho0(
        s in species(), b in boundary(), p1 in profile(), p2 in profile()
    ) {
        let pr1 = problem(p1.clone(), s, b);
        let pr2 = problem(p2.clone(), s, b);
        let f1 = limiting_fluxes(&pr1).unwrap();
        let f2 = limiting_fluxes(&pr2).unwrap();
        let r1 = p1.inverse_area_integral(0.0, 1.0, 1e-12).unwrap();
        let r2 = p2.inverse_area_integral(0.0, 1.0, 1e-12).unwrap();
        prop_assert!((f2.j1 * r2 - f1.j1 * r1).abs() <= 1e-9 * (f1.j1 * r1).abs().max(1e-12));
        prop_assert!((f2.j2 * r2 - f1.j2 * r1).abs() <= 1e-9 * (f1.j2 * r1).abs().max(1e-12));
    }

    #[test]
    fn mirrored_problem_negates_fluxes(a in 0.5f64..3.0, d in 0.2f64..4.0, b in boundary()) {
        let s = IonSpecies::new(a, a, d, d).unwrap();
        let p = ChannelProfile::constant(1.0).unwrap();
        let f = limiting_fluxes(&problem(p.clone(), s, b)).unwrap();
        let m = BoundaryData::new(-b.phi0, b.r1, b.r2, b.l1, b.l2).unwrap();
        let g = limiting_fluxes(&problem(p, s, m)).unwrap();
        prop_assert!((f.j1 + g.j1).abs() <= 1e-12 * f.j1.abs().max(1.0));
        prop_assert!((f.j2 + g.j2).abs() <= 1e-12 * f.j2.abs().max(1.0));
    }

    #[test]
    fn regular_layer_reaches_right_endpoint(s in species(), b in boundary(), p in profile()) {
        let pr = problem(p, s, b);
        let reg = regular_layer(&pr).unwrap();
        let right = boundary_layer_endpoint(&pr, Side::Right);
        let st = reg.state(1.0).unwrap();
        prop_assert!((st.w - right.w_limit).abs() < 1e-8);
        prop_assert!((st.phi - right.phi_limit).abs() < 1e-8);
    }

    #[test]
    fn regular_layer_is_electroneutral(
        s in species(), b in boundary(), p in profile(), x in 0.0f64..=1.0
    ) {
        let reg = regular_layer(&problem(p, s, b)).unwrap();
        let st = reg.state(x).unwrap();
        let charge = s.alpha1 * st.c1 - s.alpha2 * st.c2;
        prop_assert!(charge.abs() <= 1e-12 * (s.alpha1 * st.c1).max(1.0));
    }

    #[test]
    fn left_layer_starts_on_stable_direction(s in species(), b in boundary()) {
        let pr = problem(ChannelProfile::constant(1.0).unwrap(), s, b);
        let e = boundary_layer_endpoint(&pr, Side::Left);
        prop_assume!(e.has_layer);
        let v = -(s.alpha1 * b.l1 - s.alpha2 * b.l2);
        prop_assert!(e.u_amplitude * v < 0.0);
    }
}
