use pnp_core::geometry::jacobian_products;
use pnp_core::geometry::{build_foliation, WallFunction};
use pnp_core::geometry::geometry_factor;
use pnp_core::ChannelProfile;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]
    #[test]
    fn inverse_jacobian_determinant_is_g_squared(
        g in 0.01f64..10.0, gx in -5.0f64..5.0, y in -1.0f64..1.0, z in -1.0f64..1.0
    ) {
        let jp = jacobian_products(g, gx, y, z).unwrap();
        prop_assert!((jp.det_j_inv - g * g).abs() <= 1e-13 * g * g);
    }
}

fn normalized_profile() -> impl Strategy<Value = ChannelProfile> {
    prop_oneof![
        (0.3f64..3.0).prop_map(|v| ChannelProfile::constant(v).unwrap()),
        (0.3f64..2.0, -0.25f64..2.0).prop_map(|(a, b)| ChannelProfile::affine(a, b).unwrap()),
        (0.5f64..2.0, -0.4f64..1.0, 0.05f64..0.4)
            .prop_map(|(b, a, w)| ChannelProfile::bump(b, a, w).unwrap()),
        prop::collection::vec(0.2f64..3.0, 4..9).prop_map(|values| {
            let n = values.len();
            let nodes = (0..n).map(|k| k as f64 / (n - 1) as f64).collect();
            ChannelProfile::sampled(nodes, values).unwrap()
        }),
    ]
    .prop_map(|p| p.normalize_volume().unwrap())
}

proptest! {
    #[test]
    fn normalized_profiles_have_rho0_at_least_one(p in normalized_profile()) {
        let g = geometry_factor(&p, 1e-12).unwrap();
        prop_assert!((g.volume_integral - 1.0).abs() < 1e-10);
        prop_assert!(g.rho0 >= 1.0 - 1e-10);
        if p.is_constant() {
            prop_assert!((g.rho0 - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn sampled_profile_tracks_analytic_rho0(a in 0.5f64..2.0, b in -0.4f64..1.5) {
        let exact = ChannelProfile::affine(a, b).unwrap();
        let sampled = ChannelProfile::sample_from(|x| a + b * x, 201).unwrap();
        let r1 = geometry_factor(&exact, 1e-12).unwrap().rho0;
        let r2 = geometry_factor(&sampled, 1e-12).unwrap().rho0;
        prop_assert!((r1 - r2).abs() < 1e-5);
    }
}

fn bulge_foliation() -> pnp_core::geometry::Foliation {
    let h = |x: f64| 1.2 + 0.5 * (2.5 * x).sin();
    build_foliation(h, WallFunction::sine_bulge(0.2, 0.6).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn foliation_depends_on_radius_only(
        x in 0.0f64..=1.0, frac in 0.0f64..0.95, theta in 0.0f64..std::f64::consts::TAU
    ) {
        let f = bulge_foliation();
        let g = f.wall().eval(x).0;
        let r = frac * g;
        let a = f.eval(x, r, 0.0).unwrap();
        let b = f.eval(x, r * theta.cos(), r * theta.sin()).unwrap();
        prop_assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn foliation_has_zero_normal_derivative_on_wall() {
    let f = bulge_foliation();
    let delta = 1e-4;
    for k in 1..20 {
        let x = k as f64 / 20.0;
        let (g, gx) = f.wall().eval(x);
        // Inward normal of r = g(X) in the (X, r) half-plane.
        let norm = (1.0 + gx * gx).sqrt();
        let (nx, nr) = (gx / norm, -1.0 / norm);
        let at = |t: f64| f.eval(x + t * nx, g + t * nr, 0.0).unwrap();
        let d = (-3.0 * at(0.0) + 4.0 * at(delta) - at(2.0 * delta)) / (2.0 * delta);
        assert!(d.abs() < 1e-5, "x = {x}: {d}");
    }
    let h = |x: f64| 1.2 + 0.5 * (2.5 * x).sin();
    for k in 0..=10 {
        let x = k as f64 / 10.0;
        assert!((f.eval(x, 0.0, 0.0).unwrap() - h(x)).abs() < 1e-8);
    }
}
