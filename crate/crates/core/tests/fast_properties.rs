use pnp_core::fast::{
    eigen_normal_at, fast_field, integrals, integrate_layer, manifold_membership, FastState,
    DEFAULT_LAYER_TOL,
};
use pnp_core::{BoundaryData, ChannelProfile, IonSpecies, Side, SteadyProblem};
use proptest::prelude::*;

fn species() -> impl Strategy<Value = IonSpecies> {
    (0.5f64..3.0, 0.5f64..3.0).prop_map(|(a1, a2)| IonSpecies::new(a1, a2, 1.0, 1.0).unwrap())
}

fn field(s: &FastState, p: &ChannelProfile, sp: &IonSpecies) -> [f64; 7] {
    fast_field(s, p, sp, 0.0).unwrap().to_array()
}

proptest! {
    #[test]
    fn integrals_are_constant_along_the_field(
        sp in species(),
        h in 0.3f64..3.0,
        phi in -1.0f64..1.0,
        u in -1.0f64..1.0,
        v in -0.2f64..0.2,
        w in 1.0f64..5.0,
    ) {
        let p = ChannelProfile::constant(h).unwrap();
        let z = FastState { phi, u, v, w, tau: 0.5, ..Default::default() };
        let f = field(&z, &p, &sp);
        let eps = 1e-6;
        let shifted = |t: f64| {
            let mut a = z.to_array();
            for k in 0..4 {
                a[k] += t * f[k];
            }
            integrals(&FastState::from_array(a), &p, &sp).unwrap().nontrivial()
        };
        let (plus, minus) = (shifted(eps), shifted(-eps));
        for k in 0..3 {
            let d = (plus[k] - minus[k]) / (2.0 * eps);
            prop_assert!(d.abs() < 1e-6, "H{}: {}", k + 1, d);
        }
    }

    #[test]
    fn equilibria_are_exactly_the_slow_manifold(
        sp in species(), phi in -1.0f64..1.0, u in -1.0f64..1.0, v in -1.0f64..1.0, w in 0.5f64..5.0
    ) {
        let p = ChannelProfile::constant(1.0).unwrap();
        let z = FastState { phi, u, v, w, ..Default::default() };
        let f = field(&z, &p, &sp);
        let vanishes = f[..4].iter().all(|c| *c == 0.0);
        prop_assert_eq!(vanishes, u == 0.0 && v == 0.0);
        let eq = FastState { u: 0.0, v: 0.0, ..z };
        prop_assert!(field(&eq, &p, &sp)[..4].iter().all(|c| *c == 0.0));
    }

    #[test]
    fn eigen_data_linearize_the_field(
        sp in species(), h in 0.3f64..3.0, phi in -1.0f64..1.0, w in 0.5f64..5.0
    ) {
        let p = ChannelProfile::constant(h).unwrap();
        let eq = FastState { phi, w, tau: 0.5, ..Default::default() };
        let e = eigen_normal_at(&eq, &sp, h).unwrap();
        prop_assert!((e.lambda_plus - w.sqrt()).abs() < 1e-14);
        prop_assert!((e.lambda_minus + w.sqrt()).abs() < 1e-14);
        let eps = 1e-6;
        for (lambda, n) in [(e.lambda_plus, e.n_plus), (e.lambda_minus, e.n_minus)] {
            let at = |t: f64| {
                let mut a = eq.to_array();
                for k in 0..7 {
                    a[k] += t * n[k];
                }
                field(&FastState::from_array(a), &p, &sp)
            };
            let (fp, fm) = (at(eps), at(-eps));
            for k in 0..4 {
                let jn = (fp[k] - fm[k]) / (2.0 * eps);
                prop_assert!((jn - lambda * n[k]).abs() < 1e-6, "component {k}: {jn}");
            }
        }
    }
}

fn boundary() -> impl Strategy<Value = BoundaryData> {
    (-1.0f64..1.0, 0.2f64..4.0, 0.2f64..4.0, 0.2f64..4.0, 0.2f64..4.0)
        .prop_map(|(p, l1, l2, r1, r2)| BoundaryData::new(p, l1, l2, r1, r2).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn layer_orbits_stay_on_their_stable_manifold(
        sp in species(), b in boundary(), h in 0.5f64..2.0, left in any::<bool>()
    ) {
        let p = ChannelProfile::constant(h).unwrap();
        let pr = SteadyProblem::new(p.clone(), sp, b, 0.01).unwrap();
        let side = if left { Side::Left } else { Side::Right };
        let orbit = integrate_layer(&pr, side, None, DEFAULT_LAYER_TOL).unwrap();
        prop_assert!(orbit.max_integral_drift() < 100.0 * DEFAULT_LAYER_TOL);
        for s in &orbit.samples {
            prop_assert!(manifold_membership(&s.state, &orbit.landing, &p, &sp, 1e-6));
        }
        if orbit.has_layer {
            let off = FastState { w: orbit.terminal.w + 0.1, ..orbit.terminal };
            prop_assert!(!manifold_membership(&off, &orbit.landing, &p, &sp, 1e-3));
            if let Some(slope) = orbit.tail_decay_slope() {
                let rate = orbit.landing.w.sqrt();
                prop_assert!((slope + rate).abs() < 0.05 * rate, "{slope} vs {rate}");
            }
        }
    }
}
