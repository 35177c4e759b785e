use std::f64::consts::PI;

use planar_friction::distributed::{bristle_rate, steady_state_wrench};
use planar_friction::geometry::{discretize, HertzExponent};
use planar_friction::limit_surface::check_positive_definite;
use planar_friction::{BristleField, FrictionParams, LimitSurfaceTable, SurfaceSpec, VelocityTwist};
use proptest::prelude::*;

fn any_spec() -> impl Strategy<Value = SurfaceSpec> {
    prop_oneof![
        (1e-3..0.05f64).prop_map(SurfaceSpec::circle),
        (1e-3..0.05f64).prop_map(SurfaceSpec::square),
        (1e-3..0.05f64, 0.0..PI).prop_map(|(l, a)| SurfaceSpec::line(l).rotated(a)),
        (1e-3..0.05f64, 0.0..PI).prop_map(|(l, a)| SurfaceSpec::gradient_line(l).rotated(a)),
        (0.5..4.0f64).prop_map(|k| SurfaceSpec::hertzian(HertzExponent::Constant { k }, 6e-3)),
    ]
}

fn any_twist() -> impl Strategy<Value = VelocityTwist> {
    (-0.05..0.05f64, -0.05..0.05f64, -5.0..5.0f64).prop_map(|(x, y, w)| VelocityTwist::new(x, y, w))
}

fn scaled(spec: &SurfaceSpec, s: f64) -> SurfaceSpec {
    use planar_friction::Shape::*;
    let shape = match spec.shape.clone() {
        Circle { radius } => Circle { radius: radius * s },
        Square { side } => Square { side: side * s },
        Line { length } => Line { length: length * s },
        GradientLine { length } => GradientLine { length: length * s },
        other => other,
    };
    SurfaceSpec { shape, rotation: spec.rotation }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pressure_is_normalized(spec in any_spec(), n in 2usize..40, f_n in 0.1..20.0f64) {
        let g = discretize(&spec, n, f_n).unwrap();
        prop_assert!((g.total_weight() - 1.0).abs() < 1e-9);
        prop_assert!(g.p_n().iter().all(|p| *p >= 0.0));
        let c = g.weighted_centroid();
        prop_assert!(c[0].abs().max(c[1].abs()) < 1e-12 * spec.extent(f_n).max(1e-3));
        prop_assert!(g.r() > 0.0 || g.active_cells().len() == 1);
    }

    #[test]
    fn radius_scales_with_length(
        spec in prop_oneof![
            (1e-3..0.05f64).prop_map(SurfaceSpec::circle),
            (1e-3..0.05f64).prop_map(SurfaceSpec::square),
            (1e-3..0.05f64).prop_map(SurfaceSpec::gradient_line),
        ],
        s in 0.2..5.0f64,
        n in 3usize..30,
    ) {
        let a = discretize(&spec, n, 1.0).unwrap();
        let b = discretize(&scaled(&spec, s), n, 1.0).unwrap();
        prop_assert!((b.r() / (s * a.r()) - 1.0).abs() < 1e-9);
        prop_assert!((b.u() / (s * s * a.u()) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn steady_state_dissipates(spec in any_spec(), tw in any_twist(), ep in any::<bool>()) {
        let p = FrictionParams::preset_p1().with_elasto_plastic(ep);
        let g = discretize(&spec, 15, 2.0).unwrap();
        let w = steady_state_wrench(&tw, &g, &p);
        let scale = w.tangential_norm() * tw.tangential_speed() + (w.tau * tw.omega).abs();
        prop_assert!(w.power(&tw) <= 1e-12 * scale.max(1e-300));
    }

    #[test]
    fn steady_force_is_bounded(spec in any_spec(), tw in any_twist()) {
        let p = FrictionParams::preset_p1();
        let f_n = 2.0;
        let g = discretize(&spec, 15, f_n).unwrap();
        let w = steady_state_wrench(&tw, &g, &p);
        let v_max = g.active_cells().iter()
            .map(|c| (tw.v_x - tw.omega * c.y).hypot(tw.v_y + tw.omega * c.x))
            .fold(0.0, f64::max);
        prop_assert!(w.tangential_norm() <= p.mu_s * f_n * (1.0 + p.sigma2 * v_max / p.mu_s) + 1e-12);
    }

    #[test]
    fn steady_deflection_is_bounded(spec in any_spec(), tw in any_twist()) {
        let p = FrictionParams::preset_p1();
        let g = discretize(&spec, 11, 1.0).unwrap();
        let z = BristleField::steady_state(&tw, &g, &p);
        let bound = p.mu_s / p.sigma0 + 1e-9;
        prop_assert!(z.as_slice().iter().all(|c| c[0].hypot(c[1]) <= bound));
        let rate = bristle_rate(&tw, &z, &g, &p);
        prop_assert!(rate.as_slice().iter().all(|d| d[0].abs().max(d[1].abs()) < 1e-12));
    }

    #[test]
    fn rotating_the_twist_rotates_the_force(tw in any_twist(), angle in 0.0..(2.0 * PI)) {
        prop_assume!(tw.tangential_speed() > 1e-4);
        let p = FrictionParams::preset_p0();
        let g = discretize(&SurfaceSpec::circle(0.01), 41, 1.0).unwrap();
        let (s, c) = angle.sin_cos();
        let rotated = VelocityTwist::new(c * tw.v_x - s * tw.v_y, s * tw.v_x + c * tw.v_y, tw.omega);
        let a = steady_state_wrench(&tw, &g, &p);
        let b = steady_state_wrench(&rotated, &g, &p);
        let expected = [c * a.f_x - s * a.f_y, s * a.f_x + c * a.f_y];
        let err = (b.f_x - expected[0]).hypot(b.f_y - expected[1]);
        prop_assert!(err <= 0.02 * p.mu_c + 1e-12, "{err}");
        prop_assert!((b.tau.abs() - a.tau.abs()).abs() <= 0.02 * a.tau.abs().max(p.mu_c * g.r() * 0.05));
    }

    #[test]
    fn elastic_zone_is_a_pure_spring(
        vx in -0.01..0.01f64, vy in -0.01..0.01f64, frac in 0.0..0.99f64, dir in 0.0..(2.0 * PI),
    ) {
        let p = FrictionParams::preset_p1().with_elasto_plastic(true);
        let g = planar_friction::PressureGrid::point_contact(1.0);
        let speed = vx.hypot(vy);
        let z_ba = p.s_ba * p.g(speed) / p.sigma0;
        let z = BristleField::from_vec(vec![[frac * z_ba * dir.cos(), frac * z_ba * dir.sin()]]);
        let d = bristle_rate(&VelocityTwist::new(vx, vy, 0.0), &z, &g, &p);
        prop_assert_eq!(d.as_slice()[0], [vx, vy]);
    }

    #[test]
    fn eigenvalues_positive_under_condition(
        r in 1e-4..1.0f64, r_a in 1e-4..1.0f64, a in 0.0..(2.0 * PI), frac in 0.0..0.999f64,
    ) {
        let s = 2.0 * r_a * frac;
        let e = check_positive_definite(r, r_a, s * a.cos(), s * a.sin());
        prop_assert!(e.condition_holds);
        prop_assert!(e.positive);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn lookup_stays_in_unit_cube(tw in any_twist(), r in 1e-3..0.05f64) {
        let table = table();
        let h = table.lookup(r, &tw);
        prop_assert!(h.iter().all(|v| v.abs() <= 1.0 + 1e-12), "{h:?}");
    }
}

fn table() -> &'static LimitSurfaceTable {
    static TABLE: std::sync::OnceLock<LimitSurfaceTable> = std::sync::OnceLock::new();
    TABLE.get_or_init(|| {
        let g = discretize(&SurfaceSpec::gradient_line(0.02), 21, 1.0).unwrap();
        LimitSurfaceTable::precompute(&g, 8).unwrap()
    })
}
