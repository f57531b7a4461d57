use blowup_lab::geometry::{
    certify_negative_curvature, certify_negative_curvature_symbolic, epsilon_margin, metric_g,
    metric_g_prime, sectional_curvatures, GeometryError,
};
use blowup_lab::profile::profile_params;

// g(u) = u sqrt(1 + 7u^2 - (23d - 170)u^4), written out independently
fn g_oracle(d: i64, u: f64) -> f64 {
    let k = (23 * d - 170) as f64;
    u * (1.0 + 7.0 * u * u - k * u.powi(4)).sqrt()
}

fn curvatures_oracle(d: i64, u: f64) -> (f64, f64) {
    let h = 1e-4;
    let g = g_oracle(d, u);
    let gp = (g_oracle(d, u + h) - g_oracle(d, u - h)) / (2.0 * h);
    let gpp = (g_oracle(d, u + h) - 2.0 * g + g_oracle(d, u - h)) / (h * h);
    (-gpp / g, (1.0 - gp * gp) / (g * g))
}

fn phi0_one(d: i64) -> f64 {
    profile_params(d).unwrap().phi0_at_one().unwrap()
}

#[test]
fn metric_values() {
    assert_eq!(metric_g(9, 0.0).unwrap(), 0.0);
    // k = 23*8 - 170 = 14, so the quartic term is 14e-4
    let want = 0.1 * (1.0f64 + 0.07 - 1.4e-3).sqrt();
    assert!((metric_g(8, 0.1).unwrap() - want).abs() < 1e-15);
    assert!((metric_g(8, 0.1).unwrap() - g_oracle(8, 0.1)).abs() < 1e-16);
    let u = 1e-6;
    assert!((metric_g(9, u).unwrap() / u - 1.0).abs() < 1e-10);
    assert!((metric_g_prime(9, 0.0).unwrap() - 1.0).abs() < 1e-15);
}

#[test]
fn metric_is_odd() {
    for d in [8, 9, 12, 40] {
        for i in 0..20 {
            let u = 0.01 * i as f64;
            assert_eq!(metric_g(d, -u).unwrap(), -metric_g(d, u).unwrap());
        }
    }
}

#[test]
fn metric_domain_error() {
    // radicand 1 + 7 - 37 < 0 at d = 9, u = 1
    assert!(matches!(
        metric_g(9, 1.0),
        Err(GeometryError::Domain { d: 9, .. })
    ));
}

#[test]
fn curvature_limit_at_origin() {
    let c = sectional_curvatures(9, 0.0).unwrap();
    assert_eq!((c.type1, c.type2), (-21.0, -21.0));
    // nearby values approach the limit
    let (t1, t2) = curvatures_oracle(9, 1e-2);
    assert!((t1 + 21.0).abs() < 0.5 && (t2 + 21.0).abs() < 0.5);
}

#[test]
fn curvatures_match_finite_differences() {
    for d in [8, 9, 15] {
        let u1 = phi0_one(d);
        for i in 1..=10 {
            let u = u1 * i as f64 / 10.0;
            let c = sectional_curvatures(d, u).unwrap();
            let (t1, t2) = curvatures_oracle(d, u);
            assert!(
                (c.type1 - t1).abs() < 1e-4 * t1.abs().max(1.0),
                "d={d} u={u}"
            );
            assert!(
                (c.type2 - t2).abs() < 1e-4 * t2.abs().max(1.0),
                "d={d} u={u}"
            );
        }
    }
}

#[test]
fn negative_at_profile_endpoint() {
    let c = sectional_curvatures(9, phi0_one(9)).unwrap();
    assert!(c.type1 < 0.0 && c.type2 < 0.0);
}

#[test]
fn sampled_negativity_for_many_dimensions() {
    for d in 8..100 {
        let u1 = phi0_one(d);
        for i in 0..200 {
            let u = u1 * i as f64 / 199.0;
            let c = sectional_curvatures(d, u).unwrap();
            assert!(c.both_negative(), "d={d} u={u} {c:?}");
            if u > 0.0 {
                assert!(metric_g_prime(d, u).unwrap() > 1.0);
            }
        }
    }
}

#[test]
fn certificates() {
    assert!(certify_negative_curvature_symbolic().passed());
    assert!(certify_negative_curvature(8).passed());
    assert!(certify_negative_curvature(9).passed());
    assert!(certify_negative_curvature(30).passed());
    let c7 = certify_negative_curvature(7);
    assert!(!c7.passed());
    let fail = c7.first_failure().unwrap();
    assert!(fail.desc.contains("b(d) > 1"), "{}", fail.desc);
}

#[test]
fn epsilon_margin_window() {
    for d in [8, 9, 10] {
        let eps = epsilon_margin(d).unwrap();
        assert!(eps > 0.0);
        let c = sectional_curvatures(d, phi0_one(d) + eps / 2.0).unwrap();
        assert!(c.both_negative());
    }
}
