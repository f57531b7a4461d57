use blowup_lab::exactmath::{ComplexRational, Rational};
use blowup_lab::profile::{profile_params, unstable_mode};
use blowup_lab::spectral::delta7::{coefficient_polys, delta7_pieces};
use blowup_lab::spectral::recurrence::{coeff_b, r_tilde_exact, ratios, ratios_exact};
use blowup_lab::spectral::shooting::{guard_for, heun_ode};
use blowup_lab::spectral::{
    certify_delta7, classify_limit, delta7_float, determinant, eigenfunction, eigenvalue_search,
    frobenius_indices, recurrence, verify_bounds, Arithmetic, LimitClass, Operator, Region,
    SearchOptions, SingularPoint,
};
use num_complex::Complex64 as C;

fn close(a: C, b: C, tol: f64) -> bool {
    (a - b).norm() <= tol
}

/// Exact `a₀..=a_N` straight from
/// `310(2n+15)(n+2)a_{n+2} = [155λ(λ+4n+9) + 2(458n²+2357n+2727)]a_{n+1} − 74(λ+2n+3)(λ+2n)a_n`
/// for rational `λ`, with `a₋₁ = 0`, `a₀ = 1`.
fn a_oracle(lambda: &Rational, n_max: usize) -> Vec<Rational> {
    let r = |n: i64| Rational::from(n);
    let mut prev = Rational::from(0);
    let mut cur = Rational::from(1);
    let mut out = vec![cur.clone()];
    for n in -1..(n_max as i64 - 1) {
        let lhs = r(310 * (2 * n + 15) * (n + 2));
        let t1 = &(&r(155) * &(lambda * &(lambda + &r(4 * n + 9))))
            + &r(2 * (458 * n * n + 2357 * n + 2727));
        let t2 = &r(74) * &(&(lambda + &r(2 * n + 3)) * &(lambda + &r(2 * n)));
        let next = &(&(&t1 * &cur) - &(&t2 * &prev)) / &lhs;
        prev = cur;
        cur = next;
        out.push(cur.clone());
    }
    out
}

#[test]
fn frobenius_index_pairs() {
    for lam in [C::new(0.0, 0.0), C::new(0.5, 2.0), C::new(3.0, -1.0)] {
        let (s1, s2) = frobenius_indices(SingularPoint::EigenAtZero, lam).unwrap();
        assert!(close(s1, C::new(0.0, 0.0), 1e-12) && close(s2, C::new(-9.0, 0.0), 1e-12));
        let (s1, s2) = frobenius_indices(SingularPoint::EigenAtOne, lam).unwrap();
        assert!(close(s1, C::new(0.0, 0.0), 1e-12));
        assert!(close(s2, 4.0 - lam, 1e-10), "{s2} vs {}", 4.0 - lam);
        let (s1, s2) = frobenius_indices(SingularPoint::HeunAtZero, lam).unwrap();
        assert!(close(s1, C::new(0.0, 0.0), 1e-12) && close(s2, C::new(-5.5, 0.0), 1e-12));
    }
}

#[test]
fn initial_ratios_exact() {
    let r0 =
        |l: i64| ratios_exact(&ComplexRational::real(Rational::from(l)), 1).unwrap()[0].clone();
    assert_eq!(r0(0), ComplexRational::real(Rational::frac(828, 2015)));
    let at_one = &Rational::frac(3, 13) + &Rational::frac(828, 2015);
    assert_eq!(at_one, Rational::frac(1293, 2015));
    assert_eq!(r0(1), ComplexRational::real(at_one));
    assert_eq!(coeff_b(0, C::new(0.0, 0.0)), C::new(0.0, 0.0));
}

#[test]
fn exact_coefficients_match_oracle() {
    for (num, den) in [(0, 1), (1, 1), (7, 3), (-5, 2)] {
        let lam = Rational::frac(num, den);
        let want = a_oracle(&lam, 40);
        let seq = recurrence(C::new(lam.to_f64(), 0.0), 40, Arithmetic::Exact).unwrap();
        let polys = coefficient_polys(12);
        for (n, w) in want.iter().enumerate() {
            let got = seq.a[n].re;
            assert!((got - w.to_f64()).abs() <= 1e-14 * w.to_f64().abs().max(1e-300));
            if n <= 12 {
                assert_eq!(&polys[n].eval(&lam), w, "a_{n} at {lam}");
            }
        }
    }
}

#[test]
fn float_and_exact_recurrence_agree() {
    for lam in [C::new(0.5, 0.0), C::new(0.25, 1.5), C::new(2.0, -3.0)] {
        let f = recurrence(lam, 200, Arithmetic::Float).unwrap();
        let e = recurrence(lam, 200, Arithmetic::Exact).unwrap();
        for n in 0..=200 {
            if e.a[n].norm() > 0.0 && e.a[n].norm().is_finite() {
                assert!(
                    (f.a[n] - e.a[n]).norm() / e.a[n].norm() <= 1e-10,
                    "n={n} lam={lam}"
                );
            }
        }
    }
    assert!(recurrence(C::new(1.0, 0.0), 0, Arithmetic::Float).is_err());
    assert!(recurrence(C::new(f64::NAN, 0.0), 5, Arithmetic::Exact).is_err());
}

#[test]
fn heun_series_matches_recurrence() {
    let lam = C::new(0.3, 0.7);
    let series = heun_ode(lam)
        .euler_at_zero()
        .unwrap()
        .series(C::new(0.0, 0.0), 30);
    let seq = recurrence(lam, 29, Arithmetic::Float).unwrap();
    for n in 0..30 {
        assert!(
            close(series[n], seq.a[n], 1e-12 * seq.a[n].norm().max(1.0)),
            "n={n}"
        );
    }
}

#[test]
fn delta_is_ratio_over_quasi_solution() {
    let lam = C::new(1.5, 2.5);
    let seq = recurrence(lam, 50, Arithmetic::Float).unwrap();
    for n in 0..50 {
        assert!(close(seq.delta[n], seq.r[n] / seq.r_tilde[n] - 1.0, 1e-14));
    }
}

#[test]
fn limits_are_one_in_closed_half_plane() {
    for lam in [C::new(0.0, 0.0), C::new(2.0, 3.0), C::new(0.0, 1.0)] {
        assert_eq!(classify_limit(lam, 2000, 1e-2), LimitClass::One, "{lam}");
        let r = ratios(lam, 4000);
        for n in [500usize, 1000, 2000, 4000] {
            assert!((r[n] - 1.0).norm() * n as f64 <= 50.0, "n={n}");
        }
    }
}

#[test]
fn sampled_bounds() {
    let axis: Vec<C> = (-50..=50).map(|k| C::new(0.0, k as f64)).collect();
    assert!(verify_bounds(&axis, 500).unwrap().passed());
    assert!(verify_bounds(&[C::new(10.0, 10.0)], 500).unwrap().passed());
    assert!(verify_bounds(&[C::new(-1.0, 0.0)], 500).is_err());
    // induction arithmetic: 1/12 + (1/2)(1/3)/(2/3) = 1/3
    let step = &Rational::frac(1, 12)
        + &(&(&Rational::frac(1, 2) * &Rational::frac(1, 3)) / &Rational::frac(2, 3));
    assert_eq!(step, Rational::frac(1, 3));
}

#[test]
fn delta7_certificate_and_float_cross_check() {
    let cert = certify_delta7();
    assert!(cert.passed(), "{}", cert.to_json());
    for p in delta7_pieces() {
        assert_eq!(p.q1.degree(), Some(32), "{}", p.substitution);
        assert_eq!(p.q2.degree(), Some(32), "{}", p.substitution);
    }
    assert!(delta7_float(C::new(0.0, 5.0)).norm_sqr() <= 1.0 / 9.0);
}

#[test]
fn delta7_unrolled_equals_stepwise() {
    let (num, den) = blowup_lab::spectral::delta7::delta7_rational_function();
    for lam in [
        Rational::frac(1, 2),
        Rational::from(3),
        Rational::frac(-2, 7),
    ] {
        let cl = ComplexRational::real(lam.clone());
        let r = ratios_exact(&cl, 7).unwrap();
        let stepwise = &r[7].checked_div(&r_tilde_exact(7, &cl)).unwrap()
            - &ComplexRational::real(Rational::from(1));
        let unrolled = num.eval(&lam).checked_div(&den.eval(&lam)).unwrap();
        assert_eq!(stepwise, ComplexRational::real(unrolled));
    }
}

#[test]
fn search_finds_symmetry_eigenvalue() {
    let region = Region::new((0.0, 2.0), (-1.0, 1.0)).unwrap();
    let report = eigenvalue_search(region, &SearchOptions::default()).unwrap();
    assert_eq!(report.eigenvalues.len(), 1);
    let ev = &report.eigenvalues[0];
    assert!(close(ev.lambda(), C::new(1.0, 0.0), 1e-8) && ev.residual < 1e-8);
    assert!(Region::new((1.0, 0.0), (0.0, 1.0)).is_err());
}

#[test]
fn susy_determinant_nonzero_at_one() {
    let one = C::new(1.0, 0.0);
    let g = guard_for(0.0);
    let eig = determinant(Operator::Eigen, one, g).unwrap();
    let susy = determinant(Operator::Susy, one, g).unwrap();
    let scale = determinant(Operator::Susy, C::new(1.0, 0.5), g)
        .unwrap()
        .norm();
    assert!(susy.norm() > 1e-3 * scale, "susy={susy}");
    assert!(
        eig.norm()
            < 1e-8
                * determinant(Operator::Eigen, C::new(1.0, 0.5), g)
                    .unwrap()
                    .norm()
    );
}

#[test]
fn eigenfunction_at_one_is_the_symmetry_mode() {
    let grid: Vec<f64> = (0..=100).map(|i| i as f64 / 100.0).collect();
    let (u1, u2) = eigenfunction(C::new(1.0, 0.0), &grid).unwrap();
    let p = profile_params(9).unwrap();
    let g = unstable_mode(9).unwrap();
    let s = p.phi0_derivs(0.5).unwrap()[1];
    let (mut err, mut norm, mut err2) = (0.0, 0.0, 0.0);
    for (i, &rho) in grid.iter().enumerate() {
        let want = g.g1(rho) / s;
        err += (u1[i] - want).norm_sqr();
        norm += want * want;
        err2 += (u2[i] - g.g2(rho) / s).norm_sqr();
    }
    assert!((err / norm).sqrt() < 1e-8);
    assert!((err2 / norm).sqrt() < 1e-8);
    assert!(close(u1[50], C::new(1.0, 0.0), 1e-12));
    assert!(eigenfunction(C::new(1.0, 0.0), &[1.5]).is_err());
}
