//! Three-term recurrence for the power-series coefficients of the Heun-form
//! equation at `x = 0`, its ratio form and the quasi-solution bounds.

use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::SpectralError;
use crate::exactmath::{Certificate, ComplexRational, Rational};

type C = Complex64;

/// `Aₙ(λ) = [155λ(λ+4n+9) + 2(458n² + 2357n + 2727)] / (310(2n+15)(n+2))`.
pub fn coeff_a(n: i64, lambda: C) -> C {
    let nf = n as f64;
    let num =
        155.0 * lambda * (lambda + 4.0 * nf + 9.0) + 2.0 * (458.0 * nf * nf + 2357.0 * nf + 2727.0);
    num / (310.0 * (2.0 * nf + 15.0) * (nf + 2.0))
}

/// `Bₙ(λ) = −37(λ+2n+3)(λ+2n) / (155(2n+15)(n+2))`.
pub fn coeff_b(n: i64, lambda: C) -> C {
    let nf = n as f64;
    -37.0 * (lambda + 2.0 * nf + 3.0) * (lambda + 2.0 * nf)
        / (155.0 * (2.0 * nf + 15.0) * (nf + 2.0))
}

/// Quasi-solution `r̃ₙ(λ) = λ²/(4n²+28n+27) + λ/(n+7) + (2n+12)/(2n+23)`.
pub fn r_tilde(n: i64, lambda: C) -> C {
    let nf = n as f64;
    lambda * lambda / (4.0 * nf * nf + 28.0 * nf + 27.0)
        + lambda / (nf + 7.0)
        + (2.0 * nf + 12.0) / (2.0 * nf + 23.0)
}

/// `εₙ = (Aₙr̃ₙ + Bₙ)/(r̃ₙr̃ₙ₊₁) − 1`.
pub fn epsilon(n: i64, lambda: C) -> C {
    let (rt, rt1) = (r_tilde(n, lambda), r_tilde(n + 1, lambda));
    (coeff_a(n, lambda) * rt + coeff_b(n, lambda)) / (rt * rt1) - 1.0
}

/// `Cₙ = Bₙ/(r̃ₙr̃ₙ₊₁)`.
pub fn c_coeff(n: i64, lambda: C) -> C {
    coeff_b(n, lambda) / (r_tilde(n, lambda) * r_tilde(n + 1, lambda))
}

fn q(n: i64, d: i64) -> Rational {
    Rational::frac(n, d)
}

fn cr(re: Rational) -> ComplexRational {
    ComplexRational::real(re)
}

pub fn coeff_a_exact(n: i64, lambda: &ComplexRational) -> ComplexRational {
    let lin = lambda + &cr(Rational::from(4 * n + 9));
    let num = &(&cr(Rational::from(155)) * &(lambda * &lin))
        + &cr(Rational::from(2 * (458 * n * n + 2357 * n + 2727)));
    &num * &cr(q(1, 310 * (2 * n + 15) * (n + 2)))
}

pub fn coeff_b_exact(n: i64, lambda: &ComplexRational) -> ComplexRational {
    let f1 = lambda + &cr(Rational::from(2 * n + 3));
    let f2 = lambda + &cr(Rational::from(2 * n));
    &(&f1 * &f2) * &cr(q(-37, 155 * (2 * n + 15) * (n + 2)))
}

pub fn r_tilde_exact(n: i64, lambda: &ComplexRational) -> ComplexRational {
    let l2 = lambda * lambda;
    &(&(&l2 * &cr(q(1, 4 * n * n + 28 * n + 27))) + &(lambda * &cr(q(1, n + 7))))
        + &cr(q(2 * n + 12, 2 * n + 23))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Float,
    Exact,
}

/// `λ` with the coefficient data `aₙ, rₙ, r̃ₙ, δₙ, εₙ, Cₙ` for `n = 0..=N`.
/// `rₙ` comes from the ratio recurrence, so it stays meaningful when `aₙ`
/// leaves the floating range.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralSequence {
    pub lambda: C,
    pub n: usize,
    pub a: Vec<C>,
    pub r: Vec<C>,
    pub r_tilde: Vec<C>,
    pub delta: Vec<C>,
    pub epsilon: Vec<C>,
    pub c: Vec<C>,
}

fn derived(lambda: C, n: usize, a: Vec<C>, r: Vec<C>) -> SpectralSequence {
    let idx = 0..=n as i64;
    let r_t: Vec<C> = idx.clone().map(|k| r_tilde(k, lambda)).collect();
    let delta = r.iter().zip(&r_t).map(|(r, t)| r / t - 1.0).collect();
    SpectralSequence {
        lambda,
        n,
        a,
        r,
        r_tilde: r_t,
        delta,
        epsilon: idx.clone().map(|k| epsilon(k, lambda)).collect(),
        c: idx.map(|k| c_coeff(k, lambda)).collect(),
    }
}

/// Ratios `r₀..=r_N` from `r₀ = A₋₁` and `rₙ₊₁ = Aₙ + Bₙ/rₙ`.
pub fn ratios(lambda: C, n: usize) -> Vec<C> {
    let mut r = Vec::with_capacity(n + 1);
    r.push(coeff_a(-1, lambda));
    for k in 0..n as i64 {
        let prev = r[k as usize];
        r.push(coeff_a(k, lambda) + coeff_b(k, lambda) / prev);
    }
    r
}

fn recurrence_float(lambda: C, n: usize) -> SpectralSequence {
    let mut a = vec![C::one(), coeff_a(-1, lambda)];
    for k in 0..n.saturating_sub(1) as i64 {
        let i = k as usize;
        a.push(coeff_a(k, lambda) * a[i + 1] + coeff_b(k, lambda) * a[i]);
    }
    a.truncate(n + 1);
    derived(lambda, n, a, ratios(lambda, n))
}

/// Exact coefficients `a₀..=a_N` in ℚ(i).
pub fn coefficients_exact(lambda: &ComplexRational, n: usize) -> Vec<ComplexRational> {
    let mut a = vec![ComplexRational::one(), coeff_a_exact(-1, lambda)];
    for k in 0..n.saturating_sub(1) as i64 {
        let i = k as usize;
        let next = &(&coeff_a_exact(k, lambda) * &a[i + 1]) + &(&coeff_b_exact(k, lambda) * &a[i]);
        a.push(next);
    }
    a.truncate(n + 1);
    a
}

/// Exact ratios by the ratio recurrence; `None` once some `rₙ` vanishes.
pub fn ratios_exact(lambda: &ComplexRational, n: usize) -> Option<Vec<ComplexRational>> {
    let mut r = vec![coeff_a_exact(-1, lambda)];
    for k in 0..n as i64 {
        let prev = &r[k as usize];
        let next = &coeff_a_exact(k, lambda) + &coeff_b_exact(k, lambda).checked_div(prev).ok()?;
        r.push(next);
    }
    Some(r)
}

pub fn recurrence(
    lambda: C,
    n: usize,
    arithmetic: Arithmetic,
) -> Result<SpectralSequence, SpectralError> {
    if n < 1 {
        return Err(SpectralError::InvalidInput("N must be at least 1".into()));
    }
    match arithmetic {
        Arithmetic::Float => Ok(recurrence_float(lambda, n)),
        Arithmetic::Exact => {
            let lam = ComplexRational::from_complex64(lambda).ok_or_else(|| {
                SpectralError::InvalidInput(format!("lambda {lambda} is not a finite rational"))
            })?;
            let a_exact = coefficients_exact(&lam, n);
            let r: Vec<C> = a_exact
                .windows(2)
                .map(|w| {
                    w[1].checked_div(&w[0])
                        .map(|x| x.to_complex64())
                        .unwrap_or(C::new(f64::NAN, f64::NAN))
                })
                .collect();
            // the exact list has n + 1 entries, so r has n; extend with r_N
            let mut r = r;
            let last = r.last().copied().unwrap_or(C::zero());
            r.push(coeff_a(n as i64 - 1, lambda) + coeff_b(n as i64 - 1, lambda) / last);
            let a = a_exact.iter().map(|x| x.to_complex64()).collect();
            Ok(derived(lambda, n, a, r))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitClass {
    One,
    SeventyfourOver155,
    Undecided,
}

/// Which of the two admissible limits `rₙ` is closest to at `n = N`.
pub fn classify_limit(lambda: C, n: usize, tol: f64) -> LimitClass {
    let r = *ratios(lambda, n).last().expect("nonempty");
    let d1 = (r - 1.0).norm();
    let d2 = (r - 74.0 / 155.0).norm();
    if d1 <= tol && d1 < d2 {
        LimitClass::One
    } else if d2 <= tol {
        LimitClass::SeventyfourOver155
    } else {
        LimitClass::Undecided
    }
}

/// `n_axis` uniform samples on `[−iR, iR]` and `n_interior` uniform samples
/// of the right half-disk of radius `R`.
pub fn sample_half_plane(seed: u64, n_axis: usize, n_interior: usize, radius: f64) -> Vec<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<C> = (0..n_axis)
        .map(|_| C::new(0.0, rng.gen_range(-radius..=radius)))
        .collect();
    for _ in 0..n_interior {
        let rad = radius * rng.gen::<f64>().sqrt();
        let theta = rng.gen_range(-std::f64::consts::FRAC_PI_2..=std::f64::consts::FRAC_PI_2);
        out.push(C::from_polar(rad, theta));
    }
    out
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
struct Worst {
    value: f64,
    lambda_re: f64,
    lambda_im: f64,
    n: i64,
}

impl Worst {
    fn update(&mut self, value: f64, lambda: C, n: i64) {
        if value > self.value || value.is_nan() {
            *self = Worst {
                value,
                lambda_re: lambda.re,
                lambda_im: lambda.im,
                n,
            };
        }
    }
    fn describe(&self) -> String {
        format!(
            "max {:.6e} at lambda = {}{:+}i, n = {}",
            self.value, self.lambda_re, self.lambda_im, self.n
        )
    }
}

/// Sampled check of `|δ₇| ≤ 1/3`, `|εₙ| ≤ 1/12`, `|Cₙ| ≤ 1/2` for
/// `7 ≤ n ≤ n_max`, plus the induction `|δₙ| ≤ 1/3` along the δ-recurrence.
pub fn verify_bounds(samples: &[C], n_max: usize) -> Result<Certificate, SpectralError> {
    if n_max < 7 {
        return Err(SpectralError::InvalidInput(
            "n_max must be at least 7".into(),
        ));
    }
    if let Some(bad) = samples
        .iter()
        .find(|l| l.re < 0.0 || !l.re.is_finite() || !l.im.is_finite())
    {
        return Err(SpectralError::InvalidInput(format!(
            "sample {bad} is not in the closed right half-plane"
        )));
    }
    let mut d7 = Worst::default();
    let mut eps = Worst::default();
    let mut cc = Worst::default();
    let mut ind = Worst::default();
    let mut first_violation: Option<String> = None;
    let mut note = |what: &str, l: C, n: i64, v: f64, bound: f64| {
        if !(v <= bound) && first_violation.is_none() {
            first_violation = Some(format!(
                "{what} = {v:.6e} > {bound:.6} at lambda = {l}, n = {n}"
            ));
        }
    };
    for &l in samples {
        let r = ratios(l, 7);
        let delta7 = r[7] / r_tilde(7, l) - 1.0;
        d7.update(delta7.norm(), l, 7);
        note("|delta_7|", l, 7, delta7.norm(), 1.0 / 3.0);
        let mut delta = delta7;
        for n in 7..=n_max as i64 {
            let e = epsilon(n, l);
            let c = c_coeff(n, l);
            eps.update(e.norm(), l, n);
            cc.update(c.norm(), l, n);
            note("|eps_n|", l, n, e.norm(), 1.0 / 12.0);
            note("|C_n|", l, n, c.norm(), 0.5);
            if n < n_max as i64 {
                delta = e - c * delta / (1.0 + delta);
                ind.update(delta.norm(), l, n + 1);
                note("|delta_n| (induction)", l, n + 1, delta.norm(), 1.0 / 3.0);
            }
        }
    }
    let mut cert = Certificate::new(format!(
        "sampled quasi-solution bounds, {} samples, 7 <= n <= {n_max}",
        samples.len()
    ));
    cert.push(
        "[sampled] |delta_7| <= 1/3",
        d7.value <= 1.0 / 3.0,
        d7.describe(),
    );
    cert.push(
        "[sampled] |eps_n| <= 1/12",
        eps.value <= 1.0 / 12.0,
        eps.describe(),
    );
    cert.push("[sampled] |C_n| <= 1/2", cc.value <= 0.5, cc.describe());
    cert.push(
        "[sampled] induction |delta_n| <= 1/3 via delta_{n+1} = eps_n - C_n delta_n/(1+delta_n)",
        ind.value <= 1.0 / 3.0,
        ind.describe(),
    );
    cert.push(
        "[exact] induction step 1/12 + (1/2)(1/3)/(2/3) = 1/3",
        &Rational::frac(1, 12)
            + &(&Rational::frac(1, 2) * &(&Rational::frac(1, 3) / &Rational::frac(2, 3)))
            == Rational::frac(1, 3),
        "rational arithmetic",
    );
    if let Some(v) = first_violation {
        cert.push("first violation", false, v);
    }
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn initial_ratio() {
        assert_eq!(
            coeff_a_exact(-1, &ComplexRational::zero()),
            cr(q(828, 2015))
        );
        assert_eq!(
            coeff_a_exact(-1, &ComplexRational::one()),
            cr(q(1293, 2015))
        );
        assert_eq!(coeff_b(0, C::zero()), C::zero());
    }

    #[test]
    fn float_and_exact_agree() {
        let lam = C::new(0.5, 2.25);
        let f = recurrence(lam, 120, Arithmetic::Float).unwrap();
        let e = recurrence(lam, 120, Arithmetic::Exact).unwrap();
        for n in 0..=120 {
            assert!((f.a[n] - e.a[n]).norm() <= 1e-10 * e.a[n].norm(), "n = {n}");
        }
    }

    #[test]
    fn ratio_matches_coefficients() {
        let s = recurrence(C::new(1.0, 1.0), 50, Arithmetic::Float).unwrap();
        for n in 0..50 {
            assert!((s.r[n] - s.a[n + 1] / s.a[n]).norm() < 1e-12 * s.r[n].norm());
        }
    }

    #[test]
    fn rejects_left_half_plane_samples() {
        assert!(verify_bounds(&[C::new(-1.0, 0.0)], 10).is_err());
    }
}
