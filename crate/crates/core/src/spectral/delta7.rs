//! Exact bound `|δ₇(λ)| ≤ 1/3` on the imaginary axis.
//!
//! `δ₇ = (a₈ − a₇r̃₇)/(a₇r̃₇)` is a quotient of rational polynomials in `λ`.
//! The axis is covered by `λ = (t+4)i` (`|Im λ| ≥ 4`) and `λ = 4ti/(t+1)`
//! (`0 ≤ Im λ < 4`), `t ≥ 0`; the lower half follows by conjugation since
//! all coefficients are real. After clearing denominators,
//! `|δ₇|² = Q₁(t)/Q₂(t)` and the claim reduces to `Q₂ > 0` and
//! `Q₂ − 9Q₁ ≥ 0` on `[0, ∞)`, both read off from the coefficients.

use num_traits::{One, Zero};
use serde::Serialize;

use super::recurrence;
use crate::exactmath::{
    coeff_nonneg_certificate, Certificate, ComplexPoly, ComplexRational, RatPoly, Rational,
};

const VAR: &str = "lambda";

fn a_poly(n: i64) -> RatPoly {
    let s = Rational::frac(1, 310 * (2 * n + 15) * (n + 2));
    RatPoly::from_ints(
        &[2 * (458 * n * n + 2357 * n + 2727), 155 * (4 * n + 9), 155],
        VAR,
    )
    .scale(&s)
}

fn b_poly(n: i64) -> RatPoly {
    let s = Rational::frac(-37, 155 * (2 * n + 15) * (n + 2));
    RatPoly::from_ints(&[2 * n * (2 * n + 3), 4 * n + 3, 1], VAR).scale(&s)
}

fn r_tilde_poly(n: i64) -> RatPoly {
    RatPoly::new(
        vec![
            Rational::frac(2 * n + 12, 2 * n + 23),
            Rational::frac(1, n + 7),
            Rational::frac(1, 4 * n * n + 28 * n + 27),
        ],
        VAR,
    )
}

/// `a₀..=a_N` as polynomials in `λ` (`deg aₙ = 2n`).
pub fn coefficient_polys(n_max: usize) -> Vec<RatPoly> {
    let mut a = vec![RatPoly::constant(Rational::one(), VAR), a_poly(-1)];
    for n in 0..n_max.saturating_sub(1) as i64 {
        let i = n as usize;
        let next = &(&a_poly(n) * &a[i + 1]) + &(&b_poly(n) * &a[i]);
        a.push(next);
    }
    a.truncate(n_max + 1);
    a
}

/// `δ₇ = num/den` in lowest terms (common factor removed, `den` monic).
pub fn delta7_rational_function() -> (RatPoly, RatPoly) {
    let a = coefficient_polys(8);
    let den = &a[7] * &r_tilde_poly(7);
    let num = &a[8] - &den;
    let g = num.gcd(&den).expect("nonzero");
    let num = num.exact_div(&g).expect("gcd divides");
    let den = den.exact_div(&g).expect("gcd divides");
    let lc = den.leading();
    let inv = lc.checked_inv().expect("nonzero");
    (num.scale(&inv), den.scale(&inv))
}

#[derive(Debug, Clone, Serialize)]
pub struct Delta7Piece {
    pub substitution: String,
    pub q1: RatPoly,
    pub q2: RatPoly,
    pub gap: RatPoly,
}

fn piece(
    num: &RatPoly,
    den: &RatPoly,
    numer: &ComplexPoly,
    denom: &ComplexPoly,
    label: &str,
) -> Delta7Piece {
    let d = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0));
    let n = num
        .to_complex()
        .homogenize(numer, denom, d)
        .expect("degree");
    let m = den
        .to_complex()
        .homogenize(numer, denom, d)
        .expect("degree");
    let q1 = n.norm_sqr_real_line();
    let q2 = m.norm_sqr_real_line();
    let l = Rational::from(Rational::lcm_denominators(
        q1.coeffs().iter().chain(q2.coeffs()),
    ));
    let (q1, q2) = (q1.scale(&l), q2.scale(&l));
    let gap = &q2 - &q1.scale(&Rational::from(9));
    Delta7Piece {
        substitution: label.to_string(),
        q1,
        q2,
        gap,
    }
}

/// The two clearing polynomials `(Q₁, Q₂)` for each substitution.
pub fn delta7_pieces() -> Vec<Delta7Piece> {
    let (num, den) = delta7_rational_function();
    let i = ComplexRational::i();
    let t = |c: Vec<ComplexRational>| ComplexPoly::new(c, "t");
    let four = ComplexRational::real(Rational::from(4));
    let big = piece(
        &num,
        &den,
        &t(vec![&four * &i, i.clone()]),
        &t(vec![ComplexRational::one()]),
        "lambda = (t+4)i",
    );
    let small = piece(
        &num,
        &den,
        &t(vec![ComplexRational::zero(), &four * &i]),
        &t(vec![ComplexRational::one(), ComplexRational::one()]),
        "lambda = 4ti/(t+1)",
    );
    vec![big, small]
}

/// Exact certificate of `|δ₇(iy)| ≤ 1/3` for all real `y`.
pub fn certify_delta7() -> Certificate {
    let (num, den) = delta7_rational_function();
    let mut cert = Certificate::new("|delta_7| <= 1/3 on the imaginary axis");
    cert.push(
        "delta_7 = N/D reduced by gcd",
        !den.is_zero(),
        format!(
            "deg N = {}, deg D = {}",
            deg(num.degree()),
            deg(den.degree())
        ),
    );
    cert.push(
        "real coefficients give delta_7(conj l) = conj delta_7(l)",
        true,
        "numerator and denominator lie in Q[lambda]",
    );
    for p in delta7_pieces() {
        let label = p.substitution.clone();
        cert.push(
            format!("{label}: Q1, Q2 have integer coefficients"),
            p.q1.integer_coeffs().is_some() && p.q2.integer_coeffs().is_some(),
            format!(
                "deg Q1 = {}, deg Q2 = {}",
                deg(p.q1.degree()),
                deg(p.q2.degree())
            ),
        );
        let all_pos = p.q2.coeffs().iter().all(|c| c.is_positive());
        cert.push(
            format!("{label}: every coefficient of Q2 is positive"),
            all_pos && !p.q2.is_zero(),
            format!("{} coefficients", p.q2.coeffs().len()),
        );
        cert.absorb(
            &format!("{label}: Q2 - 9 Q1"),
            coeff_nonneg_certificate(&p.gap),
        );
    }
    cert
}

/// Float value of `δ₇(λ)` from the ratio recurrence (cross-check only).
pub fn delta7_float(lambda: num_complex::Complex64) -> num_complex::Complex64 {
    let r = recurrence::ratios(lambda, 7);
    r[7] / recurrence::r_tilde(7, lambda) - 1.0
}

fn deg(d: Option<usize>) -> String {
    d.map_or_else(|| "-inf".to_string(), |d| d.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees() {
        let a = coefficient_polys(8);
        for (n, p) in a.iter().enumerate() {
            assert_eq!(p.degree(), Some(2 * n));
        }
    }
}
