//! Exact sign certificates for rational polynomials on `[0, ∞)`.

use num_traits::Zero;

use super::{Certificate, ExactError, RatPoly};

/// Sturm chain `p, p', -rem(..)...`, each member rescaled by a positive
/// rational to keep integers small (signs are unaffected).
pub fn sturm_sequence(p: &RatPoly) -> Result<Vec<RatPoly>, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let mut seq = vec![p.primitive_part()];
    let d = p.derivative();
    if d.is_zero() {
        return Ok(seq);
    }
    seq.push(d.primitive_part());
    loop {
        let n = seq.len();
        let (_, r) = seq[n - 2].div_rem(&seq[n - 1])?;
        if r.is_zero() {
            break;
        }
        seq.push((-r).primitive_part());
    }
    Ok(seq)
}

fn sign_changes(signs: impl IntoIterator<Item = i32>) -> usize {
    let nonzero: Vec<i32> = signs.into_iter().filter(|&s| s != 0).collect();
    nonzero.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Number of distinct real roots of `p` in `(0, ∞)`; requires `p(0) ≠ 0`.
pub fn count_positive_roots(p: &RatPoly) -> Result<usize, ExactError> {
    let seq = sturm_sequence(p)?;
    if p.coeff(0).is_zero() {
        return Err(ExactError::RootAtEndpoint);
    }
    let at_zero = sign_changes(seq.iter().map(|s| s.coeff(0).signum()));
    let at_inf = sign_changes(seq.iter().map(|s| s.sign_at_infinity()));
    Ok(at_zero - at_inf)
}

/// Pass iff every coefficient is nonnegative and `p ≠ 0`.
pub fn coeff_nonneg_certificate(p: &RatPoly) -> Certificate {
    let mut cert = Certificate::new(format!(
        "nonnegative coefficients of {}-polynomial",
        p.var()
    ));
    cert.push(
        "polynomial is nonzero",
        !p.is_zero(),
        p.degree()
            .map_or_else(|| "zero polynomial".to_string(), |d| format!("degree {d}")),
    );
    let neg = p.negative_coeff_indices();
    let witness = if neg.is_empty() {
        format!("all {} coefficients >= 0", p.coeffs().len())
    } else {
        let shown: Vec<String> = neg
            .iter()
            .map(|&i| format!("[{i}]={}", p.coeff(i)))
            .collect();
        format!("negative coefficients at {}", shown.join(", "))
    };
    cert.push("every coefficient >= 0", neg.is_empty(), witness);
    cert
}

/// Pass iff `p(x) > 0` for all `x ≥ 0`, via `p(0) > 0`, positive leading
/// coefficient and a Sturm count of zero roots in `(0, ∞)`.
pub fn positive_on_halfline(p: &RatPoly) -> Result<Certificate, ExactError> {
    if p.is_zero() {
        return Err(ExactError::ZeroPolynomial);
    }
    let mut cert = Certificate::new(format!("{p} > 0 on [0, inf)"));
    let p0 = p.coeff(0);
    let ok0 = cert.push(
        "value at 0 is positive",
        p0.is_positive(),
        format!("p(0) = {p0}"),
    );
    let lead = p.leading();
    cert.push(
        "leading coefficient is positive",
        lead.is_positive(),
        format!("lc = {lead}"),
    );
    if p.is_constant() || !ok0 {
        return Ok(cert);
    }
    let seq = sturm_sequence(p)?;
    let at_zero = sign_changes(seq.iter().map(|s| s.coeff(0).signum()));
    let at_inf = sign_changes(seq.iter().map(|s| s.sign_at_infinity()));
    cert.push(
        "no root in (0, inf) by Sturm count",
        at_zero == at_inf,
        format!(
            "chain length {}, sign changes V(0) = {at_zero}, V(inf) = {at_inf}",
            seq.len()
        ),
    );
    Ok(cert)
}

/// Convenience: `p < 0` on `[0, ∞)`.
pub fn negative_on_halfline(p: &RatPoly) -> Result<Certificate, ExactError> {
    positive_on_halfline(&-p)
}

/// Certifies `P·√Q − R > 0` on `[0, ∞)` from `Q > 0`, `P > 0` and either
/// `P²Q − R² > 0` or `R < 0`, all on the half-line.
pub fn sqrt_compare(p: &RatPoly, q: &RatPoly, r: &RatPoly) -> Result<Certificate, ExactError> {
    let mut cert = Certificate::new(format!("({p})*sqrt({q}) - ({r}) > 0 on [0, inf)"));
    if q.is_zero() || p.is_zero() {
        cert.push("P and Q nonzero", false, "zero polynomial");
        return Ok(cert);
    }
    cert.absorb("Q > 0", positive_on_halfline(q)?);
    cert.absorb("P > 0", positive_on_halfline(p)?);
    let gap = &(&(p * p) * q) - &(r * r);
    let gap_cert = if gap.is_zero() {
        None
    } else {
        Some(positive_on_halfline(&gap)?)
    };
    match gap_cert {
        Some(c) if c.passed() => {
            cert.absorb("P^2 Q - R^2 > 0", c);
        }
        _ => {
            // squares do not separate; fall back to R < 0 (then P√Q > 0 > R)
            if r.is_zero() {
                cert.push("R = 0", true, "P*sqrt(Q) > 0 = R");
            } else {
                cert.absorb("R < 0", negative_on_halfline(r)?);
            }
        }
    }
    Ok(cert)
}

/// Float sample of `P√Q − R` used by property tests.
pub fn sqrt_expr_f64(p: &RatPoly, q: &RatPoly, r: &RatPoly, x: f64) -> f64 {
    p.eval_f64(x) * q.eval_f64(x).max(0.0).sqrt() - r.eval_f64(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> RatPoly {
        RatPoly::from_ints(c, "e")
    }

    #[test]
    fn quadratic_without_real_roots() {
        let c = positive_on_halfline(&p(&[1316, -925, 441])).unwrap();
        assert!(c.passed(), "{c}");
    }

    #[test]
    fn root_at_one_fails() {
        assert!(!positive_on_halfline(&p(&[-1, 1])).unwrap().passed());
        // positive at 0 and infinity but two roots in between
        let c = positive_on_halfline(&p(&[2, -3, 1])).unwrap();
        assert!(!c.passed());
        assert_eq!(count_positive_roots(&p(&[2, -3, 1])).unwrap(), 2);
    }

    #[test]
    fn double_root_is_detected() {
        // (e - 1)² touches zero
        assert!(!positive_on_halfline(&p(&[1, -2, 1])).unwrap().passed());
    }

    #[test]
    fn zero_rejected() {
        assert_eq!(
            positive_on_halfline(&p(&[])),
            Err(ExactError::ZeroPolynomial)
        );
    }

    #[test]
    fn sqrt_compare_examples() {
        assert!(sqrt_compare(&p(&[1]), &p(&[4]), &p(&[1])).unwrap().passed());
        assert!(!sqrt_compare(&p(&[1]), &p(&[1]), &p(&[2])).unwrap().passed());
    }

    #[test]
    fn coeff_certificate_examples() {
        assert!(!coeff_nonneg_certificate(&p(&[1316, -925, 441])).passed());
        assert!(coeff_nonneg_certificate(&p(&[1, 0, 1])).passed());
        assert!(!coeff_nonneg_certificate(&p(&[])).passed());
    }
}
