//! Exact arithmetic over ℚ and ℚ(i), dense univariate polynomials, and
//! sign certificates built on them. No floating point enters any proof path.

mod certificate;
mod complex;
mod poly;
mod positivity;
mod rational;

pub use certificate::{Certificate, Step, Verdict};
pub use complex::ComplexRational;
pub use poly::{ComplexPoly, Poly, RatPoly, Scalar};
pub use positivity::{
    coeff_nonneg_certificate, count_positive_roots, negative_on_halfline, positive_on_halfline,
    sqrt_compare, sqrt_expr_f64, sturm_sequence,
};
pub use rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse '{0}' as a rational")]
    Parse(String),
    #[error("polynomials in different variables: {0} vs {1}")]
    VarMismatch(String, String),
    #[error("zero polynomial not allowed here")]
    ZeroPolynomial,
    #[error("division leaves a nonzero remainder")]
    InexactDivision,
    #[error("polynomial vanishes at the interval endpoint")]
    RootAtEndpoint,
    #[error("target degree {given} below polynomial degree {needed}")]
    DegreeTooLow { needed: usize, given: usize },
    #[error("value {0} is not representable as an exact rational")]
    NotRational(String),
    #[error("operation needs a scalar operand (constant polynomial)")]
    NotScalar,
}

/// Operations accepted by [`poly_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyOp {
    Add,
    Sub,
    Mul,
    /// Quotient of Euclidean division.
    Div,
    /// `p(q(x))`.
    Compose,
    /// `p'`; the second operand is ignored.
    Derivative,
    /// `p(c)` where the second operand is the constant `c`.
    Eval,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolyValue {
    Poly(RatPoly),
    Scalar(Rational),
}

/// Single entry point for the polynomial operations, with uniform errors.
pub fn poly_arith(p: &RatPoly, q: &RatPoly, op: PolyOp) -> Result<PolyValue, ExactError> {
    Ok(match op {
        PolyOp::Add => PolyValue::Poly(p.checked_add(q)?),
        PolyOp::Sub => PolyValue::Poly(p.checked_sub(q)?),
        PolyOp::Mul => PolyValue::Poly(p.checked_mul(q)?),
        PolyOp::Div => PolyValue::Poly(p.div_rem(q)?.0),
        PolyOp::Compose => PolyValue::Poly(p.compose(q)),
        PolyOp::Derivative => PolyValue::Poly(p.derivative()),
        PolyOp::Eval => {
            if !q.is_constant() {
                return Err(ExactError::NotScalar);
            }
            PolyValue::Scalar(p.eval(&q.coeff(0)))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_arith_examples() {
        let t2 = RatPoly::from_ints(&[0, 0, 1], "t");
        let none = RatPoly::zero("t");
        assert_eq!(
            poly_arith(&t2, &none, PolyOp::Derivative).unwrap(),
            PolyValue::Poly(RatPoly::from_ints(&[0, 2], "t"))
        );
        let q = RatPoly::from_ints(&[1316, -925, 441], "e");
        let zero = RatPoly::from_ints(&[0], "e");
        assert_eq!(
            poly_arith(&q, &zero, PolyOp::Eval).unwrap(),
            PolyValue::Scalar(Rational::from(1316))
        );
        let a = RatPoly::from_ints(&[1, 1], "t");
        let b = RatPoly::from_ints(&[-1, 1], "t");
        assert_eq!(
            poly_arith(&a, &b, PolyOp::Mul).unwrap(),
            PolyValue::Poly(RatPoly::from_ints(&[-1, 0, 1], "t"))
        );
        assert_eq!(
            poly_arith(&a, &none, PolyOp::Div),
            Err(ExactError::ZeroPolynomial)
        );
        assert_eq!(poly_arith(&a, &b, PolyOp::Eval), Err(ExactError::NotScalar));
    }
}
