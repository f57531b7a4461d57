use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{ComplexRational, ExactError, Rational};

/// Coefficient field for [`Poly`].
pub trait Scalar: Clone + PartialEq + fmt::Display + Zero + One + Send + Sync {
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn neg_ref(&self) -> Self;
    fn checked_div(&self, rhs: &Self) -> Result<Self, ExactError>;
    fn from_rational(r: Rational) -> Self;
}

macro_rules! impl_scalar {
    ($t:ty, $lift:expr) => {
        impl Scalar for $t {
            fn add_ref(&self, rhs: &Self) -> Self {
                self + rhs
            }
            fn sub_ref(&self, rhs: &Self) -> Self {
                self - rhs
            }
            fn mul_ref(&self, rhs: &Self) -> Self {
                self * rhs
            }
            fn neg_ref(&self) -> Self {
                -self
            }
            fn checked_div(&self, rhs: &Self) -> Result<Self, ExactError> {
                <$t>::checked_div(self, rhs)
            }
            fn from_rational(r: Rational) -> Self {
                $lift(r)
            }
        }
    };
}

impl_scalar!(Rational, |r| r);
impl_scalar!(ComplexRational, ComplexRational::real);

/// Dense univariate polynomial, coefficients in ascending degree.
///
/// Constant polynomials are compatible with any variable; combining two
/// non-constant polynomials in different variables is an error.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "F: Serialize", deserialize = "F: Deserialize<'de>"))]
pub struct Poly<F> {
    coeffs: Vec<F>,
    var: String,
}

pub type RatPoly = Poly<Rational>;
pub type ComplexPoly = Poly<ComplexRational>;

impl<F: Scalar> Poly<F> {
    pub fn new(coeffs: Vec<F>, var: &str) -> Self {
        let mut p = Poly {
            coeffs,
            var: var.to_string(),
        };
        p.trim();
        p
    }

    pub fn zero(var: &str) -> Self {
        Poly {
            coeffs: Vec::new(),
            var: var.to_string(),
        }
    }

    pub fn constant(c: F, var: &str) -> Self {
        Self::new(vec![c], var)
    }

    /// The polynomial `var`.
    pub fn x(var: &str) -> Self {
        Self::new(vec![F::zero(), F::one()], var)
    }

    pub fn monomial(c: F, deg: usize, var: &str) -> Self {
        let mut coeffs = vec![F::zero(); deg + 1];
        coeffs[deg] = c;
        Self::new(coeffs, var)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn with_var(mut self, var: &str) -> Self {
        self.var = var.to_string();
        self
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> F {
        self.coeffs.get(i).cloned().unwrap_or_else(F::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> F {
        self.coeffs.last().cloned().unwrap_or_else(F::zero)
    }

    fn join_var(&self, other: &Self) -> Result<String, ExactError> {
        if self.var == other.var || other.is_constant() {
            Ok(self.var.clone())
        } else if self.is_constant() {
            Ok(other.var.clone())
        } else {
            Err(ExactError::VarMismatch(self.var.clone(), other.var.clone()))
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, ExactError> {
        let var = self.join_var(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.coeff(i).add_ref(&other.coeff(i)))
            .collect();
        Ok(Self::new(coeffs, &var))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self, ExactError> {
        self.checked_add(&-other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, ExactError> {
        let var = self.join_var(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(&var));
        }
        let mut out = vec![F::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add_ref(&a.mul_ref(b));
            }
        }
        Ok(Self::new(out, &var))
    }

    pub fn scale(&self, c: &F) -> Self {
        Self::new(
            self.coeffs.iter().map(|a| a.mul_ref(c)).collect(),
            &self.var,
        )
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut acc = Self::constant(F::one(), &self.var);
        for _ in 0..exp {
            acc = &acc * self;
        }
        acc
    }

    /// Euclidean division: `self = q·divisor + r` with `deg r < deg divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), ExactError> {
        let var = self.join_var(divisor)?;
        let dd = divisor.degree().ok_or(ExactError::ZeroPolynomial)?;
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(&var), Self::new(rem, &var)));
        }
        let mut quot = vec![F::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = rem[k + dd].checked_div(&lead)?;
            if !c.is_zero() {
                for (j, b) in divisor.coeffs.iter().enumerate() {
                    rem[k + j] = rem[k + j].sub_ref(&c.mul_ref(b));
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(quot, &var), Self::new(rem, &var)))
    }

    /// Quotient of an exact division; a nonzero remainder is an error.
    pub fn exact_div(&self, divisor: &Self) -> Result<Self, ExactError> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(ExactError::InexactDivision)
        }
    }

    pub fn monic(&self) -> Result<Self, ExactError> {
        let lead = self.leading();
        if lead.is_zero() {
            return Err(ExactError::ZeroPolynomial);
        }
        let inv = F::one().checked_div(&lead)?;
        Ok(self.scale(&inv))
    }

    /// Monic greatest common divisor; `gcd(0, 0)` is an error.
    pub fn gcd(&self, other: &Self) -> Result<Self, ExactError> {
        let mut a = self.clone();
        let mut b = other.clone();
        self.join_var(other)?;
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul_ref(&F::from_rational(Rational::from(i as i64))))
            .collect();
        Self::new(coeffs, &self.var)
    }

    pub fn nth_derivative(&self, n: usize) -> Self {
        (0..n).fold(self.clone(), |p, _| p.derivative())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &F) -> F {
        self.coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, c| acc.mul_ref(x).add_ref(c))
    }

    /// `self(inner(t))`, carrying the variable of `inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        let mut acc = Self::zero(&inner.var);
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * inner) + &Self::constant(c.clone(), &inner.var);
        }
        acc
    }

    /// `Σ cₖ numerᵏ denomᵈ⁻ᵏ`: numerator of `self(numer/denom)` cleared to
    /// the homogeneous degree `d ≥ deg self`.
    pub fn homogenize(&self, numer: &Self, denom: &Self, d: usize) -> Result<Self, ExactError> {
        let deg = self.degree().unwrap_or(0);
        if d < deg {
            return Err(ExactError::DegreeTooLow {
                needed: deg,
                given: d,
            });
        }
        numer.join_var(denom)?;
        let var = if numer.is_constant() {
            denom.var.clone()
        } else {
            numer.var.clone()
        };
        let mut num_pows = vec![Self::constant(F::one(), &var)];
        let mut den_pows = vec![Self::constant(F::one(), &var)];
        for k in 1..=d {
            num_pows.push(&num_pows[k - 1] * numer);
            den_pows.push(&den_pows[k - 1] * denom);
        }
        let mut acc = Self::zero(&var);
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let term = (&num_pows[k] * &den_pows[d - k]).scale(c);
            acc = &acc + &term;
        }
        Ok(acc)
    }

    pub fn map<G: Scalar>(&self, f: impl Fn(&F) -> G) -> Poly<G> {
        Poly::new(self.coeffs.iter().map(f).collect(), &self.var)
    }
}

impl RatPoly {
    pub fn from_ints(coeffs: &[i64], var: &str) -> Self {
        Self::new(coeffs.iter().map(|&c| Rational::from(c)).collect(), var)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_f64())
    }

    /// Sign of `p(x)` as `x → +∞`.
    pub fn sign_at_infinity(&self) -> i32 {
        self.leading().signum()
    }

    /// Positive rational multiple with coprime integer coefficients; the
    /// sign of every coefficient is preserved.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lcm = Rational::lcm_denominators(self.coeffs.iter());
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| c.numer() * (&lcm / c.denom()))
            .collect();
        let content = ints.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        Self::new(
            ints.into_iter()
                .map(|c| Rational::from(c / &content))
                .collect(),
            &self.var,
        )
    }

    /// Integer coefficients, or `None` if any coefficient is fractional.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.numer().clone()))
            .collect()
    }

    pub fn to_complex(&self) -> ComplexPoly {
        self.map(|c| ComplexRational::real(c.clone()))
    }

    /// Largest absolute value of a coefficient, as f64 (for scaling checks).
    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|c| c.abs().to_f64())
            .fold(0.0, f64::max)
    }
}

impl ComplexPoly {
    pub fn re(&self) -> RatPoly {
        self.map(|c| c.re.clone())
    }

    pub fn im(&self) -> RatPoly {
        self.map(|c| c.im.clone())
    }

    /// `|p(t)|²` for real `t`, i.e. `Re(p)² + Im(p)²`.
    pub fn norm_sqr_real_line(&self) -> RatPoly {
        let (re, im) = (self.re(), self.im());
        &(&re * &re) + &(&im * &im)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| {
                acc * z + c.to_complex64()
            })
    }
}

macro_rules! poly_binop {
    ($trait:ident, $method:ident, $checked:ident) => {
        /// Panics on incompatible variables; see the `checked_*` methods.
        impl<F: Scalar> $trait<&Poly<F>> for &Poly<F> {
            type Output = Poly<F>;
            fn $method(self, rhs: &Poly<F>) -> Poly<F> {
                self.$checked(rhs).expect("polynomial variable mismatch")
            }
        }
        impl<F: Scalar> $trait<Poly<F>> for Poly<F> {
            type Output = Poly<F>;
            fn $method(self, rhs: Poly<F>) -> Poly<F> {
                (&self).$method(&rhs)
            }
        }
    };
}

poly_binop!(Add, add, checked_add);
poly_binop!(Sub, sub, checked_sub);
poly_binop!(Mul, mul, checked_mul);

impl<F: Scalar> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly {
            coeffs: self.coeffs.iter().map(|c| c.neg_ref()).collect(),
            var: self.var.clone(),
        }
    }
}

impl<F: Scalar> Neg for Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        -&self
    }
}

/// Descending powers, e.g. `441e^2 + -925e + 1316`.
impl<F: Scalar> fmt::Display for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let needs_parens = i > 0 && c.to_string().contains(['+', '/']);
            let coeff = if needs_parens {
                format!("({c})")
            } else {
                c.to_string()
            };
            match i {
                0 => write!(f, "{coeff}")?,
                _ => {
                    let coeff = if c.is_one() { String::new() } else { coeff };
                    if i == 1 {
                        write!(f, "{coeff}{}", self.var)?
                    } else {
                        write!(f, "{coeff}{}^{i}", self.var)?
                    }
                }
            }
        }
        Ok(())
    }
}

impl<F: Scalar> fmt::Debug for Poly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl RatPoly {
    /// True if `p(x) ≥ 0` is implied termwise on `[0, ∞)`.
    pub fn has_nonneg_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| !c.is_negative())
    }

    pub fn negative_coeff_indices(&self) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_negative())
            .map(|(i, _)| i)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> RatPoly {
        RatPoly::from_ints(c, "t")
    }

    #[test]
    fn product_and_derivative() {
        assert_eq!(&p(&[1, 1]) * &p(&[-1, 1]), p(&[-1, 0, 1]));
        assert_eq!(p(&[0, 0, 1]).derivative(), p(&[0, 2]));
        assert!(p(&[5]).derivative().is_zero());
    }

    #[test]
    fn division_and_gcd() {
        let a = p(&[-1, 0, 1]);
        let b = p(&[1, 1]);
        assert_eq!(a.exact_div(&b).unwrap(), p(&[-1, 1]));
        assert_eq!(
            p(&[1, 0, 1]).exact_div(&b),
            Err(ExactError::InexactDivision)
        );
        assert_eq!(
            a.div_rem(&RatPoly::zero("t")),
            Err(ExactError::ZeroPolynomial)
        );
        let g = (&a * &p(&[2, 1])).gcd(&(&b * &p(&[2, 1]))).unwrap();
        assert_eq!(g, p(&[2, 3, 1]));
    }

    #[test]
    fn compose_and_homogenize() {
        let sq = p(&[0, 0, 1]);
        assert_eq!(sq.compose(&p(&[1, 1])), p(&[1, 2, 1]));
        // t² at t = (t+1)/(t-1), cleared to degree 2
        let h = sq.homogenize(&p(&[1, 1]), &p(&[-1, 1]), 2).unwrap();
        assert_eq!(h, p(&[1, 2, 1]));
        let h3 = sq.homogenize(&p(&[1, 1]), &p(&[-1, 1]), 3).unwrap();
        assert_eq!(h3, &p(&[1, 2, 1]) * &p(&[-1, 1]));
    }

    #[test]
    fn variable_mismatch() {
        let u = RatPoly::x("u");
        let e = RatPoly::x("e");
        assert!(u.checked_add(&e).is_err());
        assert_eq!((&u + &RatPoly::constant(Rational::from(3), "e")).var(), "u");
    }

    #[test]
    fn primitive_part_keeps_signs() {
        let q = RatPoly::new(vec![Rational::frac(1, 2), Rational::frac(-3, 4)], "t");
        assert_eq!(q.primitive_part(), p(&[2, -3]));
    }

    #[test]
    fn display() {
        assert_eq!(p(&[1316, -925, 441]).to_string(), "441t^2 + -925t + 1316");
        assert_eq!(RatPoly::zero("t").to_string(), "0");
    }

    #[test]
    fn complex_norm_on_real_line() {
        // p(t) = t + i: |p|² = t² + 1
        let q = ComplexPoly::new(
            vec![
                ComplexRational::i(),
                ComplexRational::real(Rational::from(1)),
            ],
            "t",
        );
        assert_eq!(q.norm_sqr_real_line(), p(&[1, 0, 1]));
    }
}
