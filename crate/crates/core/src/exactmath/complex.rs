use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{ExactError, Rational};

/// Gaussian rational `re + im·i`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        ComplexRational { re, im }
    }

    pub fn real(re: Rational) -> Self {
        ComplexRational {
            re,
            im: Rational::zero(),
        }
    }

    pub fn i() -> Self {
        ComplexRational {
            re: Rational::zero(),
            im: Rational::one(),
        }
    }

    pub fn conj(&self) -> Self {
        ComplexRational {
            re: self.re.clone(),
            im: -&self.im,
        }
    }

    /// |z|², exact.
    pub fn norm_sqr(&self) -> Rational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn checked_inv(&self) -> Result<Self, ExactError> {
        let n = self.norm_sqr();
        let inv = n.checked_inv()?;
        Ok(ComplexRational {
            re: &self.re * &inv,
            im: -(&self.im * &inv),
        })
    }

    pub fn checked_div(&self, rhs: &ComplexRational) -> Result<Self, ExactError> {
        Ok(self * &rhs.checked_inv()?)
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// Exact conversion of a complex double.
    pub fn from_complex64(z: Complex64) -> Option<Self> {
        Some(ComplexRational {
            re: Rational::from_f64(z.re)?,
            im: Rational::from_f64(z.im)?,
        })
    }
}

impl From<Rational> for ComplexRational {
    fn from(re: Rational) -> Self {
        ComplexRational::real(re)
    }
}

impl Zero for ComplexRational {
    fn zero() -> Self {
        ComplexRational::default()
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for ComplexRational {
    fn one() -> Self {
        ComplexRational::real(Rational::one())
    }
}

impl Neg for ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> Self {
        ComplexRational {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl Neg for &ComplexRational {
    type Output = ComplexRational;
    fn neg(self) -> ComplexRational {
        ComplexRational {
            re: -&self.re,
            im: -&self.im,
        }
    }
}

impl Add<&ComplexRational> for &ComplexRational {
    type Output = ComplexRational;
    fn add(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Sub<&ComplexRational> for &ComplexRational {
    type Output = ComplexRational;
    fn sub(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Mul<&ComplexRational> for &ComplexRational {
    type Output = ComplexRational;
    fn mul(self, rhs: &ComplexRational) -> ComplexRational {
        ComplexRational {
            re: &self.re * &rhs.re - &self.im * &rhs.im,
            im: &self.re * &rhs.im + &self.im * &rhs.re,
        }
    }
}

/// Panics when dividing by zero; see [`ComplexRational::checked_div`].
impl Div<&ComplexRational> for &ComplexRational {
    type Output = ComplexRational;
    fn div(self, rhs: &ComplexRational) -> ComplexRational {
        self.checked_div(rhs)
            .expect("ComplexRational division by zero")
    }
}

macro_rules! owned_variants {
    ($($trait:ident $method:ident),*) => {$(
        impl $trait<ComplexRational> for ComplexRational {
            type Output = ComplexRational;
            fn $method(self, rhs: ComplexRational) -> ComplexRational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&ComplexRational> for ComplexRational {
            type Output = ComplexRational;
            fn $method(self, rhs: &ComplexRational) -> ComplexRational {
                (&self).$method(rhs)
            }
        }
    )*};
}

owned_variants!(Add add, Sub sub, Mul mul, Div div);

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            write!(f, "{}i", self.im)
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, -&self.im)
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl fmt::Debug for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
