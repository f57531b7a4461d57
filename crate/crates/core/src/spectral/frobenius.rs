//! Frobenius series for `p₂y″ + p₁y′ + p₀y = 0` with complex polynomial
//! coefficients, at a regular singular point written in Euler form
//! `t²a(t)y″ + t b(t)y′ + c(t)y = 0`.

use num_complex::Complex64;
use num_traits::Zero;

use super::SpectralError;

type C = Complex64;

/// Dense polynomial with complex float coefficients, ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoly(pub Vec<C>);

impl CPoly {
    pub fn from_real(c: &[f64]) -> Self {
        CPoly(c.iter().map(|&x| C::new(x, 0.0)).collect())
    }

    pub fn eval(&self, x: C) -> C {
        self.0.iter().rev().fold(C::zero(), |acc, &c| acc * x + c)
    }

    pub fn coeff(&self, k: usize) -> C {
        self.0.get(k).copied().unwrap_or_default()
    }

    pub fn mul(&self, o: &CPoly) -> CPoly {
        if self.0.is_empty() || o.0.is_empty() {
            return CPoly(vec![]);
        }
        let mut out = vec![C::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly(out)
    }

    pub fn add(&self, o: &CPoly) -> CPoly {
        let n = self.0.len().max(o.0.len());
        CPoly((0..n).map(|k| self.coeff(k) + o.coeff(k)).collect())
    }

    pub fn scale(&self, s: C) -> CPoly {
        CPoly(self.0.iter().map(|c| c * s).collect())
    }

    /// `p(1 − t)` expanded in `t`.
    pub fn reflect(&self) -> CPoly {
        let one_minus_t = CPoly::from_real(&[1.0, -1.0]);
        self.0.iter().rev().fold(CPoly(vec![]), |acc, &c| {
            acc.mul(&one_minus_t).add(&CPoly(vec![c]))
        })
    }

    /// `p(c + t)` expanded in `t`.
    pub fn shift(&self, c: C) -> CPoly {
        let c_plus_t = CPoly(vec![c, C::new(1.0, 0.0)]);
        self.0.iter().rev().fold(CPoly(vec![]), |acc, &k| {
            acc.mul(&c_plus_t).add(&CPoly(vec![k]))
        })
    }

    /// Divides by `tᵏ`; the dropped low coefficients must vanish.
    pub fn shift_down(&self, k: usize) -> Result<CPoly, SpectralError> {
        let scale = self.0.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1.0);
        if self.0.iter().take(k).any(|c| c.norm() > 1e-12 * scale) {
            return Err(SpectralError::InvalidInput(
                "point is not regular singular in Euler form".into(),
            ));
        }
        Ok(CPoly(self.0.iter().skip(k).copied().collect()))
    }
}

/// Second-order ODE `p₂y″ + p₁y′ + p₀y = 0` in the variable `ρ`.
#[derive(Debug, Clone)]
pub struct PolyOde {
    pub p2: CPoly,
    pub p1: CPoly,
    pub p0: CPoly,
    /// Real zeros of `p₂`.
    pub singular: Vec<f64>,
}

/// Euler-form coefficients `(a, b, c)` at a singular point.
#[derive(Debug, Clone)]
pub struct EulerForm {
    pub a: CPoly,
    pub b: CPoly,
    pub c: CPoly,
}

impl PolyOde {
    /// `y″ = −(p₁y′ + p₀y)/p₂`.
    pub fn second_derivative(&self, x: C, y: C, dy: C) -> C {
        -(self.p1.eval(x) * dy + self.p0.eval(x) * y) / self.p2.eval(x)
    }

    /// Euler form at `ρ = 0`.
    pub fn euler_at_zero(&self) -> Result<EulerForm, SpectralError> {
        Ok(EulerForm {
            a: self.p2.shift_down(2)?,
            b: self.p1.shift_down(1)?,
            c: self.p0.clone(),
        })
    }

    /// Euler form at `ρ = 1` in `t = 1 − ρ`.
    pub fn euler_at_one(&self) -> Result<EulerForm, SpectralError> {
        let a = self.p2.reflect().shift_down(1)?;
        let b = self.p1.reflect().scale(C::new(-1.0, 0.0));
        let c = self.p0.reflect().mul(&CPoly::from_real(&[0.0, 1.0]));
        Ok(EulerForm { a, b, c })
    }
}

impl EulerForm {
    /// `F_k(r) = a_k r(r−1) + b_k r + c_k`.
    pub fn f(&self, k: usize, r: C) -> C {
        self.a.coeff(k) * r * (r - 1.0) + self.b.coeff(k) * r + self.c.coeff(k)
    }

    fn span(&self) -> usize {
        self.a.0.len().max(self.b.0.len()).max(self.c.0.len())
    }

    /// Roots of the indicial polynomial `a₀s(s−1) + b₀s + c₀`, larger real
    /// part first; `(0, 1 − b₀/a₀)` exactly when `c₀ = 0`.
    pub fn indices(&self) -> (C, C) {
        let (a0, b0, c0) = (self.a.coeff(0), self.b.coeff(0), self.c.coeff(0));
        if c0 == C::zero() {
            let other = 1.0 - b0 / a0;
            return if other.re > 0.0 {
                (other, C::zero())
            } else {
                (C::zero(), other)
            };
        }
        let bb = (b0 - a0) / a0;
        let cc = c0 / a0;
        let disc = (bb * bb - 4.0 * cc).sqrt();
        let (s1, s2) = ((-bb + disc) / 2.0, (-bb - disc) / 2.0);
        if s1.re >= s2.re {
            (s1, s2)
        } else {
            (s2, s1)
        }
    }

    /// Coefficients `e₀ = 1, e₁, …` of `Σ eₙtⁿ⁺ˢ` for `n < terms`.
    pub fn series(&self, s: C, terms: usize) -> Vec<C> {
        let k_max = self.span();
        let mut e = Vec::with_capacity(terms);
        e.push(C::new(1.0, 0.0));
        for n in 1..terms {
            let mut acc = C::zero();
            for k in 1..k_max.min(n + 1) {
                acc += self.f(k, C::from(n as f64 - k as f64) + s) * e[n - k];
            }
            e.push(-acc / self.f(0, C::from(n as f64) + s));
        }
        e
    }

    /// Series for the index `s` whose companion index is `s + Δ`, scaled by
    /// `Π_{j=1}^{J}(j − Δ)` so that it stays entire in `Δ` across the
    /// resonances `Δ ∈ {1, …, J}`. Vanishes identically when a resonance
    /// carries no logarithm.
    pub fn series_entire(&self, s: C, delta: C, guard: usize, terms: usize) -> Vec<C> {
        let k_max = self.span();
        let a0 = self.a.coeff(0);
        let mut h = Vec::with_capacity(guard + 1);
        h.push(C::new(1.0, 0.0));
        for n in 1..=guard.min(terms.saturating_sub(1)) {
            let mut acc = C::zero();
            for k in 1..k_max.min(n + 1) {
                let prod: C = (n - k + 1..n).map(|j| C::from(j as f64) - delta).product();
                acc += self.f(k, C::from((n - k) as f64) + s) * h[n - k] * prod;
            }
            h.push(-acc / (a0 * n as f64));
        }
        let mut f: Vec<C> = h
            .iter()
            .enumerate()
            .map(|(n, hn)| {
                hn * (n + 1..=guard)
                    .map(|j| C::from(j as f64) - delta)
                    .product::<C>()
            })
            .collect();
        for n in guard + 1..terms {
            let mut acc = C::zero();
            for k in 1..k_max.min(n + 1) {
                acc += self.f(k, C::from((n - k) as f64) + s) * f[n - k];
            }
            f.push(-acc / self.f(0, C::from(n as f64) + s));
        }
        f.truncate(terms);
        f
    }
}

/// `(Σ eₙtⁿ⁺ˢ, d/dt)` at `t > 0`.
pub fn sum_series(e: &[C], s: C, t: f64) -> (C, C) {
    let mut y = C::zero();
    let mut dy = C::zero();
    let mut tp = 1.0;
    for (n, en) in e.iter().enumerate() {
        y += en * tp;
        dy += en * (C::from(n as f64) + s) * tp;
        tp *= t;
    }
    let ts = C::from(t).powc(s);
    (y * ts, dy * ts / t)
}

/// Number of terms after which `|eₙ|tⁿ` has dropped below `tol` relative to
/// the largest term for `stall` consecutive indices.
pub fn terms_needed(e: &[C], t: f64, tol: f64, stall: usize) -> Option<usize> {
    let mut big = 0.0f64;
    let mut quiet = 0;
    let mut tp = 1.0;
    for (n, en) in e.iter().enumerate() {
        let m = en.norm() * tp;
        big = big.max(m);
        if m <= tol * big {
            quiet += 1;
            if quiet >= stall {
                return Some(n + 1);
            }
        } else {
            quiet = 0;
        }
        tp *= t;
    }
    None
}
