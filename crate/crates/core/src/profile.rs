//! The explicit self-similar profile `φ₀(ρ) = aρ/√(b − ρ²)`, its
//! parameters, linearization potentials (d = 9) and the symmetry mode.

use serde::Serialize;

use crate::exactmath::Rational;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProfileError {
    #[error("dimension d = {0} must be at least 2")]
    DimensionTooSmall(i64),
    #[error("E(d) is complex for d = {d}: radicand {radicand} < 0")]
    ComplexE { d: i64, radicand: i64 },
    #[error("b<1 for d = {d} (b = {b:.6}): profile singular inside the lightcone")]
    SingularInLightcone { d: i64, b: f64 },
    #[error("rho = {rho} outside the domain rho^2 < b = {b}")]
    OutsideDomain { rho: f64, b: f64 },
    #[error("this quantity is only available for d = 9 (got d = {0})")]
    NotNine(i64),
}

/// Exact values of `E`, `a²` and `b` when `E(d)` is rational.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactParams {
    pub e_big: Rational,
    pub a_squared: Rational,
    pub b: Rational,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileParams {
    pub d: i64,
    /// `E(d) = √((46d²−291d−49)(d−1)) + 7(d−1)`.
    pub e_big: f64,
    pub a: f64,
    pub b: f64,
    pub exact: Option<ExactParams>,
}

/// `(46d² − 291d − 49)(d − 1)`.
pub fn e_radicand(d: i64) -> i64 {
    (46 * d * d - 291 * d - 49) * (d - 1)
}

/// `k = 23d − 170`, the quintic coefficient of the target metric.
pub fn quintic_coeff(d: i64) -> i64 {
    23 * d - 170
}

pub fn profile_params(d: i64) -> Result<ProfileParams, ProfileError> {
    if d < 2 {
        return Err(ProfileError::DimensionTooSmall(d));
    }
    let radicand = e_radicand(d);
    if radicand < 0 {
        return Err(ProfileError::ComplexE { d, radicand });
    }
    let df = d as f64;
    let e_big = (radicand as f64).sqrt() + 7.0 * (df - 1.0);
    let a = (df / e_big).sqrt();
    let b = 1.0 + df / 2.0 - 7.0 * df * (df - 1.0) / e_big;
    let exact = Rational::from(radicand).sqrt_exact().map(|root| {
        let e_big = root + Rational::from(7 * (d - 1));
        let a_squared = &Rational::from(d) / &e_big;
        let b =
            Rational::from(1) + Rational::frac(d, 2) - &Rational::from(7 * d * (d - 1)) / &e_big;
        ExactParams {
            e_big,
            a_squared,
            b,
        }
    });
    Ok(ProfileParams {
        d,
        e_big,
        a,
        b,
        exact,
    })
}

impl ProfileParams {
    /// Ok iff `b > 1`, i.e. `φ₀` is smooth on the closed unit interval.
    pub fn check_regular_on_unit_interval(&self) -> Result<(), ProfileError> {
        let above = match &self.exact {
            Some(x) => x.b > Rational::from(1),
            None => self.b > 1.0,
        };
        if above {
            Ok(())
        } else {
            Err(ProfileError::SingularInLightcone {
                d: self.d,
                b: self.b,
            })
        }
    }

    pub fn k(&self) -> f64 {
        quintic_coeff(self.d) as f64
    }

    fn gap(&self, rho: f64) -> Result<f64, ProfileError> {
        let s = self.b - rho * rho;
        if s > 0.0 {
            Ok(s)
        } else {
            Err(ProfileError::OutsideDomain { rho, b: self.b })
        }
    }

    pub fn phi0(&self, rho: f64) -> Result<f64, ProfileError> {
        Ok(self.a * rho / self.gap(rho)?.sqrt())
    }

    /// `φ₀(ρ)/ρ = a/√(b − ρ²)`, regular at 0.
    pub fn phi0_over_rho(&self, rho: f64) -> Result<f64, ProfileError> {
        Ok(self.a / self.gap(rho)?.sqrt())
    }

    /// `[φ₀, φ₀′, φ₀″, φ₀‴, φ₀⁗]` from closed forms in `s = b − ρ²`.
    pub fn phi0_derivs(&self, rho: f64) -> Result<[f64; 5], ProfileError> {
        let s = self.gap(rho)?;
        let (a, b) = (self.a, self.b);
        let r2 = rho * rho;
        let ab = a * b;
        Ok([
            a * rho / s.sqrt(),
            ab * s.powf(-1.5),
            3.0 * ab * rho * s.powf(-2.5),
            3.0 * ab * (b + 4.0 * r2) * s.powf(-3.5),
            15.0 * ab * rho * (3.0 * b + 4.0 * r2) * s.powf(-4.5),
        ])
    }

    /// `φ₀(1)`; requires `b > 1`.
    pub fn phi0_at_one(&self) -> Result<f64, ProfileError> {
        self.check_regular_on_unit_interval()?;
        self.phi0(1.0)
    }

    /// Residual of `(1−ρ²)φ″ + ((d−1)/ρ − 2ρ)φ′ − (d−1)f(φ)/ρ²`,
    /// `f(x) = x + 14x³ − 3k x⁵`, at `ρ > 0`.
    pub fn ode_residual_at(&self, rho: f64) -> Result<f64, ProfileError> {
        let [p, p1, p2, ..] = self.phi0_derivs(rho)?;
        let dm1 = (self.d - 1) as f64;
        let f = p + 14.0 * p.powi(3) - 3.0 * self.k() * p.powi(5);
        Ok((1.0 - rho * rho) * p2 + (dm1 / rho - 2.0 * rho) * p1 - dm1 * f / (rho * rho))
    }

    /// `max |residual|` over the grid (points must lie in `(0, 1]`).
    pub fn ode_residual(&self, grid: &[f64]) -> Result<f64, ProfileError> {
        grid.iter()
            .map(|&r| self.ode_residual_at(r).map(f64::abs))
            .try_fold(0.0_f64, |m, v| v.map(|v| m.max(v)))
    }

    /// Linearization potential `(d−1)(f′(φ₀) − 1)/ρ²`, evaluated through
    /// `q = φ₀²/ρ² = a²/(b − ρ²)` so `ρ = 0` needs no limit.
    pub fn potential(&self, rho: f64) -> Result<f64, ProfileError> {
        let q = self.a * self.a / self.gap(rho)?;
        let dm1 = (self.d - 1) as f64;
        Ok(dm1 * (42.0 * q - 15.0 * self.k() * q * q * rho * rho))
    }
}

/// `ρ_j = j/n` for `j = 1..=n`.
pub fn uniform_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|j| j as f64 / n as f64).collect()
}

fn params9() -> ProfileParams {
    profile_params(9).expect("d = 9 parameters")
}

/// The three d = 9 potentials in closed form.
#[derive(Debug, Clone, Copy, Default)]
pub struct PotentialSet;

impl PotentialSet {
    /// `V(ρ) = −54(3737ρ² − 4340)/(155 − 74ρ²)²`.
    pub fn v(&self, rho: f64) -> f64 {
        let r2 = rho * rho;
        -54.0 * (3737.0 * r2 - 4340.0) / (155.0 - 74.0 * r2).powi(2)
    }

    /// `V̂(ρ) = −10(15799ρ⁴ − 5084ρ² − 19220)/(ρ²(155 − 74ρ²)²)`.
    pub fn v_hat(&self, rho: f64) -> f64 {
        let r2 = rho * rho;
        -10.0 * (15799.0 * r2 * r2 - 5084.0 * r2 - 19220.0) / (r2 * (155.0 - 74.0 * r2).powi(2))
    }

    /// `Ṽ(ρ) = −18(3737ρ⁴ + 5735ρ² − 24025)/(ρ²(155 − 74ρ²)²)`.
    pub fn v_tilde(&self, rho: f64) -> f64 {
        let r2 = rho * rho;
        -18.0 * (3737.0 * r2 * r2 + 5735.0 * r2 - 24025.0) / (r2 * (155.0 - 74.0 * r2).powi(2))
    }
}

pub fn potentials(d: i64) -> Result<PotentialSet, ProfileError> {
    if d == 9 {
        Ok(PotentialSet)
    } else {
        Err(ProfileError::NotNine(d))
    }
}

/// Symmetry mode `g = (φ₀′, ρφ₀″ + 2φ₀′)` generated by shifting the blowup time.
#[derive(Debug, Clone)]
pub struct UnstableMode {
    params: ProfileParams,
}

pub fn unstable_mode(d: i64) -> Result<UnstableMode, ProfileError> {
    if d != 9 {
        return Err(ProfileError::NotNine(d));
    }
    Ok(UnstableMode { params: params9() })
}

impl UnstableMode {
    pub fn g1(&self, rho: f64) -> f64 {
        self.params.phi0_derivs(rho).expect("rho below sqrt(b)")[1]
    }

    pub fn g2(&self, rho: f64) -> f64 {
        let p = self.params.phi0_derivs(rho).expect("rho below sqrt(b)");
        rho * p[2] + 2.0 * p[1]
    }

    /// Residual of `(1−ρ²)u″ + (10/ρ − 6ρ)u′ − (6 + V(ρ))u` at `u = g1`.
    pub fn system_residual(&self, rho: f64) -> f64 {
        let p = self.params.phi0_derivs(rho).expect("rho below sqrt(b)");
        let v = PotentialSet.v(rho);
        (1.0 - rho * rho) * p[3] + (10.0 / rho - 6.0 * rho) * p[2] - (6.0 + v) * p[1]
    }
}

/// Taylor coefficients of `N(ρ, w)` in `w` for d = 9: returns the
/// coefficients of `w², w³, w⁴, w⁵` at the given `ρ`.
pub fn nonlinearity_coeffs(rho: f64) -> [f64; 4] {
    let p = params9();
    let phi = p.phi0(rho).expect("rho below sqrt(b)");
    let phi_over_rho = p.phi0_over_rho(rho).expect("rho below sqrt(b)");
    [
        -8.0 * (42.0 * phi_over_rho - 1110.0 * phi * phi * phi_over_rho),
        -8.0 * (14.0 - 1110.0 * phi * phi),
        8.0 * 555.0 * phi * rho,
        888.0 * rho * rho,
    ]
}

/// `N(ρ, w)` by the polynomial expansion (regular at `ρ = 0`).
pub fn nonlinearity(rho: f64, w: f64) -> f64 {
    let c = nonlinearity_coeffs(rho);
    let w2 = w * w;
    w2 * (c[0] + w * (c[1] + w * (c[2] + w * c[3])))
}

/// `N(ρ, w) = −(8/ρ³)[n(φ₀+ρw) − n(φ₀) − n′(φ₀)ρw]` evaluated literally,
/// `n(x) = 14x³ − 111x⁵`; only meaningful away from `ρ = 0`.
pub fn nonlinearity_direct(rho: f64, w: f64) -> f64 {
    let n = |x: f64| 14.0 * x.powi(3) - 111.0 * x.powi(5);
    let dn = |x: f64| 42.0 * x * x - 555.0 * x.powi(4);
    let phi = params9().phi0(rho).expect("rho below sqrt(b)");
    -8.0 / rho.powi(3) * (n(phi + rho * w) - n(phi) - dn(phi) * rho * w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_d9() {
        let p = profile_params(9).unwrap();
        let x = p.exact.as_ref().unwrap();
        assert_eq!(x.e_big, Rational::from(148));
        assert_eq!(x.b, Rational::frac(155, 74));
        for i in 0..=100 {
            let r = i as f64 / 100.0;
            let expect = 3.0 * r / (2.0 * (155.0 - 74.0 * r * r)).sqrt();
            assert!((p.phi0(r).unwrap() - expect).abs() < 1e-15);
            let d1 = 930.0 / (310.0 - 148.0 * r * r).powf(1.5);
            assert!((p.phi0_derivs(r).unwrap()[1] - d1).abs() < 1e-14);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let p = profile_params(12).unwrap();
        let h = 1e-4;
        for &r in &[0.1, 0.5, 0.9] {
            let lo = p.phi0_derivs(r - h).unwrap();
            let hi = p.phi0_derivs(r + h).unwrap();
            let mid = p.phi0_derivs(r).unwrap();
            for k in 0..4 {
                let fd = (hi[k] - lo[k]) / (2.0 * h);
                assert!(
                    (fd - mid[k + 1]).abs() < 1e-6 * mid[k + 1].abs().max(1.0),
                    "k={k} r={r}"
                );
            }
        }
    }

    #[test]
    fn d7_flagged() {
        let p = profile_params(7).unwrap();
        assert!(p.b < 1.0);
        assert!(matches!(
            p.check_regular_on_unit_interval(),
            Err(ProfileError::SingularInLightcone { .. })
        ));
        assert!(matches!(
            profile_params(3),
            Err(ProfileError::ComplexE { .. })
        ));
    }

    #[test]
    fn general_potential_matches_d9_formula() {
        let p = profile_params(9).unwrap();
        for i in 0..=20 {
            let r = i as f64 / 20.0;
            assert!((p.potential(r).unwrap() - PotentialSet.v(r)).abs() < 1e-12);
        }
    }
}
