//! Connection determinant between the Frobenius branches at `ρ = 0` and
//! `ρ = 1`, matched at `ρ = 1/2` after analytic continuation.

use num_complex::Complex64;
use serde::Serialize;

use super::frobenius::{sum_series, terms_needed, CPoly, EulerForm, PolyOde};
use super::SpectralError;

type C = Complex64;

const START_ZERO: f64 = 0.25;
const START_ONE: f64 = 0.75;
const MATCH: f64 = 0.5;
const SERIES_TOL: f64 = 1e-17;
const MAX_TERMS: usize = 8000;
const TAYLOR_TERMS: usize = 400;
/// Resonance guard used when a search region does not need a larger one.
pub const DEFAULT_GUARD: usize = 7;

/// Which linear problem the determinant belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Operator {
    /// Linearization around the self-similar profile.
    Eigen,
    /// Supersymmetric partner with the `λ = 1` mode removed.
    Susy,
}

fn operator_poles() -> Vec<f64> {
    let r = (155.0f64 / 74.0).sqrt();
    vec![0.0, 1.0, -1.0, r, -r]
}

fn p_sq() -> CPoly {
    let p = CPoly::from_real(&[155.0, 0.0, -74.0]);
    p.mul(&p)
}

/// `ρ²P²·[(1−ρ²)u″ + (10/ρ − 2(λ+2)ρ)u′ − ((λ+1)(λ+2) + V)u]`,
/// `P = 155 − 74ρ²`.
pub fn eigen_ode(lambda: C) -> PolyOde {
    let psq = p_sq();
    let rho2 = CPoly::from_real(&[0.0, 0.0, 1.0]);
    let p2 = rho2.mul(&CPoly::from_real(&[1.0, 0.0, -1.0])).mul(&psq);
    let lin = CPoly(vec![
        C::new(0.0, 0.0),
        C::new(10.0, 0.0),
        C::new(0.0, 0.0),
        -2.0 * (lambda + 2.0),
    ]);
    let p1 = lin.mul(&psq);
    let pot = CPoly::from_real(&[-54.0 * 4340.0, 0.0, 54.0 * 3737.0]);
    let p0 = psq
        .scale((lambda + 1.0) * (lambda + 2.0))
        .add(&pot.scale(C::new(-1.0, 0.0)))
        .mul(&rho2)
        .scale(C::new(-1.0, 0.0));
    PolyOde {
        p2,
        p1,
        p0,
        singular: operator_poles(),
    }
}

/// Same normalization for the partner equation with potential `Ṽ` and
/// shifted first-order term.
pub fn susy_ode(lambda: C) -> PolyOde {
    let psq = p_sq();
    let rho2 = CPoly::from_real(&[0.0, 0.0, 1.0]);
    let p2 = rho2.mul(&CPoly::from_real(&[1.0, 0.0, -1.0])).mul(&psq);
    let lin = CPoly(vec![
        C::new(0.0, 0.0),
        C::new(8.0, 0.0),
        C::new(0.0, 0.0),
        -2.0 * (lambda + 1.0),
    ]);
    let p1 = lin.mul(&psq);
    let pot = CPoly::from_real(&[-18.0 * 24025.0, 0.0, 18.0 * 5735.0, 0.0, 18.0 * 3737.0]);
    let p0 = rho2
        .mul(&psq)
        .scale((lambda + 2.0) * (lambda - 1.0))
        .add(&pot.scale(C::new(-1.0, 0.0)))
        .scale(C::new(-1.0, 0.0));
    PolyOde {
        p2,
        p1,
        p0,
        singular: operator_poles(),
    }
}

/// Heun form in `x = ρ²`, multiplied through by `4x²(x−1)(74x−155)`.
pub fn heun_ode(lambda: C) -> PolyOde {
    let x = CPoly::from_real(&[0.0, 1.0]);
    let xm1 = CPoly::from_real(&[-1.0, 1.0]);
    let q = CPoly::from_real(&[-155.0, 74.0]);
    let p2 = x.mul(&x).mul(&xm1).mul(&q).scale(C::new(4.0, 0.0));
    let inner = xm1
        .mul(&q)
        .scale(C::new(26.0, 0.0))
        .add(&x.mul(&q).scale(4.0 * (lambda - 3.0)))
        .add(&x.mul(&xm1).scale(C::new(-296.0, 0.0)));
    let p1 = x.mul(&inner);
    let lin = CPoly(vec![
        -(155.0 * lambda * lambda + 775.0 * lambda + 1656.0),
        74.0 * lambda * (lambda + 3.0),
    ]);
    let p0 = x.mul(&lin);
    PolyOde {
        p2,
        p1,
        p0,
        singular: vec![0.0, 1.0, 155.0 / 74.0],
    }
}

pub fn operator_ode(op: Operator, lambda: C) -> PolyOde {
    match op {
        Operator::Eigen => eigen_ode(lambda),
        Operator::Susy => susy_ode(lambda),
    }
}

/// `(u, u′)` at `to` by Taylor re-expansion at successive regular points,
/// each step at most 0.4 of the distance to the nearest singular point.
pub fn continue_solution(
    ode: &PolyOde,
    from: f64,
    to: f64,
    u: C,
    du: C,
) -> Result<(C, C), SpectralError> {
    let (mut x, mut u, mut du) = (from, u, du);
    for _ in 0..200 {
        if x == to {
            return Ok((u, du));
        }
        let dist = ode
            .singular
            .iter()
            .map(|s| (s - x).abs())
            .fold(f64::INFINITY, f64::min);
        if dist == 0.0 {
            return Err(SpectralError::InvalidInput(format!(
                "continuation starts at singular point {x}"
            )));
        }
        let h = (to - x).signum() * (0.4 * dist).min((to - x).abs());
        (u, du) = taylor_step(ode, x, h, u, du)?;
        x = if (to - x - h).abs() < 1e-15 {
            to
        } else {
            x + h
        };
    }
    Err(SpectralError::NoConvergence(format!(
        "continuation from {from} to {to} did not finish"
    )))
}

fn taylor_step(ode: &PolyOde, center: f64, h: f64, u: C, du: C) -> Result<(C, C), SpectralError> {
    let c = C::new(center, 0.0);
    let (p2, p1, p0) = (ode.p2.shift(c), ode.p1.shift(c), ode.p0.shift(c));
    let lead = p2.coeff(0);
    let mut y = vec![u, du];
    let (mut val, mut der) = (u + du * h, du);
    let mut big = val.norm().max(der.norm());
    let mut quiet = 0;
    for m in 0..TAYLOR_TERMS {
        // coefficient of tᵐ in p₂y″ + p₁y′ + p₀y, solved for y_{m+2}
        let mut acc = C::new(0.0, 0.0);
        for k in 0..=m {
            let j = m - k;
            if k > 0 {
                acc += p2.coeff(k) * ((j + 2) * (j + 1)) as f64 * y[j + 2];
            }
            acc += p1.coeff(k) * (j + 1) as f64 * y[j + 1] + p0.coeff(k) * y[j];
        }
        let next = -acc / (lead * ((m + 2) * (m + 1)) as f64);
        y.push(next);
        let n = m + 2;
        let term = next * h.powi(n as i32);
        val += term;
        der += next * n as f64 * h.powi(n as i32 - 1);
        big = big.max(term.norm());
        if term.norm() <= SERIES_TOL * big {
            quiet += 1;
            if quiet >= 4 {
                return Ok((val, der));
            }
        } else {
            quiet = 0;
        }
    }
    Err(SpectralError::NoConvergence(format!(
        "Taylor step at {center} did not converge"
    )))
}

fn grow_series(build: impl Fn(usize) -> Vec<C>, t: f64) -> Result<Vec<C>, SpectralError> {
    let mut terms = 64;
    loop {
        let e = build(terms);
        if let Some(n) = terms_needed(&e, t, SERIES_TOL, 4) {
            return Ok(e[..n].to_vec());
        }
        if terms >= MAX_TERMS {
            return Err(SpectralError::NoConvergence(format!(
                "series at t = {t} needs more than {MAX_TERMS} terms"
            )));
        }
        terms *= 2;
    }
}

/// Regular branch at `ρ = 0` (larger index), as `(u, u′)` at `ρ`.
pub fn branch_at_zero(ode: &PolyOde, rho: f64) -> Result<(C, C), SpectralError> {
    let form = ode.euler_at_zero()?;
    let s = form.indices().0;
    let e = grow_series(|n| form.series(s, n), rho)?;
    Ok(sum_series(&e, s, rho))
}

/// Coefficients of the regular branch at `ρ = 0`, enough for `|ρ| ≤ rho_max`.
pub fn zero_branch_coeffs(ode: &PolyOde, rho_max: f64) -> Result<(Vec<C>, C), SpectralError> {
    let form = ode.euler_at_zero()?;
    let s = form.indices().0;
    Ok((grow_series(|n| form.series(s, n), rho_max)?, s))
}

/// Index-0 branch at `ρ = 1`, scaled to be entire in `λ`.
fn branch_at_one(form: &EulerForm, guard: usize, rho: f64) -> Result<(C, C), SpectralError> {
    let t = 1.0 - rho;
    let delta = 1.0 - form.b.coeff(0) / form.a.coeff(0);
    let e = grow_series(|n| form.series_entire(C::new(0.0, 0.0), delta, guard, n), t)?;
    let (y, dy_dt) = sum_series(&e, C::new(0.0, 0.0), t);
    Ok((y, -dy_dt))
}

/// Smallest guard keeping the determinant entire for `Re λ ≥ re_min`.
pub fn guard_for(re_min: f64) -> usize {
    let need = (4.0 - re_min).floor() + 1.0;
    DEFAULT_GUARD.max(need.max(1.0) as usize)
}

/// Wronskian `W(u₀, u₁)(1/2)` of the regular branches: zero exactly at the
/// eigenvalues.
pub fn determinant(op: Operator, lambda: C, guard: usize) -> Result<C, SpectralError> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(SpectralError::InvalidInput(format!(
            "lambda {lambda} is not finite"
        )));
    }
    let ode = operator_ode(op, lambda);
    let (u0, du0) = branch_at_zero(&ode, START_ZERO)?;
    let (u0, du0) = continue_solution(&ode, START_ZERO, MATCH, u0, du0)?;
    let form = ode.euler_at_one()?;
    let (u1, du1) = branch_at_one(&form, guard, START_ONE)?;
    let (u1, du1) = continue_solution(&ode, START_ONE, MATCH, u1, du1)?;
    Ok(u0 * du1 - du0 * u1)
}
