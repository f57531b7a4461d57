//! Chebyshev–Lobatto collocation in `x = ρ²` on `[0, X]`, `X = R² > 1`.
//!
//! Functions of `x` are even in `ρ`, so the regularity conditions at the
//! centre hold by construction. The grid reaches past the light cone
//! (`R > 1`), where every characteristic leaves the domain and no boundary
//! condition is required; diagnostics only look at `ρ ≤ 1`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::EvolutionError;

/// Outer radius of the computational domain.
pub const OUTER_RADIUS: f64 = 1.1;
/// Highest ρ-derivative available to the Sobolev surrogate.
pub const MAX_ORDER: usize = 6;
const SUP_SAMPLES: usize = 201;

#[derive(Debug, Clone)]
pub struct Grid {
    n: usize,
    x_max: f64,
    x: Vec<f64>,
    rho: Vec<f64>,
    d1: DMatrix<f64>,
    d2: DMatrix<f64>,
    quad_rho: Vec<f64>,
    /// Gauss–Legendre weights on `[0, 1]` times `ρ¹⁰`.
    quad_w: Vec<f64>,
    /// `∂ρʲ` at the quadrature nodes, `j = 0..=MAX_ORDER`.
    eval: Vec<DMatrix<f64>>,
    sup_rho: Vec<f64>,
    sup_eval: DMatrix<f64>,
}

/// Gauss–Legendre nodes and weights on `[0, 1]` (Golub–Welsch).
pub fn gauss_legendre(q: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jac = DMatrix::<f64>::zeros(q, q);
    for k in 1..q {
        let kf = k as f64;
        let beta = kf / (4.0 * kf * kf - 1.0).sqrt();
        jac[(k, k - 1)] = beta;
        jac[(k - 1, k)] = beta;
    }
    let eig = SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..q)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            ((eig.eigenvalues[i] + 1.0) / 2.0, v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

fn cheb_eval(s: &[f64], n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(s.len(), n + 1, |q, m| {
        (m as f64 * s[q].clamp(-1.0, 1.0).acos()).cos()
    })
}

/// `d/ds` acting on Chebyshev coefficient vectors of length `n + 1`.
fn cheb_diff_coeffs(n: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(n + 1, n + 1);
    for col in 0..=n {
        let mut c = vec![0.0; n + 1];
        c[col] = 1.0;
        let mut d = vec![0.0; n + 2];
        for m in (1..=n).rev() {
            d[m - 1] = d[m + 1] + 2.0 * m as f64 * c[m];
        }
        d[0] /= 2.0;
        for m in 0..=n {
            out[(m, col)] = d[m];
        }
    }
    out
}

/// `∂ρʲ f(s(ρ))` with `s = 2ρ²/X − 1` as `Σ c·ρᵐ f⁽ᵏ⁾(s)`, keyed by `(m, k)`.
fn chain_terms(j: usize, x_max: f64) -> BTreeMap<(usize, usize), f64> {
    let mut terms = BTreeMap::from([((0usize, 0usize), 1.0)]);
    for _ in 0..j {
        let mut next = BTreeMap::new();
        for (&(m, k), &c) in &terms {
            if m > 0 {
                *next.entry((m - 1, k)).or_insert(0.0) += c * m as f64;
            }
            *next.entry((m + 1, k + 1)).or_insert(0.0) += c * 4.0 / x_max;
        }
        terms = next;
    }
    terms
}

impl Grid {
    /// `n` collocation nodes (`n ≥ 4`).
    pub fn new(n: usize) -> Result<Self, EvolutionError> {
        if n < 4 {
            return Err(EvolutionError::InvalidInput(format!(
                "grid needs at least 4 nodes, got {n}"
            )));
        }
        let big_n = n - 1;
        let x_max = OUTER_RADIUS * OUTER_RADIUS;
        let theta: Vec<f64> = (0..=big_n).map(|j| PI * j as f64 / big_n as f64).collect();
        let s: Vec<f64> = theta.iter().map(|t| -t.cos()).collect();
        let x: Vec<f64> = s.iter().map(|s| x_max * (s + 1.0) / 2.0).collect();
        let rho = x.iter().map(|x| x.sqrt()).collect();
        // barycentric differentiation matrix on the Lobatto nodes
        let w: Vec<f64> = (0..=big_n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                if j == 0 || j == big_n {
                    sign / 2.0
                } else {
                    sign
                }
            })
            .collect();
        let mut d1 = DMatrix::zeros(n, n);
        for i in 0..n {
            let mut diag = 0.0;
            for j in 0..n {
                if i != j {
                    let v = (w[j] / w[i]) / (x[i] - x[j]);
                    d1[(i, j)] = v;
                    diag -= v;
                }
            }
            d1[(i, i)] = diag;
        }
        let d2 = &d1 * &d1;

        // nodal values -> Chebyshev coefficients in s
        let mut to_coeffs = DMatrix::zeros(n, n);
        for m in 0..n {
            for j in 0..n {
                let end = if j == 0 || j == big_n { 0.5 } else { 1.0 };
                // s_j = −cos θ_j, so T_m(s_j) = (−1)^m cos(mθ_j)
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                to_coeffs[(m, j)] = 2.0 / big_n as f64 * end * sign * (m as f64 * theta[j]).cos();
            }
            if m == 0 || m == big_n {
                for j in 0..n {
                    to_coeffs[(m, j)] /= 2.0;
                }
            }
        }

        let (quad_rho, gl_w) = gauss_legendre(2 * n + 8);
        let quad_w = quad_rho
            .iter()
            .zip(&gl_w)
            .map(|(r, w)| w * r.powi(10))
            .collect();
        let dcoef = cheb_diff_coeffs(big_n);
        let mut dpow = vec![DMatrix::identity(n, n)];
        for k in 1..=MAX_ORDER {
            dpow.push(&dcoef * &dpow[k - 1]);
        }
        let sq: Vec<f64> = quad_rho.iter().map(|r| 2.0 * r * r / x_max - 1.0).collect();
        let vq = cheb_eval(&sq, big_n);
        let eval = (0..=MAX_ORDER)
            .map(|j| {
                let mut e = DMatrix::zeros(quad_rho.len(), n);
                for (&(m, k), &c) in &chain_terms(j, x_max) {
                    let mut block = &vq * &dpow[k] * &to_coeffs;
                    for (q, r) in quad_rho.iter().enumerate() {
                        let f = c * r.powi(m as i32);
                        block.row_mut(q).scale_mut(f);
                    }
                    e += block;
                }
                e
            })
            .collect();
        let sup_rho: Vec<f64> = (0..SUP_SAMPLES)
            .map(|i| i as f64 / (SUP_SAMPLES - 1) as f64)
            .collect();
        let ss: Vec<f64> = sup_rho.iter().map(|r| 2.0 * r * r / x_max - 1.0).collect();
        let sup_eval = cheb_eval(&ss, big_n) * &to_coeffs;
        Ok(Grid {
            n,
            x_max,
            x,
            rho,
            d1,
            d2,
            quad_rho,
            quad_w,
            eval,
            sup_rho,
            sup_eval,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    /// Nodes in `x = ρ²`, increasing.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Nodes in `ρ`, increasing from 0 to `OUTER_RADIUS`.
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// `∂ₓ` on nodal values.
    pub fn d1(&self) -> &DMatrix<f64> {
        &self.d1
    }

    pub fn d2(&self) -> &DMatrix<f64> {
        &self.d2
    }

    pub fn quadrature(&self) -> (&[f64], &[f64]) {
        (&self.quad_rho, &self.quad_w)
    }

    /// `∂ρʲu` at the quadrature nodes.
    pub fn derivative_at_quadrature(&self, u: &[f64], j: usize) -> DVector<f64> {
        &self.eval[j] * DVector::from_column_slice(u)
    }

    /// Values at 201 equispaced points of `[0, 1]`.
    pub fn sample_unit_interval(&self, u: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let v = &self.sup_eval * DVector::from_column_slice(u);
        (self.sup_rho.clone(), v.iter().copied().collect())
    }

    /// `Σ_{j≤k} ∫₀¹ |∂ρʲu|² ρ¹⁰ dρ`.
    pub fn sobolev_surrogate(&self, u: &[f64], k: usize) -> Result<f64, EvolutionError> {
        if k > MAX_ORDER {
            return Err(EvolutionError::InvalidInput(format!(
                "surrogate order {k} exceeds {MAX_ORDER}"
            )));
        }
        if u.len() != self.n {
            return Err(EvolutionError::InvalidInput(format!(
                "vector of length {} on a grid of {}",
                u.len(),
                self.n
            )));
        }
        Ok((0..=k)
            .map(|j| {
                let d = self.derivative_at_quadrature(u, j);
                d.iter()
                    .zip(&self.quad_w)
                    .map(|(v, w)| v * v * w)
                    .sum::<f64>()
            })
            .sum())
    }

    /// `∫₀¹ u v ρ¹⁰ dρ`.
    pub fn pairing(&self, u: &[f64], v: &[f64]) -> f64 {
        let a = self.derivative_at_quadrature(u, 0);
        let b = self.derivative_at_quadrature(v, 0);
        a.iter()
            .zip(b.iter())
            .zip(&self.quad_w)
            .map(|((a, b), w)| a * b * w)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadrature_is_exact_for_polynomials() {
        let (r, w) = gauss_legendre(12);
        let s: f64 = r.iter().zip(&w).map(|(r, w)| w * r.powi(10)).sum();
        assert!((s - 1.0 / 11.0).abs() < 1e-15);
    }

    #[test]
    fn derivatives_of_even_polynomial() {
        let g = Grid::new(16).unwrap();
        // u = ρ⁴ = x², ∂ρ³u = 24ρ
        let u: Vec<f64> = g.x().iter().map(|x| x * x).collect();
        let d3 = g.derivative_at_quadrature(&u, 3);
        let (r, _) = g.quadrature();
        for (q, r) in r.iter().enumerate() {
            assert!((d3[q] - 24.0 * r).abs() < 1e-9, "{} vs {}", d3[q], 24.0 * r);
        }
        let du: Vec<f64> = (g.d1() * DVector::from_vec(u.clone()))
            .iter()
            .copied()
            .collect();
        for (x, d) in g.x().iter().zip(&du) {
            assert!((d - 2.0 * x).abs() < 1e-11);
        }
    }
}
