//! Zeros of the connection determinant in a rectangle: argument-principle
//! winding per grid cell, then secant refinement inside flagged cells.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::frobenius::sum_series;
use super::shooting::{determinant, eigen_ode, guard_for, zero_branch_coeffs, Operator};
use super::SpectralError;

type C = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Region {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Region {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Result<Self, SpectralError> {
        let ok = |(a, b): (f64, f64)| a.is_finite() && b.is_finite() && a < b;
        if !ok(re) || !ok(im) {
            return Err(SpectralError::InvalidInput(format!(
                "degenerate region re={re:?} im={im:?}"
            )));
        }
        Ok(Region { re, im })
    }

    pub fn contains(&self, z: C) -> bool {
        z.re >= self.re.0 && z.re <= self.re.1 && z.im >= self.im.0 && z.im <= self.im.1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchOptions {
    pub operator: Operator,
    /// Target cell side length.
    pub cell: f64,
    /// Secant stopping tolerance on `|Δλ|`.
    pub tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            operator: Operator::Eigen,
            cell: 0.25,
            tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Eigenvalue {
    pub re: f64,
    pub im: f64,
    /// Newton-step size `|D(λ)/D′(λ)|` at the returned point.
    pub residual: f64,
    /// Winding number of the cell the root was found in.
    pub winding: i64,
}

impl Eigenvalue {
    pub fn lambda(&self) -> C {
        C::new(self.re, self.im)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchReport {
    pub region: Region,
    pub operator: Operator,
    pub guard: usize,
    /// Total winding over all cells, i.e. the zero count in the region.
    pub total_winding: i64,
    pub eigenvalues: Vec<Eigenvalue>,
}

/// Phase increment of `D` along the segment `z0 → z1`, subdividing until
/// successive samples differ by less than π/4 in argument.
pub fn phase_increment(
    f: &(dyn Fn(C) -> Result<C, SpectralError> + Sync),
    z0: C,
    z1: C,
    f0: C,
    f1: C,
    depth: u32,
) -> Result<f64, SpectralError> {
    let dphi = (f1 / f0).arg();
    if dphi.abs() < std::f64::consts::FRAC_PI_4 || depth == 0 {
        if depth == 0 && dphi.abs() >= std::f64::consts::FRAC_PI_2 {
            return Err(SpectralError::NoConvergence(format!(
                "phase not resolved on edge {z0} -> {z1}; a zero may lie on the contour"
            )));
        }
        return Ok(dphi);
    }
    let zm = (z0 + z1) / 2.0;
    let fm = f(zm)?;
    Ok(phase_increment(f, z0, zm, f0, fm, depth - 1)?
        + phase_increment(f, zm, z1, fm, f1, depth - 1)?)
}

fn winding_of(phases: [f64; 4]) -> i64 {
    (phases.iter().sum::<f64>() / std::f64::consts::TAU).round() as i64
}

fn secant(
    f: &dyn Fn(C) -> Result<C, SpectralError>,
    z0: C,
    h: f64,
    tol: f64,
) -> Result<C, SpectralError> {
    let mut a = z0;
    let mut b = z0 + C::new(h, 0.5 * h);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    for _ in 0..80 {
        if fb.norm() == 0.0 {
            return Ok(b);
        }
        let step = fb * (b - a) / (fb - fa);
        if !step.re.is_finite() || !step.im.is_finite() {
            break;
        }
        a = b;
        fa = fb;
        b -= step;
        fb = f(b)?;
        if step.norm() <= tol * b.norm().max(1.0) {
            return Ok(b);
        }
    }
    Err(SpectralError::NoConvergence(format!(
        "secant iteration from {z0} did not converge"
    )))
}

/// Newton-step residual `|D/D′|` with a central difference for `D′`.
pub fn newton_residual(op: Operator, lambda: C, guard: usize) -> Result<f64, SpectralError> {
    let h = 1e-5 * lambda.norm().max(1.0);
    let d = determinant(op, lambda, guard)?;
    let dp =
        (determinant(op, lambda + h, guard)? - determinant(op, lambda - h, guard)?) / (2.0 * h);
    Ok((d / dp).norm())
}

/// All zeros of the determinant of `opts.operator` inside `region`.
pub fn eigenvalue_search(
    region: Region,
    opts: &SearchOptions,
) -> Result<SearchReport, SpectralError> {
    if !(opts.cell > 0.0 && opts.tol > 0.0) {
        return Err(SpectralError::InvalidInput(
            "cell size and tolerance must be positive".into(),
        ));
    }
    let guard = guard_for(region.re.0);
    let op = opts.operator;
    let f = move |z: C| determinant(op, z, guard);
    let nx = ((region.re.1 - region.re.0) / opts.cell).ceil().max(1.0) as usize;
    let ny = ((region.im.1 - region.im.0) / opts.cell).ceil().max(1.0) as usize;
    // interior grid lines are nudged off round values so that real or
    // rational zeros do not sit on a cell boundary
    let xs: Vec<f64> = (0..=nx)
        .map(|i| {
            let base = region.re.0 + (region.re.1 - region.re.0) * i as f64 / nx as f64;
            if i == 0 || i == nx {
                base
            } else {
                base + 0.0137 * opts.cell
            }
        })
        .collect();
    let ys: Vec<f64> = (0..=ny)
        .map(|j| {
            let base = region.im.0 + (region.im.1 - region.im.0) * j as f64 / ny as f64;
            if j == 0 || j == ny {
                base
            } else {
                base + 0.0173 * opts.cell
            }
        })
        .collect();
    let node = |i: usize, j: usize| C::new(xs[i], ys[j]);
    let values: Vec<C> = (0..(nx + 1) * (ny + 1))
        .into_par_iter()
        .map(|k| f(node(k % (nx + 1), k / (nx + 1))))
        .collect::<Result<_, _>>()?;
    let val = |i: usize, j: usize| values[j * (nx + 1) + i];
    let depth = 14;
    // horizontal edge (i,j)->(i+1,j) and vertical edge (i,j)->(i,j+1)
    let horiz: Vec<f64> = (0..nx * (ny + 1))
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            phase_increment(
                &f,
                node(i, j),
                node(i + 1, j),
                val(i, j),
                val(i + 1, j),
                depth,
            )
        })
        .collect::<Result<_, _>>()?;
    let vert: Vec<f64> = (0..(nx + 1) * ny)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k % (nx + 1), k / (nx + 1));
            phase_increment(
                &f,
                node(i, j),
                node(i, j + 1),
                val(i, j),
                val(i, j + 1),
                depth,
            )
        })
        .collect::<Result<_, _>>()?;
    let mut flagged = Vec::new();
    let mut total = 0;
    for j in 0..ny {
        for i in 0..nx {
            let w = winding_of([
                horiz[j * nx + i],
                vert[j * (nx + 1) + i + 1],
                -horiz[(j + 1) * nx + i],
                -vert[j * (nx + 1) + i],
            ]);
            total += w;
            if w != 0 {
                flagged.push((i, j, w));
            }
        }
    }
    let found: Vec<Eigenvalue> = flagged
        .par_iter()
        .map(|&(i, j, w)| {
            let (lo, hi) = (node(i, j), node(i + 1, j + 1));
            let h = (hi.re - lo.re).min(hi.im - lo.im);
            let z = secant(&f, (lo + hi) / 2.0, 0.1 * h, opts.tol)?;
            let slack = h;
            let inside = z.re >= lo.re - slack
                && z.re <= hi.re + slack
                && z.im >= lo.im - slack
                && z.im <= hi.im + slack;
            if !inside || !region.contains(z) {
                return Err(SpectralError::NoConvergence(format!(
                    "refinement in cell [{lo}, {hi}] left the cell (reached {z})"
                )));
            }
            Ok(Eigenvalue {
                re: z.re,
                im: z.im,
                residual: newton_residual(op, z, guard)?,
                winding: w,
            })
        })
        .collect::<Result<_, _>>()?;
    let mut eigenvalues: Vec<Eigenvalue> = Vec::new();
    for e in found {
        if !eigenvalues
            .iter()
            .any(|o| (o.lambda() - e.lambda()).norm() < 1e-6)
        {
            eigenvalues.push(e);
        }
    }
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(a.im.total_cmp(&b.im)));
    Ok(SearchReport {
        region,
        operator: op,
        guard,
        total_winding: total,
        eigenvalues,
    })
}

/// Winding number of the determinant around the circle `|λ − c| = r`.
pub fn winding_on_circle(
    op: Operator,
    center: C,
    radius: f64,
    samples: usize,
) -> Result<i64, SpectralError> {
    let guard = guard_for(center.re - radius);
    let f = move |z: C| determinant(op, z, guard);
    let pts: Vec<C> = (0..samples)
        .map(|k| center + C::from_polar(radius, std::f64::consts::TAU * k as f64 / samples as f64))
        .collect();
    let vals: Vec<C> = pts.par_iter().map(|&z| f(z)).collect::<Result<_, _>>()?;
    let mut total = 0.0;
    for k in 0..samples {
        let n = (k + 1) % samples;
        total += phase_increment(&f, pts[k], pts[n], vals[k], vals[n], 10)?;
    }
    Ok((total / std::f64::consts::TAU).round() as i64)
}

/// Eigenfunction pair `(u₁, u₂)` on `grid ⊂ [0, 1]`, with
/// `u₂ = (λ+1)u₁ + ρu₁′` and `u₁(1/2) = 1`.
pub fn eigenfunction(lambda: C, grid: &[f64]) -> Result<(Vec<C>, Vec<C>), SpectralError> {
    if let Some(bad) = grid.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(SpectralError::InvalidInput(format!(
            "grid point {bad} outside [0, 1]"
        )));
    }
    let ode = eigen_ode(lambda);
    let (e, s) = zero_branch_coeffs(&ode, 1.0)?;
    let (norm, _) = sum_series(&e, s, 0.5);
    let mut u1 = Vec::with_capacity(grid.len());
    let mut u2 = Vec::with_capacity(grid.len());
    for &r in grid {
        let (u, du) = if r == 0.0 {
            (e[0], num_complex::Complex64::new(0.0, 0.0))
        } else {
            sum_series(&e, s, r)
        };
        let (u, du) = (u / norm, du / norm);
        u1.push(u);
        u2.push((lambda + 1.0) * u + r * du);
    }
    Ok((u1, u2))
}
