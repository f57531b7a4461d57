//! Method-of-lines evolution of the perturbation `Φ = (φ₁, φ₂)` around the
//! self-similar profile.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::blowup::ModeProjector;
use super::grid::{Grid, MAX_ORDER};
use super::EvolutionError;
use crate::profile::{nonlinearity_coeffs, profile_params, unstable_mode, ProfileParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Linearized,
    Full,
}

/// Perturbation on a grid; `data = [φ₁; φ₂]` at the nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldState {
    pub data: DVector<f64>,
    pub tau: f64,
}

impl FieldState {
    pub fn zeros(n: usize) -> Self {
        FieldState {
            data: DVector::zeros(2 * n),
            tau: 0.0,
        }
    }

    pub fn from_components(phi1: &[f64], phi2: &[f64]) -> Result<Self, EvolutionError> {
        if phi1.len() != phi2.len() {
            return Err(EvolutionError::InvalidInput(
                "components of different length".into(),
            ));
        }
        if phi1.iter().chain(phi2).any(|v| !v.is_finite()) {
            return Err(EvolutionError::InvalidInput("non-finite entry".into()));
        }
        let mut v = phi1.to_vec();
        v.extend_from_slice(phi2);
        Ok(FieldState {
            data: DVector::from_vec(v),
            tau: 0.0,
        })
    }

    pub fn n(&self) -> usize {
        self.data.len() / 2
    }

    pub fn phi1(&self) -> &[f64] {
        &self.data.as_slice()[..self.n()]
    }

    pub fn phi2(&self) -> &[f64] {
        &self.data.as_slice()[self.n()..]
    }

    pub fn scaled(&self, s: f64) -> Self {
        FieldState {
            data: &self.data * s,
            tau: self.tau,
        }
    }
}

/// Discretized `L̃ = L̃₀ + L′` and the nonlinearity on one grid.
#[derive(Debug, Clone)]
pub struct Evolution {
    grid: Grid,
    linear: DMatrix<f64>,
    /// Taylor coefficients of `N(ρ, ·)` at each node.
    nonlin: Vec<[f64; 4]>,
    profile: ProfileParams,
}

/// `W(ρ) = −(8/ρ²)n′(φ₀)` written in `x = ρ²`.
pub fn potential_w(profile: &ProfileParams, x: f64) -> f64 {
    let (a2, b) = (profile.a * profile.a, profile.b);
    -8.0 * (42.0 * a2 / (b - x) - 555.0 * a2 * a2 * x / ((b - x) * (b - x)))
}

impl Evolution {
    pub fn new(n: usize) -> Result<Self, EvolutionError> {
        let grid = Grid::new(n)?;
        let profile = profile_params(9).map_err(|e| EvolutionError::Domain(e.to_string()))?;
        let x = grid.x();
        let xd = DMatrix::from_diagonal(&DVector::from_column_slice(x));
        let id = DMatrix::<f64>::identity(n, n);
        // ρ∂ρ = 2x∂ₓ and ∂ρ² + (10/ρ)∂ρ = 4x∂ₓ² + 22∂ₓ
        let rho_d = &xd * grid.d1() * 2.0;
        let lap = &xd * grid.d2() * 4.0 + grid.d1() * 22.0;
        let w = DMatrix::from_diagonal(&DVector::from_iterator(
            n,
            x.iter().map(|&x| potential_w(&profile, x)),
        ));
        let mut linear = DMatrix::zeros(2 * n, 2 * n);
        linear.view_mut((0, 0), (n, n)).copy_from(&(-&rho_d - &id));
        linear.view_mut((0, n), (n, n)).copy_from(&id);
        linear.view_mut((n, 0), (n, n)).copy_from(&(lap + w));
        linear
            .view_mut((n, n), (n, n))
            .copy_from(&(-&rho_d - &id * 2.0));
        let nonlin = grid.rho().iter().map(|&r| nonlinearity_coeffs(r)).collect();
        Ok(Evolution {
            grid,
            linear,
            nonlin,
            profile,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n(&self) -> usize {
        self.grid.len()
    }

    pub fn linear_matrix(&self) -> &DMatrix<f64> {
        &self.linear
    }

    fn check(&self, s: &FieldState) -> Result<(), EvolutionError> {
        if s.data.len() != 2 * self.n() {
            return Err(EvolutionError::InvalidInput(format!(
                "state of size {} on a grid of {} nodes",
                s.data.len(),
                self.n()
            )));
        }
        Ok(())
    }

    fn rhs_into(&self, u: &DVector<f64>, mode: Mode, out: &mut DVector<f64>) {
        out.gemv(1.0, &self.linear, u, 0.0);
        if mode == Mode::Full {
            let n = self.n();
            for i in 0..n {
                let w = u[i];
                let c = &self.nonlin[i];
                out[n + i] += w * w * (c[0] + w * (c[1] + w * (c[2] + w * c[3])));
            }
        }
    }

    /// Time derivative `∂τΦ`.
    pub fn rhs(&self, state: &FieldState, mode: Mode) -> Result<FieldState, EvolutionError> {
        self.check(state)?;
        let mut out = DVector::zeros(state.data.len());
        self.rhs_into(&state.data, mode, &mut out);
        Ok(FieldState {
            data: out,
            tau: state.tau,
        })
    }

    /// Symmetry mode `g` sampled at the nodes.
    pub fn g_state(&self) -> FieldState {
        let g = unstable_mode(9).expect("d = 9");
        let phi1: Vec<f64> = self.grid.rho().iter().map(|&r| g.g1(r)).collect();
        let phi2: Vec<f64> = self.grid.rho().iter().map(|&r| g.g2(r)).collect();
        FieldState::from_components(&phi1, &phi2).expect("finite")
    }

    /// `Σ_{j≤k}` surrogate for `φ₁` plus order `k−1` for `φ₂`, square-rooted
    /// (an `H^k × H^{k−1}` analogue on the unit ball of ℝ¹¹).
    pub fn norm(&self, s: &FieldState, k: usize) -> Result<f64, EvolutionError> {
        self.check(s)?;
        let a = self.grid.sobolev_surrogate(s.phi1(), k)?;
        let b = self.grid.sobolev_surrogate(s.phi2(), k.saturating_sub(1))?;
        Ok((a + b).sqrt())
    }

    /// `⟨Φ, g⟩/⟨g, g⟩` in the `k = 0` pairing; a proxy for the spectral
    /// projection, not the projection itself.
    pub fn g_component(&self, s: &FieldState) -> Result<f64, EvolutionError> {
        self.check(s)?;
        let g = self.g_state();
        let num = self.grid.pairing(s.phi1(), g.phi1()) + self.grid.pairing(s.phi2(), g.phi2());
        let den = self.grid.pairing(g.phi1(), g.phi1()) + self.grid.pairing(g.phi2(), g.phi2());
        Ok(num / den)
    }

    /// `max_{ρ≤1} |φ₀ + ρφ₁|`, the amplitude of the underlying map.
    pub fn sup_u(&self, s: &FieldState) -> Result<f64, EvolutionError> {
        self.check(s)?;
        let (rho, phi1) = self.grid.sample_unit_interval(s.phi1());
        rho.iter()
            .zip(&phi1)
            .map(|(&r, &p)| {
                Ok((self
                    .profile
                    .phi0(r)
                    .map_err(|e| EvolutionError::Domain(e.to_string()))?
                    + r * p)
                    .abs())
            })
            .try_fold(0.0f64, |m, v: Result<f64, EvolutionError>| Ok(m.max(v?)))
    }

    /// Largest stable explicit step suggested for this grid, `2/n²`.
    pub fn default_dt(&self) -> f64 {
        2.0 / (self.n() * self.n()) as f64
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegrateOptions {
    pub mode: Mode,
    /// Defaults to [`Evolution::default_dt`].
    pub dt: Option<f64>,
    /// Number of recorded samples after the initial one.
    pub samples: usize,
    /// Surrogate order used for `fitted_rate`.
    pub fit_order: usize,
    /// Norm (order 0) above which the run is aborted.
    pub abort_norm: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            mode: Mode::Linearized,
            dt: None,
            samples: 200,
            fit_order: 2,
            abort_norm: 1e6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub n: usize,
    pub dt: f64,
    pub mode: Mode,
    pub times: Vec<f64>,
    /// Surrogate norms of orders `0..=6` at each recorded time.
    pub norms: Vec<[f64; MAX_ORDER + 1]>,
    /// Least-squares slope of `log norm` (order `fit_order`) over the run.
    pub fitted_rate: f64,
    pub fit_order: usize,
    pub g_component: Vec<f64>,
    pub sup_u: Vec<f64>,
}

/// Least-squares slope of `log y` against `t` for samples with `t ∈ [t0, t1]`.
pub fn fit_log_slope(t: &[f64], y: &[f64], t0: f64, t1: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(y)
        .filter(|(t, y)| **t >= t0 && **t <= t1 && **y > 0.0)
        .map(|(t, y)| (*t, y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt) * (p.0 - mt)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

impl RunReport {
    pub fn norm_series(&self, k: usize) -> Vec<f64> {
        self.norms.iter().map(|n| n[k]).collect()
    }

    /// Slope of `log norm_k` over `[t0, t1]`.
    pub fn rate_over(&self, k: usize, t0: f64, t1: f64) -> Option<f64> {
        fit_log_slope(&self.times, &self.norm_series(k), t0, t1)
    }

    /// CSV with columns `tau, norm_0..norm_6, g_component, sup_u`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau");
        for k in 0..=MAX_ORDER {
            out.push_str(&format!(",norm_{k}"));
        }
        out.push_str(",g_component,sup_u\n");
        for i in 0..self.times.len() {
            out.push_str(&format!("{:.10e}", self.times[i]));
            for v in &self.norms[i] {
                out.push_str(&format!(",{v:.10e}"));
            }
            out.push_str(&format!(
                ",{:.10e},{:.10e}\n",
                self.g_component[i], self.sup_u[i]
            ));
        }
        out
    }
}

impl Evolution {
    fn record(&self, s: &FieldState, rep: &mut RunReport) -> Result<(), EvolutionError> {
        let mut norms = [0.0; MAX_ORDER + 1];
        for (k, v) in norms.iter_mut().enumerate() {
            *v = self.norm(s, k)?;
        }
        rep.times.push(s.tau);
        rep.norms.push(norms);
        rep.g_component.push(self.g_component(s)?);
        rep.sup_u.push(self.sup_u(s)?);
        Ok(())
    }

    /// Classical RK4 from `initial` to `τ_end`; returns the diagnostics and
    /// the final state.
    pub fn integrate(
        &self,
        initial: &FieldState,
        tau_end: f64,
        opts: &IntegrateOptions,
    ) -> Result<(RunReport, FieldState), EvolutionError> {
        self.integrate_impl(initial, tau_end, opts, None)
    }

    /// Linearized flow with the symmetry mode removed at every recorded
    /// sample, which keeps roundoff from feeding the growing mode.
    pub fn integrate_cancelled(
        &self,
        initial: &FieldState,
        tau_end: f64,
        opts: &IntegrateOptions,
        proj: &ModeProjector,
    ) -> Result<(RunReport, FieldState), EvolutionError> {
        if opts.mode != Mode::Linearized {
            return Err(EvolutionError::InvalidInput(
                "mode cancellation applies to the linearized flow only".into(),
            ));
        }
        self.integrate_impl(&proj.remove(initial), tau_end, opts, Some(proj))
    }

    fn integrate_impl(
        &self,
        initial: &FieldState,
        tau_end: f64,
        opts: &IntegrateOptions,
        proj: Option<&ModeProjector>,
    ) -> Result<(RunReport, FieldState), EvolutionError> {
        self.check(initial)?;
        if !(tau_end >= initial.tau) || !tau_end.is_finite() {
            return Err(EvolutionError::InvalidInput(format!(
                "tau_end {tau_end} before start {}",
                initial.tau
            )));
        }
        if opts.fit_order > MAX_ORDER || opts.samples == 0 {
            return Err(EvolutionError::InvalidInput(
                "fit order above 6 or zero samples".into(),
            ));
        }
        let dt_max = opts.dt.unwrap_or_else(|| self.default_dt());
        if !(dt_max > 0.0) {
            return Err(EvolutionError::InvalidInput(format!(
                "time step {dt_max} must be positive"
            )));
        }
        let span = tau_end - initial.tau;
        let samples = opts.samples;
        let per_sample = ((span / samples as f64) / dt_max).ceil().max(1.0) as usize;
        let steps = per_sample * samples;
        let dt = span / steps as f64;
        let mut rep = RunReport {
            n: self.n(),
            dt,
            mode: opts.mode,
            times: vec![],
            norms: vec![],
            fitted_rate: f64::NAN,
            fit_order: opts.fit_order,
            g_component: vec![],
            sup_u: vec![],
        };
        let mut s = initial.clone();
        self.record(&s, &mut rep)?;
        let m = s.data.len();
        let (mut k1, mut k2, mut k3, mut k4) = (
            DVector::zeros(m),
            DVector::zeros(m),
            DVector::zeros(m),
            DVector::zeros(m),
        );
        let mut tmp = DVector::zeros(m);
        let t_start = s.tau;
        for step in 1..=steps {
            self.rhs_into(&s.data, opts.mode, &mut k1);
            tmp.copy_from(&s.data);
            tmp.axpy(dt / 2.0, &k1, 1.0);
            self.rhs_into(&tmp, opts.mode, &mut k2);
            tmp.copy_from(&s.data);
            tmp.axpy(dt / 2.0, &k2, 1.0);
            self.rhs_into(&tmp, opts.mode, &mut k3);
            tmp.copy_from(&s.data);
            tmp.axpy(dt, &k3, 1.0);
            self.rhs_into(&tmp, opts.mode, &mut k4);
            s.data.axpy(dt / 6.0, &k1, 1.0);
            s.data.axpy(dt / 3.0, &k2, 1.0);
            s.data.axpy(dt / 3.0, &k3, 1.0);
            s.data.axpy(dt / 6.0, &k4, 1.0);
            s.tau = t_start + step as f64 * dt;
            if step % per_sample == 0 {
                if let Some(p) = proj {
                    s = p.remove(&s);
                }
                let n0 = self.norm(&s, 0)?;
                if !(n0 <= opts.abort_norm) {
                    return Err(EvolutionError::Diverged {
                        tau: s.tau,
                        norm: n0,
                    });
                }
                self.record(&s, &mut rep)?;
            }
        }
        rep.fitted_rate = rep
            .rate_over(opts.fit_order, t_start, tau_end)
            .unwrap_or(f64::NAN);
        Ok((rep, s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_steady() {
        let ev = Evolution::new(12).unwrap();
        let z = FieldState::zeros(12);
        let d = ev.rhs(&z, Mode::Full).unwrap();
        assert!(d.data.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn unit_function_surrogate() {
        let g = Grid::new(10).unwrap();
        let one = vec![1.0; 10];
        assert!((g.sobolev_surrogate(&one, 0).unwrap() - 1.0 / 11.0).abs() < 1e-14);
        assert!((g.sobolev_surrogate(&one, 3).unwrap() - 1.0 / 11.0).abs() < 1e-10);
    }
}
