//! Rescaled initial data, the discrete projection onto the symmetry mode,
//! and extraction of the blowup time.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::flow::{Evolution, FieldState, IntegrateOptions, Mode};
use super::grid::OUTER_RADIUS;
use super::EvolutionError;
use crate::profile::{profile_params, ProfileParams};

/// Perturbation `v = (F, G)` of the data `u^{T₀}[0]`, given through
/// `F(r)/r` and `G(r)/r` so that the rescaled data are regular at `ρ = 0`.
pub trait Perturbation: Sync {
    fn f_over_r(&self, r: f64) -> f64;
    fn g_over_r(&self, r: f64) -> f64;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct NoPerturbation;

impl Perturbation for NoPerturbation {
    fn f_over_r(&self, _: f64) -> f64 {
        0.0
    }
    fn g_over_r(&self, _: f64) -> f64 {
        0.0
    }
}

/// Exact data of the self-similar solution blowing up at `T′` instead of
/// `T₀`: `F = u^{T′}(0,·) − u^{T₀}(0,·)`, `G = ∂ₜu^{T′}(0,·) − ∂ₜu^{T₀}(0,·)`.
#[derive(Debug, Clone)]
pub struct ShiftedBlowup {
    pub t_prime: f64,
    pub t0: f64,
    profile: ProfileParams,
}

impl ShiftedBlowup {
    pub fn new(t_prime: f64, t0: f64) -> Result<Self, EvolutionError> {
        if !(t_prime > 0.0 && t0 > 0.0) {
            return Err(EvolutionError::InvalidInput(
                "blowup times must be positive".into(),
            ));
        }
        Ok(ShiftedBlowup {
            t_prime,
            t0,
            profile: profile9()?,
        })
    }
}

impl Perturbation for ShiftedBlowup {
    fn f_over_r(&self, r: f64) -> f64 {
        let p = &self.profile;
        p.phi0_over_rho(r / self.t_prime).unwrap_or(f64::NAN) / self.t_prime
            - p.phi0_over_rho(r / self.t0).unwrap_or(f64::NAN) / self.t0
    }
    fn g_over_r(&self, r: f64) -> f64 {
        let d1 = |s: f64| {
            self.profile
                .phi0_derivs(s)
                .map(|d| d[1])
                .unwrap_or(f64::NAN)
        };
        d1(r / self.t_prime) / (self.t_prime * self.t_prime) - d1(r / self.t0) / (self.t0 * self.t0)
    }
}

/// Smooth bump `F(r) = α r e^{−r²}`, `G(r) = β r e^{−2r²}`.
#[derive(Debug, Clone, Copy)]
pub struct Bump {
    pub alpha: f64,
    pub beta: f64,
}

impl Perturbation for Bump {
    fn f_over_r(&self, r: f64) -> f64 {
        self.alpha * (-r * r).exp()
    }
    fn g_over_r(&self, r: f64) -> f64 {
        self.beta * (-2.0 * r * r).exp()
    }
}

impl<P: Perturbation + ?Sized> Perturbation for &P {
    fn f_over_r(&self, r: f64) -> f64 {
        (**self).f_over_r(r)
    }
    fn g_over_r(&self, r: f64) -> f64 {
        (**self).g_over_r(r)
    }
}

/// Sum of two perturbations.
pub struct Sum<A, B>(pub A, pub B);

impl<A: Perturbation, B: Perturbation> Perturbation for Sum<A, B> {
    fn f_over_r(&self, r: f64) -> f64 {
        self.0.f_over_r(r) + self.1.f_over_r(r)
    }
    fn g_over_r(&self, r: f64) -> f64 {
        self.0.g_over_r(r) + self.1.g_over_r(r)
    }
}

fn profile9() -> Result<ProfileParams, EvolutionError> {
    profile_params(9).map_err(|e| EvolutionError::Domain(e.to_string()))
}

/// `U(v, T)`: the perturbation at `τ = 0` for trial blowup time `T`.
pub fn initial_data_u(
    ev: &Evolution,
    v: &dyn Perturbation,
    t: f64,
    t0: f64,
) -> Result<FieldState, EvolutionError> {
    if !(t >= 0.75 * t0 && t <= 1.25 * t0) {
        return Err(EvolutionError::InvalidInput(format!(
            "T = {t} outside [3T0/4, 5T0/4] for T0 = {t0}"
        )));
    }
    let p = profile9()?;
    let c = t / t0;
    let dom = |e: crate::profile::ProfileError| {
        EvolutionError::Domain(format!("T*rho/T0 reaches sqrt(b): {e}"))
    };
    let mut phi1 = Vec::with_capacity(ev.n());
    let mut phi2 = Vec::with_capacity(ev.n());
    for &r in ev.grid().rho() {
        let shifted1 =
            c * p.phi0_over_rho(c * r).map_err(dom)? - p.phi0_over_rho(r).map_err(dom)?;
        let shifted2 =
            c * c * p.phi0_derivs(c * r).map_err(dom)?[1] - p.phi0_derivs(r).map_err(dom)?[1];
        phi1.push(shifted1 + t * v.f_over_r(t * r));
        phi2.push(shifted2 + t * t * v.g_over_r(t * r));
    }
    FieldState::from_components(&phi1, &phi2)
}

/// Seeded smooth random perturbation: `F/r` and `G/r` are Chebyshev
/// series in `r²/R²` of degree 5 with coefficients uniform in `[−1, 1]`
/// divided by `(m+1)²`, times `scale`.
#[derive(Debug, Clone)]
pub struct RandomSmooth {
    pub seed: u64,
    pub scale: f64,
    coeffs: [[f64; 6]; 2],
}

impl RandomSmooth {
    pub fn new(seed: u64, scale: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut coeffs = [[0.0; 6]; 2];
        for comp in coeffs.iter_mut() {
            for (m, c) in comp.iter_mut().enumerate() {
                *c = rng.gen_range(-1.0..=1.0) / ((m + 1) * (m + 1)) as f64;
            }
        }
        RandomSmooth {
            seed,
            scale,
            coeffs,
        }
    }

    /// Same coefficients, scaled so that `U(v, T₀)` has order-0 surrogate
    /// norm `amp` on the grid of `ev` (with `T₀ = 1`).
    pub fn with_norm(ev: &Evolution, seed: u64, amp: f64) -> Result<Self, EvolutionError> {
        let unit = RandomSmooth::new(seed, 1.0);
        let n = ev.norm(&initial_data_u(ev, &unit, 1.0, 1.0)?, 0)?;
        Ok(RandomSmooth {
            scale: amp / n,
            ..unit
        })
    }

    fn series(&self, comp: usize, r: f64) -> f64 {
        let s = (2.0 * r * r / (OUTER_RADIUS * OUTER_RADIUS) - 1.0).clamp(-1.0, 1.0);
        let theta = s.acos();
        self.scale
            * self.coeffs[comp]
                .iter()
                .enumerate()
                .map(|(m, c)| c * (m as f64 * theta).cos())
                .sum::<f64>()
    }
}

impl Perturbation for RandomSmooth {
    fn f_over_r(&self, r: f64) -> f64 {
        self.series(0, r)
    }
    fn g_over_r(&self, r: f64) -> f64 {
        self.series(1, r)
    }
}

/// `U(v, T₀)` for [`RandomSmooth`] data with order-0 norm `amp`.
pub fn random_smooth_state(
    ev: &Evolution,
    amp: f64,
    seed: u64,
) -> Result<FieldState, EvolutionError> {
    initial_data_u(ev, &RandomSmooth::with_norm(ev, seed, amp)?, 1.0, 1.0)
}

/// Rank-one projection of the discrete linear operator onto its eigenvalue
/// near 1, `Pf = ⟨l, f⟩/⟨l, r⟩ · r` with `r` scaled to the sampled `g`.
#[derive(Debug, Clone)]
pub struct ModeProjector {
    pub eigenvalue: f64,
    left: DVector<f64>,
    right: DVector<f64>,
    lr: f64,
}

fn inverse_iteration(
    a: &DMatrix<f64>,
    shift: f64,
    start: &DVector<f64>,
) -> Result<(DVector<f64>, f64), EvolutionError> {
    let n = a.nrows();
    let shifted = a - DMatrix::<f64>::identity(n, n) * shift;
    let lu = shifted.lu();
    let mut v = start.normalize();
    for _ in 0..8 {
        let w = lu
            .solve(&v)
            .ok_or_else(|| EvolutionError::NoConvergence("singular shifted operator".into()))?;
        v = w.normalize();
    }
    let av = a * &v;
    let lambda = v.dot(&av) / v.dot(&v);
    Ok((v, lambda))
}

impl ModeProjector {
    pub fn new(ev: &Evolution) -> Result<Self, EvolutionError> {
        let g = ev.g_state();
        let a = ev.linear_matrix();
        let shift = 1.0 + 1e-6;
        let (mut right, lambda) = inverse_iteration(a, shift, &g.data)?;
        let (left, lambda_left) = inverse_iteration(&a.transpose(), shift, &g.data)?;
        if (lambda - 1.0).abs() > 1e-3 || (lambda_left - lambda).abs() > 1e-6 {
            return Err(EvolutionError::NoConvergence(format!(
                "discrete symmetry eigenvalue {lambda} (left {lambda_left}) not near 1"
            )));
        }
        let scale = ev.g_component(&FieldState {
            data: right.clone(),
            tau: 0.0,
        })?;
        right /= scale;
        let lr = left.dot(&right);
        Ok(ModeProjector {
            eigenvalue: lambda,
            left,
            right,
            lr,
        })
    }

    /// Coefficient `α` in `PΦ = α·g_h`.
    pub fn coefficient(&self, s: &FieldState) -> f64 {
        self.left.dot(&s.data) / self.lr
    }

    /// `(1 − P)Φ`.
    pub fn remove(&self, s: &FieldState) -> FieldState {
        let a = self.coefficient(s);
        FieldState {
            data: &s.data - &self.right * a,
            tau: s.tau,
        }
    }

    pub fn mode(&self) -> FieldState {
        FieldState {
            data: self.right.clone(),
            tau: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlowupTimeOptions {
    pub n: usize,
    pub tau_probe: f64,
    /// Secant stops once the step is below `tol·T₀` or, at the final probe
    /// time, `|e^{−τ}α| < tol`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for BlowupTimeOptions {
    fn default() -> Self {
        BlowupTimeOptions {
            n: 64,
            tau_probe: 6.0,
            tol: 1e-8,
            max_iter: 30,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BlowupTimeReport {
    pub t: f64,
    pub t0: f64,
    pub amplitude: f64,
    pub iterations: usize,
    /// `(T, e^{−τ}α(τ_probe))` for every trial.
    pub history: Vec<(f64, f64)>,
}

/// Unstable-mode amplitude `e^{−τ}α(τ)` at `τ = τ_probe` along the full flow.
pub fn mode_amplitude(
    ev: &Evolution,
    proj: &ModeProjector,
    v: &dyn Perturbation,
    t: f64,
    t0: f64,
    tau_probe: f64,
) -> Result<f64, EvolutionError> {
    let init = initial_data_u(ev, v, t, t0)?;
    let opts = IntegrateOptions {
        mode: Mode::Full,
        samples: 1,
        ..Default::default()
    };
    let (_, end) = ev.integrate(&init, tau_probe, &opts)?;
    Ok((-tau_probe).exp() * proj.coefficient(&end))
}

/// `T` near `T₀` at which the unstable-mode amplitude vanishes.
pub fn find_blowup_time(
    v: &dyn Perturbation,
    t0: f64,
    opts: &BlowupTimeOptions,
) -> Result<BlowupTimeReport, EvolutionError> {
    let ev = Evolution::new(opts.n)?;
    let proj = ModeProjector::new(&ev)?;
    find_blowup_time_with(&ev, &proj, v, t0, opts)
}

pub fn find_blowup_time_with(
    ev: &Evolution,
    proj: &ModeProjector,
    v: &dyn Perturbation,
    t0: f64,
    opts: &BlowupTimeOptions,
) -> Result<BlowupTimeReport, EvolutionError> {
    if !(t0 > 0.0 && t0.is_finite()) {
        return Err(EvolutionError::InvalidInput(format!(
            "T0 = {t0} must be positive"
        )));
    }
    if !(opts.tau_probe >= 0.0 && opts.tol > 0.0) {
        return Err(EvolutionError::InvalidInput(
            "tau_probe must be nonnegative and tol positive".into(),
        ));
    }
    let amp = |t: f64, tau: f64| -> Result<f64, EvolutionError> {
        if tau == 0.0 {
            return Ok(proj.coefficient(&initial_data_u(ev, v, t, t0)?));
        }
        mode_amplitude(ev, proj, v, t, t0, tau).map_err(|e| match e {
            EvolutionError::Diverged { tau, norm } => EvolutionError::NoConvergence(format!(
                "flow diverged at tau = {tau} (norm {norm:.3e}) for T = {t}; perturbation too large"
            )),
            other => other,
        })
    };
    // continuation in the probe time: the root at τ = 0 is the linear
    // estimate, later stages start from the previous root
    let mut stages: Vec<f64> = [0.0, 1.0, 2.0, 4.0]
        .into_iter()
        .filter(|&s| s < opts.tau_probe)
        .collect();
    stages.push(opts.tau_probe);
    let mut history = Vec::new();
    let mut t = t0;
    let mut iterations = 0;
    let mut last_amp = f64::NAN;
    for (si, &tau) in stages.iter().enumerate() {
        let last = si + 1 == stages.len();
        let h = if si == 0 { 0.01 * t0 } else { 1e-4 * t0 };
        let (mut ta, mut tb) = (t, t + h);
        let (mut fa, mut fb) = (amp(ta, tau)?, amp(tb, tau)?);
        history.push((ta, fa));
        history.push((tb, fb));
        let mut done = false;
        for _ in 0..opts.max_iter {
            iterations += 1;
            let step = fb * (tb - ta) / (fb - fa);
            if !step.is_finite() || fb == 0.0 {
                done = fb == 0.0;
                break;
            }
            ta = tb;
            fa = fb;
            tb -= step;
            fb = amp(tb, tau)?;
            history.push((tb, fb));
            if step.abs() < opts.tol * t0 || (last && fb.abs() < opts.tol) {
                done = true;
                break;
            }
        }
        if !done {
            return Err(EvolutionError::NoConvergence(format!(
                "secant for the blowup time did not converge at tau_probe = {tau} (last T = {tb}, amplitude {fb:.3e})"
            )));
        }
        t = tb;
        last_amp = fb;
    }
    Ok(BlowupTimeReport {
        t,
        t0,
        amplitude: last_amp,
        iterations,
        history,
    })
}
