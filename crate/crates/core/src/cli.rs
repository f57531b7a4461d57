//! Command-line front end. Exit codes: 0 when every check passes, 1 on a
//! failed certificate or check, 2 on usage errors, 3 when a numerical
//! method does not converge.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::evolution::{
    self, BlowupTimeOptions, Bump, Evolution, EvolutionError, IntegrateOptions, Mode,
    ModeProjector, Perturbation, RandomSmooth, RunReport, ShiftedBlowup,
};
use crate::exactmath::Certificate;
use crate::geometry;
use crate::profile::{self, ProfileError};
use crate::spectral::{self, Operator, Region, SearchOptions, SpectralError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_CHECK: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "blowup-lab",
    version,
    about = "Certificates and simulations for self-similar wave-map blowup"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Profile parameters and ODE residual; optional CSV table.
    Profile(ProfileArgs),
    /// Negative-curvature certificate for one dimension or all d >= 8.
    Curvature(CurvatureArgs),
    /// Eigenvalues of the linearized operator in a rectangle.
    Spectrum(SpectrumArgs),
    /// Exact and sampled certificates for the mode-stability recurrence.
    Certify(CertifyArgs),
    /// Evolve perturbations of the self-similar solution.
    Evolve(EvolveArgs),
    /// Recover the blowup time of perturbed self-similar data.
    #[command(name = "find-T")]
    FindT(FindTArgs),
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long, default_value_t = 9)]
    pub d: i64,
    /// Number of points of the uniform grid on (0, 1].
    #[arg(long, default_value_t = 1000)]
    pub grid: usize,
    /// Emit the profile table as CSV on stdout.
    #[arg(long, conflicts_with = "json")]
    pub csv: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CurvatureArgs {
    #[arg(long, default_value_t = 9, conflicts_with = "symbolic")]
    pub d: i64,
    /// Certify all d >= 8 at once in the variable e = d - 8.
    #[arg(long)]
    pub symbolic: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OperatorArg {
    Eigen,
    Susy,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// Rectangle as `re=LO:HI im=LO:HI`.
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], default_values = ["re=-2:2", "im=-6:6"])]
    pub search: Vec<String>,
    /// Secant tolerance on the eigenvalue.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.25)]
    pub cell: f64,
    #[arg(long, value_enum, default_value = "eigen")]
    pub operator: OperatorArg,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Exact positivity certificate for |delta_7| <= 1/3.
    #[arg(long)]
    pub delta7: bool,
    /// Negative-curvature certificate for all d >= 8.
    #[arg(long)]
    pub curvature: bool,
    /// Sampled bounds on delta_7, epsilon_n and C_n plus the exact induction steps.
    #[arg(long)]
    pub bounds: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Samples on the imaginary axis (bounds).
    #[arg(long, default_value_t = 500)]
    pub axis_samples: usize,
    /// Interior samples of the right half-plane (bounds).
    #[arg(long, default_value_t = 200)]
    pub interior_samples: usize,
    #[arg(long, default_value_t = 100.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 2000)]
    pub n_max: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Linear,
    Full,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum DataArg {
    /// Seeded smooth random data.
    Random,
    /// The symmetry mode g.
    Mode,
    /// A Gaussian bump.
    Bump,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, default_value_t = 10.0)]
    pub tau_end: f64,
    /// Size of the initial data (order-0 surrogate norm).
    #[arg(long, default_value_t = 1e-3)]
    pub amp: f64,
    #[arg(long, value_enum, default_value = "linear")]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value = "random")]
    pub data: DataArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Keep the symmetry-mode component of random or bump data. By default
    /// it is removed at every sample in linear mode, and in full mode the
    /// blowup time is adjusted first (as in find-T).
    #[arg(long)]
    pub keep_mode: bool,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    /// Write the run diagnostics as CSV to this file.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct FindTArgs {
    /// Blowup time of the exact self-similar data that is perturbed.
    #[arg(long, default_value_t = 1.05)]
    pub tprime: f64,
    #[arg(long, default_value_t = 1.0)]
    pub t0: f64,
    /// Extra Gaussian bump added to both components.
    #[arg(long, default_value_t = 0.0)]
    pub bump: f64,
    #[arg(long, default_value_t = 64)]
    pub n: usize,
    #[arg(long, default_value_t = 6.0)]
    pub tau_probe: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    NoConvergence(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
            CliError::Failed(_) => EXIT_FAILED_CHECK,
            CliError::NoConvergence(_) => EXIT_NO_CONVERGENCE,
        }
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> Self {
        match e {
            ProfileError::SingularInLightcone { .. } | ProfileError::ComplexE { .. } => {
                CliError::Failed(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::InvalidInput(m) => CliError::Usage(m),
            SpectralError::NoConvergence(m) => CliError::NoConvergence(m),
        }
    }
}

impl From<EvolutionError> for CliError {
    fn from(e: EvolutionError) -> Self {
        match e {
            EvolutionError::InvalidInput(_) | EvolutionError::Domain(_) => {
                CliError::Usage(e.to_string())
            }
            EvolutionError::Diverged { .. } | EvolutionError::NoConvergence(_) => {
                CliError::NoConvergence(e.to_string())
            }
        }
    }
}

impl From<geometry::GeometryError> for CliError {
    fn from(e: geometry::GeometryError) -> Self {
        CliError::Failed(e.to_string())
    }
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(text.as_bytes())
            } else {
                out.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn verdict(passed: bool) -> i32 {
    if passed {
        EXIT_OK
    } else {
        EXIT_FAILED_CHECK
    }
}

fn json_line(out: &mut dyn Write, v: &serde_json::Value) -> Result<(), CliError> {
    writeln!(
        out,
        "{}",
        serde_json::to_string_pretty(v).map_err(|e| CliError::Failed(e.to_string()))?
    )?;
    Ok(())
}

fn emit_certificate(out: &mut dyn Write, cert: &Certificate, json: bool) -> Result<(), CliError> {
    if json {
        writeln!(out, "{}", cert.to_json())?;
    } else {
        writeln!(out, "{cert}")?;
    }
    Ok(())
}

pub fn execute(cmd: &Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match cmd {
        Command::Profile(a) => cmd_profile(a, out),
        Command::Curvature(a) => cmd_curvature(a, out),
        Command::Spectrum(a) => cmd_spectrum(a, out),
        Command::Certify(a) => cmd_certify(a, out),
        Command::Evolve(a) => cmd_evolve(a, out),
        Command::FindT(a) => cmd_find_t(a, out),
    }
}

const PROFILE_TOL: f64 = 1e-10;

fn cmd_profile(a: &ProfileArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if a.grid == 0 {
        return Err(CliError::Usage("--grid must be positive".into()));
    }
    let p = profile::profile_params(a.d)?;
    p.check_regular_on_unit_interval()?;
    let grid = profile::uniform_grid(a.grid);
    let residual = p.ode_residual(&grid)?;
    let passed = residual <= PROFILE_TOL;
    if a.csv {
        let extras = if a.d == 9 {
            Some((profile::potentials(9)?, profile::unstable_mode(9)?))
        } else {
            None
        };
        let mut w = std::io::BufWriter::new(out);
        write!(w, "rho,phi0,phi0_prime")?;
        writeln!(w, "{}", if extras.is_some() { ",V,g1,g2" } else { "" })?;
        let mut rows = vec![0.0];
        rows.extend(&grid);
        for r in rows {
            let d = p.phi0_derivs(r)?;
            write!(w, "{r:.12e},{:.16e},{:.16e}", d[0], d[1])?;
            match &extras {
                Some((v, g)) => writeln!(w, ",{:.16e},{:.16e},{:.16e}", v.v(r), g.g1(r), g.g2(r))?,
                None => writeln!(w)?,
            }
        }
        w.flush()?;
    } else if a.json {
        json_line(
            out,
            &json!({
                "params": p,
                "phi0_at_one": p.phi0(1.0)?,
                "grid": a.grid,
                "ode_residual": residual,
                "tolerance": PROFILE_TOL,
                "passed": passed,
            }),
        )?;
    } else {
        writeln!(
            out,
            "d = {}  E = {:.12}  a = {:.15}  b = {:.15}",
            p.d, p.e_big, p.a, p.b
        )?;
        if let Some(x) = &p.exact {
            writeln!(
                out,
                "exact: E = {}  a^2 = {}  b = {}",
                x.e_big, x.a_squared, x.b
            )?;
        }
        writeln!(out, "phi0(1) = {:.15}", p.phi0(1.0)?)?;
        writeln!(
            out,
            "max ODE residual on {} points: {residual:.3e} (tolerance {PROFILE_TOL:e}) {}",
            a.grid,
            if passed { "PASS" } else { "FAIL" }
        )?;
    }
    Ok(verdict(passed))
}

fn cmd_curvature(a: &CurvatureArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cert = if a.symbolic {
        geometry::certify_negative_curvature_symbolic()
    } else {
        geometry::certify_negative_curvature(a.d)
    };
    emit_certificate(out, &cert, a.json)?;
    if !a.json && !a.symbolic && cert.passed() {
        let k = geometry::sectional_curvatures(a.d, 0.0)?;
        writeln!(
            out,
            "sectional curvatures at u = 0: ({}, {})",
            k.type1, k.type2
        )?;
        writeln!(out, "epsilon margin: {:.9}", geometry::epsilon_margin(a.d)?)?;
    }
    Ok(verdict(cert.passed()))
}

fn parse_range(spec: &str, key: &str) -> Result<(f64, f64), CliError> {
    let bad = || CliError::Usage(format!("expected {key}=LO:HI, got '{spec}'"));
    let body = spec
        .strip_prefix(key)
        .and_then(|s| s.strip_prefix('='))
        .ok_or_else(bad)?;
    let (lo, hi) = body.split_once(':').ok_or_else(bad)?;
    Ok((
        lo.trim().parse().map_err(|_| bad())?,
        hi.trim().parse().map_err(|_| bad())?,
    ))
}

fn cmd_spectrum(a: &SpectrumArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let (mut re, mut im) = (None, None);
    for s in &a.search {
        if s.starts_with("re=") {
            re = Some(parse_range(s, "re")?);
        } else if s.starts_with("im=") {
            im = Some(parse_range(s, "im")?);
        } else {
            return Err(CliError::Usage(format!("unknown search bound '{s}'")));
        }
    }
    let (re, im) = match (re, im) {
        (Some(re), Some(im)) => (re, im),
        _ => {
            return Err(CliError::Usage(
                "--search needs both re=LO:HI and im=LO:HI".into(),
            ))
        }
    };
    let region = Region::new(re, im)?;
    let operator = match a.operator {
        OperatorArg::Eigen => Operator::Eigen,
        OperatorArg::Susy => Operator::Susy,
    };
    let opts = SearchOptions {
        operator,
        cell: a.cell,
        tol: a.tol,
    };
    let report = spectral::eigenvalue_search(region, &opts)?;
    if a.json {
        json_line(
            out,
            &json!({ "tolerance": a.tol, "cell": a.cell, "report": report }),
        )?;
    } else {
        writeln!(
            out,
            "{:?} operator, Re in [{}, {}], Im in [{}, {}]: {} zero(s) by winding",
            report.operator, re.0, re.1, im.0, im.1, report.total_winding
        )?;
        for e in &report.eigenvalues {
            writeln!(
                out,
                "  {:+.12} {:+.12}i   residual {:.2e}",
                e.re, e.im, e.residual
            )?;
        }
    }
    let counted: i64 = report.eigenvalues.iter().map(|e| e.winding).sum();
    Ok(verdict(counted == report.total_winding))
}

fn cmd_certify(a: &CertifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    if !(a.delta7 || a.curvature || a.bounds) {
        return Err(CliError::Usage(
            "choose at least one of --delta7, --curvature, --bounds".into(),
        ));
    }
    let mut certs = Vec::new();
    if a.delta7 {
        certs.push(spectral::certify_delta7());
    }
    if a.curvature {
        certs.push(geometry::certify_negative_curvature_symbolic());
    }
    if a.bounds {
        let samples =
            spectral::sample_half_plane(a.seed, a.axis_samples, a.interior_samples, a.radius);
        certs.push(spectral::verify_bounds(&samples, a.n_max)?);
    }
    if a.json && certs.len() == 1 {
        writeln!(out, "{}", certs[0].to_json())?;
    } else if a.json {
        json_line(
            out,
            &serde_json::to_value(&certs).map_err(|e| CliError::Failed(e.to_string()))?,
        )?;
    } else {
        for c in &certs {
            writeln!(out, "{c}")?;
        }
    }
    Ok(verdict(certs.iter().all(Certificate::passed)))
}

fn cmd_evolve(a: &EvolveArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let ev = Evolution::new(a.n)?;
    let mode = match a.mode {
        ModeArg::Linear => Mode::Linearized,
        ModeArg::Full => Mode::Full,
    };
    let opts = IntegrateOptions {
        mode,
        dt: a.dt,
        samples: a.samples,
        ..Default::default()
    };
    let perturbation: Box<dyn Perturbation> = match a.data {
        DataArg::Random => Box::new(RandomSmooth::with_norm(&ev, a.seed, a.amp)?),
        DataArg::Bump => {
            let unit = Bump {
                alpha: 1.0,
                beta: 1.0,
            };
            let s = a.amp / ev.norm(&evolution::initial_data_u(&ev, &unit, 1.0, 1.0)?, 0)?;
            Box::new(Bump { alpha: s, beta: s })
        }
        DataArg::Mode => {
            let g = ev.g_state();
            let init = g.scaled(a.amp / ev.norm(&g, 0)?);
            let (report, _) = ev.integrate(&init, a.tau_end, &opts)?;
            return finish_evolve(a, &report, None, out);
        }
    };
    let init = evolution::initial_data_u(&ev, perturbation.as_ref(), 1.0, 1.0)?;
    let (report, t) = match (a.keep_mode, mode) {
        (true, _) => (ev.integrate(&init, a.tau_end, &opts)?.0, None),
        (false, Mode::Linearized) => (
            ev.integrate_cancelled(&init, a.tau_end, &opts, &ModeProjector::new(&ev)?)?
                .0,
            None,
        ),
        (false, Mode::Full) => {
            // the nonlinear flow keeps the mode away only at the right blowup time
            let proj = ModeProjector::new(&ev)?;
            let bt = BlowupTimeOptions {
                n: a.n,
                ..Default::default()
            };
            let found = evolution::blowup::find_blowup_time_with(
                &ev,
                &proj,
                perturbation.as_ref(),
                1.0,
                &bt,
            )?;
            let init = evolution::initial_data_u(&ev, perturbation.as_ref(), found.t, 1.0)?;
            (ev.integrate(&init, a.tau_end, &opts)?.0, Some(found.t))
        }
    };
    finish_evolve(a, &report, t, out)
}

fn finish_evolve(
    a: &EvolveArgs,
    report: &RunReport,
    t: Option<f64>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    if let Some(path) = &a.csv {
        std::fs::write(path, report.to_csv())?;
    }
    if a.json {
        json_line(out, &json!({ "blowup_time": t, "report": report }))?;
    } else {
        if let Some(t) = t {
            writeln!(out, "blowup time adjusted to T = {t:.12} (T0 = 1)")?;
        }
        let last = report
            .norms
            .last()
            .map(|n| n[report.fit_order])
            .unwrap_or(f64::NAN);
        writeln!(
            out,
            "n = {}  dt = {:.3e}  tau_end = {}  mode = {:?}",
            report.n, report.dt, a.tau_end, report.mode
        )?;
        writeln!(
            out,
            "fitted rate (order {} surrogate, up to norm equivalence): {:+.6}",
            report.fit_order, report.fitted_rate
        )?;
        writeln!(
            out,
            "final norm {last:.6e}  max |u| on the cone {:.6}",
            report.sup_u.iter().cloned().fold(0.0, f64::max)
        )?;
    }
    Ok(EXIT_OK)
}

fn cmd_find_t(a: &FindTArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let opts = BlowupTimeOptions {
        n: a.n,
        tau_probe: a.tau_probe,
        tol: a.tol,
        ..Default::default()
    };
    let shifted = ShiftedBlowup::new(a.tprime, a.t0)?;
    let report = if a.bump != 0.0 {
        let v = evolution::blowup::Sum(
            shifted,
            Bump {
                alpha: a.bump,
                beta: a.bump,
            },
        );
        evolution::find_blowup_time(&v, a.t0, &opts)?
    } else {
        evolution::find_blowup_time(&shifted, a.t0, &opts)?
    };
    if a.json {
        json_line(
            out,
            &json!({ "tolerance": a.tol, "tprime": a.tprime, "report": report }),
        )?;
    } else {
        writeln!(
            out,
            "T = {:.12}  (T' = {}, T0 = {})  amplitude {:.2e} after {} secant steps",
            report.t, a.tprime, a.t0, report.amplitude, report.iterations
        )?;
    }
    Ok(EXIT_OK)
}
