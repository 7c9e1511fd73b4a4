//! Experiment driver: manufactured-solution and scattering studies, error
//! norms on dyadic grids, convergence orders, and table/plot data.

use crate::assembly::{
    assemble, assemble_fem, AssembleOpts, AssembledSystem, ProblemData, SolutionField,
};
use crate::boundary_op::{apply_t_to_trace, QuadConfig};
use crate::family::{FamilyId, FamilySpec};
use crate::solvers::{direct_solve, extreme_singular_values, gmres, SolveError, SvMode};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExperimentKind {
    /// Known-solution study with `u = e^{xy} sin(κx) sin((κ + π/2) y)`.
    Manufactured,
    /// Plane-wave scattering with incident angle `theta`.
    Scattering { theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverChoice {
    Gmres,
    Direct,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SvSetting {
    Exact,
    Iterative,
    Skip,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub family: FamilyId,
    pub recombined: bool,
    pub j0: u32,
    pub j_min: u32,
    pub j_max: u32,
    pub kappa: f64,
    pub experiment: ExperimentKind,
    pub solver: SolverChoice,
    pub gmres_tol: f64,
    pub gmres_max_iter: usize,
    pub sv_mode: SvSetting,
    /// Dyadic exponent of the error grid (`2^E` points per axis).
    pub error_grid_exp: u32,
    /// Systems up to this size are direct-solved for the error study;
    /// larger ones use tight-tolerance GMRES on the multiscale system.
    pub direct_limit: usize,
    pub opts: AssembleOpts,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.kappa <= 0.0 {
            return Err("kappa must be positive".into());
        }
        if let ExperimentKind::Scattering { theta } = self.experiment {
            if !(-PI / 2.0 < theta && theta < PI / 2.0) {
                return Err("theta must lie in (-pi/2, pi/2)".into());
            }
        }
        if self.j_min > self.j_max {
            return Err("empty level range".into());
        }
        Ok(())
    }
}

/// One table row (one level, one basis).
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub family: String,
    pub j: u32,
    pub size: usize,
    pub basis: &'static str,
    pub sigma_max: Option<f64>,
    pub sigma_min: Option<f64>,
    pub cond: Option<f64>,
    pub iterations: Option<usize>,
    pub gmres_residual: Option<f64>,
    pub rel_err: Option<f64>,
    pub order: Option<f64>,
}

#[derive(Debug, Clone, Default)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
    /// Residual histories keyed by `(j, basis)`.
    pub residual_histories: Vec<(u32, &'static str, Vec<f64>)>,
    /// Error the driver stopped on, if any (partial report).
    pub failure: Option<String>,
}

impl ExperimentReport {
    /// CSV with the fixed column set.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("family,J,size,sigma_max,sigma_min,cond,iter,rel_err,order,basis\n");
        let fmt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x:.6e}"));
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.family,
                r.j,
                r.size,
                fmt(r.sigma_max),
                fmt(r.sigma_min),
                fmt(r.cond),
                r.iterations.map_or(String::new(), |i| i.to_string()),
                fmt(r.rel_err),
                r.order.map_or(String::new(), |o| format!("{o:.3}")),
                r.basis,
            ));
        }
        out
    }

    pub fn residual_csv(history: &[f64]) -> String {
        let mut out = String::from("iteration,relative_residual\n");
        for (i, r) in history.iter().enumerate() {
            out.push_str(&format!("{},{:.12e}\n", i + 1, r));
        }
        out
    }
}

/// Closed-form manufactured data for `u = e^{xy} sin(κx) sin((κ+π/2)y)`.
pub struct ManufacturedData {
    pub kappa: f64,
    quad: QuadConfig,
}

impl ManufacturedData {
    pub fn new(kappa: f64, quad: QuadConfig) -> Self {
        ManufacturedData { kappa, quad }
    }

    pub fn u(&self, x: f64, y: f64) -> f64 {
        let mu = self.kappa + PI / 2.0;
        (x * y).exp() * (self.kappa * x).sin() * (mu * y).sin()
    }

    /// `f = Δu + κ²u`, hand-derived.
    pub fn f(&self, x: f64, y: f64) -> f64 {
        let k = self.kappa;
        let mu = k + PI / 2.0;
        let e = (x * y).exp();
        let sx = (k * x).sin();
        let cx = (k * x).cos();
        let sy = (mu * y).sin();
        let cy = (mu * y).cos();
        (x * x + y * y - mu * mu) * e * sx * sy + 2.0 * e * (k * y * cx * sy + mu * x * sx * cy)
    }

    /// Trace `u(·, 1)` and its first three derivatives.
    pub fn trace_jet(&self, x: f64) -> [f64; 4] {
        let k = self.kappa;
        let smu = (k + PI / 2.0).sin();
        let e = x.exp();
        let s = (k * x).sin();
        let c = (k * x).cos();
        [
            e * s * smu,
            e * (s + k * c) * smu,
            e * ((1.0 - k * k) * s + 2.0 * k * c) * smu,
            e * ((1.0 - 3.0 * k * k) * s + (3.0 * k - k * k * k) * c) * smu,
        ]
    }

    /// `g = ∂u/∂ν − T(u|_Γ)` on the aperture.
    pub fn g(&self, x: f64) -> Complex64 {
        let k = self.kappa;
        let mu = k + PI / 2.0;
        let du_dy = x * self.u(x, 1.0) + mu * x.exp() * (k * x).sin() * mu.cos();
        let jet = move |t: f64| self.trace_jet(t);
        Complex64::new(du_dy, 0.0) - apply_t_to_trace(&jet, k, x, &self.quad)
    }
}

/// Scattering data: `f = 0`, `g(x) = −2iβ e^{iαx}` with `α = κ sin θ`,
/// `β = κ cos θ` (relative permittivity 1).
pub fn scattering_g(kappa: f64, theta: f64) -> impl Fn(f64) -> Complex64 + Sync + Copy {
    let alpha = kappa * theta.sin();
    let beta = kappa * theta.cos();
    move |x: f64| Complex64::new(0.0, -2.0 * beta) * Complex64::new(0.0, alpha * x).exp()
}

/// Grid relative L2 error `‖u − u_J‖ / ‖u‖` on the dyadic grid
/// `x_i = i·2^{-E}`, `i = 1..2^E` per axis.
pub fn relative_error_to_exact(
    field: &SolutionField,
    exact: &dyn Fn(f64, f64) -> Complex64,
    grid_exp: u32,
) -> f64 {
    let m = 1usize << grid_exp;
    let h = 1.0 / m as f64;
    let pts: Vec<f64> = (1..=m).map(|i| i as f64 * h).collect();
    let vals = field.eval_grid(&pts, &pts);
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &x) in pts.iter().enumerate() {
        for (j, &y) in pts.iter().enumerate() {
            let e = exact(x, y);
            num += (e - vals[i][j]).norm_sqr();
            den += e.norm_sqr();
        }
    }
    (num / den).sqrt()
}

/// Grid relative difference `‖u_ref − u_J‖ / ‖u_ref‖` between two fields.
pub fn relative_error_between(
    field: &SolutionField,
    reference: &SolutionField,
    grid_exp: u32,
) -> f64 {
    let m = 1usize << grid_exp;
    let h = 1.0 / m as f64;
    let pts: Vec<f64> = (1..=m).map(|i| i as f64 * h).collect();
    let a = field.eval_grid(&pts, &pts);
    let b = reference.eval_grid(&pts, &pts);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..m {
        for j in 0..m {
            num += (b[i][j] - a[i][j]).norm_sqr();
            den += b[i][j].norm_sqr();
        }
    }
    (num / den).sqrt()
}

/// The solution used for error studies: direct when affordable, otherwise
/// tight-tolerance GMRES on the (well-conditioned) multiscale system.
pub fn reference_solution(
    system: &AssembledSystem,
    direct_limit: usize,
) -> Result<Vec<Complex64>, SolveError> {
    if system.n <= direct_limit {
        direct_solve(&system.op, &system.rhs)
    } else {
        let tol = 1e-12;
        match gmres(&system.op, &system.rhs, tol, 20 * 1000) {
            Ok(rep) => Ok(rep.solution),
            Err(SolveError::NotConverged {
                residual, history, ..
            }) if residual < 1e-10 => {
                let _ = history;
                Err(SolveError::DirectResidual(residual))
            }
            Err(e) => Err(e),
        }
    }
}

struct LevelOutcome {
    field: SolutionField,
    rows: Vec<ReportRow>,
    histories: Vec<(u32, &'static str, Vec<f64>)>,
}

fn run_level(
    spec: &FamilySpec,
    config: &ExperimentConfig,
    data: &ProblemData,
    j: u32,
) -> Result<LevelOutcome, String> {
    let wav = assemble(spec, config.j0, j, config.kappa, data, &config.opts)
        .map_err(|e| format!("assemble wavelet J={j}: {e}"))?;
    let fem = assemble_fem(spec, j, config.kappa, data, &config.opts)
        .map_err(|e| format!("assemble fem J={j}: {e}"))?;
    let mut rows = Vec::new();
    let mut histories = Vec::new();
    let family = spec.id.name().to_string();
    for (sys, basis) in [(&fem, "fem"), (&wav, "wavelet")] {
        let (sigma_max, sigma_min, cond) = match config.sv_mode {
            SvSetting::Skip => (None, None, None),
            mode => {
                let csr = sys.op.to_csr();
                let m = match mode {
                    SvSetting::Exact => SvMode::Exact,
                    _ => SvMode::Iterative,
                };
                match extreme_singular_values(&csr, m) {
                    Ok((hi, lo)) => (Some(hi), Some(lo), Some(hi / lo)),
                    Err(e) => return Err(format!("singular values J={j} {basis}: {e}")),
                }
            }
        };
        let (iterations, gmres_residual) = if config.solver != SolverChoice::Direct {
            match gmres(&sys.op, &sys.rhs, config.gmres_tol, config.gmres_max_iter) {
                Ok(rep) => {
                    let res = rep.residual_history.last().copied();
                    histories.push((j, basis, rep.residual_history));
                    (Some(rep.iterations), res)
                }
                Err(SolveError::NotConverged {
                    iterations,
                    residual,
                    history,
                }) => {
                    histories.push((j, basis, history));
                    (Some(iterations), Some(residual))
                }
                Err(e) => return Err(format!("gmres J={j} {basis}: {e}")),
            }
        } else {
            (None, None)
        };
        rows.push(ReportRow {
            family: family.clone(),
            j,
            size: sys.n,
            basis,
            sigma_max,
            sigma_min,
            cond,
            iterations,
            gmres_residual,
            rel_err: None,
            order: None,
        });
    }
    let solution = reference_solution(&wav, config.direct_limit)
        .map_err(|e| format!("solution J={j}: {e}"))?;
    Ok(LevelOutcome {
        field: SolutionField::from_solution(&wav, &solution),
        rows,
        histories,
    })
}

/// Runs the full study over the configured level range. On a per-level
/// failure the report emitted so far is returned with the failure recorded.
pub fn run_experiment(config: &ExperimentConfig) -> ExperimentReport {
    crate::threads::init();
    let mut report = ExperimentReport::default();
    if let Err(e) = config.validate() {
        report.failure = Some(e);
        return report;
    }
    let spec = FamilySpec::load(config.family, config.recombined);
    let manufactured = ManufacturedData::new(config.kappa, config.opts.quad);
    let exact_closure = |x: f64, y: f64| Complex64::new(manufactured.u(x, y), 0.0);

    let mut fields: Vec<(u32, SolutionField)> = Vec::new();
    for j in config.j_min..=config.j_max {
        let f_closure = |x: f64, y: f64| Complex64::new(manufactured.f(x, y), 0.0);
        let g_manufactured = |x: f64| manufactured.g(x);
        let outcome = match config.experiment {
            ExperimentKind::Manufactured => {
                let data = ProblemData {
                    f: Some(&f_closure),
                    g: Some(&g_manufactured),
                };
                run_level(&spec, config, &data, j)
            }
            ExperimentKind::Scattering { theta } => {
                let g = scattering_g(config.kappa, theta);
                let data = ProblemData {
                    f: None,
                    g: Some(&g),
                };
                run_level(&spec, config, &data, j)
            }
        };
        match outcome {
            Ok(out) => {
                report.rows.extend(out.rows);
                report.residual_histories.extend(out.histories);
                fields.push((j, out.field));
            }
            Err(e) => {
                report.failure = Some(e);
                break;
            }
        }
    }

    // error and order columns
    match config.experiment {
        ExperimentKind::Manufactured => {
            let mut errs: Vec<(u32, f64)> = Vec::new();
            for (j, field) in &fields {
                let err = relative_error_to_exact(field, &exact_closure, config.error_grid_exp);
                errs.push((*j, err));
            }
            for (j, err) in &errs {
                set_rel_err(&mut report.rows, *j, *err, None);
            }
            for w in errs.windows(2) {
                let order = (w[0].1 / w[1].1).log2();
                set_rel_err(&mut report.rows, w[1].0, w[1].1, Some(order));
            }
        }
        ExperimentKind::Scattering { .. } => {
            // next-level differences
            let mut errs: Vec<(u32, f64)> = Vec::new();
            for w in fields.windows(2) {
                let err = relative_error_between(&w[0].1, &w[1].1, config.error_grid_exp);
                errs.push((w[0].0, err));
            }
            for (j, err) in &errs {
                set_rel_err(&mut report.rows, *j, *err, None);
            }
            for w in errs.windows(2) {
                let order = (w[0].1 / w[1].1).log2();
                set_rel_err(&mut report.rows, w[0].0, w[0].1, Some(order));
            }
        }
    }
    report
}

fn set_rel_err(rows: &mut [ReportRow], j: u32, err: f64, order: Option<f64>) {
    for r in rows.iter_mut() {
        if r.j == j {
            r.rel_err = Some(err);
            if order.is_some() {
                r.order = order;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KAPPA: f64 = 4.0 * PI;

    #[test]
    fn manufactured_satisfies_dirichlet_sides() {
        let m = ManufacturedData::new(KAPPA, QuadConfig::default());
        for t in [0.1, 0.35, 0.8] {
            assert!(m.u(0.0, t).abs() < 1e-15);
            assert!(m.u(t, 0.0).abs() < 1e-15);
            // sin(4π) = 0 kills the x = 1 edge for κ = 4π
            assert!(m.u(1.0, t).abs() < 1e-12);
        }
    }

    #[test]
    fn manufactured_f_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let m = ManufacturedData::new(KAPPA, QuadConfig::default());
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let h = 1e-3;
        for _ in 0..100 {
            let x = rng.gen_range(0.1..0.9);
            let y = rng.gen_range(0.1..0.9);
            // fourth-order five-point Laplacian
            let lap_1d = |f: &dyn Fn(f64) -> f64, t: f64| {
                (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h)
                    - f(t - 2.0 * h))
                    / (12.0 * h * h)
            };
            let lap = lap_1d(&|s| m.u(s, y), x) + lap_1d(&|s| m.u(x, s), y);
            let want = lap + KAPPA * KAPPA * m.u(x, y);
            assert!(
                (m.f(x, y) - want).abs() <= 1e-5 * (1.0 + want.abs()),
                "at ({x},{y}): {} vs {want}",
                m.f(x, y)
            );
        }
    }

    #[test]
    fn scattering_g_values() {
        let g0 = scattering_g(KAPPA, 0.0);
        // θ = 0: g ≡ −2iκ
        for x in [0.0, 0.3, 1.0] {
            let v = g0(x);
            assert!((v - Complex64::new(0.0, -2.0 * KAPPA)).norm() < 1e-12);
            assert!((v.norm() - 2.0 * KAPPA).abs() < 1e-12);
        }
        // θ = π/4, κ = 8π: α = β = 8π/√2
        let k8 = 8.0 * PI;
        let g45 = scattering_g(k8, PI / 4.0);
        let beta = k8 / 2f64.sqrt();
        for x in [0.2, 0.7] {
            let v = g45(x);
            assert!((v.norm() - 2.0 * beta).abs() < 1e-10);
            let expect = Complex64::new(0.0, -2.0 * beta)
                * Complex64::new(0.0, beta * x).exp();
            assert!((v - expect).norm() < 1e-10);
        }
    }

    #[test]
    fn relative_error_of_field_against_itself_is_zero() {
        use crate::assembly::{assemble, AssembleOpts, ProblemData};
        let spec = FamilySpec::load(FamilyId::Sr3, false);
        let one = |_: f64, _: f64| Complex64::new(1.0, 0.0);
        let data = ProblemData {
            f: Some(&one),
            g: None,
        };
        let sys = assemble(&spec, 1, 3, KAPPA, &data, &AssembleOpts::default()).unwrap();
        let sol = direct_solve(&sys.op, &sys.rhs).unwrap();
        let field = SolutionField::from_solution(&sys, &sol);
        let err = relative_error_between(&field, &field, 6);
        assert_eq!(err, 0.0);
    }

    #[test]
    fn empty_level_range_reports_failure_only() {
        let config = ExperimentConfig {
            family: FamilyId::Sr3,
            recombined: false,
            j0: 1,
            j_min: 3,
            j_max: 2,
            kappa: KAPPA,
            experiment: ExperimentKind::Manufactured,
            solver: SolverChoice::Both,
            gmres_tol: 1e-8,
            gmres_max_iter: 100,
            sv_mode: SvSetting::Skip,
            error_grid_exp: 6,
            direct_limit: 6000,
            opts: AssembleOpts::default(),
        };
        let report = run_experiment(&config);
        assert!(report.rows.is_empty());
        assert!(report.failure.is_some());
    }
}
