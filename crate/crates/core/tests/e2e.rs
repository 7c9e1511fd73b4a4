use helios_core::experiment::*;
use helios_core::family::FamilyId;

#[test]
fn e2e_convergence() {
    let config = ExperimentConfig {
        family: FamilyId::Sr3,
        recombined: false,
        j0: 2,
        j_min: 3,
        j_max: 5,
        kappa: 4.0 * std::f64::consts::PI,
        experiment: ExperimentKind::Manufactured,
        solver: SolverChoice::Gmres,
        gmres_tol: 1e-8,
        gmres_max_iter: 3000,
        sv_mode: SvSetting::Iterative,
        error_grid_exp: 9,
        direct_limit: 6000,
        opts: Default::default(),
    };
    let report = run_experiment(&config);
    if let Some(f) = &report.failure { panic!("failure: {f}"); }
    print!("{}", report.to_csv());
}
