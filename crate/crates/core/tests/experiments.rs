use potts_duality::exact::ExactSums;
use potts_duality::harness::{
    beta_sweep, emit_csv, run_experiment, CheckpointSchedule, EstimatorChoice, ExperimentConfig, ModelKind,
    RepresentationChoice,
};
use potts_duality::{EstimatorKind, ModelSpec, Representation};

fn config(model: ModelKind, q: usize, side: usize, betas: Vec<f64>) -> ExperimentConfig {
    ExperimentConfig {
        model,
        q,
        side,
        betas,
        representation: RepresentationChoice::Both,
        estimator: EstimatorChoice::Ot,
        samples: 10_000,
        trials: 20,
        burn_in: 0,
        checkpoints: CheckpointSchedule::Geometric,
        base_seed: 100,
        jobs: 0,
        output_dir: "unused".into(),
    }
}

#[test]
fn trial_mean_matches_exact_value() {
    let c = ExperimentConfig { representation: RepresentationChoice::Primal, ..config(ModelKind::Potts, 2, 2, vec![0.5]) };
    let spec = ModelSpec::potts(2, 2, 0.5).unwrap();
    let sums = ExactSums::compute(&spec, Representation::Primal).unwrap();
    let n = spec.num_sites() as f64;
    let r = run_experiment(&c).unwrap();
    let row = r.final_row(0.5, Representation::Primal, EstimatorKind::OgataTanemura).unwrap();
    // Per-site standard error of one trial.
    let sigma = (sums.asym_var_ot() / c.samples as f64).sqrt() / n;
    assert!((row.mean - sums.log_z / n).abs() < 3.0 * sigma, "{} vs {}", row.mean, sums.log_z / n);
}

#[test]
fn both_sides_converge_to_the_same_value() {
    let mut c = config(ModelKind::Potts, 3, 2, vec![0.4, 1.1]);
    c.estimator = EstimatorChoice::Both;
    c.trials = 10;
    let r = run_experiment(&c).unwrap();
    for &beta in &c.betas {
        let spec = ModelSpec::potts(3, 2, beta).unwrap();
        let n = spec.num_sites() as f64;
        let exact = ExactSums::compute(&spec, Representation::Primal).unwrap().log_z / n;
        for rep in [Representation::Primal, Representation::Dual] {
            let sums = ExactSums::compute(&spec, rep).unwrap();
            for (kind, var) in
                [(EstimatorKind::OgataTanemura, sums.asym_var_ot()), (EstimatorKind::Uniform, sums.asym_var_uniform())]
            {
                let row = r.final_row(beta, rep, kind).unwrap();
                let sigma = (var / c.samples as f64).sqrt() / n;
                assert!(
                    (row.mean - exact).abs() < 3.0 * sigma,
                    "beta {beta} {rep} {kind}: {} vs {exact} (sigma {sigma})",
                    row.mean
                );
            }
        }
    }
}

#[test]
fn primal_at_zero_beta_has_no_spread() {
    let mut c = config(ModelKind::Potts, 3, 3, vec![0.0, 0.5]);
    c.samples = 500;
    c.trials = 4;
    let sweep = beta_sweep(&c).unwrap();
    assert_eq!(sweep.std_at(0.0, Representation::Primal, EstimatorKind::OgataTanemura), Some(0.0));
    assert_eq!(sweep.std_at(0.0, Representation::Dual, EstimatorKind::OgataTanemura), None);
    assert!(sweep.std_at(0.5, Representation::Dual, EstimatorKind::OgataTanemura).unwrap() > 0.0);
}

#[test]
fn clock_sweep_end_to_end() {
    let mut c = config(ModelKind::Clock, 4, 4, vec![0.2, 0.8, 1.6]);
    c.samples = 2000;
    c.trials = 5;
    c.estimator = EstimatorChoice::Uniform;
    let sweep = beta_sweep(&c).unwrap();
    assert_eq!(sweep.table.len(), 6);
    let primal: Vec<f64> =
        c.betas.iter().map(|&b| sweep.std_at(b, Representation::Primal, EstimatorKind::Uniform).unwrap()).collect();
    let dual: Vec<f64> =
        c.betas.iter().map(|&b| sweep.std_at(b, Representation::Dual, EstimatorKind::Uniform).unwrap()).collect();
    assert!(primal[0] < primal[2] && dual[2] < dual[0], "primal {primal:?} dual {dual:?}");
    let dir = tempfile::tempdir().unwrap();
    let files = emit_csv(&sweep.experiment, dir.path()).unwrap();
    assert_eq!(files.len(), 3);
}

#[test]
fn output_is_reproducible() {
    let mut c = config(ModelKind::Potts, 2, 3, vec![0.3]);
    c.samples = 1000;
    c.trials = 3;
    c.checkpoints = CheckpointSchedule::Explicit(vec![100, 400, 1000]);
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    emit_csv(&run_experiment(&c).unwrap(), a.path()).unwrap();
    c.jobs = 1;
    emit_csv(&run_experiment(&c).unwrap(), b.path()).unwrap();
    for name in ["raw.csv", "summary.csv", "plot.gp"] {
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap());
    }
    let raw = std::fs::read_to_string(a.path().join("raw.csv")).unwrap();
    // 2 representations x 3 trials x 3 checkpoints
    assert_eq!(raw.lines().count(), 1 + 18);
}
