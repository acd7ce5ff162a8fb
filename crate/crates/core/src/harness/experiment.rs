use log::info;

use super::config::{Arm, ExperimentConfig};
use super::split::{split_indices, SplitSpec};
use super::sweep::{rerun_best, run_sweep, summarize, Dataset, SavedModel, SweepSummary, TrialRunner};
use super::HarnessError;
use crate::features::{pca_fit, pca_transform, LabeledFeatureMatrix, PcaBasis};
use crate::seed::derive_seed;

const SPLIT_STREAM: u64 = 2;

/// Train/test data for one attribute set.
pub struct ArmData {
    pub arm: Arm,
    pub m: usize,
    pub basis: Option<PcaBasis>,
    pub train: Dataset,
    pub test: Dataset,
}

pub struct ExperimentOutcome {
    pub train_rows: Vec<usize>,
    pub test_rows: Vec<usize>,
    pub arms: Vec<ArmData>,
    /// Best-of-sweep selection with statistics over every sweep trial.
    pub sweeps: Vec<SweepSummary>,
    /// Reruns of each selected architecture.
    pub reruns: Vec<SweepSummary>,
    pub best_models: Vec<SavedModel>,
    pub failed_trials: usize,
}

fn prepare_arm(
    m: &LabeledFeatureMatrix,
    arm: Arm,
    train_rows: &[usize],
    test_rows: &[usize],
    classes: &[String],
    fit_on_train: bool,
) -> Result<ArmData, HarnessError> {
    let (basis, projected) = match arm {
        Arm::Raw => (None, m.clone()),
        Arm::Pca(k) => {
            let fit_rows = if fit_on_train {
                m.select_rows(train_rows)
            } else {
                m.clone()
            };
            let b = pca_fit(&fit_rows, k)?;
            let p = pca_transform(&b, m)?;
            (Some(b), p)
        }
    };
    Ok(ArmData {
        arm,
        m: projected.cols(),
        basis,
        train: Dataset::from_matrix(&projected.select_rows(train_rows), classes)?,
        test: Dataset::from_matrix(&projected.select_rows(test_rows), classes)?,
    })
}

/// Split → per-arm projection → sweep per classifier → rerun of each best
/// architecture. Everything random derives from `cfg.seed`.
pub fn run_experiment(
    m: &LabeledFeatureMatrix,
    cfg: &ExperimentConfig,
    runner: &dyn TrialRunner,
) -> Result<ExperimentOutcome, HarnessError> {
    cfg.validate()?;
    let master = cfg
        .seed
        .ok_or_else(|| HarnessError::Config("a master seed is required".into()))?;
    let classes = m.classes();
    let split = SplitSpec {
        seed: derive_seed(master, SPLIT_STREAM),
        ..cfg.split.clone()
    };
    let (train_rows, test_rows) = split_indices(m.labels(), &classes, &split)?;
    info!("split: {} train / {} test rows", train_rows.len(), test_rows.len());

    let mut arms = Vec::new();
    for &arm in &cfg.arms {
        arms.push(prepare_arm(m, arm, &train_rows, &test_rows, &classes, cfg.pca_fit_on_train)?);
    }

    let mut sweeps = Vec::new();
    let mut reruns = Vec::new();
    let mut best_models = Vec::new();
    let mut failed_trials = 0;
    for &kind in &cfg.classifiers {
        for a in &arms {
            info!("sweep {kind} m={} hidden {}..={} x {}", a.m, cfg.hidden_min, cfg.hidden_max, cfg.reps);
            let out = run_sweep(
                &a.train,
                &a.test,
                kind,
                a.m,
                cfg.hidden_min..=cfg.hidden_max,
                cfg.reps,
                master,
                cfg.selection,
                runner,
                cfg.workers,
            )?;
            failed_trials += out.failures.len();
            sweeps.push(summarize(kind, a.m, &out.trials, &out.best));
            if let Some(model) = out.best_model {
                best_models.push(SavedModel {
                    trial: super::TrialSpec {
                        classifier: kind,
                        m: a.m,
                        hidden: out.best.hidden,
                        rep: out.best.rep,
                        seed: out.best.seed,
                    },
                    accuracy: out.best.accuracy,
                    class_names: classes.clone(),
                    model,
                });
            }
            reruns.push(rerun_best(
                &a.train,
                &a.test,
                &out.best,
                cfg.rerun_reps,
                master,
                runner,
                cfg.workers,
            )?);
        }
    }
    Ok(ExperimentOutcome {
        train_rows,
        test_rows,
        arms,
        sweeps,
        reruns,
        best_models,
        failed_trials,
    })
}
