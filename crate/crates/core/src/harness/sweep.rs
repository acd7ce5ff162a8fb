use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::Selection;
use super::stats::{mean, median, sample_std};
use super::HarnessError;
use crate::features::LabeledFeatureMatrix;
use crate::feedforward::{decide, mlp_train, Activation, MlpModel, TrainConfig};
use crate::kohonen::{train_som_lvq, SomLvqConfig, SomLvqModel};
use crate::seed::derive_seed_path;

const SWEEP_STREAM: u64 = 0;
const RERUN_STREAM: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ClassifierKind {
    #[serde(rename = "MLP")]
    Mlp,
    #[serde(rename = "SOM-LVQ")]
    SomLvq,
}

impl ClassifierKind {
    fn stream(self) -> u64 {
        match self {
            Self::Mlp => 0,
            Self::SomLvq => 1,
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Mlp => "MLP",
            Self::SomLvq => "SOM-LVQ",
        })
    }
}

impl FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "mlp" => Ok(Self::Mlp),
            "som-lvq" | "som_lvq" | "somlvq" => Ok(Self::SomLvq),
            other => Err(format!("unknown classifier {other:?} (expected MLP or SOM-LVQ)")),
        }
    }
}

/// Patterns with class indices into `class_names`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: Vec<Vec<f64>>,
    pub classes: Vec<usize>,
    pub class_names: Vec<String>,
}

impl Dataset {
    pub fn from_matrix(m: &LabeledFeatureMatrix, class_names: &[String]) -> Result<Self, HarnessError> {
        let classes = m
            .labels()
            .iter()
            .map(|l| {
                class_names
                    .iter()
                    .position(|c| c == l)
                    .ok_or_else(|| HarnessError::UnknownLabel(l.clone()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            inputs: m.row_vectors(),
            classes,
            class_names: class_names.to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.inputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inputs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    pub fn one_hot(&self) -> Vec<Vec<f64>> {
        self.classes
            .iter()
            .map(|&c| {
                let mut t = vec![0.0; self.class_names.len()];
                t[c] = 1.0;
                t
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub classifier: ClassifierKind,
    pub m: usize,
    pub hidden: usize,
    pub rep: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "model")]
pub enum TrainedModel {
    #[serde(rename = "MLP")]
    Mlp(MlpModel),
    #[serde(rename = "SOM-LVQ")]
    SomLvq(SomLvqModel),
}

impl TrainedModel {
    pub fn classify(&self, x: &[f64]) -> Result<usize, String> {
        match self {
            Self::Mlp(m) => m.predict(x).map(|y| decide(&y)).map_err(|e| e.to_string()),
            Self::SomLvq(m) => m.classify(x).map_err(|e| e.to_string()),
        }
    }

    pub fn accuracy(&self, ds: &Dataset) -> Result<f64, String> {
        if ds.is_empty() {
            return Ok(0.0);
        }
        let mut hits = 0;
        for (x, &c) in ds.inputs.iter().zip(&ds.classes) {
            if self.classify(x)? == c {
                hits += 1;
            }
        }
        Ok(hits as f64 / ds.len() as f64)
    }
}

/// A trained model plus what is needed to use it on new feature rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub trial: TrialSpec,
    pub accuracy: f64,
    pub class_names: Vec<String>,
    pub model: TrainedModel,
}

impl SavedModel {
    pub fn save(&self, path: &Path) -> Result<(), HarnessError> {
        let io = |source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        };
        let text = serde_json::to_string_pretty(self).map_err(|e| HarnessError::Config(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|source| HarnessError::Io {
            path: path.display().to_string(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }
}

pub struct TrialOutcome {
    pub accuracy: f64,
    pub model: Option<TrainedModel>,
}

/// Trains one network for a trial and reports its test accuracy.
pub trait TrialRunner: Sync {
    fn run(&self, spec: &TrialSpec, train: &Dataset, test: &Dataset) -> Result<TrialOutcome, String>;
}

impl<F> TrialRunner for F
where
    F: Fn(&TrialSpec, &Dataset, &Dataset) -> Result<TrialOutcome, String> + Sync,
{
    fn run(&self, spec: &TrialSpec, train: &Dataset, test: &Dataset) -> Result<TrialOutcome, String> {
        self(spec, train, test)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClassifierConfig {
    pub activation: Activation,
    pub mlp: TrainConfig,
    pub som_lvq: SomLvqConfig,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            activation: Activation::Logistic,
            mlp: TrainConfig::default(),
            som_lvq: SomLvqConfig::default(),
        }
    }
}

/// Trains the real classifiers: `m → hidden → classes` MLP, or a SOM-LVQ map
/// with `hidden` neurons.
pub struct DefaultRunner {
    pub cfg: ClassifierConfig,
}

impl TrialRunner for DefaultRunner {
    fn run(&self, spec: &TrialSpec, train: &Dataset, test: &Dataset) -> Result<TrialOutcome, String> {
        let model = match spec.classifier {
            ClassifierKind::Mlp => {
                let cfg = TrainConfig {
                    seed: spec.seed,
                    ..self.cfg.mlp.clone()
                };
                let sizes = [train.dim(), spec.hidden, train.class_names.len()];
                let (m, _) = mlp_train(&train.inputs, &train.one_hot(), &sizes, self.cfg.activation, &cfg)
                    .map_err(|e| e.to_string())?;
                TrainedModel::Mlp(m)
            }
            ClassifierKind::SomLvq => {
                let m = train_som_lvq(
                    &train.inputs,
                    &train.classes,
                    &train.class_names,
                    spec.hidden,
                    &self.cfg.som_lvq,
                    spec.seed,
                )
                .map_err(|e| e.to_string())?;
                TrainedModel::SomLvq(m)
            }
        };
        Ok(TrialOutcome {
            accuracy: model.accuracy(test)?,
            model: Some(model),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub classifier: ClassifierKind,
    pub m: usize,
    pub hidden: usize,
    pub rep: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub classifier: ClassifierKind,
    pub m: usize,
    pub best: TrialResult,
    pub mean: f64,
    pub std: f64,
    pub median: f64,
    pub trials: Vec<TrialResult>,
}

pub struct SweepOutcome {
    pub trials: Vec<TrialResult>,
    pub failures: Vec<(TrialSpec, String)>,
    pub best: TrialResult,
    pub best_model: Option<TrainedModel>,
}

/// Highest accuracy; ties go to the smaller hidden size, then the lower seed.
fn peak(trials: &[TrialResult]) -> Option<usize> {
    (0..trials.len()).min_by(|&a, &b| {
        let (x, y) = (&trials[a], &trials[b]);
        y.accuracy
            .total_cmp(&x.accuracy)
            .then(x.hidden.cmp(&y.hidden))
            .then(x.seed.cmp(&y.seed))
    })
}

fn select(trials: &[TrialResult], selection: Selection) -> Option<usize> {
    match selection {
        Selection::Peak => peak(trials),
        Selection::Mean => {
            let mut sizes: Vec<usize> = trials.iter().map(|t| t.hidden).collect();
            sizes.sort_unstable();
            sizes.dedup();
            let mut best: Option<(f64, usize)> = None;
            for h in sizes {
                let accs: Vec<f64> = trials.iter().filter(|t| t.hidden == h).map(|t| t.accuracy).collect();
                let m = mean(&accs);
                if best.is_none_or(|(bm, _)| m > bm) {
                    best = Some((m, h));
                }
            }
            let h = best?.1;
            let idx: Vec<usize> = (0..trials.len()).filter(|&i| trials[i].hidden == h).collect();
            let sub: Vec<TrialResult> = idx.iter().map(|&i| trials[i].clone()).collect();
            peak(&sub).map(|j| idx[j])
        }
    }
}

pub fn summarize(classifier: ClassifierKind, m: usize, trials: &[TrialResult], best: &TrialResult) -> SweepSummary {
    let accs: Vec<f64> = trials.iter().map(|t| t.accuracy).collect();
    SweepSummary {
        classifier,
        m,
        best: best.clone(),
        mean: mean(&accs),
        std: sample_std(&accs),
        median: median(&accs),
        trials: trials.to_vec(),
    }
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Pool(e.to_string()))
}

type Executed = (Vec<TrialResult>, Vec<Option<TrainedModel>>, Vec<(TrialSpec, String)>);

fn execute(
    specs: &[TrialSpec],
    train: &Dataset,
    test: &Dataset,
    runner: &dyn TrialRunner,
    workers: usize,
) -> Result<Executed, HarnessError> {
    let outcomes: Vec<(TrialSpec, Result<TrialOutcome, String>, f64)> = pool(workers)?.install(|| {
        specs
            .par_iter()
            .map(|s| {
                let t0 = Instant::now();
                let r = runner.run(s, train, test);
                (*s, r, t0.elapsed().as_secs_f64())
            })
            .collect()
    });
    let mut trials = Vec::new();
    let mut models = Vec::new();
    let mut failures = Vec::new();
    for (s, r, seconds) in outcomes {
        match r {
            Ok(o) => {
                trials.push(TrialResult {
                    classifier: s.classifier,
                    m: s.m,
                    hidden: s.hidden,
                    rep: s.rep,
                    seed: s.seed,
                    accuracy: o.accuracy,
                    seconds,
                });
                models.push(o.model);
            }
            Err(e) => {
                warn!("trial {} hidden={} rep={} failed: {e}", s.classifier, s.hidden, s.rep);
                failures.push((s, e));
            }
        }
    }
    if trials.is_empty() {
        let first = failures.first().map_or_else(String::new, |f| f.1.clone());
        return Err(HarnessError::AllTrialsFailed(first));
    }
    Ok((trials, models, failures))
}

/// Trains `|hidden| x reps` networks, each from its own seed derived from
/// `master_seed`, and keeps the selected best one.
#[allow(clippy::too_many_arguments)]
pub fn run_sweep(
    train: &Dataset,
    test: &Dataset,
    classifier: ClassifierKind,
    m: usize,
    hidden: std::ops::RangeInclusive<usize>,
    reps: usize,
    master_seed: u64,
    selection: Selection,
    runner: &dyn TrialRunner,
    workers: usize,
) -> Result<SweepOutcome, HarnessError> {
    if hidden.is_empty() {
        return Err(HarnessError::EmptyRange);
    }
    if reps == 0 {
        return Err(HarnessError::TooFewReps { needed: 1, got: 0 });
    }
    let specs: Vec<TrialSpec> = hidden
        .flat_map(|h| {
            (0..reps).map(move |rep| TrialSpec {
                classifier,
                m,
                hidden: h,
                rep,
                seed: derive_seed_path(
                    master_seed,
                    &[SWEEP_STREAM, classifier.stream(), m as u64, h as u64, rep as u64],
                ),
            })
        })
        .collect();
    let (trials, mut models, failures) = execute(&specs, train, test, runner, workers)?;
    let b = select(&trials, selection).expect("at least one trial");
    Ok(SweepOutcome {
        best: trials[b].clone(),
        best_model: models[b].take(),
        trials,
        failures,
    })
}

/// Retrains the architecture of `best` `reps` times with fresh seeds and
/// summarizes the resulting accuracies.
pub fn rerun_best(
    train: &Dataset,
    test: &Dataset,
    best: &TrialResult,
    reps: usize,
    master_seed: u64,
    runner: &dyn TrialRunner,
    workers: usize,
) -> Result<SweepSummary, HarnessError> {
    if reps < 2 {
        return Err(HarnessError::TooFewReps { needed: 2, got: reps });
    }
    let specs: Vec<TrialSpec> = (0..reps)
        .map(|rep| TrialSpec {
            classifier: best.classifier,
            m: best.m,
            hidden: best.hidden,
            rep,
            seed: derive_seed_path(
                master_seed,
                &[RERUN_STREAM, best.classifier.stream(), best.m as u64, best.hidden as u64, rep as u64],
            ),
        })
        .collect();
    let (trials, _, _) = execute(&specs, train, test, runner, workers)?;
    let b = peak(&trials).expect("at least one trial");
    Ok(summarize(best.classifier, best.m, &trials, &trials[b]))
}
