//! Kohonen self-organizing maps, LVQ refinement and the SOM-LVQ classifier.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SOM_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SomError {
    #[error("empty data set")]
    EmptyData,
    #[error("vector has {actual} values, codebook expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("grid must have at least one neuron")]
    EmptyGrid,
    #[error("class {class} outside the universe of {classes} classes")]
    UnknownClass { class: usize, classes: usize },
    #[error("{patterns} patterns but {labels} labels")]
    LabelCount { patterns: usize, labels: usize },
    #[error("no neuron won any pattern")]
    NoLabeledNeuron,
    #[error("could not draw distinct initial codebook vectors")]
    DegenerateInit,
    #[error("unsupported model schema version {0}")]
    SchemaVersion(u32),
    #[error("model file: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file: {0}")]
    Json(#[from] serde_json::Error),
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Learning-rate and width schedules `η(t) = η0 e^{-t/τ2}`, `σ(t) = σ0 e^{-t/τ1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SomSchedule {
    pub eta0: f64,
    pub sigma0: f64,
    pub tau1: f64,
    pub tau2: f64,
}

impl SomSchedule {
    /// Defaults for an `rows x cols` grid trained for `n_max` epochs: σ0 is half
    /// the grid diagonal, τ1 = n_max / ln σ0 (n_max when σ0 <= 1), τ2 = n_max.
    pub fn for_grid(rows: usize, cols: usize, n_max: usize, eta0: f64) -> Self {
        let diag = (((rows - 1).pow(2) + (cols - 1).pow(2)) as f64).sqrt();
        let sigma0 = (diag / 2.0).max(0.5);
        let horizon = n_max.max(1) as f64;
        let tau1 = if sigma0 > 1.0 {
            horizon / sigma0.ln()
        } else {
            horizon
        };
        Self {
            eta0,
            sigma0,
            tau1,
            tau2: horizon,
        }
    }

    pub fn sigma(&self, t: f64) -> f64 {
        self.sigma0 * (-t / self.tau1).exp()
    }

    pub fn eta(&self, t: f64) -> f64 {
        self.eta0 * (-t / self.tau2).exp()
    }

    /// `h_{i,k}(t) = exp(-d² / 2σ²(t))` for grid distance `d`.
    pub fn neighborhood(&self, grid_dist_sq: f64, t: f64) -> f64 {
        let s = self.sigma(t);
        (-grid_dist_sq / (2.0 * s * s)).exp()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomModel {
    pub schema_version: u32,
    pub rows: usize,
    pub cols: usize,
    /// Grid coordinates `r_i = (row, col)`.
    pub positions: Vec<(i64, i64)>,
    /// Codebook vectors `w_i`.
    pub codebook: Vec<Vec<f64>>,
    pub schedule: SomSchedule,
}

impl SomModel {
    /// Codebook drawn uniformly inside the bounding box of `data`, all vectors distinct.
    pub fn random(
        rows: usize,
        cols: usize,
        data: &[Vec<f64>],
        schedule: SomSchedule,
        seed: u64,
    ) -> Result<Self, SomError> {
        if rows == 0 || cols == 0 {
            return Err(SomError::EmptyGrid);
        }
        let first = data.first().ok_or(SomError::EmptyData)?;
        let dim = first.len();
        check_dims(data, dim)?;
        let mut lo = first.clone();
        let mut hi = first.clone();
        for x in data {
            for j in 0..dim {
                lo[j] = lo[j].min(x[j]);
                hi[j] = hi[j].max(x[j]);
            }
        }
        for j in 0..dim {
            if hi[j] <= lo[j] {
                hi[j] = lo[j] + 1e-3;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut codebook: Vec<Vec<f64>> = Vec::with_capacity(rows * cols);
        let mut attempts = 0;
        while codebook.len() < rows * cols {
            let w: Vec<f64> = (0..dim).map(|j| rng.random_range(lo[j]..hi[j])).collect();
            if codebook.contains(&w) {
                attempts += 1;
                if attempts > 1000 {
                    return Err(SomError::DegenerateInit);
                }
                continue;
            }
            codebook.push(w);
        }
        let positions = (0..rows * cols)
            .map(|i| ((i / cols) as i64, (i % cols) as i64))
            .collect();
        Ok(Self {
            schema_version: SOM_SCHEMA_VERSION,
            rows,
            cols,
            positions,
            codebook,
            schedule,
        })
    }

    pub fn neurons(&self) -> usize {
        self.codebook.len()
    }

    pub fn dim(&self) -> usize {
        self.codebook[0].len()
    }

    pub fn grid_dist_sq(&self, i: usize, k: usize) -> f64 {
        let (a, b) = (self.positions[i], self.positions[k]);
        ((a.0 - b.0).pow(2) + (a.1 - b.1).pow(2)) as f64
    }

    /// Neuron outputs `y_i = exp(-‖x - w_i‖²)`.
    pub fn outputs(&self, x: &[f64]) -> Result<Vec<f64>, SomError> {
        self.check(x)?;
        Ok(self.codebook.iter().map(|w| (-sq_dist(x, w)).exp()).collect())
    }

    fn check(&self, x: &[f64]) -> Result<(), SomError> {
        if x.len() != self.dim() {
            return Err(SomError::DimensionMismatch {
                expected: self.dim(),
                actual: x.len(),
            });
        }
        Ok(())
    }
}

fn check_dims(data: &[Vec<f64>], dim: usize) -> Result<(), SomError> {
    match data.iter().find(|x| x.len() != dim) {
        Some(x) => Err(SomError::DimensionMismatch {
            expected: dim,
            actual: x.len(),
        }),
        None => Ok(()),
    }
}

fn nearest(codebook: &[Vec<f64>], x: &[f64]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, w) in codebook.iter().enumerate() {
        let d = sq_dist(x, w);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Index of the neuron with the largest output, i.e. the nearest codebook
/// vector. Ties go to the lowest index.
pub fn som_winner(model: &SomModel, x: &[f64]) -> Result<usize, SomError> {
    model.check(x)?;
    Ok(nearest(&model.codebook, x))
}

/// Mean distance from each pattern to its winning codebook vector.
pub fn quantization_error(model: &SomModel, data: &[Vec<f64>]) -> Result<f64, SomError> {
    if data.is_empty() {
        return Err(SomError::EmptyData);
    }
    let mut total = 0.0;
    for x in data {
        let k = som_winner(model, x)?;
        total += sq_dist(x, &model.codebook[k]).sqrt();
    }
    Ok(total / data.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SomConfig {
    pub max_epochs: usize,
    /// Stop once the epoch adjustment mass δ(t) falls to this value.
    /// `None` uses `1e-9` per weight.
    pub stop_threshold: Option<f64>,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for SomConfig {
    fn default() -> Self {
        Self {
            max_epochs: 100,
            stop_threshold: None,
            seed: 0,
            shuffle: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomTrace {
    /// δ(t) = Σ |Δw| accumulated over epoch `t`.
    pub adjustment: Vec<f64>,
    pub sigma: Vec<f64>,
    pub eta: Vec<f64>,
}

/// Online SOM training. For each pattern the winner `k` is found and every
/// neuron moves by `η(t) h_{i,k}(t) (x - w_i)`, with `t` the epoch index.
pub fn som_train(
    data: &[Vec<f64>],
    mut model: SomModel,
    cfg: &SomConfig,
) -> Result<(SomModel, SomTrace), SomError> {
    if data.is_empty() {
        return Err(SomError::EmptyData);
    }
    check_dims(data, model.dim())?;
    let threshold = cfg
        .stop_threshold
        .unwrap_or(1e-9 * (model.neurons() * model.dim()) as f64);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut trace = SomTrace {
        adjustment: Vec::new(),
        sigma: Vec::new(),
        eta: Vec::new(),
    };
    let sched = model.schedule;
    for epoch in 0..cfg.max_epochs {
        let t = epoch as f64;
        let eta = sched.eta(t);
        let h: Vec<Vec<f64>> = (0..model.neurons())
            .map(|k| {
                (0..model.neurons())
                    .map(|i| sched.neighborhood(model.grid_dist_sq(i, k), t))
                    .collect()
            })
            .collect();
        if cfg.shuffle {
            order.shuffle(&mut rng);
        }
        let mut adjustment = 0.0;
        for &p in &order {
            let x = &data[p];
            let k = nearest(&model.codebook, x);
            for (i, w) in model.codebook.iter_mut().enumerate() {
                let rate = eta * h[k][i];
                for (wj, xj) in w.iter_mut().zip(x) {
                    let dw = rate * (xj - *wj);
                    *wj += dw;
                    adjustment += dw.abs();
                }
            }
        }
        trace.adjustment.push(adjustment);
        trace.sigma.push(sched.sigma(t));
        trace.eta.push(eta);
        if adjustment <= threshold {
            break;
        }
    }
    Ok((model, trace))
}

/// Class `C_i` attached to each neuron, as an index into the class universe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeuronClassMap {
    pub classes: usize,
    pub labels: Vec<usize>,
}

fn check_labels(data: &[Vec<f64>], labels: &[usize], classes: usize) -> Result<(), SomError> {
    if data.is_empty() {
        return Err(SomError::EmptyData);
    }
    if data.len() != labels.len() {
        return Err(SomError::LabelCount {
            patterns: data.len(),
            labels: labels.len(),
        });
    }
    if let Some(&class) = labels.iter().find(|&&c| c >= classes) {
        return Err(SomError::UnknownClass { class, classes });
    }
    Ok(())
}

/// Labels each neuron with the majority class of the patterns it wins (ties to
/// the lowest class index). Neurons that win nothing take the label of the
/// nearest labeled neuron on the grid (ties to the lowest neuron index).
pub fn label_neurons(
    model: &SomModel,
    data: &[Vec<f64>],
    labels: &[usize],
    classes: usize,
) -> Result<NeuronClassMap, SomError> {
    check_labels(data, labels, classes)?;
    check_dims(data, model.dim())?;
    let mut votes = vec![vec![0usize; classes]; model.neurons()];
    for (x, &c) in data.iter().zip(labels) {
        votes[nearest(&model.codebook, x)][c] += 1;
    }
    let won: Vec<Option<usize>> = votes
        .iter()
        .map(|v| {
            let total: usize = v.iter().sum();
            (total > 0).then(|| {
                v.iter()
                    .enumerate()
                    .fold(0, |best, (c, &n)| if n > v[best] { c } else { best })
            })
        })
        .collect();
    if won.iter().all(Option::is_none) {
        return Err(SomError::NoLabeledNeuron);
    }
    let labels = (0..model.neurons())
        .map(|i| {
            won[i].unwrap_or_else(|| {
                let mut best: Option<(f64, usize)> = None;
                for (j, c) in won.iter().enumerate() {
                    if let Some(c) = c {
                        let d = model.grid_dist_sq(i, j);
                        if best.is_none_or(|(bd, _)| d < bd) {
                            best = Some((d, *c));
                        }
                    }
                }
                best.expect("at least one labeled neuron").1
            })
        })
        .collect();
    Ok(NeuronClassMap { classes, labels })
}

/// One LVQ step on a codebook vector: `w ± η (x - w)`, attracting when the
/// classes agree and repelling otherwise.
pub fn lvq_update(w: &mut [f64], x: &[f64], eta: f64, same_class: bool) {
    let sign = if same_class { 1.0 } else { -1.0 };
    for (wj, xj) in w.iter_mut().zip(x) {
        *wj += sign * eta * (xj - *wj);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LvqConfig {
    /// Learning rate at the first epoch, decayed linearly to 0 over `epochs`.
    pub eta_start: f64,
    pub epochs: usize,
    /// Stop once the training classification error is at most this fraction.
    pub error_threshold: f64,
    pub seed: u64,
}

impl Default for LvqConfig {
    fn default() -> Self {
        Self {
            eta_start: 0.05,
            epochs: 50,
            error_threshold: 0.0,
            seed: 0,
        }
    }
}

impl LvqConfig {
    pub fn eta(&self, epoch: usize) -> f64 {
        self.eta_start * (1.0 - epoch as f64 / self.epochs.max(1) as f64)
    }
}

/// Training error per completed LVQ epoch.
pub type LvqTrace = Vec<f64>;

pub fn lvq_train(
    mut model: SomModel,
    map: &NeuronClassMap,
    data: &[Vec<f64>],
    labels: &[usize],
    cfg: &LvqConfig,
) -> Result<(SomModel, LvqTrace), SomError> {
    check_labels(data, labels, map.classes)?;
    check_dims(data, model.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut trace = Vec::new();
    for epoch in 0..cfg.epochs {
        let eta = cfg.eta(epoch);
        order.shuffle(&mut rng);
        for &p in &order {
            let k = nearest(&model.codebook, &data[p]);
            lvq_update(&mut model.codebook[k], &data[p], eta, map.labels[k] == labels[p]);
        }
        let wrong = data
            .iter()
            .zip(labels)
            .filter(|(x, &c)| map.labels[nearest(&model.codebook, x)] != c)
            .count();
        let err = wrong as f64 / data.len() as f64;
        trace.push(err);
        if err <= cfg.error_threshold {
            break;
        }
    }
    Ok((model, trace))
}

pub fn som_lvq_classify(model: &SomModel, map: &NeuronClassMap, x: &[f64]) -> Result<usize, SomError> {
    Ok(map.labels[som_winner(model, x)?])
}

/// Trained SOM codebook plus its neuron classes, persisted together.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SomLvqModel {
    pub som: SomModel,
    pub map: NeuronClassMap,
    pub class_names: Vec<String>,
}

impl SomLvqModel {
    pub fn classify(&self, x: &[f64]) -> Result<usize, SomError> {
        som_lvq_classify(&self.som, &self.map, x)
    }

    pub fn save(&self, path: &Path) -> Result<(), SomError> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, SomError> {
        let m: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if m.som.schema_version != SOM_SCHEMA_VERSION {
            return Err(SomError::SchemaVersion(m.som.schema_version));
        }
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SomLvqConfig {
    pub grid_rows: usize,
    pub eta0: f64,
    pub som: SomConfig,
    pub lvq: LvqConfig,
}

impl Default for SomLvqConfig {
    fn default() -> Self {
        Self {
            grid_rows: 1,
            eta0: 0.1,
            som: SomConfig::default(),
            lvq: LvqConfig::default(),
        }
    }
}

/// SOM → neuron labeling → LVQ, with `neurons` units arranged in
/// `grid_rows` rows. All randomness derives from `seed`.
pub fn train_som_lvq(
    data: &[Vec<f64>],
    labels: &[usize],
    class_names: &[String],
    neurons: usize,
    cfg: &SomLvqConfig,
    seed: u64,
) -> Result<SomLvqModel, SomError> {
    check_labels(data, labels, class_names.len())?;
    let rows = cfg.grid_rows.clamp(1, neurons.max(1));
    let cols = neurons.div_ceil(rows);
    let schedule = SomSchedule::for_grid(rows, cols, cfg.som.max_epochs, cfg.eta0);
    let init = SomModel::random(rows, cols, data, schedule, crate::seed::derive_seed(seed, 0))?;
    let som_cfg = SomConfig {
        seed: crate::seed::derive_seed(seed, 1),
        ..cfg.som.clone()
    };
    let (som, _) = som_train(data, init, &som_cfg)?;
    let map = label_neurons(&som, data, labels, class_names.len())?;
    let lvq_cfg = LvqConfig {
        seed: crate::seed::derive_seed(seed, 2),
        ..cfg.lvq.clone()
    };
    let (som, _) = lvq_train(som, &map, data, labels, &lvq_cfg)?;
    Ok(SomLvqModel {
        som,
        map,
        class_names: class_names.to_vec(),
    })
}
