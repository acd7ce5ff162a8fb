//! Single-layer perceptron and multilayer perceptron trained with the
//! generalized delta rule (per-pattern backpropagation).
//!
//! Layer `k` computes `y^(k) = g(W^(k) x^(k))` with `x^(k) = y^(k-1)`. When
//! bias is on, every layer input is augmented with a constant 1 stored as
//! the last weight column.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("empty training set")]
    EmptyData,
    #[error("input has {actual} values, network expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("{inputs} inputs but {targets} targets")]
    TargetCount { inputs: usize, targets: usize },
    #[error("invalid layer sizes {0:?}")]
    LayerSizes(Vec<usize>),
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("unsupported model schema version {0}")]
    SchemaVersion(u32),
    #[error("model file: {0}")]
    Io(#[from] std::io::Error),
    #[error("model file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Logistic,
    Tanh,
    Step,
}

impl Activation {
    pub fn eval(self, s: f64) -> f64 {
        match self {
            Activation::Logistic => 1.0 / (1.0 + (-s).exp()),
            Activation::Tanh => s.tanh(),
            Activation::Step => {
                if s > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// `g'` expressed through the output `y = g(s)`.
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Logistic => y * (1.0 - y),
            Activation::Tanh => 1.0 - y * y,
            Activation::Step => 0.0,
        }
    }

    pub fn derivative(self, s: f64) -> f64 {
        self.derivative_from_output(self.eval(s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    /// η
    pub learning_rate: f64,
    /// N_max
    pub max_epochs: usize,
    /// ε, compared against the epoch error δ(t).
    pub tolerance: f64,
    pub validation_fraction: f64,
    pub patience: usize,
    pub seed: u64,
    pub init_range: f64,
    pub bias: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            max_epochs: 1000,
            tolerance: 1e-3,
            validation_fraction: 0.2,
            patience: 20,
            seed: 0,
            init_range: 0.5,
            bias: true,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<(), NetError> {
        if !(self.learning_rate >= 0.0 && self.learning_rate.is_finite()) {
            return Err(NetError::Config(format!(
                "learning rate {} must be a finite non-negative number",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(NetError::Config(format!(
                "validation fraction {} outside [0, 1)",
                self.validation_fraction
            )));
        }
        Ok(())
    }
}

fn check_patterns(inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<(), NetError> {
    if inputs.is_empty() {
        return Err(NetError::EmptyData);
    }
    if inputs.len() != targets.len() {
        return Err(NetError::TargetCount {
            inputs: inputs.len(),
            targets: targets.len(),
        });
    }
    Ok(())
}

fn check_dims(rows: &[Vec<f64>], expected: usize) -> Result<(), NetError> {
    match rows.iter().find(|r| r.len() != expected) {
        Some(r) => Err(NetError::DimensionMismatch {
            expected,
            actual: r.len(),
        }),
        None => Ok(()),
    }
}

/// Dense weights of one layer, `outputs x (inputs + bias)`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub inputs: usize,
    pub outputs: usize,
    pub activation: Activation,
    pub weights: Vec<f64>,
}

impl Layer {
    fn stride(&self, bias: bool) -> usize {
        self.inputs + usize::from(bias)
    }

    fn forward(&self, x: &[f64], bias: bool) -> Vec<f64> {
        let stride = self.stride(bias);
        self.weights
            .chunks(stride)
            .map(|w| {
                let mut s: f64 = w[..self.inputs].iter().zip(x).map(|(a, b)| a * b).sum();
                if bias {
                    s += w[self.inputs];
                }
                self.activation.eval(s)
            })
            .collect()
    }
}

fn random_weights(rng: &mut ChaCha8Rng, rows: usize, fan_in: usize, range: f64) -> Vec<f64> {
    let scale = range / (fan_in as f64).sqrt();
    (0..rows * fan_in)
        .map(|_| rng.random_range(-1.0..=1.0) * scale)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerceptronModel {
    pub inputs: usize,
    pub outputs: usize,
    pub bias: bool,
    pub weights: Vec<f64>,
}

impl PerceptronModel {
    fn layer(&self) -> Layer {
        Layer {
            inputs: self.inputs,
            outputs: self.outputs,
            activation: Activation::Step,
            weights: self.weights.clone(),
        }
    }

    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>, NetError> {
        if x.len() != self.inputs {
            return Err(NetError::DimensionMismatch {
                expected: self.inputs,
                actual: x.len(),
            });
        }
        Ok(self.layer().forward(x, self.bias))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerceptronReport {
    pub converged: bool,
    pub epochs: usize,
    /// δ(t) per epoch.
    pub errors: Vec<f64>,
}

/// Rosenblatt training: for every pattern `δ_i = d_i - y_i` and
/// `Δw_ij = η δ_i x_j`. The epoch error δ(t) is the largest `|δ_i|` seen
/// during the epoch; training stops once `δ(t) <= ε` or after N_max epochs.
pub fn perceptron_train(
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    cfg: &TrainConfig,
) -> Result<(PerceptronModel, PerceptronReport), NetError> {
    check_patterns(inputs, targets)?;
    cfg.validate()?;
    let n = inputs[0].len();
    let m = targets[0].len();
    check_dims(inputs, n)?;
    check_dims(targets, m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let stride = n + usize::from(cfg.bias);
    let mut model = PerceptronModel {
        inputs: n,
        outputs: m,
        bias: cfg.bias,
        weights: random_weights(&mut rng, m, stride, cfg.init_range),
    };
    let mut errors = Vec::new();
    let mut converged = false;
    for _ in 0..cfg.max_epochs {
        let mut epoch_error: f64 = 0.0;
        for (x, d) in inputs.iter().zip(targets) {
            let y = model.layer().forward(x, cfg.bias);
            for i in 0..m {
                let delta = d[i] - y[i];
                epoch_error = epoch_error.max(delta.abs());
                let row = &mut model.weights[i * stride..(i + 1) * stride];
                for (w, xj) in row.iter_mut().zip(x) {
                    *w += cfg.learning_rate * delta * xj;
                }
                if cfg.bias {
                    row[n] += cfg.learning_rate * delta;
                }
            }
        }
        errors.push(epoch_error);
        if epoch_error <= cfg.tolerance {
            converged = true;
            break;
        }
    }
    Ok((
        model,
        PerceptronReport {
            converged,
            epochs: errors.len(),
            errors,
        },
    ))
}

/// Multilayer perceptron with `M` weight layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub schema_version: u32,
    pub layer_sizes: Vec<usize>,
    pub bias: bool,
    pub layers: Vec<Layer>,
}

/// Outputs of every layer for one input, `y^(0) = x` first.
#[derive(Debug, Clone, PartialEq)]
pub struct Forward {
    pub activations: Vec<Vec<f64>>,
}

impl Forward {
    pub fn output(&self) -> &[f64] {
        self.activations.last().expect("at least the input layer")
    }
}

impl MlpModel {
    /// Random weights, uniform in `±init_range / sqrt(fan_in)`.
    pub fn random(
        layer_sizes: &[usize],
        activations: &[Activation],
        bias: bool,
        init_range: f64,
        rng: &mut ChaCha8Rng,
    ) -> Result<Self, NetError> {
        if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
            return Err(NetError::LayerSizes(layer_sizes.to_vec()));
        }
        if activations.len() != layer_sizes.len() - 1 {
            return Err(NetError::Config(format!(
                "{} activations for {} layers",
                activations.len(),
                layer_sizes.len() - 1
            )));
        }
        let layers = layer_sizes
            .windows(2)
            .zip(activations)
            .map(|(w, &activation)| {
                let fan_in = w[0] + usize::from(bias);
                Layer {
                    inputs: w[0],
                    outputs: w[1],
                    activation,
                    weights: random_weights(rng, w[1], fan_in, init_range),
                }
            })
            .collect();
        Ok(Self {
            schema_version: MODEL_SCHEMA_VERSION,
            layer_sizes: layer_sizes.to_vec(),
            bias,
            layers,
        })
    }

    /// All-zero weights.
    pub fn zeros(layer_sizes: &[usize], activation: Activation, bias: bool) -> Result<Self, NetError> {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let acts = vec![activation; layer_sizes.len().saturating_sub(1)];
        let mut m = Self::random(layer_sizes, &acts, bias, 0.0, &mut rng)?;
        for l in &mut m.layers {
            l.weights.iter_mut().for_each(|w| *w = 0.0);
        }
        Ok(m)
    }

    pub fn inputs(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn outputs(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    pub fn predict(&self, x: &[f64]) -> Result<Vec<f64>, NetError> {
        Ok(mlp_forward(self, x)?.activations.pop().unwrap())
    }

    pub fn save(&self, path: &Path) -> Result<(), NetError> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, NetError> {
        let m: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if m.schema_version != MODEL_SCHEMA_VERSION {
            return Err(NetError::SchemaVersion(m.schema_version));
        }
        Ok(m)
    }
}

pub fn mlp_forward(model: &MlpModel, x: &[f64]) -> Result<Forward, NetError> {
    if x.len() != model.inputs() {
        return Err(NetError::DimensionMismatch {
            expected: model.inputs(),
            actual: x.len(),
        });
    }
    let mut activations = Vec::with_capacity(model.layers.len() + 1);
    activations.push(x.to_vec());
    for layer in &model.layers {
        let next = layer.forward(activations.last().unwrap(), model.bias);
        activations.push(next);
    }
    Ok(Forward { activations })
}

/// Output-layer deltas and per-layer raw updates `δ_i^(k) x_j^(k)` (that is `Δw / η`).
fn backprop(model: &MlpModel, fwd: &Forward, d: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let m = model.layers.len();
    let mut grads: Vec<Vec<f64>> = vec![Vec::new(); m];
    let out_layer = &model.layers[m - 1];
    let mut delta: Vec<f64> = fwd
        .output()
        .iter()
        .zip(d)
        .map(|(&y, &di)| (di - y) * out_layer.activation.derivative_from_output(y))
        .collect();
    let output_delta = delta.clone();
    for k in (0..m).rev() {
        let layer = &model.layers[k];
        let stride = layer.stride(model.bias);
        let x = &fwd.activations[k];
        let mut g = vec![0.0; layer.weights.len()];
        for (i, di) in delta.iter().enumerate() {
            let row = &mut g[i * stride..(i + 1) * stride];
            for (gj, xj) in row.iter_mut().zip(x) {
                *gj = di * xj;
            }
            if model.bias {
                row[layer.inputs] = *di;
            }
        }
        grads[k] = g;
        if k > 0 {
            let below = &model.layers[k - 1];
            delta = (0..layer.inputs)
                .map(|j| {
                    let back: f64 = delta
                        .iter()
                        .enumerate()
                        .map(|(i, di)| layer.weights[i * stride + j] * di)
                        .sum();
                    below.activation.derivative_from_output(x[j]) * back
                })
                .collect();
        }
    }
    (output_delta, grads)
}

/// Weight-shaped update directions for pattern `(x, d)`.
///
/// These are `-∂E/∂w` for `E = ½ Σ_i (d_i - y_i)²`; the delta rule adds
/// `η` times them to the weights.
pub fn mlp_gradient(model: &MlpModel, x: &[f64], d: &[f64]) -> Result<Vec<Vec<f64>>, NetError> {
    if d.len() != model.outputs() {
        return Err(NetError::DimensionMismatch {
            expected: model.outputs(),
            actual: d.len(),
        });
    }
    let fwd = mlp_forward(model, x)?;
    Ok(backprop(model, &fwd, d).1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    Tolerance,
    MaxEpochs,
    EarlyStop,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// δ(t): largest `|δ_i^(M)|` over the epoch.
    pub max_delta: f64,
    /// Mean over patterns of the largest output `|δ_i^(M)|`.
    pub mean_delta: f64,
    pub validation_accuracy: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    pub epochs: Vec<EpochRecord>,
    pub stop: StopReason,
    pub best_epoch: Option<usize>,
}

/// Fraction of patterns whose predicted class matches the target class.
///
/// With several outputs the class is the argmax; a single output is thresholded at 0.5.
pub fn accuracy(model: &MlpModel, inputs: &[Vec<f64>], targets: &[Vec<f64>]) -> Result<f64, NetError> {
    if inputs.is_empty() {
        return Ok(0.0);
    }
    let mut hits = 0;
    for (x, d) in inputs.iter().zip(targets) {
        let y = model.predict(x)?;
        if decide(&y) == decide(d) {
            hits += 1;
        }
    }
    Ok(hits as f64 / inputs.len() as f64)
}

/// Class decision for an output vector: argmax (lowest index on ties), or a 0.5 threshold.
pub fn decide(y: &[f64]) -> usize {
    if y.len() == 1 {
        return usize::from(y[0] >= 0.5);
    }
    let mut best = 0;
    for (i, v) in y.iter().enumerate() {
        if *v > y[best] {
            best = i;
        }
    }
    best
}

/// Initializes a network from `cfg.seed` and trains it.
pub fn mlp_train(
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    layer_sizes: &[usize],
    activation: Activation,
    cfg: &TrainConfig,
) -> Result<(MlpModel, TrainTrace), NetError> {
    check_patterns(inputs, targets)?;
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let acts = vec![activation; layer_sizes.len().saturating_sub(1)];
    let model = MlpModel::random(layer_sizes, &acts, cfg.bias, cfg.init_range, &mut rng)?;
    mlp_train_from(model, inputs, targets, cfg, &mut rng)
}

/// Trains an existing network with per-pattern updates in shuffled order.
///
/// A `validation_fraction` of the patterns is held out; when the held-out
/// accuracy has not improved for `patience` epochs training stops, and the
/// weights of the best validation epoch are returned.
pub fn mlp_train_from(
    mut model: MlpModel,
    inputs: &[Vec<f64>],
    targets: &[Vec<f64>],
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<(MlpModel, TrainTrace), NetError> {
    check_patterns(inputs, targets)?;
    cfg.validate()?;
    check_dims(inputs, model.inputs())?;
    check_dims(targets, model.outputs())?;

    let mut order: Vec<usize> = (0..inputs.len()).collect();
    let n_val = if cfg.validation_fraction > 0.0 && inputs.len() >= 2 {
        ((inputs.len() as f64 * cfg.validation_fraction).round() as usize).clamp(1, inputs.len() - 1)
    } else {
        0
    };
    order.shuffle(rng);
    let (val_idx, train_idx) = order.split_at(n_val);
    let mut train_idx = train_idx.to_vec();
    let val_x: Vec<Vec<f64>> = val_idx.iter().map(|&i| inputs[i].clone()).collect();
    let val_d: Vec<Vec<f64>> = val_idx.iter().map(|&i| targets[i].clone()).collect();

    let mut records = Vec::new();
    let mut stop = StopReason::MaxEpochs;
    let mut best: Option<(f64, usize, MlpModel)> = None;
    let mut stale = 0;

    for epoch in 0..cfg.max_epochs {
        train_idx.shuffle(rng);
        let mut max_delta: f64 = 0.0;
        let mut sum_delta = 0.0;
        for &p in &train_idx {
            let fwd = mlp_forward(&model, &inputs[p])?;
            let (out_delta, grads) = backprop(&model, &fwd, &targets[p]);
            let worst = out_delta.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            max_delta = max_delta.max(worst);
            sum_delta += worst;
            for (layer, g) in model.layers.iter_mut().zip(&grads) {
                for (w, gi) in layer.weights.iter_mut().zip(g) {
                    *w += cfg.learning_rate * gi;
                }
            }
        }
        let validation_accuracy = if n_val > 0 {
            Some(accuracy(&model, &val_x, &val_d)?)
        } else {
            None
        };
        records.push(EpochRecord {
            epoch,
            max_delta,
            mean_delta: sum_delta / train_idx.len().max(1) as f64,
            validation_accuracy,
        });
        if let Some(acc) = validation_accuracy {
            if best.as_ref().is_none_or(|(b, _, _)| acc > *b) {
                best = Some((acc, epoch, model.clone()));
                stale = 0;
            } else {
                stale += 1;
            }
        }
        if max_delta <= cfg.tolerance {
            stop = StopReason::Tolerance;
            break;
        }
        if n_val > 0 && stale >= cfg.patience {
            stop = StopReason::EarlyStop;
            break;
        }
    }

    let best_epoch = best.as_ref().map(|b| b.1);
    if let Some((_, _, weights)) = best {
        model = weights;
    }
    Ok((
        model,
        TrainTrace {
            epochs: records,
            stop,
            best_epoch,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gate(f: impl Fn(bool, bool) -> bool) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let mut xs = Vec::new();
        let mut ds = Vec::new();
        for a in [false, true] {
            for b in [false, true] {
                xs.push(vec![f64::from(u8::from(a)), f64::from(u8::from(b))]);
                ds.push(vec![f64::from(u8::from(f(a, b)))]);
            }
        }
        (xs, ds)
    }

    fn perceptron_cfg(lr: f64) -> TrainConfig {
        TrainConfig {
            learning_rate: lr,
            max_epochs: 1000,
            tolerance: 0.0,
            validation_fraction: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn activation_derivatives_match_finite_differences() {
        for act in [Activation::Logistic, Activation::Tanh] {
            for i in -20..=20 {
                let s = i as f64 * 0.25;
                let h = 1e-5;
                let fd = (act.eval(s + h) - act.eval(s - h)) / (2.0 * h);
                assert!((fd - act.derivative(s)).abs() < 1e-6, "{act:?} at {s}");
                assert!(act.eval(s + 0.1) > act.eval(s));
            }
        }
        assert_eq!(Activation::Logistic.eval(0.0), 0.5);
    }

    #[test]
    fn perceptron_learns_and() {
        let (xs, ds) = gate(|a, b| a && b);
        let (model, report) = perceptron_train(&xs, &ds, &perceptron_cfg(0.1)).unwrap();
        assert!(report.converged);
        for (x, d) in xs.iter().zip(&ds) {
            assert_eq!(&model.predict(x).unwrap(), d);
        }
    }

    #[test]
    fn perceptron_cannot_learn_xor() {
        let (xs, ds) = gate(|a, b| a ^ b);
        let (_, report) = perceptron_train(&xs, &ds, &perceptron_cfg(0.1)).unwrap();
        assert!(!report.converged);
        assert_eq!(report.epochs, 1000);
    }

    #[test]
    fn zero_learning_rate_freezes_weights() {
        let (xs, ds) = gate(|a, b| a || b);
        let mut cfg = perceptron_cfg(0.0);
        cfg.max_epochs = 5;
        let (model, _) = perceptron_train(&xs, &ds, &cfg).unwrap();
        cfg.max_epochs = 0;
        let (initial, _) = perceptron_train(&xs, &ds, &cfg).unwrap();
        assert_eq!(model.weights, initial.weights);
    }

    #[test]
    fn perceptron_errors() {
        assert!(matches!(
            perceptron_train(&[], &[], &perceptron_cfg(0.1)),
            Err(NetError::EmptyData)
        ));
        assert!(matches!(
            perceptron_train(&[vec![0.0], vec![1.0, 2.0]], &[vec![0.0], vec![1.0]], &perceptron_cfg(0.1)),
            Err(NetError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_weights_give_one_half() {
        let m = MlpModel::zeros(&[3, 4, 2], Activation::Logistic, true).unwrap();
        assert_eq!(m.predict(&[0.3, -1.0, 2.0]).unwrap(), [0.5, 0.5]);
        assert!(matches!(
            m.predict(&[1.0]),
            Err(NetError::DimensionMismatch { expected: 3, actual: 1 })
        ));
    }

    #[test]
    fn one_by_one_chain() {
        let mut m = MlpModel::zeros(&[1, 1], Activation::Logistic, false).unwrap();
        m.layers[0].weights[0] = 1.0;
        for x in [-2.0, 0.0, 0.7] {
            assert_eq!(m.predict(&[x]).unwrap()[0], Activation::Logistic.eval(x));
        }
        // single-term chain rule
        let y = Activation::Logistic.eval(0.7);
        let g = mlp_gradient(&m, &[0.7], &[1.0]).unwrap();
        assert!((g[0][0] - (1.0 - y) * y * (1.0 - y) * 0.7).abs() < 1e-15);
    }

    #[test]
    fn matching_target_gives_zero_gradient() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let m = MlpModel::random(&[2, 3, 2], &[Activation::Logistic; 2], true, 1.0, &mut rng).unwrap();
        let y = m.predict(&[0.2, 0.9]).unwrap();
        let g = mlp_gradient(&m, &[0.2, 0.9], &y).unwrap();
        assert!(g.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn layer_size_validation() {
        let cfg = TrainConfig::default();
        let xs = vec![vec![0.0, 1.0]];
        let ds = vec![vec![1.0]];
        assert!(matches!(
            mlp_train(&xs, &ds, &[2, 0, 1], Activation::Logistic, &cfg),
            Err(NetError::LayerSizes(_))
        ));
        assert!(matches!(
            mlp_train(&xs, &ds, &[2], Activation::Logistic, &cfg),
            Err(NetError::LayerSizes(_))
        ));
        assert!(matches!(
            mlp_train(&xs, &ds, &[3, 2, 1], Activation::Logistic, &cfg),
            Err(NetError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            mlp_train(&[], &[], &[2, 2, 1], Activation::Logistic, &cfg),
            Err(NetError::EmptyData)
        ));
        let bad = TrainConfig {
            validation_fraction: 1.0,
            ..Default::default()
        };
        assert!(matches!(
            mlp_train(&xs, &ds, &[2, 2, 1], Activation::Logistic, &bad),
            Err(NetError::Config(_))
        ));
    }

    #[test]
    fn zero_epochs_returns_initial_network() {
        let (xs, ds) = gate(|a, b| a ^ b);
        let cfg = TrainConfig {
            max_epochs: 0,
            seed: 9,
            ..Default::default()
        };
        let (m, trace) = mlp_train(&xs, &ds, &[2, 3, 1], Activation::Logistic, &cfg).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let init = MlpModel::random(&[2, 3, 1], &[Activation::Logistic; 2], true, 0.5, &mut rng).unwrap();
        assert_eq!(m, init);
        assert!(trace.epochs.is_empty());
    }

    #[test]
    fn trace_is_recorded_every_epoch() {
        let (xs, ds) = gate(|a, b| a ^ b);
        let cfg = TrainConfig {
            max_epochs: 25,
            tolerance: 0.0,
            validation_fraction: 0.0,
            ..Default::default()
        };
        let (_, trace) = mlp_train(&xs, &ds, &[2, 3, 1], Activation::Logistic, &cfg).unwrap();
        assert_eq!(trace.epochs.len(), 25);
        assert_eq!(trace.stop, StopReason::MaxEpochs);
        assert!(trace
            .epochs
            .iter()
            .all(|e| e.max_delta.is_finite() && e.mean_delta <= e.max_delta));
    }

    #[test]
    fn early_stopping_returns_best_validation_weights() {
        let xs: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 / 40.0]).collect();
        let ds: Vec<Vec<f64>> = (0..40).map(|i| vec![f64::from(u8::from(i % 3 == 0))]).collect();
        let cfg = TrainConfig {
            max_epochs: 500,
            patience: 5,
            tolerance: 0.0,
            validation_fraction: 0.25,
            seed: 2,
            ..Default::default()
        };
        let (m, trace) = mlp_train(&xs, &ds, &[1, 4, 1], Activation::Logistic, &cfg).unwrap();
        assert_eq!(trace.stop, StopReason::EarlyStop);
        let best = trace.best_epoch.unwrap();
        let best_acc = trace.epochs[best].validation_accuracy.unwrap();
        assert!(trace.epochs.iter().all(|e| e.validation_accuracy.unwrap() <= best_acc));
        assert_eq!(trace.epochs.len(), best + 1 + 5);
        assert_eq!(m.schema_version, MODEL_SCHEMA_VERSION);
    }

    #[test]
    fn persistence_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = MlpModel::random(&[4, 3, 2], &[Activation::Tanh, Activation::Logistic], false, 0.5, &mut rng)
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("mlp.json");
        m.save(&p).unwrap();
        assert_eq!(MlpModel::load(&p).unwrap(), m);
    }
}
