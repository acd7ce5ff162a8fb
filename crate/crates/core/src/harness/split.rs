use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::features::LabeledFeatureMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSpec {
    pub test_fraction: f64,
    pub stratified: bool,
    pub seed: u64,
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            test_fraction: 0.19,
            stratified: true,
            seed: 0,
        }
    }
}

/// Per-class test counts.
///
/// The test total is `ceil(N f)`. Each class starts at `floor(f n_c)`; the
/// remaining rows go one at a time to the class with the fewest test rows so
/// far (ties: larger fractional remainder, then lower class index), never
/// exceeding `ceil(f n_c)`.
fn stratified_counts(sizes: &[usize], f: f64) -> Vec<usize> {
    let n: usize = sizes.iter().sum();
    let total = ((n as f64 * f).ceil() as usize).min(n);
    let mut counts: Vec<usize> = sizes.iter().map(|&s| (s as f64 * f).floor() as usize).collect();
    let caps: Vec<usize> = sizes
        .iter()
        .map(|&s| ((s as f64 * f).ceil() as usize).min(s))
        .collect();
    let rem: Vec<f64> = sizes.iter().map(|&s| s as f64 * f - (s as f64 * f).floor()).collect();
    let mut assigned: usize = counts.iter().sum();
    while assigned < total {
        let pick = (0..sizes.len())
            .filter(|&c| counts[c] < caps[c])
            .min_by(|&a, &b| {
                counts[a]
                    .cmp(&counts[b])
                    .then(rem[b].total_cmp(&rem[a]))
                    .then(a.cmp(&b))
            });
        match pick {
            Some(c) => {
                counts[c] += 1;
                assigned += 1;
            }
            None => break,
        }
    }
    counts
}

/// Splits row indices into `(train, test)` for the given labels.
///
/// `classes` is the class universe; with stratification on, a class without
/// rows is an error. Both index lists come out in seeded shuffled order.
pub fn split_indices(
    labels: &[String],
    classes: &[String],
    spec: &SplitSpec,
) -> Result<(Vec<usize>, Vec<usize>), HarnessError> {
    if !(spec.test_fraction > 0.0 && spec.test_fraction < 1.0) {
        return Err(HarnessError::InvalidFraction(spec.test_fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    if spec.stratified {
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
        for (i, l) in labels.iter().enumerate() {
            let c = classes
                .iter()
                .position(|k| k == l)
                .ok_or_else(|| HarnessError::UnknownLabel(l.clone()))?;
            members[c].push(i);
        }
        if let Some(c) = members.iter().position(Vec::is_empty) {
            return Err(HarnessError::EmptyClass(classes[c].clone()));
        }
        let sizes: Vec<usize> = members.iter().map(Vec::len).collect();
        let counts = stratified_counts(&sizes, spec.test_fraction);
        for (mut idx, t) in members.into_iter().zip(counts) {
            idx.shuffle(&mut rng);
            test.extend_from_slice(&idx[..t]);
            train.extend_from_slice(&idx[t..]);
        }
    } else {
        let n = labels.len();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let t = ((n as f64 * spec.test_fraction).ceil() as usize).min(n);
        test.extend_from_slice(&idx[..t]);
        train.extend_from_slice(&idx[t..]);
    }
    train.shuffle(&mut rng);
    test.shuffle(&mut rng);
    Ok((train, test))
}

/// Splits a matrix into `(train, test)` using its own labels as the class set.
pub fn split_dataset(
    m: &LabeledFeatureMatrix,
    spec: &SplitSpec,
) -> Result<(LabeledFeatureMatrix, LabeledFeatureMatrix), HarnessError> {
    let (train, test) = split_indices(m.labels(), &m.classes(), spec)?;
    Ok((m.select_rows(&train), m.select_rows(&test)))
}
