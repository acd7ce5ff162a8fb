//! Independent reference implementations used by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CROSS: [[u8; 3]; 3] = [[0, 1, 0], [1, 1, 1], [0, 1, 0]];
pub const SQUARE: [[u8; 3]; 3] = [[1, 1, 1], [1, 1, 1], [1, 1, 1]];

fn mask_at(mask: &[[u8; 3]; 3], dr: isize, dc: isize) -> f64 {
    if (-1..=1).contains(&dr) && (-1..=1).contains(&dc) {
        f64::from(mask[(dr + 1) as usize][(dc + 1) as usize])
    } else {
        0.0
    }
}

/// Straight from the lattice definitions, looping over every grid pixel `v`:
/// dilation `sup_v f(v) ∧ g(u - v)`, erosion `inf_v f(v) ∨ (1 - g(v - u))`.
pub fn naive_dilate(f: &[f64], w: usize, h: usize, mask: &[[u8; 3]; 3]) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    for ur in 0..h as isize {
        for uc in 0..w as isize {
            let mut acc: f64 = 0.0;
            for vr in 0..h as isize {
                for vc in 0..w as isize {
                    let fv = f[(vr * w as isize + vc) as usize];
                    acc = acc.max(fv.min(mask_at(mask, ur - vr, uc - vc)));
                }
            }
            out[(ur * w as isize + uc) as usize] = acc;
        }
    }
    out
}

pub fn naive_erode(f: &[f64], w: usize, h: usize, mask: &[[u8; 3]; 3]) -> Vec<f64> {
    let mut out = vec![0.0; w * h];
    for ur in 0..h as isize {
        for uc in 0..w as isize {
            let mut acc: f64 = 1.0;
            for vr in 0..h as isize {
                for vc in 0..w as isize {
                    let fv = f[(vr * w as isize + vc) as usize];
                    acc = acc.min(fv.max(1.0 - mask_at(mask, vr - ur, vc - uc)));
                }
            }
            out[(ur * w as isize + uc) as usize] = acc;
        }
    }
    out
}

pub fn naive_open(f: &[f64], w: usize, h: usize, mask: &[[u8; 3]; 3]) -> Vec<f64> {
    naive_dilate(&naive_erode(f, w, h, mask), w, h, mask)
}

pub fn naive_close(f: &[f64], w: usize, h: usize, mask: &[[u8; 3]; 3]) -> Vec<f64> {
    naive_erode(&naive_dilate(f, w, h, mask), w, h, mask)
}

pub fn random_values(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

pub fn random_binary(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Vec<f64> {
    (0..n).map(|_| f64::from(u8::from(rng.random_bool(p)))).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sample covariance (n − 1) of row vectors.
pub fn covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len();
    let d = rows[0].len();
    let mut mean = vec![0.0; d];
    for r in rows {
        for j in 0..d {
            mean[j] += r[j] / n as f64;
        }
    }
    let mut c = vec![vec![0.0; d]; d];
    for r in rows {
        for i in 0..d {
            for j in 0..d {
                c[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
            }
        }
    }
    for row in &mut c {
        for v in row.iter_mut() {
            *v /= (n - 1) as f64;
        }
    }
    c
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

/// Test accuracy of the nearest class mean (Euclidean) fitted on the training rows.
pub fn nearest_centroid_accuracy(
    train: &[Vec<f64>],
    train_labels: &[String],
    test: &[Vec<f64>],
    test_labels: &[String],
) -> f64 {
    let mut classes: Vec<&String> = train_labels.iter().collect();
    classes.sort();
    classes.dedup();
    let d = train[0].len();
    let centroids: Vec<Vec<f64>> = classes
        .iter()
        .map(|c| {
            let members: Vec<&Vec<f64>> = train.iter().zip(train_labels).filter(|(_, l)| l == c).map(|(r, _)| r).collect();
            (0..d).map(|j| members.iter().map(|r| r[j]).sum::<f64>() / members.len() as f64).collect()
        })
        .collect();
    let hits = test
        .iter()
        .zip(test_labels)
        .filter(|(x, l)| {
            let best = centroids
                .iter()
                .enumerate()
                .map(|(i, c)| (i, c.iter().zip(x.iter()).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap()
                .0;
            classes[best] == *l
        })
        .count();
    hits as f64 / test.len() as f64
}
