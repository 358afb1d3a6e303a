use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::head::{argmax, Head, LOG_CLAMP};
use crate::error::{Error, Result};
use crate::fuse::FusedMatrix;
use crate::matrix::Matrix;
use crate::par::{self, Execution};

/// Rows of features with one class index per row.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub x: Matrix,
    pub y: Vec<usize>,
}

impl Dataset {
    pub fn new(x: Matrix, y: Vec<usize>) -> Result<Self> {
        if x.rows() != y.len() {
            return Err(Error::Shape {
                expected: x.rows(),
                actual: y.len(),
            });
        }
        Ok(Dataset { x, y })
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    fn check_for(&self, head: &Head) -> Result<()> {
        if self.is_empty() {
            return Err(Error::Size("dataset is empty".into()));
        }
        if self.x.cols() != head.config.input_dim {
            return Err(Error::Shape {
                expected: head.config.input_dim,
                actual: self.x.cols(),
            });
        }
        if let Some(&bad) = self.y.iter().find(|&&c| c >= head.config.class_count) {
            return Err(Error::Input(format!(
                "label {bad} outside 0..{}",
                head.config.class_count
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainTrace {
    pub epoch_losses: Vec<f64>,
    pub final_loss: f64,
    pub seed: u64,
    pub wall_time_secs: f64,
}

/// Mean cross-entropy over `rows` plus `(l2 / 2) * ||W||^2` (weights only).
/// Probabilities are clamped at 1e-12 before the log.
pub fn loss(head: &Head, data: &Dataset, rows: &[usize]) -> Result<f64> {
    data.check_for(head)?;
    if rows.is_empty() {
        return Err(Error::Size("loss over an empty batch".into()));
    }
    let mut ce = 0.0;
    for &r in rows {
        let p = head.forward(data.x.row(r))?;
        ce -= p[data.y[r]].max(LOG_CLAMP).ln();
    }
    Ok(ce / rows.len() as f64 + 0.5 * head.config.l2 * head.weight_norm_sq())
}

/// Loss over the whole dataset.
pub fn dataset_loss(head: &Head, data: &Dataset) -> Result<f64> {
    let all: Vec<usize> = (0..data.len()).collect();
    loss(head, data, &all)
}

/// Analytic gradient of [`loss`] in the layout of [`Head::parameters`].
pub fn gradient(head: &Head, data: &Dataset, rows: &[usize]) -> Result<Vec<f64>> {
    data.check_for(head)?;
    if rows.is_empty() {
        return Err(Error::Size("gradient over an empty batch".into()));
    }
    let n = rows.len() as f64;
    let mut grads: Vec<(Vec<f64>, Vec<f64>)> = head
        .layers
        .iter()
        .map(|l| {
            (
                vec![0.0; l.weights.as_slice().len()],
                vec![0.0; l.bias.len()],
            )
        })
        .collect();

    for &r in rows {
        let trace = head.trace(data.x.row(r));
        // d loss / d logits = (p - y) / n
        let mut delta: Vec<f64> = trace.probs.clone();
        delta[data.y[r]] -= 1.0;
        delta.iter_mut().for_each(|d| *d /= n);

        for k in (0..head.layers.len()).rev() {
            let input = &trace.inputs[k];
            let fan_out = delta.len();
            let (gw, gb) = &mut grads[k];
            for (i, &a) in input.iter().enumerate() {
                if a == 0.0 {
                    continue;
                }
                for (g, d) in gw[i * fan_out..(i + 1) * fan_out].iter_mut().zip(&delta) {
                    *g += a * d;
                }
            }
            for (g, d) in gb.iter_mut().zip(&delta) {
                *g += d;
            }
            if k == 0 {
                break;
            }
            let w = &head.layers[k].weights;
            let pre = &trace.pre[k - 1];
            delta = (0..w.rows())
                .map(|i| {
                    if pre[i] <= 0.0 {
                        0.0
                    } else {
                        w.row(i).iter().zip(&delta).map(|(a, b)| a * b).sum()
                    }
                })
                .collect();
        }
    }

    let l2 = head.config.l2;
    let mut flat = Vec::with_capacity(head.config.parameter_count());
    for (layer, (gw, gb)) in head.layers.iter().zip(grads) {
        flat.extend(
            gw.into_iter()
                .zip(layer.weights.as_slice())
                .map(|(g, w)| g + l2 * w),
        );
        flat.extend(gb);
    }
    Ok(flat)
}

/// Mini-batch SGD on the head's config. Each epoch reshuffles the rows with
/// a ChaCha8 stream seeded from `config.seed`; the epoch loss is the mean of
/// the batch losses seen before each update.
pub fn train(head: Head, data: &Dataset) -> Result<(Head, TrainTrace)> {
    data.check_for(&head)?;
    let mut head = head;
    let cfg = head.config;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed_5eed_5eed_5eed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        let mut batches = 0usize;
        for batch in order.chunks(cfg.batch_size) {
            let l = loss(&head, data, batch)?;
            let g = gradient(&head, data, batch)?;
            if !l.is_finite() || g.iter().any(|x| !x.is_finite()) {
                return Err(Error::Divergence {
                    epoch,
                    learning_rate: cfg.learning_rate,
                });
            }
            for (k, gk) in g.into_iter().enumerate() {
                *head.parameter_mut(k) -= cfg.learning_rate * gk;
            }
            total += l;
            batches += 1;
        }
        if !head.is_finite() {
            return Err(Error::Divergence {
                epoch,
                learning_rate: cfg.learning_rate,
            });
        }
        epoch_losses.push(total / batches as f64);
    }

    head.fitted = true;
    let final_loss = dataset_loss(&head, data)?;
    if !final_loss.is_finite() {
        return Err(Error::Divergence {
            epoch: cfg.epochs,
            learning_rate: cfg.learning_rate,
        });
    }
    Ok((
        head,
        TrainTrace {
            epoch_losses,
            final_loss,
            seed: cfg.seed,
            wall_time_secs: started.elapsed().as_secs_f64(),
        },
    ))
}

/// Largest relative difference between the analytic gradient and central
/// finite differences with step `h`, over every parameter.
///
/// Relative error is `|a - n| / max(|a|, |n|, 1e-8)`.
pub fn gradient_check(head: &Head, data: &Dataset, h: f64) -> Result<f64> {
    let rows: Vec<usize> = (0..data.len()).collect();
    let analytic = gradient(head, data, &rows)?;
    let mut probe = head.clone();
    let mut worst = 0.0f64;
    for (k, a) in analytic.iter().enumerate() {
        let orig = *probe.parameter_mut(k);
        *probe.parameter_mut(k) = orig + h;
        let plus = loss(&probe, data, &rows)?;
        *probe.parameter_mut(k) = orig - h;
        let minus = loss(&probe, data, &rows)?;
        *probe.parameter_mut(k) = orig;
        let numeric = (plus - minus) / (2.0 * h);
        let denom = a.abs().max(numeric.abs()).max(1e-8);
        worst = worst.max((a - numeric).abs() / denom);
    }
    Ok(worst)
}

fn require_fitted(head: &Head) -> Result<()> {
    if head.fitted {
        Ok(())
    } else {
        Err(Error::State("head is not trained".into()))
    }
}

/// Argmax class per row.
pub fn predict(head: &Head, rows: &Matrix) -> Result<Vec<usize>> {
    predict_with(head, rows, Execution::default())
}

pub fn predict_with(head: &Head, rows: &Matrix, exec: Execution) -> Result<Vec<usize>> {
    require_fitted(head)?;
    if rows.cols() != head.config.input_dim {
        return Err(Error::Shape {
            expected: head.config.input_dim,
            actual: rows.cols(),
        });
    }
    let idx: Vec<usize> = (0..rows.rows()).collect();
    par::try_map(&idx, exec, |&r| {
        head.logits(rows.row(r)).map(|z| argmax(&z))
    })
}

/// One tag index per token row of a fused matrix.
pub fn predict_tokens(head: &Head, fused: &FusedMatrix) -> Result<Vec<usize>> {
    predict(head, &fused.matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::head::{init_head, HeadConfig};

    fn one_point() -> Dataset {
        Dataset::new(
            Matrix::from_vec(1, 3, vec![0.5, -1.0, 2.0]).unwrap(),
            vec![1],
        )
        .unwrap()
    }

    #[test]
    fn perfect_prediction_zero_loss() {
        let cfg = HeadConfig {
            l2: 0.0,
            ..HeadConfig::new(1, 2)
        };
        let mut h = init_head(cfg).unwrap();
        h.layers[0].weights = Matrix::from_vec(1, 2, vec![0.0, 0.0]).unwrap();
        h.layers[0].bias = vec![-1000.0, 1000.0];
        let d = Dataset::new(Matrix::from_vec(1, 1, vec![1.0]).unwrap(), vec![1]).unwrap();
        assert_eq!(dataset_loss(&h, &d).unwrap(), 0.0);
    }

    #[test]
    fn uniform_loss_is_ln_c() {
        let cfg = HeadConfig {
            l2: 0.0,
            ..HeadConfig::new(3, 5)
        };
        let mut h = init_head(cfg).unwrap();
        h.layers[0].weights = Matrix::zeros(3, 5);
        let d = Dataset::new(Matrix::from_vec(2, 3, vec![1.0; 6]).unwrap(), vec![0, 4]).unwrap();
        assert!((dataset_loss(&h, &d).unwrap() - 5f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn overfit_one_point_decreases() {
        let h = init_head(HeadConfig::new(3, 2)).unwrap();
        let cfg = HeadConfig {
            epochs: 5,
            ..h.config
        };
        let h = Head { config: cfg, ..h };
        let (_, trace) = train(h, &one_point()).unwrap();
        assert_eq!(trace.epoch_losses.len(), 5);
        for w in trace.epoch_losses.windows(2) {
            assert!(w[1] < w[0], "{:?}", trace.epoch_losses);
        }
    }

    #[test]
    fn deterministic_training() {
        let cfg = HeadConfig {
            hidden_dim: 4,
            epochs: 3,
            batch_size: 2,
            seed: 5,
            ..HeadConfig::new(3, 2)
        };
        let x = Matrix::from_vec(4, 3, (0..12).map(|i| (i as f64).sin()).collect()).unwrap();
        let d = Dataset::new(x, vec![0, 1, 1, 0]).unwrap();
        let (a, _) = train(init_head(cfg).unwrap(), &d).unwrap();
        let (b, _) = train(init_head(cfg).unwrap(), &d).unwrap();
        assert_eq!(a.parameters(), b.parameters());
    }

    #[test]
    fn divergence_is_reported() {
        let cfg = HeadConfig {
            learning_rate: 1e300,
            l2: 1.0,
            ..HeadConfig::new(3, 2)
        };
        let err = train(init_head(cfg).unwrap(), &one_point()).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }));
    }

    #[test]
    fn unfitted_predict() {
        let h = init_head(HeadConfig::new(3, 2)).unwrap();
        assert!(matches!(predict(&h, &one_point().x), Err(Error::State(_))));
    }

    #[test]
    fn uniform_predicts_class_zero() {
        let mut h = init_head(HeadConfig::new(3, 3)).unwrap();
        h.layers[0].weights = Matrix::zeros(3, 3);
        h.fitted = true;
        assert_eq!(predict(&h, &one_point().x).unwrap(), vec![0]);
    }

    #[test]
    fn linear_gradient_is_outer_product() {
        let cfg = HeadConfig {
            l2: 0.0,
            ..HeadConfig::new(3, 2)
        };
        let h = init_head(cfg).unwrap();
        let d = one_point();
        let g = gradient(&h, &d, &[0]).unwrap();
        let p = h.forward(d.x.row(0)).unwrap();
        for i in 0..3 {
            for c in 0..2 {
                let y = if c == 1 { 1.0 } else { 0.0 };
                assert!((g[i * 2 + c] - (p[c] - y) * d.x.get(0, i)).abs() < 1e-12);
            }
        }
        assert!(gradient_check(&h, &d, 1e-5).unwrap() < 1e-4);
    }

    #[test]
    fn bad_labels_rejected() {
        let h = init_head(HeadConfig::new(3, 2)).unwrap();
        let d = Dataset::new(one_point().x, vec![2]).unwrap();
        assert!(matches!(train(h, &d), Err(Error::Input(_))));
    }
}
