//! Multinomial logistic regression trained by full-batch gradient descent.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticConfig {
    pub l2: f64,
    pub iterations: usize,
    pub learning_rate: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        Self {
            l2: 1e-3,
            iterations: 500,
            learning_rate: 0.1,
        }
    }
}

/// `weights[c]` holds the `d` feature weights of class `c` followed by its bias.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub classes: usize,
    pub dim: usize,
    pub weights: Vec<Vec<f64>>,
}

fn softmax_in_place(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    z.iter_mut().for_each(|v| *v /= sum);
}

impl LogisticModel {
    fn zeros(classes: usize, dim: usize) -> Self {
        Self {
            classes,
            dim,
            weights: vec![vec![0.0; dim + 1]; classes],
        }
    }

    pub fn probabilities(&self, x: &[f64]) -> Vec<f64> {
        let mut z: Vec<f64> = self
            .weights
            .iter()
            .map(|w| w[..self.dim].iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + w[self.dim])
            .collect();
        softmax_in_place(&mut z);
        z
    }

    pub fn predict(&self, x: &[f64]) -> usize {
        let p = self.probabilities(x);
        (0..self.classes)
            .max_by(|&a, &b| p[a].total_cmp(&p[b]).then(b.cmp(&a)))
            .expect("at least one class")
    }

    fn penalty(&self, l2: f64) -> f64 {
        let sq: f64 = self.weights.iter().flat_map(|w| &w[..self.dim]).map(|v| v * v).sum();
        0.5 * l2 * sq
    }

    /// Mean cross-entropy plus the L2 penalty, and its gradient.
    fn objective(&self, xs: &[Vec<f64>], ys: &[usize], l2: f64) -> (f64, Vec<Vec<f64>>) {
        let n = xs.len() as f64;
        let mut grad = vec![vec![0.0; self.dim + 1]; self.classes];
        let mut loss = 0.0;
        for (x, &y) in xs.iter().zip(ys) {
            let p = self.probabilities(x);
            loss -= p[y].max(f64::MIN_POSITIVE).ln();
            for (c, g) in grad.iter_mut().enumerate() {
                let r = p[c] - f64::from(u8::from(c == y));
                g[..self.dim].iter_mut().zip(x).for_each(|(gi, xi)| *gi += r * xi);
                g[self.dim] += r;
            }
        }
        for (g, w) in grad.iter_mut().zip(&self.weights) {
            for j in 0..=self.dim {
                g[j] /= n;
                if j < self.dim {
                    g[j] += l2 * w[j];
                }
            }
        }
        (loss / n + self.penalty(l2), grad)
    }

    fn loss(&self, xs: &[Vec<f64>], ys: &[usize], l2: f64) -> f64 {
        let n = xs.len() as f64;
        let ce: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, &y)| -self.probabilities(x)[y].max(f64::MIN_POSITIVE).ln())
            .sum();
        ce / n + self.penalty(l2)
    }
}

/// Fits on rows `xs` with labels in `0..classes`. Each step starts at the
/// configured rate and halves it until the Armijo condition holds.
pub fn fit(xs: &[Vec<f64>], ys: &[usize], classes: usize, cfg: &LogisticConfig) -> LogisticModel {
    let dim = xs.first().map_or(0, Vec::len);
    let mut model = LogisticModel::zeros(classes, dim);
    if xs.is_empty() {
        return model;
    }
    for _ in 0..cfg.iterations {
        let (loss, grad) = model.objective(xs, ys, cfg.l2);
        let g2: f64 = grad.iter().flatten().map(|g| g * g).sum();
        if g2 < 1e-24 {
            break;
        }
        let mut step = cfg.learning_rate;
        let mut accepted = false;
        for _ in 0..40 {
            let mut trial = model.clone();
            for (w, g) in trial.weights.iter_mut().zip(&grad) {
                w.iter_mut().zip(g).for_each(|(wi, gi)| *wi -= step * gi);
            }
            if trial.loss(xs, ys, cfg.l2) <= loss - 1e-4 * step * g2 {
                model = trial;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    model
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separable_points() {
        let xs: Vec<Vec<f64>> = (0..20).map(|i| vec![i as f64 - 9.5, 1.0]).collect();
        let ys: Vec<usize> = (0..20).map(|i| usize::from(i >= 10)).collect();
        let m = fit(&xs, &ys, 2, &LogisticConfig::default());
        for (x, &y) in xs.iter().zip(&ys) {
            assert_eq!(m.predict(x), y);
        }
    }

    #[test]
    fn objective_gradient_matches_differences() {
        let xs = vec![vec![0.3, -1.0], vec![1.2, 0.4], vec![-0.7, 0.9]];
        let ys = vec![0, 2, 1];
        let mut m = LogisticModel::zeros(3, 2);
        for (c, w) in m.weights.iter_mut().enumerate() {
            for (j, v) in w.iter_mut().enumerate() {
                *v = 0.1 * (c as f64 + 1.0) - 0.07 * j as f64;
            }
        }
        let (_, grad) = m.objective(&xs, &ys, 0.01);
        let h = 1e-6;
        for c in 0..3 {
            for j in 0..3 {
                let mut plus = m.clone();
                plus.weights[c][j] += h;
                let mut minus = m.clone();
                minus.weights[c][j] -= h;
                let fd = (plus.loss(&xs, &ys, 0.01) - minus.loss(&xs, &ys, 0.01)) / (2.0 * h);
                assert!((fd - grad[c][j]).abs() < 1e-8, "{c} {j}");
            }
        }
    }

    #[test]
    fn probabilities_sum_to_one() {
        let m = LogisticModel {
            classes: 3,
            dim: 1,
            weights: vec![vec![500.0, 0.0], vec![-500.0, 1.0], vec![0.0, 0.0]],
        };
        let p = m.probabilities(&[3.0]);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}
