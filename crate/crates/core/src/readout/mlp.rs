//! Dense layers, the two-MLP sum-pooled model, and its backward pass.

use rand::Rng;
use serde::{Deserialize, Serialize};

/// Fully connected layer; `weights` is `outputs x inputs`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    /// Xavier-uniform weights, zero bias.
    pub fn xavier<R: Rng>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let limit = (6.0 / (inputs + outputs).max(1) as f64).sqrt();
        let weights = (0..inputs * outputs)
            .map(|_| rng.gen_range(-limit..=limit))
            .collect();
        Self {
            inputs,
            outputs,
            weights,
            bias: vec![0.0; outputs],
        }
    }

    fn forward(&self, x: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.bias.iter().enumerate().map(|(o, b)| {
            let row = &self.weights[o * self.inputs..(o + 1) * self.inputs];
            b + row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>()
        }));
    }

    /// Adds the parameter gradient for input `x` and output gradient `delta`
    /// into `grad` (weights, then bias).
    fn accumulate(&self, x: &[f64], delta: &[f64], grad: &mut [f64]) {
        let (gw, gb) = grad.split_at_mut(self.weights.len());
        for (o, &d) in delta.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            gb[o] += d;
            let row = &mut gw[o * self.inputs..(o + 1) * self.inputs];
            row.iter_mut().zip(x).for_each(|(g, xi)| *g += d * xi);
        }
    }

    /// Like [`Dense::accumulate`], also returning the gradient with respect
    /// to `x`.
    fn backward(&self, x: &[f64], delta: &[f64], grad: &mut [f64]) -> Vec<f64> {
        let (gw, gb) = grad.split_at_mut(self.weights.len());
        let mut dx = vec![0.0; self.inputs];
        for (o, &d) in delta.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            gb[o] += d;
            let row = o * self.inputs;
            for i in 0..self.inputs {
                gw[row + i] += d * x[i];
                dx[i] += d * self.weights[row + i];
            }
        }
        dx
    }

    pub fn param_count(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Layers with ReLU between them and a linear output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

impl Mlp {
    /// `sizes = [input, hidden..., output]`.
    pub fn xavier<R: Rng>(sizes: &[usize], rng: &mut R) -> Self {
        Self {
            layers: sizes.windows(2).map(|w| Dense::xavier(w[0], w[1], rng)).collect(),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.layers.first().map_or(0, |l| l.inputs)
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().map_or(0, |l| l.outputs)
    }

    /// Returns every layer input plus the final output.
    fn forward_trace(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut trace = Vec::with_capacity(self.layers.len() + 1);
        trace.push(x.to_vec());
        for (i, layer) in self.layers.iter().enumerate() {
            let mut out = Vec::new();
            layer.forward(trace.last().expect("nonempty"), &mut out);
            if i + 1 < self.layers.len() {
                out.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            trace.push(out);
        }
        trace
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        self.forward_trace(x).pop().expect("nonempty")
    }

    fn backward(&self, trace: &[Vec<f64>], delta_out: &[f64], grad: &mut [f64]) -> Vec<f64> {
        let mut offsets = Vec::with_capacity(self.layers.len());
        let mut at = 0;
        for l in &self.layers {
            offsets.push(at);
            at += l.param_count();
        }
        let mut delta = delta_out.to_vec();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let g = &mut grad[offsets[i]..offsets[i] + layer.param_count()];
            let mut dx = layer.backward(&trace[i], &delta, g);
            if i > 0 {
                // trace[i] is the ReLU output of layer i - 1
                dx.iter_mut()
                    .zip(&trace[i])
                    .for_each(|(d, &a)| if a <= 0.0 { *d = 0.0 });
            }
            delta = dx;
        }
        delta
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(Dense::param_count).sum()
    }

    fn write_params(&self, out: &mut Vec<f64>) {
        for l in &self.layers {
            out.extend_from_slice(&l.weights);
            out.extend_from_slice(&l.bias);
        }
    }

    fn read_params(&mut self, mut flat: &[f64]) -> usize {
        let mut used = 0;
        for l in &mut self.layers {
            let (w, rest) = flat.split_at(l.weights.len());
            l.weights.copy_from_slice(w);
            let (b, rest) = rest.split_at(l.bias.len());
            l.bias.copy_from_slice(b);
            flat = rest;
            used += l.param_count();
        }
        used
    }
}

/// `psi(sum_v phi(x_v))` followed by softmax.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadoutModel {
    pub phi: Mlp,
    pub psi: Mlp,
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

impl ReadoutModel {
    /// `phi: input -> width (x hidden_layers) -> width`,
    /// `psi: width -> width (x hidden_layers) -> classes`.
    pub fn new<R: Rng>(input: usize, width: usize, classes: usize, hidden_layers: usize, rng: &mut R) -> Self {
        let mut phi_sizes = vec![input];
        phi_sizes.extend(std::iter::repeat_n(width, hidden_layers + 1));
        let mut psi_sizes = vec![width; hidden_layers + 1];
        psi_sizes.push(classes);
        Self {
            phi: Mlp::xavier(&phi_sizes, rng),
            psi: Mlp::xavier(&psi_sizes, rng),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.phi.input_dim()
    }

    pub fn classes(&self) -> usize {
        self.psi.output_dim()
    }

    pub fn param_count(&self) -> usize {
        self.phi.param_count() + self.psi.param_count()
    }

    /// All parameters, `phi` then `psi`, each layer's weights then bias.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        self.phi.write_params(&mut out);
        self.psi.write_params(&mut out);
        out
    }

    pub fn set_params(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.param_count(), "parameter vector length");
        let used = self.phi.read_params(flat);
        self.psi.read_params(&flat[used..]);
    }

    /// Sum of `phi` over rows (each of length `input_dim`).
    pub fn pooled<'a>(&self, rows: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
        self.phi_pass(rows).pooled
    }

    pub fn logits<'a>(&self, rows: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
        self.psi.forward(&self.pooled(rows))
    }

    /// Runs `phi` over every row. Rows are visited in lexicographic order so
    /// the floating-point sum does not depend on how the caller ordered
    /// them. Because the last layer of `phi` is linear, it is applied once
    /// to the summed last-layer inputs instead of once per row.
    fn phi_pass<'a>(&self, rows: impl Iterator<Item = &'a [f64]>) -> PhiPass<'a> {
        let mut rows: Vec<&[f64]> = rows.collect();
        rows.sort_by(|a, b| {
            a.iter()
                .zip(*b)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let layers = &self.phi.layers;
        let (last, hidden_layers) = layers.split_last().expect("phi has a layer");
        let hidden_width: usize = hidden_layers.iter().map(|l| l.outputs).sum();
        let mut hidden = vec![0.0; rows.len() * hidden_width];
        let mut summed = vec![0.0; last.inputs];
        let mut buf = Vec::new();
        for (v, row) in rows.iter().enumerate() {
            let acts = &mut hidden[v * hidden_width..(v + 1) * hidden_width];
            let mut at = 0;
            for (l, layer) in hidden_layers.iter().enumerate() {
                let (done, rest) = acts.split_at_mut(at);
                let input: &[f64] = if l == 0 { row } else { &done[at - hidden_layers[l - 1].outputs..] };
                layer.forward(input, &mut buf);
                for (dst, &z) in rest[..layer.outputs].iter_mut().zip(&buf) {
                    *dst = z.max(0.0);
                }
                at += layer.outputs;
            }
            let last_input: &[f64] = if hidden_layers.is_empty() { row } else { &acts[at - last.inputs..] };
            summed.iter_mut().zip(last_input).for_each(|(s, x)| *s += x);
        }
        let n = rows.len() as f64;
        let pooled = last
            .bias
            .iter()
            .enumerate()
            .map(|(o, b)| {
                let w = &last.weights[o * last.inputs..(o + 1) * last.inputs];
                n * b + w.iter().zip(&summed).map(|(wi, si)| wi * si).sum::<f64>()
            })
            .collect();
        PhiPass {
            rows,
            hidden,
            hidden_width,
            summed,
            pooled,
        }
    }

    /// Cross-entropy of one graph; adds its parameter gradient, scaled by
    /// `scale`, into `grad`.
    pub fn loss_and_grad<'a>(
        &self,
        rows: impl Iterator<Item = &'a [f64]>,
        label: usize,
        scale: f64,
        grad: &mut [f64],
    ) -> f64 {
        let pass = self.phi_pass(rows);
        let psi_trace = self.psi.forward_trace(&pass.pooled);
        let p = softmax(psi_trace.last().expect("nonempty"));
        let loss = -p[label].max(f64::MIN_POSITIVE).ln();

        let delta: Vec<f64> = p
            .iter()
            .enumerate()
            .map(|(c, &pc)| scale * (pc - f64::from(u8::from(c == label))))
            .collect();
        let (g_phi, g_psi) = grad.split_at_mut(self.phi.param_count());
        let d_pooled = self.psi.backward(&psi_trace, &delta, g_psi);

        let layers = &self.phi.layers;
        let (last, hidden_layers) = layers.split_last().expect("phi has a layer");
        let mut offsets = Vec::with_capacity(layers.len());
        let mut at = 0;
        for l in layers {
            offsets.push(at);
            at += l.param_count();
        }
        let n = pass.rows.len() as f64;
        let g_last = &mut g_phi[offsets[layers.len() - 1]..];
        let (gw, gb) = g_last.split_at_mut(last.weights.len());
        let mut d_last_input = vec![0.0; last.inputs];
        for (o, &d) in d_pooled.iter().enumerate() {
            gb[o] += n * d;
            let row = o * last.inputs;
            for i in 0..last.inputs {
                gw[row + i] += d * pass.summed[i];
                d_last_input[i] += d * last.weights[row + i];
            }
        }
        if hidden_layers.is_empty() {
            return loss;
        }

        let mut starts = Vec::with_capacity(hidden_layers.len());
        let mut acc = 0;
        for l in hidden_layers {
            starts.push(acc);
            acc += l.outputs;
        }
        for (v, row) in pass.rows.iter().enumerate() {
            let acts = &pass.hidden[v * pass.hidden_width..(v + 1) * pass.hidden_width];
            let mut delta = d_last_input.clone();
            for l in (0..hidden_layers.len()).rev() {
                let layer = &hidden_layers[l];
                let out = &acts[starts[l]..starts[l] + layer.outputs];
                delta.iter_mut().zip(out).for_each(|(d, &a)| if a <= 0.0 { *d = 0.0 });
                let input: &[f64] = if l == 0 { row } else { &acts[starts[l - 1]..starts[l]] };
                let g = &mut g_phi[offsets[l]..offsets[l] + layer.param_count()];
                if l == 0 {
                    layer.accumulate(input, &delta, g);
                } else {
                    delta = layer.backward(input, &delta, g);
                }
            }
        }
        loss
    }
}

struct PhiPass<'a> {
    rows: Vec<&'a [f64]>,
    /// Hidden activations of every row, `hidden_width` per row.
    hidden: Vec<f64>,
    hidden_width: usize,
    /// Sum over rows of the last layer's input.
    summed: Vec<f64>,
    pooled: Vec<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng;

    #[test]
    fn params_round_trip() {
        let m = ReadoutModel::new(3, 4, 2, 1, &mut rng(0));
        let mut copy = ReadoutModel::new(3, 4, 2, 1, &mut rng(1));
        copy.set_params(&m.params());
        assert_eq!(copy, m);
        // 3*4+4 + 4*4+4 + 4*4+4 + 4*2+2
        assert_eq!(m.param_count(), 16 + 20 + 20 + 10);
    }

    #[test]
    fn zero_model_gradient_is_closed_form() {
        // all-zero weights: uniform softmax, so only the output bias sees a
        // gradient, equal to p - onehot
        let mut m = ReadoutModel::new(2, 3, 4, 1, &mut rng(0));
        let zeros = vec![0.0; m.param_count()];
        m.set_params(&zeros);
        let rows = [vec![1.0, 2.0], vec![-1.0, 0.5]];
        let mut grad = vec![0.0; m.param_count()];
        let loss = m.loss_and_grad(rows.iter().map(Vec::as_slice), 1, 1.0, &mut grad);
        assert!((loss - 4f64.ln()).abs() < 1e-15);
        let bias = &grad[grad.len() - 4..];
        assert_eq!(bias, &[0.25, -0.75, 0.25, 0.25]);
        assert!(grad[..grad.len() - 4].iter().all(|&g| g == 0.0));
    }
}
