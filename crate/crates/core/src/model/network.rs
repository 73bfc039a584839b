use rand_distr::{Distribution, Normal};

use crate::error::{check_len, Error, Result};
use crate::seed;

/// Fully connected ReLU stack with a single linear output unit.
///
/// Parameters live in one flat buffer. Layer `l` stores its weight matrix
/// row-major with shape `(layer_sizes[l + 1], layer_sizes[l])`, followed by
/// its bias vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layer_sizes: Vec<usize>,
    offsets: Vec<usize>,
    params: Vec<f64>,
}

/// Output of [`Network::forward`]: the prediction and every layer's
/// activations, input first.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardPass {
    pub prediction: f64,
    pub activations: Vec<Vec<f64>>,
}

/// Gradient of the batch loss, laid out exactly like the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub values: Vec<f64>,
    pub loss: f64,
}

fn layout(layer_sizes: &[usize]) -> Result<Vec<usize>> {
    if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
        return Err(Error::config(format!("invalid layer sizes {layer_sizes:?}")));
    }
    if *layer_sizes.last().unwrap() != 1 {
        return Err(Error::config("the output layer must have exactly one unit"));
    }
    let mut offsets = vec![0];
    for w in layer_sizes.windows(2) {
        let last = *offsets.last().unwrap();
        offsets.push(last + w[1] * w[0] + w[1]);
    }
    Ok(offsets)
}

/// He-initialized hidden weights (`N(0, 2 / fan_in)`), zero biases, and a
/// zero output layer so the untrained network predicts the (z-scored) mean.
pub fn init_params(layer_sizes: &[usize], seed: u64) -> Result<Network> {
    let mut net = Network::zeros(layer_sizes)?;
    let mut rng = seed::rng(seed);
    let hidden = net.n_layers() - 1;
    for (l, &fan_in) in layer_sizes.iter().enumerate().take(hidden) {
        let normal = Normal::new(0.0, (2.0 / fan_in as f64).sqrt()).expect("positive std");
        for w in net.weights_mut(l) {
            *w = normal.sample(&mut rng);
        }
    }
    Ok(net)
}

impl Network {
    pub fn zeros(layer_sizes: &[usize]) -> Result<Self> {
        let offsets = layout(layer_sizes)?;
        Ok(Network {
            layer_sizes: layer_sizes.to_vec(),
            params: vec![0.0; *offsets.last().unwrap()],
            offsets,
        })
    }

    pub fn from_params(layer_sizes: &[usize], params: Vec<f64>) -> Result<Self> {
        let offsets = layout(layer_sizes)?;
        check_len(*offsets.last().unwrap(), params.len())?;
        Ok(Network {
            layer_sizes: layer_sizes.to_vec(),
            offsets,
            params,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    /// Number of weight matrices.
    pub fn n_layers(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    pub fn n_inputs(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// `(rows, cols)` of layer `l`'s weight matrix.
    pub fn weight_shape(&self, l: usize) -> (usize, usize) {
        (self.layer_sizes[l + 1], self.layer_sizes[l])
    }

    fn weight_range(&self, l: usize) -> std::ops::Range<usize> {
        let (r, c) = self.weight_shape(l);
        self.offsets[l]..self.offsets[l] + r * c
    }

    fn bias_range(&self, l: usize) -> std::ops::Range<usize> {
        let end = self.weight_range(l).end;
        end..end + self.layer_sizes[l + 1]
    }

    pub fn weights(&self, l: usize) -> &[f64] {
        &self.params[self.weight_range(l)]
    }

    pub fn weights_mut(&mut self, l: usize) -> &mut [f64] {
        let r = self.weight_range(l);
        &mut self.params[r]
    }

    pub fn bias(&self, l: usize) -> &[f64] {
        &self.params[self.bias_range(l)]
    }

    pub fn bias_mut(&mut self, l: usize) -> &mut [f64] {
        let r = self.bias_range(l);
        &mut self.params[r]
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|p| p.is_finite())
    }

    pub fn forward(&self, x: &[f64]) -> Result<ForwardPass> {
        check_len(self.n_inputs(), x.len())?;
        let mut activations = self.scratch();
        let prediction = self.forward_into(x, &mut activations);
        Ok(ForwardPass { prediction, activations })
    }

    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(self.forward(x)?.prediction)
    }

    pub(crate) fn scratch(&self) -> Vec<Vec<f64>> {
        self.layer_sizes.iter().map(|&n| vec![0.0; n]).collect()
    }

    /// Unchecked forward pass into preallocated activation buffers.
    pub(crate) fn forward_into(&self, x: &[f64], acts: &mut [Vec<f64>]) -> f64 {
        acts[0].copy_from_slice(x);
        let last = self.n_layers() - 1;
        for l in 0..=last {
            let (rows, cols) = self.weight_shape(l);
            let w = self.weights(l);
            let b = self.bias(l);
            let (input, output) = acts.split_at_mut(l + 1);
            let input = &input[l];
            let output = &mut output[0];
            for i in 0..rows {
                let z = b[i] + dot(&w[i * cols..(i + 1) * cols], input);
                output[i] = if l == last { z } else { z.max(0.0) };
            }
        }
        acts[last + 1][0]
    }

    /// Analytic gradient of the batch-mean squared error.
    pub fn backward<X: AsRef<[f64]>>(&self, xs: &[X], ys: &[f64]) -> Result<Gradients> {
        if xs.is_empty() {
            return Err(Error::EmptyDataset);
        }
        check_len(xs.len(), ys.len())?;
        let mut flat = Vec::with_capacity(xs.len() * self.n_inputs());
        for x in xs {
            let x = x.as_ref();
            check_len(self.n_inputs(), x.len())?;
            flat.extend_from_slice(x);
        }
        let mut ws = BatchWorkspace::new(self, xs.len());
        let mut values = vec![0.0; self.params.len()];
        let sse = self.batch_gradient(&flat, ys, &mut ws, &mut values);
        Ok(Gradients {
            values,
            loss: sse / xs.len() as f64,
        })
    }

    /// Forward pass over a row-major batch; outputs land in the last
    /// activation buffer of `ws`.
    pub(crate) fn forward_batch(&self, x: &[f64], ws: &mut BatchWorkspace) {
        let rows = x.len() / self.n_inputs();
        ws.ensure(self, rows);
        ws.acts[0][..x.len()].copy_from_slice(x);
        let last = self.n_layers() - 1;
        for l in 0..=last {
            let (n_out, n_in) = self.weight_shape(l);
            let (input, output) = ws.acts.split_at_mut(l + 1);
            let input = &input[l][..rows * n_in];
            let output = &mut output[0][..rows * n_out];
            let bias = self.bias(l);
            for row in output.chunks_exact_mut(n_out) {
                row.copy_from_slice(bias);
            }
            // Z = A Wᵀ + b
            gemm(
                rows, n_in, n_out,
                input, (n_in, 1),
                self.weights(l), (1, n_in),
                output, 1.0,
            );
            if l != last {
                output.iter_mut().for_each(|z| *z = z.max(0.0));
            }
        }
    }

    /// Accumulates the gradient of the batch-mean squared error into `grad`
    /// and returns the batch sum of squared errors.
    pub(crate) fn batch_gradient(&self, x: &[f64], ys: &[f64], ws: &mut BatchWorkspace, grad: &mut [f64]) -> f64 {
        let rows = ys.len();
        let scale = 2.0 / rows as f64;
        let mut sse = 0.0;
        self.forward_batch(x, ws);
        let outputs = &ws.acts[self.n_layers()][..rows];
        ws.delta.clear();
        for (p, y) in outputs.iter().zip(ys) {
            let err = p - y;
            sse += err * err;
            ws.delta.push(scale * err);
        }
        for l in (0..self.n_layers()).rev() {
            let (n_out, n_in) = self.weight_shape(l);
            let input = &ws.acts[l][..rows * n_in];
            let w_range = self.weight_range(l);
            let b_range = self.bias_range(l);
            // dW += Δᵀ A
            gemm(
                n_out, rows, n_in,
                &ws.delta, (1, n_out),
                input, (n_in, 1),
                &mut grad[w_range.clone()], 1.0,
            );
            let gb = &mut grad[b_range];
            for d_row in ws.delta.chunks_exact(n_out) {
                for (g, d) in gb.iter_mut().zip(d_row) {
                    *g += d;
                }
            }
            if l == 0 {
                break;
            }
            // Δ_prev = (Δ W) ⊙ 1[a > 0]; an activation of exactly 0 passes nothing
            ws.delta_prev.clear();
            ws.delta_prev.resize(rows * n_in, 0.0);
            gemm(
                rows, n_out, n_in,
                &ws.delta, (n_out, 1),
                &self.params[w_range], (n_in, 1),
                &mut ws.delta_prev, 0.0,
            );
            for (d, a) in ws.delta_prev.iter_mut().zip(input) {
                if *a <= 0.0 {
                    *d = 0.0;
                }
            }
            std::mem::swap(&mut ws.delta, &mut ws.delta_prev);
        }
        sse
    }

    /// Batch-mean squared error, forward passes only.
    pub fn batch_loss<X: AsRef<[f64]>>(&self, xs: &[X], ys: &[f64]) -> Result<f64> {
        check_len(xs.len(), ys.len())?;
        let preds = xs
            .iter()
            .map(|x| self.predict(x.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        loss(&preds, ys)
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    // four accumulators so the loop vectorizes
    let mut acc = [0.0; 4];
    let chunks = a.len() / 4 * 4;
    for (ca, cb) in a[..chunks].chunks_exact(4).zip(b[..chunks].chunks_exact(4)) {
        for k in 0..4 {
            acc[k] += ca[k] * cb[k];
        }
    }
    let mut s = (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (x, y) in a[chunks..].iter().zip(&b[chunks..]) {
        s += x * y;
    }
    s
}

/// Reusable buffers for minibatch passes.
#[derive(Debug, Default)]
pub(crate) struct BatchWorkspace {
    acts: Vec<Vec<f64>>,
    delta: Vec<f64>,
    delta_prev: Vec<f64>,
}

impl BatchWorkspace {
    pub(crate) fn new(net: &Network, rows: usize) -> Self {
        let mut ws = BatchWorkspace::default();
        ws.ensure(net, rows);
        ws
    }

    fn ensure(&mut self, net: &Network, rows: usize) {
        let sizes = net.layer_sizes();
        if self.acts.len() != sizes.len() || self.acts[0].len() < rows * sizes[0] {
            self.acts = sizes.iter().map(|&n| vec![0.0; rows * n]).collect();
        }
    }
}

/// `C = A·B + beta·C` for an `m×k` times `k×n` product, operands addressed by
/// `(row_stride, col_stride)`, `C` row-major.
#[allow(clippy::too_many_arguments)]
fn gemm(
    m: usize,
    k: usize,
    n: usize,
    a: &[f64],
    (rsa, csa): (usize, usize),
    b: &[f64],
    (rsb, csb): (usize, usize),
    c: &mut [f64],
    beta: f64,
) {
    let span = |rows: usize, cols: usize, rs: usize, cs: usize| (rows - 1) * rs + (cols - 1) * cs + 1;
    assert!(a.len() >= span(m, k, rsa, csa));
    assert!(b.len() >= span(k, n, rsb, csb));
    assert!(c.len() >= m * n);
    // SAFETY: the assertions above keep every strided access inside the slices.
    unsafe {
        matrixmultiply::dgemm(
            m, k, n,
            1.0,
            a.as_ptr(), rsa as isize, csa as isize,
            b.as_ptr(), rsb as isize, csb as isize,
            beta,
            c.as_mut_ptr(), n as isize, 1,
        );
    }
}

/// Mean squared error.
pub fn loss(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    check_len(predictions.len(), targets.len())?;
    if predictions.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let sum: f64 = predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t) * (p - t))
        .sum();
    Ok(sum / predictions.len() as f64)
}
