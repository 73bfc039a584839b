//! Central finite-difference check of the analytic gradient. The numeric side
//! only ever evaluates the forward pass, in double-double arithmetic so that
//! loss round-off does not swamp small gradient components at `eps = 1e-6`.

use super::network::Network;
use crate::error::{check_len, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GradCheckReport {
    pub max_relative_error: f64,
    /// Index of the worst parameter.
    pub worst_index: usize,
    pub checked: usize,
    /// Coordinates skipped because `|analytic| + |numeric|` was negligible.
    pub exempt: usize,
}

/// Unevaluated sum `hi + lo` carrying about 106 significant bits.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn new(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn renorm(s: f64, e: f64) -> Dd {
        let hi = s + e;
        Dd { hi, lo: e - (hi - s) }
    }

    fn add(self, o: Dd) -> Dd {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (o.hi - bb);
        Dd::renorm(s, err + self.lo + o.lo)
    }

    fn sub(self, o: Dd) -> Dd {
        self.add(Dd { hi: -o.hi, lo: -o.lo })
    }

    fn scale(self, b: f64) -> Dd {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p);
        Dd::renorm(p, e + self.lo * b)
    }

    fn square(self) -> Dd {
        let p = self.hi * self.hi;
        let e = self.hi.mul_add(self.hi, -p);
        Dd::renorm(p, e + 2.0 * self.hi * self.lo)
    }

    fn relu(self) -> Dd {
        if self.hi > 0.0 {
            self
        } else {
            Dd::ZERO
        }
    }
}

/// Pre-activations `z[l]` (layer `l`'s input is `a[l]`) for one sample.
struct Trace {
    a: Vec<Vec<Dd>>,
    z: Vec<Vec<Dd>>,
}

fn unit(net: &Network, l: usize, j: usize, input: &[Dd]) -> Dd {
    let (_, n_in) = net.weight_shape(l);
    let w = &net.weights(l)[j * n_in..(j + 1) * n_in];
    w.iter().zip(input).fold(Dd::new(net.bias(l)[j]), |acc, (&w, &a)| acc.add(a.scale(w)))
}

/// Runs layers `from..` starting from pre-activations `z` of layer `from`'s
/// output; returns the network output.
fn finish(net: &Network, from: usize, mut z: Vec<Dd>) -> Dd {
    for l in from + 1..net.n_layers() {
        let a: Vec<Dd> = z.iter().map(|v| v.relu()).collect();
        z = (0..net.weight_shape(l).0).map(|j| unit(net, l, j, &a)).collect();
    }
    z[0]
}

fn trace(net: &Network, x: &[f64]) -> Trace {
    let mut a = vec![x.iter().map(|&v| Dd::new(v)).collect::<Vec<_>>()];
    let mut z = Vec::new();
    for l in 0..net.n_layers() {
        let zl: Vec<Dd> = (0..net.weight_shape(l).0).map(|j| unit(net, l, j, &a[l])).collect();
        a.push(zl.iter().map(|v| v.relu()).collect());
        z.push(zl);
    }
    Trace { a, z }
}

/// Output of `probe` when only row `j` of layer `l` differs from the traced
/// network: unit `j` is recomputed and its change pushed forward.
fn perturbed_output(probe: &Network, t: &Trace, l: usize, j: usize) -> Dd {
    let zj = unit(probe, l, j, &t.a[l]);
    let last = probe.n_layers() - 1;
    if l == last {
        return zj;
    }
    let delta = zj.relu().sub(t.a[l + 1][j]);
    let (n_out, n_in) = probe.weight_shape(l + 1);
    let w = probe.weights(l + 1);
    let z_next: Vec<Dd> = (0..n_out).map(|u| t.z[l + 1][u].add(delta.scale(w[u * n_in + j]))).collect();
    if l + 1 == last {
        z_next[0]
    } else {
        finish(probe, l + 1, z_next)
    }
}

/// `(layer, output row)` owning flat parameter `i`.
fn locate(net: &Network, mut i: usize) -> (usize, usize) {
    for l in 0..net.n_layers() {
        let (n_out, n_in) = net.weight_shape(l);
        if i < n_out * n_in {
            return (l, i / n_in);
        }
        i -= n_out * n_in;
        if i < n_out {
            return (l, i);
        }
        i -= n_out;
    }
    unreachable!("parameter index out of range")
}

/// Numeric gradient of the batch-mean squared error.
pub fn numerical_gradient<X: AsRef<[f64]>>(net: &Network, xs: &[X], ys: &[f64], eps: f64) -> Result<Vec<f64>> {
    check_len(xs.len(), ys.len())?;
    for x in xs {
        check_len(net.n_inputs(), x.as_ref().len())?;
    }
    let traces: Vec<Trace> = xs.iter().map(|x| trace(net, x.as_ref())).collect();
    let mut probe = net.clone();
    let mut out = Vec::with_capacity(net.params().len());
    for i in 0..net.params().len() {
        let (l, j) = locate(net, i);
        let orig = probe.params()[i];
        let sse = |probe: &Network| {
            traces.iter().zip(ys).fold(Dd::ZERO, |acc, (t, &y)| {
                acc.add(perturbed_output(probe, t, l, j).sub(Dd::new(y)).square())
            })
        };
        let up = orig + eps;
        probe.params_mut()[i] = up;
        let plus = sse(&probe);
        let down = orig - eps;
        probe.params_mut()[i] = down;
        let minus = sse(&probe);
        probe.params_mut()[i] = orig;
        // the realized step, not the nominal 2·eps
        let step = Dd::new(up).sub(Dd::new(down));
        out.push(plus.sub(minus).hi / xs.len() as f64 / step.hi);
    }
    Ok(out)
}

/// Relative error `|a - n| / max(|a|, |n|)` per coordinate, ignoring those
/// where `|a| + |n| < floor`.
pub fn compare(analytic: &[f64], numeric: &[f64], floor: f64) -> GradCheckReport {
    let mut report = GradCheckReport {
        max_relative_error: 0.0,
        worst_index: 0,
        checked: 0,
        exempt: 0,
    };
    for (i, (a, n)) in analytic.iter().zip(numeric).enumerate() {
        if a.abs() + n.abs() < floor {
            report.exempt += 1;
            continue;
        }
        report.checked += 1;
        let rel = (a - n).abs() / a.abs().max(n.abs());
        if rel > report.max_relative_error {
            report.max_relative_error = rel;
            report.worst_index = i;
        }
    }
    report
}

pub fn check_gradients<X: AsRef<[f64]>>(net: &Network, xs: &[X], ys: &[f64], eps: f64) -> Result<GradCheckReport> {
    let analytic = net.backward(xs, ys)?;
    let numeric = numerical_gradient(net, xs, ys, eps)?;
    Ok(compare(&analytic.values, &numeric, 1e-8))
}
