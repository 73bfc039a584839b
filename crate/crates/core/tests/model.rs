use rand::Rng;
use rand_distr::{Distribution, Normal};
use smote_reg::dataset::{synth_benchmark, NanorodTarget};
use smote_reg::model::{check_gradients, compare, numerical_gradient, from_text, init_params, to_text, train, Network, TrainConfig, DEFAULT_LAYER_SIZES};
use smote_reg::seed;

/// He-scaled weights with nonzero biases, so no unit sits exactly on the
/// ReLU kink.
fn random_network(s: u64) -> Network {
    let mut net = init_params(&DEFAULT_LAYER_SIZES, s).unwrap();
    let mut rng = seed::rng(seed::derive(s, 1));
    let noise = Normal::new(0.0, 0.5).unwrap();
    for l in 0..net.n_layers() {
        net.bias_mut(l).iter_mut().for_each(|b| *b = noise.sample(&mut rng));
    }
    let (rows, cols) = net.weight_shape(net.n_layers() - 1);
    let out_scale = (2.0 / cols as f64).sqrt();
    for w in &mut net.weights_mut(net.n_layers() - 1)[..rows * cols] {
        *w = out_scale * noise.sample(&mut rng);
    }
    net
}

#[test]
fn analytic_gradients_match_finite_differences() {
    let start = std::time::Instant::now();
    for pair in 0..10u64 {
        let net = random_network(100 + pair);
        let mut rng = seed::rng(200 + pair);
        let batch = rng.random_range(1..=32);
        let xs: Vec<Vec<f64>> = (0..batch)
            .map(|_| (0..3).map(|_| rng.random_range(-2.0..2.0)).collect())
            .collect();
        let ys: Vec<f64> = (0..batch).map(|_| rng.random_range(-2.0..2.0)).collect();
        let report = check_gradients(&net, &xs, &ys, 1e-6).unwrap();
        assert!(report.max_relative_error < 1e-4, "pair {pair}: {report:?}");
        assert!(report.checked > 0);
    }
    assert!(start.elapsed().as_secs() < 30);
}

#[test]
fn check_catches_small_gradient_errors() {
    let net = random_network(7);
    let xs = [[0.5, -1.0, 1.5], [1.2, 0.3, -0.7], [-1.1, 0.8, 0.2]];
    let ys = [1.0, -0.5, 0.25];
    let mut analytic = net.backward(&xs, &ys).unwrap().values;
    let numeric = numerical_gradient(&net, &xs, &ys, 1e-6).unwrap();
    let i = analytic.iter().position(|g| g.abs() > 1e-3).unwrap();
    analytic[i] *= 1.001;
    let report = compare(&analytic, &numeric, 1e-8);
    assert_eq!(report.worst_index, i);
    assert!(report.max_relative_error > 1e-4);
}

#[test]
fn saved_model_predicts_identically() {
    let data = synth_benchmark(40, 3, NanorodTarget::AspectRatio).unwrap();
    let cfg = TrainConfig { epochs: 30, ..Default::default() };
    let (model, _) = train(&data, &cfg).unwrap();
    let text = to_text(&model);
    let back = from_text(&text).unwrap();
    assert_eq!(to_text(&back), text);
    let a = model.predict_dataset(&data).unwrap();
    let b = back.predict_dataset(&data).unwrap();
    assert!(a.iter().zip(&b).all(|(x, y)| x.to_bits() == y.to_bits()));
}

#[test]
fn training_reduces_loss_on_benchmark() {
    let data = synth_benchmark(60, 4, NanorodTarget::Length).unwrap();
    let (_, report) = train(&data, &TrainConfig { epochs: 200, ..Default::default() }).unwrap();
    let first = report.loss_history[0];
    let last = *report.loss_history.last().unwrap();
    assert!(last < 0.1 * first, "{first} -> {last}");
}
