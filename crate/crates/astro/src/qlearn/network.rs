//! The feed-forward network and its gradient-descent training step.
//!
//! Training uses semi-gradient Q-learning targets: for every transition the
//! target of the taken action is `reward + discount * max_a Q(next, a)`,
//! computed once with the pre-step network and then held fixed while the
//! loss gradient is taken. [`compute_targets`], [`loss_with_targets`] and
//! [`gradients_with_targets`] are public so tests can check the analytic
//! gradients against finite differences of the very same frozen-target loss.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Fully connected feed-forward network with rectified-linear hidden layers
/// and an identity output layer, one output per action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    /// Neuron counts from input to output; at least two entries.
    pub layer_sizes: Vec<usize>,
    /// One row-major `out × in` matrix per consecutive layer pair.
    pub weights: Vec<Vec<f64>>,
    /// One bias vector per consecutive layer pair, length `out`.
    pub biases: Vec<Vec<f64>>,
}

fn validate_sizes(layer_sizes: &[usize]) -> Result<()> {
    if layer_sizes.len() < 2 {
        return Err(Error::Shape(format!(
            "a network needs an input and an output layer, got sizes {layer_sizes:?}"
        )));
    }
    if layer_sizes.iter().any(|&s| s == 0) {
        return Err(Error::Shape(format!("zero-sized layer in {layer_sizes:?}")));
    }
    Ok(())
}

impl Network {
    /// A network of the given shape with every weight and bias set to zero.
    pub fn zeroed(layer_sizes: &[usize]) -> Result<Self> {
        validate_sizes(layer_sizes)?;
        let weights = layer_sizes
            .windows(2)
            .map(|w| vec![0.0; w[0] * w[1]])
            .collect();
        let biases = layer_sizes.windows(2).map(|w| vec![0.0; w[1]]).collect();
        Ok(Network {
            layer_sizes: layer_sizes.to_vec(),
            weights,
            biases,
        })
    }

    pub fn input_size(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_size(&self) -> usize {
        *self.layer_sizes.last().expect("validated: at least 2 layers")
    }

    /// Total number of weights and biases.
    pub fn n_parameters(&self) -> usize {
        self.layer_sizes
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }

    /// Checks that a deserialized network is internally consistent.
    pub fn validate(&self) -> Result<()> {
        validate_sizes(&self.layer_sizes)?;
        for (l, pair) in self.layer_sizes.windows(2).enumerate() {
            let (n_in, n_out) = (pair[0], pair[1]);
            if self.weights.get(l).map(Vec::len) != Some(n_in * n_out)
                || self.biases.get(l).map(Vec::len) != Some(n_out)
            {
                return Err(Error::Shape(format!(
                    "layer {l}: expected {n_out}x{n_in} weights and {n_out} biases"
                )));
            }
        }
        if self.weights.len() != self.layer_sizes.len() - 1 {
            return Err(Error::Shape("stray weight matrices".into()));
        }
        Ok(())
    }

    /// Predicts one Q-value per action for the given input.
    pub fn forward(&self, input: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward_cached(input)?.post.pop().expect("≥1 layer"))
    }

    /// Forward pass keeping per-layer pre- and post-activation values
    /// (needed by back-propagation).
    fn forward_cached(&self, input: &[f64]) -> Result<Activations> {
        if input.len() != self.input_size() {
            return Err(Error::Shape(format!(
                "input length {} does not match input layer size {}",
                input.len(),
                self.input_size()
            )));
        }
        let n_layers = self.weights.len();
        let mut pre = Vec::with_capacity(n_layers);
        let mut post = Vec::with_capacity(n_layers);
        let mut x: Vec<f64> = input.to_vec();
        for l in 0..n_layers {
            let n_in = self.layer_sizes[l];
            let mut z = self.biases[l].clone();
            for (o, zo) in z.iter_mut().enumerate() {
                let row = &self.weights[l][o * n_in..(o + 1) * n_in];
                *zo += row.iter().zip(&x).map(|(w, xi)| w * xi).sum::<f64>();
            }
            let a: Vec<f64> = if l + 1 < n_layers {
                z.iter().map(|&v| v.max(0.0)).collect()
            } else {
                z.clone()
            };
            pre.push(z);
            x = a.clone();
            post.push(a);
        }
        Ok(Activations {
            input: input.to_vec(),
            pre,
            post,
        })
    }

    fn apply_step(&mut self, grad_w: &[Vec<f64>], grad_b: &[Vec<f64>], learning_rate: f64) {
        for (w, g) in self.weights.iter_mut().zip(grad_w) {
            for (wi, gi) in w.iter_mut().zip(g) {
                *wi -= learning_rate * gi;
            }
        }
        for (b, g) in self.biases.iter_mut().zip(grad_b) {
            for (bi, gi) in b.iter_mut().zip(g) {
                *bi -= learning_rate * gi;
            }
        }
    }
}

struct Activations {
    input: Vec<f64>,
    /// Pre-activation value of each layer.
    pre: Vec<Vec<f64>>,
    /// Post-activation value of each layer; last entry is the output.
    post: Vec<Vec<f64>>,
}

/// Initializes a network with uniform weights in ±√(6 / (fan_in + fan_out))
/// and zero biases. The same seed always produces the same network.
pub fn nn_init(layer_sizes: &[usize], seed: u64) -> Result<Network> {
    validate_sizes(layer_sizes)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut weights = Vec::new();
    let mut biases = Vec::new();
    for pair in layer_sizes.windows(2) {
        let (n_in, n_out) = (pair[0], pair[1]);
        let limit = (6.0 / (n_in + n_out) as f64).sqrt();
        weights.push(
            (0..n_in * n_out)
                .map(|_| rng.random_range(-limit..limit))
                .collect(),
        );
        biases.push(vec![0.0; n_out]);
    }
    Ok(Network {
        layer_sizes: layer_sizes.to_vec(),
        weights,
        biases,
    })
}

/// One already-encoded training transition.
///
/// `next_input` is `None` at the end of an episode, in which case the target
/// is the bare reward.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub input: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_input: Option<Vec<f64>>,
}

/// Bootstrapped target per transition: `reward + discount * max_a Q(next, a)`,
/// evaluated with the current network.
pub fn compute_targets(net: &Network, batch: &[Transition], discount: f64) -> Result<Vec<f64>> {
    batch
        .iter()
        .map(|t| {
            let bootstrap = match &t.next_input {
                Some(next) => {
                    let q = net.forward(next)?;
                    discount * q.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                }
                None => 0.0,
            };
            Ok(t.reward + bootstrap)
        })
        .collect()
}

/// Mean squared error of the taken actions against fixed targets.
pub fn loss_with_targets(net: &Network, batch: &[Transition], targets: &[f64]) -> Result<f64> {
    check_batch(net, batch, targets)?;
    let mut sum = 0.0;
    for (t, &target) in batch.iter().zip(targets) {
        let q = net.forward(&t.input)?;
        sum += (q[t.action] - target).powi(2);
    }
    Ok(sum / batch.len() as f64)
}

/// Analytic gradient of [`loss_with_targets`] with respect to every weight
/// and bias, in the same shapes as `net.weights` / `net.biases`.
pub fn gradients_with_targets(
    net: &Network,
    batch: &[Transition],
    targets: &[f64],
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    check_batch(net, batch, targets)?;
    let mut grad_w: Vec<Vec<f64>> = net.weights.iter().map(|w| vec![0.0; w.len()]).collect();
    let mut grad_b: Vec<Vec<f64>> = net.biases.iter().map(|b| vec![0.0; b.len()]).collect();
    let scale = 1.0 / batch.len() as f64;
    let n_layers = net.weights.len();

    for (t, &target) in batch.iter().zip(targets) {
        let acts = net.forward_cached(&t.input)?;
        let q = acts.post.last().expect("≥1 layer");

        // Only the taken action contributes to the loss.
        let mut delta = vec![0.0; net.output_size()];
        delta[t.action] = 2.0 * (q[t.action] - target) * scale;

        for l in (0..n_layers).rev() {
            let n_in = net.layer_sizes[l];
            let x = if l == 0 { &acts.input } else { &acts.post[l - 1] };
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                grad_b[l][o] += d;
                let row = &mut grad_w[l][o * n_in..(o + 1) * n_in];
                for (g, xi) in row.iter_mut().zip(x) {
                    *g += d * xi;
                }
            }
            if l > 0 {
                // Push the error through the weights and the rectifier.
                let mut prev = vec![0.0; n_in];
                for (o, &d) in delta.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    let row = &net.weights[l][o * n_in..(o + 1) * n_in];
                    for (p, w) in prev.iter_mut().zip(row) {
                        *p += w * d;
                    }
                }
                for (p, &z) in prev.iter_mut().zip(&acts.pre[l - 1]) {
                    if z <= 0.0 {
                        *p = 0.0;
                    }
                }
                delta = prev;
            }
        }
    }
    Ok((grad_w, grad_b))
}

/// One semi-gradient descent step on a batch of encoded transitions.
/// Returns the loss measured before the step.
pub fn train_step_raw(
    net: &mut Network,
    batch: &[Transition],
    learning_rate: f64,
    discount: f64,
) -> Result<f64> {
    let targets = compute_targets(net, batch, discount)?;
    let loss = loss_with_targets(net, batch, &targets)?;
    let (grad_w, grad_b) = gradients_with_targets(net, batch, &targets)?;
    net.apply_step(&grad_w, &grad_b, learning_rate);
    Ok(loss)
}

fn check_batch(net: &Network, batch: &[Transition], targets: &[f64]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::EmptyBatch);
    }
    if targets.len() != batch.len() {
        return Err(Error::Shape(format!(
            "{} targets for a batch of {}",
            targets.len(),
            batch.len()
        )));
    }
    let n_actions = net.output_size();
    for t in batch {
        if t.action >= n_actions {
            return Err(Error::Shape(format!(
                "action {} out of range for {n_actions} outputs",
                t.action
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_batch(rng: &mut ChaCha8Rng, n: usize, n_in: usize, n_actions: usize) -> Vec<Transition> {
        (0..n)
            .map(|_| Transition {
                input: (0..n_in).map(|_| rng.random_range(-1.0..1.0)).collect(),
                action: rng.random_range(0..n_actions),
                reward: rng.random_range(-1.0..1.0),
                next_input: if rng.random::<f64>() < 0.8 {
                    Some((0..n_in).map(|_| rng.random_range(-1.0..1.0)).collect())
                } else {
                    None
                },
            })
            .collect()
    }

    /// Central finite differences of the frozen-target loss over every
    /// parameter; returns the worst guarded relative error vs the analytic
    /// gradient.
    fn max_fd_relative_error(net: &Network, batch: &[Transition], discount: f64) -> f64 {
        let targets = compute_targets(net, batch, discount).unwrap();
        let (grad_w, grad_b) = gradients_with_targets(net, batch, &targets).unwrap();
        let h = 1e-5;
        let mut worst = 0.0f64;
        let mut check = |analytic: f64, perturb: &dyn Fn(&mut Network, f64)| {
            let mut plus = net.clone();
            perturb(&mut plus, h);
            let mut minus = net.clone();
            perturb(&mut minus, -h);
            let fd = (loss_with_targets(&plus, batch, &targets).unwrap()
                - loss_with_targets(&minus, batch, &targets).unwrap())
                / (2.0 * h);
            // guard the denominator so finite-difference noise on a
            // near-zero gradient cannot blow up the ratio
            let rel = (fd - analytic).abs() / f64::max(fd.abs().max(analytic.abs()), 1e-4);
            worst = worst.max(rel);
        };
        for l in 0..net.weights.len() {
            for k in 0..net.weights[l].len() {
                check(grad_w[l][k], &move |n: &mut Network, eps: f64| {
                    n.weights[l][k] += eps
                });
            }
            for k in 0..net.biases[l].len() {
                check(grad_b[l][k], &move |n: &mut Network, eps: f64| {
                    n.biases[l][k] += eps
                });
            }
        }
        worst
    }

    #[test]
    fn parameter_count() {
        let net = nn_init(&[40, 32, 24], 7).unwrap();
        assert_eq!(net.n_parameters(), 40 * 32 + 32 + 32 * 24 + 24);
        assert_eq!(net.n_parameters(), 2104);
    }

    #[test]
    fn same_seed_same_network() {
        assert_eq!(nn_init(&[40, 32, 24], 7).unwrap(), nn_init(&[40, 32, 24], 7).unwrap());
        assert_ne!(nn_init(&[40, 32, 24], 7).unwrap(), nn_init(&[40, 32, 24], 8).unwrap());
    }

    #[test]
    fn init_respects_glorot_bounds() {
        let net = nn_init(&[10, 5], 1).unwrap();
        let limit = (6.0 / 15.0f64).sqrt();
        assert!(net.weights[0].iter().all(|w| w.abs() <= limit));
        assert!(net.biases[0].iter().all(|&b| b == 0.0));
    }

    #[test]
    fn bad_shapes_rejected() {
        assert!(nn_init(&[40], 0).is_err());
        assert!(nn_init(&[], 0).is_err());
        assert!(nn_init(&[4, 0, 2], 0).is_err());
    }

    #[test]
    fn zero_net_outputs_zero_and_biases_pass_through() {
        let mut net = Network::zeroed(&[3, 2, 2]).unwrap();
        assert_eq!(net.forward(&[1.0, -2.0, 3.0]).unwrap(), vec![0.0, 0.0]);
        net.biases[1] = vec![0.25, -1.5];
        assert_eq!(net.forward(&[1.0, -2.0, 3.0]).unwrap(), vec![0.25, -1.5]);
    }

    #[test]
    fn rectifier_blocks_negative_preactivation() {
        let mut net = Network::zeroed(&[1, 1, 1]).unwrap();
        net.weights[0] = vec![-1.0];
        net.weights[1] = vec![1.0];
        // positive input → negative hidden pre-activation → clamped to 0
        assert_eq!(net.forward(&[1.0]).unwrap(), vec![0.0]);
        // negative input passes through (identity output may go negative)
        net.weights[1] = vec![-3.0];
        assert_eq!(net.forward(&[-1.0]).unwrap(), vec![-3.0]);
    }

    #[test]
    fn forward_rejects_wrong_input_length() {
        let net = Network::zeroed(&[3, 2]).unwrap();
        assert!(matches!(net.forward(&[1.0]), Err(Error::Shape(_))));
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let net = nn_init(&[6, 4, 3], 11).unwrap();
        let batch = random_batch(&mut rng, 5, 6, 3);
        assert!(max_fd_relative_error(&net, &batch, 0.9) < 1e-4);
    }

    #[test]
    fn exact_predictions_mean_zero_loss_and_no_movement() {
        // With discount 0 the target is the bare reward; a network already
        // predicting it exactly has zero loss and zero gradient.
        let mut net = Network::zeroed(&[4, 3, 2]).unwrap();
        net.biases[1] = vec![0.3, 0.7];
        let batch = vec![
            Transition {
                input: vec![1.0, 0.0, 0.0, 0.0],
                action: 0,
                reward: 0.3,
                next_input: None,
            },
            Transition {
                input: vec![0.0, 1.0, 0.0, 0.0],
                action: 1,
                reward: 0.7,
                next_input: Some(vec![0.0, 0.0, 1.0, 0.0]),
            },
        ];
        let before = net.clone();
        let loss = train_step_raw(&mut net, &batch, 0.5, 0.0).unwrap();
        assert_eq!(loss, 0.0);
        assert_eq!(net, before);
    }

    #[test]
    fn repeated_steps_converge_to_the_reward() {
        let mut net = nn_init(&[5, 4, 2], 3).unwrap();
        let triple = Transition {
            input: vec![0.2, -0.4, 0.9, 0.0, 0.5],
            action: 1,
            reward: 0.7,
            next_input: None,
        };
        let batch = vec![triple.clone()];
        let mut converged_at = None;
        for step in 0..10_000 {
            train_step_raw(&mut net, &batch, 0.01, 0.0).unwrap();
            if (net.forward(&triple.input).unwrap()[1] - 0.7).abs() < 1e-3 {
                converged_at = Some(step);
                break;
            }
        }
        assert!(converged_at.is_some(), "no convergence within 10^4 steps");
    }

    #[test]
    fn training_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let batch = random_batch(&mut rng, 8, 6, 3);
        let mut a = nn_init(&[6, 5, 3], 21).unwrap();
        let mut b = nn_init(&[6, 5, 3], 21).unwrap();
        for _ in 0..50 {
            let la = train_step_raw(&mut a, &batch, 0.02, 0.9).unwrap();
            let lb = train_step_raw(&mut b, &batch, 0.02, 0.9).unwrap();
            assert_eq!(la, lb);
        }
        assert_eq!(a, b);
    }

    #[test]
    fn empty_batch_rejected() {
        let mut net = Network::zeroed(&[3, 2]).unwrap();
        assert!(matches!(
            train_step_raw(&mut net, &[], 0.1, 0.9),
            Err(Error::EmptyBatch)
        ));
    }
}
