//! Central finite-difference gradients, the reference against which
//! [`backward`](super::backward) is checked.

use super::lstm::{forward, loss, Gradients, LstmParameters};
use super::matrix::Matrix;
use super::NeuralError;

/// `(loss(θ + ε) − loss(θ − ε)) / 2ε` for every parameter θ.
pub fn finite_difference_gradients(
    params: &LstmParameters,
    sequence: &Matrix,
    target: &[f64],
    eps: f64,
) -> Result<Gradients, NeuralError> {
    let base = params.to_flat();
    let dims = params.dims();
    let mut probe = base.clone();
    let eval = |values: &[f64]| -> Result<f64, NeuralError> {
        let p = LstmParameters::from_flat(dims, values)?;
        Ok(loss(&forward(&p, sequence)?.prediction, target))
    };
    let mut grad = Vec::with_capacity(base.len());
    for k in 0..base.len() {
        probe[k] = base[k] + eps;
        let up = eval(&probe)?;
        probe[k] = base[k] - eps;
        let down = eval(&probe)?;
        probe[k] = base[k];
        grad.push((up - down) / (2.0 * eps));
    }
    LstmParameters::from_flat(dims, &grad)
}

/// `|a − b| / max(1e-8, |a| + |b|)`
pub fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / (a.abs() + b.abs()).max(1e-8)
}

/// Largest component-wise [`relative_error`] between two gradient sets.
pub fn max_relative_error(a: &Gradients, b: &Gradients) -> f64 {
    a.to_flat().iter().zip(b.to_flat()).map(|(&x, y)| relative_error(x, y)).fold(0.0, f64::max)
}
