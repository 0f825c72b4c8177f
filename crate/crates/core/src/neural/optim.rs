use super::lstm::{Gradients, LstmParameters};
use super::NeuralError;

/// Plain gradient descent with global-norm clipping.
///
/// The gradient is rescaled to norm `clip` when its norm exceeds it, then
/// `params -= learning_rate * grad`. Pass `f64::INFINITY` to disable clipping.
/// Returns the pre-clipping gradient norm.
pub fn sgd_step(params: &mut LstmParameters, grads: &Gradients, learning_rate: f64, clip: f64) -> Result<f64, NeuralError> {
    if !(learning_rate > 0.0 && learning_rate.is_finite()) {
        return Err(NeuralError::Hyperparameter(format!("learning rate must be positive, got {learning_rate}")));
    }
    if clip.is_nan() || clip <= 0.0 {
        return Err(NeuralError::Hyperparameter(format!("clip must be positive, got {clip}")));
    }
    if params.dims() != grads.dims() {
        return Err(NeuralError::Shape(format!("gradient dims {:?} vs params {:?}", grads.dims(), params.dims())));
    }
    if !grads.is_finite() {
        return Err(NeuralError::NonFinite("gradient".into()));
    }
    let norm = grads.l2_norm();
    let factor = if norm > clip { clip / norm } else { 1.0 };
    let step = learning_rate * factor;
    for (p, g) in params.tensors_mut().into_iter().zip(grads.tensors()) {
        for (p, g) in p.iter_mut().zip(g) {
            *p -= step * g;
        }
    }
    if !params.is_finite() {
        return Err(NeuralError::NonFinite("parameters after update".into()));
    }
    Ok(norm)
}
