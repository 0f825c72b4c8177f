//! Dense linear algebra, an LSTM cell with backpropagation through time,
//! clipped gradient descent and a finite-difference gradient oracle.
//!
//! All arithmetic is `f64`.

mod checkpoint;
mod gradcheck;
mod lstm;
mod matrix;
mod optim;
mod rng;

use thiserror::Error;

pub use checkpoint::{checkpoint_from_str, checkpoint_to_string, read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC};
pub use gradcheck::{finite_difference_gradients, max_relative_error, relative_error};
pub use lstm::{
    backward, forward, init_parameters, loss, lstm_step, ForwardPass, Gate, Gradients, LstmDims, LstmParameters,
    StepCache, CANDIDATE_GATE, FORGET_GATE, INPUT_GATE, OUTPUT_GATE, TENSOR_NAMES,
};
pub use matrix::{dot, Matrix};
pub use optim::sgd_step;
pub use rng::SplitMix64;

#[derive(Debug, Error)]
pub enum NeuralError {
    #[error("invalid dims (input {input}, hidden {hidden}, output {output}): all must be positive")]
    InvalidDims { input: usize, hidden: usize, output: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("empty input sequence")]
    EmptySequence,
    #[error("non-finite {0}")]
    NonFinite(String),
    #[error("{0}")]
    Hyperparameter(String),
    #[error("checkpoint line {line}: {reason}")]
    Checkpoint { line: usize, reason: String },
}
