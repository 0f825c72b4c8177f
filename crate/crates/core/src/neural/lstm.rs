//! Single-layer LSTM cell with an affine read-out of the final hidden state.
//!
//! Gates per step, for gate weights `W` (hidden x input), recurrent weights
//! `U` (hidden x hidden) and bias `b`:
//!
//! ```text
//! i = σ(W_i x + U_i h + b_i)     f = σ(W_f x + U_f h + b_f)
//! g = tanh(W_g x + U_g h + b_g)  o = σ(W_o x + U_o h + b_o)
//! c' = f ⊙ c + i ⊙ g             h' = o ⊙ tanh(c')
//! ```
//!
//! The prediction for a sequence is `V h_L + c` where `h_L` is the hidden
//! state after the last step, starting from zero state.

use super::matrix::Matrix;
use super::rng::SplitMix64;
use super::NeuralError;

pub const INPUT_GATE: usize = 0;
pub const FORGET_GATE: usize = 1;
pub const CANDIDATE_GATE: usize = 2;
pub const OUTPUT_GATE: usize = 3;

/// Names of the parameter tensors in checkpoint order.
pub const TENSOR_NAMES: [&str; 14] = [
    "W_i", "U_i", "b_i", "W_f", "U_f", "b_f", "W_g", "U_g", "b_g", "W_o", "U_o", "b_o", "V", "c",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LstmDims {
    pub input: usize,
    pub hidden: usize,
    pub output: usize,
}

impl LstmDims {
    pub fn new(input: usize, hidden: usize, output: usize) -> Result<Self, NeuralError> {
        if input == 0 || hidden == 0 || output == 0 {
            return Err(NeuralError::InvalidDims { input, hidden, output });
        }
        Ok(Self { input, hidden, output })
    }

    pub fn param_count(&self) -> usize {
        4 * self.hidden * (self.input + self.hidden + 1) + self.output * (self.hidden + 1)
    }

    /// `(rows, cols)` of each tensor in checkpoint order; biases are `n x 1`.
    pub fn tensor_shapes(&self) -> [(usize, usize); 14] {
        let (n, h, m) = (self.input, self.hidden, self.output);
        let gate = [(h, n), (h, h), (h, 1)];
        [
            gate[0], gate[1], gate[2], gate[0], gate[1], gate[2], gate[0], gate[1], gate[2], gate[0], gate[1], gate[2],
            (m, h),
            (m, 1),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub w: Matrix,
    pub u: Matrix,
    pub b: Vec<f64>,
}

impl Gate {
    fn zeros(dims: LstmDims) -> Self {
        Self {
            w: Matrix::zeros(dims.hidden, dims.input),
            u: Matrix::zeros(dims.hidden, dims.hidden),
            b: vec![0.0; dims.hidden],
        }
    }

    /// `b + W x + U h`
    fn preactivation(&self, x: &[f64], h: &[f64]) -> Vec<f64> {
        let mut a = self.b.clone();
        self.w.mul_vec_acc(x, &mut a);
        self.u.mul_vec_acc(h, &mut a);
        a
    }
}

/// Weights of one LSTM cell plus its output projection. Also used as the
/// container for gradients, which share the same shapes.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParameters {
    dims: LstmDims,
    /// Indexed by [`INPUT_GATE`], [`FORGET_GATE`], [`CANDIDATE_GATE`], [`OUTPUT_GATE`].
    pub gates: [Gate; 4],
    pub proj_w: Matrix,
    pub proj_b: Vec<f64>,
}

pub type Gradients = LstmParameters;

impl LstmParameters {
    pub fn zeros(dims: LstmDims) -> Self {
        Self {
            dims,
            gates: std::array::from_fn(|_| Gate::zeros(dims)),
            proj_w: Matrix::zeros(dims.output, dims.hidden),
            proj_b: vec![0.0; dims.output],
        }
    }

    pub fn dims(&self) -> LstmDims {
        self.dims
    }

    pub fn param_count(&self) -> usize {
        self.dims.param_count()
    }

    /// Parameter tensors in checkpoint order.
    pub fn tensors(&self) -> [&[f64]; 14] {
        let [gi, gf, gg, go] = &self.gates;
        [
            gi.w.as_slice(), gi.u.as_slice(), &gi.b,
            gf.w.as_slice(), gf.u.as_slice(), &gf.b,
            gg.w.as_slice(), gg.u.as_slice(), &gg.b,
            go.w.as_slice(), go.u.as_slice(), &go.b,
            self.proj_w.as_slice(), &self.proj_b,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 14] {
        let [gi, gf, gg, go] = &mut self.gates;
        [
            gi.w.as_mut_slice(), gi.u.as_mut_slice(), &mut gi.b,
            gf.w.as_mut_slice(), gf.u.as_mut_slice(), &mut gf.b,
            gg.w.as_mut_slice(), gg.u.as_mut_slice(), &mut gg.b,
            go.w.as_mut_slice(), go.u.as_mut_slice(), &mut go.b,
            self.proj_w.as_mut_slice(), &mut self.proj_b,
        ]
    }

    /// All parameters flattened in checkpoint order.
    pub fn to_flat(&self) -> Vec<f64> {
        self.tensors().concat()
    }

    pub fn from_flat(dims: LstmDims, values: &[f64]) -> Result<Self, NeuralError> {
        if values.len() != dims.param_count() {
            return Err(NeuralError::Shape(format!(
                "{} values for a model with {} parameters",
                values.len(),
                dims.param_count()
            )));
        }
        let mut params = Self::zeros(dims);
        let mut rest = values;
        for t in params.tensors_mut() {
            let (head, tail) = rest.split_at(t.len());
            t.copy_from_slice(head);
            rest = tail;
        }
        Ok(params)
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }

    fn check_same_dims(&self, other: &Self) -> Result<(), NeuralError> {
        if self.dims != other.dims {
            return Err(NeuralError::Shape(format!("dims {:?} vs {:?}", self.dims, other.dims)));
        }
        Ok(())
    }

    /// `self += other`
    pub fn accumulate(&mut self, other: &Self) -> Result<(), NeuralError> {
        self.check_same_dims(other)?;
        for (dst, src) in self.tensors_mut().into_iter().zip(other.tensors()) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d += s;
            }
        }
        Ok(())
    }

    pub fn scale(&mut self, k: f64) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|x| *x *= k);
        }
    }

    pub fn l2_norm(&self) -> f64 {
        self.tensors().iter().flat_map(|t| t.iter()).map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Draw weights uniformly in `[-1/sqrt(hidden), 1/sqrt(hidden)]`; forget-gate
/// bias 1.0, all other biases 0.
///
/// Weights are drawn tensor by tensor in checkpoint order (W then U for each
/// gate, then V), row-major.
pub fn init_parameters(dims: LstmDims, rng: &mut SplitMix64) -> Result<LstmParameters, NeuralError> {
    let dims = LstmDims::new(dims.input, dims.hidden, dims.output)?;
    let s = 1.0 / (dims.hidden as f64).sqrt();
    let mut params = LstmParameters::zeros(dims);
    for gate in params.gates.iter_mut() {
        for x in gate.w.as_mut_slice().iter_mut().chain(gate.u.as_mut_slice()) {
            *x = rng.uniform(-s, s);
        }
    }
    for x in params.proj_w.as_mut_slice() {
        *x = rng.uniform(-s, s);
    }
    params.gates[FORGET_GATE].b.fill(1.0);
    Ok(params)
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Intermediates of one step, retained for backpropagation.
#[derive(Debug, Clone)]
pub struct StepCache {
    pub x: Vec<f64>,
    pub h_prev: Vec<f64>,
    pub c_prev: Vec<f64>,
    pub input_gate: Vec<f64>,
    pub forget_gate: Vec<f64>,
    pub candidate: Vec<f64>,
    pub output_gate: Vec<f64>,
    pub c: Vec<f64>,
    pub tanh_c: Vec<f64>,
    pub h: Vec<f64>,
}

/// One cell update from `(h_prev, c_prev)` with input `x`.
pub fn lstm_step(params: &LstmParameters, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> Result<StepCache, NeuralError> {
    let d = params.dims;
    if x.len() != d.input || h_prev.len() != d.hidden || c_prev.len() != d.hidden {
        return Err(NeuralError::Shape(format!(
            "step inputs x={}, h={}, c={} for dims {:?}",
            x.len(),
            h_prev.len(),
            c_prev.len(),
            d
        )));
    }
    let act = |gate: usize, f: fn(f64) -> f64| {
        let mut a = params.gates[gate].preactivation(x, h_prev);
        a.iter_mut().for_each(|v| *v = f(*v));
        a
    };
    let i = act(INPUT_GATE, sigmoid);
    let f = act(FORGET_GATE, sigmoid);
    let g = act(CANDIDATE_GATE, f64::tanh);
    let o = act(OUTPUT_GATE, sigmoid);
    let c: Vec<f64> = (0..d.hidden).map(|k| f[k] * c_prev[k] + i[k] * g[k]).collect();
    let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
    let h: Vec<f64> = o.iter().zip(&tanh_c).map(|(o, t)| o * t).collect();
    Ok(StepCache {
        x: x.to_vec(),
        h_prev: h_prev.to_vec(),
        c_prev: c_prev.to_vec(),
        input_gate: i,
        forget_gate: f,
        candidate: g,
        output_gate: o,
        c,
        tanh_c,
        h,
    })
}

/// Result of running a sequence through the cell.
#[derive(Debug, Clone)]
pub struct ForwardPass {
    pub prediction: Vec<f64>,
    pub steps: Vec<StepCache>,
}

impl ForwardPass {
    pub fn final_hidden(&self) -> &[f64] {
        &self.steps.last().expect("forward pass has at least one step").h
    }
}

/// Run `sequence` (one row per time step) from zero state and project the
/// final hidden state.
pub fn forward(params: &LstmParameters, sequence: &Matrix) -> Result<ForwardPass, NeuralError> {
    let d = params.dims;
    if sequence.rows() == 0 {
        return Err(NeuralError::EmptySequence);
    }
    if sequence.cols() != d.input {
        return Err(NeuralError::Shape(format!("sequence has {} features, model expects {}", sequence.cols(), d.input)));
    }
    let mut h = vec![0.0; d.hidden];
    let mut c = vec![0.0; d.hidden];
    let mut steps = Vec::with_capacity(sequence.rows());
    for t in 0..sequence.rows() {
        let step = lstm_step(params, sequence.row(t), &h, &c)?;
        h.clone_from(&step.h);
        c.clone_from(&step.c);
        steps.push(step);
    }
    let mut prediction = params.proj_b.clone();
    params.proj_w.mul_vec_acc(&h, &mut prediction);
    Ok(ForwardPass { prediction, steps })
}

/// Mean squared error over the output dimensions.
pub fn loss(prediction: &[f64], target: &[f64]) -> f64 {
    debug_assert_eq!(prediction.len(), target.len());
    let n = prediction.len() as f64;
    prediction.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum::<f64>() / n
}

/// Exact gradient of [`loss`] with respect to every parameter, by
/// backpropagation through all steps of `pass`.
pub fn backward(params: &LstmParameters, pass: &ForwardPass, target: &[f64]) -> Result<Gradients, NeuralError> {
    let d = params.dims;
    if target.len() != d.output || pass.prediction.len() != d.output {
        return Err(NeuralError::Shape(format!(
            "prediction {} / target {} for output size {}",
            pass.prediction.len(),
            target.len(),
            d.output
        )));
    }
    if pass.steps.is_empty() {
        return Err(NeuralError::EmptySequence);
    }
    if pass.steps.iter().any(|s| s.x.len() != d.input || s.h.len() != d.hidden) {
        return Err(NeuralError::Shape("forward cache does not match these parameters".into()));
    }

    let mut grads = LstmParameters::zeros(d);
    let scale = 2.0 / d.output as f64;
    let d_pred: Vec<f64> = pass.prediction.iter().zip(target).map(|(p, t)| scale * (p - t)).collect();
    grads.proj_w.add_outer(&d_pred, pass.final_hidden());
    grads.proj_b.copy_from_slice(&d_pred);

    let mut dh = vec![0.0; d.hidden];
    params.proj_w.mul_vec_transposed_acc(&d_pred, &mut dh);
    let mut dc_next = vec![0.0; d.hidden];

    for step in pass.steps.iter().rev() {
        let mut da: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; d.hidden]);
        for k in 0..d.hidden {
            let (i, f, g, o) = (step.input_gate[k], step.forget_gate[k], step.candidate[k], step.output_gate[k]);
            let tc = step.tanh_c[k];
            let d_o = dh[k] * tc;
            let dc = dc_next[k] + dh[k] * o * (1.0 - tc * tc);
            da[INPUT_GATE][k] = dc * g * i * (1.0 - i);
            da[FORGET_GATE][k] = dc * step.c_prev[k] * f * (1.0 - f);
            da[CANDIDATE_GATE][k] = dc * i * (1.0 - g * g);
            da[OUTPUT_GATE][k] = d_o * o * (1.0 - o);
            dc_next[k] = dc * f;
        }
        let mut dh_prev = vec![0.0; d.hidden];
        for (gate, (grad, a)) in params.gates.iter().zip(grads.gates.iter_mut().zip(&da)) {
            grad.w.add_outer(a, &step.x);
            grad.u.add_outer(a, &step.h_prev);
            for (b, v) in grad.b.iter_mut().zip(a) {
                *b += v;
            }
            gate.u.mul_vec_transposed_acc(a, &mut dh_prev);
        }
        dh = dh_prev;
    }
    Ok(grads)
}
