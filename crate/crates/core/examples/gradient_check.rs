//! Compare backpropagation-through-time gradients with central finite
//! differences on a small random LSTM.

use semitrend::neural::{
    backward, finite_difference_gradients, forward, init_parameters, relative_error, LstmDims, Matrix, SplitMix64,
};

const NAMES: [&str; 14] = ["W_i", "U_i", "b_i", "W_f", "U_f", "b_f", "W_g", "U_g", "b_g", "W_o", "U_o", "b_o", "V", "c"];

fn main() -> Result<(), semitrend::neural::NeuralError> {
    let dims = LstmDims::new(3, 4, 2)?;
    let mut rng = SplitMix64::new(7);
    let params = init_parameters(dims, &mut rng)?;
    let seq = Matrix::from_vec(5, 3, (0..15).map(|_| rng.uniform(-1.0, 1.0)).collect())?;
    let target = [0.3, -0.2];

    let pass = forward(&params, &seq)?;
    let analytic = backward(&params, &pass, &target)?;
    let numeric = finite_difference_gradients(&params, &seq, &target, 1e-5)?;
    for ((name, a), n) in NAMES.iter().zip(analytic.tensors()).zip(numeric.tensors()) {
        let worst = a.iter().zip(n).map(|(&a, &n)| relative_error(a, n)).fold(0.0, f64::max);
        println!("{name:>4}  {:>3} values  max relative error {worst:.2e}", a.len());
    }
    Ok(())
}
