//! Plain-text model checkpoints.
//!
//! ```text
//! lstm-checkpoint v1
//! dims <input> <hidden> <output>
//! W_i <v0> <v1> ...
//! U_i ...
//! ...
//! c <v0> ...
//! ```
//!
//! Fourteen tensor lines follow the dims line, one per tensor in the order
//! `W_i U_i b_i W_f U_f b_f W_g U_g b_g W_o U_o b_o V c`. Each line holds the
//! tensor name and its values in row-major order, separated by single
//! spaces. Values use the shortest decimal form that parses back to the same
//! bits, so `load(save(m)) == m` exactly.

use std::fmt::Write as _;

use super::lstm::{LstmDims, LstmParameters, TENSOR_NAMES};
use super::NeuralError;

pub const CHECKPOINT_MAGIC: &str = "lstm-checkpoint v1";

pub fn write_checkpoint(params: &LstmParameters, out: &mut String) {
    let d = params.dims();
    let _ = writeln!(out, "{CHECKPOINT_MAGIC}");
    let _ = writeln!(out, "dims {} {} {}", d.input, d.hidden, d.output);
    for (name, values) in TENSOR_NAMES.iter().zip(params.tensors()) {
        out.push_str(name);
        for v in values {
            let _ = write!(out, " {v:?}");
        }
        out.push('\n');
    }
}

pub fn checkpoint_to_string(params: &LstmParameters) -> String {
    let mut s = String::new();
    write_checkpoint(params, &mut s);
    s
}

/// Read one checkpoint block from `lines`, consuming exactly 16 lines.
/// `first_line` is the 1-based line number of the first line, for errors.
pub fn read_checkpoint<'a>(lines: &mut impl Iterator<Item = &'a str>, first_line: usize) -> Result<LstmParameters, NeuralError> {
    let mut line_no = first_line;
    let mut next = |what: &str| {
        let l = lines.next().ok_or_else(|| NeuralError::Checkpoint { line: line_no, reason: format!("missing {what}") });
        line_no += 1;
        l.map(|l| (line_no - 1, l))
    };
    let (n, magic) = next("header")?;
    if magic.trim_end() != CHECKPOINT_MAGIC {
        return Err(NeuralError::Checkpoint { line: n, reason: format!("expected `{CHECKPOINT_MAGIC}`") });
    }
    let (n, dims_line) = next("dims line")?;
    let bad = |line, reason: &str| NeuralError::Checkpoint { line, reason: reason.to_string() };
    let parts: Vec<&str> = dims_line.split_whitespace().collect();
    let dims = match parts.as_slice() {
        ["dims", a, b, c] => {
            let p = |s: &str| s.parse::<usize>().map_err(|_| bad(n, "dims must be positive integers"));
            LstmDims::new(p(a)?, p(b)?, p(c)?).map_err(|e| bad(n, &e.to_string()))?
        }
        _ => return Err(bad(n, "expected `dims <input> <hidden> <output>`")),
    };
    let mut params = LstmParameters::zeros(dims);
    for (name, tensor) in TENSOR_NAMES.iter().zip(params.tensors_mut()) {
        let (n, line) = next(name)?;
        let mut fields = line.split(' ');
        if fields.next() != Some(name) {
            return Err(bad(n, &format!("expected tensor `{name}`")));
        }
        let values: Vec<f64> = fields
            .map(|s| s.parse::<f64>().map_err(|_| bad(n, &format!("`{s}` is not a number"))))
            .collect::<Result<_, _>>()?;
        if values.len() != tensor.len() {
            return Err(bad(n, &format!("`{name}` has {} values, expected {}", values.len(), tensor.len())));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(bad(n, "non-finite value"));
        }
        tensor.copy_from_slice(&values);
    }
    Ok(params)
}

pub fn checkpoint_from_str(text: &str) -> Result<LstmParameters, NeuralError> {
    read_checkpoint(&mut text.lines(), 1)
}
