use super::DatasetError;
use crate::neural::Matrix;

/// One supervised sample: `window` consecutive rows and the row after them.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub input: Matrix,
    pub target: Vec<f64>,
}

/// Slide a window of `window` rows over `rows`, in chronological order.
///
/// Yields `rows.len() - window` samples; sample `i` takes rows
/// `i..i + window` as input and row `i + window` as target.
pub fn make_windows<R: AsRef<[f64]>>(rows: &[R], window: usize) -> Result<Vec<Window>, DatasetError> {
    if window == 0 {
        return Err(DatasetError::ZeroWindow);
    }
    if rows.len() <= window {
        return Err(DatasetError::WindowTooLong { len: rows.len(), window });
    }
    (0..rows.len() - window)
        .map(|i| {
            let input = Matrix::from_rows(&rows[i..i + window]).map_err(|e| DatasetError::BadCell {
                row: i,
                column: "*".into(),
                reason: e.to_string(),
            })?;
            Ok(Window { input, target: rows[i + window].as_ref().to_vec() })
        })
        .collect()
}
