use std::fmt;

use crate::dataset::Period;

use super::ForecastError;

/// Equal-weight mean of per-series min-max normalizations over the horizon.
///
/// Each series is scaled to `[0, 1]` by its own range; a constant series
/// contributes 0.5. All series must share one length.
pub fn combined_index<S: AsRef<[f64]>>(series: &[S]) -> Vec<f64> {
    let Some(first) = series.first() else {
        return Vec::new();
    };
    let len = first.as_ref().len();
    let mut index = vec![0.0; len];
    for s in series {
        let s = s.as_ref();
        assert_eq!(s.len(), len, "all series must share one length");
        let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (acc, &x) in index.iter_mut().zip(s) {
            *acc += if hi > lo { (x - lo) / (hi - lo) } else { 0.5 };
        }
    }
    let n = series.len() as f64;
    index.iter_mut().for_each(|v| *v = (*v / n).clamp(0.0, 1.0));
    index
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremumKind {
    Peak,
    Trough,
}

impl fmt::Display for ExtremumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtremumKind::Peak => "peak",
            ExtremumKind::Trough => "trough",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    /// Position in the index.
    pub position: usize,
    pub period: Period,
    pub kind: ExtremumKind,
}

/// Interior points strictly above both neighbours are peaks, strictly below
/// both are troughs. Ties and endpoints are never reported.
pub fn find_extrema(index: &[f64], start: Period) -> Result<Vec<Extremum>, ForecastError> {
    if index.len() < 3 {
        return Err(ForecastError::TooShortForExtrema(index.len()));
    }
    Ok(index
        .windows(3)
        .enumerate()
        .filter_map(|(i, w)| {
            let kind = if w[1] > w[0] && w[1] > w[2] {
                ExtremumKind::Peak
            } else if w[1] < w[0] && w[1] < w[2] {
                ExtremumKind::Trough
            } else {
                return None;
            };
            Some(Extremum { position: i + 1, period: start.offset(i + 1), kind })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn start() -> Period {
        Period::new(2024, 1).unwrap()
    }

    #[test]
    fn constant_series_give_half() {
        let series = vec![vec![3.0; 5]; 8];
        assert_eq!(combined_index(&series), vec![0.5; 5]);
    }

    #[test]
    fn one_moving_series() {
        let mut series = vec![vec![7.0; 3]; 8];
        series[0] = vec![0.0, 1.0, 2.0];
        // ((0, 0.5, 1) + 7 * 0.5) / 8
        assert_eq!(combined_index(&series), vec![0.4375, 0.5, 0.5625]);
    }

    #[test]
    fn extrema_rules() {
        let e = find_extrema(&[0.0, 1.0, 0.0], start()).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!((e[0].position, e[0].kind), (1, ExtremumKind::Peak));
        assert_eq!(e[0].period.to_string(), "2024 Q2");
        let e = find_extrema(&[1.0, 0.0, 1.0], start()).unwrap();
        assert_eq!(e[0].kind, ExtremumKind::Trough);
        assert!(find_extrema(&[1.0, 1.0, 1.0], start()).unwrap().is_empty());
        assert!(find_extrema(&[0.0, 1.0, 1.0, 0.0], start()).unwrap().is_empty());
        assert!(find_extrema(&[0.0, 1.0], start()).is_err());
    }

    proptest! {
        #[test]
        fn monotone_has_no_extrema(mut xs in prop::collection::vec(-1e3f64..1e3, 3..30), up in any::<bool>()) {
            xs.sort_by(f64::total_cmp);
            if !up { xs.reverse(); }
            prop_assert!(find_extrema(&xs, start()).unwrap().is_empty());
        }
    }
}
