use super::{DatasetError, QuarterlyRecord, NUM_FEATURES, NUM_FINANCIALS};

/// Per-feature min-max scaling to `[0, 1]`.
///
/// A feature whose fitted range is a single value is degenerate and always
/// normalizes to 0.5; it denormalizes back to the stored constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureScaler {
    ranges: [(f64, f64); NUM_FEATURES],
}

impl FeatureScaler {
    /// Fit on the given records only. All must carry an effective sentiment.
    pub fn fit(records: &[QuarterlyRecord]) -> Result<Self, DatasetError> {
        if records.len() < 2 {
            return Err(DatasetError::TooFewRecords(records.len()));
        }
        let rows = records.iter().map(QuarterlyRecord::features).collect::<Result<Vec<_>, _>>()?;
        Ok(Self::fit_rows(&rows))
    }

    /// Fit on raw feature rows. Panics on an empty slice.
    pub fn fit_rows(rows: &[[f64; NUM_FEATURES]]) -> Self {
        assert!(!rows.is_empty(), "cannot fit a scaler on zero rows");
        let mut ranges = [(f64::INFINITY, f64::NEG_INFINITY); NUM_FEATURES];
        for row in rows {
            for (range, &x) in ranges.iter_mut().zip(row) {
                range.0 = range.0.min(x);
                range.1 = range.1.max(x);
            }
        }
        Self { ranges }
    }

    /// Rebuild from stored `(min, max)` pairs; `None` if any pair is inverted
    /// or non-finite.
    pub fn from_ranges(ranges: [(f64, f64); NUM_FEATURES]) -> Option<Self> {
        ranges
            .iter()
            .all(|&(lo, hi)| lo.is_finite() && hi.is_finite() && lo <= hi)
            .then_some(Self { ranges })
    }

    pub fn ranges(&self) -> &[(f64, f64); NUM_FEATURES] {
        &self.ranges
    }

    pub fn range(&self, feature: usize) -> (f64, f64) {
        self.ranges[feature]
    }

    pub fn is_degenerate(&self, feature: usize) -> bool {
        let (lo, hi) = self.ranges[feature];
        lo == hi
    }

    /// Scale one feature value. Values outside the fitted range are not clamped.
    pub fn normalize_value(&self, feature: usize, x: f64) -> f64 {
        let (lo, hi) = self.ranges[feature];
        if lo == hi {
            0.5
        } else {
            (x - lo) / (hi - lo)
        }
    }

    pub fn denormalize_value(&self, feature: usize, y: f64) -> f64 {
        let (lo, hi) = self.ranges[feature];
        if lo == hi {
            lo
        } else {
            lo + y * (hi - lo)
        }
    }

    pub fn normalize(&self, v: &[f64; NUM_FEATURES]) -> [f64; NUM_FEATURES] {
        std::array::from_fn(|i| self.normalize_value(i, v[i]))
    }

    /// Inverse scaling of the financial channels.
    pub fn denormalize(&self, v: &[f64; NUM_FINANCIALS]) -> [f64; NUM_FINANCIALS] {
        std::array::from_fn(|i| self.denormalize_value(i, v[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Period, SENTIMENT_CHANNEL};
    use proptest::prelude::*;

    fn constant_records(values: &[f64]) -> Vec<QuarterlyRecord> {
        let mut p = Period::new(2000, 1).unwrap();
        values
            .iter()
            .map(|&v| {
                let mut r = QuarterlyRecord::new(p, [v; NUM_FINANCIALS]);
                r.effective_sentiment = Some(50.0);
                p = p.succ();
                r
            })
            .collect()
    }

    #[test]
    fn constant_series_is_degenerate() {
        let s = FeatureScaler::fit(&constant_records(&[5.0, 5.0, 5.0])).unwrap();
        assert_eq!(s.range(0), (5.0, 5.0));
        assert!(s.is_degenerate(0));
        assert_eq!(s.normalize_value(0, 123.0), 0.5);
        assert_eq!(s.denormalize_value(0, 0.9), 5.0);
        assert!(s.is_degenerate(SENTIMENT_CHANNEL));
    }

    #[test]
    fn needs_two_records() {
        assert!(matches!(FeatureScaler::fit(&constant_records(&[1.0])), Err(DatasetError::TooFewRecords(1))));
    }

    #[test]
    fn missing_sentiment_is_an_error() {
        let mut records = constant_records(&[1.0, 2.0]);
        records[1].effective_sentiment = None;
        assert!(matches!(FeatureScaler::fit(&records), Err(DatasetError::MissingSentiment { .. })));
    }

    #[test]
    fn hand_computed_values() {
        let mut ranges = [(0.0, 1.0); NUM_FEATURES];
        ranges[0] = (11263.0, 57780.0);
        ranges[4] = (0.01, 1.84);
        let s = FeatureScaler::from_ranges(ranges).unwrap();
        // (15736 - 11263) / 46517
        assert!((s.normalize_value(0, 15736.0) - 0.09616).abs() < 1e-4);
        assert_eq!(s.normalize_value(0, 11263.0), 0.0);
        assert_eq!(s.denormalize_value(0, 0.0), 11263.0);
        assert_eq!(s.denormalize_value(4, 1.0), 1.84);
        // not clamped
        assert!(s.normalize_value(0, 60000.0) > 1.0);
    }

    #[test]
    fn inverted_ranges_rejected() {
        let mut ranges = [(0.0, 1.0); NUM_FEATURES];
        ranges[3] = (2.0, 1.0);
        assert!(FeatureScaler::from_ranges(ranges).is_none());
    }

    proptest! {
        #[test]
        fn round_trip(lo in -1e6f64..1e6, width in 1e-3f64..1e6, v in -1e7f64..1e7) {
            let mut ranges = [(0.0, 1.0); NUM_FEATURES];
            ranges[2] = (lo, lo + width);
            let s = FeatureScaler::from_ranges(ranges).unwrap();
            let back = s.denormalize_value(2, s.normalize_value(2, v));
            prop_assert!((back - v).abs() <= 1e-9 * v.abs().max(1.0));
        }
    }
}
