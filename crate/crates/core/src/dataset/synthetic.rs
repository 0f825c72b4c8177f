use super::{Period, QuarterlyRecord, NUM_FINANCIALS};

/// A sine wave broadcast to all eight financial channels, with constant
/// sentiment 50, starting at 1998 Q1.
///
/// Values are `100 + 50 sin(2π t / period)` for `t = 0..n`.
pub fn sine_records(n: usize, period: f64) -> Vec<QuarterlyRecord> {
    let start = Period::new(super::MIN_YEAR, 1).expect("valid start");
    (0..n)
        .map(|t| {
            let v = 100.0 + 50.0 * (std::f64::consts::TAU * t as f64 / period).sin();
            let mut r = QuarterlyRecord::new(start.offset(t), [v; NUM_FINANCIALS]);
            r.base_sentiment = Some(50.0);
            r.effective_sentiment = Some(50.0);
            r
        })
        .collect()
}
