//! Quarterly multivariate records: ingestion, validation, scaling and
//! supervised windowing.

mod fixture;
mod period;
mod scaler;
mod synthetic;
mod table;
mod window;

use thiserror::Error;

pub use fixture::{table2_csv, table2_records};
pub use period::{parse_period, Period, MAX_YEAR, MIN_YEAR};
pub use scaler::FeatureScaler;
pub use synthetic::sine_records;
pub use table::{format_real, load_records, parse_records, parse_records_counting_gaps, write_records, LoadOptions};
pub use window::{make_windows, Window};

/// Number of financial metrics carried by each record.
pub const NUM_FINANCIALS: usize = 8;
/// Number of model features: the financial metrics plus sentiment.
pub const NUM_FEATURES: usize = NUM_FINANCIALS + 1;
/// Column index of the sentiment channel in a feature vector.
pub const SENTIMENT_CHANNEL: usize = NUM_FINANCIALS;

/// Column names of the financial metrics, in feature order.
pub const FINANCIAL_COLUMNS: [&str; NUM_FINANCIALS] = [
    "net_sales",
    "cost_of_sales",
    "gross_profit",
    "net_income",
    "eps",
    "wafer_shipment",
    "income_from_operations",
    "operating_expenses",
];

/// Feature names in feature-vector order.
pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "net_sales",
    "cost_of_sales",
    "gross_profit",
    "net_income",
    "eps",
    "wafer_shipment",
    "income_from_operations",
    "operating_expenses",
    "sentiment",
];

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("invalid period `{token}`: {reason}")]
    InvalidPeriod { token: String, reason: &'static str },
    #[error("no data rows")]
    Empty,
    #[error("row {row}: missing column `{column}`")]
    MissingColumn { row: usize, column: String },
    #[error("row {row}, column `{column}`: {reason}")]
    BadCell { row: usize, column: String, reason: String },
    #[error("row {row}: duplicate period {period}")]
    DuplicatePeriod { row: usize, period: Period },
    #[error("row {row}: gap in series, {missing} is missing")]
    Gap { row: usize, missing: Period },
    #[error("header: unrecognized column `{0}`")]
    UnknownColumn(String),
    #[error("need at least 2 records to fit a scaler, got {0}")]
    TooFewRecords(usize),
    #[error("{period}: effective sentiment is absent")]
    MissingSentiment { period: Period },
    #[error("series of {len} rows is too short for window {window}")]
    WindowTooLong { len: usize, window: usize },
    #[error("window length must be at least 1")]
    ZeroWindow,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// One fiscal quarter of financial metrics with its sentiment channel.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarterlyRecord {
    pub period: Period,
    pub net_sales: f64,
    pub cost_of_sales: f64,
    pub gross_profit: f64,
    pub net_income: f64,
    pub eps: f64,
    pub wafer_shipment: f64,
    pub income_from_operations: f64,
    pub operating_expenses: f64,
    /// Transcript score before event intervention, on the 0..100 scale.
    pub base_sentiment: Option<f64>,
    pub events: Vec<String>,
    /// Score after event intervention, on the 0..100 scale.
    pub effective_sentiment: Option<f64>,
}

impl QuarterlyRecord {
    /// Record with the given financials and no sentiment or events.
    pub fn new(period: Period, financials: [f64; NUM_FINANCIALS]) -> Self {
        let [net_sales, cost_of_sales, gross_profit, net_income, eps, wafer_shipment, income_from_operations, operating_expenses] =
            financials;
        Self {
            period,
            net_sales,
            cost_of_sales,
            gross_profit,
            net_income,
            eps,
            wafer_shipment,
            income_from_operations,
            operating_expenses,
            base_sentiment: None,
            events: Vec::new(),
            effective_sentiment: None,
        }
    }

    pub fn financials(&self) -> [f64; NUM_FINANCIALS] {
        [
            self.net_sales,
            self.cost_of_sales,
            self.gross_profit,
            self.net_income,
            self.eps,
            self.wafer_shipment,
            self.income_from_operations,
            self.operating_expenses,
        ]
    }

    pub fn set_financials(&mut self, values: [f64; NUM_FINANCIALS]) {
        *self = Self {
            period: self.period,
            base_sentiment: self.base_sentiment,
            events: std::mem::take(&mut self.events),
            effective_sentiment: self.effective_sentiment,
            ..Self::new(self.period, values)
        };
    }

    /// The 9-feature model vector; requires the effective sentiment.
    pub fn features(&self) -> Result<[f64; NUM_FEATURES], DatasetError> {
        let sentiment = self
            .effective_sentiment
            .ok_or(DatasetError::MissingSentiment { period: self.period })?;
        let mut out = [0.0; NUM_FEATURES];
        out[..NUM_FINANCIALS].copy_from_slice(&self.financials());
        out[SENTIMENT_CHANNEL] = sentiment;
        Ok(out)
    }
}
