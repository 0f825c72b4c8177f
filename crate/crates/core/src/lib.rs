//! Sentiment-enhanced quarterly time-series forecasting.
//!
//! The pipeline runs in stages, each in its own module:
//!
//! - [`dataset`]: quarterly records, table I/O, min-max scaling, windowing.
//! - [`sentiment`]: lexicon polarity scoring on a 0..100 scale.
//! - [`events`]: event calendars and multiplicative intervention on scores.
//! - [`neural`]: an LSTM cell with backpropagation through time.
//! - [`forecast`]: training, recursive rollout, combined index, extrema.
//! - [`cli`]: the stage commands behind the `semitrend` binary.

pub mod cli;
pub mod dataset;
pub mod events;
pub mod forecast;
pub mod neural;
pub mod sentiment;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Dataset(#[from] dataset::DatasetError),
    #[error(transparent)]
    Sentiment(#[from] sentiment::SentimentError),
    #[error(transparent)]
    Events(#[from] events::EventError),
    #[error(transparent)]
    Neural(#[from] neural::NeuralError),
    #[error(transparent)]
    Forecast(#[from] forecast::ForecastError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
