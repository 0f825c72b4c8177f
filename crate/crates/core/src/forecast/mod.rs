//! Training on enriched records, recursive rollout over a forecast horizon,
//! the combined trend index and its peaks and troughs.

mod config;
mod index;
mod io;
mod rollout;
mod train;

use thiserror::Error;

use crate::dataset::{DatasetError, Period};
use crate::events::EventError;
use crate::neural::NeuralError;

pub use config::{Batching, Mode, TrainingConfig};
pub use index::{combined_index, find_extrema, Extremum, ExtremumKind};
pub use io::{model_from_str, model_to_string, read_forecast, write_forecast, write_report, BUNDLE_MAGIC};
pub use rollout::{roll_forward, ForecastSeries, ScenarioCalendar};
pub use train::{fit_windows, mean_loss, train, LossCurve, TrainedModel, TrainingReport};

#[derive(Debug, Error)]
pub enum ForecastError {
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("need at least {need} records, got {got}")]
    InsufficientData { need: usize, got: usize },
    #[error("training loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("forecast for {period} is non-finite")]
    NonFiniteForecast { period: Period },
    #[error("horizon must be at least 1")]
    Horizon,
    #[error("scenario: {0}")]
    Scenario(String),
    #[error("extrema need at least 3 points, got {0}")]
    TooShortForExtrema(usize),
    #[error("model file line {line}: {reason}")]
    Bundle { line: usize, reason: String },
    #[error("forecast table row {row}: {reason}")]
    Table { row: usize, reason: String },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Neural(#[from] NeuralError),
    #[error(transparent)]
    Events(#[from] EventError),
}
