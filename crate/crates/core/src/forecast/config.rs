use std::fmt;
use std::str::FromStr;

use super::ForecastError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// One model over all nine channels.
    #[default]
    Multivariate,
    /// Eight models, one per financial series, each also fed the sentiment channel.
    PerSeries,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Multivariate => "multivariate",
            Mode::PerSeries => "per-series",
        })
    }
}

impl FromStr for Mode {
    type Err = ForecastError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "multivariate" => Ok(Mode::Multivariate),
            "per-series" => Ok(Mode::PerSeries),
            other => Err(ForecastError::Config(format!("unknown mode `{other}` (multivariate|per-series)"))),
        }
    }
}

/// How training samples are grouped into gradient steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Batching {
    /// One step per epoch on the mean gradient over all windows.
    FullBatch,
    /// One step per window, windows visited in chronological order.
    #[default]
    PerSample,
}

impl fmt::Display for Batching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Batching::FullBatch => "full-batch",
            Batching::PerSample => "per-sample",
        })
    }
}

impl FromStr for Batching {
    type Err = ForecastError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full-batch" => Ok(Batching::FullBatch),
            "per-sample" => Ok(Batching::PerSample),
            other => Err(ForecastError::Config(format!("unknown batching `{other}` (full-batch|per-sample)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingConfig {
    pub window: usize,
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub clip: f64,
    pub seed: u64,
    pub mode: Mode,
    pub batching: Batching,
    /// Chronological tail held out for validation, in `[0, 0.5)`.
    pub validation_fraction: f64,
}

impl Default for TrainingConfig {
    fn default() -> Self {
        Self {
            window: 8,
            hidden: 32,
            epochs: 2000,
            learning_rate: 0.005,
            clip: 1.0,
            seed: 42,
            mode: Mode::Multivariate,
            batching: Batching::PerSample,
            validation_fraction: 0.0,
        }
    }
}

impl TrainingConfig {
    pub fn validate(&self) -> Result<(), ForecastError> {
        let fail = |msg: String| Err(ForecastError::Config(msg));
        if self.window < 1 {
            return fail("window must be at least 1".into());
        }
        if self.hidden < 1 {
            return fail("hidden size must be at least 1".into());
        }
        if self.epochs < 1 {
            return fail("epochs must be at least 1".into());
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return fail(format!("learning rate must be positive, got {}", self.learning_rate));
        }
        if self.clip.is_nan() || self.clip <= 0.0 {
            return fail(format!("clip must be positive, got {}", self.clip));
        }
        if !(0.0..0.5).contains(&self.validation_fraction) {
            return fail(format!("validation fraction must be in [0, 0.5), got {}", self.validation_fraction));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        TrainingConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range_fields() {
        let base = TrainingConfig::default();
        for bad in [
            TrainingConfig { epochs: 0, ..base.clone() },
            TrainingConfig { window: 0, ..base.clone() },
            TrainingConfig { hidden: 0, ..base.clone() },
            TrainingConfig { learning_rate: 0.0, ..base.clone() },
            TrainingConfig { clip: -1.0, ..base.clone() },
            TrainingConfig { validation_fraction: 0.5, ..base.clone() },
        ] {
            assert!(matches!(bad.validate(), Err(ForecastError::Config(_))), "{bad:?}");
        }
    }

    #[test]
    fn mode_names() {
        assert_eq!("per-series".parse::<Mode>().unwrap(), Mode::PerSeries);
        assert_eq!(Mode::Multivariate.to_string(), "multivariate");
        assert!("both".parse::<Mode>().is_err());
    }
}
