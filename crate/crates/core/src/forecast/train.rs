use crate::dataset::{make_windows, FeatureScaler, QuarterlyRecord, Window, NUM_FEATURES, NUM_FINANCIALS, SENTIMENT_CHANNEL};
use crate::neural::{backward, forward, init_parameters, loss, sgd_step, LstmDims, LstmParameters, Matrix, SplitMix64};

use super::config::{Batching, Mode, TrainingConfig};
use super::ForecastError;

/// Fitted models with the scaler and framing they were trained under.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub mode: Mode,
    pub window: usize,
    pub scaler: FeatureScaler,
    /// One model in multivariate mode; one per financial series otherwise.
    pub models: Vec<LstmParameters>,
}

/// Loss history of one trained model.
#[derive(Debug, Clone, PartialEq)]
pub struct LossCurve {
    pub label: String,
    /// Mean training loss at each epoch, measured before that epoch's updates.
    pub epoch_losses: Vec<f64>,
    pub validation_loss: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingReport {
    pub curves: Vec<LossCurve>,
}

impl TrainingReport {
    /// Per-epoch training loss averaged over all models.
    pub fn epoch_losses(&self) -> Vec<f64> {
        let epochs = self.curves.first().map_or(0, |c| c.epoch_losses.len());
        let n = self.curves.len() as f64;
        (0..epochs).map(|e| self.curves.iter().map(|c| c.epoch_losses[e]).sum::<f64>() / n).collect()
    }

    pub fn first_loss(&self) -> f64 {
        self.epoch_losses().first().copied().unwrap_or(f64::NAN)
    }

    pub fn final_loss(&self) -> f64 {
        self.epoch_losses().last().copied().unwrap_or(f64::NAN)
    }

    /// Validation loss averaged over all models, when a split was held out.
    pub fn validation_loss(&self) -> Option<f64> {
        let vals: Option<Vec<f64>> = self.curves.iter().map(|c| c.validation_loss).collect();
        vals.map(|v| v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Channels each model sees, in model order. The sentiment channel is last.
pub(crate) fn channel_sets(mode: Mode) -> Vec<Vec<usize>> {
    match mode {
        Mode::Multivariate => vec![(0..NUM_FEATURES).collect()],
        Mode::PerSeries => (0..NUM_FINANCIALS).map(|k| vec![k, SENTIMENT_CHANNEL]).collect(),
    }
}

pub(crate) fn curve_labels(mode: Mode) -> Vec<String> {
    match mode {
        Mode::Multivariate => vec!["all".to_string()],
        Mode::PerSeries => crate::dataset::FINANCIAL_COLUMNS.iter().map(|s| s.to_string()).collect(),
    }
}

fn project(rows: &[[f64; NUM_FEATURES]], channels: &[usize]) -> Vec<Vec<f64>> {
    rows.iter().map(|r| channels.iter().map(|&c| r[c]).collect()).collect()
}

/// Split sizes `(train, validation)` for `n` records.
pub(crate) fn split_sizes(n: usize, fraction: f64) -> (usize, usize) {
    let val = (n as f64 * fraction).floor() as usize;
    (n - val, val)
}

/// Train on enriched records.
///
/// The scaler is fitted on the training split only; validation, when
/// requested, is the chronological tail. Every epoch visits all training
/// windows. Deterministic for a given seed.
pub fn train(records: &[QuarterlyRecord], config: &TrainingConfig) -> Result<(TrainedModel, TrainingReport), ForecastError> {
    config.validate()?;
    let need = config.window + 2;
    if records.len() < need {
        return Err(ForecastError::InsufficientData { need, got: records.len() });
    }
    let features = records.iter().map(QuarterlyRecord::features).collect::<Result<Vec<_>, _>>()?;
    let (n_train, n_val) = split_sizes(records.len(), config.validation_fraction);
    if n_train <= config.window {
        return Err(ForecastError::InsufficientData { need: config.window + 1, got: n_train });
    }
    let scaler = FeatureScaler::fit(&records[..n_train])?;
    let rows: Vec<[f64; NUM_FEATURES]> = features.iter().map(|f| scaler.normalize(f)).collect();

    let sets = channel_sets(config.mode);
    let labels = curve_labels(config.mode);
    let run = |k: usize| -> Result<(LstmParameters, LossCurve), ForecastError> {
        let projected = project(&rows, &sets[k]);
        let train_windows = make_windows(&projected[..n_train], config.window)?;
        let val_windows = if n_val > 0 {
            let start = n_train - config.window;
            make_windows(&projected[start..], config.window)?
        } else {
            Vec::new()
        };
        let seed = config.seed.wrapping_add(k as u64);
        let (params, epoch_losses) = fit_windows(&train_windows, sets[k].len(), seed, config)?;
        let validation_loss = (!val_windows.is_empty()).then(|| mean_loss(&params, &val_windows)).transpose()?;
        Ok((params, LossCurve { label: labels[k].clone(), epoch_losses, validation_loss }))
    };

    let results: Vec<Result<(LstmParameters, LossCurve), ForecastError>> = if sets.len() == 1 {
        vec![run(0)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..sets.len()).map(|k| s.spawn(move || run(k))).collect();
            handles.into_iter().map(|h| h.join().expect("training thread panicked")).collect()
        })
    };
    let mut models = Vec::with_capacity(results.len());
    let mut curves = Vec::with_capacity(results.len());
    for r in results {
        let (m, c) = r?;
        models.push(m);
        curves.push(c);
    }
    Ok((TrainedModel { mode: config.mode, window: config.window, scaler, models }, TrainingReport { curves }))
}

/// Fit one model of `width` inputs and outputs on `windows`.
/// Returns the parameters and the per-epoch mean training loss.
pub fn fit_windows(
    windows: &[Window],
    width: usize,
    seed: u64,
    config: &TrainingConfig,
) -> Result<(LstmParameters, Vec<f64>), ForecastError> {
    let dims = LstmDims::new(width, config.hidden, width)?;
    let mut params = init_parameters(dims, &mut SplitMix64::new(seed))?;
    let mut losses = Vec::with_capacity(config.epochs);
    let n = windows.len() as f64;
    for epoch in 0..config.epochs {
        let mut total = 0.0;
        match config.batching {
            Batching::FullBatch => {
                let mut grads = LstmParameters::zeros(dims);
                for w in windows {
                    let pass = forward(&params, &w.input)?;
                    total += loss(&pass.prediction, &w.target);
                    grads.accumulate(&backward(&params, &pass, &w.target)?)?;
                }
                grads.scale(1.0 / n);
                check_loss(total / n, epoch)?;
                sgd_step(&mut params, &grads, config.learning_rate, config.clip)?;
            }
            Batching::PerSample => {
                for w in windows {
                    let pass = forward(&params, &w.input)?;
                    total += loss(&pass.prediction, &w.target);
                    let grads = backward(&params, &pass, &w.target)?;
                    sgd_step(&mut params, &grads, config.learning_rate, config.clip)?;
                }
                check_loss(total / n, epoch)?;
            }
        }
        losses.push(total / n);
    }
    Ok((params, losses))
}

fn check_loss(value: f64, epoch: usize) -> Result<(), ForecastError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(ForecastError::NonFiniteLoss { epoch: epoch + 1 })
    }
}

/// Mean one-step loss of `params` over `windows`.
pub fn mean_loss(params: &LstmParameters, windows: &[Window]) -> Result<f64, ForecastError> {
    let mut total = 0.0;
    for w in windows {
        total += loss(&forward(params, &w.input)?.prediction, &w.target);
    }
    Ok(total / windows.len() as f64)
}

impl TrainedModel {
    /// Predict the normalized feature vector that follows `rows`, the last
    /// `window` normalized feature vectors.
    ///
    /// In per-series mode each financial channel comes from its own model
    /// and the sentiment channel is the mean of the models' sentiment outputs.
    pub fn predict_next(&self, rows: &[[f64; NUM_FEATURES]]) -> Result<[f64; NUM_FEATURES], ForecastError> {
        let sets = channel_sets(self.mode);
        let mut out = [0.0; NUM_FEATURES];
        let mut sentiment = 0.0;
        for (params, channels) in self.models.iter().zip(&sets) {
            let input = Matrix::from_rows(&project(rows, channels))?;
            let pred = forward(params, &input)?.prediction;
            for (&c, &v) in channels.iter().zip(&pred) {
                if c == SENTIMENT_CHANNEL {
                    sentiment += v;
                } else {
                    out[c] = v;
                }
            }
        }
        out[SENTIMENT_CHANNEL] = sentiment / self.models.len() as f64;
        Ok(out)
    }
}
