use crate::dataset::{Period, QuarterlyRecord, NUM_FEATURES, NUM_FINANCIALS, SENTIMENT_CHANNEL};
use crate::events::{apply_intervention, EventCalendar};
use crate::sentiment::SentimentScore;

use super::index::combined_index;
use super::train::TrainedModel;
use super::ForecastError;

const BASELINE_KEY: &str = "baseline_sentiment";

/// Future events plus the baseline score they act on; together they define
/// the sentiment channel over a forecast horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioCalendar {
    pub calendar: EventCalendar,
    pub baseline_sentiment: SentimentScore,
}

impl ScenarioCalendar {
    pub fn new(calendar: EventCalendar, baseline_sentiment: SentimentScore) -> Self {
        Self { calendar, baseline_sentiment }
    }

    /// No future events; baseline is the mean effective score of the last
    /// four observed quarters (fewer if the history is shorter).
    pub fn carry_forward(history: &[QuarterlyRecord]) -> Result<Self, ForecastError> {
        Ok(Self::new(EventCalendar::default(), default_baseline(history)?))
    }

    /// Parse a calendar file that may also carry a `baseline_sentiment=<v>`
    /// line. Without one, the baseline is taken from `history` as in
    /// [`carry_forward`](Self::carry_forward).
    pub fn parse(text: &str, history: &[QuarterlyRecord]) -> Result<Self, ForecastError> {
        let mut baseline = None;
        let mut rest = String::with_capacity(text.len());
        for (idx, line) in text.lines().enumerate() {
            match line.trim().split_once('=') {
                Some((k, v)) if k.trim() == BASELINE_KEY => {
                    let v: f64 = v.trim().parse().map_err(|_| {
                        ForecastError::Scenario(format!("line {}: `{}` is not a number", idx + 1, v.trim()))
                    })?;
                    let score = SentimentScore::new(v)
                        .map_err(|e| ForecastError::Scenario(format!("line {}: {e}", idx + 1)))?;
                    baseline = Some(score);
                    // keep line numbering stable for calendar errors
                    rest.push('#');
                }
                _ => rest.push_str(line),
            }
            rest.push('\n');
        }
        let calendar = EventCalendar::parse(&rest)?;
        let baseline = match baseline {
            Some(b) => b,
            None => default_baseline(history)?,
        };
        Ok(Self::new(calendar, baseline))
    }

    /// Sentiment assumed for quarter `q`.
    pub fn sentiment_at(&self, q: Period) -> SentimentScore {
        apply_intervention(self.baseline_sentiment, self.calendar.active_events(q))
    }
}

fn default_baseline(history: &[QuarterlyRecord]) -> Result<SentimentScore, ForecastError> {
    let tail = &history[history.len().saturating_sub(4)..];
    if tail.is_empty() {
        return Err(ForecastError::InsufficientData { need: 1, got: 0 });
    }
    let mut sum = 0.0;
    for r in tail {
        sum += r.effective_sentiment.ok_or(crate::dataset::DatasetError::MissingSentiment { period: r.period })?;
    }
    Ok(SentimentScore::clamped(sum / tail.len() as f64))
}

/// Recursive multi-quarter forecast.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastSeries {
    pub start: Period,
    /// Denormalized financial predictions, one row per quarter.
    pub values: Vec<[f64; NUM_FINANCIALS]>,
    pub assumed_sentiment: Vec<f64>,
    pub combined_index: Vec<f64>,
}

impl ForecastSeries {
    pub fn horizon(&self) -> usize {
        self.values.len()
    }

    pub fn periods(&self) -> impl Iterator<Item = Period> + '_ {
        (0..self.horizon()).map(|i| self.start.offset(i))
    }

    /// The predictions of financial channel `k` across the horizon.
    pub fn series(&self, k: usize) -> Vec<f64> {
        self.values.iter().map(|v| v[k]).collect()
    }

    pub fn all_series(&self) -> Vec<Vec<f64>> {
        (0..NUM_FINANCIALS).map(|k| self.series(k)).collect()
    }
}

/// Forecast `horizon` quarters after the last record of `history`.
///
/// Each step predicts the next feature vector from the last `window` rows.
/// The predicted financials are fed back as input; the predicted sentiment
/// is replaced by the scenario's sentiment for that quarter, so sentiment
/// is an exogenous input throughout the rollout.
pub fn roll_forward(
    model: &TrainedModel,
    history: &[QuarterlyRecord],
    horizon: usize,
    scenario: &ScenarioCalendar,
) -> Result<ForecastSeries, ForecastError> {
    if horizon < 1 {
        return Err(ForecastError::Horizon);
    }
    if history.len() < model.window {
        return Err(ForecastError::InsufficientData { need: model.window, got: history.len() });
    }
    let tail = &history[history.len() - model.window..];
    let last = tail.last().expect("window is at least 1").period;
    if let Some(e) = scenario.calendar.events().iter().find(|e| e.start() <= last) {
        return Err(ForecastError::Scenario(format!(
            "event `{}` starts {} but the forecast begins after {last}",
            e.name(),
            e.start()
        )));
    }

    let scaler = &model.scaler;
    let mut rows: Vec<[f64; NUM_FEATURES]> =
        tail.iter().map(|r| r.features().map(|f| scaler.normalize(&f))).collect::<Result<_, _>>()?;
    let start = last.succ();
    let mut values = Vec::with_capacity(horizon);
    let mut assumed = Vec::with_capacity(horizon);
    for step in 0..horizon {
        let q = start.offset(step);
        let mut next = model.predict_next(&rows)?;
        let sentiment = scenario.sentiment_at(q).value();
        next[SENTIMENT_CHANNEL] = scaler.normalize_value(SENTIMENT_CHANNEL, sentiment);
        let mut financial = [0.0; NUM_FINANCIALS];
        financial.copy_from_slice(&next[..NUM_FINANCIALS]);
        let financial = scaler.denormalize(&financial);
        if financial.iter().any(|v| !v.is_finite()) {
            return Err(ForecastError::NonFiniteForecast { period: q });
        }
        values.push(financial);
        assumed.push(sentiment);
        rows.remove(0);
        rows.push(next);
    }
    let mut series = ForecastSeries { start, values, assumed_sentiment: assumed, combined_index: Vec::new() };
    series.combined_index = combined_index(&series.all_series());
    Ok(series)
}
