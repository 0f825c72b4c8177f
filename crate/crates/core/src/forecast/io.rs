//! Model bundles, forecast tables and training reports.
//!
//! A model bundle wraps one or more LSTM checkpoints with what rollout needs
//! to use them:
//!
//! ```text
//! semitrend-model v1
//! mode multivariate
//! window 8
//! scaler net_sales <min> <max>
//! ...                              (one line per feature, 9 in total)
//! scaler sentiment <min> <max>
//! models 1
//! <checkpoint block>               (repeated `models` times)
//! ```

use std::fmt::Write as _;

use crate::dataset::{format_real, parse_period, FeatureScaler, FEATURE_NAMES, FINANCIAL_COLUMNS, NUM_FEATURES, NUM_FINANCIALS};
use crate::neural::{read_checkpoint, write_checkpoint};

use super::config::{Mode, TrainingConfig};
use super::rollout::ForecastSeries;
use super::train::{channel_sets, TrainedModel, TrainingReport};
use super::ForecastError;

pub const BUNDLE_MAGIC: &str = "semitrend-model v1";

pub fn model_to_string(model: &TrainedModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{BUNDLE_MAGIC}");
    let _ = writeln!(out, "mode {}", model.mode);
    let _ = writeln!(out, "window {}", model.window);
    for (name, (lo, hi)) in FEATURE_NAMES.iter().zip(model.scaler.ranges()) {
        let _ = writeln!(out, "scaler {name} {lo:?} {hi:?}");
    }
    let _ = writeln!(out, "models {}", model.models.len());
    for m in &model.models {
        write_checkpoint(m, &mut out);
    }
    out
}

pub fn model_from_str(text: &str) -> Result<TrainedModel, ForecastError> {
    let mut lines = LineReader { lines: text.lines(), line_no: 0 };
    let bad = |line: usize, reason: String| ForecastError::Bundle { line, reason };

    let (n, magic) = lines.next();
    if magic != BUNDLE_MAGIC {
        return Err(bad(n, format!("expected `{BUNDLE_MAGIC}`")));
    }
    let (n, mode) = lines.next();
    let mode: Mode = mode
        .strip_prefix("mode ")
        .ok_or_else(|| bad(n, "expected `mode <name>`".into()))?
        .parse()
        .map_err(|e: ForecastError| bad(n, e.to_string()))?;
    let (n, window) = lines.next();
    let window: usize = window
        .strip_prefix("window ")
        .and_then(|w| w.parse().ok())
        .filter(|&w| w >= 1)
        .ok_or_else(|| bad(n, "expected `window <positive integer>`".into()))?;
    let mut ranges = [(0.0, 0.0); NUM_FEATURES];
    for (i, name) in FEATURE_NAMES.iter().enumerate() {
        let (n, line) = lines.next();
        let parts: Vec<&str> = line.split(' ').collect();
        match parts.as_slice() {
            ["scaler", got, lo, hi] if got == name => {
                let parse = |s: &str| s.parse::<f64>().map_err(|_| bad(n, format!("`{s}` is not a number")));
                ranges[i] = (parse(lo)?, parse(hi)?);
            }
            _ => return Err(bad(n, format!("expected `scaler {name} <min> <max>`"))),
        }
    }
    let scaler = FeatureScaler::from_ranges(ranges).ok_or_else(|| bad(lines.line_no, "scaler ranges must satisfy min <= max".into()))?;
    let (n, count) = lines.next();
    let count: usize = count
        .strip_prefix("models ")
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| bad(n, "expected `models <count>`".into()))?;
    let sets = channel_sets(mode);
    if count != sets.len() {
        return Err(bad(n, format!("{mode} mode needs {} models, found {count}", sets.len())));
    }
    let mut models = Vec::with_capacity(count);
    for channels in &sets {
        let first = lines.line_no + 1;
        let params = read_checkpoint(&mut lines.lines, first)?;
        lines.line_no += 16;
        let d = params.dims();
        if d.input != channels.len() || d.output != channels.len() {
            return Err(bad(first, format!("model expects {} channels, checkpoint has {}x{}", channels.len(), d.input, d.output)));
        }
        models.push(params);
    }
    Ok(TrainedModel { mode, window, scaler, models })
}

struct LineReader<'a> {
    lines: std::str::Lines<'a>,
    line_no: usize,
}

impl<'a> LineReader<'a> {
    fn next(&mut self) -> (usize, &'a str) {
        self.line_no += 1;
        (self.line_no, self.lines.next().unwrap_or(""))
    }
}

const FORECAST_HEADER_TAIL: [&str; 2] = ["assumed_sentiment", "combined_index"];

/// Render a forecast as `period,<financials>,assumed_sentiment,combined_index`.
pub fn write_forecast(series: &ForecastSeries) -> String {
    let mut out = String::from("period");
    for c in FINANCIAL_COLUMNS.iter().chain(&FORECAST_HEADER_TAIL) {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for (i, period) in series.periods().enumerate() {
        out.push_str(&period.to_string());
        for v in series.values[i].iter().chain([&series.assumed_sentiment[i], &series.combined_index[i]]) {
            out.push(',');
            out.push_str(&format_real(*v));
        }
        out.push('\n');
    }
    out
}

pub fn read_forecast(text: &str) -> Result<ForecastSeries, ForecastError> {
    let bad = |row: usize, reason: String| ForecastError::Table { row, reason };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| bad(1, "no data rows".into()))?;
    let expected: Vec<&str> = std::iter::once("period").chain(FINANCIAL_COLUMNS).chain(FORECAST_HEADER_TAIL).collect();
    if header.split(',').map(str::trim).ne(expected.iter().copied()) {
        return Err(bad(1, format!("header must be `{}`", expected.join(","))));
    }
    let mut start = None;
    let mut values = Vec::new();
    let mut assumed = Vec::new();
    let mut index = Vec::new();
    for (idx, line) in lines {
        let row = idx + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != expected.len() {
            return Err(bad(row, format!("expected {} cells, found {}", expected.len(), cells.len())));
        }
        let period = parse_period(cells[0]).map_err(|e| bad(row, e.to_string()))?;
        let expected_period = start.map(|s: crate::dataset::Period| s.offset(values.len()));
        match expected_period {
            Some(p) if p != period => return Err(bad(row, format!("expected period {p}, found {period}"))),
            None => start = Some(period),
            _ => {}
        }
        let mut nums = [0.0; NUM_FINANCIALS + 2];
        for (k, cell) in cells[1..].iter().enumerate() {
            nums[k] = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(row, format!("column `{}`: `{cell}` is not a finite number", expected[k + 1])))?;
        }
        let mut financial = [0.0; NUM_FINANCIALS];
        financial.copy_from_slice(&nums[..NUM_FINANCIALS]);
        values.push(financial);
        assumed.push(nums[NUM_FINANCIALS]);
        index.push(nums[NUM_FINANCIALS + 1]);
    }
    let start = start.ok_or_else(|| bad(2, "no data rows".into()))?;
    Ok(ForecastSeries { start, values, assumed_sentiment: assumed, combined_index: index })
}

/// Training report: a comment line with the configuration, then
/// `epoch,loss` rows (loss averaged over models; per-series mode adds one
/// column per series), then `validation_loss,<v>` when a split was held out.
pub fn write_report(report: &TrainingReport, config: &TrainingConfig) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# mode={} batching={} window={} hidden={} epochs={} lr={} clip={} seed={} validation_fraction={}",
        config.mode,
        config.batching,
        config.window,
        config.hidden,
        config.epochs,
        config.learning_rate,
        config.clip,
        config.seed,
        config.validation_fraction
    );
    let per_model = report.curves.len() > 1;
    out.push_str("epoch,loss");
    if per_model {
        for c in &report.curves {
            let _ = write!(out, ",loss_{}", c.label);
        }
    }
    out.push('\n');
    for (e, mean) in report.epoch_losses().iter().enumerate() {
        let _ = write!(out, "{},{}", e + 1, format_real(*mean));
        if per_model {
            for c in &report.curves {
                let _ = write!(out, ",{}", format_real(c.epoch_losses[e]));
            }
        }
        out.push('\n');
    }
    if let Some(v) = report.validation_loss() {
        let _ = writeln!(out, "validation_loss,{}", format_real(v));
    }
    out
}
