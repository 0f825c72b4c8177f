use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use super::{parse_period, DatasetError, QuarterlyRecord, FINANCIAL_COLUMNS, NUM_FINANCIALS};

const BASE_COLUMN: &str = "sentiment_score";
const EVENTS_COLUMN: &str = "events";
const EFFECTIVE_COLUMN: &str = "effective_sentiment";
const IGNORED_COLUMN: &str = "shares_outstanding";

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Linearly interpolate interior missing quarters instead of failing.
    pub allow_gaps: bool,
}

/// Read a records table from disk. See [`parse_records`].
pub fn load_records(path: impl AsRef<Path>, opts: LoadOptions) -> Result<Vec<QuarterlyRecord>, DatasetError> {
    let text = std::fs::read_to_string(path)?;
    parse_records(&text, opts)
}

#[derive(Clone, Copy)]
enum Optional {
    Base,
    Events,
    Effective,
    Ignored,
}

/// Parse a records table, returning records sorted by period.
///
/// The header must start with `period` followed by the eight financial
/// columns; `sentiment_score`, `events` and `effective_sentiment` may follow
/// in any order. A `shares_outstanding` column is dropped with a warning.
pub fn parse_records(text: &str, opts: LoadOptions) -> Result<Vec<QuarterlyRecord>, DatasetError> {
    parse_records_counting_gaps(text, opts).map(|(records, _)| records)
}

/// As [`parse_records`], also returning how many quarters were filled by
/// interpolation.
pub fn parse_records_counting_gaps(text: &str, opts: LoadOptions) -> Result<(Vec<QuarterlyRecord>, usize), DatasetError> {
    if text.trim().is_empty() {
        return Err(DatasetError::Empty);
    }
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let header = reader.headers()?.clone();
    let required: Vec<&str> = std::iter::once("period").chain(FINANCIAL_COLUMNS).collect();
    for (i, name) in required.iter().enumerate() {
        if header.get(i) != Some(name) {
            return Err(DatasetError::MissingColumn { row: 1, column: name.to_string() });
        }
    }
    let mut optional = Vec::new();
    let mut seen = HashSet::new();
    for name in header.iter().skip(required.len()) {
        let kind = match name {
            BASE_COLUMN => Optional::Base,
            EVENTS_COLUMN => Optional::Events,
            EFFECTIVE_COLUMN => Optional::Effective,
            IGNORED_COLUMN => {
                log::warn!("ignoring column `{IGNORED_COLUMN}`");
                Optional::Ignored
            }
            other => return Err(DatasetError::UnknownColumn(other.to_string())),
        };
        if !seen.insert(name.to_string()) {
            return Err(DatasetError::UnknownColumn(format!("{name} (repeated)")));
        }
        optional.push((name.to_string(), kind));
    }

    let mut rows: Vec<(usize, QuarterlyRecord)> = Vec::new();
    for result in reader.records() {
        let raw = result?;
        let row = raw.position().map(|p| p.line() as usize).unwrap_or(0);
        if raw.iter().all(str::is_empty) {
            continue;
        }
        let total = required.len() + optional.len();
        if raw.len() > total {
            return Err(DatasetError::BadCell {
                row,
                column: format!("#{}", total + 1),
                reason: "more cells than header columns".into(),
            });
        }
        let cell = |idx: usize, column: &str| {
            raw.get(idx).ok_or_else(|| DatasetError::MissingColumn { row, column: column.to_string() })
        };

        let period_text = cell(0, "period")?;
        let period = parse_period(period_text).map_err(|e| DatasetError::BadCell {
            row,
            column: "period".into(),
            reason: e.to_string(),
        })?;
        let mut financials = [0.0; NUM_FINANCIALS];
        for (k, column) in FINANCIAL_COLUMNS.iter().enumerate() {
            let value = parse_real(cell(k + 1, column)?, row, column)?;
            if *column == "wafer_shipment" && value < 0.0 {
                return Err(DatasetError::BadCell { row, column: column.to_string(), reason: "must be non-negative".into() });
            }
            financials[k] = value;
        }
        let mut record = QuarterlyRecord::new(period, financials);
        for (offset, (name, kind)) in optional.iter().enumerate() {
            let text = cell(required.len() + offset, name)?;
            match kind {
                Optional::Base => record.base_sentiment = parse_score(text, row, name)?,
                Optional::Effective => record.effective_sentiment = parse_score(text, row, name)?,
                Optional::Events => record.events = split_events(text),
                Optional::Ignored => {}
            }
        }
        rows.push((row, record));
    }
    if rows.is_empty() {
        return Err(DatasetError::Empty);
    }

    rows.sort_by_key(|(_, r)| r.period);
    for pair in rows.windows(2) {
        let (prev, (row, next)) = (&pair[0].1, &pair[1]);
        if prev.period == next.period {
            return Err(DatasetError::DuplicatePeriod { row: *row, period: next.period });
        }
        if !opts.allow_gaps && prev.period.succ() != next.period {
            return Err(DatasetError::Gap { row: *row, missing: prev.period.succ() });
        }
    }

    let mut records: Vec<QuarterlyRecord> = Vec::with_capacity(rows.len());
    let mut filled_total = 0;
    for (_, record) in rows {
        if let Some(prev) = records.last() {
            let missing = prev.period.quarters_until(record.period) - 1;
            if missing > 0 {
                let filled = interpolate(prev, &record, missing as usize);
                log::warn!("interpolated {} missing quarter(s) after {}", filled.len(), prev.period);
                filled_total += filled.len();
                records.extend(filled);
            }
        }
        records.push(record);
    }
    Ok((records, filled_total))
}

fn interpolate(from: &QuarterlyRecord, to: &QuarterlyRecord, missing: usize) -> Vec<QuarterlyRecord> {
    let (a, b) = (from.financials(), to.financials());
    let span = (missing + 1) as f64;
    let lerp = |x: f64, y: f64, t: f64| x + (y - x) * t;
    (1..=missing)
        .map(|k| {
            let t = k as f64 / span;
            let mut values = [0.0; NUM_FINANCIALS];
            for i in 0..NUM_FINANCIALS {
                values[i] = lerp(a[i], b[i], t);
            }
            let mut r = QuarterlyRecord::new(from.period.offset(k), values);
            r.base_sentiment = from.base_sentiment.zip(to.base_sentiment).map(|(x, y)| lerp(x, y, t));
            r.effective_sentiment = from.effective_sentiment.zip(to.effective_sentiment).map(|(x, y)| lerp(x, y, t));
            r
        })
        .collect()
}

fn parse_real(text: &str, row: usize, column: &str) -> Result<f64, DatasetError> {
    let bad = |reason: &str| DatasetError::BadCell { row, column: column.to_string(), reason: reason.to_string() };
    if text.is_empty() {
        return Err(bad("empty cell"));
    }
    let value: f64 = text.parse().map_err(|_| bad(&format!("`{text}` is not a number")))?;
    if !value.is_finite() {
        return Err(bad("value must be finite"));
    }
    Ok(value)
}

fn parse_score(text: &str, row: usize, column: &str) -> Result<Option<f64>, DatasetError> {
    if text.is_empty() {
        return Ok(None);
    }
    let value = parse_real(text, row, column)?;
    if !(0.0..=100.0).contains(&value) {
        return Err(DatasetError::BadCell { row, column: column.to_string(), reason: "score outside [0, 100]".into() });
    }
    Ok(Some(value))
}

fn split_events(text: &str) -> Vec<String> {
    text.split(';').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
}

/// Canonical decimal rendering: shortest round-trip digits, always with a
/// decimal point.
pub fn format_real(x: f64) -> String {
    let s = x.to_string();
    if x.is_finite() && !s.contains('.') {
        s + ".0"
    } else {
        s
    }
}

/// Render records in canonical table form.
///
/// `sentiment_score` and `events` are written together when any record has a
/// base score or events; `effective_sentiment` when any record has one.
pub fn write_records(records: &[QuarterlyRecord]) -> String {
    let with_base = records.iter().any(|r| r.base_sentiment.is_some() || !r.events.is_empty());
    let with_effective = records.iter().any(|r| r.effective_sentiment.is_some());
    let score = |s: Option<f64>| s.map(format_real).unwrap_or_default();

    let mut out = String::from("period");
    for c in FINANCIAL_COLUMNS {
        out.push(',');
        out.push_str(c);
    }
    if with_base {
        let _ = write!(out, ",{BASE_COLUMN},{EVENTS_COLUMN}");
    }
    if with_effective {
        let _ = write!(out, ",{EFFECTIVE_COLUMN}");
    }
    out.push('\n');
    for r in records {
        out.push_str(&r.period.to_string());
        for v in r.financials() {
            out.push(',');
            out.push_str(&format_real(v));
        }
        if with_base {
            let _ = write!(out, ",{},{}", score(r.base_sentiment), r.events.join(";"));
        }
        if with_effective {
            let _ = write!(out, ",{}", score(r.effective_sentiment));
        }
        out.push('\n');
    }
    out
}
