//! Stage commands behind the `semitrend` binary.
//!
//! Every command computes all of its outputs in memory first and only then
//! writes them, each through a temporary file renamed into place. A failing
//! command leaves the filesystem untouched.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dataset::{
    format_real, parse_period, parse_records_counting_gaps, table2_csv, write_records, LoadOptions, Period, QuarterlyRecord,
    DatasetError, FINANCIAL_COLUMNS,
};
use crate::events::{enrich, EventCalendar};
use crate::forecast::{
    combined_index, find_extrema, model_from_str, model_to_string, read_forecast, roll_forward, train, write_forecast,
    write_report, Batching, ExtremumKind, ForecastSeries, Mode, ScenarioCalendar, TrainingConfig,
};
use crate::sentiment::{score, Lexicon};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "semitrend", version, about = "Sentiment-enhanced quarterly forecasting")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a records table and write it in canonical form.
    Ingest {
        /// Records table; omit when using --fixture.
        records: Option<PathBuf>,
        #[arg(long, value_enum)]
        fixture: Option<Fixture>,
        /// Interpolate missing interior quarters instead of failing.
        #[arg(long)]
        allow_gaps: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a directory of `YYYY-QN.txt` transcripts.
    Score {
        transcripts: PathBuf,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Attach events and effective sentiment to a records table.
    Enrich {
        records: PathBuf,
        /// Base scores from `score`, overriding any in the records table.
        #[arg(long)]
        scores: Option<PathBuf>,
        #[arg(long)]
        calendar: Option<PathBuf>,
        #[arg(long)]
        allow_gaps: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a model on enriched records; also writes `<out>.report`.
    Train {
        records: PathBuf,
        #[command(flatten)]
        training: TrainArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Roll a trained model forward from the end of the records.
    Forecast {
        model: PathBuf,
        records: PathBuf,
        #[arg(long, default_value_t = 24)]
        horizon: usize,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Split a forecast table into plot-ready files under a directory.
    Report {
        forecast: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage, writing all artifacts under one directory.
    Pipeline {
        records: Option<PathBuf>,
        #[arg(long, value_enum)]
        fixture: Option<Fixture>,
        #[arg(long)]
        transcripts: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        calendar: Option<PathBuf>,
        #[arg(long)]
        scenario: Option<PathBuf>,
        #[arg(long)]
        allow_gaps: bool,
        #[command(flatten)]
        training: TrainArgs,
        #[arg(long, default_value_t = 24)]
        horizon: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Fixture {
    Table2,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[arg(long, default_value_t = 8)]
    pub window: usize,
    #[arg(long, default_value_t = 32)]
    pub hidden: usize,
    #[arg(long, default_value_t = 2000)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.005)]
    pub lr: f64,
    /// Global gradient-norm clip; `inf` disables clipping.
    #[arg(long, default_value_t = 1.0)]
    pub clip: f64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value = "multivariate")]
    pub mode: Mode,
    #[arg(long, default_value = "per-sample")]
    pub batching: Batching,
    #[arg(long, default_value_t = 0.0)]
    pub validation_fraction: f64,
}

impl TrainArgs {
    pub fn to_config(&self) -> TrainingConfig {
        TrainingConfig {
            window: self.window,
            hidden: self.hidden,
            epochs: self.epochs,
            learning_rate: self.lr,
            clip: self.clip,
            seed: self.seed,
            mode: self.mode,
            batching: self.batching,
            validation_fraction: self.validation_fraction,
        }
    }
}

/// Where a records table comes from.
#[derive(Debug, Clone)]
pub enum RecordSource {
    File(PathBuf),
    Fixture(Fixture),
}

impl RecordSource {
    fn from_args(records: Option<PathBuf>, fixture: Option<Fixture>) -> Result<Self> {
        match (records, fixture) {
            (Some(p), None) => Ok(RecordSource::File(p)),
            (None, Some(f)) => Ok(RecordSource::Fixture(f)),
            (Some(_), Some(_)) => Err(Error::Usage("give either a records path or --fixture, not both".into())),
            (None, None) => Err(Error::Usage("a records path or --fixture is required".into())),
        }
    }

    fn text(&self) -> Result<String> {
        match self {
            RecordSource::File(p) => read_text(p),
            RecordSource::Fixture(Fixture::Table2) => Ok(table2_csv().to_string()),
        }
    }

    fn path(&self) -> Option<&Path> {
        match self {
            RecordSource::File(p) => Some(p),
            RecordSource::Fixture(_) => None,
        }
    }
}

/// Files a command will write, plus the summary it prints.
#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<(PathBuf, String)>,
    pub summary: String,
}

impl Outcome {
    /// Write every file atomically.
    pub fn commit(&self) -> Result<()> {
        for (path, contents) in &self.files {
            write_atomic(path, contents)?;
        }
        Ok(())
    }
}

/// Parse arguments, run the command and write its outputs.
pub fn run(cli: Cli) -> Result<String> {
    let outcome = plan(cli.command)?;
    outcome.commit()?;
    Ok(outcome.summary)
}

/// Run a command without touching the filesystem beyond reading inputs.
pub fn plan(command: Command) -> Result<Outcome> {
    match command {
        Command::Ingest { records, fixture, allow_gaps, out } => {
            let source = RecordSource::from_args(records, fixture)?;
            require_inputs(source.path().into_iter())?;
            cmd_ingest(&source, LoadOptions { allow_gaps }, out.as_deref())
        }
        Command::Score { transcripts, lexicon, out } => {
            require_inputs([transcripts.as_path()].into_iter().chain(lexicon.as_deref()))?;
            cmd_score(&transcripts, lexicon.as_deref(), &out)
        }
        Command::Enrich { records, scores, calendar, allow_gaps, out } => {
            require_inputs([records.as_path()].into_iter().chain(scores.as_deref()).chain(calendar.as_deref()))?;
            cmd_enrich(&records, scores.as_deref(), calendar.as_deref(), LoadOptions { allow_gaps }, &out)
        }
        Command::Train { records, training, out } => {
            let config = training.to_config();
            config.validate()?;
            require_inputs([records.as_path()].into_iter())?;
            cmd_train(&records, &config, &out)
        }
        Command::Forecast { model, records, horizon, scenario, out } => {
            check_horizon(horizon)?;
            require_inputs([model.as_path(), records.as_path()].into_iter().chain(scenario.as_deref()))?;
            cmd_forecast(&model, &records, horizon, scenario.as_deref(), &out)
        }
        Command::Report { forecast, out } => {
            require_inputs([forecast.as_path()].into_iter())?;
            cmd_report(&forecast, &out)
        }
        Command::Pipeline { records, fixture, transcripts, lexicon, calendar, scenario, allow_gaps, training, horizon, out } => {
            let source = RecordSource::from_args(records, fixture)?;
            let config = training.to_config();
            config.validate()?;
            check_horizon(horizon)?;
            require_inputs(
                source
                    .path()
                    .into_iter()
                    .chain(transcripts.as_deref())
                    .chain(lexicon.as_deref())
                    .chain(calendar.as_deref())
                    .chain(scenario.as_deref()),
            )?;
            let inputs = PipelineInputs {
                source,
                transcripts,
                lexicon,
                calendar,
                scenario,
                load: LoadOptions { allow_gaps },
                config,
                horizon,
            };
            cmd_pipeline(&inputs, &out)
        }
    }
}

/// Validate a records table; with `out`, write it in canonical form.
pub fn cmd_ingest(source: &RecordSource, opts: LoadOptions, out: Option<&Path>) -> Result<Outcome> {
    let text = source.text()?;
    let (records, gaps) = parse_records_counting_gaps(&text, opts).map_err(|e| located(source.path(), e))?;
    let first = records.first().expect("parser rejects empty tables").period;
    let last = records.last().expect("parser rejects empty tables").period;
    let summary = format!("{} records, {first} … {last}, {gaps} gaps", records.len());
    let files = out.map(|p| vec![(p.to_path_buf(), write_records(&records))]).unwrap_or_default();
    Ok(Outcome { files, summary })
}

/// Score every `YYYY-QN.txt` file in `dir`; other files are skipped.
pub fn cmd_score(dir: &Path, lexicon: Option<&Path>, out: &Path) -> Result<Outcome> {
    let scores = score_dir(dir, lexicon)?;
    let summary = match (scores.first(), scores.last()) {
        (Some((a, _)), Some((b, _))) => format!("{} transcripts scored, {a} … {b}", scores.len()),
        _ => "0 transcripts scored".to_string(),
    };
    Ok(Outcome { files: vec![(out.to_path_buf(), scores_to_string(&scores))], summary })
}

/// Attach calendar events and effective sentiment to each record.
pub fn cmd_enrich(records: &Path, scores: Option<&Path>, calendar: Option<&Path>, opts: LoadOptions, out: &Path) -> Result<Outcome> {
    let mut recs = load(records, opts)?;
    if let Some(path) = scores {
        let table = parse_scores(&read_text(path)?).map_err(|e| located(Some(path), e))?;
        apply_scores(&mut recs, &table);
    }
    let calendar = load_calendar(calendar)?;
    let enriched = enrich(&recs, &calendar)?;
    let summary = enrich_summary(&enriched);
    Ok(Outcome { files: vec![(out.to_path_buf(), write_records(&enriched))], summary })
}

/// Train on enriched records, writing the model bundle to `out` and the
/// training report beside it.
pub fn cmd_train(records: &Path, config: &TrainingConfig, out: &Path) -> Result<Outcome> {
    let recs = load(records, LoadOptions::default())?;
    let (model, report) = train(&recs, config)?;
    let mut summary = format!(
        "trained {} model(s) on {} records: loss {} → {}",
        model.models.len(),
        recs.len(),
        format_real(report.first_loss()),
        format_real(report.final_loss())
    );
    if let Some(v) = report.validation_loss() {
        let _ = write!(summary, ", validation {}", format_real(v));
    }
    Ok(Outcome {
        files: vec![(out.to_path_buf(), model_to_string(&model)), (report_path(out), write_report(&report, config))],
        summary,
    })
}

/// Forecast `horizon` quarters past the records and summarize the extrema
/// of the combined index.
pub fn cmd_forecast(model: &Path, records: &Path, horizon: usize, scenario: Option<&Path>, out: &Path) -> Result<Outcome> {
    let model = model_from_str(&read_text(model)?).map_err(|e| Error::Usage(format!("{}: {e}", model.display())))?;
    let history = load(records, LoadOptions::default())?;
    let scenario_text = scenario.map(read_text).transpose()?;
    let (series, summary) = forecast_from(&model, &history, horizon, scenario_text.as_deref(), scenario)?;
    Ok(Outcome { files: vec![(out.to_path_buf(), write_forecast(&series))], summary })
}

/// Write `<series>.csv`, `combined_index.csv` and `assumed_sentiment.csv`
/// under `out`.
pub fn cmd_report(forecast: &Path, out: &Path) -> Result<Outcome> {
    let series = read_forecast(&read_text(forecast)?).map_err(|e| Error::Usage(format!("{}: {e}", forecast.display())))?;
    Ok(report_files(&series, out))
}

/// Inputs of a full pipeline run.
#[derive(Debug, Clone)]
pub struct PipelineInputs {
    pub source: RecordSource,
    /// Transcripts whose scores replace the base sentiment of the records.
    pub transcripts: Option<PathBuf>,
    pub lexicon: Option<PathBuf>,
    pub calendar: Option<PathBuf>,
    pub scenario: Option<PathBuf>,
    pub load: LoadOptions,
    pub config: TrainingConfig,
    pub horizon: usize,
}

/// Every stage in sequence. Artifacts land under `out`: `records.csv`,
/// `scores.csv` (with transcripts), `enriched.csv`, `model.txt`,
/// `model.txt.report`, `forecast.csv` and the `report/` directory.
pub fn cmd_pipeline(inputs: &PipelineInputs, out: &Path) -> Result<Outcome> {
    let mut files = Vec::new();
    let mut summary = String::new();

    let text = inputs.source.text()?;
    let (mut records, gaps) = parse_records_counting_gaps(&text, inputs.load).map_err(|e| located(inputs.source.path(), e))?;
    let _ = writeln!(
        summary,
        "ingest: {} records, {} … {}, {gaps} gaps",
        records.len(),
        records[0].period,
        records[records.len() - 1].period
    );
    files.push((out.join("records.csv"), write_records(&records)));

    if let Some(dir) = &inputs.transcripts {
        let scores = score_dir(dir, inputs.lexicon.as_deref())?;
        let _ = writeln!(summary, "score: {} transcripts", scores.len());
        apply_scores(&mut records, &scores.iter().copied().collect());
        files.push((out.join("scores.csv"), scores_to_string(&scores)));
    }

    let calendar = load_calendar(inputs.calendar.as_deref())?;
    let enriched = enrich(&records, &calendar)?;
    let _ = writeln!(summary, "enrich: {}", enrich_summary(&enriched));
    files.push((out.join("enriched.csv"), write_records(&enriched)));

    let (model, report) = train(&enriched, &inputs.config)?;
    let _ = writeln!(
        summary,
        "train: loss {} → {}",
        format_real(report.first_loss()),
        format_real(report.final_loss())
    );
    let model_path = out.join("model.txt");
    files.push((report_path(&model_path), write_report(&report, &inputs.config)));
    files.push((model_path, model_to_string(&model)));

    let scenario_text = inputs.scenario.as_deref().map(read_text).transpose()?;
    let (series, forecast_summary) =
        forecast_from(&model, &enriched, inputs.horizon, scenario_text.as_deref(), inputs.scenario.as_deref())?;
    let _ = writeln!(summary, "forecast: {}", forecast_summary.trim_end().replace('\n', "\n  "));
    files.push((out.join("forecast.csv"), write_forecast(&series)));

    let report = report_files(&series, &out.join("report"));
    let _ = write!(summary, "report: {}", report.summary);
    files.extend(report.files);
    Ok(Outcome { files, summary })
}

/// Path of the training report written next to a model bundle.
pub fn report_path(model: &Path) -> PathBuf {
    let mut s = model.as_os_str().to_owned();
    s.push(".report");
    PathBuf::from(s)
}

/// Write `contents` to a temporary file in the target directory, then
/// rename it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source| Error::Io { path: path.display().to_string(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

fn forecast_from(
    model: &crate::forecast::TrainedModel,
    history: &[QuarterlyRecord],
    horizon: usize,
    scenario_text: Option<&str>,
    scenario_path: Option<&Path>,
) -> Result<(ForecastSeries, String)> {
    let scenario = match (scenario_text, scenario_path) {
        (Some(text), Some(path)) => {
            ScenarioCalendar::parse(text, history).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?
        }
        _ => ScenarioCalendar::carry_forward(history)?,
    };
    let series = roll_forward(model, history, horizon, &scenario)?;
    let last = series.start.offset(series.horizon() - 1);
    let mut summary = format!("{} quarters, {} … {last}\n", series.horizon(), series.start);
    if scenario_text.is_none() {
        let _ = writeln!(
            summary,
            "no scenario given: baseline sentiment {} carried forward",
            format_real(scenario.baseline_sentiment.value())
        );
    }
    match find_extrema(&series.combined_index, series.start) {
        Ok(extrema) if extrema.is_empty() => summary.push_str("no peaks or troughs in the combined index\n"),
        Ok(extrema) => {
            for e in extrema {
                let _ = writeln!(summary, "{} {} (index {})", e.kind, e.period, format_real(series.combined_index[e.position]));
            }
        }
        Err(e) => {
            let _ = writeln!(summary, "{e}");
        }
    }
    Ok((series, summary))
}

fn report_files(series: &ForecastSeries, out: &Path) -> Outcome {
    let periods: Vec<Period> = series.periods().collect();
    let mut files = Vec::new();
    for (k, name) in FINANCIAL_COLUMNS.iter().enumerate() {
        let values = series.series(k);
        let normalized = &combined_index(&[&values])[..];
        let mut text = String::from("period,value,normalized\n");
        for ((p, v), n) in periods.iter().zip(&values).zip(normalized) {
            let _ = writeln!(text, "{p},{},{}", format_real(*v), format_real(*n));
        }
        files.push((out.join(format!("{name}.csv")), text));
    }

    let mut marks = vec![""; periods.len()];
    if let Ok(extrema) = find_extrema(&series.combined_index, series.start) {
        for e in extrema {
            marks[e.position] = match e.kind {
                ExtremumKind::Peak => "peak",
                ExtremumKind::Trough => "trough",
            };
        }
    }
    let mut index = String::from("period,combined_index,extremum\n");
    for ((p, v), m) in periods.iter().zip(&series.combined_index).zip(&marks) {
        let _ = writeln!(index, "{p},{},{m}", format_real(*v));
    }
    files.push((out.join("combined_index.csv"), index));

    let mut sentiment = String::from("period,assumed_sentiment\n");
    for (p, v) in periods.iter().zip(&series.assumed_sentiment) {
        let _ = writeln!(sentiment, "{p},{}", format_real(*v));
    }
    files.push((out.join("assumed_sentiment.csv"), sentiment));

    let summary = format!("{} files under {}", files.len(), out.display());
    Outcome { files, summary }
}

fn score_dir(dir: &Path, lexicon: Option<&Path>) -> Result<Vec<(Period, f64)>> {
    let lexicon = match lexicon {
        Some(p) => Lexicon::load(p)?,
        None => Lexicon::bundled(),
    };
    let entries = std::fs::read_dir(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
    let mut scores = BTreeMap::new();
    for entry in entries {
        let path = entry.map_err(|source| Error::Io { path: dir.display().to_string(), source })?.path();
        let Some(period) = transcript_period(&path) else {
            log::warn!("skipping {}: not named YYYY-QN.txt", path.display());
            continue;
        };
        let text = read_text(&path)?;
        scores.insert(period, score(&text, &lexicon).value());
    }
    Ok(scores.into_iter().collect())
}

/// `2001-Q3.txt` → 2001 Q3.
fn transcript_period(path: &Path) -> Option<Period> {
    if path.extension()? != "txt" {
        return None;
    }
    let stem = path.file_stem()?.to_str()?;
    let (year, quarter) = stem.split_once("-Q")?;
    parse_period(&format!("{year} Q{quarter}")).ok()
}

fn scores_to_string(scores: &[(Period, f64)]) -> String {
    let mut out = String::from("period,sentiment_score\n");
    for (p, s) in scores {
        let _ = writeln!(out, "{p},{}", format_real(*s));
    }
    out
}

fn parse_scores(text: &str) -> Result<BTreeMap<Period, f64>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers()?.clone();
    for column in ["period", "sentiment_score"] {
        if !headers.iter().any(|h| h == column) {
            return Err(DatasetError::MissingColumn { row: 1, column: column.into() });
        }
    }
    let col = |name| headers.iter().position(|h| h == name).expect("checked above");
    let (pc, sc) = (col("period"), col("sentiment_score"));
    let mut out = BTreeMap::new();
    for (i, row) in reader.records().enumerate() {
        let row_no = i + 2;
        let row = row?;
        let period = parse_period(row.get(pc).unwrap_or_default())?;
        let cell = row.get(sc).unwrap_or_default();
        let value: f64 = cell.parse().ok().filter(|v: &f64| (0.0..=100.0).contains(v)).ok_or_else(|| DatasetError::BadCell {
            row: row_no,
            column: "sentiment_score".into(),
            reason: format!("`{cell}` is not a score in [0, 100]"),
        })?;
        if out.insert(period, value).is_some() {
            return Err(DatasetError::DuplicatePeriod { row: row_no, period });
        }
    }
    Ok(out)
}

fn apply_scores(records: &mut [QuarterlyRecord], scores: &BTreeMap<Period, f64>) {
    let mut used = 0;
    for r in records.iter_mut() {
        if let Some(&s) = scores.get(&r.period) {
            r.base_sentiment = Some(s);
            used += 1;
        }
    }
    if used < scores.len() {
        log::warn!("{} score(s) have no matching record", scores.len() - used);
    }
}

fn enrich_summary(records: &[QuarterlyRecord]) -> String {
    let with_events = records.iter().filter(|r| !r.events.is_empty()).count();
    format!("{} records, {with_events} with active events", records.len())
}

fn load_calendar(path: Option<&Path>) -> Result<EventCalendar> {
    match path {
        Some(p) => EventCalendar::load(p).map_err(|e| Error::Usage(format!("{}: {e}", p.display()))),
        None => Ok(EventCalendar::bundled()),
    }
}

fn load(path: &Path, opts: LoadOptions) -> Result<Vec<QuarterlyRecord>> {
    let text = read_text(path)?;
    parse_records_counting_gaps(&text, opts).map(|(r, _)| r).map_err(|e| located(Some(path), e))
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

fn located(path: Option<&Path>, e: DatasetError) -> Error {
    match path {
        Some(p) => Error::Usage(format!("{}: {e}", p.display())),
        None => e.into(),
    }
}

fn check_horizon(horizon: usize) -> Result<()> {
    if horizon < 1 {
        return Err(Error::Usage("--horizon must be at least 1".into()));
    }
    Ok(())
}

fn require_inputs<'a>(paths: impl Iterator<Item = &'a Path>) -> Result<()> {
    for p in paths {
        if !p.exists() {
            return Err(Error::Io {
                path: p.display().to_string(),
                source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such file or directory"),
            });
        }
    }
    Ok(())
}
