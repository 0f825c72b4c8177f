//! Train on the bundled table, roll 24 quarters forward under a scenario
//! with one future shock, and locate turning points of the combined index.

use semitrend::dataset::{table2_records, Period, FINANCIAL_COLUMNS};
use semitrend::events::{enrich, EventCalendar, EventSpec, Polarity, Scope};
use semitrend::forecast::{find_extrema, model_from_str, model_to_string, roll_forward, train, ScenarioCalendar, TrainingConfig};
use semitrend::sentiment::SentimentScore;

fn main() -> semitrend::Result<()> {
    let history = enrich(&table2_records(), &EventCalendar::bundled())?;
    let config = TrainingConfig { epochs: 300, ..TrainingConfig::default() };
    let (model, report) = train(&history, &config)?;
    println!("training loss {:.4} -> {:.4}", report.first_loss(), report.final_loss());

    // checkpoints round-trip bit for bit
    let model = model_from_str(&model_to_string(&model))?;

    let q = |y, n| Period::new(y, n).expect("valid period");
    let downturn = EventSpec::new("Demand slump", Polarity::Negative, 0.8, Scope::External, q(2005, 1), q(2005, 4))?;
    let scenario = ScenarioCalendar::new(EventCalendar::new(vec![downturn])?, SentimentScore::new(60.0)?);
    let forecast = roll_forward(&model, &history, 24, &scenario)?;

    println!("{:>8} {:>10} {:>10} {:>9} {:>6}", "period", FINANCIAL_COLUMNS[0], FINANCIAL_COLUMNS[3], "sentiment", "index");
    for (i, p) in forecast.periods().enumerate() {
        println!(
            "{p:>8} {:>10.1} {:>10.1} {:>9.2} {:>6.3}",
            forecast.values[i][0], forecast.values[i][3], forecast.assumed_sentiment[i], forecast.combined_index[i]
        );
    }
    for e in find_extrema(&forecast.combined_index, forecast.start)? {
        println!("{} at {}", e.kind, e.period);
    }
    Ok(())
}
