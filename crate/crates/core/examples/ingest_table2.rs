//! Load the bundled quarterly table, fit the feature scaler and build
//! supervised windows from it.

use semitrend::dataset::{make_windows, table2_records, FeatureScaler, FEATURE_NAMES};
use semitrend::events::{enrich, EventCalendar};

fn main() -> semitrend::Result<()> {
    let records = enrich(&table2_records(), &EventCalendar::bundled())?;
    println!("{} quarters, {} … {}", records.len(), records[0].period, records[records.len() - 1].period);

    let scaler = FeatureScaler::fit(&records)?;
    for (name, (lo, hi)) in FEATURE_NAMES.iter().zip(scaler.ranges()) {
        println!("{name:>24}  {lo:>12} .. {hi}");
    }

    let rows: Vec<_> = records.iter().map(|r| r.features().map(|f| scaler.normalize(&f))).collect::<Result<_, _>>()?;
    let windows = make_windows(&rows, 8)?;
    println!("{} windows of 8 quarters; first target {:?}", windows.len(), &windows[0].target[..3]);
    Ok(())
}
